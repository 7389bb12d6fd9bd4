//! Truncated power series in `t` with tower coefficients.
//!
//! A series is a dense `Poly<K>` (coefficient of `tᵏ` at index `k`); every
//! operation takes the truncation order `n` and returns a result mod `tⁿ`.

use crate::scalar::Scalar;
use crate::tower::{is_zero, trim, Elem, Poly, Tower};

pub(crate) fn coeff<K: Scalar>(tower: &Tower<K>, depth: usize, s: &[Elem<K>], k: usize) -> Elem<K> {
    s.get(k).cloned().unwrap_or_else(|| tower.zero(depth))
}

pub(crate) fn mul<K: Scalar>(tower: &Tower<K>, depth: usize, a: &[Elem<K>], b: &[Elem<K>], n: usize) -> Poly<K> {
    if a.is_empty() || b.is_empty() || n == 0 {
        return Vec::new();
    }
    let len = (a.len() + b.len() - 1).min(n);
    let mut out = vec![tower.zero(depth); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if is_zero(y) {
                continue;
            }
            let term = tower.mul(depth, x, y);
            out[i + j] = tower.add(&out[i + j], &term);
        }
    }
    trim(&mut out);
    out
}

/// `1/a mod tⁿ` given the inverse of `a₀`.
pub(crate) fn inverse<K: Scalar>(tower: &Tower<K>, depth: usize, a: &[Elem<K>], a0_inv: &Elem<K>, n: usize) -> Poly<K> {
    let mut out: Poly<K> = Vec::with_capacity(n);
    for k in 0..n {
        if k == 0 {
            out.push(a0_inv.clone());
            continue;
        }
        let mut acc = tower.zero(depth);
        for j in 1..=k.min(a.len().saturating_sub(1)) {
            if is_zero(&a[j]) || is_zero(&out[k - j]) {
                continue;
            }
            acc = tower.add(&acc, &tower.mul(depth, &a[j], &out[k - j]));
        }
        out.push(tower.neg(&tower.mul(depth, &acc, a0_inv)));
    }
    trim(&mut out);
    out
}

/// `P(γ·tᵉ, y(t)) mod tⁿ` for `P` given y-major (row `b` is the x-polynomial
/// multiplying `yᵇ`).
pub(crate) fn compose<K: Scalar>(
    tower: &Tower<K>,
    depth: usize,
    rows: &[Poly<K>],
    x_coeff: &Elem<K>,
    e: u32,
    y: &[Elem<K>],
    n: usize,
) -> Poly<K> {
    let max_a = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut gamma_pows = Vec::with_capacity(max_a);
    for a in 0..max_a {
        if a == 0 {
            gamma_pows.push(tower.one(depth));
        } else {
            let next = tower.mul(depth, &gamma_pows[a - 1], x_coeff);
            gamma_pows.push(next);
        }
    }
    let x_part = |row: &[Elem<K>]| -> Poly<K> {
        let mut out: Poly<K> = Vec::new();
        for (a, c) in row.iter().enumerate() {
            let k = a * e as usize;
            if k >= n {
                break;
            }
            if is_zero(c) {
                continue;
            }
            if out.len() <= k {
                out.resize(k + 1, tower.zero(depth));
            }
            out[k] = tower.mul(depth, c, &gamma_pows[a]);
        }
        trim(&mut out);
        out
    };
    let mut acc: Poly<K> = Vec::new();
    for row in rows.iter().rev() {
        acc = mul(tower, depth, &acc, y, n);
        acc = tower.p_add(&acc, &x_part(row));
    }
    acc
}

/// Index of the first nonzero coefficient.
pub(crate) fn valuation<K: Scalar>(s: &[Elem<K>]) -> Option<usize> {
    s.iter().position(|c| !is_zero(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn t() -> Tower<BigRational> {
        Tower::default()
    }

    fn s(v: &[i64]) -> Poly<BigRational> {
        let mut out: Poly<BigRational> = v.iter().map(|&c| t().integer(c, 0)).collect();
        trim(&mut out);
        out
    }

    #[test]
    fn truncated_product() {
        // (1 + t)(1 - t) = 1 - t² ; mod t² → 1
        assert_eq!(mul(&t(), 0, &s(&[1, 1]), &s(&[1, -1]), 2), s(&[1]));
        assert_eq!(mul(&t(), 0, &s(&[1, 1]), &s(&[1, -1]), 5), s(&[1, 0, -1]));
    }

    #[test]
    fn geometric_inverse() {
        let inv = inverse(&t(), 0, &s(&[1, -1]), &t().one(0), 6);
        assert_eq!(inv, s(&[1, 1, 1, 1, 1, 1]));
    }

    #[test]
    fn compose_cusp() {
        // y² − x³ at (t², t³) vanishes identically.
        let rows = vec![s(&[0, 0, 0, -1]), Vec::new(), s(&[1])];
        let out = compose(&t(), 0, &rows, &t().one(0), 2, &s(&[0, 0, 0, 1]), 20);
        assert!(out.is_empty());
        // x²y at (t², t³) = t⁷
        let rows = vec![Vec::new(), s(&[0, 0, 1])];
        let out = compose(&t(), 0, &rows, &t().one(0), 2, &s(&[0, 0, 0, 1]), 20);
        assert_eq!(valuation(&out), Some(7));
    }
}
