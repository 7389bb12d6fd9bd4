//! Bivariate polynomials over an extension tower.
//!
//! `BiPoly` stores a sparse map from exponent pairs `(a, b)` (for `xᵃ yᵇ`) to
//! nonzero tower elements. Algorithms that treat a polynomial as an element of
//! `T[x][y]` (gcd, squarefree part, resultant) convert to a dense y-major
//! layout whose coefficients are univariate polynomials in `x`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, One};

use crate::error::{Error, Result};
use crate::scalar::{Extended, Scalar};
use crate::tower::{is_zero, join_terms, render_poly, render_term, AlgebraicNumber, Dyn, Elem, Halt, Poly, Tower};

/// Sparse bivariate polynomial in `x`, `y`.
#[derive(Clone)]
pub struct BiPoly<K: Scalar> {
    tower: Tower<K>,
    terms: BTreeMap<(u32, u32), Elem<K>>,
    ord: Option<u32>,
    total_degree: u32,
    degree_y: u32,
}

/// Dense univariate polynomial over a tower, lowest degree first.
#[derive(Clone)]
pub struct UniPoly<K: Scalar> {
    tower: Tower<K>,
    coeffs: Poly<K>,
}

impl<K: Scalar> BiPoly<K> {
    pub(crate) fn from_map(tower: &Tower<K>, mut terms: BTreeMap<(u32, u32), Elem<K>>) -> Self {
        terms.retain(|_, c| !is_zero(c));
        let ord = terms.keys().map(|&(a, b)| a + b).min();
        let total_degree = terms.keys().map(|&(a, b)| a + b).max().unwrap_or(0);
        let degree_y = terms.keys().map(|&(_, b)| b).max().unwrap_or(0);
        BiPoly { tower: tower.clone(), terms, ord, total_degree, degree_y }
    }

    pub fn zero(tower: &Tower<K>) -> Self {
        Self::from_map(tower, BTreeMap::new())
    }

    pub fn constant(tower: &Tower<K>, k: K) -> Self {
        Self::monomial(tower, 0, 0, k)
    }

    pub fn one(tower: &Tower<K>) -> Self {
        Self::constant(tower, K::one())
    }

    /// `k · xᵃ yᵇ`
    pub fn monomial(tower: &Tower<K>, a: u32, b: u32, k: K) -> Self {
        let mut m = BTreeMap::new();
        m.insert((a, b), tower.constant(k, tower.depth()));
        Self::from_map(tower, m)
    }

    pub fn x(tower: &Tower<K>) -> Self {
        Self::monomial(tower, 1, 0, K::one())
    }

    pub fn y(tower: &Tower<K>) -> Self {
        Self::monomial(tower, 0, 1, K::one())
    }

    /// Builds a polynomial over the base field from `((a, b), coefficient)` pairs.
    /// Repeated exponents are summed.
    pub fn from_terms(tower: &Tower<K>, terms: impl IntoIterator<Item = ((u32, u32), K)>) -> Self {
        let d = tower.depth();
        let mut m: BTreeMap<(u32, u32), Elem<K>> = BTreeMap::new();
        for (key, k) in terms {
            let c = tower.constant(k, d);
            let entry = m.entry(key).or_insert_with(|| tower.zero(d));
            *entry = tower.add(entry, &c);
        }
        Self::from_map(tower, m)
    }

    pub fn tower(&self) -> &Tower<K> {
        &self.tower
    }

    pub(crate) fn depth(&self) -> usize {
        self.tower.depth()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn support(&self) -> Vec<(u32, u32)> {
        self.terms.keys().copied().collect()
    }

    pub(crate) fn raw_terms(&self) -> &BTreeMap<(u32, u32), Elem<K>> {
        &self.terms
    }

    pub fn coefficient(&self, a: u32, b: u32) -> AlgebraicNumber<K> {
        match self.terms.get(&(a, b)) {
            Some(c) => AlgebraicNumber::from_elem(&self.tower, c.clone()),
            None => AlgebraicNumber::zero(&self.tower),
        }
    }

    pub(crate) fn coeff_elem(&self, a: u32, b: u32) -> Elem<K> {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(|| self.tower.zero(self.depth()))
    }

    /// Order at the origin: the lowest total degree of a nonzero term.
    pub fn ord(&self) -> Extended<u32> {
        match self.ord {
            Some(o) => Extended::Finite(o),
            None => Extended::Infinite,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.total_degree
    }

    pub fn degree_y(&self) -> u32 {
        self.degree_y
    }

    pub fn degree_x(&self) -> u32 {
        self.terms.keys().map(|&(a, _)| a).max().unwrap_or(0)
    }

    pub fn vanishes_at_origin(&self) -> bool {
        !self.terms.contains_key(&(0, 0))
    }

    /// True iff the coefficient of `y^(ord p)` is nonzero, i.e. `p(0, y)`
    /// has order exactly `ord p`.
    pub fn regular_in_y(&self) -> Result<bool> {
        let ord = self.ord.ok_or(Error::ZeroPolynomial)?;
        Ok(self.terms.contains_key(&(0, ord)))
    }

    /// Re-expresses the polynomial over an extension of its tower.
    pub fn lift_to(&self, tower: &Tower<K>) -> Result<Self> {
        if !self.tower.is_prefix_of(tower) {
            return Err(Error::TowerMismatch);
        }
        let (from, to) = (self.depth(), tower.depth());
        let terms = self
            .terms
            .iter()
            .map(|(&k, c)| (k, tower.lift(c.clone(), from, to)))
            .collect();
        Ok(Self::from_map(tower, terms))
    }

    fn aligned(&self, other: &Self) -> (Tower<K>, Self, Self) {
        if self.tower.is_prefix_of(&other.tower) {
            let lifted = self.lift_to(&other.tower).expect("prefix tower");
            (other.tower.clone(), lifted, other.clone())
        } else if other.tower.is_prefix_of(&self.tower) {
            let lifted = other.lift_to(&self.tower).expect("prefix tower");
            (self.tower.clone(), self.clone(), lifted)
        } else {
            panic!("bivariate polynomials over unrelated towers");
        }
    }

    pub(crate) fn map_coefficients(&self, tower: &Tower<K>, f: impl Fn(&Elem<K>) -> Elem<K>) -> Self {
        let terms = self.terms.iter().map(|(&k, c)| (k, f(c))).collect();
        Self::from_map(tower, terms)
    }

    pub fn scale(&self, c: &AlgebraicNumber<K>) -> Self {
        let (t, p) = (&self.tower, self);
        let c = c.lift_to(t).expect("scalar from a sub-tower");
        let d = t.depth();
        p.map_coefficients(t, |x| t.mul(d, x, c.elem()))
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut result = Self::one(&self.tower);
        for _ in 0..exp {
            result = &result * self;
        }
        result
    }

    /// `∂p/∂y`
    pub fn derivative_y(&self) -> Self {
        let t = &self.tower;
        let d = t.depth();
        let terms = self
            .terms
            .iter()
            .filter(|((_, b), _)| *b > 0)
            .map(|(&(a, b), c)| ((a, b - 1), t.mul(d, c, &t.integer(b as i64, d))))
            .collect();
        Self::from_map(t, terms)
    }

    /// `p(x + c·y, y)`
    pub fn shear(&self, c: &AlgebraicNumber<K>) -> Self {
        let t = self.tower.clone();
        let d = t.depth();
        let c = c.lift_to(&t).expect("shear parameter from a sub-tower");
        let max_a = self.degree_x();
        let mut c_pows = vec![t.one(d)];
        for k in 1..=max_a {
            let next = t.mul(d, &c_pows[k as usize - 1], c.elem());
            c_pows.push(next);
        }
        let mut out: BTreeMap<(u32, u32), Elem<K>> = BTreeMap::new();
        for (&(a, b), coef) in &self.terms {
            let mut binom = BigInt::one();
            for k in 0..=a {
                let factor = t.mul(d, &t.constant(K::from_rational(BigRational::from_integer(binom.clone())), d), &c_pows[k as usize]);
                let term = t.mul(d, coef, &factor);
                let entry = out.entry((a - k, b + k)).or_insert_with(|| t.zero(d));
                *entry = t.add(entry, &term);
                binom = binom * BigInt::from(a - k) / BigInt::from(k + 1);
            }
        }
        Self::from_map(&t, out)
    }

    pub fn shear_scalar(&self, c: K) -> Self {
        self.shear(&AlgebraicNumber::from_scalar(&self.tower, c))
    }

    /// `p(a·x + b·y, c·x + d·y)`
    pub fn linear_substitute(&self, a: K, b: K, c: K, d: K) -> Self {
        let t = &self.tower;
        let first = Self::from_terms(t, [((1, 0), a), ((0, 1), b)]);
        let second = Self::from_terms(t, [((1, 0), c), ((0, 1), d)]);
        let mut first_pows = vec![Self::one(t)];
        for k in 1..=self.degree_x() as usize {
            first_pows.push(&first_pows[k - 1] * &first);
        }
        let mut second_pows = vec![Self::one(t)];
        for k in 1..=self.degree_y as usize {
            second_pows.push(&second_pows[k - 1] * &second);
        }
        let mut acc = Self::zero(t);
        for (&(i, j), coef) in &self.terms {
            let prod = &first_pows[i as usize] * &second_pows[j as usize];
            acc = &acc + &prod.scale(&AlgebraicNumber::from_elem(t, coef.clone()));
        }
        acc
    }

    /// `p(0, y)` as a polynomial in `y`.
    pub fn restrict_to_y_axis(&self) -> UniPoly<K> {
        let d = self.depth();
        let mut coeffs = vec![self.tower.zero(d); self.degree_y as usize + 1];
        for (&(a, b), c) in &self.terms {
            if a == 0 {
                coeffs[b as usize] = c.clone();
            }
        }
        UniPoly::from_elems(&self.tower, coeffs)
    }

    /// Leading coefficient with respect to `y`, a polynomial in `x`.
    pub fn leading_coefficient_y(&self) -> UniPoly<K> {
        let ym = self.to_y_major();
        UniPoly::from_elems(&self.tower, ym.last().cloned().unwrap_or_default())
    }

    /// Greatest common divisor in `T(x)[y]`, normalized to be primitive in `y`
    /// (so unique up to a unit of the coefficient field).
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        let (t, a, b) = self.aligned(other);
        let alg = YAlgebra::new(&t);
        let (a, b) = (a.to_y_major(), b.to_y_major());
        let out = (|| {
            let content = t.p_gcd(t.depth(), &alg.content(&a)?, &alg.content(&b)?)?;
            let g = alg.gcd(&a, &b)?;
            Ok(alg.scale(&g, &content))
        })();
        field_result(out.map(|g| Self::from_y_major(&t, &g)))
    }

    /// Product of the distinct non-unit factors of a y-regular polynomial,
    /// computed as `p / gcd(p, ∂p/∂y)` and made primitive in `y`.
    pub fn squarefree_part(&self) -> Result<Self> {
        if !self.regular_in_y()? {
            return Err(Error::NotRegular);
        }
        let alg = YAlgebra::new(&self.tower);
        let p = self.to_y_major();
        let dp = self.derivative_y().to_y_major();
        let out = (|| {
            let g = alg.gcd(&p, &dp)?;
            let q = alg.exact_div(&p, &g)?;
            alg.primitive_part(&q)
        })();
        field_result(out.map(|q| Self::from_y_major(&self.tower, &q)))
    }

    /// Exact quotient `self / divisor`, if `divisor` divides `self` in `T[x][y]`.
    pub fn exact_div(&self, divisor: &Self) -> Result<Option<Self>> {
        let (t, a, b) = self.aligned(divisor);
        match YAlgebra::new(&t).exact_div(&a.to_y_major(), &b.to_y_major()) {
            Ok(q) => Ok(Some(Self::from_y_major(&t, &q))),
            Err(Halt::Fail(Error::Precondition(_))) => Ok(None),
            Err(Halt::Fail(e)) => Err(e),
            Err(Halt::Split(_)) => Err(Error::Precondition("coefficient tower is not a field".into())),
        }
    }

    /// Classical resultant with respect to `y` (Sylvester determinant, `self`
    /// rows first), a polynomial in `x`.
    pub fn resultant_y(&self, other: &Self) -> Result<UniPoly<K>> {
        let (t, a, b) = self.aligned(other);
        field_result(YAlgebra::new(&t).resultant(&a.to_y_major(), &b.to_y_major()).map(|r| UniPoly::from_elems(&t, r)))
    }

    pub(crate) fn to_y_major(&self) -> Vec<Poly<K>> {
        if self.terms.is_empty() {
            return Vec::new();
        }
        let d = self.depth();
        let mut out: Vec<Poly<K>> = vec![Vec::new(); self.degree_y as usize + 1];
        for (&(a, b), c) in &self.terms {
            let row = &mut out[b as usize];
            if row.len() <= a as usize {
                row.resize(a as usize + 1, self.tower.zero(d));
            }
            row[a as usize] = c.clone();
        }
        out
    }

    pub(crate) fn from_y_major(tower: &Tower<K>, rows: &[Poly<K>]) -> Self {
        let mut m = BTreeMap::new();
        for (b, row) in rows.iter().enumerate() {
            for (a, c) in row.iter().enumerate() {
                if !is_zero(c) {
                    m.insert((a as u32, b as u32), c.clone());
                }
            }
        }
        Self::from_map(tower, m)
    }

    /// Evaluates at a complex point under the given tower embedding.
    pub fn eval_complex<F: Float>(&self, x: Complex<F>, y: Complex<F>, embedding: &[Complex<F>]) -> Complex<F> {
        let d = self.depth();
        let mut acc = Complex::new(F::zero(), F::zero());
        for (&(a, b), c) in &self.terms {
            let coef = self.tower.eval_numeric(c, d, embedding);
            acc = acc + coef * x.powu(a) * y.powu(b);
        }
        acc
    }

    pub fn render(&self) -> String {
        let d = self.depth();
        let mut keys: Vec<&(u32, u32)> = self.terms.keys().collect();
        keys.sort_by(|p, q| (q.0 + q.1, q.0).cmp(&(p.0 + p.1, p.0)));
        let terms: Vec<String> = keys
            .into_iter()
            .map(|&(a, b)| {
                let monomial = [("x", a), ("y", b)]
                    .iter()
                    .filter(|(_, e)| *e > 0)
                    .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
                    .collect::<Vec<_>>()
                    .join("*");
                render_term(&self.terms[&(a, b)], d, &monomial)
            })
            .collect();
        join_terms(&terms)
    }
}

fn field_result<T, K: Scalar>(r: Dyn<T, K>) -> Result<T> {
    r.map_err(|h| match h {
        Halt::Fail(e) => e,
        Halt::Split(_) => Error::Precondition("coefficient tower is not a field".into()),
    })
}

impl<K: Scalar> PartialEq for BiPoly<K> {
    fn eq(&self, other: &Self) -> bool {
        (self.tower.is_prefix_of(&other.tower) || other.tower.is_prefix_of(&self.tower)) && {
            let (_, a, b) = self.aligned(other);
            a.terms == b.terms
        }
    }
}

impl<K: Scalar> fmt::Debug for BiPoly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl<K: Scalar> fmt::Display for BiPoly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl<'a, K: Scalar> Add for &'a BiPoly<K> {
    type Output = BiPoly<K>;
    fn add(self, rhs: Self) -> BiPoly<K> {
        let (t, a, b) = self.aligned(rhs);
        let d = t.depth();
        let mut terms = a.terms;
        for (k, c) in b.terms {
            let entry = terms.entry(k).or_insert_with(|| t.zero(d));
            *entry = t.add(entry, &c);
        }
        BiPoly::from_map(&t, terms)
    }
}

impl<'a, K: Scalar> Neg for &'a BiPoly<K> {
    type Output = BiPoly<K>;
    fn neg(self) -> BiPoly<K> {
        let t = &self.tower;
        self.map_coefficients(t, |c| t.neg(c))
    }
}

impl<'a, K: Scalar> Sub for &'a BiPoly<K> {
    type Output = BiPoly<K>;
    fn sub(self, rhs: Self) -> BiPoly<K> {
        self + &(-rhs)
    }
}

impl<'a, K: Scalar> Mul for &'a BiPoly<K> {
    type Output = BiPoly<K>;
    fn mul(self, rhs: Self) -> BiPoly<K> {
        let (t, a, b) = self.aligned(rhs);
        let d = t.depth();
        let mut terms: BTreeMap<(u32, u32), Elem<K>> = BTreeMap::new();
        for (&(a1, b1), c1) in &a.terms {
            for (&(a2, b2), c2) in &b.terms {
                let prod = t.mul(d, c1, c2);
                let entry = terms.entry((a1 + a2, b1 + b2)).or_insert_with(|| t.zero(d));
                *entry = t.add(entry, &prod);
            }
        }
        BiPoly::from_map(&t, terms)
    }
}

impl<K: Scalar> UniPoly<K> {
    pub(crate) fn from_elems(tower: &Tower<K>, mut coeffs: Poly<K>) -> Self {
        crate::tower::trim(&mut coeffs);
        UniPoly { tower: tower.clone(), coeffs }
    }

    pub fn from_scalars(tower: &Tower<K>, coeffs: impl IntoIterator<Item = K>) -> Self {
        let d = tower.depth();
        Self::from_elems(tower, coeffs.into_iter().map(|k| tower.constant(k, d)).collect())
    }

    pub fn tower(&self) -> &Tower<K> {
        &self.tower
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Index of the lowest nonzero coefficient; infinite for zero.
    pub fn ord(&self) -> Extended<usize> {
        match self.coeffs.iter().position(|c| !is_zero(c)) {
            Some(k) => Extended::Finite(k),
            None => Extended::Infinite,
        }
    }

    pub fn coefficient(&self, k: usize) -> AlgebraicNumber<K> {
        match self.coeffs.get(k) {
            Some(c) => AlgebraicNumber::from_elem(&self.tower, c.clone()),
            None => AlgebraicNumber::zero(&self.tower),
        }
    }

    pub fn coefficients(&self) -> Vec<AlgebraicNumber<K>> {
        (0..self.coeffs.len()).map(|k| self.coefficient(k)).collect()
    }

    /// Monic gcd over the coefficient tower.
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        let d = self.tower.depth();
        field_result(self.tower.p_gcd(d, &self.coeffs, &other.coeffs)).map(|g| Self::from_elems(&self.tower, g))
    }

    pub fn render(&self, var: &str) -> String {
        render_poly(&self.coeffs, self.tower.depth(), var)
    }
}

impl<K: Scalar> fmt::Debug for UniPoly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("z"))
    }
}

/// Checks the hypothesis under which `ord_x resultant_y(p, q)` equals the
/// local intersection number of `p` and `q` at the origin: along the line
/// `x = 0` the two curves meet only at the origin, and they do not both
/// escape to infinity there.
pub fn resultant_is_local<K: Scalar>(p: &BiPoly<K>, q: &BiPoly<K>) -> Result<bool> {
    let (_, p, q) = p.aligned(q);
    let lead_p = p.leading_coefficient_y();
    let lead_q = q.leading_coefficient_y();
    let bounded = |u: &UniPoly<K>| u.coeffs.first().is_some_and(|c| !is_zero(c));
    if !bounded(&lead_p) && !bounded(&lead_q) {
        return Ok(false);
    }
    let g = p.restrict_to_y_axis().gcd(&q.restrict_to_y_axis())?;
    if g.is_zero() {
        return Ok(false);
    }
    // The gcd is monic; it is a pure power of y iff it has a single term.
    let nonzero = g.coeffs.iter().filter(|c| !is_zero(c)).count();
    Ok(nonzero == 1)
}

/// Arithmetic in `T[x][y]`: y-polynomials whose coefficients are x-polynomials.
struct YAlgebra<'a, K: Scalar> {
    tower: &'a Tower<K>,
    depth: usize,
}

type YPoly<K> = Vec<Poly<K>>;

impl<'a, K: Scalar> YAlgebra<'a, K> {
    fn new(tower: &'a Tower<K>) -> Self {
        YAlgebra { tower, depth: tower.depth() }
    }

    fn trim(p: &mut YPoly<K>) {
        while p.last().is_some_and(|c| c.is_empty()) {
            p.pop();
        }
    }

    fn r_mul(&self, a: &[Elem<K>], b: &[Elem<K>]) -> Poly<K> {
        self.tower.p_mul(self.depth, a, b)
    }

    fn r_exact(&self, a: &[Elem<K>], b: &[Elem<K>]) -> Dyn<Poly<K>, K> {
        let (q, r) = self.tower.p_divrem(self.depth, a, b)?;
        if !r.is_empty() {
            return Err(Halt::Fail(Error::Precondition("inexact division".into())));
        }
        Ok(q)
    }

    fn r_pow(&self, a: &[Elem<K>], e: usize) -> Poly<K> {
        let mut out = vec![self.tower.one(self.depth)];
        for _ in 0..e {
            out = self.r_mul(&out, a);
        }
        out
    }

    fn scale(&self, p: &YPoly<K>, c: &[Elem<K>]) -> YPoly<K> {
        let mut out: YPoly<K> = p.iter().map(|x| self.r_mul(x, c)).collect();
        Self::trim(&mut out);
        out
    }

    fn sub(&self, a: &YPoly<K>, b: &YPoly<K>) -> YPoly<K> {
        let n = a.len().max(b.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let x = a.get(i).map(|v| v.as_slice()).unwrap_or(&[]);
            let y = b.get(i).map(|v| v.as_slice()).unwrap_or(&[]);
            out.push(self.tower.p_sub(self.depth, x, y));
        }
        Self::trim(&mut out);
        out
    }

    fn shift(p: &YPoly<K>, k: usize) -> YPoly<K> {
        let mut out = vec![Vec::new(); k];
        out.extend(p.iter().cloned());
        out
    }

    fn content(&self, p: &YPoly<K>) -> Dyn<Poly<K>, K> {
        let mut g: Poly<K> = Vec::new();
        for c in p {
            g = self.tower.p_gcd(self.depth, &g, c)?;
            if g.len() == 1 {
                break;
            }
        }
        Ok(g)
    }

    fn primitive_part(&self, p: &YPoly<K>) -> Dyn<YPoly<K>, K> {
        if p.is_empty() {
            return Ok(Vec::new());
        }
        let c = self.content(p)?;
        let mut out = Vec::with_capacity(p.len());
        for x in p {
            out.push(self.r_exact(x, &c)?);
        }
        Ok(out)
    }

    /// Pseudo-remainder `lc(b)^(deg a − deg b + 1) · a mod b`.
    fn prem(&self, a: &YPoly<K>, b: &YPoly<K>) -> YPoly<K> {
        let db = b.len() - 1;
        let lcb = &b[db];
        let mut r = a.clone();
        let mut e = a.len().saturating_sub(db);
        while r.len() > db && !r.is_empty() {
            let lr = r.last().unwrap().clone();
            let s = r.len() - 1 - db;
            let left = self.scale(&r, lcb);
            let right = Self::shift(&self.scale(b, &lr), s);
            r = self.sub(&left, &right);
            e -= 1;
        }
        self.scale(&r, &self.r_pow(lcb, e))
    }

    /// Gcd in `T(x)[y]`, returned primitive in `y`.
    ///
    /// Specializes `x` at base-field points, interpolates the gcd images
    /// (scaled by the gcd of leading coefficients) and confirms the candidate
    /// by trial division. Falls back to the subresultant chain when no
    /// candidate is confirmed within the sampling budget.
    fn gcd(&self, a: &YPoly<K>, b: &YPoly<K>) -> Dyn<YPoly<K>, K> {
        let mut a = a.clone();
        let mut b = b.clone();
        Self::trim(&mut a);
        Self::trim(&mut b);
        if a.is_empty() || b.is_empty() {
            return self.primitive_part(if a.is_empty() { &b } else { &a });
        }
        if a.len() == 1 || b.len() == 1 {
            return Ok(vec![vec![self.tower.one(self.depth)]]);
        }
        let lead_gcd = self.tower.p_gcd(self.depth, a.last().unwrap(), b.last().unwrap())?;
        let x_degree = |p: &YPoly<K>| p.iter().map(|c| c.len().saturating_sub(1)).max().unwrap_or(0);
        let needed = lead_gcd.len() + x_degree(&a).min(x_degree(&b));
        let budget = 4 * needed + 40;

        let mut best: Option<usize> = None;
        let mut samples: Vec<(K, Poly<K>)> = Vec::new();
        for k in 0..budget {
            let n = k as i64 / 2 + 1;
            let point = K::from_integer(if k % 2 == 0 { n } else { -n });
            let at = self.tower.constant(point.clone(), self.depth);
            let la = self.tower.p_eval(self.depth, a.last().unwrap(), &at);
            let lb = self.tower.p_eval(self.depth, b.last().unwrap(), &at);
            if is_zero(&la) || is_zero(&lb) {
                continue;
            }
            let sa: Poly<K> = a.iter().map(|c| self.tower.p_eval(self.depth, c, &at)).collect();
            let sb: Poly<K> = b.iter().map(|c| self.tower.p_eval(self.depth, c, &at)).collect();
            let image = self.tower.p_gcd(self.depth, &sa, &sb)?;
            let degree = image.len() - 1;
            if degree == 0 {
                return Ok(vec![vec![self.tower.one(self.depth)]]);
            }
            match best {
                Some(d) if degree > d => continue,
                Some(d) if degree == d => {}
                _ => {
                    best = Some(degree);
                    samples.clear();
                }
            }
            let scale = self.tower.p_eval(self.depth, &lead_gcd, &at);
            samples.push((point, self.tower.p_scale(self.depth, &image, &scale)));
            if samples.len() >= needed {
                let candidate = self.primitive_part(&self.interpolate(&samples, degree))?;
                if self.divides(&candidate, &a)? && self.divides(&candidate, &b)? {
                    return Ok(candidate);
                }
            }
        }
        self.subresultant_gcd(&a, &b)
    }

    fn divides(&self, d: &YPoly<K>, p: &YPoly<K>) -> Dyn<bool, K> {
        match self.exact_div(p, d) {
            Ok(_) => Ok(true),
            Err(Halt::Fail(Error::Precondition(_))) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// Newton interpolation of each y-coefficient through `(point, image)` samples.
    fn interpolate(&self, samples: &[(K, Poly<K>)], degree: usize) -> YPoly<K> {
        let d = self.depth;
        let t = self.tower;
        let mut out = Vec::with_capacity(degree + 1);
        for j in 0..=degree {
            let mut diffs: Vec<Elem<K>> = samples.iter().map(|(_, img)| img.get(j).cloned().unwrap_or_else(|| t.zero(d))).collect();
            let n = diffs.len();
            for level in 1..n {
                for i in (level..n).rev() {
                    let gap = samples[i].0.clone() - samples[i - level].0.clone();
                    let inv = t.constant(gap.inverse().expect("distinct sample points"), d);
                    diffs[i] = t.mul(d, &t.sub(&diffs[i], &diffs[i - 1]), &inv);
                }
            }
            let mut acc: Poly<K> = vec![diffs[n - 1].clone()];
            for i in (0..n - 1).rev() {
                let linear = vec![t.constant(-samples[i].0.clone(), d), t.one(d)];
                acc = t.p_add(&t.p_mul(d, &acc, &linear), &[diffs[i].clone()]);
            }
            crate::tower::trim(&mut acc);
            out.push(acc);
        }
        Self::trim(&mut out);
        out
    }

    /// Subresultant PRS gcd, returned primitive in `y`.
    fn subresultant_gcd(&self, a: &YPoly<K>, b: &YPoly<K>) -> Dyn<YPoly<K>, K> {
        let (mut a, mut b) = if a.len() >= b.len() { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
        Self::trim(&mut a);
        Self::trim(&mut b);
        if b.is_empty() {
            return self.primitive_part(&a);
        }
        a = self.primitive_part(&a)?;
        b = self.primitive_part(&b)?;
        let one = vec![self.tower.one(self.depth)];
        let mut g = one.clone();
        let mut h = one.clone();
        loop {
            let delta = a.len() - b.len();
            let r = self.prem(&a, &b);
            if r.is_empty() {
                break;
            }
            if r.len() == 1 {
                return Ok(vec![one]);
            }
            a = b;
            let divisor = self.r_mul(&g, &self.r_pow(&h, delta));
            b = Vec::with_capacity(r.len());
            for c in &r {
                b.push(self.r_exact(c, &divisor)?);
            }
            g = a.last().unwrap().clone();
            // h ← g^δ / h^(δ−1)
            h = match delta {
                0 => h,
                1 => g.clone(),
                _ => self.r_exact(&self.r_pow(&g, delta), &self.r_pow(&h, delta - 1))?,
            };
        }
        self.primitive_part(&b)
    }

    fn exact_div(&self, a: &YPoly<K>, b: &YPoly<K>) -> Dyn<YPoly<K>, K> {
        let mut rem = a.clone();
        Self::trim(&mut rem);
        if b.is_empty() {
            return Err(Halt::Fail(Error::DivisionByZero));
        }
        let db = b.len() - 1;
        if rem.len() <= db {
            return if rem.is_empty() {
                Ok(Vec::new())
            } else {
                Err(Halt::Fail(Error::Precondition("inexact division".into())))
            };
        }
        let mut quot: YPoly<K> = vec![Vec::new(); rem.len() - db];
        while !rem.is_empty() {
            if rem.len() <= db {
                return Err(Halt::Fail(Error::Precondition("inexact division".into())));
            }
            let s = rem.len() - 1 - db;
            let coef = self.r_exact(rem.last().unwrap(), &b[db])?;
            let sub = Self::shift(&self.scale(b, &coef), s);
            rem = self.sub(&rem, &sub);
            quot[s] = coef;
        }
        Self::trim(&mut quot);
        Ok(quot)
    }

    /// Fraction-free (Bareiss) determinant of the Sylvester matrix.
    fn resultant(&self, p: &YPoly<K>, q: &YPoly<K>) -> Dyn<Poly<K>, K> {
        let mut p = p.clone();
        let mut q = q.clone();
        Self::trim(&mut p);
        Self::trim(&mut q);
        if p.is_empty() || q.is_empty() {
            return Ok(Vec::new());
        }
        let (m, n) = (p.len() - 1, q.len() - 1);
        let size = m + n;
        if size == 0 {
            return Ok(vec![self.tower.one(self.depth)]);
        }
        // Row i < n holds p shifted by i; row n + i holds q shifted by i.
        // Columns are indexed by descending powers of y.
        let mut mat: Vec<Vec<Poly<K>>> = vec![vec![Vec::new(); size]; size];
        for i in 0..n {
            for (k, c) in p.iter().enumerate() {
                mat[i][i + m - k] = c.clone();
            }
        }
        for i in 0..m {
            for (k, c) in q.iter().enumerate() {
                mat[n + i][i + n - k] = c.clone();
            }
        }
        let mut sign_negative = false;
        let mut prev: Poly<K> = vec![self.tower.one(self.depth)];
        for k in 0..size - 1 {
            if mat[k][k].is_empty() {
                let Some(pivot) = (k + 1..size).find(|&i| !mat[i][k].is_empty()) else {
                    return Ok(Vec::new());
                };
                mat.swap(k, pivot);
                sign_negative = !sign_negative;
            }
            for i in k + 1..size {
                for j in k + 1..size {
                    let left = self.r_mul(&mat[i][j], &mat[k][k]);
                    let right = self.r_mul(&mat[i][k], &mat[k][j]);
                    let diff = self.tower.p_sub(self.depth, &left, &right);
                    mat[i][j] = self.r_exact(&diff, &prev)?;
                }
                mat[i][k] = Vec::new();
            }
            prev = mat[k][k].clone();
        }
        let det = mat[size - 1][size - 1].clone();
        Ok(if sign_negative {
            det.iter().map(|c| self.tower.neg(c)).collect()
        } else {
            det
        })
    }
}
