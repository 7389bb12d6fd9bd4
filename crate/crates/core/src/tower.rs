//! Algebraic extension towers over a base [`Scalar`] field.
//!
//! A tower is a sequence of levels `K ⊂ K[θ₁]/(m₁) ⊂ K[θ₁,θ₂]/(m₁,m₂) ⊂ …`
//! where each `mₖ` is monic and squarefree over the level below but is never
//! checked for irreducibility. The quotient is therefore a product of fields
//! rather than a field, and the arithmetic follows dynamic evaluation: an
//! inversion that meets a zero divisor returns a [`SplitEvent`] carrying the
//! factorization it exposed, and the caller continues on both factors.
//!
//! Elements are stored densely and recursively: an element at depth `d` is a
//! polynomial in `θ_d` of degree below `deg m_d` whose coefficients are
//! elements at depth `d - 1`. Every operation reduces its result, so the
//! representation is canonical and zero-testing is structural.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default cap on the total degree `[tower : K]`.
pub const DEFAULT_DEGREE_LIMIT: usize = 256;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Elem<K> {
    Base(K),
    Ext(Vec<Elem<K>>),
}

/// Dense univariate polynomial with tower coefficients, low degree first.
pub(crate) type Poly<K> = Vec<Elem<K>>;

#[derive(Debug)]
struct Level<K> {
    /// Monic, coefficients at the depth of the level below.
    minpoly: Poly<K>,
}

/// Nontrivial factorization `m = factor · cofactor` of the minimal
/// polynomial at `level`, found while inverting a zero divisor.
#[derive(Clone, Debug)]
pub struct SplitEvent<K: Scalar> {
    level: usize,
    base: Tower<K>,
    factor: Poly<K>,
    cofactor: Poly<K>,
}

pub(crate) enum Halt<K: Scalar> {
    Split(SplitEvent<K>),
    Fail(Error),
}

impl<K: Scalar> From<Error> for Halt<K> {
    fn from(e: Error) -> Self {
        Halt::Fail(e)
    }
}

impl<K: Scalar> fmt::Debug for Halt<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Halt::Split(ev) => write!(f, "Split(level {})", ev.level),
            Halt::Fail(e) => write!(f, "Fail({e})"),
        }
    }
}

/// Result of a computation that may be interrupted by a split.
pub(crate) type Dyn<T, K> = std::result::Result<T, Halt<K>>;

/// An extension tower. Cloning is cheap; extending produces a new value and
/// leaves the original untouched.
#[derive(Clone)]
pub struct Tower<K: Scalar> {
    levels: Vec<Arc<Level<K>>>,
    limit: usize,
}

impl<K: Scalar> fmt::Debug for Tower<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.describe()).finish()
    }
}

impl<K: Scalar> Default for Tower<K> {
    fn default() -> Self {
        Self::new(DEFAULT_DEGREE_LIMIT)
    }
}

impl<K: Scalar> Tower<K> {
    /// The base field with the given cap on total degree.
    pub fn new(limit: usize) -> Self {
        Tower { levels: Vec::new(), limit }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Total degree over the base field.
    pub fn degree(&self) -> usize {
        self.levels.iter().map(|l| l.minpoly.len() - 1).product()
    }

    pub fn level_degree(&self, level: usize) -> usize {
        self.levels[level].minpoly.len() - 1
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn truncate(&self, depth: usize) -> Tower<K> {
        Tower { levels: self.levels[..depth].to_vec(), limit: self.limit }
    }

    /// True when `self` is an initial segment of `other`.
    pub fn is_prefix_of(&self, other: &Tower<K>) -> bool {
        self.depth() <= other.depth()
            && self
                .levels
                .iter()
                .zip(&other.levels)
                .all(|(a, b)| Arc::ptr_eq(a, b))
    }

    fn unify(a: &Tower<K>, b: &Tower<K>) -> Option<Tower<K>> {
        if a.is_prefix_of(b) {
            Some(b.clone())
        } else if b.is_prefix_of(a) {
            Some(a.clone())
        } else {
            None
        }
    }

    /// Minimal polynomial of `level`, rendered with generators `a1, a2, …`
    /// and variable `Z`, one string per level.
    pub fn describe(&self) -> Vec<String> {
        self.levels
            .iter()
            .enumerate()
            .map(|(depth, level)| render_poly(&level.minpoly, depth, "Z"))
            .collect()
    }

    /// Coefficients of the minimal polynomial at `level`, as elements of the
    /// tower truncated below that level.
    pub fn minimal_polynomial(&self, level: usize) -> Vec<AlgebraicNumber<K>> {
        let base = self.truncate(level);
        self.levels[level]
            .minpoly
            .iter()
            .map(|c| AlgebraicNumber { tower: base.clone(), elem: c.clone() })
            .collect()
    }

    /// The generator `θ` of `level` as an element of this tower.
    pub fn generator(&self, level: usize) -> AlgebraicNumber<K> {
        let local = Elem::Ext(vec![self.zero(level), self.one(level)]);
        AlgebraicNumber { tower: self.clone(), elem: self.lift(local, level + 1, self.depth()) }
    }

    /// Adjoins a root of `p` (coefficients in this tower, low degree first).
    ///
    /// The new level's minimal polynomial is the monic squarefree part of `p`;
    /// if that part is linear no level is added and the root is returned in
    /// the current tower.
    pub fn adjoin_root(&self, p: &[AlgebraicNumber<K>]) -> Result<Adjoined<K>> {
        let mut coeffs = Vec::with_capacity(p.len());
        for c in p {
            coeffs.push(self.import(c)?);
        }
        match self.adjoin(&coeffs) {
            Ok((tower, root)) => {
                let elem = root;
                Ok(Adjoined::Root(AlgebraicNumber { tower, elem }))
            }
            Err(Halt::Split(ev)) => Ok(Adjoined::Split(ev)),
            Err(Halt::Fail(e)) => Err(e),
        }
    }

    fn import(&self, a: &AlgebraicNumber<K>) -> Result<Elem<K>> {
        if !a.tower.is_prefix_of(self) {
            return Err(Error::TowerMismatch);
        }
        Ok(self.lift(a.elem.clone(), a.tower.depth(), self.depth()))
    }

    /// Complex values of the generators for one embedding into ℂ. `choice[k]`
    /// selects which root of the (numerically evaluated) minimal polynomial
    /// of level `k` is used.
    pub fn embedding<F: Float>(&self, choice: &[usize]) -> Vec<Complex<F>> {
        let mut gens: Vec<Complex<F>> = Vec::with_capacity(self.depth());
        for (depth, level) in self.levels.iter().enumerate() {
            let numeric: Vec<Complex<F>> = level
                .minpoly
                .iter()
                .map(|c| self.eval_numeric(c, depth, &gens))
                .collect();
            let mut roots = crate::roots::polynomial_roots(&numeric);
            roots.sort_by(|a, b| {
                (a.re, a.im)
                    .partial_cmp(&(b.re, b.im))
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            let pick = choice.get(depth).copied().unwrap_or(0).min(roots.len() - 1);
            gens.push(roots[pick]);
        }
        gens
    }

    /// Every root-choice vector, one per embedding of the tower into ℂ.
    pub fn embedding_choices(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for depth in 0..self.depth() {
            let n = self.level_degree(depth);
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..n).map(move |k| {
                        let mut v = prefix.clone();
                        v.push(k);
                        v
                    })
                })
                .collect();
        }
        out
    }

    // ---- element arithmetic ------------------------------------------------

    pub(crate) fn zero(&self, depth: usize) -> Elem<K> {
        if depth == 0 {
            Elem::Base(K::zero())
        } else {
            Elem::Ext(Vec::new())
        }
    }

    pub(crate) fn one(&self, depth: usize) -> Elem<K> {
        self.constant(K::one(), depth)
    }

    pub(crate) fn constant(&self, k: K, depth: usize) -> Elem<K> {
        if k.is_zero() {
            return self.zero(depth);
        }
        let mut e = Elem::Base(k);
        for _ in 0..depth {
            e = Elem::Ext(vec![e]);
        }
        e
    }

    pub(crate) fn integer(&self, n: i64, depth: usize) -> Elem<K> {
        self.constant(K::from_integer(n), depth)
    }

    pub(crate) fn lift(&self, e: Elem<K>, from: usize, to: usize) -> Elem<K> {
        let mut e = e;
        for _ in from..to {
            e = if is_zero(&e) { Elem::Ext(Vec::new()) } else { Elem::Ext(vec![e]) };
        }
        e
    }

    pub(crate) fn add(&self, a: &Elem<K>, b: &Elem<K>) -> Elem<K> {
        match (a, b) {
            (Elem::Base(x), Elem::Base(y)) => Elem::Base(x.clone() + y.clone()),
            (Elem::Ext(x), Elem::Ext(y)) => {
                let (long, short) = if x.len() >= y.len() { (x, y) } else { (y, x) };
                let mut out = long.clone();
                for (o, s) in out.iter_mut().zip(short) {
                    *o = self.add(o, s);
                }
                trim(&mut out);
                Elem::Ext(out)
            }
            _ => panic!("tower element depth mismatch"),
        }
    }

    pub(crate) fn neg(&self, a: &Elem<K>) -> Elem<K> {
        match a {
            Elem::Base(x) => Elem::Base(-x.clone()),
            Elem::Ext(v) => Elem::Ext(v.iter().map(|c| self.neg(c)).collect()),
        }
    }

    pub(crate) fn sub(&self, a: &Elem<K>, b: &Elem<K>) -> Elem<K> {
        self.add(a, &self.neg(b))
    }

    pub(crate) fn mul(&self, depth: usize, a: &Elem<K>, b: &Elem<K>) -> Elem<K> {
        match (a, b) {
            (Elem::Base(x), Elem::Base(y)) => Elem::Base(x.clone() * y.clone()),
            (Elem::Ext(x), Elem::Ext(y)) => {
                if x.is_empty() || y.is_empty() {
                    return Elem::Ext(Vec::new());
                }
                let inner = depth - 1;
                if x.len() == 1 {
                    return Elem::Ext(self.p_scale(inner, y, &x[0]));
                }
                if y.len() == 1 {
                    return Elem::Ext(self.p_scale(inner, x, &y[0]));
                }
                let prod = self.p_mul(inner, x, y);
                Elem::Ext(self.p_rem_monic(inner, prod, &self.levels[inner].minpoly))
            }
            _ => panic!("tower element depth mismatch"),
        }
    }

    pub(crate) fn pow(&self, depth: usize, a: &Elem<K>, exp: u32) -> Elem<K> {
        let mut result = self.one(depth);
        let mut base = a.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(depth, &result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(depth, &base, &base);
            }
        }
        result
    }

    /// Inverse, or the split exposed by a zero divisor.
    pub(crate) fn inv(&self, depth: usize, a: &Elem<K>) -> Dyn<Elem<K>, K> {
        if is_zero(a) {
            return Err(Halt::Fail(Error::DivisionByZero));
        }
        match a {
            Elem::Base(x) => Ok(Elem::Base(K::one() / x.clone())),
            Elem::Ext(v) => {
                let inner = depth - 1;
                if v.len() == 1 {
                    return Ok(Elem::Ext(vec![self.inv(inner, &v[0])?]));
                }
                let modulus = &self.levels[inner].minpoly;
                let (mut r0, mut s0): (Poly<K>, Poly<K>) = (modulus.clone(), Vec::new());
                let (mut r1, mut s1): (Poly<K>, Poly<K>) = (v.clone(), vec![self.one(inner)]);
                loop {
                    if r1.is_empty() {
                        let factor = self.p_monic(inner, &r0)?;
                        let (cofactor, _) = self.p_divrem(inner, modulus, &factor)?;
                        return Err(Halt::Split(SplitEvent {
                            level: inner,
                            base: self.truncate(inner),
                            factor,
                            cofactor,
                        }));
                    }
                    if r1.len() == 1 {
                        let c = self.inv(inner, &r1[0])?;
                        let inverse = self.p_scale(inner, &s1, &c);
                        return Ok(Elem::Ext(self.p_rem_monic(inner, inverse, modulus)));
                    }
                    let (q, r) = self.p_divrem(inner, &r0, &r1)?;
                    let s = self.p_sub(inner, &s0, &self.p_mul(inner, &q, &s1));
                    r0 = std::mem::replace(&mut r1, r);
                    s0 = std::mem::replace(&mut s1, s);
                }
            }
        }
    }

    pub(crate) fn eval_numeric<F: Float>(&self, e: &Elem<K>, depth: usize, gens: &[Complex<F>]) -> Complex<F> {
        match e {
            Elem::Base(k) => k.to_complex(),
            Elem::Ext(v) => {
                let g = gens[depth - 1];
                v.iter().rev().fold(Complex::new(F::zero(), F::zero()), |acc, c| {
                    acc * g + self.eval_numeric(c, depth - 1, gens)
                })
            }
        }
    }

    // ---- univariate polynomials over a level -------------------------------

    pub(crate) fn p_add(&self, a: &[Elem<K>], b: &[Elem<K>]) -> Poly<K> {
        let n = a.len().max(b.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(match (a.get(i), b.get(i)) {
                (Some(x), Some(y)) => self.add(x, y),
                (Some(x), None) | (None, Some(x)) => x.clone(),
                (None, None) => unreachable!(),
            });
        }
        trim(&mut out);
        out
    }

    pub(crate) fn p_sub(&self, _depth: usize, a: &[Elem<K>], b: &[Elem<K>]) -> Poly<K> {
        let neg: Poly<K> = b.iter().map(|c| self.neg(c)).collect();
        self.p_add(a, &neg)
    }

    pub(crate) fn p_scale(&self, depth: usize, a: &[Elem<K>], c: &Elem<K>) -> Poly<K> {
        let mut out: Poly<K> = a.iter().map(|x| self.mul(depth, x, c)).collect();
        trim(&mut out);
        out
    }

    pub(crate) fn p_mul(&self, depth: usize, a: &[Elem<K>], b: &[Elem<K>]) -> Poly<K> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![self.zero(depth); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if is_zero(y) {
                    continue;
                }
                let term = self.mul(depth, x, y);
                out[i + j] = self.add(&out[i + j], &term);
            }
        }
        trim(&mut out);
        out
    }

    /// `a mod m` for monic `m`.
    pub(crate) fn p_rem_monic(&self, depth: usize, mut a: Poly<K>, m: &[Elem<K>]) -> Poly<K> {
        let dm = m.len() - 1;
        while a.len() > dm {
            let top = a.len() - 1;
            let coef = a[top].clone();
            if !is_zero(&coef) {
                for (j, mj) in m.iter().enumerate().take(dm) {
                    let idx = top - dm + j;
                    let t = self.mul(depth, &coef, mj);
                    a[idx] = self.sub(&a[idx], &t);
                }
            }
            a.pop();
            trim(&mut a);
        }
        a
    }

    pub(crate) fn p_divrem(&self, depth: usize, a: &[Elem<K>], b: &[Elem<K>]) -> Dyn<(Poly<K>, Poly<K>), K> {
        if b.is_empty() {
            return Err(Halt::Fail(Error::DivisionByZero));
        }
        let db = b.len() - 1;
        let lc_inv = self.inv(depth, &b[db])?;
        let mut rem: Poly<K> = a.to_vec();
        trim(&mut rem);
        if rem.len() <= db {
            return Ok((Vec::new(), rem));
        }
        let mut quot = vec![self.zero(depth); rem.len() - db];
        while rem.len() > db {
            let top = rem.len() - 1;
            let coef = self.mul(depth, &rem[top], &lc_inv);
            let shift = top - db;
            for (j, bj) in b.iter().enumerate() {
                let t = self.mul(depth, &coef, bj);
                rem[shift + j] = self.sub(&rem[shift + j], &t);
            }
            quot[shift] = coef;
            // The leading term cancels exactly.
            rem.pop();
            trim(&mut rem);
        }
        trim(&mut quot);
        Ok((quot, rem))
    }

    pub(crate) fn p_monic(&self, depth: usize, a: &[Elem<K>]) -> Dyn<Poly<K>, K> {
        match a.last() {
            None => Ok(Vec::new()),
            Some(lc) => {
                let inv = self.inv(depth, lc)?;
                Ok(self.p_scale(depth, a, &inv))
            }
        }
    }

    /// Monic gcd; the zero polynomial when both inputs are zero.
    pub(crate) fn p_gcd(&self, depth: usize, a: &[Elem<K>], b: &[Elem<K>]) -> Dyn<Poly<K>, K> {
        let mut r0: Poly<K> = a.to_vec();
        let mut r1: Poly<K> = b.to_vec();
        trim(&mut r0);
        trim(&mut r1);
        while !r1.is_empty() {
            let (_, r) = self.p_divrem(depth, &r0, &r1)?;
            r0 = std::mem::replace(&mut r1, r);
        }
        self.p_monic(depth, &r0)
    }

    pub(crate) fn p_derivative(&self, depth: usize, a: &[Elem<K>]) -> Poly<K> {
        let mut out: Poly<K> = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| self.mul(depth, c, &self.integer(k as i64, depth)))
            .collect();
        trim(&mut out);
        out
    }

    pub(crate) fn p_eval(&self, depth: usize, a: &[Elem<K>], at: &Elem<K>) -> Elem<K> {
        a.iter()
            .rev()
            .fold(self.zero(depth), |acc, c| self.add(&self.mul(depth, &acc, at), c))
    }

    /// Yun's squarefree decomposition `a = lc · Π fₖᵏ` with monic, pairwise
    /// coprime, squarefree `fₖ`. Returns the nonconstant `(fₖ, k)`.
    pub(crate) fn p_squarefree_decomposition(&self, depth: usize, a: &[Elem<K>]) -> Dyn<Vec<(Poly<K>, usize)>, K> {
        let a = self.p_monic(depth, a)?;
        let mut out = Vec::new();
        if a.len() < 2 {
            return Ok(out);
        }
        let da = self.p_derivative(depth, &a);
        let g = self.p_gcd(depth, &a, &da)?;
        let (mut b, _) = self.p_divrem(depth, &a, &g)?;
        let (c, _) = self.p_divrem(depth, &da, &g)?;
        let mut d = self.p_sub(depth, &c, &self.p_derivative(depth, &b));
        let mut k = 1;
        while b.len() > 1 {
            let f = self.p_gcd(depth, &b, &d)?;
            let (nb, _) = self.p_divrem(depth, &b, &f)?;
            let (c, _) = self.p_divrem(depth, &d, &f)?;
            d = self.p_sub(depth, &c, &self.p_derivative(depth, &nb));
            if f.len() > 1 {
                out.push((f, k));
            }
            b = nb;
            k += 1;
        }
        Ok(out)
    }

    /// Adjoins a root of `p` (coefficients at this tower's depth).
    pub(crate) fn adjoin(&self, p: &[Elem<K>]) -> Dyn<(Tower<K>, Elem<K>), K> {
        let depth = self.depth();
        let mut p = p.to_vec();
        trim(&mut p);
        if p.len() < 2 {
            return Err(Halt::Fail(Error::ConstantPolynomial));
        }
        let dp = self.p_derivative(depth, &p);
        let g = self.p_gcd(depth, &p, &dp)?;
        let (sq, _) = self.p_divrem(depth, &p, &g)?;
        let sq = self.p_monic(depth, &sq)?;
        self.adjoin_squarefree(sq)
    }

    /// Adjoins a root of a monic polynomial already known to be squarefree.
    pub(crate) fn adjoin_squarefree(&self, sq: Poly<K>) -> Dyn<(Tower<K>, Elem<K>), K> {
        let depth = self.depth();
        let deg = sq.len() - 1;
        if deg == 0 {
            return Err(Halt::Fail(Error::ConstantPolynomial));
        }
        if deg == 1 {
            return Ok((self.clone(), self.neg(&sq[0])));
        }
        let requested = self.degree() * deg;
        if requested > self.limit {
            return Err(Halt::Fail(Error::DegreeGuard { requested, limit: self.limit }));
        }
        let mut levels = self.levels.clone();
        levels.push(Arc::new(Level { minpoly: sq }));
        let tower = Tower { levels, limit: self.limit };
        let gen = Elem::Ext(vec![self.zero(depth), self.one(depth)]);
        Ok((tower, gen))
    }

    /// Projections of this tower onto the two factors of a split.
    pub fn split(&self, ev: &SplitEvent<K>) -> Result<[Projection<K>; 2]> {
        if ev.level >= self.depth() || !ev.base.is_prefix_of(self) {
            return Err(Error::TowerMismatch);
        }
        Ok([
            Projection::new(self, ev.level, ev.factor.clone()),
            Projection::new(self, ev.level, ev.cofactor.clone()),
        ])
    }

    pub(crate) fn as_base(&self, e: &Elem<K>) -> Option<K> {
        match e {
            Elem::Base(k) => Some(k.clone()),
            Elem::Ext(v) => match v.len() {
                0 => Some(K::zero()),
                1 => self.as_base(&v[0]),
                _ => None,
            },
        }
    }
}

pub(crate) fn is_zero<K: Scalar>(e: &Elem<K>) -> bool {
    match e {
        Elem::Base(k) => k.is_zero(),
        Elem::Ext(v) => v.is_empty(),
    }
}

pub(crate) fn trim<K: Scalar>(v: &mut Vec<Elem<K>>) {
    while v.last().is_some_and(is_zero) {
        v.pop();
    }
}

fn render_elem<K: Scalar>(e: &Elem<K>, depth: usize) -> String {
    match e {
        Elem::Base(k) => k.render(),
        Elem::Ext(v) => {
            if v.is_empty() {
                return "0".to_string();
            }
            render_poly(v, depth - 1, &format!("a{depth}"))
        }
    }
}

/// Renders a polynomial in `var` whose coefficients sit at `depth`.
pub(crate) fn render_poly<K: Scalar>(coeffs: &[Elem<K>], depth: usize, var: &str) -> String {
    let mut terms = power_terms(coeffs, depth, var);
    terms.reverse();
    join_terms(&terms)
}

/// Like [`render_poly`] but in increasing powers.
pub(crate) fn render_series<K: Scalar>(coeffs: &[Elem<K>], depth: usize, var: &str) -> String {
    join_terms(&power_terms(coeffs, depth, var))
}

fn power_terms<K: Scalar>(coeffs: &[Elem<K>], depth: usize, var: &str) -> Vec<String> {
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !is_zero(c))
        .map(|(k, c)| {
            let monomial = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            render_term(c, depth, &monomial)
        })
        .collect()
}

pub(crate) fn render_term<K: Scalar>(c: &Elem<K>, depth: usize, monomial: &str) -> String {
    let coeff = render_elem(c, depth);
    if monomial.is_empty() {
        return coeff;
    }
    let compound = match c {
        Elem::Base(k) => k.is_compound(),
        Elem::Ext(_) => coeff.contains(['+', ' ']) || coeff[1..].contains('-'),
    };
    if compound {
        format!("({coeff})*{monomial}")
    } else if coeff == "1" {
        monomial.to_string()
    } else if coeff == "-1" {
        format!("-{monomial}")
    } else {
        format!("{coeff}*{monomial}")
    }
}

pub(crate) fn join_terms(terms: &[String]) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = terms[0].clone();
    for t in &terms[1..] {
        if let Some(rest) = t.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(t);
        }
    }
    out
}

/// The reduction homomorphism onto one factor of a split level.
#[derive(Clone, Debug)]
pub struct Projection<K: Scalar> {
    source_depth: usize,
    level: usize,
    factor: Poly<K>,
    /// Set when the factor is linear and the level disappears.
    root: Option<Elem<K>>,
    target: Tower<K>,
}

impl<K: Scalar> Projection<K> {
    fn new(source: &Tower<K>, level: usize, factor: Poly<K>) -> Self {
        let mut target = source.truncate(level);
        let root = if factor.len() == 2 {
            Some(target.neg(&factor[0]))
        } else {
            target.levels.push(Arc::new(Level { minpoly: factor.clone() }));
            None
        };
        let mut proj = Projection {
            source_depth: source.depth(),
            level,
            factor,
            root,
            target: target.clone(),
        };
        for depth in level + 1..source.depth() {
            let minpoly: Poly<K> = source.levels[depth]
                .minpoly
                .iter()
                .map(|c| proj.map(c, depth))
                .collect();
            target.levels.push(Arc::new(Level { minpoly }));
            proj.target = target.clone();
        }
        proj
    }

    pub fn tower(&self) -> &Tower<K> {
        &self.target
    }

    pub(crate) fn target_depth(&self, depth: usize) -> usize {
        if self.root.is_some() && depth > self.level {
            depth - 1
        } else {
            depth
        }
    }

    /// Maps an element given at `depth` of the source tower.
    pub(crate) fn map(&self, e: &Elem<K>, depth: usize) -> Elem<K> {
        if depth <= self.level {
            return e.clone();
        }
        let Elem::Ext(v) = e else { unreachable!("extension element expected") };
        if depth == self.level + 1 {
            let reduced = self.target.p_rem_monic(self.level, v.clone(), &self.factor);
            return match &self.root {
                Some(root) => self.target.p_eval(self.level, &reduced, root),
                None => Elem::Ext(reduced),
            };
        }
        let mut out: Poly<K> = v.iter().map(|c| self.map(c, depth - 1)).collect();
        trim(&mut out);
        Elem::Ext(out)
    }

    pub fn apply(&self, a: &AlgebraicNumber<K>) -> Result<AlgebraicNumber<K>> {
        if a.tower.depth() > self.source_depth {
            return Err(Error::TowerMismatch);
        }
        let depth = a.tower.depth();
        Ok(AlgebraicNumber { tower: self.target.truncate(self.target_depth(depth)), elem: self.map(&a.elem, depth) })
    }
}

impl<K: Scalar> SplitEvent<K> {
    pub fn level(&self) -> usize {
        self.level
    }

    /// Monic factor (coefficients in the tower below `level`, low degree first).
    pub fn factor(&self) -> Vec<AlgebraicNumber<K>> {
        self.wrap(&self.factor)
    }

    pub fn cofactor(&self) -> Vec<AlgebraicNumber<K>> {
        self.wrap(&self.cofactor)
    }

    fn wrap(&self, p: &[Elem<K>]) -> Vec<AlgebraicNumber<K>> {
        p.iter()
            .map(|c| AlgebraicNumber { tower: self.base.clone(), elem: c.clone() })
            .collect()
    }
}

/// Outcome of [`AlgebraicNumber::invert`].
#[derive(Clone, Debug)]
pub enum Inversion<K: Scalar> {
    Inverse(AlgebraicNumber<K>),
    Split(SplitEvent<K>),
}

/// Outcome of [`Tower::adjoin_root`].
#[derive(Clone, Debug)]
pub enum Adjoined<K: Scalar> {
    /// The (possibly extended) tower is `root.tower()`.
    Root(AlgebraicNumber<K>),
    Split(SplitEvent<K>),
}

/// An element of an extension tower.
#[derive(Clone, Debug)]
pub struct AlgebraicNumber<K: Scalar> {
    tower: Tower<K>,
    elem: Elem<K>,
}

impl<K: Scalar> PartialEq for AlgebraicNumber<K> {
    fn eq(&self, other: &Self) -> bool {
        match Tower::unify(&self.tower, &other.tower) {
            Some(t) => {
                let a = t.lift(self.elem.clone(), self.tower.depth(), t.depth());
                let b = t.lift(other.elem.clone(), other.tower.depth(), t.depth());
                a == b
            }
            None => false,
        }
    }
}

impl<K: Scalar> AlgebraicNumber<K> {
    pub fn from_scalar(tower: &Tower<K>, k: K) -> Self {
        AlgebraicNumber { tower: tower.clone(), elem: tower.constant(k, tower.depth()) }
    }

    pub fn zero(tower: &Tower<K>) -> Self {
        Self::from_scalar(tower, K::zero())
    }

    pub fn one(tower: &Tower<K>) -> Self {
        Self::from_scalar(tower, K::one())
    }

    pub(crate) fn from_elem(tower: &Tower<K>, elem: Elem<K>) -> Self {
        AlgebraicNumber { tower: tower.clone(), elem }
    }

    pub(crate) fn elem(&self) -> &Elem<K> {
        &self.elem
    }

    pub fn tower(&self) -> &Tower<K> {
        &self.tower
    }

    pub fn is_zero(&self) -> bool {
        is_zero(&self.elem)
    }

    /// The value as a base-field scalar, if it lies in the base field.
    pub fn as_scalar(&self) -> Option<K> {
        self.tower.as_base(&self.elem)
    }

    /// Re-expresses `self` in `tower`, which must extend its own tower.
    pub fn lift_to(&self, tower: &Tower<K>) -> Result<Self> {
        Ok(AlgebraicNumber { tower: tower.clone(), elem: tower.import(self)? })
    }

    fn binary(&self, other: &Self, op: impl Fn(&Tower<K>, usize, &Elem<K>, &Elem<K>) -> Elem<K>) -> Result<Self> {
        let tower = Tower::unify(&self.tower, &other.tower).ok_or(Error::TowerMismatch)?;
        let d = tower.depth();
        let a = tower.lift(self.elem.clone(), self.tower.depth(), d);
        let b = tower.lift(other.elem.clone(), other.tower.depth(), d);
        let elem = op(&tower, d, &a, &b);
        Ok(AlgebraicNumber { tower, elem })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.binary(other, |t, _, a, b| t.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.binary(other, |t, _, a, b| t.sub(a, b))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.binary(other, |t, d, a, b| t.mul(d, a, b))
    }

    pub fn neg(&self) -> Self {
        AlgebraicNumber { tower: self.tower.clone(), elem: self.tower.neg(&self.elem) }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let elem = self.tower.pow(self.tower.depth(), &self.elem, exp);
        AlgebraicNumber { tower: self.tower.clone(), elem }
    }

    /// Multiplicative inverse, or the split revealed by a zero divisor.
    pub fn invert(&self) -> Result<Inversion<K>> {
        match self.tower.inv(self.tower.depth(), &self.elem) {
            Ok(elem) => Ok(Inversion::Inverse(AlgebraicNumber { tower: self.tower.clone(), elem })),
            Err(Halt::Split(ev)) => Ok(Inversion::Split(ev)),
            Err(Halt::Fail(e)) => Err(e),
        }
    }

    pub fn to_complex<F: Float>(&self, embedding: &[Complex<F>]) -> Complex<F> {
        self.tower.eval_numeric(&self.elem, self.tower.depth(), embedding)
    }

    pub fn render(&self) -> String {
        render_elem(&self.elem, self.tower.depth())
    }
}

impl<K: Scalar> fmt::Display for AlgebraicNumber<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
