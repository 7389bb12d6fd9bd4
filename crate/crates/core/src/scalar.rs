//! Exact base fields.
//!
//! Everything above this module is generic over [`Scalar`], an exact field of
//! characteristic zero that can be embedded into the complex numbers. Two
//! instances ship with the crate: `BigRational` (the field ℚ) and
//! `Complex<BigRational>` (the Gaussian rationals ℚ(i)).

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::roots::polynomial_roots;

/// An exact field of characteristic zero with a fixed complex embedding.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Field marker used in input and report documents.
    const FIELD: &'static str;

    fn from_rational(r: BigRational) -> Self;

    fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// The imaginary unit, if the field contains one.
    fn imaginary_unit() -> Option<Self>;

    fn to_complex<F: Float>(&self) -> Complex<F>;

    /// Least common multiple of all denominators appearing in the value.
    fn denominator_lcm(&self) -> BigInt;

    /// Nearest integral element (integer or Gaussian integer) to `z`.
    fn round_integral(z: Complex<f64>) -> Option<Self>;

    /// Human-readable exact rendering, e.g. `-3/2` or `1/2+3*i`.
    fn render(&self) -> String;

    /// True when the rendering of `self` needs parentheses inside a product.
    fn is_compound(&self) -> bool;

    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::one() / self.clone())
        }
    }

    /// Distinct roots of `poly` (coefficients low to high) that lie in this
    /// field. Candidates come from floating-point roots rounded against the
    /// leading coefficient and are confirmed exactly, so every returned value
    /// is a root; a root can be missed only when the float approximation is
    /// too coarse to round correctly.
    fn roots_in_field(poly: &[Self]) -> Vec<Self> {
        field_roots(poly)
    }
}

impl Scalar for BigRational {
    const FIELD: &'static str = "rational";

    fn from_rational(r: BigRational) -> Self {
        r
    }

    fn imaginary_unit() -> Option<Self> {
        None
    }

    fn to_complex<F: Float>(&self) -> Complex<F> {
        Complex::new(rational_to_float(self), F::zero())
    }

    fn denominator_lcm(&self) -> BigInt {
        self.denom().clone()
    }

    fn round_integral(z: Complex<f64>) -> Option<Self> {
        if !z.re.is_finite() {
            return None;
        }
        let r = z.re.round();
        BigInt::from_f64(r).map(BigRational::from_integer)
    }

    fn render(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn is_compound(&self) -> bool {
        false
    }
}

impl Scalar for Complex<BigRational> {
    const FIELD: &'static str = "gaussian";

    fn from_rational(r: BigRational) -> Self {
        Complex::new(r, BigRational::zero())
    }

    fn imaginary_unit() -> Option<Self> {
        Some(Complex::new(BigRational::zero(), BigRational::one()))
    }

    fn to_complex<F: Float>(&self) -> Complex<F> {
        Complex::new(rational_to_float(&self.re), rational_to_float(&self.im))
    }

    fn denominator_lcm(&self) -> BigInt {
        self.re.denom().lcm(self.im.denom())
    }

    fn round_integral(z: Complex<f64>) -> Option<Self> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return None;
        }
        let re = BigInt::from_f64(z.re.round())?;
        let im = BigInt::from_f64(z.im.round())?;
        Some(Complex::new(BigRational::from_integer(re), BigRational::from_integer(im)))
    }

    fn render(&self) -> String {
        let re = &self.re;
        let im = &self.im;
        if im.is_zero() {
            return re.render();
        }
        let imag = if im.is_one() {
            "i".to_string()
        } else if (-im).is_one() {
            "-i".to_string()
        } else {
            format!("{}*i", im.render())
        };
        if re.is_zero() {
            imag
        } else if imag.starts_with('-') {
            format!("{}{}", re.render(), imag)
        } else {
            format!("{}+{}", re.render(), imag)
        }
    }

    fn is_compound(&self) -> bool {
        !self.re.is_zero() && !self.im.is_zero()
    }
}

pub(crate) fn rational_to_float<F: Float>(r: &BigRational) -> F {
    let value = r.to_f64().unwrap_or_else(|| {
        // Ratio::to_f64 only fails on overflow; clamp to signed infinity.
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    });
    F::from(value).unwrap_or_else(F::nan)
}

fn field_roots<K: Scalar>(poly: &[K]) -> Vec<K> {
    let mut coeffs: Vec<K> = poly.to_vec();
    while coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    let mut roots = Vec::new();
    if coeffs.len() < 2 {
        return roots;
    }
    // Strip the root at zero.
    if coeffs[0].is_zero() {
        roots.push(K::zero());
        let first = coeffs.iter().position(|c| !c.is_zero()).unwrap();
        coeffs.drain(..first);
    }
    if coeffs.len() < 2 {
        return roots;
    }
    // Scale to integral coefficients; then a root r satisfies lc·r integral.
    let mut denom = BigInt::one();
    for c in &coeffs {
        denom = denom.lcm(&c.denominator_lcm());
    }
    let scale = K::from_rational(BigRational::from_integer(denom));
    let integral: Vec<K> = coeffs.iter().map(|c| c.clone() * scale.clone()).collect();
    let lead = integral.last().unwrap().clone();
    let numeric: Vec<Complex<f64>> = integral.iter().map(|c| c.to_complex::<f64>()).collect();
    let lead_f = lead.to_complex::<f64>();
    for z in polynomial_roots(&numeric) {
        let Some(scaled) = K::round_integral(z * lead_f) else {
            continue;
        };
        let candidate = scaled / lead.clone();
        if roots.contains(&candidate) {
            continue;
        }
        if horner(&integral, &candidate).is_zero() {
            roots.push(candidate);
        }
    }
    roots
}

fn horner<K: Scalar>(coeffs: &[K], at: &K) -> K {
    coeffs
        .iter()
        .rev()
        .fold(K::zero(), |acc, c| acc * at.clone() + c.clone())
}

/// A value in ℕ ∪ {∞} or ℚ ∪ {∞}; `Infinite` compares above every finite value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Extended<T> {
    Finite(T),
    Infinite,
}

impl<T> Extended<T> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinite)
    }

    pub fn finite(&self) -> Option<&T> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Extended<U> {
        match self {
            Extended::Finite(v) => Extended::Finite(f(v)),
            Extended::Infinite => Extended::Infinite,
        }
    }
}

impl<T: Ord> PartialOrd for Extended<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Ord> Ord for Extended<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.cmp(b),
            (Extended::Finite(_), Extended::Infinite) => Ordering::Less,
            (Extended::Infinite, Extended::Finite(_)) => Ordering::Greater,
            (Extended::Infinite, Extended::Infinite) => Ordering::Equal,
        }
    }
}

/// Renders a rational as `7/2`, an integer as `3`, and infinity as `inf`.
pub fn render_exponent(value: &Extended<BigRational>) -> String {
    match value {
        Extended::Finite(r) => r.render(),
        Extended::Infinite => "inf".to_string(),
    }
}
