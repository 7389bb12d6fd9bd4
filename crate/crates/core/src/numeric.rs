//! Floating-point cross-check of exact exponents.
//!
//! Branch slopes are least-squares fits of `log|F(γ(t))|` against `log|γ(t)|`
//! with the polycylindric (max) norm on both sides; the ambient check samples
//! the polycylinder around the origin.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bipoly::BiPoly;
use crate::engine::{LojasiewiczResult, MappingInput};
use crate::error::{Error, Result};
use crate::roots::evaluate;
use crate::scalar::{rational_to_float, Extended, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct SampleConfig<F> {
    /// Strictly decreasing radii in `(0, 1)`.
    pub radii: Vec<F>,
    pub samples_per_radius: usize,
    pub seed: u64,
    /// Number of trailing radii used by slope fits.
    pub fit_window: usize,
    pub tolerance: F,
    /// Largest acceptable RMS residual of a slope fit.
    pub residual_threshold: F,
}

impl<F: Float> Default for SampleConfig<F> {
    fn default() -> Self {
        let ten = F::from(10.0).unwrap();
        let radii = (0..9)
            .map(|k| ten.powf(-(F::one() + F::from(k).unwrap() / F::from(2.0).unwrap())))
            .collect();
        SampleConfig {
            radii,
            samples_per_radius: 64,
            seed: 0,
            fit_window: 5,
            tolerance: F::from(0.05).unwrap(),
            residual_threshold: F::from(0.02).unwrap(),
        }
    }
}

impl<F: Float> SampleConfig<F> {
    pub fn with_seed(seed: u64) -> Self {
        SampleConfig { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: F| v > F::zero() && v < F::one();
        if self.radii.is_empty() || !self.radii.iter().all(|&r| in_unit(r)) {
            return Err(Error::Precondition("radii must lie in (0, 1)".into()));
        }
        if self.radii.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Precondition("radii must be strictly decreasing".into()));
        }
        if !in_unit(self.tolerance) {
            return Err(Error::Precondition("tolerance must lie in (0, 1)".into()));
        }
        if self.fit_window < 2 || self.fit_window > self.radii.len() {
            return Err(Error::Precondition("fit window must cover 2 to all radii".into()));
        }
        Ok(())
    }

    fn window(&self) -> &[F] {
        &self.radii[self.radii.len() - self.fit_window..]
    }
}

/// A mapping with floating-point coefficients.
#[derive(Clone, Debug)]
pub struct NumericMap<F> {
    components: Vec<Vec<(u32, u32, Complex<F>)>>,
}

impl<F: Float> NumericMap<F> {
    pub fn new<K: Scalar>(input: &MappingInput<K>) -> Self {
        Self::from_components(input.components())
    }

    pub fn from_components<K: Scalar>(components: &[BiPoly<K>]) -> Self {
        let components = components
            .iter()
            .map(|f| f.support().into_iter().map(|(a, b)| (a, b, f.coefficient(a, b).to_complex(&[]))).collect())
            .collect();
        NumericMap { components }
    }

    pub fn values(&self, x: Complex<F>, y: Complex<F>) -> Vec<Complex<F>> {
        self.components
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .fold(Complex::new(F::zero(), F::zero()), |acc, &(a, b, c)| acc + c * x.powu(a) * y.powu(b))
            })
            .collect()
    }

    /// `max_j |f_j(x, y)|`.
    pub fn norm(&self, x: Complex<F>, y: Complex<F>) -> F {
        self.values(x, y).into_iter().map(|v| v.norm()).fold(F::zero(), F::max)
    }
}

fn max_norm<F: Float>(x: Complex<F>, y: Complex<F>) -> F {
    x.norm().max(y.norm())
}

/// Truncated float parametrization `t ↦ (x(t), y(t))` of one branch in the
/// input coordinates.
#[derive(Clone, Debug)]
pub struct NumericCurve<F> {
    pub branch: usize,
    pub e: u32,
    pub x: Vec<Complex<F>>,
    pub y: Vec<Complex<F>>,
}

impl<F: Float> NumericCurve<F> {
    /// Curve of branch `i` under the embedding `choice` of its tower. The
    /// truncation degree is `max(2·B, 20)` for the largest finite `μ` `B` of
    /// the branch's row.
    pub fn from_branch<K: Scalar>(result: &mut LojasiewiczResult<K>, i: usize, choice: &[usize]) -> Result<Self> {
        let row = result.table.rows.get(i).ok_or_else(|| Error::Precondition(format!("no branch {i}")))?;
        let largest = row.iter().filter_map(|m| m.finite().copied()).max().unwrap_or(0) as usize;
        let degree = (2 * largest).max(20);
        let e = result.classes[i].e();
        let p = result
            .parametrization(i, degree)
            .ok_or_else(|| Error::Precondition("mapping has no branches".into()))?;
        let embedding: Vec<Complex<F>> = p.tower().embedding(choice);
        let (x, y) = p.to_complex(&embedding);
        Ok(NumericCurve { branch: i, e, x, y })
    }

    pub fn point(&self, t: Complex<F>) -> (Complex<F>, Complex<F>) {
        (evaluate(&self.x, t), evaluate(&self.y, t))
    }

    /// A point with `max(|x|, |y|) = r` at parameter angle `angle`.
    pub fn point_at_radius(&self, r: F, angle: F) -> (Complex<F>, Complex<F>) {
        let at = |rho: F| self.point(Complex::from_polar(rho, angle));
        let size = |rho: F| {
            let (x, y) = at(rho);
            max_norm(x, y)
        };
        let mut hi = F::from(1e-3).unwrap();
        let mut guard = 0;
        while size(hi) < r && guard < 200 {
            hi = hi * F::from(2.0).unwrap();
            guard += 1;
        }
        let mut lo = F::zero();
        for _ in 0..80 {
            let mid = (lo + hi) / F::from(2.0).unwrap();
            if size(mid) < r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        at(hi)
    }
}

/// Least-squares line through `(log|z|, log|F|)` samples.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeFit<F> {
    pub slope: F,
    pub intercept: F,
    /// Root-mean-square residual of the fit.
    pub residual: F,
    pub within_threshold: bool,
}

fn fit_line<F: Float>(points: &[(F, F)], threshold: F) -> Result<SlopeFit<F>> {
    let n = F::from(points.len()).unwrap();
    let mx = points.iter().fold(F::zero(), |a, p| a + p.0) / n;
    let my = points.iter().fold(F::zero(), |a, p| a + p.1) / n;
    let sxx = points.iter().fold(F::zero(), |a, p| a + (p.0 - mx) * (p.0 - mx));
    let sxy = points.iter().fold(F::zero(), |a, p| a + (p.0 - mx) * (p.1 - my));
    if !(sxx > F::epsilon()) || points.iter().any(|p| !p.1.is_finite()) {
        return Err(Error::DegenerateFit("sample points do not determine a slope".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse = points.iter().fold(F::zero(), |a, p| {
        let r = p.1 - (intercept + slope * p.0);
        a + r * r
    });
    let residual = (sse / n).sqrt();
    Ok(SlopeFit { slope, intercept, residual, within_threshold: residual <= threshold })
}

const SLOPE_ANGLE: f64 = 0.3;

/// Log-log slope of `|F|` along the curve over the fit window.
pub fn branch_slope<F: Float>(curve: &NumericCurve<F>, map: &NumericMap<F>, cfg: &SampleConfig<F>) -> Result<SlopeFit<F>> {
    let angle = F::from(SLOPE_ANGLE).unwrap();
    let points: Vec<(F, F)> = cfg
        .window()
        .iter()
        .map(|&r| {
            let (x, y) = curve.point_at_radius(r, angle);
            (max_norm(x, y).ln(), map.norm(x, y).ln())
        })
        .collect();
    fit_line(&points, cfg.residual_threshold)
}

/// Largest branch slope over the given curves.
pub fn estimate_s<F: Float>(map: &NumericMap<F>, curves: &[NumericCurve<F>], cfg: &SampleConfig<F>) -> Result<F> {
    let mut best: Option<F> = None;
    for c in curves {
        let s = branch_slope(c, map, cfg)?.slope;
        best = Some(best.map_or(s, |b: F| b.max(s)));
    }
    best.ok_or_else(|| Error::Precondition("no finite branches to fit".into()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AmbientVerdict<F> {
    pub passed: bool,
    pub nu: F,
    /// `A` fitted on the branches; the bound uses `A/2`.
    pub constant: F,
    /// Smallest `|F(z)| / (A/2 · |z|^(ν(1+tol)))` seen.
    pub worst_ratio: F,
    pub worst_point: (Complex<F>, Complex<F>),
    pub samples: usize,
}

const BRANCH_ANGLES: usize = 8;

fn branch_samples<F: Float>(curves: &[NumericCurve<F>], r: F) -> Vec<(Complex<F>, Complex<F>)> {
    let tau = F::from(std::f64::consts::TAU).unwrap();
    curves
        .iter()
        .flat_map(|c| {
            (0..BRANCH_ANGLES).map(move |k| {
                let angle = F::from(SLOPE_ANGLE).unwrap() + tau * F::from(k).unwrap() / F::from(BRANCH_ANGLES).unwrap();
                c.point_at_radius(r, angle)
            })
        })
        .collect()
}

/// Checks `|F(z)| ≥ A/2 · |z|^(ν(1+tol))` on branch samples and seeded random
/// samples of the polydisc at every radius, where `A` is the smallest value of
/// `|F|/|z|^ν` over branch samples at the smallest radius.
pub fn ambient_check<F: Float + Send + Sync>(
    map: &NumericMap<F>,
    curves: &[NumericCurve<F>],
    nu: F,
    cfg: &SampleConfig<F>,
) -> Result<AmbientVerdict<F>> {
    cfg.validate()?;
    let r_min = *cfg.radii.last().unwrap();
    let constant = branch_samples(curves, r_min)
        .into_iter()
        .map(|(x, y)| map.norm(x, y) / max_norm(x, y).powf(nu))
        .fold(F::infinity(), F::min);
    if !(constant.is_finite() && constant > F::zero()) {
        return Err(Error::DegenerateFit("branch samples give no positive constant".into()));
    }
    let half = constant / F::from(2.0).unwrap();
    let power = nu * (F::one() + cfg.tolerance);
    let per_radius: Vec<(F, (Complex<F>, Complex<F>), usize)> = cfg
        .radii
        .par_iter()
        .enumerate()
        .map(|(k, &r)| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(k as u64);
            let mut points = branch_samples(curves, r);
            for _ in 0..cfg.samples_per_radius {
                let mut disc = || {
                    let rho = r * F::from(rng.gen::<f64>().sqrt()).unwrap();
                    let phi = F::from(rng.gen::<f64>() * std::f64::consts::TAU).unwrap();
                    Complex::from_polar(rho, phi)
                };
                let x = disc();
                let y = disc();
                points.push((x, y));
            }
            let count = points.len();
            let (ratio, point) = points
                .into_iter()
                .map(|(x, y)| (map.norm(x, y) / (half * max_norm(x, y).powf(power)), (x, y)))
                .fold((F::infinity(), (Complex::new(F::zero(), F::zero()), Complex::new(F::zero(), F::zero()))), |a, b| {
                    if b.0 < a.0 {
                        b
                    } else {
                        a
                    }
                });
            (ratio, point, count)
        })
        .collect();
    let samples = per_radius.iter().map(|p| p.2).sum();
    let (worst_ratio, worst_point, _) = per_radius
        .into_iter()
        .fold((F::infinity(), (Complex::new(F::zero(), F::zero()), Complex::new(F::zero(), F::zero())), 0), |a, b| {
            if b.0 < a.0 {
                b
            } else {
                a
            }
        });
    Ok(AmbientVerdict { passed: worst_ratio >= F::one(), nu, constant, worst_ratio, worst_point, samples })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchEstimate<F> {
    pub branch: usize,
    pub lambda: Extended<BigRational>,
    /// `None` for branches with `λ = ∞`.
    pub fit: Option<SlopeFit<F>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport<F> {
    pub branches: Vec<BranchEstimate<F>>,
    /// Largest finite-branch slope.
    pub estimate: Option<F>,
    pub exact: Extended<BigRational>,
    pub relative_error: Option<F>,
    /// The estimate lies within the relative tolerance of the exact value.
    pub agrees: bool,
    pub ambient: Option<AmbientVerdict<F>>,
    pub seed: u64,
}

impl<F: Float> EstimateReport<F> {
    pub fn passed(&self) -> bool {
        self.exact.is_infinite() || (self.agrees && self.ambient.as_ref().is_some_and(|a| a.passed))
    }
}

/// Float curves of every finite-`λ` branch, one per embedding of its tower.
pub fn finite_curves<F: Float, K: Scalar>(result: &mut LojasiewiczResult<K>) -> Result<Vec<NumericCurve<F>>> {
    let mut out = Vec::new();
    for i in 0..result.classes.len() {
        if result.lambdas[i].lambda.is_infinite() {
            continue;
        }
        for choice in result.classes[i].tower().embedding_choices() {
            out.push(NumericCurve::from_branch(result, i, &choice)?);
        }
    }
    Ok(out)
}

pub fn to_float<F: Float>(value: &BigRational) -> F {
    rational_to_float(value)
}

/// Compares the exact exponent with slope fits and the ambient check at the
/// exact value.
pub fn validate<F: Float + Send + Sync, K: Scalar>(
    input: &MappingInput<K>,
    result: &mut LojasiewiczResult<K>,
    cfg: &SampleConfig<F>,
) -> Result<EstimateReport<F>> {
    cfg.validate()?;
    let map = NumericMap::new(input);
    let curves = finite_curves::<F, K>(result)?;
    let mut branches = Vec::new();
    for (i, b) in result.lambdas.iter().enumerate() {
        let fit = match curves.iter().find(|c| c.branch == i) {
            Some(c) => Some(branch_slope(c, &map, cfg)?),
            None => None,
        };
        branches.push(BranchEstimate { branch: i, lambda: b.lambda.clone(), fit });
    }
    let estimate = branches
        .iter()
        .filter_map(|b| b.fit.as_ref().map(|f| f.slope))
        .fold(None, |a: Option<F>, s| Some(a.map_or(s, |a| a.max(s))));
    let exact = result.exponent.clone();
    let (relative_error, ambient) = match (&exact, estimate) {
        (Extended::Finite(l), Some(est)) => {
            let l: F = to_float(l);
            let ambient = ambient_check(&map, &curves, l, cfg)?;
            (Some((est - l).abs() / l), Some(ambient))
        }
        _ => (None, None),
    };
    let agrees = relative_error.is_some_and(|r| r <= cfg.tolerance);
    Ok(EstimateReport { branches, estimate, exact, relative_error, agrees, ambient, seed: cfg.seed })
}

/// Rounds a float slope to the nearest fraction with denominator at most `max_den`.
pub fn nearest_fraction<F: Float>(value: F, max_den: u32) -> BigRational {
    let v = value.to_f64().unwrap_or(0.0);
    (1..=max_den.max(1))
        .map(|d| BigRational::new(BigInt::from((v * d as f64).round() as i64), BigInt::from(d)))
        .min_by(|a, b| {
            let da = (a.to_f64().unwrap_or(0.0) - v).abs();
            let db = (b.to_f64().unwrap_or(0.0) - v).abs();
            da.partial_cmp(&db).unwrap()
        })
        .unwrap()
}
