//! Floating-point roots of univariate complex polynomials (Aberth–Ehrlich).

use num_complex::Complex;
use num_traits::Float;

const MAX_ITERATIONS: usize = 500;

/// All complex roots of `coeffs[0] + coeffs[1]·z + …`, with multiplicity.
///
/// Trailing zero coefficients are ignored. Returns an empty vector for
/// constant input.
pub fn polynomial_roots<F: Float>(coeffs: &[Complex<F>]) -> Vec<Complex<F>> {
    let mut coeffs: Vec<Complex<F>> = coeffs.to_vec();
    while coeffs.last().is_some_and(|c| c.norm_sqr() == F::zero()) {
        coeffs.pop();
    }
    let degree = coeffs.len().saturating_sub(1);
    if degree == 0 {
        return Vec::new();
    }
    let lead = *coeffs.last().unwrap();
    let monic: Vec<Complex<F>> = coeffs.iter().map(|c| *c / lead).collect();
    if degree == 1 {
        return vec![-monic[0]];
    }

    // Cauchy bound for the initial circle.
    let bound = F::one()
        + monic[..degree]
            .iter()
            .map(|c| c.norm())
            .fold(F::zero(), |a, b| a.max(b));
    let two_pi = F::from(std::f64::consts::TAU).unwrap();
    let offset = F::from(0.4).unwrap();
    let n = F::from(degree).unwrap();
    let radius = bound * F::from(0.5).unwrap();
    let mut roots: Vec<Complex<F>> = (0..degree)
        .map(|k| {
            let angle = two_pi * F::from(k).unwrap() / n + offset;
            Complex::from_polar(radius, angle)
        })
        .collect();

    let tolerance = F::epsilon() * F::from(4.0).unwrap();
    for _ in 0..MAX_ITERATIONS {
        let mut largest_step = F::zero();
        for i in 0..degree {
            let z = roots[i];
            let (value, derivative) = eval_with_derivative(&monic, z);
            if value.norm_sqr() == F::zero() {
                continue;
            }
            let ratio = value / derivative;
            let mut repulsion = Complex::new(F::zero(), F::zero());
            for (j, other) in roots.iter().enumerate() {
                if j != i {
                    let diff = z - *other;
                    if diff.norm_sqr() > F::zero() {
                        repulsion = repulsion + Complex::new(F::one(), F::zero()) / diff;
                    }
                }
            }
            let denom = Complex::new(F::one(), F::zero()) - ratio * repulsion;
            let step = if denom.norm_sqr() > F::zero() && finite(ratio) {
                ratio / denom
            } else {
                Complex::new(F::zero(), F::zero())
            };
            if finite(step) {
                roots[i] = z - step;
                let scale = F::one().max(roots[i].norm());
                largest_step = largest_step.max(step.norm() / scale);
            }
        }
        if largest_step <= tolerance {
            break;
        }
    }
    roots
}

fn finite<F: Float>(z: Complex<F>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

fn eval_with_derivative<F: Float>(coeffs: &[Complex<F>], z: Complex<F>) -> (Complex<F>, Complex<F>) {
    let zero = Complex::new(F::zero(), F::zero());
    let mut value = zero;
    let mut derivative = zero;
    for c in coeffs.iter().rev() {
        derivative = derivative * z + value;
        value = value * z + *c;
    }
    (value, derivative)
}

/// Evaluates a complex polynomial (coefficients low to high) at `z`.
pub fn evaluate<F: Float>(coeffs: &[Complex<F>], z: Complex<F>) -> Complex<F> {
    coeffs
        .iter()
        .rev()
        .fold(Complex::new(F::zero(), F::zero()), |acc, c| acc * z + *c)
}
