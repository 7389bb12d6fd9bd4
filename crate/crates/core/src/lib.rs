//! Exact local Łojasiewicz exponents of polynomial maps `(ℂ², 0) → (ℂᵐ, 0)`.
//!
//! The pipeline shears the input into y-regular coordinates, enumerates the
//! branches of the product of the components with Newton–Puiseux over a
//! tower of algebraic extensions, and reads the exponent off the table of
//! intersection multiplicities. Everything is generic over the exact base
//! field ([`scalar::Scalar`]); the aliases below fix it to ℚ or ℚ(i).
//!
//! ```
//! use loja_core::{exponent, parse_polynomial, RationalMapping, Tower};
//!
//! let tower = Tower::default();
//! let f = parse_polynomial("y^2 - x^3", &tower).unwrap();
//! let g = parse_polynomial("x^2*y", &tower).unwrap();
//! let result = exponent(&RationalMapping::new(vec![f, g]).unwrap()).unwrap();
//! assert_eq!(loja_core::render_exponent(&result.exponent), "7/2");
//! ```

pub mod bipoly;
pub mod cli;
pub mod engine;
pub mod error;
pub mod numeric;
pub mod puiseux;
pub mod roots;
pub mod scalar;
mod series;
pub mod tower;

pub use bipoly::{BiPoly, UniPoly};
pub use cli::parse::{parse_polynomial, InputDocument};
pub use engine::{exponent, exponent_with, EngineConfig, LojasiewiczResult, MappingInput, ShearMode};
pub use error::{Error, Result};
pub use puiseux::{expand_branches, BranchClass};
pub use scalar::{render_exponent, Extended, Scalar};
pub use tower::{AlgebraicNumber, Tower};

/// The field ℚ.
pub type Rational = num_rational::BigRational;
/// The field ℚ(i).
pub type Gaussian = num_complex::Complex<Rational>;

pub type RationalPoly = BiPoly<Rational>;
pub type GaussianPoly = BiPoly<Gaussian>;
pub type RationalMapping = MappingInput<Rational>;
pub type GaussianMapping = MappingInput<Gaussian>;
pub type RationalResult = LojasiewiczResult<Rational>;
pub type GaussianResult = LojasiewiczResult<Gaussian>;
