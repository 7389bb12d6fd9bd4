use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use num_complex::Complex;
use num_rational::BigRational;

use super::parse::{parse_scalar, Field, InputDocument, InputError};
use super::report::ReportDocument;
use crate::engine::{exponent_with, EngineConfig, ShearMode};
use crate::error::Error;
use crate::numeric::{validate, SampleConfig};
use crate::scalar::Scalar;
use crate::tower::Tower;

/// Exact local Łojasiewicz exponent of a polynomial map (ℂ², 0) → (ℂᵐ, 0).
#[derive(Parser, Debug, Clone)]
#[command(name = "loja", version)]
pub struct Args {
    /// Components in x and y, e.g. "y^2 - x^3" "x^2*y". Put `--` before a
    /// component that starts with `-`.
    pub components: Vec<String>,
    /// JSON input document: {"components": [...], "field": "rational"|"gaussian"}.
    #[arg(long, conflicts_with = "components")]
    pub input: Option<PathBuf>,
    /// Coefficient field; `gaussian` enables the imaginary unit `i`.
    #[arg(long)]
    pub field: Option<Field>,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
    /// Print the branch table and witness parametrization.
    #[arg(long)]
    pub table: bool,
    /// Cross-check the exponent numerically.
    #[arg(long)]
    pub verify: bool,
    /// Seed for numeric sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Truncation degree in t of the witness parametrization.
    #[arg(long, default_value_t = 12)]
    pub witness_degree: usize,
    /// Largest allowed degree of a coefficient extension.
    #[arg(long, default_value_t = 256)]
    pub max_tower_degree: usize,
    /// Use x -> x + c*y with this c instead of searching for a shear.
    #[arg(long, allow_hyphen_values = true)]
    pub shear: Option<String>,
}

const EXIT_INPUT: i32 = 2;
const EXIT_GUARD: i32 = 3;
const EXIT_VERIFY: i32 = 4;

enum Failure {
    Input(String),
    Guard(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_resource_guard() {
            Failure::Guard(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        match e {
            InputError::Engine(e) => e.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn execute<K: Scalar>(args: &Args, doc: &InputDocument) -> Result<(ReportDocument, bool), Failure> {
    let tower = Tower::<K>::new(args.max_tower_degree);
    let input = doc.to_mapping(&tower)?;
    let shear = match &args.shear {
        Some(text) => ShearMode::Fixed(parse_scalar::<K>(text).map_err(|e| Failure::Input(format!("--shear: {e}")))?),
        None => ShearMode::Deterministic,
    };
    let mut result = exponent_with(&input, &EngineConfig { shear, parallel: true })?;
    let numeric = if args.verify {
        Some(validate::<f64, K>(&input, &mut result, &SampleConfig::with_seed(args.seed))?)
    } else {
        None
    };
    let passed = numeric.as_ref().is_none_or(|n| n.passed());
    let report = ReportDocument::build(doc.field, &input, &mut result, args.witness_degree, numeric.as_ref());
    Ok((report, passed))
}

fn load(args: &Args) -> Result<InputDocument, Failure> {
    let mut doc = match &args.input {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            InputDocument::from_json(&text)?
        }
        None => InputDocument { components: args.components.clone(), field: Field::Rational },
    };
    if let Some(field) = args.field {
        doc.field = field;
    }
    Ok(doc)
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let outcome = load(&args).and_then(|doc| match doc.field {
        Field::Rational => execute::<BigRational>(&args, &doc),
        Field::Gaussian => execute::<Complex<BigRational>>(&args, &doc),
    });
    match outcome {
        Ok((report, passed)) => {
            let text = if args.json { format!("{}\n", report.to_json()) } else { report.to_text(args.table) };
            let _ = out.write_all(text.as_bytes());
            if passed {
                0
            } else {
                let _ = writeln!(err, "loja: numeric verification failed");
                EXIT_VERIFY
            }
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "loja: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Guard(msg)) => {
            let _ = writeln!(err, "loja: {msg}");
            EXIT_GUARD
        }
    }
}
