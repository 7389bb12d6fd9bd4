//! Report documents: JSON schema and plain-text rendering.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::parse::Field;
use crate::engine::{LojasiewiczResult, MappingInput};
use crate::numeric::EstimateReport;
use crate::scalar::{render_exponent, Extended, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub field: Field,
    pub components: Vec<String>,
    /// Reduced fraction such as `7/2`, or `inf`.
    pub exponent: String,
    /// Shear `c` of `x ↦ x + c·y`; absent when every component is zero.
    pub shear: Option<String>,
    /// Order of the product of the nonzero components.
    pub ord: Option<u32>,
    pub branches: Vec<BranchRow>,
    pub maximizers: Vec<usize>,
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numeric: Option<NumericSection>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchRow {
    pub index: usize,
    pub e: u32,
    /// Multiplicity of the branch.
    pub ord: u32,
    pub residue_degree: usize,
    /// Minimal polynomials of the coefficient extension, innermost first.
    pub extension: Vec<String>,
    /// Intersection multiplicities with the nonzero components, in input order.
    pub mu: Vec<String>,
    pub lambda: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub branch: usize,
    pub degree: usize,
    pub x: String,
    pub y: String,
    pub extension: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericSection {
    pub seed: u64,
    pub estimate: Option<f64>,
    pub relative_error: Option<f64>,
    pub agrees: bool,
    pub branches: Vec<NumericBranch>,
    pub ambient: Option<Ambient>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericBranch {
    pub branch: usize,
    pub slope: Option<f64>,
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ambient {
    pub passed: bool,
    pub nu: f64,
    pub constant: Option<f64>,
    pub worst_ratio: Option<f64>,
    pub samples: usize,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn render_mu(m: &Extended<u64>) -> String {
    match m {
        Extended::Finite(v) => v.to_string(),
        Extended::Infinite => "inf".into(),
    }
}

impl From<&EstimateReport<f64>> for NumericSection {
    fn from(r: &EstimateReport<f64>) -> Self {
        NumericSection {
            seed: r.seed,
            estimate: r.estimate.and_then(finite),
            relative_error: r.relative_error.and_then(finite),
            agrees: r.agrees,
            branches: r
                .branches
                .iter()
                .map(|b| NumericBranch {
                    branch: b.branch,
                    slope: b.fit.as_ref().and_then(|f| finite(f.slope)),
                    residual: b.fit.as_ref().and_then(|f| finite(f.residual)),
                })
                .collect(),
            ambient: r.ambient.as_ref().map(|a| Ambient {
                passed: a.passed,
                nu: a.nu,
                constant: finite(a.constant),
                worst_ratio: finite(a.worst_ratio),
                samples: a.samples,
            }),
            passed: r.passed(),
        }
    }
}

impl ReportDocument {
    pub fn build<K: Scalar>(
        field: Field,
        input: &MappingInput<K>,
        result: &mut LojasiewiczResult<K>,
        witness_degree: usize,
        numeric: Option<&EstimateReport<f64>>,
    ) -> Self {
        let branches = result
            .classes
            .iter()
            .zip(&result.table.rows)
            .zip(&result.lambdas)
            .enumerate()
            .map(|(index, ((class, row), b))| BranchRow {
                index,
                e: class.e(),
                ord: class.multiplicity(),
                residue_degree: class.residue_degree(),
                extension: class.tower().describe(),
                mu: row.iter().map(render_mu).collect(),
                lambda: render_exponent(&b.lambda),
            })
            .collect();
        let witness = result.witness.and_then(|w| {
            let p = result.parametrization(w, witness_degree)?;
            Some(Witness {
                branch: w,
                degree: witness_degree,
                x: p.render_x("t"),
                y: p.render_y("t"),
                extension: p.tower().describe(),
            })
        });
        ReportDocument {
            field,
            components: input.components().iter().map(|c| c.render()).collect(),
            exponent: render_exponent(&result.exponent),
            shear: result.shear().map(|c| c.render()),
            ord: result.problem.as_ref().map(|p| p.ord),
            branches,
            maximizers: result.maximizers.clone(),
            witness,
            numeric: numeric.map(NumericSection::from),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Plain-text rendering: the exponent, then the optional table and
    /// numeric summary.
    pub fn to_text(&self, table: bool) -> String {
        let mut out = format!("{}\n", self.exponent);
        if table {
            if let Some(c) = &self.shear {
                let _ = writeln!(out, "shear: x -> x + ({c})*y");
            }
            let mu_width = self.branches.iter().map(|b| b.mu.join(" ").len()).max().unwrap_or(2).max(2);
            let _ = writeln!(out, "{:>6} {:>3} {:>3} {:>3}  {:<mu_width$}  lambda", "branch", "e", "ord", "deg", "mu");
            for b in &self.branches {
                let mark = if self.maximizers.contains(&b.index) { " *" } else { "" };
                let _ = writeln!(
                    out,
                    "{:>6} {:>3} {:>3} {:>3}  {:<mu_width$}  {}{mark}",
                    b.index,
                    b.e,
                    b.ord,
                    b.residue_degree,
                    b.mu.join(" "),
                    b.lambda
                );
                for m in &b.extension {
                    let _ = writeln!(out, "{:>17}over a root of {m}", "");
                }
            }
            if let Some(w) = &self.witness {
                let _ = writeln!(out, "witness: branch {} (t-degree {})", w.branch, w.degree);
                let _ = writeln!(out, "  x = {}", w.x);
                let _ = writeln!(out, "  y = {}", w.y);
            }
        }
        if let Some(n) = &self.numeric {
            match (n.estimate, n.relative_error) {
                (Some(est), Some(err)) => {
                    let _ = writeln!(out, "estimate: {est:.4} (relative error {:.2}%)", 100.0 * err);
                }
                _ => {
                    let _ = writeln!(out, "estimate: none (exponent is inf)");
                }
            }
            for b in &n.branches {
                if let (Some(s), Some(r)) = (b.slope, b.residual) {
                    let _ = writeln!(out, "  branch {}: slope {s:.4}, residual {r:.2e}", b.branch);
                }
            }
            if let Some(a) = &n.ambient {
                let ratio = a.worst_ratio.map_or("n/a".to_string(), |r| format!("{r:.3}"));
                let verdict = if a.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(out, "ambient check at nu = {:.4}: {verdict} (worst ratio {ratio}, {} samples)", a.nu, a.samples);
            }
            let _ = writeln!(out, "verify: {} (seed {})", if n.passed { "PASS" } else { "FAIL" }, n.seed);
        }
        out
    }
}
