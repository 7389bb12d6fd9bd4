//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use loja_core::engine::{mu, Valuation};
use loja_core::numeric::{ambient_check, finite_curves, validate, NumericMap, SampleConfig};
use loja_core::{exponent, expand_branches, BranchClass, Extended, Rational, RationalMapping, RationalPoly, Tower};
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_260_101;
const RELATIVE_TOLERANCE: f64 = 0.05;
const SHARPNESS_FACTOR: f64 = 1.15;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn exact_corpus_values() -> Result<String, String> {
    let limit = Duration::from_secs(1);
    let mut slowest = Duration::ZERO;
    let cases = exact_corpus();
    for case in &cases {
        let (result, took) = timed(|| exponent(&mapping(case)));
        let got = render(&result.map_err(|e| format!("{}: {e}", case.name))?.exponent);
        let stated = case.stated.clone().unwrap();
        let oracle = render(&oracle_exponent(case));
        ensure(got == stated, || format!("{}: got {got}, expected {stated}", case.name))?;
        ensure(oracle == stated, || format!("{}: oracle gives {oracle}, expected {stated}", case.name))?;
        ensure(took < limit, || format!("{}: took {took:?}", case.name))?;
        slowest = slowest.max(took);
    }
    Ok(format!("{} mappings, exact match, slowest {:.3} s (limit 1 s each)", cases.len(), slowest.as_secs_f64()))
}

fn numeric_cross_check() -> Result<String, String> {
    let limit = Duration::from_secs(10);
    let cfg = SampleConfig::<f64>::with_seed(SEED);
    let mut checked = 0;
    let mut slowest = Duration::ZERO;
    let mut worst_error: f64 = 0.0;
    for case in corpus() {
        let input = mapping(&case);
        let start = Instant::now();
        let mut result = exponent(&input).map_err(|e| e.to_string())?;
        let Extended::Finite(exact) = result.exponent.clone() else { continue };
        let exact = exact.to_f64().unwrap();
        let report = validate(&input, &mut result, &cfg).map_err(|e| format!("{}: {e}", case.name))?;
        let err = report.relative_error.unwrap();
        ensure(err <= RELATIVE_TOLERANCE, || format!("{}: estimate {:?} vs {exact}", case.name, report.estimate))?;
        let ambient = report.ambient.clone().unwrap();
        ensure(ambient.passed, || format!("{}: ambient check fails at the exact exponent: {ambient:?}", case.name))?;
        let curves = finite_curves::<f64, Rational>(&mut result).map_err(|e| e.to_string())?;
        let raised = ambient_check(&NumericMap::new(&input), &curves, exact * SHARPNESS_FACTOR, &cfg)
            .map_err(|e| e.to_string())?;
        ensure(!raised.passed, || format!("{}: ambient check passes at {SHARPNESS_FACTOR}x", case.name))?;
        let took = start.elapsed();
        ensure(took < limit, || format!("{}: took {took:?}", case.name))?;
        slowest = slowest.max(took);
        worst_error = worst_error.max(err);
        checked += 1;
    }
    Ok(format!(
        "{checked} finite mappings, worst relative error {:.2e} (limit {RELATIVE_TOLERANCE}), \
         ambient PASS at L and FAIL at {SHARPNESS_FACTOR}L, slowest {:.2} s (limit 10 s)",
        worst_error,
        slowest.as_secs_f64()
    ))
}

fn random_invertible(rng: &mut ChaCha8Rng) -> [Rational; 4] {
    loop {
        let mut entry = || Rational::new(rng.gen_range(-4i64..=4).into(), rng.gen_range(1i64..=3).into());
        let m = [entry(), entry(), entry(), entry()];
        if !(m[0].clone() * m[3].clone() - m[1].clone() * m[2].clone()).is_zero() {
            return m;
        }
    }
}

fn random_vanishing(rng: &mut ChaCha8Rng, max_degree: u32, terms: usize) -> RationalPoly {
    let tower = Tower::default();
    let mut out = RationalPoly::zero(&tower);
    while out.is_zero() {
        let mono: Vec<((u32, u32), Rational)> = (0..terms)
            .map(|_| {
                let d = rng.gen_range(1..=max_degree);
                let a = rng.gen_range(0..=d);
                ((a, d - a), q(rng.gen_range(-5i64..=5)))
            })
            .collect();
        out = RationalPoly::from_terms(&tower, mono);
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut v = p.clone();
            v.insert(k, n - 1);
            out.push(v);
        }
    }
    out
}

fn invariance_suite() -> Result<String, String> {
    let limit = Duration::from_secs(60);
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut linear, mut perms, mut extensions) = (0, 0, 0);
    for case in corpus() {
        let input = mapping(&case);
        let base = exponent(&input).map_err(|e| e.to_string())?.exponent;
        for _ in 0..20 {
            let [a, b, c, d] = random_invertible(&mut rng);
            let changed = input.compose_linear(a, b, c, d);
            let got = exponent(&changed).map_err(|e| e.to_string())?.exponent;
            ensure(got == base, || format!("{}: linear change gives {} not {}", case.name, render(&got), render(&base)))?;
            linear += 1;
        }
        for p in permutations(input.components().len()) {
            let permuted = RationalMapping::new(p.iter().map(|&k| input.components()[k].clone()).collect()).unwrap();
            let got = exponent(&permuted).map_err(|e| e.to_string())?.exponent;
            ensure(got == base, || format!("{}: permutation {p:?} gives {}", case.name, render(&got)))?;
            perms += 1;
        }
        for _ in 0..3 {
            let mut comps = input.components().to_vec();
            comps.push(random_vanishing(&mut rng, 4, 3));
            let got = exponent(&RationalMapping::new(comps).unwrap()).map_err(|e| e.to_string())?.exponent;
            ensure(got <= base, || format!("{}: extension raises {} to {}", case.name, render(&base), render(&got)))?;
            extensions += 1;
        }
    }
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}"))?;
    Ok(format!(
        "{linear} linear changes, {perms} permutations, {extensions} extensions, {:.2} s (limit 60 s)",
        took.as_secs_f64()
    ))
}

/// `Σ residue_degree · μ(b, f)` over the branch classes `b` of `curve`, or
/// `None` if some class lies on `f`.
fn weighted_intersection(curve: &RationalPoly, f: &RationalPoly) -> Result<Option<u64>, String> {
    let mut pending: Vec<BranchClass<Rational>> = expand_branches(curve).map_err(|e| e.to_string())?;
    let mut total = 0u64;
    let mut finite = true;
    while let Some(mut class) = pending.pop() {
        match mu(&mut class, f, curve).map_err(|e| e.to_string())? {
            Valuation::Value(Extended::Finite(v)) => total += class.residue_degree() as u64 * v,
            Valuation::Value(Extended::Infinite) => finite = false,
            Valuation::Split(ev) => pending.extend(class.split(&ev).map_err(|e| e.to_string())?),
        }
    }
    Ok(finite.then_some(total))
}

fn oracle_equivalence() -> Result<String, String> {
    let mut pairs = 0;
    for case in corpus() {
        let comps: Vec<RationalPoly> =
            mapping(&case).components().iter().filter(|f| !f.is_zero()).cloned().collect();
        let mut curves: Vec<RationalPoly> = case.germs.iter().map(|g| poly(g)).collect();
        curves.extend(comps.iter().cloned());
        for curve in curves {
            let c = local_shear(&curve, &comps);
            let sheared = curve.shear_scalar(c.clone()).squarefree_part().map_err(|e| e.to_string())?;
            for f in &comps {
                let fs = f.shear_scalar(c.clone());
                let resultant = sheared.resultant_y(&fs).map_err(|e| e.to_string())?;
                match weighted_intersection(&sheared, &fs)? {
                    Some(total) => {
                        let ord = resultant.ord();
                        ensure(ord == Extended::Finite(total as usize), || {
                            format!("{}: curve {} vs {}: sum {total}, resultant order {ord:?}", case.name, curve, f)
                        })?;
                        pairs += 1;
                    }
                    None => ensure(resultant.is_zero() && shares_factor(&curve, f), || {
                        format!("{}: branch of {} on {} but no common factor", case.name, curve, f)
                    })?,
                }
            }
        }
    }
    Ok(format!("{pairs} curve/component pairs agree with resultant orders"))
}

fn back_substitution_ok(curve: &RationalPoly, classes: &mut [BranchClass<Rational>], n: usize) -> Result<(), String> {
    for class in classes {
        let residual = class.substitute(curve, n + 1).map_err(|e| e.to_string())?;
        ensure(residual.iter().all(|c| c.is_zero()), || format!("residual of order <= {n} for {}", curve))?;
    }
    Ok(())
}

fn structural_invariants() -> Result<String, String> {
    const N: usize = 30;
    let limit = Duration::from_secs(120);
    let start = Instant::now();
    let mut corpus_checked = 0;
    for case in corpus() {
        let input = mapping(&case);
        let mut result = exponent(&input).map_err(|e| e.to_string())?;
        let Some(problem) = result.problem.clone() else { continue };
        let weighted: usize = result.classes.iter().map(|c| c.residue_degree() * c.e() as usize).sum();
        let ord_red = *problem.reduced.ord().finite().unwrap() as usize;
        ensure(weighted == ord_red, || format!("{}: sum of deg*e {weighted} vs ord f_red {ord_red}", case.name))?;
        back_substitution_ok(&problem.reduced, &mut result.classes, N).map_err(|e| format!("{}: {e}", case.name))?;
        for (row, class) in result.table.rows.iter().zip(&result.classes) {
            for (m, f) in row.iter().zip(&problem.components) {
                let floor = class.multiplicity() as u64 * *f.ord().finite().unwrap() as u64;
                ensure(m.finite().is_none_or(|&v| v >= floor), || format!("{}: mu {m:?} below {floor}", case.name))?;
            }
        }
        if let Extended::Finite(l) = &result.exponent {
            ensure(l.denom() <= &(problem.ord as i64).into(), || format!("{}: denominator of {l} exceeds ord f", case.name))?;
            let min_ord = problem.components.iter().map(|f| *f.ord().finite().unwrap()).min().unwrap();
            ensure(*l >= q(min_ord as i64), || format!("{}: {l} below min ord {min_ord}", case.name))?;
        }
        corpus_checked += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x5eed);
    let mut random_checked = 0;
    while random_checked < 50 {
        let terms = rng.gen_range(2..=6);
        let p = random_vanishing(&mut rng, 8, terms);
        let Some(c) = (0..20i64).map(q).find(|c| p.shear_scalar(c.clone()).regular_in_y().unwrap_or(false)) else {
            continue;
        };
        let reduced = p.shear_scalar(c).squarefree_part().map_err(|e| e.to_string())?;
        let mut classes = expand_branches(&reduced).map_err(|e| format!("{reduced}: {e}"))?;
        let weighted: usize = classes.iter().map(|c| c.residue_degree() * c.e() as usize).sum();
        let ord = *reduced.ord().finite().unwrap() as usize;
        ensure(weighted == ord, || format!("{reduced}: sum of deg*e {weighted} vs ord {ord}"))?;
        back_substitution_ok(&reduced, &mut classes, N)?;
        random_checked += 1;
    }
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}"))?;
    Ok(format!(
        "{corpus_checked} corpus mappings and {random_checked} random curves (degree <= 8), residual order > {N}, {:.2} s (limit 120 s)",
        took.as_secs_f64()
    ))
}

fn performance_guard() -> Result<String, String> {
    let limit = Duration::from_secs(5);
    let mut instances: Vec<Vec<String>> = [
        &["(y^2-x^3)^2-4*x^5*y-x^7", "y^3-x^7+x^5*y", "(x-y)^2*(x+y)^3+x^9*y", "x^10+y^10-x^3*y^4"][..],
        &["(y^2-x^3)*(y^2-x^5)*(y-x^2)", "(y-x^2)^2*(y+x^2)^2*x^2", "(x^2+y^3)^2*(x^3-y^4)", "x*y*(x-y)*(x+y)*(x-2*y)*(y^2-x^5)"],
        &["(x^3-y^7)*(y^3-x^2)", "(y^2-2*x^3)^2*(y^2-3*x^3)+x^10", "x^5*y^5", "(x^2-2*y^2)^5"],
    ]
    .iter()
    .map(|c| c.iter().map(|s| s.to_string()).collect())
    .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xbeef);
    for _ in 0..5 {
        let comps = (0..4)
            .map(|_| {
                let a = random_vanishing(&mut rng, 5, 3);
                let b = random_vanishing(&mut rng, 5, 3);
                format!("({a})*({b})")
            })
            .collect();
        instances.push(comps);
    }
    let mut slowest = Duration::ZERO;
    for comps in &instances {
        let case = Case { name: comps.join(", "), components: comps.clone(), germs: Vec::new(), stated: None };
        let input = mapping(&case);
        ensure(input.components().iter().all(|f| f.total_degree() <= 10), || format!("{}: degree above 10", case.name))?;
        let (result, took) = timed(|| exponent(&input));
        result.map_err(|e| format!("{}: {e}", case.name))?;
        ensure(took < limit, || format!("{}: took {took:?}", case.name))?;
        slowest = slowest.max(took);
    }
    Ok(format!(
        "{} mappings with m = 4 and degree <= 10, slowest {:.2} s (limit 5 s)",
        instances.len(),
        slowest.as_secs_f64()
    ))
}

fn main() {
    let criteria: [(&str, Check); 6] = [
        ("exact corpus", exact_corpus_values),
        ("numeric cross-check", numeric_cross_check),
        ("invariance", invariance_suite),
        ("resultant oracle", oracle_equivalence),
        ("structural invariants", structural_invariants),
        ("performance", performance_guard),
    ];
    let mut failures = 0;
    for (k, (title, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {title}: {detail}", k + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {}: {title}: {detail}", k + 1);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
