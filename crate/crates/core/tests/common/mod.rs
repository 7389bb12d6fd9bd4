//! Test corpus and a resultant-based oracle for exponents.
#![allow(dead_code)]

use loja_core::bipoly::resultant_is_local;
use loja_core::{parse_polynomial, Extended, Rational, RationalMapping, RationalPoly, Tower};

#[derive(Debug)]
pub struct Case {
    pub name: String,
    pub components: Vec<String>,
    /// Polynomials whose zero sets near the origin are single branches and
    /// together cover `{f₁⋯f_m = 0}`.
    pub germs: Vec<String>,
    /// Expected exponent, where stated independently of the oracle.
    pub stated: Option<String>,
}

fn case(name: &str, components: &[&str], germs: &[&str], stated: Option<&str>) -> Case {
    Case {
        name: name.to_string(),
        components: components.iter().map(|s| s.to_string()).collect(),
        germs: germs.iter().map(|s| s.to_string()).collect(),
        stated: stated.map(str::to_string),
    }
}

/// Instances with exponents stated up front.
pub fn exact_corpus() -> Vec<Case> {
    let mut out = vec![case("identity", &["x", "y"], &["x", "y"], Some("1"))];
    for a in 1..=4 {
        for b in 1..=4 {
            let (fa, fb) = (format!("x^{a}"), format!("y^{b}"));
            out.push(case(&format!("monomial {a},{b}"), &[&fa, &fb], &["x", "y"], Some(&a.max(b).to_string())));
        }
    }
    out.push(case("cusp and x2y", &["y^2 - x^3", "x^2*y"], &["y^2 - x^3", "x", "y"], Some("7/2")));
    out.push(case("cusp and x2", &["y^2 - x^3", "x^2"], &["y^2 - x^3", "x"], Some("2")));
    out.push(case("two cusps", &["y^2 - x^3", "x^2 - y^3"], &["y^2 - x^3", "x^2 - y^3"], Some("2")));
    out.push(case("single cusp", &["y^2 - x^3"], &["y^2 - x^3"], Some("inf")));
    out.push(case("single node", &["x*y"], &["x", "y"], Some("inf")));
    out.push(case("single line", &["x - 2*y"], &["x - 2*y"], Some("inf")));
    out
}

/// Further instances whose exponents come from the oracle alone.
pub fn extra_corpus() -> Vec<Case> {
    vec![
        case("cusps of different type", &["x^2 + y^3", "y^2 + x^5"], &["x^2 + y^3", "y^2 + x^5"], None),
        case("cusp and tangent cusp", &["y^3 - x^5", "x^2*y + y^4"], &["y^3 - x^5", "y", "x^2 + y^3"], None),
        case(
            "two characteristic pairs",
            &["(y^2 - x^3)^2 - 4*x^5*y - x^7", "x"],
            &["(y^2 - x^3)^2 - 4*x^5*y - x^7", "x"],
            None,
        ),
        case("tangent parabolas", &["y - x^2", "y + x^2 + x^3"], &["y - x^2", "y + x^2 + x^3"], None),
        case("three components", &["y^2 - x^3", "x^2*y", "x^5 + y^4"], &["y^2 - x^3", "x", "y", "x^5 + y^4"], None),
        case("shared branch", &["x*(y^2 - x^3)", "y*(y^2 - x^3)"], &["x", "y", "y^2 - x^3"], Some("inf")),
        case("zero component", &["0", "x", "y"], &["x", "y"], Some("1")),
    ]
}

pub fn corpus() -> Vec<Case> {
    let mut all = exact_corpus();
    all.extend(extra_corpus());
    all
}

pub fn poly(text: &str) -> RationalPoly {
    parse_polynomial(text, &Tower::default()).unwrap()
}

pub fn mapping(case: &Case) -> RationalMapping {
    RationalMapping::new(case.components.iter().map(|c| poly(c)).collect()).unwrap()
}

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// First shear `x ↦ x + c·y` of `0, 1, −1, 2, …` after which `q` is
/// y-regular and meets each of `others` without a common factor only at the
/// origin on the line x = 0.
pub fn local_shear(curve: &RationalPoly, others: &[RationalPoly]) -> Rational {
    for k in 0..200i64 {
        let c = q(if k % 2 == 1 { (k + 1) / 2 } else { -(k / 2) });
        let qs = curve.shear_scalar(c.clone());
        if !qs.regular_in_y().unwrap_or(false) {
            continue;
        }
        let ok = others.iter().filter(|f| !f.is_zero() && !shares_factor(curve, f)).all(|f| {
            let fs = f.shear_scalar(c.clone());
            resultant_is_local(&qs, &fs).unwrap_or(false)
        });
        if ok {
            return c;
        }
    }
    panic!("no local shear found");
}

pub fn shares_factor(a: &RationalPoly, b: &RationalPoly) -> bool {
    let g = a.gcd(b).unwrap();
    g.total_degree() > 0 && g.vanishes_at_origin()
}

/// Local intersection number of two curves at the origin, as the order in x
/// of their resultant in y.
pub fn intersection_number(a: &RationalPoly, b: &RationalPoly) -> Extended<u64> {
    if shares_factor(a, b) {
        return Extended::Infinite;
    }
    let c = local_shear(a, std::slice::from_ref(b));
    let r = a.shear_scalar(c.clone()).resultant_y(&b.shear_scalar(c)).unwrap();
    match r.ord() {
        Extended::Finite(k) => Extended::Finite(k as u64),
        Extended::Infinite => Extended::Infinite,
    }
}

/// `max over germs h of min_j I(h, f_j) / ord h`, with intersection numbers
/// from resultants.
pub fn oracle_exponent(case: &Case) -> Extended<Rational> {
    let comps: Vec<RationalPoly> =
        case.components.iter().map(|c| poly(c)).filter(|p| !p.is_zero()).collect();
    if comps.is_empty() {
        return Extended::Infinite;
    }
    case.germs
        .iter()
        .map(|g| {
            let h = poly(g);
            let m = *h.ord().finite().unwrap();
            comps
                .iter()
                .map(|f| intersection_number(&h, f))
                .min()
                .unwrap()
                .map(|v| Rational::new((v as i64).into(), (m as i64).into()))
        })
        .max()
        .unwrap()
}

pub fn render(value: &Extended<Rational>) -> String {
    loja_core::render_exponent(value)
}
