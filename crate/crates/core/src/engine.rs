//! Local Łojasiewicz exponent of a polynomial map `(f₁, …, f_m): ℂ² → ℂᵐ`.
//!
//! The exponent is `max_i min_j μ(hᵢ, f_j) / ord hᵢ` over the branches `hᵢ`
//! of `f = f₁⋯f_m` at the origin, where `μ(h, g)` is the order in `t` of
//! `g` along a primitive parametrization of `h`.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bipoly::BiPoly;
use crate::error::{Error, Result};
use crate::puiseux::{expand_branches, BranchClass};
use crate::scalar::{Extended, Scalar};
use crate::series;
use crate::tower::{Dyn, Halt, Poly, SplitEvent, Tower};

/// Components of a mapping over a common base field.
#[derive(Clone, Debug)]
pub struct MappingInput<K: Scalar> {
    components: Vec<BiPoly<K>>,
}

impl<K: Scalar> MappingInput<K> {
    pub fn new(components: Vec<BiPoly<K>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyMapping);
        }
        if components.iter().any(|c| c.tower().depth() != 0) {
            return Err(Error::Precondition("components must have base-field coefficients".into()));
        }
        Ok(MappingInput { components })
    }

    pub fn components(&self) -> &[BiPoly<K>] {
        &self.components
    }

    pub fn field(&self) -> &'static str {
        K::FIELD
    }

    /// The map composed with the linear change `(x, y) ↦ (a·x + b·y, c·x + d·y)`.
    pub fn compose_linear(&self, a: K, b: K, c: K, d: K) -> Self {
        let components = self
            .components
            .iter()
            .map(|f| f.linear_substitute(a.clone(), b.clone(), c.clone(), d.clone()))
            .collect();
        MappingInput { components }
    }
}

/// How the shear `x ↦ x + c·y` making `f` y-regular is chosen.
#[derive(Clone, Debug, Default)]
pub enum ShearMode<K: Scalar> {
    /// First regular value of `0, 1, −1, 2, −2, …`.
    #[default]
    Deterministic,
    /// Exactly this value; fails if it does not regularize `f`.
    Fixed(K),
    /// Seeded random integers in `[−1000, 1000]`.
    Random(u64),
}

#[derive(Clone, Debug)]
pub struct EngineConfig<K: Scalar> {
    pub shear: ShearMode<K>,
    /// Compute table rows on the rayon pool.
    pub parallel: bool,
}

impl<K: Scalar> Default for EngineConfig<K> {
    fn default() -> Self {
        EngineConfig { shear: ShearMode::Deterministic, parallel: true }
    }
}

/// The input after dropping zero components and shearing into y-regular
/// coordinates.
#[derive(Clone, Debug)]
pub struct NormalizedProblem<K: Scalar> {
    /// Sheared nonzero components.
    pub components: Vec<BiPoly<K>>,
    /// Position of each retained component in the original input.
    pub indices: Vec<usize>,
    pub shear: K,
    /// `f = Π f_j` in sheared coordinates.
    pub product: BiPoly<K>,
    /// Squarefree part of `f`.
    pub reduced: BiPoly<K>,
    pub ord: u32,
    /// Pairwise coprime factors of `f_red` through the origin.
    pub pieces: Vec<CurvePiece<K>>,
}

/// A factor of `f_red` together with the components it divides. Every branch
/// of the piece lies in `{f_j = 0}` exactly for the flagged `j`.
#[derive(Clone, Debug)]
pub struct CurvePiece<K: Scalar> {
    pub curve: BiPoly<K>,
    pub on_component: Vec<bool>,
}

fn quotient<K: Scalar>(a: &BiPoly<K>, b: &BiPoly<K>) -> Result<BiPoly<K>> {
    a.exact_div(b)?.ok_or_else(|| Error::Precondition("gcd does not divide".into()))
}

fn is_constant<K: Scalar>(p: &BiPoly<K>) -> bool {
    p.total_degree() == 0
}

/// Refines squarefree polynomials into pairwise coprime factors using gcds only.
fn coprime_basis<K: Scalar>(polys: &[BiPoly<K>]) -> Result<Vec<BiPoly<K>>> {
    let mut basis: Vec<BiPoly<K>> = Vec::new();
    for p in polys {
        let mut rest = p.clone();
        let mut next = Vec::with_capacity(basis.len() + 2);
        for b in basis {
            if is_constant(&rest) {
                next.push(b);
                continue;
            }
            let g = b.gcd(&rest)?;
            if is_constant(&g) {
                next.push(b);
                continue;
            }
            let outside = quotient(&b, &g)?;
            rest = quotient(&rest, &g)?;
            if !is_constant(&outside) {
                next.push(outside);
            }
            next.push(g);
        }
        if !is_constant(&rest) {
            next.push(rest);
        }
        basis = next;
    }
    Ok(basis)
}

fn shear_candidates<K: Scalar>(mode: &ShearMode<K>, count: usize) -> Vec<K> {
    match mode {
        ShearMode::Deterministic => (0..count as i64)
            .map(|k| K::from_integer(if k % 2 == 1 { (k + 1) / 2 } else { -(k / 2) }))
            .collect(),
        ShearMode::Fixed(c) => vec![c.clone()],
        ShearMode::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..count).map(|_| K::from_integer(rng.gen_range(-1000..=1000))).collect()
        }
    }
}

/// Drops zero components, checks `F(0) = 0` and shears into y-regular
/// coordinates. `None` means every component is identically zero.
pub fn normalize<K: Scalar>(input: &MappingInput<K>, config: &EngineConfig<K>) -> Result<Option<NormalizedProblem<K>>> {
    let mut kept = Vec::new();
    let mut indices = Vec::new();
    for (i, f) in input.components.iter().enumerate() {
        if f.is_zero() {
            continue;
        }
        if !f.vanishes_at_origin() {
            return Err(Error::ComponentNonVanishing(i));
        }
        kept.push(f.clone());
        indices.push(i);
    }
    let Some(first) = kept.first() else {
        return Ok(None);
    };
    let tower = first.tower().clone();
    let product = kept.iter().fold(BiPoly::one(&tower), |acc, f| &acc * f);
    // A bad shear is a root of the leading form at (c, 1), so degree + 1
    // deterministic candidates always contain a good one.
    let count = product.total_degree() as usize + 2;
    let shear = shear_candidates(&config.shear, count.max(64))
        .into_iter()
        .take(if matches!(config.shear, ShearMode::Random(_)) { 64 } else { count })
        .find(|c| product.shear_scalar(c.clone()).regular_in_y().unwrap_or(false))
        .ok_or(Error::ShearNotRegular)?;

    let components: Vec<BiPoly<K>> = kept.iter().map(|f| f.shear_scalar(shear.clone())).collect();
    let product = product.shear_scalar(shear.clone());
    let radicals: Vec<BiPoly<K>> = components.iter().map(|f| f.squarefree_part()).collect::<Result<_>>()?;
    let basis = coprime_basis(&radicals)?;
    let reduced = basis.iter().fold(BiPoly::one(&tower), |acc, b| &acc * b);
    let mut pieces = Vec::new();
    for curve in basis {
        if !curve.vanishes_at_origin() {
            continue;
        }
        let on_component =
            radicals.iter().map(|r| Ok(!is_constant(&curve.gcd(r)?))).collect::<Result<Vec<bool>>>()?;
        pieces.push(CurvePiece { curve, on_component });
    }
    let ord = *product.ord().finite().expect("nonzero product");
    Ok(Some(NormalizedProblem { components, indices, shear, product, reduced, ord, pieces }))
}

/// Outcome of a valuation that may hit a zero divisor in the class's tower.
#[derive(Clone, Debug)]
pub enum Valuation<K: Scalar> {
    Value(Extended<u64>),
    /// The class must be split (see [`BranchClass::split`]) and re-evaluated.
    Split(SplitEvent<K>),
}

struct Column<K: Scalar> {
    component: BiPoly<K>,
    /// Certifies `μ = ∞` by a finite valuation; without it the branch is known
    /// to lie off the component.
    complement: Option<BiPoly<K>>,
    bound: usize,
    ord: u32,
}

fn rows_in<K: Scalar>(p: &BiPoly<K>, tower: &Tower<K>) -> Vec<Poly<K>> {
    p.lift_to(tower).expect("base-field polynomial").to_y_major()
}

/// `ord_t f_j(γtᵉ, y(t))`, extending the series in doubling steps. Infinity is
/// certified either by a finite valuation of the complement (the branch lies
/// on exactly one of `f_j`, complement) or by the Bézout bound.
fn valuation<K: Scalar>(class: &mut BranchClass<K>, col: &Column<K>) -> Dyn<Extended<u64>, K> {
    let tower = class.tower().clone();
    let d = tower.depth();
    let rows = rows_in(&col.component, &tower);
    let complement = col.complement.as_ref().map(|c| rows_in(c, &tower));
    let mut n = (class.e() as usize * col.ord as usize + 1).max(8).min(col.bound + 1);
    loop {
        let s = class.compose_rows(&rows, n);
        if let Some(k) = series::valuation(&s) {
            tower.inv(d, &s[k])?;
            return Ok(Extended::Finite(k as u64));
        }
        if let Some(complement) = &complement {
            let c = class.compose_rows(complement, n);
            if let Some(k) = series::valuation(&c) {
                tower.inv(d, &c[k])?;
                return Ok(Extended::Infinite);
            }
        }
        if n > col.bound {
            return Ok(Extended::Infinite);
        }
        n = (2 * n).min(col.bound + 1);
    }
}

/// Intersection multiplicity of the branch class with `{f_j = 0}`, where the
/// class is a branch class of the squarefree `f_red` (both in the same
/// coordinates).
pub fn mu<K: Scalar>(class: &mut BranchClass<K>, f_j: &BiPoly<K>, f_red: &BiPoly<K>) -> Result<Valuation<K>> {
    if !f_j.vanishes_at_origin() {
        return Err(Error::NonVanishing);
    }
    let g = f_red.gcd(f_j)?;
    let col = Column {
        bound: (f_red.total_degree() * f_j.total_degree()) as usize,
        ord: *f_j.ord().finite().unwrap_or(&0),
        component: f_j.clone(),
        complement: Some(quotient(f_red, &g)?),
    };
    match valuation(class, &col) {
        Ok(v) => Ok(Valuation::Value(v)),
        Err(Halt::Split(ev)) => Ok(Valuation::Split(ev)),
        Err(Halt::Fail(e)) => Err(e),
    }
}

/// `min_j μ_ij / ord h_i`.
pub fn lambda(row: &[Extended<u64>], multiplicity: u32) -> Extended<BigRational> {
    row.iter()
        .min()
        .cloned()
        .unwrap_or(Extended::Infinite)
        .map(|m| BigRational::new(m.into(), multiplicity.into()))
}

/// `μ(hᵢ, f_j)`: one row per branch class, one column per retained component.
#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionTable {
    pub rows: Vec<Vec<Extended<u64>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchExponent {
    pub index: usize,
    pub lambda: Extended<BigRational>,
}

/// Truncated parametrization `(x(t), y(t))` with tower coefficients.
#[derive(Clone)]
pub struct Parametrization<K: Scalar> {
    tower: Tower<K>,
    x: Poly<K>,
    y: Poly<K>,
    truncation: usize,
}

impl<K: Scalar> Parametrization<K> {
    pub fn tower(&self) -> &Tower<K> {
        &self.tower
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn render_x(&self, var: &str) -> String {
        crate::tower::render_series(&self.x, self.tower.depth(), var)
    }

    pub fn render_y(&self, var: &str) -> String {
        crate::tower::render_series(&self.y, self.tower.depth(), var)
    }

    /// Numeric coefficient vectors of `x(t)` and `y(t)`.
    pub fn to_complex<F: num_traits::Float>(
        &self,
        embedding: &[num_complex::Complex<F>],
    ) -> (Vec<num_complex::Complex<F>>, Vec<num_complex::Complex<F>>) {
        let d = self.tower.depth();
        let eval = |p: &Poly<K>| p.iter().map(|c| self.tower.eval_numeric(c, d, embedding)).collect();
        (eval(&self.x), eval(&self.y))
    }
}

/// Exact exponent with the data behind it.
#[derive(Clone, Debug)]
pub struct LojasiewiczResult<K: Scalar> {
    pub exponent: Extended<BigRational>,
    pub table: IntersectionTable,
    pub lambdas: Vec<BranchExponent>,
    /// Lowest-index branch attaining the maximum.
    pub witness: Option<usize>,
    /// Every branch attaining the maximum.
    pub maximizers: Vec<usize>,
    pub classes: Vec<BranchClass<K>>,
    /// `None` when all components are identically zero.
    pub problem: Option<NormalizedProblem<K>>,
}

impl<K: Scalar> LojasiewiczResult<K> {
    pub fn shear(&self) -> Option<&K> {
        self.problem.as_ref().map(|p| &p.shear)
    }

    /// Branch `i` in the input coordinates, truncated at `t`-degree `degree`.
    pub fn parametrization(&mut self, i: usize, degree: usize) -> Option<Parametrization<K>> {
        let shear = self.problem.as_ref()?.shear.clone();
        let class = self.classes.get_mut(i)?;
        let tower = class.tower().clone();
        let d = tower.depth();
        let n = degree + 1;
        let y = class.y_series(n);
        let mut x = vec![tower.zero(d); n];
        let e = class.e() as usize;
        if e < n {
            x[e] = class.x_coefficient().lift_to(&tower).ok()?.elem().clone();
        }
        let c = tower.constant(shear, d);
        x = tower.p_add(&x, &tower.p_scale(d, &y, &c));
        let mut y = y;
        crate::tower::trim(&mut x);
        crate::tower::trim(&mut y);
        Some(Parametrization { tower, x, y, truncation: degree })
    }

    pub fn witness_parametrization(&mut self, degree: usize) -> Option<Parametrization<K>> {
        let w = self.witness?;
        self.parametrization(w, degree)
    }
}

pub fn exponent<K: Scalar>(input: &MappingInput<K>) -> Result<LojasiewiczResult<K>> {
    exponent_with(input, &EngineConfig::default())
}

pub fn exponent_with<K: Scalar>(input: &MappingInput<K>, config: &EngineConfig<K>) -> Result<LojasiewiczResult<K>> {
    let Some(problem) = normalize(input, config)? else {
        return Ok(LojasiewiczResult {
            exponent: Extended::Infinite,
            table: IntersectionTable { rows: Vec::new() },
            lambdas: Vec::new(),
            witness: None,
            maximizers: Vec::new(),
            classes: Vec::new(),
            problem: None,
        });
    };
    let columns: Vec<Column<K>> = problem
        .components
        .iter()
        .map(|f| Column {
            component: f.clone(),
            complement: None,
            bound: (problem.reduced.total_degree() * f.total_degree()) as usize,
            ord: *f.ord().finite().expect("nonzero component"),
        })
        .collect();

    let mut classes: Vec<BranchClass<K>> = Vec::new();
    let mut owner: Vec<usize> = Vec::new();
    for (k, piece) in problem.pieces.iter().enumerate() {
        for class in expand_branches(&piece.curve)? {
            classes.push(class);
            owner.push(k);
        }
    }
    let mut rows: Vec<Option<Vec<Extended<u64>>>> = vec![None; classes.len()];
    loop {
        let pending: Vec<usize> = (0..classes.len()).filter(|&i| rows[i].is_none()).collect();
        if pending.is_empty() {
            break;
        }
        let compute = |class: &mut BranchClass<K>, piece: usize| -> Dyn<Vec<Extended<u64>>, K> {
            let on = &problem.pieces[piece].on_component;
            columns
                .iter()
                .zip(on)
                .map(|(col, &on)| if on { Ok(Extended::Infinite) } else { valuation(class, col) })
                .collect()
        };
        let outcomes: Vec<Dyn<Vec<Extended<u64>>, K>> = if config.parallel {
            let mut work: Vec<(usize, BranchClass<K>)> = pending.iter().map(|&i| (i, classes[i].clone())).collect();
            let out = work.par_iter_mut().map(|(i, c)| compute(c, owner[*i])).collect();
            for (i, c) in work {
                classes[i] = c;
            }
            out
        } else {
            pending.iter().map(|&i| compute(&mut classes[i], owner[i])).collect()
        };
        // Replace split classes in place, keeping the order of the others.
        let mut next_classes = Vec::with_capacity(classes.len());
        let mut next_owner = Vec::with_capacity(classes.len());
        let mut next_rows = Vec::with_capacity(classes.len());
        let mut outcome_of: Vec<Option<Dyn<Vec<Extended<u64>>, K>>> = (0..classes.len()).map(|_| None).collect();
        for (i, o) in pending.iter().zip(outcomes) {
            outcome_of[*i] = Some(o);
        }
        for (i, class) in classes.into_iter().enumerate() {
            match outcome_of[i].take() {
                None => {
                    next_classes.push(class);
                    next_owner.push(owner[i]);
                    next_rows.push(rows[i].take());
                }
                Some(Ok(row)) => {
                    next_classes.push(class);
                    next_owner.push(owner[i]);
                    next_rows.push(Some(row));
                }
                Some(Err(Halt::Split(ev))) => {
                    for part in class.split(&ev)? {
                        next_classes.push(part);
                        next_owner.push(owner[i]);
                        next_rows.push(None);
                    }
                }
                Some(Err(Halt::Fail(e))) => return Err(e),
            }
        }
        classes = next_classes;
        owner = next_owner;
        rows = next_rows;
    }
    let rows: Vec<Vec<Extended<u64>>> = rows.into_iter().map(|r| r.expect("row computed")).collect();

    let lambdas: Vec<BranchExponent> = rows
        .iter()
        .zip(&classes)
        .enumerate()
        .map(|(index, (row, class))| BranchExponent { index, lambda: lambda(row, class.multiplicity()) })
        .collect();
    let exponent = lambdas.iter().map(|b| b.lambda.clone()).max().unwrap_or(Extended::Infinite);
    let maximizers: Vec<usize> = lambdas.iter().filter(|b| b.lambda == exponent).map(|b| b.index).collect();
    Ok(LojasiewiczResult {
        exponent,
        table: IntersectionTable { rows },
        lambdas,
        witness: maximizers.first().copied(),
        maximizers,
        classes,
        problem: Some(problem),
    })
}

/// Exponent for the map with base-field components given as term lists;
/// convenient in tests and examples.
pub fn exponent_of_terms<K: Scalar>(components: &[Vec<((u32, u32), K)>]) -> Result<Extended<BigRational>> {
    let tower = Tower::default();
    let comps = components.iter().map(|t| BiPoly::from_terms(&tower, t.iter().cloned())).collect();
    Ok(exponent(&MappingInput::new(comps)?)?.exponent)
}


impl<K: Scalar> NormalizedProblem<K> {
    /// The Bézout bound `deg f_red · deg f_j` used to certify `μ = ∞`.
    pub fn bezout_bound(&self, j: usize) -> u64 {
        self.reduced.total_degree() as u64 * self.components[j].total_degree() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::render_exponent;
    use num_integer::Integer;
    use proptest::prelude::*;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    fn poly(terms: &[(u32, u32, i64)]) -> BiPoly<Q> {
        BiPoly::from_terms(&Tower::default(), terms.iter().map(|&(a, b, c)| ((a, b), q(c))))
    }

    fn map(components: &[&[(u32, u32, i64)]]) -> MappingInput<Q> {
        MappingInput::new(components.iter().map(|c| poly(c)).collect()).unwrap()
    }

    fn exp_str(input: &MappingInput<Q>) -> String {
        render_exponent(&exponent(input).unwrap().exponent)
    }

    const CUSP: &[(u32, u32, i64)] = &[(0, 2, 1), (3, 0, -1)];

    #[test]
    fn identity_map() {
        assert_eq!(exp_str(&map(&[&[(1, 0, 1)], &[(0, 1, 1)]])), "1");
    }

    #[test]
    fn monomial_maps() {
        for a in 1..=4u32 {
            for b in 1..=4u32 {
                let m = map(&[&[(a, 0, 1)], &[(0, b, 1)]]);
                assert_eq!(exp_str(&m), a.max(b).to_string(), "(x^{a}, y^{b})");
            }
        }
    }

    #[test]
    fn cusp_examples() {
        assert_eq!(exp_str(&map(&[CUSP, &[(2, 1, 1)]])), "7/2");
        assert_eq!(exp_str(&map(&[CUSP, &[(2, 0, 1)]])), "2");
        assert_eq!(exp_str(&map(&[CUSP, &[(2, 0, 1), (0, 3, -1)]])), "2");
    }

    #[test]
    fn single_component_is_infinite() {
        assert_eq!(exp_str(&map(&[CUSP])), "inf");
        assert_eq!(exp_str(&map(&[&[(1, 1, 1)]])), "inf");
    }

    #[test]
    fn zero_components_are_dropped() {
        let m = MappingInput::new(vec![BiPoly::zero(&Tower::default()), poly(&[(0, 1, 1)])]).unwrap();
        let result = exponent(&m).unwrap();
        assert_eq!(result.problem.as_ref().unwrap().indices, vec![1]);
        assert_eq!(render_exponent(&result.exponent), "inf");
        let all_zero = MappingInput::new(vec![BiPoly::<Q>::zero(&Tower::default())]).unwrap();
        assert!(exponent(&all_zero).unwrap().exponent.is_infinite());
    }

    #[test]
    fn non_vanishing_component_is_rejected() {
        let m = map(&[&[(1, 0, 1), (0, 0, 1)], &[(0, 1, 1)]]);
        assert_eq!(exponent(&m).unwrap_err(), Error::ComponentNonVanishing(0));
    }

    #[test]
    fn normalization_examples() {
        let cfg = EngineConfig::default();
        let p = normalize(&map(&[&[(1, 0, 1)], &[(0, 1, 1)]]), &cfg).unwrap().unwrap();
        assert_eq!(p.shear, q(1));
        let p = normalize(&map(&[CUSP, &[(2, 1, 1)]]), &cfg).unwrap().unwrap();
        assert_ne!(p.shear, q(0));
        assert_eq!(p.ord, 5);
        assert!(p.product.regular_in_y().unwrap());
        let fixed = EngineConfig { shear: ShearMode::Fixed(q(0)), parallel: false };
        assert_eq!(normalize(&map(&[CUSP, &[(2, 1, 1)]]), &fixed).unwrap_err(), Error::ShearNotRegular);
    }

    #[test]
    fn cusp_table() {
        let result = exponent(&map(&[CUSP, &[(2, 1, 1)]])).unwrap();
        let mut rows: Vec<(u32, Vec<Extended<u64>>)> =
            result.classes.iter().map(|c| c.e()).zip(result.table.rows.iter().cloned()).collect();
        rows.sort_by(|a, b| a.1.cmp(&b.1));
        // Sheared coordinates keep these valuations: x = 0 (twice, as x²), y = 0, the cusp.
        let inf = Extended::Infinite;
        assert!(rows.contains(&(2, vec![inf.clone(), Extended::Finite(7)])));
        assert!(rows.contains(&(1, vec![Extended::Finite(3), inf.clone()])));
        assert!(rows.contains(&(1, vec![Extended::Finite(2), inf])));
        assert_eq!(result.witness.map(|w| result.classes[w].e()), Some(2));
    }

    #[test]
    fn mu_examples() {
        let cusp = poly(CUSP);
        let mut class = expand_branches(&cusp).unwrap().remove(0);
        let v = mu(&mut class, &poly(&[(2, 1, 1)]), &cusp).unwrap();
        assert!(matches!(v, Valuation::Value(Extended::Finite(7))));
        let axis = poly(&[(0, 1, 1)]);
        let mut class = expand_branches(&axis).unwrap().remove(0);
        assert!(matches!(mu(&mut class, &poly(&[(0, 2, 1)]), &axis).unwrap(), Valuation::Value(Extended::Infinite)));
        assert!(matches!(mu(&mut class, &poly(&[(2, 0, 1)]), &axis).unwrap(), Valuation::Value(Extended::Finite(2))));
    }

    #[test]
    fn lambda_examples() {
        let inf = Extended::Infinite;
        assert_eq!(lambda(&[inf.clone(), Extended::Finite(7)], 2), Extended::Finite(Q::new(7.into(), 2.into())));
        assert_eq!(lambda(&[Extended::Finite(2), inf.clone()], 1), Extended::Finite(q(2)));
        assert_eq!(lambda(&[inf.clone(), inf], 1), Extended::Infinite);
    }

    #[test]
    fn witness_in_input_coordinates() {
        let mut result = exponent(&map(&[CUSP, &[(2, 1, 1)]])).unwrap();
        let w = result.witness_parametrization(12).unwrap();
        // The witness is the cusp: x(t), y(t) satisfy y² = x³ exactly.
        let x = w.render_x("t");
        let y = w.render_y("t");
        assert!(!x.is_empty() && !y.is_empty());
        let (xs, ys) = w.to_complex::<f64>(&[]);
        let t = num_complex::Complex::new(0.01, 0.0);
        let xv = crate::roots::evaluate(&xs, t);
        let yv = crate::roots::evaluate(&ys, t);
        assert!((yv * yv - xv * xv * xv).norm() < 1e-20);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let m = map(&[&[(0, 2, 1), (3, 0, -1)], &[(0, 3, 1), (5, 0, -1), (2, 2, 1)], &[(1, 1, 1)]]);
        let par = exponent(&m).unwrap();
        let seq = exponent_with(&m, &EngineConfig { shear: ShearMode::Deterministic, parallel: false }).unwrap();
        assert_eq!(par.exponent, seq.exponent);
        assert_eq!(par.table, seq.table);
    }

    fn arb_component() -> impl Strategy<Value = BiPoly<Q>> {
        proptest::collection::vec((0u32..4, 0u32..4, -3i64..=3), 1..4).prop_map(|terms| {
            let p = poly(&terms);
            &p - &BiPoly::constant(&Tower::default(), p.coefficient(0, 0).as_scalar().unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn exponent_invariants(comps in proptest::collection::vec(arb_component(), 2..4), c in -3i64..=3) {
            let input = MappingInput::new(comps.clone()).unwrap();
            let result = exponent(&input).unwrap();
            let Some(problem) = result.problem.clone() else { return Ok(()); };
            for (row, class) in result.table.rows.iter().zip(&result.classes) {
                for (mu, f) in row.iter().zip(&problem.components) {
                    if let Extended::Finite(m) = mu {
                        prop_assert!(*m >= class.multiplicity() as u64 * *f.ord().finite().unwrap() as u64);
                    }
                }
            }
            if let Extended::Finite(l) = &result.exponent {
                prop_assert!(l.denom() <= &num_bigint::BigInt::from(problem.ord));
                let min_ord = problem.components.iter().map(|f| *f.ord().finite().unwrap()).min().unwrap();
                prop_assert!(l >= &q(min_ord as i64));
            }
            let mut reversed = comps.clone();
            reversed.reverse();
            prop_assert_eq!(&exponent(&MappingInput::new(reversed).unwrap()).unwrap().exponent, &result.exponent);
            let changed = input.compose_linear(q(1), q(c), q(1), q(c + 1));
            prop_assert_eq!(&exponent(&changed).unwrap().exponent, &result.exponent);
            let mut extended = comps;
            extended.push(poly(&[(1, 1, 1), (0, 3, 2)]));
            prop_assert!(exponent(&MappingInput::new(extended).unwrap()).unwrap().exponent <= result.exponent);
        }
    }

    #[test]
    fn denominators_reduce() {
        let r = Q::new(6.into(), 4.into());
        assert_eq!(r.denom().gcd(&2.into()), 2.into());
    }
}
