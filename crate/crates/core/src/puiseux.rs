//! Newton–Puiseux expansion of plane curve germs at the origin.
//!
//! Branches are grouped into conjugacy classes over the coefficient field.
//! A class is parametrized as `x = γ·tᵉ`, `y = y(t)` with all coefficients in
//! the class's extension tower; each complex embedding of that tower yields
//! one branch, so a class stands for `residue_degree` branches.
//!
//! During the expansion the parametrization is kept in the form
//! `y = H(t) + σ·tˢ·Y` together with a polynomial `G(t, Y)` whose roots near
//! `Y = 0` continue the branches. Once `G(0, Y)` has a simple root the rest
//! of the series follows from Newton iteration on `G`.

use std::fmt;

use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Float;

use crate::bipoly::{BiPoly, UniPoly};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series;
use crate::tower::{is_zero, render_series, render_term, AlgebraicNumber, Dyn, Elem, Halt, Poly, Projection, SplitEvent, Tower};

/// Newton polygon steps allowed along one branch before the input is
/// declared non-squarefree.
const MAX_STEPS: usize = 512;

/// One edge of a Newton polygon, from `start` (on or near the y-axis) to
/// `end`. Along the edge the x-exponent grows by `v` whenever the y-exponent
/// drops by `q`, with `gcd(q, v) = 1`.
#[derive(Clone, Debug)]
pub struct Edge<K: Scalar> {
    pub start: (u32, u32),
    pub end: (u32, u32),
    pub q: u32,
    pub v: u32,
    /// `Σ a_ij Tᵏ` over the lattice points `(i, j) = end + k·(−v, q)`.
    pub characteristic: UniPoly<K>,
}

impl<K: Scalar> Edge<K> {
    /// The branch slope `v / q`: solutions start as `y ~ c·x^(v/q)`.
    pub fn slope(&self) -> BigRational {
        BigRational::new(self.v.into(), self.q.into())
    }
}

#[derive(Clone, Debug)]
pub struct NewtonPolygon<K: Scalar> {
    pub vertices: Vec<(u32, u32)>,
    pub edges: Vec<Edge<K>>,
}

/// Lower hull of `p`'s support between `(0, ord_y p(0, y))` and the lowest
/// row of the support, edges ordered by increasing slope.
pub fn newton_polygon<K: Scalar>(p: &BiPoly<K>) -> Result<NewtonPolygon<K>> {
    if !p.regular_in_y()? {
        return Err(Error::NotRegular);
    }
    if !p.vanishes_at_origin() {
        return Err(Error::NonVanishing);
    }
    let r = axis_order(p).ok_or(Error::NotRegular)?;
    let vertices = hull_vertices(p, r);
    let edges = vertices
        .windows(2)
        .map(|w| {
            let (q, v, coeffs) = edge_data(p, w[0], w[1]);
            Edge { start: w[0], end: w[1], q, v, characteristic: UniPoly::from_elems(p.tower(), coeffs) }
        })
        .collect();
    Ok(NewtonPolygon { vertices, edges })
}

fn axis_order<K: Scalar>(p: &BiPoly<K>) -> Option<u32> {
    p.raw_terms().keys().filter(|k| k.0 == 0).map(|k| k.1).min()
}

fn hull_vertices<K: Scalar>(p: &BiPoly<K>, r: u32) -> Vec<(u32, u32)> {
    let j_min = p.raw_terms().keys().map(|k| k.1).min().unwrap_or(0);
    let mut vertices = vec![(0, r)];
    let mut cur = (0u32, r);
    while cur.1 > j_min {
        let mut best: Option<(u32, u32)> = None;
        for &(i, j) in p.raw_terms().keys() {
            if j >= cur.1 {
                continue;
            }
            best = match best {
                None => Some((i, j)),
                Some(b) => {
                    // Compare (i − ci)/(cj − j) against (bi − ci)/(cj − bj).
                    let lhs = (i as i64 - cur.0 as i64) * (cur.1 - b.1) as i64;
                    let rhs = (b.0 as i64 - cur.0 as i64) * (cur.1 - j) as i64;
                    if lhs < rhs || (lhs == rhs && j < b.1) {
                        Some((i, j))
                    } else {
                        Some(b)
                    }
                }
            };
        }
        cur = best.expect("support below the current vertex");
        vertices.push(cur);
    }
    vertices
}

fn edge_data<K: Scalar>(p: &BiPoly<K>, start: (u32, u32), end: (u32, u32)) -> (u32, u32, Poly<K>) {
    let di = end.0 - start.0;
    let dj = start.1 - end.1;
    let g = di.gcd(&dj);
    let (q, v) = (dj / g, di / g);
    let coeffs = (0..=g).map(|k| p.coeff_elem(end.0 - v * k, end.1 + q * k)).collect();
    (q, v, coeffs)
}

/// `(a, b)` with `a·q − b·v = 1`, `a ≥ 1` minimal.
fn bezout(q: u32, v: u32) -> (u32, u32) {
    if v == 1 {
        return (1, q - 1);
    }
    let a = (1..=v).find(|a| (a * q) % v == 1).expect("q and v coprime");
    (a, (a * q - 1) / v)
}

#[derive(Clone)]
struct State<K: Scalar> {
    tower: Tower<K>,
    poly: BiPoly<K>,
    x_coeff: Elem<K>,
    e: u32,
    head: Vec<(u32, Elem<K>)>,
    scale: Elem<K>,
    shift: u32,
    steps: usize,
}

impl<K: Scalar> State<K> {
    fn initial(p: &BiPoly<K>) -> Self {
        let tower = p.tower().clone();
        let d = tower.depth();
        State {
            poly: p.clone(),
            x_coeff: tower.one(d),
            e: 1,
            head: Vec::new(),
            scale: tower.one(d),
            shift: 0,
            steps: 0,
            tower,
        }
    }

    fn project(&self, proj: &Projection<K>) -> Self {
        let d = self.tower.depth();
        let target = proj.tower().clone();
        State {
            poly: self.poly.map_coefficients(&target, |c| proj.map(c, d)),
            x_coeff: proj.map(&self.x_coeff, d),
            e: self.e,
            head: self.head.iter().map(|(k, c)| (*k, proj.map(c, d))).collect(),
            scale: proj.map(&self.scale, d),
            shift: self.shift,
            steps: self.steps,
            tower: target,
        }
    }

    fn lift(&self, tower: &Tower<K>) -> Self {
        let (from, to) = (self.tower.depth(), tower.depth());
        let up = |c: &Elem<K>| tower.lift(c.clone(), from, to);
        State {
            poly: self.poly.map_coefficients(tower, up),
            x_coeff: up(&self.x_coeff),
            e: self.e,
            head: self.head.iter().map(|(k, c)| (*k, up(c))).collect(),
            scale: up(&self.scale),
            shift: self.shift,
            steps: self.steps,
            tower: tower.clone(),
        }
    }

    /// Follows the root `ξ` of an edge characteristic polynomial:
    /// `G ← G(ξᵇ·Xᵠ, Xᵛ·(ξᵃ + Y)) / Xˡ` with `a·q − b·v = 1`.
    fn substitute(&self, q: u32, v: u32, l: u32, xi: &Elem<K>) -> Self {
        let t = &self.tower;
        let d = t.depth();
        let (a, b) = bezout(q, v);
        let xa = t.pow(d, xi, a);
        let xb = t.pow(d, xi, b);
        let max_i = self.poly.degree_x() as usize;
        let max_j = self.poly.degree_y() as usize;
        let xb_pows = powers(t, d, &xb, max_i);
        let xa_pows = powers(t, d, &xa, max_j);
        let binomials = pascal::<K>(max_j);

        let mut terms = std::collections::BTreeMap::new();
        for (&(i, j), c) in self.poly.raw_terms() {
            let base = t.mul(d, c, &xb_pows[i as usize]);
            let exponent = q * i + v * j - l;
            for k in 0..=j as usize {
                let factor = t.mul(d, &t.constant(binomials[j as usize][k].clone(), d), &xa_pows[j as usize - k]);
                let term = t.mul(d, &base, &factor);
                let entry = terms.entry((exponent, k as u32)).or_insert_with(|| t.zero(d));
                *entry = t.add(entry, &term);
            }
        }
        let poly = BiPoly::from_map(t, terms);

        let xb_s = t.pow(d, &xb, self.shift);
        let mut head: Vec<(u32, Elem<K>)> = self
            .head
            .iter()
            .map(|(k, c)| (q * k, t.mul(d, c, &t.pow(d, &xb, *k))))
            .collect();
        head.push((q * self.shift + v, t.mul(d, &t.mul(d, &self.scale, &xb_s), &xa)));
        State {
            tower: t.clone(),
            poly,
            x_coeff: t.mul(d, &self.x_coeff, &t.pow(d, &xb, self.e)),
            e: q * self.e,
            head,
            scale: t.mul(d, &self.scale, &xb_s),
            shift: q * self.shift + v,
            steps: self.steps + 1,
        }
    }
}

fn powers<K: Scalar>(t: &Tower<K>, d: usize, base: &Elem<K>, n: usize) -> Vec<Elem<K>> {
    let mut out = vec![t.one(d)];
    for k in 1..=n {
        out.push(t.mul(d, &out[k - 1], base));
    }
    out
}

fn pascal<K: Scalar>(n: usize) -> Vec<Vec<K>> {
    let mut rows: Vec<Vec<K>> = vec![vec![K::one()]];
    for j in 1..=n {
        let prev = &rows[j - 1];
        let mut row = vec![K::one(); j + 1];
        for k in 1..j {
            row[k] = prev[k - 1].clone() + prev[k].clone();
        }
        rows.push(row);
    }
    rows
}

enum Item<K: Scalar> {
    Task(State<K>),
    Done(BranchClass<K>),
}

fn step<K: Scalar>(st: &State<K>) -> Dyn<Vec<Item<K>>, K> {
    if st.steps > MAX_STEPS {
        return Err(Halt::Fail(Error::NotSquarefree));
    }
    let t = &st.tower;
    let d = t.depth();
    let g = &st.poly;
    let r = match axis_order(g) {
        Some(r) if r >= 1 => r,
        _ => return Err(Halt::Fail(Error::Precondition("branch polynomial lost its y-axis term".into()))),
    };
    let lead_inv = t.inv(d, &g.coeff_elem(0, r))?;
    if r == 1 {
        return Ok(vec![Item::Done(BranchClass::regular(st, lead_inv))]);
    }
    let vertices = hull_vertices(g, r);
    for &(i, j) in &vertices[1..] {
        t.inv(d, &g.coeff_elem(i, j))?;
    }
    let mut out = Vec::new();
    for w in vertices.windows(2) {
        let (q, v, phi) = edge_data(g, w[0], w[1]);
        let l = q * w[1].0 + v * w[1].1;
        for (factor, _) in t.p_squarefree_decomposition(d, &phi)? {
            for (tower, root) in roots_of(t, factor)? {
                out.push(Item::Task(st.lift(&tower).substitute(q, v, l, &root)));
            }
        }
    }
    match vertices.last().unwrap().1 {
        0 => {}
        1 => out.push(Item::Done(BranchClass::exact(st))),
        _ => return Err(Halt::Fail(Error::NotSquarefree)),
    }
    Ok(out)
}

/// Roots of a monic squarefree polynomial: base-field roots first, then one
/// adjoined root standing for all remaining ones.
fn roots_of<K: Scalar>(t: &Tower<K>, factor: Poly<K>) -> Dyn<Vec<(Tower<K>, Elem<K>)>, K> {
    let d = t.depth();
    let mut out = Vec::new();
    let mut rest = factor;
    let base: Option<Vec<K>> = rest.iter().map(|c| t.as_base(c)).collect();
    if let Some(base) = base {
        let mut roots = K::roots_in_field(&base);
        roots.sort_by(|a, b| {
            let (za, zb) = (a.to_complex::<f64>(), b.to_complex::<f64>());
            (za.re, za.im).partial_cmp(&(zb.re, zb.im)).unwrap_or(std::cmp::Ordering::Equal)
        });
        for xi in roots {
            let root = t.constant(xi, d);
            let (quot, _) = t.p_divrem(d, &rest, &[t.neg(&root), t.one(d)])?;
            rest = quot;
            out.push((t.clone(), root));
        }
    }
    if rest.len() >= 2 {
        out.push(t.adjoin_squarefree(rest)?);
    }
    Ok(out)
}

/// Conjugacy classes of branches of `p` at the origin.
///
/// `p` must be squarefree, y-regular and vanish at the origin. The classes,
/// weighted by residue degree, account for every branch:
/// `Σ residue_degree · e = ord p`.
pub fn expand_branches<K: Scalar>(p: &BiPoly<K>) -> Result<Vec<BranchClass<K>>> {
    if !p.regular_in_y()? {
        return Err(Error::NotRegular);
    }
    if !p.vanishes_at_origin() {
        return Err(Error::NonVanishing);
    }
    let mut stack = vec![Item::Task(State::initial(p))];
    let mut out = Vec::new();
    while let Some(item) = stack.pop() {
        let st = match item {
            Item::Done(class) => {
                out.push(class);
                continue;
            }
            Item::Task(st) => st,
        };
        match step(&st) {
            Ok(items) => stack.extend(items.into_iter().rev()),
            Err(Halt::Split(ev)) => {
                let [first, second] = st.tower.split(&ev)?;
                stack.push(Item::Task(st.project(&second)));
                stack.push(Item::Task(st.project(&first)));
            }
            Err(Halt::Fail(e)) => return Err(e),
        }
    }
    Ok(out)
}

#[derive(Clone)]
enum Tail<K: Scalar> {
    /// `Y ≡ 0`: the branch is `y = H(t)` exactly.
    Exact,
    /// `Y(t)` is the root of `G(t, Y)` with `Y(0) = 0`; `G_Y(0, 0)` is a unit.
    Regular {
        rows: Vec<Poly<K>>,
        d_rows: Vec<Poly<K>>,
        c_inv: Elem<K>,
        solution: Poly<K>,
        precision: usize,
    },
}

/// One conjugacy class of branches, parametrized by `x = γ·tᵉ`, `y = y(t)`.
#[derive(Clone)]
pub struct BranchClass<K: Scalar> {
    tower: Tower<K>,
    e: u32,
    x_coeff: Elem<K>,
    head: Vec<(u32, Elem<K>)>,
    scale: Elem<K>,
    shift: u32,
    tail: Tail<K>,
}

impl<K: Scalar> BranchClass<K> {
    fn from_state(st: &State<K>, tail: Tail<K>) -> Self {
        BranchClass {
            tower: st.tower.clone(),
            e: st.e,
            x_coeff: st.x_coeff.clone(),
            head: st.head.clone(),
            scale: st.scale.clone(),
            shift: st.shift,
            tail,
        }
    }

    fn exact(st: &State<K>) -> Self {
        Self::from_state(st, Tail::Exact)
    }

    fn regular(st: &State<K>, c_inv: Elem<K>) -> Self {
        let rows = st.poly.to_y_major();
        let d_rows = st.poly.derivative_y().to_y_major();
        let tail = Tail::Regular { rows, d_rows, c_inv, solution: Vec::new(), precision: 1 };
        Self::from_state(st, tail)
    }

    pub fn tower(&self) -> &Tower<K> {
        &self.tower
    }

    /// Ramification index: `x = γ·tᵉ`.
    pub fn e(&self) -> u32 {
        self.e
    }

    /// The constant `γ` in `x = γ·tᵉ`.
    pub fn x_coefficient(&self) -> AlgebraicNumber<K> {
        AlgebraicNumber::from_elem(&self.tower, self.x_coeff.clone())
    }

    /// Number of complex branches represented by this class.
    pub fn residue_degree(&self) -> usize {
        self.tower.degree()
    }

    /// Order of the branch germ: `min(e, lowest exponent of y(t))`.
    pub fn multiplicity(&self) -> u32 {
        match self.head.first() {
            Some((k, _)) => self.e.min(*k),
            None => self.e,
        }
    }

    /// Exponent `s` after which the series is generated by Newton iteration
    /// rather than read off the Newton polygon.
    pub fn singular_part_length(&self) -> u32 {
        self.shift
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self.tail, Tail::Exact)
    }

    fn solve_tail(&mut self, target: usize) {
        let t = self.tower.clone();
        let d = t.depth();
        let Tail::Regular { rows, d_rows, c_inv, solution, precision } = &mut self.tail else {
            return;
        };
        let one = t.one(d);
        while *precision < target {
            let next = (2 * *precision).min(target).max(*precision + 1);
            let residual = series::compose(&t, d, rows, &one, 1, solution, next);
            let k = next - *precision;
            let slope = series::compose(&t, d, d_rows, &one, 1, solution, k);
            let slope_inv = series::inverse(&t, d, &slope, c_inv, k);
            let high: Poly<K> = residual.iter().skip(*precision).cloned().collect();
            let correction = series::mul(&t, d, &slope_inv, &high, k);
            let mut shifted = vec![t.zero(d); *precision];
            shifted.extend(correction);
            *solution = t.p_sub(d, solution, &shifted);
            *precision = next;
        }
    }

    /// `y(t) mod tⁿ` as a dense coefficient vector.
    pub(crate) fn y_series(&mut self, n: usize) -> Poly<K> {
        let t = self.tower.clone();
        let d = t.depth();
        let mut y: Poly<K> = vec![t.zero(d); n];
        for (k, c) in &self.head {
            if (*k as usize) < n {
                y[*k as usize] = c.clone();
            }
        }
        let s = self.shift as usize;
        if n > s && !self.is_polynomial() {
            self.solve_tail(n - s);
            if let Tail::Regular { solution, .. } = &self.tail {
                for (k, c) in solution.iter().enumerate() {
                    if s + k < n && !is_zero(c) {
                        let term = t.mul(d, &self.scale, c);
                        y[s + k] = t.add(&y[s + k], &term);
                    }
                }
            }
        }
        crate::tower::trim(&mut y);
        y
    }

    /// Exact series coefficients up to `t`-degree `n`.
    pub fn extend_to(&mut self, n: usize) -> PuiseuxSeries<K> {
        let coeffs = self.y_series(n + 1);
        PuiseuxSeries {
            tower: self.tower.clone(),
            e: self.e,
            x_coeff: self.x_coeff.clone(),
            coeffs,
            truncation: n,
        }
    }

    /// `p(γ·tᵉ, y(t)) mod tⁿ` for `p` given y-major over this tower.
    pub(crate) fn compose_rows(&mut self, rows: &[Poly<K>], n: usize) -> Poly<K> {
        let y = self.y_series(n);
        series::compose(&self.tower, self.tower.depth(), rows, &self.x_coeff, self.e, &y, n)
    }

    /// Coefficients of `p(γ·tᵉ, y(t))` below `tⁿ`.
    pub fn substitute(&mut self, p: &BiPoly<K>, n: usize) -> Result<Vec<AlgebraicNumber<K>>> {
        let rows = p.lift_to(&self.tower)?.to_y_major();
        let out = self.compose_rows(&rows, n);
        Ok((0..n)
            .map(|k| AlgebraicNumber::from_elem(&self.tower, series::coeff(&self.tower, self.tower.depth(), &out, k)))
            .collect())
    }

    pub(crate) fn project(&self, proj: &Projection<K>) -> Self {
        let d = self.tower.depth();
        let target = proj.tower().clone();
        let m = |c: &Elem<K>| proj.map(c, d);
        let mp = |p: &Poly<K>| -> Poly<K> {
            let mut out: Poly<K> = p.iter().map(m).collect();
            crate::tower::trim(&mut out);
            out
        };
        let tail = match &self.tail {
            Tail::Exact => Tail::Exact,
            Tail::Regular { rows, d_rows, c_inv, solution, precision } => Tail::Regular {
                rows: rows.iter().map(mp).collect(),
                d_rows: d_rows.iter().map(mp).collect(),
                c_inv: m(c_inv),
                solution: mp(solution),
                precision: *precision,
            },
        };
        BranchClass {
            e: self.e,
            x_coeff: m(&self.x_coeff),
            head: self.head.iter().map(|(k, c)| (*k, m(c))).collect(),
            scale: m(&self.scale),
            shift: self.shift,
            tail,
            tower: target,
        }
    }

    /// The two classes obtained by splitting this class's tower.
    pub fn split(&self, ev: &SplitEvent<K>) -> Result<[BranchClass<K>; 2]> {
        let [a, b] = self.tower.split(ev)?;
        Ok([self.project(&a), self.project(&b)])
    }
}

impl<K: Scalar> fmt::Debug for BranchClass<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BranchClass")
            .field("e", &self.e)
            .field("residue_degree", &self.residue_degree())
            .field("tower", &self.tower.describe())
            .finish()
    }
}

/// A truncated branch parametrization `x = γ·tᵉ`, `y = Σ cₖ tᵏ (k ≤ N)`.
#[derive(Clone)]
pub struct PuiseuxSeries<K: Scalar> {
    tower: Tower<K>,
    e: u32,
    x_coeff: Elem<K>,
    coeffs: Poly<K>,
    truncation: usize,
}

impl<K: Scalar> PuiseuxSeries<K> {
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn tower(&self) -> &Tower<K> {
        &self.tower
    }

    pub fn x_coefficient(&self) -> AlgebraicNumber<K> {
        AlgebraicNumber::from_elem(&self.tower, self.x_coeff.clone())
    }

    pub fn coefficient(&self, k: usize) -> AlgebraicNumber<K> {
        AlgebraicNumber::from_elem(&self.tower, series::coeff(&self.tower, self.tower.depth(), &self.coeffs, k))
    }

    /// Nonzero `(exponent, coefficient)` pairs of `y(t)`.
    pub fn terms(&self) -> Vec<(usize, AlgebraicNumber<K>)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !is_zero(c))
            .map(|(k, c)| (k, AlgebraicNumber::from_elem(&self.tower, c.clone())))
            .collect()
    }

    /// Numeric `γ` and `y` coefficients under one embedding of the tower.
    pub fn to_complex<F: Float>(&self, embedding: &[Complex<F>]) -> (Complex<F>, Vec<Complex<F>>) {
        let d = self.tower.depth();
        let gamma = self.tower.eval_numeric(&self.x_coeff, d, embedding);
        let ys = self.coeffs.iter().map(|c| self.tower.eval_numeric(c, d, embedding)).collect();
        (gamma, ys)
    }

    /// `γ·t^e` rendered in `var`.
    pub fn render_x(&self, var: &str) -> String {
        let monomial = if self.e == 1 { var.to_string() } else { format!("{var}^{}", self.e) };
        render_term(&self.x_coeff, self.tower.depth(), &monomial)
    }

    /// `y(t)` in increasing powers of `var`.
    pub fn render_y(&self, var: &str) -> String {
        render_series(&self.coeffs, self.tower.depth(), var)
    }
}

impl<K: Scalar> fmt::Debug for PuiseuxSeries<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x = {}, y = {} + O(t^{})", self.render_x("t"), self.render_y("t"), self.truncation + 1)
    }
}
