//! Step functions on the plane, the product measure `μ_{X×Y}`, partial
//! integration `ℱ_X` and the identity `φ_Y ∘ ℱ_X = φ_{X×Y}`.
//!
//! A [`StepFn2D`] stores its value on every atom of the grid
//! `xs × ys`: point atoms `{sᵢ}` and open gaps `(sᵢ, sᵢ₊₁)` on each axis,
//! so gridline values are kept for the pointwise lattice operations. Atom
//! `2i` is the `i`-th breakpoint and atom `2i + 1` the gap after it.

use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::instances::interval::{Interval, IntervalSet};
use crate::instances::step::{StepFn, StepOp};
use crate::lattice::Lattice;
use crate::rational::Rational;
use crate::report::CheckReport;
use crate::valuation::Valuation;

/// `coefficient · 1_{base_x × base_y}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectTerm {
    pub coefficient: Rational,
    pub base_x: IntervalSet,
    pub base_y: IntervalSet,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RectTermError {
    #[error("rectangle term {0} has an empty base set")]
    EmptyBase(usize),
}

impl RectTerm {
    pub fn new(coefficient: Rational, base_x: IntervalSet, base_y: IntervalSet) -> Self {
        RectTerm {
            coefficient,
            base_x,
            base_y,
        }
    }
}

/// `μ_X(A) · μ_Y(B)`.
pub fn mu_xy(a: &IntervalSet, b: &IntervalSet) -> Rational {
    a.measure() * b.measure()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct StepFn2D {
    xs: Vec<Rational>,
    ys: Vec<Rational>,
    /// `values[i][j]` on x-atom `i`, y-atom `j`.
    values: Vec<Vec<Rational>>,
}

fn atom_count(bps: &[Rational]) -> usize {
    (2 * bps.len()).saturating_sub(1)
}

/// An open cell `(x-gap, y-gap, value)`.
pub type Cell = ((Rational, Rational), (Rational, Rational), Rational);

fn atom_rep(bps: &[Rational], k: usize) -> Rational {
    if k.is_multiple_of(2) {
        bps[k / 2].clone()
    } else {
        bps[k / 2].midpoint(&bps[k / 2 + 1])
    }
}

/// Atom index of `x`, or `None` outside the hull.
fn atom_of(bps: &[Rational], x: &Rational) -> Option<usize> {
    match bps.binary_search(x) {
        Ok(i) => Some(2 * i),
        Err(0) => None,
        Err(i) if i == bps.len() => None,
        Err(i) => Some(2 * i - 1),
    }
}

fn merged(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut v: Vec<Rational> = a.iter().chain(b).cloned().collect();
    v.sort();
    v.dedup();
    v
}

impl StepFn2D {
    pub fn zero() -> Self {
        StepFn2D::default()
    }

    /// Sum of the terms, refined to the common grid.
    pub fn make(terms: &[RectTerm]) -> Result<Self, RectTermError> {
        if let Some(k) = terms
            .iter()
            .position(|t| t.base_x.is_empty() || t.base_y.is_empty())
        {
            return Err(RectTermError::EmptyBase(k));
        }
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for t in terms {
            xs = merged(&xs, &t.base_x.endpoints());
            ys = merged(&ys, &t.base_y.endpoints());
        }
        Ok(StepFn2D::from_atoms(xs, ys, |x, y| {
            terms
                .iter()
                .filter(|t| t.base_x.contains(x) && t.base_y.contains(y))
                .map(|t| &t.coefficient)
                .sum()
        }))
    }

    /// `c · 1_{A×B}`.
    pub fn rect(c: Rational, a: IntervalSet, b: IntervalSet) -> Self {
        if a.is_empty() || b.is_empty() {
            return StepFn2D::zero();
        }
        StepFn2D::make(&[RectTerm::new(c, a, b)]).expect("nonempty bases")
    }

    fn from_atoms(
        xs: Vec<Rational>,
        ys: Vec<Rational>,
        value: impl Fn(&Rational, &Rational) -> Rational,
    ) -> Self {
        let (nx, ny) = (atom_count(&xs), atom_count(&ys));
        let yreps: Vec<Rational> = (0..ny).map(|j| atom_rep(&ys, j)).collect();
        let values = (0..nx)
            .map(|i| {
                let x = atom_rep(&xs, i);
                yreps.iter().map(|y| value(&x, y)).collect()
            })
            .collect();
        StepFn2D { xs, ys, values }.canonical()
    }

    /// Drops every breakpoint across which the function does not change.
    fn canonical(self) -> Self {
        let zero = Rational::zero();
        let (nx, ny) = (atom_count(&self.xs), atom_count(&self.ys));
        let v = |i: isize, j: isize| -> &Rational {
            if i < 0 || j < 0 || i as usize >= nx || j as usize >= ny {
                &zero
            } else {
                &self.values[i as usize][j as usize]
            }
        };
        let keep_x: Vec<bool> = (0..self.xs.len())
            .map(|i| {
                let a = 2 * i as isize;
                (0..ny as isize).any(|j| v(a, j) != v(a - 1, j) || v(a, j) != v(a + 1, j))
            })
            .collect();
        let keep_y: Vec<bool> = (0..self.ys.len())
            .map(|j| {
                let b = 2 * j as isize;
                (0..nx as isize).any(|i| v(i, b) != v(i, b - 1) || v(i, b) != v(i, b + 1))
            })
            .collect();
        if keep_x.iter().chain(&keep_y).all(|&k| k) {
            return self;
        }
        let xs: Vec<Rational> = self
            .xs
            .iter()
            .zip(&keep_x)
            .filter(|(_, &k)| k)
            .map(|(x, _)| x.clone())
            .collect();
        let ys: Vec<Rational> = self
            .ys
            .iter()
            .zip(&keep_y)
            .filter(|(_, &k)| k)
            .map(|(y, _)| y.clone())
            .collect();
        let (nx2, ny2) = (atom_count(&xs), atom_count(&ys));
        let values = (0..nx2)
            .map(|i| {
                let x = atom_rep(&xs, i);
                (0..ny2).map(|j| self.eval(&x, &atom_rep(&ys, j))).collect()
            })
            .collect();
        StepFn2D { xs, ys, values }
    }

    pub fn xs(&self) -> &[Rational] {
        &self.xs
    }

    pub fn ys(&self) -> &[Rational] {
        &self.ys
    }

    pub fn is_zero(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        match (atom_of(&self.xs, x), atom_of(&self.ys, y)) {
            (Some(i), Some(j)) => self.values[i][j].clone(),
            _ => Rational::zero(),
        }
    }

    /// Nonzero open cells as `(x-gap, y-gap, value)`.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for (i, xw) in self.xs.windows(2).enumerate() {
            for (j, yw) in self.ys.windows(2).enumerate() {
                let c = &self.values[2 * i + 1][2 * j + 1];
                if !c.is_zero() {
                    out.push((
                        (xw[0].clone(), xw[1].clone()),
                        (yw[0].clone(), yw[1].clone()),
                        c.clone(),
                    ));
                }
            }
        }
        out
    }

    pub fn combine(&self, kind: StepOp, other: &StepFn2D) -> StepFn2D {
        let xs = merged(&self.xs, &other.xs);
        let ys = merged(&self.ys, &other.ys);
        StepFn2D::from_atoms(xs, ys, |x, y| {
            let (a, b) = (self.eval(x, y), other.eval(x, y));
            match kind {
                StepOp::Meet => a.min(b),
                StepOp::Join => a.max(b),
                StepOp::Add => a + b,
                StepOp::Sub => a - b,
            }
        })
    }

    pub fn meet(&self, other: &StepFn2D) -> StepFn2D {
        self.combine(StepOp::Meet, other)
    }

    pub fn join(&self, other: &StepFn2D) -> StepFn2D {
        self.combine(StepOp::Join, other)
    }

    pub fn add(&self, other: &StepFn2D) -> StepFn2D {
        self.combine(StepOp::Add, other)
    }

    pub fn scale(&self, lambda: &Rational) -> StepFn2D {
        StepFn2D::from_atoms(self.xs.clone(), self.ys.clone(), |x, y| {
            lambda * self.eval(x, y)
        })
    }

    /// `Σ cell value · area` over open cells.
    pub fn integral(&self) -> Rational {
        self.cells()
            .into_iter()
            .map(|((x0, x1), (y0, y1), c)| c * (x1 - x0) * (y1 - y0))
            .sum()
    }

    /// The section `x ↦ f(x, y)`.
    pub fn slice(&self, y: &Rational) -> StepFn {
        match atom_of(&self.ys, y) {
            None => StepFn::zero(),
            Some(j) => self.section_x(j),
        }
    }

    /// The section `y ↦ f(x, y)`.
    pub fn slice_x(&self, x: &Rational) -> StepFn {
        match atom_of(&self.xs, x) {
            None => StepFn::zero(),
            Some(i) => self.section_y(i),
        }
    }

    fn section_x(&self, j: usize) -> StepFn {
        let col = |i: usize| self.values[i][j].clone();
        StepFn::from_parts(
            self.xs.clone(),
            (0..self.xs.len().saturating_sub(1)).map(|i| col(2 * i + 1)).collect(),
            (0..self.xs.len()).map(|i| col(2 * i)).collect(),
        )
        .expect("grid is sorted")
    }

    fn section_y(&self, i: usize) -> StepFn {
        let row = |j: usize| self.values[i][j].clone();
        StepFn::from_parts(
            self.ys.clone(),
            (0..self.ys.len().saturating_sub(1)).map(|j| row(2 * j + 1)).collect(),
            (0..self.ys.len()).map(|j| row(2 * j)).collect(),
        )
        .expect("grid is sorted")
    }

    /// `ℱ_X(f)(y) = φ_X(f^y)`, a step function in `y`.
    pub fn partial_integrate(&self) -> StepFn {
        let ny = atom_count(&self.ys);
        let per_atom: Vec<Rational> = (0..ny).map(|j| self.section_x(j).integral()).collect();
        StepFn::from_parts(
            self.ys.clone(),
            (0..self.ys.len().saturating_sub(1))
                .map(|j| per_atom[2 * j + 1].clone())
                .collect(),
            (0..self.ys.len()).map(|j| per_atom[2 * j].clone()).collect(),
        )
        .expect("grid is sorted")
    }

    /// `ℱ_Y(f)(x) = φ_Y(f_x)`, a step function in `x`.
    pub fn partial_integrate_y(&self) -> StepFn {
        let nx = atom_count(&self.xs);
        let per_atom: Vec<Rational> = (0..nx).map(|i| self.section_y(i).integral()).collect();
        StepFn::from_parts(
            self.xs.clone(),
            (0..self.xs.len().saturating_sub(1))
                .map(|i| per_atom[2 * i + 1].clone())
                .collect(),
            (0..self.xs.len()).map(|i| per_atom[2 * i].clone()).collect(),
        )
        .expect("grid is sorted")
    }
}

impl fmt::Display for StepFn2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells = self.cells();
        if cells.is_empty() {
            return write!(f, "0 a.e.");
        }
        for (k, ((x0, x1), (y0, y1), c)) in cells.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}·1_({x0},{x1})×({y0},{y1})")?;
        }
        Ok(())
    }
}

/// One sampled slice comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SliceSample {
    pub y: Rational,
    pub partial: Rational,
    pub slice_integral: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FubiniOutcome {
    pub lhs: Rational,
    pub rhs: Rational,
    pub equal: bool,
    pub sampled_slices: Vec<SliceSample>,
    pub report: CheckReport,
}

/// Compares `φ_Y(ℱ_X f)` with the direct double sum, the other integration
/// order with both, and `ℱ_X(f)(y)` with `φ_S(f^y)` at every gridline, every
/// gap midpoint and `slice_samples` random points.
pub fn fubini_check(f: &StepFn2D, slice_samples: usize, seed: u64) -> FubiniOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport::new();
    let fx = f.partial_integrate();
    let lhs = fx.integral();
    let rhs = f.integral();
    report.record("fubini", lhs == rhs, || format!("{lhs} vs {rhs}"));
    let other = f.partial_integrate_y().integral();
    report.record("fubini_symmetric", other == rhs, || format!("{other} vs {rhs}"));

    let mut ys: Vec<Rational> = (0..atom_count(f.ys())).map(|j| atom_rep(f.ys(), j)).collect();
    let (lo, hi) = match (f.ys().first(), f.ys().last()) {
        (Some(a), Some(b)) => (a - Rational::one(), b + Rational::one()),
        _ => (Rational::zero(), Rational::one()),
    };
    for _ in 0..slice_samples {
        let t = Rational::new(rng.gen_range(0..=1000), 1000);
        ys.push(&lo + &t * (&hi - &lo));
    }
    let mut sampled = Vec::new();
    for y in ys {
        let partial = fx.eval(&y);
        let slice_integral = f.slice(&y).integral();
        report.record("slice_consistency", partial == slice_integral, || {
            format!("y={y}: {partial} vs {slice_integral}")
        });
        sampled.push(SliceSample {
            y,
            partial,
            slice_integral,
        });
    }
    FubiniOutcome {
        equal: lhs == rhs,
        lhs,
        rhs,
        sampled_slices: sampled,
        report,
    }
}

/// Random rectangle-term functions with endpoints drawn from a fixed pool of
/// `pool` rationals per axis, so each axis has at most `pool` breakpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectSampler {
    pub max_terms: usize,
    pub pool: usize,
}

impl Default for RectSampler {
    fn default() -> Self {
        RectSampler {
            max_terms: 10,
            pool: 16,
        }
    }
}

impl RectSampler {
    fn pool(&self, rng: &mut dyn RngCore) -> Vec<Rational> {
        let mut v: Vec<Rational> = (0..self.pool)
            .map(|_| Rational::new(rng.gen_range(0..=60), rng.gen_range(1..=4)))
            .collect();
        v.sort();
        v.dedup();
        v
    }

    fn piece(pool: &[Rational], rng: &mut dyn RngCore) -> IntervalSet {
        let a = &pool[rng.gen_range(0..pool.len())];
        let b = &pool[rng.gen_range(0..pool.len())];
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let mut i = Interval::new(lo.clone(), rng.gen(), hi.clone(), rng.gen());
        if i.is_empty() {
            i = Interval::point(lo.clone());
        }
        IntervalSet::interval(i).expect("lo <= hi")
    }

    pub fn terms(&self, rng: &mut dyn RngCore) -> Vec<RectTerm> {
        let px = self.pool(rng);
        let py = self.pool(rng);
        (0..rng.gen_range(1..=self.max_terms))
            .map(|_| {
                RectTerm::new(
                    Rational::new(rng.gen_range(-6..=6), rng.gen_range(1..=3)),
                    Self::piece(&px, rng),
                    Self::piece(&py, rng),
                )
            })
            .collect()
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> StepFn2D {
        StepFn2D::make(&self.terms(rng)).expect("sampled bases are nonempty")
    }
}

/// Finite unions of rectangles as 0/1 indicators, ordered pointwise.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RectSetLattice {
    pub max_rects: usize,
}

impl RectSetLattice {
    /// The indicator of `⋃ Aₖ × Bₖ`.
    pub fn union_of(rects: &[(IntervalSet, IntervalSet)]) -> StepFn2D {
        rects.iter().fold(StepFn2D::zero(), |acc, (a, b)| {
            acc.join(&StepFn2D::rect(Rational::one(), a.clone(), b.clone()))
        })
    }
}

impl Lattice for RectSetLattice {
    type Elem = StepFn2D;

    fn meet(&self, a: &StepFn2D, b: &StepFn2D) -> StepFn2D {
        a.meet(b)
    }
    fn join(&self, a: &StepFn2D, b: &StepFn2D) -> StepFn2D {
        a.join(b)
    }
    fn sample(&self, rng: &mut dyn RngCore) -> Option<StepFn2D> {
        let s = RectSampler { max_terms: 1, pool: 6 };
        let k = rng.gen_range(0..=self.max_rects.max(1));
        let rects: Vec<(IntervalSet, IntervalSet)> = (0..k)
            .map(|_| {
                let t = s.terms(rng).remove(0);
                (t.base_x, t.base_y)
            })
            .collect();
        Some(RectSetLattice::union_of(&rects))
    }
}

/// `μ_{X×Y}` on rectangle sets: the integral of the indicator.
#[derive(Debug, Clone)]
pub struct ProductMeasure {
    pub lattice: RectSetLattice,
}

impl Default for ProductMeasure {
    fn default() -> Self {
        ProductMeasure {
            lattice: RectSetLattice { max_rects: 3 },
        }
    }
}

impl Valuation for ProductMeasure {
    type L = RectSetLattice;
    type V = Rational;

    fn lattice(&self) -> &RectSetLattice {
        &self.lattice
    }
    fn eval(&self, a: &StepFn2D) -> Rational {
        a.integral()
    }
    fn name(&self) -> std::borrow::Cow<'_, str> {
        "mu_XY".into()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TermsLoadError {
    #[error("malformed rectangle terms document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Term(#[from] RectTermError),
}

/// Reads `[{"coefficient": …, "base_x": [...], "base_y": [...]}, …]`.
pub fn terms_from_json(text: &str) -> Result<(Vec<RectTerm>, StepFn2D), TermsLoadError> {
    let terms: Vec<RectTerm> = serde_json::from_str(text)?;
    let f = StepFn2D::make(&terms)?;
    Ok((terms, f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::integer(n)
    }

    #[test]
    fn product_measure_of_rectangles() {
        assert_eq!(mu_xy(&IntervalSet::closed(0, 2), &IntervalSet::closed(0, 3)), r(6));
        assert_eq!(mu_xy(&IntervalSet::empty(), &IntervalSet::closed(0, 3)), r(0));
        assert_eq!(mu_xy(&IntervalSet::point(1), &IntervalSet::closed(0, 5)), r(0));
    }

    #[test]
    fn single_rectangle_is_one_cell() {
        let f = StepFn2D::rect(r(1), IntervalSet::closed(0, 1), IntervalSet::closed(0, 1));
        assert_eq!(f.cells().len(), 1);
    }

    #[test]
    fn overlapping_rectangles_sum_cellwise() {
        let f = StepFn2D::make(&[
            RectTerm::new(r(1), IntervalSet::closed(0, 2), IntervalSet::closed(0, 1)),
            RectTerm::new(r(1), IntervalSet::closed(1, 3), IntervalSet::closed(0, 1)),
        ])
        .unwrap();
        let vals: Vec<Rational> = f.cells().into_iter().map(|c| c.2).collect();
        assert_eq!(vals, vec![r(1), r(2), r(1)]);
    }

    #[test]
    fn cancelling_terms_vanish() {
        let a = IntervalSet::closed(0, 1);
        let f = StepFn2D::make(&[
            RectTerm::new(r(1), a.clone(), a.clone()),
            RectTerm::new(r(-1), a.clone(), a),
        ])
        .unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn partial_integration_of_a_rectangle() {
        let f = StepFn2D::rect(r(2), IntervalSet::closed(0, 3), IntervalSet::closed(1, 2));
        let g = f.partial_integrate();
        assert_eq!(g, StepFn::indicator(&Interval::closed(1, 2), r(6)).unwrap());
        let out = fubini_check(&f, 5, 0);
        assert_eq!((out.lhs, out.rhs), (r(6), r(6)));
        assert!(out.report.all_pass());
    }

    #[test]
    fn shared_gridline_slices() {
        let f = StepFn2D::make(&[
            RectTerm::new(r(1), IntervalSet::closed(0, 1), IntervalSet::closed(0, 1)),
            RectTerm::new(r(1), IntervalSet::closed(0, 2), IntervalSet::closed(1, 2)),
        ])
        .unwrap();
        let g = f.partial_integrate();
        assert_eq!(g.eval(&Rational::new(1, 2)), r(1));
        assert_eq!(g.eval(&Rational::new(3, 2)), r(2));
        // On y = 1 both rectangles contribute: 1 on [0,1] doubled, plus (1,2].
        assert_eq!(g.eval(&r(1)), r(3));
        assert_eq!(f.slice(&r(1)).integral(), r(3));
    }

    #[test]
    fn slices() {
        let f = StepFn2D::rect(r(1), IntervalSet::closed(0, 1), IntervalSet::closed(0, 1));
        assert_eq!(
            f.slice(&Rational::new(1, 2)),
            StepFn::indicator(&Interval::closed(0, 1), r(1)).unwrap()
        );
        assert!(f.slice(&r(2)).is_zero());
    }

    #[test]
    fn zero_checks_trivially() {
        let out = fubini_check(&StepFn2D::zero(), 3, 1);
        assert!(out.equal && out.lhs.is_zero());
    }

    #[test]
    fn terms_json() {
        let text = r#"[{"coefficient":"2","base_x":[{"lo":"0","hi":"3","lo_closed":true,"hi_closed":true}],"base_y":[{"lo":"1","hi":"2","lo_closed":true,"hi_closed":true}]}]"#;
        let (terms, f) = terms_from_json(text).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(f.integral(), r(6));
        assert!(terms_from_json(r#"[{"coefficient":"1","base_x":[],"base_y":[]}]"#).is_err());
    }
}
