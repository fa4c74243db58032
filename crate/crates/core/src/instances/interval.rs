//! Finite unions of rational intervals and the length measure `μ_S`.
//!
//! Every set operation goes through the same atom refinement: collect the
//! endpoints of all operands, decide membership on each point atom and each
//! open gap between consecutive endpoints, then rebuild maximal runs. The
//! output is therefore canonical by construction.

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, RngCore};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::lattice::Lattice;
use crate::rational::Rational;
use crate::valuation::Valuation;

/// One piece of an interval set. `lo == hi` only for a closed singleton.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: Rational, lo_closed: bool, hi: Rational, hi_closed: bool) -> Self {
        Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        }
    }

    pub fn closed(lo: impl Into<Rational>, hi: impl Into<Rational>) -> Self {
        Interval::new(lo.into(), true, hi.into(), true)
    }

    pub fn open(lo: impl Into<Rational>, hi: impl Into<Rational>) -> Self {
        Interval::new(lo.into(), false, hi.into(), false)
    }

    pub fn closed_open(lo: impl Into<Rational>, hi: impl Into<Rational>) -> Self {
        Interval::new(lo.into(), true, hi.into(), false)
    }

    pub fn open_closed(lo: impl Into<Rational>, hi: impl Into<Rational>) -> Self {
        Interval::new(lo.into(), false, hi.into(), true)
    }

    pub fn point(x: impl Into<Rational>) -> Self {
        let x = x.into();
        Interval::new(x.clone(), true, x, true)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        match (x.cmp(&self.lo), x.cmp(&self.hi)) {
            (Ordering::Greater, Ordering::Less) => true,
            (Ordering::Equal, hi) => self.lo_closed && (hi == Ordering::Less || self.hi_closed),
            (_, Ordering::Equal) => self.hi_closed && *x > self.lo,
            _ => false,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self.lo.cmp(&self.hi) {
            Ordering::Less => false,
            Ordering::Equal => !(self.lo_closed && self.hi_closed),
            Ordering::Greater => true,
        }
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            return write!(f, "{{{}}}", self.lo);
        }
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IntervalError {
    #[error("interval has lo {lo} > hi {hi}")]
    Reversed { lo: Rational, hi: Rational },
}

/// A canonical finite disjoint union of intervals: pieces sorted, pairwise
/// disjoint and never mergeable. Equality is set equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntervalSet {
    pieces: Vec<Interval>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetOp {
    Meet,
    Join,
    Diff,
    SymmDiff,
}

impl SetOp {
    fn apply(self, a: bool, b: bool) -> bool {
        match self {
            SetOp::Meet => a && b,
            SetOp::Join => a || b,
            SetOp::Diff => a && !b,
            SetOp::SymmDiff => a != b,
        }
    }
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    /// Canonical union of the given intervals. Empty open intervals such as
    /// `(a, a)` vanish; `lo > hi` is an error.
    pub fn make(raw: impl IntoIterator<Item = Interval>) -> Result<Self, IntervalError> {
        let raw: Vec<Interval> = raw.into_iter().collect();
        for i in &raw {
            if i.lo > i.hi {
                return Err(IntervalError::Reversed {
                    lo: i.lo.clone(),
                    hi: i.hi.clone(),
                });
            }
        }
        let raw: Vec<Interval> = raw.into_iter().filter(|i| !i.is_empty()).collect();
        let points = endpoints(raw.iter());
        Ok(rebuild(&points, |x| raw.iter().any(|i| i.contains(x))))
    }

    pub fn interval(i: Interval) -> Result<Self, IntervalError> {
        IntervalSet::make([i])
    }

    pub fn closed(lo: impl Into<Rational>, hi: impl Into<Rational>) -> Self {
        IntervalSet::make([Interval::closed(lo, hi)]).expect("lo <= hi")
    }

    pub fn open(lo: impl Into<Rational>, hi: impl Into<Rational>) -> Self {
        IntervalSet::make([Interval::open(lo, hi)]).expect("lo <= hi")
    }

    pub fn point(x: impl Into<Rational>) -> Self {
        IntervalSet {
            pieces: vec![Interval::point(x)],
        }
    }

    pub fn pieces(&self) -> &[Interval] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let idx = self.pieces.partition_point(|p| p.hi < *x);
        self.pieces.get(idx).is_some_and(|p| p.contains(x))
    }

    pub fn op(&self, kind: SetOp, other: &IntervalSet) -> IntervalSet {
        let points = endpoints(self.pieces.iter().chain(other.pieces.iter()));
        rebuild(&points, |x| kind.apply(self.contains(x), other.contains(x)))
    }

    pub fn meet(&self, other: &IntervalSet) -> IntervalSet {
        self.op(SetOp::Meet, other)
    }

    pub fn join(&self, other: &IntervalSet) -> IntervalSet {
        self.op(SetOp::Join, other)
    }

    pub fn diff(&self, other: &IntervalSet) -> IntervalSet {
        self.op(SetOp::Diff, other)
    }

    pub fn symmdiff(&self, other: &IntervalSet) -> IntervalSet {
        self.op(SetOp::SymmDiff, other)
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.diff(other).is_empty()
    }

    /// Sum of piece lengths. Boundary kinds do not matter.
    pub fn measure(&self) -> Rational {
        self.pieces.iter().map(Interval::length).sum()
    }

    /// Smallest and largest endpoint, if nonempty.
    pub fn hull(&self) -> Option<(Rational, Rational)> {
        Some((
            self.pieces.first()?.lo.clone(),
            self.pieces.last()?.hi.clone(),
        ))
    }

    /// All piece endpoints in increasing order.
    pub fn endpoints(&self) -> Vec<Rational> {
        endpoints(self.pieces.iter())
    }
}

/// `μ_S`.
pub fn mu_s(a: &IntervalSet) -> Rational {
    a.measure()
}

fn endpoints<'a>(pieces: impl Iterator<Item = &'a Interval>) -> Vec<Rational> {
    let mut pts: Vec<Rational> = pieces
        .flat_map(|p| [p.lo.clone(), p.hi.clone()])
        .collect();
    pts.sort();
    pts.dedup();
    pts
}

/// Rebuilds a canonical set from a membership predicate that is constant on
/// each atom determined by `points` (and false outside their hull).
fn rebuild(points: &[Rational], member: impl Fn(&Rational) -> bool) -> IntervalSet {
    let mut pieces = Vec::new();
    let mut open_run: Option<(Rational, bool)> = None;
    for (k, p) in points.iter().enumerate() {
        let at = member(p);
        let after = points.get(k + 1).is_some_and(|q| member(&p.midpoint(q)));
        match (&open_run, at, after) {
            (None, true, true) => open_run = Some((p.clone(), true)),
            (None, true, false) => pieces.push(Interval::point(p.clone())),
            (None, false, true) => open_run = Some((p.clone(), false)),
            (None, false, false) => {}
            (Some(_), true, true) => {}
            (Some((lo, lc)), at, after) => {
                pieces.push(Interval::new(lo.clone(), *lc, p.clone(), at));
                open_run = None;
                if after {
                    open_run = Some((p.clone(), false));
                }
            }
        }
    }
    debug_assert!(open_run.is_none());
    IntervalSet { pieces }
}

#[derive(Debug, thiserror::Error)]
pub enum IntervalSetLoadError {
    #[error("malformed interval set document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

impl IntervalSet {
    pub fn from_json(text: &str) -> Result<Self, IntervalSetLoadError> {
        let raw: Vec<Interval> = serde_json::from_str(text)?;
        Ok(IntervalSet::make(raw)?)
    }
}

impl Serialize for IntervalSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.pieces.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = Vec::<Interval>::deserialize(deserializer)?;
        IntervalSet::make(raw).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return write!(f, "∅");
        }
        for (k, p) in self.pieces.iter().enumerate() {
            if k > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Parameters for random interval sets: endpoints are `k / denom` with
/// `0 ≤ k ≤ span · denom` and `denom` drawn from `denoms`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSampler {
    pub max_pieces: usize,
    pub span: i64,
    pub denoms: Vec<i64>,
}

impl Default for IntervalSampler {
    fn default() -> Self {
        IntervalSampler {
            max_pieces: 4,
            span: 10,
            denoms: vec![1, 2, 3, 4, 6],
        }
    }
}

impl IntervalSampler {
    pub fn point(&self, rng: &mut dyn RngCore) -> Rational {
        let d = self.denoms[rng.gen_range(0..self.denoms.len())];
        Rational::new(rng.gen_range(0..=self.span * d), d)
    }

    pub fn interval(&self, rng: &mut dyn RngCore) -> Interval {
        let a = self.point(rng);
        if rng.gen_ratio(1, 8) {
            return Interval::point(a);
        }
        let b = self.point(rng);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        Interval::new(lo, rng.gen(), hi, rng.gen())
    }

    pub fn set(&self, rng: &mut dyn RngCore) -> IntervalSet {
        let k = rng.gen_range(0..=self.max_pieces);
        IntervalSet::make((0..k).map(|_| self.interval(rng))).expect("sampled lo <= hi")
    }
}

/// The lattice of interval sets under `∩` and `∪`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntervalSetLattice {
    pub sampler: IntervalSampler,
}

impl Lattice for IntervalSetLattice {
    type Elem = IntervalSet;

    fn meet(&self, a: &IntervalSet, b: &IntervalSet) -> IntervalSet {
        a.meet(b)
    }
    fn join(&self, a: &IntervalSet, b: &IntervalSet) -> IntervalSet {
        a.join(b)
    }
    fn leq(&self, a: &IntervalSet, b: &IntervalSet) -> bool {
        a.is_subset(b)
    }
    fn sample(&self, rng: &mut dyn RngCore) -> Option<IntervalSet> {
        Some(self.sampler.set(rng))
    }
}

/// `μ_S` as a valuation into ℚ.
#[derive(Debug, Clone, Default)]
pub struct IntervalMeasure {
    pub lattice: IntervalSetLattice,
}

impl Valuation for IntervalMeasure {
    type L = IntervalSetLattice;
    type V = Rational;

    fn lattice(&self) -> &IntervalSetLattice {
        &self.lattice
    }
    fn eval(&self, a: &IntervalSet) -> Rational {
        a.measure()
    }
    fn name(&self) -> std::borrow::Cow<'_, str> {
        "mu_S".into()
    }
}

/// Adds a random singleton: a `≈`-equivalent variant for congruence checks.
pub fn with_null_point(a: &IntervalSet, sampler: &IntervalSampler, rng: &mut dyn RngCore) -> IntervalSet {
    a.join(&IntervalSet::point(sampler.point(rng)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn closed_and_open_merge_to_half_open() {
        let s = IntervalSet::make([Interval::closed(0, 1), Interval::open(1, 2)]).unwrap();
        assert_eq!(s.pieces(), &[Interval::closed_open(0, 2)]);
    }

    #[test]
    fn open_singleton_is_empty() {
        assert!(IntervalSet::make([Interval::open(0, 0)]).unwrap().is_empty());
    }

    #[test]
    fn reversed_is_an_error() {
        assert!(IntervalSet::make([Interval::closed(2, 1)]).is_err());
    }

    #[test]
    fn overlap_merges() {
        let s = IntervalSet::make([Interval::closed(0, 1), Interval::closed(q(1, 2), 3)]).unwrap();
        assert_eq!(s, IntervalSet::closed(0, 3));
    }

    #[test]
    fn touching_open_pieces_stay_apart() {
        let s = IntervalSet::make([Interval::open(0, 1), Interval::open(1, 2)]).unwrap();
        assert_eq!(s.pieces().len(), 2);
        assert!(!s.contains(&q(1, 1)));
    }

    #[test]
    fn difference_keeps_boundary_point() {
        let d = IntervalSet::closed(0, 2).diff(&IntervalSet::open(1, 2));
        let expect =
            IntervalSet::make([Interval::closed(0, 1), Interval::point(2)]).unwrap();
        assert_eq!(d, expect);
        assert_eq!(d.to_string(), "[0, 1] ∪ {2}");
    }

    #[test]
    fn symmetric_difference() {
        let s = IntervalSet::closed(0, 2).symmdiff(&IntervalSet::closed(1, 3));
        let expect =
            IntervalSet::make([Interval::closed_open(0, 1), Interval::open_closed(2, 3)]).unwrap();
        assert_eq!(s, expect);
    }

    #[test]
    fn measures() {
        let s = IntervalSet::make([Interval::closed(0, 1), Interval::closed(2, q(7, 2))]).unwrap();
        assert_eq!(mu_s(&s), q(5, 2));
        assert_eq!(mu_s(&IntervalSet::empty()), Rational::zero());
        assert_eq!(mu_s(&IntervalSet::point(2)), Rational::zero());
    }

    #[test]
    fn json_round_trip() {
        let s = IntervalSet::make([Interval::closed_open(0, 1), Interval::point(q(5, 2))]).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(
            text,
            r#"[{"lo":"0","hi":"1","lo_closed":true,"hi_closed":false},{"lo":"5/2","hi":"5/2","lo_closed":true,"hi_closed":true}]"#
        );
        assert_eq!(IntervalSet::from_json(&text).unwrap(), s);
    }
}
