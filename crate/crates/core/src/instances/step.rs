//! Exact step functions on the line and the integral `φ_S`.
//!
//! A step function is zero outside `[s₁, s_N]`, constant on each open gap
//! `(sᵢ, sᵢ₊₁)` and carries its own value at every breakpoint. Point values
//! never affect the integral but do affect the pointwise lattice order.

use std::fmt;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::interval::{Interval, IntervalSampler};
use crate::lattice::Lattice;
use crate::rational::Rational;
use crate::valuation::Valuation;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct StepFn {
    breakpoints: Vec<Rational>,
    open_values: Vec<Rational>,
    point_values: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StepError {
    #[error("conflicting values {first} and {second} assigned at {at}")]
    ConflictingPoint {
        at: Rational,
        first: Rational,
        second: Rational,
    },
    #[error("interval has lo {lo} > hi {hi}")]
    Reversed { lo: Rational, hi: Rational },
    #[error("breakpoints must be strictly increasing")]
    Unsorted,
    #[error("expected {expected} {field}, found {found}")]
    Length {
        field: &'static str,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOp {
    Meet,
    Join,
    Add,
    Sub,
}

impl StepOp {
    fn apply(self, a: &Rational, b: &Rational) -> Rational {
        match self {
            StepOp::Meet => a.clone().min(b.clone()),
            StepOp::Join => a.clone().max(b.clone()),
            StepOp::Add => a + b,
            StepOp::Sub => a - b,
        }
    }
}

impl StepFn {
    pub fn zero() -> Self {
        StepFn::default()
    }

    /// `c · 1_I`.
    pub fn indicator(i: &Interval, c: Rational) -> Result<Self, StepError> {
        StepFn::make(&[(i.clone(), c)], &[])
    }

    /// `Σ cₖ · 1_{Iₖ}`, then overridden at the assigned points. Two different
    /// values assigned to one point are an error.
    pub fn make(
        parts: &[(Interval, Rational)],
        points: &[(Rational, Rational)],
    ) -> Result<Self, StepError> {
        for (i, _) in parts {
            if i.lo > i.hi {
                return Err(StepError::Reversed {
                    lo: i.lo.clone(),
                    hi: i.hi.clone(),
                });
            }
        }
        let mut assigned: Vec<(Rational, Rational)> = Vec::new();
        for (x, v) in points {
            match assigned.iter().find(|(y, _)| y == x) {
                Some((_, w)) if w != v => {
                    return Err(StepError::ConflictingPoint {
                        at: x.clone(),
                        first: w.clone(),
                        second: v.clone(),
                    })
                }
                Some(_) => {}
                None => assigned.push((x.clone(), v.clone())),
            }
        }
        let mut bps: Vec<Rational> = parts
            .iter()
            .flat_map(|(i, _)| [i.lo.clone(), i.hi.clone()])
            .chain(assigned.iter().map(|(x, _)| x.clone()))
            .collect();
        bps.sort();
        bps.dedup();
        let value = |x: &Rational| -> Rational {
            if let Some((_, v)) = assigned.iter().find(|(y, _)| y == x) {
                return v.clone();
            }
            parts
                .iter()
                .filter(|(i, _)| i.contains(x))
                .map(|(_, c)| c)
                .sum()
        };
        Ok(StepFn::from_atoms(bps, value))
    }

    /// Checks the raw representation and canonicalizes it.
    pub fn from_parts(
        breakpoints: Vec<Rational>,
        open_values: Vec<Rational>,
        point_values: Vec<Rational>,
    ) -> Result<Self, StepError> {
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(StepError::Unsorted);
        }
        let n = breakpoints.len();
        if point_values.len() != n {
            return Err(StepError::Length {
                field: "point_values",
                expected: n,
                found: point_values.len(),
            });
        }
        let gaps = n.saturating_sub(1);
        if open_values.len() != gaps {
            return Err(StepError::Length {
                field: "open_values",
                expected: gaps,
                found: open_values.len(),
            });
        }
        Ok(StepFn {
            breakpoints,
            open_values,
            point_values,
        }
        .canonical())
    }

    pub fn from_json(text: &str) -> Result<Self, StepLoadError> {
        let raw: RawStep = serde_json::from_str(text)?;
        Ok(StepFn::from_parts(raw.breakpoints, raw.open_values, raw.point_values)?)
    }

    /// Builds from a value function that is constant on every atom of `bps`
    /// and zero outside their hull.
    fn from_atoms(bps: Vec<Rational>, value: impl Fn(&Rational) -> Rational) -> Self {
        let point_values = bps.iter().map(&value).collect();
        let open_values = bps.windows(2).map(|w| value(&w[0].midpoint(&w[1]))).collect();
        StepFn {
            breakpoints: bps,
            open_values,
            point_values,
        }
        .canonical()
    }

    /// Drops every breakpoint whose point value equals the open values on
    /// both sides (zero outside the hull).
    fn canonical(self) -> Self {
        let n = self.breakpoints.len();
        let zero = Rational::zero();
        let left = |i: usize| if i == 0 { &zero } else { &self.open_values[i - 1] };
        let right = |i: usize| self.open_values.get(i).unwrap_or(&zero);
        let keep: Vec<bool> = (0..n)
            .map(|i| !(self.point_values[i] == *left(i) && self.point_values[i] == *right(i)))
            .collect();
        let mut out = StepFn::default();
        for i in (0..n).filter(|&i| keep[i]) {
            if !out.breakpoints.is_empty() {
                out.open_values.push(left(i).clone());
            }
            out.breakpoints.push(self.breakpoints[i].clone());
            out.point_values.push(self.point_values[i].clone());
        }
        out
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn open_values(&self) -> &[Rational] {
        &self.open_values
    }

    pub fn point_values(&self) -> &[Rational] {
        &self.point_values
    }

    pub fn is_zero(&self) -> bool {
        self.breakpoints.is_empty()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        match self.breakpoints.binary_search(x) {
            Ok(i) => self.point_values[i].clone(),
            Err(0) => Rational::zero(),
            Err(i) if i == self.breakpoints.len() => Rational::zero(),
            Err(i) => self.open_values[i - 1].clone(),
        }
    }

    pub fn combine(&self, kind: StepOp, other: &StepFn) -> StepFn {
        let mut bps: Vec<Rational> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .cloned()
            .collect();
        bps.sort();
        bps.dedup();
        StepFn::from_atoms(bps, |x| kind.apply(&self.eval(x), &other.eval(x)))
    }

    pub fn meet(&self, other: &StepFn) -> StepFn {
        self.combine(StepOp::Meet, other)
    }

    pub fn join(&self, other: &StepFn) -> StepFn {
        self.combine(StepOp::Join, other)
    }

    pub fn add(&self, other: &StepFn) -> StepFn {
        self.combine(StepOp::Add, other)
    }

    pub fn sub(&self, other: &StepFn) -> StepFn {
        self.combine(StepOp::Sub, other)
    }

    pub fn map(&self, f: impl Fn(&Rational) -> Rational) -> StepFn {
        assert!(f(&Rational::zero()).is_zero(), "map must fix zero");
        StepFn::from_atoms(self.breakpoints.clone(), |x| f(&self.eval(x)))
    }

    pub fn scale(&self, lambda: &Rational) -> StepFn {
        self.map(|v| lambda * v)
    }

    pub fn abs(&self) -> StepFn {
        self.map(Rational::abs)
    }

    pub fn leq(&self, other: &StepFn) -> bool {
        self.meet(other) == *self
    }

    /// `Σ open_value · width`.
    pub fn integral(&self) -> Rational {
        self.breakpoints
            .windows(2)
            .zip(&self.open_values)
            .map(|(w, c)| c * (&w[1] - &w[0]))
            .sum()
    }
}

/// `φ_S`.
pub fn phi_s(f: &StepFn) -> Rational {
    f.integral()
}

#[derive(Deserialize)]
struct RawStep {
    breakpoints: Vec<Rational>,
    open_values: Vec<Rational>,
    point_values: Vec<Rational>,
}

#[derive(Debug, thiserror::Error)]
pub enum StepLoadError {
    #[error("malformed step function document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Step(#[from] StepError),
}

impl<'de> Deserialize<'de> for StepFn {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawStep::deserialize(deserializer)?;
        StepFn::from_parts(raw.breakpoints, raw.open_values, raw.point_values)
            .map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for StepFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, s) in self.breakpoints.iter().enumerate() {
            if i > 0 {
                write!(f, " ({}) ", self.open_values[i - 1])?;
            }
            write!(f, "{s}:{}", self.point_values[i])?;
        }
        Ok(())
    }
}

/// Random step functions: a few weighted indicators plus point overrides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepSampler {
    pub intervals: IntervalSampler,
    pub max_terms: usize,
    pub max_points: usize,
    pub max_abs_value: i64,
}

impl Default for StepSampler {
    fn default() -> Self {
        StepSampler {
            intervals: IntervalSampler::default(),
            max_terms: 3,
            max_points: 2,
            max_abs_value: 5,
        }
    }
}

impl StepSampler {
    fn value(&self, rng: &mut dyn RngCore) -> Rational {
        Rational::new(
            rng.gen_range(-self.max_abs_value..=self.max_abs_value),
            rng.gen_range(1..=3),
        )
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> StepFn {
        let parts: Vec<(Interval, Rational)> = (0..rng.gen_range(0..=self.max_terms))
            .map(|_| (self.intervals.interval(rng), self.value(rng)))
            .collect();
        let mut points: Vec<(Rational, Rational)> = Vec::new();
        for _ in 0..rng.gen_range(0..=self.max_points) {
            let x = self.intervals.point(rng);
            if points.iter().all(|(y, _)| *y != x) {
                points.push((x, self.value(rng)));
            }
        }
        StepFn::make(&parts, &points).expect("sampled data is consistent")
    }
}

/// Step functions under pointwise min and max.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StepFnLattice {
    pub sampler: StepSampler,
}

impl Lattice for StepFnLattice {
    type Elem = StepFn;

    fn meet(&self, a: &StepFn, b: &StepFn) -> StepFn {
        a.meet(b)
    }
    fn join(&self, a: &StepFn, b: &StepFn) -> StepFn {
        a.join(b)
    }
    fn sample(&self, rng: &mut dyn RngCore) -> Option<StepFn> {
        Some(self.sampler.sample(rng))
    }
}

/// `φ_S` as a valuation into ℚ.
#[derive(Debug, Clone, Default)]
pub struct StepIntegral {
    pub lattice: StepFnLattice,
}

impl Valuation for StepIntegral {
    type L = StepFnLattice;
    type V = Rational;

    fn lattice(&self) -> &StepFnLattice {
        &self.lattice
    }
    fn eval(&self, f: &StepFn) -> Rational {
        f.integral()
    }
    fn name(&self) -> std::borrow::Cow<'_, str> {
        "phi_S".into()
    }
}

/// Changes the value at one random point: a `≈`-equivalent variant.
pub fn with_null_change(f: &StepFn, sampler: &StepSampler, rng: &mut dyn RngCore) -> StepFn {
    let x = sampler.intervals.point(rng);
    let v = sampler.value(rng);
    let bump = StepFn::make(&[], &[(x.clone(), &v - &f.eval(&x))]).expect("single point");
    f.add(&bump)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::integer(n)
    }

    #[test]
    fn two_open_steps() {
        let f = StepFn::make(
            &[(Interval::open(0, 1), r(2)), (Interval::open(1, 2), r(3))],
            &[],
        )
        .unwrap();
        assert_eq!(f.breakpoints(), &[r(0), r(1), r(2)]);
        assert_eq!(phi_s(&f), r(5));
    }

    #[test]
    fn closed_indicator_keeps_point_values() {
        let f = StepFn::indicator(&Interval::closed(0, 1), r(1)).unwrap();
        assert_eq!(f.breakpoints(), &[r(0), r(1)]);
        assert_eq!(f.point_values(), &[r(1), r(1)]);
        assert_eq!(phi_s(&f), r(1));
    }

    #[test]
    fn zero_is_canonical_empty() {
        let f = StepFn::make(&[(Interval::closed(0, 1), r(0))], &[]).unwrap();
        assert!(f.is_zero());
        assert_eq!(phi_s(&f), r(0));
    }

    #[test]
    fn conflicting_points() {
        assert!(matches!(
            StepFn::make(&[], &[(r(1), r(1)), (r(1), r(2))]),
            Err(StepError::ConflictingPoint { .. })
        ));
    }

    #[test]
    fn meet_of_overlapping_indicators() {
        let f = StepFn::indicator(&Interval::closed(0, 2), r(1)).unwrap();
        let g = StepFn::indicator(&Interval::closed(1, 3), r(2)).unwrap();
        assert_eq!(f.meet(&g), StepFn::indicator(&Interval::closed(1, 2), r(1)).unwrap());
    }

    #[test]
    fn add_inverse_is_zero() {
        let f = StepFn::indicator(&Interval::closed_open(0, 3), Rational::new(7, 2)).unwrap();
        assert!(f.add(&f.scale(&r(-1))).is_zero());
    }

    #[test]
    fn abs_difference_has_a_zero_at_the_shared_endpoint() {
        let f = StepFn::indicator(&Interval::closed(0, 1), r(1)).unwrap();
        let g = StepFn::indicator(&Interval::closed(1, 2), r(1)).unwrap();
        let h = f.sub(&g).abs();
        assert_eq!(h.breakpoints(), &[r(0), r(1), r(2)]);
        assert_eq!(h.open_values(), &[r(1), r(1)]);
        assert_eq!(h.point_values(), &[r(1), r(0), r(1)]);
    }

    #[test]
    fn json_round_trip() {
        let f = StepFn::make(&[(Interval::open(0, 1), r(2))], &[(r(5), r(1))]).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        let back = StepFn::from_json(&text).unwrap();
        assert_eq!(back, f);
        assert!(StepFn::from_json(r#"{"breakpoints":["0"],"open_values":["1"],"point_values":["0"]}"#).is_err());
    }
}
