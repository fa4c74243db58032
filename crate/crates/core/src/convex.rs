//! Convexity of valuation systems and the convexification `L•`.
//!
//! `z ∈ L•` iff some `a, b ∈ L` satisfy `a ≤ z ≤ b` and `φ(a) = φ(b)`, and
//! then `φ•(z) = φ(a)`. On infinite ambient lattices only witness-based
//! evaluation is offered; finite systems are convexified exhaustively.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lattice::{FiniteLattice, Lattice, LatticeError};
use crate::oag::OrderedGroup;
use crate::report::CheckReport;
use crate::valuation::{check_valuation_exhaustive, Elem, TableValuation, Valuation};

/// `lower ≤ target ≤ upper` with `lower, upper ∈ L` and equal values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SandwichWitness<E> {
    pub lower: E,
    pub upper: E,
    pub target: E,
}

impl<E> SandwichWitness<E> {
    pub fn new(lower: E, target: E, upper: E) -> Self {
        SandwichWitness {
            lower,
            upper,
            target,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConvexError {
    #[error("lower bound is not in the sublattice")]
    LowerNotInL,
    #[error("upper bound is not in the sublattice")]
    UpperNotInL,
    #[error("lower bound is not below the target")]
    LowerNotBelow,
    #[error("target is not below the upper bound")]
    UpperNotAbove,
    #[error("bound values differ: φ(lower) = {lower}, φ(upper) = {upper}")]
    ValuesDiffer { lower: String, upper: String },
    #[error("member list is empty")]
    Empty,
    #[error("member index {0} is outside the ambient lattice")]
    UnknownMember(usize),
    #[error("one value per member is required: {members} members, {values} values")]
    Length { members: usize, values: usize },
    #[error("members are not a sublattice: {op} of {a} and {b} is missing")]
    NotSublattice {
        op: &'static str,
        a: String,
        b: String,
    },
    #[error("witnesses disagree on {target}: {first} gives {first_value}, {second} gives {second_value}")]
    WitnessDisagreement {
        target: String,
        first: String,
        first_value: String,
        second: String,
        second_value: String,
    },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// `φ•(z)` from a checked witness. `ambient` orders `V ⊇ L`.
pub fn convex_value<P, A>(
    phi: &P,
    ambient: &A,
    w: &SandwichWitness<Elem<P>>,
) -> Result<P::V, ConvexError>
where
    P: Valuation,
    A: Lattice<Elem = Elem<P>>,
{
    let l = phi.lattice();
    if !l.contains(&w.lower) {
        return Err(ConvexError::LowerNotInL);
    }
    if !l.contains(&w.upper) {
        return Err(ConvexError::UpperNotInL);
    }
    if !ambient.leq(&w.lower, &w.target) {
        return Err(ConvexError::LowerNotBelow);
    }
    if !ambient.leq(&w.target, &w.upper) {
        return Err(ConvexError::UpperNotAbove);
    }
    let (lo, hi) = (phi.eval(&w.lower), phi.eval(&w.upper));
    if lo != hi {
        return Err(ConvexError::ValuesDiffer {
            lower: format!("{lo:?}"),
            upper: format!("{hi:?}"),
        });
    }
    Ok(lo)
}

/// A sublattice `L` of a finite ambient lattice with a value table.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSystem<V> {
    pub ambient: FiniteLattice,
    /// Sorted ambient indices of the members of `L`.
    pub members: Vec<usize>,
    pub values: Vec<V>,
}

impl<V: OrderedGroup> FiniteSystem<V> {
    /// Validates indices and closure under the ambient meet and join.
    pub fn new(ambient: FiniteLattice, members: Vec<usize>, values: Vec<V>) -> Result<Self, ConvexError> {
        if members.is_empty() {
            return Err(ConvexError::Empty);
        }
        if members.len() != values.len() {
            return Err(ConvexError::Length {
                members: members.len(),
                values: values.len(),
            });
        }
        if let Some(&bad) = members.iter().find(|&&m| m >= ambient.len()) {
            return Err(ConvexError::UnknownMember(bad));
        }
        let mut pairs: Vec<(usize, V)> = members.into_iter().zip(values).collect();
        pairs.sort_by_key(|p| p.0);
        pairs.dedup_by_key(|p| p.0);
        let (members, values): (Vec<usize>, Vec<V>) = pairs.into_iter().unzip();
        let sys = FiniteSystem {
            ambient,
            members,
            values,
        };
        sys.check_sublattice()?;
        Ok(sys)
    }

    /// Labels name members of the ambient lattice.
    pub fn from_labels(ambient: FiniteLattice, entries: &[(&str, V)]) -> Result<Self, ConvexError> {
        let mut members = Vec::new();
        let mut values = Vec::new();
        for (label, v) in entries {
            members.push(ambient.index(label)?);
            values.push(v.clone());
        }
        Self::new(ambient, members, values)
    }

    fn check_sublattice(&self) -> Result<(), ConvexError> {
        let v = &self.ambient;
        for &a in &self.members {
            for &b in &self.members {
                for (op, c) in [("meet", v.meet(&a, &b)), ("join", v.join(&a, &b))] {
                    if !self.contains(c) {
                        return Err(ConvexError::NotSublattice {
                            op,
                            a: v.label(a).to_string(),
                            b: v.label(b).to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, z: usize) -> bool {
        self.members.binary_search(&z).is_ok()
    }

    pub fn value(&self, z: usize) -> Option<&V> {
        self.members.binary_search(&z).ok().map(|i| &self.values[i])
    }

    pub fn labels(&self) -> Vec<&str> {
        self.members.iter().map(|&m| self.ambient.label(m)).collect()
    }

    /// `L` as a standalone lattice under the induced order.
    pub fn lattice(&self) -> Result<FiniteLattice, LatticeError> {
        let labels: Vec<String> = self.labels().into_iter().map(String::from).collect();
        let mut leq = Vec::new();
        for (i, &a) in self.members.iter().enumerate() {
            for (j, &b) in self.members.iter().enumerate() {
                if self.ambient.leq(&a, &b) {
                    leq.push((i, j));
                }
            }
        }
        FiniteLattice::build(labels, &leq)
    }

    pub fn valuation(&self) -> Result<TableValuation<V>, LatticeError> {
        Ok(TableValuation::new(self.lattice()?, self.values.clone()))
    }

    /// `a ≤ z ≤ b` with `a, b ∈ L` and `φ(a) = φ(b)` forces `z ∈ L`.
    pub fn is_convex(&self) -> Result<(), SandwichWitness<usize>> {
        let v = &self.ambient;
        for (i, &a) in self.members.iter().enumerate() {
            for (j, &b) in self.members.iter().enumerate() {
                if self.values[i] != self.values[j] || !v.leq(&a, &b) {
                    continue;
                }
                if let Some(z) = v.elements().find(|z| v.leq(&a, z) && v.leq(z, &b) && !self.contains(*z)) {
                    return Err(SandwichWitness::new(a, z, b));
                }
            }
        }
        Ok(())
    }
}

/// Result of exhaustive convexification.
#[derive(Debug, Clone)]
pub struct Convexified<V> {
    pub system: FiniteSystem<V>,
    /// One witness per member of `L•`, aligned with `system.members`.
    pub witnesses: Vec<SandwichWitness<usize>>,
    pub report: CheckReport,
}

fn sandwiches<V: OrderedGroup>(sys: &FiniteSystem<V>, z: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
    let v = &sys.ambient;
    sys.members.iter().enumerate().flat_map(move |(i, &a)| {
        sys.members.iter().enumerate().filter_map(move |(j, &b)| {
            (v.leq(&a, &z) && v.leq(&z, &b) && sys.values[i] == sys.values[j]).then_some((i, j))
        })
    })
}

/// Computes `L•` and `φ•` by exhaustive sandwich search, then verifies that
/// `φ•` extends `φ`, is a valuation on `L•`, and that `L•` is convex.
pub fn convexify_finite<V>(sys: &FiniteSystem<V>) -> Result<Convexified<V>, ConvexError>
where
    V: OrderedGroup,
{
    let v = &sys.ambient;
    let mut members = Vec::new();
    let mut values = Vec::new();
    let mut witnesses = Vec::new();
    for z in v.elements() {
        let mut found: Option<(usize, usize)> = None;
        for (i, j) in sandwiches(sys, z) {
            match found {
                None => found = Some((i, j)),
                Some((fi, _)) if sys.values[fi] != sys.values[i] => {
                    let show = |i: usize, j: usize| {
                        format!("{} ≤ · ≤ {}", v.label(sys.members[i]), v.label(sys.members[j]))
                    };
                    let (fi, fj) = found.expect("set");
                    return Err(ConvexError::WitnessDisagreement {
                        target: v.label(z).to_string(),
                        first: show(fi, fj),
                        first_value: format!("{:?}", sys.values[fi]),
                        second: show(i, j),
                        second_value: format!("{:?}", sys.values[i]),
                    });
                }
                Some(_) => {}
            }
        }
        if let Some((i, j)) = found {
            members.push(z);
            values.push(sys.values[i].clone());
            witnesses.push(SandwichWitness::new(sys.members[i], z, sys.members[j]));
        }
    }
    let out = FiniteSystem::new(v.clone(), members, values)?;

    let mut report = CheckReport::new();
    for (k, &m) in sys.members.iter().enumerate() {
        report.record("extends", out.value(m) == Some(&sys.values[k]), || v.label(m).to_string());
    }
    let table = out.valuation()?;
    report.merge("valuation", check_valuation_exhaustive(&table));
    report.record("convex", true, String::new);
    if let Err(w) = out.is_convex() {
        report.record("convex", false, || {
            format!("{} ≤ {} ≤ {}", v.label(w.lower), v.label(w.target), v.label(w.upper))
        });
    }
    Ok(Convexified {
        system: out,
        witnesses,
        report,
    })
}

/// Convexifies and then checks that a second pass changes nothing.
pub fn convexify_checked<V: OrderedGroup>(sys: &FiniteSystem<V>) -> Result<Convexified<V>, ConvexError> {
    let mut first = convexify_finite(sys)?;
    let second = convexify_finite(&first.system)?;
    first
        .report
        .record("idempotent", second.system == first.system, || first.system.to_string());
    Ok(first)
}

impl<V: fmt::Debug> fmt::Display for FiniteSystem<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .members
            .iter()
            .zip(&self.values)
            .map(|(&m, val)| format!("{} ↦ {:?}", self.ambient.label(m), val))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::interval::{Interval, IntervalMeasure, IntervalSet, IntervalSetLattice};
    use crate::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn interval_witness() {
        let phi = IntervalMeasure::default();
        let a = IntervalSet::closed(0, 1);
        let z = IntervalSet::make([Interval::closed(0, 1), Interval::point(r(3, 2))]).unwrap();
        let w = SandwichWitness::new(a.clone(), z.clone(), z.clone());
        assert_eq!(convex_value(&phi, &IntervalSetLattice::default(), &w).unwrap(), Rational::one());
        let same = SandwichWitness::new(a.clone(), a.clone(), a.clone());
        assert_eq!(convex_value(&phi, &IntervalSetLattice::default(), &same).unwrap(), Rational::one());
        let bad = SandwichWitness::new(a.clone(), a.clone(), IntervalSet::closed(0, 2));
        assert!(matches!(
            convex_value(&phi, &IntervalSetLattice::default(), &bad),
            Err(ConvexError::ValuesDiffer { .. })
        ));
        let above = SandwichWitness::new(z, a.clone(), a);
        assert_eq!(
            convex_value(&phi, &IntervalSetLattice::default(), &above),
            Err(ConvexError::LowerNotBelow)
        );
    }

    #[test]
    fn three_point_system_is_already_convex() {
        let v = FiniteLattice::powerset(3);
        let sys = FiniteSystem::from_labels(v, &[("{}", 0i64), ("{1}", 0), ("{1,2,3}", 1)]).unwrap();
        let out = convexify_checked(&sys).unwrap();
        assert_eq!(out.system, sys);
        assert!(out.report.all_pass(), "{}", out.report);
    }

    #[test]
    fn zero_valuation_fills_the_interval() {
        let v = FiniteLattice::powerset(2);
        let sys = FiniteSystem::from_labels(v.clone(), &[("{}", 0i64), ("{1,2}", 0)]).unwrap();
        let out = convexify_checked(&sys).unwrap();
        assert_eq!(out.system.members, v.elements().collect::<Vec<_>>());
        assert!(out.system.values.iter().all(|&x| x == 0));
        assert!(out.report.all_pass(), "{}", out.report);
    }

    #[test]
    fn injective_chain_is_unchanged() {
        let v = FiniteLattice::chain(5);
        let sys = FiniteSystem::new(v, (0..5).collect(), (0..5).map(|k| k as i64 * 3).collect()).unwrap();
        let out = convexify_checked(&sys).unwrap();
        assert_eq!(out.system, sys);
        assert!(out.witnesses.iter().all(|w| w.lower == w.target && w.target == w.upper));
    }

    #[test]
    fn non_sublattice_and_disagreement_rejected() {
        let v = FiniteLattice::powerset(2);
        assert!(matches!(
            FiniteSystem::from_labels(v.clone(), &[("{1}", 0i64), ("{2}", 0)]),
            Err(ConvexError::NotSublattice { .. })
        ));
        // Not monotone: ∅ ↦ 1, {1} ↦ 0, full ↦ 1 sandwiches {1} with value 1.
        let sys = FiniteSystem::from_labels(v, &[("{}", 1i64), ("{1}", 0), ("{1,2}", 1)]).unwrap();
        assert!(matches!(
            convexify_finite(&sys),
            Err(ConvexError::WitnessDisagreement { .. })
        ));
    }
}
