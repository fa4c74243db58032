//! Lattices: the [`Lattice`] trait, explicit finite lattices, and the
//! opposite and product constructions.

use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::rational::Rational;
use crate::report::CheckReport;

/// Finite lattices larger than this must compute meet/join algorithmically.
pub const FINITE_LATTICE_CAP: usize = 64;

/// A lattice given by its meet and join.
///
/// Implementations answer `meet`/`join`/`leq` deterministically. `contains`
/// lets a lattice reject foreign elements; `sample` is the instance's random
/// generator used by property checks (lattices without one return `None`).
pub trait Lattice {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn meet(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn join(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.meet(a, b) == *a
    }

    fn contains(&self, _a: &Self::Elem) -> bool {
        true
    }

    fn sample(&self, _rng: &mut dyn RngCore) -> Option<Self::Elem> {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("not a partial order: {0} <= {1} and {1} <= {0} but they differ")]
    NotPartialOrder(String, String),
    #[error("not a lattice: {a} and {b} have no {missing}")]
    NotALattice {
        a: String,
        b: String,
        missing: &'static str,
    },
    #[error("unknown element label {0:?}")]
    UnknownLabel(String),
    #[error("duplicate element label {0:?}")]
    DuplicateLabel(String),
    #[error("finite lattice has {0} elements, cap is {FINITE_LATTICE_CAP}")]
    TooLarge(usize),
    #[error("element {0} is not in the lattice")]
    ForeignElement(String),
}

/// An explicit finite lattice with precomputed meet and join tables.
/// Elements are indices into `carrier`.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteLattice {
    carrier: Vec<String>,
    leq: Vec<Vec<bool>>,
    meet: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
}

impl fmt::Debug for FiniteLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteLattice")
            .field("carrier", &self.carrier)
            .finish()
    }
}

/// JSON form: `{"carrier": [...], "leq": [[a, b], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiniteLatticeDoc {
    pub carrier: Vec<String>,
    pub leq: Vec<(String, String)>,
}

impl FiniteLattice {
    /// Builds a lattice from labels and generating `a <= b` pairs. The
    /// reflexive-transitive closure is taken; antisymmetry and the existence
    /// of every glb/lub are then checked.
    pub fn build(carrier: Vec<String>, leq_pairs: &[(usize, usize)]) -> Result<Self, LatticeError> {
        let n = carrier.len();
        if n > FINITE_LATTICE_CAP {
            return Err(LatticeError::TooLarge(n));
        }
        for (i, label) in carrier.iter().enumerate() {
            if carrier[..i].contains(label) {
                return Err(LatticeError::DuplicateLabel(label.clone()));
            }
        }
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in leq_pairs {
            leq[a][b] = true;
        }
        #[allow(clippy::needless_range_loop)]
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i][j] && leq[j][i] {
                    return Err(LatticeError::NotPartialOrder(
                        carrier[i].clone(),
                        carrier[j].clone(),
                    ));
                }
            }
        }
        let bound = |a: usize, b: usize, lower: bool| -> Option<usize> {
            let rel = |x: usize, y: usize| if lower { leq[x][y] } else { leq[y][x] };
            let bounds: Vec<usize> = (0..n).filter(|&z| rel(z, a) && rel(z, b)).collect();
            bounds
                .iter()
                .copied()
                .find(|&z| bounds.iter().all(|&w| rel(w, z)))
        };
        let mut meet = vec![vec![0; n]; n];
        let mut join = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                meet[a][b] = bound(a, b, true).ok_or_else(|| LatticeError::NotALattice {
                    a: carrier[a].clone(),
                    b: carrier[b].clone(),
                    missing: "greatest lower bound",
                })?;
                join[a][b] = bound(a, b, false).ok_or_else(|| LatticeError::NotALattice {
                    a: carrier[a].clone(),
                    b: carrier[b].clone(),
                    missing: "least upper bound",
                })?;
            }
        }
        Ok(FiniteLattice {
            carrier,
            leq,
            meet,
            join,
        })
    }

    pub fn from_labels(carrier: &[&str], leq_pairs: &[(&str, &str)]) -> Result<Self, LatticeError> {
        let carrier: Vec<String> = carrier.iter().map(|s| s.to_string()).collect();
        let pairs = leq_pairs
            .iter()
            .map(|(a, b)| {
                let ia = index_of(&carrier, a)?;
                let ib = index_of(&carrier, b)?;
                Ok((ia, ib))
            })
            .collect::<Result<Vec<_>, LatticeError>>()?;
        FiniteLattice::build(carrier, &pairs)
    }

    pub fn from_doc(doc: &FiniteLatticeDoc) -> Result<Self, LatticeError> {
        let pairs: Vec<(&str, &str)> = doc
            .leq
            .iter()
            .map(|(a, b)| (a.as_str(), b.as_str()))
            .collect();
        let labels: Vec<&str> = doc.carrier.iter().map(|s| s.as_str()).collect();
        FiniteLattice::from_labels(&labels, &pairs)
    }

    pub fn from_json(text: &str) -> Result<Self, FiniteLatticeLoadError> {
        let doc: FiniteLatticeDoc = serde_json::from_str(text)?;
        Ok(FiniteLattice::from_doc(&doc)?)
    }

    /// Covering pairs of the order, as a document.
    pub fn to_doc(&self) -> FiniteLatticeDoc {
        let mut leq = Vec::new();
        for a in 0..self.len() {
            for b in 0..self.len() {
                if a != b && self.leq[a][b] {
                    leq.push((self.carrier[a].clone(), self.carrier[b].clone()));
                }
            }
        }
        FiniteLatticeDoc {
            carrier: self.carrier.clone(),
            leq,
        }
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn label(&self, a: usize) -> &str {
        &self.carrier[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.carrier
    }

    pub fn index(&self, label: &str) -> Result<usize, LatticeError> {
        index_of(&self.carrier, label)
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    /// The chain `0 < 1 < … < n-1`.
    pub fn chain(n: usize) -> Self {
        let carrier: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let pairs: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        FiniteLattice::build(carrier, &pairs).expect("chains are lattices")
    }

    /// Subsets of `{1..k}` ordered by inclusion; element `i` is the bitmask `i`.
    pub fn powerset(k: usize) -> Self {
        let n = 1usize << k;
        let carrier: Vec<String> = (0..n).map(|m| subset_label(m, k)).collect();
        let mut pairs = Vec::new();
        for a in 0..n {
            for bit in 0..k {
                if a & (1 << bit) == 0 {
                    pairs.push((a, a | (1 << bit)));
                }
            }
        }
        FiniteLattice::build(carrier, &pairs).expect("powersets are lattices")
    }

    /// The diamond `M3`: `0 < a, b, c < 1` with `a, b, c` pairwise incomparable.
    pub fn m3() -> Self {
        FiniteLattice::from_labels(
            &["0", "a", "b", "c", "1"],
            &[
                ("0", "a"),
                ("0", "b"),
                ("0", "c"),
                ("a", "1"),
                ("b", "1"),
                ("c", "1"),
            ],
        )
        .expect("M3 is a lattice")
    }

    /// The pentagon `N5`: `0 < a < b < 1` and `0 < c < 1`.
    pub fn n5() -> Self {
        FiniteLattice::from_labels(
            &["0", "a", "b", "c", "1"],
            &[("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "1")],
        )
        .expect("N5 is a lattice")
    }

    pub fn bottom(&self) -> usize {
        (0..self.len())
            .find(|&z| (0..self.len()).all(|w| self.leq[z][w]))
            .expect("finite lattices have a bottom")
    }

    pub fn top(&self) -> usize {
        (0..self.len())
            .find(|&z| (0..self.len()).all(|w| self.leq[w][z]))
            .expect("finite lattices have a top")
    }
}

fn subset_label(mask: usize, k: usize) -> String {
    let items: Vec<String> = (0..k)
        .filter(|b| mask & (1 << b) != 0)
        .map(|b| (b + 1).to_string())
        .collect();
    format!("{{{}}}", items.join(","))
}

fn index_of(carrier: &[String], label: &str) -> Result<usize, LatticeError> {
    carrier
        .iter()
        .position(|c| c == label)
        .ok_or_else(|| LatticeError::UnknownLabel(label.to_string()))
}

#[derive(Debug, thiserror::Error)]
pub enum FiniteLatticeLoadError {
    #[error("malformed lattice document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

impl Lattice for FiniteLattice {
    type Elem = usize;

    fn meet(&self, a: &usize, b: &usize) -> usize {
        self.meet[*a][*b]
    }
    fn join(&self, a: &usize, b: &usize) -> usize {
        self.join[*a][*b]
    }
    fn leq(&self, a: &usize, b: &usize) -> bool {
        self.leq[*a][*b]
    }
    fn contains(&self, a: &usize) -> bool {
        *a < self.len()
    }
    fn sample(&self, rng: &mut dyn RngCore) -> Option<usize> {
        (!self.is_empty()).then(|| rng.gen_range(0..self.len()))
    }
}

/// The order-reversed lattice: meet and join swap, `leq` flips.
#[derive(Debug, Clone, PartialEq)]
pub struct Opposite<L>(pub L);

impl<L: Lattice> Lattice for Opposite<L> {
    type Elem = L::Elem;

    fn meet(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.0.join(a, b)
    }
    fn join(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.0.meet(a, b)
    }
    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.0.leq(b, a)
    }
    fn contains(&self, a: &Self::Elem) -> bool {
        self.0.contains(a)
    }
    fn sample(&self, rng: &mut dyn RngCore) -> Option<Self::Elem> {
        self.0.sample(rng)
    }
}

/// The product lattice with the componentwise order.
#[derive(Debug, Clone, PartialEq)]
pub struct Product<A, B>(pub A, pub B);

impl<A: Lattice, B: Lattice> Lattice for Product<A, B> {
    type Elem = (A::Elem, B::Elem);

    fn meet(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        (self.0.meet(&a.0, &b.0), self.1.meet(&a.1, &b.1))
    }
    fn join(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        (self.0.join(&a.0, &b.0), self.1.join(&a.1, &b.1))
    }
    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.0.leq(&a.0, &b.0) && self.1.leq(&a.1, &b.1)
    }
    fn contains(&self, a: &Self::Elem) -> bool {
        self.0.contains(&a.0) && self.1.contains(&a.1)
    }
    fn sample(&self, rng: &mut dyn RngCore) -> Option<Self::Elem> {
        Some((self.0.sample(rng)?, self.1.sample(rng)?))
    }
}

/// The rationals as a chain.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RationalChain;

impl Lattice for RationalChain {
    type Elem = Rational;

    fn meet(&self, a: &Rational, b: &Rational) -> Rational {
        a.clone().min(b.clone())
    }
    fn join(&self, a: &Rational, b: &Rational) -> Rational {
        a.clone().max(b.clone())
    }
    fn leq(&self, a: &Rational, b: &Rational) -> bool {
        a <= b
    }
    fn sample(&self, rng: &mut dyn RngCore) -> Option<Rational> {
        Some(Rational::new(rng.gen_range(-100..=100), rng.gen_range(1..=12)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeOpKind {
    Meet,
    Join,
    Leq,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LatticeOpResult<E> {
    Elem(E),
    Bool(bool),
}

/// One lattice operation with a membership check on both operands.
pub fn lattice_op<L: Lattice>(
    l: &L,
    kind: LatticeOpKind,
    a: &L::Elem,
    b: &L::Elem,
) -> Result<LatticeOpResult<L::Elem>, LatticeError> {
    for x in [a, b] {
        if !l.contains(x) {
            return Err(LatticeError::ForeignElement(format!("{x:?}")));
        }
    }
    Ok(match kind {
        LatticeOpKind::Meet => LatticeOpResult::Elem(l.meet(a, b)),
        LatticeOpKind::Join => LatticeOpResult::Elem(l.join(a, b)),
        LatticeOpKind::Leq => LatticeOpResult::Bool(l.leq(a, b)),
    })
}

/// Decides distributivity of a finite lattice by scanning every triple.
///
/// On failure returns the lexicographically first `(a, b, c)` with
/// `a ∧ (b ∨ c) != (a ∧ b) ∨ (a ∧ c)`. For finite lattices this is also
/// σ-distributivity, since countable meets and joins reduce to finite ones.
pub fn check_distributive(l: &FiniteLattice) -> Result<(), (usize, usize, usize)> {
    for a in l.elements() {
        for b in l.elements() {
            for c in l.elements() {
                let lhs = l.meet(&a, &l.join(&b, &c));
                let rhs = l.join(&l.meet(&a, &b), &l.meet(&a, &c));
                if lhs != rhs {
                    return Err((a, b, c));
                }
            }
        }
    }
    Ok(())
}

/// Sampled lattice laws: absorption, commutativity, idempotence and the
/// agreement of `leq` with meet and join.
pub fn check_lattice_laws<L: Lattice>(
    l: &L,
    samples: u64,
    seed: u64,
) -> Result<CheckReport, crate::valuation::ValuationError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport::new();
    for _ in 0..samples {
        let a = l
            .sample(&mut rng)
            .ok_or(crate::valuation::ValuationError::NoGenerator)?;
        let b = l
            .sample(&mut rng)
            .ok_or(crate::valuation::ValuationError::NoGenerator)?;
        let wit = || format!("a={a:?}, b={b:?}");
        report.record(
            "absorption",
            l.meet(&a, &l.join(&a, &b)) == a && l.join(&a, &l.meet(&a, &b)) == a,
            wit,
        );
        report.record(
            "commutativity",
            l.meet(&a, &b) == l.meet(&b, &a) && l.join(&a, &b) == l.join(&b, &a),
            wit,
        );
        report.record(
            "idempotence",
            l.meet(&a, &a) == a && l.join(&a, &a) == a,
            wit,
        );
        report.record(
            "order_agrees",
            l.leq(&a, &b) == (l.meet(&a, &b) == a) && l.leq(&a, &b) == (l.join(&a, &b) == b),
            wit,
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_chain_tables() {
        let c = FiniteLattice::chain(2);
        assert_eq!(c.meet(&0, &1), 0);
        assert_eq!(c.join(&0, &1), 1);
        assert!(check_distributive(&c).is_ok());
    }

    #[test]
    fn m3_is_a_non_distributive_lattice() {
        let m3 = FiniteLattice::m3();
        let a = m3.index("a").unwrap();
        let b = m3.index("b").unwrap();
        let c = m3.index("c").unwrap();
        let top = m3.index("1").unwrap();
        assert_eq!(m3.join(&a, &b), top);
        assert_eq!(check_distributive(&m3), Err((a, b, c)));
    }

    #[test]
    fn n5_is_non_distributive() {
        assert!(check_distributive(&FiniteLattice::n5()).is_err());
    }

    #[test]
    fn exhaustive_glb_lub_in_m3() {
        // Independent check straight from the order relation.
        let m3 = FiniteLattice::m3();
        for x in m3.elements() {
            for y in m3.elements() {
                let m = m3.meet(&x, &y);
                assert!(m3.leq(&m, &x) && m3.leq(&m, &y));
                for z in m3.elements() {
                    if m3.leq(&z, &x) && m3.leq(&z, &y) {
                        assert!(m3.leq(&z, &m));
                    }
                }
            }
        }
    }

    #[test]
    fn missing_bound_is_reported() {
        let err = FiniteLattice::from_labels(&["a", "b"], &[]).unwrap_err();
        assert!(matches!(err, LatticeError::NotALattice { .. }));
    }

    #[test]
    fn cycle_is_not_a_partial_order() {
        let err = FiniteLattice::from_labels(&["a", "b"], &[("a", "b"), ("b", "a")]).unwrap_err();
        assert!(matches!(err, LatticeError::NotPartialOrder(..)));
    }

    #[test]
    fn powerset_is_distributive() {
        assert!(check_distributive(&FiniteLattice::powerset(2)).is_ok());
        assert!(check_distributive(&FiniteLattice::powerset(3)).is_ok());
    }

    #[test]
    fn chains_are_distributive() {
        for n in 1..8 {
            assert!(check_distributive(&FiniteLattice::chain(n)).is_ok());
        }
    }

    #[test]
    fn opposite_swaps() {
        let op = Opposite(FiniteLattice::chain(2));
        assert_eq!(op.meet(&0, &1), 1);
        assert!(op.leq(&1, &0));
        let back = Opposite(op.clone());
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(back.meet(&a, &b), FiniteLattice::chain(2).meet(&a, &b));
            }
        }
    }

    #[test]
    fn rational_chain_meet() {
        let r = lattice_op(
            &RationalChain,
            LatticeOpKind::Meet,
            &Rational::integer(3),
            &Rational::integer(5),
        )
        .unwrap();
        assert_eq!(r, LatticeOpResult::Elem(Rational::integer(3)));
    }

    #[test]
    fn foreign_element_rejected() {
        let c = FiniteLattice::chain(2);
        assert!(matches!(
            lattice_op(&c, LatticeOpKind::Join, &0, &7),
            Err(LatticeError::ForeignElement(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"carrier":["0","a","b","1"],"leq":[["0","a"],["0","b"],["a","1"],["b","1"]]}"#;
        let l = FiniteLattice::from_json(text).unwrap();
        assert_eq!(l.len(), 4);
        let again = FiniteLattice::from_doc(&l.to_doc()).unwrap();
        assert_eq!(again, l);
    }

    #[test]
    fn too_large_is_rejected() {
        let carrier: Vec<String> = (0..65).map(|i| i.to_string()).collect();
        assert!(matches!(
            FiniteLattice::build(carrier, &[]),
            Err(LatticeError::TooLarge(65))
        ));
    }

    #[test]
    fn product_and_opposite_laws() {
        let p = Product(FiniteLattice::m3(), Opposite(FiniteLattice::chain(3)));
        let r = check_lattice_laws(&p, 300, 1).unwrap();
        assert!(r.all_pass(), "{r}");
        assert!(p.leq(&(0, 2), &(4, 0)));
        assert!(!p.leq(&(0, 0), &(4, 2)));
    }
}
