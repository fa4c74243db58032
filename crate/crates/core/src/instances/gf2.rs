//! Subspaces of `GF(2)ⁿ` and the dimension valuation.
//!
//! Vectors are bit patterns. Bases are kept in reduced row echelon form with
//! the pivot at the highest set bit and rows in decreasing order, so equal
//! subspaces have identical bases.

use std::fmt;

use rand::{Rng, RngCore};

use crate::lattice::Lattice;
use crate::valuation::Valuation;

pub const GF2_MAX_DIM: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gf2Subspace {
    n: u32,
    basis: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Gf2Error {
    #[error("ambient dimensions differ: {0} vs {1}")]
    AmbientMismatch(u32, u32),
    #[error("ambient dimension {0} outside 1..={GF2_MAX_DIM}")]
    BadAmbient(u32),
    #[error("vector {vector:#b} does not fit in dimension {n}")]
    VectorTooWide { vector: u64, n: u32 },
}

/// Reduced row echelon form, pivot = highest bit, rows descending.
fn rref(mut rows: Vec<u64>) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for mut v in rows.drain(..) {
        for &r in &out {
            if v ^ r < v {
                v ^= r;
            }
        }
        if v != 0 {
            let pivot = 63 - v.leading_zeros();
            for r in out.iter_mut() {
                if *r >> pivot & 1 == 1 {
                    *r ^= v;
                }
            }
            out.push(v);
            out.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    out
}

impl Gf2Subspace {
    pub fn span(n: u32, vectors: &[u64]) -> Result<Self, Gf2Error> {
        if !(1..=GF2_MAX_DIM).contains(&n) {
            return Err(Gf2Error::BadAmbient(n));
        }
        if let Some(&v) = vectors.iter().find(|&&v| v >> n != 0) {
            return Err(Gf2Error::VectorTooWide { vector: v, n });
        }
        Ok(Gf2Subspace {
            n,
            basis: rref(vectors.to_vec()).into_iter().map(|v| v as u32).collect(),
        })
    }

    pub fn zero(n: u32) -> Self {
        Gf2Subspace::span(n, &[]).expect("valid ambient")
    }

    /// The unit vector `e_k` (1-based) is bit `k-1`.
    pub fn unit(k: u32) -> u64 {
        1 << (k - 1)
    }

    pub fn ambient(&self) -> u32 {
        self.n
    }

    pub fn basis(&self) -> &[u32] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains_vector(&self, v: u64) -> bool {
        let mut v = v;
        for &r in &self.basis {
            if v ^ u64::from(r) < v {
                v ^= u64::from(r);
            }
        }
        v == 0
    }

    fn same_ambient(&self, other: &Self) -> Result<(), Gf2Error> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Gf2Error::AmbientMismatch(self.n, other.n))
        }
    }

    /// `U + W`: row reduce the stacked bases.
    pub fn join(&self, other: &Self) -> Result<Self, Gf2Error> {
        self.same_ambient(other)?;
        let rows: Vec<u64> = self
            .basis
            .iter()
            .chain(&other.basis)
            .map(|&r| u64::from(r))
            .collect();
        Gf2Subspace::span(self.n, &rows)
    }

    /// `U ∩ W` by the Zassenhaus method: reduce the rows `(u | u)` and
    /// `(w | 0)`; the rows whose left half vanishes span the intersection.
    pub fn meet(&self, other: &Self) -> Result<Self, Gf2Error> {
        self.same_ambient(other)?;
        let n = self.n;
        let rows: Vec<u64> = self
            .basis
            .iter()
            .map(|&u| u64::from(u) << n | u64::from(u))
            .chain(other.basis.iter().map(|&w| u64::from(w) << n))
            .collect();
        let low: Vec<u64> = rref(rows)
            .into_iter()
            .filter(|r| r >> n == 0)
            .collect();
        Gf2Subspace::span(n, &low)
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.n == other.n
            && self
                .basis
                .iter()
                .all(|&v| other.contains_vector(u64::from(v)))
    }

    /// Every vector of the subspace. Exponential; test use only.
    pub fn vectors(&self) -> Vec<u64> {
        let k = self.basis.len();
        (0u64..1 << k)
            .map(|mask| {
                (0..k)
                    .filter(|&i| mask >> i & 1 == 1)
                    .fold(0, |acc, i| acc ^ u64::from(self.basis[i]))
            })
            .collect()
    }
}

impl fmt::Display for Gf2Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{{")?;
        for (i, v) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v:0width$b}", width = self.n as usize)?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gf2OpKind {
    Meet,
    Join,
    Dim,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gf2OpResult {
    Space(Gf2Subspace),
    Dim(usize),
}

pub fn gf2_op(
    kind: Gf2OpKind,
    u: &Gf2Subspace,
    w: Option<&Gf2Subspace>,
) -> Result<Gf2OpResult, Gf2Error> {
    let other = || w.unwrap_or(u);
    Ok(match kind {
        Gf2OpKind::Dim => Gf2OpResult::Dim(u.dim()),
        Gf2OpKind::Meet => Gf2OpResult::Space(u.meet(other())?),
        Gf2OpKind::Join => Gf2OpResult::Space(u.join(other())?),
    })
}

/// Subspaces of a fixed `GF(2)ⁿ`. Samples are spans of up to `n` random vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gf2Lattice {
    pub n: u32,
}

impl Lattice for Gf2Lattice {
    type Elem = Gf2Subspace;

    fn meet(&self, a: &Gf2Subspace, b: &Gf2Subspace) -> Gf2Subspace {
        a.meet(b).expect("same ambient")
    }
    fn join(&self, a: &Gf2Subspace, b: &Gf2Subspace) -> Gf2Subspace {
        a.join(b).expect("same ambient")
    }
    fn leq(&self, a: &Gf2Subspace, b: &Gf2Subspace) -> bool {
        a.is_subspace_of(b)
    }
    fn contains(&self, a: &Gf2Subspace) -> bool {
        a.n == self.n
    }
    fn sample(&self, rng: &mut dyn RngCore) -> Option<Gf2Subspace> {
        let k = rng.gen_range(0..=self.n);
        let vs: Vec<u64> = (0..k).map(|_| rng.gen_range(0..1u64 << self.n)).collect();
        Some(Gf2Subspace::span(self.n, &vs).expect("in range"))
    }
}

/// `U ↦ dim U`.
#[derive(Debug, Clone, Copy)]
pub struct Dimension {
    pub lattice: Gf2Lattice,
}

impl Dimension {
    pub fn new(n: u32) -> Self {
        Dimension {
            lattice: Gf2Lattice { n },
        }
    }
}

impl Valuation for Dimension {
    type L = Gf2Lattice;
    type V = i64;

    fn lattice(&self) -> &Gf2Lattice {
        &self.lattice
    }
    fn eval(&self, a: &Gf2Subspace) -> i64 {
        a.dim() as i64
    }
    fn name(&self) -> std::borrow::Cow<'_, str> {
        "dim".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(k: u32) -> u64 {
        Gf2Subspace::unit(k)
    }

    #[test]
    fn dims_and_join() {
        let a = Gf2Subspace::span(3, &[e(1)]).unwrap();
        let b = Gf2Subspace::span(3, &[e(2)]).unwrap();
        assert_eq!(a.dim(), 1);
        let j = a.join(&b).unwrap();
        assert_eq!(j, Gf2Subspace::span(3, &[e(1), e(2)]).unwrap());
        assert_eq!(j.dim(), 2);
    }

    #[test]
    fn meet_of_coordinate_planes() {
        let a = Gf2Subspace::span(3, &[e(1), e(2)]).unwrap();
        let b = Gf2Subspace::span(3, &[e(2), e(3)]).unwrap();
        assert_eq!(a.meet(&b).unwrap(), Gf2Subspace::span(3, &[e(2)]).unwrap());
    }

    #[test]
    fn ambient_mismatch() {
        let a = Gf2Subspace::zero(3);
        let b = Gf2Subspace::zero(4);
        assert_eq!(a.meet(&b), Err(Gf2Error::AmbientMismatch(3, 4)));
    }

    #[test]
    fn rref_is_canonical() {
        let a = Gf2Subspace::span(4, &[0b1100, 0b0110]).unwrap();
        let b = Gf2Subspace::span(4, &[0b1010, 0b0110, 0b1100]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn non_distributive_plane() {
        let v1 = Gf2Subspace::span(2, &[0b01]).unwrap();
        let v2 = Gf2Subspace::span(2, &[0b10]).unwrap();
        let w = Gf2Subspace::span(2, &[0b11]).unwrap();
        let lhs = w.meet(&v1.join(&v2).unwrap()).unwrap();
        let rhs = w.meet(&v1).unwrap().join(&w.meet(&v2).unwrap()).unwrap();
        assert_eq!(lhs, w);
        assert_eq!(rhs, Gf2Subspace::zero(2));
    }
}
