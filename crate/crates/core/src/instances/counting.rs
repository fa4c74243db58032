//! Finite subsets of `{1..n}` and the counting measure.

use rand::{Rng, RngCore};

use crate::lattice::Lattice;
use crate::valuation::Valuation;

/// Subsets of `{1..n}`, `n ≤ 64`, as bitmasks (bit `k-1` is element `k`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiniteSubsets {
    pub n: u32,
}

impl FiniteSubsets {
    pub fn new(n: u32) -> Self {
        assert!((1..=64).contains(&n));
        FiniteSubsets { n }
    }

    fn full(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    pub fn from_elements(&self, xs: &[u32]) -> u64 {
        xs.iter().fold(0, |acc, &x| {
            assert!((1..=self.n).contains(&x), "{x} outside 1..={}", self.n);
            acc | 1 << (x - 1)
        })
    }

    pub fn elements(&self, a: u64) -> Vec<u32> {
        (1..=self.n).filter(|k| a >> (k - 1) & 1 == 1).collect()
    }
}

impl Lattice for FiniteSubsets {
    type Elem = u64;

    fn meet(&self, a: &u64, b: &u64) -> u64 {
        a & b
    }
    fn join(&self, a: &u64, b: &u64) -> u64 {
        a | b
    }
    fn leq(&self, a: &u64, b: &u64) -> bool {
        a & !b == 0
    }
    fn contains(&self, a: &u64) -> bool {
        a & !self.full() == 0
    }
    fn sample(&self, rng: &mut dyn RngCore) -> Option<u64> {
        Some(rng.gen::<u64>() & self.full())
    }
}

/// `A ↦ #A`.
#[derive(Debug, Clone, Copy)]
pub struct Counting {
    pub lattice: FiniteSubsets,
}

impl Counting {
    pub fn new(n: u32) -> Self {
        Counting {
            lattice: FiniteSubsets::new(n),
        }
    }
}

impl Valuation for Counting {
    type L = FiniteSubsets;
    type V = i64;

    fn lattice(&self) -> &FiniteSubsets {
        &self.lattice
    }
    fn eval(&self, a: &u64) -> i64 {
        i64::from(a.count_ones())
    }
    fn name(&self) -> std::borrow::Cow<'_, str> {
        "counting".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elements_round_trip() {
        let l = FiniteSubsets::new(20);
        let a = l.from_elements(&[1, 5, 20]);
        assert_eq!(l.elements(a), vec![1, 5, 20]);
        assert_eq!(Counting::new(20).eval(&a), 3);
        assert!(!l.contains(&(1 << 20)));
    }
}
