//! Euler's totient on the divisibility lattice of the positive integers.
//!
//! Meet is `gcd`, join is `lcm`. The totient is a valuation into the
//! positive rationals under multiplication ordered by divisibility
//! ([`DivPos`]): modularity reads `φ(gcd)·φ(lcm) = φ(m)·φ(n)` and order
//! preservation is `m | n ⟹ φ(m) | φ(n)`.

use num::integer::Integer;
use rand::{Rng, RngCore};

use crate::lattice::Lattice;
use crate::oag::{factorize, DivPos};
use crate::valuation::Valuation;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("totient is undefined at 0")]
pub struct ZeroArgument;

/// Count of `1 ≤ x ≤ n` coprime to `n`, from the factorization of `n`.
pub fn totient(n: u64) -> Result<u64, ZeroArgument> {
    if n == 0 {
        return Err(ZeroArgument);
    }
    Ok(factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1)))
}

/// The totient as a factorization, so products never overflow.
pub fn totient_div(n: u64) -> Result<DivPos, ZeroArgument> {
    if n == 0 {
        return Err(ZeroArgument);
    }
    let mut exps: Vec<(u64, i64)> = Vec::new();
    for (p, e) in factorize(n) {
        if e > 1 {
            exps.push((p, i64::from(e) - 1));
        }
        for (q, f) in factorize(p - 1) {
            exps.push((q, i64::from(f)));
        }
    }
    Ok(DivPos::from_exponents(exps))
}

/// Positive integers under `gcd` and `lcm`; samples are drawn from `1..=max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DivLattice {
    pub max: u64,
}

impl DivLattice {
    pub fn new(max: u64) -> Self {
        assert!(max >= 1);
        DivLattice { max }
    }
}

impl Lattice for DivLattice {
    type Elem = u64;

    fn meet(&self, a: &u64, b: &u64) -> u64 {
        a.gcd(b)
    }
    fn join(&self, a: &u64, b: &u64) -> u64 {
        a.lcm(b)
    }
    fn leq(&self, a: &u64, b: &u64) -> bool {
        b.is_multiple_of(a)
    }
    fn contains(&self, a: &u64) -> bool {
        *a >= 1
    }
    fn sample(&self, rng: &mut dyn RngCore) -> Option<u64> {
        Some(rng.gen_range(1..=self.max))
    }
}

/// The totient valuation `DivLattice → ℚ°`.
#[derive(Debug, Clone, Copy)]
pub struct TotientValuation {
    pub lattice: DivLattice,
}

impl TotientValuation {
    pub fn new(max: u64) -> Self {
        TotientValuation {
            lattice: DivLattice::new(max),
        }
    }
}

impl Valuation for TotientValuation {
    type L = DivLattice;
    type V = DivPos;

    fn lattice(&self) -> &DivLattice {
        &self.lattice
    }
    fn eval(&self, n: &u64) -> DivPos {
        totient_div(*n).expect("lattice elements are positive")
    }
    fn name(&self) -> std::borrow::Cow<'_, str> {
        "totient".into()
    }
}

/// Checks `φ(gcd{m,n})·φ(lcm{m,n}) = φ(m)·φ(n)` for every `1 ≤ m, n ≤ max`
/// in integer arithmetic. Returns the first failing pair.
pub fn totient_identity_exhaustive(max: u64) -> Result<u64, (u64, u64)> {
    let phi: Vec<u64> = (0..=max)
        .map(|n| if n == 0 { 0 } else { totient(n).unwrap() })
        .collect();
    let mut checked = 0;
    for m in 1..=max {
        for n in 1..=max {
            let g = m.gcd(&n);
            let l = m / g * n;
            let lhs = u128::from(phi[g as usize]) * u128::from(totient(l).unwrap());
            if lhs != u128::from(phi[m as usize]) * u128::from(phi[n as usize]) {
                return Err((m, n));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coprime_count(n: u64) -> u64 {
        (1..=n).filter(|x| x.gcd(&n) == 1).count() as u64
    }

    #[test]
    fn small_values() {
        assert_eq!(totient(12), Ok(4));
        assert_eq!(totient(1), Ok(1));
        assert_eq!(totient(0), Err(ZeroArgument));
        for p in [2u64, 3, 5, 7, 97, 499] {
            assert_eq!(totient(p), Ok(p - 1));
        }
    }

    #[test]
    fn matches_coprime_count() {
        for n in 1..=300 {
            assert_eq!(totient(n).unwrap(), coprime_count(n), "n = {n}");
            assert_eq!(totient_div(n).unwrap().to_u64(), Some(coprime_count(n)));
        }
    }

    #[test]
    fn divisibility_lattice_ops() {
        let l = DivLattice::new(100);
        assert_eq!(l.meet(&4, &6), 2);
        assert_eq!(l.join(&4, &6), 12);
        assert!(l.leq(&3, &12));
        assert!(!l.contains(&0));
    }
}
