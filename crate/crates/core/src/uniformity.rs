//! Fitting uniformities, lower density, the constructive approximation of a
//! decreasing sequence from a dense sublattice, and weak `φ`-convergence.
//!
//! The canonical instance is the dyadic uniformity on ℚ:
//! `s εᵢ t ⟺ s ≤ t ∧ t − s ≤ 2^-i`, with `εᵢ ∧ εⱼ = ε_max(i,j)` and
//! halving `i ↦ i + 1`.

use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::instances::interval::{Interval, IntervalSet};
use crate::lattice::Lattice;
use crate::rational::Rational;
use crate::report::CheckReport;
use crate::sequences::{Direction, Modulus, MonoSeq, PiElem, Producer, SeqError};
use crate::valuation::{dist, Elem, Valuation, ValuationError};

/// Indices `i ≥ 1` past which separation is not searched.
pub const SEPARATION_BOUND: u32 = 64;

/// An indexed family of relations on ℚ with meet and halving maps.
pub trait FittingUniformity {
    fn holds(&self, i: u32, s: &Rational, t: &Rational) -> bool;
    fn meet_index(&self, i: u32, j: u32) -> u32;
    fn half_index(&self, i: u32) -> u32;
    fn name(&self) -> &str;
}

/// `s ≤ t ≤ s + 2^-i`.
pub fn dyadic_holds(i: u32, s: &Rational, t: &Rational) -> bool {
    s <= t && t - s <= Rational::dyadic(i)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Dyadic;

impl FittingUniformity for Dyadic {
    fn holds(&self, i: u32, s: &Rational, t: &Rational) -> bool {
        dyadic_holds(i, s, t)
    }
    fn meet_index(&self, i: u32, j: u32) -> u32 {
        i.max(j)
    }
    fn half_index(&self, i: u32) -> u32 {
        i + 1
    }
    fn name(&self) -> &str {
        "dyadic"
    }
}

/// The dyadic relations with `half_index = identity`, which breaks halving.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IdentityHalf;

impl FittingUniformity for IdentityHalf {
    fn holds(&self, i: u32, s: &Rational, t: &Rational) -> bool {
        dyadic_holds(i, s, t)
    }
    fn meet_index(&self, i: u32, j: u32) -> u32 {
        i.max(j)
    }
    fn half_index(&self, i: u32) -> u32 {
        i
    }
    fn name(&self) -> &str {
        "identity-half"
    }
}

/// A finite monotone sequence of group elements with its exact limit, used
/// to exercise the limit properties. It must be long enough to come within
/// `2^-max_index` of the limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitSample {
    pub terms: Vec<Rational>,
    pub limit: Rational,
}

fn sample_rational(rng: &mut dyn RngCore) -> Rational {
    Rational::new(rng.gen_range(-200..=200), rng.gen_range(1..=16))
}

/// Nonnegative offsets clustered around the dyadic thresholds.
fn sample_offset(rng: &mut dyn RngCore, max_index: u32) -> Rational {
    match rng.gen_range(0..4) {
        0 => Rational::zero(),
        1 => sample_rational(rng).abs(),
        _ => {
            let e = rng.gen_range(0..=max_index + 1);
            Rational::new(rng.gen_range(0..=4), 1) * Rational::dyadic(e)
        }
    }
}

/// Tests properties i–v and viii–ix on `samples` random triples plus the
/// boundary triples `(0, 2^-i, 2^-i+1)`, and vi/vii/x/xi on `limits`.
///
/// Indices are drawn from `1..=max_index`.
pub fn uniformity_check<U: FittingUniformity>(
    u: &U,
    samples: u64,
    seed: u64,
    max_index: u32,
    limits: &[LimitSample],
) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport::new();
    let mut triples: Vec<(Rational, Rational, Rational, u32, u32)> = (1..=max_index)
        .map(|i| {
            let h = Rational::dyadic(u.half_index(i));
            (Rational::zero(), h.clone(), &h + &h, i, i)
        })
        .collect();
    for _ in 0..samples {
        let r = sample_rational(&mut rng);
        let s = &r + sample_offset(&mut rng, max_index);
        let t = &s + sample_offset(&mut rng, max_index);
        let i = rng.gen_range(1..=max_index);
        let j = rng.gen_range(1..=max_index);
        let mut v = [r, s, t];
        if rng.gen_ratio(1, 4) {
            v.swap(rng.gen_range(0..3), rng.gen_range(0..3));
        }
        let [r, s, t] = v;
        triples.push((r, s, t, i, j));
    }
    for (r, s, t, i, j) in &triples {
        let (i, j) = (*i, *j);
        let wit = || format!("i={i}, j={j}, r={r}, s={s}, t={t}");
        report.record("i_reflexive", u.holds(i, s, s), wit);
        let m = u.meet_index(i, j);
        report.record(
            "ii_meet",
            !u.holds(m, s, t) || (u.holds(i, s, t) && u.holds(j, s, t)),
            wit,
        );
        let h = u.half_index(i);
        report.record(
            "iii_half",
            !(u.holds(h, r, s) && u.holds(h, s, t)) || u.holds(i, r, t),
            wit,
        );
        let mut sorted = [r.clone(), s.clone(), t.clone()];
        sorted.sort();
        let [a, b, c] = &sorted;
        report.record(
            "iv_order",
            !u.holds(i, a, c) || (u.holds(i, a, b) && u.holds(i, b, c)),
            wit,
        );
        if s < t {
            report.record(
                "v_separation",
                (1..=SEPARATION_BOUND).any(|k| !u.holds(k, s, t)),
                wit,
            );
        }
        report.record(
            "viii_translation",
            !u.holds(i, s, t) || u.holds(i, &(r + s), &(r + t)),
            wit,
        );
        report.record(
            "ix_negation",
            !u.holds(i, s, t) || u.holds(i, &-t, &-s),
            wit,
        );
    }
    for (k, ls) in limits.iter().enumerate() {
        check_limit_sample(u, ls, k, max_index, &mut report);
    }
    report
}

fn check_limit_sample<U: FittingUniformity>(
    u: &U,
    ls: &LimitSample,
    k: usize,
    max_index: u32,
    report: &mut CheckReport,
) {
    let decreasing = ls.terms.windows(2).all(|w| w[1] <= w[0]);
    let (conv, bound) = if decreasing {
        ("vi_inf_convergence", "vii_bounded_inf")
    } else {
        ("x_sup_convergence", "xi_bounded_sup")
    };
    let rel = |i: u32, a: &Rational, b: &Rational| {
        if decreasing {
            u.holds(i, b, a)
        } else {
            u.holds(i, a, b)
        }
    };
    for i in 1..=max_index {
        let found = ls.terms.iter().any(|s| rel(i, s, &ls.limit));
        report.record(conv, found, || format!("sample {k}, index {i}"));
        // Once a term is εᵢ-close to the limit, so is the rest of the tail.
        if let Some(n) = ls.terms.iter().position(|s| rel(i, s, &ls.limit)) {
            let bounded = ls.terms.iter().all(|s| {
                if decreasing {
                    ls.limit <= *s
                } else {
                    *s <= ls.limit
                }
            });
            let tail = ls.terms[n..].iter().all(|s| rel(i, s, &ls.limit));
            report.record(bound, bounded && tail, || {
                format!("sample {k}, index {i}, stage {}", n + 1)
            });
        }
    }
}

/// A lower-dense sublattice `K` given by a witness map.
pub trait DenseOracle<E> {
    /// Some `ℓ ∈ K` with `ℓ ≤ a` and `φ(ℓ) εᵢ φ(a)`.
    fn witness(&self, a: &E, i: u32) -> E;
    fn in_k(&self, e: &E) -> bool;
    fn name(&self) -> &str;
}

/// Dyadic-endpoint interval sets inside rational-endpoint ones.
///
/// Each piece is shrunk to a closed interval with endpoints on the grid
/// `2^-m ℤ`, `m = i + ⌈log₂(2·pieces)⌉`, stepping strictly inward at open
/// ends. Each piece loses at most `2·2^-m`, so the total loss is `≤ 2^-i`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DyadicEndpoints;

fn is_dyadic(x: &Rational) -> bool {
    let d = x.denom();
    (d & (d - num::BigInt::from(1))) == num::BigInt::from(0)
}

fn grid_up(x: &Rational, m: u32, strict: bool) -> Rational {
    let scale = Rational::from(num::BigInt::from(1) << m);
    let mut k = (x * &scale).ceil();
    if strict && Rational::from(k.clone()) == x * &scale {
        k += 1;
    }
    Rational::from(k) / scale
}

fn grid_down(x: &Rational, m: u32, strict: bool) -> Rational {
    let scale = Rational::from(num::BigInt::from(1) << m);
    let mut k = (x * &scale).floor();
    if strict && Rational::from(k.clone()) == x * &scale {
        k -= 1;
    }
    Rational::from(k) / scale
}

impl DenseOracle<IntervalSet> for DyadicEndpoints {
    fn witness(&self, a: &IntervalSet, i: u32) -> IntervalSet {
        let pieces = a.pieces().len().max(1) as u64;
        let m = i + (64 - (2 * pieces - 1).leading_zeros());
        let inner = a.pieces().iter().filter_map(|p| {
            let lo = grid_up(&p.lo, m, !p.lo_closed);
            let hi = grid_down(&p.hi, m, !p.hi_closed);
            (lo <= hi).then(|| Interval::closed(lo, hi))
        });
        IntervalSet::make(inner).expect("lo <= hi")
    }
    fn in_k(&self, e: &IntervalSet) -> bool {
        e.pieces().iter().all(|p| is_dyadic(&p.lo) && is_dyadic(&p.hi))
    }
    fn name(&self) -> &str {
        "dyadic-endpoints"
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DenseStage {
    pub stage: u64,
    pub phi_a: Rational,
    pub phi_atilde: Rational,
    pub bound: Rational,
}

pub struct DenseApprox<E> {
    pub stages: Vec<DenseStage>,
    pub seq: MonoSeq<E>,
    pub report: CheckReport,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DenseError {
    #[error("oracle witness at stage {stage} violates its contract: {detail}")]
    ContractViolation { stage: u64, detail: String },
    #[error(transparent)]
    Seq(#[from] SeqError),
}

/// `ζₖ = eps_index + k + 2`.
pub fn zeta(eps_index: u32, k: u64) -> u32 {
    eps_index + k as u32 + 2
}

/// `Σ_{k≤n} 2^-ζₖ`, always below `2^-(eps_index+2)`.
pub fn telescoped_bound(eps_index: u32, n: u64) -> Rational {
    (1..=n).map(|k| Rational::dyadic(zeta(eps_index, k))).sum()
}

/// Approximates a decreasing convergent sequence from below by one in `K`:
/// `ℓₙ` is the oracle witness for `aₙ` at `ζₙ`, and `ãₙ = ℓ₁ ∧ ⋯ ∧ ℓₙ`.
///
/// Every stage up to `depth` is verified: `ãₙ ∈ K`, `ãₙ ≤ aₙ`, `ãₙ ≤ ãₙ₋₁`
/// and `φ(aₙ) − φ(ãₙ) ≤ Σ_{k≤n} 2^-ζₖ < 2^-(eps_index+1)`.
pub fn dense_approximate<P, O>(
    phi: &P,
    oracle: O,
    x: &PiElem<Elem<P>>,
    eps_index: u32,
    depth: u64,
) -> Result<DenseApprox<Elem<P>>, DenseError>
where
    P: Valuation<V = Rational>,
    P::L: Clone + Send + Sync + 'static,
    Elem<P>: Send + Sync + 'static,
    O: DenseOracle<Elem<P>> + Clone + Send + Sync + 'static,
{
    let l = phi.lattice();
    let seq = x.seq();
    let mut report = CheckReport::new();
    let mut stages = Vec::new();
    let mut prev: Option<Elem<P>> = None;
    let cap = Rational::dyadic(eps_index + 1);
    for n in 1..=depth.max(1) {
        let a = seq.at(n);
        let z = zeta(eps_index, n);
        let ell = oracle.witness(&a, z);
        let (va, vl) = (phi.eval(&a), phi.eval(&ell));
        if !l.leq(&ell, &a) || !dyadic_holds(z, &vl, &va) || !oracle.in_k(&ell) {
            return Err(DenseError::ContractViolation {
                stage: n,
                detail: format!("a = {a:?}, ℓ = {ell:?}, ζ = {z}"),
            });
        }
        let at = match &prev {
            None => ell,
            Some(p) => l.meet(p, &ell),
        };
        let vt = phi.eval(&at);
        let bound = telescoped_bound(eps_index, n);
        let wit = || format!("stage {n}");
        report.record("in_k", oracle.in_k(&at), wit);
        report.record("below_input", l.leq(&at, &a), wit);
        if let Some(p) = &prev {
            report.record("decreasing", l.leq(&at, p), wit);
        }
        let gap = &va - &vt;
        report.record("within_bound", !gap.is_negative() && gap <= bound, || {
            format!("stage {n}: φ(a) − φ(ã) = {gap} > {bound}")
        });
        report.record("bound_below_cap", bound < cap, wit);
        stages.push(DenseStage {
            stage: n,
            phi_a: va,
            phi_atilde: vt,
            bound,
        });
        prev = Some(at);
    }

    let lat = l.clone();
    let src = seq.producer();
    let orc = oracle.clone();
    let producer: Producer<Elem<P>> = Arc::new(move |n| {
        let n = n.max(1);
        let mut acc = orc.witness(&src(1), zeta(eps_index, 1));
        for k in 2..=n {
            acc = lat.meet(&acc, &orc.witness(&src(k), zeta(eps_index, k)));
        }
        acc
    });
    let inner = seq.clone();
    let modulus: Modulus = Arc::new(move |eps| {
        let half = eps / Rational::integer(2);
        let tail = (1u64..)
            .find(|&n| Rational::dyadic(zeta(eps_index, n)) <= half)
            .expect("dyadics reach every positive rational");
        inner.modulus(&half).max(tail)
    });
    let out = crate::sequences::seq_make(phi, Direction::Decreasing, producer, modulus, depth.min(8))?;
    Ok(DenseApprox {
        stages,
        seq: out,
        report,
    })
}

/// Checks `0 εᵢ d(aₙ, target)` for every `i ≤ max_index` with
/// `rate(i) ≤ depth` and every `rate(i) ≤ n ≤ depth`.
pub fn weak_conv_check<P>(
    phi: &P,
    seq: &dyn Fn(u64) -> Elem<P>,
    target: &Elem<P>,
    rate: &dyn Fn(u32) -> u64,
    depth: u64,
    max_index: u32,
) -> Result<CheckReport, ValuationError>
where
    P: Valuation<V = Rational>,
{
    let mut report = CheckReport::new();
    report.touch("weak_convergence");
    let zero = Rational::zero();
    for i in 1..=max_index {
        let start = rate(i).max(1);
        if start > depth {
            continue;
        }
        for n in start..=depth {
            let d = dist(phi, &seq(n), target)?;
            report.record("weak_convergence", dyadic_holds(i, &zero, &d), || {
                format!("i={i}, n={n}, d={d}")
            });
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Subsequence {
    pub indices: Vec<u64>,
    pub distances: Vec<Rational>,
    pub partial_sums: Vec<Rational>,
    /// `Σ_{k≤K} 2^-(k+1)`.
    pub majorant: Rational,
    pub report: CheckReport,
}

/// `jₖ = rate(k+1)`, forced strictly increasing by `jₖ ≥ jₖ₋₁ + 1`, for
/// `k = 1..=terms`, with partial sums of `d(target, a_{jₖ})`.
pub fn extract_subsequence<P>(
    phi: &P,
    seq: &dyn Fn(u64) -> Elem<P>,
    target: &Elem<P>,
    rate: &dyn Fn(u32) -> u64,
    terms: u32,
) -> Result<Subsequence, ValuationError>
where
    P: Valuation<V = Rational>,
{
    let mut report = CheckReport::new();
    let mut indices: Vec<u64> = Vec::new();
    let mut distances = Vec::new();
    let mut partial_sums: Vec<Rational> = Vec::new();
    let mut sum = Rational::zero();
    let zero = Rational::zero();
    for k in 1..=terms {
        let j = rate(k + 1).max(indices.last().map_or(1, |p| p + 1));
        let d = dist(phi, target, &seq(j))?;
        report.record("distance_within_rate", dyadic_holds(k + 1, &zero, &d), || {
            format!("k={k}, j={j}, d={d}")
        });
        sum += &d;
        indices.push(j);
        distances.push(d);
        partial_sums.push(sum.clone());
    }
    let majorant: Rational = (1..=terms).map(|k| Rational::dyadic(k + 1)).sum();
    for (k, w) in partial_sums.windows(2).enumerate() {
        report.record("partial_sums_monotone", w[0] <= w[1], || format!("k={}", k + 2));
    }
    let last = partial_sums.last().cloned().unwrap_or_default();
    report.record("bounded_by_majorant", last <= majorant, || {
        format!("{last} > {majorant}")
    });
    report.record("bounded_by_one", last <= Rational::one(), || format!("{last}"));
    Ok(Subsequence {
        indices,
        distances,
        partial_sums,
        majorant,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::interval::IntervalMeasure;
    use crate::instances::step::{StepFn, StepIntegral};
    use crate::sequences::seq_make;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn dyadic_examples() {
        assert!(dyadic_holds(3, &r(0, 1), &r(1, 8)));
        assert!(!dyadic_holds(3, &r(0, 1), &r(1, 7)));
        assert!(dyadic_holds(9, &r(5, 3), &r(5, 3)));
        assert!(!dyadic_holds(1, &r(1, 1), &r(0, 1)));
    }

    #[test]
    fn dyadic_passes_and_broken_half_fails() {
        let limits = vec![
            LimitSample {
                terms: (0..=20).map(Rational::dyadic).collect(),
                limit: Rational::zero(),
            },
            LimitSample {
                terms: (0..=20).map(|n| Rational::one() - Rational::dyadic(n)).collect(),
                limit: Rational::one(),
            },
        ];
        let ok = uniformity_check(&Dyadic, 2000, 7, 12, &limits);
        assert!(ok.all_pass(), "{ok}");
        let bad = uniformity_check(&IdentityHalf, 2000, 7, 12, &[]);
        assert!(bad.failed("iii_half"));
        assert!(bad.get("iii_half").unwrap().counterexample.is_some());
    }

    #[test]
    fn dyadic_oracle_under_approximates() {
        let a = IntervalSet::make([Interval::open(r(1, 3), r(5, 3)), Interval::closed(2, r(7, 3))]).unwrap();
        for i in 1..10 {
            let l = DyadicEndpoints.witness(&a, i);
            assert!(l.is_subset(&a));
            assert!(DyadicEndpoints.in_k(&l));
            assert!(dyadic_holds(i, &l.measure(), &a.measure()));
        }
        let b = IntervalSet::open(0, 1);
        assert!(DyadicEndpoints.witness(&b, 3).is_subset(&b));
    }

    #[test]
    fn dense_approximation_of_shrinking_intervals() {
        let phi = IntervalMeasure::default();
        let seq = seq_make(
            &phi,
            Direction::Decreasing,
            Arc::new(|n| IntervalSet::closed(0, Rational::one() + r(1, n as i64))),
            Arc::new(|eps: &Rational| eps.recip().ceil().try_into().unwrap_or(u64::MAX)),
            10,
        )
        .unwrap();
        let x = PiElem::new(seq).unwrap();
        let out = dense_approximate(&phi, DyadicEndpoints, &x, 4, 12).unwrap();
        assert!(out.report.all_pass(), "{}", out.report);
        let last = out.stages.last().unwrap();
        assert!(&last.phi_a - &last.phi_atilde <= r(1, 16));
    }

    #[test]
    fn weak_convergence_of_moving_bumps() {
        let phi = StepIntegral::default();
        let f = |n: u64| {
            StepFn::indicator(&Interval::closed(n as i64, n as i64 + 1), r(1, n as i64)).unwrap()
        };
        let zero = StepFn::zero();
        let good = weak_conv_check(&phi, &f, &zero, &|i| 1 << i, 64, 6).unwrap();
        assert!(good.all_pass());
        let bad = weak_conv_check(&phi, &f, &zero, &|_| 1, 8, 3).unwrap();
        assert_eq!(
            bad.get("weak_convergence").unwrap().counterexample.as_deref(),
            Some("i=1, n=1, d=1")
        );
        let sub = extract_subsequence(&phi, &f, &zero, &|i| 1 << i, 6).unwrap();
        assert_eq!(sub.indices, vec![4, 8, 16, 32, 64, 128]);
        assert!(sub.report.all_pass());
    }
}
