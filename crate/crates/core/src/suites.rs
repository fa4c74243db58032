//! Named, seeded property suites over the library's instances, plus the
//! random generators they share with the test targets.

use std::sync::Arc;

use num::BigUint;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::borel::{
    decode_set, pair, stump_alpha, stump_alpha_by_function, tuple_decode, tuple_encode, tuple_encode_u64, unpair,
    SetKind, Stump, TruncatedBaire,
};
use crate::convex::{convexify_checked, FiniteSystem};
use crate::fubini::{fubini_check, ProductMeasure, RectSampler};
use crate::instances::gf2::Gf2Lattice;
use crate::instances::interval::{with_null_point, IntervalMeasure, IntervalSet};
use crate::instances::number::{totient_identity_exhaustive, DivLattice, TotientValuation};
use crate::instances::step::{with_null_change, StepFn, StepIntegral};
use crate::instances::{Counting, Dimension, FiniteSubsets, Interval};
use crate::lattice::{check_distributive, check_lattice_laws, FiniteLattice, Lattice};
use crate::oag::{check_group_axioms, GroupKind};
use crate::rational::Rational;
use crate::report::CheckReport;
use crate::sequences::{
    pi_combine, pi_value, rational_sqrt2_scan, seq_make, sqrt2_error, sqrt2_witness, Combine, Direction, PiElem,
    SeqError,
};
use crate::uniformity::{
    dense_approximate, extract_subsequence, uniformity_check, weak_conv_check, DenseError, Dyadic, DyadicEndpoints,
    IdentityHalf, LimitSample,
};
use crate::valuation::{
    check_congruence, check_contraction, check_joint_contraction, check_modular_map_identity, check_pseudometric,
    check_valuation, check_valuation_exhaustive, is_hausdorff, quotient, FnValuation, TableValuation, Valuation,
    ValuationError,
};

/// Suite names accepted by [`run_suite`].
pub const SUITES: &[&str] = &[
    "modularity",
    "pseudometric",
    "contraction",
    "congruence",
    "totient",
    "fubini",
    "quotient",
    "pi-stage",
    "sqrt2",
    "uniformity",
    "density",
    "weak-conv",
    "borel",
    "convex",
    "groups",
    "lattices",
    "negative-controls",
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SuiteError {
    #[error("unknown suite {0:?}")]
    Unknown(String),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Dense(#[from] DenseError),
    #[error("{0}")]
    Other(String),
}

/// Runs one suite, or every suite for `"all"`.
pub fn run_suite(name: &str, samples: u64, seed: u64) -> Result<CheckReport, SuiteError> {
    let s = samples;
    match name {
        "all" => {
            let mut all = CheckReport::new();
            for n in SUITES {
                all.merge(n, run_suite(n, samples, seed)?);
            }
            Ok(all)
        }
        "modularity" => modularity(s, seed),
        "pseudometric" => pseudometric(s, seed),
        "contraction" => contraction(s, seed),
        "congruence" => congruence(s, seed),
        "totient" => totient(),
        "fubini" => Ok(fubini(s, seed, 20)),
        "quotient" => quotient_suite(s, seed),
        "pi-stage" => pi_stage(),
        "sqrt2" => Ok(sqrt2(40)),
        "uniformity" => Ok(uniformity(s, seed)),
        "density" => density(&[2, 4, 8], 30),
        "weak-conv" => weak_conv(20),
        "borel" => Ok(borel(s, seed, 100_000)),
        "convex" => convex(s, seed),
        "groups" => Ok(groups(s, seed)),
        "lattices" => lattices(s, seed),
        "negative-controls" => negative_controls(s, seed),
        other => Err(SuiteError::Unknown(other.to_string())),
    }
}

/// Modularity and monotonicity of every shipped instance.
pub fn modularity(samples: u64, seed: u64) -> Result<CheckReport, SuiteError> {
    let mut r = CheckReport::new();
    r.merge("mu_S", check_valuation(&IntervalMeasure::default(), samples, seed)?);
    r.merge("phi_S", check_valuation(&StepIntegral::default(), samples, seed)?);
    r.merge("counting", check_valuation(&Counting::new(32), samples, seed)?);
    r.merge("totient", check_valuation(&TotientValuation::new(500), samples, seed)?);
    r.merge("gf2_dim", check_valuation(&Dimension::new(8), samples, seed)?);
    r.merge("mu_XY", check_valuation(&ProductMeasure::default(), samples, seed)?);
    Ok(r)
}

pub fn pseudometric(samples: u64, seed: u64) -> Result<CheckReport, SuiteError> {
    let mut r = CheckReport::new();
    r.merge("mu_S", check_pseudometric(&IntervalMeasure::default(), samples, seed)?);
    r.merge("phi_S", check_pseudometric(&StepIntegral::default(), samples, seed)?);
    Ok(r)
}

/// Single and joint contraction of meet and join, and `φ(a) − φ(b)` against `d(a, b)`.
pub fn contraction(samples: u64, seed: u64) -> Result<CheckReport, SuiteError> {
    let mut r = CheckReport::new();
    let mu = IntervalMeasure::default();
    let phi = StepIntegral::default();
    r.merge("mu_S", check_contraction(&mu, samples, seed)?);
    r.merge("mu_S", check_joint_contraction(&mu, samples, seed)?);
    r.merge("mu_S", check_modular_map_identity(&mu, samples, seed)?);
    r.merge("phi_S", check_contraction(&phi, samples, seed)?);
    r.merge("phi_S", check_joint_contraction(&phi, samples, seed)?);
    r.merge("phi_S", check_modular_map_identity(&phi, samples, seed)?);
    Ok(r)
}

/// `≈` is a congruence: adding null sets or point changes preserves it.
pub fn congruence(samples: u64, seed: u64) -> Result<CheckReport, SuiteError> {
    let mut r = CheckReport::new();
    let mu = IntervalMeasure::default();
    let sampler = mu.lattice.sampler.clone();
    r.merge(
        "mu_S",
        check_congruence(&mu, |a: &IntervalSet, rng: &mut dyn RngCore| with_null_point(a, &sampler, rng), samples, seed)?,
    );
    let phi = StepIntegral::default();
    let ssampler = phi.lattice.sampler.clone();
    r.merge(
        "phi_S",
        check_congruence(&phi, |f: &StepFn, rng: &mut dyn RngCore| with_null_change(f, &ssampler, rng), samples, seed)?,
    );
    Ok(r)
}

/// `φ(gcd)·φ(lcm) = φ(m)·φ(n)` for all `1 ≤ m, n ≤ 500`.
pub fn totient() -> Result<CheckReport, SuiteError> {
    let mut r = CheckReport::new();
    match totient_identity_exhaustive(500) {
        Ok(n) => {
            r.record("totient_identity", n == 250_000, || format!("{n} cases"));
        }
        Err((m, n)) => r.record("totient_identity", false, || format!("m={m}, n={n}")),
    }
    Ok(r)
}

/// `functions` sampled 2-D step functions, each with `slices` random slices.
pub fn fubini(functions: u64, seed: u64, slices: usize) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampler = RectSampler::default();
    let mut r = CheckReport::new();
    for k in 0..functions {
        let f = sampler.sample(&mut rng);
        let out = fubini_check(&f, slices, seed.wrapping_add(k));
        for (name, tally) in out.report.properties {
            if let Some(w) = tally.counterexample {
                r.record(&name, false, || format!("function {k}: {w}"));
            } else {
                r.record(&name, tally.fail == 0, String::new);
            }
        }
    }
    r
}

fn grid_lattice(a: usize, b: usize) -> FiniteLattice {
    let labels: Vec<String> = (0..a).flat_map(|i| (0..b).map(move |j| format!("({i},{j})"))).collect();
    let mut covers = Vec::new();
    for i in 0..a {
        for j in 0..b {
            if i + 1 < a {
                covers.push((i * b + j, (i + 1) * b + j));
            }
            if j + 1 < b {
                covers.push((i * b + j, i * b + j + 1));
            }
        }
    }
    FiniteLattice::build(labels, &covers).expect("products of chains are lattices")
}

fn monotone_steps(rng: &mut dyn RngCore, n: usize) -> Vec<Rational> {
    let mut acc = Rational::zero();
    (0..n)
        .map(|k| {
            if k > 0 && rng.gen_bool(0.6) {
                acc += &Rational::new(rng.gen_range(1..=3), rng.gen_range(1..=2));
            }
            acc.clone()
        })
        .collect()
}

/// A random valuation on a lattice of at most 16 elements: a weighted
/// powerset, a chain with repeated values, or a grid with additive values.
/// Zero weights make `≈` nontrivial.
pub fn random_finite_system(rng: &mut dyn RngCore) -> TableValuation<Rational> {
    match rng.gen_range(0..3) {
        0 => {
            let k = rng.gen_range(1..=4);
            let l = FiniteLattice::powerset(k);
            let w: Vec<Rational> = (0..k).map(|_| Rational::integer(rng.gen_range(0..=2))).collect();
            let values = (0..l.len())
                .map(|m| (0..k).filter(|b| m & (1 << b) != 0).map(|b| w[b].clone()).sum())
                .collect();
            TableValuation::new(l, values)
        }
        1 => {
            let n = rng.gen_range(1..=16);
            TableValuation::new(FiniteLattice::chain(n), monotone_steps(rng, n))
        }
        _ => {
            let a = rng.gen_range(1..=4);
            let b = rng.gen_range(1..=4);
            let (f, g) = (monotone_steps(rng, a), monotone_steps(rng, b));
            let values = (0..a).flat_map(|i| (0..b).map(|j| &f[i] + &g[j]).collect::<Vec<_>>()).collect();
            TableValuation::new(grid_lattice(a, b), values)
        }
    }
}

/// `systems` random finite systems: the quotient is Hausdorff, its map is
/// a valuation, and the class map is a homomorphism preserving values.
pub fn quotient_suite(systems: u64, seed: u64) -> Result<CheckReport, SuiteError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = CheckReport::new();
    for k in 0..systems {
        let phi = random_finite_system(&mut rng);
        let q = quotient(&phi)?;
        r.record("hausdorff", is_hausdorff(&q.valuation), || format!("system {k}: {phi}"));
        let vr = check_valuation_exhaustive(&q.valuation);
        r.record("induced_valuation", vr.all_pass(), || format!("system {k}: {vr}"));
        let l = &phi.lattice;
        let ql = &q.lattice;
        let mut hom = true;
        for a in l.elements() {
            hom &= q.valuation.values[q.class_of[a]] == phi.values[a];
            for b in l.elements() {
                let (ca, cb) = (q.class_of[a], q.class_of[b]);
                hom &= q.class_of[l.meet(&a, &b)] == ql.meet(&ca, &cb);
                hom &= q.class_of[l.join(&a, &b)] == ql.join(&ca, &cb);
            }
        }
        r.record("class_map_homomorphism", hom, || format!("system {k}"));
    }
    Ok(r)
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn shrinking(a: Rational, b: Rational, c: Rational) -> Arc<dyn Fn(u64) -> IntervalSet + Send + Sync> {
    Arc::new(move |n| IntervalSet::closed(a.clone(), &b + &c / Rational::integer(n as i64)))
}

/// `Aₙ = [0, 1 + 1/n]` and its stagewise meets and joins with other
/// decreasing sequences.
pub fn pi_stage() -> Result<CheckReport, SuiteError> {
    let phi = IntervalMeasure::default();
    let mut rep = CheckReport::new();
    let tol = r(1, 1_000_000);
    let make = |p: Arc<dyn Fn(u64) -> IntervalSet + Send + Sync>, scale: i64| {
        let m: crate::sequences::Modulus = Arc::new(move |eps: &Rational| {
            (Rational::integer(scale) / eps).ceil().try_into().unwrap_or(u64::MAX).max(1)
        });
        seq_make(&phi, Direction::Decreasing, p, m, 50).and_then(PiElem::new)
    };
    let x = make(shrinking(Rational::zero(), Rational::one(), Rational::one()), 1)?;
    let v = pi_value(&x, &phi, &tol)?;
    rep.record("pi_value_within_tol", Rational::one() <= v && v <= Rational::one() + &tol, || v.to_string());
    let ys = [
        make(shrinking(r(1, 2), Rational::integer(2), Rational::one()), 1)?,
        make(
            Arc::new(|n| {
                IntervalSet::make([
                    Interval::closed(0, 1),
                    Interval::closed(Rational::integer(2), Rational::integer(2) + r(1, n as i64)),
                ])
                .expect("ordered")
            }),
            1,
        )?,
        make(shrinking(r(3, 4), r(3, 2), r(1, 2)), 1)?,
    ];
    for (k, y) in ys.iter().enumerate() {
        let m = pi_combine(Combine::Meet, &x, y, &phi)?;
        let j = pi_combine(Combine::Join, &x, y, &phi)?;
        for n in 1..=50 {
            let (a, b) = (x.seq().at(n), y.seq().at(n));
            let (mn, jn) = (m.seq().at(n), j.seq().at(n));
            let ok = phi.eval(&mn) + phi.eval(&jn) == phi.eval(&a) + phi.eval(&b)
                && mn == a.meet(&b)
                && jn == a.join(&b);
            rep.record("stagewise_modularity", ok, || format!("pair {k}, stage {n}"));
        }
        for (name, z) in [("meet", &m), ("join", &j)] {
            let (v1, v2) = (pi_value(z, &phi, &r(1, 100))?, pi_value(z, &phi, &r(1, 1000))?);
            let gap = (&v1 - &v2).abs();
            rep.record("pi_value_respects_modulus", gap <= r(11, 1000), || {
                format!("pair {k}, {name}: {v1} vs {v2}")
            });
        }
    }
    Ok(rep)
}

/// The `√2` witness at `depth` plus the rational scan around `q_depth`.
pub fn sqrt2(depth: u64) -> CheckReport {
    let trace = sqrt2_witness(depth);
    let mut rep = CheckReport::new();
    rep.merge("trace", trace.report.clone());
    let q = &trace.last().q;
    let err = sqrt2_error(q);
    rep.record("final_error_below_1e-10", err <= r(1, 10_000_000_000), || err.to_string());
    for s in &trace.stages {
        rep.record("union_measure_is_q", s.mu_union == s.q, || format!("stage {}", s.n));
    }
    let (candidates, hit) = rational_sqrt2_scan(q, 40, &r(1, 1_000_000));
    rep.record("no_rational_square_root", !hit, || format!("{candidates} candidates"));
    rep
}

/// Dyadic uniformity on random triples, and the broken halving map failing.
pub fn uniformity(samples: u64, seed: u64) -> CheckReport {
    let limits = [
        LimitSample {
            terms: (0..=20).map(Rational::dyadic).collect(),
            limit: Rational::zero(),
        },
        LimitSample {
            terms: (1..=20).map(|n| r(1, 3) - Rational::dyadic(n)).collect(),
            limit: r(1, 3),
        },
    ];
    let mut rep = uniformity_check(&Dyadic, samples, seed, 16, &limits);
    let bad = uniformity_check(&IdentityHalf, samples, seed, 16, &[]);
    let cx = bad.get("iii_half").and_then(|t| t.counterexample.clone());
    rep.record("broken_half_rejected", bad.failed("iii_half") && cx.is_some(), || {
        "identity halving passed".to_string()
    });
    rep
}

/// `[1/3, 4/3 + 1/(3n)] ∪ (2, 7/3 + 1/n)`, a decreasing sequence with
/// non-dyadic endpoints.
pub fn density_input() -> Arc<dyn Fn(u64) -> IntervalSet + Send + Sync> {
    Arc::new(|n| {
        let n = n as i64;
        IntervalSet::make([
            Interval::closed(r(1, 3), r(4, 3) + r(1, 3 * n)),
            Interval::open(Rational::integer(2), r(7, 3) + r(1, n)),
        ])
        .expect("ordered")
    })
}

/// Dense approximation at each `ε`-index, checking `φ(aₙ) − φ(ãₙ) ≤ 2^-(k+1)`.
pub fn density(indices: &[u32], depth: u64) -> Result<CheckReport, SuiteError> {
    let phi = IntervalMeasure::default();
    let seq = seq_make(
        &phi,
        Direction::Decreasing,
        density_input(),
        Arc::new(|eps: &Rational| (Rational::integer(2) / eps).ceil().try_into().unwrap_or(u64::MAX).max(1)),
        depth.min(30),
    )?;
    let x = PiElem::new(seq)?;
    let mut rep = CheckReport::new();
    for &k in indices {
        let out = dense_approximate(&phi, DyadicEndpoints, &x, k, depth)?;
        let cap = Rational::dyadic(k + 1);
        for s in &out.stages {
            let gap = &s.phi_a - &s.phi_atilde;
            rep.record("within_eps", !gap.is_negative() && gap <= cap, || {
                format!("k={k}, stage {}: {gap}", s.stage)
            });
        }
        rep.merge(&format!("k{k}"), out.report);
    }
    Ok(rep)
}

/// `fₙ = (1/n)·1_[n,n+1]` converges weakly to 0; the extracted subsequence
/// at rate `i ↦ 2^i` has partial distance sums at most 1/2.
pub fn weak_conv(terms: u32) -> Result<CheckReport, SuiteError> {
    let phi = StepIntegral::default();
    let f = |n: u64| {
        StepFn::indicator(&Interval::closed(n as i64, n as i64 + 1), Rational::new(1, n as i64)).expect("ordered")
    };
    let zero = StepFn::zero();
    let rate = |i: u32| 1u64 << i;
    let mut rep = weak_conv_check(&phi, &f, &zero, &rate, 256, 8)?;
    let bad = weak_conv_check(&phi, &f, &zero, &|_| 1, 8, 3)?;
    rep.record("slow_rate_rejected", bad.failed("weak_convergence"), String::new);
    let sub = extract_subsequence(&phi, &f, &zero, &rate, terms)?;
    for (k, (&j, d)) in sub.indices.iter().zip(&sub.distances).enumerate() {
        let k = k as u32 + 1;
        rep.record("index_is_power_of_two", j == 1u64 << (k + 1), || format!("k={k}, j={j}"));
        rep.record("distance_exact", *d == Rational::new(1, j as i64), || format!("k={k}, d={d}"));
    }
    let last = sub.partial_sums.last().cloned().unwrap_or_default();
    rep.record("sum_at_most_half", last <= r(1, 2), || last.to_string());
    rep.merge("subsequence", sub.report);
    Ok(rep)
}

/// A literal code `⟨tag m n⟩`; tags other than 1 and 2 decode to `∅`.
pub type RawLiteral = (u64, u64, u64);

/// A random union of intersections of literals; `m, n` range up to one past
/// the space so out-of-range basic sets appear.
pub fn random_dnf(rng: &mut dyn RngCore, space: &TruncatedBaire) -> Vec<Vec<RawLiteral>> {
    (0..rng.gen_range(0..=3))
        .map(|_| {
            (0..rng.gen_range(0..=3))
                .map(|_| {
                    let tag = if rng.gen_ratio(1, 10) { 3 } else { rng.gen_range(1..=2) };
                    (
                        tag,
                        rng.gen_range(1..=space.alphabet as u64 + 1),
                        rng.gen_range(1..=space.depth as u64 + 1),
                    )
                })
                .collect()
        })
        .collect()
}

pub fn encode_raw_dnf(terms: &[Vec<RawLiteral>]) -> BigUint {
    let caps: Vec<BigUint> = terms
        .iter()
        .map(|t| {
            let lits: Vec<BigUint> =
                t.iter().map(|&(a, m, n)| tuple_encode_u64(&[a, m, n]).expect("positive")).collect();
            tuple_encode(&lits).expect("positive")
        })
        .collect();
    tuple_encode(&caps).expect("positive")
}

/// Direct evaluation of a literal description at a point.
pub fn eval_raw_dnf(terms: &[Vec<RawLiteral>], point: &[u32]) -> bool {
    terms.iter().any(|t| {
        t.iter().all(|&(tag, m, n)| {
            let hit = (n as usize) <= point.len() && point[n as usize - 1] as u64 == m;
            match tag {
                1 => !hit,
                2 => hit,
                _ => false,
            }
        })
    })
}

/// Pairing round trips on `2..=max_code`, tuple round trips, decoding
/// against direct evaluation, and `α` against the function encoding.
pub fn borel(samples: u64, seed: u64, max_code: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = CheckReport::new();
    for k in 2..=max_code {
        let code = BigUint::from(k);
        let ok = unpair(&code).and_then(|(a, b)| pair(&a, &b)).map(|c| c == code);
        rep.record("unpair_then_pair", ok == Ok(true), || format!("k={k}"));
    }
    let side = ((max_code as f64).sqrt() as u64).max(2);
    for a in 1..=side / 2 {
        for b in 1..=side / 2 {
            let ok = pair(&BigUint::from(a), &BigUint::from(b))
                .and_then(|c| unpair(&c))
                .map(|p| p == (BigUint::from(a), BigUint::from(b)));
            rep.record("pair_then_unpair", ok == Ok(true), || format!("({a}, {b})"));
        }
    }
    for _ in 0..samples {
        let xs: Vec<u64> = (0..rng.gen_range(0..=6)).map(|_| rng.gen_range(1..=1000)).collect();
        let back = tuple_encode_u64(&xs).and_then(|c| tuple_decode(&c));
        let want: Vec<BigUint> = xs.iter().map(|&x| BigUint::from(x)).collect();
        rep.record("tuple_round_trip", back == Ok(want), || format!("{xs:?}"));
    }
    let space = TruncatedBaire::new(4, 4).expect("256 points");
    let points: Vec<Vec<u32>> = space.points().collect();
    for c in 0..samples.min(100) {
        let dnf = random_dnf(&mut rng, &space);
        let code = encode_raw_dnf(&dnf);
        let agree = points.iter().all(|p| {
            decode_set(&code, SetKind::A, &space, p).map(|m| m.member) == Ok(eval_raw_dnf(&dnf, p))
        });
        rep.record("decode_matches_brute_force", agree, || format!("code {c}: {dnf:?}"));
    }
    for k in 0..samples.min(50) {
        let s = Stump::random(&mut rng, 4, 3);
        let oracle = stump_alpha_by_function(&|c| s.as_function(c), 4);
        rep.record("alpha_matches_function_oracle", stump_alpha(&s) == oracle, || {
            format!("stump {k}: {}", serde_json::to_string(&s).unwrap_or_default())
        });
        let grown = grow(&s, &mut rng);
        rep.record("alpha_monotone_under_insertion", stump_alpha(&grown) >= stump_alpha(&s), || {
            format!("stump {k}")
        });
    }
    rep
}

/// Inserts one child somewhere in the stump.
fn grow(s: &Stump, rng: &mut dyn RngCore) -> Stump {
    match s {
        Stump::Leaf => Stump::node([Stump::Leaf]),
        Stump::Node(c) if c.is_empty() || rng.gen_bool(0.4) => {
            let mut c = c.clone();
            c.push(Stump::random(rng, 2, 2));
            Stump::Node(c)
        }
        Stump::Node(c) => {
            let mut c = c.clone();
            let i = rng.gen_range(0..c.len());
            c[i] = grow(&c[i], rng);
            Stump::Node(c)
        }
    }
}

/// A random sublattice of a powerset with a weighted-count valuation.
pub fn random_convex_system(rng: &mut dyn RngCore) -> FiniteSystem<Rational> {
    let k = rng.gen_range(1..=4);
    let v = FiniteLattice::powerset(k);
    let mut members: Vec<usize> = (0..rng.gen_range(1..=4)).map(|_| rng.gen_range(0..v.len())).collect();
    loop {
        let mut next = members.clone();
        for &a in &members {
            for &b in &members {
                next.push(v.meet(&a, &b));
                next.push(v.join(&a, &b));
            }
        }
        next.sort_unstable();
        next.dedup();
        if next == members {
            break;
        }
        members = next;
    }
    let w: Vec<Rational> = (0..k).map(|_| Rational::integer(rng.gen_range(0..=2))).collect();
    let values = members
        .iter()
        .map(|&m| (0..k).filter(|b| m & (1 << b) != 0).map(|b| w[b].clone()).sum())
        .collect();
    FiniteSystem::new(v, members, values).expect("closed under meet and join")
}

pub fn convex(systems: u64, seed: u64) -> Result<CheckReport, SuiteError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = CheckReport::new();
    for k in 0..systems.min(200) {
        let sys = random_convex_system(&mut rng);
        let out = convexify_checked(&sys).map_err(|e| SuiteError::Other(format!("system {k}: {e}")))?;
        for (name, t) in out.report.properties {
            rep.record(&name, t.fail == 0, || format!("system {k}: {}", t.counterexample.unwrap_or_default()));
        }
        let mono = out.system.members.iter().enumerate().all(|(i, a)| {
            out.system.members.iter().enumerate().all(|(j, b)| {
                !sys.ambient.leq(a, b) || out.system.values[i] <= out.system.values[j]
            })
        });
        rep.record("monotone", mono, || format!("system {k}"));
    }
    Ok(rep)
}

pub fn groups(samples: u64, seed: u64) -> CheckReport {
    let mut rep = CheckReport::new();
    for kind in ["rational", "lex", "divpos", "product(rational,lex)"] {
        let g: GroupKind = kind.parse().expect("known kind");
        rep.merge(kind, check_group_axioms(&g, samples, seed));
    }
    rep
}

pub fn lattices(samples: u64, seed: u64) -> Result<CheckReport, SuiteError> {
    let mut rep = CheckReport::new();
    rep.merge("intervals", check_lattice_laws(&IntervalMeasure::default().lattice, samples, seed)?);
    rep.merge("steps", check_lattice_laws(&StepIntegral::default().lattice, samples, seed)?);
    rep.merge("divisors", check_lattice_laws(&DivLattice::new(500), samples, seed)?);
    rep.merge("gf2", check_lattice_laws(&Gf2Lattice { n: 8 }, samples, seed)?);
    rep.merge("subsets", check_lattice_laws(&FiniteSubsets::new(32), samples, seed)?);
    rep.merge("rectangles", check_lattice_laws(&ProductMeasure::default().lattice, samples, seed)?);
    rep.record("powerset_distributive", check_distributive(&FiniteLattice::powerset(3)).is_ok(), String::new);
    rep.record("n5_not_distributive", check_distributive(&FiniteLattice::n5()).is_err(), String::new);
    Ok(rep)
}

/// Maps that must be rejected: `#A²` is not modular, `−#A` is not
/// monotone, and `M3` is not distributive.
pub fn negative_controls(samples: u64, seed: u64) -> Result<CheckReport, SuiteError> {
    let mut rep = CheckReport::new();
    let l = FiniteSubsets::new(8);
    let square = FnValuation::new("count_squared", l, |a: &u64| (a.count_ones() as i64).pow(2));
    let sq = check_valuation(&square, samples, seed)?;
    rep.record("square_count_not_modular", sq.failed("modularity") && has_cx(&sq, "modularity"), || sq.to_string());
    let neg = FnValuation::new("negative_count", l, |a: &u64| -(a.count_ones() as i64));
    let ng = check_valuation(&neg, samples, seed)?;
    rep.record("negative_count_not_monotone", ng.failed("monotonicity") && has_cx(&ng, "monotonicity"), || {
        ng.to_string()
    });
    let m3 = FiniteLattice::m3();
    let wit = check_distributive(&m3);
    rep.record(
        "m3_not_distributive",
        matches!(wit, Err((a, b, c)) if [a, b, c].iter().all(|&x| ["a", "b", "c"].contains(&m3.label(x)))),
        || format!("{wit:?}"),
    );
    Ok(rep)
}

fn has_cx(r: &CheckReport, name: &str) -> bool {
    r.get(name).is_some_and(|t| t.counterexample.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_small() {
        for name in SUITES {
            let samples = if *name == "borel" { 20 } else { 30 };
            let rep = match *name {
                "borel" => borel(samples, 3, 2000),
                "sqrt2" => sqrt2(12),
                "density" => density(&[2], 8).unwrap(),
                _ => run_suite(name, samples, 3).unwrap(),
            };
            assert!(rep.all_pass(), "{name}: {rep}");
        }
        assert!(matches!(run_suite("nope", 1, 0), Err(SuiteError::Unknown(_))));
    }

    #[test]
    fn grid_lattice_shape() {
        let g = grid_lattice(2, 3);
        assert_eq!(g.len(), 6);
        assert_eq!(g.label(g.top()), "(1,2)");
        assert!(check_distributive(&g).is_ok());
    }
}
