//! Finite-stage completion: monotone sequences with convergence moduli,
//! `Π`/`Σ` elements, upper and lower limits, and convergence-theorem checks.
//!
//! A modulus `N(ε)` promises `|φ(a_N) − lim φ(aₙ)| ≤ ε`. It is the only
//! evidence of convergence this module accepts; sequences are never assumed
//! to converge from their first few values.

use std::fmt;
use std::sync::Arc;

use num::{BigInt, Signed};
use serde::Serialize;

use crate::instances::interval::IntervalSet;
use crate::lattice::{FiniteLattice, Lattice};
use crate::rational::Rational;
use crate::report::CheckReport;
use crate::valuation::{Elem, Valuation};

pub type Producer<E> = Arc<dyn Fn(u64) -> E + Send + Sync>;
pub type Modulus = Arc<dyn Fn(&Rational) -> u64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Decreasing,
    Increasing,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeqError {
    #[error("sequence is not monotone at stage {stage}")]
    NotMonotone { stage: u64 },
    #[error("modulus is not monotone: N({finer}) < N({coarser})")]
    ModulusNotMonotone { finer: Rational, coarser: Rational },
    #[error("modulus claims N({eps}) = {claimed} but stage {stage} differs by more than {eps}")]
    ModulusViolated {
        eps: Rational,
        claimed: u64,
        stage: u64,
    },
    #[error("sequences belong to different valuations: {0} vs {1}")]
    ValuationMismatch(String, String),
    #[error("expected a {expected:?} sequence")]
    WrongDirection { expected: Direction },
    #[error("eventually periodic sequence has an empty period")]
    PeriodUndeclared,
    #[error("depth must be at least {min}")]
    DepthTooSmall { min: u64 },
    #[error("tolerance must be positive")]
    NonPositiveTolerance,
    #[error("dominated convergence needs lower and upper bounds")]
    MissingBounds,
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// A monotone sequence `a₁, a₂, …` with a convergence modulus.
///
/// Optional certificates feed [`pi_leq_at_depth`]: `eventually_constant_from`
/// declares `aₙ = a_K` for all `n ≥ K`, and `lower_bound` an element below
/// every term.
#[derive(Clone)]
pub struct MonoSeq<E> {
    pub direction: Direction,
    producer: Producer<E>,
    modulus: Modulus,
    valuation: String,
    pub eventually_constant_from: Option<u64>,
    pub lower_bound: Option<E>,
}

impl<E> fmt::Debug for MonoSeq<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonoSeq")
            .field("direction", &self.direction)
            .field("valuation", &self.valuation)
            .field("eventually_constant_from", &self.eventually_constant_from)
            .finish_non_exhaustive()
    }
}

impl<E: Clone> MonoSeq<E> {
    /// The `n`-th term, `n ≥ 1`.
    pub fn at(&self, n: u64) -> E {
        (self.producer)(n.max(1))
    }

    pub fn modulus(&self, eps: &Rational) -> u64 {
        (self.modulus)(eps).max(1)
    }

    pub fn valuation(&self) -> &str {
        &self.valuation
    }

    pub fn producer(&self) -> Producer<E> {
        self.producer.clone()
    }

    pub fn with_eventually_constant(mut self, from: u64) -> Self {
        self.eventually_constant_from = Some(from);
        self
    }

    pub fn with_lower_bound(mut self, lower: E) -> Self {
        self.lower_bound = Some(lower);
        self
    }
}

/// Dyadic tolerances `1, 1/2, …, 2^-(k-1)` used for modulus spot checks.
fn probe_eps(k: u32) -> impl Iterator<Item = Rational> {
    (0..k).map(Rational::dyadic)
}

/// Builds a monotone sequence over `phi`'s lattice.
///
/// Checks monotonicity on stages `1..=sanity_depth`, that the modulus does
/// not decrease as `ε` shrinks, and that every stage reached within the
/// depth stays within `ε` of stage `N(ε)`.
pub fn seq_make<P>(
    phi: &P,
    direction: Direction,
    producer: Producer<Elem<P>>,
    modulus: Modulus,
    sanity_depth: u64,
) -> Result<MonoSeq<Elem<P>>, SeqError>
where
    P: Valuation<V = Rational>,
{
    let l = phi.lattice();
    let terms: Vec<Elem<P>> = (1..=sanity_depth.max(1)).map(|n| producer(n)).collect();
    for (k, w) in terms.windows(2).enumerate() {
        let ok = match direction {
            Direction::Decreasing => l.leq(&w[1], &w[0]),
            Direction::Increasing => l.leq(&w[0], &w[1]),
        };
        if !ok {
            return Err(SeqError::NotMonotone {
                stage: k as u64 + 2,
            });
        }
    }
    let values: Vec<Rational> = terms.iter().map(|a| phi.eval(a)).collect();
    let eps: Vec<Rational> = probe_eps(32).collect();
    for w in eps.windows(2) {
        if modulus(&w[1]) < modulus(&w[0]) {
            return Err(SeqError::ModulusNotMonotone {
                finer: w[1].clone(),
                coarser: w[0].clone(),
            });
        }
    }
    for e in &eps {
        let n = modulus(e).max(1);
        if n > sanity_depth {
            continue;
        }
        let base = &values[(n - 1) as usize];
        for m in n..=sanity_depth {
            if (&values[(m - 1) as usize] - base).abs() > *e {
                return Err(SeqError::ModulusViolated {
                    eps: e.clone(),
                    claimed: n,
                    stage: m,
                });
            }
        }
    }
    Ok(MonoSeq {
        direction,
        producer,
        modulus,
        valuation: phi.name().into_owned(),
        eventually_constant_from: None,
        lower_bound: None,
    })
}

/// An infimum of a decreasing `φ`-convergent sequence.
#[derive(Debug, Clone)]
pub struct PiElem<E>(MonoSeq<E>);

/// A supremum of an increasing `φ`-convergent sequence.
#[derive(Debug, Clone)]
pub struct SigmaElem<E>(MonoSeq<E>);

impl<E> PiElem<E> {
    pub fn new(seq: MonoSeq<E>) -> Result<Self, SeqError> {
        if seq.direction != Direction::Decreasing {
            return Err(SeqError::WrongDirection {
                expected: Direction::Decreasing,
            });
        }
        Ok(PiElem(seq))
    }

    pub fn seq(&self) -> &MonoSeq<E> {
        &self.0
    }
}

impl<E> SigmaElem<E> {
    pub fn new(seq: MonoSeq<E>) -> Result<Self, SeqError> {
        if seq.direction != Direction::Increasing {
            return Err(SeqError::WrongDirection {
                expected: Direction::Increasing,
            });
        }
        Ok(SigmaElem(seq))
    }

    pub fn seq(&self) -> &MonoSeq<E> {
        &self.0
    }
}

/// `φ(a_{N(ε)})`, within `ε` of `⋀ₙ φ(aₙ)` by the modulus contract.
pub fn pi_value<P>(x: &PiElem<Elem<P>>, phi: &P, eps: &Rational) -> Result<Rational, SeqError>
where
    P: Valuation<V = Rational>,
{
    if !eps.is_positive() {
        return Err(SeqError::NonPositiveTolerance);
    }
    Ok(phi.eval(&x.0.at(x.0.modulus(eps))))
}

/// `φ(a_{N(ε)})`, within `ε` of `⋁ₙ φ(aₙ)`.
pub fn sigma_value<P>(x: &SigmaElem<Elem<P>>, phi: &P, eps: &Rational) -> Result<Rational, SeqError>
where
    P: Valuation<V = Rational>,
{
    if !eps.is_positive() {
        return Err(SeqError::NonPositiveTolerance);
    }
    Ok(phi.eval(&x.0.at(x.0.modulus(eps))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combine {
    Meet,
    Join,
}

/// Stage-wise meet or join of two `Π` elements of the same valuation, with
/// modulus `ε ↦ max(N_x(ε/2), N_y(ε/2))`.
pub fn pi_combine<P>(
    kind: Combine,
    x: &PiElem<Elem<P>>,
    y: &PiElem<Elem<P>>,
    phi: &P,
) -> Result<PiElem<Elem<P>>, SeqError>
where
    P: Valuation<V = Rational>,
    P::L: Clone + Send + Sync + 'static,
    Elem<P>: Send + Sync + 'static,
{
    let name = phi.name();
    for s in [&x.0, &y.0] {
        if s.valuation != name {
            return Err(SeqError::ValuationMismatch(
                s.valuation.clone(),
                name.into_owned(),
            ));
        }
    }
    let l = phi.lattice().clone();
    let (px, py) = (x.0.producer.clone(), y.0.producer.clone());
    let producer: Producer<Elem<P>> = Arc::new(move |n| match kind {
        Combine::Meet => l.meet(&px(n), &py(n)),
        Combine::Join => l.join(&px(n), &py(n)),
    });
    let (mx, my) = (x.0.modulus.clone(), y.0.modulus.clone());
    let modulus: Modulus = Arc::new(move |eps| {
        let half = eps / Rational::integer(2);
        mx(&half).max(my(&half))
    });
    let eventually_constant_from = match (x.0.eventually_constant_from, y.0.eventually_constant_from) {
        (Some(a), Some(b)) => Some(a.max(b)),
        _ => None,
    };
    let l = phi.lattice();
    let lower_bound = match (kind, &x.0.lower_bound, &y.0.lower_bound) {
        (Combine::Meet, Some(a), Some(b)) => Some(l.meet(a, b)),
        (Combine::Join, Some(a), Some(b)) => Some(l.join(a, b)),
        (Combine::Join, Some(a), None) | (Combine::Join, None, Some(a)) => Some(a.clone()),
        _ => None,
    };
    Ok(PiElem(MonoSeq {
        direction: Direction::Decreasing,
        producer,
        modulus,
        valuation: name.into_owned(),
        eventually_constant_from,
        lower_bound,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "stage", rename_all = "snake_case")]
pub enum Verdict {
    ProvedAtStage(u64),
    RefutedAtStage(u64),
    Unknown(u64),
}

/// Caller-declared relation between two sequences, verified to depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeqCertificate {
    None,
    /// `xₙ ≤ yₙ` for every `n`.
    Stagewise,
}

/// Three-valued comparison of `⋀ xₙ` and `⋀ yₙ` using only stages `≤ depth`.
///
/// - Proved when `y` is eventually constant from `K ≤ depth` and some
///   `xₙ ≤ y_K`, or when a stage-wise certificate holds on every stage.
/// - Refuted when `x` has a certified lower bound (declared, or `x_K` for an
///   eventually constant `x`) that is not below some `y_m`.
/// - Unknown otherwise.
pub fn pi_leq_at_depth<L: Lattice>(
    lattice: &L,
    x: &PiElem<L::Elem>,
    y: &PiElem<L::Elem>,
    certificate: LeqCertificate,
    depth: u64,
) -> Verdict
where
    L::Elem: Clone,
{
    let depth = depth.max(1);
    let (xs, ys) = (&x.0, &y.0);
    if let Some(k) = ys.eventually_constant_from.filter(|&k| k <= depth) {
        let yk = ys.at(k);
        if let Some(n) = (1..=depth).find(|&n| lattice.leq(&xs.at(n), &yk)) {
            return Verdict::ProvedAtStage(n);
        }
    }
    if certificate == LeqCertificate::Stagewise
        && (1..=depth).all(|n| lattice.leq(&xs.at(n), &ys.at(n)))
    {
        return Verdict::ProvedAtStage(depth);
    }
    let lower = xs.lower_bound.clone().or_else(|| {
        xs.eventually_constant_from
            .filter(|&k| k <= depth)
            .map(|k| xs.at(k))
    });
    if let Some(lb) = lower {
        if (1..=depth).all(|n| lattice.leq(&lb, &xs.at(n))) {
            if let Some(m) = (1..=depth).find(|&m| !lattice.leq(&lb, &ys.at(m))) {
                return Verdict::RefutedAtStage(m);
            }
        }
    }
    Verdict::Unknown(depth)
}

/// An eventually periodic sequence over a finite lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventuallyPeriodic {
    pub preperiod: Vec<usize>,
    pub period: Vec<usize>,
}

/// Exact upper and lower limits: every tail sees exactly the period, so
/// `ulim` is the join of the period and `llim` its meet.
pub fn limits_finite(
    l: &FiniteLattice,
    seq: &EventuallyPeriodic,
) -> Result<(usize, usize, bool), SeqError> {
    let (&first, rest) = seq.period.split_first().ok_or(SeqError::PeriodUndeclared)?;
    let ulim = rest.iter().fold(first, |acc, a| l.join(&acc, a));
    let llim = rest.iter().fold(first, |acc, a| l.meet(&acc, a));
    Ok((ulim, llim, ulim == llim))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LimitRow {
    /// Outer index `N`.
    pub start: u64,
    /// `max_{N≤n≤depth} φ(a_N ∨ ⋯ ∨ aₙ)`.
    pub sup_of_joins: Rational,
    /// `min_{N≤n≤depth} φ(a_N ∧ ⋯ ∧ aₙ)`.
    pub inf_of_meets: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhiLimits {
    pub pulim_approx: Rational,
    pub pllim_approx: Rational,
    pub trace: Vec<LimitRow>,
}

/// Truncated `φ`-upper and lower limits.
///
/// The outer index runs over `1..depth` so every row sees at least two
/// terms; a row starting at `depth` would only ever see `a_depth`.
pub fn phi_limits_at_depth<P>(
    phi: &P,
    seq: &dyn Fn(u64) -> Elem<P>,
    depth: u64,
) -> Result<PhiLimits, SeqError>
where
    P: Valuation<V = Rational>,
{
    if depth < 2 {
        return Err(SeqError::DepthTooSmall { min: 2 });
    }
    let l = phi.lattice();
    let terms: Vec<Elem<P>> = (1..=depth).map(seq).collect();
    let mut trace = Vec::new();
    for start in 1..depth {
        let s = (start - 1) as usize;
        let mut join = terms[s].clone();
        let mut meet = terms[s].clone();
        let mut sup = phi.eval(&join);
        let mut inf = phi.eval(&meet);
        for t in &terms[s + 1..] {
            join = l.join(&join, t);
            meet = l.meet(&meet, t);
            sup = sup.max(phi.eval(&join));
            inf = inf.min(phi.eval(&meet));
        }
        trace.push(LimitRow {
            start,
            sup_of_joins: sup,
            inf_of_meets: inf,
        });
    }
    let pulim_approx = trace
        .iter()
        .map(|r| r.sup_of_joins.clone())
        .min()
        .expect("depth >= 2");
    let pllim_approx = trace
        .iter()
        .map(|r| r.inf_of_meets.clone())
        .max()
        .expect("depth >= 2");
    Ok(PhiLimits {
        pulim_approx,
        pllim_approx,
        trace,
    })
}

/// A sequence whose upper and lower limit elements are known in closed form.
#[derive(Clone)]
pub struct LimitSeq<E> {
    pub producer: Producer<E>,
    pub ulim: Option<E>,
    pub llim: Option<E>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    Fatou,
    Dct,
}

/// Evaluates both sides of Fatou's identity or dominated convergence at
/// truncation `depth` and records whether they agree within `tol`.
///
/// - Fatou: `φ(ulim aₙ)` against the truncated `pulim`, and `φ(llim aₙ)`
///   against `pllim`.
/// - Dct: requires `lower ≤ aₙ ≤ upper` on every stage, `ulim = llim`, and
///   compares `φ(a_depth)` and both truncated limits with `φ(llim aₙ)`.
pub fn convergence_theorem_check<P>(
    kind: Theorem,
    phi: &P,
    seq: &LimitSeq<Elem<P>>,
    bounds: Option<(&Elem<P>, &Elem<P>)>,
    depth: u64,
    tol: &Rational,
) -> Result<CheckReport, SeqError>
where
    P: Valuation<V = Rational>,
{
    let (Some(ulim), Some(llim)) = (&seq.ulim, &seq.llim) else {
        return Err(SeqError::Unsupported(
            "the upper and lower limit elements are not stage-computable for this sequence"
                .into(),
        ));
    };
    let lim = phi_limits_at_depth(phi, seq.producer.as_ref(), depth)?;
    let mut report = CheckReport::new();
    let close = |a: &Rational, b: &Rational| (a - b).abs() <= *tol;
    let l = phi.lattice();
    match kind {
        Theorem::Fatou => {
            let (pu, vu) = (&lim.pulim_approx, phi.eval(ulim));
            report.record("fatou_upper", close(pu, &vu), || {
                format!("φ(ulim) = {vu}, pulim ≈ {pu} at depth {depth}")
            });
            let (pl, vl) = (&lim.pllim_approx, phi.eval(llim));
            report.record("fatou_lower", close(pl, &vl), || {
                format!("φ(llim) = {vl}, pllim ≈ {pl} at depth {depth}")
            });
        }
        Theorem::Dct => {
            let (lo, hi) = bounds.ok_or(SeqError::MissingBounds)?;
            for n in 1..=depth {
                let a = (seq.producer)(n);
                report.record("dominated", l.leq(lo, &a) && l.leq(&a, hi), || {
                    format!("stage {n} escapes the bounds")
                });
            }
            report.record("limit_exists", ulim == llim, || {
                "declared ulim and llim differ".into()
            });
            let target = phi.eval(llim);
            let last = phi.eval(&(seq.producer)(depth));
            report.record("lim_phi_equals_phi_lim", close(&last, &target), || {
                format!("φ(a_{depth}) = {last}, φ(llim) = {target}")
            });
            report.record(
                "limits_agree",
                close(&lim.pulim_approx, &target) && close(&lim.pllim_approx, &target),
                || {
                    format!(
                        "pulim ≈ {}, pllim ≈ {}, φ(lim) = {target}",
                        lim.pulim_approx, lim.pllim_approx
                    )
                },
            );
        }
    }
    report.record("pllim_le_pulim", lim.pllim_approx <= lim.pulim_approx, || {
        format!("{} > {}", lim.pllim_approx, lim.pulim_approx)
    });
    Ok(report)
}

/// Given increasing `x`, `y` with `x_{n+1} − x_n ≤ y_{n+1} − y_n`, checks
/// that `y`'s modulus also certifies `x`: for each probe `ε`, every later
/// stage of `x` stays within `ε` of `x_{N(ε)}`.
pub fn increment_domination_check(
    xs: &[Rational],
    ys: &[Rational],
    modulus_y: &dyn Fn(&Rational) -> u64,
) -> CheckReport {
    let mut report = CheckReport::new();
    let len = xs.len().min(ys.len());
    for n in 1..len {
        let (dx, dy) = (&xs[n] - &xs[n - 1], &ys[n] - &ys[n - 1]);
        report.record("increments_dominated", dx <= dy, || {
            format!("stage {}: Δx = {dx} > Δy = {dy}", n + 1)
        });
    }
    for eps in probe_eps(24) {
        let n = modulus_y(&eps).max(1) as usize;
        if n > len {
            continue;
        }
        for m in n..=len {
            let (gx, gy) = (&xs[m - 1] - &xs[n - 1], &ys[m - 1] - &ys[n - 1]);
            report.record("y_cauchy", gy <= eps, || format!("ε = {eps}, stage {m}"));
            report.record("x_cauchy", gx <= eps, || format!("ε = {eps}, stage {m}"));
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sqrt2Stage {
    pub n: u64,
    pub q: Rational,
    pub r: Rational,
    pub mu_a: Rational,
    pub mu_b: Rational,
    pub mu_union: Rational,
    /// `2 − qₙ²`.
    pub gap: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sqrt2Trace {
    pub stages: Vec<Sqrt2Stage>,
    pub report: CheckReport,
}

impl Sqrt2Trace {
    pub fn last(&self) -> &Sqrt2Stage {
        self.stages.last().expect("depth >= 1")
    }
}

fn pell_step((p, q): (BigInt, BigInt)) -> (BigInt, BigInt) {
    (
        BigInt::from(3) * &p + BigInt::from(4) * &q,
        BigInt::from(2) * &p + BigInt::from(3) * &q,
    )
}

/// Rationals `qₙ ↑ √2` (convergents `1, 7/5, 41/29, …`) and `rₙ ↓ √2 − 1`
/// (upper convergents `3/2, 17/12, …` minus one).
pub fn sqrt2_sequences(depth: u64) -> Vec<(Rational, Rational)> {
    let mut lower = (BigInt::from(1), BigInt::from(1));
    let mut upper = (BigInt::from(3), BigInt::from(2));
    let mut out = Vec::new();
    for _ in 0..depth {
        out.push((
            Rational::from_bigints(lower.0.clone(), lower.1.clone()),
            Rational::from_bigints(upper.0.clone(), upper.1.clone()) - Rational::one(),
        ));
        lower = pell_step(lower);
        upper = pell_step(upper);
    }
    out
}

/// Stage values for `Aₙ = [0, r₁]`, `Bₙ = [rₙ, qₙ]` under `μ_S`, where
/// `μ(Aₙ ∪ Bₙ) = qₙ` increases to √2 and so has no supremum in ℚ.
pub fn sqrt2_witness(depth: u64) -> Sqrt2Trace {
    let seqs = sqrt2_sequences(depth.max(1));
    let r1 = seqs[0].1.clone();
    let a = IntervalSet::closed(Rational::zero(), r1);
    let two = Rational::integer(2);
    let mut report = CheckReport::new();
    let mut stages: Vec<Sqrt2Stage> = Vec::new();
    for (k, (q, r)) in seqs.into_iter().enumerate() {
        let n = k as u64 + 1;
        let b = IntervalSet::closed(r.clone(), q.clone());
        let union = a.join(&b);
        let stage = Sqrt2Stage {
            n,
            mu_a: a.measure(),
            mu_b: b.measure(),
            mu_union: union.measure(),
            gap: &two - &q * &q,
            q,
            r,
        };
        report.record("mu_b_is_q_minus_r", stage.mu_b == &stage.q - &stage.r, || {
            format!("stage {n}")
        });
        report.record("mu_union_is_q", stage.mu_union == stage.q, || format!("stage {n}"));
        report.record("q_squared_below_two", stage.gap.is_positive(), || {
            format!("stage {n}")
        });
        if let Some(prev) = stages.last() {
            report.record("q_increasing", prev.q < stage.q, || format!("stage {n}"));
            report.record("r_decreasing", stage.r < prev.r, || format!("stage {n}"));
            report.record("gap_decreasing", stage.gap < prev.gap, || format!("stage {n}"));
            let nested = a.join(&IntervalSet::closed(prev.r.clone(), prev.q.clone()));
            report.record("union_increasing", nested.is_subset(&union), || {
                format!("stage {n}")
            });
        }
        stages.push(stage);
    }
    Sqrt2Trace { stages, report }
}

/// Every `p/q` with `q ≤ max_denom` within `tol` of `target`, and whether
/// any of them squares to exactly 2.
pub fn rational_sqrt2_scan(target: &Rational, max_denom: u64, tol: &Rational) -> (u64, bool) {
    let two = Rational::integer(2);
    let mut candidates = 0;
    let mut hit = false;
    for q in 1..=max_denom {
        let qi = Rational::integer(q as i64);
        let lo = ((target - tol) * &qi).ceil();
        let hi = ((target + tol) * &qi).floor();
        let mut p = lo;
        while p <= hi {
            let c = Rational::from_bigints(p.clone(), BigInt::from(q));
            candidates += 1;
            hit |= &c * &c == two;
            p += 1;
        }
    }
    (candidates, hit)
}

/// `|qₙ² − 2|` as an exact rational.
pub fn sqrt2_error(q: &Rational) -> Rational {
    Rational::from_big((q * q - Rational::integer(2)).as_big().abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::interval::{IntervalMeasure, IntervalSet};
    use crate::instances::step::{StepFn, StepIntegral};
    use crate::instances::Interval;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn shrinking(phi: &IntervalMeasure) -> MonoSeq<IntervalSet> {
        seq_make(
            phi,
            Direction::Decreasing,
            Arc::new(|n| IntervalSet::closed(0, Rational::one() + r(1, n as i64))),
            Arc::new(|eps: &Rational| eps.recip().ceil().try_into().unwrap_or(u64::MAX)),
            20,
        )
        .unwrap()
    }

    fn constant(phi: &IntervalMeasure, s: IntervalSet) -> MonoSeq<IntervalSet> {
        seq_make(
            phi,
            Direction::Decreasing,
            Arc::new(move |_| s.clone()),
            Arc::new(|_: &Rational| 1),
            5,
        )
        .unwrap()
        .with_eventually_constant(1)
    }

    #[test]
    fn pi_value_within_tolerance() {
        let phi = IntervalMeasure::default();
        let x = PiElem::new(shrinking(&phi)).unwrap();
        let v = pi_value(&x, &phi, &r(1, 100)).unwrap();
        assert!(v >= Rational::one() && v <= r(101, 100));
        let c = PiElem::new(constant(&phi, IntervalSet::closed(0, 1))).unwrap();
        assert_eq!(pi_value(&c, &phi, &r(1, 7)).unwrap(), Rational::one());
    }

    #[test]
    fn non_monotone_is_rejected() {
        let phi = IntervalMeasure::default();
        let err = seq_make(
            &phi,
            Direction::Decreasing,
            Arc::new(|n| IntervalSet::closed(0, n as i64)),
            Arc::new(|_: &Rational| 1),
            5,
        )
        .unwrap_err();
        assert_eq!(err, SeqError::NotMonotone { stage: 2 });
    }

    #[test]
    fn lying_modulus_is_caught() {
        let phi = IntervalMeasure::default();
        let err = seq_make(
            &phi,
            Direction::Decreasing,
            Arc::new(|n| IntervalSet::closed(0, Rational::one() + r(1, n as i64))),
            Arc::new(|_: &Rational| 1),
            10,
        )
        .unwrap_err();
        assert!(matches!(err, SeqError::ModulusViolated { .. }));
    }

    #[test]
    fn combine_meet_with_constant() {
        let phi = IntervalMeasure::default();
        let x = PiElem::new(shrinking(&phi)).unwrap();
        let y = PiElem::new(constant(&phi, IntervalSet::closed(r(1, 2), 2))).unwrap();
        let m = pi_combine(Combine::Meet, &x, &y, &phi).unwrap();
        assert_eq!(m.seq().at(4), IntervalSet::closed(r(1, 2), r(5, 4)));
        let v = pi_value(&m, &phi, &r(1, 1000)).unwrap();
        assert!(v >= r(1, 2) && v <= r(1, 2) + r(1, 1000));
    }

    #[test]
    fn combine_rejects_foreign_valuation() {
        let phi = IntervalMeasure::default();
        let x = PiElem::new(shrinking(&phi)).unwrap();
        let mut other = shrinking(&phi);
        other.valuation = "other".into();
        let y = PiElem::new(other).unwrap();
        assert!(matches!(
            pi_combine(Combine::Join, &x, &y, &phi),
            Err(SeqError::ValuationMismatch(..))
        ));
    }

    #[test]
    fn leq_verdicts() {
        let phi = IntervalMeasure::default();
        let l = phi.lattice.clone();
        let x = PiElem::new(shrinking(&phi)).unwrap();
        let y = PiElem::new(constant(&phi, IntervalSet::closed(0, 2))).unwrap();
        assert_eq!(
            pi_leq_at_depth(&l, &x, &y, LeqCertificate::None, 10),
            Verdict::ProvedAtStage(1)
        );
        assert_eq!(
            pi_leq_at_depth(&l, &y, &x, LeqCertificate::None, 10),
            Verdict::RefutedAtStage(2)
        );
        let half = seq_make(
            &phi,
            Direction::Decreasing,
            Arc::new(|n| IntervalSet::closed(0, Rational::one() + r(1, 2 * n as i64))),
            Arc::new(|eps: &Rational| eps.recip().ceil().try_into().unwrap_or(u64::MAX)),
            20,
        )
        .unwrap();
        let z = PiElem::new(half).unwrap();
        assert_eq!(
            pi_leq_at_depth(&l, &x, &z, LeqCertificate::None, 10),
            Verdict::Unknown(10)
        );
        assert_eq!(
            pi_leq_at_depth(&l, &z, &x, LeqCertificate::Stagewise, 10),
            Verdict::ProvedAtStage(10)
        );
    }

    #[test]
    fn finite_limits() {
        let m3 = FiniteLattice::m3();
        let (a, b) = (m3.index("a").unwrap(), m3.index("b").unwrap());
        let alt = EventuallyPeriodic {
            preperiod: vec![],
            period: vec![a, b],
        };
        assert_eq!(limits_finite(&m3, &alt), Ok((m3.top(), m3.bottom(), false)));
        let junk = EventuallyPeriodic {
            preperiod: vec![a, b, m3.top()],
            period: vec![b],
        };
        assert_eq!(limits_finite(&m3, &junk), Ok((b, b, true)));
        assert_eq!(
            limits_finite(&m3, &EventuallyPeriodic { preperiod: vec![a], period: vec![] }),
            Err(SeqError::PeriodUndeclared)
        );
    }

    #[test]
    fn alternating_indicators() {
        let phi = StepIntegral::default();
        let f = StepFn::indicator(&Interval::closed(0, 1), Rational::one()).unwrap();
        let g = StepFn::indicator(&Interval::closed(1, 2), Rational::one()).unwrap();
        let seq = move |n: u64| if n % 2 == 1 { f.clone() } else { g.clone() };
        let lim = phi_limits_at_depth(&phi, &seq, 3).unwrap();
        assert_eq!(lim.pulim_approx, Rational::integer(2));
        assert_eq!(lim.pllim_approx, Rational::zero());
    }

    #[test]
    fn sqrt2_first_stages() {
        let t = sqrt2_witness(3);
        let qs: Vec<Rational> = t.stages.iter().map(|s| s.q.clone()).collect();
        assert_eq!(qs, vec![r(1, 1), r(7, 5), r(41, 29)]);
        let rs: Vec<Rational> = t.stages.iter().map(|s| s.r.clone()).collect();
        assert_eq!(rs, vec![r(1, 2), r(5, 12), r(29, 70)]);
        assert!(t.report.all_pass());
    }
}
