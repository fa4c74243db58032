//! Ordered Abelian groups.
//!
//! The static trait [`OrderedGroup`] is what valuations map into. The
//! dynamically tagged [`GroupElem`] mirrors the same groups for callers that
//! only know the group at run time (the CLI, the axiom checker).
//!
//! Built-in groups:
//! - [`Rational`] and `i64` with the usual order,
//! - [`LexPair`], the lexicographic plane,
//! - [`DivPos`], the strictly positive rationals under multiplication ordered
//!   by divisibility (`q <= r` iff `r / q` is a natural number),
//! - pairs `(A, B)` with the componentwise order,
//! - [`Op<G>`], the same group with the order reversed.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num::{BigInt, One, ToPrimitive};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::rational::Rational;
use crate::report::CheckReport;

/// An Abelian group with a translation-invariant partial order.
pub trait OrderedGroup: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn leq(&self, rhs: &Self) -> bool;

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }
}

/// An ordered group in which every pair has an infimum and a supremum.
pub trait LatticeGroup: OrderedGroup {
    fn meet(&self, rhs: &Self) -> Self;
    fn join(&self, rhs: &Self) -> Self;
}

impl OrderedGroup for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn leq(&self, rhs: &Self) -> bool {
        self <= rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
}

impl LatticeGroup for Rational {
    fn meet(&self, rhs: &Self) -> Self {
        self.clone().min(rhs.clone())
    }
    fn join(&self, rhs: &Self) -> Self {
        self.clone().max(rhs.clone())
    }
}

impl OrderedGroup for i64 {
    fn zero() -> Self {
        0
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn leq(&self, rhs: &Self) -> bool {
        self <= rhs
    }
}

impl LatticeGroup for i64 {
    fn meet(&self, rhs: &Self) -> Self {
        *self.min(rhs)
    }
    fn join(&self, rhs: &Self) -> Self {
        *self.max(rhs)
    }
}

impl<A: OrderedGroup, B: OrderedGroup> OrderedGroup for (A, B) {
    fn zero() -> Self {
        (A::zero(), B::zero())
    }
    fn add(&self, rhs: &Self) -> Self {
        (self.0.add(&rhs.0), self.1.add(&rhs.1))
    }
    fn neg(&self) -> Self {
        (self.0.neg(), self.1.neg())
    }
    fn leq(&self, rhs: &Self) -> bool {
        self.0.leq(&rhs.0) && self.1.leq(&rhs.1)
    }
}

impl<A: LatticeGroup, B: LatticeGroup> LatticeGroup for (A, B) {
    fn meet(&self, rhs: &Self) -> Self {
        (self.0.meet(&rhs.0), self.1.meet(&rhs.1))
    }
    fn join(&self, rhs: &Self) -> Self {
        (self.0.join(&rhs.0), self.1.join(&rhs.1))
    }
}

/// The opposite group: same addition, reversed order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Op<G>(pub G);

impl<G: OrderedGroup> OrderedGroup for Op<G> {
    fn zero() -> Self {
        Op(G::zero())
    }
    fn add(&self, rhs: &Self) -> Self {
        Op(self.0.add(&rhs.0))
    }
    fn neg(&self) -> Self {
        Op(self.0.neg())
    }
    fn leq(&self, rhs: &Self) -> bool {
        rhs.0.leq(&self.0)
    }
}

impl<G: LatticeGroup> LatticeGroup for Op<G> {
    fn meet(&self, rhs: &Self) -> Self {
        Op(self.0.join(&rhs.0))
    }
    fn join(&self, rhs: &Self) -> Self {
        Op(self.0.meet(&rhs.0))
    }
}

/// A point of the lexicographic plane.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LexPair {
    pub first: Rational,
    pub second: Rational,
}

impl LexPair {
    pub fn new(first: impl Into<Rational>, second: impl Into<Rational>) -> Self {
        LexPair {
            first: first.into(),
            second: second.into(),
        }
    }
}

impl fmt::Debug for LexPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LexPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.first, self.second)
    }
}

impl OrderedGroup for LexPair {
    fn zero() -> Self {
        LexPair::new(0, 0)
    }
    fn add(&self, rhs: &Self) -> Self {
        LexPair {
            first: &self.first + &rhs.first,
            second: &self.second + &rhs.second,
        }
    }
    fn neg(&self) -> Self {
        LexPair {
            first: -&self.first,
            second: -&self.second,
        }
    }
    fn leq(&self, rhs: &Self) -> bool {
        self.first < rhs.first || (self.first == rhs.first && self.second <= rhs.second)
    }
}

impl LatticeGroup for LexPair {
    fn meet(&self, rhs: &Self) -> Self {
        if self.leq(rhs) {
            self.clone()
        } else {
            rhs.clone()
        }
    }
    fn join(&self, rhs: &Self) -> Self {
        if self.leq(rhs) {
            rhs.clone()
        } else {
            self.clone()
        }
    }
}

/// Given a candidate supremum `(x, y)` of the chain `(0,1) <= (0,2) <= ...`,
/// returns an upper bound of the chain strictly below the candidate, or an
/// element of the chain the candidate fails to bound.
///
/// Either way the candidate is not a least upper bound, so the chain has no
/// supremum even though `(1, 0)` bounds it.
pub fn lex_chain_refutation(candidate: &LexPair) -> LexRefutation {
    if candidate.first.is_positive() {
        LexRefutation::SmallerUpperBound(LexPair {
            first: candidate.first.clone(),
            second: &candidate.second - Rational::one(),
        })
    } else {
        // (0, n) with n > y escapes the candidate.
        let n = if candidate.first.is_zero() {
            candidate.second.floor() + BigInt::one()
        } else {
            BigInt::one()
        };
        let n = n.max(BigInt::one());
        LexRefutation::NotAnUpperBound(LexPair {
            first: Rational::zero(),
            second: Rational::from(n),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexRefutation {
    SmallerUpperBound(LexPair),
    NotAnUpperBound(LexPair),
}

/// A strictly positive rational stored by prime exponents; `add` multiplies.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct DivPos {
    exponents: BTreeMap<u64, i64>,
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factorize(0)");
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

impl DivPos {
    pub fn one() -> Self {
        DivPos::default()
    }

    pub fn from_exponents(it: impl IntoIterator<Item = (u64, i64)>) -> Self {
        let mut exponents = BTreeMap::new();
        for (p, e) in it {
            *exponents.entry(p).or_insert(0) += e;
        }
        exponents.retain(|_, e| *e != 0);
        DivPos { exponents }
    }

    pub fn from_u64(n: u64) -> Self {
        DivPos::from_exponents(factorize(n).into_iter().map(|(p, e)| (p, e as i64)))
    }

    /// `numer / denom`, both positive.
    pub fn from_ratio(numer: u64, denom: u64) -> Self {
        DivPos::from_u64(numer).add(&DivPos::from_u64(denom).neg())
    }

    pub fn exponents(&self) -> &BTreeMap<u64, i64> {
        &self.exponents
    }

    pub fn exponent(&self, p: u64) -> i64 {
        self.exponents.get(&p).copied().unwrap_or(0)
    }

    pub fn to_rational(&self) -> Rational {
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for (&p, &e) in &self.exponents {
            let pe = num::pow(BigInt::from(p), e.unsigned_abs() as usize);
            if e > 0 {
                num *= pe;
            } else {
                den *= pe;
            }
        }
        Rational::from_bigints(num, den)
    }

    /// The represented value if it is a natural number that fits in `u64`.
    pub fn to_u64(&self) -> Option<u64> {
        let r = self.to_rational();
        if r.denom().is_one() {
            r.numer().to_u64()
        } else {
            None
        }
    }

    fn combine(&self, rhs: &Self, f: impl Fn(i64, i64) -> i64) -> Self {
        let primes: std::collections::BTreeSet<u64> = self
            .exponents
            .keys()
            .chain(rhs.exponents.keys())
            .copied()
            .collect();
        DivPos::from_exponents(
            primes
                .into_iter()
                .map(|p| (p, f(self.exponent(p), rhs.exponent(p)))),
        )
    }
}

impl fmt::Display for DivPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .exponents
            .iter()
            .map(|(p, e)| format!("{p}^{e}"))
            .collect();
        write!(f, "{}", parts.join("·"))
    }
}

impl fmt::Debug for DivPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for DivPos {
    type Err = GroupError;

    /// Parses `2^a·3^b·…` (`*` also accepted as separator) or `1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "1" {
            return Ok(DivPos::one());
        }
        let bad = || GroupError::Parse(s.to_string());
        let mut parts = Vec::new();
        for factor in t.split(['·', '*']) {
            let (p, e) = factor.trim().split_once('^').ok_or_else(bad)?;
            let p: u64 = p.trim().parse().map_err(|_| bad())?;
            let e: i64 = e.trim().parse().map_err(|_| bad())?;
            if p < 2 || factorize(p).len() != 1 || factorize(p)[0].1 != 1 {
                return Err(bad());
            }
            parts.push((p, e));
        }
        Ok(DivPos::from_exponents(parts))
    }
}

impl OrderedGroup for DivPos {
    fn zero() -> Self {
        DivPos::one()
    }
    fn add(&self, rhs: &Self) -> Self {
        self.combine(rhs, |a, b| a + b)
    }
    fn neg(&self) -> Self {
        DivPos {
            exponents: self.exponents.iter().map(|(&p, &e)| (p, -e)).collect(),
        }
    }
    fn leq(&self, rhs: &Self) -> bool {
        rhs.sub(self).exponents.values().all(|&e| e >= 0)
    }
}

impl LatticeGroup for DivPos {
    fn meet(&self, rhs: &Self) -> Self {
        self.combine(rhs, i64::min)
    }
    fn join(&self, rhs: &Self) -> Self {
        self.combine(rhs, i64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("shape mismatch: cannot combine {0} with {1}")]
    Shape(String, String),
    #[error("unsupported operation {op} on {elem}")]
    Unsupported { op: &'static str, elem: String },
    #[error("operation {0} needs a second operand")]
    MissingOperand(&'static str),
    #[error("cannot parse group element {0:?}")]
    Parse(String),
    #[error("unknown group descriptor {0:?}")]
    UnknownDescriptor(String),
}

/// A run-time tagged group element.
#[derive(Clone, PartialEq, Eq)]
pub enum GroupElem {
    Rational(Rational),
    Lex(LexPair),
    Div(DivPos),
    Product(Vec<GroupElem>),
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElem::Rational(r) => write!(f, "{r}"),
            GroupElem::Lex(p) => write!(f, "{p}"),
            GroupElem::Div(d) => write!(f, "{d}"),
            GroupElem::Product(xs) => {
                let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                write!(f, "[{}]", parts.join("; "))
            }
        }
    }
}

impl fmt::Debug for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for GroupElem {
    type Err = GroupError;

    /// Reads the textual forms written by `Display`: `p/q`, `(a, b)`,
    /// `2^a·3^b`, and `[x; y; …]` for products.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || GroupError::Parse(s.to_string());
        if let Some(inner) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let mut items = Vec::new();
            let mut depth = 0i32;
            let mut start = 0;
            for (i, c) in inner.char_indices() {
                match c {
                    '[' | '(' => depth += 1,
                    ']' | ')' => depth -= 1,
                    ';' if depth == 0 => {
                        items.push(inner[start..i].parse()?);
                        start = i + 1;
                    }
                    _ => {}
                }
            }
            items.push(inner[start..].parse()?);
            return Ok(GroupElem::Product(items));
        }
        if let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let (a, b) = inner.split_once(',').ok_or_else(bad)?;
            return Ok(GroupElem::Lex(LexPair {
                first: a.parse().map_err(|_| bad())?,
                second: b.parse().map_err(|_| bad())?,
            }));
        }
        if t.contains('^') {
            return Ok(GroupElem::Div(t.parse()?));
        }
        Ok(GroupElem::Rational(t.parse().map_err(|_| bad())?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupOpKind {
    Add,
    Neg,
    Leq,
    Meet,
    Join,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupOpResult {
    Elem(GroupElem),
    Bool(bool),
}

impl GroupElem {
    fn tag(&self) -> String {
        match self {
            GroupElem::Rational(_) => "Rational".into(),
            GroupElem::Lex(_) => "LexPair".into(),
            GroupElem::Div(_) => "DivPos".into(),
            GroupElem::Product(xs) => {
                let inner: Vec<String> = xs.iter().map(|x| x.tag()).collect();
                format!("Product({})", inner.join(","))
            }
        }
    }

    fn same_shape(&self, other: &Self) -> Result<(), GroupError> {
        let ok = match (self, other) {
            (GroupElem::Rational(_), GroupElem::Rational(_))
            | (GroupElem::Lex(_), GroupElem::Lex(_))
            | (GroupElem::Div(_), GroupElem::Div(_)) => true,
            (GroupElem::Product(a), GroupElem::Product(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same_shape(y).is_ok())
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(GroupError::Shape(self.tag(), other.tag()))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, GroupError> {
        self.same_shape(other)?;
        Ok(self.zip(other, &|a, b| match (a, b) {
            (GroupElem::Rational(x), GroupElem::Rational(y)) => GroupElem::Rational(x + y),
            (GroupElem::Lex(x), GroupElem::Lex(y)) => GroupElem::Lex(x.add(y)),
            (GroupElem::Div(x), GroupElem::Div(y)) => GroupElem::Div(x.add(y)),
            _ => unreachable!("shape checked"),
        }))
    }

    pub fn neg(&self) -> Self {
        match self {
            GroupElem::Rational(x) => GroupElem::Rational(-x),
            GroupElem::Lex(x) => GroupElem::Lex(x.neg()),
            GroupElem::Div(x) => GroupElem::Div(x.neg()),
            GroupElem::Product(xs) => GroupElem::Product(xs.iter().map(|x| x.neg()).collect()),
        }
    }

    pub fn leq(&self, other: &Self) -> Result<bool, GroupError> {
        self.same_shape(other)?;
        Ok(self.leq_unchecked(other))
    }

    fn leq_unchecked(&self, other: &Self) -> bool {
        match (self, other) {
            (GroupElem::Rational(x), GroupElem::Rational(y)) => x <= y,
            (GroupElem::Lex(x), GroupElem::Lex(y)) => x.leq(y),
            (GroupElem::Div(x), GroupElem::Div(y)) => x.leq(y),
            (GroupElem::Product(xs), GroupElem::Product(ys)) => {
                xs.iter().zip(ys).all(|(x, y)| x.leq_unchecked(y))
            }
            _ => unreachable!("shape checked"),
        }
    }

    pub fn meet(&self, other: &Self) -> Result<Self, GroupError> {
        self.same_shape(other)?;
        Ok(self.zip(other, &|a, b| match (a, b) {
            (GroupElem::Rational(x), GroupElem::Rational(y)) => GroupElem::Rational(x.meet(y)),
            (GroupElem::Lex(x), GroupElem::Lex(y)) => GroupElem::Lex(x.meet(y)),
            (GroupElem::Div(x), GroupElem::Div(y)) => GroupElem::Div(x.meet(y)),
            _ => unreachable!("shape checked"),
        }))
    }

    pub fn join(&self, other: &Self) -> Result<Self, GroupError> {
        self.same_shape(other)?;
        Ok(self.zip(other, &|a, b| match (a, b) {
            (GroupElem::Rational(x), GroupElem::Rational(y)) => GroupElem::Rational(x.join(y)),
            (GroupElem::Lex(x), GroupElem::Lex(y)) => GroupElem::Lex(x.join(y)),
            (GroupElem::Div(x), GroupElem::Div(y)) => GroupElem::Div(x.join(y)),
            _ => unreachable!("shape checked"),
        }))
    }

    fn zip(&self, other: &Self, f: &dyn Fn(&GroupElem, &GroupElem) -> GroupElem) -> Self {
        match (self, other) {
            (GroupElem::Product(xs), GroupElem::Product(ys)) => {
                GroupElem::Product(xs.iter().zip(ys).map(|(x, y)| x.zip(y, f)).collect())
            }
            _ => f(self, other),
        }
    }

    pub fn zero_like(&self) -> Self {
        match self {
            GroupElem::Rational(_) => GroupElem::Rational(Rational::zero()),
            GroupElem::Lex(_) => GroupElem::Lex(LexPair::zero()),
            GroupElem::Div(_) => GroupElem::Div(DivPos::one()),
            GroupElem::Product(xs) => GroupElem::Product(xs.iter().map(|x| x.zero_like()).collect()),
        }
    }
}

/// Dispatches one group operation on run-time tagged elements.
pub fn group_op(
    kind: GroupOpKind,
    x: &GroupElem,
    y: Option<&GroupElem>,
) -> Result<GroupOpResult, GroupError> {
    let need = |name| y.ok_or(GroupError::MissingOperand(name));
    Ok(match kind {
        GroupOpKind::Add => GroupOpResult::Elem(x.add(need("add")?)?),
        GroupOpKind::Neg => GroupOpResult::Elem(x.neg()),
        GroupOpKind::Leq => GroupOpResult::Bool(x.leq(need("leq")?)?),
        GroupOpKind::Meet => GroupOpResult::Elem(x.meet(need("meet")?)?),
        GroupOpKind::Join => GroupOpResult::Elem(x.join(need("join")?)?),
    })
}

/// Names one of the built-in groups for sampling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupKind {
    Rational,
    Lex,
    DivPos,
    Product(Vec<GroupKind>),
}

impl FromStr for GroupKind {
    type Err = GroupError;

    /// `rational`, `lex`, `divpos`, or `product(k1,k2,…)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "rational" | "q" => Ok(GroupKind::Rational),
            "lex" | "lexpair" => Ok(GroupKind::Lex),
            "divpos" | "div" => Ok(GroupKind::DivPos),
            _ => {
                let inner = t
                    .strip_prefix("product(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| GroupError::UnknownDescriptor(s.to_string()))?;
                let mut kinds = Vec::new();
                let mut depth = 0;
                let mut start = 0;
                for (i, c) in inner.char_indices() {
                    match c {
                        '(' => depth += 1,
                        ')' => depth -= 1,
                        ',' if depth == 0 => {
                            kinds.push(inner[start..i].parse()?);
                            start = i + 1;
                        }
                        _ => {}
                    }
                }
                kinds.push(inner[start..].parse()?);
                Ok(GroupKind::Product(kinds))
            }
        }
    }
}

fn small_rational(rng: &mut dyn RngCore) -> Rational {
    let n: i64 = rng.gen_range(-40..=40);
    let d: i64 = rng.gen_range(1..=8);
    Rational::new(n, d)
}

impl GroupKind {
    pub fn sample(&self, rng: &mut dyn RngCore) -> GroupElem {
        match self {
            GroupKind::Rational => GroupElem::Rational(small_rational(rng)),
            GroupKind::Lex => {
                // Few distinct first coordinates so ties (the interesting case) are common.
                let first = Rational::integer(rng.gen_range(-2..=2));
                GroupElem::Lex(LexPair {
                    first,
                    second: small_rational(rng),
                })
            }
            GroupKind::DivPos => {
                let n = rng.gen_range(1..=360u64);
                let d = rng.gen_range(1..=60u64);
                GroupElem::Div(DivPos::from_ratio(n, d))
            }
            GroupKind::Product(ks) => GroupElem::Product(ks.iter().map(|k| k.sample(rng)).collect()),
        }
    }

    /// All built-in tags are lattice ordered (the plane is totally ordered).
    pub fn is_lattice_ordered(&self) -> bool {
        match self {
            GroupKind::Product(ks) => ks.iter().all(|k| k.is_lattice_ordered()),
            _ => true,
        }
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Samples group elements and tallies the ordered-group axioms plus the
/// derived order lemmas for the chosen group.
pub fn check_group_axioms(kind: &GroupKind, samples: u64, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport::new();
    for _ in 0..samples {
        let x = kind.sample(&mut rng);
        let y = kind.sample(&mut rng);
        let w = kind.sample(&mut rng);
        let zero = x.zero_like();
        let add = |a: &GroupElem, b: &GroupElem| a.add(b).expect("same kind");
        let leq = |a: &GroupElem, b: &GroupElem| a.leq(b).expect("same kind");
        let wit = || format!("x={x}, y={y}, w={w}");

        report.record(
            "associativity",
            add(&add(&x, &y), &w) == add(&x, &add(&y, &w)),
            wit,
        );
        report.record("commutativity", add(&x, &y) == add(&y, &x), wit);
        report.record("identity", add(&x, &zero) == x, wit);
        report.record("inverse", add(&x, &x.neg()) == zero, wit);
        report.record("order_reflexive", leq(&x, &x), wit);
        report.record(
            "order_antisymmetric",
            !(leq(&x, &y) && leq(&y, &x)) || x == y,
            wit,
        );
        report.record(
            "order_transitive",
            !(leq(&x, &y) && leq(&y, &w)) || leq(&x, &w),
            wit,
        );
        report.record(
            "translation_invariance",
            leq(&x, &y) == leq(&add(&w, &x), &add(&w, &y)),
            wit,
        );
        report.record(
            "negation_reverses_order",
            leq(&x, &y) == leq(&y.neg(), &x.neg()),
            wit,
        );
        if kind.is_lattice_ordered() {
            let m = x.meet(&y).expect("same kind");
            let j = x.join(&y).expect("same kind");
            report.record("meet_join_sum", add(&m, &j) == add(&x, &y), wit);
            report.record(
                "meet_is_lower_bound",
                leq(&m, &x) && leq(&m, &y) && leq(&x, &j) && leq(&y, &j),
                wit,
            );
        }
        if *kind == GroupKind::DivPos {
            // Integer oracle: Euclid's gcd against exponent-wise min/max.
            let m = rng.gen_range(1..=5000u64);
            let n = rng.gen_range(1..=5000u64);
            let (dm, dn) = (DivPos::from_u64(m), DivPos::from_u64(n));
            let g = dm.meet(&dn).to_u64();
            let l = dm.join(&dn).to_u64();
            let euclid = gcd_u64(m, n);
            report.record(
                "gcd_lcm_product",
                g == Some(euclid) && l == Some(m / euclid * n),
                || format!("m={m}, n={n}"),
            );
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_rule() {
        assert!(LexPair::new(0, 5).leq(&LexPair::new(1, -100)));
        assert!(!LexPair::new(1, -100).leq(&LexPair::new(0, 5)));
        assert!(LexPair::new(1, 2).leq(&LexPair::new(1, 3)));
    }

    #[test]
    fn divpos_meet_join_are_gcd_lcm() {
        let (a, b) = (DivPos::from_u64(4), DivPos::from_u64(6));
        assert_eq!(a.meet(&b).to_u64(), Some(2));
        assert_eq!(a.join(&b).to_u64(), Some(12));
        assert!(DivPos::from_u64(3).leq(&DivPos::from_u64(12)));
        assert!(!DivPos::from_u64(5).leq(&DivPos::from_u64(12)));
    }

    #[test]
    fn divpos_text_round_trip() {
        let d = DivPos::from_ratio(12, 5);
        assert_eq!(d.to_string(), "2^2·3^1·5^-1");
        assert_eq!(d.to_string().parse::<DivPos>().unwrap(), d);
        assert_eq!("1".parse::<DivPos>().unwrap(), DivPos::one());
        assert!("4^1".parse::<DivPos>().is_err());
    }

    #[test]
    fn rational_add() {
        let r = group_op(
            GroupOpKind::Add,
            &GroupElem::Rational(Rational::new(3, 4)),
            Some(&GroupElem::Rational(Rational::new(1, 4))),
        )
        .unwrap();
        assert_eq!(r, GroupOpResult::Elem(GroupElem::Rational(Rational::one())));
    }

    #[test]
    fn tag_mismatch_is_shape_error() {
        let err = group_op(
            GroupOpKind::Add,
            &GroupElem::Rational(Rational::one()),
            Some(&GroupElem::Div(DivPos::one())),
        )
        .unwrap_err();
        assert!(matches!(err, GroupError::Shape(..)));
    }

    #[test]
    fn dynamic_leq_and_meet() {
        let a: GroupElem = "(0, 5)".parse().unwrap();
        let b: GroupElem = "(1, -100)".parse().unwrap();
        assert_eq!(
            group_op(GroupOpKind::Leq, &a, Some(&b)).unwrap(),
            GroupOpResult::Bool(true)
        );
        let m = group_op(GroupOpKind::Meet, &a, Some(&b)).unwrap();
        assert_eq!(m, GroupOpResult::Elem(a.clone()));
        let p: GroupElem = "[1/2; 2^1]".parse().unwrap();
        assert_eq!(p.to_string(), "[1/2; 2^1]");
    }

    #[test]
    fn opposite_group_reverses_order() {
        let a = Op(Rational::integer(1));
        let b = Op(Rational::integer(2));
        assert!(b.leq(&a));
        assert_eq!(a.meet(&b), b);
    }

    #[test]
    fn lex_chain_has_no_supremum() {
        let c = LexPair::new(1, 0);
        match lex_chain_refutation(&c) {
            LexRefutation::SmallerUpperBound(u) => {
                assert!(u.leq(&c) && u != c);
                for n in 1..200 {
                    assert!(LexPair::new(0, n).leq(&u));
                }
            }
            other => panic!("unexpected {other:?}"),
        }
        match lex_chain_refutation(&LexPair::new(0, 7)) {
            LexRefutation::NotAnUpperBound(p) => {
                assert!(!p.leq(&LexPair::new(0, 7)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn axioms_hold_for_builtin_groups() {
        for kind in ["rational", "lex", "divpos", "product(rational,divpos)"] {
            let k: GroupKind = kind.parse().unwrap();
            let r = check_group_axioms(&k, 1000, 7);
            assert!(r.all_pass(), "{kind}: {r}");
        }
        let r = check_group_axioms(&GroupKind::DivPos, 1000, 7);
        assert_eq!(r.get("gcd_lcm_product").unwrap().pass, 1000);
    }

    #[test]
    fn unknown_descriptor() {
        assert!(matches!(
            "reals".parse::<GroupKind>(),
            Err(GroupError::UnknownDescriptor(_))
        ));
    }

    #[test]
    fn factorize_small() {
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(97), vec![(97, 1)]);
    }
}
