//! Codes for the lower Borel hierarchy on a truncated Baire space.
//!
//! - `pair(a, b) = (a'+b')(a'+b'+1)/2 + b' + 2` with `a' = a−1`, `b' = b−1`,
//!   a bijection `ℕ×ℕ → ℕ∖{1}` (`ℕ` starting at 1).
//! - Tuples fold to the right with terminator 1: `⟨a₁⋯aₙ⟩ = ⟨a₁,⟨a₂,…⟨aₙ,1⟩…⟩⟩`.
//! - `⟨1mn⟩` codes the complement of `Bᵐₙ = {f : f(n) = m}`, `⟨2mn⟩` codes
//!   `Bᵐₙ`, anything else codes `∅`; tuples of those are intersections, and
//!   tuples of intersections are unions.
//! - Stumps stand in for countable ordinals; unlisted children are leaves.

use std::fmt;
use std::str::FromStr;

use num::{BigUint, One, ToPrimitive, Zero};
use rand::{Rng, RngCore};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Largest enumerable truncated space.
pub const MAX_POINTS: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BorelError {
    #[error("pairing arguments must be at least 1")]
    ZeroArgument,
    #[error("code 1 is the tuple terminator, not a pair")]
    Terminator,
    #[error("code 0 is not a natural number")]
    ZeroCode,
    #[error("space {depth}x{alphabet} is empty or has more than {MAX_POINTS} points")]
    SpaceTooLarge { depth: u32, alphabet: u32 },
    #[error("point has length {got}, the space has depth {depth}")]
    PointLength { got: usize, depth: u32 },
    #[error("point entry {value} at position {position} is outside 1..={alphabet}")]
    PointValue {
        position: usize,
        value: u32,
        alphabet: u32,
    },
    #[error("no code for child path {0:?}")]
    MissingCode(Vec<usize>),
    #[error("code assignment shape does not match the stump at path {0:?}")]
    ShapeMismatch(Vec<usize>),
    #[error("child cap must be at least 1")]
    ZeroCap,
    #[error("malformed space {0:?}, expected DxM")]
    BadSpace(String),
}

/// `⟨a, b⟩`.
pub fn pair(a: &BigUint, b: &BigUint) -> Result<BigUint, BorelError> {
    if a.is_zero() || b.is_zero() {
        return Err(BorelError::ZeroArgument);
    }
    let one = BigUint::one();
    let (a1, b1) = (a - &one, b - &one);
    let s = &a1 + &b1;
    Ok(&s * (&s + &one) / 2u32 + b1 + 2u32)
}

pub fn pair_u64(a: u64, b: u64) -> Result<BigUint, BorelError> {
    pair(&BigUint::from(a), &BigUint::from(b))
}

/// Inverse of [`pair`] on codes `k ≥ 2`.
pub fn unpair(k: &BigUint) -> Result<(BigUint, BigUint), BorelError> {
    if k.is_zero() {
        return Err(BorelError::ZeroCode);
    }
    if k.is_one() {
        return Err(BorelError::Terminator);
    }
    let z = k - 2u32;
    let mut s = ((&z * 8u32 + 1u32).sqrt() - 1u32) / 2u32;
    // Guard against rounding at perfect-square boundaries.
    while &s * (&s + 1u32) / 2u32 > z {
        s -= 1u32;
    }
    while (&s + 1u32) * (&s + 2u32) / 2u32 <= z {
        s += 1u32;
    }
    let b1 = &z - &s * (&s + 1u32) / 2u32;
    let a1 = &s - &b1;
    Ok((a1 + 1u32, b1 + 1u32))
}

/// `⟨a₁⋯aₙ⟩`; the empty tuple is 1.
pub fn tuple_encode(xs: &[BigUint]) -> Result<BigUint, BorelError> {
    xs.iter().rev().try_fold(BigUint::one(), |acc, x| pair(x, &acc))
}

pub fn tuple_encode_u64(xs: &[u64]) -> Result<BigUint, BorelError> {
    let big: Vec<BigUint> = xs.iter().map(|&x| BigUint::from(x)).collect();
    tuple_encode(&big)
}

/// Every `k ≥ 1` is the code of exactly one tuple.
pub fn tuple_decode(k: &BigUint) -> Result<Vec<BigUint>, BorelError> {
    if k.is_zero() {
        return Err(BorelError::ZeroCode);
    }
    let mut out = Vec::new();
    let mut cur = k.clone();
    while !cur.is_one() {
        let (head, tail) = unpair(&cur)?;
        out.push(head);
        cur = tail;
    }
    Ok(out)
}

/// A finite stump: a leaf, or a node whose unlisted children are leaves.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stump {
    Leaf,
    Node(Vec<Stump>),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
enum StumpRepr {
    #[serde(rename = "leaf")]
    Leaf(bool),
    #[serde(rename = "node")]
    Node(Vec<Stump>),
}

impl Serialize for Stump {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Stump::Leaf => StumpRepr::Leaf(true).serialize(s),
            Stump::Node(c) => StumpRepr::Node(c.clone()).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Stump {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match StumpRepr::deserialize(d)? {
            StumpRepr::Leaf(true) => Ok(Stump::Leaf),
            StumpRepr::Leaf(false) => Err(serde::de::Error::custom("\"leaf\" must be true")),
            StumpRepr::Node(c) => Ok(Stump::Node(c)),
        }
    }
}

impl Stump {
    pub fn node(children: impl IntoIterator<Item = Stump>) -> Self {
        Stump::Node(children.into_iter().collect())
    }

    /// The `n`-th child, counting from 1.
    pub fn child(&self, n: usize) -> Option<&Stump> {
        match self {
            Stump::Leaf => None,
            Stump::Node(c) => Some(c.get(n - 1).unwrap_or(&Stump::Leaf)),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Stump::Leaf => 0,
            Stump::Node(c) => 1 + c.iter().map(Stump::depth).max().unwrap_or(0),
        }
    }

    /// `f(1)` and `f(⟨n, m⟩) = f⁽ⁿ⁾(m)`, with 37 marking a leaf.
    pub fn as_function(&self, k: &BigUint) -> u64 {
        match self {
            Stump::Leaf => 37,
            Stump::Node(_) if k.is_one() => 1,
            Stump::Node(_) => {
                let (n, m) = unpair(k).expect("k >= 2");
                match n.to_usize() {
                    Some(n) => self.child(n).expect("node").as_function(&m),
                    None => 37,
                }
            }
        }
    }

    /// A random stump of depth at most `max_depth` with at most
    /// `max_width` listed children per node.
    pub fn random(rng: &mut dyn RngCore, max_depth: usize, max_width: usize) -> Stump {
        if max_depth == 0 || rng.gen_ratio(1, 3) {
            return Stump::Leaf;
        }
        let width = rng.gen_range(0..=max_width);
        Stump::Node((0..width).map(|_| Stump::random(rng, max_depth - 1, max_width)).collect())
    }
}

/// Leaf 0; node `max(1, max over listed children of α + 1)`.
pub fn stump_alpha(s: &Stump) -> u64 {
    match s {
        Stump::Leaf => 0,
        Stump::Node(c) => c.iter().map(|x| stump_alpha(x) + 1).max().unwrap_or(0).max(1),
    }
}

/// `α` computed from the function encoding of a stump, probing children
/// `1..=width` at every level.
pub fn stump_alpha_by_function(f: &dyn Fn(&BigUint) -> u64, width: u64) -> u64 {
    if f(&BigUint::one()) != 1 {
        return 0;
    }
    (1..=width)
        .map(|n| {
            let sub = move |m: &BigUint| f(&pair(&BigUint::from(n), m).expect("positive"));
            stump_alpha_by_function(&sub, width) + 1
        })
        .max()
        .unwrap_or(1)
}

/// Maps `{1..depth} → {1..alphabet}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedBaire {
    pub depth: u32,
    pub alphabet: u32,
}

impl TruncatedBaire {
    pub fn new(depth: u32, alphabet: u32) -> Result<Self, BorelError> {
        let size = (alphabet as u64).checked_pow(depth);
        match size {
            Some(s) if depth >= 1 && alphabet >= 1 && s <= MAX_POINTS => Ok(TruncatedBaire { depth, alphabet }),
            _ => Err(BorelError::SpaceTooLarge { depth, alphabet }),
        }
    }

    pub fn size(&self) -> u64 {
        (self.alphabet as u64).pow(self.depth)
    }

    pub fn check_point(&self, point: &[u32]) -> Result<(), BorelError> {
        if point.len() != self.depth as usize {
            return Err(BorelError::PointLength {
                got: point.len(),
                depth: self.depth,
            });
        }
        match point.iter().position(|&v| v == 0 || v > self.alphabet) {
            Some(i) => Err(BorelError::PointValue {
                position: i + 1,
                value: point[i],
                alphabet: self.alphabet,
            }),
            None => Ok(()),
        }
    }

    /// All points in lexicographic order.
    pub fn points(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        (0..self.size()).map(move |mut k| {
            let mut p = vec![0; self.depth as usize];
            for slot in p.iter_mut().rev() {
                *slot = (k % self.alphabet as u64) as u32 + 1;
                k /= self.alphabet as u64;
            }
            p
        })
    }

    /// `Bᵐₙ` is meaningful only for `n ≤ depth` and `m ≤ alphabet`.
    pub fn in_range(&self, m: &BigUint, n: &BigUint) -> bool {
        *n <= BigUint::from(self.depth) && *m <= BigUint::from(self.alphabet)
    }
}

impl FromStr for TruncatedBaire {
    type Err = BorelError;
    fn from_str(s: &str) -> Result<Self, BorelError> {
        let bad = || BorelError::BadSpace(s.to_string());
        let (d, m) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let d: u32 = d.trim().parse().map_err(|_| bad())?;
        let m: u32 = m.trim().parse().map_err(|_| bad())?;
        TruncatedBaire::new(d, m)
    }
}

impl fmt::Display for TruncatedBaire {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.depth, self.alphabet)
    }
}

/// Which decode map to apply to a code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SetKind {
    #[serde(rename = "sprime")]
    Sprime,
    #[serde(rename = "scap")]
    Scap,
    #[serde(rename = "a")]
    A,
}

impl FromStr for SetKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "sprime" | "s'" => Ok(SetKind::Sprime),
            "scap" => Ok(SetKind::Scap),
            "a" => Ok(SetKind::A),
            _ => Err(format!("unknown set kind {s:?}, expected sprime, scap or a")),
        }
    }
}

/// A decoded set expression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SetExpr {
    Empty,
    /// `{f : f(n) = m}`.
    Basic {
        #[serde(serialize_with = "ser_big")]
        m: BigUint,
        #[serde(serialize_with = "ser_big")]
        n: BigUint,
    },
    /// `{f : f(n) ≠ m}`.
    CoBasic {
        #[serde(serialize_with = "ser_big")]
        m: BigUint,
        #[serde(serialize_with = "ser_big")]
        n: BigUint,
    },
    /// Empty list is the full space.
    Inter(Vec<SetExpr>),
    /// Empty list is `∅`.
    Union(Vec<SetExpr>),
}

impl SetExpr {
    /// Out-of-range `Bᵐₙ` contains no point of the space, so its complement
    /// contains every point.
    pub fn contains(&self, space: &TruncatedBaire, point: &[u32]) -> bool {
        match self {
            SetExpr::Empty => false,
            SetExpr::Basic { m, n } => basic_member(space, point, m, n),
            SetExpr::CoBasic { m, n } => !basic_member(space, point, m, n),
            SetExpr::Inter(xs) => xs.iter().all(|x| x.contains(space, point)),
            SetExpr::Union(xs) => xs.iter().any(|x| x.contains(space, point)),
        }
    }

    /// Basic sets that fall outside the space, as `(m, n)`.
    pub fn out_of_range(&self, space: &TruncatedBaire) -> Vec<(BigUint, BigUint)> {
        let mut out = Vec::new();
        self.collect_out_of_range(space, &mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_out_of_range(&self, space: &TruncatedBaire, out: &mut Vec<(BigUint, BigUint)>) {
        match self {
            SetExpr::Empty => {}
            SetExpr::Basic { m, n } | SetExpr::CoBasic { m, n } => {
                if !space.in_range(m, n) {
                    out.push((m.clone(), n.clone()));
                }
            }
            SetExpr::Inter(xs) | SetExpr::Union(xs) => xs.iter().for_each(|x| x.collect_out_of_range(space, out)),
        }
    }
}

fn basic_member(space: &TruncatedBaire, point: &[u32], m: &BigUint, n: &BigUint) -> bool {
    space.in_range(m, n) && {
        let n = n.to_usize().expect("in range");
        BigUint::from(point[n - 1]) == *m
    }
}

/// `⟦k⟧` for the given kind.
pub fn decode_expr(code: &BigUint, kind: SetKind) -> Result<SetExpr, BorelError> {
    let parts = tuple_decode(code)?;
    Ok(match kind {
        SetKind::Sprime => match parts.as_slice() {
            [tag, m, n] if tag.is_one() => SetExpr::CoBasic {
                m: m.clone(),
                n: n.clone(),
            },
            [tag, m, n] if *tag == BigUint::from(2u32) => SetExpr::Basic {
                m: m.clone(),
                n: n.clone(),
            },
            _ => SetExpr::Empty,
        },
        SetKind::Scap => SetExpr::Inter(
            parts
                .iter()
                .map(|p| decode_expr(p, SetKind::Sprime))
                .collect::<Result<_, _>>()?,
        ),
        SetKind::A => SetExpr::Union(
            parts
                .iter()
                .map(|p| decode_expr(p, SetKind::Scap))
                .collect::<Result<_, _>>()?,
        ),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub member: bool,
    /// Out-of-range basic sets `(m, n)` met while decoding.
    #[serde(serialize_with = "ser_pairs")]
    pub out_of_range: Vec<(BigUint, BigUint)>,
}

/// Membership of `point` in `⟦code⟧`.
pub fn decode_set(code: &BigUint, kind: SetKind, space: &TruncatedBaire, point: &[u32]) -> Result<Membership, BorelError> {
    space.check_point(point)?;
    let expr = decode_expr(code, kind)?;
    Ok(Membership {
        member: expr.contains(space, point),
        out_of_range: expr.out_of_range(space),
    })
}

/// A literal of a set expression in disjunctive normal form: `(positive, m, n)`
/// stands for `Bᵐₙ` or its complement.
pub type Literal = (bool, u64, u64);

/// Code of a literal.
pub fn encode_literal(&(positive, m, n): &Literal) -> Result<BigUint, BorelError> {
    tuple_encode_u64(&[if positive { 2 } else { 1 }, m, n])
}

/// Code of the union of intersections of literals.
pub fn encode_dnf(terms: &[Vec<Literal>]) -> Result<BigUint, BorelError> {
    let caps = terms
        .iter()
        .map(|t| tuple_encode(&t.iter().map(encode_literal).collect::<Result<Vec<_>, _>>()?))
        .collect::<Result<Vec<_>, _>>()?;
    tuple_encode(&caps)
}

/// Codes for a stratified decode: a leaf lists `A`-codes `g(2), g(3), …`,
/// a node lists child assignments with an optional default for the rest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CodeAssignment {
    Leaf {
        #[serde(with = "codes_str")]
        codes: Vec<BigUint>,
    },
    Node {
        children: Vec<CodeAssignment>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        default: Option<Box<CodeAssignment>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stratum {
    #[serde(rename = "pi")]
    Pi,
    #[serde(rename = "sigma")]
    Sigma,
}

impl Stratum {
    fn dual(self) -> Stratum {
        match self {
            Stratum::Pi => Stratum::Sigma,
            Stratum::Sigma => Stratum::Pi,
        }
    }
}

impl FromStr for Stratum {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "pi" => Ok(Stratum::Pi),
            "sigma" => Ok(Stratum::Sigma),
            _ => Err(format!("unknown stratum {s:?}, expected pi or sigma")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StratifiedMembership {
    pub member: bool,
    /// Set when some node had distinct children beyond the cap.
    pub truncated: bool,
    /// Child paths whose remaining children were cut off.
    pub truncated_at: Vec<Vec<usize>>,
    #[serde(serialize_with = "ser_pairs")]
    pub out_of_range: Vec<(BigUint, BigUint)>,
}

/// Membership of `point` in `⟦g⟧^Π_s` or `⟦g⟧^Σ_s`.
///
/// A node ranges over children `1..=child_cap`. A node assignment without
/// a default describes exactly its listed children; with a default, all
/// children past the listed ones decode to the same set and are visited once.
pub fn decode_stratified(
    s: &Stump,
    g: &CodeAssignment,
    kind: Stratum,
    space: &TruncatedBaire,
    point: &[u32],
    child_cap: usize,
) -> Result<StratifiedMembership, BorelError> {
    if child_cap == 0 {
        return Err(BorelError::ZeroCap);
    }
    space.check_point(point)?;
    let mut out = StratifiedMembership {
        member: false,
        truncated: false,
        truncated_at: Vec::new(),
        out_of_range: Vec::new(),
    };
    let mut path = Vec::new();
    out.member = stratified(s, g, kind, space, point, child_cap, &mut path, &mut out)?;
    out.truncated = !out.truncated_at.is_empty();
    out.out_of_range.sort();
    out.out_of_range.dedup();
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn stratified(
    s: &Stump,
    g: &CodeAssignment,
    kind: Stratum,
    space: &TruncatedBaire,
    point: &[u32],
    cap: usize,
    path: &mut Vec<usize>,
    out: &mut StratifiedMembership,
) -> Result<bool, BorelError> {
    match (s, g) {
        (Stump::Leaf, CodeAssignment::Leaf { codes }) => {
            let mut sets = Vec::with_capacity(codes.len());
            for c in codes {
                let e = decode_expr(c, SetKind::A)?;
                out.out_of_range.extend(e.out_of_range(space));
                sets.push(e.contains(space, point));
            }
            Ok(match kind {
                Stratum::Pi => sets.iter().all(|&b| b),
                Stratum::Sigma => sets.iter().any(|&b| b),
            })
        }
        (Stump::Node(listed), CodeAssignment::Node { children, default }) => {
            let listed_len = listed.len().max(children.len());
            // With a default, child listed_len + 1 represents every later child.
            let distinct = if default.is_some() { listed_len + 1 } else { children.len() };
            if distinct == 0 {
                path.push(1);
                let err = BorelError::MissingCode(path.clone());
                path.pop();
                return Err(err);
            }
            let explored = distinct.min(cap);
            if explored < distinct {
                out.truncated_at.push(path.clone());
            }
            let mut acc = matches!(kind, Stratum::Pi);
            for n in 1..=explored {
                path.push(n);
                let sub_s = s.child(n).expect("node");
                let sub_g = match children.get(n - 1).or(default.as_deref()) {
                    Some(c) => c,
                    None => return Err(BorelError::MissingCode(path.clone())),
                };
                let v = stratified(sub_s, sub_g, kind.dual(), space, point, cap, path, out)?;
                path.pop();
                acc = match kind {
                    Stratum::Pi => acc && v,
                    Stratum::Sigma => acc || v,
                };
            }
            if listed.len() > children.len() && default.is_none() {
                path.push(children.len() + 1);
                let err = BorelError::MissingCode(path.clone());
                path.pop();
                return Err(err);
            }
            Ok(acc)
        }
        _ => Err(BorelError::ShapeMismatch(path.clone())),
    }
}

fn ser_big<S: Serializer>(k: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(k)
}

fn ser_pairs<S: Serializer>(pairs: &[(BigUint, BigUint)], s: S) -> Result<S::Ok, S::Error> {
    let v: Vec<(String, String)> = pairs.iter().map(|(m, n)| (m.to_string(), n.to_string())).collect();
    v.serialize(s)
}

/// Codes as decimal strings; JSON integers are accepted on input.
mod codes_str {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Code {
        Int(u64),
        Str(String),
    }

    pub fn serialize<S: Serializer>(codes: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = codes.iter().map(BigUint::to_string).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        Vec::<Code>::deserialize(d)?
            .into_iter()
            .map(|c| match c {
                Code::Int(0) => Err(serde::de::Error::custom("codes start at 1")),
                Code::Int(k) => Ok(BigUint::from(k)),
                Code::Str(s) => match s.parse::<BigUint>() {
                    Ok(k) if !k.is_zero() => Ok(k),
                    _ => Err(serde::de::Error::custom(format!("invalid code {s:?}"))),
                },
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(k: u64) -> BigUint {
        BigUint::from(k)
    }

    #[test]
    fn pairing_fixed_points() {
        assert_eq!(pair_u64(1, 1).unwrap(), big(2));
        assert_eq!(unpair(&big(2)).unwrap(), (big(1), big(1)));
        assert_eq!(pair_u64(2, 1).unwrap(), big(3));
        assert_eq!(pair_u64(1, 2).unwrap(), big(4));
        assert_eq!(unpair(&big(1)), Err(BorelError::Terminator));
        assert_eq!(pair_u64(0, 3), Err(BorelError::ZeroArgument));
        for k in 2..5000u64 {
            let (a, b) = unpair(&big(k)).unwrap();
            assert_eq!(pair(&a, &b).unwrap(), big(k));
        }
    }

    #[test]
    fn tuples() {
        assert_eq!(tuple_encode(&[]).unwrap(), big(1));
        let code = tuple_encode_u64(&[3, 1, 4]).unwrap();
        assert_eq!(tuple_decode(&code).unwrap(), vec![big(3), big(1), big(4)]);
        assert_eq!(tuple_decode(&pair_u64(5, 1).unwrap()).unwrap(), vec![big(5)]);
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(stump_alpha(&Stump::Leaf), 0);
        assert_eq!(stump_alpha(&Stump::node([])), 1);
        assert_eq!(stump_alpha(&Stump::node([Stump::Leaf, Stump::Leaf])), 1);
        assert_eq!(stump_alpha(&Stump::node([Stump::node([Stump::Leaf])])), 2);
        let s = Stump::node([Stump::Leaf, Stump::node([Stump::node([])])]);
        assert_eq!(stump_alpha_by_function(&|k| s.as_function(k), 3), 3);
    }

    #[test]
    fn stump_json() {
        let s: Stump = serde_json::from_str(r#"{"node":[{"leaf":true},{"node":[]}]}"#).unwrap();
        assert_eq!(s, Stump::node([Stump::Leaf, Stump::node([])]));
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"node":[{"leaf":true},{"node":[]}]}"#);
        assert!(serde_json::from_str::<Stump>(r#"{"leaf":false}"#).is_err());
    }

    #[test]
    fn basic_decode() {
        let space = TruncatedBaire::new(3, 3).unwrap();
        let b = tuple_encode_u64(&[2, 2, 3]).unwrap();
        let cb = tuple_encode_u64(&[1, 2, 3]).unwrap();
        let p = [1, 1, 2];
        assert!(decode_set(&b, SetKind::Sprime, &space, &p).unwrap().member);
        assert!(!decode_set(&cb, SetKind::Sprime, &space, &p).unwrap().member);
        assert!(!decode_set(&big(7), SetKind::Sprime, &space, &p).unwrap().member);
        let far = tuple_encode_u64(&[1, 2, 9]).unwrap();
        let m = decode_set(&far, SetKind::Sprime, &space, &p).unwrap();
        assert!(m.member);
        assert_eq!(m.out_of_range, vec![(big(2), big(9))]);
        assert!(decode_set(&big(1), SetKind::Scap, &space, &p).unwrap().member);
        assert!(!decode_set(&big(1), SetKind::A, &space, &p).unwrap().member);
    }

    #[test]
    fn stratified_examples() {
        let space = TruncatedBaire::new(2, 2).unwrap();
        let a = |m| encode_dnf(&[vec![(true, m, 1)]]).unwrap();
        let leaf = CodeAssignment::Leaf { codes: vec![a(1)] };
        for p in space.points() {
            let r = decode_stratified(&Stump::Leaf, &leaf, Stratum::Sigma, &space, &p, 4).unwrap();
            assert_eq!(r.member, p[0] == 1);
        }
        let s = Stump::node([Stump::Leaf, Stump::Leaf]);
        let g = CodeAssignment::Node {
            children: vec![
                CodeAssignment::Leaf { codes: vec![a(1)] },
                CodeAssignment::Leaf { codes: vec![a(2)] },
            ],
            default: None,
        };
        for p in space.points() {
            let pi = decode_stratified(&s, &g, Stratum::Pi, &space, &p, 2).unwrap();
            assert!(!pi.member && !pi.truncated);
            assert!(decode_stratified(&s, &g, Stratum::Sigma, &space, &p, 2).unwrap().member);
            assert!(decode_stratified(&s, &g, Stratum::Pi, &space, &p, 1).unwrap().truncated);
        }
        let missing = CodeAssignment::Node {
            children: vec![],
            default: None,
        };
        assert_eq!(
            decode_stratified(&s, &missing, Stratum::Pi, &space, &[1, 1], 2),
            Err(BorelError::MissingCode(vec![1]))
        );
        assert!(matches!(
            decode_stratified(&Stump::Leaf, &g, Stratum::Pi, &space, &[1, 1], 2),
            Err(BorelError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn assignment_json() {
        let g: CodeAssignment =
            serde_json::from_str(r#"{"children":[{"codes":[5,"123456789012345678901234567890"]}],"default":{"codes":[]}}"#)
                .unwrap();
        match &g {
            CodeAssignment::Node { children, default } => {
                assert_eq!(children.len(), 1);
                assert!(default.is_some());
            }
            _ => panic!("expected a node"),
        }
        assert!(serde_json::from_str::<CodeAssignment>(r#"{"codes":[0]}"#).is_err());
    }

    #[test]
    fn space_parsing() {
        let s: TruncatedBaire = "4x4".parse().unwrap();
        assert_eq!(s.points().count(), 256);
        assert!("4x".parse::<TruncatedBaire>().is_err());
        assert!(TruncatedBaire::new(7, 10).is_err());
        assert!(s.check_point(&[1, 2, 3, 5]).is_err());
    }
}
