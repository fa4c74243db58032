//! The sequence DSL.
//!
//! ```json
//! {"kind": "interval", "template": "[0, 1 + 1/n] ∪ {3}", "modulus": "ceil(1/eps)"}
//! {"kind": "interval", "stages": [[{"lo": "0", "hi": "1", "lo_closed": true, "hi_closed": true}]]}
//! {"kind": "step", "terms": [{"coef": "1/n", "set": "[n, n+1]"}]}
//! {"kind": "step", "stages": [{"breakpoints": [...], "open_values": [...], "point_values": [...]}]}
//! ```
//!
//! Templates are in the stage variable `n`, moduli in `eps`. Piece syntax is
//! `[a, b]`, `(a, b)`, half-open mixes, `{a}` and `∅`, joined by `∪` or `U`.
//! Explicit stage lists repeat their last entry; their default modulus is
//! the list length.

use std::collections::BTreeMap;
use std::sync::Arc;

use latval::instances::{Interval, IntervalSet, StepFn};
use latval::sequences::{Direction, Modulus};
use latval::Rational;
use serde::Deserialize;

use crate::expr::{parse, Expr, Parser};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepTermSpec {
    pub coef: String,
    pub set: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeqSpec {
    pub kind: SeqKind,
    #[serde(default)]
    pub template: Option<String>,
    #[serde(default)]
    pub terms: Option<Vec<StepTermSpec>>,
    #[serde(default)]
    pub stages: Option<Vec<serde_json::Value>>,
    #[serde(default)]
    pub modulus: Option<String>,
    #[serde(default)]
    pub direction: Option<DirectionSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeqKind {
    Interval,
    Step,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionSpec {
    Decreasing,
    Increasing,
}

impl From<DirectionSpec> for Direction {
    fn from(d: DirectionSpec) -> Self {
        match d {
            DirectionSpec::Decreasing => Direction::Decreasing,
            DirectionSpec::Increasing => Direction::Increasing,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PieceTemplate {
    lo: Expr,
    hi: Expr,
    lo_closed: bool,
    hi_closed: bool,
}

/// A union of interval pieces with endpoints in `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SetTemplate(Vec<PieceTemplate>);

impl SetTemplate {
    pub fn parse(src: &str) -> Result<Self, String> {
        let mut p = Parser::new(src, &["n"]);
        let mut pieces = Vec::new();
        if p.eat('∅') {
            if !p.at_end() {
                return Err(p.error("unexpected input after ∅"));
            }
            return Ok(SetTemplate(pieces));
        }
        loop {
            match p.bump() {
                Some('{') => {
                    if p.eat('}') {
                        // `{}` is the empty set.
                    } else {
                        let x = p.expr()?;
                        p.expect('}')?;
                        pieces.push(PieceTemplate {
                            lo: x.clone(),
                            hi: x,
                            lo_closed: true,
                            hi_closed: true,
                        });
                    }
                }
                Some(open @ ('[' | '(')) => {
                    let lo = p.expr()?;
                    p.expect(',')?;
                    let hi = p.expr()?;
                    let close = p.bump().ok_or_else(|| p.error("unterminated interval"))?;
                    if close != ']' && close != ')' {
                        return Err(p.error("expected ']' or ')'"));
                    }
                    pieces.push(PieceTemplate {
                        lo,
                        hi,
                        lo_closed: open == '[',
                        hi_closed: close == ']',
                    });
                }
                _ => return Err(p.error("expected '[', '(' or '{'")),
            }
            if p.at_end() {
                break;
            }
            if !(p.eat('∪') || p.eat('U') || p.eat('u')) {
                return Err(p.error("expected '∪' between pieces"));
            }
        }
        Ok(SetTemplate(pieces))
    }

    pub fn at(&self, n: u64) -> Result<IntervalSet, String> {
        let env = BTreeMap::from([("n", Rational::integer(n as i64))]);
        let mut out = Vec::with_capacity(self.0.len());
        for p in &self.0 {
            out.push(Interval::new(p.lo.eval(&env)?, p.lo_closed, p.hi.eval(&env)?, p.hi_closed));
        }
        IntervalSet::make(out).map_err(|e| format!("stage {n}: {e}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
struct StepTemplate(Vec<(Expr, SetTemplate)>);

impl StepTemplate {
    fn at(&self, n: u64) -> Result<StepFn, String> {
        let env = BTreeMap::from([("n", Rational::integer(n as i64))]);
        let mut f = StepFn::zero();
        for (c, s) in &self.0 {
            let c = c.eval(&env)?;
            for piece in s.at(n)?.pieces() {
                f = f.add(&StepFn::indicator(piece, c.clone()).map_err(|e| e.to_string())?);
            }
        }
        Ok(f)
    }
}

/// A loaded sequence over interval sets or step functions.
#[derive(Clone)]
pub enum LoadedSeq {
    Interval(Arc<dyn Fn(u64) -> IntervalSet + Send + Sync>),
    Step(Arc<dyn Fn(u64) -> StepFn + Send + Sync>),
}

pub struct Loaded {
    pub seq: LoadedSeq,
    pub modulus: Option<Modulus>,
    pub direction: Direction,
}

fn modulus_from(src: &str) -> Result<Modulus, String> {
    let e = parse(src, &["eps"]).map_err(|m| format!("modulus: {m}"))?;
    // Probe once so obvious evaluation errors surface as input errors.
    e.eval_index(&BTreeMap::from([("eps", Rational::new(1, 1024))]))
        .map_err(|m| format!("modulus: {m}"))?;
    Ok(Arc::new(move |eps: &Rational| {
        e.eval_index(&BTreeMap::from([("eps", eps.clone())])).unwrap_or(u64::MAX)
    }))
}

/// Parses a spec and evaluates stages `1..=validate_depth` up front so that
/// template errors are reported as input errors.
pub fn load(spec: &SeqSpec, validate_depth: u64) -> Result<Loaded, String> {
    let direction = spec.direction.map(Direction::from).unwrap_or(Direction::Decreasing);
    let sources = [spec.template.is_some(), spec.terms.is_some(), spec.stages.is_some()];
    if sources.iter().filter(|&&b| b).count() != 1 {
        return Err("exactly one of \"template\", \"terms\" or \"stages\" is required".into());
    }
    let mut modulus = spec.modulus.as_deref().map(modulus_from).transpose()?;
    let seq = match (spec.kind, &spec.template, &spec.terms, &spec.stages) {
        (SeqKind::Interval, Some(t), _, _) => {
            let t = SetTemplate::parse(t).map_err(|m| format!("template: {m}"))?;
            for n in 1..=validate_depth {
                t.at(n).map_err(|m| format!("template: {m}"))?;
            }
            LoadedSeq::Interval(Arc::new(move |n| t.at(n).expect("validated stage")))
        }
        (SeqKind::Step, _, Some(terms), _) => {
            let mut parsed = Vec::new();
            for (i, term) in terms.iter().enumerate() {
                let c = parse(&term.coef, &["n"]).map_err(|m| format!("terms[{i}].coef: {m}"))?;
                let s = SetTemplate::parse(&term.set).map_err(|m| format!("terms[{i}].set: {m}"))?;
                parsed.push((c, s));
            }
            let t = StepTemplate(parsed);
            for n in 1..=validate_depth {
                t.at(n).map_err(|m| format!("terms: {m}"))?;
            }
            LoadedSeq::Step(Arc::new(move |n| t.at(n).expect("validated stage")))
        }
        (kind, _, _, Some(stages)) => {
            if stages.is_empty() {
                return Err("stages: at least one stage is required".into());
            }
            let len = stages.len() as u64;
            modulus.get_or_insert_with(|| Arc::new(move |_: &Rational| len));
            match kind {
                SeqKind::Interval => {
                    let sets = stages
                        .iter()
                        .enumerate()
                        .map(|(i, v)| {
                            let raw: Vec<Interval> =
                                serde_json::from_value(v.clone()).map_err(|e| format!("stages[{i}]: {e}"))?;
                            IntervalSet::make(raw).map_err(|e| format!("stages[{i}]: {e}"))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    LoadedSeq::Interval(Arc::new(move |n| sets[(n.max(1) as usize - 1).min(sets.len() - 1)].clone()))
                }
                SeqKind::Step => {
                    let fs = stages
                        .iter()
                        .enumerate()
                        .map(|(i, v)| serde_json::from_value::<StepFn>(v.clone()).map_err(|e| format!("stages[{i}]: {e}")))
                        .collect::<Result<Vec<_>, _>>()?;
                    LoadedSeq::Step(Arc::new(move |n| fs[(n.max(1) as usize - 1).min(fs.len() - 1)].clone()))
                }
            }
        }
        (SeqKind::Interval, _, Some(_), _) => return Err("\"terms\" needs kind \"step\"".into()),
        (SeqKind::Step, Some(_), _, _) => return Err("\"template\" needs kind \"interval\"; use \"terms\"".into()),
        _ => unreachable!("exactly one source is set"),
    };
    Ok(Loaded {
        seq,
        modulus,
        direction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn set_templates() {
        let t = SetTemplate::parse("[0, 1 + 1/n]").unwrap();
        assert_eq!(t.at(4).unwrap(), IntervalSet::closed(0, r(5, 4)));
        let u = SetTemplate::parse("(0, 1) ∪ {3} U [n, n+1)").unwrap();
        let s = u.at(5).unwrap();
        assert!(s.contains(&r(1, 2)) && s.contains(&r(3, 1)) && s.contains(&r(5, 1)));
        assert!(!s.contains(&r(6, 1)) && !s.contains(&r(0, 1)));
        assert_eq!(SetTemplate::parse("∅").unwrap().at(1).unwrap(), IntervalSet::empty());
        assert!(SetTemplate::parse("[0, 1").is_err());
        assert!(SetTemplate::parse("[1, 0]").unwrap().at(1).is_err());
    }

    #[test]
    fn step_terms() {
        let spec: SeqSpec =
            serde_json::from_str(r#"{"kind":"step","terms":[{"coef":"1/n","set":"[n, n+1]"}]}"#).unwrap();
        let loaded = load(&spec, 4).unwrap();
        match loaded.seq {
            LoadedSeq::Step(f) => assert_eq!(f(4).integral(), r(1, 4)),
            _ => panic!("expected a step sequence"),
        }
    }

    #[test]
    fn stage_lists_repeat_and_default_modulus() {
        let spec: SeqSpec = serde_json::from_str(
            r#"{"kind":"interval","stages":[[{"lo":"0","hi":"2","lo_closed":true,"hi_closed":true}],[{"lo":"0","hi":"1","lo_closed":true,"hi_closed":true}]]}"#,
        )
        .unwrap();
        let loaded = load(&spec, 3).unwrap();
        assert_eq!(loaded.modulus.unwrap()(&r(1, 10)), 2);
        match loaded.seq {
            LoadedSeq::Interval(f) => assert_eq!(f(9), IntervalSet::closed(0, 1)),
            _ => panic!("expected an interval sequence"),
        }
        let bad: SeqSpec = serde_json::from_str(r#"{"kind":"interval","template":"[0,1]","stages":[]}"#).unwrap();
        assert!(load(&bad, 1).is_err());
    }
}
