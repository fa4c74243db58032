//! Exact rational expressions over named variables.
//!
//! Grammar: `+ - * / ^`, parentheses, integer and decimal literals,
//! variables, and the functions `ceil`, `floor`, `log2` (ceiling of the
//! base-2 logarithm), `abs`, `min`, `max`.

use std::collections::BTreeMap;

use latval::Rational;
use num::{BigInt, One, Signed, ToPrimitive};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Rational),
    Var(String),
    Neg(Box<Expr>),
    Bin(char, Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
}

const FUNCTIONS: &[(&str, usize)] = &[("ceil", 1), ("floor", 1), ("log2", 1), ("abs", 1), ("min", 2), ("max", 2)];

/// Largest exponent magnitude accepted by `^`.
const MAX_EXPONENT: i64 = 4096;

pub struct Parser<'a> {
    src: &'a str,
    pos: usize,
    vars: &'a [&'a str],
}

impl<'a> Parser<'a> {
    pub fn new(src: &'a str, vars: &'a [&'a str]) -> Self {
        Parser { src, pos: 0, vars }
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> Result<(), String> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected {c:?}")))
        }
    }

    pub fn error(&self, msg: &str) -> String {
        format!("{msg} at offset {} in {:?}", self.pos, self.src)
    }

    pub fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    pub fn expr(&mut self) -> Result<Expr, String> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek() {
            self.bump();
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, String> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek() {
            self.bump();
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, String> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.eat('+');
        let base = self.atom()?;
        if self.eat('^') {
            return Ok(Expr::Bin('^', Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, String> {
        match self.peek() {
            Some('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let len = self.rest().find(|c: char| !(c.is_ascii_digit() || c == '.')).unwrap_or(self.rest().len());
                let lit = &self.rest()[..len];
                let value: Rational = lit.parse().map_err(|_| self.error("malformed number"))?;
                self.pos += len;
                Ok(Expr::Num(value))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let len = self
                    .rest()
                    .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                    .unwrap_or(self.rest().len());
                let name = self.rest()[..len].to_string();
                if let Some(&(_, arity)) = FUNCTIONS.iter().find(|(f, _)| *f == name) {
                    self.pos += len;
                    self.expect('(')?;
                    let mut args = vec![self.expr()?];
                    while self.eat(',') {
                        args.push(self.expr()?);
                    }
                    self.expect(')')?;
                    if args.len() != arity {
                        return Err(self.error(&format!("{name} takes {arity} argument(s)")));
                    }
                    Ok(Expr::Call(name, args))
                } else if self.vars.contains(&name.as_str()) {
                    self.pos += len;
                    Ok(Expr::Var(name))
                } else {
                    Err(self.error(&format!("unknown name {name:?}")))
                }
            }
            _ => Err(self.error("expected a number, variable or '('")),
        }
    }
}

/// Parses a complete expression in the given variables.
pub fn parse(src: &str, vars: &[&str]) -> Result<Expr, String> {
    let mut p = Parser::new(src, vars);
    let e = p.expr()?;
    if !p.at_end() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

fn ceil_log2(x: &Rational) -> Result<Rational, String> {
    if !x.is_positive() {
        return Err(format!("log2 of non-positive {x}"));
    }
    // Smallest k with 2^k ≥ x.
    let mut k: i64 = 0;
    let two = Rational::integer(2);
    let mut p = Rational::one();
    if *x >= p {
        while p < *x {
            p = &p * &two;
            k += 1;
        }
    } else {
        while &p / &two >= *x {
            p = &p / &two;
            k -= 1;
        }
    }
    Ok(Rational::integer(k))
}

impl Expr {
    pub fn eval(&self, env: &BTreeMap<&str, Rational>) -> Result<Rational, String> {
        Ok(match self {
            Expr::Num(r) => r.clone(),
            Expr::Var(v) => env.get(v.as_str()).cloned().ok_or_else(|| format!("unbound variable {v}"))?,
            Expr::Neg(e) => -e.eval(env)?,
            Expr::Bin(op, a, b) => {
                let (x, y) = (a.eval(env)?, b.eval(env)?);
                match op {
                    '+' => x + y,
                    '-' => x - y,
                    '*' => x * y,
                    '/' if y.is_zero() => return Err(format!("division by zero in {x}/{y}")),
                    '/' => x / y,
                    '^' => {
                        let e = y
                            .to_i64()
                            .filter(|e| e.abs() <= MAX_EXPONENT)
                            .ok_or_else(|| format!("exponent {y} is not an integer in ±{MAX_EXPONENT}"))?;
                        if x.is_zero() && e < 0 {
                            return Err("zero to a negative power".into());
                        }
                        x.pow(e as i32)
                    }
                    _ => unreachable!("parser only builds known operators"),
                }
            }
            Expr::Call(f, args) => {
                let vals = args.iter().map(|a| a.eval(env)).collect::<Result<Vec<_>, _>>()?;
                match f.as_str() {
                    "ceil" => Rational::from(vals[0].ceil()),
                    "floor" => Rational::from(vals[0].floor()),
                    "log2" => ceil_log2(&vals[0])?,
                    "abs" => vals[0].abs(),
                    "min" => vals[0].clone().min(vals[1].clone()),
                    "max" => vals[0].clone().max(vals[1].clone()),
                    _ => unreachable!("parser only builds known functions"),
                }
            }
        })
    }

    /// Evaluates to a stage index: the value rounded up, at least 1.
    pub fn eval_index(&self, env: &BTreeMap<&str, Rational>) -> Result<u64, String> {
        let v = self.eval(env)?.ceil();
        if v < BigInt::one() {
            return Ok(1);
        }
        v.to_u64().ok_or_else(|| format!("index {v} is too large"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, n: i64) -> Result<Rational, String> {
        let env = BTreeMap::from([("n", Rational::integer(n))]);
        parse(src, &["n"])?.eval(&env)
    }

    #[test]
    fn arithmetic() {
        assert_eq!(ev("1 + 1/n", 4).unwrap(), Rational::new(5, 4));
        assert_eq!(ev("2^-n", 3).unwrap(), Rational::new(1, 8));
        assert_eq!(ev("-(n - 1) * 0.5", 3).unwrap(), Rational::integer(-1));
        assert_eq!(ev("ceil(7/n)", 2).unwrap(), Rational::integer(4));
        assert_eq!(ev("log2(n)", 5).unwrap(), Rational::integer(3));
        assert_eq!(ev("log2(1/n)", 4).unwrap(), Rational::integer(-2));
        assert_eq!(ev("max(n, 3)", 1).unwrap(), Rational::integer(3));
    }

    #[test]
    fn errors() {
        assert!(ev("1/(n-1)", 1).is_err());
        assert!(parse("1 + m", &["n"]).is_err());
        assert!(parse("1 +", &["n"]).is_err());
        assert!(parse("min(1)", &["n"]).is_err());
        assert!(parse("2 3", &["n"]).is_err());
    }
}
