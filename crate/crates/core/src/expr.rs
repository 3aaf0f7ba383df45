// SPDX-License-Identifier: Apache-2.0

//! Exact rational expressions in named variables.
//!
//! Grammar: numbers (`3`, `1.5`, `2/3` via division), variables, `+ - * /`,
//! `^` with an integer exponent, comparisons `< <= > >= ==` (yielding 1 or
//! 0), parentheses, and the functions `abs`, `floor`, `min`, `max`,
//! `if(cond, then, else)`.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{parse_rational, Rational};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rational),
    Var(String),
    Neg(Box<Expr>),
    Bin(Op, Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Sym(&'static str),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            out.push((start, Tok::Num(src[start..i].to_string())));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else {
            let two = src.get(i..i + 2);
            let sym = match two {
                Some("<=") => "<=",
                Some(">=") => ">=",
                Some("==") => "==",
                _ => match c {
                    '+' => "+",
                    '-' => "-",
                    '*' => "*",
                    '/' => "/",
                    '^' => "^",
                    '<' => "<",
                    '>' => ">",
                    '(' => "(",
                    ')' => ")",
                    ',' => ",",
                    _ => return Err(Error::Parse(format!("unexpected character {c:?} at position {i}"))),
                },
            };
            out.push((i, Tok::Sym(sym)));
            i += sym.len();
        }
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek_sym(&self) -> Option<&'static str> {
        match self.toks.get(self.pos) {
            Some((_, Tok::Sym(s))) => Some(s),
            _ => None,
        }
    }

    fn error(&self, what: &str) -> Error {
        let at = self.toks.get(self.pos).map_or(self.src.len(), |(p, _)| *p);
        Error::Parse(format!("{what} at position {at} in {:?}", self.src))
    }

    fn expect(&mut self, sym: &str) -> Result<()> {
        if self.peek_sym() == Some(sym) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{sym}`")))
        }
    }

    fn comparison(&mut self) -> Result<Expr> {
        let lhs = self.sum()?;
        let op = match self.peek_sym() {
            Some("<") => Op::Lt,
            Some("<=") => Op::Le,
            Some(">") => Op::Gt,
            Some(">=") => Op::Ge,
            Some("==") => Op::Eq,
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.sum()?;
        Ok(Expr::Bin(op, Box::new(lhs), Box::new(rhs)))
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        while let Some(op) = match self.peek_sym() {
            Some("+") => Some(Op::Add),
            Some("-") => Some(Op::Sub),
            _ => None,
        } {
            self.pos += 1;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.product()?));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = match self.peek_sym() {
            Some("*") => Some(Op::Mul),
            Some("/") => Some(Op::Div),
            _ => None,
        } {
            self.pos += 1;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek_sym() == Some("-") {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek_sym() == Some("^") {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Bin(Op::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let Some((_, tok)) = self.toks.get(self.pos).cloned() else {
            return Err(self.error("unexpected end of expression"));
        };
        self.pos += 1;
        match tok {
            Tok::Num(s) => Ok(Expr::Num(parse_rational(&s)?)),
            Tok::Ident(name) => {
                if self.peek_sym() == Some("(") {
                    self.pos += 1;
                    let mut args = vec![self.comparison()?];
                    while self.peek_sym() == Some(",") {
                        self.pos += 1;
                        args.push(self.comparison()?);
                    }
                    self.expect(")")?;
                    let arity = match name.as_str() {
                        "abs" | "floor" => 1,
                        "min" | "max" => 2,
                        "if" => 3,
                        _ => return Err(Error::Parse(format!("unknown function `{name}`"))),
                    };
                    if args.len() != arity {
                        return Err(Error::Parse(format!("`{name}` takes {arity} argument(s)")));
                    }
                    Ok(Expr::Call(name, args))
                } else {
                    Ok(Expr::Var(name))
                }
            }
            Tok::Sym("(") => {
                let e = self.comparison()?;
                self.expect(")")?;
                Ok(e)
            }
            Tok::Sym(_) => {
                self.pos -= 1;
                Err(self.error("expected a number, variable or `(`"))
            }
        }
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser {
            src,
            toks: tokenize(src)?,
            pos: 0,
        };
        let e = p.comparison()?;
        if p.pos != p.toks.len() {
            return Err(p.error("trailing input"));
        }
        Ok(e)
    }

    /// Names of the free variables, sorted and deduplicated.
    pub fn variables(&self) -> Vec<String> {
        fn walk(e: &Expr, out: &mut Vec<String>) {
            match e {
                Expr::Num(_) => {}
                Expr::Var(v) => out.push(v.clone()),
                Expr::Neg(a) => walk(a, out),
                Expr::Bin(_, a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Expr::Call(_, args) => args.iter().for_each(|a| walk(a, out)),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort();
        out.dedup();
        out
    }

    pub fn eval(&self, env: &dyn Fn(&str) -> Option<Rational>) -> Result<Rational> {
        let truth = |b: bool| if b { Rational::one() } else { Rational::zero() };
        Ok(match self {
            Expr::Num(q) => q.clone(),
            Expr::Var(v) => env(v).ok_or_else(|| Error::InvalidArgument(format!("unbound variable `{v}`")))?,
            Expr::Neg(a) => -a.eval(env)?,
            Expr::Bin(op, a, b) => {
                let x = a.eval(env)?;
                let y = b.eval(env)?;
                match op {
                    Op::Add => x + y,
                    Op::Sub => x - y,
                    Op::Mul => x * y,
                    Op::Div => {
                        if y.is_zero() {
                            return Err(Error::InvalidArgument("division by zero".into()));
                        }
                        x / y
                    }
                    Op::Pow => {
                        if !y.is_integer() {
                            return Err(Error::InvalidArgument("exponent must be an integer".into()));
                        }
                        let e = y
                            .to_integer()
                            .to_i32()
                            .filter(|e| e.abs() <= 4096)
                            .ok_or_else(|| Error::InvalidArgument("exponent too large".into()))?;
                        if e < 0 && x.is_zero() {
                            return Err(Error::InvalidArgument("division by zero".into()));
                        }
                        num_traits::Pow::pow(x, e)
                    }
                    Op::Lt => truth(x < y),
                    Op::Le => truth(x <= y),
                    Op::Gt => truth(x > y),
                    Op::Ge => truth(x >= y),
                    Op::Eq => truth(x == y),
                }
            }
            Expr::Call(name, args) => match name.as_str() {
                "abs" => args[0].eval(env)?.abs(),
                "floor" => Rational::from_integer(args[0].eval(env)?.floor().to_integer()),
                "min" => args[0].eval(env)?.min(args[1].eval(env)?),
                "max" => args[0].eval(env)?.max(args[1].eval(env)?),
                "if" => {
                    if args[0].eval(env)?.is_zero() {
                        args[2].eval(env)?
                    } else {
                        args[1].eval(env)?
                    }
                }
                _ => unreachable!("arity checked at parse time"),
            },
        })
    }

    /// Evaluates with a single variable bound.
    pub fn eval_at(&self, var: &str, value: &Rational) -> Result<Rational> {
        self.eval(&|v| (v == var).then(|| value.clone()))
    }

    /// Evaluates to a nonnegative integer, for index-valued expressions.
    pub fn eval_index(&self, var: &str, value: u64) -> Result<u64> {
        let q = self.eval_at(var, &Rational::from_integer(BigInt::from(value)))?;
        if !q.is_integer() || q.is_negative() {
            return Err(Error::InvalidArgument(format!(
                "index expression gave {q} at {var} = {value}"
            )));
        }
        q.to_integer()
            .to_u64()
            .ok_or_else(|| Error::InvalidArgument("index too large".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{from_int, ratio};

    fn at(src: &str, t: Rational) -> Rational {
        Expr::parse(src).unwrap().eval_at("t", &t).unwrap()
    }

    #[test]
    fn arithmetic() {
        assert_eq!(at("1 + 2 * 3", from_int(0)), from_int(7));
        assert_eq!(at("(1 + 2) * 3", from_int(0)), from_int(9));
        assert_eq!(at("-t^2", from_int(3)), from_int(-9));
        assert_eq!(at("2^-3", from_int(0)), ratio(1, 8));
        assert_eq!(at("1/3 - 0.5", from_int(0)), ratio(-1, 6));
        assert_eq!(at("2^3^2", from_int(0)), from_int(512));
    }

    #[test]
    fn functions_and_comparisons() {
        assert_eq!(at("if(t < 1/2, 1, 3)", ratio(1, 4)), from_int(1));
        assert_eq!(at("if(t < 1/2, 1, 3)", ratio(1, 2)), from_int(3));
        assert_eq!(at("floor(7/2) + abs(-1)", from_int(0)), from_int(4));
        assert_eq!(at("max(t, 1) - min(t, 1)", from_int(3)), from_int(2));
        assert_eq!(at("t == 2", from_int(2)), from_int(1));
    }

    #[test]
    fn errors() {
        assert!(Expr::parse("1 +").is_err());
        assert!(Expr::parse("foo(1)").is_err());
        assert!(Expr::parse("min(1)").is_err());
        assert!(Expr::parse("1 $ 2").is_err());
        assert!(Expr::parse("(1").is_err());
        let e = Expr::parse("1/t").unwrap();
        assert!(e.eval_at("t", &from_int(0)).is_err());
        assert!(e.eval_at("s", &from_int(1)).is_err());
        assert_eq!(Expr::parse("t*s + t").unwrap().variables(), vec!["s", "t"]);
        assert_eq!(Expr::parse("2^k").unwrap().eval_index("k", 5).unwrap(), 32);
        assert!(Expr::parse("k/2").unwrap().eval_index("k", 1).is_err());
    }
}
