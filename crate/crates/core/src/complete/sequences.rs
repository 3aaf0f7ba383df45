// SPDX-License-Identifier: Apache-2.0

//! Modulus-bearing rational sequences and their JSON descriptors.

use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::rational::{parse_rational, Rational};

pub type Generator = Arc<dyn Fn(u64) -> Rational + Send + Sync>;
pub type Modulus = Arc<dyn Fn(u32) -> u64 + Send + Sync>;

/// A rational sequence with a claimed cauchy modulus: for every level `k`
/// and all `i, j ≥ modulus(k)`, `|g_i − g_j| < 2^-k`.
#[derive(Clone)]
pub struct ModulusCauchySeq {
    name: String,
    generator: Generator,
    modulus: Modulus,
}

impl fmt::Debug for ModulusCauchySeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModulusCauchySeq").field("name", &self.name).finish()
    }
}

impl ModulusCauchySeq {
    pub fn new(name: impl Into<String>, generator: Generator, modulus: Modulus) -> Self {
        ModulusCauchySeq {
            name: name.into(),
            generator,
            modulus,
        }
    }

    pub fn constant(q: Rational) -> Self {
        let name = format!("constant {q}");
        ModulusCauchySeq::new(name, Arc::new(move |_| q.clone()), Arc::new(|_| 0))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn term(&self, n: u64) -> Rational {
        (self.generator)(n)
    }

    pub fn modulus(&self, k: u32) -> u64 {
        (self.modulus)(k)
    }

    /// The term at the modulus index for level `k`.
    pub fn at_level(&self, k: u32) -> Rational {
        self.term(self.modulus(k))
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }
}

static SQRT2_CACHE: Mutex<Option<(usize, BigInt)>> = Mutex::new(None);

/// `⌊√2 · 10^digits⌋`, from one cached integer square root.
pub fn sqrt2_scaled(digits: usize) -> BigInt {
    let mut cache = SQRT2_CACHE.lock().unwrap_or_else(|p| p.into_inner());
    let have = cache.as_ref().map_or(0, |(d, _)| *d);
    if cache.is_none() || have < digits {
        let d = digits.max(2 * have).max(64);
        let s = (BigInt::from(2) * num_traits::pow(BigInt::from(10), 2 * d)).sqrt();
        *cache = Some((d, s));
    }
    let (d, s) = cache.as_ref().expect("filled above");
    s / num_traits::pow(BigInt::from(10), d - digits)
}

/// Least `m` with `10^m ≥ 2^k`.
pub fn decimal_digits_for_level(k: u32) -> u64 {
    let target = BigInt::one() << k as usize;
    let mut m = 0u64;
    let mut p = BigInt::one();
    while p < target {
        p *= 10;
        m += 1;
    }
    m
}

/// `digits / 10^n` in lowest terms. The denominator only has the prime
/// factors 2 and 5, so reducing strips those instead of running a gcd.
pub fn decimal_fraction(digits: BigInt, n: u32) -> Rational {
    use num_integer::Integer;
    use num_traits::Zero;
    if digits.is_zero() {
        return Rational::zero();
    }
    let twos = digits.trailing_zeros().unwrap_or(0).min(n as u64);
    let mut num = digits >> twos as usize;
    let mut fives = 0u32;
    let five = BigInt::from(5);
    while fives < n {
        let (q, r) = num.div_rem(&five);
        if !r.is_zero() {
            break;
        }
        num = q;
        fives += 1;
    }
    let den = (BigInt::one() << (n as usize - twos as usize)) * num_traits::pow(five, (n - fives) as usize);
    Rational::new_raw(num, den)
}

/// `g_n = ⌊√2 · 10^n⌋ / 10^n`; consecutive tails differ by less than
/// `10^-n`.
pub fn sqrt2_decimal() -> ModulusCauchySeq {
    ModulusCauchySeq::new(
        "sqrt2 decimal truncation",
        Arc::new(|n| decimal_fraction(sqrt2_scaled(n as usize), n as u32)),
        Arc::new(decimal_digits_for_level),
    )
}

/// Numerator and denominator of the `n`-th convergent of `[1; 2, 2, …]`.
pub fn sqrt2_convergent(n: u64) -> (BigInt, BigInt) {
    let (mut p, mut q) = (BigInt::one(), BigInt::one());
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::from(0));
    for _ in 0..n {
        let p_next = 2 * &p + &p_prev;
        let q_next = 2 * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
    (p, q)
}

/// Convergents `1, 3/2, 7/5, …`. Terms after the `n`-th lie within
/// `1 / (q_n q_{n+1})` of it, so the modulus is the least `n` with
/// `q_n q_{n+1} > 2^k`.
pub fn sqrt2_continued_fraction() -> ModulusCauchySeq {
    ModulusCauchySeq::new(
        "sqrt2 continued fraction",
        Arc::new(|n| {
            let (p, q) = sqrt2_convergent(n);
            Rational::new(p, q)
        }),
        Arc::new(|k| {
            let bound = BigInt::one() << k as usize;
            let mut n = 0u64;
            loop {
                let (_, q) = sqrt2_convergent(n);
                let (_, q_next) = sqrt2_convergent(n + 1);
                if q * q_next > bound {
                    return n;
                }
                n += 1;
            }
        }),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Sqrt2,
}

/// JSON description of a modulus-bearing sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SeqDescriptor {
    DecimalTruncation {
        target: Target,
    },
    ContinuedFraction {
        target: Target,
    },
    /// The embedded point `value`.
    Constant {
        value: String,
    },
    /// Finite tables; past the end the last entry repeats.
    Table {
        values: Vec<String>,
        modulus: Vec<u64>,
    },
    /// `term` in the index `n`, `modulus` in the level `k`.
    Expression {
        term: String,
        modulus: String,
    },
}

impl SeqDescriptor {
    pub fn build(&self) -> Result<ModulusCauchySeq> {
        Ok(match self {
            SeqDescriptor::DecimalTruncation { target: Target::Sqrt2 } => sqrt2_decimal(),
            SeqDescriptor::ContinuedFraction { target: Target::Sqrt2 } => sqrt2_continued_fraction(),
            SeqDescriptor::Constant { value } => ModulusCauchySeq::constant(parse_rational(value)?),
            SeqDescriptor::Table { values, modulus } => {
                if values.is_empty() || modulus.is_empty() {
                    return Err(Error::InvalidArgument("table sequences need values and a modulus".into()));
                }
                let values: Vec<Rational> = values.iter().map(|v| parse_rational(v)).collect::<Result<_>>()?;
                let modulus = modulus.clone();
                let last = values.len() - 1;
                ModulusCauchySeq::new(
                    "table",
                    Arc::new(move |n| values[(n as usize).min(last)].clone()),
                    Arc::new(move |k| modulus[(k as usize).min(modulus.len() - 1)]),
                )
            }
            SeqDescriptor::Expression { term, modulus } => {
                let term_expr = Expr::parse(term)?;
                let modulus_expr = Expr::parse(modulus)?;
                // Fail at load time rather than inside a generator call.
                for n in 0..4u64 {
                    term_expr.eval_at("n", &Rational::from_integer(BigInt::from(n)))?;
                }
                for k in 0..4u32 {
                    modulus_expr.eval_index("k", k as u64)?;
                }
                ModulusCauchySeq::new(
                    term.clone(),
                    Arc::new(move |n| {
                        term_expr
                            .eval_at("n", &Rational::from_integer(BigInt::from(n)))
                            .unwrap_or_else(|e| panic!("sequence term failed at n = {n}: {e}"))
                    }),
                    Arc::new(move |k| {
                        modulus_expr
                            .eval_index("k", k as u64)
                            .unwrap_or_else(|e| panic!("modulus failed at k = {k}: {e}"))
                    }),
                )
            }
        })
    }
}

/// Decimal rendering with `digits` fractional digits, truncated toward zero.
pub fn decimal_string(q: &Rational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (q * Rational::from_integer(scale)).trunc().to_integer();
    let negative = scaled < BigInt::from(0) || (scaled == BigInt::from(0) && *q < Rational::from_integer(BigInt::from(0)));
    let digits_str = scaled.magnitude().to_string();
    let padded = format!("{digits_str:0>width$}", width = digits + 1);
    let (int, frac) = padded.split_at(padded.len() - digits);
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

pub fn approx_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
