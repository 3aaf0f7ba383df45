// SPDX-License-Identifier: Apache-2.0

//! Sequences of real functions on a rational interval: uniform convergence
//! with certified witnesses, pointwise cauchyness and regularity of limits.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complete::{cauchy_check, ModulusCauchySeq, ModulusCheck};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::rational::{cmp, format_rational, from_int, parse_rational, pow2_neg, ratio, Rational};

pub type Term = Arc<dyn Fn(u64, &Rational) -> Result<Rational> + Send + Sync>;
/// Rational interval `[lo, hi]` containing the limit at `t`, of width below
/// `2^-precision`.
pub type Enclosure = Arc<dyn Fn(&Rational, u32) -> Result<(Rational, Rational)> + Send + Sync>;
pub type TailBound = Arc<dyn Fn(u64) -> Rational + Send + Sync>;
/// `δ(n, k)`: `|t − s| < 2^-δ` implies `|f_n(t) − f_n(s)| < 2^-k`.
pub type IndexModulus = Arc<dyn Fn(u64, u32) -> u32 + Send + Sync>;
/// `m(t, k)`: the index after which `f_n(t)` stays within `2^-k`.
pub type PointModulus = Arc<dyn Fn(&Rational, u32) -> u64 + Send + Sync>;

/// `[lo, hi]`, or `[lo, hi)` when `hi_open`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interval {
    pub lo: String,
    pub hi: String,
    #[serde(default)]
    pub hi_open: bool,
}

impl Interval {
    pub fn unit(hi_open: bool) -> Self {
        Interval {
            lo: "0".into(),
            hi: "1".into(),
            hi_open,
        }
    }

    fn bounds(&self) -> Result<(Rational, Rational)> {
        let (lo, hi) = (parse_rational(&self.lo)?, parse_rational(&self.hi)?);
        if cmp(&lo, &hi).is_ge() {
            return Err(Error::InvalidArgument("empty interval".into()));
        }
        Ok((lo, hi))
    }

    fn contains(&self, t: &Rational) -> Result<bool> {
        let (lo, hi) = self.bounds()?;
        Ok(t >= &lo && if self.hi_open { t < &hi } else { t <= &hi })
    }

    /// `points` equally spaced samples; the right end only when closed.
    pub fn grid(&self, points: u64) -> Result<Vec<Rational>> {
        let (lo, hi) = self.bounds()?;
        let points = points.max(2);
        let steps = if self.hi_open { points } else { points - 1 };
        let h = (&hi - &lo) / from_int(steps as i64);
        Ok((0..points).map(|i| &lo + &h * from_int(i as i64)).collect())
    }
}

/// A sequence of functions `f_n` (indices from 1) on an interval with its
/// limit. The tail bound, when present, bounds `sup_t |f_m(t) − f(t)|`
/// over all `m ≥ n`; the modulus gives each `f_n`'s uniform continuity.
#[derive(Clone)]
pub struct RealFunctionNet {
    pub name: String,
    pub domain: Interval,
    pub term: Term,
    pub limit: Enclosure,
    pub tail_bound: Option<TailBound>,
    pub modulus: Option<IndexModulus>,
}

impl fmt::Debug for RealFunctionNet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealFunctionNet")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish()
    }
}

fn exact(limit: impl Fn(&Rational) -> Result<Rational> + Send + Sync + 'static) -> Enclosure {
    Arc::new(move |t, _| {
        let v = limit(t)?;
        Ok((v.clone(), v))
    })
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// `Σ_{i ≤ n} t^i / i!`.
fn exp_partial(n: u64, t: &Rational) -> Rational {
    let mut sum = Rational::zero();
    let mut term = Rational::one();
    for i in 0..=n {
        if i > 0 {
            term = term * t / from_int(i as i64);
        }
        sum += &term;
    }
    sum
}

/// `3 / (n+1)!`, bounding `e^t − S_n(t)` on `[0, 1]` for every later index.
fn exp_tail(n: u64) -> Rational {
    Rational::new(BigInt::from(3), factorial(n + 1))
}

/// `f_n(t) = t^n` on `[0, 1)`, limit `0`.
pub fn power_net() -> RealFunctionNet {
    RealFunctionNet {
        name: "t^n".into(),
        domain: Interval::unit(true),
        term: Arc::new(|n, t| Ok(num_traits::pow(t.clone(), n as usize))),
        limit: exact(|_| Ok(Rational::zero())),
        tail_bound: None,
        // |t^n − s^n| ≤ n|t − s| on [0, 1].
        modulus: Some(Arc::new(|n, k| k + (64 - n.max(1).leading_zeros()))),
    }
}

/// Partial sums of the exponential series on `[0, 1]`.
pub fn exp_partial_sums() -> RealFunctionNet {
    RealFunctionNet {
        name: "exp partial sums".into(),
        domain: Interval::unit(false),
        term: Arc::new(|n, t| Ok(exp_partial(n, t))),
        limit: Arc::new(|t, p| {
            let n = (0u64..)
                .find(|&n| cmp(&exp_tail(n), &pow2_neg(p)).is_lt())
                .expect("factorial grows");
            let s = exp_partial(n, t);
            let hi = &s + exp_tail(n);
            Ok((s, hi))
        }),
        tail_bound: Some(Arc::new(exp_tail)),
        // Derivatives are below 3 on [0, 1].
        modulus: Some(Arc::new(|_, k| k + 2)),
    }
}

/// `f_n(t) = |t − 1/2| + 1/n` on `[0, 1]`: 1-Lipschitz, limit `|t − 1/2|`.
pub fn shifted_abs() -> RealFunctionNet {
    let half = ratio(1, 2);
    let h2 = half.clone();
    RealFunctionNet {
        name: "|t - 1/2| + 1/n".into(),
        domain: Interval::unit(false),
        term: Arc::new(move |n, t| Ok((t - &half).abs() + ratio(1, n.max(1) as i64))),
        limit: exact(move |t| Ok((t - &h2).abs())),
        tail_bound: Some(Arc::new(|n| ratio(1, n.max(1) as i64))),
        modulus: Some(Arc::new(|_, k| k)),
    }
}

/// Every `f_n` equal to the expression `f` in `t`, with a uniform modulus.
pub fn constant_net(f: &str, modulus: &str, domain: Interval) -> Result<RealFunctionNet> {
    let desc = FunctionNetDescriptor::Expression {
        term: f.into(),
        limit: f.into(),
        domain,
        tail_bound: Some("0".into()),
        modulus: Some(modulus.into()),
    };
    desc.build()
}

/// JSON form of a tier-2 function net.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctionNetDescriptor {
    /// `term` in `n` and `t`, `limit` in `t`, `tail_bound` in `n`,
    /// `modulus` in `n` and `k`.
    Expression {
        term: String,
        limit: String,
        domain: Interval,
        #[serde(default)]
        tail_bound: Option<String>,
        #[serde(default)]
        modulus: Option<String>,
    },
    Named {
        name: String,
    },
}

impl FunctionNetDescriptor {
    pub fn build(&self) -> Result<RealFunctionNet> {
        match self {
            FunctionNetDescriptor::Named { name } => match name.as_str() {
                "power" => Ok(power_net()),
                "exp-partial-sums" => Ok(exp_partial_sums()),
                "shifted-abs" => Ok(shifted_abs()),
                other => Err(Error::InvalidArgument(format!("unknown function net `{other}`"))),
            },
            FunctionNetDescriptor::Expression {
                term,
                limit,
                domain,
                tail_bound,
                modulus,
            } => {
                domain.bounds()?;
                let term_e = Arc::new(Expr::parse(term)?);
                let limit_e = Arc::new(Expr::parse(limit)?);
                check_vars(&term_e, &["n", "t"])?;
                check_vars(&limit_e, &["t"])?;
                let tail: Option<TailBound> = match tail_bound {
                    Some(src) => {
                        let e = Expr::parse(src)?;
                        check_vars(&e, &["n"])?;
                        e.eval_at("n", &from_int(1))?;
                        Some(Arc::new(move |n| {
                            e.eval_at("n", &from_int(n as i64)).unwrap_or_else(|_| from_int(i64::MAX))
                        }))
                    }
                    None => None,
                };
                let modulus: Option<IndexModulus> = match modulus {
                    Some(src) => {
                        let e = Expr::parse(src)?;
                        check_vars(&e, &["n", "k"])?;
                        Some(Arc::new(move |n, k| {
                            let env = |v: &str| match v {
                                "n" => Some(from_int(n as i64)),
                                "k" => Some(from_int(k as i64)),
                                _ => None,
                            };
                            e.eval(&env)
                                .ok()
                                .and_then(|q| num_traits::ToPrimitive::to_u32(&q.ceil().to_integer()))
                                .unwrap_or(u32::MAX / 2)
                        }))
                    }
                    None => None,
                };
                Ok(RealFunctionNet {
                    name: term.clone(),
                    domain: domain.clone(),
                    term: Arc::new(move |n, t| {
                        let env = |v: &str| match v {
                            "n" => Some(from_int(n as i64)),
                            "t" => Some(t.clone()),
                            _ => None,
                        };
                        term_e.eval(&env)
                    }),
                    limit: exact(move |t| limit_e.eval_at("t", t)),
                    tail_bound: tail,
                    modulus,
                })
            }
        }
    }
}

fn check_vars(e: &Expr, allowed: &[&str]) -> Result<()> {
    match e.variables().into_iter().find(|v| !allowed.contains(&v.as_str())) {
        Some(v) => Err(Error::Parse(format!("unexpected variable `{v}`"))),
        None => Ok(()),
    }
}

/// Levels, index range and grid for the uniform convergence search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub level: u32,
    pub max_index: u64,
    pub grid: u64,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            level: 2,
            max_index: 20,
            grid: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum UcVerdict {
    /// Every `f_m` with `m ≥ alpha` lies within `2^-level` of the limit,
    /// with `margin` to spare.
    Holds {
        alpha: u64,
        level: u32,
        margin: String,
    },
    /// `|f_index(t) − f(t)| ≥ 2^-(level-1)` at `t`; since `index` is the
    /// largest index tried, no threshold up to it works.
    Fails {
        index: u64,
        t: String,
        value: String,
        level: u32,
    },
    Unknown {
        level: u32,
    },
}

/// Lower bound on `|f_n(t) − f(t)|`.
fn error_lower(net: &RealFunctionNet, n: u64, t: &Rational, precision: u32) -> Result<Rational> {
    let v = (net.term)(n, t)?;
    let (lo, hi) = (net.limit)(t, precision)?;
    Ok(if v > hi {
        v - hi
    } else if v < lo {
        lo - v
    } else {
        Rational::zero()
    })
}

const BISECTION_STEPS: u32 = 40;
const CLIMB_STEPS: u32 = 200;

/// Looks for a certified point where `f_n` is at least `threshold` away
/// from the limit: grid scan, then hill climbing from the best sample,
/// then bisection from the left end towards the first crossing.
fn find_witness(net: &RealFunctionNet, n: u64, threshold: &Rational, grid: u64, precision: u32) -> Result<Option<Rational>> {
    let points = net.domain.grid(grid)?;
    let errors: Vec<Rational> = points
        .par_iter()
        .map(|t| error_lower(net, n, t, precision))
        .collect::<Result<_>>()?;
    let best = (0..points.len())
        .max_by(|&a, &b| cmp(&errors[a], &errors[b]).then(b.cmp(&a)))
        .expect("nonempty grid");
    let mut t = points[best].clone();
    let mut e = errors[best].clone();
    if e < *threshold {
        let (lo, hi) = net.domain.bounds()?;
        let mut h = (&hi - &lo) / from_int(2 * grid.max(2) as i64);
        for _ in 0..CLIMB_STEPS {
            if e >= *threshold || h.is_zero() {
                break;
            }
            let mut moved = false;
            for cand in [&t + &h, &t - &h] {
                if net.domain.contains(&cand)? {
                    let ce = error_lower(net, n, &cand, precision)?;
                    if ce > e {
                        t = cand;
                        e = ce;
                        moved = true;
                        break;
                    }
                }
            }
            if !moved {
                h /= from_int(2);
            }
        }
    }
    if e < *threshold {
        return Ok(None);
    }
    let (lo, _) = net.domain.bounds()?;
    if error_lower(net, n, &lo, precision)? >= *threshold {
        return Ok(Some(lo));
    }
    // Invariant: the error at `a` is below the threshold, at `b` it is not.
    let (mut a, mut b) = (lo, t);
    for _ in 0..BISECTION_STEPS {
        let m = (&a + &b) / from_int(2);
        if error_lower(net, n, &m, precision)? >= *threshold {
            b = m;
        } else {
            a = m;
        }
    }
    Ok(Some(b))
}

/// Uniform convergence of `net` to its limit on its domain at one level.
pub fn uniform_convergence_check(net: &RealFunctionNet, schedule: &Schedule) -> Result<UcVerdict> {
    let k = schedule.level;
    let radius = pow2_neg(k);
    if let Some(bound) = &net.tail_bound {
        if let Some(alpha) = (1..=schedule.max_index).find(|&n| cmp(&bound(n), &radius).is_lt()) {
            // The bound is a claim; a grid sample outside the ball refutes it.
            for t in net.domain.grid(schedule.grid)? {
                if error_lower(net, alpha, &t, k + 4)? >= radius {
                    return Err(Error::ModulusViolation(format!(
                        "{}: tail bound at index {alpha} contradicted at t = {}",
                        net.name,
                        format_rational(&t)
                    )));
                }
            }
            return Ok(UcVerdict::Holds {
                alpha,
                level: k,
                margin: format_rational(&(&radius - bound(alpha))),
            });
        }
    }
    let n = schedule.max_index.max(1);
    let threshold = pow2_neg(k.saturating_sub(1));
    match find_witness(net, n, &threshold, schedule.grid, k + 4)? {
        Some(t) => {
            let value = (net.term)(n, &t)?;
            Ok(UcVerdict::Fails {
                index: n,
                t: format_rational(&t),
                value: format_rational(&value),
                level: k,
            })
        }
        None => Ok(UcVerdict::Unknown { level: k }),
    }
}

/// Per-point cauchy verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointCauchy {
    pub t: String,
    pub check: ModulusCheck,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointwiseCauchyReport {
    pub points: Vec<PointCauchy>,
    /// First grid point whose sequence broke its modulus.
    pub witness: Option<String>,
}

impl PointwiseCauchyReport {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

/// Checks the cauchy modulus `m(t, k)` of `n ↦ f_n(t)` at each grid point
/// on indices up to `horizon` (index 0 is read as index 1).
pub fn pointwise_cauchy_check(
    net: &RealFunctionNet,
    modulus: PointModulus,
    grid: &[Rational],
    horizon: u64,
    max_level: u32,
) -> Result<PointwiseCauchyReport> {
    // Surface evaluation errors before the infallible generator is built.
    for t in grid {
        (net.term)(1, t)?;
    }
    let points: Vec<PointCauchy> = grid
        .par_iter()
        .map(|t| {
            let term = Arc::clone(&net.term);
            let (t1, t2) = (t.clone(), t.clone());
            let m = Arc::clone(&modulus);
            let seq = ModulusCauchySeq::new(
                format!("{} at {}", net.name, format_rational(t)),
                Arc::new(move |n| term(n.max(1), &t1).unwrap_or_else(|_| Rational::zero())),
                Arc::new(move |k| m(&t2, k)),
            );
            PointCauchy {
                t: format_rational(t),
                check: cauchy_check(&seq, horizon, max_level),
            }
        })
        .collect();
    let witness = points
        .iter()
        .find(|p| matches!(p.check, ModulusCheck::Fails { .. }))
        .map(|p| p.t.clone());
    Ok(PointwiseCauchyReport { points, witness })
}

/// One level of the limit regularity report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelRegularity {
    pub level: u32,
    /// Index within `2^-(level+2)` of the limit everywhere.
    pub alpha: u64,
    /// Derived modulus of the limit: `δ(alpha, level + 1)`.
    pub modulus: u32,
    pub pairs: u64,
    pub failures: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LimitRegularityReport {
    pub net: String,
    pub levels: Vec<LevelRegularity>,
}

impl LimitRegularityReport {
    pub fn verified(&self) -> bool {
        self.levels.iter().all(|l| l.failures == 0)
    }
}

/// Upper bound on `|f(t) − f(s)|` from limit enclosures.
fn limit_gap_upper(net: &RealFunctionNet, t: &Rational, s: &Rational, precision: u32) -> Result<Rational> {
    let (a_lo, a_hi) = (net.limit)(t, precision)?;
    let (b_lo, b_hi) = (net.limit)(s, precision)?;
    let x = a_hi - b_lo;
    let y = b_hi - a_lo;
    Ok(if x > y { x } else { y })
}

/// For each level `k ≤ max_level`: takes `alpha` with the tail bound below
/// `2^-(k+2)`, derives the limit modulus `δ(alpha, k+1)` (the three-term
/// split `2^-(k+2) + 2^-(k+1) + 2^-(k+2)`), and confirms
/// `|f(t) − f(s)| < 2^-k` on grid points `t` paired with `s` just inside
/// the derived radius on either side.
pub fn limit_regularity_suite(net: &RealFunctionNet, max_level: u32, grid: u64, max_index: u64) -> Result<LimitRegularityReport> {
    let bound = net
        .tail_bound
        .as_ref()
        .ok_or_else(|| Error::ConvergenceNotEstablished(format!("{}: no uniform tail bound supplied", net.name)))?;
    let modulus = net
        .modulus
        .as_ref()
        .ok_or_else(|| Error::PreconditionUnmet(format!("{}: no per-index modulus supplied", net.name)))?;
    let points = net.domain.grid(grid)?;
    let mut levels = Vec::new();
    for k in 0..=max_level {
        let alpha = (1..=max_index)
            .find(|&n| cmp(&bound(n), &pow2_neg(k + 2)).is_lt())
            .ok_or_else(|| {
                Error::ConvergenceNotEstablished(format!(
                    "{}: no index up to {max_index} within 2^-{} of the limit",
                    net.name,
                    k + 2
                ))
            })?;
        let delta = modulus(alpha, k + 1);
        let step = pow2_neg(delta) * ratio(255, 256);
        let radius = pow2_neg(k);
        let outcomes: Vec<(u64, u64)> = points
            .par_iter()
            .map(|t| {
                let mut pairs = 0;
                let mut failures = 0;
                for s in [t + &step, t - &step] {
                    if !net.domain.contains(&s)? {
                        continue;
                    }
                    pairs += 1;
                    if limit_gap_upper(net, t, &s, k + 4)? >= radius {
                        failures += 1;
                    }
                }
                Ok((pairs, failures))
            })
            .collect::<Result<_>>()?;
        levels.push(LevelRegularity {
            level: k,
            alpha,
            modulus: delta,
            pairs: outcomes.iter().map(|o| o.0).sum(),
            failures: outcomes.iter().map(|o| o.1).sum(),
        });
    }
    Ok(LimitRegularityReport {
        net: net.name.clone(),
        levels,
    })
}
