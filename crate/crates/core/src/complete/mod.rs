// SPDX-License-Identifier: Apache-2.0

//! Constructive completion of the rationals under `u(x, y) = |x − y|` with
//! radii `ε_k = [0, 2^-k)`.
//!
//! Points of the completion are modulus-bearing cauchy sequences. Every
//! comparison at level `k` is made at level `k + 2`, spending one halving
//! on each representative.

pub mod sequences;

use std::sync::Arc;

use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{cmp, format_rational, pow2_neg, Rational};
pub use sequences::{
    decimal_string, sqrt2_continued_fraction, sqrt2_convergent, sqrt2_decimal, sqrt2_scaled, Generator, Modulus,
    ModulusCauchySeq, SeqDescriptor, Target,
};

/// Halving certificate of the radius chain: two steps inside `ε_{k+1}`
/// stay inside `ε_k`.
pub fn halving(k: u32) -> u32 {
    k + 1
}

/// A point of the completion, represented by one of its sequences.
#[derive(Clone, Debug)]
pub struct CompletionPoint {
    seq: ModulusCauchySeq,
}

impl CompletionPoint {
    pub fn new(seq: ModulusCauchySeq) -> Self {
        CompletionPoint { seq }
    }

    pub fn seq(&self) -> &ModulusCauchySeq {
        &self.seq
    }

    /// A rational within `2^-k` (non-strict) of the point.
    pub fn approx(&self, k: u32) -> Rational {
        self.seq.at_level(k)
    }
}

/// The constant sequence at `q`, with modulus `0` at every level.
pub fn embed(q: Rational) -> CompletionPoint {
    CompletionPoint::new(ModulusCauchySeq::constant(q))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum LevelVerdict {
    Equal,
    /// The two terms compared, by index into each representative, and
    /// their exact distance.
    Apart {
        index_p: u64,
        index_q: u64,
        distance: String,
    },
    Unknown {
        distance: String,
    },
}

impl LevelVerdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, LevelVerdict::Equal)
    }

    pub fn is_apart(&self) -> bool {
        matches!(self, LevelVerdict::Apart { .. })
    }
}

/// Compares two points at level `k`.
///
/// Each representative is sampled at level `k + 2`, so the true distance
/// lies within `2^-(k+1)` of the sampled distance `d`. Equal when
/// `d < 2^-(k+1)` (true distance below `2^-k`); apart when
/// `d ≥ 3 · 2^-(k+1)` (true distance at least `2^-k`); unknown otherwise.
pub fn eq_at_level(p: &CompletionPoint, q: &CompletionPoint, k: u32) -> LevelVerdict {
    let level = k + 2;
    let (ip, iq) = (p.seq.modulus(level), q.seq.modulus(level));
    let d = (p.seq.term(ip) - q.seq.term(iq)).abs();
    let half = pow2_neg(k + 1);
    if d < half {
        LevelVerdict::Equal
    } else if d >= Rational::from_integer(3.into()) * half {
        LevelVerdict::Apart {
            index_p: ip,
            index_q: iq,
            distance: format_rational(&d),
        }
    } else {
        LevelVerdict::Unknown {
            distance: format_rational(&d),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ModulusCheck {
    /// The modulus held at every level whose index fits the horizon.
    Holds {
        levels: u32,
    },
    Fails {
        level: u32,
        i: u64,
        j: u64,
    },
}

/// Validates the claimed modulus on all index pairs up to `horizon`.
///
/// For each level, the largest gap among terms from the modulus index on
/// is the suffix maximum minus the suffix minimum.
pub fn cauchy_check(seq: &ModulusCauchySeq, horizon: u64, max_level: u32) -> ModulusCheck {
    let terms: Vec<Rational> = (0..=horizon).map(|n| seq.term(n)).collect();
    let len = terms.len();
    let mut suffix_max = vec![len - 1; len];
    let mut suffix_min = vec![len - 1; len];
    for n in (0..len - 1).rev() {
        let (hi, lo) = (suffix_max[n + 1], suffix_min[n + 1]);
        suffix_max[n] = if cmp(&terms[n], &terms[hi]).is_ge() { n } else { hi };
        suffix_min[n] = if cmp(&terms[n], &terms[lo]).is_le() { n } else { lo };
    }
    let mut levels = 0;
    let mut gap: Option<(u64, Rational)> = None;
    for k in 0..=max_level {
        let m = seq.modulus(k);
        if m > horizon {
            break;
        }
        let (hi, lo) = (suffix_max[m as usize], suffix_min[m as usize]);
        if gap.as_ref().is_none_or(|(at, _)| *at != m) {
            gap = Some((m, &terms[hi] - &terms[lo]));
        }
        if cmp(&gap.as_ref().expect("set above").1, &pow2_neg(k)).is_ge() {
            let (i, j) = (hi.min(lo) as u64, hi.max(lo) as u64);
            return ModulusCheck::Fails { level: k, i, j };
        }
        levels = k + 1;
    }
    ModulusCheck::Holds { levels }
}

/// A map on the rationals with a level-transfer modulus `ω`:
/// `|x − y| < 2^-ω(k)` implies `|f(x) − f(y)| < 2^-k`.
#[derive(Clone)]
pub struct UniformMap {
    pub name: String,
    pub map: Arc<dyn Fn(&Rational) -> Rational + Send + Sync>,
    pub omega: Arc<dyn Fn(u32) -> u32 + Send + Sync>,
}

impl UniformMap {
    pub fn apply(&self, x: &Rational) -> Rational {
        (self.map)(x)
    }
}

/// Spot-checks `ω` at level `k` on pairs of terms of `p`'s representative
/// around its modulus index, then returns `f` at the term for level
/// `ω(k)`. That term is within `2^-ω(k)` of `p`, so the result is within
/// `2^-k` of the extension at `p`.
pub fn uniform_extend(f: &UniformMap, p: &CompletionPoint, k: u32, samples: u64) -> Result<Rational> {
    let w = (f.omega)(k);
    let m = p.seq.modulus(w);
    let window: Vec<Rational> = (m..m + samples.max(2)).map(|n| p.seq.term(n)).collect();
    for x in &window {
        for y in &window {
            if (x - y).abs() < pow2_neg(w) && (f.apply(x) - f.apply(y)).abs() >= pow2_neg(k) {
                return Err(Error::ModulusViolation(format!(
                    "{}: |x − y| < 2^-{w} but |f(x) − f(y)| ≥ 2^-{k} at x = {}, y = {}",
                    f.name,
                    format_rational(x),
                    format_rational(y)
                )));
            }
        }
    }
    Ok(f.apply(&p.seq.term(m)))
}

/// An open ball `{x : |x − center| < 2^-level}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallDescriptor {
    pub center: String,
    pub level: u32,
}

/// A finite union of open balls, or the whole line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Region {
    Full,
    Balls { balls: Vec<BallDescriptor> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum TailVerdict {
    /// Every term from `from` on lies in the region.
    Holds {
        from: u64,
    },
    /// The point lies strictly outside the closure of every ball.
    Fails,
    Unknown,
}

/// Whether some tail of `seq` lies in `region`, judged from the term `a`
/// at level `k`: terms from there on are within `2^-k` of `a`.
pub fn tail_in_open(seq: &ModulusCauchySeq, region: &Region, k: u32) -> Result<TailVerdict> {
    let balls = match region {
        Region::Full => return Ok(TailVerdict::Holds { from: 0 }),
        Region::Balls { balls } => balls,
    };
    let m = seq.modulus(k);
    let a = seq.term(m);
    let slack = pow2_neg(k);
    let mut all_far = true;
    for b in balls {
        let c = crate::rational::parse_rational(&b.center)?;
        let r = pow2_neg(b.level);
        let d = (&a - &c).abs();
        if &d + &slack <= r {
            return Ok(TailVerdict::Holds { from: m });
        }
        if d <= &r + &slack {
            all_far = false;
        }
    }
    Ok(if all_far { TailVerdict::Fails } else { TailVerdict::Unknown })
}

/// The limit of a cauchy sequence of completion points, where
/// `outer_modulus(k)` bounds the index after which points agree below
/// `2^-k`. Term `j` of the diagonal is point `outer_modulus(j + 2)` sampled
/// at level `j + 2`, which is within `2^-(j+1)` of the limit; the diagonal
/// therefore has modulus `k ↦ k + 1`.
pub fn diagonal_limit(points: Arc<dyn Fn(u64) -> CompletionPoint + Send + Sync>, outer_modulus: Modulus) -> CompletionPoint {
    let gen = move |j: u64| {
        let level = u32::try_from(j + 2).expect("level fits u32");
        points(outer_modulus(level)).approx(level)
    };
    CompletionPoint::new(ModulusCauchySeq::new("diagonal", Arc::new(gen), Arc::new(|k| k as u64 + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{from_int, parse_rational, ratio};

    fn sqrt2() -> CompletionPoint {
        CompletionPoint::new(sqrt2_decimal())
    }

    #[test]
    fn embed_examples() {
        let one = embed(from_int(1));
        for k in 0..40 {
            assert_eq!(one.seq().modulus(k), 0);
            assert!(eq_at_level(&one, &one, k).is_equal());
        }
        assert!(eq_at_level(&one, &embed(ratio(3, 2)), 2).is_apart());
    }

    #[test]
    fn sqrt2_representatives_agree() {
        let cf = CompletionPoint::new(sqrt2_continued_fraction());
        for k in 0..=20 {
            assert!(eq_at_level(&sqrt2(), &cf, k).is_equal(), "level {k}");
            assert!(eq_at_level(&sqrt2(), &sqrt2(), k).is_equal());
        }
    }

    #[test]
    fn truncated_constant_is_close_to_sqrt2() {
        // |√2 − 1.414| ≈ 2.136e-4 lies between 2^-13 and 2^-12.
        let t = embed(parse_rational("1.414").unwrap());
        assert!(!eq_at_level(&sqrt2(), &t, 12).is_apart());
        assert!(eq_at_level(&sqrt2(), &t, 13).is_apart());
        assert!(eq_at_level(&sqrt2(), &t, 20).is_apart());
        assert!(eq_at_level(&sqrt2(), &t, 11).is_equal());
    }

    #[test]
    fn modulus_checks() {
        assert!(matches!(
            cauchy_check(&sqrt2_decimal(), 2000, 1000),
            ModulusCheck::Holds { .. }
        ));
        let alternating = ModulusCauchySeq::new(
            "alternating",
            Arc::new(|n| from_int(if n % 2 == 0 { 1 } else { -1 })),
            Arc::new(|k| k as u64),
        );
        assert_eq!(
            cauchy_check(&alternating, 50, 10),
            ModulusCheck::Fails { level: 0, i: 0, j: 1 }
        );
        let harmonic = ModulusCauchySeq::new(
            "harmonic",
            Arc::new(|n| (1..=n as i64).map(|i| ratio(1, i)).sum()),
            Arc::new(|k| 1 << k),
        );
        assert!(matches!(cauchy_check(&harmonic, 3, 4), ModulusCheck::Holds { .. }));
        assert!(matches!(cauchy_check(&harmonic, 64, 10), ModulusCheck::Fails { .. }));
    }

    fn square() -> UniformMap {
        UniformMap {
            name: "x^2".into(),
            map: Arc::new(|x| x * x),
            omega: Arc::new(|k| k + 2),
        }
    }

    #[test]
    fn extension_examples() {
        let y = uniform_extend(&square(), &sqrt2(), 16, 8).unwrap();
        assert!((y - from_int(2)).abs() < pow2_neg(16));
        let id = UniformMap {
            name: "id".into(),
            map: Arc::new(|x| x.clone()),
            omega: Arc::new(|k| k),
        };
        let y = uniform_extend(&id, &sqrt2(), 10, 4).unwrap();
        assert!(eq_at_level(&embed(y), &sqrt2(), 9).is_equal());
        let shift = UniformMap {
            name: "x+1".into(),
            map: Arc::new(|x| x + from_int(1)),
            omega: Arc::new(|k| k),
        };
        assert_eq!(uniform_extend(&shift, &embed(from_int(0)), 5, 4).unwrap(), from_int(1));
        let cube_bad = UniformMap {
            name: "1000x".into(),
            map: Arc::new(|x| x * from_int(1000)),
            omega: Arc::new(|k| k),
        };
        assert!(matches!(
            uniform_extend(&cube_bad, &CompletionPoint::new(sqrt2_continued_fraction()), 2, 6),
            Err(Error::ModulusViolation(_))
        ));
    }

    #[test]
    fn tails_in_regions() {
        let near = Region::Balls {
            balls: vec![BallDescriptor {
                center: "1.4".into(),
                level: 3,
            }],
        };
        assert!(matches!(
            tail_in_open(sqrt2().seq(), &near, 6).unwrap(),
            TailVerdict::Holds { .. }
        ));
        let far = Region::Balls {
            balls: vec![BallDescriptor {
                center: "1".into(),
                level: 3,
            }],
        };
        assert_eq!(tail_in_open(sqrt2().seq(), &far, 6).unwrap(), TailVerdict::Fails);
        assert!(matches!(
            tail_in_open(sqrt2().seq(), &Region::Full, 0).unwrap(),
            TailVerdict::Holds { from: 0 }
        ));
        let edge = Region::Balls {
            balls: vec![BallDescriptor {
                center: "1.5".into(),
                level: 3,
            }],
        };
        // |√2 − 1.5| ≈ 0.0858 < 1/8, but 2^-2 of slack blurs it.
        assert_eq!(tail_in_open(sqrt2().seq(), &edge, 2).unwrap(), TailVerdict::Unknown);
    }

    #[test]
    fn density_and_uniqueness() {
        let p = sqrt2();
        let cf = CompletionPoint::new(sqrt2_continued_fraction());
        for k in 1..=20 {
            let e = embed(p.seq().at_level(k));
            assert!(eq_at_level(&e, &p, k - 1).is_equal());
            let a = embed(uniform_extend(&square(), &p, k, 3).unwrap());
            let b = embed(uniform_extend(&square(), &cf, k, 3).unwrap());
            assert!(eq_at_level(&a, &b, k - 1).is_equal(), "level {k}");
        }
    }

    #[test]
    fn diagonal_of_truncation_points() {
        let points: Arc<dyn Fn(u64) -> CompletionPoint + Send + Sync> = Arc::new(|n| embed(sqrt2_decimal().term(n)));
        let outer: Modulus = Arc::new(sequences::decimal_digits_for_level);
        let d = diagonal_limit(points.clone(), outer.clone());
        for k in 0..=20 {
            assert!(eq_at_level(&d, &sqrt2(), k).is_equal(), "level {k}");
            let n = outer(k + 2);
            assert!(!eq_at_level(&points(n), &d, k).is_apart());
        }
        assert!(matches!(cauchy_check(d.seq(), 60, 40), ModulusCheck::Holds { .. }));
    }
}
