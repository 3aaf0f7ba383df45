// SPDX-License-Identifier: Apache-2.0

//! Brute-force approach decision by adversarial selection search.
//!
//! Independent of the kernel reduction: tails are found by unrolling the
//! approaching net, and every homogeneous selection over one period of the
//! target net's cycle is tried at every level. A selection defeats approach
//! when one of its members fails to contain a tail; because the period
//! repeats forever, such a member recurs at arbitrarily late indices.

use std::collections::HashMap;

use super::{Method, Verdict, Witness};
use crate::error::Result;
use crate::net::LassoNet;
use crate::pointset::PointSet;
use crate::space::GradedBase;

/// Whether some tail `{u_n : n ≥ N}` lies inside `set`, by unrolling.
pub fn contains_tail(u: &LassoNet, set: PointSet) -> bool {
    let span = u.prefix().len() + u.cycle().len();
    (0..=span).any(|start| (start..start + 2 * span).all(|n| set.contains(u.value(n))))
}

/// Whether some tail of `u` avoids `set` entirely, by unrolling.
pub fn tail_outside(u: &LassoNet, set: PointSet) -> bool {
    let span = u.prefix().len() + u.cycle().len();
    (0..=span).any(|start| (start..start + 2 * span).all(|n| !set.contains(u.value(n))))
}

fn first_late_value_outside(u: &LassoNet, set: PointSet) -> usize {
    let span = u.prefix().len() + u.cycle().len();
    (span..3 * span)
        .map(|n| u.value(n))
        .find(|&x| !set.contains(x))
        .expect("member without a tail of u misses a late value")
}

/// Level name, point and member index of a defeating selection.
type LevelChoice = (String, usize, usize);

/// Searches all homogeneous selections for one that defeats `u ⤳ v`.
///
/// `tail_in[m]` says whether the `m`-th base member (in `base.members()`
/// order) contains a tail of `u`.
fn search(tail_in: &[bool], v_cycle: &[usize], base: &GradedBase) -> Option<LevelChoice> {
    let members: Vec<(&str, usize, PointSet)> = base.members().collect();
    for level in base.levels().keys() {
        // Candidate members per position of one period of v's cycle.
        let choices: Vec<Vec<usize>> = v_cycle
            .iter()
            .map(|&y| {
                (0..members.len())
                    .filter(|&m| members[m].0 == level && members[m].2.contains(y))
                    .collect()
            })
            .collect();
        if choices.iter().any(Vec::is_empty) {
            continue;
        }
        let mut odometer = vec![0usize; choices.len()];
        'selections: loop {
            for (pos, &k) in odometer.iter().enumerate() {
                let m = choices[pos][k];
                if !tail_in[m] {
                    return Some((level.clone(), v_cycle[pos], m));
                }
            }
            for pos in 0..odometer.len() {
                odometer[pos] += 1;
                if odometer[pos] < choices[pos].len() {
                    continue 'selections;
                }
                odometer[pos] = 0;
            }
            break;
        }
    }
    None
}

fn tail_profile(u: &LassoNet, base: &GradedBase) -> Vec<bool> {
    base.members().map(|(_, _, set)| contains_tail(u, set)).collect()
}

fn verdict_from(found: Option<LevelChoice>, u: &LassoNet, base: &GradedBase) -> Verdict {
    match found {
        None => Verdict::holds(Method::BruteForceOracle),
        Some((level, point, m)) => {
            let (_, member, set) = base.members().nth(m).expect("member index");
            Verdict::fails(
                Witness {
                    level,
                    point,
                    member,
                    excluded: first_late_value_outside(u, set),
                },
                Method::BruteForceOracle,
            )
        }
    }
}

/// Decides `u ⤳ v` by selection search.
pub fn approaches_oracle(u: &LassoNet, v: &LassoNet, base: &GradedBase) -> Result<Verdict> {
    u.check_points(base.space())?;
    v.check_points(base.space())?;
    let found = search(&tail_profile(u, base), v.cycle(), base);
    Ok(verdict_from(found, u, base))
}

/// Memoises selection searches for many net pairs over one base. The search
/// depends on `u` only through which members contain a tail of it.
pub struct OracleCache<'a> {
    base: &'a GradedBase,
    memo: HashMap<(Vec<bool>, Vec<usize>), Option<LevelChoice>>,
}

impl<'a> OracleCache<'a> {
    pub fn new(base: &'a GradedBase) -> Self {
        OracleCache {
            base,
            memo: HashMap::new(),
        }
    }

    pub fn approaches(&mut self, u: &LassoNet, v: &LassoNet) -> Verdict {
        let profile = tail_profile(u, self.base);
        let key = (profile, v.cycle().to_vec());
        let base = self.base;
        let found = self.memo.entry(key).or_insert_with_key(|(p, c)| search(p, c, base)).clone();
        verdict_from(found, u, self.base)
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::approach::approaches;
    use crate::net::enumerate_lasso_nets;
    use crate::space::{FinSpace, GradedBase};

    #[test]
    fn oracle_matches_kernel_on_sierpinski() {
        let base = GradedBase::full_base(Arc::new(FinSpace::sierpinski()));
        let nets = enumerate_lasso_nets(2, 1, 3);
        let mut cache = OracleCache::new(&base);
        for u in &nets {
            for v in &nets {
                let k = approaches(u, v, &base).unwrap();
                let o = approaches_oracle(u, v, &base).unwrap();
                assert_eq!(k.holds, o.holds, "{u:?} {v:?}");
                assert_eq!(cache.approaches(u, v).holds, o.holds);
            }
        }
    }

    #[test]
    fn tail_helpers() {
        let u = LassoNet::new(vec![2], vec![0, 1]).unwrap();
        assert!(contains_tail(&u, PointSet::from_indices([0, 1])));
        assert!(!contains_tail(&u, PointSet::singleton(0)));
        assert!(tail_outside(&u, PointSet::singleton(2)));
        assert!(!tail_outside(&u, PointSet::singleton(1)));
    }
}
