// SPDX-License-Identifier: Apache-2.0

//! Eventually periodic nets on `ℕ` and `ℕ × ℕ`, cofinal subnets and
//! principal filters.
//!
//! A lasso net stores a finite prefix followed by a cycle repeated forever.
//! Its tail sets stabilise to the set of cycle values (the recurrent set), so
//! every tail quantifier over a lasso net reduces to a finite set operation.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::space::FinSpace;

/// An eventually periodic sequence of point indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct LassoNet {
    prefix: Vec<usize>,
    cycle: Vec<usize>,
}

impl LassoNet {
    pub fn new(prefix: Vec<usize>, cycle: Vec<usize>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidNet("cycle must be nonempty".into()));
        }
        Ok(LassoNet { prefix, cycle })
    }

    pub fn constant(x: usize) -> Self {
        LassoNet {
            prefix: Vec::new(),
            cycle: vec![x],
        }
    }

    pub fn prefix(&self) -> &[usize] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[usize] {
        &self.cycle
    }

    pub fn value(&self, n: usize) -> usize {
        if n < self.prefix.len() {
            self.prefix[n]
        } else {
            self.cycle[(n - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// Values of the first `len` indices.
    pub fn unroll(&self, len: usize) -> Vec<usize> {
        (0..len).map(|n| self.value(n)).collect()
    }

    /// The set of cycle values, equal to every tail set from `|prefix|` on.
    pub fn recurrent_set(&self) -> PointSet {
        self.cycle.iter().copied().collect()
    }

    /// `{u_n : n ≥ start}`.
    pub fn tail_set(&self, start: usize) -> PointSet {
        let span = self.prefix.len() + self.cycle.len();
        (start..start + span).map(|n| self.value(n)).collect()
    }

    pub fn is_eventually_constant(&self) -> bool {
        self.recurrent_set().len() == 1
    }

    pub fn check_points(&self, space: &FinSpace) -> Result<()> {
        for &p in self.prefix.iter().chain(&self.cycle) {
            space.check_point(p)?;
        }
        Ok(())
    }

    /// Pointwise image under a point table.
    pub fn map(&self, table: &[usize]) -> LassoNet {
        LassoNet {
            prefix: self.prefix.iter().map(|&p| table[p]).collect(),
            cycle: self.cycle.iter().map(|&p| table[p]).collect(),
        }
    }

    /// The unique shortest representation of the same sequence: primitive
    /// cycle, with the prefix absorbed into the cycle as far as possible.
    pub fn canonical(&self) -> LassoNet {
        let mut cycle = self.cycle.clone();
        let len = cycle.len();
        if let Some(period) = (1..=len).find(|&p| len.is_multiple_of(p) && (p..len).all(|i| cycle[i] == cycle[i - p])) {
            cycle.truncate(period);
        }
        let mut prefix = self.prefix.clone();
        while let Some(&last) = prefix.last() {
            if last != *cycle.last().expect("nonempty cycle") {
                break;
            }
            prefix.pop();
            cycle.rotate_right(1);
        }
        LassoNet { prefix, cycle }
    }

    pub fn same_sequence(&self, other: &LassoNet) -> bool {
        self.canonical() == other.canonical()
    }
}

/// Every canonical lasso net over `points` points with bounded prefix and
/// cycle lengths, in a deterministic order.
pub fn enumerate_lasso_nets(points: usize, max_prefix: usize, max_cycle: usize) -> Vec<LassoNet> {
    let mut out = std::collections::BTreeSet::new();
    for c in 1..=max_cycle {
        for cycle in words(points, c) {
            for p in 0..=max_prefix {
                for prefix in words(points, p) {
                    out.insert(
                        LassoNet {
                            prefix,
                            cycle: cycle.clone(),
                        }
                        .canonical(),
                    );
                }
            }
        }
    }
    let mut nets: Vec<_> = out.into_iter().collect();
    nets.sort_by(|a, b| {
        (a.prefix.len() + a.cycle.len(), a.cycle.len(), &a.prefix, &a.cycle).cmp(&(
            b.prefix.len() + b.cycle.len(),
            b.cycle.len(),
            &b.prefix,
            &b.cycle,
        ))
    });
    nets
}

/// All words of length `len` over `0..alphabet`.
pub(crate) fn words(alphabet: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..alphabet).map(move |a| {
                    let mut w = w.clone();
                    w.push(a);
                    w
                })
            })
            .collect();
    }
    out
}

/// A monotone cofinal index map `n ↦ start + Σ_{i<n} increment(i)` with
/// eventually periodic positive increments.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubnetSpec {
    start: usize,
    increments: LassoNet,
}

impl SubnetSpec {
    pub fn new(start: usize, prefix: Vec<usize>, cycle: Vec<usize>) -> Result<Self> {
        if prefix.iter().chain(&cycle).any(|&d| d == 0) {
            return Err(Error::InvalidNet("subnet increments must be at least 1".into()));
        }
        Ok(SubnetSpec {
            start,
            increments: LassoNet::new(prefix, cycle)?,
        })
    }

    pub fn identity() -> Self {
        SubnetSpec {
            start: 0,
            increments: LassoNet::constant(1),
        }
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn increments(&self) -> &LassoNet {
        &self.increments
    }

    pub fn index(&self, n: usize) -> usize {
        self.start + (0..n).map(|i| self.increments.value(i)).sum::<usize>()
    }
}

/// Every subnet descriptor with `start ≤ max_start` and increment words of bounded
/// length over `1..=max_step`.
pub fn enumerate_subnet_specs(max_start: usize, max_step: usize, max_prefix: usize, max_cycle: usize) -> Vec<SubnetSpec> {
    let mut out = Vec::new();
    for start in 0..=max_start {
        for c in 1..=max_cycle {
            for cycle in words(max_step, c) {
                for p in 0..=max_prefix {
                    for prefix in words(max_step, p) {
                        let inc = LassoNet {
                            prefix: prefix.iter().map(|d| d + 1).collect(),
                            cycle: cycle.iter().map(|d| d + 1).collect(),
                        };
                        if inc.canonical() == inc {
                            out.push(SubnetSpec { start, increments: inc });
                        }
                    }
                }
            }
        }
    }
    out
}

/// `n ↦ u(φ(n))` as a lasso net.
pub fn compose_subnet(u: &LassoNet, phi: &SubnetSpec) -> LassoNet {
    let p = u.prefix.len();
    let c = u.cycle.len();
    let norm = |i: usize| if i < p { i } else { p + (i - p) % c };
    let ip = phi.increments.prefix.len();
    let ic = phi.increments.cycle.len();
    let inorm = |n: usize| if n < ip { n } else { ip + (n - ip) % ic };

    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    let mut values = Vec::new();
    let mut pos = norm(phi.start);
    let mut step = 0usize;
    loop {
        let state = (pos, step);
        if let Some(&first) = seen.get(&state) {
            let cycle = values[first..].to_vec();
            values.truncate(first);
            return LassoNet { prefix: values, cycle }.canonical();
        }
        seen.insert(state, values.len());
        values.push(u.value(pos));
        pos = norm(pos + phi.increments.value(step));
        step = inorm(step + 1);
    }
}

/// A lasso net on `ℕ × ℕ` whose value depends only on the residue classes
/// of the row and column indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LassoBiNet {
    row_prefix: usize,
    col_prefix: usize,
    table: Vec<Vec<usize>>,
}

impl LassoBiNet {
    /// `table[r][c]` is the value on row class `r`, column class `c`; the
    /// classes past each prefix form the cycle.
    pub fn new(row_prefix: usize, col_prefix: usize, table: Vec<Vec<usize>>) -> Result<Self> {
        let rows = table.len();
        let cols = table.first().map_or(0, Vec::len);
        if rows <= row_prefix || cols <= col_prefix {
            return Err(Error::InvalidNet(format!(
                "bi-net table {rows}×{cols} leaves no cycle after prefixes {row_prefix}, {col_prefix}"
            )));
        }
        if table.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidNet("bi-net table rows have unequal length".into()));
        }
        Ok(LassoBiNet {
            row_prefix,
            col_prefix,
            table,
        })
    }

    pub fn row_prefix(&self) -> usize {
        self.row_prefix
    }

    pub fn col_prefix(&self) -> usize {
        self.col_prefix
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    fn row_class(&self, i: usize) -> usize {
        clamp_class(i, self.row_prefix, self.table.len() - self.row_prefix)
    }

    fn col_class(&self, j: usize) -> usize {
        clamp_class(j, self.col_prefix, self.table[0].len() - self.col_prefix)
    }

    pub fn value(&self, i: usize, j: usize) -> usize {
        self.table[self.row_class(i)][self.col_class(j)]
    }

    /// Values on the cycle × cycle block: every tail set under the product
    /// order from the prefixes on.
    pub fn recurrent_set(&self) -> PointSet {
        self.table[self.row_prefix..]
            .iter()
            .flat_map(|r| r[self.col_prefix..].iter().copied())
            .collect()
    }

    /// Column `j` as a net over the row index.
    pub fn column(&self, j: usize) -> LassoNet {
        let c = self.col_class(j);
        LassoNet {
            prefix: self.table[..self.row_prefix].iter().map(|r| r[c]).collect(),
            cycle: self.table[self.row_prefix..].iter().map(|r| r[c]).collect(),
        }
    }

    /// Recurrent sets of the columns in the column cycle.
    pub fn cycle_column_sets(&self) -> Vec<PointSet> {
        (self.col_prefix..self.table[0].len())
            .map(|c| self.table[self.row_prefix..].iter().map(|r| r[c]).collect())
            .collect()
    }

    pub fn check_points(&self, space: &FinSpace) -> Result<()> {
        for &p in self.table.iter().flatten() {
            space.check_point(p)?;
        }
        Ok(())
    }
}

fn clamp_class(i: usize, prefix: usize, cycle: usize) -> usize {
    if i < prefix {
        i
    } else {
        prefix + (i - prefix) % cycle
    }
}

/// The principal filter `{A : core ⊆ A}` on a finite space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinFilter {
    space: Arc<FinSpace>,
    core: PointSet,
    tau_derived: bool,
}

impl FinFilter {
    pub fn new(space: Arc<FinSpace>, core: PointSet, tau_derived: bool) -> Result<Self> {
        if core.is_empty() || !core.is_subset(space.full()) {
            return Err(Error::InvalidArgument(format!(
                "filter core {core:?} must be a nonempty subset of the space"
            )));
        }
        if tau_derived && !space.is_open(core) {
            return Err(Error::InvalidArgument(format!("derived filter core {core:?} is not open")));
        }
        Ok(FinFilter {
            space,
            core,
            tau_derived,
        })
    }

    pub fn space(&self) -> &Arc<FinSpace> {
        &self.space
    }

    pub fn core(&self) -> PointSet {
        self.core
    }

    pub fn tau_derived(&self) -> bool {
        self.tau_derived
    }

    pub fn contains(&self, set: PointSet) -> bool {
        self.core.is_subset(set)
    }

    /// `self ⊇ other` as families of sets.
    pub fn refines(&self, other: &FinFilter) -> bool {
        self.core.is_subset(other.core)
    }
}

/// Smallest open set containing `set`.
pub fn open_hull(space: &FinSpace, set: PointSet) -> PointSet {
    set.iter()
        .fold(PointSet::EMPTY, |acc, x| acc.union(space.minimal_neighborhood(x)))
}

/// The derived `τ`-filter of `u`.
pub fn derived_filter(u: &LassoNet, space: Arc<FinSpace>) -> Result<FinFilter> {
    u.check_points(&space)?;
    let core = open_hull(&space, u.recurrent_set());
    FinFilter::new(space, core, true)
}

/// Every tail of `v` contains a tail of `u`.
pub fn is_aa_subnet(u: &LassoNet, v: &LassoNet) -> bool {
    u.recurrent_set().is_subset(v.recurrent_set())
}

/// Bounded unrolling check of the same relation, straight from the tail
/// quantifiers.
pub fn is_aa_subnet_unrolled(u: &LassoNet, v: &LassoNet) -> bool {
    let horizon = 2 * (u.prefix.len() + u.cycle.len() + v.prefix.len() + v.cycle.len());
    (0..horizon).all(|j| (0..horizon).any(|i| u.tail_set(i).is_subset(v.tail_set(j))))
}

/// The net `(x, A) ↦ x` over the filter's members: on a finite space its
/// tail is the whole core.
pub fn associated_net(filter: &FinFilter) -> LassoNet {
    LassoNet {
        prefix: Vec::new(),
        cycle: filter.core.iter().collect(),
    }
}

/// Sample derived nets `A ↦ w(A) ∈ A` of a principal filter.
///
/// Members are linearised along a chain shrinking from the full set to the
/// core; the core is the top of the member order, so each derived net ends
/// in the constant `w(core)`. The first sample always selects the least
/// point of the core.
pub fn filter_derived_net_samples(filter: &FinFilter, count: usize, seed: u64) -> Result<Vec<LassoNet>> {
    if count == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let core = filter.core;
    let mut out = vec![LassoNet::constant(core.first().expect("nonempty core"))];
    let outside: Vec<usize> = filter.space.full().difference(core).iter().collect();
    while out.len() < count {
        let mut order = outside.clone();
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let mut member = filter.space.full();
        let mut prefix = Vec::with_capacity(order.len());
        for drop in order {
            prefix.push(pick(member, &mut rng));
            member = member.without(drop);
        }
        let top = pick(core, &mut rng);
        out.push(LassoNet {
            prefix,
            cycle: vec![top],
        });
    }
    Ok(out)
}

fn pick(set: PointSet, rng: &mut ChaCha8Rng) -> usize {
    let members: Vec<usize> = set.iter().collect();
    members[rng.gen_range(0..members.len())]
}
