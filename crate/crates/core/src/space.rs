// SPDX-License-Identifier: Apache-2.0

//! Finite topological spaces, graded bases and the elementary predicates the
//! tier-1 decision procedures are built on.
//!
//! Open sets are bitmasks over point indices kept in canonical order
//! (cardinality, then numeric mask), so two equal topologies always compare
//! and serialize identically. A [`GradedBase`] partitions a base of the
//! topology into labelled levels, each of which must be an open cover.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pointset::{PointSet, MAX_POINTS};

/// Cap on point counts for operations that enumerate all subsets.
pub const ENUMERATION_CAP: usize = 16;

/// A finite topological space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinSpace {
    labels: Vec<String>,
    opens: Vec<PointSet>,
    open_index: HashMap<PointSet, usize>,
}

impl FinSpace {
    /// Builds a space from labels and a family of opens; the family must
    /// already be a topology.
    pub fn new(labels: Vec<String>, opens: Vec<PointSet>) -> Result<Self> {
        let raw: Vec<Vec<usize>> = opens.iter().map(|o| o.iter().collect()).collect();
        let report = validate_raw(&labels, &raw, None);
        if !report.is_valid() {
            return Err(Error::InvalidSpace(report.summary()));
        }
        Ok(Self::from_canonical_parts(labels, opens))
    }

    fn from_canonical_parts(labels: Vec<String>, mut opens: Vec<PointSet>) -> Self {
        opens.sort_by_key(|o| o.canonical_key());
        opens.dedup();
        let open_index = opens.iter().enumerate().map(|(i, o)| (*o, i)).collect();
        FinSpace {
            labels,
            opens,
            open_index,
        }
    }

    /// The topology generated by `subbase`: closure under finite
    /// intersection and arbitrary union, with the full set always open.
    pub fn from_subbase(labels: Vec<String>, subbase: &[PointSet]) -> Result<Self> {
        let n = labels.len();
        check_labels(&labels)?;
        if n > ENUMERATION_CAP {
            return Err(Error::SizeOverflow {
                points: n,
                cap: ENUMERATION_CAP,
            });
        }
        let full = PointSet::full(n);
        if let Some(bad) = subbase.iter().find(|s| !s.is_subset(full)) {
            return Err(Error::InvalidSpace(format!(
                "subbase member {bad:?} mentions points outside the space"
            )));
        }
        // On a finite space the generated topology is the family of sets that
        // contain the minimal neighbourhood of each of their points.
        let minimal: Vec<PointSet> = (0..n)
            .map(|x| {
                subbase
                    .iter()
                    .filter(|s| s.contains(x))
                    .fold(full, |acc, s| acc.intersection(*s))
            })
            .collect();
        let opens = full
            .subsets()
            .filter(|s| s.iter().all(|x| minimal[x].is_subset(*s)))
            .collect();
        Ok(Self::from_canonical_parts(labels, opens))
    }

    pub fn discrete(n: usize) -> Self {
        let labels = (0..n).map(|i| i.to_string()).collect();
        let singles: Vec<_> = (0..n).map(PointSet::singleton).collect();
        FinSpace::from_subbase(labels, &singles).expect("discrete space within cap")
    }

    pub fn indiscrete(n: usize) -> Self {
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::from_canonical_parts(labels, vec![PointSet::EMPTY, PointSet::full(n)])
    }

    /// The two-point space `{a, b}` with opens `∅, {a}, {a, b}`.
    pub fn sierpinski() -> Self {
        Self::from_canonical_parts(
            vec!["a".into(), "b".into()],
            vec![PointSet::EMPTY, PointSet::singleton(0), PointSet::full(2)],
        )
    }

    pub fn point_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn point_index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownPoint(label.to_string()))
    }

    pub fn check_point(&self, i: usize) -> Result<()> {
        if i < self.point_count() {
            Ok(())
        } else {
            Err(Error::PointOutOfRange {
                index: i,
                len: self.point_count(),
            })
        }
    }

    pub fn full(&self) -> PointSet {
        PointSet::full(self.point_count())
    }

    /// Opens in canonical order.
    pub fn opens(&self) -> &[PointSet] {
        &self.opens
    }

    pub fn open_index(&self, set: PointSet) -> Option<usize> {
        self.open_index.get(&set).copied()
    }

    pub fn is_open(&self, set: PointSet) -> bool {
        self.open_index.contains_key(&set)
    }

    pub fn is_closed(&self, set: PointSet) -> bool {
        self.is_open(set.complement(self.point_count()))
    }

    /// Intersection of all opens containing `x`.
    pub fn minimal_neighborhood(&self, x: usize) -> PointSet {
        self.opens
            .iter()
            .filter(|o| o.contains(x))
            .fold(self.full(), |acc, o| acc.intersection(*o))
    }

    /// Largest open subset of `a`.
    pub fn interior(&self, a: PointSet) -> PointSet {
        self.opens
            .iter()
            .filter(|o| o.is_subset(a))
            .fold(PointSet::EMPTY, |acc, o| acc.union(*o))
    }

    /// Smallest closed superset of `a`.
    pub fn closure(&self, a: PointSet) -> PointSet {
        let n = self.point_count();
        self.interior(a.complement(n)).complement(n)
    }

    pub fn is_nowhere_dense(&self, a: PointSet) -> bool {
        self.interior(self.closure(a)).is_empty()
    }

    pub fn is_hausdorff(&self) -> bool {
        let n = self.point_count();
        (0..n).all(|x| {
            (x + 1..n).all(|y| {
                self.opens
                    .iter()
                    .filter(|o| o.contains(x))
                    .any(|u| self.opens.iter().filter(|o| o.contains(y)).any(|v| !u.intersects(*v)))
            })
        })
    }

    /// Every neighbourhood of a point contains the closure of a smaller one.
    pub fn is_regular(&self) -> bool {
        (0..self.point_count()).all(|x| {
            self.opens.iter().filter(|o| o.contains(x)).all(|o| {
                self.opens
                    .iter()
                    .filter(|u| u.contains(x))
                    .any(|u| self.closure(*u).is_subset(*o))
            })
        })
    }

    /// The subspace on `a`, with points relabelled in index order.
    pub fn subspace(&self, a: PointSet) -> Result<(FinSpace, Vec<usize>)> {
        if !a.is_subset(self.full()) {
            return Err(Error::InvalidArgument(format!("subset {a:?} is not contained in the space")));
        }
        let embed: Vec<usize> = a.iter().collect();
        let labels = embed.iter().map(|&i| self.labels[i].clone()).collect();
        let opens = self.opens.iter().map(|o| restrict(o.intersection(a), &embed)).collect();
        Ok((Self::from_canonical_parts(labels, opens), embed))
    }
}

/// Re-indexes `set` (a subset of the image of `embed`) into `0..embed.len()`.
pub(crate) fn restrict(set: PointSet, embed: &[usize]) -> PointSet {
    embed
        .iter()
        .enumerate()
        .filter(|(_, &p)| set.contains(p))
        .map(|(i, _)| i)
        .collect()
}

fn check_labels(labels: &[String]) -> Result<()> {
    if labels.len() > MAX_POINTS {
        return Err(Error::SizeOverflow {
            points: labels.len(),
            cap: MAX_POINTS,
        });
    }
    let mut seen = std::collections::HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::InvalidSpace(format!("duplicate point label `{l}`")));
        }
    }
    Ok(())
}

/// A base of a finite topology partitioned into labelled open covers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedBase {
    space: Arc<FinSpace>,
    levels: BTreeMap<String, Vec<usize>>,
    kernels: Vec<PointSet>,
}

impl GradedBase {
    /// Levels map labels to indices into `space.opens()`.
    pub fn new(space: Arc<FinSpace>, levels: BTreeMap<String, Vec<usize>>) -> Result<Self> {
        let report = validate(&space, &levels);
        if !report.is_valid() {
            return Err(Error::InvalidSpace(report.summary()));
        }
        Ok(Self::new_unchecked(space, levels))
    }

    /// Builds a base from member point sets (each must be open in `space`).
    pub fn from_sets(space: Arc<FinSpace>, levels: BTreeMap<String, Vec<PointSet>>) -> Result<Self> {
        let mut idx = BTreeMap::new();
        for (label, sets) in levels {
            let mut members = Vec::with_capacity(sets.len());
            for s in sets {
                let i = space
                    .open_index(s)
                    .ok_or_else(|| Error::InvalidSpace(format!("level `{label}` member {s:?} is not open")))?;
                members.push(i);
            }
            idx.insert(label, members);
        }
        GradedBase::new(space, idx)
    }

    pub(crate) fn new_unchecked(space: Arc<FinSpace>, mut levels: BTreeMap<String, Vec<usize>>) -> Self {
        for members in levels.values_mut() {
            members.sort_unstable();
            members.dedup();
        }
        let full = space.full();
        let kernels = (0..space.point_count())
            .map(|x| {
                levels
                    .values()
                    .flatten()
                    .map(|&i| space.opens[i])
                    .filter(|o| o.contains(x))
                    .fold(full, |acc, o| acc.intersection(o))
            })
            .collect();
        GradedBase { space, levels, kernels }
    }

    /// One level `e0` made of the minimal neighbourhoods.
    pub fn kernel_base(space: Arc<FinSpace>) -> Self {
        let mut members: Vec<usize> = (0..space.point_count())
            .map(|x| space.open_index(space.minimal_neighborhood(x)).expect("minimal nbhd is open"))
            .collect();
        members.sort_unstable();
        members.dedup();
        let mut levels = BTreeMap::new();
        levels.insert("e0".to_string(), members);
        Self::new_unchecked(space, levels)
    }

    /// Level `e0` is `{X}`, level `e1` holds every nonempty open.
    pub fn full_base(space: Arc<FinSpace>) -> Self {
        let full_idx = space.open_index(space.full()).expect("full set open");
        let all: Vec<usize> = (0..space.opens().len()).filter(|&i| !space.opens()[i].is_empty()).collect();
        let mut levels = BTreeMap::new();
        levels.insert("e0".to_string(), vec![full_idx]);
        levels.insert("e1".to_string(), all);
        Self::new_unchecked(space, levels)
    }

    pub fn space(&self) -> &Arc<FinSpace> {
        &self.space
    }

    pub fn levels(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.levels
    }

    /// `(level label, open index, member set)` for every member of every level.
    pub fn members(&self) -> impl Iterator<Item = (&str, usize, PointSet)> + '_ {
        self.levels
            .iter()
            .flat_map(move |(label, idx)| idx.iter().map(move |&i| (label.as_str(), i, self.space.opens[i])))
    }

    pub fn level_members(&self, label: &str) -> Vec<PointSet> {
        self.levels
            .get(label)
            .map(|v| v.iter().map(|&i| self.space.opens[i]).collect())
            .unwrap_or_default()
    }

    /// Intersection of all base members containing `x`.
    pub fn kernel(&self, x: usize) -> Result<PointSet> {
        self.space.check_point(x)?;
        Ok(self.kernels[x])
    }

    pub fn kernel_by_label(&self, label: &str) -> Result<PointSet> {
        let x = self.space.point_index(label)?;
        self.kernel(x)
    }

    pub(crate) fn kernels(&self) -> &[PointSet] {
        &self.kernels
    }

    /// Same members, new grading. Each new level must still be a cover.
    pub fn regrade(&self, levels: BTreeMap<String, Vec<usize>>) -> Result<Self> {
        GradedBase::new(self.space.clone(), levels)
    }

    /// Subspace base `{O ∩ A}` on the subspace `A`.
    pub fn subspace(&self, a: PointSet) -> Result<(GradedBase, Vec<usize>)> {
        let (sub, embed) = self.space.subspace(a)?;
        let sub = Arc::new(sub);
        let levels = self
            .levels
            .iter()
            .map(|(label, idx)| {
                let members = idx
                    .iter()
                    .map(|&i| {
                        let s = restrict(self.space.opens[i].intersection(a), &embed);
                        sub.open_index(s).expect("restricted open is open")
                    })
                    .collect();
                (label.clone(), members)
            })
            .collect();
        Ok((GradedBase::new_unchecked(sub, levels), embed))
    }
}

/// One violated invariant of a space/base document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Problem {
    NoPoints,
    DuplicateLabel { label: String },
    PointIndexOutOfRange { open: usize, index: usize },
    MissingEmptySet,
    MissingFullSet,
    NotUnionClosed { left: Vec<usize>, right: Vec<usize> },
    NotIntersectionClosed { left: Vec<usize>, right: Vec<usize> },
    OpenIndexOutOfRange { level: String, index: usize },
    EmptyLevel { level: String },
    NoLevels,
    NotACover { level: String, uncovered: Vec<String> },
    NotABase { open: Vec<usize> },
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Problem::NoPoints => write!(f, "no points"),
            Problem::DuplicateLabel { label } => write!(f, "duplicate label `{label}`"),
            Problem::PointIndexOutOfRange { open, index } => write!(f, "open {open}: point index {index} out of range"),
            Problem::MissingEmptySet => write!(f, "the empty set is not open"),
            Problem::MissingFullSet => write!(f, "the whole space is not open"),
            Problem::NotUnionClosed { left, right } => write!(f, "union of {left:?} and {right:?} is not open"),
            Problem::NotIntersectionClosed { left, right } => write!(f, "intersection of {left:?} and {right:?} is not open"),
            Problem::OpenIndexOutOfRange { level, index } => write!(f, "level `{level}`: open index {index} out of range"),
            Problem::EmptyLevel { level } => write!(f, "level `{level}` is empty"),
            Problem::NoLevels => write!(f, "no levels"),
            Problem::NotACover { level, uncovered } => write!(f, "level `{level}` does not cover {}", uncovered.join(", ")),
            Problem::NotABase { open } => write!(f, "open {open:?} is not a union of base members"),
        }
    }
}

/// Report-style validation outcome.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub problems: Vec<Problem>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.problems.is_empty()
    }

    pub fn summary(&self) -> String {
        if self.problems.is_empty() {
            return "well-formed graded base space".into();
        }
        self.problems.iter().map(Problem::to_string).collect::<Vec<_>>().join("; ")
    }
}

/// Validates a raw (possibly malformed) space and optional base; never fails.
pub fn validate_raw(labels: &[String], opens: &[Vec<usize>], levels: Option<&BTreeMap<String, Vec<usize>>>) -> ValidationReport {
    let mut problems = Vec::new();
    let n = labels.len();
    if n == 0 {
        problems.push(Problem::NoPoints);
    }
    let mut seen = std::collections::HashSet::new();
    for l in labels {
        if !seen.insert(l) {
            problems.push(Problem::DuplicateLabel { label: l.clone() });
        }
    }
    if n > MAX_POINTS {
        problems.push(Problem::NoPoints);
        return ValidationReport { problems };
    }
    let mut sets = Vec::with_capacity(opens.len());
    for (oi, o) in opens.iter().enumerate() {
        let mut s = PointSet::EMPTY;
        for &p in o {
            if p >= n {
                problems.push(Problem::PointIndexOutOfRange { open: oi, index: p });
            } else {
                s = s.with(p);
            }
        }
        sets.push(s);
    }
    let family: std::collections::HashSet<PointSet> = sets.iter().copied().collect();
    let full = PointSet::full(n);
    if !family.contains(&PointSet::EMPTY) {
        problems.push(Problem::MissingEmptySet);
    }
    if !family.contains(&full) {
        problems.push(Problem::MissingFullSet);
    }
    let mut distinct: Vec<PointSet> = family.iter().copied().collect();
    distinct.sort_by_key(|s| s.canonical_key());
    for (i, a) in distinct.iter().enumerate() {
        for b in &distinct[i + 1..] {
            if !family.contains(&a.union(*b)) {
                problems.push(Problem::NotUnionClosed {
                    left: a.iter().collect(),
                    right: b.iter().collect(),
                });
            }
            if !family.contains(&a.intersection(*b)) {
                problems.push(Problem::NotIntersectionClosed {
                    left: a.iter().collect(),
                    right: b.iter().collect(),
                });
            }
        }
    }
    if let Some(levels) = levels {
        if levels.is_empty() {
            problems.push(Problem::NoLevels);
        }
        let mut base_members = Vec::new();
        for (label, idx) in levels {
            if idx.is_empty() {
                problems.push(Problem::EmptyLevel { level: label.clone() });
                continue;
            }
            let mut cover = PointSet::EMPTY;
            for &i in idx {
                match sets.get(i) {
                    Some(s) => {
                        cover = cover.union(*s);
                        base_members.push(*s);
                    }
                    None => problems.push(Problem::OpenIndexOutOfRange {
                        level: label.clone(),
                        index: i,
                    }),
                }
            }
            if cover != full {
                problems.push(Problem::NotACover {
                    level: label.clone(),
                    uncovered: full.difference(cover).iter().map(|p| labels[p].clone()).collect(),
                });
            }
        }
        for o in &distinct {
            let covered = base_members
                .iter()
                .filter(|b| b.is_subset(*o))
                .fold(PointSet::EMPTY, |acc, b| acc.union(*b));
            if covered != *o {
                problems.push(Problem::NotABase {
                    open: o.iter().collect(),
                });
            }
        }
    }
    ValidationReport { problems }
}

/// Validates a typed space together with a candidate grading.
pub fn validate(space: &FinSpace, levels: &BTreeMap<String, Vec<usize>>) -> ValidationReport {
    let opens: Vec<Vec<usize>> = space.opens.iter().map(|o| o.iter().collect()).collect();
    validate_raw(&space.labels, &opens, Some(levels))
}

/// A map between finite spaces given by a point table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceMap {
    source: Arc<FinSpace>,
    target: Arc<FinSpace>,
    table: Vec<usize>,
}

impl SpaceMap {
    pub fn new(source: Arc<FinSpace>, target: Arc<FinSpace>, table: Vec<usize>) -> Result<Self> {
        if table.len() != source.point_count() {
            return Err(Error::InvalidArgument(format!(
                "map table has {} entries, source has {} points",
                table.len(),
                source.point_count()
            )));
        }
        for &t in &table {
            target.check_point(t)?;
        }
        Ok(SpaceMap { source, target, table })
    }

    pub fn identity(space: Arc<FinSpace>) -> Self {
        let table = (0..space.point_count()).collect();
        SpaceMap {
            source: space.clone(),
            target: space,
            table,
        }
    }

    pub fn source(&self) -> &Arc<FinSpace> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinSpace> {
        &self.target
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn image(&self, set: PointSet) -> PointSet {
        set.iter().map(|x| self.table[x]).collect()
    }

    pub fn preimage(&self, set: PointSet) -> PointSet {
        (0..self.table.len()).filter(|&x| set.contains(self.table[x])).collect()
    }

    pub fn is_continuous_by_preimage(&self) -> bool {
        self.target.opens().iter().all(|o| self.source.is_open(self.preimage(*o)))
    }

    /// `f(K(x)) ⊆ K(f(x))` for the minimal neighbourhoods of both spaces.
    pub fn is_continuous_by_kernel(&self) -> bool {
        (0..self.source.point_count()).all(|x| {
            self.image(self.source.minimal_neighborhood(x))
                .is_subset(self.target.minimal_neighborhood(self.table[x]))
        })
    }
}

/// Continuity, computed both by preimages and by the kernel criterion.
pub fn is_continuous(f: &SpaceMap) -> Result<bool> {
    let by_preimage = f.is_continuous_by_preimage();
    let by_kernel = f.is_continuous_by_kernel();
    if by_preimage != by_kernel {
        return Err(Error::InvariantViolated(format!(
            "preimage continuity {by_preimage} disagrees with kernel criterion {by_kernel}"
        )));
    }
    Ok(by_preimage)
}

/// Quotient by "same base neighbourhoods".
pub fn hausdorffize(base: &GradedBase) -> Result<(FinSpace, GradedBase, SpaceMap)> {
    let space = base.space();
    let n = space.point_count();
    let signature = |x: usize| -> Vec<bool> { base.members().map(|(_, _, o)| o.contains(x)).collect() };
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut sigs: Vec<Vec<bool>> = Vec::new();
    let mut table = vec![0; n];
    for (x, slot) in table.iter_mut().enumerate() {
        let s = signature(x);
        match sigs.iter().position(|t| *t == s) {
            Some(c) => {
                classes[c].push(x);
                *slot = c;
            }
            None => {
                *slot = classes.len();
                classes.push(vec![x]);
                sigs.push(s);
            }
        }
    }
    let labels: Vec<String> = classes
        .iter()
        .map(|c| c.iter().map(|&x| space.label(x)).collect::<Vec<_>>().join("~"))
        .collect();
    let image = |o: PointSet| -> PointSet { o.iter().map(|x| table[x]).collect() };
    let opens: Vec<PointSet> = space.opens().iter().map(|o| image(*o)).collect();
    let quotient = Arc::new(FinSpace::from_canonical_parts(labels, opens));
    let levels = base
        .levels()
        .iter()
        .map(|(label, idx)| {
            let members = idx
                .iter()
                .map(|&i| {
                    quotient
                        .open_index(image(space.opens()[i]))
                        .expect("image of a saturated open is open")
                })
                .collect();
            (label.clone(), members)
        })
        .collect();
    let qbase = GradedBase::new(quotient.clone(), levels)?;
    let map = SpaceMap::new(space.clone(), quotient.clone(), table)?;
    Ok(((*quotient).clone(), qbase, map))
}

/// Every topology on `n` labelled points (`n ≤ 4`), in a fixed order.
///
/// Families of proper nonempty subsets are enumerated by bitmask and kept
/// when closed under pairwise union and intersection.
pub fn all_topologies(n: usize) -> Result<Vec<FinSpace>> {
    if n > 4 {
        return Err(Error::SizeOverflow { points: n, cap: 4 });
    }
    let full = PointSet::full(n);
    let proper: Vec<PointSet> = full.subsets().filter(|s| !s.is_empty() && *s != full).collect();
    let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << proper.len()) {
        let mut family: Vec<PointSet> = (0..proper.len()).filter(|&i| mask >> i & 1 == 1).map(|i| proper[i]).collect();
        family.push(PointSet::EMPTY);
        family.push(full);
        let set: std::collections::HashSet<PointSet> = family.iter().copied().collect();
        let closed = family.iter().all(|a| {
            family
                .iter()
                .all(|b| set.contains(&a.union(*b)) && set.contains(&a.intersection(*b)))
        });
        if closed {
            out.push(FinSpace::from_canonical_parts(labels.clone(), family));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sierpinski_base() -> GradedBase {
        let s = Arc::new(FinSpace::sierpinski());
        GradedBase::from_sets(
            s,
            BTreeMap::from([("e0".to_string(), vec![PointSet::singleton(0), PointSet::full(2)])]),
        )
        .unwrap()
    }

    #[test]
    fn validate_examples() {
        let labels = vec!["a".to_string(), "b".to_string()];
        let opens = vec![vec![], vec![0], vec![0, 1]];
        let good = BTreeMap::from([("e0".to_string(), vec![1, 2])]);
        assert!(validate_raw(&labels, &opens, Some(&good)).is_valid());

        let bad = BTreeMap::from([("e0".to_string(), vec![1])]);
        let r = validate_raw(&labels, &opens, Some(&bad));
        assert!(r.problems.contains(&Problem::NotACover {
            level: "e0".into(),
            uncovered: vec!["b".into()]
        }));

        let r = validate_raw(&labels, &[vec![], vec![0], vec![1]], None);
        assert!(r.problems.contains(&Problem::MissingFullSet));

        let dangling = BTreeMap::from([("e0".to_string(), vec![7])]);
        let r = validate_raw(&labels, &opens, Some(&dangling));
        assert!(r.problems.contains(&Problem::OpenIndexOutOfRange {
            level: "e0".into(),
            index: 7
        }));
    }

    #[test]
    fn kernel_examples() {
        let b = sierpinski_base();
        assert_eq!(b.kernel_by_label("a").unwrap(), PointSet::singleton(0));
        assert_eq!(b.kernel_by_label("b").unwrap(), PointSet::full(2));
        assert!(matches!(b.kernel_by_label("z"), Err(Error::UnknownPoint(_))));
        let d = GradedBase::kernel_base(Arc::new(FinSpace::discrete(3)));
        assert_eq!(d.kernel(1).unwrap(), PointSet::singleton(1));
    }

    #[test]
    fn interior_closure_examples() {
        let s = FinSpace::sierpinski();
        let b = PointSet::singleton(1);
        assert_eq!(s.interior(b), PointSet::EMPTY);
        assert_eq!(s.closure(b), b);
        assert!(s.is_nowhere_dense(b));
        assert_eq!(s.interior(s.full()), s.full());
        assert_eq!(s.closure(s.full()), s.full());
        assert!(!s.is_nowhere_dense(s.full()));
        assert!(s.is_nowhere_dense(PointSet::EMPTY));
    }

    #[test]
    fn separation_examples() {
        let d = FinSpace::discrete(3);
        assert!(d.is_hausdorff() && d.is_regular());
        assert!(!FinSpace::sierpinski().is_hausdorff());
        assert!(!FinSpace::sierpinski().is_regular());
        let i = FinSpace::indiscrete(2);
        assert!(i.is_regular() && !i.is_hausdorff());
    }

    #[test]
    fn hausdorffize_examples() {
        let ind = GradedBase::kernel_base(Arc::new(FinSpace::indiscrete(2)));
        let (q, _, _) = hausdorffize(&ind).unwrap();
        assert_eq!(q.point_count(), 1);

        let d = GradedBase::kernel_base(Arc::new(FinSpace::discrete(3)));
        let (q, _, m) = hausdorffize(&d).unwrap();
        assert_eq!(q.point_count(), 3);
        assert_eq!(m.table(), &[0, 1, 2]);

        let (q, qb, m) = hausdorffize(&sierpinski_base()).unwrap();
        assert_eq!(q.point_count(), 2);
        assert_eq!(m.table(), &[0, 1]);
        assert_eq!(qb.levels()["e0"].len(), 2);
    }

    #[test]
    fn continuity_examples() {
        let s = Arc::new(FinSpace::sierpinski());
        assert!(is_continuous(&SpaceMap::identity(s.clone())).unwrap());
        let constant = SpaceMap::new(s.clone(), s.clone(), vec![1, 1]).unwrap();
        assert!(is_continuous(&constant).unwrap());
        let swap = SpaceMap::new(s.clone(), s.clone(), vec![1, 0]).unwrap();
        assert!(!is_continuous(&swap).unwrap());
        assert!(SpaceMap::new(s.clone(), s, vec![0, 2]).is_err());
    }

    #[test]
    fn subbase_closes_under_intersection_and_union() {
        let labels: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let s = FinSpace::from_subbase(labels, &[PointSet::from_indices([0, 1]), PointSet::from_indices([1, 2])]).unwrap();
        assert!(s.is_open(PointSet::singleton(1)));
        assert_eq!(s.opens().len(), 5);
        assert_eq!(s.opens()[0], PointSet::EMPTY);
        assert_eq!(*s.opens().last().unwrap(), s.full());
    }

    #[test]
    fn topology_counts() {
        // Known counts of labelled topologies on 1..=4 points.
        let counts: Vec<usize> = (1..=4).map(|n| all_topologies(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 4, 29, 355]);
        for s in all_topologies(3).unwrap() {
            for x in 0..3 {
                let k = s.minimal_neighborhood(x);
                assert!(s.is_open(k) && k.contains(x));
            }
        }
    }

    #[test]
    fn subspace_restricts_opens() {
        let b = sierpinski_base();
        let (sub, embed) = b.subspace(PointSet::singleton(1)).unwrap();
        assert_eq!(embed, vec![1]);
        assert_eq!(sub.space().point_count(), 1);
        assert_eq!(sub.kernel(0).unwrap(), PointSet::singleton(0));
    }
}
