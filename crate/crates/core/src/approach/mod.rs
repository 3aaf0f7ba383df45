// SPDX-License-Identifier: Apache-2.0

//! Decision procedures for approach, convergence and cauchyness of lasso nets.
//!
//! The engine works through kernels. A lasso net `u` approaches `v` exactly
//! when the recurrent set of `u` lies in the kernel of every recurrent point of
//! `v`. Selections are made per index, so an adversary may place any member
//! containing `v_j` at infinitely many positions. The grading therefore never
//! changes a verdict on a finite space; only the union of the levels matters.

pub mod filters;
pub mod oracle;
pub mod suite;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::net::{LassoBiNet, LassoNet};
use crate::pointset::PointSet;
use crate::space::{GradedBase, SpaceMap, ENUMERATION_CAP};

pub use filters::{cauchy_filter_check, cauchy_structure, CauchyStructure, FilterCheck};
pub use oracle::{approaches_oracle, OracleCache};
pub use suite::{
    run_axiom_suite, run_topology_sweep, AutoBase, AxiomResult, Budget, Engine, SuiteReport, SweepEntry, SweepReport, SweepTotal,
    AXIOMS,
};

/// Which computation produced a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    KernelReduction,
    BruteForceOracle,
}

/// A falsifying homogeneous selection: at level `level` the member `member`
/// (an index into the space's opens) is chosen at every occurrence of
/// `point`, and it misses `excluded`, a recurrent value of the approaching
/// net.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub level: String,
    pub point: usize,
    pub member: usize,
    pub excluded: usize,
}

/// Outcome of a decision with an optional replayable counterexample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
    pub method: Method,
    /// For relations over all nets (classification, uniformity): the pair
    /// `(u, v)` whose approach `u ⤳ v` the witness refutes (for a map, the
    /// approach of their images). In a classification `v ⤳ u` holds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nets: Option<(LassoNet, LassoNet)>,
}

impl Verdict {
    pub(crate) fn holds(method: Method) -> Self {
        Verdict {
            holds: true,
            witness: None,
            method,
            nets: None,
        }
    }

    pub(crate) fn fails(witness: Witness, method: Method) -> Self {
        Verdict {
            holds: false,
            witness: Some(witness),
            method,
            nets: None,
        }
    }

    pub(crate) fn with_nets(mut self, u: LassoNet, v: LassoNet) -> Self {
        self.nets = Some((u, v));
        self
    }
}

/// Approach between tail sets: every member containing a point of `target`
/// must contain all of `source`.
pub(crate) fn approach_sets(source: PointSet, target: PointSet, base: &GradedBase) -> Verdict {
    for y in target.iter() {
        if source.is_subset(base.kernels()[y]) {
            continue;
        }
        for (level, member, set) in base.members() {
            if set.contains(y) && !source.is_subset(set) {
                let excluded = source.difference(set).first().expect("nonempty difference");
                return Verdict::fails(
                    Witness {
                        level: level.to_string(),
                        point: y,
                        member,
                        excluded,
                    },
                    Method::KernelReduction,
                );
            }
        }
        unreachable!("kernel is the intersection of members containing the point");
    }
    Verdict::holds(Method::KernelReduction)
}

/// Does `u` approach `v`?
pub fn approaches(u: &LassoNet, v: &LassoNet, base: &GradedBase) -> Result<Verdict> {
    u.check_points(base.space())?;
    v.check_points(base.space())?;
    Ok(approach_sets(u.recurrent_set(), v.recurrent_set(), base))
}

/// Approach between bi-nets under the product order on `ℕ × ℕ`.
pub fn approaches_bi(u: &LassoBiNet, v: &LassoBiNet, base: &GradedBase) -> Result<Verdict> {
    u.check_points(base.space())?;
    v.check_points(base.space())?;
    Ok(approach_sets(u.recurrent_set(), v.recurrent_set(), base))
}

/// Does `u` converge to `x`?
pub fn converges(u: &LassoNet, x: usize, base: &GradedBase) -> Result<Verdict> {
    base.space().check_point(x)?;
    approaches(u, &LassoNet::constant(x), base)
}

/// All limit points of `u`.
pub fn limits(u: &LassoNet, base: &GradedBase) -> Result<PointSet> {
    u.check_points(base.space())?;
    Ok(limits_of_set(u.recurrent_set(), base))
}

pub(crate) fn limits_of_set(rec: PointSet, base: &GradedBase) -> PointSet {
    (0..base.space().point_count())
        .filter(|&x| rec.is_subset(base.kernels()[x]))
        .collect()
}

/// `u` approaches itself, equivalently all pairs of its subnets approach.
pub fn is_cauchy(u: &LassoNet, base: &GradedBase) -> Result<Verdict> {
    approaches(u, u, base)
}

/// Cauchyness decided by quantifying over subnet pairs: the recurrent sets
/// of subnets of `u` are exactly the nonempty subsets of its recurrent set.
pub fn is_cauchy_by_subnets(u: &LassoNet, base: &GradedBase) -> Result<bool> {
    u.check_points(base.space())?;
    let rec = u.recurrent_set();
    Ok(rec.subsets().filter(|s| !s.is_empty()).all(|s| {
        rec.subsets()
            .filter(|t| !t.is_empty())
            .all(|t| approach_sets(s, t, base).holds)
    }))
}

/// A point `y` in the kernel of `x` whose own kernel misses `x`.
fn kernel_asymmetry(base: &GradedBase) -> Option<(usize, usize)> {
    let n = base.space().point_count();
    (0..n).find_map(|x| {
        base.kernels()[x]
            .iter()
            .find(|&y| !base.kernels()[y].contains(x))
            .map(|y| (x, y))
    })
}

/// lsb, csb and sb verdicts for a base.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub lsb: Verdict,
    pub csb: Verdict,
    pub sb: Verdict,
}

/// Classifies a base. On a finite space all three classes coincide with
/// symmetry of the kernel preorder: when `y ∈ K(x)` but `x ∉ K(y)`, the
/// constant net at `y` converges to `x` (it is cauchy, as every constant net
/// is) while the constant net at `x` does not approach it.
pub fn classify_base(base: &GradedBase) -> Classification {
    let verdict = match kernel_asymmetry(base) {
        None => Verdict::holds(Method::KernelReduction),
        Some((x, y)) => {
            let v = LassoNet::constant(x);
            let u = LassoNet::constant(y);
            debug_assert!(approach_sets(u.recurrent_set(), v.recurrent_set(), base).holds);
            approach_sets(v.recurrent_set(), u.recurrent_set(), base).with_nets(v, u)
        }
    };
    let c = Classification {
        lsb: verdict.clone(),
        csb: verdict.clone(),
        sb: verdict,
    };
    assert!(
        (!c.sb.holds || c.csb.holds) && (!c.csb.holds || c.lsb.holds),
        "containment chain sb ⊆ csb ⊆ lsb violated"
    );
    c
}

/// Classification straight from the definitions, quantifying over the given
/// nets with an arbitrary approach decision.
pub fn classify_by_enumeration<F>(nets: &[LassoNet], points: usize, approach: F) -> (bool, bool, bool)
where
    F: Fn(&LassoNet, &LassoNet) -> bool,
{
    let constants: Vec<LassoNet> = (0..points).map(LassoNet::constant).collect();
    let lsb = nets
        .iter()
        .all(|u| constants.iter().all(|x| !approach(u, x) || approach(x, u)));
    let cauchy: Vec<&LassoNet> = nets.iter().filter(|v| approach(v, v)).collect();
    let csb = cauchy.iter().all(|v| nets.iter().all(|u| !approach(u, v) || approach(v, u)));
    let sb = nets.iter().all(|v| nets.iter().all(|u| !approach(u, v) || approach(v, u)));
    (lsb, csb, sb)
}

/// Whether `f` maps approaching nets to approaching nets.
///
/// Decided by `f(K(x)) ⊆ K(f(x))`; a failure yields constant nets at a
/// kernel point and its centre.
pub fn is_uniform(f: &SpaceMap, source: &GradedBase, target: &GradedBase) -> Result<Verdict> {
    if f.source().as_ref() != source.space().as_ref() || f.target().as_ref() != target.space().as_ref() {
        return Err(Error::InvalidArgument("map does not match the given base spaces".into()));
    }
    for x in 0..source.space().point_count() {
        for y in source.kernels()[x].iter() {
            let (fx, fy) = (f.apply(x), f.apply(y));
            if !target.kernels()[fx].contains(fy) {
                let verdict = approach_sets(PointSet::singleton(fy), PointSet::singleton(fx), target);
                return Ok(verdict.with_nets(LassoNet::constant(y), LassoNet::constant(x)));
            }
        }
    }
    Ok(Verdict::holds(Method::KernelReduction))
}

fn check_enumerable(base: &GradedBase) -> Result<()> {
    let n = base.space().point_count();
    if n > ENUMERATION_CAP {
        return Err(Error::SizeOverflow {
            points: n,
            cap: ENUMERATION_CAP,
        });
    }
    Ok(())
}

fn nonempty_subsets(base: &GradedBase) -> impl Iterator<Item = PointSet> {
    base.space().full().subsets().filter(|s| !s.is_empty())
}

/// Every cauchy lasso net converges. Lasso nets are classified by their
/// recurrent sets, which range over all nonempty subsets.
pub fn is_complete(base: &GradedBase) -> Result<Verdict> {
    check_enumerable(base)?;
    for rec in nonempty_subsets(base) {
        let cauchy = approach_sets(rec, rec, base).holds;
        if cauchy && limits_of_set(rec, base).is_empty() {
            return Err(Error::InvariantViolated(format!(
                "cauchy tail set {rec:?} has no limit on a finite space"
            )));
        }
    }
    Ok(Verdict::holds(Method::KernelReduction))
}

/// Every lasso net has a cauchy subnet; subnets realise every nonempty
/// subset of the recurrent set.
pub fn is_precompact(base: &GradedBase) -> Result<Verdict> {
    check_enumerable(base)?;
    for rec in nonempty_subsets(base) {
        let found = rec
            .subsets()
            .filter(|s| !s.is_empty())
            .any(|s| approach_sets(s, s, base).holds);
        if !found {
            return Err(Error::InvariantViolated(format!("tail set {rec:?} has no cauchy subnet")));
        }
    }
    Ok(Verdict::holds(Method::KernelReduction))
}

/// Every lasso net has a convergent subnet.
pub fn is_compact(base: &GradedBase) -> Result<Verdict> {
    check_enumerable(base)?;
    for rec in nonempty_subsets(base) {
        let found = rec
            .subsets()
            .filter(|s| !s.is_empty())
            .any(|s| !limits_of_set(s, base).is_empty());
        if !found {
            return Err(Error::InvariantViolated(format!("tail set {rec:?} has no convergent subnet")));
        }
    }
    Ok(Verdict::holds(Method::KernelReduction))
}

/// The three compactness notions together, with compact ⟺ complete and
/// precompact checked on the result.
pub fn compactness_profile(base: &GradedBase) -> Result<(Verdict, Verdict, Verdict)> {
    let complete = is_complete(base)?;
    let precompact = is_precompact(base)?;
    let compact = is_compact(base)?;
    if compact.holds != (complete.holds && precompact.holds) {
        return Err(Error::InvariantViolated(
            "compact differs from complete and precompact".into(),
        ));
    }
    Ok((complete, precompact, compact))
}

/// No finite union of nowhere dense sets covers the space. Requires the
/// hypotheses of the category theorem.
pub fn check_baire(base: &GradedBase) -> Result<Verdict> {
    check_enumerable(base)?;
    let space = base.space();
    if !space.is_hausdorff() {
        return Err(Error::PreconditionUnmet("space is not Hausdorff".into()));
    }
    if !space.is_regular() {
        return Err(Error::PreconditionUnmet("space is not regular".into()));
    }
    if !classify_base(base).lsb.holds {
        return Err(Error::PreconditionUnmet("base is not lsb".into()));
    }
    // Locally complete: every point has the whole (finite, complete) space
    // as a neighbourhood inside a complete set.
    is_complete(base)?;
    let meagre = space
        .full()
        .subsets()
        .filter(|a| space.is_nowhere_dense(*a))
        .fold(PointSet::EMPTY, |acc, a| acc.union(a));
    if meagre == space.full() {
        return Err(Error::InvariantViolated(
            "nowhere dense sets cover a space meeting every hypothesis".into(),
        ));
    }
    Ok(Verdict::holds(Method::KernelReduction))
}

/// Checks that a witness really falsifies `u ⤳ v`: the member belongs to the
/// named level, contains the recurrent point of `v`, and the selection that
/// uses it at every occurrence of that point leaves a recurrent value of `u`
/// outside infinitely often.
pub fn replay_witness(u: &LassoNet, v: &LassoNet, base: &GradedBase, w: &Witness) -> bool {
    let Some(level) = base.levels().get(&w.level) else {
        return false;
    };
    if !level.contains(&w.member) {
        return false;
    }
    let member = base.space().opens()[w.member];
    if !member.contains(w.point) || !v.recurrent_set().contains(w.point) {
        return false;
    }
    if !u.recurrent_set().contains(w.excluded) || member.contains(w.excluded) {
        return false;
    }
    // Replay on the unrolled nets: every occurrence of the point in a late
    // window of v gets the member, and u leaves it in every late window.
    let span = u.prefix().len() + u.cycle().len() + v.prefix().len() + v.cycle().len();
    let occurs_late = (span..2 * span).any(|j| v.value(j) == w.point);
    occurs_late && !oracle::contains_tail(u, member)
}
