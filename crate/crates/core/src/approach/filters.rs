// SPDX-License-Identifier: Apache-2.0

//! Cauchy filters and the cauchy structure of a csb base.

use std::sync::Arc;

use serde::Serialize;

use super::{approach_sets, classify_base, Method, Verdict};
use crate::error::{Error, Result};
use crate::net::{associated_net, filter_derived_net_samples, FinFilter};
use crate::pointset::PointSet;
use crate::space::{GradedBase, ENUMERATION_CAP};

/// Result of testing a filter for cauchyness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FilterCheck {
    pub verdict: Verdict,
    pub samples: usize,
    /// Whether the net `(x, A) ↦ x` over all members is cauchy. Its tail is
    /// the whole core, so on a finite space it can disagree with the derived
    /// nets, whose tails are single points of the core.
    pub associated_net_cauchy: bool,
}

/// Tests sampled derived nets of `filter` together with the canonical one
/// that selects the least core point.
///
/// A principal filter's member order has the core as its top element, so
/// every derived net is eventually constant and therefore cauchy.
pub fn cauchy_filter_check(filter: &FinFilter, base: &GradedBase, samples: usize, seed: u64) -> Result<FilterCheck> {
    if filter.space().as_ref() != base.space().as_ref() {
        return Err(Error::InvalidArgument("filter and base live on different spaces".into()));
    }
    let nets = filter_derived_net_samples(filter, samples, seed)?;
    let mut verdict = Verdict::holds(Method::KernelReduction);
    for w in &nets {
        let v = approach_sets(w.recurrent_set(), w.recurrent_set(), base);
        if !v.holds {
            verdict = v;
            verdict.nets = Some((w.clone(), w.clone()));
            break;
        }
    }
    assert!(verdict.holds, "a derived net of a principal filter is eventually constant");
    let assoc = associated_net(filter).recurrent_set();
    Ok(FilterCheck {
        verdict,
        samples: nets.len(),
        associated_net_cauchy: approach_sets(assoc, assoc, base).holds,
    })
}

/// The principal filters of a csb base marked by cauchyness, with the three
/// cauchy-space axioms checked on the marked family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CauchyStructure {
    pub filters: Vec<(PointSet, bool)>,
    pub point_filters_cauchy: bool,
    pub upward_closed: bool,
    pub compatible_meets_closed: bool,
}

impl CauchyStructure {
    pub fn axioms_hold(&self) -> bool {
        self.point_filters_cauchy && self.upward_closed && self.compatible_meets_closed
    }

    pub fn cauchy_count(&self) -> usize {
        self.filters.iter().filter(|(_, c)| *c).count()
    }
}

/// Enumerates the principal filters of a csb base.
pub fn cauchy_structure(base: &GradedBase, samples: usize, seed: u64) -> Result<CauchyStructure> {
    if !classify_base(base).csb.holds {
        return Err(Error::NotCsb);
    }
    let space = base.space();
    let n = space.point_count();
    if n > ENUMERATION_CAP {
        return Err(Error::SizeOverflow {
            points: n,
            cap: ENUMERATION_CAP,
        });
    }
    let mut filters = Vec::new();
    for core in space.full().subsets().filter(|s| !s.is_empty()) {
        let f = FinFilter::new(Arc::clone(space), core, false)?;
        let check = cauchy_filter_check(&f, base, samples, seed)?;
        filters.push((core, check.verdict.holds));
    }
    filters.sort_by_key(|(c, _)| c.canonical_key());
    let is_cauchy = |core: PointSet| filters.iter().find(|(c, _)| *c == core).map(|(_, m)| *m).unwrap_or(false);
    let point_filters_cauchy = (0..n).all(|x| is_cauchy(PointSet::singleton(x)));
    // Finer filters have smaller cores.
    let upward_closed = filters
        .iter()
        .filter(|(_, m)| *m)
        .all(|(f, _)| filters.iter().filter(|(g, _)| g.is_subset(*f)).all(|(_, m)| *m));
    // For principal filters, all members meet iff the cores meet, and the
    // meet filter has the union of the cores.
    let compatible_meets_closed = filters.iter().filter(|(_, m)| *m).all(|(f, _)| {
        filters
            .iter()
            .filter(|(g, m)| *m && g.intersects(*f))
            .all(|(g, _)| is_cauchy(f.union(*g)))
    });
    Ok(CauchyStructure {
        filters,
        point_filters_cauchy,
        upward_closed,
        compatible_meets_closed,
    })
}
