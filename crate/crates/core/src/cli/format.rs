// SPDX-License-Identifier: Apache-2.0

//! Label-based rendering of nets, sets and verdicts.

use serde_json::{json, Value};

use crate::approach::{Verdict, Witness};
use crate::net::LassoNet;
use crate::pointset::PointSet;
use crate::space::FinSpace;

pub fn labels(space: &FinSpace, set: PointSet) -> Vec<String> {
    set.iter().map(|i| space.label(i).to_string()).collect()
}

pub fn fmt_set(space: &FinSpace, set: PointSet) -> String {
    format!("{{{}}}", labels(space, set).join(", "))
}

/// `a b (c d)^ω`: the prefix, then the repeating cycle.
pub fn fmt_net(space: &FinSpace, u: &LassoNet) -> String {
    let word = |xs: &[usize]| xs.iter().map(|&i| space.label(i)).collect::<Vec<_>>().join(" ");
    if u.prefix().is_empty() {
        format!("({})^ω", word(u.cycle()))
    } else {
        format!("{} ({})^ω", word(u.prefix()), word(u.cycle()))
    }
}

pub fn net_json(space: &FinSpace, u: &LassoNet) -> Value {
    let word = |xs: &[usize]| xs.iter().map(|&i| space.label(i)).collect::<Vec<_>>();
    json!({ "prefix": word(u.prefix()), "cycle": word(u.cycle()) })
}

pub fn fmt_witness(space: &FinSpace, w: &Witness) -> String {
    format!(
        "level {}, point {}, member {}, excluded {}",
        w.level,
        space.label(w.point),
        fmt_set(space, space.opens()[w.member]),
        space.label(w.excluded)
    )
}

pub fn witness_json(space: &FinSpace, w: &Witness) -> Value {
    json!({
        "level": w.level,
        "point": space.label(w.point),
        "member": labels(space, space.opens()[w.member]),
        "excluded": space.label(w.excluded),
    })
}

/// `holds`, or `fails, witness ...` with the falsifying nets when known.
pub fn verdict_line(space: &FinSpace, v: &Verdict) -> String {
    if v.holds {
        return "holds".into();
    }
    let mut s = String::from("fails, witness ");
    if let Some((u, w)) = &v.nets {
        s.push_str(&format!("u = {}, v = {}, ", fmt_net(space, u), fmt_net(space, w)));
    }
    match &v.witness {
        Some(w) => s.push_str(&fmt_witness(space, w)),
        None => s.push_str("none"),
    }
    s
}

pub fn verdict_json(space: &FinSpace, v: &Verdict) -> Value {
    json!({
        "holds": v.holds,
        "method": v.method,
        "witness": v.witness.as_ref().map(|w| witness_json(space, w)),
        "nets": v.nets.as_ref().map(|(u, w)| [net_json(space, u), net_json(space, w)]),
    })
}
