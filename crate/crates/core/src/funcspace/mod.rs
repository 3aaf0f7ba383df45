// SPDX-License-Identifier: Apache-2.0

//! Products of finite base spaces and the topologies of uniform, pointwise
//! and set-open convergence on them.

pub mod tier2;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::approach::{approach_sets, classify_base, Verdict};
use crate::error::{Error, Result};
use crate::net::LassoNet;
use crate::pointset::{PointSet, MAX_POINTS};
use crate::space::{FinSpace, GradedBase};
use crate::uspace::UStructureFin;

/// Finite index set with one base space per index.
#[derive(Clone, Debug)]
pub struct ProductSpec {
    index_labels: Vec<String>,
    factors: Vec<GradedBase>,
    radices: Vec<usize>,
    size: usize,
}

impl ProductSpec {
    pub fn new(index_labels: Vec<String>, factors: Vec<GradedBase>) -> Result<Self> {
        if index_labels.is_empty() || index_labels.len() != factors.len() {
            return Err(Error::InvalidArgument(
                "a product needs one factor per index and at least one index".into(),
            ));
        }
        let radices: Vec<usize> = factors.iter().map(|f| f.space().point_count()).collect();
        let size = radices
            .iter()
            .try_fold(1usize, |acc, &r| acc.checked_mul(r).filter(|&s| s <= MAX_POINTS))
            .ok_or(Error::SizeOverflow {
                points: radices.iter().product(),
                cap: MAX_POINTS,
            })?;
        Ok(ProductSpec {
            index_labels,
            factors,
            radices,
            size,
        })
    }

    /// `X^Y` for a shared base `X`.
    pub fn power(base: GradedBase, index_labels: Vec<String>) -> Result<Self> {
        let factors = vec![base; index_labels.len()];
        ProductSpec::new(index_labels, factors)
    }

    pub fn index_labels(&self) -> &[String] {
        &self.index_labels
    }

    pub fn factors(&self) -> &[GradedBase] {
        &self.factors
    }

    pub fn point_count(&self) -> usize {
        self.size
    }

    /// Coordinates of a tuple point; the first index varies slowest.
    pub fn coords(&self, p: usize) -> Vec<usize> {
        let mut out = vec![0; self.radices.len()];
        let mut rest = p;
        for (i, &r) in self.radices.iter().enumerate().rev() {
            out[i] = rest % r;
            rest /= r;
        }
        out
    }

    pub fn point_of(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.radices).fold(0, |acc, (&c, &r)| acc * r + c)
    }

    fn labels(&self) -> Vec<String> {
        (0..self.size)
            .map(|p| {
                let parts: Vec<&str> = self
                    .coords(p)
                    .iter()
                    .zip(&self.factors)
                    .map(|(&c, f)| f.space().label(c))
                    .collect();
                format!("({})", parts.join(","))
            })
            .collect()
    }

    /// `{f : f(y) ∈ O_y for all y ∈ Z}`; indices outside `Z` are ignored.
    pub fn cylinder(&self, z: PointSet, sets: &[PointSet]) -> PointSet {
        (0..self.size)
            .filter(|&p| {
                self.coords(p)
                    .iter()
                    .enumerate()
                    .all(|(y, &c)| !z.contains(y) || sets[y].contains(c))
            })
            .collect()
    }

    /// The product topology from all cylinders over factor opens.
    pub fn product_topology(&self) -> Result<FinSpace> {
        let mut subbase = Vec::new();
        for (y, f) in self.factors.iter().enumerate() {
            for o in f.space().opens() {
                let mut sets: Vec<PointSet> = self.factors.iter().map(|g| g.space().full()).collect();
                sets[y] = *o;
                subbase.push(self.cylinder(PointSet::singleton(y), &sets));
            }
        }
        FinSpace::from_subbase(self.labels(), &subbase)
    }

    /// Projection of a tuple-space net onto index `y`.
    pub fn project(&self, u: &LassoNet, y: usize) -> LassoNet {
        let table: Vec<usize> = (0..self.size).map(|p| self.coords(p)[y]).collect();
        u.map(&table)
    }

    /// All level tuples, named by joining the factor level labels with `,`.
    fn level_tuples(&self) -> Vec<(String, Vec<String>)> {
        let mut out: Vec<Vec<String>> = vec![Vec::new()];
        for f in &self.factors {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    f.levels().keys().map(move |l| {
                        let mut t = prefix.clone();
                        t.push(l.clone());
                        t
                    })
                })
                .collect();
        }
        out.into_iter().map(|t| (t.join(","), t)).collect()
    }
}

/// Closes a family under pairwise intersection, dropping the empty set.
fn intersection_closure(mut sets: Vec<PointSet>) -> Vec<PointSet> {
    sets.retain(|s| !s.is_empty());
    sets.sort_by_key(|s| s.canonical_key());
    sets.dedup();
    let mut i = 0;
    while i < sets.len() {
        for j in 0..i {
            let m = sets[i].intersection(sets[j]);
            if !m.is_empty() && !sets.contains(&m) {
                sets.push(m);
            }
        }
        i += 1;
    }
    sets.sort_by_key(|s| s.canonical_key());
    sets
}

/// Families of index sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ZFamily {
    Singletons,
    Whole,
    /// On a finite index set every subset is compact.
    Compacts,
    /// Closed subsets of the index set under the given opens (index sets).
    Completes {
        opens: Vec<Vec<usize>>,
    },
    Explicit {
        sets: Vec<Vec<usize>>,
    },
}

impl ZFamily {
    pub fn sets(&self, indices: usize) -> Result<Vec<PointSet>> {
        let full = PointSet::full(indices);
        let listed = match self {
            ZFamily::Completes { opens } => opens.as_slice(),
            ZFamily::Explicit { sets } => sets.as_slice(),
            _ => &[],
        };
        if listed.iter().flatten().any(|&i| i >= indices) {
            return Err(Error::InvalidArgument("index set outside the index range".into()));
        }
        let mut out: Vec<PointSet> = match self {
            ZFamily::Singletons => (0..indices).map(PointSet::singleton).collect(),
            ZFamily::Whole => vec![full],
            ZFamily::Compacts => full.subsets().filter(|s| !s.is_empty()).collect(),
            ZFamily::Completes { opens } => {
                let labels = (0..indices).map(|i| i.to_string()).collect();
                let opens: Vec<PointSet> = opens.iter().map(|o| o.iter().copied().collect()).collect();
                let space = FinSpace::from_subbase(labels, &opens)?;
                full.subsets().filter(|s| !s.is_empty() && space.is_closed(*s)).collect()
            }
            ZFamily::Explicit { sets } => sets.iter().map(|s| s.iter().copied().collect()).collect(),
        };
        out.retain(|s| !s.is_empty());
        out.sort_by_key(|s| s.canonical_key());
        out.dedup();
        Ok(out)
    }
}

/// The base whose level `ε` is the intersection closure of the cylinders
/// `[Z, O]` with `Z ∈ zs` and `O_y` a member of factor level `ε_y`.
fn cylinder_base(spec: &ProductSpec, zs: &[PointSet]) -> Result<GradedBase> {
    let space = Arc::new(FinSpace::from_subbase(spec.labels(), &cylinder_subbase(spec, zs))?);
    let mut levels = BTreeMap::new();
    for (name, tuple) in spec.level_tuples() {
        let member_lists: Vec<Vec<PointSet>> = spec.factors.iter().zip(&tuple).map(|(f, l)| f.level_members(l)).collect();
        let mut sub = Vec::new();
        for &z in zs {
            for choice in selections(&member_lists, z) {
                sub.push(spec.cylinder(z, &choice));
            }
        }
        levels.insert(name, intersection_closure(sub));
    }
    GradedBase::from_sets(space, levels)
}

/// Every choice of one member per index in `z`; other indices get a
/// placeholder (the full set) that cylinders ignore.
fn selections(member_lists: &[Vec<PointSet>], z: PointSet) -> Vec<Vec<PointSet>> {
    let mut out: Vec<Vec<PointSet>> = vec![Vec::new()];
    for (y, members) in member_lists.iter().enumerate() {
        let options: Vec<PointSet> = if z.contains(y) {
            members.clone()
        } else {
            vec![PointSet(u64::MAX)]
        };
        out = out
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |m| {
                    let mut t = prefix.clone();
                    t.push(*m);
                    t
                })
            })
            .collect();
    }
    out
}

/// Cylinders `[Z, O]` over all factor opens, generating the topology of
/// uniform convergence on members of `zs`.
fn cylinder_subbase(spec: &ProductSpec, zs: &[PointSet]) -> Vec<PointSet> {
    let open_lists: Vec<Vec<PointSet>> = spec.factors.iter().map(|f| f.space().opens().to_vec()).collect();
    let mut out = Vec::new();
    for &z in zs {
        for choice in selections(&open_lists, z) {
            out.push(spec.cylinder(z, &choice));
        }
    }
    out
}

/// The pointwise product base: level tuples of factor levels, members the
/// finite intersections of single-index cylinders.
pub fn product_base(spec: &ProductSpec) -> Result<GradedBase> {
    let singletons: Vec<PointSet> = (0..spec.factors.len()).map(PointSet::singleton).collect();
    let base = cylinder_base(spec, &singletons)?;
    let product = spec.product_topology()?;
    if base.space().opens() != product.opens() {
        return Err(Error::InvariantViolated(
            "product base does not generate the product topology".into(),
        ));
    }
    Ok(base)
}

/// The base of uniform convergence on the members of `z`.
pub fn uc_subbase(spec: &ProductSpec, z: &ZFamily) -> Result<GradedBase> {
    let zs = z.sets(spec.factors.len())?;
    if zs.is_empty() {
        return Err(Error::InvalidArgument("the index family has no nonempty member".into()));
    }
    cylinder_base(spec, &zs)
}

/// The `Z`-open topology on `X^Y`, generated by `{f : f(Z) ⊆ O}`, as a
/// full base. Checked to be coarser than uniform convergence on `Z`.
pub fn compact_open_subbase(spec: &ProductSpec, z: &ZFamily) -> Result<GradedBase> {
    let x = spec.factors[0].space();
    if spec.factors.iter().any(|f| f.space() != x) {
        return Err(Error::InvalidArgument(
            "set-open topologies need a shared factor space".into(),
        ));
    }
    let zs = z.sets(spec.factors.len())?;
    let mut subbase = Vec::new();
    for &zset in &zs {
        for o in x.opens() {
            subbase.push(spec.cylinder(zset, &vec![*o; spec.factors.len()]));
        }
    }
    let space = FinSpace::from_subbase(spec.labels(), &subbase)?;
    let uc = FinSpace::from_subbase(spec.labels(), &cylinder_subbase(spec, &zs))?;
    if let Some(o) = space.opens().iter().find(|o| !uc.is_open(**o)) {
        return Err(Error::InvariantViolated(format!(
            "set-open open {o:?} is not open for uniform convergence"
        )));
    }
    Ok(GradedBase::full_base(Arc::new(space)))
}

/// Decision in the product base next to the per-coordinate decisions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointwiseVerdict {
    pub product: Verdict,
    pub coordinates: Vec<Verdict>,
    pub first_failing_coordinate: Option<usize>,
}

/// Decides `f ⤳ g` in the pointwise product base and coordinate by
/// coordinate, asserting that the two agree.
pub fn pointwise_approach(f: &LassoNet, g: &LassoNet, spec: &ProductSpec, base: &GradedBase) -> Result<PointwiseVerdict> {
    if base.space().point_count() != spec.point_count() {
        return Err(Error::EncodingMismatch(format!(
            "base has {} points but the product has {}",
            base.space().point_count(),
            spec.point_count()
        )));
    }
    f.check_points(base.space())?;
    g.check_points(base.space())?;
    let product = approach_sets(f.recurrent_set(), g.recurrent_set(), base).with_nets(f.clone(), g.clone());
    let coordinates: Vec<Verdict> = (0..spec.factors.len())
        .map(|y| {
            let (fy, gy) = (spec.project(f, y), spec.project(g, y));
            approach_sets(fy.recurrent_set(), gy.recurrent_set(), &spec.factors[y]).with_nets(fy, gy)
        })
        .collect();
    let first_failing_coordinate = coordinates.iter().position(|v| !v.holds);
    assert_eq!(
        product.holds,
        first_failing_coordinate.is_none(),
        "product approach disagrees with coordinatewise approach"
    );
    Ok(PointwiseVerdict {
        product,
        coordinates,
        first_failing_coordinate,
    })
}

/// Whether every cauchy net in `nets` has a limit inside `allowed`.
/// With `allowed` the whole space this is completeness on the enumerated
/// class; shrinking it models a space with points removed from the limit
/// side.
pub fn complete_within(base: &GradedBase, nets: &[LassoNet], allowed: PointSet) -> bool {
    nets.iter().all(|u| {
        let rec = u.recurrent_set();
        !approach_sets(rec, rec, base).holds || allowed.iter().any(|x| approach_sets(rec, PointSet::singleton(x), base).holds)
    })
}

/// Counts for the exhaustive product checks.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ProductCheckReport {
    pub net_pairs: u64,
    pub approach_mismatches: u64,
    pub cauchy_mismatches: u64,
    pub uc_cauchy_not_pointwise: u64,
    pub completeness_mismatches: u64,
}

impl ProductCheckReport {
    pub fn passed(&self) -> bool {
        self.approach_mismatches == 0
            && self.cauchy_mismatches == 0
            && self.uc_cauchy_not_pointwise == 0
            && self.completeness_mismatches == 0
    }

    pub fn merge(&mut self, other: &ProductCheckReport) {
        self.net_pairs += other.net_pairs;
        self.approach_mismatches += other.approach_mismatches;
        self.cauchy_mismatches += other.cauchy_mismatches;
        self.uc_cauchy_not_pointwise += other.uc_cauchy_not_pointwise;
        self.completeness_mismatches += other.completeness_mismatches;
    }
}

/// On one product and a list of tuple-space nets: product approach versus
/// coordinate approach, product cauchy versus pointwise cauchy, cauchy for
/// uniform convergence implying pointwise cauchy, and product completeness
/// versus factor completeness with the last point of the first factor
/// removed from the admissible limits.
pub fn product_checks(spec: &ProductSpec, nets: &[LassoNet]) -> Result<ProductCheckReport> {
    let base = product_base(spec)?;
    let uc = uc_subbase(spec, &ZFamily::Whole)?;
    let mut r = ProductCheckReport::default();
    let projections: Vec<Vec<PointSet>> = nets
        .iter()
        .map(|u| (0..spec.factors.len()).map(|y| spec.project(u, y).recurrent_set()).collect())
        .collect();
    for (i, f) in nets.iter().enumerate() {
        for (j, g) in nets.iter().enumerate() {
            r.net_pairs += 1;
            let product = approach_sets(f.recurrent_set(), g.recurrent_set(), &base).holds;
            let coords =
                (0..spec.factors.len()).all(|y| approach_sets(projections[i][y], projections[j][y], &spec.factors[y]).holds);
            if product != coords {
                r.approach_mismatches += 1;
            }
        }
        let rec = f.recurrent_set();
        let cauchy = approach_sets(rec, rec, &base).holds;
        let pointwise =
            (0..spec.factors.len()).all(|y| approach_sets(projections[i][y], projections[i][y], &spec.factors[y]).holds);
        if cauchy != pointwise {
            r.cauchy_mismatches += 1;
        }
        if approach_sets(rec, rec, &uc).holds && !pointwise {
            r.uc_cauchy_not_pointwise += 1;
        }
    }
    let factor_nets: Vec<Vec<LassoNet>> = (0..spec.factors.len())
        .map(|y| {
            let mut v: Vec<LassoNet> = nets.iter().map(|u| spec.project(u, y)).collect();
            v.sort();
            v.dedup();
            v
        })
        .collect();
    let all = PointSet::full(spec.point_count());
    let factors_complete =
        (0..spec.factors.len()).all(|y| complete_within(&spec.factors[y], &factor_nets[y], spec.factors[y].space().full()));
    if complete_within(&base, nets, all) != factors_complete {
        r.completeness_mismatches += 1;
    }
    // Mutation: drop the last point of factor 0 from the admissible limits.
    let n0 = spec.factors[0].space().point_count();
    if n0 > 1 {
        let allowed0 = spec.factors[0].space().full().without(n0 - 1);
        let mut allowed_sets: Vec<PointSet> = spec.factors.iter().map(|f| f.space().full()).collect();
        allowed_sets[0] = allowed0;
        let allowed = spec.cylinder(PointSet::full(spec.factors.len()), &allowed_sets);
        let factors_mutated = complete_within(&spec.factors[0], &factor_nets[0], allowed0)
            && (1..spec.factors.len())
                .all(|y| complete_within(&spec.factors[y], &factor_nets[y], spec.factors[y].space().full()));
        if complete_within(&base, nets, allowed) != factors_mutated {
            r.completeness_mismatches += 1;
        }
    }
    Ok(r)
}

/// Product of finite u-structures: tuple-valued `u` into the product of the
/// auxiliary spaces, radii generated by finite cylinders of factor radii.
pub fn product_u_structure(factors: &[UStructureFin]) -> Result<UStructureFin> {
    if factors.is_empty() {
        return Err(Error::InvalidArgument("no factors".into()));
    }
    let carrier_spec = ProductSpec::new(
        (0..factors.len()).map(|i| i.to_string()).collect(),
        factors
            .iter()
            .map(|s| GradedBase::full_base(Arc::clone(s.carrier())))
            .collect(),
    )?;
    let aux_spec = ProductSpec::new(
        (0..factors.len()).map(|i| i.to_string()).collect(),
        factors.iter().map(|s| GradedBase::full_base(Arc::clone(s.aux()))).collect(),
    )?;
    let carrier = Arc::new(carrier_spec.product_topology()?);
    let aux = Arc::new(aux_spec.product_topology()?);
    let n = carrier_spec.point_count();
    let table: Vec<Vec<usize>> = (0..n)
        .map(|p| {
            let cp = carrier_spec.coords(p);
            (0..n)
                .map(|q| {
                    let cq = carrier_spec.coords(q);
                    let z: Vec<usize> = factors.iter().enumerate().map(|(y, s)| s.u(cp[y], cq[y])).collect();
                    aux_spec.point_of(&z)
                })
                .collect()
        })
        .collect();
    let radius_lists: Vec<Vec<PointSet>> = factors.iter().map(|s| s.radii().to_vec()).collect();
    let mut radii = Vec::new();
    for f in PointSet::full(factors.len()).subsets().filter(|s| !s.is_empty()) {
        for choice in selections(&radius_lists, f) {
            radii.push(aux_spec.cylinder(f, &choice));
        }
    }
    let radii = intersection_closure(radii);
    let s = UStructureFin::new(carrier, aux, table, radii)?;
    let induced = s.induced_topology()?;
    let factor_spaces: Vec<GradedBase> = factors
        .iter()
        .map(|f| Ok(GradedBase::full_base(Arc::new(f.induced_topology()?))))
        .collect::<Result<_>>()?;
    let expected = ProductSpec::new(carrier_spec.index_labels.clone(), factor_spaces)?.product_topology()?;
    if induced.opens() != expected.opens() {
        return Err(Error::InvariantViolated(
            "product u-structure does not induce the product of the induced topologies".into(),
        ));
    }
    Ok(s)
}

/// Whether each factor and the product classify lsb.
pub fn lsb_profile(spec: &ProductSpec) -> Result<(Vec<bool>, bool)> {
    let factors = spec.factors.iter().map(|f| classify_base(f).lsb.holds).collect();
    Ok((factors, classify_base(&product_base(spec)?).lsb.holds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::enumerate_lasso_nets;
    use crate::space::all_topologies;

    fn ys(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("y{i}")).collect()
    }

    fn sierpinski_square() -> ProductSpec {
        ProductSpec::power(GradedBase::full_base(Arc::new(FinSpace::sierpinski())), ys(2)).unwrap()
    }

    #[test]
    fn product_examples() {
        let spec = sierpinski_square();
        let b = product_base(&spec).unwrap();
        assert_eq!(b.space().point_count(), 4);
        // Down-sets of the 2 × 2 lattice.
        assert_eq!(b.space().opens().len(), 6);
        assert_eq!(b.space().labels()[1], "(a,b)");
        let d = ProductSpec::power(GradedBase::kernel_base(Arc::new(FinSpace::discrete(2))), ys(2)).unwrap();
        let db = product_base(&d).unwrap();
        assert_eq!(db.space().opens().len(), 16);
        assert!(db.level_members("e0,e0").contains(&PointSet::singleton(3)));
    }

    #[test]
    fn lsb_products() {
        for x in all_topologies(2).unwrap().into_iter().chain(all_topologies(3).unwrap()) {
            let spec = ProductSpec::power(GradedBase::full_base(Arc::new(x)), ys(2)).unwrap();
            let (factors, product) = lsb_profile(&spec).unwrap();
            if factors.iter().all(|&b| b) {
                assert!(product);
            }
        }
    }

    #[test]
    fn uc_and_set_open() {
        let spec = sierpinski_square();
        let p = product_base(&spec).unwrap();
        let single = uc_subbase(&spec, &ZFamily::Singletons).unwrap();
        assert_eq!(single.space().opens(), p.space().opens());
        assert_eq!(single.levels(), p.levels());
        let whole = uc_subbase(&spec, &ZFamily::Whole).unwrap();
        assert_eq!(whole.space().opens(), p.space().opens());
        let only0 = uc_subbase(&spec, &ZFamily::Explicit { sets: vec![vec![0]] }).unwrap();
        // Opens only constrain coordinate 0: {∅, {(a,·)}, all}.
        assert_eq!(only0.space().opens().len(), 3);
        let co = compact_open_subbase(&spec, &ZFamily::Singletons).unwrap();
        assert_eq!(co.space().opens(), p.space().opens());
        let co_all = compact_open_subbase(&spec, &ZFamily::Compacts).unwrap();
        let uc_all = uc_subbase(&spec, &ZFamily::Compacts).unwrap();
        assert_eq!(co_all.space().opens(), uc_all.space().opens());
        let one = ProductSpec::power(GradedBase::full_base(Arc::new(FinSpace::sierpinski())), ys(1)).unwrap();
        for z in [ZFamily::Singletons, ZFamily::Whole] {
            assert_eq!(compact_open_subbase(&one, &z).unwrap().space().opens().len(), 3);
            assert_eq!(uc_subbase(&one, &z).unwrap().space().opens().len(), 3);
        }
    }

    #[test]
    fn completes_family() {
        // Index space with opens {0}: closed nonempty sets are {1} and {0,1}.
        let z = ZFamily::Completes { opens: vec![vec![0]] };
        assert_eq!(z.sets(2).unwrap(), vec![PointSet::singleton(1), PointSet::full(2)]);
    }

    #[test]
    fn pointwise_examples() {
        let d = ProductSpec::power(GradedBase::kernel_base(Arc::new(FinSpace::discrete(2))), ys(2)).unwrap();
        let b = product_base(&d).unwrap();
        // Points are (x0, x1) with index 2·x0 + x1.
        let alternating = LassoNet::new(vec![], vec![0, 2]).unwrap();
        let constant = LassoNet::constant(0);
        let v = pointwise_approach(&alternating, &constant, &d, &b).unwrap();
        assert!(!v.product.holds);
        assert_eq!(v.first_failing_coordinate, Some(0));
        assert!(pointwise_approach(&constant, &constant, &d, &b).unwrap().product.holds);
        let wrong = GradedBase::kernel_base(Arc::new(FinSpace::discrete(3)));
        assert!(matches!(
            pointwise_approach(&constant, &constant, &d, &wrong),
            Err(Error::EncodingMismatch(_))
        ));
    }

    #[test]
    fn exhaustive_two_point_products() {
        let spaces: Vec<GradedBase> = all_topologies(2)
            .unwrap()
            .into_iter()
            .map(|x| GradedBase::full_base(Arc::new(x)))
            .collect();
        let nets = enumerate_lasso_nets(4, 0, 2);
        let mut total = ProductCheckReport::default();
        for a in &spaces {
            for b in &spaces {
                let spec = ProductSpec::new(ys(2), vec![a.clone(), b.clone()]).unwrap();
                total.merge(&product_checks(&spec, &nets).unwrap());
            }
        }
        assert!(total.passed(), "{total:?}");
        assert_eq!(total.net_pairs, 16 * 16 * 16);
    }

    #[test]
    fn product_u_structures() {
        let eq = UStructureFin::equality_indicator(Arc::new(FinSpace::discrete(2)));
        let p = product_u_structure(&[eq.clone(), eq.clone()]).unwrap();
        assert_eq!(p.induced_topology().unwrap().opens().len(), 16);
        let one = product_u_structure(std::slice::from_ref(&eq)).unwrap();
        assert_eq!(
            one.induced_topology().unwrap().opens(),
            eq.induced_topology().unwrap().opens()
        );
        let whole = UStructureFin::new(
            Arc::new(FinSpace::indiscrete(2)),
            Arc::new(FinSpace::indiscrete(1)),
            vec![vec![0, 0], vec![0, 0]],
            vec![PointSet::full(1)],
        )
        .unwrap();
        let p = product_u_structure(&[whole.clone(), whole]).unwrap();
        assert_eq!(p.induced_topology().unwrap().opens().len(), 2);
    }
}
