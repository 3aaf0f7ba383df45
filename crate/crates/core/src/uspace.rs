// SPDX-License-Identifier: Apache-2.0

//! Generalised uniform structures: a map `u: X × X → Z` and a family of open
//! radii in `Z`, together with finite uniformities and their standard bases.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::approach::classify_base;
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::rational::{within_level, Rational};
use crate::space::{FinSpace, GradedBase, ENUMERATION_CAP};

/// A relation on `n` points stored as rows: `rel[x]` is `{y : (x, y) ∈ rel}`.
pub type Relation = Vec<PointSet>;

pub fn compose(r: &Relation, s: &Relation) -> Relation {
    r.iter()
        .map(|row| row.iter().fold(PointSet::EMPTY, |acc, y| acc.union(s[y])))
        .collect()
}

pub fn inverse(r: &Relation) -> Relation {
    let mut out = vec![PointSet::EMPTY; r.len()];
    for (x, row) in r.iter().enumerate() {
        for y in row.iter() {
            out[y] = out[y].with(x);
        }
    }
    out
}

pub fn relation_subset(r: &Relation, s: &Relation) -> bool {
    r.iter().zip(s).all(|(a, b)| a.is_subset(*b))
}

fn relation_intersection(r: &Relation, s: &Relation) -> Relation {
    r.iter().zip(s).map(|(a, b)| a.intersection(*b)).collect()
}

fn check_size(n: usize) -> Result<()> {
    if n > ENUMERATION_CAP {
        return Err(Error::SizeOverflow {
            points: n,
            cap: ENUMERATION_CAP,
        });
    }
    Ok(())
}

/// Topology whose opens are the sets containing a neighbourhood of each of
/// their points, given the neighbourhood candidates per point.
fn topology_from_neighbourhoods(labels: Vec<String>, nbhds: &[Vec<PointSet>]) -> Result<FinSpace> {
    let n = labels.len();
    check_size(n)?;
    let opens: Vec<PointSet> = PointSet::full(n)
        .subsets()
        .filter(|o| o.iter().all(|x| nbhds[x].iter().any(|b| b.is_subset(*o))))
        .collect();
    FinSpace::new(labels, opens).map_err(|e| Error::InvariantViolated(format!("induced family is not a topology: {e}")))
}

/// A finite u-structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UStructureFin {
    carrier: Arc<FinSpace>,
    aux: Arc<FinSpace>,
    table: Vec<Vec<usize>>,
    radii: Vec<PointSet>,
}

impl UStructureFin {
    pub fn new(carrier: Arc<FinSpace>, aux: Arc<FinSpace>, table: Vec<Vec<usize>>, radii: Vec<PointSet>) -> Result<Self> {
        let n = carrier.point_count();
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidArgument(format!("u-table must be {n} × {n}")));
        }
        for row in &table {
            for &z in row {
                aux.check_point(z)?;
            }
        }
        if radii.is_empty() {
            return Err(Error::InvalidArgument("at least one radius is required".into()));
        }
        for (i, r) in radii.iter().enumerate() {
            if !aux.is_open(*r) {
                return Err(Error::InvalidArgument(format!(
                    "radius {i} is not open in the auxiliary space"
                )));
            }
        }
        for (i, a) in radii.iter().enumerate() {
            for (j, b) in radii.iter().enumerate().skip(i + 1) {
                if !radii.contains(&a.intersection(*b)) {
                    return Err(Error::InvalidArgument(format!(
                        "radii {i} and {j} intersect outside the radius family"
                    )));
                }
            }
        }
        Ok(UStructureFin {
            carrier,
            aux,
            table,
            radii,
        })
    }

    /// `u(x, y) = 0` when `x = y` and `1` otherwise, into discrete `{0, 1}`
    /// with the single radius `{0}`.
    pub fn equality_indicator(carrier: Arc<FinSpace>) -> Self {
        let n = carrier.point_count();
        let aux = FinSpace::new(vec!["0".into(), "1".into()], PointSet::full(2).subsets().collect()).expect("discrete space");
        let table = (0..n).map(|x| (0..n).map(|y| usize::from(x != y)).collect()).collect();
        UStructureFin::new(carrier, Arc::new(aux), table, vec![PointSet::singleton(0)]).expect("valid structure")
    }

    pub fn carrier(&self) -> &Arc<FinSpace> {
        &self.carrier
    }

    pub fn aux(&self) -> &Arc<FinSpace> {
        &self.aux
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn radii(&self) -> &[PointSet] {
        &self.radii
    }

    pub fn u(&self, x: usize, y: usize) -> usize {
        self.table[x][y]
    }

    /// `{y : u(x, y) ∈ ε}`.
    pub fn ball(&self, x: usize, radius: usize) -> Result<PointSet> {
        self.carrier.check_point(x)?;
        let eps = *self.radii.get(radius).ok_or(Error::IndexOutOfRange {
            what: "radius",
            index: radius,
            len: self.radii.len(),
        })?;
        Ok(self.ball_unchecked(x, eps))
    }

    fn ball_unchecked(&self, x: usize, eps: PointSet) -> PointSet {
        self.table[x]
            .iter()
            .enumerate()
            .filter(|(_, &z)| eps.contains(z))
            .map(|(y, _)| y)
            .collect()
    }

    /// `u⁻¹(ε)` as a relation.
    pub fn relation(&self, radius: usize) -> Relation {
        let eps = self.radii[radius];
        (0..self.carrier.point_count()).map(|x| self.ball_unchecked(x, eps)).collect()
    }

    fn balls_per_point(&self) -> Vec<Vec<PointSet>> {
        (0..self.carrier.point_count())
            .map(|x| self.radii.iter().map(|e| self.ball_unchecked(x, *e)).collect())
            .collect()
    }

    /// The topology in which a set is open when it contains a ball around
    /// each of its points.
    pub fn induced_topology(&self) -> Result<FinSpace> {
        topology_from_neighbourhoods(self.carrier.labels().to_vec(), &self.balls_per_point())
    }

    /// Whether the induced topology is the carrier's declared topology.
    pub fn is_u_space(&self) -> Result<bool> {
        Ok(self.induced_topology()?.opens() == self.carrier.opens())
    }

    /// For each radius, a radius whose relation composed with itself lies
    /// inside it; the first radius without one is reported.
    fn halving_failure(&self) -> Option<usize> {
        let rels: Vec<Relation> = (0..self.radii.len()).map(|i| self.relation(i)).collect();
        (0..rels.len()).find(|&i| !rels.iter().any(|r| relation_subset(&compose(r, r), &rels[i])))
    }

    fn symmetry_failures(&self) -> Vec<usize> {
        let rels: Vec<Relation> = (0..self.radii.len()).map(|i| self.relation(i)).collect();
        (0..rels.len())
            .filter(|&i| {
                let inv = inverse(&rels[i]);
                !rels.iter().any(|r| relation_subset(r, &inv))
            })
            .collect()
    }

    /// `{x : some ball around x lies in A}`, checked against the induced
    /// interior. Requires the halving condition.
    pub fn interior_via_balls(&self, a: PointSet) -> Result<PointSet> {
        if let Some(radius) = self.halving_failure() {
            return Err(Error::HalvingUnmet { radius });
        }
        let a = a.intersection(self.carrier.full());
        let by_balls: PointSet = self
            .balls_per_point()
            .iter()
            .enumerate()
            .filter(|(_, balls)| balls.iter().any(|b| b.is_subset(a)))
            .map(|(x, _)| x)
            .collect();
        let lattice = self.induced_topology()?.interior(a);
        if by_balls != lattice {
            return Err(Error::InvariantViolated(format!(
                "ball interior {by_balls:?} differs from lattice interior {lattice:?}"
            )));
        }
        Ok(by_balls)
    }

    /// Base of the induced topology with one level `r<i>` per radius, whose
    /// members are the interiors of the balls of that radius.
    pub fn induced_base(&self) -> Result<GradedBase> {
        let space = Arc::new(self.induced_topology()?);
        let mut levels = BTreeMap::new();
        for (i, eps) in self.radii.iter().enumerate() {
            let mut members: Vec<PointSet> = (0..space.point_count())
                .map(|x| space.interior(self.ball_unchecked(x, *eps)))
                .filter(|m| !m.is_empty())
                .collect();
            members.sort_by_key(|m| m.canonical_key());
            members.dedup();
            levels.insert(format!("r{i}"), members);
        }
        GradedBase::from_sets(space, levels)
    }
}

/// The three sufficient conditions for a u-structure to induce an lsb base,
/// and the classification of that base when it exists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LsbReport {
    pub intersection_closed: bool,
    /// First radius without a halving partner.
    pub halving_failure: Option<usize>,
    /// Radii not dominated by the inverse of any radius relation.
    pub symmetry_failures: Vec<usize>,
    pub conditions_hold: bool,
    /// `None` when the induced levels do not form a base.
    pub lsb: Option<bool>,
    pub base_error: Option<String>,
}

pub fn lsb_sufficient_check(s: &UStructureFin) -> LsbReport {
    // Intersection closure is a construction invariant of UStructureFin.
    let intersection_closed = s
        .radii
        .iter()
        .all(|a| s.radii.iter().all(|b| s.radii.contains(&a.intersection(*b))));
    let halving_failure = s.halving_failure();
    let symmetry_failures = s.symmetry_failures();
    let conditions_hold = intersection_closed && halving_failure.is_none() && symmetry_failures.is_empty();
    let (lsb, base_error) = match s.induced_base() {
        Ok(base) => (Some(classify_base(&base).lsb.holds), None),
        Err(e) => (None, Some(e.to_string())),
    };
    if conditions_hold {
        assert_eq!(lsb, Some(true), "sufficient conditions hold but the induced base is not lsb");
    }
    LsbReport {
        intersection_closed,
        halving_failure,
        symmetry_failures,
        conditions_hold,
        lsb,
        base_error,
    }
}

/// A finite uniformity given by a base of entourages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformityFin {
    carrier: Arc<FinSpace>,
    entourages: Vec<Relation>,
}

impl UniformityFin {
    /// Checks the diagonal, halving, symmetry and filter-base axioms. Only
    /// the carrier's labels are used; its topology is replaced by the one
    /// the uniformity induces.
    pub fn new(carrier: Arc<FinSpace>, entourages: Vec<Relation>) -> Result<Self> {
        let n = carrier.point_count();
        check_size(n)?;
        if entourages.is_empty() {
            return Err(Error::EntourageAxiom("no entourages".into()));
        }
        let full = carrier.full();
        for (i, u) in entourages.iter().enumerate() {
            if u.len() != n || u.iter().any(|row| !row.is_subset(full)) {
                return Err(Error::EntourageAxiom(format!(
                    "entourage {i} is not a relation on {n} points"
                )));
            }
            if let Some(x) = (0..n).find(|&x| !u[x].contains(x)) {
                return Err(Error::EntourageAxiom(format!(
                    "entourage {i} misses the diagonal at {}",
                    carrier.label(x)
                )));
            }
            if !entourages.iter().any(|v| relation_subset(&compose(v, v), u)) {
                return Err(Error::EntourageAxiom(format!("entourage {i} has no halving entourage")));
            }
            let inv = inverse(u);
            if !entourages.iter().any(|v| relation_subset(v, &inv)) {
                return Err(Error::EntourageAxiom(format!("entourage {i} contains no inverse entourage")));
            }
        }
        for (i, u) in entourages.iter().enumerate() {
            for (j, v) in entourages.iter().enumerate().skip(i + 1) {
                let meet = relation_intersection(u, v);
                if !entourages.iter().any(|w| relation_subset(w, &meet)) {
                    return Err(Error::EntourageAxiom(format!(
                        "no entourage lies inside entourages {i} and {j}"
                    )));
                }
            }
        }
        Ok(UniformityFin { carrier, entourages })
    }

    pub fn carrier(&self) -> &Arc<FinSpace> {
        &self.carrier
    }

    pub fn entourages(&self) -> &[Relation] {
        &self.entourages
    }

    pub fn ball(&self, entourage: usize, x: usize) -> PointSet {
        self.entourages[entourage][x]
    }

    pub fn topology(&self) -> Result<FinSpace> {
        let n = self.carrier.point_count();
        let nbhds: Vec<Vec<PointSet>> = (0..n).map(|x| self.entourages.iter().map(|u| u[x]).collect()).collect();
        topology_from_neighbourhoods(self.carrier.labels().to_vec(), &nbhds)
    }

    /// The same uniformity as a u-structure: `u` is the identity of `X × X`,
    /// whose auxiliary topology is generated by the entourages, and the
    /// radii are the entourages closed under intersection.
    pub fn as_u_structure(&self) -> Result<UStructureFin> {
        let n = self.carrier.point_count();
        if n * n > crate::pointset::MAX_POINTS {
            return Err(Error::SizeOverflow {
                points: n * n,
                cap: crate::pointset::MAX_POINTS,
            });
        }
        let as_set = |r: &Relation| -> PointSet {
            r.iter()
                .enumerate()
                .flat_map(|(x, row)| row.iter().map(move |y| x * n + y))
                .collect()
        };
        let mut radii: Vec<PointSet> = self.entourages.iter().map(as_set).collect();
        loop {
            let mut grew = false;
            for i in 0..radii.len() {
                for j in 0..radii.len() {
                    let m = radii[i].intersection(radii[j]);
                    if !radii.contains(&m) {
                        radii.push(m);
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let labels: Vec<String> = (0..n * n)
            .map(|p| format!("({},{})", self.carrier.label(p / n), self.carrier.label(p % n)))
            .collect();
        let aux = FinSpace::from_subbase(labels, &radii)?;
        let table = (0..n).map(|x| (0..n).map(|y| x * n + y).collect()).collect();
        let carrier = Arc::new(self.topology()?);
        UStructureFin::new(carrier, Arc::new(aux), table, radii)
    }
}

/// The graded standard base: one level `U<i>` per entourage, with members
/// the interiors of the balls `U[x]`. With `raw_balls` the balls themselves
/// are used, which fails when one of them is not open.
pub fn standard_base(uni: &UniformityFin, raw_balls: bool) -> Result<GradedBase> {
    let space = Arc::new(uni.topology()?);
    let mut levels = BTreeMap::new();
    for (i, u) in uni.entourages.iter().enumerate() {
        let mut members = Vec::new();
        for (x, ball) in u.iter().enumerate() {
            let m = if raw_balls { *ball } else { space.interior(*ball) };
            if raw_balls && !space.is_open(m) {
                return Err(Error::InvalidArgument(format!(
                    "ball of entourage {i} around {} is not open",
                    space.label(x)
                )));
            }
            members.push(m);
        }
        members.sort_by_key(|m| m.canonical_key());
        members.dedup();
        levels.insert(format!("U{i}"), members);
    }
    GradedBase::from_sets(space, levels)
}

/// Every valid entourage family with one or two members on `n ≤ 3` points.
pub fn small_uniformities(n: usize) -> Result<Vec<UniformityFin>> {
    if n > 3 {
        return Err(Error::SizeOverflow { points: n, cap: 3 });
    }
    let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let carrier = Arc::new(FinSpace::new(labels, vec![PointSet::EMPTY, PointSet::full(n)])?);
    let off: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| (0..n).filter(move |&y| y != x).map(move |y| (x, y)))
        .collect();
    let reflexive: Vec<Relation> = (0u64..1 << off.len())
        .map(|mask| {
            let mut r: Relation = (0..n).map(PointSet::singleton).collect();
            for (b, &(x, y)) in off.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    r[x] = r[x].with(y);
                }
            }
            r
        })
        .collect();
    let mut out = Vec::new();
    for (i, a) in reflexive.iter().enumerate() {
        if let Ok(u) = UniformityFin::new(Arc::clone(&carrier), vec![a.clone()]) {
            out.push(u);
        }
        for b in &reflexive[i + 1..] {
            if let Ok(u) = UniformityFin::new(Arc::clone(&carrier), vec![a.clone(), b.clone()]) {
                out.push(u);
            }
        }
    }
    Ok(out)
}

/// Three-valued answer to `u(x, y) ∈ ε_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Membership {
    Inside,
    Outside,
    Unknown,
}

/// A u-value oracle for an infinite carrier with radii `ε_0 ⊃ ε_1 ⊃ …`.
/// Implementations hold no mutable state, so checks may run concurrently.
pub trait UOracle: Sync {
    type Point;

    fn within(&self, x: &Self::Point, y: &Self::Point, level: u32) -> Result<Membership>;
}

/// `u(x, y) = |x − y|` on the rationals with `ε_k = [0, 2^-k)`, decided
/// exactly.
#[derive(Clone, Copy, Debug, Default)]
pub struct RationalMetric;

impl UOracle for RationalMetric {
    type Point = Rational;

    fn within(&self, x: &Rational, y: &Rational, level: u32) -> Result<Membership> {
        Ok(if within_level(x, y, level) {
            Membership::Inside
        } else {
            Membership::Outside
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum CauchyWindow {
    /// Every pair of indices in `[from, horizon]` is within the radius.
    HoldsToHorizon {
        from: u64,
    },
    Fails {
        i: u64,
        j: u64,
    },
    Unknown {
        i: u64,
        j: u64,
    },
}

/// Checks the bi-net `u(s_i, s_j)` against radius `level` on the window
/// `[⌈horizon/2⌉, horizon]`, indices starting at 1.
pub fn u_cauchy_check<O, F>(seq: F, oracle: &O, horizon: u64, level: u32) -> Result<CauchyWindow>
where
    O: UOracle,
    F: Fn(u64) -> O::Point,
{
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let from = horizon.div_ceil(2);
    let points: Vec<O::Point> = (from..=horizon).map(&seq).collect();
    let mut unknown = None;
    for (a, x) in points.iter().enumerate() {
        for (b, y) in points.iter().enumerate().skip(a + 1) {
            for (p, q, i, j) in [(x, y, a, b), (y, x, b, a)] {
                match oracle.within(p, q, level)? {
                    Membership::Inside => {}
                    Membership::Outside => {
                        return Ok(CauchyWindow::Fails {
                            i: from + i as u64,
                            j: from + j as u64,
                        })
                    }
                    Membership::Unknown => {
                        unknown.get_or_insert((from + i as u64, from + j as u64));
                    }
                }
            }
        }
    }
    Ok(match unknown {
        Some((i, j)) => CauchyWindow::Unknown { i, j },
        None => CauchyWindow::HoldsToHorizon { from },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{from_int, ratio};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
    }

    fn indiscrete_labelled(n: usize) -> Arc<FinSpace> {
        Arc::new(FinSpace::new(labels(n), vec![PointSet::EMPTY, PointSet::full(n)]).unwrap())
    }

    /// Distances on a 3-point line into `{0, 1, 2}` with opens the down-sets.
    fn line() -> UStructureFin {
        let aux = FinSpace::new(
            vec!["0".into(), "1".into(), "2".into()],
            vec![
                PointSet::EMPTY,
                PointSet::from_indices([0]),
                PointSet::from_indices([0, 1]),
                PointSet::full(3),
            ],
        )
        .unwrap();
        let table = (0..3usize).map(|x| (0..3usize).map(|y| x.abs_diff(y)).collect()).collect();
        UStructureFin::new(
            indiscrete_labelled(3),
            Arc::new(aux),
            table,
            vec![PointSet::from_indices([0, 1])],
        )
        .unwrap()
    }

    #[test]
    fn balls() {
        let eq = UStructureFin::equality_indicator(indiscrete_labelled(3));
        for x in 0..3 {
            assert_eq!(eq.ball(x, 0).unwrap(), PointSet::singleton(x));
        }
        assert!(eq.ball(0, 1).is_err());
        let l = line();
        assert_eq!(l.ball(1, 0).unwrap(), PointSet::full(3));
        assert_eq!(l.ball(0, 0).unwrap(), PointSet::from_indices([0, 1]));
        let whole = UStructureFin::new(
            indiscrete_labelled(2),
            l.aux().clone(),
            vec![vec![0, 2], vec![2, 0]],
            vec![PointSet::full(3)],
        )
        .unwrap();
        assert_eq!(whole.ball(0, 0).unwrap(), PointSet::full(2));
        assert_eq!(whole.induced_topology().unwrap().opens().len(), 2);
    }

    #[test]
    fn induced_topologies() {
        let eq = UStructureFin::equality_indicator(indiscrete_labelled(3));
        assert_eq!(eq.induced_topology().unwrap().opens().len(), 8);
        assert!(!eq.is_u_space().unwrap());
        let discrete = Arc::new(FinSpace::new(labels(3), PointSet::full(3).subsets().collect()).unwrap());
        assert!(UStructureFin::equality_indicator(discrete).is_u_space().unwrap());
    }

    #[test]
    fn induced_topology_random_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let aux = Arc::new(FinSpace::sierpinski());
        for _ in 0..1000 {
            let n = rng.gen_range(1..=4);
            let table = (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..2)).collect()).collect();
            let radii = match rng.gen_range(0..3) {
                0 => vec![PointSet::singleton(0)],
                1 => vec![PointSet::full(2)],
                _ => vec![PointSet::singleton(0), PointSet::full(2)],
            };
            let s = UStructureFin::new(indiscrete_labelled(n), aux.clone(), table, radii).unwrap();
            // FinSpace::new rejects families that are not topologies.
            s.induced_topology().unwrap();
        }
    }

    #[test]
    fn interior_examples() {
        let eq = UStructureFin::equality_indicator(indiscrete_labelled(3));
        assert_eq!(eq.interior_via_balls(PointSet::full(3)).unwrap(), PointSet::full(3));
        assert_eq!(eq.interior_via_balls(PointSet::singleton(1)).unwrap(), PointSet::singleton(1));
        // Line: balls overlap two steps away, so no radius halves itself.
        assert!(matches!(
            line().interior_via_balls(PointSet::full(3)),
            Err(Error::HalvingUnmet { radius: 0 })
        ));
    }

    #[test]
    fn group_difference_is_u_space() {
        // ℤ/4 with u(x, y) = y − x and radii the subgroups {0} ⊂ {0, 2}.
        let aux = FinSpace::from_subbase(
            (0..4).map(|i| i.to_string()).collect(),
            &[PointSet::from_indices([0]), PointSet::from_indices([0, 2])],
        )
        .unwrap();
        let table = (0..4usize).map(|x| (0..4usize).map(|y| (y + 4 - x) % 4).collect()).collect();
        let radii = vec![PointSet::from_indices([0, 2]), PointSet::from_indices([0])];
        let s = UStructureFin::new(indiscrete_labelled(4), Arc::new(aux.clone()), table, radii).unwrap();
        let induced = Arc::new(s.induced_topology().unwrap());
        assert_eq!(induced.opens().len(), 16);
        let s = UStructureFin::new(induced, Arc::new(aux), s.table().to_vec(), s.radii().to_vec()).unwrap();
        assert!(s.is_u_space().unwrap());
        let report = lsb_sufficient_check(&s);
        assert!(report.conditions_hold);
        assert_eq!(report.lsb, Some(true));
    }

    fn rel(n: usize, pairs: &[(usize, usize)]) -> Relation {
        let mut r: Relation = (0..n).map(PointSet::singleton).collect();
        for &(x, y) in pairs {
            r[x] = r[x].with(y);
        }
        r
    }

    #[test]
    fn standard_base_examples() {
        let diag = UniformityFin::new(indiscrete_labelled(2), vec![rel(2, &[])]).unwrap();
        let b = standard_base(&diag, false).unwrap();
        assert_eq!(b.space().opens().len(), 4);
        assert!(classify_base(&b).lsb.holds);
        let full = UniformityFin::new(indiscrete_labelled(2), vec![rel(2, &[(0, 1), (1, 0)])]).unwrap();
        let b = standard_base(&full, true).unwrap();
        assert_eq!(b.space().opens().len(), 2);
        assert!(classify_base(&b).lsb.holds);
    }

    #[test]
    fn entourage_axioms_enforced() {
        assert!(matches!(
            UniformityFin::new(indiscrete_labelled(2), vec![rel(2, &[(0, 1)])]),
            Err(Error::EntourageAxiom(_))
        ));
        // {0,1} block and {1,2} block: no entourage lies in both.
        let a = rel(3, &[(0, 1), (1, 0)]);
        let b = rel(3, &[(1, 2), (2, 1)]);
        assert!(UniformityFin::new(indiscrete_labelled(3), vec![a, b]).is_err());
    }

    #[test]
    fn raw_balls_must_be_open() {
        // Least entourage {0,1}|{2}; the larger one is not transitive.
        let e = rel(3, &[(0, 1), (1, 0)]);
        let r = rel(3, &[(0, 1), (1, 0), (1, 2), (2, 1)]);
        let u = UniformityFin::new(indiscrete_labelled(3), vec![e, r]).unwrap();
        assert!(standard_base(&u, true).is_err());
        assert!(classify_base(&standard_base(&u, false).unwrap()).lsb.holds);
    }

    #[test]
    fn every_small_uniformity_is_lsb() {
        for n in 1..=3 {
            let all = small_uniformities(n).unwrap();
            assert!(!all.is_empty());
            for u in &all {
                let b = standard_base(u, false).unwrap();
                assert!(classify_base(&b).lsb.holds);
                let s = u.as_u_structure().unwrap();
                assert!(s.is_u_space().unwrap());
                let report = lsb_sufficient_check(&s);
                assert!(report.conditions_hold, "{report:?}");
            }
        }
    }

    #[test]
    fn asymmetric_table_reported() {
        let aux = Arc::new(FinSpace::sierpinski());
        let s = UStructureFin::new(
            indiscrete_labelled(2),
            aux,
            vec![vec![0, 0], vec![1, 0]],
            vec![PointSet::singleton(0)],
        )
        .unwrap();
        let report = lsb_sufficient_check(&s);
        assert_eq!(report.halving_failure, None);
        assert_eq!(report.symmetry_failures, vec![0]);
        assert!(!report.conditions_hold);
        assert_eq!(report.lsb, Some(false));
    }

    #[test]
    fn cauchy_windows() {
        let k = 5;
        let inv = |n: u64| ratio(1, n as i64);
        let h = (1 << k) + 1;
        assert!(matches!(
            u_cauchy_check(inv, &RationalMetric, h, k).unwrap(),
            CauchyWindow::HoldsToHorizon { .. }
        ));
        let ident = |n: u64| from_int(n as i64);
        assert_eq!(
            u_cauchy_check(ident, &RationalMetric, 10, 0).unwrap(),
            CauchyWindow::Fails { i: 5, j: 6 }
        );
        let constant = |_: u64| ratio(2, 3);
        for level in 0..30 {
            assert!(matches!(
                u_cauchy_check(constant, &RationalMetric, 20, level).unwrap(),
                CauchyWindow::HoldsToHorizon { from: 10 }
            ));
        }
    }
}
