// SPDX-License-Identifier: Apache-2.0

//! Integration as the limit of the net of tagged-partition sums, for
//! module-valued measures on finite and dyadic atom algebras.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::pointset::PointSet;
use crate::rational::{cmp, format_rational, from_int, pow2_neg, to_f64, Rational};

/// Coefficient module: `R^n`, `C^k` (stored as `2k` real components) or
/// `(Z/p)^m`. Scalars are rationals; mod `p` they act through their
/// residue, which needs a denominator prime to `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ModuleSpec {
    Real { n: usize, tol: Rational },
    Complex { k: usize, tol: Rational },
    ModP { p: u64, m: usize },
}

impl FromStr for ModuleSpec {
    type Err = Error;

    /// `real:n`, `complex:k`, `modp:p` or `modp:p:m`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("module `{s}`: expected real:n, complex:k or modp:p[:m]"));
        let parts: Vec<&str> = s.split(':').collect();
        let num = |i: usize| -> Result<u64> { parts.get(i).ok_or_else(bad)?.parse::<u64>().map_err(|_| bad()) };
        let spec = match parts[0] {
            "real" if parts.len() == 2 => ModuleSpec::Real {
                n: num(1)? as usize,
                tol: Rational::zero(),
            },
            "complex" if parts.len() == 2 => ModuleSpec::Complex {
                k: num(1)? as usize,
                tol: Rational::zero(),
            },
            "modp" if parts.len() == 2 || parts.len() == 3 => {
                let p = num(1)?;
                let m = if parts.len() == 3 { num(2)? as usize } else { 1 };
                if p < 2 || !is_prime(p) {
                    return Err(Error::InvalidArgument(format!("modulus {p} is not prime")));
                }
                ModuleSpec::ModP { p, m }
            }
            _ => return Err(bad()),
        };
        if spec.dims() == 0 {
            return Err(bad());
        }
        Ok(spec)
    }
}

impl TryFrom<String> for ModuleSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ModuleSpec> for String {
    fn from(m: ModuleSpec) -> String {
        m.to_string()
    }
}

impl fmt::Display for ModuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleSpec::Real { n, .. } => write!(f, "real:{n}"),
            ModuleSpec::Complex { k, .. } => write!(f, "complex:{k}"),
            ModuleSpec::ModP { p, m: 1 } => write!(f, "modp:{p}"),
            ModuleSpec::ModP { p, m } => write!(f, "modp:{p}:{m}"),
        }
    }
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Module element as rational components; mod `p` they are residues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element(pub Vec<Rational>);

impl Serialize for Element {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.format().serialize(s)
    }
}

impl Element {
    pub fn components(&self) -> &[Rational] {
        &self.0
    }

    pub fn format(&self) -> Vec<String> {
        self.0.iter().map(format_rational).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(to_f64).collect()
    }
}

impl ModuleSpec {
    pub fn dims(&self) -> usize {
        match self {
            ModuleSpec::Real { n, .. } => *n,
            ModuleSpec::Complex { k, .. } => 2 * k,
            ModuleSpec::ModP { m, .. } => *m,
        }
    }

    /// Tolerance for additivity checks; zero mod `p`.
    pub fn tolerance(&self) -> Rational {
        match self {
            ModuleSpec::Real { tol, .. } | ModuleSpec::Complex { tol, .. } => tol.clone(),
            ModuleSpec::ModP { .. } => Rational::zero(),
        }
    }

    pub fn with_tolerance(self, t: Rational) -> Self {
        match self {
            ModuleSpec::Real { n, .. } => ModuleSpec::Real { n, tol: t },
            ModuleSpec::Complex { k, .. } => ModuleSpec::Complex { k, tol: t },
            m => m,
        }
    }

    pub fn zero(&self) -> Element {
        Element(vec![Rational::zero(); self.dims()])
    }

    fn reduce(&self, q: &Rational) -> Result<Rational> {
        match self {
            ModuleSpec::ModP { p, .. } => {
                let p = BigInt::from(*p);
                let d = q.denom().mod_floor(&p);
                if d.is_zero() {
                    return Err(Error::InvalidArgument(format!(
                        "{} has no residue mod {p}",
                        format_rational(q)
                    )));
                }
                let inv = d.modpow(&(&p - BigInt::from(2)), &p);
                Ok(Rational::from_integer((q.numer() * inv).mod_floor(&p)))
            }
            _ => Ok(q.clone()),
        }
    }

    /// An element from components, reduced mod `p` where applicable.
    pub fn element(&self, components: Vec<Rational>) -> Result<Element> {
        if components.len() != self.dims() {
            return Err(Error::InvalidArgument(format!(
                "module {self} needs {} components, got {}",
                self.dims(),
                components.len()
            )));
        }
        Ok(Element(components.iter().map(|c| self.reduce(c)).collect::<Result<_>>()?))
    }

    pub fn add(&self, x: &Element, y: &Element) -> Element {
        let v = x.0.iter().zip(&y.0).map(|(a, b)| a + b).collect();
        self.normalize(v)
    }

    pub fn scale(&self, r: &Rational, x: &Element) -> Result<Element> {
        let r = self.reduce(r)?;
        Ok(self.normalize(x.0.iter().map(|a| &r * a).collect()))
    }

    fn normalize(&self, v: Vec<Rational>) -> Element {
        match self {
            ModuleSpec::ModP { p, .. } => {
                let p = BigInt::from(*p);
                Element(
                    v.into_iter()
                        .map(|a| Rational::from_integer(a.to_integer().mod_floor(&p)))
                        .collect(),
                )
            }
            _ => Element(v),
        }
    }

    /// Sup-norm distance; mod `p` the discrete metric.
    pub fn dist(&self, x: &Element, y: &Element) -> Rational {
        match self {
            ModuleSpec::ModP { .. } => {
                if x == y {
                    Rational::zero()
                } else {
                    Rational::one()
                }
            }
            _ => {
                x.0.iter()
                    .zip(&y.0)
                    .map(|(a, b)| (a - b).abs())
                    .max_by(cmp)
                    .unwrap_or_else(Rational::zero)
            }
        }
    }

    fn sum(&self, items: Vec<Element>) -> Element {
        let raw = (0..self.dims())
            .map(|c| sum_rationals(items.iter().map(|e| &e.0[c])))
            .collect();
        self.normalize(raw)
    }
}

/// Adds numerators per denominator first, so long sums over a few
/// distinct denominators skip most gcd reductions.
fn sum_rationals<'a>(items: impl Iterator<Item = &'a Rational>) -> Rational {
    let mut by_denom: BTreeMap<&BigInt, BigInt> = BTreeMap::new();
    for q in items {
        *by_denom.entry(q.denom()).or_insert_with(BigInt::zero) += q.numer();
    }
    by_denom
        .into_iter()
        .map(|(d, n)| Rational::new(n, d.clone()))
        .fold(Rational::zero(), |acc, q| acc + q)
}

/// `x - y` without reduction; shared denominators stay shared.
fn raw_diff(x: &Rational, y: &Rational) -> Rational {
    if x.denom() == y.denom() {
        Rational::new_raw(x.numer() - y.numer(), x.denom().clone())
    } else {
        Rational::new_raw(x.numer() * y.denom() - y.numer() * x.denom(), x.denom() * y.denom())
    }
}

/// A point of the universe.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(untagged)]
pub enum Point {
    Atom(usize),
    Real(#[serde(serialize_with = "ser_rational")] Rational),
}

fn ser_rational<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Atom(i) => write!(f, "#{i}"),
            Point::Real(q) => write!(f, "{}", format_rational(q)),
        }
    }
}

/// A finite union of atoms: a set of atom indices, or an interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Block {
    Atoms(PointSet),
    Interval { lo: Rational, hi: Rational },
}

/// Finite universe with singleton atoms, or `[a, b]` with dyadic halving.
/// Dyadic blocks are `[lo, hi)` (the last one closed); in the mirrored
/// algebra they are `(lo, hi]` (the first one closed), which lets right
/// endpoints serve as tags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AtomAlgebra {
    Finite { labels: Vec<String> },
    Dyadic { a: Rational, b: Rational, mirrored: bool },
}

impl AtomAlgebra {
    pub fn finite(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() || labels.len() > crate::pointset::MAX_POINTS {
            return Err(Error::InvalidArgument("finite universe needs 1..=64 atoms".into()));
        }
        Ok(AtomAlgebra::Finite { labels })
    }

    pub fn dyadic(a: Rational, b: Rational, mirrored: bool) -> Result<Self> {
        if a >= b {
            return Err(Error::InvalidArgument("empty interval".into()));
        }
        Ok(AtomAlgebra::Dyadic { a, b, mirrored })
    }

    pub fn contains(&self, block: &Block, t: &Point) -> bool {
        match (self, block, t) {
            (AtomAlgebra::Finite { .. }, Block::Atoms(s), Point::Atom(i)) => s.contains(*i),
            (AtomAlgebra::Dyadic { a, b, mirrored }, Block::Interval { lo, hi }, Point::Real(t)) => {
                let (above_lo, below_hi) = (cmp(t, lo), cmp(t, hi));
                if *mirrored {
                    (above_lo.is_gt() || (lo == a && t == a)) && below_hi.is_le()
                } else {
                    above_lo.is_ge() && (below_hi.is_lt() || (hi == b && t == b))
                }
            }
            _ => false,
        }
    }

    /// Whether `x` sits on the dyadic grid of `[a, b]`.
    fn on_grid(&self, x: &Rational) -> bool {
        match self {
            AtomAlgebra::Dyadic { a, b, .. } => {
                let s = (x - a) / (b - a);
                let d = s.denom();
                d.is_positive() && (d & (d - BigInt::one())).is_zero()
            }
            AtomAlgebra::Finite { .. } => false,
        }
    }

    pub fn check_measurable(&self, block: &Block) -> Result<()> {
        match (self, block) {
            (AtomAlgebra::Finite { labels }, Block::Atoms(s)) if s.is_subset(PointSet::full(labels.len())) => Ok(()),
            (AtomAlgebra::Dyadic { a, b, .. }, Block::Interval { lo, hi })
                if a <= lo && lo < hi && hi <= b && self.on_grid(lo) && self.on_grid(hi) =>
            {
                Ok(())
            }
            _ => Err(Error::NonMeasurable(self.describe(block))),
        }
    }

    pub fn describe(&self, block: &Block) -> String {
        match (self, block) {
            (AtomAlgebra::Finite { labels }, Block::Atoms(s)) => {
                let names: Vec<&str> = s.iter().filter_map(|i| labels.get(i).map(String::as_str)).collect();
                format!("{{{}}}", names.join(","))
            }
            (AtomAlgebra::Dyadic { mirrored: false, .. }, Block::Interval { lo, hi }) => {
                format!("[{}, {})", format_rational(lo), format_rational(hi))
            }
            (AtomAlgebra::Dyadic { .. }, Block::Interval { lo, hi }) => {
                format!("({}, {}]", format_rational(lo), format_rational(hi))
            }
            (_, b) => format!("{b:?}"),
        }
    }

    fn tag_for(&self, block: &Block, rule: TagRule) -> Point {
        match block {
            Block::Atoms(s) => Point::Atom(s.first().expect("nonempty block")),
            Block::Interval { lo, hi } => Point::Real(match rule {
                TagRule::Left => lo.clone(),
                TagRule::Right => hi.clone(),
                TagRule::Midpoint => (lo + hi) / from_int(2),
            }),
        }
    }

    /// Children of a block: singletons, or the two halves.
    pub fn children(&self, block: &Block) -> Result<Vec<Block>> {
        match (self, block) {
            (AtomAlgebra::Finite { .. }, Block::Atoms(s)) => Ok(s.iter().map(|i| Block::Atoms(PointSet::singleton(i))).collect()),
            (AtomAlgebra::Dyadic { .. }, Block::Interval { lo, hi }) => {
                let mid = (lo + hi) / from_int(2);
                Ok(vec![
                    Block::Interval {
                        lo: lo.clone(),
                        hi: mid.clone(),
                    },
                    Block::Interval { lo: mid, hi: hi.clone() },
                ])
            }
            _ => Err(Error::NoRefinementRule(format!("{block:?}"))),
        }
    }

    /// The coarsest tagged partition: all atoms (finite) or the whole
    /// interval.
    pub fn initial_partition(&self, rule: TagRule) -> IndexedPartition {
        let blocks = match self {
            AtomAlgebra::Finite { labels } => (0..labels.len()).map(|i| Block::Atoms(PointSet::singleton(i))).collect(),
            AtomAlgebra::Dyadic { a, b, .. } => vec![Block::Interval {
                lo: a.clone(),
                hi: b.clone(),
            }],
        };
        let tags = blocks.iter().map(|b| self.tag_for(b, rule)).collect();
        IndexedPartition { blocks, tags }
    }
}

/// Default tag for blocks that inherit none.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TagRule {
    Left,
    Right,
    Midpoint,
}

impl FromStr for TagRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(TagRule::Left),
            "right" => Ok(TagRule::Right),
            "midpoint" => Ok(TagRule::Midpoint),
            _ => Err(Error::Parse(format!("tag rule `{s}`: expected left, right or midpoint"))),
        }
    }
}

/// Blocks with one tag each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexedPartition {
    blocks: Vec<Block>,
    tags: Vec<Point>,
}

impl IndexedPartition {
    /// Checks that the blocks are measurable, partition the universe and
    /// contain their tags.
    pub fn new(alg: &AtomAlgebra, blocks: Vec<Block>, tags: Vec<Point>) -> Result<Self> {
        if blocks.len() != tags.len() || blocks.is_empty() {
            return Err(Error::InvalidArgument("one tag per block, at least one block".into()));
        }
        for (b, t) in blocks.iter().zip(&tags) {
            alg.check_measurable(b)?;
            if !alg.contains(b, t) {
                return Err(Error::TagOutsideBlock { tag: t.to_string() });
            }
        }
        let covers = match alg {
            AtomAlgebra::Finite { labels } => {
                let mut seen = PointSet::EMPTY;
                let mut disjoint = true;
                for b in &blocks {
                    if let Block::Atoms(s) = b {
                        disjoint &= !seen.intersects(*s);
                        seen = seen.union(*s);
                    }
                }
                disjoint && seen == PointSet::full(labels.len())
            }
            AtomAlgebra::Dyadic { a, b, .. } => {
                let mut iv: Vec<(&Rational, &Rational)> = blocks
                    .iter()
                    .filter_map(|bl| match bl {
                        Block::Interval { lo, hi } => Some((lo, hi)),
                        Block::Atoms(_) => None,
                    })
                    .collect();
                iv.sort_by(|x, y| cmp(x.0, y.0));
                iv.first().map(|f| f.0) == Some(a) && iv.last().map(|l| l.1) == Some(b) && iv.windows(2).all(|w| w[0].1 == w[1].0)
            }
        };
        if !covers {
            return Err(Error::InvalidArgument("blocks do not partition the universe".into()));
        }
        Ok(IndexedPartition { blocks, tags })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn tags(&self) -> &[Point] {
        &self.tags
    }

    /// `self ≥ other`: every tag of `other` is a tag here and every block
    /// here lies inside a block of `other`.
    pub fn refines(&self, other: &IndexedPartition) -> bool {
        let inside = |b: &Block, c: &Block| match (b, c) {
            (Block::Atoms(x), Block::Atoms(y)) => x.is_subset(*y),
            (Block::Interval { lo, hi }, Block::Interval { lo: l2, hi: h2 }) => l2 <= lo && hi <= h2,
            _ => false,
        };
        let tags: HashSet<&Point> = self.tags.iter().collect();
        other.tags.iter().all(|t| tags.contains(t)) && self.blocks.iter().all(|b| other.blocks.iter().any(|c| inside(b, c)))
    }
}

/// Splits every block into its children. The child holding the parent's
/// tag keeps it; the others take the rule's tag.
pub fn refine(alg: &AtomAlgebra, part: &IndexedPartition, rule: TagRule) -> Result<IndexedPartition> {
    Ok(refine_with_parents(alg, part, rule)?.0)
}

/// `refine` plus the parent index of every new block.
fn refine_with_parents(alg: &AtomAlgebra, part: &IndexedPartition, rule: TagRule) -> Result<(IndexedPartition, Vec<usize>)> {
    let mut blocks = Vec::with_capacity(part.blocks.len() * 2);
    let mut tags = Vec::with_capacity(part.blocks.len() * 2);
    let mut parents = Vec::with_capacity(part.blocks.len() * 2);
    for (i, (b, t)) in part.blocks.iter().zip(&part.tags).enumerate() {
        for c in alg.children(b)? {
            let tag = if alg.contains(&c, t) {
                t.clone()
            } else {
                alg.tag_for(&c, rule)
            };
            blocks.push(c);
            tags.push(tag);
            parents.push(i);
        }
    }
    Ok((IndexedPartition { blocks, tags }, parents))
}

/// A dyadic atom whose measure is shifted, to model a broken measure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Perturbation {
    pub depth: u32,
    pub index: u64,
    pub delta: Element,
}

/// Module-valued measure on the atom algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VectorMeasure {
    /// Values on the atoms of a finite universe, extended additively.
    Table(Vec<Element>),
    /// `scale · length` on an interval universe.
    Length {
        scale: Element,
        perturbation: Option<Perturbation>,
    },
    Zero,
}

impl VectorMeasure {
    pub fn value(&self, alg: &AtomAlgebra, module: &ModuleSpec, block: &Block) -> Result<Element> {
        alg.check_measurable(block)?;
        self.value_unchecked(alg, module, block)
    }

    /// For blocks produced by refinement, which are measurable by
    /// construction.
    fn value_unchecked(&self, alg: &AtomAlgebra, module: &ModuleSpec, block: &Block) -> Result<Element> {
        match (self, alg, block) {
            (VectorMeasure::Zero, _, _) => Ok(module.zero()),
            (VectorMeasure::Table(values), AtomAlgebra::Finite { labels }, Block::Atoms(s)) => {
                if values.len() != labels.len() {
                    return Err(Error::Measure(format!(
                        "{} atom values for {} atoms",
                        values.len(),
                        labels.len()
                    )));
                }
                Ok(module.sum(s.iter().map(|i| values[i].clone()).collect()))
            }
            (VectorMeasure::Length { scale, perturbation }, AtomAlgebra::Dyadic { a, b, .. }, Block::Interval { lo, hi }) => {
                let mut v = module.scale(&(hi - lo), scale)?;
                if let Some(p) = perturbation {
                    let w = (b - a) * pow2_neg(p.depth);
                    let plo = a + &w * Rational::from_integer(BigInt::from(p.index));
                    if *lo == plo && *hi == &plo + &w {
                        v = module.add(&v, &p.delta);
                    }
                }
                Ok(v)
            }
            _ => Err(Error::Measure("measure does not match the universe".into())),
        }
    }
}

/// Integrand `U → R`.
#[derive(Clone, Debug)]
pub enum Integrand {
    /// In `t` (the point, or the atom index on finite universes).
    Expression(Expr),
    /// Values per atom of a finite universe.
    Table(Vec<Rational>),
    /// `1` on dyadic rationals of the interval grid, `0` elsewhere.
    DyadicIndicator,
}

impl Integrand {
    pub fn eval(&self, alg: &AtomAlgebra, t: &Point) -> Result<Rational> {
        match (self, t) {
            (Integrand::Expression(e), Point::Real(q)) => e.eval_at("t", q),
            (Integrand::Expression(e), Point::Atom(i)) => e.eval_at("t", &from_int(*i as i64)),
            (Integrand::Table(v), Point::Atom(i)) => v.get(*i).cloned().ok_or(Error::IndexOutOfRange {
                what: "integrand table",
                index: *i,
                len: v.len(),
            }),
            (Integrand::DyadicIndicator, Point::Real(q)) => Ok(if alg.on_grid(q) { Rational::one() } else { Rational::zero() }),
            _ => Err(Error::InvalidArgument("integrand does not match the universe".into())),
        }
    }
}

/// `Σ f(t) μ(P_t)` over the blocks.
pub fn riemann_value(
    alg: &AtomAlgebra,
    f: &Integrand,
    part: &IndexedPartition,
    mu: &VectorMeasure,
    module: &ModuleSpec,
) -> Result<Element> {
    sum_over(alg, f, part, mu, module, true)
}

fn sum_over(
    alg: &AtomAlgebra,
    f: &Integrand,
    part: &IndexedPartition,
    mu: &VectorMeasure,
    module: &ModuleSpec,
    checked: bool,
) -> Result<Element> {
    let measures: Vec<Element> = part
        .blocks
        .par_iter()
        .zip(&part.tags)
        .map(|(b, t)| {
            if checked && !alg.contains(b, t) {
                return Err(Error::TagOutsideBlock { tag: t.to_string() });
            }
            if checked {
                mu.value(alg, module, b)
            } else {
                mu.value_unchecked(alg, module, b)
            }
        })
        .collect::<Result<_>>()?;
    weighted_sum(alg, f, &part.tags, &measures, module)
}

/// `Σ f(t_i) m_i`.
fn weighted_sum(alg: &AtomAlgebra, f: &Integrand, tags: &[Point], measures: &[Element], module: &ModuleSpec) -> Result<Element> {
    if let ModuleSpec::ModP { .. } = module {
        let terms: Vec<Element> = tags
            .par_iter()
            .zip(measures)
            .map(|(t, m)| module.scale(&f.eval(alg, t)?, m))
            .collect::<Result<_>>()?;
        return Ok(module.sum(terms));
    }
    // Unreduced products share denominators, which the grouped sum exploits;
    // the sum reduces once at the end.
    let terms: Vec<Element> = tags
        .par_iter()
        .zip(measures)
        .map(|(t, m)| {
            let r = f.eval(alg, t)?;
            Ok(Element(
                m.0.iter()
                    .map(|c| Rational::new_raw(r.numer() * c.numer(), r.denom() * c.denom()))
                    .collect(),
            ))
        })
        .collect::<Result<_>>()?;
    Ok(module.sum(terms))
}

/// Tags with every unpinned tag moved a third of the way into its block,
/// off the dyadic grid.
fn perturb(alg: &AtomAlgebra, part: &IndexedPartition, pinned: &[bool]) -> Vec<Point> {
    let mirrored = matches!(alg, AtomAlgebra::Dyadic { mirrored: true, .. });
    part.blocks
        .iter()
        .zip(&part.tags)
        .zip(pinned)
        .map(|((b, t), &keep)| match b {
            Block::Interval { lo, hi } if !keep => {
                let third = (hi - lo) / from_int(3);
                Point::Real(if mirrored { hi - third } else { lo + third })
            }
            _ => t.clone(),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegrationOptions {
    pub depth: u32,
    pub tags: TagRule,
    /// Target radius `2^-level`.
    pub level: u32,
    /// How many final depths the oscillation must persist to diverge.
    pub persist: u32,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions {
            depth: 16,
            tags: TagRule::Left,
            level: 16,
            persist: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub depth: u32,
    pub blocks: usize,
    pub value: Vec<String>,
    /// Distance to the previous chain value.
    pub delta: Option<String>,
    /// Distance to the tag-perturbed partition at the same depth.
    pub oscillation: String,
}

/// One side of an oscillation witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessPartition {
    pub depth: u32,
    pub tags: String,
    pub value: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum IntegrationVerdict {
    Value {
        value: Vec<f64>,
        value_exact: Vec<String>,
        /// Sampled variation times mesh times the measure scale; a rigorous
        /// error bound for monotone integrands against length measures.
        bound: Option<f64>,
    },
    /// Both partitions refine the chain one level up, so the net of sums
    /// is not cauchy at `oscillation`.
    Diverged {
        oscillation: String,
        witness: [WitnessPartition; 2],
    },
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Integration {
    pub verdict: IntegrationVerdict,
    pub trace: Vec<TraceEntry>,
}

/// Checks `μ(parent) = Σ μ(children)` within the module tolerance.
fn check_additivity(alg: &AtomAlgebra, mu: &VectorMeasure, module: &ModuleSpec, parent: &Block) -> Result<Rational> {
    let whole = mu.value_unchecked(alg, module, parent)?;
    let parts = alg
        .children(parent)?
        .iter()
        .map(|c| mu.value_unchecked(alg, module, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(module.dist(&whole, &module.sum(parts)))
}

/// Evaluates the sums along a refinement chain down to `opts.depth`.
///
/// The chain is a subnet of the partition net; it yields a value once the
/// last step is below `2^-level` and no larger than the one before, and the
/// tag perturbation at the last depth stays below `2^-level` too. It diverges when the perturbation gap stays at or
/// above `2^-level` over the last `persist` depths.
pub fn integrate(
    alg: &AtomAlgebra,
    f: &Integrand,
    mu: &VectorMeasure,
    module: &ModuleSpec,
    opts: &IntegrationOptions,
) -> Result<Integration> {
    let radius = pow2_neg(opts.level);
    let tol = module.tolerance();
    let mut part = alg.initial_partition(opts.tags);
    let mut measures: Vec<Element> = part
        .blocks
        .iter()
        .map(|b| mu.value_unchecked(alg, module, b))
        .collect::<Result<_>>()?;
    // Tags shared with the previous chain partition; the perturbed
    // partition keeps them so that it still refines that partition.
    let mut pinned = vec![true; part.blocks.len()];
    let mut prev: Option<Element> = None;
    let mut trace = Vec::new();
    let mut values = Vec::new();
    let mut oscillations = Vec::new();
    for depth in 0..=opts.depth {
        if depth > 0 {
            let (next, parents) = refine_with_parents(alg, &part, opts.tags)?;
            let child_measures: Vec<Element> = next
                .blocks
                .par_iter()
                .map(|b| mu.value_unchecked(alg, module, b))
                .collect::<Result<_>>()?;
            let mut groups: Vec<Vec<Element>> = vec![Vec::new(); part.blocks.len()];
            for (m, &p) in child_measures.iter().zip(&parents) {
                groups[p].push(m.clone());
            }
            for (i, g) in groups.into_iter().enumerate() {
                let d = module.dist(&measures[i], &module.sum(g));
                if d > tol {
                    return Err(Error::Measure(format!(
                        "additivity fails at block {} by {}",
                        alg.describe(&part.blocks[i]),
                        format_rational(&d)
                    )));
                }
            }
            pinned = next.tags.iter().zip(&parents).map(|(t, &p)| *t == part.tags[p]).collect();
            part = next;
            measures = child_measures;
        }
        let value = weighted_sum(alg, f, &part.tags, &measures, module)?;
        let shifted = weighted_sum(alg, f, &perturb(alg, &part, &pinned), &measures, module)?;
        let osc = module.dist(&value, &shifted);
        trace.push(TraceEntry {
            depth,
            blocks: part.blocks.len(),
            value: value.format(),
            delta: prev.as_ref().map(|p| format_rational(&module.dist(p, &value))),
            oscillation: format_rational(&osc),
        });
        oscillations.push((osc, shifted));
        prev = Some(value.clone());
        values.push(value);
    }
    let n = values.len();
    let persist = (opts.persist.max(1) as usize).min(n);
    let tail = &oscillations[n - persist..];
    if opts.depth > 0 && tail.iter().all(|(o, _)| o >= &radius) {
        let least = tail.iter().map(|(o, _)| o.clone()).min_by(cmp).expect("nonempty");
        let (_, shifted) = &oscillations[n - 1];
        return Ok(Integration {
            verdict: IntegrationVerdict::Diverged {
                oscillation: format_rational(&least),
                witness: [
                    WitnessPartition {
                        depth: opts.depth,
                        tags: "chain".into(),
                        value: values[n - 1].format(),
                    },
                    WitnessPartition {
                        depth: opts.depth,
                        tags: "perturbed".into(),
                        value: shifted.format(),
                    },
                ],
            },
            trace,
        });
    }
    let delta = |i: usize| module.dist(&values[i - 1], &values[i]);
    let stable = match n {
        1 => true,
        2 => delta(1) < radius,
        _ => delta(n - 1) < radius && delta(n - 1) <= delta(n - 2),
    };
    if stable && oscillations[n - 1].0 < radius {
        let value = &values[n - 1];
        return Ok(Integration {
            verdict: IntegrationVerdict::Value {
                value: value.to_f64(),
                value_exact: value.format(),
                bound: variation_bound(alg, f, mu, module, &part)?,
            },
            trace,
        });
    }
    Ok(Integration {
        verdict: IntegrationVerdict::Undecided,
        trace,
    })
}

fn variation_bound(
    alg: &AtomAlgebra,
    f: &Integrand,
    mu: &VectorMeasure,
    module: &ModuleSpec,
    part: &IndexedPartition,
) -> Result<Option<f64>> {
    match (alg, mu) {
        (AtomAlgebra::Finite { .. }, _) | (_, VectorMeasure::Zero) => Ok(Some(0.0)),
        (
            AtomAlgebra::Dyadic { a, b, .. },
            VectorMeasure::Length {
                scale,
                perturbation: None,
            },
        ) => {
            let mut grid: Vec<Rational> = part
                .blocks
                .iter()
                .filter_map(|bl| match bl {
                    Block::Interval { lo, .. } => Some(lo.clone()),
                    Block::Atoms(_) => None,
                })
                .collect();
            grid.push(b.clone());
            let vals = grid
                .par_iter()
                .map(|t| f.eval(alg, &Point::Real(t.clone())))
                .collect::<Result<Vec<_>>>()?;
            let steps: Vec<Rational> = vals.windows(2).map(|w| raw_diff(&w[1], &w[0]).abs()).collect();
            let variation = sum_rationals(steps.iter());
            let mesh = (b - a) / Rational::from_integer(BigInt::from(part.blocks.len()));
            let norm = module.dist(scale, &module.zero());
            Ok((variation * mesh * norm).to_f64())
        }
        _ => Ok(None),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MeasureReport {
    pub passed: bool,
    pub empty_is_zero: bool,
    pub checked: u64,
    pub max_defect: String,
    /// The first parent block whose children do not add up.
    pub failure: Option<String>,
}

/// `μ(∅) = 0` and finite additivity over every refinement to `depth`.
pub fn measure_check(alg: &AtomAlgebra, mu: &VectorMeasure, module: &ModuleSpec, depth: u32) -> Result<MeasureReport> {
    let empty = match alg {
        AtomAlgebra::Finite { .. } => match mu {
            VectorMeasure::Table(v) => module.sum(v.iter().take(0).cloned().collect()),
            _ => module.zero(),
        },
        AtomAlgebra::Dyadic { .. } => match mu {
            // An empty interval has length zero.
            VectorMeasure::Length { scale, .. } => module.scale(&Rational::zero(), scale)?,
            _ => module.zero(),
        },
    };
    let empty_is_zero = empty == module.zero();
    let tol = module.tolerance();
    let mut part = alg.initial_partition(TagRule::Left);
    let mut checked = 0;
    let mut max_defect = Rational::zero();
    let mut failure = None;
    for _ in 0..depth {
        for b in &part.blocks {
            let d = check_additivity(alg, mu, module, b)?;
            checked += 1;
            if d > tol && failure.is_none() {
                failure = Some(alg.describe(b));
            }
            if d > max_defect {
                max_defect = d;
            }
        }
        part = refine(alg, &part, TagRule::Left)?;
        if matches!(alg, AtomAlgebra::Finite { .. }) {
            break;
        }
    }
    Ok(MeasureReport {
        passed: empty_is_zero && failure.is_none(),
        empty_is_zero,
        checked,
        max_defect: format_rational(&max_defect),
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{parse_rational, ratio};
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn real() -> ModuleSpec {
        "real:1".parse().unwrap()
    }

    fn unit(mirrored: bool) -> AtomAlgebra {
        AtomAlgebra::dyadic(q("0"), q("1"), mirrored).unwrap()
    }

    fn length(m: &ModuleSpec) -> VectorMeasure {
        let mut one = vec![Rational::zero(); m.dims()];
        one[0] = Rational::one();
        VectorMeasure::Length {
            scale: Element(one),
            perturbation: None,
        }
    }

    fn expr(s: &str) -> Integrand {
        Integrand::Expression(Expr::parse(s).unwrap())
    }

    fn mod5_fixture() -> (AtomAlgebra, ModuleSpec, VectorMeasure, Integrand) {
        let m: ModuleSpec = "modp:5".parse().unwrap();
        let alg = AtomAlgebra::finite(vec!["A".into(), "B".into(), "C".into()]).unwrap();
        let mu = VectorMeasure::Table([1, 2, 3].iter().map(|&v| m.element(vec![from_int(v)]).unwrap()).collect());
        (alg, m, mu, Integrand::Table(vec![from_int(2), from_int(0), from_int(4)]))
    }

    #[test]
    fn module_parsing() {
        assert_eq!("modp:5".parse::<ModuleSpec>().unwrap(), ModuleSpec::ModP { p: 5, m: 1 });
        assert_eq!("complex:2".parse::<ModuleSpec>().unwrap().dims(), 4);
        assert!("modp:6".parse::<ModuleSpec>().is_err());
        assert!("real:0".parse::<ModuleSpec>().is_err());
        assert!("quaternion:1".parse::<ModuleSpec>().is_err());
        let m: ModuleSpec = "modp:5".parse().unwrap();
        // 1/2 ≡ 3 (mod 5).
        assert_eq!(m.element(vec![ratio(1, 2)]).unwrap().0[0], from_int(3));
        assert!(m.element(vec![ratio(1, 5)]).is_err());
    }

    #[test]
    fn mod5_sum_is_four_at_every_depth() {
        let (alg, m, mu, f) = mod5_fixture();
        let part = alg.initial_partition(TagRule::Left);
        assert_eq!(riemann_value(&alg, &f, &part, &mu, &m).unwrap().0, vec![from_int(4)]);
        for depth in [0, 1, 5] {
            let r = integrate(
                &alg,
                &f,
                &mu,
                &m,
                &IntegrationOptions {
                    depth,
                    ..Default::default()
                },
            )
            .unwrap();
            match r.verdict {
                IntegrationVerdict::Value { value_exact, bound, .. } => {
                    assert_eq!(value_exact, vec!["4"]);
                    assert_eq!(bound, Some(0.0));
                }
                v => panic!("{v:?}"),
            }
            assert!(r.trace.iter().skip(1).all(|t| t.delta.as_deref() == Some("0")));
        }
        let zero = Integrand::Table(vec![Rational::zero(); 3]);
        assert_eq!(riemann_value(&alg, &zero, &part, &mu, &m).unwrap(), m.zero());
    }

    #[test]
    fn identity_at_depth_16() {
        let m = real();
        let r = integrate(&unit(false), &expr("t"), &length(&m), &m, &IntegrationOptions::default()).unwrap();
        let IntegrationVerdict::Value { value_exact, bound, .. } = &r.verdict else {
            panic!("{:?}", r.verdict);
        };
        // Left sum: 1/2 − 2^-17.
        assert_eq!(value_exact[0], "65535/131072");
        assert_eq!(*bound, Some(1.52587890625e-05));
        let v = q(&value_exact[0]);
        assert!(crate::rational::within_level(&v, &ratio(1, 2), 16));
        assert!((ratio(1, 2) - v) <= pow2_neg(16));
        assert_eq!(r.trace.len(), 17);
        assert_eq!(r.trace[16].blocks, 1 << 16);
    }

    #[test]
    fn left_below_right_for_monotone() {
        let m = real();
        for d in 1..=8 {
            let opts = |tags| IntegrationOptions {
                depth: d,
                tags,
                level: 2,
                persist: 3,
            };
            let l = integrate(&unit(false), &expr("t*t"), &length(&m), &m, &opts(TagRule::Left)).unwrap();
            let r = integrate(&unit(true), &expr("t*t"), &length(&m), &m, &opts(TagRule::Right)).unwrap();
            for (a, b) in l.trace.iter().zip(&r.trace) {
                assert!(q(&a.value[0]) <= q(&b.value[0]));
            }
        }
    }

    #[test]
    fn step_function_is_refinement_invariant() {
        let m = real();
        let alg = unit(false);
        let f = expr("if(t < 1/2, 1, 3)");
        let split = IndexedPartition::new(
            &alg,
            vec![
                Block::Interval {
                    lo: q("0"),
                    hi: q("1/2"),
                },
                Block::Interval {
                    lo: q("1/2"),
                    hi: q("1"),
                },
            ],
            vec![Point::Real(q("0")), Point::Real(q("1/2"))],
        )
        .unwrap();
        assert_eq!(riemann_value(&alg, &f, &split, &length(&m), &m).unwrap().0, vec![from_int(2)]);
        let r = integrate(
            &alg,
            &f,
            &length(&m),
            &m,
            &IntegrationOptions {
                depth: 10,
                level: 8,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.trace[0].value, vec!["1"]);
        assert!(r.trace.iter().skip(1).all(|t| t.value == vec!["2"]));
        assert!(matches!(r.verdict, IntegrationVerdict::Value { .. }));
    }

    #[test]
    fn dyadic_indicator_diverges() {
        let m = real();
        let r = integrate(
            &unit(false),
            &Integrand::DyadicIndicator,
            &length(&m),
            &m,
            &IntegrationOptions {
                depth: 8,
                ..Default::default()
            },
        )
        .unwrap();
        let IntegrationVerdict::Diverged { oscillation, witness } = &r.verdict else {
            panic!("{:?}", r.verdict);
        };
        assert_eq!(oscillation, "1/2");
        assert_eq!(witness[0].value, vec!["1"]);
        assert_eq!(witness[1].value, vec!["1/2"]);
    }

    #[test]
    fn perturbed_partition_still_refines_the_chain() {
        let alg = unit(false);
        let p0 = alg.initial_partition(TagRule::Left);
        let p1 = refine(&alg, &p0, TagRule::Left).unwrap();
        let p2 = refine(&alg, &p1, TagRule::Left).unwrap();
        let pinned: Vec<bool> = p2.tags().iter().map(|t| p1.tags().contains(t)).collect();
        let pert = IndexedPartition {
            blocks: p2.blocks.clone(),
            tags: perturb(&alg, &p2, &pinned),
        };
        assert!(pert.refines(&p1));
        assert!(!pert.refines(&p2));
        assert_eq!(pert.tags()[1], Point::Real(ratio(1, 3) / from_int(4) + ratio(1, 4)));
    }

    #[test]
    fn refinement_keeps_tags() {
        for (rule, mirrored) in [(TagRule::Left, false), (TagRule::Right, true), (TagRule::Midpoint, false)] {
            let alg = unit(mirrored);
            let p1 = refine(&alg, &alg.initial_partition(rule), rule).unwrap();
            let p2 = refine(&alg, &p1, rule).unwrap();
            assert_eq!(p1.blocks().len(), 2);
            assert_eq!(p2.blocks().len(), 4);
            assert!(p2.refines(&p1) && !p1.refines(&p2));
            let validated = IndexedPartition::new(&alg, p2.blocks().to_vec(), p2.tags().to_vec()).unwrap();
            assert_eq!(validated, p2);
        }
        let alg = unit(false);
        let mid = refine(&alg, &alg.initial_partition(TagRule::Midpoint), TagRule::Midpoint).unwrap();
        assert_eq!(mid.tags(), &[Point::Real(ratio(1, 4)), Point::Real(ratio(1, 2))]);
    }

    #[test]
    fn partition_errors() {
        let alg = unit(false);
        let whole = Block::Interval { lo: q("0"), hi: q("1") };
        assert!(matches!(
            IndexedPartition::new(&alg, vec![whole.clone()], vec![Point::Real(q("2"))]),
            Err(Error::TagOutsideBlock { .. })
        ));
        // Right end excluded on inner blocks.
        assert!(matches!(
            IndexedPartition::new(
                &alg,
                vec![
                    Block::Interval {
                        lo: q("0"),
                        hi: q("1/2")
                    },
                    Block::Interval {
                        lo: q("1/2"),
                        hi: q("1")
                    }
                ],
                vec![Point::Real(q("1/2")), Point::Real(q("1"))],
            ),
            Err(Error::TagOutsideBlock { .. })
        ));
        assert!(matches!(
            IndexedPartition::new(
                &alg,
                vec![
                    Block::Interval {
                        lo: q("0"),
                        hi: q("1/3")
                    },
                    Block::Interval {
                        lo: q("1/3"),
                        hi: q("1")
                    }
                ],
                vec![Point::Real(q("0")), Point::Real(q("1/2"))],
            ),
            Err(Error::NonMeasurable(_))
        ));
        assert!(IndexedPartition::new(
            &alg,
            vec![Block::Interval {
                lo: q("0"),
                hi: q("1/2")
            }],
            vec![Point::Real(q("0"))]
        )
        .is_err());
        assert!(matches!(
            alg.children(&Block::Atoms(PointSet::singleton(0))),
            Err(Error::NoRefinementRule(_))
        ));
    }

    #[test]
    fn measure_checks() {
        let m = real();
        let report = measure_check(&unit(false), &length(&m), &m, 10).unwrap();
        assert!(report.passed);
        assert_eq!(report.max_defect, "0");
        assert_eq!(report.checked, 1023);
        assert!(measure_check(&unit(false), &VectorMeasure::Zero, &m, 4).unwrap().passed);
        let broken = VectorMeasure::Length {
            scale: Element(vec![Rational::one()]),
            perturbation: Some(Perturbation {
                depth: 3,
                index: 5,
                delta: Element(vec![ratio(1, 100)]),
            }),
        };
        let report = measure_check(&unit(false), &broken, &m, 6).unwrap();
        assert!(!report.passed);
        assert_eq!(report.failure.as_deref(), Some("[1/2, 3/4)"));
        assert_eq!(report.max_defect, "1/100");
        let run = integrate(
            &unit(false),
            &expr("t"),
            &broken,
            &m,
            &IntegrationOptions {
                depth: 6,
                ..Default::default()
            },
        );
        assert!(matches!(run, Err(Error::Measure(msg)) if msg.contains("[1/2, 3/4)")));
    }

    #[test]
    fn complex_measure() {
        let m: ModuleSpec = "complex:1".parse().unwrap();
        let mu = VectorMeasure::Length {
            scale: m.element(vec![from_int(1), from_int(2)]).unwrap(),
            perturbation: None,
        };
        let r = integrate(
            &unit(false),
            &expr("1"),
            &mu,
            &m,
            &IntegrationOptions {
                depth: 3,
                ..Default::default()
            },
        )
        .unwrap();
        let IntegrationVerdict::Value { value_exact, .. } = r.verdict else {
            panic!()
        };
        assert_eq!(value_exact, vec!["1", "2"]);
    }

    proptest! {
        #[test]
        fn linear_in_the_integrand(a in -5i64..5, b in -5i64..5, depth in 0u32..6, p in prop::sample::select(vec![2u64, 3, 5, 7])) {
            let real = real();
            let alg = unit(false);
            let mut part = alg.initial_partition(TagRule::Left);
            for _ in 0..depth {
                part = refine(&alg, &part, TagRule::Left).unwrap();
            }
            let f = expr("t*t - 1/3");
            let g = expr("abs(t - 1/5)");
            let combo = expr(&format!("({a})*(t*t - 1/3) + ({b})*abs(t - 1/5)"));
            let mu = length(&real);
            let sf = riemann_value(&alg, &f, &part, &mu, &real).unwrap();
            let sg = riemann_value(&alg, &g, &part, &mu, &real).unwrap();
            let lhs = riemann_value(&alg, &combo, &part, &mu, &real).unwrap();
            let rhs = real.add(&real.scale(&from_int(a), &sf).unwrap(), &real.scale(&from_int(b), &sg).unwrap());
            prop_assert_eq!(lhs, rhs);

            let m: ModuleSpec = format!("modp:{p}").parse().unwrap();
            let alg = AtomAlgebra::finite(vec!["x".into(), "y".into(), "z".into()]).unwrap();
            let mu = VectorMeasure::Table((1..=3).map(|v| m.element(vec![from_int(v * 7)]).unwrap()).collect());
            let part = alg.initial_partition(TagRule::Left);
            let f = Integrand::Table(vec![from_int(1), from_int(4), from_int(-2)]);
            let g = Integrand::Table(vec![from_int(3), from_int(0), from_int(5)]);
            let combo = Integrand::Table(vec![from_int(a + 3 * b), from_int(4 * a), from_int(-2 * a + 5 * b)]);
            let sf = riemann_value(&alg, &f, &part, &mu, &m).unwrap();
            let sg = riemann_value(&alg, &g, &part, &mu, &m).unwrap();
            let lhs = riemann_value(&alg, &combo, &part, &mu, &m).unwrap();
            let rhs = m.add(&m.scale(&from_int(a), &sf).unwrap(), &m.scale(&from_int(b), &sg).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
