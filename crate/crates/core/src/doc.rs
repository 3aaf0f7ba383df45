// SPDX-License-Identifier: Apache-2.0

//! JSON documents and the named-object workspace built from them.
//!
//! Every document carries `"version": 1`. Points are referred to by label;
//! base levels list indices into the space's `opens` array as written
//! (for spaces given by a subbase, into the generated opens in canonical
//! order).

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::complete::SeqDescriptor;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::funcspace::tier2::{FunctionNetDescriptor, Interval, RealFunctionNet};
use crate::funcspace::ProductSpec;
use crate::integrate::{AtomAlgebra, Element, Integrand, ModuleSpec, VectorMeasure};
use crate::net::LassoNet;
use crate::pointset::PointSet;
use crate::rational::{from_int, parse_rational, Rational};
use crate::space::{validate_raw, FinSpace, GradedBase, ValidationReport};
use crate::uspace::{UStructureFin, UniformityFin};

pub const VERSION: u32 = 1;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub version: u32,
    #[serde(default)]
    pub spaces: Vec<SpaceDoc>,
    #[serde(default)]
    pub bases: Vec<BaseDoc>,
    #[serde(default)]
    pub nets: Vec<NetDoc>,
    #[serde(default)]
    pub ustructures: Vec<UStructureDoc>,
    #[serde(default)]
    pub uniformities: Vec<UniformityDoc>,
    #[serde(default)]
    pub sequences: Vec<SequenceDoc>,
    #[serde(default)]
    pub products: Vec<ProductDoc>,
    #[serde(default)]
    pub function_nets: Vec<FunctionNetDoc>,
    #[serde(default)]
    pub measures: Vec<MeasureDoc>,
    #[serde(default)]
    pub integrands: Vec<IntegrandDoc>,
}

/// Points plus either the full list of opens or a generating subbase.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub name: String,
    pub points: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opens: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subbase: Option<Vec<Vec<String>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AutoGrading {
    Kernel,
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseDoc {
    pub name: String,
    pub space: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<BTreeMap<String, Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub auto: Option<AutoGrading>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetDoc {
    pub name: String,
    pub space: String,
    #[serde(default)]
    pub prefix: Vec<String>,
    pub cycle: Vec<String>,
}

/// `table[x][y]` is the auxiliary point `u(x, y)`; radii are opens of the
/// auxiliary space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UStructureDoc {
    pub name: String,
    pub carrier: String,
    pub aux: String,
    pub table: Vec<Vec<String>>,
    pub radii: Vec<Vec<String>>,
}

/// Entourages as lists of ordered pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformityDoc {
    pub name: String,
    pub space: String,
    pub entourages: Vec<Vec<(String, String)>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceDoc {
    pub name: String,
    pub sequence: SeqDescriptor,
}

/// One factor base per index, or a single base shared by all indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductDoc {
    pub name: String,
    pub indices: Vec<String>,
    pub factors: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctionNetDoc {
    /// A lasso net of maps `Y → X`; each map lists one label per index.
    Table {
        name: String,
        product: String,
        #[serde(default)]
        prefix: Vec<Vec<String>>,
        cycle: Vec<Vec<String>>,
    },
    /// `term` in `n` and `t`; see [`FunctionNetDescriptor`].
    Expression {
        name: String,
        term: String,
        limit: String,
        domain: Interval,
        #[serde(default)]
        tail_bound: Option<String>,
        #[serde(default)]
        modulus: Option<String>,
    },
    Named {
        name: String,
        fixture: String,
    },
}

impl FunctionNetDoc {
    pub fn name(&self) -> &str {
        match self {
            FunctionNetDoc::Table { name, .. } | FunctionNetDoc::Expression { name, .. } | FunctionNetDoc::Named { name, .. } => {
                name
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum UniverseDoc {
    Finite { atoms: Vec<String> },
    Interval { lo: String, hi: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeasureKindDoc {
    /// `scale · length`; the scale defaults to the first unit vector.
    Length {
        #[serde(default)]
        scale: Option<serde_json::Value>,
    },
    /// One value per atom: a number, a rational string, or a component list.
    Table {
        values: Vec<serde_json::Value>,
    },
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureDoc {
    pub name: String,
    pub universe: UniverseDoc,
    pub module: ModuleSpec,
    pub measure: MeasureKindDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum IntegrandDoc {
    /// In `t`; on finite universes `t` is the atom index.
    Expression {
        name: String,
        expr: String,
    },
    Table {
        name: String,
        values: Vec<serde_json::Value>,
    },
    DyadicIndicator {
        name: String,
    },
}

impl IntegrandDoc {
    pub fn name(&self) -> &str {
        match self {
            IntegrandDoc::Expression { name, .. } | IntegrandDoc::Table { name, .. } | IntegrandDoc::DyadicIndicator { name } => {
                name
            }
        }
    }
}

/// A measure with its universe; the algebra is built per tag rule since
/// right tags use the mirrored dyadic blocks.
#[derive(Clone, Debug)]
pub struct MeasureEntry {
    pub universe: UniverseDoc,
    pub module: ModuleSpec,
    pub measure: VectorMeasure,
}

impl MeasureEntry {
    pub fn algebra(&self, mirrored: bool) -> Result<AtomAlgebra> {
        match &self.universe {
            UniverseDoc::Finite { atoms } => AtomAlgebra::finite(atoms.clone()),
            UniverseDoc::Interval { lo, hi } => AtomAlgebra::dyadic(parse_rational(lo)?, parse_rational(hi)?, mirrored),
        }
    }
}

/// A tier-1 function net together with the product it lives on.
#[derive(Clone, Debug)]
pub struct TableFunctionNet {
    pub product: String,
    pub net: LassoNet,
}

#[derive(Clone, Debug)]
pub enum FunctionNetEntry {
    Table(TableFunctionNet),
    Real(RealFunctionNet),
}

/// Named objects from one or more documents.
#[derive(Clone, Debug, Default)]
pub struct Workspace {
    names: BTreeSet<String>,
    pub spaces: BTreeMap<String, Arc<FinSpace>>,
    pub bases: BTreeMap<String, GradedBase>,
    /// Net and the name of its space.
    pub nets: BTreeMap<String, (LassoNet, String)>,
    pub ustructures: BTreeMap<String, UStructureFin>,
    pub uniformities: BTreeMap<String, UniformityFin>,
    pub sequences: BTreeMap<String, SeqDescriptor>,
    pub products: BTreeMap<String, ProductSpec>,
    pub function_nets: BTreeMap<String, FunctionNetEntry>,
    pub measures: BTreeMap<String, MeasureEntry>,
    pub integrands: BTreeMap<String, Integrand>,
}

fn invalid(kind: &str, name: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("{kind} `{name}`: {msg}"))
}

fn labels_to_set(space: &FinSpace, labels: &[String]) -> Result<PointSet> {
    labels
        .iter()
        .map(|l| space.point_index(l))
        .collect::<Result<Vec<_>>>()
        .map(PointSet::from_indices)
}

/// A rational from a JSON number or string; decimals are read exactly.
pub fn json_rational(v: &serde_json::Value) -> Result<Rational> {
    match v {
        serde_json::Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(from_int(i)),
            None => parse_rational(&n.to_string()),
        },
        serde_json::Value::String(s) => parse_rational(s),
        other => Err(Error::Parse(format!("expected a number, got {other}"))),
    }
}

/// A module element from a scalar (first component, others zero) or a
/// component list.
pub fn json_element(module: &ModuleSpec, v: &serde_json::Value) -> Result<Element> {
    let comps = match v {
        serde_json::Value::Array(items) => items.iter().map(json_rational).collect::<Result<Vec<_>>>()?,
        scalar => {
            let mut c = vec![from_int(0); module.dims()];
            c[0] = json_rational(scalar)?;
            c
        }
    };
    module.element(comps)
}

/// Parses a document, reporting line and column on malformed JSON.
pub fn parse_document(text: &str, origin: &str) -> Result<Document> {
    let doc: Document = serde_json::from_str(text).map_err(|e| Error::Parse(format!("{origin}: {e}")))?;
    if doc.version != VERSION {
        return Err(Error::Parse(format!(
            "{origin}: unsupported document version {} (expected {VERSION})",
            doc.version
        )));
    }
    Ok(doc)
}

impl SpaceDoc {
    fn raw_opens(&self) -> std::result::Result<Vec<Vec<usize>>, String> {
        let lists = self
            .opens
            .as_ref()
            .or(self.subbase.as_ref())
            .ok_or("needs `opens` or `subbase`")?;
        lists
            .iter()
            .map(|o| {
                o.iter()
                    .map(|l| {
                        self.points
                            .iter()
                            .position(|p| p == l)
                            .ok_or_else(|| format!("unknown point label `{l}`"))
                    })
                    .collect()
            })
            .collect()
    }

    pub fn build(&self) -> Result<(FinSpace, Vec<PointSet>)> {
        if self.opens.is_some() == self.subbase.is_some() {
            return Err(invalid("space", &self.name, "give exactly one of `opens` and `subbase`"));
        }
        let raw = self.raw_opens().map_err(|m| invalid("space", &self.name, m))?;
        if self.subbase.is_some() {
            let sets: Vec<PointSet> = raw.iter().map(|o| PointSet::from_indices(o.iter().copied())).collect();
            let space = FinSpace::from_subbase(self.points.clone(), &sets).map_err(|e| invalid("space", &self.name, e))?;
            let opens = space.opens().to_vec();
            return Ok((space, opens));
        }
        let report = validate_raw(&self.points, &raw, None);
        if !report.is_valid() {
            return Err(invalid("space", &self.name, report.summary()));
        }
        let listed: Vec<PointSet> = raw.iter().map(|o| PointSet::from_indices(o.iter().copied())).collect();
        let space = FinSpace::new(self.points.clone(), listed.clone()).map_err(|e| invalid("space", &self.name, e))?;
        Ok((space, listed))
    }
}

/// Report-style validation of every space and base of a document; other
/// objects are built and their errors reported.
pub fn validate_document(doc: &Document) -> BTreeMap<String, ValidationReport> {
    let mut out = BTreeMap::new();
    // Space name to its labels and raw opens (or why they are unusable).
    type Listed = (Vec<String>, std::result::Result<Vec<Vec<usize>>, String>);
    let mut listed: BTreeMap<&str, Listed> = BTreeMap::new();
    for s in &doc.spaces {
        let raw = s.raw_opens();
        let report = match &raw {
            Ok(r) if s.opens.is_some() && s.subbase.is_none() => validate_raw(&s.points, r, None),
            Ok(_) => ValidationReport::default(),
            Err(_) => ValidationReport {
                problems: vec![crate::space::Problem::NoPoints],
            },
        };
        out.insert(format!("space {}", s.name), report);
        let raw = match (&raw, s.subbase.is_some()) {
            (Ok(_), true) => s
                .build()
                .map(|(_, o)| o.iter().map(|x| x.iter().collect()).collect())
                .map_err(|e| e.to_string()),
            _ => raw,
        };
        listed.insert(&s.name, (s.points.clone(), raw));
    }
    for b in &doc.bases {
        if let (Some(levels), Some((points, Ok(opens)))) = (&b.levels, listed.get(b.space.as_str())) {
            out.insert(format!("base {}", b.name), validate_raw(points, opens, Some(levels)));
        }
    }
    out
}

impl Workspace {
    pub fn load<P: AsRef<Path>>(paths: &[P]) -> Result<Workspace> {
        let mut ws = Workspace::default();
        for p in paths {
            let p = p.as_ref();
            let text = std::fs::read_to_string(p).map_err(|e| Error::InvalidArgument(format!("{}: {e}", p.display())))?;
            ws.add_document(&parse_document(&text, &p.display().to_string())?)?;
        }
        Ok(ws)
    }

    pub fn from_json(text: &str) -> Result<Workspace> {
        let mut ws = Workspace::default();
        ws.add_document(&parse_document(text, "<input>")?)?;
        Ok(ws)
    }

    /// Adds every object of `doc`, or nothing if any object fails.
    pub fn add_document(&mut self, doc: &Document) -> Result<()> {
        let mut next = self.clone();
        next.add_all(doc)?;
        *self = next;
        Ok(())
    }

    fn claim(&mut self, kind: &str, name: &str) -> Result<()> {
        if name.is_empty() {
            return Err(invalid(kind, name, "empty name"));
        }
        if !self.names.insert(name.to_string()) {
            return Err(invalid(kind, name, "duplicate object name"));
        }
        Ok(())
    }

    pub fn space(&self, name: &str) -> Result<&Arc<FinSpace>> {
        self.spaces
            .get(name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown space `{name}`")))
    }

    pub fn base(&self, name: &str) -> Result<&GradedBase> {
        self.bases
            .get(name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown base `{name}`")))
    }

    pub fn net(&self, name: &str) -> Result<&(LassoNet, String)> {
        self.nets
            .get(name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown net `{name}`")))
    }

    /// The base of a space: the one base declared on it, if unique.
    pub fn base_for_space(&self, space: &str) -> Result<(&str, &GradedBase)> {
        let mut found = self
            .bases
            .iter()
            .filter(|(_, b)| self.spaces.get(space).is_some_and(|s| Arc::ptr_eq(s, b.space())));
        match (found.next(), found.next()) {
            (Some((n, b)), None) => Ok((n, b)),
            (None, _) => Err(Error::InvalidArgument(format!("no base declared on space `{space}`"))),
            _ => Err(Error::InvalidArgument(format!("several bases on space `{space}`; name one"))),
        }
    }

    fn add_all(&mut self, doc: &Document) -> Result<()> {
        let mut listed_opens: BTreeMap<String, Vec<PointSet>> = BTreeMap::new();
        for s in &doc.spaces {
            self.claim("space", &s.name)?;
            let (space, listed) = s.build()?;
            listed_opens.insert(s.name.clone(), listed);
            self.spaces.insert(s.name.clone(), Arc::new(space));
        }
        for b in &doc.bases {
            self.claim("base", &b.name)?;
            let space = Arc::clone(self.space(&b.space).map_err(|e| invalid("base", &b.name, e))?);
            let base = match (&b.levels, b.auto) {
                (Some(levels), None) => {
                    let listed = match listed_opens.get(&b.space) {
                        Some(l) => l.clone(),
                        None => space.opens().to_vec(),
                    };
                    let mut sets = BTreeMap::new();
                    for (label, idx) in levels {
                        let members = idx
                            .iter()
                            .map(|&i| {
                                listed.get(i).copied().ok_or_else(|| {
                                    invalid("base", &b.name, format!("level `{label}`: open index {i} out of range"))
                                })
                            })
                            .collect::<Result<Vec<_>>>()?;
                        sets.insert(label.clone(), members);
                    }
                    GradedBase::from_sets(space, sets).map_err(|e| invalid("base", &b.name, e))?
                }
                (None, Some(AutoGrading::Kernel)) => GradedBase::kernel_base(space),
                (None, Some(AutoGrading::Full)) => GradedBase::full_base(space),
                _ => return Err(invalid("base", &b.name, "give exactly one of `levels` and `auto`")),
            };
            self.bases.insert(b.name.clone(), base);
        }
        for n in &doc.nets {
            self.claim("net", &n.name)?;
            let space = self.space(&n.space).map_err(|e| invalid("net", &n.name, e))?;
            let idx = |ls: &[String]| -> Result<Vec<usize>> {
                ls.iter()
                    .map(|l| space.point_index(l))
                    .collect::<Result<_>>()
                    .map_err(|e| invalid("net", &n.name, e))
            };
            let net = LassoNet::new(idx(&n.prefix)?, idx(&n.cycle)?).map_err(|e| invalid("net", &n.name, e))?;
            self.nets.insert(n.name.clone(), (net, n.space.clone()));
        }
        for u in &doc.ustructures {
            self.claim("u-structure", &u.name)?;
            let err = |e: Error| invalid("u-structure", &u.name, e);
            let carrier = Arc::clone(self.space(&u.carrier).map_err(err)?);
            let aux = Arc::clone(self.space(&u.aux).map_err(err)?);
            let table = u
                .table
                .iter()
                .map(|row| row.iter().map(|l| aux.point_index(l)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()
                .map_err(err)?;
            let radii = u
                .radii
                .iter()
                .map(|r| labels_to_set(&aux, r))
                .collect::<Result<Vec<_>>>()
                .map_err(err)?;
            let s = UStructureFin::new(carrier, aux, table, radii).map_err(err)?;
            self.ustructures.insert(u.name.clone(), s);
        }
        for u in &doc.uniformities {
            self.claim("uniformity", &u.name)?;
            let err = |e: Error| invalid("uniformity", &u.name, e);
            let space = Arc::clone(self.space(&u.space).map_err(err)?);
            let mut ents = Vec::new();
            for pairs in &u.entourages {
                let mut rel = vec![PointSet::EMPTY; space.point_count()];
                for (x, y) in pairs {
                    let (x, y) = (space.point_index(x).map_err(err)?, space.point_index(y).map_err(err)?);
                    rel[x] = rel[x].with(y);
                }
                ents.push(rel);
            }
            self.uniformities
                .insert(u.name.clone(), UniformityFin::new(space, ents).map_err(err)?);
        }
        for s in &doc.sequences {
            self.claim("sequence", &s.name)?;
            s.sequence.build().map_err(|e| invalid("sequence", &s.name, e))?;
            self.sequences.insert(s.name.clone(), s.sequence.clone());
        }
        for p in &doc.products {
            self.claim("product", &p.name)?;
            let err = |e: Error| invalid("product", &p.name, e);
            let factors: Vec<GradedBase> = match p.factors.len() {
                1 => vec![self.base(&p.factors[0]).map_err(err)?.clone(); p.indices.len()],
                _ => p
                    .factors
                    .iter()
                    .map(|f| self.base(f).cloned())
                    .collect::<Result<_>>()
                    .map_err(err)?,
            };
            self.products
                .insert(p.name.clone(), ProductSpec::new(p.indices.clone(), factors).map_err(err)?);
        }
        for f in &doc.function_nets {
            self.claim("function net", f.name())?;
            let err = |e: Error| invalid("function net", f.name(), e);
            let entry = match f {
                FunctionNetDoc::Table {
                    product, prefix, cycle, ..
                } => {
                    let spec = self
                        .products
                        .get(product)
                        .ok_or_else(|| err(Error::InvalidArgument(format!("unknown product `{product}`"))))?;
                    let point = |map: &Vec<String>| -> Result<usize> {
                        if map.len() != spec.factors().len() {
                            return Err(Error::EncodingMismatch(format!(
                                "map lists {} values for {} indices",
                                map.len(),
                                spec.factors().len()
                            )));
                        }
                        let coords = map
                            .iter()
                            .zip(spec.factors())
                            .map(|(l, b)| b.space().point_index(l))
                            .collect::<Result<Vec<_>>>()?;
                        Ok(spec.point_of(&coords))
                    };
                    let prefix = prefix.iter().map(point).collect::<Result<Vec<_>>>().map_err(err)?;
                    let cycle = cycle.iter().map(point).collect::<Result<Vec<_>>>().map_err(err)?;
                    FunctionNetEntry::Table(TableFunctionNet {
                        product: product.clone(),
                        net: LassoNet::new(prefix, cycle).map_err(err)?,
                    })
                }
                FunctionNetDoc::Expression {
                    term,
                    limit,
                    domain,
                    tail_bound,
                    modulus,
                    ..
                } => FunctionNetEntry::Real(
                    FunctionNetDescriptor::Expression {
                        term: term.clone(),
                        limit: limit.clone(),
                        domain: domain.clone(),
                        tail_bound: tail_bound.clone(),
                        modulus: modulus.clone(),
                    }
                    .build()
                    .map_err(err)?,
                ),
                FunctionNetDoc::Named { fixture, .. } => {
                    FunctionNetEntry::Real(FunctionNetDescriptor::Named { name: fixture.clone() }.build().map_err(err)?)
                }
            };
            self.function_nets.insert(f.name().to_string(), entry);
        }
        for m in &doc.measures {
            self.claim("measure", &m.name)?;
            let err = |e: Error| invalid("measure", &m.name, e);
            let measure = match (&m.measure, &m.universe) {
                (MeasureKindDoc::Zero, _) => VectorMeasure::Zero,
                (MeasureKindDoc::Length { scale }, UniverseDoc::Interval { .. }) => {
                    let scale = match scale {
                        Some(v) => json_element(&m.module, v).map_err(err)?,
                        None => json_element(&m.module, &serde_json::Value::from(1)).map_err(err)?,
                    };
                    VectorMeasure::Length {
                        scale,
                        perturbation: None,
                    }
                }
                (MeasureKindDoc::Table { values }, UniverseDoc::Finite { atoms }) => {
                    if values.len() != atoms.len() {
                        return Err(err(Error::Measure(format!(
                            "{} values for {} atoms",
                            values.len(),
                            atoms.len()
                        ))));
                    }
                    VectorMeasure::Table(
                        values
                            .iter()
                            .map(|v| json_element(&m.module, v))
                            .collect::<Result<_>>()
                            .map_err(err)?,
                    )
                }
                _ => return Err(err(Error::Measure("measure kind does not fit the universe".into()))),
            };
            let entry = MeasureEntry {
                universe: m.universe.clone(),
                module: m.module.clone(),
                measure,
            };
            entry.algebra(false).map_err(err)?;
            self.measures.insert(m.name.clone(), entry);
        }
        for i in &doc.integrands {
            self.claim("integrand", i.name())?;
            let err = |e: Error| invalid("integrand", i.name(), e);
            let integrand = match i {
                IntegrandDoc::Expression { expr, .. } => {
                    let e = Expr::parse(expr).map_err(err)?;
                    if let Some(v) = e.variables().into_iter().find(|v| v != "t") {
                        return Err(err(Error::Parse(format!("unexpected variable `{v}`"))));
                    }
                    Integrand::Expression(e)
                }
                IntegrandDoc::Table { values, .. } => {
                    Integrand::Table(values.iter().map(json_rational).collect::<Result<_>>().map_err(err)?)
                }
                IntegrandDoc::DyadicIndicator { .. } => Integrand::DyadicIndicator,
            };
            self.integrands.insert(i.name().to_string(), integrand);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIERPINSKI: &str = r#"{
        "version": 1,
        "spaces": [{"name": "S", "points": ["a", "b"], "opens": [[], ["a"], ["a", "b"]]}],
        "bases": [{"name": "B", "space": "S", "levels": {"e0": [2], "e1": [1, 2]}}],
        "nets": [{"name": "const-a", "space": "S", "cycle": ["a"]}]
    }"#;

    #[test]
    fn loads_sierpinski() {
        let ws = Workspace::from_json(SIERPINSKI).unwrap();
        assert_eq!(ws.spaces.len(), 1);
        assert_eq!(ws.bases.len(), 1);
        assert_eq!(ws.base_for_space("S").unwrap().0, "B");
        assert_eq!(ws.net("const-a").unwrap().0, LassoNet::constant(0));
    }

    #[test]
    fn dangling_index_names_the_level() {
        let text = SIERPINSKI.replace("[1, 2]", "[1, 7]");
        let e = Workspace::from_json(&text).unwrap_err().to_string();
        assert!(e.contains("base `B`") && e.contains("level `e1`") && e.contains("7"), "{e}");
    }

    #[test]
    fn duplicate_names_rejected() {
        let text = SIERPINSKI.replace("\"name\": \"const-a\"", "\"name\": \"B\"");
        let e = Workspace::from_json(&text).unwrap_err().to_string();
        assert!(e.contains("duplicate"), "{e}");
    }

    #[test]
    fn parse_errors_carry_position() {
        let e = Workspace::from_json("{\n \"version\": 1,\n \"spaces\": [}")
            .unwrap_err()
            .to_string();
        assert!(e.contains("line 3"), "{e}");
        let e = Workspace::from_json(r#"{"version": 2}"#).unwrap_err().to_string();
        assert!(e.contains("version"));
        assert!(Workspace::from_json(r#"{"version": 1, "extra": 0}"#).is_err());
    }

    #[test]
    fn load_is_all_or_nothing() {
        let mut ws = Workspace::from_json(SIERPINSKI).unwrap();
        let bad = parse_document(
            r#"{"version": 1, "spaces": [{"name": "T", "points": ["x"], "opens": [[], ["x"]]}],
                "nets": [{"name": "n", "space": "missing", "cycle": ["x"]}]}"#,
            "second",
        )
        .unwrap();
        assert!(ws.add_document(&bad).is_err());
        assert!(!ws.spaces.contains_key("T"));
    }

    #[test]
    fn validation_reports() {
        let doc = parse_document(
            r#"{"version": 1,
                "spaces": [{"name": "X", "points": ["a", "b"], "opens": [[], ["a"], ["b"]]}],
                "bases": [{"name": "B", "space": "X", "levels": {"e0": [1]}}]}"#,
            "t",
        )
        .unwrap();
        let reports = validate_document(&doc);
        assert!(!reports["space X"].is_valid());
        assert!(!reports["base B"].is_valid());
        assert!(Workspace::from_json(&serde_json::to_string(&doc).unwrap()).is_err());
    }

    #[test]
    fn subbase_products_measures() {
        let ws = Workspace::from_json(
            r#"{"version": 1,
                "spaces": [{"name": "S", "points": ["a", "b"], "subbase": [["a"]]}],
                "bases": [{"name": "B", "space": "S", "auto": "full"}],
                "products": [{"name": "P", "indices": ["y0", "y1"], "factors": ["B"]}],
                "function_nets": [
                    {"kind": "table", "name": "f", "product": "P", "cycle": [["a", "b"], ["b", "b"]]},
                    {"kind": "named", "name": "pow", "fixture": "power"}
                ],
                "measures": [
                    {"name": "m5", "universe": {"kind": "finite", "atoms": ["A", "B", "C"]}, "module": "modp:5",
                     "measure": {"kind": "table", "values": [1, 2, 3]}},
                    {"name": "leb", "universe": {"kind": "interval", "lo": "0", "hi": "1"}, "module": "real:1",
                     "measure": {"kind": "length"}}
                ],
                "integrands": [{"kind": "table", "name": "f5", "values": [2, 0, 4]},
                               {"kind": "expression", "name": "id", "expr": "t"}]}"#,
        )
        .unwrap();
        assert_eq!(ws.spaces["S"].opens().len(), 3);
        assert_eq!(ws.products["P"].point_count(), 4);
        match &ws.function_nets["f"] {
            FunctionNetEntry::Table(t) => assert_eq!(t.net.cycle(), &[1, 3]),
            _ => panic!(),
        }
        assert!(matches!(ws.measures["m5"].measure, VectorMeasure::Table(_)));
        assert!(matches!(ws.integrands["id"], Integrand::Expression(_)));
        let bad = r#"{"version": 1, "integrands": [{"kind": "expression", "name": "g", "expr": "x"}]}"#;
        assert!(Workspace::from_json(bad).is_err());
    }
}
