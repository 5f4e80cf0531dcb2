//! Versioned JSON documents for every structure the engine exchanges.
//!
//! Basis vectors are referred to by label and scalars use the coefficient
//! ring's own text form (`"num/den"`, `"k mod p"`, coefficient lists). Keys
//! are sorted and zero entries omitted, so serialization is canonical and
//! byte-deterministic.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::algebra::{AInfAlgebra, AlgMorphism};
use crate::coeff::{Field, Poly, RatFunc, Ring, RingDescriptor};
use crate::formality::{Flavor, FormalityCertificate, ObstructionReport, Verdict};
use crate::graded::{GradedMap, GradedSpace, MultiOp};
use crate::hbar::PolyComplex;
use crate::hochschild::HochschildCochain;
use crate::linalg::{Matrix, Vector};
use crate::module::{AInfModule, ModMorphism, Pair};
use crate::rees::Filtration;
use crate::transfer::Contraction;

pub const FORMAT_VERSION: &str = "1.0.0";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DocumentError {
    #[error("malformed document at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unsupported format version {found:?} (this build reads {FORMAT_VERSION})")]
    Version { found: String },
    #[error("document has {found} coefficients, expected {expected}")]
    Ring { expected: String, found: String },
    #[error("expected a {expected} payload, found {found}")]
    Kind { expected: &'static str, found: &'static str },
    #[error("{path}: {detail}")]
    Invalid { path: String, detail: String },
}

fn invalid(path: impl Into<String>, detail: impl ToString) -> DocumentError {
    DocumentError::Invalid { path: path.into(), detail: detail.to_string() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub format_version: String,
    /// Coefficient ring descriptor, e.g. `rationals` or `poly(h, rationals)`.
    pub ring: String,
    pub payload: Payload,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Payload {
    Algebra(AlgebraDoc),
    Module(ModuleDoc),
    Morphism(MorphismDoc),
    Pair(PairDoc),
    Contraction(ContractionDoc),
    PolyComplex(PolyComplexDoc),
    Filtration(FiltrationDoc),
    Certificate(CertificateDoc),
    Report(ReportDoc),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Algebra(_) => "algebra",
            Payload::Module(_) => "module",
            Payload::Morphism(_) => "morphism",
            Payload::Pair(_) => "pair",
            Payload::Contraction(_) => "contraction",
            Payload::PolyComplex(_) => "poly_complex",
            Payload::Filtration(_) => "filtration",
            Payload::Certificate(_) => "certificate",
            Payload::Report(_) => "report",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisDoc {
    pub label: String,
    pub degree: i32,
}

/// Sparse vector: basis label to coefficient.
pub type VectorDoc = BTreeMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDoc {
    pub inputs: Vec<String>,
    pub output: VectorDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpDoc {
    pub arity: usize,
    pub degree: i32,
    pub entries: Vec<EntryDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub degree: i32,
    /// Images of the source basis vectors; zero columns are omitted.
    pub columns: BTreeMap<String, VectorDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDoc {
    pub basis: Vec<BasisDoc>,
    pub ops: Vec<OpDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleDoc {
    pub algebra: AlgebraDoc,
    pub basis: Vec<BasisDoc>,
    pub ops: Vec<OpDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgMorphismDoc {
    pub source: AlgebraDoc,
    pub target: AlgebraDoc,
    pub components: Vec<OpDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModMorphismDoc {
    pub source: ModuleDoc,
    pub target: ModuleDoc,
    pub components: Vec<OpDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MorphismDoc {
    Algebra(AlgMorphismDoc),
    Module(ModMorphismDoc),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairDoc {
    pub module: ModuleDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractionDoc {
    pub big: Vec<BasisDoc>,
    pub small: Vec<BasisDoc>,
    pub differential: MapDoc,
    pub incl: MapDoc,
    pub proj: MapDoc,
    pub htpy: MapDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyComplexDoc {
    pub ranks: BTreeMap<i32, usize>,
    /// `d^i` as rows of coefficient lists.
    pub diffs: BTreeMap<i32, Vec<Vec<Value>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiltrationDoc {
    pub basis: Vec<BasisDoc>,
    /// Spanning vectors of `F^1, F^2, …`.
    pub levels: Vec<Vec<VectorDoc>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CochainDoc {
    pub p: usize,
    pub q: i32,
    pub body: OpDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageDoc {
    pub stage: usize,
    pub flavor: Flavor,
    pub cocycle: CochainDoc,
    pub vanished: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primitive: Option<CochainDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum VerdictDoc {
    Formal { witness: ModMorphismDoc },
    NotAnFormal { stage: usize, report: StageDoc },
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub module: ModuleDoc,
    pub stages: Vec<StageDoc>,
    pub top: usize,
    pub verdict: VerdictDoc,
}

/// Outcome of a command: a pass flag and command-specific details.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDoc {
    pub command: String,
    pub pass: bool,
    pub details: Value,
}

// ---------------------------------------------------------------------------
// Text form

impl Document {
    pub fn new<R: Ring>(payload: Payload) -> Self {
        Document { format_version: FORMAT_VERSION.into(), ring: R::descriptor().to_string(), payload }
    }

    /// A report document; reports carry no coefficients.
    /// A command report about inputs over `ring`.
    pub fn report(ring: &RingDescriptor, command: &str, pass: bool, details: Value) -> Self {
        Document {
            format_version: FORMAT_VERSION.into(),
            ring: ring.to_string(),
            payload: Payload::Report(ReportDoc { command: command.into(), pass, details }),
        }
    }

    pub fn ring_descriptor(&self) -> Result<RingDescriptor, DocumentError> {
        RingDescriptor::parse(&self.ring).map_err(|e| invalid("ring", e))
    }

    pub fn encode<T: Codec>(value: &T) -> Self {
        Self::new::<T::Scalar>(value.to_payload())
    }

    /// Decodes the payload as `T`, checking the coefficient ring.
    pub fn decode<T: Codec>(&self) -> Result<T, DocumentError> {
        let expected = T::Scalar::descriptor();
        if self.ring_descriptor()? != expected {
            return Err(DocumentError::Ring { expected: expected.to_string(), found: self.ring.clone() });
        }
        T::from_payload(&self.payload)
    }
}

fn check_version(v: &str) -> Result<(), DocumentError> {
    let parts: Vec<u64> = v.split('.').map(|p| p.parse().ok()).collect::<Option<_>>().unwrap_or_default();
    let current: Vec<u64> = FORMAT_VERSION.split('.').map(|p| p.parse().unwrap()).collect();
    // same major, not newer in minor
    if parts.len() != 3 || parts[0] != current[0] || parts[1] > current[1] {
        return Err(DocumentError::Version { found: v.to_string() });
    }
    Ok(())
}

/// Reads a document and brings it to canonical form by decoding and
/// re-encoding the payload over its declared ring.
pub fn parse(text: &str) -> Result<Document, DocumentError> {
    let mut doc: Document = serde_json::from_str(text).map_err(|e| DocumentError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    check_version(&doc.format_version)?;
    let desc = doc.ring_descriptor()?;
    doc.payload = canonical_payload(&desc, &doc.payload)?;
    doc.ring = desc.to_string();
    Ok(doc)
}

/// Pretty-printed JSON with sorted keys and a trailing newline.
pub fn serialize(doc: &Document) -> String {
    let value = serde_json::to_value(doc).expect("documents are plain data");
    let mut out = serde_json::to_string_pretty(&value).expect("values serialize");
    out.push('\n');
    out
}

// ---------------------------------------------------------------------------
// Codecs

/// Conversion between a structure and its payload.
pub trait Codec: Sized {
    type Scalar: Ring;
    fn to_payload(&self) -> Payload;
    fn from_payload(p: &Payload) -> Result<Self, DocumentError>;
}

fn wrong_kind<T>(expected: &'static str, p: &Payload) -> Result<T, DocumentError> {
    Err(DocumentError::Kind { expected, found: p.kind() })
}

fn encode_space(s: &GradedSpace) -> Vec<BasisDoc> {
    (0..s.dim()).map(|i| BasisDoc { label: s.label(i).to_string(), degree: s.degree(i) }).collect()
}

fn decode_space(b: &[BasisDoc], path: &str) -> Result<GradedSpace, DocumentError> {
    GradedSpace::new(b.iter().map(|x| (x.label.clone(), x.degree))).map_err(|e| invalid(path, e))
}

fn encode_vector<R: Ring>(v: &Vector<R>, space: &GradedSpace) -> VectorDoc {
    v.iter().map(|(i, c)| (space.label(i).to_string(), c.to_json())).collect()
}

fn decode_vector<R: Ring>(v: &VectorDoc, space: &GradedSpace, path: &str) -> Result<Vector<R>, DocumentError> {
    let mut out = Vector::zero();
    for (label, c) in v {
        let i = space.index_of(label).map_err(|e| invalid(path, e))?;
        let c = R::from_json(c).map_err(|e| invalid(format!("{path}.{label}"), e))?;
        out.add_term(i, &c);
    }
    Ok(out)
}

fn encode_op<R: Ring>(op: &MultiOp<R>, slots: &[&GradedSpace], target: &GradedSpace) -> OpDoc {
    let entries = op
        .entries()
        .map(|(t, v)| EntryDoc {
            inputs: t.iter().zip(slots).map(|(&i, s)| s.label(i).to_string()).collect(),
            output: encode_vector(v, target),
        })
        .collect();
    OpDoc { arity: op.arity(), degree: op.degree(), entries }
}

/// Builds the operation and checks the degree invariant on every entry.
fn decode_op<R: Ring>(d: &OpDoc, slots: &[&GradedSpace], target: &GradedSpace, path: &str) -> Result<MultiOp<R>, DocumentError> {
    if slots.len() != d.arity {
        return Err(invalid(path, format!("arity {} does not match {} input slots", d.arity, slots.len())));
    }
    let mut op = MultiOp::new(d.arity, d.degree);
    for (n, e) in d.entries.iter().enumerate() {
        let at = format!("{path}.entries[{n}]");
        if e.inputs.len() != d.arity {
            return Err(invalid(at, format!("{} inputs for arity {}", e.inputs.len(), d.arity)));
        }
        let tuple = e
            .inputs
            .iter()
            .zip(slots)
            .map(|(l, s)| s.index_of(l))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|err| invalid(&at, err))?;
        if op.get(&tuple).is_some() {
            return Err(invalid(at, format!("duplicate entry ({})", e.inputs.join(", "))));
        }
        op.set(tuple, decode_vector(&e.output, target, &at)?);
    }
    op.validate(slots, target).map_err(|e| invalid(path, e))?;
    Ok(op)
}

fn encode_map<R: Ring>(f: &GradedMap<R>) -> MapDoc {
    let columns = f
        .columns()
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(j, v)| (f.source.label(j).to_string(), encode_vector(v, &f.target)))
        .collect();
    MapDoc { degree: f.degree, columns }
}

fn decode_map<R: Ring>(d: &MapDoc, source: &GradedSpace, target: &GradedSpace, path: &str) -> Result<GradedMap<R>, DocumentError> {
    let mut cols = vec![Vector::zero(); source.dim()];
    for (label, v) in &d.columns {
        let j = source.index_of(label).map_err(|e| invalid(path, e))?;
        cols[j] = decode_vector(v, target, &format!("{path}.columns.{label}"))?;
    }
    GradedMap::from_columns(source, target, d.degree, cols).map_err(|e| invalid(path, e))
}

fn op_path(path: &str, field: &str, d: &OpDoc) -> String {
    format!("{path}.{field}[arity {}]", d.arity)
}

fn encode_algebra<R: Ring>(a: &AInfAlgebra<R>) -> AlgebraDoc {
    let s = &a.space;
    AlgebraDoc {
        basis: encode_space(s),
        ops: a.ops().map(|(k, op)| encode_op(op, &vec![s; k], s)).collect(),
        truncation: a.truncation(),
        unit: a.unit().map(|i| s.label(i).to_string()),
    }
}

fn decode_algebra<R: Ring>(d: &AlgebraDoc, path: &str) -> Result<AInfAlgebra<R>, DocumentError> {
    let s = decode_space(&d.basis, &format!("{path}.basis"))?;
    let mut a = match d.truncation {
        Some(n) => AInfAlgebra::truncated(s.clone(), n),
        None => AInfAlgebra::new(s.clone()),
    };
    for o in &d.ops {
        let at = op_path(path, "ops", o);
        if a.op(o.arity).is_some() {
            return Err(invalid(at, "operation given twice"));
        }
        let op = decode_op(o, &vec![&s; o.arity], &s, &at)?;
        a.set_op(op).map_err(|e| invalid(&at, e))?;
    }
    if let Some(u) = &d.unit {
        a.set_unit(u).map_err(|e| invalid(format!("{path}.unit"), e))?;
    }
    Ok(a)
}

fn encode_module<R: Ring>(m: &AInfModule<R>) -> ModuleDoc {
    ModuleDoc {
        algebra: encode_algebra(&m.algebra),
        basis: encode_space(&m.space),
        ops: m.ops().map(|(k, op)| encode_op(op, &m.slots(k), &m.space)).collect(),
        truncation: m.truncation(),
    }
}

fn decode_module<R: Ring>(d: &ModuleDoc, path: &str) -> Result<AInfModule<R>, DocumentError> {
    let a = decode_algebra(&d.algebra, &format!("{path}.algebra"))?;
    let s = decode_space(&d.basis, &format!("{path}.basis"))?;
    let mut m = match d.truncation {
        Some(n) => AInfModule::truncated(a, s.clone(), n),
        None => AInfModule::new(a, s.clone()),
    };
    for o in &d.ops {
        let at = op_path(path, "ops", o);
        if m.op(o.arity).is_some() {
            return Err(invalid(at, "operation given twice"));
        }
        let op = decode_op(o, &m.slots(o.arity), &s, &at)?;
        m.set_op(op).map_err(|e| invalid(&at, e))?;
    }
    Ok(m)
}

fn encode_alg_morphism<R: Ring>(f: &AlgMorphism<R>) -> AlgMorphismDoc {
    let (s, t) = (&f.source.space, &f.target.space);
    AlgMorphismDoc {
        source: encode_algebra(&f.source),
        target: encode_algebra(&f.target),
        components: f.comps().map(|(k, op)| encode_op(op, &vec![s; k], t)).collect(),
        truncation: f.truncation(),
    }
}

fn decode_alg_morphism<R: Ring>(d: &AlgMorphismDoc, path: &str) -> Result<AlgMorphism<R>, DocumentError> {
    let source = decode_algebra(&d.source, &format!("{path}.source"))?;
    let target = decode_algebra(&d.target, &format!("{path}.target"))?;
    let mut f = AlgMorphism::new(source.clone(), target.clone(), d.truncation);
    for o in &d.components {
        let at = op_path(path, "components", o);
        if f.comp(o.arity).is_some() {
            return Err(invalid(at, "component given twice"));
        }
        let op = decode_op(o, &vec![&source.space; o.arity], &target.space, &at)?;
        f.set_comp(op).map_err(|e| invalid(&at, e))?;
    }
    Ok(f)
}

fn encode_mod_morphism<R: Ring>(f: &ModMorphism<R>) -> ModMorphismDoc {
    ModMorphismDoc {
        source: encode_module(&f.source),
        target: encode_module(&f.target),
        components: f.comps().map(|(k, op)| encode_op(op, &f.source.slots(k), &f.target.space)).collect(),
        truncation: f.truncation(),
    }
}

fn decode_mod_morphism<R: Ring>(d: &ModMorphismDoc, path: &str) -> Result<ModMorphism<R>, DocumentError> {
    let source = decode_module(&d.source, &format!("{path}.source"))?;
    let target = decode_module(&d.target, &format!("{path}.target"))?;
    let mut f = ModMorphism::new(source.clone(), target.clone(), d.truncation).map_err(|e| invalid(path, e))?;
    for o in &d.components {
        let at = op_path(path, "components", o);
        if f.comp(o.arity).is_some() {
            return Err(invalid(at, "component given twice"));
        }
        let op = decode_op(o, &source.slots(o.arity), &target.space, &at)?;
        f.set_comp(op).map_err(|e| invalid(&at, e))?;
    }
    Ok(f)
}

pub fn encode_cochain<R: Ring>(c: &HochschildCochain<R>, m: &AInfModule<R>) -> CochainDoc {
    CochainDoc { p: c.p, q: c.q, body: encode_op(&c.body, &m.slots(c.p + 1), &m.space) }
}

fn decode_cochain<R: Ring>(d: &CochainDoc, m: &AInfModule<R>, path: &str) -> Result<HochschildCochain<R>, DocumentError> {
    if d.body.arity != d.p + 1 || d.body.degree != d.q {
        return Err(invalid(path, format!("body of arity {} and degree {} in C^{{{},{}}}", d.body.arity, d.body.degree, d.p, d.q)));
    }
    let body = decode_op(&d.body, &m.slots(d.p + 1), &m.space, &format!("{path}.body"))?;
    Ok(HochschildCochain { p: d.p, q: d.q, body })
}

fn encode_stage<R: Ring>(r: &ObstructionReport<R>, m: &AInfModule<R>) -> StageDoc {
    StageDoc {
        stage: r.stage,
        flavor: r.flavor,
        cocycle: encode_cochain(&r.cocycle, m),
        vanished: r.vanished,
        primitive: r.primitive.as_ref().map(|x| encode_cochain(x, m)),
    }
}

fn decode_stage<R: Ring>(d: &StageDoc, m: &AInfModule<R>, path: &str) -> Result<ObstructionReport<R>, DocumentError> {
    Ok(ObstructionReport {
        stage: d.stage,
        flavor: d.flavor,
        cocycle: decode_cochain(&d.cocycle, m, &format!("{path}.cocycle"))?,
        vanished: d.vanished,
        primitive: d.primitive.as_ref().map(|x| decode_cochain(x, m, &format!("{path}.primitive"))).transpose()?,
    })
}

impl<R: Ring> Codec for AInfAlgebra<R> {
    type Scalar = R;
    fn to_payload(&self) -> Payload {
        Payload::Algebra(encode_algebra(self))
    }
    fn from_payload(p: &Payload) -> Result<Self, DocumentError> {
        match p {
            Payload::Algebra(d) => decode_algebra(d, "algebra"),
            _ => wrong_kind("algebra", p),
        }
    }
}

impl<R: Ring> Codec for AInfModule<R> {
    type Scalar = R;
    fn to_payload(&self) -> Payload {
        Payload::Module(encode_module(self))
    }
    fn from_payload(p: &Payload) -> Result<Self, DocumentError> {
        match p {
            Payload::Module(d) => decode_module(d, "module"),
            _ => wrong_kind("module", p),
        }
    }
}

impl<R: Ring> Codec for AlgMorphism<R> {
    type Scalar = R;
    fn to_payload(&self) -> Payload {
        Payload::Morphism(MorphismDoc::Algebra(encode_alg_morphism(self)))
    }
    fn from_payload(p: &Payload) -> Result<Self, DocumentError> {
        match p {
            Payload::Morphism(MorphismDoc::Algebra(d)) => decode_alg_morphism(d, "morphism"),
            _ => wrong_kind("algebra morphism", p),
        }
    }
}

impl<R: Ring> Codec for ModMorphism<R> {
    type Scalar = R;
    fn to_payload(&self) -> Payload {
        Payload::Morphism(MorphismDoc::Module(encode_mod_morphism(self)))
    }
    fn from_payload(p: &Payload) -> Result<Self, DocumentError> {
        match p {
            Payload::Morphism(MorphismDoc::Module(d)) => decode_mod_morphism(d, "morphism"),
            _ => wrong_kind("module morphism", p),
        }
    }
}

impl<R: Ring> Codec for Pair<R> {
    type Scalar = R;
    fn to_payload(&self) -> Payload {
        Payload::Pair(PairDoc { module: encode_module(&self.module) })
    }
    fn from_payload(p: &Payload) -> Result<Self, DocumentError> {
        match p {
            Payload::Pair(d) => Ok(Pair::new(decode_module(&d.module, "pair.module")?)),
            _ => wrong_kind("pair", p),
        }
    }
}

impl<F: Field> Codec for Contraction<F> {
    type Scalar = F;
    fn to_payload(&self) -> Payload {
        Payload::Contraction(ContractionDoc {
            big: encode_space(&self.big),
            small: encode_space(&self.small),
            differential: encode_map(&self.differential),
            incl: encode_map(&self.incl),
            proj: encode_map(&self.proj),
            htpy: encode_map(&self.htpy),
        })
    }
    fn from_payload(p: &Payload) -> Result<Self, DocumentError> {
        let Payload::Contraction(d) = p else { return wrong_kind("contraction", p) };
        let big = decode_space(&d.big, "contraction.big")?;
        let small = decode_space(&d.small, "contraction.small")?;
        let c = Contraction::from_parts(
            decode_map(&d.differential, &big, &big, "contraction.differential")?,
            decode_map(&d.incl, &small, &big, "contraction.incl")?,
            decode_map(&d.proj, &big, &small, "contraction.proj")?,
            decode_map(&d.htpy, &big, &big, "contraction.htpy")?,
        )
        .map_err(|e| invalid("contraction", e))?;
        Ok(c)
    }
}

impl<F: Field> Codec for PolyComplex<F> {
    type Scalar = Poly<F>;
    fn to_payload(&self) -> Payload {
        let diffs = self
            .degrees()
            .into_iter()
            .map(|i| (i, self.diff(i)))
            .filter(|(_, d)| !d.is_zero())
            .map(|(i, d)| (i, d.to_rows().iter().map(|r| r.iter().map(|c| c.to_json()).collect()).collect()))
            .collect();
        Payload::PolyComplex(PolyComplexDoc { ranks: self.ranks().clone(), diffs })
    }
    fn from_payload(p: &Payload) -> Result<Self, DocumentError> {
        let Payload::PolyComplex(d) = p else { return wrong_kind("poly_complex", p) };
        let mut diffs = BTreeMap::new();
        for (&i, rows) in &d.diffs {
            let at = format!("poly_complex.diffs.{i}");
            let rows = rows
                .iter()
                .map(|r| r.iter().map(Poly::<F>::from_json).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| invalid(&at, e))?;
            if rows.iter().any(|r| r.len() != rows[0].len()) {
                return Err(invalid(at, "ragged rows"));
            }
            let (n, m) = (d.ranks.get(&(i + 1)).copied().unwrap_or(0), d.ranks.get(&i).copied().unwrap_or(0));
            let cols = rows.first().map_or(m, |r| r.len());
            if rows.len() != n || cols != m {
                return Err(invalid(at, format!("expected a {n} × {m} matrix, found {} × {cols}", rows.len())));
            }
            let mat = if n == 0 { Matrix::zeros(0, m) } else { Matrix::from_rows(rows) };
            diffs.insert(i, mat);
        }
        PolyComplex::new(d.ranks.clone(), diffs).map_err(|e| invalid("poly_complex", e))
    }
}

impl<F: Field> Codec for Filtration<F> {
    type Scalar = F;
    fn to_payload(&self) -> Payload {
        Payload::Filtration(FiltrationDoc {
            basis: encode_space(&self.space),
            levels: self.levels.iter().map(|l| l.iter().map(|v| encode_vector(v, &self.space)).collect()).collect(),
        })
    }
    fn from_payload(p: &Payload) -> Result<Self, DocumentError> {
        let Payload::Filtration(d) = p else { return wrong_kind("filtration", p) };
        let space = decode_space(&d.basis, "filtration.basis")?;
        let levels = d
            .levels
            .iter()
            .enumerate()
            .map(|(i, l)| {
                l.iter()
                    .enumerate()
                    .map(|(j, v)| decode_vector(v, &space, &format!("filtration.levels[{i}][{j}]")))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Filtration::new(&space, levels).map_err(|e| invalid("filtration", e))
    }
}

impl<F: Field> Codec for FormalityCertificate<F> {
    type Scalar = F;
    fn to_payload(&self) -> Payload {
        let m = &self.module;
        let verdict = match &self.verdict {
            Verdict::Formal { witness } => VerdictDoc::Formal { witness: encode_mod_morphism(witness) },
            Verdict::NotAnFormal { stage, report } => VerdictDoc::NotAnFormal { stage: *stage, report: encode_stage(report, m) },
            Verdict::Inconclusive { reason } => VerdictDoc::Inconclusive { reason: reason.clone() },
        };
        Payload::Certificate(CertificateDoc {
            module: encode_module(m),
            stages: self.stages.iter().map(|r| encode_stage(r, m)).collect(),
            top: self.top,
            verdict,
        })
    }
    fn from_payload(p: &Payload) -> Result<Self, DocumentError> {
        let Payload::Certificate(d) = p else { return wrong_kind("certificate", p) };
        let module = decode_module(&d.module, "certificate.module")?;
        let stages = d
            .stages
            .iter()
            .enumerate()
            .map(|(i, s)| decode_stage(s, &module, &format!("certificate.stages[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let verdict = match &d.verdict {
            VerdictDoc::Formal { witness } => Verdict::Formal { witness: decode_mod_morphism(witness, "certificate.verdict.witness")? },
            VerdictDoc::NotAnFormal { stage, report } => {
                Verdict::NotAnFormal { stage: *stage, report: decode_stage(report, &module, "certificate.verdict.report")? }
            }
            VerdictDoc::Inconclusive { reason } => Verdict::Inconclusive { reason: reason.clone() },
        };
        Ok(FormalityCertificate { module, verdict, stages, top: d.top })
    }
}

// ---------------------------------------------------------------------------
// Runtime ring dispatch

/// Runs `$body` with `$F` bound to the coefficient field named by a
/// descriptor: the rationals or `F_p` for `p` in [`SUPPORTED_PRIMES`].
#[macro_export]
macro_rules! with_base_field {
    ($desc:expr, $F:ident => $body:expr, _ => $other:expr) => {
        match $desc {
            $crate::coeff::RingDescriptor::Rationals => { type $F = $crate::coeff::Q; $body }
            $crate::coeff::RingDescriptor::PrimeField(2) => { type $F = $crate::coeff::Fp<2>; $body }
            $crate::coeff::RingDescriptor::PrimeField(3) => { type $F = $crate::coeff::Fp<3>; $body }
            $crate::coeff::RingDescriptor::PrimeField(5) => { type $F = $crate::coeff::Fp<5>; $body }
            $crate::coeff::RingDescriptor::PrimeField(7) => { type $F = $crate::coeff::Fp<7>; $body }
            $crate::coeff::RingDescriptor::PrimeField(11) => { type $F = $crate::coeff::Fp<11>; $body }
            $crate::coeff::RingDescriptor::PrimeField(13) => { type $F = $crate::coeff::Fp<13>; $body }
            $crate::coeff::RingDescriptor::PrimeField(101) => { type $F = $crate::coeff::Fp<101>; $body }
            $crate::coeff::RingDescriptor::PrimeField(32003) => { type $F = $crate::coeff::Fp<32003>; $body }
            _ => $other,
        }
    };
}

pub const SUPPORTED_PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 101, 32003];
/// Truncation orders `N` accepted for `truncated_poly(h, N, base)`.
pub const MAX_JET_ORDER: usize = 8;

fn canon<T: Codec>(p: &Payload) -> Result<Payload, DocumentError> {
    Ok(T::from_payload(p)?.to_payload())
}

fn canon_ring<R: Ring>(p: &Payload) -> Result<Payload, DocumentError> {
    match p {
        Payload::Algebra(_) => canon::<AInfAlgebra<R>>(p),
        Payload::Module(_) => canon::<AInfModule<R>>(p),
        Payload::Morphism(MorphismDoc::Algebra(_)) => canon::<AlgMorphism<R>>(p),
        Payload::Morphism(MorphismDoc::Module(_)) => canon::<ModMorphism<R>>(p),
        Payload::Pair(_) => canon::<Pair<R>>(p),
        Payload::Report(_) => Ok(p.clone()),
        _ => Err(DocumentError::Ring { expected: format!("a field for a {} payload", p.kind()), found: R::descriptor().to_string() }),
    }
}

fn canon_field<F: Field>(p: &Payload) -> Result<Payload, DocumentError> {
    match p {
        Payload::Contraction(_) => canon::<Contraction<F>>(p),
        Payload::Filtration(_) => canon::<Filtration<F>>(p),
        Payload::Certificate(_) => canon::<FormalityCertificate<F>>(p),
        Payload::PolyComplex(_) => Err(DocumentError::Ring { expected: "poly(h, base)".into(), found: F::descriptor().to_string() }),
        _ => canon_ring::<F>(p),
    }
}

fn canon_poly<F: Field>(p: &Payload) -> Result<Payload, DocumentError> {
    match p {
        Payload::PolyComplex(_) => canon::<PolyComplex<F>>(p),
        _ => canon_ring::<Poly<F>>(p),
    }
}

/// Jets share the JSON shape of polynomials, so they are canonicalized as
/// polynomials reduced mod `h^order`.
fn canon_jets<F: Field>(p: &Payload, order: usize, desc: &RingDescriptor) -> Result<Payload, DocumentError> {
    let cut = |c: &Poly<F>| Poly::from_coeffs(c.coeffs().iter().take(order).cloned().collect());
    Ok(match p {
        Payload::Algebra(_) => AInfAlgebra::<Poly<F>>::from_payload(p)?.map_scalars(cut).to_payload(),
        Payload::Module(_) => AInfModule::<Poly<F>>::from_payload(p)?.map_scalars(cut).to_payload(),
        Payload::Morphism(MorphismDoc::Algebra(_)) => AlgMorphism::<Poly<F>>::from_payload(p)?.map_scalars(cut).to_payload(),
        Payload::Morphism(MorphismDoc::Module(_)) => ModMorphism::<Poly<F>>::from_payload(p)?.map_scalars(cut).to_payload(),
        Payload::Pair(_) => Pair::new(Pair::<Poly<F>>::from_payload(p)?.module.map_scalars(cut)).to_payload(),
        _ => return Err(DocumentError::Ring { expected: format!("a field for a {} payload", p.kind()), found: desc.to_string() }),
    })
}

fn unsupported(desc: &RingDescriptor) -> Result<Payload, DocumentError> {
    Err(DocumentError::Ring { expected: "a supported coefficient ring".into(), found: desc.to_string() })
}

/// Decodes and re-encodes a payload over the ring named by `desc`.
pub fn canonical_payload(desc: &RingDescriptor, p: &Payload) -> Result<Payload, DocumentError> {
    if let Payload::Report(_) = p {
        return Ok(p.clone());
    }
    match desc {
        RingDescriptor::Poly { base, .. } => with_base_field!(base.as_ref(), F => canon_poly::<F>(p), _ => unsupported(desc)),
        RingDescriptor::TruncatedPoly { order, base, .. } if (1..=MAX_JET_ORDER).contains(order) => {
            with_base_field!(base.as_ref(), F => canon_jets::<F>(p, *order, desc), _ => unsupported(desc))
        }
        RingDescriptor::FractionField(inner) => match inner.as_ref() {
            RingDescriptor::Poly { base, .. } => {
                with_base_field!(base.as_ref(), F => canon_field::<RatFunc<F>>(p), _ => unsupported(desc))
            }
            _ => unsupported(desc),
        },
        _ => with_base_field!(desc, F => canon_field::<F>(p), _ => unsupported(desc)),
    }
}
