//! Command implementations behind the `ainf` binary.
//!
//! Every command reads one document (a file, or a built-in fixture by name)
//! and produces one document: the computed structure, or a report. Exit codes
//! are 0 for success, 1 when the mathematics says no and 2 for broken input.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ainf::algebra::{is_quasi_iso, AInfAlgebra, AlgMorphism, CheckResult, RelationFailure};
use ainf::bar::{bar_check, module_bar_check};
use ainf::coeff::{Field, Poly, Ring, RingDescriptor};
use ainf::document::{encode_cochain, parse, serialize, Document, MorphismDoc, Payload};
use ainf::fixtures;
use ainf::formality::{
    an_formality_check, associated_module, normal_cone_deform, prove_module_formality, prove_module_formality_hbar,
    verify_certificate, AnCheck, FormalityCertificate, HbarVerdict, Verdict,
};
use ainf::graded::GradedSpace;
use ainf::hbar::{freeness_test, poly_cohomology, smith_normal_form, Freeness, PolyComplex};
use ainf::hochschild::{poly_strand, HochschildComplex};
use ainf::linalg::Vector;
use ainf::module::{check_pair, is_quasi_iso_module, AInfModule, ModMorphism, Pair};
use ainf::rees::{rees_deformation, Filtration};
use ainf::transfer::{cohomology, contraction_from_complex, transfer_algebra, transfer_pair, PivotOrder};
use ainf::with_base_field;
use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(name = "ainf", version, about = "Exact computations with A-infinity algebras and modules")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Stasheff relations of an algebra.
    CheckAlgebra,
    /// Module relations.
    CheckModule,
    /// Relations of an algebra or module morphism, and whether it is a quasi-isomorphism.
    CheckMorphism,
    /// d² = 0 on the bar construction, compared with the direct relation check.
    BarCheck,
    /// Minimal model by homotopy transfer (algebra, or module with its algebra).
    Transfer,
    /// Graded dimensions of the cohomology, with the induced product for algebras.
    Cohomology,
    /// Hochschild cohomology dimensions HH^{p,q}.
    Hochschild,
    /// Obstructions to A_n-formality up to --up-to.
    Obstruct,
    /// Stagewise formality proof; emits a certificate.
    ProveFormality,
    /// Re-checks a certificate without re-proving.
    VerifyCertificate,
    /// Deformation to the normal cone, a module over A[h].
    NormalCone,
    /// Specializes a structure over F[h] at h = --at.
    Fibre,
    /// Rees deformation of an algebra along --filtration.
    Rees,
    /// Smith normal forms of the differentials of a complex over F[h].
    Snf,
    /// Torsion-freeness of the cohomology of a complex over F[h].
    Freeness,
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Options {
    /// A document path or a built-in fixture name.
    #[arg(global = true)]
    pub source: Option<String>,
    /// Same as the positional source.
    #[arg(long, global = true)]
    pub input: Option<String>,
    /// Write the resulting document here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Arity, weight or stage bound, depending on the command.
    #[arg(long, global = true)]
    pub up_to: Option<usize>,
    /// Coefficient ring for fixtures, e.g. `rationals`, `prime_field(7)`, `poly(h, rationals)`.
    #[arg(long, global = true)]
    pub ring: Option<String>,
    /// Seed for randomized fixtures.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Emit only the report, not the computed structure.
    #[arg(long, global = true)]
    pub verify_only: bool,
    /// Evaluation point for `fibre`.
    #[arg(long, global = true)]
    pub at: Option<String>,
    /// Filtration document for `rees`.
    #[arg(long, global = true)]
    pub filtration: Option<String>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
}

fn input_err<T>(msg: impl ToString) -> Result<T, CliError> {
    Err(CliError::Input(msg.to_string()))
}

impl From<ainf::document::DocumentError> for CliError {
    fn from(e: ainf::document::DocumentError) -> Self {
        CliError::Input(e.to_string())
    }
}

macro_rules! engine {
    ($e:expr) => {
        $e.map_err(|e| CliError::Input(e.to_string()))?
    };
}

/// Result of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub document: Option<Document>,
    pub message: Option<String>,
}

impl Outcome {
    fn doc(pass: bool, document: Document) -> Self {
        Outcome { code: if pass { 0 } else { 1 }, document: Some(document), message: None }
    }

    fn report(ring: &RingDescriptor, command: Command, pass: bool, details: Value) -> Self {
        Self::doc(pass, Document::report(ring, command_name(command), pass, details))
    }

    /// Serialized document text, if any.
    pub fn text(&self) -> Option<String> {
        self.document.as_ref().map(serialize)
    }
}

/// Every command, in help order.
pub const ALL_COMMANDS: [Command; 15] = [
    Command::CheckAlgebra,
    Command::CheckModule,
    Command::CheckMorphism,
    Command::BarCheck,
    Command::Transfer,
    Command::Cohomology,
    Command::Hochschild,
    Command::Obstruct,
    Command::ProveFormality,
    Command::VerifyCertificate,
    Command::NormalCone,
    Command::Fibre,
    Command::Rees,
    Command::Snf,
    Command::Freeness,
];

/// Inverse of [`command_name`].
pub fn command_from_name(name: &str) -> Option<Command> {
    ALL_COMMANDS.into_iter().find(|&c| command_name(c) == name)
}

pub fn command_name(c: Command) -> &'static str {
    match c {
        Command::CheckAlgebra => "check-algebra",
        Command::CheckModule => "check-module",
        Command::CheckMorphism => "check-morphism",
        Command::BarCheck => "bar-check",
        Command::Transfer => "transfer",
        Command::Cohomology => "cohomology",
        Command::Hochschild => "hochschild",
        Command::Obstruct => "obstruct",
        Command::ProveFormality => "prove-formality",
        Command::VerifyCertificate => "verify-certificate",
        Command::NormalCone => "normal-cone",
        Command::Fibre => "fibre",
        Command::Rees => "rees",
        Command::Snf => "snf",
        Command::Freeness => "freeness",
    }
}

/// Runs a command; input problems become exit code 2.
pub fn run(cli: &Cli) -> Outcome {
    match load(&cli.opts).and_then(|doc| execute(cli.command, &doc, &cli.opts)) {
        Ok(out) => out,
        Err(CliError::Input(msg)) => Outcome { code: 2, document: None, message: Some(msg) },
    }
}

/// Runs a command on a document already in memory.
pub fn run_document(cmd: Command, doc: &Document, opts: &Options) -> Outcome {
    match execute(cmd, doc, opts) {
        Ok(out) => out,
        Err(CliError::Input(msg)) => Outcome { code: 2, document: None, message: Some(msg) },
    }
}

// ---------------------------------------------------------------------------
// Inputs

/// Built-in fixtures over a field.
pub const FIELD_FIXTURES: &[&str] = &[
    "fix-t2",
    "fix-d",
    "truncated-poly",
    "upper-triangular",
    "split-product",
    "heisenberg-module",
    "heisenberg-dg-module",
    "random-dga",
    "random-graded-module",
    "random-formal-module",
    "cubic-filtration",
];

/// Built-in fixtures over `F[h]`.
pub const POLY_FIXTURES: &[&str] = &["heisenberg-cone", "random-formal-family", "random-poly-complex", "cubic-rees"];

fn read_document(path: &str) -> Result<Document, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {path}: {e}")))?;
    Ok(parse(&text)?)
}

fn load(opts: &Options) -> Result<Document, CliError> {
    let source = match (&opts.input, &opts.source) {
        (Some(a), Some(b)) if a != b => return input_err("both --input and a positional source were given"),
        (Some(s), _) | (None, Some(s)) => s.as_str(),
        (None, None) => return input_err("no input: give a document path or a fixture name"),
    };
    let ring = opts.ring.as_deref().map(RingDescriptor::parse).transpose().map_err(|e| CliError::Input(e.to_string()))?;
    if Path::new(source).exists() {
        let doc = read_document(source)?;
        if let Some(r) = &ring {
            if doc.ring_descriptor()? != *r {
                return input_err(format!("--ring {r} does not match the document's ring {}", doc.ring));
            }
        }
        return Ok(doc);
    }
    let default = if POLY_FIXTURES.contains(&source) {
        RingDescriptor::Poly { var: "h".into(), base: Box::new(RingDescriptor::Rationals) }
    } else {
        RingDescriptor::Rationals
    };
    fixture(source, &ring.unwrap_or(default), opts.seed)
}

fn unsupported_ring<T>(desc: &RingDescriptor) -> Result<T, CliError> {
    input_err(format!("ring {desc} is not supported here (fields: rationals, prime_field(p) for p in {:?}; or poly(h, field))", ainf::document::SUPPORTED_PRIMES))
}

pub fn fixture(name: &str, ring: &RingDescriptor, seed: u64) -> Result<Document, CliError> {
    match ring {
        RingDescriptor::Poly { base, .. } => with_base_field!(base.as_ref(), F => poly_fixture::<F>(name, seed), _ => unsupported_ring(ring)),
        _ => with_base_field!(ring, F => field_fixture::<F>(name, seed), _ => unsupported_ring(ring)),
    }
}

fn cubic_filtration<F: Field>() -> (AInfAlgebra<F>, Filtration<F>) {
    let a = fixtures::truncated_polynomial::<F>(3, 0);
    let x2 = Vector::basis(a.space.index_of("x2").expect("fixture label"));
    let f = Filtration::new(&a.space, vec![vec![x2]]).expect("x2 spans an ideal");
    (a, f)
}

fn field_fixture<F: Field>(name: &str, seed: u64) -> Result<Document, CliError> {
    let mut r = fixtures::rng(seed);
    Ok(match name {
        "fix-t2" => Document::encode(&fixtures::fix_t2::<F>()),
        "fix-d" => Document::encode(&fixtures::fix_d::<F>()),
        "truncated-poly" => Document::encode(&fixtures::truncated_polynomial::<F>(3, 0)),
        "upper-triangular" => Document::encode(&fixtures::upper_triangular::<F>()),
        "split-product" => Document::encode(&fixtures::split_product::<F>()),
        "heisenberg-module" => Document::encode(&fixtures::heisenberg_module::<F>()),
        "heisenberg-dg-module" => Document::encode(&fixtures::heisenberg_dg_module::<F>()),
        "random-dga" => Document::encode(&fixtures::random_dga::<F>(&mut r)),
        "random-graded-module" => {
            let a = fixtures::random_graded_algebra::<F>(&mut r);
            Document::encode(&fixtures::random_graded_module(&mut r, &a))
        }
        "random-formal-module" => Document::encode(&fixtures::random_formal_module::<F>(&mut r).0),
        "cubic-filtration" => Document::encode(&cubic_filtration::<F>().1),
        _ if POLY_FIXTURES.contains(&name) => return input_err(format!("fixture {name} needs --ring poly(h, ...)")),
        _ => return input_err(format!("{name:?} is neither a file nor a fixture ({})", [FIELD_FIXTURES, POLY_FIXTURES].concat().join(", "))),
    })
}

fn poly_fixture<F: Field>(name: &str, seed: u64) -> Result<Document, CliError> {
    let mut r = fixtures::rng(seed);
    Ok(match name {
        "heisenberg-cone" => Document::encode(&engine!(normal_cone_deform(&fixtures::heisenberg_module::<F>()))),
        "random-formal-family" => Document::encode(&fixtures::random_formal_family::<F>(&mut r).0),
        "random-poly-complex" => Document::encode(&fixtures::random_poly_complex::<F>(&mut r).0),
        "cubic-rees" => {
            let (a, f) = cubic_filtration::<F>();
            Document::encode(&engine!(rees_deformation(&a, &f)).rees)
        }
        _ if FIELD_FIXTURES.contains(&name) => return input_err(format!("fixture {name} has field coefficients; drop --ring poly(...)")),
        _ => return input_err(format!("{name:?} is neither a file nor a fixture ({})", [FIELD_FIXTURES, POLY_FIXTURES].concat().join(", "))),
    })
}

// ---------------------------------------------------------------------------
// Dispatch

fn execute(cmd: Command, doc: &Document, opts: &Options) -> Result<Outcome, CliError> {
    let desc = doc.ring_descriptor()?;
    let out = match &desc {
        RingDescriptor::Poly { base, .. } => {
            with_base_field!(base.as_ref(), F => poly_command::<F>(cmd, doc, opts), _ => unsupported_ring(&desc))
        }
        _ => with_base_field!(&desc, F => field_command::<F>(cmd, doc, opts), _ => unsupported_ring(&desc)),
    }?;
    if opts.verify_only {
        if let Some(d) = &out.document {
            if !matches!(d.payload, Payload::Report(_)) {
                let details = json!({ "kind": d.payload.kind(), "ring": d.ring });
                return Ok(Outcome::report(&desc, cmd, out.code == 0, details));
            }
        }
    }
    Ok(out)
}

fn kind_err<T>(cmd: Command, doc: &Document) -> Result<T, CliError> {
    input_err(format!("{} does not accept a {} payload over {}", command_name(cmd), doc.payload.kind(), doc.ring))
}

/// Commands that make sense over any coefficient ring.
fn ring_command<R: Ring>(cmd: Command, doc: &Document, opts: &Options) -> Result<Outcome, CliError> {
    let desc = doc.ring_descriptor()?;
    match (cmd, &doc.payload) {
        (Command::CheckAlgebra, Payload::Algebra(_)) => {
            let a: AInfAlgebra<R> = doc.decode()?;
            let w = opts.up_to.unwrap_or_else(|| a.default_check_weight());
            let res = engine!(a.check_relations(w));
            Ok(check_report(&desc, cmd, w, &res, &vec![&a.space; w], &a.space))
        }
        (Command::CheckModule, Payload::Module(_)) => {
            let m: AInfModule<R> = doc.decode()?;
            let w = opts.up_to.unwrap_or_else(|| m.default_check_weight());
            let res = engine!(m.check_relations(w));
            Ok(check_report(&desc, cmd, w, &res, &m.slots(w), &m.space))
        }
        (Command::BarCheck, Payload::Algebra(_)) => {
            let a: AInfAlgebra<R> = doc.decode()?;
            let w = opts.up_to.unwrap_or_else(|| a.default_check_weight());
            let bar = bar_check(&a, w);
            let direct = engine!(a.check_relations(w)).is_ok();
            Ok(Outcome::report(&desc, cmd, bar, json!({ "weight": w, "bar": bar, "relations": direct, "agree": bar == direct })))
        }
        (Command::BarCheck, Payload::Module(_)) => {
            let m: AInfModule<R> = doc.decode()?;
            let w = opts.up_to.unwrap_or_else(|| m.default_check_weight());
            let bar = module_bar_check(&m, w);
            let direct = engine!(m.check_relations(w)).is_ok();
            Ok(Outcome::report(&desc, cmd, bar, json!({ "weight": w, "bar": bar, "relations": direct, "agree": bar == direct })))
        }
        _ => kind_err(cmd, doc),
    }
}

fn labels(tuple: &[usize], slots: &[&GradedSpace]) -> Vec<String> {
    tuple.iter().zip(slots).map(|(&i, s)| s.label(i).to_string()).collect()
}

fn vector_json<R: Ring>(v: &Vector<R>, space: &GradedSpace) -> Value {
    Value::Object(v.iter().map(|(i, c)| (space.label(i).to_string(), c.to_json())).collect())
}

fn failure_json<R: Ring>(f: &RelationFailure<R>, slots: &[&GradedSpace], target: &GradedSpace) -> Value {
    json!({
        "weight": f.weight,
        "inputs": labels(&f.tuple, slots),
        "residual": vector_json(&f.residual, target),
    })
}

fn check_report<R: Ring>(desc: &RingDescriptor, cmd: Command, w: usize, res: &CheckResult<R>, slots: &[&GradedSpace], target: &GradedSpace) -> Outcome {
    match res {
        Ok(()) => Outcome::report(desc, cmd, true, json!({ "weight": w })),
        Err(f) => Outcome::report(desc, cmd, false, json!({ "weight": w, "failure": failure_json(f, slots, target) })),
    }
}

fn morphism_weight(opts: &Options, natural: usize) -> usize {
    opts.up_to.unwrap_or(natural)
}

fn hochschild_ranges(m: &GradedSpace, a: &GradedSpace, n: &GradedSpace, p: usize) -> Option<(i32, i32)> {
    let lo = |s: &GradedSpace| s.degrees().iter().copied().min();
    let hi = |s: &GradedSpace| s.degrees().iter().copied().max();
    let (amin, amax) = if p == 0 { (0, 0) } else { (lo(a)?, hi(a)?) };
    let pi = p as i32;
    Some((lo(n)? - hi(m)? - pi * amax, hi(n)? - lo(m)? - pi * amin))
}

fn field_command<F: Field>(cmd: Command, doc: &Document, opts: &Options) -> Result<Outcome, CliError> {
    let desc = doc.ring_descriptor()?;
    match (cmd, &doc.payload) {
        (Command::CheckMorphism, Payload::Morphism(MorphismDoc::Algebra(_))) => {
            let f: AlgMorphism<F> = doc.decode()?;
            let w = morphism_weight(opts, f.source.default_check_weight().max(f.target.default_check_weight()));
            let res = engine!(f.check(w));
            let qi = is_quasi_iso(&f);
            let mut out = check_report(&desc, cmd, w, &res, &vec![&f.source.space; w], &f.target.space);
            annotate(&mut out, "quasi_iso", json!(qi));
            Ok(out)
        }
        (Command::CheckMorphism, Payload::Morphism(MorphismDoc::Module(_))) => {
            let f: ModMorphism<F> = doc.decode()?;
            let w = morphism_weight(opts, f.source.default_check_weight().max(f.target.default_check_weight()));
            let res = engine!(f.check(w));
            let qi = is_quasi_iso_module(&f);
            let mut out = check_report(&desc, cmd, w, &res, &f.source.slots(w), &f.target.space);
            annotate(&mut out, "quasi_iso", json!(qi));
            Ok(out)
        }
        (Command::Transfer, Payload::Algebra(_)) => {
            let a: AInfAlgebra<F> = doc.decode()?;
            let c = engine!(contraction_from_complex(&a.differential(), PivotOrder::Forward));
            let t = engine!(transfer_algebra(&a, &c, opts.up_to));
            let w = t.morphism.truncation().unwrap_or_else(|| t.minimal.default_check_weight().max(a.default_check_weight()));
            let ok = engine!(t.morphism.check(w)).is_ok() && is_quasi_iso(&t.morphism);
            Ok(Outcome::doc(ok, Document::encode(&t.morphism)))
        }
        (Command::Transfer, Payload::Module(_) | Payload::Pair(_)) => {
            let m: AInfModule<F> = match &doc.payload {
                Payload::Pair(_) => doc.decode::<Pair<F>>()?.module,
                _ => doc.decode()?,
            };
            let a = &m.algebra;
            let ca = engine!(contraction_from_complex(&a.differential(), PivotOrder::Forward));
            let cm = engine!(contraction_from_complex(&m.differential(), PivotOrder::Forward));
            let t = engine!(transfer_pair(a, &m, &ca, &cm, opts.up_to));
            let w = t.module.truncation().unwrap_or_else(|| t.module.default_check_weight().max(m.default_check_weight()));
            let ok = matches!(engine!(check_pair(&t.morphism, w, true)), Ok(()));
            Ok(Outcome::doc(ok, Document::encode(&Pair::new(t.module))))
        }
        (Command::Cohomology, Payload::Algebra(_)) => {
            let a: AInfAlgebra<F> = doc.decode()?;
            let (h, _) = engine!(cohomology(&a, PivotOrder::Forward));
            let details = json!({ "dims": dims_json(&h.space), "algebra": serde_json::to_value(Document::encode(&h)).expect("plain data") });
            Ok(Outcome::report(&desc, cmd, true, details))
        }
        (Command::Cohomology, Payload::Module(_)) => {
            let m: AInfModule<F> = doc.decode()?;
            let c = engine!(contraction_from_complex(&m.differential(), PivotOrder::Forward));
            Ok(Outcome::report(&desc, cmd, true, json!({ "dims": dims_json(&c.small) })))
        }
        (Command::Hochschild, Payload::Algebra(_) | Payload::Module(_)) => {
            let top = opts.up_to.unwrap_or(3);
            let (cx, spaces) = match &doc.payload {
                Payload::Algebra(_) => {
                    let a: AInfAlgebra<F> = doc.decode()?;
                    (HochschildComplex::algebra(&a), [a.space.clone(), a.space.clone()])
                }
                _ => {
                    let m: AInfModule<F> = doc.decode()?;
                    (HochschildComplex::module(&m), [m.space.clone(), m.algebra.space.clone()])
                }
            };
            let mut table = serde_json::Map::new();
            for p in 0..=top {
                let Some((lo, hi)) = hochschild_ranges(&spaces[0], &spaces[1], &spaces[0], p) else { continue };
                for q in lo..=hi {
                    let d = cx.hh_dim(p, q);
                    if d > 0 {
                        table.insert(format!("{p},{q}"), json!(d));
                    }
                }
            }
            Ok(Outcome::report(&desc, cmd, true, json!({ "up_to": top, "dims": table })))
        }
        (Command::Obstruct, Payload::Module(_)) => {
            let m: AInfModule<F> = doc.decode()?;
            let n = opts.up_to.unwrap_or(3);
            Ok(match engine!(an_formality_check(&m, n)) {
                AnCheck::Pass => Outcome::report(&desc, cmd, true, json!({ "n": n, "an_formal": true })),
                AnCheck::Fail { stage, report } => {
                    let class = serde_json::to_value(encode_cochain(&report.cocycle, &associated_module_or(&m))).expect("plain data");
                    Outcome::report(&desc, cmd, false, json!({ "n": n, "an_formal": false, "stage": stage, "class_vanishes": false, "cocycle": class }))
                }
            })
        }
        (Command::ProveFormality, Payload::Module(_)) => {
            let m: AInfModule<F> = doc.decode()?;
            let cert = engine!(prove_module_formality(&m, opts.up_to));
            Ok(Outcome::doc(cert.is_formal(), Document::encode(&cert)))
        }
        (Command::VerifyCertificate, Payload::Certificate(_)) => {
            let cert: FormalityCertificate<F> = doc.decode()?;
            let verdict = match &cert.verdict {
                Verdict::Formal { .. } => json!("formal"),
                Verdict::NotAnFormal { stage, .. } => json!({ "not_an_formal": stage }),
                Verdict::Inconclusive { .. } => json!("inconclusive"),
            };
            Ok(match verify_certificate(&cert) {
                Ok(()) => Outcome::report(&desc, cmd, true, json!({ "valid": true, "verdict": verdict })),
                Err(e) => Outcome::report(&desc, cmd, false, json!({ "valid": false, "verdict": verdict, "reason": e.to_string() })),
            })
        }
        (Command::NormalCone, Payload::Module(_)) => {
            let m: AInfModule<F> = doc.decode()?;
            let cone = engine!(normal_cone_deform(&m));
            let at = |t: i64| cone.map_scalars(|c| c.eval(&F::from_int(t)));
            let m2 = engine!(associated_module(&m));
            let ok = at(1) == m && at(0).ops().collect::<Vec<_>>() == m2.ops().collect::<Vec<_>>();
            Ok(Outcome::doc(ok, Document::encode(&cone)))
        }
        (Command::Rees, Payload::Algebra(_)) => {
            let a: AInfAlgebra<F> = doc.decode()?;
            let Some(path) = &opts.filtration else { return input_err("rees needs --filtration") };
            let f: Filtration<F> = read_document(path)?.decode()?;
            let rees = engine!(rees_deformation(&a, &f));
            let ok = engine!(rees.rees.check_relations(rees.rees.default_check_weight())).is_ok();
            Ok(Outcome::doc(ok, Document::encode(&rees.rees)))
        }
        (Command::Fibre | Command::Snf | Command::Freeness, _) => {
            input_err(format!("{} needs coefficients in poly(h, field), found {}", command_name(cmd), doc.ring))
        }
        _ => ring_command::<F>(cmd, doc, opts),
    }
}

fn associated_module_or<F: Field>(m: &AInfModule<F>) -> AInfModule<F> {
    associated_module(m).unwrap_or_else(|_| m.clone())
}

fn annotate(out: &mut Outcome, key: &str, value: Value) {
    if let Some(Document { payload: Payload::Report(r), .. }) = &mut out.document {
        if let Value::Object(map) = &mut r.details {
            map.insert(key.into(), value);
        }
    }
}

fn dims_json(s: &GradedSpace) -> Value {
    json!(s.dims().into_iter().map(|(d, n)| (d.to_string(), n)).collect::<BTreeMap<_, _>>())
}

fn poly_command<F: Field>(cmd: Command, doc: &Document, opts: &Options) -> Result<Outcome, CliError> {
    let desc = doc.ring_descriptor()?;
    let point = || -> Result<F, CliError> {
        match &opts.at {
            None => Ok(F::zero()),
            Some(t) => F::from_json(&Value::String(t.clone())).map_err(|e| CliError::Input(e.to_string())),
        }
    };
    match (cmd, &doc.payload) {
        (Command::Fibre, Payload::Algebra(_)) => {
            let t = point()?;
            let a: AInfAlgebra<Poly<F>> = doc.decode()?;
            Ok(Outcome::doc(true, Document::encode(&a.map_scalars(|c| c.eval(&t)))))
        }
        (Command::Fibre, Payload::Module(_)) => {
            let t = point()?;
            let m: AInfModule<Poly<F>> = doc.decode()?;
            Ok(Outcome::doc(true, Document::encode(&m.map_scalars(|c| c.eval(&t)))))
        }
        (Command::ProveFormality, Payload::Module(_)) => {
            let m: AInfModule<Poly<F>> = doc.decode()?;
            Ok(match engine!(prove_module_formality_hbar(&m, opts.up_to)) {
                HbarVerdict::Formal { witness, .. } => Outcome::doc(true, Document::encode(&witness)),
                HbarVerdict::GenericNotFormal { stage } => {
                    Outcome::report(&desc, cmd, false, json!({ "verdict": "generic-not-formal", "stage": stage }))
                }
                HbarVerdict::TorsionBlocked { stage, torsion } => {
                    Outcome::report(&desc, cmd, false, json!({ "verdict": "torsion-blocked", "stage": stage, "torsion": torsion }))
                }
                HbarVerdict::Inconclusive { reason } => Outcome::report(&desc, cmd, false, json!({ "verdict": "inconclusive", "reason": reason })),
            })
        }
        (Command::Hochschild, Payload::Algebra(_) | Payload::Module(_)) => {
            let top = opts.up_to.unwrap_or(3);
            let (cx, m, a) = match &doc.payload {
                Payload::Algebra(_) => {
                    let a: AInfAlgebra<Poly<F>> = doc.decode()?;
                    (HochschildComplex::algebra(&a), a.space.clone(), a.space.clone())
                }
                _ => {
                    let m: AInfModule<Poly<F>> = doc.decode()?;
                    (HochschildComplex::module(&m), m.space.clone(), m.algebra.space.clone())
                }
            };
            let mut table = serde_json::Map::new();
            let mut free = true;
            for p in 0..=top {
                let Some((lo, hi)) = hochschild_ranges(&m, &a, &m, p) else { continue };
                for q in lo..=hi {
                    let h = poly_cohomology(&poly_strand(&cx, q, p, p)).get(p as i32);
                    free &= h.torsion.is_empty();
                    if h.free_rank > 0 || !h.torsion.is_empty() {
                        table.insert(format!("{p},{q}"), json!({ "free_rank": h.free_rank, "torsion": h.torsion }));
                    }
                }
            }
            Ok(Outcome::report(&desc, cmd, true, json!({ "up_to": top, "groups": table, "torsion_free": free })))
        }
        (Command::Snf, Payload::PolyComplex(_)) => {
            let c: PolyComplex<F> = doc.decode()?;
            let mut out = serde_json::Map::new();
            for i in c.degrees() {
                let d = c.diff(i);
                if d.rows() == 0 || d.cols() == 0 {
                    continue;
                }
                let s = smith_normal_form(&d);
                let factors: Vec<Value> = s.invariant_factors().iter().map(|p| p.to_json()).collect();
                out.insert(i.to_string(), json!({ "rank": s.rank(), "invariant_factors": factors }));
            }
            Ok(Outcome::report(&desc, cmd, true, json!({ "differentials": out })))
        }
        (Command::Freeness, Payload::PolyComplex(_)) => {
            let c: PolyComplex<F> = doc.decode()?;
            let r = engine!(freeness_test(&c));
            let free = matches!(r.verdict, Freeness::Free { .. });
            let details = json!({
                "verdict": serde_json::to_value(&r.verdict).expect("plain data"),
                "special": r.special,
                "generic": r.generic,
                "decomposition": serde_json::to_value(&r.decomposition).expect("plain data"),
            });
            Ok(Outcome::report(&desc, cmd, free, details))
        }
        (Command::CheckAlgebra | Command::CheckModule | Command::BarCheck, _) => ring_command::<Poly<F>>(cmd, doc, opts),
        _ => kind_err(cmd, doc),
    }
}

/// Serializes a document to a path or standard output.
pub fn write_output(doc: &Document, path: Option<&Path>) -> std::io::Result<()> {
    let text = serialize(doc);
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    }
}
