//! Obstruction theory and formality of minimal A-infinity modules over a
//! graded algebra.
//!
//! Stage `n` concerns a weight-`n+1` relation in which the arity-`n`
//! unknown (a module operation or a morphism component) enters linearly
//! through the Hochschild differential. The remaining terms form the
//! obstruction `c`, a cocycle whose vanishing class is exactly the condition
//! for the unknown to exist: `c + d(unknown) = 0`.
//!
//! * module extension: `m_n ∈ C^{n−1, 2−n}`, `c ∈ C^{n, 2−n}`
//! * morphism extension: `f_n ∈ C^{n−1, 1−n}`, `c ∈ C^{n, 1−n}`
//!
//! The formality prover builds `M = M^{(1)} → M^{(2)} → ⋯` where `M^{(n)}` has
//! `m_j = 0` for `3 ≤ j ≤ n+1`: at stage `n` the obstruction is `m_{n+1}` of
//! `M^{(n−1)}`, a primitive `g` gives `f̃ = (id, 0, …, g)`, and `M^{(n)}` is the
//! structure transported along `f̃`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::coeff::{Field, Poly, RatFunc, Ring, Trunc};
use crate::graded::{tensor_basis, ArityBound, GradedMap, MultiOp};
use crate::hochschild::{poly_strand, HochschildCochain, HochschildComplex, HochschildError};
use crate::hbar::{poly_cohomology, solve_over_poly};
use crate::linalg::{Matrix, Vector};
use crate::module::{is_quasi_iso_module, AInfModule, ModMorphism};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormalityError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Hochschild(#[from] HochschildError),
    #[error(transparent)]
    Graded(#[from] crate::graded::GradedError),
    #[error("module is not minimal")]
    NotMinimal,
    #[error("the algebra must be graded associative (only m_2)")]
    NotGraded,
    #[error("invalid partial structure: {0}")]
    Invalid(String),
    #[error("obstruction at stage {0} is not closed")]
    NotClosed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    ModuleExtension,
    MorphismExtension,
}

/// The obstruction at one stage, with a primitive when its class vanishes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstructionReport<F> {
    pub stage: usize,
    pub flavor: Flavor,
    pub cocycle: HochschildCochain<F>,
    pub vanished: bool,
    /// `x` with `d x = −cocycle`.
    pub primitive: Option<HochschildCochain<F>>,
}

fn require_graded<R: Ring>(m: &AInfModule<R>) -> Result<(), FormalityError> {
    if m.algebra.ops().any(|(k, _)| k != 2) {
        return Err(FormalityError::NotGraded);
    }
    if !m.is_minimal() {
        return Err(FormalityError::NotMinimal);
    }
    Ok(())
}

/// Evaluates `value` on every basis tuple of `M ⊗ A^{⊗p}` whose output can
/// land in the target degrees.
fn assemble<R: Ring>(
    m: &AInfModule<R>,
    target: &AInfModule<R>,
    p: usize,
    q: i32,
    value: impl Fn(&[usize]) -> Vector<R>,
) -> MultiOp<R> {
    let allowed: BTreeSet<i32> = target.space.support().into_iter().map(|d| d - q).collect();
    let mut body = MultiOp::new(p + 1, q);
    for tuple in tensor_basis(&m.slots(p + 1), Some(&allowed)) {
        let v = value(&tuple);
        if !v.is_zero() {
            body.set(tuple, v);
        }
    }
    body
}

/// Solves `d x = c` in a Hochschild complex.
pub trait PrimitiveSolver<R: Ring> {
    fn solve(&self, cx: &HochschildComplex<R>, c: &HochschildCochain<R>) -> Option<HochschildCochain<R>>;
}

/// Echelon elimination over a field, free variables zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct EchelonSolver;

impl<F: Field> PrimitiveSolver<F> for EchelonSolver {
    fn solve(&self, cx: &HochschildComplex<F>, c: &HochschildCochain<F>) -> Option<HochschildCochain<F>> {
        cx.solve_primitive(c)
    }
}

/// Smith normal form over `F[h]`: a primitive exists only when every
/// coordinate divides exactly.
#[derive(Debug, Clone, Copy, Default)]
pub struct SmithSolver;

impl<F: Field> PrimitiveSolver<Poly<F>> for SmithSolver {
    fn solve(&self, cx: &HochschildComplex<Poly<F>>, c: &HochschildCochain<Poly<F>>) -> Option<HochschildCochain<Poly<F>>> {
        if c.p == 0 {
            return c.is_zero().then(|| HochschildCochain::zero(cx.kind, 0, c.q));
        }
        let (dom, cod, cols) = cx.d_matrix(c.p - 1, c.q);
        let mat = Matrix::from_columns(cod.len(), &cols);
        let x = solve_over_poly(&mat, &cx.coordinates(&cod, c))?;
        Some(cx.from_coordinates(&dom, &x))
    }
}

fn report<R: Ring>(
    cx: &HochschildComplex<R>,
    stage: usize,
    flavor: Flavor,
    cocycle: HochschildCochain<R>,
    solver: &impl PrimitiveSolver<R>,
) -> Result<ObstructionReport<R>, FormalityError> {
    if !cx.d(&cocycle).is_zero() {
        return Err(FormalityError::NotClosed(stage));
    }
    let primitive = solver.solve(cx, &cocycle.neg());
    Ok(ObstructionReport { stage, flavor, vanished: primitive.is_some(), cocycle, primitive })
}

/// Obstruction to choosing `m_n` for a minimal `A_{n−1}`-module with
/// operations `m_2, …, m_{n−1}` (higher ones are ignored).
pub fn obstruction_module_extension<F: Field>(m: &AInfModule<F>, n: usize) -> Result<ObstructionReport<F>, FormalityError> {
    require_graded(m)?;
    if n < 3 {
        return Err(FormalityError::Invalid(format!("module extension stages start at 3, got {n}")));
    }
    let mut partial = AInfModule::truncated(m.algebra.clone(), m.space.clone(), n);
    for (_, op) in m.ops().filter(|&(k, _)| k < n) {
        partial.set_op(op.clone())?;
    }
    if let Err(e) = partial.check_relations(n)? {
        return Err(FormalityError::Invalid(format!("relation fails at weight {}", e.weight)));
    }
    let cx = HochschildComplex::module(&partial.truncate_to_m2()?);
    let body = assemble(&partial, &partial, n, 2 - n as i32, |t| partial.relation_value(t));
    report(&cx, n, Flavor::ModuleExtension, cx.cochain(n, body)?, &EchelonSolver)
}

/// Obstruction to choosing `f_n` for an `A_{n−1}`-morphism `f_1, …, f_{n−1}`
/// between minimal modules (higher components are ignored).
pub fn obstruction_morphism_extension<F: Field>(f: &ModMorphism<F>, n: usize) -> Result<ObstructionReport<F>, FormalityError> {
    require_graded(&f.source)?;
    require_graded(&f.target)?;
    if n < 2 {
        return Err(FormalityError::Invalid(format!("morphism extension stages start at 2, got {n}")));
    }
    let mut partial = ModMorphism::new(f.source.clone(), f.target.clone(), Some(n))?;
    for (_, op) in f.comps().filter(|&(k, _)| k < n) {
        partial.set_comp(op.clone())?;
    }
    if let Err(e) = partial.check(n)? {
        return Err(FormalityError::Invalid(format!("morphism relation fails at weight {}", e.weight)));
    }
    let cx = HochschildComplex::module_pair(&f.source.algebra, &f.source.truncate_to_m2()?, &f.target.truncate_to_m2()?)?;
    let body = assemble(&partial.source, &partial.target, n, 1 - n as i32, |t| partial.relation_value(t));
    report(&cx, n, Flavor::MorphismExtension, cx.cochain(n, body)?, &EchelonSolver)
}

/// The module `N` with `N_2 = M_2` making `f` (with `f_1 = id`) a morphism
/// `M → N` through arity `top`.
pub fn transport_along<R: Ring>(f: &ModMorphism<R>, top: usize) -> Result<AInfModule<R>, FormalityError> {
    let m = &f.source;
    let id = crate::graded::GradedMap::identity(&m.space).to_op();
    if f.f(1) != id {
        return Err(FormalityError::Invalid("transport needs f_1 = id".into()));
    }
    let mut g = f.clone();
    g.target = AInfModule::truncated(m.algebra.clone(), m.space.clone(), top);
    g.target.set_op(m.m(2))?;
    for w in 3..=top {
        // with f_1 = id the only occurrence of the unknown is −m^N_w itself
        let body = assemble(m, m, w - 1, 2 - w as i32, |t| g.relation_value(t));
        g.target.set_op(body)?;
    }
    Ok(g.target)
}

/// `M` with every operation of arity above 2 removed, keeping the truncation.
pub fn associated_module<R: Ring>(m: &AInfModule<R>) -> Result<AInfModule<R>, FormalityError> {
    let mut out = match m.truncation() {
        Some(n) => AInfModule::truncated(m.algebra.clone(), m.space.clone(), n),
        None => AInfModule::new(m.algebra.clone(), m.space.clone()),
    };
    if let Some(op) = m.op(2) {
        out.set_op(op.clone())?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<F> {
    /// `witness: M → M(2)` with `f_1 = id`.
    Formal { witness: ModMorphism<F> },
    /// The stage-`n` class is nonzero, so `M` is not `A_{n+1}`-formal.
    NotAnFormal { stage: usize, report: ObstructionReport<F> },
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalityCertificate<F> {
    pub module: AInfModule<F>,
    pub verdict: Verdict<F>,
    pub stages: Vec<ObstructionReport<F>>,
    /// Highest arity covered by the computation.
    pub top: usize,
}

/// How primitives are chosen at each stage.
pub trait PrimitiveChoice<R: Ring> {
    /// Adjusts the deterministic primitive `x` (with `d x = −c`) at `stage`.
    fn choose(&mut self, stage: usize, cx: &HochschildComplex<R>, x: HochschildCochain<R>) -> HochschildCochain<R>;
}

/// The echelon primitive with free variables zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct Canonical;

impl<R: Ring> PrimitiveChoice<R> for Canonical {
    fn choose(&mut self, _: usize, _: &HochschildComplex<R>, x: HochschildCochain<R>) -> HochschildCochain<R> {
        x
    }
}

fn top_arity<R: Ring>(m: &AInfModule<R>, up_to: Option<usize>) -> Result<(usize, bool), FormalityError> {
    let bound = match m.saturation_bound() {
        ArityBound::Finite(b) if m.is_saturated() => Some(b.max(2)),
        _ => None,
    };
    match (bound, up_to) {
        (Some(b), Some(n)) if n < b => Ok((n, false)),
        (Some(b), _) => Ok((b, true)),
        (None, Some(n)) => Ok((m.truncation().map_or(n, |t| t.min(n)), false)),
        // past the last operation plus one transport step
        (None, None) => Ok((m.truncation().unwrap_or(m.max_arity().max(2) + 1), false)),
    }
}

/// Runs the stagewise construction through arity `up_to` (or the saturation
/// bound when it is finite and smaller), choosing primitives with `choice`.
pub fn prove_module_formality_with<F: Field>(
    m: &AInfModule<F>,
    up_to: Option<usize>,
    choice: &mut impl PrimitiveChoice<F>,
) -> Result<FormalityCertificate<F>, FormalityError> {
    let cert = prove_module_formality_over(m, up_to, &EchelonSolver, choice)?;
    if let Verdict::Formal { witness } = &cert.verdict {
        if !is_quasi_iso_module(witness) {
            return Err(FormalityError::Invalid("composed witness is not a quasi-isomorphism".into()));
        }
    }
    Ok(cert)
}

/// The stagewise construction over any coefficient ring with a primitive
/// solver. Every witness has `f_1 = id`, hence is an isomorphism.
pub fn prove_module_formality_over<R: Ring>(
    m: &AInfModule<R>,
    up_to: Option<usize>,
    solver: &impl PrimitiveSolver<R>,
    choice: &mut impl PrimitiveChoice<R>,
) -> Result<FormalityCertificate<R>, FormalityError> {
    require_graded(m)?;
    if m.truncation().is_none() && m.max_arity() <= 2 {
        let mut witness = ModMorphism::identity(m);
        witness.target = associated_module(m)?;
        return Ok(FormalityCertificate { module: m.clone(), verdict: Verdict::Formal { witness }, stages: Vec::new(), top: 2 });
    }
    let (top, complete) = top_arity(m, up_to)?;
    let mut cur = m.clone();
    if !complete {
        cur.set_truncation(Some(top));
    }
    let m2 = associated_module(&cur)?;
    let cx = HochschildComplex::module(&m2.truncate_to_m2()?);
    let mut stages = Vec::new();
    let mut pieces: Vec<ModMorphism<R>> = Vec::new();
    for n in 2..top {
        let body = cur.m(n + 1);
        let cocycle = cx.cochain(n, body)?;
        let mut rep = report(&cx, n, Flavor::MorphismExtension, cocycle, solver)?;
        let Some(x) = rep.primitive.take() else {
            stages.push(rep.clone());
            return Ok(FormalityCertificate { module: m.clone(), verdict: Verdict::NotAnFormal { stage: n, report: rep }, stages, top });
        };
        let g = choice.choose(n, &cx, x);
        if cx.d(&g) != rep.cocycle.neg() {
            return Err(FormalityError::Invalid(format!("chosen primitive at stage {n} does not solve d x = −c")));
        }
        rep.primitive = Some(g.clone());
        stages.push(rep);
        if g.is_zero() && cur.m(n + 1).is_zero() {
            continue;
        }
        let mut step = ModMorphism::identity(&cur);
        step.set_truncation(if complete { None } else { Some(top) });
        step.set_comp(g.body)?;
        let mut next = transport_along(&step, top)?;
        if complete {
            next.set_truncation(None);
        }
        step.target = next.clone();
        pieces.push(step);
        cur = next;
    }
    if cur.ops().any(|(k, op)| k > 2 && !op.is_zero()) {
        return Err(FormalityError::Invalid("higher operations survived the last stage".into()));
    }
    let mut witness = ModMorphism::identity(m);
    if !complete {
        witness.set_truncation(Some(top));
    }
    for step in &pieces {
        witness = step.compose(&witness)?;
    }
    if witness.target.ops().collect::<Vec<_>>() != associated_module(m)?.ops().collect::<Vec<_>>() {
        return Err(FormalityError::Invalid("composed witness does not land in M(2)".into()));
    }
    witness.target = associated_module(&witness.target)?;
    let check_weight = if complete { m.default_check_weight().max(top) } else { top };
    if let Err(e) = witness.check(check_weight)? {
        return Err(FormalityError::Invalid(format!("composed witness fails at weight {}", e.weight)));
    }
    if witness.f(1) != GradedMap::identity(&m.space).to_op() {
        return Err(FormalityError::Invalid("composed witness has f_1 ≠ id".into()));
    }
    let verdict = if complete {
        Verdict::Formal { witness }
    } else {
        Verdict::Inconclusive { reason: format!("A_{top}-formal; higher arities not covered") }
    };
    Ok(FormalityCertificate { module: m.clone(), verdict, stages, top })
}

pub fn prove_module_formality<F: Field>(m: &AInfModule<F>, up_to: Option<usize>) -> Result<FormalityCertificate<F>, FormalityError> {
    prove_module_formality_with(m, up_to, &mut Canonical)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnCheck<F> {
    Pass,
    Fail { stage: usize, report: ObstructionReport<F> },
}

/// Whether `M` is `A_n`-formal: stages `2, …, n−1` are unobstructed.
pub fn an_formality_check<F: Field>(m: &AInfModule<F>, n: usize) -> Result<AnCheck<F>, FormalityError> {
    if n <= 2 {
        require_graded(m)?;
        return Ok(AnCheck::Pass);
    }
    let cert = prove_module_formality(m, Some(n))?;
    Ok(match cert.verdict {
        Verdict::NotAnFormal { stage, report } => AnCheck::Fail { stage, report },
        _ => AnCheck::Pass,
    })
}

impl<R: Ring> FormalityCertificate<R> {
    pub fn is_formal(&self) -> bool {
        matches!(self.verdict, Verdict::Formal { .. })
    }
}

/// Re-checks a stored certificate without solving for anything: the stages
/// are replayed from the stored primitives, every cocycle must be closed and
/// agree with the replayed operation, every primitive must solve `d x = −c`,
/// a final obstruction must be a nonzero class, and a formal witness must
/// satisfy the morphism relations with `f_1 = id` and land in `M(2)`.
pub fn verify_certificate<F: Field>(c: &FormalityCertificate<F>) -> Result<(), FormalityError> {
    let bad = |s: String| Err(FormalityError::Invalid(s));
    let m = &c.module;
    require_graded(m)?;
    let cx = HochschildComplex::module(&associated_module(m)?.truncate_to_m2()?);
    let mut cur = m.clone();
    cur.set_truncation(Some(c.top.max(2)));
    for (i, rep) in c.stages.iter().enumerate() {
        let n = i + 2;
        if rep.stage != n || rep.flavor != Flavor::MorphismExtension {
            return bad(format!("stage record {i} is not the morphism extension at stage {n}"));
        }
        if rep.cocycle.p != n || rep.cocycle.q != 1 - n as i32 || rep.cocycle.body != cur.m(n + 1) {
            return bad(format!("stage {n} cocycle is not m_{} of the replayed module", n + 1));
        }
        if !cx.is_cocycle(&rep.cocycle) {
            return Err(FormalityError::NotClosed(n));
        }
        match (&rep.primitive, rep.vanished) {
            (Some(x), true) => {
                if cx.d(x) != rep.cocycle.neg() {
                    return bad(format!("stage {n} primitive does not solve d x = −c"));
                }
                let mut step = ModMorphism::identity(&cur);
                step.set_truncation(Some(c.top));
                step.set_comp(x.body.clone())?;
                cur = transport_along(&step, c.top)?;
            }
            (None, false) => {
                if cx.is_coboundary(&rep.cocycle) {
                    return bad(format!("stage {n} is recorded as obstructed but its class vanishes"));
                }
                if i + 1 != c.stages.len() {
                    return bad(format!("stages continue past the obstruction at stage {n}"));
                }
            }
            _ => return bad(format!("stage {n} primitive and vanishing flag disagree")),
        }
    }
    match &c.verdict {
        Verdict::Formal { witness } => {
            if witness.source != *m {
                return bad("witness source is not the certified module".into());
            }
            let m2 = associated_module(m)?;
            if witness.target.space != m.space
                || witness.target.algebra != m.algebra
                || witness.target.ops().collect::<Vec<_>>() != m2.ops().collect::<Vec<_>>()
            {
                return bad("witness target is not M(2)".into());
            }
            if witness.f(1) != GradedMap::identity(&m.space).to_op() {
                return bad("witness has f_1 ≠ id".into());
            }
            if let Err(e) = witness.check(m.default_check_weight().max(c.top))? {
                return bad(format!("witness fails the morphism relation at weight {}: {e}", e.weight));
            }
            if !is_quasi_iso_module(witness) {
                return bad("witness is not a quasi-isomorphism".into());
            }
        }
        Verdict::NotAnFormal { stage, report } => {
            if c.stages.last() != Some(report) || report.stage != *stage || report.vanished {
                return bad("the reported obstruction is not the last recorded stage".into());
            }
        }
        Verdict::Inconclusive { .. } => {}
    }
    Ok(())
}

/// Outcome of the generic-to-special formality transfer over `F[h]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HbarVerdict<F: Field> {
    /// A witness over `F[h]` and its specialization at `h = 0`.
    Formal { witness: ModMorphism<Poly<F>>, special: ModMorphism<F> },
    /// The generic fibre already fails at `stage`.
    GenericNotFormal { stage: usize },
    /// `HH^{n,1−n}(A, M(2))` has `h`-torsion at the listed stage, so the
    /// generic verdict does not transfer.
    TorsionBlocked { stage: usize, torsion: Vec<usize> },
    Inconclusive { reason: String },
}

/// Formality of a minimal module over `A[h]`: the generic fibre over `F(h)`
/// is decided first, then every `HH^{n,1−n}(A, M(2))` the construction
/// passes through is checked for `h`-torsion, and only then is the
/// construction run over `F[h]` itself.
pub fn prove_module_formality_hbar<F: Field>(
    m: &AInfModule<Poly<F>>,
    up_to: Option<usize>,
) -> Result<HbarVerdict<F>, FormalityError> {
    require_graded(m)?;
    let generic = m.map_scalars(|c| RatFunc::from_poly(c.clone()));
    let cert = prove_module_formality(&generic, up_to)?;
    let top = match cert.verdict {
        Verdict::NotAnFormal { stage, .. } => return Ok(HbarVerdict::GenericNotFormal { stage }),
        Verdict::Inconclusive { reason } => return Ok(HbarVerdict::Inconclusive { reason }),
        Verdict::Formal { .. } => cert.top,
    };
    let cx = HochschildComplex::module(&m.truncate_to_m2()?);
    for n in 2..top {
        let q = 1 - n as i32;
        let dec = poly_cohomology(&poly_strand(&cx, q, n, n));
        let torsion = dec.get(n as i32).torsion;
        if !torsion.is_empty() {
            return Ok(HbarVerdict::TorsionBlocked { stage: n, torsion });
        }
    }
    let ring = prove_module_formality_over(m, up_to, &SmithSolver, &mut Canonical)?;
    let witness = match ring.verdict {
        Verdict::Formal { witness } => witness,
        Verdict::NotAnFormal { stage, .. } => {
            // only torsion prime to h can stop a generically vanishing class
            return Ok(HbarVerdict::Inconclusive { reason: format!("class at stage {stage} vanishes only after inverting a factor prime to h") });
        }
        Verdict::Inconclusive { reason } => return Ok(HbarVerdict::Inconclusive { reason }),
    };
    let special = witness.map_scalars(|c| c.eval(&F::zero()));
    if let Err(e) = special.check(m.default_check_weight().max(top))? {
        return Err(FormalityError::Invalid(format!("specialized witness fails at weight {}", e.weight)));
    }
    Ok(HbarVerdict::Formal { witness, special })
}

/// Base change of an algebra to `F[h]` by constants.
pub fn constant_algebra<F: Field>(a: &crate::algebra::AInfAlgebra<F>) -> crate::algebra::AInfAlgebra<Poly<F>> {
    a.map_scalars(|c| Poly::constant(c.clone()))
}

/// Deformation to the normal cone: the module over `A[h]` with operations
/// `m_k h^{k−2}`.
pub fn normal_cone_deform<F: Field>(m: &AInfModule<F>) -> Result<AInfModule<Poly<F>>, FormalityError> {
    require_graded(m)?;
    let algebra = constant_algebra(&m.algebra);
    let mut out = match m.truncation() {
        Some(n) => AInfModule::truncated(algebra, m.space.clone(), n),
        None => AInfModule::new(algebra, m.space.clone()),
    };
    for (k, op) in m.ops() {
        out.set_op(op.map_scalars(|c| Poly::monomial(c.clone(), k - 2)))?;
    }
    Ok(out)
}

/// The fibre of a module over `A[h]` at `h = t`.
pub fn normal_cone_fibre<F: Field>(mt: &AInfModule<Poly<F>>, t: &F) -> AInfModule<F> {
    mt.map_scalars(|c| c.eval(t))
}

/// A trivialization `M̃ → M(2)[h]` with `f̃_k = f_k h^{k−1}`, built from a
/// formality witness of `M` when one exists. The result is checked over `F[h]`.
pub fn trivialize_normal_cone<F: Field>(m: &AInfModule<F>) -> Result<Option<ModMorphism<Poly<F>>>, FormalityError> {
    let cert = prove_module_formality(m, None)?;
    let Verdict::Formal { witness } = cert.verdict else { return Ok(None) };
    let source = normal_cone_deform(m)?;
    let target = normal_cone_deform(&witness.target)?;
    let mut out = ModMorphism::new(source, target, witness.truncation())?;
    for (k, op) in witness.comps() {
        out.set_comp(op.map_scalars(|c| Poly::monomial(c.clone(), k - 1)))?;
    }
    let weight = m.default_check_weight();
    if let Err(e) = out.check(weight)? {
        return Err(FormalityError::Invalid(format!("lifted trivialization fails at weight {}", e.weight)));
    }
    Ok(Some(out))
}

/// Outcome of trivializing a deformation of a graded associative product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Trivialization<F: Field, const N: usize> {
    /// `ψ^{-1} m_h(ψ, ψ) = m_0` modulo `h^N`.
    Trivial { gauge: GradedMap<Trunc<F, N>> },
    /// The leading deviation at `order` has a nonzero class in `HH^{2,0}`.
    Obstructed { order: usize, class: HochschildCochain<F>, partial: GradedMap<Trunc<F, N>> },
}

/// Coefficient of `h^r` in every structure constant.
pub fn coefficient_op<F: Field, const N: usize>(op: &MultiOp<Trunc<F, N>>, r: usize) -> MultiOp<F> {
    op.map_scalars(|c| c.coeff(r))
}

/// `ψ^{-1} m(ψ, …, ψ)` for a product over `F[h]/h^N`.
pub fn gauge_transform<F: Field, const N: usize>(
    op: &MultiOp<Trunc<F, N>>,
    psi: &GradedMap<Trunc<F, N>>,
    psi_inv: &GradedMap<Trunc<F, N>>,
) -> MultiOp<Trunc<F, N>> {
    crate::fixtures::conjugate_op(op, &vec![psi; op.arity()], psi_inv)
}

/// Inverse of `id − φ h^r` as the finite geometric series `Σ_k φ^k h^{rk}`.
fn unipotent_inverse<F: Field, const N: usize>(phi_h: &GradedMap<Trunc<F, N>>, r: usize) -> GradedMap<Trunc<F, N>> {
    let id = GradedMap::identity(&phi_h.source);
    let mut out = id.clone();
    let mut power = id;
    for _ in 1..=N / r {
        power = phi_h.compose(&power).expect("endomorphisms");
        out = out.add(&power).expect("same shape");
    }
    out
}

/// Removes the deviation of `m_h` from `m_0 = a0.m(2)` order by order with
/// gauges `id − φ_r h^r`, where `d φ_r = −m_r` in the algebra Hochschild complex.
pub fn trivialize_truncated_deformation<F: Field, const N: usize>(
    a0: &crate::algebra::AInfAlgebra<F>,
    mh: &MultiOp<Trunc<F, N>>,
) -> Result<Trivialization<F, N>, FormalityError> {
    if a0.ops().any(|(k, _)| k != 2) {
        return Err(FormalityError::NotGraded);
    }
    if coefficient_op(mh, 0) != a0.m(2) {
        return Err(FormalityError::Invalid("deformation does not reduce to m_0 at h = 0".into()));
    }
    let mut deformed = a0.map_scalars(|c| Trunc::<F, N>::constant(c.clone()));
    deformed.set_op(mh.clone())?;
    if let Err(e) = deformed.check_relations(3)? {
        return Err(FormalityError::Invalid(format!("deformed product is not associative on {:?}", e.tuple)));
    }
    let cx = HochschildComplex::algebra(a0);
    let mut gauge = GradedMap::identity(&a0.space);
    let mut cur = mh.clone();
    for r in 1..N {
        let dev = coefficient_op(&cur, r);
        if dev.is_zero() {
            continue;
        }
        let c = cx.cochain(2, dev)?;
        if !cx.is_cocycle(&c) {
            return Err(FormalityError::NotClosed(r));
        }
        let Some(phi) = cx.solve_primitive(&c.neg()) else {
            return Ok(Trivialization::Obstructed { order: r, class: c, partial: gauge });
        };
        let phi = GradedMap::from_op(&phi.body, &a0.space, &a0.space)?;
        let phi_h = phi.map_scalars(|x| Trunc::monomial(x.clone(), r));
        let step = GradedMap::identity(&a0.space).add(&phi_h.scale(&Trunc::from_int(-1)))?;
        let step_inv = unipotent_inverse(&phi_h, r);
        cur = gauge_transform(&cur, &step, &step_inv);
        gauge = gauge.compose(&step)?;
        if (1..=r).any(|k| !coefficient_op(&cur, k).is_zero()) {
            return Err(FormalityError::Invalid(format!("gauge at order {r} did not remove the deviation")));
        }
    }
    Ok(Trivialization::Trivial { gauge })
}
