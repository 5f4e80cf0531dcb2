//! Homotopy transfer of A-infinity structures to cohomology.
//!
//! A contraction of a complex `(C, d)` onto `H` is `(incl, proj, htpy)` with
//! `proj ∘ incl = id` and `incl ∘ proj − id = d ∘ htpy + htpy ∘ d`, together
//! with the side conditions `htpy ∘ incl = 0`, `proj ∘ htpy = 0`,
//! `htpy ∘ htpy = 0`.
//!
//! The minimal model is built arity by arity. With `f_1 = incl` and all lower
//! data fixed, the morphism relation of weight `n` reads
//! `incl ∘ m'_n − d ∘ f_n = U_n`, where `U_n` collects every other term, so
//! `m'_n = proj ∘ U_n` and `f_n = htpy ∘ U_n`.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::algebra::{AInfAlgebra, AlgMorphism, AlgebraError};
use crate::coeff::Field;
use crate::graded::{arity_bound, tensor_basis, ArityBound, GradedError, GradedMap, GradedSpace, MultiOp};
use crate::linalg::{Echelon, Vector};
use crate::module::{restrict_along, AInfModule, ModMorphism, PairMorphism};

pub use crate::probe::{minimal_pair_equiv_probe, ProbeVerdict};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransferError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error("not a complex: {0}")]
    NotComplex(String),
    #[error("invalid contraction: {0}")]
    Contraction(String),
    #[error("input fails its relations at weight {0}")]
    Relation(usize),
    #[error("operations of every arity are degree-feasible on the cohomology; give an explicit arity bound")]
    ArityRequired,
}

/// Which end of each degree block is preferred when choosing representatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotOrder {
    #[default]
    Forward,
    Reverse,
}

/// Strong deformation retract of a complex onto a space with zero differential.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contraction<F> {
    pub big: GradedSpace,
    pub differential: GradedMap<F>,
    pub small: GradedSpace,
    pub incl: GradedMap<F>,
    pub proj: GradedMap<F>,
    pub htpy: GradedMap<F>,
}

impl<F: Field> Contraction<F> {
    /// Assembles a contraction from raw data, checks the homotopy identities and
    /// corrects `htpy` so that the side conditions hold.
    pub fn from_parts(
        differential: GradedMap<F>,
        incl: GradedMap<F>,
        proj: GradedMap<F>,
        htpy: GradedMap<F>,
    ) -> Result<Self, TransferError> {
        let c = Contraction {
            big: differential.source.clone(),
            small: incl.source.clone(),
            differential,
            incl,
            proj,
            htpy,
        };
        c.check_homotopy()?;
        Ok(c.normalized())
    }

    fn check_homotopy(&self) -> Result<(), TransferError> {
        let d = &self.differential;
        if d.source != d.target || d.degree != 1 {
            return Err(TransferError::NotComplex("differential must be a degree-one endomorphism".into()));
        }
        if !d.compose(d)?.is_zero() {
            return Err(TransferError::NotComplex("d ∘ d ≠ 0".into()));
        }
        if self.incl.degree != 0 || self.proj.degree != 0 || self.htpy.degree != -1 {
            return Err(TransferError::Contraction("incl, proj must have degree 0 and htpy degree −1".into()));
        }
        if !d.compose(&self.incl)?.is_zero() {
            return Err(TransferError::Contraction("incl is not a chain map".into()));
        }
        if !self.proj.compose(d)?.is_zero() {
            return Err(TransferError::Contraction("proj is not a chain map".into()));
        }
        if self.proj.compose(&self.incl)? != GradedMap::identity(&self.small) {
            return Err(TransferError::Contraction("proj ∘ incl ≠ id".into()));
        }
        let lhs = self.incl.compose(&self.proj)?.add(&GradedMap::identity(&self.big).scale(&F::one().neg()))?;
        let rhs = d.compose(&self.htpy)?.add(&self.htpy.compose(d)?)?;
        if lhs != rhs {
            return Err(TransferError::Contraction("incl ∘ proj − id ≠ d ∘ htpy + htpy ∘ d".into()));
        }
        Ok(())
    }

    /// Replaces `htpy` by `−h' d h'` with `h' = π htpy π`, `π = id − incl ∘ proj`.
    /// The homotopy identity is preserved and all side conditions hold afterwards.
    pub fn normalized(&self) -> Self {
        let ip = self.incl.compose(&self.proj).expect("composable");
        let pi = GradedMap::identity(&self.big).add(&ip.scale(&F::one().neg())).expect("same shape");
        let h1 = pi.compose(&self.htpy).and_then(|m| m.compose(&pi)).expect("composable");
        let h2 = h1.compose(&self.differential).and_then(|m| m.compose(&h1)).expect("composable").scale(&F::one().neg());
        Contraction { htpy: h2, ..self.clone() }
    }

    /// Checks the homotopy identities and the side conditions.
    pub fn verify(&self) -> Result<(), TransferError> {
        self.check_homotopy()?;
        if !self.htpy.compose(&self.incl)?.is_zero() {
            return Err(TransferError::Contraction("htpy ∘ incl ≠ 0".into()));
        }
        if !self.proj.compose(&self.htpy)?.is_zero() {
            return Err(TransferError::Contraction("proj ∘ htpy ≠ 0".into()));
        }
        if !self.htpy.compose(&self.htpy)?.is_zero() {
            return Err(TransferError::Contraction("htpy ∘ htpy ≠ 0".into()));
        }
        Ok(())
    }

    pub fn small_dims(&self) -> BTreeMap<i32, usize> {
        self.small.dims()
    }
}

/// Deterministic contraction of `(C, d)` onto chosen cohomology representatives.
///
/// In each degree `C^n = B^n ⊕ H^n ⊕ L^n` where `B^n = d(L^{n−1})`, `H^n`
/// extends `B^n` to the cycles using the echelon kernel basis, and `L^n` is
/// spanned by standard basis vectors completing the cycles. Then
/// `htpy(d l) = −l` on `B`, and `htpy` vanishes on `H ⊕ L`.
pub fn contraction_from_complex<F: Field>(d: &GradedMap<F>, order: PivotOrder) -> Result<Contraction<F>, TransferError> {
    let space = d.source.clone();
    if d.target != space || d.degree != 1 {
        return Err(TransferError::NotComplex("differential must be a degree-one endomorphism".into()));
    }
    if !d.compose(d)?.is_zero() {
        return Err(TransferError::NotComplex("d ∘ d ≠ 0".into()));
    }
    let mut small_labels: Vec<(String, i32)> = Vec::new();
    let mut used: BTreeSet<String> = BTreeSet::new();
    let mut incl_cols: Vec<Vector<F>> = Vec::new();
    let mut proj_cols: Vec<Vector<F>> = vec![Vector::zero(); space.dim()];
    let mut htpy_cols: Vec<Vector<F>> = vec![Vector::zero(); space.dim()];
    let mut prev: Option<(i32, Vec<Vector<F>>)> = None;

    for n in space.support() {
        let range = space.indices_in(n);
        let boundaries: Vec<Vector<F>> = match &prev {
            Some((p, ls)) if *p == n - 1 => ls.iter().map(|l| d.apply(l)).collect(),
            _ => Vec::new(),
        };
        let lifts: Vec<Vector<F>> = match &prev {
            Some((p, ls)) if *p == n - 1 => ls.clone(),
            _ => Vec::new(),
        };
        let mut cycles: Vec<Vector<F>> = d.block(n).kernel().into_iter().map(|v| v.relabel(|i| i + range.start)).collect();
        let mut standard: Vec<usize> = range.clone().collect();
        if order == PivotOrder::Reverse {
            cycles.reverse();
            standard.reverse();
        }
        let mut span = Echelon::new();
        for b in &boundaries {
            span.insert(b);
        }
        let mut reps = Vec::new();
        for z in cycles {
            if span.insert(&z) {
                reps.push(z);
            }
        }
        let mut comps = Vec::new();
        for j in standard {
            let e = Vector::basis(j);
            if span.insert(&e) {
                comps.push(e);
            }
        }
        let mut split = Echelon::new();
        for v in boundaries.iter().chain(&reps).chain(&comps) {
            split.insert(v);
        }
        let (nb, nh) = (boundaries.len(), reps.len());
        let first_small = small_labels.len();
        for z in &reps {
            small_labels.push((representative_label(&space, z, order, &mut used), n));
            incl_cols.push(z.clone());
        }
        for j in range {
            let coords = split.express(&Vector::basis(j)).expect("decomposition spans the degree");
            let mut p = Vector::zero();
            let mut h = Vector::zero();
            for (g, c) in coords.iter() {
                if g < nb {
                    h.add_scaled(&lifts[g], &c.neg());
                } else if g < nb + nh {
                    p.add_term(first_small + g - nb, c);
                }
            }
            proj_cols[j] = p;
            htpy_cols[j] = h;
        }
        prev = Some((n, comps));
    }

    let small = GradedSpace::new(small_labels)?;
    let incl = GradedMap::from_columns(&small, &space, 0, incl_cols)?;
    let proj = GradedMap::from_columns(&space, &small, 0, proj_cols)?;
    let htpy = GradedMap::from_columns(&space, &space, -1, htpy_cols)?;
    let c = Contraction { big: space, differential: d.clone(), small, incl, proj, htpy };
    c.verify()?;
    Ok(c)
}

/// `[x]` for the leading basis label `x` of a representative.
fn representative_label<F: Field>(space: &GradedSpace, z: &Vector<F>, order: PivotOrder, used: &mut BTreeSet<String>) -> String {
    let lead = match order {
        PivotOrder::Forward => z.support().next(),
        PivotOrder::Reverse => z.support().last(),
    }
    .expect("representatives are nonzero");
    let base = format!("[{}]", space.label(lead));
    let mut label = base.clone();
    let mut k = 1;
    while used.contains(&label) {
        label = format!("{base}#{k}");
        k += 1;
    }
    used.insert(label.clone());
    label
}

/// A minimal model with the morphism exhibiting it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transferred<F> {
    pub minimal: AInfAlgebra<F>,
    pub morphism: AlgMorphism<F>,
}

/// Arity at which the construction gives up on stabilizing when no bound is given.
pub const STABILIZE_CAP: usize = 10;

/// Arity range of the construction: the explicit bound, capped by the
/// degree-feasibility bound of the small side.
fn arity_cap(bound: ArityBound, up_to: Option<usize>) -> usize {
    let cap = match (up_to, bound) {
        (Some(n), _) => n,
        (None, ArityBound::Finite(b)) => b,
        (None, ArityBound::Unbounded) => STABILIZE_CAP,
    };
    match bound {
        ArityBound::Finite(b) => cap.min(b.max(1)),
        ArityBound::Unbounded => cap,
    }
    .max(1)
}

/// Resolves whether the computed range determines a full structure.
fn finish(bound: ArityBound, cap: usize, stabilized: bool, up_to: Option<usize>) -> Result<bool, TransferError> {
    let full = stabilized || bound.excludes(cap + 1);
    if !full && up_to.is_none() {
        return Err(TransferError::ArityRequired);
    }
    Ok(full)
}

/// Transfers the A-infinity structure of `a` along `c`, producing a minimal
/// model and an A-infinity quasi-isomorphism from it to `a`.
///
/// The result is a full structure when the degree-feasibility bound of the
/// cohomology is reached, or when the construction provably stabilizes: once
/// every component above arity `t` vanishes up to `max(R, 2)·t`, with `R` the
/// highest arity of `a`, all later components vanish too. Otherwise the model
/// is an A_n structure for `n = up_to`; with `up_to = None` that is an error.
pub fn transfer_algebra<F: Field>(a: &AInfAlgebra<F>, c: &Contraction<F>, up_to: Option<usize>) -> Result<Transferred<F>, TransferError> {
    if c.differential != a.differential() {
        return Err(TransferError::Contraction("contraction is not over the algebra's complex".into()));
    }
    let degs = c.small.degrees().to_vec();
    let bound = arity_bound(None, &degs, &degs, 2);
    let mut cap = arity_cap(bound, up_to);
    if let Some(t) = a.truncation() {
        cap = cap.min(t);
    }
    // weights beyond 2R − 1 only involve vanishing operations
    let weight = cap.min(a.truncation().unwrap_or(2 * a.max_arity() - 1)).max(1);
    if let Err(fail) = a.check_relations(weight)? {
        return Err(TransferError::Relation(fail.weight));
    }
    let spread = a.max_arity().max(2);
    let mut f = AlgMorphism::new(AInfAlgebra::new(c.small.clone()), a.clone(), None);
    f.set_comp(c.incl.to_op())?;
    let support: BTreeSet<i32> = a.space.support().into_iter().collect();
    let mut top = 1;
    let mut stabilized = false;
    let mut reached = 1;
    for k in 2..=cap {
        // U_k lands in degree Σ|x| + 2 − k
        let allowed: BTreeSet<i32> = support.iter().map(|d| d - 2 + k as i32).collect();
        let mut mk = MultiOp::new(k, 2 - k as i32);
        let mut fk = MultiOp::new(k, 1 - k as i32);
        for tuple in tensor_basis(&vec![&c.small; k], Some(&allowed)) {
            let u = f.relation_value(&tuple).neg();
            if u.is_zero() {
                continue;
            }
            mk.set(tuple.clone(), c.proj.apply(&u));
            fk.set(tuple, c.htpy.apply(&u));
        }
        if !mk.is_zero() || !fk.is_zero() {
            top = k;
        }
        f.source.set_op(mk)?;
        f.set_comp(fk)?;
        reached = k;
        if a.truncation().is_none() && k >= spread * top {
            stabilized = true;
            break;
        }
    }
    let full = finish(bound, reached, stabilized, up_to)?;
    if !full {
        f.source.set_truncation(Some(reached));
        f.set_truncation(Some(reached));
    }
    if let Some(unit) = a.unit() {
        let image = c.proj.apply(&Vector::basis(unit));
        if image.len() == 1 {
            let (i, coeff) = image.iter().next().expect("one term");
            if coeff.is_one() && c.incl.column(i) == &Vector::basis(unit) {
                let label = c.small.label(i).to_string();
                f.source.set_unit(&label)?;
            }
        }
    }
    Ok(Transferred { minimal: f.source.clone(), morphism: f })
}

/// The graded algebra `H(A)` with the product induced by `m_2`.
pub fn cohomology<F: Field>(a: &AInfAlgebra<F>, order: PivotOrder) -> Result<(AInfAlgebra<F>, Contraction<F>), TransferError> {
    let c = contraction_from_complex(&a.differential(), order)?;
    let t = transfer_algebra(a, &c, Some(2))?;
    let mut h = AInfAlgebra::new(c.small.clone());
    if let Some(m2) = t.minimal.op(2) {
        h.set_op(m2.clone())?;
    }
    if let Some(u) = t.minimal.unit() {
        h.set_unit(&c.small.label(u).to_string())?;
    }
    Ok((h, c))
}

/// Minimal models of an algebra and a module over it, with the pair morphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferredPair<F> {
    pub algebra: AInfAlgebra<F>,
    pub module: AInfModule<F>,
    pub morphism: PairMorphism<F>,
}

/// Transfers a module along a contraction of its complex, over an algebra
/// morphism `f: HA → A`. The module is first restricted along `f`, then the
/// module relation is solved arity by arity as for algebras.
pub fn transfer_module_along<F: Field>(
    f: &AlgMorphism<F>,
    m: &AInfModule<F>,
    cm: &Contraction<F>,
    up_to: Option<usize>,
) -> Result<(AInfModule<F>, ModMorphism<F>), TransferError> {
    if cm.differential != m.differential() {
        return Err(TransferError::Contraction("contraction is not over the module's complex".into()));
    }
    let ha = &f.source;
    let small_degs = cm.small.degrees().to_vec();
    let bound = arity_bound(Some(&small_degs), ha.space.degrees(), &small_degs, 1);
    let mut cap = arity_cap(bound, up_to);
    for t in [ha.truncation(), m.truncation(), f.truncation().map(|t| t + 1)].into_iter().flatten() {
        cap = cap.min(t);
    }
    let weight = cap.min(m.truncation().unwrap_or(m.max_arity() + m.algebra.max_arity() - 1)).max(1);
    if let Err(fail) = m.check_relations(weight)? {
        return Err(TransferError::Relation(fail.weight));
    }
    let restricted = restrict_along(f, m)?;
    let exact = restricted.truncation().is_none() && ha.truncation().is_none();
    let outer_spread = restricted.max_arity().max(ha.max_arity());
    let mut g = ModMorphism::new(AInfModule::new(ha.clone(), cm.small.clone()), restricted, None)?;
    g.set_comp(cm.incl.to_op())?;
    let support: BTreeSet<i32> = m.space.support().into_iter().collect();
    let mut top = 1;
    let mut stabilized = false;
    let mut reached = 1;
    for k in 2..=cap {
        let allowed: BTreeSet<i32> = support.iter().map(|d| d - 2 + k as i32).collect();
        let mut mk = MultiOp::new(k, 2 - k as i32);
        let mut gk = MultiOp::new(k, 1 - k as i32);
        for tuple in tensor_basis(&g.source.slots(k), Some(&allowed)) {
            let u = g.relation_value(&tuple).neg();
            if u.is_zero() {
                continue;
            }
            mk.set(tuple.clone(), cm.proj.apply(&u));
            gk.set(tuple, cm.htpy.apply(&u));
        }
        if !mk.is_zero() || !gk.is_zero() {
            top = k;
        }
        g.source.set_op(mk)?;
        g.set_comp(gk)?;
        reached = k;
        // later terms g_a(… m_b …) and m_{s+1}(g_r ⊗ id^s) reach at most this arity
        if exact && k >= top + outer_spread.max(top) - 1 {
            stabilized = true;
            break;
        }
    }
    let full = finish(bound, reached, stabilized, up_to)?;
    if !full {
        g.source.set_truncation(Some(reached));
        g.set_truncation(Some(reached));
    }
    Ok((g.source.clone(), g))
}

/// Minimal models of the pair `(A, M)` from contractions of both complexes.
pub fn transfer_pair<F: Field>(
    a: &AInfAlgebra<F>,
    m: &AInfModule<F>,
    ca: &Contraction<F>,
    cm: &Contraction<F>,
    up_to: Option<usize>,
) -> Result<TransferredPair<F>, TransferError> {
    if m.algebra != *a {
        return Err(AlgebraError::Mismatch("module is not over the given algebra".into()).into());
    }
    let t = transfer_algebra(a, ca, up_to)?;
    let module_bound = match (up_to, t.minimal.truncation()) {
        (Some(n), _) => Some(n),
        (None, Some(n)) => Some(n),
        (None, None) => None,
    };
    let (hm, g) = transfer_module_along(&t.morphism, m, cm, module_bound)?;
    Ok(TransferredPair {
        algebra: t.minimal.clone(),
        module: hm,
        morphism: PairMorphism { f: t.morphism, g, target_module: m.clone() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Q;

    use crate::coeff::Ring;

    fn q(n: i64) -> Q {
        Q::from_int(n)
    }

    #[test]
    fn zero_differential_gives_identity() {
        let s = GradedSpace::new([("a", 0), ("b", 1)]).unwrap();
        let c = contraction_from_complex(&GradedMap::<Q>::zero(&s, &s, 1), PivotOrder::Forward).unwrap();
        assert_eq!(c.small.dim(), 2);
        assert_eq!(c.incl.to_matrix(), crate::linalg::Matrix::identity(2));
        assert!(c.htpy.is_zero());
    }

    #[test]
    fn acyclic_complex_contracts_to_zero() {
        let s = GradedSpace::new([("a", 0), ("b", 1)]).unwrap();
        let d = GradedMap::from_columns(&s, &s, 1, vec![Vector::single(1, q(2)), Vector::zero()]).unwrap();
        let c = contraction_from_complex(&d, PivotOrder::Forward).unwrap();
        assert_eq!(c.small.dim(), 0);
        assert_eq!(c.htpy.column(1), &Vector::single(0, q(-1).div(&q(2))));
    }

    #[test]
    fn normalization_restores_side_conditions() {
        // zero differential, so any degree −1 map is a homotopy
        let s = GradedSpace::new([("x", -1), ("c", 0)]).unwrap();
        let d = GradedMap::<Q>::zero(&s, &s, 1);
        let id = GradedMap::identity(&s);
        let bad = GradedMap::from_columns(&s, &s, -1, vec![Vector::zero(), Vector::basis(0)]).unwrap();
        let raw = Contraction { big: s.clone(), differential: d.clone(), small: s.clone(), incl: id.clone(), proj: id.clone(), htpy: bad.clone() };
        assert!(raw.verify().is_err());
        let c = Contraction::from_parts(d, id.clone(), id, bad).unwrap();
        c.verify().unwrap();
        assert!(c.htpy.is_zero());
    }
}
