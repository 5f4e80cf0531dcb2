//! A-infinity modules over A-infinity algebras, module morphisms, restriction
//! of scalars along algebra morphisms, and pairs.
//!
//! Module operations have the shape `m_k : M ⊗ A^{⊗(k−1)} → M` with the module
//! element in slot 0. The module relation of weight m is the Stasheff sum in
//! which an inner operation starting at slot 0 is a module operation and every
//! other inner operation is an algebra operation.

use std::collections::{BTreeMap, BTreeSet};

use crate::algebra::{compositions, insert_eval, AInfAlgebra, AlgMorphism, AlgebraError, CheckResult, RelationFailure};
use crate::coeff::{Field, Ring};
use crate::graded::{arity_bound, sign, tensor_basis, ArityBound, GradedMap, GradedSpace, MultiOp, SignConvention};
use crate::linalg::Vector;

/// Finite-dimensional A-infinity module over `algebra`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AInfModule<R> {
    pub algebra: AInfAlgebra<R>,
    pub space: GradedSpace,
    ops: BTreeMap<usize, MultiOp<R>>,
    truncation: Option<usize>,
}

fn module_slots<'a>(m: &'a GradedSpace, a: &'a GradedSpace, k: usize) -> Vec<&'a GradedSpace> {
    let mut v = vec![m];
    v.extend(std::iter::repeat(a).take(k - 1));
    v
}

impl<R: Ring> AInfModule<R> {
    pub fn new(algebra: AInfAlgebra<R>, space: GradedSpace) -> Self {
        AInfModule { algebra, space, ops: BTreeMap::new(), truncation: None }
    }

    pub fn truncated(algebra: AInfAlgebra<R>, space: GradedSpace, n: usize) -> Self {
        AInfModule { algebra, space, ops: BTreeMap::new(), truncation: Some(n.max(1)) }
    }

    /// The algebra acting on itself: `m^A_k := m_k`.
    pub fn regular(algebra: &AInfAlgebra<R>) -> Self {
        let mut m = AInfModule { algebra: algebra.clone(), space: algebra.space.clone(), ops: BTreeMap::new(), truncation: algebra.truncation() };
        for (k, op) in algebra.ops() {
            m.ops.insert(k, op.clone());
        }
        m
    }

    pub fn slots(&self, k: usize) -> Vec<&GradedSpace> {
        module_slots(&self.space, &self.algebra.space, k)
    }

    pub fn set_op(&mut self, op: MultiOp<R>) -> Result<(), AlgebraError> {
        let k = op.arity();
        let expected = 2 - k as i32;
        if op.degree() != expected {
            return Err(AlgebraError::OpDegree { arity: k, expected, found: op.degree() });
        }
        op.validate(&self.slots(k), &self.space)?;
        if let Some(n) = self.truncation {
            if k > n {
                return Err(AlgebraError::Truncation { requested: k, truncation: n });
            }
        }
        if op.is_zero() {
            self.ops.remove(&k);
        } else {
            self.ops.insert(k, op);
        }
        Ok(())
    }

    pub fn with_op(mut self, op: MultiOp<R>) -> Result<Self, AlgebraError> {
        self.set_op(op)?;
        Ok(self)
    }

    pub fn op(&self, k: usize) -> Option<&MultiOp<R>> {
        self.ops.get(&k)
    }

    pub fn m(&self, k: usize) -> MultiOp<R> {
        self.ops.get(&k).cloned().unwrap_or_else(|| MultiOp::new(k, 2 - k as i32))
    }

    pub fn ops(&self) -> impl Iterator<Item = (usize, &MultiOp<R>)> {
        self.ops.iter().map(|(&k, op)| (k, op))
    }

    pub fn truncation(&self) -> Option<usize> {
        self.truncation
    }

    pub fn set_truncation(&mut self, n: Option<usize>) {
        self.truncation = n.map(|n| n.max(1));
        if let Some(n) = n {
            self.ops.retain(|&k, _| k <= n);
        }
    }

    pub fn max_arity(&self) -> usize {
        self.ops.keys().next_back().copied().unwrap_or(1)
    }

    pub fn differential(&self) -> GradedMap<R> {
        GradedMap::from_op(&self.m(1), &self.space, &self.space).expect("m_1 is validated")
    }

    pub fn is_minimal(&self) -> bool {
        self.op(1).is_none()
    }

    /// Largest arity of a module operation not forced to vanish by degrees.
    pub fn saturation_bound(&self) -> ArityBound {
        let md = self.space.support();
        match arity_bound(Some(&md), &self.algebra.space.support(), &md, 1) {
            ArityBound::Finite(q) => ArityBound::Finite(q + 1),
            ArityBound::Unbounded => ArityBound::Unbounded,
        }
    }

    /// Largest weight of a module relation not forced to vanish by degrees.
    pub fn relation_bound(&self) -> ArityBound {
        let md = self.space.support();
        match arity_bound(Some(&md), &self.algebra.space.support(), &md, 2) {
            ArityBound::Finite(q) => ArityBound::Finite(q + 1),
            ArityBound::Unbounded => ArityBound::Unbounded,
        }
    }

    pub fn is_saturated(&self) -> bool {
        match (self.truncation, self.saturation_bound()) {
            (None, _) => true,
            (Some(n), ArityBound::Finite(b)) => n >= b,
            (Some(_), ArityBound::Unbounded) => false,
        }
    }

    pub fn covers(&self, m: usize) -> bool {
        let own = match self.truncation {
            None => true,
            Some(n) => m <= n || self.saturation_bound().excludes(n + 1),
        };
        own && self.algebra.covers(m)
    }

    pub fn default_check_weight(&self) -> usize {
        match (self.relation_bound(), self.truncation) {
            (ArityBound::Finite(b), _) if self.is_saturated() => b.max(1),
            (_, Some(n)) => n,
            (_, None) => 2 * self.max_arity().max(self.algebra.max_arity()),
        }
    }

    /// Inner operation used at slot position `j` with arity `k`.
    fn inner(&self, j: usize, k: usize) -> Option<&MultiOp<R>> {
        if j == 0 {
            self.op(k)
        } else {
            self.algebra.op(k)
        }
    }

    pub fn tuple_degrees(&self, tuple: &[usize]) -> Vec<i32> {
        tuple
            .iter()
            .enumerate()
            .map(|(s, &i)| if s == 0 { self.space.degree(i) } else { self.algebra.space.degree(i) })
            .collect()
    }

    /// Value of the weight-`m` module relation on `(x, a_1, …, a_{m−1})`.
    pub fn relation_value(&self, tuple: &[usize]) -> Vector<R> {
        let m = tuple.len();
        let degs = self.tuple_degrees(tuple);
        let mut out = Vector::zero();
        for k in 1..=m {
            for j in 0..=m - k {
                let l = m - k - j;
                let Some(inner) = self.inner(j, k) else { continue };
                let Some(outer) = self.op(j + 1 + l) else { continue };
                let passed: i32 = degs[..j].iter().sum();
                let e = SignConvention::stasheff(j, k, l) + SignConvention::koszul(inner.degree(), passed);
                out.add_scaled(&insert_eval(outer, inner, j, tuple), &sign(e));
            }
        }
        out
    }

    pub fn check_relations(&self, up_to: usize) -> Result<CheckResult<R>, AlgebraError> {
        if !self.covers(up_to) {
            return Err(AlgebraError::Truncation { requested: up_to, truncation: self.truncation.unwrap_or(0) });
        }
        let support: BTreeSet<i32> = self.space.support().into_iter().collect();
        for m in 1..=up_to {
            let allowed: BTreeSet<i32> = support.iter().map(|d| d - 3 + m as i32).collect();
            for tuple in tensor_basis(&self.slots(m), Some(&allowed)) {
                let r = self.relation_value(&tuple);
                if !r.is_zero() {
                    return Ok(Err(RelationFailure { weight: m, tuple, residual: r }));
                }
            }
        }
        Ok(Ok(()))
    }

    /// `M(2)`: keeps `m_2` only. Requires a minimal module over an algebra whose
    /// only operation is `m_2`.
    pub fn truncate_to_m2(&self) -> Result<Self, AlgebraError> {
        if !self.is_minimal() {
            return Err(AlgebraError::Invalid("M(2) needs a minimal module".into()));
        }
        if !self.algebra.is_graded_associative_shape() {
            return Err(AlgebraError::Invalid("M(2) needs a graded algebra (only m_2 nonzero)".into()));
        }
        let mut out = AInfModule::new(self.algebra.clone(), self.space.clone());
        if let Some(m2) = self.op(2) {
            out.ops.insert(2, m2.clone());
        }
        Ok(out)
    }

    /// Replaces the acting algebra by one with the same underlying space.
    pub fn with_algebra(&self, algebra: AInfAlgebra<R>) -> Result<Self, AlgebraError> {
        if algebra.space != self.algebra.space {
            return Err(AlgebraError::Mismatch("algebra spaces differ".into()));
        }
        Ok(AInfModule { algebra, space: self.space.clone(), ops: self.ops.clone(), truncation: self.truncation })
    }

    pub fn map_scalars<S: Ring>(&self, f: impl Fn(&R) -> S) -> AInfModule<S> {
        AInfModule {
            algebra: self.algebra.map_scalars(&f),
            space: self.space.clone(),
            ops: self.ops.iter().map(|(&k, op)| (k, op.map_scalars(&f))).filter(|(_, op)| !op.is_zero()).collect(),
            truncation: self.truncation,
        }
    }

    pub fn try_map_scalars<S: Ring, E>(&self, f: impl Fn(&R) -> Result<S, E>) -> Result<AInfModule<S>, E> {
        let mut ops = BTreeMap::new();
        for (&k, op) in &self.ops {
            let op = op.try_map_scalars(&f)?;
            if !op.is_zero() {
                ops.insert(k, op);
            }
        }
        Ok(AInfModule { algebra: self.algebra.try_map_scalars(&f)?, space: self.space.clone(), ops, truncation: self.truncation })
    }
}

pub fn check_mod_relations<R: Ring>(m: &AInfModule<R>, up_to: usize) -> Result<CheckResult<R>, AlgebraError> {
    m.check_relations(up_to)
}

pub fn truncate_to_m2<R: Ring>(m: &AInfModule<R>) -> Result<AInfModule<R>, AlgebraError> {
    m.truncate_to_m2()
}

/// Restriction of scalars of `n` along `f: A' → A`: the module structure on the
/// space of `n` over `A'` given by
/// `m^{f*N}_m(x, a_1..a_{m−1}) = Σ ± m^N_{r+1}(x, f_{i_1}(…), …, f_{i_r}(…))`
/// over compositions `(i_1, …, i_r)` of `m − 1`. The sign is the morphism sign
/// for the block sizes `(1, i_1, …, i_r)` together with the Koszul sign of each
/// `f_{i_u}` passing the earlier inputs.
pub fn restrict_along<R: Ring>(f: &AlgMorphism<R>, n: &AInfModule<R>) -> Result<AInfModule<R>, AlgebraError> {
    if f.target.space != n.algebra.space {
        return Err(AlgebraError::Mismatch("module is not over the target of the morphism".into()));
    }
    let truncation = match (n.truncation(), f.truncation()) {
        (Some(a), Some(b)) => Some(a.min(b + 1)),
        (a, b) => a.or(b.map(|b| b + 1)),
    };
    let mut out = AInfModule { algebra: f.source.clone(), space: n.space.clone(), ops: BTreeMap::new(), truncation };
    let max_m = match truncation {
        Some(t) => t,
        None => match out.saturation_bound() {
            ArityBound::Finite(b) => b,
            ArityBound::Unbounded => {
                let fmax = f.comps().map(|(k, _)| k).max().unwrap_or(1);
                (n.max_arity() - 1) * fmax + 1
            }
        },
    };
    let support: BTreeSet<i32> = n.space.support().into_iter().collect();
    for m in 1..=max_m {
        let allowed: BTreeSet<i32> = support.iter().map(|d| d - 2 + m as i32).collect();
        let mut op = MultiOp::new(m, 2 - m as i32);
        for tuple in tensor_basis(&out.slots(m), Some(&allowed)) {
            let degs = out.tuple_degrees(&tuple);
            op.set(tuple.clone(), restricted_value(f, n, &degs, &tuple));
        }
        out.set_op(op)?;
    }
    Ok(out)
}

fn restricted_value<R: Ring>(f: &AlgMorphism<R>, n: &AInfModule<R>, degs: &[i32], tuple: &[usize]) -> Vector<R> {
    let m = tuple.len();
    let mut out = Vector::zero();
    if m == 1 {
        if let Some(op) = n.op(1) {
            out = op.apply_basis(tuple);
        }
        return out;
    }
    for blocks in compositions(m - 1) {
        let Some(outer) = n.op(blocks.len() + 1) else { continue };
        let mut full = vec![1];
        full.extend_from_slice(&blocks);
        let mut e = SignConvention::morphism(&full);
        let mut args = vec![Vector::basis(tuple[0])];
        let mut start = 1;
        let mut ok = true;
        for &i in &blocks {
            let Some(fi) = f.comp(i) else {
                ok = false;
                break;
            };
            let v = fi.apply_basis(&tuple[start..start + i]);
            if v.is_zero() {
                ok = false;
                break;
            }
            let passed: i32 = degs[..start].iter().sum();
            e += SignConvention::koszul(fi.degree(), passed);
            args.push(v);
            start += i;
        }
        if ok {
            out.add_scaled(&outer.apply(&args).expect("arity matches"), &sign(e));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Module morphisms

/// Morphism of A-infinity modules over the same algebra, with components
/// `f_k : M ⊗ A^{⊗(k−1)} → N` of degree `1 − k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModMorphism<R> {
    pub source: AInfModule<R>,
    pub target: AInfModule<R>,
    comps: BTreeMap<usize, MultiOp<R>>,
    truncation: Option<usize>,
}

impl<R: Ring> ModMorphism<R> {
    pub fn new(source: AInfModule<R>, target: AInfModule<R>, truncation: Option<usize>) -> Result<Self, AlgebraError> {
        if source.algebra.space != target.algebra.space {
            return Err(AlgebraError::Mismatch("module morphisms need a common algebra".into()));
        }
        Ok(ModMorphism { source, target, comps: BTreeMap::new(), truncation: truncation.map(|n| n.max(1)) })
    }

    pub fn identity(m: &AInfModule<R>) -> Self {
        let mut f = Self::new(m.clone(), m.clone(), None).expect("same algebra");
        f.set_comp(GradedMap::identity(&m.space).to_op()).expect("identity is degree zero");
        f
    }

    /// The zero morphism.
    pub fn zero(source: &AInfModule<R>, target: &AInfModule<R>) -> Result<Self, AlgebraError> {
        Self::new(source.clone(), target.clone(), None)
    }

    pub fn strict(source: &AInfModule<R>, target: &AInfModule<R>, f1: &GradedMap<R>) -> Result<Self, AlgebraError> {
        let mut f = Self::new(source.clone(), target.clone(), None)?;
        f.set_comp(f1.to_op())?;
        Ok(f)
    }

    pub fn set_comp(&mut self, op: MultiOp<R>) -> Result<(), AlgebraError> {
        let k = op.arity();
        let expected = 1 - k as i32;
        if op.degree() != expected {
            return Err(AlgebraError::OpDegree { arity: k, expected, found: op.degree() });
        }
        op.validate(&self.source.slots(k), &self.target.space)?;
        if let Some(n) = self.truncation {
            if k > n {
                return Err(AlgebraError::Truncation { requested: k, truncation: n });
            }
        }
        if op.is_zero() {
            self.comps.remove(&k);
        } else {
            self.comps.insert(k, op);
        }
        Ok(())
    }

    pub fn comp(&self, k: usize) -> Option<&MultiOp<R>> {
        self.comps.get(&k)
    }

    pub fn f(&self, k: usize) -> MultiOp<R> {
        self.comps.get(&k).cloned().unwrap_or_else(|| MultiOp::new(k, 1 - k as i32))
    }

    pub fn comps(&self) -> impl Iterator<Item = (usize, &MultiOp<R>)> {
        self.comps.iter().map(|(&k, op)| (k, op))
    }

    pub fn truncation(&self) -> Option<usize> {
        self.truncation
    }

    pub fn set_truncation(&mut self, n: Option<usize>) {
        self.truncation = n.map(|n| n.max(1));
        if let Some(n) = n {
            self.comps.retain(|&k, _| k <= n);
        }
    }

    pub fn max_arity(&self) -> usize {
        self.comps.keys().next_back().copied().unwrap_or(1)
    }

    pub fn linear_part(&self) -> GradedMap<R> {
        GradedMap::from_op(&self.f(1), &self.source.space, &self.target.space).expect("f_1 is validated")
    }

    /// Left side minus right side of the module morphism relation on a basis tuple:
    /// `Σ (−1)^{jk+l} f_{j+1+l}(id^j ⊗ m_k ⊗ id^l) − Σ_{r+s=m} m^N_{s+1}(f_r ⊗ id^s)`.
    pub fn relation_value(&self, tuple: &[usize]) -> Vector<R> {
        let m = tuple.len();
        let degs = self.source.tuple_degrees(tuple);
        let mut out = Vector::zero();
        for k in 1..=m {
            for j in 0..=m - k {
                let l = m - k - j;
                let Some(inner) = self.source.inner(j, k) else { continue };
                let Some(outer) = self.comp(j + 1 + l) else { continue };
                let passed: i32 = degs[..j].iter().sum();
                let e = SignConvention::stasheff(j, k, l) + SignConvention::koszul(inner.degree(), passed);
                out.add_scaled(&insert_eval(outer, inner, j, tuple), &sign(e));
            }
        }
        for r in 1..=m {
            let s = m - r;
            let (Some(fr), Some(ms)) = (self.comp(r), self.target.op(s + 1)) else { continue };
            let inner = insert_eval(ms, fr, 0, tuple);
            out.add_scaled(&inner, &R::one().neg());
        }
        out
    }

    pub fn check(&self, up_to: usize) -> Result<CheckResult<R>, AlgebraError> {
        for (what, ok) in [
            ("source", self.source.covers(up_to)),
            ("target", self.target.covers(up_to)),
            ("morphism", self.truncation.is_none_or(|n| up_to <= n)),
        ] {
            if !ok {
                return Err(AlgebraError::Invalid(format!("{what} is truncated below weight {up_to}")));
            }
        }
        let support: BTreeSet<i32> = self.target.space.support().into_iter().collect();
        for m in 1..=up_to {
            let allowed: BTreeSet<i32> = support.iter().map(|d| d - 2 + m as i32).collect();
            for tuple in tensor_basis(&self.source.slots(m), Some(&allowed)) {
                let r = self.relation_value(&tuple);
                if !r.is_zero() {
                    return Ok(Err(RelationFailure { weight: m, tuple, residual: r }));
                }
            }
        }
        Ok(Ok(()))
    }

    /// `self ∘ f` with `(g∘f)_n = Σ_{k+l=n} g_{l+1}(f_k ⊗ 1^{⊗l})`.
    pub fn compose(&self, f: &ModMorphism<R>) -> Result<ModMorphism<R>, AlgebraError> {
        if f.target.space != self.source.space {
            return Err(AlgebraError::Mismatch("composition of non-composable module morphisms".into()));
        }
        let n = match (self.truncation, f.truncation) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let mut out = ModMorphism::new(f.source.clone(), self.target.clone(), n)?;
        let max_n = n.unwrap_or(self.max_arity() + f.max_arity() - 1);
        let support: BTreeSet<i32> = self.target.space.support().into_iter().collect();
        for total in 1..=max_n {
            let allowed: BTreeSet<i32> = support.iter().map(|d| d - 1 + total as i32).collect();
            let mut op = MultiOp::new(total, 1 - total as i32);
            for tuple in tensor_basis(&f.source.slots(total), Some(&allowed)) {
                let mut v = Vector::zero();
                for k in 1..=total {
                    let l = total - k;
                    let (Some(fk), Some(g)) = (f.comp(k), self.comp(l + 1)) else { continue };
                    v.add_assign(&insert_eval(g, fk, 0, &tuple));
                }
                op.set(tuple, v);
            }
            out.set_comp(op)?;
        }
        Ok(out)
    }

    pub fn map_scalars<S: Ring>(&self, f: impl Fn(&R) -> S) -> ModMorphism<S> {
        ModMorphism {
            source: self.source.map_scalars(&f),
            target: self.target.map_scalars(&f),
            comps: self.comps.iter().map(|(&k, op)| (k, op.map_scalars(&f))).filter(|(_, op)| !op.is_zero()).collect(),
            truncation: self.truncation,
        }
    }

    pub fn try_map_scalars<S: Ring, E>(&self, f: impl Fn(&R) -> Result<S, E>) -> Result<ModMorphism<S>, E> {
        let mut comps = BTreeMap::new();
        for (&k, op) in &self.comps {
            let op = op.try_map_scalars(&f)?;
            if !op.is_zero() {
                comps.insert(k, op);
            }
        }
        Ok(ModMorphism {
            source: self.source.try_map_scalars(&f)?,
            target: self.target.try_map_scalars(&f)?,
            comps,
            truncation: self.truncation,
        })
    }
}

pub fn check_mod_morphism<R: Ring>(f: &ModMorphism<R>, up_to: usize) -> Result<CheckResult<R>, AlgebraError> {
    f.check(up_to)
}

pub fn compose_mod_morphisms<R: Ring>(g: &ModMorphism<R>, f: &ModMorphism<R>) -> Result<ModMorphism<R>, AlgebraError> {
    g.compose(f)
}

pub fn is_quasi_iso_module<F: Field>(f: &ModMorphism<F>) -> bool {
    crate::algebra::is_quasi_iso_map(&f.linear_part(), &f.source.differential(), &f.target.differential())
}

// ---------------------------------------------------------------------------
// Pairs

/// An algebra together with a module over it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pair<R> {
    pub algebra: AInfAlgebra<R>,
    pub module: AInfModule<R>,
}

impl<R: Ring> Pair<R> {
    pub fn new(module: AInfModule<R>) -> Self {
        Pair { algebra: module.algebra.clone(), module }
    }
}

/// Morphism of pairs `(A', M') → (A, M)`: an algebra morphism `f: A' → A`
/// and a module morphism `g: M' → f*M` over `A'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairMorphism<R> {
    pub f: AlgMorphism<R>,
    pub g: ModMorphism<R>,
    /// The module `M` over `A` that `g` lands in after restriction.
    pub target_module: AInfModule<R>,
}

/// Which side of a pair morphism failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairFailure<R> {
    Algebra(RelationFailure<R>),
    Module(RelationFailure<R>),
    Restriction(String),
    NotQuasiIso(&'static str),
}

pub fn check_pair<F: Field>(p: &PairMorphism<F>, up_to: usize, require_quasi_iso: bool) -> Result<Result<(), PairFailure<F>>, AlgebraError> {
    if let Err(e) = p.f.check(up_to)? {
        return Ok(Err(PairFailure::Algebra(e)));
    }
    let restricted = restrict_along(&p.f, &p.target_module)?;
    if restricted.space != p.g.target.space || restricted.algebra.space != p.g.target.algebra.space {
        return Ok(Err(PairFailure::Restriction("module morphism does not land in the restricted module".into())));
    }
    let mut g = p.g.clone();
    g.target = restricted;
    if let Err(e) = g.check(up_to)? {
        return Ok(Err(PairFailure::Module(e)));
    }
    if require_quasi_iso {
        if !crate::algebra::is_quasi_iso(&p.f) {
            return Ok(Err(PairFailure::NotQuasiIso("algebra")));
        }
        if !is_quasi_iso_module(&g) {
            return Ok(Err(PairFailure::NotQuasiIso("module")));
        }
    }
    Ok(Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Q;

    fn dual_numbers() -> AInfAlgebra<Q> {
        let s = GradedSpace::new([("1", 0), ("x", 0)]).unwrap();
        let mut m2 = MultiOp::new(2, 0);
        m2.set(vec![0, 0], Vector::basis(0));
        m2.set(vec![0, 1], Vector::basis(1));
        m2.set(vec![1, 0], Vector::basis(1));
        AInfAlgebra::new(s).with_op(m2).unwrap()
    }

    #[test]
    fn regular_module_passes() {
        let a = dual_numbers();
        let m = AInfModule::regular(&a);
        assert_eq!(m.check_relations(4).unwrap(), Ok(()));
        assert_eq!(m.saturation_bound(), ArityBound::Finite(2));
    }

    #[test]
    fn non_associative_action_fails() {
        let a = dual_numbers();
        let mut m = AInfModule::regular(&a);
        let mut m2 = m.m(2);
        m2.set(vec![1, 1], Vector::basis(1));
        m.set_op(m2).unwrap();
        let fail = m.check_relations(3).unwrap().unwrap_err();
        assert_eq!(fail.weight, 3);
    }

    #[test]
    fn restriction_along_identity_is_identity() {
        let a = dual_numbers();
        let m = AInfModule::regular(&a);
        let id = AlgMorphism::identity(&a);
        let r = restrict_along(&id, &m).unwrap();
        assert_eq!(r.ops().collect::<Vec<_>>(), m.ops().collect::<Vec<_>>());
    }

    #[test]
    fn identity_and_composition() {
        let a = dual_numbers();
        let m = AInfModule::regular(&a);
        let id = ModMorphism::identity(&m);
        assert_eq!(id.check(3).unwrap(), Ok(()));
        let c = id.compose(&id).unwrap();
        assert_eq!(c.comps().collect::<Vec<_>>(), id.comps().collect::<Vec<_>>());
        assert!(is_quasi_iso_module(&id));
    }
}
