//! A-infinity algebras, their morphisms and relation checking.
//!
//! Relations are evaluated on basis tuples. The Stasheff relation of weight m is
//! `Σ_{j+k+l=m} (−1)^{jk+l} m_{j+1+l}(id^j ⊗ m_k ⊗ id^l) = 0`, and evaluating
//! `id^j ⊗ m_k ⊗ id^l` on `x_1 ⊗ … ⊗ x_m` contributes the Koszul sign
//! `(−1)^{deg(m_k)(|x_1|+…+|x_j|)}`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::coeff::{Field, Ring};
use crate::graded::{arity_bound, sign, tensor_basis, ArityBound, GradedError, GradedMap, GradedSpace, MultiOp, SignConvention};
use crate::linalg::Vector;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error("operation m_{arity} must have degree {expected}, found {found}")]
    OpDegree { arity: usize, expected: i32, found: i32 },
    #[error("relations up to weight {requested} need operations up to arity {requested}, but the structure is truncated at {truncation}")]
    Truncation { requested: usize, truncation: usize },
    #[error("structures do not match: {0}")]
    Mismatch(String),
    #[error("{0}")]
    Invalid(String),
}

/// Lex-minimal witness of a violated relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationFailure<R> {
    /// Weight of the failing relation (number of inputs).
    pub weight: usize,
    pub tuple: Vec<usize>,
    pub residual: Vector<R>,
}

impl<R: Ring> fmt::Display for RelationFailure<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "relation of weight {} fails on basis tuple {:?}", self.weight, self.tuple)
    }
}

/// Outcome of a relation check.
pub type CheckResult<R> = Result<(), RelationFailure<R>>;

/// All ordered compositions of `n` into positive parts, in lex order.
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for first in 1..=rest {
            cur.push(first);
            rec(rest - first, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, &mut Vec::new(), &mut out);
    }
    out
}

/// `outer(x_1,…,x_j, inner(x_{j+1},…,x_{j+k}), x_{j+k+1},…)` on basis indices,
/// without any sign.
pub(crate) fn insert_eval<R: Ring>(outer: &MultiOp<R>, inner: &MultiOp<R>, j: usize, tuple: &[usize]) -> Vector<R> {
    let k = inner.arity();
    let mut out = Vector::zero();
    let Some(inner_val) = inner.get(&tuple[j..j + k]) else {
        return out;
    };
    let mut args = Vec::with_capacity(outer.arity());
    for (y, c) in inner_val.iter() {
        args.clear();
        args.extend_from_slice(&tuple[..j]);
        args.push(y);
        args.extend_from_slice(&tuple[j + k..]);
        if let Some(v) = outer.get(&args) {
            out.add_scaled(v, c);
        }
    }
    out
}

/// Finite-dimensional A-infinity algebra, truncated at a fixed arity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AInfAlgebra<R> {
    pub space: GradedSpace,
    ops: BTreeMap<usize, MultiOp<R>>,
    /// `None` for a full A-infinity structure (absent operations vanish),
    /// `Some(n)` for an A_n structure whose higher operations are unspecified.
    truncation: Option<usize>,
    unit: Option<usize>,
}

impl<R: Ring> AInfAlgebra<R> {
    /// A-infinity algebra with all operations zero.
    pub fn new(space: GradedSpace) -> Self {
        AInfAlgebra { space, ops: BTreeMap::new(), truncation: None, unit: None }
    }

    /// A_n algebra with all operations up to arity `n` zero.
    pub fn truncated(space: GradedSpace, n: usize) -> Self {
        AInfAlgebra { space, ops: BTreeMap::new(), truncation: Some(n.max(1)), unit: None }
    }

    /// Installs `m_k`, checking degree `2 − k` and degree consistency of every entry.
    pub fn set_op(&mut self, op: MultiOp<R>) -> Result<(), AlgebraError> {
        let k = op.arity();
        let expected = 2 - k as i32;
        if op.degree() != expected {
            return Err(AlgebraError::OpDegree { arity: k, expected, found: op.degree() });
        }
        op.validate(&vec![&self.space; k], &self.space)?;
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

    pub fn set_unit(&mut self, label: &str) -> Result<(), AlgebraError> {
        self.unit = Some(self.space.index_of(label)?);
        Ok(())
    }

    pub fn unit(&self) -> Option<usize> {
        self.unit
    }

    pub fn truncation(&self) -> Option<usize> {
        self.truncation
    }

    /// Forgets operations above arity `n` (`None` declares them zero).
    pub fn set_truncation(&mut self, n: Option<usize>) {
        self.truncation = n.map(|n| n.max(1));
        if let Some(n) = n {
            self.ops.retain(|&k, _| k <= n);
        }
    }

    /// Highest arity carrying a nonzero operation.
    pub fn max_arity(&self) -> usize {
        self.ops.keys().next_back().copied().unwrap_or(1)
    }

    /// True when relations of weight `m` only involve specified operations.
    pub fn covers(&self, m: usize) -> bool {
        match self.truncation {
            None => true,
            Some(n) => m <= n || self.saturation_bound().excludes(n + 1),
        }
    }

    /// `m_k`, or `None` when it vanishes.
    pub fn op(&self, k: usize) -> Option<&MultiOp<R>> {
        self.ops.get(&k)
    }

    /// `m_k` as an explicit (possibly empty) operation.
    pub fn m(&self, k: usize) -> MultiOp<R> {
        self.ops.get(&k).cloned().unwrap_or_else(|| MultiOp::new(k, 2 - k as i32))
    }

    pub fn ops(&self) -> impl Iterator<Item = (usize, &MultiOp<R>)> {
        self.ops.iter().map(|(&k, op)| (k, op))
    }

    pub fn differential(&self) -> GradedMap<R> {
        GradedMap::from_op(&self.m(1), &self.space, &self.space).expect("m_1 is validated")
    }

    pub fn is_minimal(&self) -> bool {
        self.op(1).is_none()
    }

    /// True when only `m_2` may be nonzero.
    pub fn is_graded_associative_shape(&self) -> bool {
        self.ops.keys().all(|&k| k == 2)
    }

    /// Arity beyond which every operation is forced to vanish by degrees.
    pub fn saturation_bound(&self) -> ArityBound {
        let degs = self.space.support();
        arity_bound(None, &degs, &degs, 2)
    }

    /// Weight beyond which every relation is forced to vanish by degrees.
    pub fn relation_bound(&self) -> ArityBound {
        let degs = self.space.support();
        arity_bound(None, &degs, &degs, 3)
    }

    /// True when every operation that degrees allow to be nonzero is specified.
    pub fn is_saturated(&self) -> bool {
        match (self.truncation, self.saturation_bound()) {
            (None, _) => true,
            (Some(n), ArityBound::Finite(b)) => n >= b,
            (Some(_), ArityBound::Unbounded) => false,
        }
    }

    /// Weight up to which relations are checked by default: the relation
    /// bound when it is finite, otherwise the truncation (or the highest
    /// nonzero arity plus one for full structures).
    pub fn default_check_weight(&self) -> usize {
        match (self.relation_bound(), self.truncation) {
            (ArityBound::Finite(b), _) if self.is_saturated() => b.max(1),
            (_, Some(n)) => n,
            (_, None) => 2 * self.max_arity(),
        }
    }

    /// Value of the weight-`m` Stasheff relation on a basis tuple.
    pub fn relation_value(&self, tuple: &[usize]) -> Vector<R> {
        let m = tuple.len();
        let degs: Vec<i32> = tuple.iter().map(|&i| self.space.degree(i)).collect();
        let mut out = Vector::zero();
        for k in 1..=m {
            let Some(inner) = self.op(k) else { continue };
            for j in 0..=m - k {
                let l = m - k - j;
                let Some(outer) = self.op(j + 1 + l) else { continue };
                let passed: i32 = degs[..j].iter().sum();
                let e = SignConvention::stasheff(j, k, l) + SignConvention::koszul(inner.degree(), passed);
                let v = insert_eval(outer, inner, j, tuple);
                out.add_scaled(&v, &sign(e));
            }
        }
        out
    }

    /// Checks the Stasheff relations of weights `1..=up_to`, reporting the
    /// lex-minimal failure.
    pub fn check_relations(&self, up_to: usize) -> Result<CheckResult<R>, AlgebraError> {
        if !self.covers(up_to) {
            return Err(AlgebraError::Truncation { requested: up_to, truncation: self.truncation.unwrap_or(0) });
        }
        let support: BTreeSet<i32> = self.space.support().into_iter().collect();
        for m in 1..=up_to {
            // outputs have degree Σ|x| + 3 − m
            let allowed: BTreeSet<i32> = support.iter().map(|d| d - 3 + m as i32).collect();
            for tuple in tensor_basis(&vec![&self.space; m], Some(&allowed)) {
                let r = self.relation_value(&tuple);
                if !r.is_zero() {
                    return Ok(Err(RelationFailure { weight: m, tuple, residual: r }));
                }
            }
        }
        Ok(Ok(()))
    }

    pub fn map_scalars<S: Ring>(&self, f: impl Fn(&R) -> S) -> AInfAlgebra<S> {
        AInfAlgebra {
            space: self.space.clone(),
            ops: self.ops.iter().map(|(&k, op)| (k, op.map_scalars(&f))).filter(|(_, op)| !op.is_zero()).collect(),
            truncation: self.truncation,
            unit: self.unit,
        }
    }

    pub fn try_map_scalars<S: Ring, E>(&self, f: impl Fn(&R) -> Result<S, E>) -> Result<AInfAlgebra<S>, E> {
        let mut ops = BTreeMap::new();
        for (&k, op) in &self.ops {
            let op = op.try_map_scalars(&f)?;
            if !op.is_zero() {
                ops.insert(k, op);
            }
        }
        Ok(AInfAlgebra { space: self.space.clone(), ops, truncation: self.truncation, unit: self.unit })
    }

    /// Keeps only `m_2` (the graded algebra underlying a minimal structure).
    pub fn graded_part(&self) -> Self {
        let mut out = AInfAlgebra::new(self.space.clone());
        if let Some(m2) = self.op(2) {
            out.ops.insert(2, m2.clone());
        }
        out.unit = self.unit;
        out
    }
}

/// `check_alg_relations` under its operational name.
pub fn check_alg_relations<R: Ring>(a: &AInfAlgebra<R>, up_to: usize) -> Result<CheckResult<R>, AlgebraError> {
    a.check_relations(up_to)
}

// ---------------------------------------------------------------------------
// Morphisms

/// A-infinity morphism `f: A → B` with components `f_k` of degree `1 − k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgMorphism<R> {
    pub source: AInfAlgebra<R>,
    pub target: AInfAlgebra<R>,
    comps: BTreeMap<usize, MultiOp<R>>,
    truncation: Option<usize>,
}

impl<R: Ring> AlgMorphism<R> {
    pub fn new(source: AInfAlgebra<R>, target: AInfAlgebra<R>, truncation: Option<usize>) -> Self {
        AlgMorphism { source, target, comps: BTreeMap::new(), truncation: truncation.map(|n| n.max(1)) }
    }

    pub fn identity(a: &AInfAlgebra<R>) -> Self {
        let mut f = Self::new(a.clone(), a.clone(), None);
        f.set_comp(GradedMap::identity(&a.space).to_op()).expect("identity is degree zero");
        f
    }

    /// Morphism whose only component is the linear map `f1`.
    pub fn strict(source: &AInfAlgebra<R>, target: &AInfAlgebra<R>, f1: &GradedMap<R>) -> Result<Self, AlgebraError> {
        if f1.source != source.space || f1.target != target.space {
            return Err(AlgebraError::Mismatch("linear map does not match the algebras".into()));
        }
        let mut f = Self::new(source.clone(), target.clone(), None);
        f.set_comp(f1.to_op())?;
        Ok(f)
    }

    pub fn set_comp(&mut self, op: MultiOp<R>) -> Result<(), AlgebraError> {
        let k = op.arity();
        let expected = 1 - k as i32;
        if op.degree() != expected {
            return Err(AlgebraError::OpDegree { arity: k, expected, found: op.degree() });
        }
        op.validate(&vec![&self.source.space; k], &self.target.space)?;
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

    pub fn linear_part(&self) -> GradedMap<R> {
        GradedMap::from_op(&self.f(1), &self.source.space, &self.target.space).expect("f_1 is validated")
    }

    /// `Σ (−1)^s g_r(f_{i_1} ⊗ … ⊗ f_{i_r})` evaluated on a basis tuple of the source,
    /// with the Koszul sign of the tensor product of maps.
    fn tree_value(outer: &BTreeMap<usize, MultiOp<R>>, comps: &BTreeMap<usize, MultiOp<R>>, degs: &[i32], tuple: &[usize]) -> Vector<R> {
        let m = tuple.len();
        let mut out = Vector::zero();
        for blocks in compositions(m) {
            let Some(g) = outer.get(&blocks.len()) else { continue };
            let mut args = Vec::with_capacity(blocks.len());
            let mut start = 0;
            let mut e = SignConvention::morphism(&blocks);
            let mut ok = true;
            for &i in &blocks {
                let Some(fi) = comps.get(&i) else {
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
            if !ok {
                continue;
            }
            let v = g.apply(&args).expect("arity matches block count");
            out.add_scaled(&v, &sign(e));
        }
        out
    }

    /// Left side minus right side of the morphism relation on a basis tuple.
    pub fn relation_value(&self, tuple: &[usize]) -> Vector<R> {
        let m = tuple.len();
        let degs: Vec<i32> = tuple.iter().map(|&i| self.source.space.degree(i)).collect();
        let mut out = Vector::zero();
        for k in 1..=m {
            let Some(inner) = self.source.op(k) else { continue };
            for j in 0..=m - k {
                let l = m - k - j;
                let Some(outer) = self.comp(j + 1 + l) else { continue };
                let passed: i32 = degs[..j].iter().sum();
                let e = SignConvention::stasheff(j, k, l) + SignConvention::koszul(inner.degree(), passed);
                out.add_scaled(&insert_eval(outer, inner, j, tuple), &sign(e));
            }
        }
        let rhs = Self::tree_value(&self.target.ops, &self.comps, &degs, tuple);
        out.minus(&rhs)
    }

    pub fn check(&self, up_to: usize) -> Result<CheckResult<R>, AlgebraError> {
        for (what, t) in [("morphism", self.truncation), ("source", self.source.truncation), ("target", self.target.truncation)] {
            if let Some(n) = t {
                if up_to > n {
                    return Err(AlgebraError::Invalid(format!(
                        "{what} is truncated at arity {n}; cannot check weight {up_to}"
                    )));
                }
            }
        }
        let support: BTreeSet<i32> = self.target.space.support().into_iter().collect();
        for m in 1..=up_to {
            let allowed: BTreeSet<i32> = support.iter().map(|d| d - 2 + m as i32).collect();
            for tuple in tensor_basis(&vec![&self.source.space; m], Some(&allowed)) {
                let r = self.relation_value(&tuple);
                if !r.is_zero() {
                    return Ok(Err(RelationFailure { weight: m, tuple, residual: r }));
                }
            }
        }
        Ok(Ok(()))
    }

    /// `self ∘ f` with `(g∘f)_n = Σ (−1)^s g_r(f_{i_1} ⊗ … ⊗ f_{i_r})`.
    pub fn compose(&self, f: &AlgMorphism<R>) -> Result<AlgMorphism<R>, AlgebraError> {
        if f.target.space != self.source.space {
            return Err(AlgebraError::Mismatch("composition of non-composable morphisms".into()));
        }
        let n = match (self.truncation, f.truncation) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let mut out = AlgMorphism::new(f.source.clone(), self.target.clone(), n);
        let support: BTreeSet<i32> = self.target.space.support().into_iter().collect();
        let max_k = n.unwrap_or_else(|| {
            let fmax = f.comps.keys().next_back().copied().unwrap_or(1);
            let gmax = self.comps.keys().next_back().copied().unwrap_or(1);
            fmax * gmax
        });
        for k in 1..=max_k {
            let allowed: BTreeSet<i32> = support.iter().map(|d| d - 1 + k as i32).collect();
            let mut op = MultiOp::new(k, 1 - k as i32);
            for tuple in tensor_basis(&vec![&f.source.space; k], Some(&allowed)) {
                let degs: Vec<i32> = tuple.iter().map(|&i| f.source.space.degree(i)).collect();
                let v = Self::tree_value(&self.comps, &f.comps, &degs, &tuple);
                op.set(tuple, v);
            }
            out.set_comp(op)?;
        }
        Ok(out)
    }

    pub fn map_scalars<S: Ring>(&self, f: impl Fn(&R) -> S) -> AlgMorphism<S> {
        AlgMorphism {
            source: self.source.map_scalars(&f),
            target: self.target.map_scalars(&f),
            comps: self.comps.iter().map(|(&k, op)| (k, op.map_scalars(&f))).filter(|(_, op)| !op.is_zero()).collect(),
            truncation: self.truncation,
        }
    }

    pub fn try_map_scalars<S: Ring, E>(&self, f: impl Fn(&R) -> Result<S, E>) -> Result<AlgMorphism<S>, E> {
        let mut comps = BTreeMap::new();
        for (&k, op) in &self.comps {
            let op = op.try_map_scalars(&f)?;
            if !op.is_zero() {
                comps.insert(k, op);
            }
        }
        Ok(AlgMorphism {
            source: self.source.try_map_scalars(&f)?,
            target: self.target.try_map_scalars(&f)?,
            comps,
            truncation: self.truncation,
        })
    }
}

pub fn check_alg_morphism<R: Ring>(f: &AlgMorphism<R>, up_to: usize) -> Result<CheckResult<R>, AlgebraError> {
    f.check(up_to)
}

pub fn compose_alg_morphisms<R: Ring>(g: &AlgMorphism<R>, f: &AlgMorphism<R>) -> Result<AlgMorphism<R>, AlgebraError> {
    g.compose(f)
}

/// True when `f1` induces an isomorphism on cohomology of the underlying
/// complexes, degree by degree.
pub fn is_quasi_iso_map<F: Field>(f1: &GradedMap<F>, d_source: &GradedMap<F>, d_target: &GradedMap<F>) -> bool {
    use crate::linalg::Echelon;
    let degrees: BTreeSet<i32> = f1.source.support().into_iter().chain(f1.target.support()).collect();
    for d in degrees {
        // cycles of the source in degree d
        let src_range = f1.source.indices_in(d);
        let dz = d_source.block(d);
        let cycles: Vec<Vector<F>> =
            dz.kernel().into_iter().map(|v| v.relabel(|i| i + src_range.start)).collect();
        let mut boundaries_src = Echelon::new();
        for j in f1.source.indices_in(d - 1) {
            boundaries_src.insert(d_source.column(j));
        }
        let h_src = cycles.len() - boundaries_src.rank();
        let tgt_range = f1.target.indices_in(d);
        let tgt_cycles = d_target.block(d).kernel().len();
        let mut boundaries_tgt = Echelon::new();
        for j in f1.target.indices_in(d - 1) {
            boundaries_tgt.insert(d_target.column(j));
        }
        let h_tgt = tgt_cycles - boundaries_tgt.rank();
        if h_src != h_tgt {
            return false;
        }
        let mut image = boundaries_tgt.clone();
        let base = image.rank();
        for z in &cycles {
            image.insert(&f1.apply(z));
        }
        let _ = tgt_range;
        if image.rank() - base != h_tgt {
            return false;
        }
    }
    true
}

pub fn is_quasi_iso<F: Field>(f: &AlgMorphism<F>) -> bool {
    is_quasi_iso_map(&f.linear_part(), &f.source.differential(), &f.target.differential())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Q;

    fn exterior2() -> AInfAlgebra<Q> {
        // Λ(e1, e2) with zero differential
        let s = GradedSpace::new([("1", 0), ("e1", 1), ("e2", 1), ("e12", 2)]).unwrap();
        let mut m2 = MultiOp::new(2, 0);
        let one = Q::from_int(1);
        m2.set(vec![0, 0], Vector::basis(0));
        for i in 1..4 {
            m2.set(vec![0, i], Vector::basis(i));
            m2.set(vec![i, 0], Vector::basis(i));
        }
        m2.set(vec![1, 2], Vector::basis(3));
        m2.set(vec![2, 1], Vector::single(3, one.neg()));
        AInfAlgebra::new(s).with_op(m2).unwrap()
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(3), vec![vec![1, 1, 1], vec![1, 2], vec![2, 1], vec![3]]);
        for n in 1..8 {
            assert_eq!(compositions(n).len(), 1 << (n - 1));
        }
    }

    #[test]
    fn graded_algebra_passes() {
        let a = exterior2();
        assert_eq!(a.check_relations(4).unwrap(), Ok(()));
        let id = AlgMorphism::identity(&a);
        assert_eq!(id.check(4).unwrap(), Ok(()));
        assert!(is_quasi_iso(&id));
    }

    #[test]
    fn non_multiplicative_map_fails() {
        let a = exterior2();
        let mut cols: Vec<Vector<Q>> = (0..4).map(Vector::basis).collect();
        cols[3] = Vector::single(3, Q::from_int(2));
        let f1 = GradedMap::from_columns(&a.space, &a.space, 0, cols).unwrap();
        let f = AlgMorphism::strict(&a, &a, &f1).unwrap();
        let fail = f.check(3).unwrap().unwrap_err();
        assert_eq!(fail.weight, 2);
    }
}
