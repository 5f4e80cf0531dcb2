//! Bigraded Hochschild cochains of graded modules and graded algebras.
//!
//! For modules `M`, `N` over a graded algebra `A`,
//! `C^{p,q}(A, M, N) = Hom^q(M ⊗ A^{⊗p}, N)` with differential
//!
//! `(df)(x, a_1, …, a_{p+1}) = Σ_{j=0}^{p} (−1)^{p−j} f(…, s_j s_{j+1}, …) − f(x, a_1, …, a_p)·a_{p+1}`
//!
//! where `s_0 = x`, `s_i = a_i`, and the product at `j = 0` is the action on `M`.
//! The `j ≥ 1` terms carry the sign `(−1)^l` with `l` the number of slots to the
//! right of the product, the `j = 0` term is the `(−1)^p f(m_2 ⊗ id^p)` term,
//! and no Koszul signs appear because every product has degree zero and `f`
//! always sits at the left. With `f = m_n` of a minimal module this is exactly
//! the part of the weight-`n+1` module relation that is linear in `m_n`.
//!
//! For the algebra itself, `C^{n,q}(A, A) = Hom^q(A^{⊗n}, A)` with
//! `dφ = Σ_{j} (−1)^{n−1−j} φ(…, x_j x_{j+1}, …) − φ(x_1, …, x_n) x_{n+1}
//! + (−1)^{n + q|x_1|} x_1 φ(x_2, …, x_{n+1})`, the part of the weight-`n+1`
//! Stasheff relation linear in `m_n`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::algebra::{insert_eval, AInfAlgebra};
use crate::coeff::{CoeffError, Field, Poly, Ring, RingMap};
use crate::graded::{sign, tensor_basis, GradedError, GradedSpace, MultiOp};
use crate::hbar::PolyComplex;
use crate::linalg::{Echelon, Matrix, Vector};
use crate::module::AInfModule;

pub use crate::rees::{rees_deformation, rees_module_deformation, Filtration, ReesAlgebra, ReesModule};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HochschildError {
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("filtration: {0}")]
    Filtration(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComplexKind {
    /// `Hom(M ⊗ A^{⊗p}, N)`
    Module,
    /// `Hom(A^{⊗p}, A)`
    Algebra,
}

/// A cochain of bidegree `(p, q)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HochschildCochain<R> {
    pub p: usize,
    pub q: i32,
    pub body: MultiOp<R>,
}

impl<R: Ring> HochschildCochain<R> {
    pub fn zero(kind: ComplexKind, p: usize, q: i32) -> Self {
        HochschildCochain { p, q, body: MultiOp::new(arity_of(kind, p), q) }
    }

    pub fn is_zero(&self) -> bool {
        self.body.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.p, self.q), (other.p, other.q), "adding cochains of different bidegrees");
        HochschildCochain { p: self.p, q: self.q, body: self.body.add(&other.body) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        HochschildCochain { p: self.p, q: self.q, body: self.body.neg() }
    }

    pub fn scale(&self, c: &R) -> Self {
        HochschildCochain { p: self.p, q: self.q, body: self.body.scale(c) }
    }

    pub fn map_scalars<S: Ring>(&self, f: impl Fn(&R) -> S) -> HochschildCochain<S> {
        HochschildCochain { p: self.p, q: self.q, body: self.body.map_scalars(f) }
    }
}

fn arity_of(kind: ComplexKind, p: usize) -> usize {
    match kind {
        ComplexKind::Module => p + 1,
        ComplexKind::Algebra => p,
    }
}

/// Basis of `C^{p,q}`: pairs (input tuple, output basis index) of matching degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CochainBasis {
    pub p: usize,
    pub q: i32,
    entries: Vec<(Vec<usize>, usize)>,
    index: HashMap<(Vec<usize>, usize), usize>,
}

impl CochainBasis {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, i: usize) -> (&[usize], usize) {
        let (t, o) = &self.entries[i];
        (t, *o)
    }

    pub fn position(&self, tuple: &[usize], out: usize) -> Option<usize> {
        self.index.get(&(tuple.to_vec(), out)).copied()
    }
}

/// The Hochschild complex of a module pair or of an algebra, built from the
/// degree-zero products only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HochschildComplex<R> {
    pub kind: ComplexKind,
    pub algebra: GradedSpace,
    pub source: GradedSpace,
    pub target: GradedSpace,
    alg_m2: MultiOp<R>,
    src_m2: MultiOp<R>,
    tgt_m2: MultiOp<R>,
}

impl<R: Ring> HochschildComplex<R> {
    /// `C(A, M, N)` using `m_2` of `A`, `M` and `N`.
    pub fn module_pair(a: &AInfAlgebra<R>, m: &AInfModule<R>, n: &AInfModule<R>) -> Result<Self, HochschildError> {
        if m.algebra.space != a.space || n.algebra.space != a.space {
            return Err(HochschildError::Shape("modules are not over the given algebra".into()));
        }
        Ok(HochschildComplex {
            kind: ComplexKind::Module,
            algebra: a.space.clone(),
            source: m.space.clone(),
            target: n.space.clone(),
            alg_m2: a.m(2),
            src_m2: m.m(2),
            tgt_m2: n.m(2),
        })
    }

    /// `C(A, M) = C(A, M, M)`.
    pub fn module(m: &AInfModule<R>) -> Self {
        Self::module_pair(&m.algebra, m, m).expect("module is over its own algebra")
    }

    /// `C(A, A)` for the algebra itself.
    pub fn algebra(a: &AInfAlgebra<R>) -> Self {
        HochschildComplex {
            kind: ComplexKind::Algebra,
            algebra: a.space.clone(),
            source: a.space.clone(),
            target: a.space.clone(),
            alg_m2: a.m(2),
            src_m2: a.m(2),
            tgt_m2: a.m(2),
        }
    }

    pub fn arity(&self, p: usize) -> usize {
        arity_of(self.kind, p)
    }

    pub fn slots(&self, arity: usize) -> Vec<&GradedSpace> {
        (0..arity)
            .map(|s| if s == 0 && self.kind == ComplexKind::Module { &self.source } else { &self.algebra })
            .collect()
    }

    fn input_degree(&self, tuple: &[usize]) -> i32 {
        let slots = self.slots(tuple.len());
        tuple.iter().zip(slots).map(|(&i, s)| s.degree(i)).sum()
    }

    fn tuples(&self, arity: usize, q: i32) -> Vec<Vec<usize>> {
        let allowed: BTreeSet<i32> = self.target.support().into_iter().map(|d| d - q).collect();
        tensor_basis(&self.slots(arity), Some(&allowed))
    }

    /// Checks arity, degree and shape of a body and wraps it.
    pub fn cochain(&self, p: usize, body: MultiOp<R>) -> Result<HochschildCochain<R>, HochschildError> {
        if body.arity() != self.arity(p) {
            return Err(HochschildError::Shape(format!("arity {} for p = {p}", body.arity())));
        }
        body.validate(&self.slots(body.arity()), &self.target)?;
        Ok(HochschildCochain { p, q: body.degree(), body })
    }

    /// The differential, evaluated term by term on basis tuples.
    pub fn d(&self, f: &HochschildCochain<R>) -> HochschildCochain<R> {
        let r = self.arity(f.p);
        let mut out = MultiOp::new(r + 1, f.q);
        for tuple in self.tuples(r + 1, f.q) {
            let v = self.d_value(&f.body, &tuple);
            out.set(tuple, v);
        }
        HochschildCochain { p: f.p + 1, q: f.q, body: out }
    }

    fn d_value(&self, f: &MultiOp<R>, tuple: &[usize]) -> Vector<R> {
        let r = f.arity();
        let mut v = Vector::zero();
        for j in 0..r {
            let inner = if j == 0 { &self.src_m2 } else { &self.alg_m2 };
            let s: R = sign((r - 1 - j) as i64);
            v.add_scaled(&insert_eval(f, inner, j, tuple), &s);
        }
        v.add_scaled(&insert_eval(&self.tgt_m2, f, 0, tuple), &R::one().neg());
        if self.kind == ComplexKind::Algebra {
            let e = r as i64 + f.degree() as i64 * self.algebra.degree(tuple[0]) as i64;
            v.add_scaled(&insert_eval(&self.tgt_m2, f, 1, tuple), &sign(e));
        }
        v
    }

    pub fn basis(&self, p: usize, q: i32) -> CochainBasis {
        let mut entries = Vec::new();
        for t in self.tuples(self.arity(p), q) {
            let deg = self.input_degree(&t) + q;
            for o in self.target.indices_in(deg) {
                entries.push((t.clone(), o));
            }
        }
        let index = entries.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        CochainBasis { p, q, entries, index }
    }

    /// Coordinates of a cochain in `basis(p, q)`.
    pub fn coordinates(&self, basis: &CochainBasis, f: &HochschildCochain<R>) -> Vector<R> {
        let mut v = Vector::zero();
        for (t, val) in f.body.entries() {
            for (o, c) in val.iter() {
                let i = basis.position(t, o).expect("cochain lies in the basis");
                v.add_term(i, c);
            }
        }
        v
    }

    pub fn from_coordinates(&self, basis: &CochainBasis, v: &Vector<R>) -> HochschildCochain<R> {
        let mut body = MultiOp::new(self.arity(basis.p), basis.q);
        for (i, c) in v.iter() {
            let (t, o) = basis.entry(i);
            body.add_to(t, &Vector::single(o, c.clone()));
        }
        HochschildCochain { p: basis.p, q: basis.q, body }
    }

    /// Columns of `d: C^{p,q} → C^{p+1,q}` in the coordinates of `basis(p, q)`
    /// and `basis(p + 1, q)`, assembled by distributing each output tuple's
    /// terms over the cochain entries they read.
    pub fn d_matrix(&self, p: usize, q: i32) -> (CochainBasis, CochainBasis, Vec<Vector<R>>) {
        let dom = self.basis(p, q);
        let cod = self.basis(p + 1, q);
        let r = self.arity(p);
        let mut cols: Vec<Vector<R>> = vec![Vector::zero(); dom.len()];
        let mut credit = |col_tuple: &[usize], o: usize, row: usize, c: &R| {
            if let Some(j) = dom.position(col_tuple, o) {
                cols[j].add_term(row, c);
            }
        };
        for tuple in self.tuples(r + 1, q) {
            let out_deg = self.input_degree(&tuple) + q;
            let rows: Vec<(usize, usize)> =
                self.target.indices_in(out_deg).map(|o| (o, cod.position(&tuple, o).expect("row in basis"))).collect();
            // f(…, s_j s_{j+1}, …)
            for j in 0..r {
                let inner = if j == 0 { &self.src_m2 } else { &self.alg_m2 };
                let Some(prod) = inner.get(&tuple[j..j + 2]) else { continue };
                let s: R = sign((r - 1 - j) as i64);
                for (y, c) in prod.iter() {
                    let mut t2 = Vec::with_capacity(r);
                    t2.extend_from_slice(&tuple[..j]);
                    t2.push(y);
                    t2.extend_from_slice(&tuple[j + 2..]);
                    let c = c.mul(&s);
                    for &(o, row) in &rows {
                        credit(&t2, o, row, &c);
                    }
                }
            }
            // − f(s_0, …, s_{r−1}) · s_r
            let head = &tuple[..r];
            let head_deg = self.input_degree(head) + q;
            for o in self.target.indices_in(head_deg) {
                let Some(prod) = self.tgt_m2.get(&[o, tuple[r]]) else { continue };
                for (z, c) in prod.iter() {
                    let row = cod.position(&tuple, z).expect("row in basis");
                    credit(head, o, row, &c.neg());
                }
            }
            // ± x_1 φ(x_2, …)
            if self.kind == ComplexKind::Algebra {
                let tail = &tuple[1..];
                let tail_deg = self.input_degree(tail) + q;
                let s: R = sign(r as i64 + q as i64 * self.algebra.degree(tuple[0]) as i64);
                for o in self.target.indices_in(tail_deg) {
                    let Some(prod) = self.tgt_m2.get(&[tuple[0], o]) else { continue };
                    for (z, c) in prod.iter() {
                        let row = cod.position(&tuple, z).expect("row in basis");
                        credit(tail, o, row, &c.mul(&s));
                    }
                }
            }
        }
        (dom, cod, cols)
    }

    pub fn map_scalars<S: Ring>(&self, f: impl Fn(&R) -> S) -> HochschildComplex<S> {
        HochschildComplex {
            kind: self.kind,
            algebra: self.algebra.clone(),
            source: self.source.clone(),
            target: self.target.clone(),
            alg_m2: self.alg_m2.map_scalars(&f),
            src_m2: self.src_m2.map_scalars(&f),
            tgt_m2: self.tgt_m2.map_scalars(&f),
        }
    }

    pub fn try_map_scalars<S: Ring, E>(&self, f: impl Fn(&R) -> Result<S, E>) -> Result<HochschildComplex<S>, E> {
        Ok(HochschildComplex {
            kind: self.kind,
            algebra: self.algebra.clone(),
            source: self.source.clone(),
            target: self.target.clone(),
            alg_m2: self.alg_m2.try_map_scalars(&f)?,
            src_m2: self.src_m2.try_map_scalars(&f)?,
            tgt_m2: self.tgt_m2.try_map_scalars(&f)?,
        })
    }
}

/// The strand `C^{•,q}` over `F[h]` as a complex of free modules, with the
/// terms needed for `H^p` to be exact for every `p` in `lo..=hi`.
pub fn poly_strand<F: Field>(cx: &HochschildComplex<Poly<F>>, q: i32, lo: usize, hi: usize) -> PolyComplex<F> {
    let first = lo.saturating_sub(1);
    let mut ranks = BTreeMap::new();
    let mut diffs = BTreeMap::new();
    for p in first..=hi {
        let (dom, cod, cols) = cx.d_matrix(p, q);
        ranks.insert(p as i32, dom.len());
        ranks.insert(p as i32 + 1, cod.len());
        diffs.insert(p as i32, Matrix::from_columns(cod.len(), &cols));
    }
    PolyComplex::new(ranks, diffs).expect("Hochschild strands are complexes")
}

/// The complex over `T` obtained by applying a ring map to every structure
/// constant. Cochain spaces have the same bases, so the matrices of the new
/// differential are the old ones with entries mapped.
pub fn base_change_cochain_complex<S: Ring, T: Ring, M: RingMap<S, T>>(
    c: &HochschildComplex<S>,
    map: &M,
) -> Result<HochschildComplex<T>, HochschildError> {
    Ok(c.try_map_scalars(|s| map.apply(s))?)
}

/// `HH^{p,q}` with representatives of a basis of classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HHGroup<F> {
    pub p: usize,
    pub q: i32,
    pub dim: usize,
    pub classes: Vec<HochschildCochain<F>>,
}

impl<F: Field> HochschildComplex<F> {
    /// Cocycles of bidegree `(p, q)`, as a kernel basis in coordinates.
    fn cocycles(&self, p: usize, q: i32) -> (CochainBasis, Vec<Vector<F>>) {
        let (dom, _, cols) = self.d_matrix(p, q);
        let mut ech = Echelon::new();
        let mut kernel = Vec::new();
        for (j, col) in cols.iter().enumerate() {
            if !ech.insert(col) {
                let comb = ech.express(col).expect("dependent column is in the span");
                let mut v = Vector::basis(j);
                v.add_scaled(&comb, &F::one().neg());
                kernel.push(v);
            }
        }
        (dom, kernel)
    }

    /// Image of `d: C^{p−1,q} → C^{p,q}` as an echelon basis.
    fn boundaries(&self, p: usize, q: i32) -> Echelon<F> {
        let mut ech = Echelon::new();
        if p > 0 {
            let (_, _, cols) = self.d_matrix(p - 1, q);
            for col in &cols {
                ech.insert(col);
            }
        }
        ech
    }

    pub fn hh_group(&self, p: usize, q: i32) -> HHGroup<F> {
        let (basis, kernel) = self.cocycles(p, q);
        let mut ech = self.boundaries(p, q);
        let mut classes = Vec::new();
        for z in kernel {
            if ech.insert(&z) {
                classes.push(self.from_coordinates(&basis, &z));
            }
        }
        HHGroup { p, q, dim: classes.len(), classes }
    }

    pub fn hh_dim(&self, p: usize, q: i32) -> usize {
        self.hh_group(p, q).dim
    }

    pub fn is_cocycle(&self, c: &HochschildCochain<F>) -> bool {
        self.d(c).is_zero()
    }

    /// A cochain `x` with `d x = c`, if `c` is a coboundary.
    pub fn solve_primitive(&self, c: &HochschildCochain<F>) -> Option<HochschildCochain<F>> {
        if c.p == 0 {
            return c.is_zero().then(|| HochschildCochain::zero(self.kind, 0, c.q));
        }
        let (dom, cod, cols) = self.d_matrix(c.p - 1, c.q);
        let mut ech = Echelon::new();
        for col in &cols {
            ech.insert(col);
        }
        let comb = ech.express(&self.coordinates(&cod, c))?;
        Some(self.from_coordinates(&dom, &comb))
    }

    pub fn is_coboundary(&self, c: &HochschildCochain<F>) -> bool {
        self.solve_primitive(c).is_some()
    }

    /// Two cocycles represent the same class iff their difference is a coboundary.
    pub fn same_class(&self, a: &HochschildCochain<F>, b: &HochschildCochain<F>) -> bool {
        self.is_coboundary(&a.sub(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Q;

    fn ground() -> AInfAlgebra<Q> {
        let s = GradedSpace::new([("1", 0)]).unwrap();
        let mut m2 = MultiOp::new(2, 0);
        m2.set(vec![0, 0], Vector::basis(0));
        AInfAlgebra::new(s).with_op(m2).unwrap()
    }

    #[test]
    fn ground_field_cohomology() {
        let k = ground();
        let c = HochschildComplex::module(&AInfModule::regular(&k));
        assert_eq!(c.hh_dim(0, 0), 1);
        for p in 1..4 {
            assert_eq!(c.hh_dim(p, 0), 0);
        }
        let alg = HochschildComplex::algebra(&k);
        assert_eq!(alg.hh_dim(0, 0), 1);
        assert_eq!(alg.hh_dim(1, 0), 0);
    }

    #[test]
    fn zero_cochain_is_closed() {
        let k = ground();
        let c = HochschildComplex::module(&AInfModule::regular(&k));
        let z = HochschildCochain::zero(ComplexKind::Module, 2, 0);
        assert!(c.d(&z).is_zero());
    }
}
