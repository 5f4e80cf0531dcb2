//! Bounded search for equivalences between minimal pairs `(HA, HM)`.
//!
//! Disproofs use invariants of A-infinity pair quasi-isomorphisms between
//! minimal pairs, whose linear parts are graded isomorphisms intertwining
//! `m_2`:
//!
//! * graded dimensions of the algebra and the module;
//! * ranks of the multiplication and action maps `A_i ⊗ A_j → A_{i+j}`,
//!   `M_i ⊗ A_j → M_{i+j}`;
//! * for graded algebras, whether the class of `m_3^M` lies in the span of
//!   coboundaries and of `x ⊗ a ⊗ b ↦ m_2(x, φ(a, b))` for Hochschild
//!   cocycles `φ ∈ Z^{2,−1}(A, A)`. A pair morphism `(f, g)` changes `[m_3^M]`
//!   by exactly such a term coming from `f_2`, so this vanishing is invariant.
//!
//! Witnesses are strict maps given by permutations of basis vectors within
//! each degree, verified by the pair checker.

use std::collections::BTreeMap;

use crate::algebra::{AInfAlgebra, AlgMorphism, AlgebraError};
use crate::coeff::Field;
use crate::graded::{tensor_basis, GradedMap, GradedSpace, MultiOp};
use crate::hochschild::HochschildComplex;
use crate::linalg::{Echelon, Matrix, Vector};
use crate::module::{check_pair, restrict_along, AInfModule, ModMorphism, Pair, PairMorphism};

/// Largest degree block searched by permutations.
pub const MAX_BLOCK: usize = 3;
/// Largest number of candidate permutations tried.
pub const MAX_CANDIDATES: usize = 50_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbeVerdict<F> {
    EquivalentWitnessed { morphism: PairMorphism<F> },
    NotEquivalentByInvariants { invariant: String },
    Unknown { reason: String },
}

fn rank_profile<F: Field>(op: &MultiOp<F>, left: &GradedSpace, right: &GradedSpace, target: &GradedSpace) -> BTreeMap<(i32, i32), usize> {
    let mut out = BTreeMap::new();
    for &i in &left.support() {
        for &j in &right.support() {
            let cols: Vec<Vector<F>> = left
                .indices_in(i)
                .flat_map(|x| right.indices_in(j).map(move |y| (x, y)))
                .map(|(x, y)| op.apply_basis(&[x, y]))
                .collect();
            let rank = Matrix::from_columns(target.dim(), &cols).rank();
            if rank > 0 {
                out.insert((i, j), rank);
            }
        }
    }
    out
}

/// `Some(true)` when `[m_3^M]` vanishes modulo the image of `Z^{2,−1}(A, A)`;
/// `None` when the invariant does not apply.
pub fn massey_class_vanishes_mod_automorphisms<F: Field>(m: &AInfModule<F>) -> Option<bool> {
    if m.algebra.ops().any(|(k, _)| k != 2) || !m.is_minimal() {
        return None;
    }
    let cx = HochschildComplex::module(&m.truncate_to_m2().ok()?);
    let basis = cx.basis(2, -1);
    let mut span = Echelon::new();
    let (_, _, boundaries) = cx.d_matrix(1, -1);
    for b in &boundaries {
        span.insert(b);
    }
    let ax = HochschildComplex::algebra(&m.algebra);
    let (dom, cod, cols) = ax.d_matrix(2, -1);
    let m2 = m.m(2);
    for z in Matrix::from_columns(cod.len(), &cols).kernel() {
        let phi = ax.from_coordinates(&dom, &z);
        let mut body = MultiOp::new(3, -1);
        for (ab, v) in phi.body.entries() {
            for x in 0..m.space.dim() {
                let out = m2.apply(&[Vector::basis(x), v.clone()]).ok()?;
                if !out.is_zero() {
                    body.set(vec![x, ab[0], ab[1]], out);
                }
            }
        }
        span.insert(&cx.coordinates(&basis, &cx.cochain(2, body).ok()?));
    }
    let c = cx.cochain(2, m.m(3)).ok()?;
    Some(span.express(&cx.coordinates(&basis, &c)).is_some())
}

/// Degree-preserving permutations of `space` onto `target`, or `None` when
/// a block is too large or the dimensions differ.
fn block_permutations(space: &GradedSpace, target: &GradedSpace) -> Option<Vec<Vec<usize>>> {
    if space.dims() != target.dims() {
        return None;
    }
    let mut all: Vec<Vec<usize>> = vec![vec![usize::MAX; space.dim()]];
    for d in space.support() {
        let src: Vec<usize> = space.indices_in(d).collect();
        let tgt: Vec<usize> = target.indices_in(d).collect();
        if src.len() > MAX_BLOCK {
            return None;
        }
        let perms = permutations(&tgt);
        if all.len() * perms.len() > MAX_CANDIDATES {
            return None;
        }
        all = all
            .into_iter()
            .flat_map(|base| {
                let src = &src;
                perms.iter().map(move |p| {
                    let mut next = base.clone();
                    for (s, t) in src.iter().zip(p) {
                        next[*s] = *t;
                    }
                    next
                })
            })
            .collect();
    }
    Some(all)
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Whether `σ` carries every structure constant of `a` to those of `b`.
fn carries<F: Field>(
    a: &MultiOp<F>,
    b: &MultiOp<F>,
    slots: &[&GradedSpace],
    perms: &[&[usize]],
    out: &[usize],
) -> bool {
    tensor_basis(slots, None).into_iter().all(|t| {
        let image: Vec<usize> = t.iter().zip(perms).map(|(&i, p)| p[i]).collect();
        a.apply_basis(&t).relabel(|i| out[i]) == b.apply_basis(&image)
    })
}

fn permutation_map<F: Field>(source: &GradedSpace, target: &GradedSpace, sigma: &[usize]) -> Result<GradedMap<F>, AlgebraError> {
    Ok(GradedMap::from_columns(source, target, 0, sigma.iter().map(|&i| Vector::basis(i)).collect())?)
}

fn max_arity<F: Field>(a: &AInfAlgebra<F>, m: &AInfModule<F>) -> usize {
    a.max_arity().max(m.max_arity()).max(2)
}

fn find_witness<F: Field>(pa: &Pair<F>, pb: &Pair<F>) -> Result<Option<PairMorphism<F>>, String> {
    let (a, b, m, n) = (&pa.algebra, &pb.algebra, &pa.module, &pb.module);
    let top = max_arity(a, m).max(max_arity(b, n));
    let alg_perms = block_permutations(&a.space, &b.space).ok_or("algebra degree blocks exceed the search bound")?;
    let mod_perms = block_permutations(&m.space, &n.space).ok_or("module degree blocks exceed the search bound")?;
    if alg_perms.len().saturating_mul(mod_perms.len()) > MAX_CANDIDATES {
        return Err("too many candidate permutations".into());
    }
    for sigma in &alg_perms {
        let ok = (2..=top).all(|k| carries(&a.m(k), &b.m(k), &vec![&a.space; k], &vec![sigma.as_slice(); k], sigma));
        if !ok {
            continue;
        }
        for tau in &mod_perms {
            let ok = (2..=top).all(|k| {
                let mut slots = vec![&m.space];
                slots.extend(std::iter::repeat(&a.space).take(k - 1));
                let mut perms = vec![tau.as_slice()];
                perms.extend(std::iter::repeat(sigma.as_slice()).take(k - 1));
                carries(&m.m(k), &n.m(k), &slots, &perms, tau)
            });
            if !ok {
                continue;
            }
            let build = || -> Result<PairMorphism<F>, AlgebraError> {
                let f = AlgMorphism::strict(a, b, &permutation_map(&a.space, &b.space, sigma)?)?;
                let restricted = restrict_along(&f, n)?;
                let g = ModMorphism::strict(m, &restricted, &permutation_map(&m.space, &n.space, tau)?)?;
                Ok(PairMorphism { f, g, target_module: n.clone() })
            };
            let pm = build().map_err(|e| e.to_string())?;
            let weight = m.default_check_weight().max(n.default_check_weight()).max(top + 1);
            match check_pair(&pm, weight, true) {
                Ok(Ok(())) => return Ok(Some(pm)),
                Ok(Err(e)) => return Err(format!("permutation matched but the pair check failed: {e:?}")),
                Err(e) => return Err(e.to_string()),
            }
        }
    }
    Ok(None)
}

/// Compares two minimal pairs by invariants and a bounded permutation search.
pub fn minimal_pair_equiv_probe<F: Field>(pa: &Pair<F>, pb: &Pair<F>) -> ProbeVerdict<F> {
    for (name, p) in [("first", pa), ("second", pb)] {
        if !p.module.is_minimal() || p.algebra.ops().any(|(k, _)| k == 1) {
            return ProbeVerdict::Unknown { reason: format!("{name} pair is not minimal") };
        }
    }
    let (a, b, m, n) = (&pa.algebra, &pb.algebra, &pa.module, &pb.module);
    if a.space.dims() != b.space.dims() {
        return ProbeVerdict::NotEquivalentByInvariants { invariant: "graded dimensions of the algebras".into() };
    }
    if m.space.dims() != n.space.dims() {
        return ProbeVerdict::NotEquivalentByInvariants { invariant: "graded dimensions of the modules".into() };
    }
    if rank_profile(&a.m(2), &a.space, &a.space, &a.space) != rank_profile(&b.m(2), &b.space, &b.space, &b.space) {
        return ProbeVerdict::NotEquivalentByInvariants { invariant: "ranks of the products A_i ⊗ A_j → A_{i+j}".into() };
    }
    if rank_profile(&m.m(2), &m.space, &a.space, &m.space) != rank_profile(&n.m(2), &n.space, &b.space, &n.space) {
        return ProbeVerdict::NotEquivalentByInvariants { invariant: "ranks of the actions M_i ⊗ A_j → M_{i+j}".into() };
    }
    if let (Some(x), Some(y)) = (massey_class_vanishes_mod_automorphisms(m), massey_class_vanishes_mod_automorphisms(n)) {
        if x != y {
            return ProbeVerdict::NotEquivalentByInvariants {
                invariant: "vanishing of the m_3 class modulo algebra automorphisms".into(),
            };
        }
    }
    match find_witness(pa, pb) {
        Ok(Some(morphism)) => ProbeVerdict::EquivalentWitnessed { morphism },
        Ok(None) => ProbeVerdict::Unknown { reason: "invariants agree and no permutation matches".into() },
        Err(reason) => ProbeVerdict::Unknown { reason },
    }
}
