//! Named example structures and random generators used by tests, the command
//! line and the demo.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_chacha::ChaCha8Rng;

use crate::algebra::AInfAlgebra;
use crate::coeff::{Field, Poly, Ring};
use crate::hbar::{DegreeCohomology, PolyComplex};
use crate::graded::{GradedMap, GradedSpace, MultiOp};
use crate::linalg::{Matrix, Vector};
use crate::module::AInfModule;

pub use rand::SeedableRng;

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small random integer in `[-bound, bound]` as a ring element.
pub fn small<R: Ring>(rng: &mut Rng, bound: i64) -> R {
    R::from_int(rng.gen_range(-bound..=bound))
}

fn subset_label(names: &[&str], set: &[usize]) -> String {
    if set.is_empty() {
        "1".to_string()
    } else {
        set.iter().map(|&i| names[i]).collect::<Vec<_>>().join("")
    }
}

/// Exterior algebra on degree-one generators with a differential given on
/// generators as a combination of products of two generators:
/// `diff[g] = [(i, j, c)]` means `d(e_g) = Σ c · e_i e_j`.
/// The differential is extended by the graded Leibniz rule.
pub fn exterior_dga<R: Ring>(names: &[&str], diff: &[Vec<(usize, usize, i64)>]) -> AInfAlgebra<R> {
    let n = names.len();
    let mut subsets: Vec<Vec<usize>> = (0u32..1 << n)
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    let space = GradedSpace::new(subsets.iter().map(|s| (subset_label(names, s), s.len() as i32))).unwrap();
    let index: BTreeMap<Vec<usize>, usize> = subsets.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    // product of wedge monomials: sign of the sorting permutation
    let wedge = |a: &[usize], b: &[usize]| -> Option<(usize, i64)> {
        let mut inversions = 0;
        for &x in a {
            for &y in b {
                if x == y {
                    return None;
                }
                if x > y {
                    inversions += 1;
                }
            }
        }
        let mut u: Vec<usize> = a.iter().chain(b).copied().collect();
        u.sort();
        Some((index[&u], if inversions % 2 == 0 { 1 } else { -1 }))
    };
    let mut m2 = MultiOp::new(2, 0);
    for (i, a) in subsets.iter().enumerate() {
        for (j, b) in subsets.iter().enumerate() {
            if let Some((k, s)) = wedge(a, b) {
                m2.set(vec![i, j], Vector::single(k, R::from_int(s)));
            }
        }
    }
    // d on generators
    let mut dgen: Vec<Vector<R>> = vec![Vector::zero(); n];
    for (g, terms) in diff.iter().enumerate() {
        for &(i, j, c) in terms {
            if let Some((k, s)) = wedge(&[i], &[j]) {
                dgen[g].add_term(k, &R::from_int(c * s));
            }
        }
    }
    // d(e_{i1} … e_{ik}) = Σ_p (−1)^{p} e_{i1..i_{p}} d(e_{i_{p+1}}) e_{rest}
    let mut m1 = MultiOp::new(1, 1);
    for (s_idx, s) in subsets.iter().enumerate() {
        let mut out = Vector::<R>::zero();
        for (p, &g) in s.iter().enumerate() {
            let left = index[&s[..p].to_vec()];
            let right = index[&s[p + 1..].to_vec()];
            let sgn = if p % 2 == 0 { R::one() } else { R::one().neg() };
            for (t, c) in dgen[g].iter() {
                let lt = m2.apply_basis(&[left, t]);
                for (u, c2) in lt.iter() {
                    let v = m2.apply_basis(&[u, right]);
                    out.add_scaled(&v, &c.mul(c2).mul(&sgn));
                }
            }
        }
        m1.set(vec![s_idx], out);
    }
    let mut a = AInfAlgebra::new(space);
    a.set_op(m1).unwrap();
    a.set_op(m2).unwrap();
    a.set_unit("1").unwrap();
    a
}

/// Cohomology of the two-torus: `Λ(e1, e2)` with zero differential.
pub fn fix_t2<R: Ring>() -> AInfAlgebra<R> {
    exterior_dga(&["e1", "e2"], &[vec![], vec![]])
}

/// Cochains of the Heisenberg nilmanifold: `Λ(e1, e2, e3)` with `d e3 = e1 e2`.
pub fn fix_d<R: Ring>() -> AInfAlgebra<R> {
    fix_d_scaled(1)
}

/// `Λ(e1, e2, e3)` with `d e3 = λ e1 e2`.
pub fn fix_d_scaled<R: Ring>(lambda: i64) -> AInfAlgebra<R> {
    exterior_dga(&["e1", "e2", "e3"], &[vec![], vec![], vec![(0, 1, lambda)]])
}

/// Truncated polynomial algebra `k[x]/x^n` with `|x| = degree` and zero differential.
pub fn truncated_polynomial<R: Ring>(n: usize, degree: i32) -> AInfAlgebra<R> {
    let space = GradedSpace::new((0..n).map(|k| (if k == 0 { "1".to_string() } else { format!("x{k}") }, k as i32 * degree))).unwrap();
    let mut m2 = MultiOp::new(2, 0);
    for a in 0..n {
        for b in 0..n - a {
            m2.set(vec![a, b], Vector::basis(a + b));
        }
    }
    let mut alg = AInfAlgebra::new(space).with_op(m2).unwrap();
    alg.set_unit("1").unwrap();
    alg
}

/// `k[x]/x^n` with `|x| = 1` and `d(x^k) = x^{k+1}` for odd `k`.
pub fn odd_power_dga<R: Ring>(n: usize) -> AInfAlgebra<R> {
    let mut a = truncated_polynomial::<R>(n, 1);
    let mut m1 = MultiOp::new(1, 1);
    for k in (1..n - 1).step_by(2) {
        m1.set(vec![k], Vector::basis(k + 1));
    }
    a.set_op(m1).unwrap();
    a
}

/// Upper triangular `2 × 2` matrices, concentrated in degree 0.
pub fn upper_triangular<R: Ring>() -> AInfAlgebra<R> {
    // basis e11, e12, e22
    let space = GradedSpace::new([("e11", 0), ("e12", 0), ("e22", 0)]).unwrap();
    let mut m2 = MultiOp::new(2, 0);
    m2.set(vec![0, 0], Vector::basis(0));
    m2.set(vec![0, 1], Vector::basis(1));
    m2.set(vec![1, 2], Vector::basis(1));
    m2.set(vec![2, 2], Vector::basis(2));
    AInfAlgebra::new(space).with_op(m2).unwrap()
}

/// `k × k`, concentrated in degree 0.
pub fn split_product<R: Ring>() -> AInfAlgebra<R> {
    let space = GradedSpace::new([("p", 0), ("q", 0)]).unwrap();
    let mut m2 = MultiOp::new(2, 0);
    m2.set(vec![0, 0], Vector::basis(0));
    m2.set(vec![1, 1], Vector::basis(1));
    AInfAlgebra::new(space).with_op(m2).unwrap()
}

/// Direct sum `M ⊕ N` of modules over the same algebra.
pub fn direct_sum_modules<R: Ring>(m: &AInfModule<R>, n: &AInfModule<R>) -> AInfModule<R> {
    let (space, first, second) = m.space.direct_sum(&n.space, "'");
    let offset_of = |i: usize| second[i];
    let m_index = |i: usize| first[i];
    let mut out = AInfModule::new(m.algebra.clone(), space.clone());
    if let Some(t) = m.truncation().or(n.truncation()) {
        out.set_truncation(Some(t));
    }
    let max = m.max_arity().max(n.max_arity());
    for k in 1..=max {
        let mut op = MultiOp::new(k, 2 - k as i32);
        if let Some(a) = m.op(k) {
            for (t, v) in a.entries() {
                let mut t2 = t.clone();
                t2[0] = m_index(t[0]);
                op.add_to(&t2, &v.relabel(m_index));
            }
        }
        if let Some(b) = n.op(k) {
            for (t, v) in b.entries() {
                let mut t2 = t.clone();
                t2[0] = offset_of(t[0]);
                op.add_to(&t2, &v.relabel(offset_of));
            }
        }
        out.set_op(op).unwrap();
    }
    out
}

/// Random invertible matrix with small integer entries (unit lower times unit upper).
pub fn random_invertible<R: Ring>(rng: &mut Rng, n: usize, bound: i64) -> Matrix<R> {
    let mut lower = Matrix::identity(n);
    let mut upper = Matrix::identity(n);
    for i in 0..n {
        for j in 0..i {
            lower.set(i, j, small(rng, bound));
            upper.set(j, i, small(rng, bound));
        }
    }
    lower.mul(&upper)
}

/// Random degree-preserving automorphism of a graded space, with its inverse.
pub fn random_graded_automorphism<F: Field>(rng: &mut Rng, space: &GradedSpace, bound: i64) -> (GradedMap<F>, GradedMap<F>) {
    let n = space.dim();
    let mut cols = vec![Vector::zero(); n];
    let mut inv_cols = vec![Vector::zero(); n];
    for d in space.support() {
        let range = space.indices_in(d);
        let p = random_invertible::<F>(rng, range.len(), bound);
        let pinv = p.inverse().expect("unit triangular product is invertible");
        for (jj, j) in range.clone().enumerate() {
            cols[j] = p.column(jj).relabel(|i| i + range.start);
            inv_cols[j] = pinv.column(jj).relabel(|i| i + range.start);
        }
    }
    (
        GradedMap::from_columns(space, space, 0, cols).unwrap(),
        GradedMap::from_columns(space, space, 0, inv_cols).unwrap(),
    )
}

/// Transports every operation along a linear isomorphism `p` (new basis
/// vectors are `p(b_i)`): `m'(x_1,…) = p^{-1} m(p x_1, …)`.
pub fn conjugate_op<R: Ring>(op: &MultiOp<R>, slot_maps: &[&GradedMap<R>], out_inv: &GradedMap<R>) -> MultiOp<R> {
    let k = op.arity();
    let mut out = MultiOp::new(k, op.degree());
    let dims: Vec<usize> = slot_maps.iter().map(|p| p.source.dim()).collect();
    let mut tuple = vec![0usize; k];
    loop {
        let args: Vec<Vector<R>> = tuple.iter().enumerate().map(|(s, &i)| slot_maps[s].column(i).clone()).collect();
        let v = op.apply(&args).unwrap();
        if !v.is_zero() {
            out.set(tuple.clone(), out_inv.apply(&v));
        }
        let mut s = k;
        loop {
            if s == 0 {
                return out;
            }
            s -= 1;
            tuple[s] += 1;
            if tuple[s] < dims[s] {
                break;
            }
            tuple[s] = 0;
        }
    }
}

/// The algebra with every operation transported along `p`.
pub fn conjugate_algebra<R: Ring>(a: &AInfAlgebra<R>, p: &GradedMap<R>, pinv: &GradedMap<R>) -> AInfAlgebra<R> {
    let mut out = match a.truncation() {
        Some(n) => AInfAlgebra::truncated(a.space.clone(), n),
        None => AInfAlgebra::new(a.space.clone()),
    };
    for (k, op) in a.ops() {
        out.set_op(conjugate_op(op, &vec![p; k], pinv)).unwrap();
    }
    out
}

/// The module with its operations transported along `p` on `M` and `q` on `A`
/// (the new algebra must be the correspondingly conjugated one).
pub fn conjugate_module<R: Ring>(
    m: &AInfModule<R>,
    new_algebra: &AInfAlgebra<R>,
    p: &GradedMap<R>,
    pinv: &GradedMap<R>,
    q: &GradedMap<R>,
) -> AInfModule<R> {
    let mut out = match m.truncation() {
        Some(n) => AInfModule::truncated(new_algebra.clone(), m.space.clone(), n),
        None => AInfModule::new(new_algebra.clone(), m.space.clone()),
    };
    for (k, op) in m.ops() {
        let mut maps = vec![p];
        maps.extend(std::iter::repeat(q).take(k - 1));
        out.set_op(conjugate_op(op, &maps, pinv)).unwrap();
    }
    out
}

/// Changes one randomly chosen structure constant of a random nonzero
/// operation (or creates one), keeping degrees consistent.
pub fn mutate_algebra<R: Ring>(rng: &mut Rng, a: &AInfAlgebra<R>) -> AInfAlgebra<R> {
    let mut out = a.clone();
    let ops: Vec<(usize, MultiOp<R>)> = a.ops().map(|(k, op)| (k, op.clone())).collect();
    if let Some((_, op)) = ops.choose(rng) {
        let entries: Vec<(Vec<usize>, Vector<R>)> = op.entries().map(|(t, v)| (t.clone(), v.clone())).collect();
        if let Some((t, v)) = entries.choose(rng) {
            let target: Vec<usize> = a.space.indices_in(a.space.vector_degree(v).unwrap()).collect();
            let i = *target.choose(rng).unwrap();
            let mut op2 = op.clone();
            let mut v2 = v.clone();
            v2.add_term(i, &R::one());
            op2.set(t.clone(), v2);
            out.set_op(op2).unwrap();
        }
    }
    out
}

pub fn mutate_module<R: Ring>(rng: &mut Rng, m: &AInfModule<R>) -> AInfModule<R> {
    let mut out = m.clone();
    let ops: Vec<(usize, MultiOp<R>)> = m.ops().map(|(k, op)| (k, op.clone())).collect();
    if let Some((_, op)) = ops.choose(rng) {
        let entries: Vec<(Vec<usize>, Vector<R>)> = op.entries().map(|(t, v)| (t.clone(), v.clone())).collect();
        if let Some((t, v)) = entries.choose(rng) {
            let target: Vec<usize> = m.space.indices_in(m.space.vector_degree(v).unwrap()).collect();
            let i = *target.choose(rng).unwrap();
            let mut op2 = op.clone();
            let mut v2 = v.clone();
            v2.add_term(i, &R::one());
            op2.set(t.clone(), v2);
            out.set_op(op2).unwrap();
        }
    }
    out
}

/// Random dga from a small family: Chevalley–Eilenberg algebras of
/// triangular nilpotent Lie algebras on at most three generators, the odd
/// power algebra `k[x]/x^5`, truncated polynomial algebras, and exterior
/// algebras, each conjugated by a random graded automorphism.
pub fn random_dga<F: Field>(rng: &mut Rng) -> AInfAlgebra<F> {
    let base: AInfAlgebra<F> = match rng.gen_range(0..5) {
        0 => {
            let c = rng.gen_range(-2..=2);
            exterior_dga(&["a", "b", "c"], &[vec![], vec![], vec![(0, 1, c)]])
        }
        1 => odd_power_dga(5),
        2 => {
            let c = rng.gen_range(-2..=2);
            exterior_dga(&["a", "b"], &[vec![], vec![(0, 1, c)]])
        }
        3 => truncated_polynomial(rng.gen_range(2..=4), rng.gen_range(0..=2)),
        _ => odd_power_dga(rng.gen_range(3..=5)),
    };
    let (p, pinv) = random_graded_automorphism::<F>(rng, &base.space, 2);
    conjugate_algebra(&base, &p, &pinv)
}


/// Random graded associative algebra (only `m_2`): truncated polynomial,
/// exterior, triangular or split algebras, conjugated by a random graded
/// automorphism.
pub fn random_graded_algebra<F: Field>(rng: &mut Rng) -> AInfAlgebra<F> {
    let base: AInfAlgebra<F> = match rng.gen_range(0..5) {
        0 => truncated_polynomial(rng.gen_range(2..=4), rng.gen_range(0..=2)),
        1 => fix_t2(),
        2 => upper_triangular(),
        3 => split_product(),
        _ => exterior_dga(&["a"], &[vec![]]),
    };
    let (p, pinv) = random_graded_automorphism::<F>(rng, &base.space, 2);
    conjugate_algebra(&base, &p, &pinv)
}

/// The regular module with every degree shifted by `shift`. For algebras with
/// a differential this is a module only for even shifts.
pub fn shifted_regular<R: Ring>(a: &AInfAlgebra<R>, shift: i32) -> AInfModule<R> {
    let mut m = AInfModule::new(a.clone(), a.space.shifted(shift));
    for (_, op) in a.ops() {
        m.set_op(op.clone()).expect("shifting keeps degrees of operations");
    }
    m
}

/// Random graded module over a graded algebra: one or two shifted regular
/// modules, conjugated by a random graded automorphism.
pub fn random_graded_module<F: Field>(rng: &mut Rng, a: &AInfAlgebra<F>) -> AInfModule<F> {
    let first = shifted_regular(a, rng.gen_range(-1..=1));
    let base = if rng.gen_bool(0.4) { direct_sum_modules(&first, &shifted_regular(a, rng.gen_range(-1..=1))) } else { first };
    let (p, pinv) = random_graded_automorphism::<F>(rng, &base.space, 2);
    let id = GradedMap::identity(&a.space);
    conjugate_module(&base, a, &p, &pinv, &id)
}

/// `Λ(e1, e2, e3)` with `d e3 = e1 e2` as a right dg module over `Λ(e1, e2)`.
pub fn heisenberg_dg_module<R: Ring>() -> AInfModule<R> {
    let a = fix_t2::<R>();
    let d = fix_d::<R>();
    let to_d: Vec<usize> = (0..a.space.dim()).map(|i| d.space.index_of(a.space.label(i)).unwrap()).collect();
    let full = d.m(2);
    let mut m2 = MultiOp::new(2, 0);
    for x in 0..d.space.dim() {
        for (b, &bd) in to_d.iter().enumerate() {
            let v = full.apply_basis(&[x, bd]);
            if !v.is_zero() {
                m2.set(vec![x, b], v);
            }
        }
    }
    let mut m = AInfModule::new(a, d.space.clone());
    m.set_op(d.m(1)).unwrap();
    m.set_op(m2).unwrap();
    m
}

/// Minimal model of [`heisenberg_dg_module`] over `Λ(e1, e2)`: the cohomology
/// of the Heisenberg nilmanifold with its Massey product as `m3`.
pub fn heisenberg_module<F: Field>() -> AInfModule<F> {
    use crate::transfer::{contraction_from_complex, transfer_pair, PivotOrder};
    let m = heisenberg_dg_module::<F>();
    let ca = contraction_from_complex(&m.algebra.differential(), PivotOrder::Forward).unwrap();
    let cm = contraction_from_complex(&m.differential(), PivotOrder::Forward).unwrap();
    transfer_pair(&m.algebra, &m, &ca, &cm, None).unwrap().module
}

/// The augmentation ideal `(x)/(x^n)` of `k[x]/x^n` with `|x| = degree`, a
/// non-unital graded algebra.
pub fn augmentation_ideal<R: Ring>(n: usize, degree: i32) -> AInfAlgebra<R> {
    let space = GradedSpace::new((1..n).map(|k| (format!("x{k}"), k as i32 * degree))).unwrap();
    let mut m2 = MultiOp::new(2, 0);
    for a in 1..n {
        for b in 1..n - a {
            m2.set(vec![a - 1, b - 1], Vector::basis(a + b - 1));
        }
    }
    AInfAlgebra::new(space).with_op(m2).unwrap()
}

/// `k[x]/x^n` shifted by `shift` as a module over [`augmentation_ideal`].
pub fn truncated_polynomial_module<R: Ring>(a: &AInfAlgebra<R>, n: usize, shift: i32) -> AInfModule<R> {
    let degree = a.space.degree(0);
    let space = GradedSpace::new((0..n).map(|k| (format!("y{k}"), k as i32 * degree + shift))).unwrap();
    let mut m2 = MultiOp::new(2, 0);
    for k in 0..n {
        for b in 1..n - k {
            m2.set(vec![k, b - 1], Vector::basis(k + b));
        }
    }
    AInfModule::new(a.clone(), space).with_op(m2).unwrap()
}

/// Random homogeneous operation on the given slots with small integer entries.
pub fn random_op<R: Ring>(rng: &mut Rng, slots: &[&GradedSpace], target: &GradedSpace, degree: i32, density: f64) -> MultiOp<R> {
    let allowed: std::collections::BTreeSet<i32> = target.support().into_iter().map(|d| d - degree).collect();
    let mut op = MultiOp::new(slots.len(), degree);
    for tuple in crate::graded::tensor_basis(slots, Some(&allowed)) {
        let d: i32 = tuple.iter().enumerate().map(|(s, &i)| slots[s].degree(i)).sum::<i32>() + degree;
        let mut v = Vector::zero();
        for y in target.indices_in(d) {
            if rng.gen_bool(density) {
                v.add_term(y, &small::<R>(rng, 2));
            }
        }
        op.set(tuple, v);
    }
    op
}

/// A minimal module that is formal by construction: an associative module
/// over a non-unital graded algebra, transported along a random morphism
/// `(id, f_2, f_3)`. Returns the module with its associated graded module.
pub fn random_formal_module<F: Field>(rng: &mut Rng) -> (AInfModule<F>, AInfModule<F>) {
    use crate::module::ModMorphism;
    let n = rng.gen_range(2..=3);
    let a = augmentation_ideal::<F>(n, 2);
    let mut m0 = truncated_polynomial_module(&a, n, 0);
    for _ in 0..rng.gen_range(0..=1) {
        m0 = direct_sum_modules(&m0, &truncated_polynomial_module(&a, n, rng.gen_range(1..=3)));
    }
    let (p, pinv) = random_graded_automorphism::<F>(rng, &m0.space, 2);
    m0 = conjugate_module(&m0, &a, &p, &pinv, &GradedMap::identity(&a.space));
    let bound = m0.saturation_bound().finite().expect("positive algebra degrees").max(2);
    let mut f = ModMorphism::identity(&m0);
    for k in 2..=bound.min(4) {
        f.set_comp(random_op(rng, &m0.slots(k), &m0.space, 1 - k as i32, 0.5)).unwrap();
    }
    let m = crate::formality::transport_along(&f, bound).unwrap();
    let mut m = m;
    m.set_truncation(None);
    (m, m0)
}

/// Random polynomial of degree at most `max_degree` with small coefficients.
pub fn random_poly<F: Field>(rng: &mut Rng, max_degree: usize) -> Poly<F> {
    let d = rng.gen_range(0..=max_degree);
    Poly::from_coeffs((0..=d).map(|_| small::<F>(rng, 3)).collect())
}

/// Random `rows × cols` polynomial matrix; each entry is zero with
/// probability `1 − density`.
pub fn random_poly_matrix<F: Field>(rng: &mut Rng, rows: usize, cols: usize, max_degree: usize, density: f64) -> Matrix<Poly<F>> {
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            if rng.gen_bool(density) {
                m.set(i, j, random_poly(rng, max_degree));
            }
        }
    }
    m
}

/// Random unimodular matrix over `F[h]` and its inverse, as a product of
/// elementary matrices.
pub fn random_unimodular<F: Field>(rng: &mut Rng, n: usize, steps: usize) -> (Matrix<Poly<F>>, Matrix<Poly<F>>) {
    let mut g = Matrix::identity(n);
    let mut g_inv = Matrix::identity(n);
    if n < 2 {
        return (g, g_inv);
    }
    for _ in 0..steps {
        let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if s == t {
            continue;
        }
        let c: Poly<F> = random_poly(rng, 1);
        // g ← E g with E = 1 + c e_{ts}, and g⁻¹ ← g⁻¹ E⁻¹
        g.add_row_multiple(t, s, &c);
        g_inv.add_col_multiple(s, t, &c.neg());
    }
    (g, g_inv)
}

/// Random complex in degrees `0..=2` built from elementary pieces `F[h]` and
/// `F[h] →(e) F[h]` with `e` a random multiple of a power of `h`, hidden by
/// random unimodular changes of basis. Returns the complex together with
/// the decomposition it was built from.
pub fn random_poly_complex<F: Field>(rng: &mut Rng) -> (PolyComplex<F>, BTreeMap<i32, DegreeCohomology>) {
    let mut ranks = [0usize; 3];
    let mut arrows: Vec<(usize, usize, usize, Poly<F>)> = Vec::new();
    let mut expected: BTreeMap<i32, DegreeCohomology> =
        (0..3).map(|i| (i, DegreeCohomology { free_rank: 0, torsion: Vec::new() })).collect();
    for _ in 0..rng.gen_range(1..=4) {
        let i = rng.gen_range(0..3);
        if i < 2 && rng.gen_bool(0.6) {
            let k = rng.gen_range(0..=2);
            let mut e = Poly::monomial(F::one(), k);
            if rng.gen_bool(0.3) {
                // a factor prime to h is a unit at h = 0
                e = e.mul(&Poly::from_coeffs(vec![F::one(), F::one()]));
            }
            arrows.push((i, ranks[i], ranks[i + 1], e));
            if k > 0 {
                expected.get_mut(&(i as i32 + 1)).unwrap().torsion.push(k);
            }
            ranks[i] += 1;
            ranks[i + 1] += 1;
        } else {
            expected.get_mut(&(i as i32)).unwrap().free_rank += 1;
            ranks[i] += 1;
        }
    }
    let mut diffs: Vec<Matrix<Poly<F>>> = (0..2).map(|i| Matrix::zeros(ranks[i + 1], ranks[i])).collect();
    for (i, col, row, e) in arrows {
        diffs[i].set(row, col, e);
    }
    let bases: Vec<_> = ranks.iter().map(|&n| random_unimodular::<F>(rng, n, 2 * n)).collect();
    let mut out = BTreeMap::new();
    for (i, d) in diffs.into_iter().enumerate() {
        out.insert(i as i32, bases[i + 1].0.mul(&d).mul(&bases[i].1));
    }
    for d in expected.values_mut() {
        d.torsion.sort_unstable();
    }
    let ranks = ranks.iter().enumerate().map(|(i, &n)| (i as i32, n)).collect();
    let expected = expected.into_iter().filter(|&(i, _)| ranks_nonzero(&ranks, i)).collect();
    (PolyComplex::new(ranks, out).expect("conjugated elementary complexes are complexes"), expected)
}

fn ranks_nonzero(ranks: &BTreeMap<i32, usize>, i: i32) -> bool {
    ranks.get(&i).is_some_and(|&n| n > 0)
}

/// A formal family over `A[h]`: the structure `M0[h]` transported along
/// `(id, f_2, …)` with components `a_k + b_k h`, so every fibre is formal and
/// the special fibre keeps nonzero higher operations in general.
/// Returns `(M, M0[h])`.
pub fn random_formal_family<F: Field>(rng: &mut Rng) -> (AInfModule<Poly<F>>, AInfModule<Poly<F>>) {
    use crate::module::ModMorphism;
    let (_, m0) = random_formal_module::<F>(rng);
    let m0 = m0.map_scalars(|c| Poly::constant(c.clone()));
    let bound = m0.saturation_bound().finite().expect("positive algebra degrees").max(2);
    let mut f = ModMorphism::identity(&m0);
    for k in 2..=bound.min(4) {
        let a = random_op::<F>(rng, &m0.slots(k), &m0.space, 1 - k as i32, 0.5);
        let b = random_op::<F>(rng, &m0.slots(k), &m0.space, 1 - k as i32, 0.5);
        let op = a.map_scalars(|c| Poly::constant(c.clone())).add(&b.map_scalars(|c| Poly::monomial(c.clone(), 1)));
        f.set_comp(op).unwrap();
    }
    let mut m = crate::formality::transport_along(&f, bound).unwrap();
    m.set_truncation(None);
    (m, m0)
}
