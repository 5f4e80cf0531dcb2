use ainf::algebra::AInfAlgebra;
use ainf::coeff::{Ring, Trunc, Q};
use ainf::fixtures::{self, rng, Rng};
use ainf::formality::{coefficient_op, trivialize_truncated_deformation, Trivialization};
use ainf::graded::{GradedMap, MultiOp};
use ainf::hochschild::HochschildComplex;
use ainf::linalg::Vector;
use rand::Rng as _;

type T = Trunc<Q, 4>;

fn lift(op: &MultiOp<Q>) -> MultiOp<T> {
    op.map_scalars(|c| T::constant(c.clone()))
}

/// Random gauge `id + Σ_{r=1}^{3} g_r h^r` and its inverse `Σ_k (−n)^k`.
fn random_gauge(r: &mut Rng, a: &AInfAlgebra<Q>) -> (GradedMap<T>, GradedMap<T>) {
    let id = GradedMap::<T>::identity(&a.space);
    let mut n = GradedMap::<T>::zero(&a.space, &a.space, 0);
    for order in 1..4 {
        if r.gen_bool(0.7) {
            let g = fixtures::random_op::<Q>(r, &[&a.space], &a.space, 0, 0.5);
            let g = GradedMap::from_op(&g, &a.space, &a.space).unwrap();
            n = n.add(&g.map_scalars(|c| T::monomial(c.clone(), order))).unwrap();
        }
    }
    let minus_n = n.scale(&T::from_int(-1));
    let mut inv = id.clone();
    let mut power = id.clone();
    for _ in 0..4 {
        power = minus_n.compose(&power).unwrap();
        inv = inv.add(&power).unwrap();
    }
    (id.add(&n).unwrap(), inv)
}

/// `g(m0(g⁻¹x, g⁻¹y))` evaluated directly.
fn push_forward(m0: &MultiOp<T>, g: &GradedMap<T>, g_inv: &GradedMap<T>, dim: usize) -> MultiOp<T> {
    let mut out = MultiOp::new(2, 0);
    for x in 0..dim {
        for y in 0..dim {
            let v = g.apply(&m0.apply(&[g_inv.column(x).clone(), g_inv.column(y).clone()]).unwrap());
            out.set(vec![x, y], v);
        }
    }
    out
}

fn base_algebras() -> Vec<AInfAlgebra<Q>> {
    vec![
        fixtures::truncated_polynomial(3, 0),
        fixtures::truncated_polynomial(4, 0),
        fixtures::upper_triangular(),
        fixtures::split_product(),
        fixtures::fix_t2(),
    ]
}

#[test]
fn undeformed_product_needs_no_gauge() {
    let a = fixtures::truncated_polynomial::<Q>(3, 0);
    let t = trivialize_truncated_deformation::<Q, 4>(&a, &lift(&a.m(2))).unwrap();
    assert_eq!(t, Trivialization::Trivial { gauge: GradedMap::identity(&a.space) });
}

#[test]
fn gauge_equivalent_deformations_are_trivialized() {
    let mut r = rng(51);
    let mut count = 0;
    for a in base_algebras().iter().cycle().take(25) {
        let (g, g_inv) = random_gauge(&mut r, a);
        let m0 = lift(&a.m(2));
        let mh = push_forward(&m0, &g, &g_inv, a.space.dim());
        let Trivialization::Trivial { gauge } = trivialize_truncated_deformation::<Q, 4>(a, &mh).unwrap() else {
            panic!("gauge-equivalent deformation reported as obstructed");
        };
        // expansion check: m_h(ψx, ψy) = ψ(m_0(x, y)) on every basis pair
        for x in 0..a.space.dim() {
            for y in 0..a.space.dim() {
                let lhs = mh.apply(&[gauge.column(x).clone(), gauge.column(y).clone()]).unwrap();
                let rhs = gauge.apply(&m0.apply_basis(&[x, y]));
                assert_eq!(lhs, rhs);
            }
        }
        count += (mh != m0) as usize;
    }
    assert!(count >= 20);
}

#[test]
fn nontrivial_deformation_is_obstructed() {
    // k[x]/x² deformed to k[x]/(x² − h)
    let a = fixtures::truncated_polynomial::<Q>(2, 0);
    let (one, x) = (a.space.index_of("1").unwrap(), a.space.index_of("x1").unwrap());
    let mut mh = lift(&a.m(2));
    mh.set(vec![x, x], Vector::single(one, T::monomial(Q::one(), 1)));
    let Trivialization::Obstructed { order, class, .. } = trivialize_truncated_deformation::<Q, 4>(&a, &mh).unwrap() else {
        panic!("expected an obstruction");
    };
    assert_eq!(order, 1);
    assert_eq!(class.body, coefficient_op(&mh, 1));
    let cx = HochschildComplex::algebra(&a);
    assert!(cx.is_cocycle(&class));
    assert!(!cx.is_coboundary(&class));
    assert!(cx.hh_dim(2, 0) >= 1);
}

#[test]
fn non_associative_input_is_rejected() {
    let a = fixtures::truncated_polynomial::<Q>(3, 0);
    let (x1, x2) = (a.space.index_of("x1").unwrap(), a.space.index_of("x2").unwrap());
    let mut mh = lift(&a.m(2));
    // x·(x·x) = h x but (x·x)·x = 0
    mh.set(vec![x1, x2], Vector::single(x1, T::monomial(Q::one(), 1)));
    assert!(trivialize_truncated_deformation::<Q, 4>(&a, &mh).is_err());
}
