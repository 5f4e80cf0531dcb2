use ainf::coeff::{
    base_change_scalar, eval_at, Coefficientwise, EvalAt, FractionEmbed, Fp, Poly, RatFunc, ReduceModP, Ring, Trunc,
    Truncate, Q,
};
use ainf::document::{parse, serialize, Document};
use ainf::fixtures::{self, rng};
use ainf::graded::{desuspend_op, suspend_op, GradedSpace};
use ainf::hbar::smith_normal_form;
use ainf::hochschild::HochschildComplex;
use ainf::linalg::{Matrix, Vector};
use proptest::prelude::*;
use rand::Rng as _;

fn q() -> impl Strategy<Value = Q> {
    (-30i64..=30, 1i64..=12).prop_map(|(n, d)| Q::new(n, d))
}

fn f7() -> impl Strategy<Value = Fp<7>> {
    (0i64..7).prop_map(Fp::new)
}

fn poly() -> impl Strategy<Value = Poly<Q>> {
    prop::collection::vec(q(), 0..5).prop_map(Poly::from_coeffs)
}

fn poly_f7() -> impl Strategy<Value = Poly<Fp<7>>> {
    prop::collection::vec(f7(), 0..5).prop_map(Poly::from_coeffs)
}

fn jet() -> impl Strategy<Value = Trunc<Q, 4>> {
    prop::collection::vec(q(), 0..7).prop_map(Trunc::from_coeffs)
}

fn ratfunc() -> impl Strategy<Value = RatFunc<Q>> {
    (poly(), poly().prop_filter("nonzero denominator", |d| !d.is_zero())).prop_map(|(n, d)| RatFunc::new(n, d))
}

fn axioms<R: Ring>(a: &R, b: &R, c: &R) {
    assert_eq!(a.add(b), b.add(a));
    assert_eq!(a.mul(b), b.mul(a));
    assert_eq!(a.add(b).add(c), a.add(&b.add(c)));
    assert_eq!(a.mul(b).mul(c), a.mul(&b.mul(c)));
    assert_eq!(a.mul(&b.add(c)), a.mul(b).add(&a.mul(c)));
    assert_eq!(a.add(&R::zero()), *a);
    assert_eq!(a.mul(&R::one()), *a);
    assert!(a.add(&a.neg()).is_zero());
    assert_eq!(a.sub(b), a.add(&b.neg()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rationals_form_a_ring(a in q(), b in q(), c in q()) { axioms(&a, &b, &c); }

    #[test]
    fn prime_field_forms_a_ring(a in f7(), b in f7(), c in f7()) { axioms(&a, &b, &c); }

    #[test]
    fn polynomials_form_a_ring(a in poly(), b in poly(), c in poly()) { axioms(&a, &b, &c); }

    #[test]
    fn polynomials_mod_p_form_a_ring(a in poly_f7(), b in poly_f7(), c in poly_f7()) { axioms(&a, &b, &c); }

    #[test]
    fn jets_form_a_ring(a in jet(), b in jet(), c in jet()) { axioms(&a, &b, &c); }

    #[test]
    fn rational_functions_form_a_ring(a in ratfunc(), b in ratfunc(), c in ratfunc()) { axioms(&a, &b, &c); }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn evaluation_is_a_ring_homomorphism(a in poly(), b in poly(), t in q()) {
        prop_assert_eq!(eval_at(&a.add(&b), &t), eval_at(&a, &t).add(&eval_at(&b, &t)));
        prop_assert_eq!(eval_at(&a.mul(&b), &t), eval_at(&a, &t).mul(&eval_at(&b, &t)));
        prop_assert_eq!(eval_at(&Poly::one(), &t), Q::one());
        let via_map: Q = base_change_scalar(&a, &EvalAt(t.clone())).unwrap();
        prop_assert_eq!(via_map, eval_at(&a, &t));
    }

    #[test]
    fn base_changes_are_ring_homomorphisms(a in poly(), b in poly()) {
        fn check<T: Ring>(f: impl Fn(&Poly<Q>) -> T, a: &Poly<Q>, b: &Poly<Q>) {
            assert_eq!(f(&a.add(b)), f(a).add(&f(b)));
            assert_eq!(f(&a.mul(b)), f(a).mul(&f(b)));
            assert_eq!(f(&Poly::one()), T::one());
        }
        check(|p| base_change_scalar::<_, RatFunc<Q>, _>(p, &FractionEmbed).unwrap(), &a, &b);
        check(|p| base_change_scalar::<_, Trunc<Q, 3>, _>(p, &Truncate).unwrap(), &a, &b);
    }

    #[test]
    fn reduction_mod_p_is_a_ring_homomorphism(n in -200i64..200, m in -200i64..200, d in 1i64..=14) {
        let (a, b) = (Poly::from_coeffs(vec![Q::from_int(n), Q::new(m, d)]), Poly::from_coeffs(vec![Q::new(n, d)]));
        let red = |p: &Poly<Q>| base_change_scalar::<_, Poly<Fp<7>>, _>(p, &Coefficientwise(ReduceModP));
        // defined exactly when 7 does not divide the denominator
        let (Ok(ra), Ok(rb)) = (red(&a), red(&b)) else { return Ok(()) };
        prop_assert_eq!(red(&a.add(&b)).unwrap(), ra.add(&rb));
        prop_assert_eq!(red(&a.mul(&b)).unwrap(), ra.mul(&rb));
    }

    #[test]
    fn canonical_forms_are_idempotent(a in poly(), f in ratfunc(), j in jet()) {
        prop_assert_eq!(Poly::from_coeffs(a.coeffs().to_vec()), a.clone());
        prop_assert_eq!(RatFunc::new(f.numer().clone(), f.denom().clone()), f.clone());
        prop_assert_eq!(Trunc::<Q, 4>::from_coeffs(j.coeffs().to_vec()), j.clone());
        prop_assert_eq!(Q::from_json(&a.coeff(0).to_json()).unwrap(), a.coeff(0));
        prop_assert_eq!(Poly::<Q>::from_json(&a.to_json()).unwrap(), a);
        prop_assert_eq!(RatFunc::<Q>::from_json(&f.to_json()).unwrap(), f);
    }
}

fn random_space(r: &mut fixtures::Rng) -> GradedSpace {
    let basis: Vec<(String, i32)> = (0..r.gen_range(1..=5)).map(|i| (format!("v{i}"), r.gen_range(-1..=3))).collect();
    GradedSpace::new(basis).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn suspension_round_trips(seed in any::<u64>(), k in 1usize..=3, degree in -2i32..=2) {
        let mut r = rng(seed);
        let s = random_space(&mut r);
        let slots = vec![&s; k];
        let op = fixtures::random_op::<Q>(&mut r, &slots, &s, degree, 0.5);
        op.validate(&slots, &s).unwrap();
        let d = suspend_op(&op, &slots);
        prop_assert_eq!(d.degree(), degree + k as i32 - 1);
        prop_assert_eq!(desuspend_op(&d, &slots), op);
    }

    #[test]
    fn hochschild_differential_squares_to_zero(seed in any::<u64>(), p in 0usize..=2, q in -2i32..=1) {
        let mut r = rng(seed);
        let a = fixtures::random_graded_algebra::<Q>(&mut r);
        let m = fixtures::random_graded_module(&mut r, &a);
        for cx in [HochschildComplex::module(&m), HochschildComplex::algebra(&a)] {
            let basis = cx.basis(p, q);
            let mut v = Vector::zero();
            for i in 0..basis.len() {
                if r.gen_bool(0.5) {
                    v.add_term(i, &fixtures::small::<Q>(&mut r, 3));
                }
            }
            let c = cx.from_coordinates(&basis, &v);
            let dd = cx.d(&cx.d(&c));
            prop_assert!(dd.is_zero());
            prop_assert_eq!((dd.p, dd.q), (p + 2, q));
        }
    }

    #[test]
    fn smith_form_is_sound(seed in any::<u64>(), rows in 1usize..=4, cols in 1usize..=4) {
        let m = fixtures::random_poly_matrix::<Q>(&mut rng(seed), rows, cols, 3, 0.7);
        let s = smith_normal_form(&m);
        prop_assert_eq!(s.u.mul(&s.d).mul(&s.v), m);
        prop_assert_eq!(s.u_inv.mul(&s.u), Matrix::identity(rows));
        prop_assert_eq!(s.v.mul(&s.v_inv), Matrix::identity(cols));
        let f = s.invariant_factors();
        prop_assert!(f.windows(2).all(|w| w[0].divides(&w[1])));
    }

    #[test]
    fn documents_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = fixtures::random_dga::<Q>(&mut r);
        let g = fixtures::random_graded_algebra::<Q>(&mut r);
        let m = fixtures::random_graded_module(&mut r, &g);
        for doc in [Document::encode(&a), Document::encode(&m)] {
            let text = serialize(&doc);
            let once = parse(&text).unwrap();
            prop_assert_eq!(&once, &doc);
            prop_assert_eq!(serialize(&parse(&serialize(&once)).unwrap()), text);
        }
        prop_assert_eq!(Document::encode(&m).decode::<ainf::module::AInfModule<Q>>().unwrap(), m);
    }
}
