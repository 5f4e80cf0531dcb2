use ainf::algebra::AInfAlgebra;
use ainf::coeff::{EvalAt, Identity, Poly, Ring, Q};
use ainf::fixtures::{self, rng, Rng};
use ainf::graded::{GradedSpace, MultiOp};
use ainf::hochschild::{base_change_cochain_complex, ComplexKind, HochschildCochain, HochschildComplex};
use ainf::linalg::{Matrix, Vector};
use ainf::module::AInfModule;
use rand::Rng as _;

fn random_cochain(r: &mut Rng, cx: &HochschildComplex<Q>, p: usize, q: i32) -> HochschildCochain<Q> {
    let basis = cx.basis(p, q);
    let mut v = Vector::zero();
    for i in 0..basis.len() {
        if r.gen_bool(0.3) {
            v.add_term(i, &fixtures::small(r, 3));
        }
    }
    cx.from_coordinates(&basis, &v)
}

fn random_complex(r: &mut Rng) -> HochschildComplex<Q> {
    let a = fixtures::random_graded_algebra::<Q>(r);
    match r.gen_range(0..3) {
        0 => HochschildComplex::algebra(&a),
        1 => HochschildComplex::module(&fixtures::random_graded_module(r, &a)),
        _ => {
            let m = fixtures::random_graded_module(r, &a);
            let n = fixtures::random_graded_module(r, &a);
            HochschildComplex::module_pair(&a, &m, &n).unwrap()
        }
    }
}

#[test]
fn differential_squares_to_zero() {
    let mut r = rng(21);
    let mut checked = 0;
    while checked < 200 {
        let cx = random_complex(&mut r);
        let p = r.gen_range(0..=2);
        let q = r.gen_range(-2..=2);
        let c = random_cochain(&mut r, &cx, p, q);
        let dd = cx.d(&cx.d(&c));
        assert!(dd.is_zero(), "d² ≠ 0 for {:?} at ({p},{q})", cx.kind);
        checked += 1;
    }
}

#[test]
fn matrix_agrees_with_direct_differential() {
    let mut r = rng(22);
    for _ in 0..40 {
        let cx = random_complex(&mut r);
        let p = r.gen_range(0..=2);
        let q = r.gen_range(-1..=1);
        let c = random_cochain(&mut r, &cx, p, q);
        let (dom, cod, cols) = cx.d_matrix(p, q);
        let x = cx.coordinates(&dom, &c);
        let mut y = Vector::zero();
        for (j, a) in x.iter() {
            y.add_scaled(&cols[j], a);
        }
        assert_eq!(cx.from_coordinates(&cod, &y), cx.d(&c));
    }
}

/// `k[x]/x^3` in degree 0 acting on itself.
fn cubic() -> (AInfAlgebra<Q>, AInfModule<Q>) {
    let a = fixtures::truncated_polynomial::<Q>(3, 0);
    let m = AInfModule::regular(&a);
    (a, m)
}

#[test]
fn zero_zero_cocycles_are_module_maps() {
    let (_, m) = cubic();
    let cx = HochschildComplex::module(&m);
    let m2 = m.m(2);
    let mut r = rng(3);
    let mut linear = 0;
    for _ in 0..60 {
        // half the samples are module maps by construction: left multiplication
        let c = if r.gen_bool(0.5) {
            let y: Vector<Q> = (0..3).map(|i| (i, fixtures::small::<Q>(&mut r, 2))).collect();
            let mut body = MultiOp::new(1, 0);
            for x in 0..3 {
                body.set(vec![x], m2.apply(&[y.clone(), Vector::basis(x)]).unwrap());
            }
            cx.cochain(0, body).unwrap()
        } else {
            random_cochain(&mut r, &cx, 0, 0)
        };
        let commutes = (0..3).all(|x| {
            (0..3).all(|a| {
                let lhs = c.body.apply(&[m2.apply_basis(&[x, a])]).unwrap();
                let rhs = m2.apply(&[c.body.apply_basis(&[x]), Vector::basis(a)]).unwrap();
                lhs == rhs
            })
        });
        assert_eq!(cx.is_cocycle(&c), commutes);
        linear += commutes as usize;
    }
    assert!(linear >= 20);
    // module endomorphisms of the regular module are left multiplications
    assert_eq!(cx.hh_dim(0, 0), 3);
}

#[test]
fn one_zero_cocycles_satisfy_derivation_identity() {
    let (_, m) = cubic();
    let cx = HochschildComplex::module(&m);
    let m2 = m.m(2);
    let mut r = rng(4);
    let mut seen = [0usize; 2];
    for k in 0..80 {
        let c = if k % 2 == 0 {
            // coboundaries are cocycles
            cx.d(&random_cochain(&mut r, &cx, 0, 0))
        } else {
            random_cochain(&mut r, &cx, 1, 0)
        };
        let f = |x: &Vector<Q>, a: &Vector<Q>| c.body.apply(&[x.clone(), a.clone()]).unwrap();
        let mul = |x: &Vector<Q>, a: &Vector<Q>| m2.apply(&[x.clone(), a.clone()]).unwrap();
        let identity = (0..3).all(|x| {
            (0..3).all(|a| {
                (0..3).all(|b| {
                    let (x, a, b) = (Vector::basis(x), Vector::basis(a), Vector::basis(b));
                    mul(&f(&x, &a), &b).plus(&f(&mul(&x, &a), &b)) == f(&x, &mul(&a, &b))
                })
            })
        });
        assert_eq!(cx.is_cocycle(&c), identity);
        seen[identity as usize] += 1;
    }
    assert!(seen[0] > 10 && seen[1] > 10);
}

#[test]
fn ground_field_against_hand_built_matrices() {
    let k = fixtures::truncated_polynomial::<Q>(1, 0);
    let cx = HochschildComplex::module(&AInfModule::regular(&k));
    // every C^{p,0} is one-dimensional and d_p is multiplication by
    // Σ_{j=0}^{p} (−1)^{p−j} − 1, i.e. 0 for even p and −1 for odd p
    let dense = |p: usize| Matrix::from_rows(vec![vec![if p % 2 == 0 { Q::zero() } else { Q::from_int(-1) }]]);
    for p in 0..5usize {
        let (_, _, cols) = cx.d_matrix(p, 0);
        assert_eq!(Matrix::from_columns(1, &cols), dense(p));
        let kernel = 1 - dense(p).rank();
        let image = if p == 0 { 0 } else { dense(p - 1).rank() };
        assert_eq!(cx.hh_dim(p, 0), kernel - image, "p = {p}");
    }
}

#[test]
fn infinitesimal_deformation_class() {
    // k[x]/x² acting on k by zero; letting x act by ε deforms the module
    let a = fixtures::truncated_polynomial::<Q>(2, 0);
    let space = GradedSpace::new([("v", 0)]).unwrap();
    let mut act = MultiOp::new(2, 0);
    act.set(vec![0, 0], Vector::basis(0));
    let m = AInfModule::new(a.clone(), space).with_op(act).unwrap();
    let cx = HochschildComplex::module(&m);
    let mut body = MultiOp::new(2, 0);
    body.set(vec![0, 1], Vector::basis(0));
    let c = cx.cochain(1, body).unwrap();
    assert!(cx.is_cocycle(&c));
    assert!(!cx.is_coboundary(&c));
    assert!(cx.hh_dim(1, 0) >= 1);
}

#[test]
fn heisenberg_derived_deformations() {
    let hm = fixtures::heisenberg_module::<Q>();
    assert!(hm.op(3).is_some_and(|op| !op.is_zero()));
    let hm2 = hm.truncate_to_m2().unwrap();
    let cx = HochschildComplex::module(&hm2);
    // dense rank oracle
    let rank = |p: usize, q: i32| {
        let (_, cod, cols) = cx.d_matrix(p, q);
        Matrix::from_columns(cod.len(), &cols).rank()
    };
    for (p, q) in [(0, 0), (1, -1), (2, -1), (1, 0)] {
        let dim = cx.hh_dim(p, q);
        let below = if p == 0 { 0 } else { rank(p - 1, q) };
        assert_eq!(dim, cx.basis(p, q).len() - rank(p, q) - below, "({p},{q})");
    }
    assert!(cx.hh_dim(1, -1) > 0);
    // the Massey product is a nontrivial class
    let m3 = cx.cochain(2, hm.m(3)).unwrap();
    assert!(cx.is_cocycle(&m3));
    assert!(!cx.is_coboundary(&m3));
}

#[test]
fn base_change_is_entrywise() {
    let a = fixtures::truncated_polynomial::<Poly<Q>>(3, 0);
    let mut m2 = a.m(2);
    // deform x·x = x² into (1 + h)x²
    let (x1, x2) = (a.space.index_of("x1").unwrap(), a.space.index_of("x2").unwrap());
    let h1 = Poly::from_coeffs(vec![Q::one(), Q::one()]);
    m2.set(vec![x1, x1], Vector::single(x2, h1));
    let mut ah = a.clone();
    ah.set_op(m2).unwrap();
    let cx = HochschildComplex::module(&AInfModule::regular(&ah));
    let same = base_change_cochain_complex(&cx, &Identity).unwrap();
    assert_eq!(same, cx);
    let at0 = base_change_cochain_complex(&cx, &EvalAt(Q::zero())).unwrap();
    for p in 0..3 {
        let (_, _, cols) = cx.d_matrix(p, 0);
        let (_, _, cols0) = at0.d_matrix(p, 0);
        let evaluated: Vec<Vector<Q>> = cols.iter().map(|c| c.map_scalars(|s| s.eval(&Q::zero()))).collect();
        assert_eq!(cols0, evaluated);
    }
    let _ = ComplexKind::Module;
}
