use std::collections::BTreeMap;

use ainf::coeff::{Poly, Ring, Q};
use ainf::fixtures::{self, rng};
use ainf::hbar::{
    fibre_dims, freeness_test, poly_cohomology, smith_normal_form, solve_over_poly, two_term, DegreeCohomology, Fibre,
    Freeness, PolyComplex,
};
use ainf::linalg::{Matrix, Vector};
use rand::Rng as _;

type P = Poly<Q>;

fn h(k: usize) -> P {
    P::monomial(Q::one(), k)
}

fn c(v: i64) -> P {
    P::from_int(v)
}

fn det(m: &Matrix<P>) -> P {
    let n = m.rows();
    if n == 0 {
        return P::one();
    }
    let mut acc = P::zero();
    for j in 0..n {
        if m.get(0, j).is_zero() {
            continue;
        }
        let minor = Matrix::from_rows(
            (1..n).map(|i| (0..n).filter(|&k| k != j).map(|k| m.get(i, k).clone()).collect()).collect(),
        );
        let term = m.get(0, j).mul(&det(&minor));
        acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    (k - 1..n)
        .flat_map(|last| {
            subsets(last, k - 1).into_iter().map(move |mut s| {
                s.push(last);
                s
            })
        })
        .collect()
}

/// Monic gcd of all `k × k` minors.
fn determinantal_divisor(m: &Matrix<P>, k: usize) -> P {
    let mut g = P::zero();
    for rs in subsets(m.rows(), k) {
        for cs in subsets(m.cols(), k) {
            let sub = Matrix::from_rows(rs.iter().map(|&i| cs.iter().map(|&j| m.get(i, j).clone()).collect()).collect());
            g = P::gcd(&g, &det(&sub));
        }
    }
    g
}

#[test]
fn diagonal_input_is_normalized() {
    let m = Matrix::from_rows(vec![vec![h(1).scale(&Q::from_int(3)), P::zero()], vec![P::zero(), h(2).scale(&Q::from_int(-2))]]);
    let s = smith_normal_form(&m);
    assert_eq!(s.d, Matrix::from_rows(vec![vec![h(1), P::zero()], vec![P::zero(), h(2)]]));
    let already = Matrix::from_rows(vec![vec![h(1), P::zero()], vec![P::zero(), h(2)]]);
    assert_eq!(smith_normal_form(&already).d, already);
}

#[test]
fn smith_form_is_sound_on_random_matrices() {
    let mut r = rng(61);
    for _ in 0..120 {
        let (rows, cols) = (r.gen_range(1..=5), r.gen_range(1..=5));
        let density = r.gen_range(0.3..1.0);
        let m = fixtures::random_poly_matrix::<Q>(&mut r, rows, cols, 4, density);
        let s = smith_normal_form(&m);
        assert_eq!(s.u.mul(&s.d).mul(&s.v), m);
        assert_eq!(s.u.mul(&s.u_inv), Matrix::identity(rows));
        assert_eq!(s.v.mul(&s.v_inv), Matrix::identity(cols));
        for i in 0..rows {
            for j in 0..cols {
                assert!(i == j || s.d.get(i, j).is_zero());
            }
        }
        let f = s.invariant_factors();
        assert!(f.iter().all(|e| e.leading().is_some_and(|l| l.is_one())));
        assert!(f.windows(2).all(|w| w[0].divides(&w[1])));
        assert!((f.len()..rows.min(cols)).all(|i| s.d.get(i, i).is_zero()));
        // unit determinants
        assert_eq!(det(&s.u).degree(), Some(0));
        assert_eq!(det(&s.v).degree(), Some(0));
        // d_1 ⋯ d_k is the k-th determinantal divisor
        let mut prod = P::one();
        for k in 1..=rows.min(cols) {
            let dk = determinantal_divisor(&m, k);
            if k <= f.len() {
                prod = prod.mul(&f[k - 1]);
                assert_eq!(prod, dk);
            } else {
                assert!(dk.is_zero());
            }
        }
    }
}

#[test]
fn solving_over_the_polynomial_ring() {
    let mut r = rng(62);
    for _ in 0..40 {
        let m = fixtures::random_poly_matrix::<Q>(&mut r, 3, 4, 2, 0.7);
        let x: Vector<P> = (0..4).map(|i| (i, fixtures::random_poly::<Q>(&mut r, 2))).collect();
        let b = m.apply(&x);
        let y = solve_over_poly(&m, &b).expect("b is in the image");
        assert_eq!(m.apply(&y), b);
    }
    // h·x = 1 has no solution over F[h]
    let m = Matrix::from_rows(vec![vec![h(1)]]);
    assert_eq!(solve_over_poly(&m, &Vector::single(0, P::one())), None);
}

#[test]
fn multiplication_by_h() {
    let cx = two_term(Matrix::from_rows(vec![vec![h(1)]]));
    let dec = poly_cohomology(&cx);
    assert_eq!(dec.get(0), DegreeCohomology { free_rank: 0, torsion: vec![] });
    assert_eq!(dec.get(1), DegreeCohomology { free_rank: 0, torsion: vec![1] });
    assert_eq!(fibre_dims(&cx, Fibre::Special), BTreeMap::from([(0, 1), (1, 1)]));
    assert_eq!(fibre_dims(&cx, Fibre::Generic), BTreeMap::from([(0, 0), (1, 0)]));
    assert_eq!(freeness_test(&cx).unwrap().verdict, Freeness::NotFree { degree: 1, torsion: vec![1] });
}

#[test]
fn zero_differential_is_free() {
    let cx = two_term(Matrix::from_rows(vec![vec![P::zero()]]));
    let dec = poly_cohomology(&cx);
    assert_eq!(dec.get(0).free_rank, 1);
    assert_eq!(dec.get(1).free_rank, 1);
    assert_eq!(fibre_dims(&cx, Fibre::Special), fibre_dims(&cx, Fibre::Generic));
    assert_eq!(freeness_test(&cx).unwrap().verdict, Freeness::Free { ranks: BTreeMap::from([(0, 1), (1, 1)]) });
}

#[test]
fn prime_to_h_torsion_is_invisible_to_both_fibres() {
    let cx = two_term(Matrix::from_rows(vec![vec![c(1).add(&h(1))]]));
    let dec = poly_cohomology(&cx);
    assert!(dec.is_torsion_free());
    assert_eq!(dec.factors[&1].len(), 1);
    assert!(matches!(freeness_test(&cx).unwrap().verdict, Freeness::Free { .. }));
}

#[test]
fn invalid_complexes_are_rejected() {
    let d0 = Matrix::from_rows(vec![vec![h(1)]]);
    let d1 = Matrix::from_rows(vec![vec![c(1)]]);
    let ranks = BTreeMap::from([(0, 1), (1, 1), (2, 1)]);
    assert!(PolyComplex::new(ranks.clone(), BTreeMap::from([(0, d0.clone()), (1, d1)])).is_err());
    let wide = Matrix::from_rows(vec![vec![h(1), h(1)]]);
    assert!(PolyComplex::new(ranks, BTreeMap::from([(0, wide)])).is_err());
}

/// Generic rank as the largest rank at a few rational points.
fn sampled_generic_rank(m: &Matrix<P>) -> usize {
    [3, -5, 7, 11].iter().map(|&t| m.map(|x| x.eval(&Q::from_int(t))).rank()).max().unwrap()
}

#[test]
fn random_complexes_decompose_as_built() {
    let mut r = rng(63);
    for _ in 0..60 {
        let (cx, expected) = fixtures::random_poly_complex::<Q>(&mut r);
        let dec = poly_cohomology(&cx);
        assert_eq!(dec.degrees, expected);
        // free parts against an evaluation-rank oracle
        for i in cx.degrees() {
            let free = cx.rank(i) - sampled_generic_rank(&cx.diff(i)) - sampled_generic_rank(&cx.diff(i - 1));
            assert_eq!(dec.get(i).free_rank, free);
        }
        let special = fibre_dims(&cx, Fibre::Special);
        let generic = fibre_dims(&cx, Fibre::Generic);
        let report = freeness_test(&cx).unwrap();
        assert_eq!(matches!(report.verdict, Freeness::Free { .. }), dec.is_torsion_free());
        assert_eq!(matches!(report.verdict, Freeness::Free { .. }), special == generic);
        if let Freeness::NotFree { degree, torsion } = &report.verdict {
            assert!(!torsion.is_empty());
            assert_eq!(torsion, &dec.get(*degree).torsion);
        }
        for i in cx.degrees() {
            assert!(special[&i] >= generic[&i]);
        }
        let euler = |d: &BTreeMap<i32, usize>| d.iter().map(|(&i, &n)| if i % 2 == 0 { n as i64 } else { -(n as i64) }).sum::<i64>();
        assert_eq!(euler(&special), euler(&generic));
        assert_eq!(euler(&special), cx.euler_characteristic());
    }
}

#[test]
fn unstructured_three_term_complexes() {
    // d1 = K·(cokernel projection) built from a random left annihilator of d0
    let mut r = rng(64);
    let mut seen = [0usize; 2];
    for _ in 0..50 {
        let n0 = r.gen_range(1..=3);
        let n1 = r.gen_range(n0..=4);
        let d0 = fixtures::random_poly_matrix::<Q>(&mut r, n1, n0, 2, 0.8);
        let snf = smith_normal_form(&d0);
        let rk = snf.rank();
        // rows of u_inv past the rank annihilate d0
        let n2 = n1 - rk;
        let mut proj = Matrix::zeros(n2, n1);
        for i in 0..n2 {
            for j in 0..n1 {
                proj.set(i, j, snf.u_inv.get(rk + i, j).clone());
            }
        }
        let k = fixtures::random_poly_matrix::<Q>(&mut r, n2, n2, 1, 0.8);
        let d1 = k.mul(&proj);
        let ranks = BTreeMap::from([(0, n0), (1, n1), (2, n2)]);
        let cx = PolyComplex::new(ranks, BTreeMap::from([(0, d0), (1, d1)])).unwrap();
        let dec = poly_cohomology(&cx);
        let report = freeness_test(&cx).unwrap();
        let free = matches!(report.verdict, Freeness::Free { .. });
        assert_eq!(free, dec.is_torsion_free());
        assert_eq!(free, report.special == report.generic);
        seen[free as usize] += 1;
    }
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}
