use ainf::algebra::AInfAlgebra;
use ainf::coeff::{Poly, Ring, Q};
use ainf::fixtures;
use ainf::graded::MultiOp;
use ainf::linalg::Vector;
use ainf::module::AInfModule;
use ainf::rees::{rees_deformation, rees_module_deformation, Filtration};

fn cubic() -> AInfAlgebra<Q> {
    fixtures::truncated_polynomial::<Q>(3, 0)
}

fn by_powers(a: &AInfAlgebra<Q>) -> Filtration<Q> {
    let x = |k: usize| Vector::basis(a.space.index_of(&format!("x{k}")).unwrap());
    Filtration::new(&a.space, vec![vec![x(1), x(2)], vec![x(2)]]).unwrap()
}

#[test]
fn trivial_filtration_is_constant() {
    let a = fixtures::fix_d::<Q>();
    let f = Filtration::trivial(&a.space);
    assert_eq!(f.length(), 1);
    let r = rees_deformation(&a, &f).unwrap();
    for (_, op) in r.rees.ops() {
        for (_, v) in op.entries() {
            assert!(v.iter().all(|(_, c)| c.degree().unwrap_or(0) == 0));
        }
    }
    assert_eq!(r.associated_graded(), a);
    assert_eq!(r.fibre(&Q::one()), a);
}

#[test]
fn two_step_filtration_has_hand_computed_associated_graded() {
    // F^1 = span(x²) on k[x]/x³: x·x = x² jumps a level, so Gr has x·x = 0
    let a = cubic();
    let x2 = Vector::basis(a.space.index_of("x2").unwrap());
    let f = Filtration::new(&a.space, vec![vec![x2]]).unwrap();
    assert_eq!(f.weights(), &[0, 0, 1]);
    let r = rees_deformation(&a, &f).unwrap();
    let gr = r.associated_graded();
    let idx = |l: &str| gr.space.index_of(l).unwrap();
    let mut expected = MultiOp::new(2, 0);
    for y in ["1", "x1", "x2"] {
        expected.set(vec![idx("1"), idx(y)], Vector::basis(idx(y)));
        expected.set(vec![idx(y), idx("1")], Vector::basis(idx(y)));
    }
    assert_eq!(gr.m(2), expected);
    // the jump is recorded by one power of h
    let h = Poly::monomial(Q::one(), 1);
    assert_eq!(r.rees.m(2).apply_basis(&[idx("x1"), idx("x1")]), Vector::single(idx("x2"), h));
    assert_eq!(r.rees.check_relations(4).unwrap(), Ok(()));
    assert_eq!(gr.check_relations(4).unwrap(), Ok(()));
}

#[test]
fn general_fibre_is_the_carrier() {
    let a = cubic();
    // a filtration whose adapted basis is not the standard one
    let (x1, x2) = (a.space.index_of("x1").unwrap(), a.space.index_of("x2").unwrap());
    let mixed: Vector<Q> = [(x1, Q::one()), (x2, Q::one())].into_iter().collect();
    let f = Filtration::new(&a.space, vec![vec![mixed, Vector::basis(x2)], vec![Vector::basis(x2)]]).unwrap();
    let r = rees_deformation(&a, &f).unwrap();
    let w = r.general_fibre_witness();
    assert_eq!(w.check(4).unwrap(), Ok(()));
    assert_eq!(r.rees.check_relations(4).unwrap(), Ok(()));
    assert_eq!(r.associated_graded().check_relations(4).unwrap(), Ok(()));
}

#[test]
fn non_multiplicative_filtration_is_rejected() {
    let a = cubic();
    let (x1, x2) = (a.space.index_of("x1").unwrap(), a.space.index_of("x2").unwrap());
    let v: Vector<Q> = [(x1, Q::one()), (x2, Q::one())].into_iter().collect();
    // (x + x²)² = x² is not in span(x + x²)
    let f = Filtration::new(&a.space, vec![vec![v]]).unwrap();
    assert!(rees_deformation(&a, &f).is_err());
}

#[test]
fn non_decreasing_levels_are_rejected() {
    let a = cubic();
    let x = |k: usize| Vector::<Q>::basis(a.space.index_of(&format!("x{k}")).unwrap());
    assert!(Filtration::new(&a.space, vec![vec![x(2)], vec![x(1)]]).is_err());
}

#[test]
fn module_rees_is_a_module_over_algebra_rees() {
    let a = cubic();
    let fa = by_powers(&a);
    let ra = rees_deformation(&a, &fa).unwrap();
    let m = AInfModule::regular(&a);
    let rm = rees_module_deformation(&ra, &m, &fa).unwrap();
    assert_eq!(rm.rees.check_relations(4).unwrap(), Ok(()));
    assert_eq!(rm.associated_graded().check_relations(4).unwrap(), Ok(()));
    assert_eq!(rm.general_fibre_witness().check(4).unwrap(), Ok(()));
    // filtration by powers is already graded, so Gr is the carrier itself
    assert_eq!(ra.associated_graded(), a);
    assert_eq!(rm.associated_graded().m(2), m.m(2));
}

#[test]
fn weights_of_vectors() {
    let a = cubic();
    let f = by_powers(&a);
    let x = |k: usize| Vector::<Q>::basis(a.space.index_of(&format!("x{k}")).unwrap());
    assert_eq!(f.weight_of(&x(2)), Some(2));
    assert_eq!(f.weight_of(&x(1).plus(&x(2))), Some(1));
    assert_eq!(f.weight_of(&Vector::zero()), None);
}
