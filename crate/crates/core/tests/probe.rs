use ainf::coeff::Q;
use ainf::fixtures::{self, rng};
use ainf::formality::{associated_module, prove_module_formality, Verdict};
use ainf::graded::GradedMap;
use ainf::linalg::Vector;
use ainf::module::{check_pair, AInfModule, Pair};
use ainf::probe::massey_class_vanishes_mod_automorphisms;
use ainf::transfer::{minimal_pair_equiv_probe, ProbeVerdict};
use rand::seq::SliceRandom;

/// Relabels `m` (and its algebra) by random permutations within degrees.
fn shuffled(r: &mut fixtures::Rng, m: &AInfModule<Q>) -> AInfModule<Q> {
    let perm = |r: &mut fixtures::Rng, space: &ainf::graded::GradedSpace| {
        let mut sigma: Vec<usize> = (0..space.dim()).collect();
        for d in space.support() {
            let mut block: Vec<usize> = space.indices_in(d).collect();
            block.shuffle(r);
            for (i, j) in space.indices_in(d).zip(block) {
                sigma[i] = j;
            }
        }
        let cols = sigma.iter().map(|&i| Vector::basis(i)).collect();
        let p = GradedMap::<Q>::from_columns(space, space, 0, cols).unwrap();
        let mut inv = vec![0; sigma.len()];
        for (i, &s) in sigma.iter().enumerate() {
            inv[s] = i;
        }
        let pinv = GradedMap::from_columns(space, space, 0, inv.iter().map(|&i| Vector::basis(i)).collect()).unwrap();
        (p, pinv)
    };
    let (p, pinv) = perm(r, &m.algebra.space);
    let (q, qinv) = perm(r, &m.space);
    let a = fixtures::conjugate_algebra(&m.algebra, &p, &pinv);
    fixtures::conjugate_module(m, &a, &q, &qinv, &p)
}

#[test]
fn pair_is_equivalent_to_itself() {
    let m = fixtures::heisenberg_module::<Q>();
    let p = Pair::new(m);
    let ProbeVerdict::EquivalentWitnessed { morphism } = minimal_pair_equiv_probe(&p, &p) else { panic!() };
    assert_eq!(check_pair(&morphism, 5, true).unwrap(), Ok(()));
}

#[test]
fn shuffled_pairs_are_witnessed() {
    let mut r = rng(81);
    let mut cases = vec![fixtures::heisenberg_module::<Q>()];
    cases.extend((0..4).map(|_| fixtures::random_formal_module::<Q>(&mut r).0));
    for m in cases {
        let n = shuffled(&mut r, &m);
        assert_eq!(n.check_relations(n.default_check_weight()).unwrap(), Ok(()));
        let ProbeVerdict::EquivalentWitnessed { morphism } = minimal_pair_equiv_probe(&Pair::new(m.clone()), &Pair::new(n)) else {
            panic!("shuffled copy not recognized");
        };
        assert_eq!(check_pair(&morphism, m.default_check_weight(), true).unwrap(), Ok(()));
    }
}

#[test]
fn formal_and_non_formal_heisenberg_pairs_differ() {
    let m = fixtures::heisenberg_module::<Q>();
    let m2 = associated_module(&m).unwrap();
    // independent route: the formality certificates disagree
    assert!(matches!(prove_module_formality(&m, None).unwrap().verdict, Verdict::NotAnFormal { stage: 2, .. }));
    assert!(prove_module_formality(&m2, None).unwrap().is_formal());
    assert_eq!(massey_class_vanishes_mod_automorphisms(&m), Some(false));
    assert_eq!(massey_class_vanishes_mod_automorphisms(&m2), Some(true));
    let v = minimal_pair_equiv_probe(&Pair::new(m), &Pair::new(m2));
    assert!(matches!(v, ProbeVerdict::NotEquivalentByInvariants { .. }), "{v:?}");
}

#[test]
fn different_dimensions_are_not_equivalent() {
    let a = fixtures::augmentation_ideal::<Q>(3, 2);
    let m = fixtures::truncated_polynomial_module(&a, 3, 0);
    let n = fixtures::truncated_polynomial_module(&a, 3, 1);
    assert!(matches!(
        minimal_pair_equiv_probe(&Pair::new(m), &Pair::new(n)),
        ProbeVerdict::NotEquivalentByInvariants { .. }
    ));
}

#[test]
fn large_blocks_are_unknown() {
    let a = fixtures::augmentation_ideal::<Q>(2, 2);
    let base = fixtures::truncated_polynomial_module(&a, 2, 0);
    let mut m = base.clone();
    for _ in 0..3 {
        m = fixtures::direct_sum_modules(&m, &base);
    }
    let (p, pinv) = fixtures::random_graded_automorphism::<Q>(&mut rng(82), &m.space, 2);
    let n = fixtures::conjugate_module(&m, &a, &p, &pinv, &GradedMap::identity(&a.space));
    assert!(matches!(minimal_pair_equiv_probe(&Pair::new(m), &Pair::new(n)), ProbeVerdict::Unknown { .. }));
}
