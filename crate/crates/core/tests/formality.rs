use ainf::coeff::{Ring, Q};
use ainf::fixtures::{self, rng, Rng};
use ainf::formality::{
    an_formality_check, obstruction_module_extension, obstruction_morphism_extension, prove_module_formality,
    prove_module_formality_with, transport_along, verify_certificate, AnCheck, PrimitiveChoice, Verdict,
};
use ainf::graded::{ArityBound, GradedMap};
use ainf::hochschild::{HochschildCochain, HochschildComplex};
use ainf::linalg::Vector;
use ainf::module::{is_quasi_iso_module, AInfModule, ModMorphism};
use rand::Rng as _;

fn random_cochain(r: &mut Rng, cx: &HochschildComplex<Q>, p: usize, q: i32) -> HochschildCochain<Q> {
    let basis = cx.basis(p, q);
    let mut v = Vector::zero();
    for i in 0..basis.len() {
        if r.gen_bool(0.4) {
            v.add_term(i, &fixtures::small(r, 2));
        }
    }
    cx.from_coordinates(&basis, &v)
}

/// Shifts every primitive by a random cocycle: a coboundary plus a random
/// combination of cohomology classes.
struct RandomShift(Rng);

impl PrimitiveChoice<Q> for RandomShift {
    fn choose(&mut self, _: usize, cx: &HochschildComplex<Q>, x: HochschildCochain<Q>) -> HochschildCochain<Q> {
        let (p, q) = (x.p, x.q);
        let mut z = if p > 0 { cx.d(&random_cochain(&mut self.0, cx, p - 1, q)) } else { HochschildCochain::zero(cx.kind, p, q) };
        for class in cx.hh_group(p, q).classes {
            z = z.add(&class.scale(&fixtures::small(&mut self.0, 2)));
        }
        assert!(cx.is_cocycle(&z));
        x.add(&z)
    }
}

fn relation_weight(m: &AInfModule<Q>) -> usize {
    m.relation_bound().finite().unwrap_or(4).max(3)
}

#[test]
fn heisenberg_module_is_not_a3_formal() {
    let hm = fixtures::heisenberg_module::<Q>();
    let cert = prove_module_formality(&hm, None).unwrap();
    let Verdict::NotAnFormal { stage, report } = &cert.verdict else { panic!("expected a nonzero obstruction, got {:?}", cert.verdict) };
    assert_eq!(*stage, 2);
    assert!(!report.vanished);
    // the obstruction is the Massey product itself, and its class is nonzero
    assert_eq!(report.cocycle.body, hm.m(3));
    let cx = HochschildComplex::module(&hm.truncate_to_m2().unwrap());
    assert!(cx.is_cocycle(&report.cocycle));
    assert!(!cx.is_coboundary(&report.cocycle));
    assert!(cx.hh_dim(2, -1) > 0);

    assert_eq!(an_formality_check(&hm, 2).unwrap(), AnCheck::Pass);
    assert!(matches!(an_formality_check(&hm, 3).unwrap(), AnCheck::Fail { stage: 2, .. }));
}

#[test]
fn associative_modules_are_formal() {
    let a = fixtures::fix_t2::<Q>();
    let m = AInfModule::regular(&a);
    let cert = prove_module_formality(&m, None).unwrap();
    let Verdict::Formal { witness } = cert.verdict else { panic!() };
    assert_eq!(witness, {
        let mut id = ModMorphism::identity(&m);
        id.target = m.clone();
        id
    });
    for n in 2..6 {
        assert_eq!(an_formality_check(&m, n).unwrap(), AnCheck::Pass);
    }
}

#[test]
fn formal_fixtures_get_verified_witnesses() {
    let mut r = rng(31);
    let mut nontrivial = 0;
    for _ in 0..24 {
        let (m, m0) = fixtures::random_formal_module::<Q>(&mut r);
        assert!(matches!(m.saturation_bound(), ArityBound::Finite(_)));
        assert_eq!(m.check_relations(relation_weight(&m)).unwrap(), Ok(()));
        nontrivial += m.ops().any(|(k, op)| k > 2 && !op.is_zero()) as usize;
        let cert = prove_module_formality(&m, None).unwrap();
        let Verdict::Formal { witness } = &cert.verdict else { panic!("formal fixture rejected: {:?}", cert.verdict) };
        // independent re-verification
        assert_eq!(witness.f(1), GradedMap::identity(&m.space).to_op());
        assert_eq!(witness.target.ops().collect::<Vec<_>>(), m0.ops().collect::<Vec<_>>());
        assert_eq!(witness.check(relation_weight(&m)).unwrap(), Ok(()));
        assert!(is_quasi_iso_module(witness));
        for s in &cert.stages {
            let cx = HochschildComplex::module(&m0);
            assert!(cx.is_cocycle(&s.cocycle));
        }
    }
    assert!(nontrivial >= 12, "only {nontrivial} fixtures had higher operations");
}

#[test]
fn global_verdict_is_the_conjunction_of_an_checks() {
    let mut r = rng(32);
    let mut cases: Vec<AInfModule<Q>> = (0..6).map(|_| fixtures::random_formal_module::<Q>(&mut r).0).collect();
    cases.push(fixtures::heisenberg_module::<Q>());
    for m in cases {
        let top = match m.saturation_bound() {
            ArityBound::Finite(b) => b.max(2),
            ArityBound::Unbounded => 4,
        };
        let all = (2..=top).all(|n| an_formality_check(&m, n).unwrap() == AnCheck::Pass);
        let cert = prove_module_formality(&m, None).unwrap();
        match cert.verdict {
            Verdict::Formal { .. } => assert!(all),
            Verdict::NotAnFormal { .. } => assert!(!all),
            Verdict::Inconclusive { .. } => panic!("unexpected inconclusive verdict"),
        }
    }
}

#[test]
fn verdicts_do_not_depend_on_primitive_choices() {
    let mut r = rng(33);
    let mut cases: Vec<AInfModule<Q>> = (0..5).map(|_| fixtures::random_formal_module::<Q>(&mut r).0).collect();
    cases.push(fixtures::heisenberg_module::<Q>());
    for m in cases {
        let base = prove_module_formality(&m, None).unwrap();
        for seed in 0..3 {
            let alt = prove_module_formality_with(&m, None, &mut RandomShift(rng(100 + seed))).unwrap();
            assert_eq!(alt.is_formal(), base.is_formal());
            assert_eq!(alt.stages.len(), base.stages.len());
            let cx = HochschildComplex::module(&m.truncate_to_m2().unwrap());
            for (a, b) in alt.stages.iter().zip(&base.stages) {
                assert_eq!(a.vanished, b.vanished);
                assert!(cx.same_class(&a.cocycle, &b.cocycle), "stage {} class moved", a.stage);
            }
            if let Verdict::Formal { witness } = &alt.verdict {
                assert_eq!(witness.check(relation_weight(&m)).unwrap(), Ok(()));
            }
        }
    }
}

#[test]
fn module_extension_obstructions_are_closed_and_solved_by_the_next_operation() {
    let mut r = rng(34);
    let mut checked = 0;
    while checked < 100 {
        let (m, _) = fixtures::random_formal_module::<Q>(&mut r);
        let top = m.saturation_bound().finite().unwrap();
        if top < 3 {
            continue;
        }
        let n = r.gen_range(3..=top);
        let rep = obstruction_module_extension(&m, n).unwrap();
        let cx = HochschildComplex::module(&m.truncate_to_m2().unwrap());
        assert!(cx.is_cocycle(&rep.cocycle));
        // the existing m_n is a primitive
        let mn = cx.cochain(n - 1, m.m(n)).unwrap();
        assert_eq!(cx.d(&mn), rep.cocycle.neg());
        assert!(rep.vanished);
        checked += 1;
    }
}

#[test]
fn associative_data_has_zero_obstructions() {
    let (_, m0) = fixtures::random_formal_module::<Q>(&mut rng(35));
    for n in 3..5 {
        let rep = obstruction_module_extension(&m0, n).unwrap();
        assert!(rep.cocycle.is_zero());
        assert!(rep.primitive.unwrap().is_zero());
    }
    let id = ModMorphism::identity(&m0);
    for n in 2..5 {
        assert!(obstruction_morphism_extension(&id, n).unwrap().cocycle.is_zero());
    }
}

#[test]
fn morphism_obstructions_along_witnesses() {
    let mut r = rng(36);
    for _ in 0..20 {
        let (m, m0) = fixtures::random_formal_module::<Q>(&mut r);
        let cert = prove_module_formality(&m, None).unwrap();
        let Verdict::Formal { witness } = cert.verdict else { panic!() };
        let cx = HochschildComplex::module_pair(&m.algebra, &m0, &m0).unwrap();
        let top = m.saturation_bound().finite().unwrap();
        for n in 2..=top {
            let rep = obstruction_morphism_extension(&witness, n).unwrap();
            assert!(cx.is_cocycle(&rep.cocycle));
            let fn_ = cx.cochain(n - 1, witness.f(n)).unwrap();
            assert_eq!(cx.d(&fn_), rep.cocycle.neg());
        }
    }
}

#[test]
fn obstruction_is_constant_in_free_choices_when_m3_vanishes() {
    let mut r = rng(37);
    let mut seen_nonzero = 0;
    for _ in 0..10 {
        let (m, m0) = fixtures::random_formal_module::<Q>(&mut r);
        let top = m.saturation_bound().finite().unwrap();
        if top < 4 {
            continue;
        }
        // kill m3 first so that the module has m_3 = 0
        let cx = HochschildComplex::module(&m0);
        let g = cx.solve_primitive(&cx.cochain(2, m.m(3)).unwrap().neg()).unwrap();
        let mut f = ModMorphism::identity(&m);
        f.set_comp(g.body).unwrap();
        let mut n = transport_along(&f, top).unwrap();
        n.set_truncation(None);
        assert!(n.m(3).is_zero());
        let mut values = Vec::new();
        for _ in 0..5 {
            // (id, g2) with g2 a cocycle is an A_3-morphism N → N(2)
            let z = cx.d(&random_cochain(&mut r, &cx, 0, -1));
            let mut h = ModMorphism::new(n.clone(), m0.clone(), None).unwrap();
            h.set_comp(GradedMap::identity(&n.space).to_op()).unwrap();
            h.set_comp(z.body).unwrap();
            values.push(obstruction_morphism_extension(&h, 3).unwrap().cocycle);
        }
        assert!(values.windows(2).all(|w| w[0] == w[1]));
        seen_nonzero += !values[0].is_zero() as usize;
    }
    assert!(seen_nonzero > 0);
}

#[test]
fn stored_certificates_verify_and_tampering_is_caught() {
    let mut r = rng(81);
    for _ in 0..6 {
        let (m, _) = fixtures::random_formal_module::<Q>(&mut r);
        let cert = prove_module_formality(&m, None).unwrap();
        assert!(cert.is_formal());
        assert_eq!(verify_certificate(&cert), Ok(()));
        // perturb one witness component
        let mut bad = cert.clone();
        let Verdict::Formal { witness } = &mut bad.verdict else { unreachable!() };
        let k = witness.comps().map(|(k, _)| k).max().unwrap();
        let mut f = witness.f(k);
        let (tuple, v) = f.entries().next().map(|(t, v)| (t.clone(), v.clone())).unwrap();
        f.set(tuple, v.scale(&Q::from_int(2)));
        witness.set_comp(f).unwrap();
        assert!(verify_certificate(&bad).is_err());
    }
    let cert = prove_module_formality(&fixtures::heisenberg_module::<Q>(), None).unwrap();
    assert_eq!(verify_certificate(&cert), Ok(()));
    let mut bad = cert.clone();
    let Verdict::NotAnFormal { report, .. } = &mut bad.verdict else { panic!("expected an obstruction") };
    report.vanished = true;
    assert!(verify_certificate(&bad).is_err());
    let mut bad = cert;
    bad.stages[0].cocycle = bad.stages[0].cocycle.scale(&Q::from_int(3));
    assert!(verify_certificate(&bad).is_err());
}
