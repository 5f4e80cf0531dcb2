use std::path::{Path, PathBuf};
use std::process::Command;

use ainf::coeff::RingDescriptor;
use ainf::document::{parse, serialize, Payload};
use ainf_cli::{fixture, FIELD_FIXTURES, POLY_FIXTURES};

fn ainf(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ainf")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn report(text: &str) -> (bool, serde_json::Value) {
    match parse(text).unwrap().payload {
        Payload::Report(r) => (r.pass, r.details),
        other => panic!("expected a report, got {}", other.kind()),
    }
}

fn poly() -> RingDescriptor {
    RingDescriptor::parse("poly(h, rationals)").unwrap()
}

#[test]
fn every_fixture_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let names = FIELD_FIXTURES.iter().map(|n| (n, RingDescriptor::Rationals)).chain(POLY_FIXTURES.iter().map(|n| (n, poly())));
    for (name, ring) in names {
        let doc = fixture(name, &ring, 0).unwrap();
        let text = serialize(&doc);
        assert_eq!(parse(&text).unwrap(), doc, "{name}");
        let path = write(dir.path(), &format!("{name}.json"), &text);
        let cmd = match doc.payload.kind() {
            "algebra" => "check-algebra",
            "module" => "check-module",
            _ => continue,
        };
        let (code, out, err) = ainf(&[cmd, path.to_str().unwrap()]);
        assert_eq!(code, 0, "{name}: {err}{out}");
        assert!(report(&out).0);
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    for args in [
        &["transfer", "fix-d"][..],
        &["prove-formality", "heisenberg-module"],
        &["prove-formality", "random-formal-module", "--seed", "3"],
        &["normal-cone", "heisenberg-module"],
        &["hochschild", "fix-t2"],
        &["freeness", "random-poly-complex", "--seed", "5"],
    ] {
        let (c1, a, _) = ainf(args);
        let (c2, b, _) = ainf(args);
        assert_eq!(c1, c2);
        assert!(!a.is_empty());
        assert_eq!(a, b, "{args:?}");
        assert_eq!(serialize(&parse(&a).unwrap()), a, "{args:?} is not canonical");
    }
}

#[test]
fn transfer_output_feeds_the_morphism_checker() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    let (code, stdout, _) = ainf(&["transfer", "fix-d", "--output", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let (code, text, err) = ainf(&["check-morphism", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let (pass, details) = report(&text);
    assert!(pass);
    assert_eq!(details["quasi_iso"], true);
}

#[test]
fn heisenberg_is_obstructed_at_stage_two() {
    let (code, text, _) = ainf(&["prove-formality", "heisenberg-module"]);
    assert_eq!(code, 1);
    let Payload::Certificate(c) = parse(&text).unwrap().payload else { panic!("expected a certificate") };
    let ainf::document::VerdictDoc::NotAnFormal { stage, report: last } = &c.verdict else { panic!("{:?}", c.verdict) };
    assert_eq!(*stage, 2);
    assert!(!last.vanished);
    assert!(!last.cocycle.body.entries.is_empty());

    let (code, text, _) = ainf(&["obstruct", "heisenberg-module"]);
    assert_eq!(code, 1);
    let (pass, details) = report(&text);
    assert!(!pass);
    assert_eq!(details["stage"], 2);

    let (code, text, _) = ainf(&["prove-formality", "heisenberg-cone"]);
    assert_eq!(code, 1);
    assert_eq!(report(&text).1["verdict"], "generic-not-formal");
}

#[test]
fn certificates_verify_and_tampering_is_detected() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["prove-formality", "random-formal-module", "--seed", "4"][..], &["prove-formality", "heisenberg-module"]] {
        let (_, text, _) = ainf(args);
        let good = write(dir.path(), "good.json", &text);
        let (code, out, err) = ainf(&["verify-certificate", good.to_str().unwrap()]);
        assert_eq!(code, 0, "{err}{out}");
        assert_eq!(report(&out).1["valid"], true);

        // scale the first nonzero scalar of the first stage's cocycle
        let mut doc = parse(&text).unwrap();
        let Payload::Certificate(c) = &mut doc.payload else { unreachable!() };
        let entry = c.stages[0].cocycle.body.entries.first_mut().expect("nonzero cocycle");
        let value = entry.output.values_mut().next().unwrap();
        *value = serde_json::json!("17/3");
        let bad = write(dir.path(), "bad.json", &serialize(&doc));
        let (code, out, _) = ainf(&["verify-certificate", bad.to_str().unwrap()]);
        assert_eq!(code, 1, "{out}");
        assert_eq!(report(&out).1["valid"], false);
    }
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, err) = ainf(&["check-algebra", "no-such-fixture"]);
    assert_eq!((code, out.as_str()), (2, ""));
    assert!(err.contains("no-such-fixture"));

    let (_, text, _) = ainf(&["transfer", "fix-d"]);
    let broken = write(dir.path(), "broken.json", &text.replacen("\"arity\"", "\"arity", 1));
    let (code, _, err) = ainf(&["check-morphism", broken.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line"), "{err}");

    let (code, _, _) = ainf(&["check-module", "fix-d"]);
    assert_eq!(code, 2);
    let (code, _, _) = ainf(&["snf", "fix-d"]);
    assert_eq!(code, 2);
    let (code, _, _) = ainf(&["check-algebra", "fix-d", "--ring", "integers"]);
    assert_eq!(code, 2);
    let ok = write(dir.path(), "ok.json", &text);
    let (code, _, err) = ainf(&["check-morphism", ok.to_str().unwrap(), "--ring", "prime_field(7)"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn fixtures_respect_the_ring_flag() {
    let (code, text, err) = ainf(&["check-algebra", "fix-d", "--ring", "prime_field(7)"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(parse(&text).unwrap().ring, "prime_field(7)");
    let (code, text, err) = ainf(&["fibre", "heisenberg-cone", "--at", "1"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(parse(&text).unwrap().decode::<ainf::module::AInfModule<ainf::coeff::Q>>().unwrap(), ainf::fixtures::heisenberg_module());
    let (code, _, _) = ainf(&["snf", "random-poly-complex", "--ring", "poly(h, prime_field(5))"]);
    assert_eq!(code, 0);
}

#[test]
fn rees_reads_a_filtration_document() {
    let dir = tempfile::tempdir().unwrap();
    let (_, f, _) = ainf(&["check-algebra", "cubic-filtration"]);
    assert!(f.is_empty());
    let filt = write(dir.path(), "f.json", &serialize(&fixture("cubic-filtration", &RingDescriptor::Rationals, 0).unwrap()));
    let (code, text, err) = ainf(&["rees", "truncated-poly", "--filtration", filt.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let rees = write(dir.path(), "r.json", &text);
    let (code, _, err) = ainf(&["check-algebra", rees.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let (code, _, _) = ainf(&["rees", "truncated-poly"]);
    assert_eq!(code, 2);
}
