use ainf::document::{parse, Payload};
use ainf_demo::{example, run, run_text, Operation};

#[test]
fn checking_examples() {
    let env = run_text(Operation::Check, &example("fix-d", 0).unwrap(), 0);
    assert_eq!(env.code, 0);
    let Payload::Report(r) = parse(env.document.as_deref().unwrap()).unwrap().payload else { panic!() };
    assert_eq!(r.command, "check-algebra");

    // a broken structure is reported, not rejected
    let text = example("heisenberg-module", 0).unwrap();
    let mut doc = parse(&text).unwrap();
    let Payload::Module(m) = &mut doc.payload else { panic!() };
    let op = m.ops.iter_mut().find(|o| o.arity == 3).unwrap();
    *op.entries[0].output.values_mut().next().unwrap() = serde_json::json!("5/1");
    let env = run_text(Operation::Check, &ainf::document::serialize(&doc), 0);
    assert_eq!(env.code, 1, "{env:?}");
}

#[test]
fn formality_and_freeness() {
    let env = run_text(Operation::ProveFormality, &example("heisenberg-module", 0).unwrap(), 0);
    assert_eq!(env.code, 1);
    assert!(env.document.unwrap().contains("not_an_formal"));
    let env = run_text(Operation::ProveFormality, &example("random-formal-module", 2).unwrap(), 0);
    assert_eq!(env.code, 0);
    // the certificate checks back
    let env = run_text(Operation::Check, &env.document.unwrap(), 0);
    assert_eq!(env.code, 0, "{env:?}");

    let env = run_text(Operation::Freeness, &example("random-poly-complex", 1).unwrap(), 0);
    assert!(env.code == 0 || env.code == 1);
    assert!(env.document.unwrap().contains("\"freeness\""));
}

#[test]
fn bad_input_is_code_two() {
    let out: serde_json::Value = serde_json::from_str(&run("check", "{ not json", 0)).unwrap();
    assert_eq!(out["code"], 2);
    assert!(out["message"].as_str().unwrap().contains("line"));
    let out: serde_json::Value = serde_json::from_str(&run("explode", "{}", 0)).unwrap();
    assert_eq!(out["code"], 2);
    assert_eq!(run_text(Operation::Freeness, &example("fix-d", 0).unwrap(), 0).code, 2);
    assert!(example("nope", 0).is_err());
}
