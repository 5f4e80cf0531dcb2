//! WebAssembly bindings for the static page in `www/`.
//!
//! The page offers three operations on a pasted or generated document:
//! checking the structure relations, proving formality (with a certificate)
//! and testing freeness of a complex over `F[h]`. Each returns a JSON
//! envelope `{code, document, message}` with the CLI's exit-code meaning.

use ainf::coeff::RingDescriptor;
use ainf::document::{parse, serialize, Payload};
use ainf_cli::{fixture, run_document, Command, Options, Outcome, FIELD_FIXTURES, POLY_FIXTURES};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Envelope {
    pub code: i32,
    pub document: Option<String>,
    pub message: Option<String>,
}

impl From<Outcome> for Envelope {
    fn from(o: Outcome) -> Self {
        Envelope { code: o.code, document: o.text(), message: o.message }
    }
}

fn input_error(msg: impl ToString) -> Envelope {
    Envelope { code: 2, document: None, message: Some(msg.to_string()) }
}

/// Operations offered by the page.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operation {
    Check,
    ProveFormality,
    Freeness,
}

impl Operation {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "check" => Some(Operation::Check),
            "prove-formality" => Some(Operation::ProveFormality),
            "freeness" => Some(Operation::Freeness),
            _ => None,
        }
    }
}

/// Runs an operation on document text; `up_to` of 0 means the default bound.
pub fn run_text(op: Operation, text: &str, up_to: usize) -> Envelope {
    let doc = match parse(text) {
        Ok(d) => d,
        Err(e) => return input_error(e),
    };
    let cmd = match (op, &doc.payload) {
        (Operation::Check, Payload::Algebra(_)) => Command::CheckAlgebra,
        (Operation::Check, Payload::Module(_)) => Command::CheckModule,
        (Operation::Check, Payload::Morphism(_)) => Command::CheckMorphism,
        (Operation::Check, Payload::Certificate(_)) => Command::VerifyCertificate,
        (Operation::Check, p) => return input_error(format!("nothing to check in a {} document", p.kind())),
        (Operation::ProveFormality, _) => Command::ProveFormality,
        (Operation::Freeness, _) => Command::Freeness,
    };
    let opts = Options { up_to: (up_to > 0).then_some(up_to), ..Options::default() };
    run_document(cmd, &doc, &opts).into()
}

/// Built-in example document by name, over its natural ring.
pub fn example(name: &str, seed: u64) -> Result<String, String> {
    let ring = if POLY_FIXTURES.contains(&name) {
        RingDescriptor::parse("poly(h, rationals)").map_err(|e| e.to_string())?
    } else {
        RingDescriptor::Rationals
    };
    fixture(name, &ring, seed).map(|d| serialize(&d)).map_err(|e| e.to_string())
}

fn to_js(e: &Envelope) -> String {
    serde_json::to_string(e).expect("plain data")
}

/// `run("check" | "prove-formality" | "freeness", documentText, upTo)`;
/// returns the envelope as JSON text.
#[wasm_bindgen]
pub fn run(operation: &str, document: &str, up_to: u32) -> String {
    let env = match Operation::from_name(operation) {
        Some(op) => run_text(op, document, up_to as usize),
        None => input_error(format!("unknown operation {operation:?}")),
    };
    to_js(&env)
}

/// Example document text; throws on an unknown name.
#[wasm_bindgen(js_name = example)]
pub fn example_js(name: &str, seed: u32) -> Result<String, JsError> {
    example(name, seed as u64).map_err(|e| JsError::new(&e))
}

/// Names accepted by `example`, as a JSON array.
#[wasm_bindgen(js_name = exampleNames)]
pub fn example_names() -> String {
    serde_json::to_string(&[FIELD_FIXTURES, POLY_FIXTURES].concat()).expect("plain data")
}
