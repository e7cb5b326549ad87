#![allow(dead_code)]

pub mod tables;

use std::path::PathBuf;

use deltakit::scenario::{parse_scenario, Scenario};

pub const CORPUS: [&str; 7] = ["qp", "s-h3", "e2", "e2-q-case1", "e2-q-case2", "d1", "r1"];

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(format!("{name}.json"))
}

pub fn corpus_text(name: &str) -> String {
    std::fs::read_to_string(corpus_path(name)).expect("corpus file exists")
}

pub fn load(name: &str) -> Scenario {
    parse_scenario(&corpus_text(name)).expect("corpus scenario parses")
}
