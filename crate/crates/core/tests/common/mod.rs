#![allow(dead_code)]

use std::path::PathBuf;

use framelet::io::read_filter;
use framelet::{DilationContext, Filter};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(format!("{name}.json"))
}

pub fn fixture(name: &str) -> Filter {
    read_filter(fixture_path(name)).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

pub fn m_sqrt2() -> DilationContext {
    DilationContext::parse("1 1; 1 -1").unwrap()
}

pub fn two_i2() -> DilationContext {
    DilationContext::parse("2 0; 0 2").unwrap()
}

pub fn m_sqrt3() -> DilationContext {
    DilationContext::parse("1 -2; 2 -1").unwrap()
}
