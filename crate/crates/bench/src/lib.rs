//! Shared instance builders for the criterion benchmarks.

use apcap::{CoeffTriple, FieldCtx, PointSet};

pub fn triple(q: u64, a: u16, b: u16, c: u16) -> CoeffTriple {
    CoeffTriple::new(&FieldCtx::new(q).unwrap(), a, b, c).unwrap()
}

pub fn random_set(q: u16, n: usize, density: f64, seed: u64) -> PointSet {
    apcap::random_subset(q, n, density, seed).unwrap()
}
