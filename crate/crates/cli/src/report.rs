//! The JSON run report every subcommand emits: subcommand name, a stable
//! FNV-1a digest of the canonical input, parameters, the result payload,
//! and the wall time (excluded from golden comparisons).

use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

/// 64-bit FNV-1a over the canonical input bytes; stable across platforms.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

#[derive(Serialize)]
pub struct RunReport {
    subcommand: &'static str,
    input_digest: String,
    params: serde_json::Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    result: Value,
    wall_ms: u64,
    #[serde(skip)]
    started: Instant,
}

impl RunReport {
    pub fn start(subcommand: &'static str, canonical_input: &str) -> Self {
        RunReport {
            subcommand,
            input_digest: format!("{:016x}", fnv1a64(canonical_input.as_bytes())),
            params: serde_json::Map::new(),
            seed: None,
            result: Value::Null,
            wall_ms: 0,
            started: Instant::now(),
        }
    }

    pub fn param(&mut self, key: &str, value: Value) {
        self.params.insert(key.to_string(), value);
    }

    pub fn seed(&mut self, seed: u64) {
        self.seed = Some(seed);
    }

    /// Stamps the result, records the wall time, and prints the report.
    pub fn finish(mut self, result: Value) {
        self.result = result;
        self.wall_ms = self.started.elapsed().as_millis() as u64;
        println!("{}", serde_json::to_string_pretty(&self).expect("report serializes"));
    }
}
