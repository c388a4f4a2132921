use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub tool_version: String,
    pub command: String,
    /// Every parameter the run used, defaults included. Written back as a
    /// TOML config it reproduces the run.
    pub config: Value,
    pub result: Value,
    pub timing_ms: u64,
    pub determinism_digest: String,
}

/// SHA-256 over the compact JSON of `result`, object keys sorted.
pub fn digest(result: &Value) -> String {
    // serde_json's map is ordered by key, so this text is canonical
    let text = serde_json::to_string(result).expect("JSON values always serialize");
    hex::encode(Sha256::digest(text.as_bytes()))
}

impl Report {
    pub fn new(command: &str, config: Value, result: Value, elapsed: Duration) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
            determinism_digest: digest(&result),
            result,
            timing_ms: elapsed.as_millis() as u64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn digest_ignores_key_order_and_timing() {
        let a: Value = serde_json::from_str(r#"{"b":1,"a":[1,2]}"#).unwrap();
        let b = json!({"a": [1, 2], "b": 1});
        assert_eq!(digest(&a), digest(&b));
        assert_ne!(digest(&a), digest(&json!({"a": [2, 1], "b": 1})));
        let r1 = Report::new("x", json!({}), a, Duration::from_millis(3));
        let r2 = Report::new("x", json!({}), b, Duration::from_millis(900));
        assert_eq!(r1.determinism_digest, r2.determinism_digest);
        assert_eq!(r1.determinism_digest.len(), 64);
    }
}
