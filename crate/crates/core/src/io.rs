//! File envelope shared by every artifact the tools read or write:
//! `{"schema_version": 1, "payload": ...}`.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema_version: u32,
    pub payload: T,
}

impl<T> Envelope<T> {
    pub fn new(payload: T) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            payload,
        }
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<T: Serialize>(payload: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Envelope::new(payload))?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let env: Envelope<T> = serde_json::from_str(text)?;
    if env.schema_version != SCHEMA_VERSION {
        return Err(Error::Serialization(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            env.schema_version
        )));
    }
    Ok(env.payload)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;

    #[test]
    fn envelope_round_trip() {
        let m = ComplexMatrix::identity(2);
        let text = to_json(&m).unwrap();
        assert!(text.contains("\"schema_version\": 1"));
        let back: ComplexMatrix = from_json(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn wrong_version_rejected() {
        let text = r#"{"schema_version": 7, "payload": [[[1.0, 0.0]]]}"#;
        assert!(from_json::<ComplexMatrix>(text).is_err());
    }
}
