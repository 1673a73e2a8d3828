//! JSON artifacts: a kind tag, the hash of the inputs that produced them,
//! the payload and timing kept apart so the rest is reproducible.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const FORMAT: u32 = 1;

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct Timing {
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Artifact<T> {
    pub kind: String,
    pub format: u32,
    pub input_hash: String,
    pub payload: T,
    #[serde(default)]
    pub timing: Timing,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of a value's canonical (key-sorted, compact) JSON text.
pub fn hash_value(v: &Value) -> String {
    sha256_hex(v.to_string().as_bytes())
}

impl<T: Serialize> Artifact<T> {
    pub fn new(kind: &str, inputs: &Value, payload: T, seconds: f64) -> Self {
        Artifact { kind: kind.into(), format: FORMAT, input_hash: hash_value(inputs), payload, timing: Timing { seconds } }
    }

    /// Identifies the payload for downstream input hashes.
    pub fn payload_hash(&self) -> String {
        hash_value(&serde_json::to_value(&self.payload).expect("serializable"))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Invalid(e.to_string()))?;
        s.push('\n');
        fs::write(path, s)?;
        Ok(())
    }
}

fn schema(kind: &str, field: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::Schema { artifact: kind.into(), field: field.into(), msg: msg.into() }
}

pub fn read<T: DeserializeOwned>(path: &Path, kind: &str) -> Result<Artifact<T>> {
    let text = fs::read_to_string(path)?;
    parse(&text, kind)
}

pub fn parse<T: DeserializeOwned>(text: &str, kind: &str) -> Result<Artifact<T>> {
    let v: Value = serde_json::from_str(text).map_err(|e| schema(kind, "<root>", e.to_string()))?;
    let obj = v.as_object().ok_or_else(|| schema(kind, "<root>", "expected an object"))?;
    match obj.get("kind").and_then(Value::as_str) {
        Some(k) if k == kind => {}
        Some(k) => return Err(schema(kind, "kind", format!("expected `{kind}`, found `{k}`"))),
        None => return Err(schema(kind, "kind", "missing or not a string")),
    }
    let format = obj.get("format").and_then(Value::as_u64).ok_or_else(|| schema(kind, "format", "missing or not an integer"))?;
    if format != FORMAT as u64 {
        return Err(schema(kind, "format", format!("unsupported format {format}")));
    }
    let input_hash = obj.get("input_hash").and_then(Value::as_str).ok_or_else(|| schema(kind, "input_hash", "missing or not a string"))?;
    let payload = obj.get("payload").ok_or_else(|| schema(kind, "payload", "missing"))?;
    let payload: T = serde_path_to_error::deserialize(payload).map_err(|e| {
        let path = e.path().to_string();
        schema(kind, if path == "." { "payload".to_string() } else { format!("payload.{path}") }, e.into_inner().to_string())
    })?;
    let timing = match obj.get("timing") {
        Some(t) => serde_json::from_value(t.clone()).map_err(|e| schema(kind, "timing", e.to_string()))?,
        None => Timing::default(),
    };
    Ok(Artifact { kind: kind.into(), format: FORMAT, input_hash: input_hash.into(), payload, timing })
}

/// The artifact at `path` if it exists and was produced from `inputs`.
/// A present but malformed file is an error rather than a cache miss.
pub fn cached<T: DeserializeOwned>(path: &Path, kind: &str, inputs: &Value) -> Result<Option<Artifact<T>>> {
    if !path.exists() {
        return Ok(None);
    }
    let a: Artifact<T> = read(path, kind)?;
    Ok((a.input_hash == hash_value(inputs)).then_some(a))
}
