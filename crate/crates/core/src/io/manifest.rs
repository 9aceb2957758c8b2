//! Selection manifests: the ordered record of one selection run.
//!
//! Numbers are written in the shortest form that parses back to the same
//! bits, so a write/read cycle is lossless.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

use super::read_text;

pub const MANIFEST_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub step: usize,
    pub view_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionManifest {
    pub v: u64,
    pub method: String,
    pub seed: u64,
    /// RFC 3339 timestamp; omitted unless requested so reruns are byte-identical.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_at: Option<String>,
    /// The fully resolved configuration of the run.
    pub config: Value,
    pub order: Vec<ManifestEntry>,
}

impl SelectionManifest {
    pub fn new(method: impl Into<String>, seed: u64, config: Value, ids: &[&str]) -> Self {
        SelectionManifest {
            v: MANIFEST_VERSION,
            method: method.into(),
            seed,
            created_at: None,
            config,
            order: ids
                .iter()
                .enumerate()
                .map(|(step, id)| ManifestEntry {
                    step,
                    view_id: id.to_string(),
                    score: None,
                })
                .collect(),
        }
    }

    pub fn view_ids(&self) -> Vec<&str> {
        self.order.iter().map(|e| e.view_id.as_str()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.v != MANIFEST_VERSION {
            return Err(Error::SchemaVersionMismatch {
                found: self.v,
                expected: MANIFEST_VERSION,
            });
        }
        let mut seen = HashSet::new();
        for (i, e) in self.order.iter().enumerate() {
            if !seen.insert(e.view_id.as_str()) {
                return Err(Error::InvalidManifest(format!("view `{}` appears twice", e.view_id)));
            }
            if i > 0 && e.step <= self.order[i - 1].step {
                return Err(Error::InvalidManifest(format!("step {} does not increase", e.step)));
            }
            if e.score.is_some_and(|s| !s.is_finite()) {
                return Err(Error::InvalidManifest(format!("non-finite score for `{}`", e.view_id)));
            }
        }
        Ok(())
    }

    /// Canonical text form (pretty JSON with a trailing newline).
    pub fn to_text(&self) -> Result<String> {
        self.validate()?;
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }
}

pub fn write_manifest(manifest: &SelectionManifest, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, manifest.to_text()?)?;
    Ok(())
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<SelectionManifest> {
    let path = path.as_ref();
    let text = read_text(path)?;
    let raw: Value = serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line(), e.to_string()))?;
    let v = raw
        .get("v")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::parse(path, 0, "missing schema version `v`"))?;
    if v != MANIFEST_VERSION {
        return Err(Error::SchemaVersionMismatch {
            found: v,
            expected: MANIFEST_VERSION,
        });
    }
    let manifest: SelectionManifest = serde_json::from_value(raw).map_err(|e| Error::parse(path, 0, e.to_string()))?;
    manifest.validate()?;
    Ok(manifest)
}
