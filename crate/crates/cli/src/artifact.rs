//! Writing output files that carry their provenance (tool version, stage,
//! configuration hash, seed), and hashing inputs and outputs.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const TOOL: &str = "sentivol";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn file_sha256(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

/// Hash of a serialisable fingerprint describing everything a stage's
/// output depends on.
pub fn fingerprint_hash<T: Serialize>(stage: &str, fingerprint: &T) -> String {
    let body = serde_json::to_string(&(stage, fingerprint)).expect("fingerprints serialise");
    sha256_hex(body.as_bytes())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub stage: &'static str,
    pub config_hash: String,
    pub seed: u64,
}

impl Meta {
    pub fn new<T: Serialize>(stage: &'static str, fingerprint: &T, seed: u64) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            stage,
            config_hash: fingerprint_hash(stage, fingerprint),
            seed,
        }
    }

    /// `# sentivol <version> stage=<stage> config_hash=<hex> seed=<n>`
    pub fn comment_line(&self) -> String {
        format!(
            "# {} {} stage={} config_hash={} seed={}",
            self.tool, self.version, self.stage, self.config_hash, self.seed
        )
    }
}

/// A file written by a stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub stage: &'static str,
    pub path: PathBuf,
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        ensure_dir(parent)?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// CSV with a leading provenance comment line.
pub fn write_csv(path: &Path, meta: &Meta, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut out = Vec::new();
    out.extend_from_slice(meta.comment_line().as_bytes());
    out.push(b'\n');
    {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut out);
        let write_err = |e: csv::Error| CliError::Runtime(format!("{}: {e}", path.display()));
        w.write_record(header).map_err(write_err)?;
        for row in rows {
            w.write_record(row).map_err(write_err)?;
        }
        w.flush().map_err(|e| CliError::io(path, e))?;
    }
    write_bytes(path, &out)
}

/// Plain text with a leading provenance comment line.
pub fn write_text(path: &Path, meta: &Meta, body: &str) -> Result<(), CliError> {
    let mut text = meta.comment_line();
    text.push('\n');
    text.push_str(body);
    if !text.ends_with('\n') {
        text.push('\n');
    }
    write_bytes(path, text.as_bytes())
}

/// Pretty JSON object with a `meta` member added next to `payload`'s members.
pub fn write_json<T: Serialize>(path: &Path, meta: &Meta, payload: &T) -> Result<(), CliError> {
    let mut value = serde_json::to_value(payload).map_err(|e| CliError::Runtime(e.to_string()))?;
    let object = value
        .as_object_mut()
        .ok_or_else(|| CliError::Runtime("JSON artifacts must be objects".into()))?;
    object.insert(
        "meta".into(),
        serde_json::to_value(meta).map_err(|e| CliError::Runtime(e.to_string()))?,
    );
    let mut text = serde_json::to_string_pretty(&value).map_err(|e| CliError::Runtime(e.to_string()))?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

/// Write an already-serialised JSON object, adding `meta`.
pub fn write_json_text(path: &Path, meta: &Meta, json: &str) -> Result<(), CliError> {
    let value: serde_json::Value = serde_json::from_str(json).map_err(|e| CliError::Runtime(e.to_string()))?;
    write_json(path, meta, &value)
}

/// Shortest round-tripping form, with an exponent for very large or
/// small magnitudes.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        serde_json::to_string(&x).expect("finite floats serialise")
    } else {
        format!("{x}")
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn meta_line_format() {
        let m = Meta::new("score", &("a", 1), 42);
        let line = m.comment_line();
        assert!(line.starts_with("# sentivol "));
        assert!(line.ends_with(" seed=42"));
        assert_eq!(m.config_hash.len(), 64);
        assert_ne!(m.config_hash, Meta::new("score", &("a", 2), 42).config_hash);
    }

    #[test]
    fn csv_quotes_when_needed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        let meta = Meta::new("t", &0, 0);
        write_csv(&path, &meta, &["id", "v"], &[vec!["a,b".into(), num(0.1)]]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.ends_with("id,v\n\"a,b\",0.1\n"), "{text}");
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 100.0, -0.7905694150420948, 4.479680616527767e-49, 1e300] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(4.479680616527767e-49), "4.479680616527767e-49");
        assert_eq!(num(f64::NAN), "NaN");
    }
}
