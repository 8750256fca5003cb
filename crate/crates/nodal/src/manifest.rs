//! The run manifest: everything needed to replay a run, written before any
//! computation and completed with results afterwards.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, ErrorRecord, Result};
use crate::params::Experiment;

pub const SCHEMA: u64 = 1;

const KEYS: [&str; 10] =
    ["schema", "tool", "subcommand", "parameters", "seed", "spec_hash", "conventions", "context", "status", "results"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Running,
    Complete,
    Failed,
}

/// SHA-256 of the canonical JSON of subcommand and parameters.
pub fn spec_hash(experiment: &Experiment) -> Result<String> {
    let bytes = serde_json::to_vec(experiment)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

/// `<subcommand>-s<seed>-<first 12 hex digits of the spec hash>`.
pub fn file_stem(experiment: &Experiment, seed: u64) -> Result<String> {
    Ok(format!("{}-s{seed}-{}", experiment.name(), &spec_hash(experiment)?[..12]))
}

fn conventions() -> Value {
    json!({
        "coefficient_variance": 1.0,
        "monomial_order": "lexicographic in the exponent vector",
        "random_streams": "ChaCha8 seeded by a splitmix child of the seed per experiment tag, stream = trial index",
        "csv_float_format": "{:.16e}",
    })
}

#[derive(Debug, Clone)]
pub struct Manifest {
    pub experiment: Experiment,
    pub seed: u64,
    pub context: Value,
    pub status: Status,
    pub results: Value,
}

impl Manifest {
    pub fn new(experiment: Experiment, seed: u64, context: Value) -> Self {
        Self { experiment, seed, context, status: Status::Running, results: Value::Null }
    }

    pub fn to_json(&self) -> Result<Value> {
        let tagged = serde_json::to_value(&self.experiment)?;
        Ok(json!({
            "schema": SCHEMA,
            "tool": format!("nodal {}", env!("CARGO_PKG_VERSION")),
            "subcommand": tagged["subcommand"],
            "parameters": tagged["parameters"],
            "seed": self.seed,
            "spec_hash": spec_hash(&self.experiment)?,
            "conventions": conventions(),
            "context": self.context,
            "status": self.status,
            "results": self.results,
        }))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(&self.to_json()?)?;
        bytes.push(b'\n');
        fs::write(path, bytes).map_err(|e| CliError::io(path, e))
    }

    pub fn fail(&mut self, err: &ErrorRecord) {
        self.status = Status::Failed;
        self.results = json!({ "error": err });
    }
}

/// Subcommand, parameters and seed of a manifest. Unknown keys at the top level
/// or among the parameters are rejected.
pub fn read_replay_source(path: &Path) -> Result<(Experiment, u64)> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let obj: &Map<String, Value> = value.as_object().ok_or_else(|| CliError::config("manifest is not a JSON object"))?;
    if let Some(k) = obj.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(CliError::config(format!("unknown manifest key `{k}`")));
    }
    if obj.get("schema").and_then(Value::as_u64) != Some(SCHEMA) {
        return Err(CliError::config(format!("unsupported manifest schema, expected {SCHEMA}")));
    }
    let seed = obj.get("seed").and_then(Value::as_u64).ok_or_else(|| CliError::config("manifest lacks an integer seed"))?;
    let tagged = json!({ "subcommand": obj.get("subcommand"), "parameters": obj.get("parameters") });
    let experiment: Experiment =
        serde_json::from_value(tagged).map_err(|e| CliError::config(format!("invalid manifest parameters: {e}")))?;
    Ok((experiment, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::KacRice;

    fn kacrice() -> Experiment {
        Experiment::Kacrice(KacRice { degrees: vec![1, 5], trials: 100, points: None })
    }

    #[test]
    fn round_trip_through_a_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        Manifest::new(kacrice(), 9, json!({})).write(&path).unwrap();
        let (exp, seed) = read_replay_source(&path).unwrap();
        assert_eq!(exp, kacrice());
        assert_eq!(seed, 9);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        let mut v = Manifest::new(kacrice(), 9, json!({})).to_json().unwrap();
        v["parameters"]["colour"] = json!("red");
        fs::write(&path, v.to_string()).unwrap();
        assert!(matches!(read_replay_source(&path), Err(CliError::Config(_))));
        v["parameters"].as_object_mut().unwrap().remove("colour");
        v["extra"] = json!(1);
        fs::write(&path, v.to_string()).unwrap();
        assert!(matches!(read_replay_source(&path), Err(CliError::Config(_))));
    }

    #[test]
    fn stem_embeds_seed_and_hash() {
        let stem = file_stem(&kacrice(), 42).unwrap();
        assert!(stem.starts_with("kacrice-s42-"));
        assert_eq!(stem.len(), "kacrice-s42-".len() + 12);
        let other = Experiment::Kacrice(KacRice { degrees: vec![1, 5], trials: 101, points: None });
        assert_ne!(file_stem(&other, 42).unwrap(), stem);
    }
}
