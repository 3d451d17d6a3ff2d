use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDigest {
    /// Relative to the experiment directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub experiment_id: String,
    pub subcommand: String,
    /// Fully resolved configuration, defaults included.
    pub config: serde_json::Value,
    pub seed: u64,
    pub quick: bool,
    pub code_version: String,
    pub started: String,
    pub finished: String,
    pub pass: bool,
    pub outputs: Vec<OutputDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `<subcommand>-<first 12 hex digits of the config digest>`.
pub fn experiment_id(subcommand: &str, config: &serde_json::Value, seed: u64, quick: bool) -> String {
    let canonical = serde_json::json!({ "subcommand": subcommand, "config": config, "seed": seed, "quick": quick });
    let digest = sha256_hex(canonical.to_string().as_bytes());
    format!("{subcommand}-{}", &digest[..12])
}

pub fn digest_outputs(dir: &Path, files: &[std::path::PathBuf]) -> Result<Vec<OutputDigest>> {
    let mut out: Vec<OutputDigest> = files
        .iter()
        .map(|path| {
            let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
            let rel = path.strip_prefix(dir).unwrap_or(path).to_string_lossy().into_owned();
            Ok(OutputDigest { path: rel, sha256: sha256_hex(&bytes), bytes: bytes.len() as u64 })
        })
        .collect::<Result<_>>()?;
    out.sort_by(|a, b| a.path.cmp(&b.path));
    out.dedup_by(|a, b| a.path == b.path);
    Ok(out)
}

/// Writes to a temporary name and renames, so a manifest is either absent or complete.
pub fn write_manifest(dir: &Path, manifest: &ExperimentManifest) -> Result<()> {
    let tmp = dir.join(format!("{MANIFEST_NAME}.tmp"));
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    fs::write(&tmp, text).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, dir.join(MANIFEST_NAME)).context("publishing manifest")?;
    Ok(())
}

/// Re-reads a manifest and checks every listed file against its digest.
pub fn verify_manifest(dir: &Path) -> Result<ExperimentManifest> {
    let text = fs::read_to_string(dir.join(MANIFEST_NAME)).context("reading manifest")?;
    let manifest: ExperimentManifest = serde_json::from_str(&text)?;
    for entry in &manifest.outputs {
        let bytes = fs::read(dir.join(&entry.path)).with_context(|| format!("missing output {}", entry.path))?;
        if sha256_hex(&bytes) != entry.sha256 {
            bail!("digest mismatch for {}", entry.path);
        }
    }
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn id_depends_on_config_and_seed() {
        let cfg = serde_json::json!({ "n": 2 });
        let a = experiment_id("gap", &cfg, 1, false);
        assert!(a.starts_with("gap-") && a.len() == 16);
        assert_eq!(a, experiment_id("gap", &cfg, 1, false));
        assert_ne!(a, experiment_id("gap", &cfg, 2, false));
        assert_ne!(a, experiment_id("gap", &serde_json::json!({ "n": 2, "m": 1 }), 1, false));
    }

    #[test]
    fn round_trip_and_tamper_detection() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("a.csv");
        fs::write(&file, "x\n1\n").unwrap();
        let outputs = digest_outputs(dir.path(), std::slice::from_ref(&file)).unwrap();
        let m = ExperimentManifest {
            experiment_id: "gap-0".into(),
            subcommand: "gap".into(),
            config: serde_json::json!({}),
            seed: 0,
            quick: false,
            code_version: "0".into(),
            started: String::new(),
            finished: String::new(),
            pass: true,
            outputs,
        };
        write_manifest(dir.path(), &m).unwrap();
        assert_eq!(verify_manifest(dir.path()).unwrap(), m);
        fs::write(&file, "x\n2\n").unwrap();
        assert!(verify_manifest(dir.path()).is_err());
    }
}
