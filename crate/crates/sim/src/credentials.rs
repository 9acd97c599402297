//! Credential files, one per node, named `node-<id>.cred`.
//!
//! The binary layout is `NodeCredentials::to_bytes`: magic `WSNC`, version,
//! group parameters, node id, key pair, anchor, chain commitment and the
//! one-time signatures.

use std::path::{Path, PathBuf};

use wsnkm_core::trust_center::NodeCredentials;

use crate::SimError;

pub fn file_name(creds: &NodeCredentials) -> String {
    format!("node-{}.cred", creds.id.0)
}

/// Writes each credential set into `dir` and returns the paths in order.
pub fn write_all(dir: &Path, creds: &[NodeCredentials]) -> Result<Vec<PathBuf>, SimError> {
    std::fs::create_dir_all(dir)?;
    creds
        .iter()
        .map(|c| {
            let path = dir.join(file_name(c));
            std::fs::write(&path, c.to_bytes())?;
            Ok(path)
        })
        .collect()
}

pub fn read(path: &Path) -> Result<NodeCredentials, SimError> {
    let bytes = std::fs::read(path)?;
    NodeCredentials::from_bytes(&bytes).map_err(|e| SimError::Parse(format!("{}: {e}", path.display())))
}

/// Every `*.cred` file in `dir`, sorted by node id.
pub fn read_dir(dir: &Path) -> Result<Vec<NodeCredentials>, SimError> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "cred") {
            out.push(read(&path)?);
        }
    }
    out.sort_by_key(|c| c.id);
    Ok(out)
}
