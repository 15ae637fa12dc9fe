//! Run manifest: written with status "running" before any artifact, finalized
//! after. A crash or error leaves either no manifest or one whose status is
//! not "ok", so partial output directories are always marked.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub tool_version: &'static str,
    pub command: &'static str,
    pub config_digest: String,
    pub seed: u64,
    pub started_unix_ms: u128,
    pub finished_unix_ms: Option<u128>,
    pub status: &'static str,
    pub outputs: Vec<String>,
}

fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

impl RunManifest {
    pub fn start(command: &'static str, config_digest: String, seed: u64) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            config_digest,
            seed,
            started_unix_ms: now_ms(),
            finished_unix_ms: None,
            status: "running",
            outputs: Vec::new(),
        }
    }

    pub fn finish(&mut self, ok: bool, outputs: Vec<String>) {
        self.finished_unix_ms = Some(now_ms());
        self.status = if ok { "ok" } else { "failed" };
        self.outputs = outputs;
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        let path = dir.join(MANIFEST_FILE);
        let mut body = serde_json::to_string_pretty(self).expect("manifest serializes");
        body.push('\n');
        std::fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}
