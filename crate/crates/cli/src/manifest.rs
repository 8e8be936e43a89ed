use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Cli;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub flags: serde_json::Value,
    pub seed: u64,
    pub tool_version: String,
    /// SHA-256 of the input configuration file, hex encoded.
    pub input_digest: Option<String>,
    /// Seconds.
    pub wall_time: f64,
}

impl RunManifest {
    pub fn new(cli: &Cli, input: Option<&[u8]>) -> Self {
        let flags = serde_json::to_value(cli).expect("arguments serialize");
        let subcommand = flags["command"].as_object().and_then(|m| m.keys().next().cloned()).unwrap_or_default();
        RunManifest {
            subcommand,
            flags,
            seed: cli.global.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            input_digest: input.map(digest),
            wall_time: 0.0,
        }
    }
}

pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn read_input(path: &Path) -> std::io::Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}
