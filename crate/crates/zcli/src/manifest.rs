//! Run manifests. Every file or JSON stream written by the CLI carries the
//! run id of the manifest describing the invocation that produced it.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub run_id: String,
    pub command_line: Vec<String>,
    /// Settings read from the configuration file, if any.
    pub config: BTreeMap<String, String>,
    /// Resolved parameters of the command, after flags and file are merged.
    pub parameters: serde_json::Value,
    pub started_unix_ms: u128,
    pub finished_unix_ms: Option<u128>,
    pub software_version: String,
    /// Whether every operation of the run succeeded.
    pub success: Option<bool>,
}

fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

/// A run id unique per process and call: start time, process id, counter.
pub fn new_run_id() -> String {
    static COUNTER: AtomicU64 = AtomicU64::new(0);
    let nanos = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_nanos()).unwrap_or(0);
    format!("{:x}-{:x}-{}", nanos, std::process::id(), COUNTER.fetch_add(1, Ordering::Relaxed))
}

impl RunManifest {
    pub fn start(command_line: Vec<String>, config: BTreeMap<String, String>, parameters: serde_json::Value) -> Self {
        RunManifest {
            run_id: new_run_id(),
            command_line,
            config,
            parameters,
            started_unix_ms: now_ms(),
            finished_unix_ms: None,
            software_version: env!("CARGO_PKG_VERSION").to_string(),
            success: None,
        }
    }

    pub fn finish(&mut self, success: bool) {
        self.finished_unix_ms = Some(now_ms());
        self.success = Some(success);
    }

    /// Path of the manifest written next to the output file `out`.
    pub fn path_beside(out: &Path) -> PathBuf {
        let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
        name.push(".manifest.json");
        out.with_file_name(name)
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        std::fs::write(path, text + "\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_ids_are_distinct() {
        assert_ne!(new_run_id(), new_run_id());
    }

    #[test]
    fn manifest_sits_beside_the_output() {
        let p = RunManifest::path_beside(Path::new("/tmp/out/sweep.csv"));
        assert_eq!(p, Path::new("/tmp/out/sweep.csv.manifest.json"));
    }
}
