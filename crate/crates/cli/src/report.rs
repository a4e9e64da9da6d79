//! Report envelope and run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use dilation_core::scalar::Mode;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "dilation-lab/report";
pub const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Debug, Clone, Default, Serialize)]
pub struct Caps {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree_cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs_cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

/// Everything needed to rerun a command.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: &'static str,
    pub inputs: Vec<String>,
    pub mode: Mode,
    pub t: f64,
    pub caps: Caps,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tolerances: BTreeMap<String, f64>,
    pub parameters: BTreeMap<String, Value>,
    pub out_dir: String,
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: &str, out: &Path, timestamp: Option<u64>) -> Self {
        Self {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION"),
            inputs: Vec::new(),
            mode: Mode::Float,
            t: 0.0,
            caps: Caps::default(),
            seed: None,
            tolerances: BTreeMap::new(),
            parameters: BTreeMap::new(),
            out_dir: out.display().to_string(),
            timestamp: resolve_timestamp(timestamp),
        }
    }
}

fn resolve_timestamp(explicit: Option<u64>) -> u64 {
    explicit
        .or_else(|| {
            std::env::var("SOURCE_DATE_EPOCH")
                .ok()
                .and_then(|s| s.trim().parse().ok())
        })
        .unwrap_or_else(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        })
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    schema_version: &'static str,
    kind: &'a str,
    manifest: &'a RunManifest,
    report: &'a T,
}

/// Files produced by one command.
#[derive(Debug, Default)]
pub struct Outputs {
    pub files: Vec<PathBuf>,
    pub summary: String,
    pub inconclusive: bool,
}

impl Outputs {
    pub fn write_report<T: Serialize>(
        &mut self,
        manifest: &RunManifest,
        kind: &str,
        report: &T,
    ) -> Result<()> {
        let env = Envelope {
            schema: SCHEMA,
            schema_version: SCHEMA_VERSION,
            kind,
            manifest,
            report,
        };
        let mut text = serde_json::to_string_pretty(&env)?;
        text.push('\n');
        self.write_file(manifest, &format!("{kind}.json"), &text)
    }

    pub fn write_file(&mut self, manifest: &RunManifest, name: &str, text: &str) -> Result<()> {
        let dir = Path::new(&manifest.out_dir);
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(path);
        Ok(())
    }
}
