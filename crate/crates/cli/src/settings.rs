//! Config file, output locations and provenance headers.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _, Result};
use mvcoreset::bench::ExperimentConfig;
use mvcoreset::io::{CsvOptions, HeaderMode};
use mvcoreset::sensitivity::SensitivityConfig;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const OUT_DIR_ENV: &str = "MVCORESET_OUT_DIR";

/// Settings read from `--config`. Every field is optional; command-line
/// flags take precedence over the file, and the file over built-in defaults.
#[derive(Debug, Default, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub delimiter: Option<char>,
    pub header: Option<HeaderMode>,
    pub k: Option<usize>,
    pub z: Option<f64>,
    pub epsilon: Option<f64>,
    pub n_samples: Option<usize>,
    pub merge_duplicates: Option<bool>,
    pub sensitivity: Option<SensitivityConfig>,
    pub n_centers: Option<usize>,
    pub iters: Option<usize>,
    pub tol: Option<f64>,
    pub restarts: Option<usize>,
    pub experiment: Option<ExperimentConfig>,
}

impl FileConfig {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

pub struct Context {
    pub file: FileConfig,
    pub seed: u64,
    out_dir: Option<PathBuf>,
}

impl Context {
    pub fn new(file: FileConfig, seed_flag: Option<u64>, out_dir_flag: Option<PathBuf>) -> Self {
        let seed = seed_flag
            .or(file.seed)
            .or(file.experiment.as_ref().map(|e| e.seed))
            .unwrap_or(0);
        let out_dir = out_dir_flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from));
        Self { file, seed, out_dir }
    }

    /// Resolves a relative output path against the output directory and
    /// creates missing parent directories.
    pub fn output_path(&self, path: &Path) -> Result<PathBuf> {
        let full = match &self.out_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        };
        if let Some(parent) = full.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        Ok(full)
    }

    pub fn create(&self, path: &Path) -> Result<BufWriter<File>> {
        let full = self.output_path(path)?;
        let f = File::create(&full).with_context(|| format!("creating {}", full.display()))?;
        Ok(BufWriter::new(f))
    }

    pub fn csv_options(&self, delimiter: Option<char>, header: Option<HeaderMode>) -> Result<CsvOptions> {
        let delimiter = delimiter.or(self.file.delimiter).unwrap_or(',');
        if !delimiter.is_ascii() {
            bail!("delimiter must be a single ASCII character, got '{delimiter}'");
        }
        Ok(CsvOptions {
            delimiter: delimiter as u8,
            header: header.or(self.file.header).unwrap_or_default(),
        })
    }

    pub fn provenance(&self, command: &str, settings: &impl Serialize) -> Result<Provenance> {
        let settings = serde_json::to_value(settings)?;
        let canonical = serde_json::to_string(&json!({ "command": command, "settings": settings }))?;
        let digest = Sha256::digest(canonical.as_bytes());
        Ok(Provenance {
            command: command.to_string(),
            seed: self.seed,
            config_sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        })
    }
}

/// Identifies the program version, command, seed and settings that
/// produced an output file.
pub struct Provenance {
    pub command: String,
    pub seed: u64,
    pub config_sha256: String,
}

impl Provenance {
    pub fn comments(&self) -> Vec<String> {
        vec![
            format!("mvcoreset {}", env!("CARGO_PKG_VERSION")),
            format!("command: {}", self.command),
            format!("seed: {}", self.seed),
            format!("config-sha256: {}", self.config_sha256),
        ]
    }

    pub fn json(&self) -> Value {
        json!({
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "seed": self.seed,
            "config_sha256": self.config_sha256,
        })
    }
}

pub fn write_comments(w: &mut impl Write, comments: &[String]) -> Result<()> {
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    Ok(())
}
