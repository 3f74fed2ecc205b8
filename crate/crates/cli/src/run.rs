//! Run directories, manifests and small file writers shared by subcommands.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use chrono::NaiveDate;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::failure::{CmdResult, Failure, EXIT_DATA};

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Every flag after defaulting.
    pub config: serde_json::Value,
    pub seeds: BTreeMap<String, u64>,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
    pub warnings: Vec<String>,
    /// Command-specific results that are not written elsewhere.
    pub summary: serde_json::Value,
    pub started_at: String,
    pub wall_clock_seconds: f64,
}

/// Output directory of one run, plus the manifest being assembled for it.
pub struct Run {
    pub dir: PathBuf,
    started: Instant,
    manifest: RunManifest,
    finished: bool,
}

impl Run {
    /// Creates `<out_dir>/<subcommand>/<tag>`, or a UTC timestamp directory
    /// when no tag is given.
    pub fn start(out_dir: &Path, subcommand: &str, tag: Option<&str>, config: serde_json::Value) -> CmdResult<Self> {
        let now = chrono::Utc::now();
        let base = out_dir.join(subcommand);
        let dir = match tag {
            Some(tag) => {
                if tag.is_empty() || tag.contains(['/', '\\']) || tag == "." || tag == ".." {
                    return Err(Failure::new(EXIT_DATA, format!("invalid --tag {tag:?}")));
                }
                base.join(tag)
            }
            None => {
                let stamp = now.format("%Y%m%dT%H%M%SZ").to_string();
                let mut candidate = base.join(&stamp);
                let mut n = 2;
                while candidate.exists() {
                    candidate = base.join(format!("{stamp}-{n}"));
                    n += 1;
                }
                candidate
            }
        };
        fs::create_dir_all(&dir).map_err(|e| Failure::io("cannot create", &dir, e))?;
        Ok(Self {
            dir,
            started: Instant::now(),
            manifest: RunManifest {
                subcommand: subcommand.to_string(),
                config,
                seeds: BTreeMap::new(),
                inputs: Vec::new(),
                outputs: Vec::new(),
                warnings: Vec::new(),
                summary: serde_json::Value::Null,
                started_at: now.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
                wall_clock_seconds: 0.0,
            },
            finished: false,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn seed(&mut self, name: &str, value: u64) {
        self.manifest.seeds.insert(name.to_string(), value);
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        let message = message.into();
        eprintln!("warning: {message}");
        self.manifest.warnings.push(message);
    }

    pub fn summary(&mut self, value: serde_json::Value) {
        self.manifest.summary = value;
    }

    /// Records the SHA-256 of an input file.
    pub fn input(&mut self, path: &Path, bytes: &[u8]) {
        self.manifest.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(bytes),
        });
    }

    /// Writes a file inside the run directory and lists it as an output.
    pub fn write(&mut self, name: &str, contents: &[u8]) -> CmdResult<PathBuf> {
        let path = self.path(name);
        fs::write(&path, contents).map_err(|e| Failure::io("cannot write", &path, e))?;
        self.output(&path);
        Ok(path)
    }

    /// Lists a file written elsewhere (e.g. an explicit `--model-out`).
    pub fn output(&mut self, path: &Path) {
        self.manifest.outputs.push(path.display().to_string());
    }

    pub fn finish(mut self) -> CmdResult<PathBuf> {
        self.finished = true;
        let path = self.path("manifest.json");
        self.manifest.outputs.push(path.display().to_string());
        self.manifest.wall_clock_seconds = self.started.elapsed().as_secs_f64();
        let json = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        fs::write(&path, json + "\n").map_err(|e| Failure::io("cannot write", &path, e))?;
        Ok(self.dir.clone())
    }
}

impl Drop for Run {
    /// A run that failed before writing anything leaves no directory behind.
    fn drop(&mut self) {
        if !self.finished {
            let _ = fs::remove_dir(&self.dir);
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn read_input(path: &Path) -> CmdResult<Vec<u8>> {
    fs::read(path).map_err(|e| Failure::new(EXIT_DATA, format!("cannot read {}: {e}", path.display())))
}

/// `index,date,value` rows, index starting at 1.
pub fn dated_csv(rows: impl IntoIterator<Item = (NaiveDate, f64)>) -> String {
    let mut out = String::from("index,date,value\n");
    for (i, (date, value)) in rows.into_iter().enumerate() {
        out.push_str(&format!("{},{date},{value}\n", i + 1));
    }
    out
}

pub fn pretty_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable value") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_of_abc() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn csv_layout() {
        let d = NaiveDate::from_ymd_opt(2024, 1, 1).unwrap();
        assert_eq!(dated_csv([(d, 1.5)]), "index,date,value\n1,2024-01-01,1.5\n");
        assert_eq!(dated_csv([]), "index,date,value\n");
    }

    #[test]
    fn tagged_run_dir() {
        let tmp = tempfile::tempdir().unwrap();
        let run = Run::start(tmp.path(), "inflation", Some("t1"), serde_json::json!({})).unwrap();
        assert_eq!(run.dir, tmp.path().join("inflation").join("t1"));
        let dir = run.finish().unwrap();
        assert!(dir.join("manifest.json").exists());
        assert!(Run::start(tmp.path(), "inflation", Some("../x"), serde_json::json!({})).is_err());
        drop(Run::start(tmp.path(), "inflation", Some("abandoned"), serde_json::json!({})).unwrap());
        assert!(!tmp.path().join("inflation").join("abandoned").exists());
    }
}
