//! Per-stage run manifests: what went in, what came out, and with which
//! settings. No timestamps, so identical runs give identical manifests.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

pub fn sha256_file(path: &Path) -> io::Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

/// Digest over every file below `dir`, visited in sorted order, covering
/// relative names as well as contents.
pub fn sha256_tree(dir: &Path) -> io::Result<String> {
    let mut files = Vec::new();
    collect_files(dir, &mut files)?;
    files.sort();
    let mut h = Sha256::new();
    for f in files {
        let rel = f.strip_prefix(dir).unwrap_or(&f);
        h.update(rel.to_string_lossy().as_bytes());
        h.update([0]);
        h.update(fs::read(&f)?);
        h.update([0]);
    }
    Ok(hex::encode(h.finalize()))
}

fn collect_files(dir: &Path, out: &mut Vec<PathBuf>) -> io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect_files(&path, out)?;
        } else {
            out.push(path);
        }
    }
    Ok(())
}

pub fn sha256_path(path: &Path) -> io::Result<String> {
    if path.is_dir() {
        sha256_tree(path)
    } else {
        sha256_file(path)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Manifest {
    pub stage: String,
    pub config_sha256: String,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub extra: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(stage: &str, config_sha256: &str) -> Self {
        Manifest {
            stage: stage.to_string(),
            config_sha256: config_sha256.to_string(),
            ..Default::default()
        }
    }

    /// Renders the manifest; paths under `out_dir` are written relative to it.
    pub fn render(&self, out_dir: &Path) -> io::Result<String> {
        let shown = |p: &Path| p.strip_prefix(out_dir).unwrap_or(p).display().to_string();
        let mut s = String::new();
        let _ = writeln!(s, "stage={}", self.stage);
        let _ = writeln!(s, "version={}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "config_sha256={}", self.config_sha256);
        for p in &self.inputs {
            let _ = writeln!(s, "input\t{}\t{}", shown(p), sha256_path(p)?);
        }
        for p in &self.outputs {
            let _ = writeln!(s, "output\t{}\t{}", shown(p), sha256_path(p)?);
        }
        for (k, v) in &self.extra {
            let _ = writeln!(s, "{k}={v}");
        }
        Ok(s)
    }

    /// Writes `out_dir/manifests/<stage>.txt` and returns its path.
    pub fn write(&self, out_dir: &Path) -> io::Result<PathBuf> {
        let dir = out_dir.join("manifests");
        fs::create_dir_all(&dir)?;
        let path = dir.join(format!("{}.txt", self.stage));
        fs::write(&path, self.render(out_dir)?)?;
        Ok(path)
    }
}
