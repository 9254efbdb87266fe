use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Common JSON envelope: tool, version, seed and the echoed configuration.
#[derive(Debug, Serialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub seed: u64,
    pub config: C,
    pub result: R,
}

impl<'a, C: Serialize, R: Serialize> Envelope<'a, C, R> {
    pub fn new(command: &'a str, seed: u64, config: C, result: R) -> Self {
        Self {
            tool: "vqgen",
            version: VERSION,
            command,
            seed,
            config,
            result,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Where artifacts go.
#[derive(Debug, Clone)]
pub struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
        }
        Ok(Self { dir })
    }

    /// The main artifact: a file under the output directory, or stdout.
    pub fn primary(&self, name: &str, contents: &str) -> Result<()> {
        match &self.dir {
            Some(d) => write_atomic(&d.join(name), contents),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(contents.as_bytes())?;
                Ok(())
            }
        }
    }

    /// A secondary artifact, written only when an output directory is set.
    pub fn secondary(&self, name: &str, contents: &str) -> Result<()> {
        match &self.dir {
            Some(d) => write_atomic(&d.join(name), contents),
            None => Ok(()),
        }
    }
}

/// Temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating temp file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}
