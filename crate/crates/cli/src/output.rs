use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use tempfile::TempDir;

/// Invalid command-line input that is not a library error.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// What a run was asked to do. Written into the output directory, minus the
/// directory itself, so identical requests produce identical files.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub scenario: String,
    #[serde(skip)]
    pub out: PathBuf,
    pub analyses: Vec<&'static str>,
    pub epsilon_grid: Option<Vec<f64>>,
    pub kappa_grid: Option<Vec<f64>>,
    pub boost_grid: Option<Vec<f64>>,
    pub seed: Option<u64>,
}

/// Files are written into a hidden sibling directory that is renamed onto
/// the target only once every file is in place.
pub struct Staging {
    dir: TempDir,
    target: PathBuf,
}

impl Staging {
    pub fn new(target: &Path) -> Result<Self> {
        if target.exists() {
            let empty = target.is_dir()
                && fs::read_dir(target)
                    .with_context(|| format!("reading {}", target.display()))?
                    .next()
                    .is_none();
            if !empty {
                return Err(usage(format!(
                    "output directory {} exists and is not empty",
                    target.display()
                )));
            }
        }
        let parent = match target.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        fs::create_dir_all(&parent).with_context(|| format!("creating {}", parent.display()))?;
        let dir = tempfile::Builder::new()
            .prefix(".clockconv-")
            .tempdir_in(&parent)
            .with_context(|| format!("creating a staging directory in {}", parent.display()))?;
        Ok(Staging {
            dir,
            target: target.to_path_buf(),
        })
    }

    pub fn write(&self, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        let path = self.dir.path().join(name);
        fs::write(&path, contents).with_context(|| format!("writing {name}"))
    }

    pub fn write_json(&self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text)
    }

    pub fn commit(self) -> Result<()> {
        #[cfg(unix)]
        {
            use std::os::unix::fs::PermissionsExt;
            fs::set_permissions(self.dir.path(), fs::Permissions::from_mode(0o755))?;
        }
        if self.target.is_dir() {
            fs::remove_dir(&self.target)
                .with_context(|| format!("replacing empty {}", self.target.display()))?;
        }
        let staged = self.dir.keep();
        fs::rename(&staged, &self.target).map_err(|e| {
            let _ = fs::remove_dir_all(&staged);
            anyhow::Error::new(e).context(format!("moving results into {}", self.target.display()))
        })
    }
}
