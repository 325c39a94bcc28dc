//! File formats, dataset generation, throughput measurement and the
//! command-line front end for `cornerforge-core`.
//!
//! Every text artifact starts with `#` provenance lines recording the tool
//! version, the command and its full configuration.

pub mod assets;
pub mod bench;
pub mod cli;
pub mod dataset;
pub mod keypoints;
pub mod pgm;
pub mod provenance;
pub mod strips;
pub mod svg;
pub mod treefile;
pub mod warpfile;

use std::path::{Path, PathBuf};

pub use provenance::Provenance;

/// Failure of a command, classified by exit code.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Data(String),
}

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    /// 1 usage, 2 I/O, 3 data validation.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Usage(_) => 1,
            Error::Io { .. } => 2,
            Error::Data(_) => 3,
        }
    }
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), Error> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}
