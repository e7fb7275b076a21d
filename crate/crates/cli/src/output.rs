use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use ecc_gof::Error;

#[derive(Debug)]
pub enum CliError {
    FileNotFound(PathBuf),
    Usage(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Lib(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Lib(e.into())
    }
}

impl CliError {
    /// Stable machine-readable kind, first field of the stderr line.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::FileNotFound(_) => "file_not_found",
            CliError::Usage(_) => "usage",
            CliError::Lib(e) => match e {
                Error::InvalidCloud(_) => "invalid_cloud",
                Error::DegenerateInput(_) => "degenerate_input",
                Error::DimensionUnsupported(_) => "dimension_unsupported",
                Error::DimensionMismatch { .. } => "dimension_mismatch",
                Error::SizeMismatch { .. } => "size_mismatch",
                Error::BudgetExceeded(_) => "budget_exceeded",
                Error::TooLarge { .. } => "too_large",
                Error::NotUnivariate => "not_univariate",
                Error::InvalidSpec(_) => "invalid_spec",
                Error::InvalidCdf(_) => "invalid_cdf",
                Error::InvalidConfig(_) => "invalid_config",
                Error::Parse { .. } => "parse_error",
                Error::Io(_) => "io",
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            CliError::FileNotFound(p) => format!("no such file: {}", p.display()),
            CliError::Usage(m) => m.clone(),
            CliError::Lib(e) => e.to_string(),
        };
        let one_line: Vec<&str> = msg.split_whitespace().collect();
        write!(f, "error: {}: {}", self.kind(), one_line.join(" "))
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_to_string(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::FileNotFound(path.to_path_buf()),
        _ => e.into(),
    })
}

/// Writes `contents` to `path` via a sibling temp file and a rename, or to
/// stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, contents: &str) -> CliResult<()> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())?;
            if !contents.ends_with('\n') {
                out.write_all(b"\n")?;
            }
            Ok(())
        }
        Some(p) => {
            let dir = match p.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(contents.as_bytes())?;
            if !contents.ends_with('\n') {
                tmp.write_all(b"\n")?;
            }
            tmp.as_file().sync_all()?;
            tmp.persist(p).map_err(|e| CliError::from(e.error))?;
            Ok(())
        }
    }
}
