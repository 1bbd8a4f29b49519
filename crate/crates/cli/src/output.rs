use std::fmt;
use std::io::Write;
use std::path::Path;

use cqrate_core::idelta::OptimizerOptions;
use cqrate_core::{Error, Tolerances};
use serde::Serialize;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or malformed inputs.
    Input(String),
    Core(Error),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 1,
            CliError::Core(e) => match e {
                Error::CapExceeded(_) => 3,
                Error::SsaViolation(_) | Error::Infeasible(_) => 1,
                _ => 2,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Internal(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

/// Reproducibility header carried by every output document.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<OptimizerOptions>,
}

impl Provenance {
    pub fn new(command: &'static str, seed: u64, optimizer: Option<OptimizerOptions>) -> Self {
        Self {
            tool: "cqrate",
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            tolerances: Tolerances::default(),
            optimizer,
        }
    }
}

/// Writes `text` to `out` or stdout.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Internal(format!("cannot write to stdout: {e}")))
        }
    }
}

pub fn to_json(doc: &impl Serialize) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(doc).map_err(|e| CliError::Internal(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Simple CSV: header plus rows of already formatted cells.
pub fn to_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    text
}
