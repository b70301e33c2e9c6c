//! Failure classes and the machine-readable error line written to stderr.

use std::fmt;
use std::path::Path;
use std::process::ExitCode;

/// Errors the user can fix by changing the invocation or the config file.
/// Everything else that reaches `main` is a computation or I/O failure.
#[derive(Debug)]
pub struct UsageError {
    pub kind: &'static str,
    pub message: String,
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(message: impl Into<String>) -> anyhow::Error {
    UsageError { kind: "usage", message: message.into() }.into()
}

pub fn config(message: impl fmt::Display) -> anyhow::Error {
    UsageError { kind: "config", message: message.to_string() }.into()
}

pub fn not_found(path: &Path) -> anyhow::Error {
    UsageError { kind: "input_not_found", message: format!("input not found: {}", path.display()) }.into()
}

/// Fail with [`not_found`] unless `path` names an existing file.
pub fn require_file(path: &Path) -> anyhow::Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(not_found(path))
    }
}

/// Print `{"error": {...}}` on stderr and pick the exit code: 2 for usage
/// and config problems, 1 for failures during the computation itself.
pub fn exit_with(err: &anyhow::Error) -> ExitCode {
    let (kind, code) = match err.downcast_ref::<UsageError>() {
        Some(u) => (u.kind, 2),
        None if err.downcast_ref::<std::io::Error>().is_some() => ("io", 1),
        None => ("computation", 1),
    };
    let body = serde_json::json!({
        "error": { "kind": kind, "message": format!("{err:#}"), "exit_code": code }
    });
    eprintln!("{body}");
    ExitCode::from(code)
}
