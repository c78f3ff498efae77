//! Reports and exit codes.
//!
//! A run prints one canonical JSON document
//! `{"digest": ..., "report": {...}, "timing": {...}}`. The digest is the
//! SHA-256 of the canonical `report`; timing sits outside it, so identical
//! inputs give identical digests.

use std::time::Duration;

use enriq_core::json::{canonical_string, sha256_hex};
use enriq_core::{Error, ErrorKind};
use serde_json::{json, Value};

pub const REPORT_VERSION: u64 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_CAP: i32 = 2;
pub const EXIT_MALFORMED: i32 = 3;

/// What a command produced before it was wrapped into a report.
pub enum Outcome {
    Done(Value),
    /// A result that could not be decided within the caps.
    Indeterminate(Value),
    /// A computed result that contradicts a check the command was asked to
    /// perform, such as an oracle disagreeing with the main implementation.
    Mismatch(Value),
}

pub fn exit_code(kind: ErrorKind) -> i32 {
    match kind {
        ErrorKind::Domain => EXIT_DOMAIN,
        ErrorKind::Cap => EXIT_CAP,
        ErrorKind::Malformed => EXIT_MALFORMED,
    }
}

fn error_json(e: &Error) -> Value {
    let kind = match e.kind() {
        ErrorKind::Domain => "domain",
        ErrorKind::Cap => "cap",
        ErrorKind::Malformed => "malformed",
    };
    json!({ "kind": kind, "message": e.to_string() })
}

pub struct Rendered {
    pub code: i32,
    pub text: String,
    pub digest: String,
}

pub fn render(command: &[String], inputs: &Value, outcome: Result<Outcome, Error>, elapsed: Duration) -> Rendered {
    let (status, code, results, error) = match outcome {
        Ok(Outcome::Done(v)) => ("ok", EXIT_OK, v, Value::Null),
        Ok(Outcome::Indeterminate(v)) => ("indeterminate", EXIT_CAP, v, Value::Null),
        Ok(Outcome::Mismatch(v)) => ("mismatch", EXIT_DOMAIN, v, Value::Null),
        Err(e) => ("error", exit_code(e.kind()), Value::Null, error_json(&e)),
    };
    let report = json!({
        "version": REPORT_VERSION,
        "command": command,
        "inputs_digest": sha256_hex(canonical_string(inputs).as_bytes()),
        "seed": 0,
        "status": status,
        "exit_code": code,
        "results": results,
        "error": error,
    });
    let digest = sha256_hex(canonical_string(&report).as_bytes());
    let full = json!({
        "digest": digest,
        "report": report,
        "timing": { "elapsed_ms": elapsed.as_millis() as u64 },
    });
    Rendered {
        code,
        text: canonical_string(&full),
        digest,
    }
}
