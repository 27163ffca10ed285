//! The machine-readable run report printed to stdout.
//!
//! The report is deterministic for a fixed input file and flag set: object
//! keys have a fixed order, checks appear in execution order, and nothing
//! time-dependent is included — timing figures go to stderr on request so
//! the checked payload stays byte-identical across runs.

use keller_core::IdentityReport;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Serialize)]
pub struct CheckOut {
    pub name: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl From<&IdentityReport> for CheckOut {
    fn from(r: &IdentityReport) -> Self {
        CheckOut {
            name: r.name.clone(),
            holds: r.holds,
            witness: r.witness.clone(),
        }
    }
}

impl CheckOut {
    pub fn holds(name: &str) -> Self {
        CheckOut {
            name: name.to_string(),
            holds: true,
            witness: None,
        }
    }

    pub fn fails(name: &str, witness: String) -> Self {
        CheckOut {
            name: name.to_string(),
            holds: false,
            witness: Some(witness),
        }
    }
}

#[derive(Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub input: String,
    pub input_digest: String,
    pub checks: Vec<CheckOut>,
    pub data: Value,
}

impl RunReport {
    pub fn new(command: &'static str, input: &Path, raw: &str) -> Self {
        RunReport {
            command,
            input: input.display().to_string(),
            input_digest: sha256_digest(raw),
            checks: Vec::new(),
            data: Value::Null,
        }
    }

    pub fn push(&mut self, r: &IdentityReport) {
        self.checks.push(r.into());
    }

    pub fn any_failed(&self) -> bool {
        self.checks.iter().any(|c| !c.holds)
    }

    pub fn print(&self) {
        use std::io::Write;
        let body = serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        // tolerate a closed pipe (e.g. piping into `head`)
        let _ = writeln!(std::io::stdout(), "{body}");
    }
}

pub fn sha256_digest(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let out = hasher.finalize();
    let mut s = String::with_capacity(7 + 64);
    s.push_str("sha256:");
    for byte in out {
        use std::fmt::Write;
        write!(s, "{byte:02x}").expect("writing to a string cannot fail");
    }
    s
}
