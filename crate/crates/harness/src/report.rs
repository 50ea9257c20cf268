use std::path::Path;

use serde_json::{json, Value};

use crate::config::Command;
use crate::error::Result;
use crate::write_file;

/// Outcome of a command: a pass flag, a plain-text summary and the same
/// content in machine-readable form.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: Command,
    pub passed: bool,
    pub summary: String,
    pub data: Value,
}

impl Report {
    pub fn new(command: Command, passed: bool, summary: String, data: Value) -> Self {
        Report { command, passed, summary, data }
    }

    pub fn to_json(&self) -> Value {
        json!({ "command": self.command.name(), "passed": self.passed, "data": self.data })
    }

    /// Writes `summary.txt` and `summary.json`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        write_file(dir, "summary.txt", &self.summary)?;
        write_file(dir, "summary.json", &serde_json::to_string_pretty(&self.to_json()).expect("json serializes"))
    }
}

pub(crate) fn status(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}
