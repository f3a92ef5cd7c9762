use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    DiagnosticOnly,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Envelope shared by every command. Wall-clock time is kept out of it so
/// that reports are reproducible byte for byte.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub library_version: &'static str,
    pub config: Value,
    pub verdicts: BTreeMap<String, Verdict>,
    pub results: Value,
}

impl Report {
    pub fn new(command: &str, config: Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            library_version: svset_core::VERSION,
            config,
            verdicts: BTreeMap::new(),
            results: Value::Object(Default::default()),
        }
    }

    pub fn verdict(&mut self, name: &str, v: Verdict) {
        self.verdicts.insert(name.to_string(), v);
    }

    pub fn result(&mut self, name: &str, value: impl Serialize) -> anyhow::Result<()> {
        let v = serde_json::to_value(value)?;
        if let Value::Object(map) = &mut self.results {
            map.insert(name.to_string(), v);
        }
        Ok(())
    }

    pub fn passed(&self) -> bool {
        self.verdicts.values().all(|v| *v != Verdict::Fail)
    }
}
