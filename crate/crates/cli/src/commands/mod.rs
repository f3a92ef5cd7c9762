pub mod corpus;
pub mod fan;
pub mod simulate;
pub mod tree;
pub mod verify;

use std::path::Path;

use anyhow::Result;

use crate::io::{to_json, write_atomic};
use crate::report::Report;

/// Prints the report and, when an output directory is given, stores it as
/// `report_<command>.json`.
pub(crate) fn emit(report: &Report, out: Option<&Path>) -> Result<bool> {
    let text = to_json(report)?;
    if let Some(dir) = out {
        write_atomic(dir, &format!("report_{}.json", report.command), text.as_bytes())?;
    }
    print!("{text}");
    Ok(report.passed())
}
