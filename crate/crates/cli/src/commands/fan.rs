use anyhow::{bail, Result};
use serde_json::json;
use svset_core::fan::{normal_fan_2d, type_cone, AlphaRow};
use svset_core::Polytope;

use super::emit;
use crate::io::{read_json, to_json, write_atomic};
use crate::report::{Report, Verdict};
use crate::FanArgs;

fn inequality(row: &AlphaRow) -> String {
    let terms: Vec<String> = row
        .alpha
        .iter()
        .filter(|(_, a)| a.abs() > 1e-12)
        .map(|(j, a)| {
            let a = (a * 1e9).round() / 1e9;
            if a == 1.0 {
                format!("h[{j}]")
            } else {
                format!("{a}*h[{j}]")
            }
        })
        .collect();
    format!("{} > 0", terms.join(" + "))
}

pub fn run(args: &FanArgs) -> Result<bool> {
    let p: Polytope = read_json(&args.input)?;
    if p.dim() != 2 {
        bail!("fan command needs a planar polytope, got dimension {}", p.dim());
    }
    let fan = normal_fan_2d(&p)?;
    let h: Vec<f64> = fan.rays().iter().map(|r| p.support(r.coords())).collect();

    let mut report = Report::new("fan", json!({ "input": args.input, "tol": args.tol }));
    report.result("fan", &fan)?;
    report.result("offsets", &h)?;
    match type_cone(&fan) {
        Ok(tc) => {
            let distinct = tc.distinct_rows(args.tol);
            let admissible = tc.contains(&h)?;
            report.result("type_cone_rows", &tc.rows)?;
            report.result("inequalities", distinct.iter().map(|r| inequality(r)).collect::<Vec<_>>())?;
            report.result("admissible", admissible)?;
            report.verdict("input_admissible", Verdict::from_bool(admissible));
        }
        Err(e) => {
            report.result("type_cone_error", e.to_string())?;
            report.verdict("input_admissible", Verdict::Fail);
        }
    }
    if let Some(dir) = &args.out {
        write_atomic(dir, "fan.json", to_json(&fan)?.as_bytes())?;
    }
    emit(&report, args.out.as_deref())
}
