use std::time::Instant;

use anyhow::Result;
use serde_json::json;
use svset_core::mc::{hypotenuse_length, run_triangle_experiment, DriverMode, SupremumVerdict, TriangleExperimentConfig};

use crate::io::{csv_bytes, fmt_f64, read_json, to_json, write_atomic};
use crate::report::{Report, Verdict};
use crate::{ModeArg, SimulateArgs};

fn resolve_config(args: &SimulateArgs) -> Result<TriangleExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => read_json::<TriangleExperimentConfig>(path)?,
        None => TriangleExperimentConfig::default(),
    };
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.samples {
        cfg.samples = v;
    }
    if let Some(v) = args.steps {
        cfg.steps = v;
    }
    if let Some(v) = args.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = args.grid_k {
        cfg.grid_k = v;
    }
    if let Some(m) = args.mode {
        cfg.mode = match m {
            ModeArg::Walk => DriverMode::Walk,
            ModeArg::Gauss => DriverMode::Gauss,
        };
    }
    if args.thin.is_some() {
        cfg.thin = args.thin;
    }
    if cfg.paths_out > cfg.samples {
        cfg.paths_out = cfg.samples;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(args: &SimulateArgs) -> Result<bool> {
    let cfg = resolve_config(args)?;
    let started = Instant::now();
    let exp = run_triangle_experiment(&cfg)?;
    let traj = &exp.trajectory;

    let mut tri_rows = Vec::new();
    let mut vertex_rows = Vec::new();
    let mut hyp_rows = Vec::new();
    for s in 0..traj.sample_count() {
        for (k, &t) in traj.times().iter().enumerate() {
            let tuple = traj.slice(s, k);
            let (ss, ts) = (s.to_string(), fmt_f64(t));
            for (i, v) in tuple.iter().enumerate() {
                tri_rows.push(vec![ss.clone(), ts.clone(), i.to_string(), fmt_f64(v[0]), fmt_f64(v[1])]);
            }
            vertex_rows.push(vec![ss.clone(), ts.clone(), fmt_f64(tuple[0][0]), fmt_f64(tuple[0][1])]);
            hyp_rows.push(vec![ss, ts, fmt_f64(hypotenuse_length(tuple))]);
        }
    }
    let out = &args.out;
    write_atomic(out, "triangle_trajectory.csv", &csv_bytes(&["sample", "t", "vertex_index", "x", "y"], tri_rows)?)?;
    write_atomic(out, "right_angle_vertex.csv", &csv_bytes(&["sample", "t", "x", "y"], vertex_rows)?)?;
    write_atomic(out, "hypotenuse.csv", &csv_bytes(&["sample", "t", "length"], hyp_rows)?)?;

    let mut report = Report::new("simulate", serde_json::to_value(&cfg)?);
    let vertices_ok = exp.vertex_means.iter().all(|v| v.within_threshold);
    report.verdict("vertex_martingality", Verdict::from_bool(vertices_ok));
    report.verdict(
        "supremum_test",
        Verdict::from_bool(exp.supremum.verdict == SupremumVerdict::ConsistentWithMartingale),
    );
    report.verdict(
        "control_detected",
        Verdict::from_bool(exp.control.verdict == SupremumVerdict::StrictSubmartingale),
    );
    report.verdict("regularity", Verdict::DiagnosticOnly);
    report.result("vertex_means", &exp.vertex_means)?;
    report.result("supremum", &exp.supremum)?;
    report.result("control", &exp.control)?;
    report.result("regularity", &exp.regularity)?;
    let text = to_json(&report)?;
    write_atomic(out, "report_simulate.json", text.as_bytes())?;

    // Kept apart from the report so that the report stays reproducible.
    let timing = json!({ "command": "simulate", "wall_clock_seconds": started.elapsed().as_secs_f64() });
    write_atomic(out, "timing.json", to_json(&timing)?.as_bytes())?;

    let summary = json!({
        "verdicts": report.verdicts,
        "supremum_max_abs_z": exp.supremum.max_abs_z,
        "control_witness_z": exp.control.directions[exp.control.witness].z,
        "files": ["triangle_trajectory.csv", "right_angle_vertex.csv", "hypotenuse.csv", "report_simulate.json", "timing.json"],
    });
    print!("{}", to_json(&summary)?);
    Ok(report.passed())
}
