use anyhow::Result;
use serde::Serialize;
use serde_json::json;
use svset_core::fan::deterministic_fan_test;
use svset_core::tree::{hull_vs_conditional, martingale_audit, randomization_identity, TreeFile};
use svset_core::DirectionGrid;

use super::emit;
use crate::io::read_json;
use crate::report::{Report, Verdict};
use crate::{TreeArgs, TreeMode};

#[derive(Serialize)]
struct RandomizationSummary {
    directions: usize,
    consistent: usize,
    max_deviation: f64,
    first_failure: Option<usize>,
}

pub fn run(args: &TreeArgs) -> Result<bool> {
    let tf: TreeFile = read_json(&args.input)?;
    let mode = match args.mode {
        TreeMode::Audit => "audit",
        TreeMode::Equivalence => "equivalence",
        TreeMode::Randomization => "randomization",
    };
    let mut report = Report::new(
        "tree",
        json!({ "input": args.input, "mode": mode, "grid_k": args.grid_k, "tol": args.tol }),
    );
    let dim = tf.selections[0].dim();
    let grid = DirectionGrid::for_dim(dim, args.grid_k)?;

    match args.mode {
        TreeMode::Audit => {
            let gaps = hull_vs_conditional(&tf.tree, &tf.selections)?;
            let audit = martingale_audit(&tf.tree, &gaps.hull_process)?;
            report.verdict("hull_is_conditional_expectation", Verdict::from_bool(gaps.max_gap <= args.tol));
            report.verdict("inclusion", Verdict::from_bool(gaps.inclusion_holds));
            report.verdict("norm_submartingale", Verdict::from_bool(gaps.norm_submartingale));
            report.result("hull_gap", &gaps)?;
            report.result("hull_process_audit", &audit)?;
        }
        TreeMode::Equivalence => {
            let det = deterministic_fan_test(&tf.leaf_tuples(), &grid)?;
            let gaps = hull_vs_conditional(&tf.tree, &tf.selections)?;
            let martingale = gaps.max_gap <= args.tol;
            report.verdict("verdicts_agree", Verdict::from_bool(det.verdict == martingale));
            report.verdict("deterministic_fan", Verdict::from_bool(det.verdict));
            report.verdict("martingale", Verdict::from_bool(martingale));
            report.result("deterministic_fan", &det)?;
            report.result("hull_gap", &gaps)?;
        }
        TreeMode::Randomization => {
            let probs = tf.tree.leaf_probs();
            let mut summary = RandomizationSummary { directions: grid.len(), consistent: 0, max_deviation: 0.0, first_failure: None };
            for (di, u) in grid.directions().iter().enumerate() {
                let zeta: Vec<Vec<f64>> =
                    tf.selections.iter().map(|s| s.values().iter().map(|v| u.dot(v)).collect()).collect();
                let r = randomization_identity(probs, &zeta)?;
                let dev = (r.partition_value - r.max_value).abs().max((r.simplex_value - r.max_value).abs());
                summary.max_deviation = summary.max_deviation.max(dev);
                if r.consistent {
                    summary.consistent += 1;
                } else if summary.first_failure.is_none() {
                    summary.first_failure = Some(di);
                }
            }
            report.verdict("randomization_identity", Verdict::from_bool(summary.consistent == summary.directions));
            report.result("randomization", &summary)?;
        }
    }
    emit(&report, args.out.as_deref())
}
