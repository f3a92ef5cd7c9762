use anyhow::Result;
use serde_json::json;
use svset_core::mc::TriangleExperimentConfig;
use svset_core::tree::corpus::{deterministic_fan_tree, rotated_fan_tree};

use crate::io::{to_json, write_atomic};
use crate::CorpusArgs;

/// Depth of the shipped example trees.
const DEPTH: usize = 3;

pub fn run(args: &CorpusArgs) -> Result<()> {
    let dir = &args.out;
    write_atomic(dir, "tree_deterministic.json", to_json(&deterministic_fan_tree(args.seed, DEPTH))?.as_bytes())?;
    write_atomic(dir, "tree_rotating.json", to_json(&rotated_fan_tree(args.seed, DEPTH))?.as_bytes())?;
    let polys = [
        ("triangle.json", json!({ "dim": 2, "vertices": [[-1.0, -1.0], [2.0, -1.0], [-1.0, 2.0]] })),
        ("square.json", json!({ "dim": 2, "vertices": [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]] })),
        ("segment.json", json!({ "dim": 2, "vertices": [[0.0, 0.0], [1.0, 1.0]] })),
    ];
    for (name, value) in polys {
        write_atomic(dir, name, to_json(&value)?.as_bytes())?;
    }
    write_atomic(dir, "simulate_default.json", to_json(&TriangleExperimentConfig::default())?.as_bytes())?;
    Ok(())
}
