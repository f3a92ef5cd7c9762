//! Generated tree families for the deterministic-fan equivalence.
//!
//! Deterministic-fan trees carry, on every leaf, the triangle
//! `ξ¹ = (-η₁,-η₂), ξ² = (η₂+η₃,-η₂), ξ³ = (-η₁,η₁+η₃)` for an offset vector
//! `η` in the open half-space `η₁+η₂+η₃ > 0`. Rotated trees additionally
//! turn the triangle on some leaves by 90° about the origin, which changes
//! its normal fan.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::space::{ScenarioTree, TreeFile, TreeVectorRV};
use crate::geom::Vector;

/// Margin kept below the type-cone boundary so leaf triangles stay
/// well-conditioned.
const MIN_SUM: f64 = 0.2;

pub fn triangle_vertices(eta: [f64; 3]) -> [Vector; 3] {
    [
        Vector::xy(-eta[0], -eta[1]),
        Vector::xy(eta[1] + eta[2], -eta[1]),
        Vector::xy(-eta[0], eta[0] + eta[2]),
    ]
}

pub fn rotate90(v: &Vector) -> Vector {
    Vector::xy(-v[1], v[0])
}

fn sample_eta(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let eta = [rng.random_range(-1.0..2.0), rng.random_range(-1.0..2.0), rng.random_range(-1.0..2.0)];
        if eta.iter().sum::<f64>() >= MIN_SUM {
            return eta;
        }
    }
}

fn sample_tree(rng: &mut impl Rng, depth: usize) -> ScenarioTree {
    // Half the trees use the Bernoulli filtration, half random binary splits.
    if rng.random_bool(0.5) {
        return ScenarioTree::binary(depth);
    }
    let probs = (0..depth)
        .map(|_| {
            let p: f64 = rng.random_range(0.2..0.8);
            vec![p, 1.0 - p]
        })
        .collect();
    ScenarioTree::new(vec![2; depth], probs).expect("valid probabilities")
}

fn assemble(tree: ScenarioTree, tuples: Vec<[Vector; 3]>) -> TreeFile {
    let selections = (0..3)
        .map(|i| TreeVectorRV::new(&tree, tuples.iter().map(|t| t[i].clone()).collect()).expect("leaf count"))
        .collect();
    TreeFile::new(tree, selections).expect("uniform dimension")
}

/// Binary tree of the given depth whose leaf triangles all share the fan
/// with rays `(-1,0), (0,-1), (1,1)`.
pub fn deterministic_fan_tree(seed: u64, depth: usize) -> TreeFile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tree = sample_tree(&mut rng, depth);
    let tuples = (0..tree.leaf_count()).map(|_| triangle_vertices(sample_eta(&mut rng))).collect();
    assemble(tree, tuples)
}

/// Like [`deterministic_fan_tree`] but a random nonempty proper subset of
/// leaves carries the rotated triangle. Requires `depth >= 1`.
pub fn rotated_fan_tree(seed: u64, depth: usize) -> TreeFile {
    assert!(depth >= 1, "rotation needs at least two leaves");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let tree = sample_tree(&mut rng, depth);
    let n = tree.leaf_count();
    let mut rotate: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    if rotate.iter().all(|&r| r) {
        rotate[rng.random_range(0..n)] = false;
    }
    if rotate.iter().all(|&r| !r) {
        rotate[rng.random_range(0..n)] = true;
    }
    let tuples = rotate
        .iter()
        .map(|&rot| {
            let t = triangle_vertices(sample_eta(&mut rng));
            if rot {
                [rotate90(&t[0]), rotate90(&t[1]), rotate90(&t[2])]
            } else {
                t
            }
        })
        .collect();
    assemble(tree, tuples)
}

/// The mixed corpus: `count` deterministic-fan trees followed by `count`
/// rotated trees, depths cycling through `1..=max_depth`.
pub fn equivalence_corpus(seed: u64, count: usize, max_depth: usize) -> Vec<(TreeFile, bool)> {
    let depth = |i: usize| 1 + i % max_depth;
    let det = (0..count).map(|i| (deterministic_fan_tree(seed.wrapping_add(i as u64), depth(i)), true));
    let rot = (0..count).map(|i| (rotated_fan_tree(seed.wrapping_add(i as u64), depth(i)), false));
    det.chain(rot).collect()
}
