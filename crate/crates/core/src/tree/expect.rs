use rayon::prelude::*;

use super::space::{NodeId, ScenarioTree, TreePolytopeProcess, TreeVectorRV};
use crate::error::{Error, Result};
use crate::geom::{minkowski_average, Polytope, Vector};

/// Conditional weights `p_leaf / p_node` of the leaves below `node`,
/// renormalized to sum to one.
fn leaf_weights(tree: &ScenarioTree, node: NodeId) -> (std::ops::Range<usize>, Vec<f64>) {
    let range = tree.leaf_range(node);
    let raw: Vec<f64> = tree.leaf_probs()[range.clone()].to_vec();
    let total: f64 = raw.iter().sum();
    (range, raw.into_iter().map(|p| p / total).collect())
}

/// `E[ξ | 𝒢_k]` on each level-`k` atom: probability-weighted average of the
/// descendant leaf values.
pub fn cond_expect_vector(tree: &ScenarioTree, rv: &TreeVectorRV, level: usize) -> Result<Vec<Vector>> {
    tree.check_level(level)?;
    if rv.values().len() != tree.leaf_count() {
        return Err(Error::LengthMismatch { expected: tree.leaf_count(), found: rv.values().len() });
    }
    let d = rv.dim();
    Ok(tree
        .nodes(level)
        .map(|node| {
            let (range, w) = leaf_weights(tree, node);
            let mut acc = vec![0.0; d];
            for (v, wi) in rv.values()[range].iter().zip(&w) {
                for (a, x) in acc.iter_mut().zip(v.coords()) {
                    *a += wi * x;
                }
            }
            Vector::new(acc).expect("finite average")
        })
        .collect())
}

/// `E[Ξ | 𝒢_k]` on each level-`k` atom: weighted Minkowski average of the
/// descendant leaf polytopes.
pub fn cond_expect_polytope(tree: &ScenarioTree, leaves: &[Polytope], level: usize) -> Result<Vec<Polytope>> {
    tree.check_level(level)?;
    if leaves.len() != tree.leaf_count() {
        return Err(Error::LengthMismatch { expected: tree.leaf_count(), found: leaves.len() });
    }
    let nodes: Vec<NodeId> = tree.nodes(level).collect();
    nodes
        .par_iter()
        .map(|&node| {
            let (range, w) = leaf_weights(tree, node);
            minkowski_average(&w, &leaves[range])
        })
        .collect()
}

/// The martingale `E[Ξ | 𝒢_k]` at every level, by backward recursion over
/// one-step conditional averages.
pub fn conditional_process(tree: &ScenarioTree, leaves: &[Polytope]) -> Result<TreePolytopeProcess> {
    if leaves.len() != tree.leaf_count() {
        return Err(Error::LengthMismatch { expected: tree.leaf_count(), found: leaves.len() });
    }
    let depth = tree.depth();
    let mut levels: Vec<Vec<Polytope>> = vec![Vec::new(); depth + 1];
    levels[depth] = leaves.to_vec();
    for k in (0..depth).rev() {
        let below = &levels[k + 1];
        let probs = tree.child_probs(k);
        let b = tree.branching()[k];
        let nodes: Vec<NodeId> = tree.nodes(k).collect();
        levels[k] = nodes
            .par_iter()
            .map(|node| minkowski_average(probs, &below[node.index * b..(node.index + 1) * b]))
            .collect::<Result<Vec<_>>>()?;
    }
    TreePolytopeProcess::new(tree, levels)
}
