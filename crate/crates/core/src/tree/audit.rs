use rayon::prelude::*;
use serde::Serialize;

use super::expect::{cond_expect_vector, conditional_process};
use super::space::{NodeId, ScenarioTree, TreePolytopeProcess, TreeVectorRV};
use crate::error::{Error, Result};
use crate::geom::{contains, hausdorff_distance, minkowski_average, one_sided_hausdorff, Polytope};

/// Hausdorff gap separating a martingale from a strict submartingale.
pub const GAP_TOL: f64 = 1e-7;

const DIST_TOL: f64 = 1e-12;
const INCLUSION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditVerdict {
    Martingale,
    /// `M_k ⊊ E[M_{k+1} | 𝒢_k]` somewhere, never the reverse.
    SubmartingaleOnly,
    SupermartingaleOnly,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeDefect {
    pub node: NodeId,
    /// `h(M(node), Σ_c p_c M(child))`.
    pub defect: f64,
    /// How far `M(node)` sticks out of the children's average.
    pub excess: f64,
    /// How far the children's average sticks out of `M(node)`.
    pub deficit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MartingaleAudit {
    pub nodes: Vec<NodeDefect>,
    pub max_defect: f64,
    pub max_excess: f64,
    pub max_deficit: f64,
    pub verdict: AuditVerdict,
}

/// Checks `M(node) = Σ_c p_c M(child)` at every internal node.
pub fn martingale_audit(tree: &ScenarioTree, proc: &TreePolytopeProcess) -> Result<MartingaleAudit> {
    let internal: Vec<NodeId> = (0..tree.depth()).flat_map(|k| tree.nodes(k)).collect();
    let nodes = internal
        .par_iter()
        .map(|&node| {
            let (kids, probs): (Vec<Polytope>, Vec<f64>) =
                tree.children(node).map(|(c, p)| (proc.at(c).clone(), p)).unzip();
            let avg = minkowski_average(&probs, &kids)?;
            let here = proc.at(node);
            let excess = one_sided_hausdorff(here, &avg, DIST_TOL)?;
            let deficit = one_sided_hausdorff(&avg, here, DIST_TOL)?;
            Ok(NodeDefect { node, defect: excess.max(deficit), excess, deficit })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_of = |f: fn(&NodeDefect) -> f64| nodes.iter().map(f).fold(0.0, f64::max);
    let (max_defect, max_excess, max_deficit) = (max_of(|n| n.defect), max_of(|n| n.excess), max_of(|n| n.deficit));
    let verdict = if max_defect <= GAP_TOL {
        AuditVerdict::Martingale
    } else if max_excess <= GAP_TOL {
        AuditVerdict::SubmartingaleOnly
    } else if max_deficit <= GAP_TOL {
        AuditVerdict::SupermartingaleOnly
    } else {
        AuditVerdict::Neither
    };
    Ok(MartingaleAudit { nodes, max_defect, max_excess, max_deficit, verdict })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeGap {
    pub node: NodeId,
    /// `h(G(node), M(node))`.
    pub gap: f64,
    /// `G(node) ⊆ M(node)` within tolerance.
    pub contained: bool,
    /// `‖M(node)‖`.
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HullGapReport {
    pub nodes: Vec<NodeGap>,
    pub max_gap: f64,
    /// `co{E[ξⁱ|node]} ⊆ E[Ξ|node]` at every node.
    pub inclusion_holds: bool,
    /// `‖M(node)‖ <= Σ_c p_c ‖M(child)‖` at every internal node.
    pub norm_submartingale: bool,
    pub martingale: bool,
    #[serde(skip)]
    pub hull_process: TreePolytopeProcess,
    #[serde(skip)]
    pub conditional: TreePolytopeProcess,
}

/// Compares `G(node) = co{E[ξⁱ | node]}` with `M(node) = E[Ξ | node]` for
/// `Ξ(leaf) = co{ξⁱ(leaf)}`. The verdict is "martingale" iff every gap is
/// within [`GAP_TOL`].
pub fn hull_vs_conditional(tree: &ScenarioTree, selections: &[TreeVectorRV]) -> Result<HullGapReport> {
    if selections.is_empty() {
        return Err(Error::MalformedInput("no selections".into()));
    }
    let leaves = (0..tree.leaf_count())
        .map(|l| Polytope::from_points(selections.iter().map(|s| s.values()[l].clone()).collect()))
        .collect::<Result<Vec<_>>>()?;
    let conditional = conditional_process(tree, &leaves)?;

    let mut hull_levels = Vec::with_capacity(tree.depth() + 1);
    for k in 0..=tree.depth() {
        let per_sel = selections
            .iter()
            .map(|s| cond_expect_vector(tree, s, k))
            .collect::<Result<Vec<_>>>()?;
        let level = (0..tree.node_count(k))
            .map(|i| Polytope::from_points(per_sel.iter().map(|v| v[i].clone()).collect()))
            .collect::<Result<Vec<_>>>()?;
        hull_levels.push(level);
    }
    let hull_process = TreePolytopeProcess::new(tree, hull_levels)?;

    let all = tree.all_nodes();
    let nodes = all
        .par_iter()
        .map(|&node| {
            let g = hull_process.at(node);
            let m = conditional.at(node);
            Ok(NodeGap {
                node,
                gap: hausdorff_distance(g, m, DIST_TOL)?,
                contained: contains(m, g, INCLUSION_TOL)?,
                norm: m.norm(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let norm_submartingale = (0..tree.depth()).flat_map(|k| tree.nodes(k)).all(|node| {
        let avg: f64 = tree.children(node).map(|(c, p)| p * conditional.at(c).norm()).sum();
        conditional.at(node).norm() <= avg + INCLUSION_TOL
    });
    let max_gap = nodes.iter().map(|n| n.gap).fold(0.0, f64::max);
    Ok(HullGapReport {
        inclusion_holds: nodes.iter().all(|n| n.contained),
        martingale: max_gap <= GAP_TOL,
        nodes,
        max_gap,
        norm_submartingale,
        hull_process,
        conditional,
    })
}
