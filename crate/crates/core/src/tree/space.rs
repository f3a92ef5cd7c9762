use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Polytope, Vector};

const LEAF_LIMIT: usize = 1 << 20;

/// `(level, index within level)`; level 0 is the root, the deepest level
/// holds the leaves. Children of `(k, i)` are `(k+1, i·b_k + c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NodeId {
    pub level: usize,
    pub index: usize,
}

/// Finite filtered probability space as a level-homogeneous tree: every
/// node at level `k` has `branching[k]` children reached with conditional
/// probabilities `probs[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TreeShapeJson", into = "TreeShapeJson")]
pub struct ScenarioTree {
    branching: Vec<usize>,
    probs: Vec<Vec<f64>>,
    /// `counts[k]` = number of nodes at level `k`.
    counts: Vec<usize>,
    leaf_probs: Vec<f64>,
}

impl ScenarioTree {
    pub fn new(branching: Vec<usize>, probs: Vec<Vec<f64>>) -> Result<Self> {
        if branching.len() != probs.len() {
            return Err(Error::InvalidTree(format!(
                "{} branching levels but {} probability levels",
                branching.len(),
                probs.len()
            )));
        }
        let mut counts = vec![1usize];
        for (k, (&b, p)) in branching.iter().zip(&probs).enumerate() {
            if b == 0 {
                return Err(Error::InvalidTree(format!("level {k} has zero branching")));
            }
            if p.len() != b {
                return Err(Error::InvalidTree(format!(
                    "level {k}: {} probabilities for branching {b}",
                    p.len()
                )));
            }
            if let Some(bad) = p.iter().find(|&&q| !(q > 0.0 && q <= 1.0)) {
                return Err(Error::InvalidTree(format!("level {k}: probability {bad} outside (0,1]")));
            }
            let s: f64 = p.iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidTree(format!("level {k}: probabilities sum to {s}")));
            }
            let next = counts[k]
                .checked_mul(b)
                .filter(|&n| n <= LEAF_LIMIT)
                .ok_or_else(|| Error::InvalidTree("too many leaves".into()))?;
            counts.push(next);
        }
        let mut leaf_probs = vec![1.0];
        for (&b, p) in branching.iter().zip(&probs) {
            leaf_probs = leaf_probs
                .iter()
                .flat_map(|&q| (0..b).map(move |c| q * p[c]))
                .collect();
        }
        let total: f64 = leaf_probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidTree(format!("leaf probabilities sum to {total}")));
        }
        Ok(Self { branching, probs, counts, leaf_probs })
    }

    /// Bernoulli filtration: binary branching with probability ½ at every level.
    pub fn binary(depth: usize) -> Self {
        Self::new(vec![2; depth], vec![vec![0.5, 0.5]; depth]).expect("valid binary tree")
    }

    /// Number of levels below the root; leaves sit at this level.
    pub fn depth(&self) -> usize {
        self.branching.len()
    }

    pub fn branching(&self) -> &[usize] {
        &self.branching
    }

    pub fn child_probs(&self, level: usize) -> &[f64] {
        &self.probs[level]
    }

    pub fn node_count(&self, level: usize) -> usize {
        self.counts[level]
    }

    pub fn leaf_count(&self) -> usize {
        *self.counts.last().expect("root level")
    }

    pub fn leaf_probs(&self) -> &[f64] {
        &self.leaf_probs
    }

    pub fn nodes(&self, level: usize) -> impl Iterator<Item = NodeId> {
        (0..self.counts[level]).map(move |index| NodeId { level, index })
    }

    /// All nodes, root first, level by level.
    pub fn all_nodes(&self) -> Vec<NodeId> {
        (0..=self.depth()).flat_map(|k| self.nodes(k)).collect()
    }

    pub fn children(&self, node: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let b = self.branching[node.level];
        (0..b).map(move |c| (NodeId { level: node.level + 1, index: node.index * b + c }, self.probs[node.level][c]))
    }

    /// Leaves below `node`, a contiguous range.
    pub fn leaf_range(&self, node: NodeId) -> std::ops::Range<usize> {
        let span: usize = self.branching[node.level..].iter().product();
        node.index * span..(node.index + 1) * span
    }

    /// Unconditional probability of the atom `node`.
    pub fn node_prob(&self, node: NodeId) -> f64 {
        self.leaf_range(node).map(|l| self.leaf_probs[l]).sum()
    }

    pub fn check_level(&self, level: usize) -> Result<()> {
        if level > self.depth() {
            return Err(Error::InvalidTree(format!("level {level} exceeds depth {}", self.depth())));
        }
        Ok(())
    }
}

/// A leaf-indexed `R^d` random variable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeVectorRV {
    values: Vec<Vector>,
}

impl TreeVectorRV {
    pub fn new(tree: &ScenarioTree, values: Vec<Vector>) -> Result<Self> {
        if values.len() != tree.leaf_count() {
            return Err(Error::LengthMismatch { expected: tree.leaf_count(), found: values.len() });
        }
        let d = values[0].dim();
        if let Some(v) = values.iter().find(|v| v.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: v.dim() });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[Vector] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }
}

/// Node-indexed polytopes at every level of a tree: an adapted set-valued
/// process.
#[derive(Debug, Clone, PartialEq)]
pub struct TreePolytopeProcess {
    levels: Vec<Vec<Polytope>>,
}

impl TreePolytopeProcess {
    pub fn new(tree: &ScenarioTree, levels: Vec<Vec<Polytope>>) -> Result<Self> {
        if levels.len() != tree.depth() + 1 {
            return Err(Error::LengthMismatch { expected: tree.depth() + 1, found: levels.len() });
        }
        let d = levels[0]
            .first()
            .map(Polytope::dim)
            .ok_or_else(|| Error::InvalidTree("root polytope missing".into()))?;
        for (k, level) in levels.iter().enumerate() {
            if level.len() != tree.node_count(k) {
                return Err(Error::LengthMismatch { expected: tree.node_count(k), found: level.len() });
            }
            if let Some(p) = level.iter().find(|p| p.dim() != d) {
                return Err(Error::DimensionMismatch { expected: d, found: p.dim() });
            }
        }
        Ok(Self { levels })
    }

    pub fn at(&self, node: NodeId) -> &Polytope {
        &self.levels[node.level][node.index]
    }

    pub fn level(&self, k: usize) -> &[Polytope] {
        &self.levels[k]
    }

    pub fn set(&mut self, node: NodeId, p: Polytope) {
        self.levels[node.level][node.index] = p;
    }
}

/// A tree together with leaf-indexed selections `ξ¹ … ξⁿ`.
///
/// JSON: `{"branching": [b₀, …], "probs": [[…], …], "leaves": {"xi": [[ξ¹(leaf), …, ξⁿ(leaf)], …]}}`
/// with leaves in lexicographic path order. `probs` may be omitted for
/// uniform branching.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeFile {
    pub tree: ScenarioTree,
    pub selections: Vec<TreeVectorRV>,
}

impl TreeFile {
    pub fn new(tree: ScenarioTree, selections: Vec<TreeVectorRV>) -> Result<Self> {
        let first = selections
            .first()
            .ok_or_else(|| Error::InvalidTree("no selections".into()))?;
        if let Some(s) = selections.iter().find(|s| s.dim() != first.dim()) {
            return Err(Error::DimensionMismatch { expected: first.dim(), found: s.dim() });
        }
        Ok(Self { tree, selections })
    }

    /// Per-leaf vertex tuples `(ξ¹(leaf), …, ξⁿ(leaf))`.
    pub fn leaf_tuples(&self) -> Vec<Vec<Vector>> {
        (0..self.tree.leaf_count())
            .map(|l| self.selections.iter().map(|s| s.values()[l].clone()).collect())
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeShapeJson {
    branching: Vec<usize>,
    #[serde(default)]
    probs: Option<Vec<Vec<f64>>>,
}

impl TryFrom<TreeShapeJson> for ScenarioTree {
    type Error = Error;
    fn try_from(raw: TreeShapeJson) -> Result<Self> {
        let probs = raw.probs.unwrap_or_else(|| {
            raw.branching.iter().map(|&b| vec![1.0 / b.max(1) as f64; b]).collect()
        });
        ScenarioTree::new(raw.branching, probs)
    }
}

impl From<ScenarioTree> for TreeShapeJson {
    fn from(t: ScenarioTree) -> Self {
        TreeShapeJson { branching: t.branching, probs: Some(t.probs) }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeFileJson {
    branching: Vec<usize>,
    #[serde(default)]
    probs: Option<Vec<Vec<f64>>>,
    leaves: LeavesJson,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LeavesJson {
    xi: Vec<Vec<Vector>>,
}

impl Serialize for TreeFile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TreeFileJson {
            branching: self.tree.branching.clone(),
            probs: Some(self.tree.probs.clone()),
            leaves: LeavesJson { xi: self.leaf_tuples() },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TreeFile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = TreeFileJson::deserialize(d)?;
        let tree = ScenarioTree::try_from(TreeShapeJson { branching: raw.branching, probs: raw.probs })
            .map_err(serde::de::Error::custom)?;
        let xi = raw.leaves.xi;
        if xi.len() != tree.leaf_count() {
            return Err(serde::de::Error::custom(format!(
                "expected {} leaves, found {}",
                tree.leaf_count(),
                xi.len()
            )));
        }
        let n = xi.first().map(Vec::len).unwrap_or(0);
        if n == 0 || xi.iter().any(|t| t.len() != n) {
            return Err(serde::de::Error::custom("every leaf needs the same nonzero number of selections"));
        }
        let selections = (0..n)
            .map(|i| TreeVectorRV::new(&tree, xi.iter().map(|t| t[i].clone()).collect()))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        TreeFile::new(tree, selections).map_err(serde::de::Error::custom)
    }
}
