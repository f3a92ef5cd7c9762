use serde::Serialize;

use crate::error::{Error, Result};

const EQUALITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomizationReport {
    /// `E[Σ_i 1_{A_i} ζ_i]` at the argmax partition.
    pub partition_value: f64,
    /// `E[max_i ζ_i]`.
    pub max_value: f64,
    /// `E[Σ_i η_i ζ_i]` at the optimal simplex-valued `η`.
    pub simplex_value: f64,
    /// `partition[a] = i` iff atom `a` belongs to `A_i`.
    pub partition: Vec<usize>,
    /// Optimal `η` per atom (an indicator vector of the partition).
    pub weights: Vec<Vec<f64>>,
    pub consistent: bool,
}

/// The three expectations of the randomization identity on a finite space.
///
/// `zeta[i][a]` is `ζ_i` on atom `a`. The partition is built sequentially:
/// `B_i = {ζ_i = max_j ζ_j}` and `A_i = B_i \ (A_1 ∪ … ∪ A_{i-1})`, so ties go
/// to the lowest index.
pub fn randomization_identity(probs: &[f64], zeta: &[Vec<f64>]) -> Result<RandomizationReport> {
    let n = zeta.len();
    if n == 0 {
        return Err(Error::MalformedInput("need at least one random variable".into()));
    }
    let atoms = probs.len();
    if atoms == 0 {
        return Err(Error::MalformedInput("need at least one atom".into()));
    }
    if let Some(z) = zeta.iter().find(|z| z.len() != atoms) {
        return Err(Error::LengthMismatch { expected: atoms, found: z.len() });
    }
    if probs.iter().any(|&p| !(p > 0.0)) || zeta.iter().flatten().any(|z| !z.is_finite()) {
        return Err(Error::MalformedInput("probabilities must be positive and values finite".into()));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::MalformedInput(format!("atom probabilities sum to {total}")));
    }

    let mut assigned = vec![false; atoms];
    let mut partition = vec![usize::MAX; atoms];
    for i in 0..n {
        for a in 0..atoms {
            let max = (0..n).map(|j| zeta[j][a]).fold(f64::NEG_INFINITY, f64::max);
            if !assigned[a] && zeta[i][a] == max {
                partition[a] = i;
                assigned[a] = true;
            }
        }
    }

    let partition_value: f64 = (0..atoms).map(|a| probs[a] * zeta[partition[a]][a]).sum();
    let max_value: f64 = (0..atoms)
        .map(|a| probs[a] * (0..n).map(|i| zeta[i][a]).fold(f64::NEG_INFINITY, f64::max))
        .sum();
    // A linear function on the simplex is maximized at a vertex; the
    // partition indicator is such a vertex.
    let weights: Vec<Vec<f64>> = partition
        .iter()
        .map(|&i| (0..n).map(|j| if j == i { 1.0 } else { 0.0 }).collect())
        .collect();
    let simplex_value: f64 = (0..atoms)
        .map(|a| probs[a] * (0..n).map(|i| weights[a][i] * zeta[i][a]).sum::<f64>())
        .sum();
    let consistent = (partition_value - max_value).abs() <= EQUALITY_TOL
        && (simplex_value - max_value).abs() <= EQUALITY_TOL;
    Ok(RandomizationReport { partition_value, max_value, simplex_value, partition, weights, consistent })
}
