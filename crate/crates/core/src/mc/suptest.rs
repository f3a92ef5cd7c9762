use rayon::prelude::*;
use serde::Serialize;

use super::integral::IntegrandFamily;
use super::paths::PathEnsemble;
use super::{map_chunks, z_score, Moments};
use crate::error::{Error, Result};
use crate::geom::{DirectionGrid, Vector};

/// Pass/fail threshold in standard errors.
pub const Z_THRESHOLD: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SupremumVerdict {
    ConsistentWithMartingale,
    StrictSubmartingale,
    /// Some estimate falls short of the target by more than the threshold,
    /// which neither hypothesis predicts.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionStat {
    pub direction: Vector,
    /// Monte Carlo mean of `max_i ⟨x*, ξ^i⟩`.
    pub estimate: f64,
    /// `max_i ⟨x*, x^i⟩`.
    pub target: f64,
    pub stderr: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupremumReport {
    pub samples: usize,
    pub threshold: f64,
    pub directions: Vec<DirectionStat>,
    pub max_abs_z: f64,
    /// Direction index with the largest z-score.
    pub witness: usize,
    pub verdict: SupremumVerdict,
}

/// Per-selection sample means.
pub fn selection_means(terminal: &[Vec<Vector>]) -> Result<Vec<Vector>> {
    let first = terminal.first().ok_or_else(|| Error::MalformedInput("no samples".into()))?;
    let mut sums: Vec<Vec<f64>> = first.iter().map(|v| vec![0.0; v.dim()]).collect();
    for tuple in terminal {
        if tuple.len() != sums.len() {
            return Err(Error::LengthMismatch { expected: sums.len(), found: tuple.len() });
        }
        for (acc, v) in sums.iter_mut().zip(tuple) {
            for (a, x) in acc.iter_mut().zip(v.coords()) {
                *a += x;
            }
        }
    }
    let n = terminal.len() as f64;
    Ok(sums.into_iter().map(|s| Vector::from_vec_unchecked(s.into_iter().map(|a| a / n).collect())).collect())
}

/// Compares `E[max_i ⟨x*, ξ^i⟩]` against `max_i ⟨x*, x^i⟩` on every grid
/// direction. `terminal[s]` holds the selections of sample `s`; when
/// `initial` is `None` the targets are the selection sample means.
pub fn mc_supremum_test(terminal: &[Vec<Vector>], initial: Option<&[Vector]>, grid: &DirectionGrid) -> Result<SupremumReport> {
    let estimated;
    let targets = match initial {
        Some(x) => x,
        None => {
            estimated = selection_means(terminal)?;
            &estimated
        }
    };
    let n = targets.len();
    if n == 0 || terminal.is_empty() {
        return Err(Error::MalformedInput("supremum test needs samples and selections".into()));
    }
    for tuple in terminal {
        if tuple.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: tuple.len() });
        }
        if let Some(v) = tuple.iter().find(|v| v.dim() != grid.dim()) {
            return Err(Error::DimensionMismatch { expected: grid.dim(), found: v.dim() });
        }
    }

    let directions: Vec<DirectionStat> = grid
        .directions()
        .par_iter()
        .map(|u| {
            let mut m = Moments::default();
            for tuple in terminal {
                m.push(tuple.iter().map(|v| u.dot(v)).fold(f64::NEG_INFINITY, f64::max));
            }
            let target = targets.iter().map(|x| u.dot(x)).fold(f64::NEG_INFINITY, f64::max);
            let (estimate, stderr) = (m.mean(), m.stderr());
            DirectionStat { direction: u.clone(), estimate, target, stderr, z: z_score(estimate, target, stderr) }
        })
        .collect();

    let max_abs_z = directions.iter().map(|d| d.z.abs()).fold(0.0, f64::max);
    let witness = (0..directions.len()).fold(0, |b, i| if directions[i].z > directions[b].z { i } else { b });
    let verdict = if max_abs_z <= Z_THRESHOLD {
        SupremumVerdict::ConsistentWithMartingale
    } else if directions[witness].z > Z_THRESHOLD {
        SupremumVerdict::StrictSubmartingale
    } else {
        SupremumVerdict::Inconclusive
    };
    Ok(SupremumReport { samples: terminal.len(), threshold: Z_THRESHOLD, directions, max_abs_z, witness, verdict })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendDirection {
    pub direction: Vector,
    /// Estimated `E[s(x*, snapshot_t)]` at each checkpoint.
    pub means: Vec<f64>,
    /// Smallest z-score of a paired step difference between consecutive
    /// checkpoints.
    pub min_step_z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendReport {
    pub samples: usize,
    pub checkpoints: Vec<usize>,
    pub times: Vec<f64>,
    pub directions: Vec<TrendDirection>,
    pub worst_z: f64,
    pub worst_direction: usize,
    /// True when no step decreases by more than the threshold.
    pub nondecreasing: bool,
}

/// Tests that `t ↦ E[s(x*, co{J_t(x^i,z^i)})]` does not decrease across the
/// checkpoints. Each step is judged by the paired difference of the two
/// support values on the same path.
pub fn support_trend_test(
    family: &dyn IntegrandFamily,
    ensemble: &PathEnsemble,
    checkpoints: &[usize],
    grid: &DirectionGrid,
) -> Result<TrendReport> {
    let k = checkpoints.len();
    if k < 2 {
        return Err(Error::MalformedInput("trend test needs at least two checkpoints".into()));
    }
    if family.dim() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: family.dim() });
    }
    let dirs = grid.directions();
    let nd = dirs.len();

    type Acc = (Vec<Moments>, Vec<Moments>);
    let parts = map_chunks(ensemble.samples, |r| -> Result<Acc> {
        let mut level = vec![Moments::default(); nd * k];
        let mut step = vec![Moments::default(); nd * (k - 1)];
        let mut s_vals = vec![0.0; k];
        for s in r {
            let pts = family.evaluate(&ensemble.path(s), checkpoints)?;
            for (di, u) in dirs.iter().enumerate() {
                for (j, set) in pts.iter().enumerate() {
                    s_vals[j] = set.iter().map(|v| u.dot(v)).fold(f64::NEG_INFINITY, f64::max);
                    level[di * k + j].push(s_vals[j]);
                }
                for j in 0..k - 1 {
                    step[di * (k - 1) + j].push(s_vals[j + 1] - s_vals[j]);
                }
            }
        }
        Ok((level, step))
    });
    let mut level = vec![Moments::default(); nd * k];
    let mut step = vec![Moments::default(); nd * (k - 1)];
    for p in parts {
        let (l, s) = p?;
        level.iter_mut().zip(&l).for_each(|(a, b)| a.merge(b));
        step.iter_mut().zip(&s).for_each(|(a, b)| a.merge(b));
    }

    let directions: Vec<TrendDirection> = dirs
        .iter()
        .enumerate()
        .map(|(di, u)| {
            let means = (0..k).map(|j| level[di * k + j].mean()).collect();
            let min_step_z = (0..k - 1)
                .map(|j| {
                    let m = &step[di * (k - 1) + j];
                    z_score(m.mean(), 0.0, m.stderr())
                })
                .fold(f64::INFINITY, f64::min);
            TrendDirection { direction: u.clone(), means, min_step_z }
        })
        .collect();
    let worst_direction = (0..nd).fold(0, |b, i| if directions[i].min_step_z < directions[b].min_step_z { i } else { b });
    let worst_z = directions[worst_direction].min_step_z;
    let dt = ensemble.dt();
    Ok(TrendReport {
        samples: ensemble.samples,
        checkpoints: checkpoints.to_vec(),
        times: checkpoints.iter().map(|&c| c as f64 * dt).collect(),
        directions,
        worst_z,
        worst_direction,
        nondecreasing: worst_z >= -Z_THRESHOLD,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_selection_matches_its_own_mean() {
        let terminal: Vec<Vec<Vector>> = (0..100).map(|i| vec![Vector::xy((i % 7) as f64, -((i % 3) as f64))]).collect();
        let r = mc_supremum_test(&terminal, None, &DirectionGrid::planar(16).unwrap()).unwrap();
        assert!(r.max_abs_z < 1e-9);
        assert_eq!(r.verdict, SupremumVerdict::ConsistentWithMartingale);
    }

    #[test]
    fn label_swap_is_a_strict_submartingale() {
        // Two selections whose labels are swapped on half the samples: the
        // set is fixed but the selection means collapse to the midpoint.
        let a = Vector::xy(1.0, 0.0);
        let b = Vector::xy(-1.0, 0.0);
        let terminal: Vec<Vec<Vector>> =
            (0..1000).map(|i| if i % 2 == 0 { vec![a.clone(), b.clone()] } else { vec![b.clone(), a.clone()] }).collect();
        let r = mc_supremum_test(&terminal, None, &DirectionGrid::planar(8).unwrap()).unwrap();
        assert_eq!(r.verdict, SupremumVerdict::StrictSubmartingale);
        assert_eq!(r.directions[r.witness].z, f64::INFINITY);
    }

    #[test]
    fn ragged_input_is_rejected() {
        let t = vec![vec![Vector::xy(0.0, 0.0)], vec![]];
        assert!(mc_supremum_test(&t, None, &DirectionGrid::planar(8).unwrap()).is_err());
    }
}
