use rayon::prelude::*;
use serde::Serialize;

use super::integral::IntegrandFamily;
use super::paths::PathEnsemble;
use super::triangle::PolytopeTrajectory;
use super::map_chunks;
use crate::error::{Error, Result};
use crate::geom::{hausdorff_distance, Polytope};

const DIST_TOL: f64 = 1e-14;

/// Hausdorff increments over one dyadic lag.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusRow {
    /// Lag in stored grid points.
    pub lag: usize,
    /// Largest time span covered by the lag.
    pub span: f64,
    /// Largest increment over all samples.
    pub max: f64,
    /// Mean over samples of the per-sample largest increment.
    pub mean_sample_max: f64,
}

/// Continuity diagnostics for a polytope trajectory. Nothing here is a
/// verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub samples: usize,
    pub time_points: usize,
    /// `max_k h(P_{t_k}, P_{t_{k+1}})` per sample.
    pub max_increment: Vec<f64>,
    pub modulus: Vec<ModulusRow>,
    /// `Σ_i (|x^i|² + Ê ∫|z^i|² ds)` when an integrand family is known.
    pub summability: Option<f64>,
}

impl RegularityReport {
    pub fn overall_max_increment(&self) -> f64 {
        self.max_increment.iter().copied().fold(0.0, f64::max)
    }
}

fn lag_max(hulls: &[Polytope], lag: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..hulls.len() - lag {
        worst = worst.max(hausdorff_distance(&hulls[k], &hulls[k + lag], DIST_TOL)?);
    }
    Ok(worst)
}

pub fn path_regularity_report(traj: &PolytopeTrajectory) -> Result<RegularityReport> {
    let n = traj.times().len();
    if n < 2 {
        return Err(Error::MalformedInput("regularity needs at least two time points".into()));
    }
    let mut lags = Vec::new();
    let mut lag = 1;
    while lag < n {
        lags.push(lag);
        lag *= 2;
    }
    let per_sample: Vec<Vec<f64>> = (0..traj.sample_count())
        .into_par_iter()
        .map(|s| -> Result<Vec<f64>> {
            let hulls: Vec<Polytope> = (0..n).map(|k| traj.polytope(s, k)).collect::<Result<_>>()?;
            lags.iter().map(|&l| lag_max(&hulls, l)).collect()
        })
        .collect::<Result<_>>()?;

    let times = traj.times();
    let modulus = lags
        .iter()
        .enumerate()
        .map(|(j, &l)| {
            let span = (0..n - l).map(|k| times[k + l] - times[k]).fold(0.0, f64::max);
            let col = per_sample.iter().map(|v| v[j]);
            let max = col.clone().fold(0.0, f64::max);
            let mean_sample_max = if per_sample.is_empty() { 0.0 } else { col.sum::<f64>() / per_sample.len() as f64 };
            ModulusRow { lag: l, span, max, mean_sample_max }
        })
        .collect();
    Ok(RegularityReport {
        samples: traj.sample_count(),
        time_points: n,
        max_increment: per_sample.iter().map(|v| v[0]).collect(),
        modulus,
        summability: None,
    })
}

/// Monte Carlo estimate of `Σ_i (|x^i|² + E ∫|z^i|² ds)` over the whole
/// ensemble.
pub fn summability_statistic(family: &dyn IntegrandFamily, ensemble: &PathEnsemble) -> Result<f64> {
    let parts = map_chunks(ensemble.samples, |r| -> Result<f64> {
        let mut acc = 0.0;
        for s in r {
            acc += family.summability_term(&ensemble.path(s))?;
        }
        Ok(acc)
    });
    let mut total = 0.0;
    for p in parts {
        total += p?;
    }
    Ok(total / ensemble.samples as f64)
}
