//! Monte Carlo layer: reproducible Brownian drivers, exponential
//! martingales, trajectory integrals, the random-triangle process and the
//! statistical martingale checks built on them.
//!
//! Sample paths are regenerated on demand from `(seed, sample, component)`,
//! so no ensemble is ever held in memory. Parallel work is split into fixed
//! sample chunks that are reduced in chunk order, which keeps every result
//! bit-identical regardless of the worker count.

mod experiment;
mod integral;
mod paths;
mod regularity;
pub mod rng;
mod suptest;
mod triangle;

pub use experiment::{run_triangle_experiment, TriangleExperiment, TriangleExperimentConfig, VertexMean};
pub use integral::{
    finite_integral_snapshot, integral_at, trajectory_integral, Integrand, IntegrandFamily, Snapshot,
    TriangleFamily, ZMatrix, ZProcess,
};
pub use paths::{brownian_paths, exponential_martingale, stochastic_exponential, DriverMode, PathEnsemble, SamplePath};
pub use regularity::{path_regularity_report, summability_statistic, ModulusRow, RegularityReport};
pub use suptest::{
    mc_supremum_test, selection_means, support_trend_test, DirectionStat, SupremumReport, SupremumVerdict, TrendDirection,
    TrendReport, Z_THRESHOLD,
};
pub use triangle::{hypotenuse_length, thin_indices, triangle_process, PolytopeTrajectory};

use std::ops::Range;

use rayon::prelude::*;

/// Samples per parallel work unit. Fixed so reductions do not depend on the
/// thread count.
pub(crate) const CHUNK: usize = 256;

/// Maps `f` over consecutive sample ranges of length [`CHUNK`] in parallel
/// and returns the results in range order.
pub(crate) fn map_chunks<T: Send>(n: usize, f: impl Fn(Range<usize>) -> T + Sync + Send) -> Vec<T> {
    let chunks: Vec<Range<usize>> = (0..n.div_ceil(CHUNK)).map(|c| c * CHUNK..((c + 1) * CHUNK).min(n)).collect();
    chunks.into_par_iter().map(f).collect()
}

/// Streaming mean/variance accumulator combined in a fixed order.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Moments {
    pub n: f64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1.0;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &Moments) {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.n
    }

    /// Standard error of the mean (unbiased variance).
    pub fn stderr(&self) -> f64 {
        if self.n < 2.0 {
            return 0.0;
        }
        let mean = self.mean();
        let var = ((self.sum_sq - self.n * mean * mean) / (self.n - 1.0)).max(0.0);
        (var / self.n).sqrt()
    }
}

/// `(estimate - target) / stderr`, with a zero standard error mapped to 0
/// for exact agreement and ±∞ otherwise.
pub(crate) fn z_score(estimate: f64, target: f64, stderr: f64) -> f64 {
    let diff = estimate - target;
    if stderr > 0.0 {
        diff / stderr
    } else if diff.abs() <= 1e-12 * (1.0 + target.abs()) {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}
