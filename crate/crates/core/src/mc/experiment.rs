use serde::{Deserialize, Serialize};

use super::paths::{exponential_martingale, DriverMode, PathEnsemble};
use super::regularity::{path_regularity_report, RegularityReport};
use super::rng::{substream, COIN_COMPONENT};
use super::suptest::{mc_supremum_test, SupremumReport, Z_THRESHOLD};
use super::triangle::{thin_indices, triangle_process, triangle_vertices, PolytopeTrajectory};
use super::{map_chunks, z_score, Moments};
use crate::error::{Error, Result};
use crate::geom::{DirectionGrid, Vector};

/// Parameters of the random-triangle run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriangleExperimentConfig {
    pub seed: u64,
    pub samples: usize,
    #[serde(rename = "N")]
    pub steps: usize,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub alpha: f64,
    pub mode: DriverMode,
    /// Number of planar grid directions for the supremum tests.
    pub grid_k: usize,
    /// Trajectory thinning stride; `None` means `⌈N/500⌉`.
    #[serde(default)]
    pub thin: Option<usize>,
    /// How many sample trajectories are kept in full.
    #[serde(default = "default_paths_out")]
    pub paths_out: usize,
}

fn default_paths_out() -> usize {
    4
}

impl Default for TriangleExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            samples: 100_000,
            steps: 10_000,
            horizon: 1.0,
            alpha: 0.5,
            mode: DriverMode::Walk,
            grid_k: 720,
            thin: None,
            paths_out: default_paths_out(),
        }
    }
}

impl TriangleExperimentConfig {
    pub fn stride(&self) -> usize {
        self.thin.unwrap_or_else(|| self.steps.div_ceil(500)).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() {
            return Err(Error::MalformedInput("alpha must be finite".into()));
        }
        if self.paths_out > self.samples {
            return Err(Error::MalformedInput("paths_out exceeds samples".into()));
        }
        PathEnsemble::new(3, self.steps, self.horizon, self.mode, self.seed, self.samples)?;
        DirectionGrid::planar(self.grid_k)?;
        Ok(())
    }
}

/// Terminal sample mean of one vertex against its initial position.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexMean {
    pub initial: Vector,
    pub mean: Vector,
    pub stderr: Vector,
    pub z: Vector,
    pub within_threshold: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriangleExperiment {
    pub config: TriangleExperimentConfig,
    pub vertex_means: Vec<VertexMean>,
    /// Supremum test of the triangle family itself.
    pub supremum: SupremumReport,
    /// Supremum test of the coin-rotated control family.
    pub control: SupremumReport,
    /// Diagnostics on the full-resolution kept trajectories.
    pub regularity: RegularityReport,
    /// Kept trajectories on the thinned grid.
    #[serde(skip)]
    pub trajectory: PolytopeTrajectory,
}

fn rotate_quarter(v: &Vector) -> Vector {
    Vector::xy(-v[1], v[0])
}

/// `∫ Σ_i |z^i|² dt` for the vertex integrands `dξ = z dB` implied by
/// `dη_c = α η_c dB^c`, as a left-point sum. The squared Frobenius norms
/// add up to `α² (3η₁² + 3η₂² + 2η₃²)`.
fn path_energy(eta: &[Vec<f64>], alpha: f64, dt: f64) -> f64 {
    let n = eta[0].len() - 1;
    let sum: f64 = (0..n)
        .map(|k| 3.0 * eta[0][k] * eta[0][k] + 3.0 * eta[1][k] * eta[1][k] + 2.0 * eta[2][k] * eta[2][k])
        .sum();
    alpha * alpha * sum * dt
}

/// Runs the random-triangle simulation with closed-form exponential
/// martingale weights.
///
/// Each path yields the terminal triangle, the weights are checked to stay
/// positive at every step, and the control family rotates the terminal
/// triangle a quarter turn about the origin on an independent fair coin.
/// Its selection means are `(x^i + R x^i)/2`.
pub fn run_triangle_experiment(cfg: &TriangleExperimentConfig) -> Result<TriangleExperiment> {
    cfg.validate()?;
    let ens = PathEnsemble::new(3, cfg.steps, cfg.horizon, cfg.mode, cfg.seed, cfg.samples)?;
    let grid = DirectionGrid::planar(cfg.grid_k)?;
    let times = ens.times();
    let initial = triangle_vertices([1.0, 1.0, 1.0]).to_vec();

    type Chunk = (Vec<Vec<Vector>>, Vec<Vec<Vector>>, Vec<PolytopeTrajectory>, f64);
    let parts = map_chunks(cfg.samples, |r| -> Result<Chunk> {
        let mut terminal = Vec::with_capacity(r.len());
        let mut control = Vec::with_capacity(r.len());
        let mut kept = Vec::new();
        let mut energy = 0.0;
        for s in r {
            let path = ens.path(s);
            let eta: Vec<Vec<f64>> = (0..3).map(|c| exponential_martingale(&path, cfg.alpha, c)).collect::<Result<_>>()?;
            if s < cfg.paths_out {
                kept.push(triangle_process(&times, &eta[0], &eta[1], &eta[2])?);
            } else if let Some(k) = (0..=cfg.steps).find(|&k| !(eta[0][k] > 0.0 && eta[1][k] > 0.0 && eta[2][k] > 0.0)) {
                return Err(Error::Admissibility { time_index: k });
            }
            energy += path_energy(&eta, cfg.alpha, ens.dt());
            let tri = triangle_vertices([eta[0][cfg.steps], eta[1][cfg.steps], eta[2][cfg.steps]]).to_vec();
            let coin = rand::Rng::random_bool(&mut substream(cfg.seed, s as u64, COIN_COMPONENT), 0.5);
            control.push(if coin { tri.iter().map(rotate_quarter).collect() } else { tri.clone() });
            terminal.push(tri);
        }
        Ok((terminal, control, kept, energy))
    });
    let mut terminal = Vec::with_capacity(cfg.samples);
    let mut control = Vec::with_capacity(cfg.samples);
    let mut kept = Vec::new();
    let mut energy = 0.0;
    for p in parts {
        let (t, c, k, e) = p?;
        energy += e;
        terminal.extend(t);
        control.extend(c);
        kept.extend(k);
    }

    let vertex_means = initial
        .iter()
        .enumerate()
        .map(|(i, x0)| {
            let mut m = [Moments::default(); 2];
            for tuple in &terminal {
                m[0].push(tuple[i][0]);
                m[1].push(tuple[i][1]);
            }
            let mean = Vector::xy(m[0].mean(), m[1].mean());
            let stderr = Vector::xy(m[0].stderr(), m[1].stderr());
            let z = Vector::xy(z_score(mean[0], x0[0], stderr[0]), z_score(mean[1], x0[1], stderr[1]));
            let within_threshold = z.norm_inf() <= Z_THRESHOLD;
            VertexMean { initial: x0.clone(), mean, stderr, z, within_threshold }
        })
        .collect();

    let supremum = mc_supremum_test(&terminal, Some(&initial), &grid)?;
    let control_targets: Vec<Vector> = initial.iter().map(|x| (x + &rotate_quarter(x)).scale(0.5)).collect();
    let control = mc_supremum_test(&control, Some(&control_targets), &grid)?;

    let (mut regularity, trajectory) = if kept.is_empty() {
        let empty = PolytopeTrajectory::new(times.clone(), Vec::new())?;
        (path_regularity_report(&empty)?, empty)
    } else {
        let full = PolytopeTrajectory::concat(kept)?;
        (path_regularity_report(&full)?, full.select_times(&thin_indices(cfg.steps, cfg.stride()))?)
    };

    let x_sq: f64 = initial.iter().map(|x| x.dot(x)).sum();
    regularity.summability = Some(x_sq + energy / cfg.samples as f64);

    Ok(TriangleExperiment { config: cfg.clone(), vertex_means, supremum, control, regularity, trajectory })
}
