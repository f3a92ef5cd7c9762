use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::rng::substream;
use crate::error::{Error, Result};

/// How Brownian increments are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriverMode {
    /// Symmetric ±√dt steps.
    Walk,
    /// Gaussian steps with variance dt.
    Gauss,
}

impl std::str::FromStr for DriverMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "walk" => Ok(DriverMode::Walk),
            "gauss" => Ok(DriverMode::Gauss),
            other => Err(Error::MalformedInput(format!("unknown driver mode `{other}`"))),
        }
    }
}

/// A lazily generated ensemble of `m`-dimensional Brownian paths on a
/// uniform grid of `steps` intervals over `[0, horizon]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathEnsemble {
    pub m: usize,
    pub steps: usize,
    pub horizon: f64,
    pub mode: DriverMode,
    pub seed: u64,
    pub samples: usize,
}

/// Validates the ensemble parameters and returns a handle that regenerates
/// any sample on request.
pub fn brownian_paths(m: usize, steps: usize, horizon: f64, mode: DriverMode, seed: u64, samples: usize) -> Result<PathEnsemble> {
    PathEnsemble::new(m, steps, horizon, mode, seed, samples)
}

impl PathEnsemble {
    pub fn new(m: usize, steps: usize, horizon: f64, mode: DriverMode, seed: u64, samples: usize) -> Result<Self> {
        if m == 0 || steps == 0 || samples == 0 {
            return Err(Error::MalformedInput("m, steps and samples must be positive".into()));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::MalformedInput(format!("horizon must be positive, got {horizon}")));
        }
        Ok(Self { m, steps, horizon, mode, seed, samples })
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    /// Grid times `t_0 = 0, ..., t_N = T`.
    pub fn times(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..=self.steps).map(|k| if k == self.steps { self.horizon } else { k as f64 * dt }).collect()
    }

    /// Regenerates sample `index`. Components use independent substreams.
    pub fn path(&self, index: usize) -> SamplePath {
        let n = self.steps;
        let incr = match self.mode {
            DriverMode::Walk => {
                let mut steps = Vec::with_capacity(self.m * n);
                for c in 0..self.m {
                    let mut rng = substream(self.seed, index as u64, c as u64);
                    let mut left = n;
                    while left > 0 {
                        let bits = rng.next_u64();
                        let take = left.min(64);
                        for b in 0..take {
                            steps.push(if (bits >> b) & 1 == 1 { 1 } else { -1 });
                        }
                        left -= take;
                    }
                }
                Increments::Walk { steps, unit: self.dt().sqrt() }
            }
            DriverMode::Gauss => {
                let sd = self.dt().sqrt();
                let mut out = Vec::with_capacity(self.m * n);
                for c in 0..self.m {
                    let mut rng = substream(self.seed, index as u64, c as u64);
                    for _ in 0..n {
                        let g: f64 = StandardNormal.sample(&mut rng);
                        out.push(sd * g);
                    }
                }
                Increments::Gauss(out)
            }
        };
        SamplePath { m: self.m, steps: n, horizon: self.horizon, incr }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Increments {
    /// Integer step counts times a common unit, so positions are exact
    /// multiples of the unit and coarsening stays nested.
    Walk { steps: Vec<i32>, unit: f64 },
    Gauss(Vec<f64>),
}

/// One realization of the driver. Increments are stored component-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    m: usize,
    steps: usize,
    horizon: f64,
    incr: Increments,
}

impl SamplePath {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    /// ΔB^c over `[t_k, t_{k+1})`.
    #[inline]
    pub fn increment(&self, k: usize, c: usize) -> f64 {
        let i = c * self.steps + k;
        match &self.incr {
            Increments::Walk { steps, unit } => steps[i] as f64 * unit,
            Increments::Gauss(v) => v[i],
        }
    }

    /// `B^c_{t_0}, ..., B^c_{t_N}` with `B_0 = 0`.
    pub fn positions(&self, c: usize) -> Vec<f64> {
        let range = c * self.steps..(c + 1) * self.steps;
        let mut out = Vec::with_capacity(self.steps + 1);
        out.push(0.0);
        match &self.incr {
            Increments::Walk { steps, unit } => {
                let mut acc: i64 = 0;
                for &s in &steps[range] {
                    acc += s as i64;
                    out.push(acc as f64 * unit);
                }
            }
            Increments::Gauss(v) => {
                let mut acc = 0.0;
                for &x in &v[range] {
                    acc += x;
                    out.push(acc);
                }
            }
        }
        out
    }

    pub fn terminal(&self, c: usize) -> f64 {
        *self.positions(c).last().expect("positions are nonempty")
    }

    /// The same path observed on a grid with `steps / factor` intervals.
    /// Increments over each block are summed, so the coarse path agrees
    /// with the fine one at every coarse grid time.
    pub fn coarsen(&self, factor: usize) -> Result<SamplePath> {
        if factor == 0 || self.steps % factor != 0 {
            return Err(Error::LengthMismatch { expected: self.steps, found: factor });
        }
        let coarse = self.steps / factor;
        let incr = match &self.incr {
            Increments::Walk { steps, unit } => Increments::Walk {
                steps: steps.chunks(factor).map(|b| b.iter().sum()).collect(),
                unit: *unit,
            },
            Increments::Gauss(v) => Increments::Gauss(v.chunks(factor).map(|b| b.iter().sum()).collect()),
        };
        Ok(SamplePath { m: self.m, steps: coarse, horizon: self.horizon, incr })
    }
}

fn check_component(path: &SamplePath, c: usize) -> Result<()> {
    if c >= path.m {
        return Err(Error::DimensionMismatch { expected: path.m, found: c });
    }
    Ok(())
}

/// `exp(α B^c_t - α² t / 2)` on the path grid.
pub fn exponential_martingale(path: &SamplePath, alpha: f64, c: usize) -> Result<Vec<f64>> {
    check_component(path, c)?;
    let dt = path.dt();
    Ok(path
        .positions(c)
        .into_iter()
        .enumerate()
        .map(|(k, b)| {
            let t = if k == path.steps { path.horizon } else { k as f64 * dt };
            (alpha * b - 0.5 * alpha * alpha * t).exp()
        })
        .collect())
}

/// The discrete stochastic exponential `η_{k+1} = η_k (1 + α ΔB_k)`,
/// `η_0 = 1`. It is exactly the left-point integral of `α η dB`, which
/// makes it the natural companion of [`super::trajectory_integral`].
pub fn stochastic_exponential(path: &SamplePath, alpha: f64, c: usize) -> Result<Vec<f64>> {
    check_component(path, c)?;
    let mut out = Vec::with_capacity(path.steps + 1);
    let mut eta = 1.0;
    out.push(eta);
    for k in 0..path.steps {
        eta += alpha * eta * path.increment(k, c);
        out.push(eta);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_step_walk_ends_at_plus_or_minus_root_t() {
        let e = brownian_paths(2, 1, 2.0, DriverMode::Walk, 9, 50).unwrap();
        for s in 0..50 {
            let p = e.path(s);
            for c in 0..2 {
                assert_eq!(p.terminal(c).abs(), 2f64.sqrt());
            }
        }
    }

    #[test]
    fn same_seed_same_path() {
        for mode in [DriverMode::Walk, DriverMode::Gauss] {
            let e = brownian_paths(3, 100, 1.0, mode, 4, 10).unwrap();
            assert_eq!(e.path(7), e.path(7));
            assert_ne!(e.path(7), e.path(8));
        }
    }

    #[test]
    fn coarsening_preserves_grid_values() {
        let e = brownian_paths(1, 1000, 1.0, DriverMode::Walk, 1, 1).unwrap();
        let fine = e.path(0);
        let coarse = fine.coarsen(10).unwrap();
        let pf = fine.positions(0);
        let pc = coarse.positions(0);
        for (k, v) in pc.iter().enumerate() {
            assert_eq!(*v, pf[10 * k]);
        }
        assert!(fine.coarsen(7).is_err());
    }

    #[test]
    fn exponential_martingale_basics() {
        let e = brownian_paths(1, 200, 1.0, DriverMode::Gauss, 3, 1).unwrap();
        let p = e.path(0);
        let eta = exponential_martingale(&p, 0.5, 0).unwrap();
        assert_eq!(eta[0], 1.0);
        assert!(eta.iter().all(|v| *v > 0.0));
        assert!(exponential_martingale(&p, 0.0, 0).unwrap().iter().all(|v| *v == 1.0));
        assert!(exponential_martingale(&p, 0.5, 1).is_err());
    }

    #[test]
    fn walk_stochastic_exponential_stays_positive() {
        let e = brownian_paths(1, 4, 1.0, DriverMode::Walk, 3, 1).unwrap();
        let eta = stochastic_exponential(&e.path(0), 0.5, 0).unwrap();
        assert!(eta.iter().all(|v| *v > 0.0));
    }

    #[test]
    fn mode_parses() {
        assert_eq!("walk".parse::<DriverMode>().unwrap(), DriverMode::Walk);
        assert!("brownian".parse::<DriverMode>().is_err());
    }
}
