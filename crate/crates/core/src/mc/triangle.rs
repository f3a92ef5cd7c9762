use serde::Serialize;

use crate::error::{Error, Result};
use crate::fan::{triangle_fan, type_cone, TypeCone};
use crate::geom::{Polytope, Vector};

/// Polytope-valued paths on a common time grid, stored as vertex tuples
/// (one tuple per sample per time).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolytopeTrajectory {
    times: Vec<f64>,
    samples: Vec<Vec<Vec<Vector>>>,
}

impl PolytopeTrajectory {
    /// Checks that the grid is strictly increasing, that every sample has
    /// one nonempty tuple per time, and that all samples share the `t = 0`
    /// slice.
    pub fn new(times: Vec<f64>, samples: Vec<Vec<Vec<Vector>>>) -> Result<Self> {
        if times.is_empty() || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::MalformedInput("time grid must be nonempty and strictly increasing".into()));
        }
        for s in &samples {
            if s.len() != times.len() {
                return Err(Error::LengthMismatch { expected: times.len(), found: s.len() });
            }
            if s.iter().any(|tuple| tuple.is_empty()) {
                return Err(Error::MalformedInput("empty vertex tuple".into()));
            }
        }
        if let Some(first) = samples.first() {
            if samples.iter().any(|s| s[0] != first[0]) {
                return Err(Error::MalformedInput("initial slice differs between samples".into()));
            }
        }
        Ok(Self { times, samples })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn sample_count(&self) -> usize {
        self.samples.len()
    }

    pub fn sample(&self, s: usize) -> &[Vec<Vector>] {
        &self.samples[s]
    }

    /// Vertex tuple of sample `s` at time index `k`.
    pub fn slice(&self, s: usize, k: usize) -> &[Vector] {
        &self.samples[s][k]
    }

    /// Convex hull of a slice.
    pub fn polytope(&self, s: usize, k: usize) -> Result<Polytope> {
        Polytope::from_points(self.samples[s][k].clone())
    }

    /// Keeps only the given time indices.
    pub fn select_times(&self, idx: &[usize]) -> Result<Self> {
        let times = idx.iter().map(|&k| self.times[k]).collect();
        let samples = self.samples.iter().map(|s| idx.iter().map(|&k| s[k].clone()).collect()).collect();
        Self::new(times, samples)
    }

    /// Concatenates samples from trajectories on the same grid.
    pub fn concat(parts: Vec<PolytopeTrajectory>) -> Result<Self> {
        let mut it = parts.into_iter();
        let mut head = it.next().ok_or_else(|| Error::MalformedInput("no trajectories to join".into()))?;
        for p in it {
            if p.times != head.times {
                return Err(Error::MalformedInput("time grids differ".into()));
            }
            head.samples.extend(p.samples);
        }
        Self::new(head.times, head.samples)
    }
}

/// Grid indices `0, s, 2s, ...` plus the final index `n`.
pub fn thin_indices(n: usize, stride: usize) -> Vec<usize> {
    let stride = stride.max(1);
    let mut idx: Vec<usize> = (0..=n).step_by(stride).collect();
    if idx.last() != Some(&n) {
        idx.push(n);
    }
    idx
}

pub(crate) use crate::tree::corpus::triangle_vertices;

fn triangle_cone() -> TypeCone {
    type_cone(&triangle_fan()).expect("the triangle fan is complete and simplicial")
}

/// Builds the random-triangle path from three weight series on `times`.
///
/// Each slice is checked twice: the weights must be strictly positive and
/// the support offsets `(η₁, η₂, η₃)` must lie in the type cone of the
/// triangle fan.
pub fn triangle_process(times: &[f64], eta1: &[f64], eta2: &[f64], eta3: &[f64]) -> Result<PolytopeTrajectory> {
    let n = times.len();
    for s in [eta1, eta2, eta3] {
        if s.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: s.len() });
        }
    }
    let cone = triangle_cone();
    let mut slices = Vec::with_capacity(n);
    for k in 0..n {
        let eta = [eta1[k], eta2[k], eta3[k]];
        if eta.iter().any(|e| !(*e > 0.0)) || !cone.contains(&eta)? {
            return Err(Error::Admissibility { time_index: k });
        }
        slices.push(triangle_vertices(eta).to_vec());
    }
    PolytopeTrajectory::new(times.to_vec(), vec![slices])
}

/// `|ξ² − ξ³|` for a triangle tuple.
pub fn hypotenuse_length(tuple: &[Vector]) -> f64 {
    tuple[1].distance(&tuple[2])
}
