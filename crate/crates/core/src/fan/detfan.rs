use serde::Serialize;

use super::normal_fan::{angle_between, fans_equal, normal_fan_2d, Fan, DEFAULT_ANGTOL};
use crate::error::{Error, Result};
use crate::geom::{DirectionGrid, Polytope, Vector};

/// Normal fan of a planar polytope of any dimension: a proper fan for
/// full-dimensional hulls, the line normal to a segment, or the whole
/// plane for a point.
#[derive(Debug, Clone)]
pub enum FanShape {
    Full(Fan),
    /// Unit direction of the segment, sign fixed so the first nonzero
    /// coordinate is positive.
    Segment(Vector),
    Point,
}

impl FanShape {
    pub fn of(p: &Polytope) -> Result<Self> {
        if p.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: p.dim() });
        }
        match p.vertices().len() {
            1 => Ok(FanShape::Point),
            2 => {
                let mut u = (&p.vertices()[1] - &p.vertices()[0]).normalized().expect("distinct vertices");
                if u[0] < 0.0 || (u[0] == 0.0 && u[1] < 0.0) {
                    u = -&u;
                }
                Ok(FanShape::Segment(u))
            }
            _ => Ok(FanShape::Full(normal_fan_2d(p)?)),
        }
    }

    pub fn same_as(&self, other: &FanShape, angtol: f64) -> bool {
        match (self, other) {
            (FanShape::Full(a), FanShape::Full(b)) => fans_equal(a, b, angtol),
            (FanShape::Segment(a), FanShape::Segment(b)) => angle_between(a, b) <= angtol,
            (FanShape::Point, FanShape::Point) => true,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArgmaxWitness {
    pub direction_index: usize,
    pub direction: Vec<f64>,
    /// First sample at which the running intersection of argmax sets
    /// became empty.
    pub sample: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeterministicFanReport {
    pub samples: usize,
    pub directions_checked: usize,
    /// Some index attains `max_i ⟨x*, ξⁱ⟩` on every sample, for every grid
    /// direction.
    pub argmax_ok: bool,
    pub argmax_witness: Option<ArgmaxWitness>,
    /// Normal fans of all sample hulls agree (planar inputs only).
    pub fan_ok: Option<bool>,
    /// First sample whose hull has a different normal fan than sample 0.
    pub fan_witness: Option<usize>,
    pub verdict: bool,
}

/// Tests whether the random polytope `co{ξ¹, …, ξⁿ}` has a deterministic
/// normal fan across the given samples.
///
/// Two checks: (a) for every grid direction the sets of maximizing indices
/// share a common index over all samples; (b) in the plane, the normal fans
/// of the sample hulls coincide. The verdict requires both.
pub fn deterministic_fan_test(samples: &[Vec<Vector>], grid: &DirectionGrid) -> Result<DeterministicFanReport> {
    let first = samples
        .first()
        .ok_or_else(|| Error::MalformedInput("no samples".into()))?;
    let n = first.len();
    if n == 0 {
        return Err(Error::MalformedInput("empty vertex tuple".into()));
    }
    let d = first[0].dim();
    for tuple in samples {
        if tuple.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: tuple.len() });
        }
        if let Some(v) = tuple.iter().find(|v| v.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: v.dim() });
        }
    }
    if grid.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: grid.dim() });
    }

    let mut witness = None;
    'dirs: for (di, u) in grid.directions().iter().enumerate() {
        let mut common = vec![true; n];
        for (si, tuple) in samples.iter().enumerate() {
            let vals: Vec<f64> = tuple.iter().map(|v| v.dot(u)).collect();
            let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let tie = 1e-9 * (1.0 + max.abs());
            for (c, v) in common.iter_mut().zip(&vals) {
                *c &= *v >= max - tie;
            }
            if !common.iter().any(|&c| c) {
                witness = Some(ArgmaxWitness {
                    direction_index: di,
                    direction: u.coords().to_vec(),
                    sample: si,
                });
                break 'dirs;
            }
        }
    }
    let argmax_ok = witness.is_none();

    let (fan_ok, fan_witness) = if d == 2 {
        let reference = FanShape::of(&Polytope::from_points(first.clone())?)?;
        let mut bad = None;
        for (si, tuple) in samples.iter().enumerate().skip(1) {
            let shape = FanShape::of(&Polytope::from_points(tuple.clone())?)?;
            if !shape.same_as(&reference, DEFAULT_ANGTOL) {
                bad = Some(si);
                break;
            }
        }
        (Some(bad.is_none()), bad)
    } else {
        (None, None)
    };

    Ok(DeterministicFanReport {
        samples: samples.len(),
        directions_checked: grid.len(),
        argmax_ok,
        argmax_witness: witness,
        fan_ok,
        fan_witness,
        verdict: argmax_ok && fan_ok.unwrap_or(true),
    })
}
