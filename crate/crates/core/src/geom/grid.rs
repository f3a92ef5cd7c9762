use std::f64::consts::{PI, TAU};

use super::vector::Vector;
use crate::error::{Error, Result};

/// Finite, negation-symmetric set of unit directions standing in for a
/// dense subset of the unit sphere.
#[derive(Debug, Clone)]
pub struct DirectionGrid {
    dim: usize,
    directions: Vec<Vector>,
    resolution: usize,
}

impl DirectionGrid {
    /// `k` equally spaced angles `2πj/k`. `k` must be even (and at least 4)
    /// so the grid is closed under negation.
    pub fn planar(k: usize) -> Result<Self> {
        if k < 4 || k % 2 != 0 {
            return Err(Error::MalformedInput(format!(
                "planar grid needs an even k >= 4, got {k}"
            )));
        }
        let directions = (0..k)
            .map(|j| {
                let t = TAU * j as f64 / k as f64;
                Vector::xy(t.cos(), t.sin())
            })
            .collect();
        Ok(Self { dim: 2, directions, resolution: k })
    }

    /// Deterministic low-discrepancy directions on the sphere in `d >= 3`:
    /// a Fibonacci lattice in `d = 3`, Halton points pushed through the
    /// Box–Muller map otherwise. `count` points plus their negations.
    pub fn spherical(dim: usize, count: usize) -> Result<Self> {
        if dim < 3 || count == 0 {
            return Err(Error::MalformedInput(format!(
                "spherical grid needs dim >= 3 and count >= 1, got dim={dim} count={count}"
            )));
        }
        let mut half = Vec::with_capacity(count);
        if dim == 3 {
            let golden = PI * (3.0 - 5f64.sqrt());
            for i in 0..count {
                let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
                let r = (1.0 - z * z).max(0.0).sqrt();
                let t = golden * i as f64;
                half.push(vec![r * t.cos(), r * t.sin(), z]);
            }
        } else {
            let pairs = dim.div_ceil(2);
            let primes = first_primes(2 * pairs);
            for i in 1..=count {
                let mut g = Vec::with_capacity(2 * pairs);
                for p in 0..pairs {
                    let u1 = radical_inverse(i as u64, primes[2 * p]).max(1e-300);
                    let u2 = radical_inverse(i as u64, primes[2 * p + 1]);
                    let r = (-2.0 * u1.ln()).sqrt();
                    g.push(r * (TAU * u2).cos());
                    g.push(r * (TAU * u2).sin());
                }
                g.truncate(dim);
                half.push(g);
            }
        }
        let mut directions = Vec::with_capacity(2 * count);
        for g in half {
            let v = Vector::new(g)?;
            let Some(u) = v.normalized() else { continue };
            directions.push(-&u);
            directions.push(u);
        }
        Ok(Self { dim, directions, resolution: count })
    }

    /// Planar grid for `d = 2`, spherical grid with `k/2` base points otherwise.
    pub fn for_dim(dim: usize, k: usize) -> Result<Self> {
        match dim {
            2 => Self::planar(k),
            d if d >= 3 => Self::spherical(d, (k / 2).max(1)),
            _ => Err(Error::MalformedInput("direction grids need dim >= 2".into())),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn directions(&self) -> &[Vector] {
        &self.directions
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Angular spacing of a planar grid.
    pub fn max_angular_gap(&self) -> Option<f64> {
        (self.dim == 2).then(|| TAU / self.resolution as f64)
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

fn first_primes(n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut c = 2u64;
    while out.len() < n {
        if out.iter().all(|p| c % p != 0) {
            out.push(c);
        }
        c += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_symmetric_unit(g: &DirectionGrid) {
        for u in g.directions() {
            assert!((u.norm() - 1.0).abs() <= 1e-12);
            let neg = -u;
            assert!(g.directions().iter().any(|w| w.approx_eq(&neg, 1e-12)), "missing -{u:?}");
        }
    }

    #[test]
    fn planar_grid_is_symmetric_unit() {
        let g = DirectionGrid::planar(720).unwrap();
        assert_eq!(g.len(), 720);
        check_symmetric_unit(&g);
        assert!(DirectionGrid::planar(7).is_err());
    }

    #[test]
    fn spherical_grids_are_symmetric_unit() {
        check_symmetric_unit(&DirectionGrid::spherical(3, 100).unwrap());
        let g4 = DirectionGrid::spherical(5, 64).unwrap();
        assert_eq!(g4.dim(), 5);
        check_symmetric_unit(&g4);
    }
}
