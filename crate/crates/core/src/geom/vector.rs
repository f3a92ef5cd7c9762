use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point or direction in `R^d`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    /// Builds a vector, rejecting empty or non-finite coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::MalformedInput("vector with zero coordinates".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::MalformedInput(format!(
                "non-finite coordinate in {coords:?}"
            )));
        }
        Ok(Self(coords))
    }

    /// Planar vector. Panics on non-finite input.
    pub fn xy(x: f64, y: f64) -> Self {
        assert!(x.is_finite() && y.is_finite(), "non-finite planar vector");
        Self(vec![x, y])
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1);
        Self(vec![0.0; dim])
    }

    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty() && coords.iter().all(|c| c.is_finite()));
        Self(coords)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    #[inline]
    pub fn dot(&self, other: &Vector) -> f64 {
        dot(&self.0, &other.0)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|c| c * s).collect())
    }

    pub fn distance(&self, other: &Vector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Euclidean-unit copy, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Vector> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale(1.0 / n))
    }

    /// z-component of the planar cross product `self × other`.
    #[inline]
    pub fn cross2(&self, other: &Vector) -> f64 {
        cross2(self, other)
    }

    /// Polar angle in `[0, 2π)`. Only meaningful in d=2.
    pub fn angle(&self) -> f64 {
        debug_assert_eq!(self.dim(), 2);
        let a = self.0[1].atan2(self.0[0]);
        if a < 0.0 {
            a + std::f64::consts::TAU
        } else {
            a
        }
    }

    /// Lexicographic comparison; NaN-free by construction.
    pub fn lex_cmp(&self, other: &Vector) -> std::cmp::Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.partial_cmp(b).expect("finite coordinates") {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.dim().cmp(&other.dim())
    }

    pub fn approx_eq(&self, other: &Vector, tol: f64) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| (a - b).abs() <= tol)
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// z-component of the planar cross product `a × b`.
#[inline]
pub(crate) fn cross2(a: &Vector, b: &Vector) -> f64 {
    a.0[0] * b.0[1] - a.0[1] * b.0[0]
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Vector::new(v)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;
    fn mul(self, s: f64) -> Vector {
        self.scale(s)
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self.scale(-1.0)
    }
}
