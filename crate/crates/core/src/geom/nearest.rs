//! Nearest point in the convex hull of a finite point set.
//!
//! Wolfe's minimum-norm-point iteration on the translated vertex set
//! `p_j = v_j - x`. The current iterate `w` is always a convex combination of
//! the active set, so `|w|` is an upper bound on the distance; `min_j ⟨w,p_j⟩/|w|`
//! is a lower bound, and the gap between the two certifies convergence.

use super::linalg::solve_dense;
use super::polytope::Polytope;
use super::vector::{dot, Vector};
use crate::error::{Error, Result};

pub const DEFAULT_DISTANCE_TOL: f64 = 1e-10;

const PIVOT_TOL: f64 = 1e-14;

/// Result of a nearest-point query.
#[derive(Debug, Clone)]
pub struct NearestPoint {
    pub point: Vector,
    pub distance: f64,
    /// Certified lower bound on the distance (duality gap companion).
    pub lower_bound: f64,
    pub iterations: usize,
}

/// Distance from `x` to `P`; zero when `x` lies in `P` up to `tol`.
pub fn point_distance(x: &Vector, p: &Polytope, tol: f64) -> Result<f64> {
    if x.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: x.dim() });
    }
    distance_to_hull(x, p.vertices(), tol)
}

pub fn nearest_point(x: &Vector, p: &Polytope, tol: f64) -> Result<NearestPoint> {
    if x.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: x.dim() });
    }
    wolfe(x, p.vertices(), tol)
}

pub(crate) fn distance_to_hull(x: &Vector, vertices: &[Vector], tol: f64) -> Result<f64> {
    wolfe(x, vertices, tol).map(|r| r.distance)
}

fn wolfe(x: &Vector, vertices: &[Vector], tol: f64) -> Result<NearestPoint> {
    if !(tol > 0.0) {
        return Err(Error::MalformedInput(format!("tolerance must be positive, got {tol}")));
    }
    if vertices.is_empty() {
        return Err(Error::MalformedInput("empty vertex list".into()));
    }
    let d = x.dim();
    let pts: Vec<Vec<f64>> = vertices
        .iter()
        .map(|v| v.coords().iter().zip(x.coords()).map(|(a, b)| a - b).collect())
        .collect();
    let n = pts.len();
    let scale = pts.iter().map(|p| dot(p, p)).fold(0.0, f64::max).max(1.0);
    let max_iter = 10 * n * n;

    let first = (0..n)
        .min_by(|&a, &b| dot(&pts[a], &pts[a]).total_cmp(&dot(&pts[b], &pts[b])))
        .expect("nonempty");
    let mut active: Vec<usize> = vec![first];
    let mut lambda: Vec<f64> = vec![1.0];
    let mut w = pts[first].clone();
    let mut lower = 0.0;

    let finish = |w: Vec<f64>, lower: f64, iterations: usize| {
        let norm = dot(&w, &w).sqrt();
        let point: Vec<f64> = w.iter().zip(x.coords()).map(|(a, b)| a + b).collect();
        let distance = if norm <= tol { 0.0 } else { norm };
        NearestPoint {
            point: Vector::from_vec_unchecked(point),
            distance,
            lower_bound: lower.min(distance),
            iterations,
        }
    };

    for iter in 0..max_iter {
        let wsq = dot(&w, &w);
        if wsq.sqrt() <= tol {
            return Ok(finish(w, 0.0, iter));
        }
        let (j, m) = (0..n)
            .map(|j| (j, dot(&w, &pts[j])))
            .fold((usize::MAX, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });
        let wn = wsq.sqrt();
        lower = (m / wn).max(0.0);
        // Upper bound |w| minus lower bound m/|w| within tolerance.
        if wsq - m <= tol * wn || wsq - m <= 1e-15 * scale || active.contains(&j) {
            return Ok(finish(w, lower, iter));
        }
        active.push(j);
        lambda.push(0.0);

        // Minor cycle: move toward the affine minimizer, dropping points whose
        // weight would turn negative.
        loop {
            let mu = match affine_minimizer(&pts, &active) {
                Ok(mu) => mu,
                Err(_) => {
                    // Affinely dependent active set; drop the newest point.
                    active.pop();
                    lambda.pop();
                    return Ok(finish(w, lower, iter));
                }
            };
            if mu.iter().all(|&m| m > PIVOT_TOL) {
                lambda = mu;
                break;
            }
            let theta = active
                .iter()
                .enumerate()
                .filter(|&(i, _)| mu[i] <= PIVOT_TOL)
                .map(|(i, _)| lambda[i] / (lambda[i] - mu[i]))
                .fold(1.0_f64, f64::min)
                .clamp(0.0, 1.0);
            for (l, m) in lambda.iter_mut().zip(&mu) {
                *l += theta * (m - *l);
            }
            let mut k = 0;
            while k < active.len() {
                if lambda[k] <= PIVOT_TOL {
                    active.remove(k);
                    lambda.remove(k);
                } else {
                    k += 1;
                }
            }
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
            if active.len() == 1 {
                lambda[0] = 1.0;
                break;
            }
        }
        w = combine(&pts, &active, &lambda, d);
    }
    let wn = dot(&w, &w).sqrt();
    Err(Error::NumericalFailure {
        reason: format!("nearest-point iteration did not converge in {max_iter} steps"),
        best_bound: wn.max(lower),
    })
}

fn combine(pts: &[Vec<f64>], active: &[usize], lambda: &[f64], d: usize) -> Vec<f64> {
    let mut w = vec![0.0; d];
    for (&i, &l) in active.iter().zip(lambda) {
        for (wk, pk) in w.iter_mut().zip(&pts[i]) {
            *wk += l * pk;
        }
    }
    w
}

/// Weights `μ` (summing to one) of the min-norm point of the affine hull of
/// the active points.
fn affine_minimizer(pts: &[Vec<f64>], active: &[usize]) -> Result<Vec<f64>> {
    let k = active.len();
    let mut a = vec![vec![0.0; k + 1]; k + 1];
    for (r, &i) in active.iter().enumerate() {
        for (c, &j) in active.iter().enumerate() {
            a[r][c] = dot(&pts[i], &pts[j]);
        }
        a[r][k] = 1.0;
        a[k][r] = 1.0;
    }
    let mut b = vec![0.0; k + 1];
    b[k] = 1.0;
    let mut sol = solve_dense(a, b, PIVOT_TOL)?;
    sol.truncate(k);
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg() -> Polytope {
        Polytope::from_points(vec![Vector::xy(0.0, 0.0), Vector::xy(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn collinear_outside() {
        let d = point_distance(&Vector::xy(2.0, 0.0), &seg(), 1e-10).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn perpendicular_drop_to_endpoint() {
        let d = point_distance(&Vector::xy(1.0, 1.0), &seg(), 1e-10).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vertices_have_zero_distance() {
        let p = Polytope::from_points(vec![
            Vector::xy(0.0, 0.0),
            Vector::xy(3.0, 0.5),
            Vector::xy(1.0, 2.0),
        ])
        .unwrap();
        for v in p.vertices() {
            assert_eq!(point_distance(v, &p, 1e-10).unwrap(), 0.0);
        }
        assert_eq!(point_distance(&Vector::xy(1.0, 0.8), &p, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn interior_of_segment_projection() {
        let r = nearest_point(&Vector::xy(0.25, -3.0), &seg(), 1e-12).unwrap();
        assert!(r.point.approx_eq(&Vector::xy(0.25, 0.0), 1e-12));
        assert!((r.distance - 3.0).abs() < 1e-12);
        assert!(r.lower_bound <= r.distance && r.distance - r.lower_bound < 1e-10);
    }

    #[test]
    fn three_dimensional_face_projection() {
        let p = Polytope::from_points(vec![
            Vector::new(vec![0.0, 0.0, 0.0]).unwrap(),
            Vector::new(vec![1.0, 0.0, 0.0]).unwrap(),
            Vector::new(vec![0.0, 1.0, 0.0]).unwrap(),
            Vector::new(vec![0.0, 0.0, 1.0]).unwrap(),
        ])
        .unwrap();
        let x = Vector::new(vec![1.0, 1.0, 1.0]).unwrap();
        let d = point_distance(&x, &p, 1e-12).unwrap();
        // distance to the plane x+y+z=1 is 2/sqrt(3), foot (1/3,1/3,1/3) inside the face
        assert!((d - 2.0 / 3f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn bad_tolerance_and_dimension() {
        assert!(point_distance(&Vector::xy(0.0, 0.0), &seg(), 0.0).is_err());
        let x = Vector::new(vec![0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(point_distance(&x, &seg(), 1e-10), Err(Error::DimensionMismatch { .. })));
    }
}
