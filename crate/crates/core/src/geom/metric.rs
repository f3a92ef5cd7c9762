use super::grid::DirectionGrid;
use super::nearest::distance_to_hull;
use super::polytope::Polytope;
use super::vector::Vector;
use crate::error::{Error, Result};

/// `s(x*, P) = max_v ⟨x*, v⟩`, exact for polytopes.
pub fn support_function(p: &Polytope, xstar: &Vector) -> Result<f64> {
    same_dim(p.dim(), xstar.dim())?;
    Ok(p.support(xstar.coords()))
}

/// `max_{v ∈ vert P} d(v, Q)`, the excess of `P` over `Q`. The distance
/// function is convex, so its maximum over `P` is attained at a vertex.
pub fn one_sided_hausdorff(p: &Polytope, q: &Polytope, tol: f64) -> Result<f64> {
    same_dim(p.dim(), q.dim())?;
    let mut worst: f64 = 0.0;
    for v in p.vertices() {
        worst = worst.max(distance_to_hull(v, q.vertices(), tol)?);
    }
    Ok(worst)
}

/// Hausdorff distance by vertex projection in both directions.
pub fn hausdorff_distance(p: &Polytope, q: &Polytope, tol: f64) -> Result<f64> {
    Ok(one_sided_hausdorff(p, q, tol)?.max(one_sided_hausdorff(q, p, tol)?))
}

/// `max_{x* ∈ grid} |s(x*,P) - s(x*,Q)|`, a lower bound on the Hausdorff
/// distance of convex sets.
pub fn hausdorff_grid_estimate(p: &Polytope, q: &Polytope, grid: &DirectionGrid) -> Result<f64> {
    same_dim(p.dim(), q.dim())?;
    same_dim(p.dim(), grid.dim())?;
    Ok(grid
        .directions()
        .iter()
        .map(|u| (p.support(u.coords()) - q.support(u.coords())).abs())
        .fold(0.0, f64::max))
}

/// Upper bound on `h(P,Q) - hausdorff_grid_estimate(P,Q,grid)` for a planar
/// grid with angular spacing `δ`.
///
/// With both sets recentred at a common point `c`, the support difference is
/// `(R_P + R_Q)`-Lipschitz on the circle, where `R` is the largest vertex
/// distance to `c`, and every unit vector is within chord `2 sin(δ/4)` of a
/// grid direction. Returns `None` for grids without a known spacing.
pub fn grid_resolution_bound(p: &Polytope, q: &Polytope, grid: &DirectionGrid) -> Option<f64> {
    let gap = grid.max_angular_gap()?;
    let c = p.vertex_centroid();
    let radius = |poly: &Polytope| poly.vertices().iter().map(|v| v.distance(&c)).fold(0.0, f64::max);
    Some((radius(p) + radius(q)) * 2.0 * (gap / 4.0).sin())
}

/// `Σ w_i P_i` as a canonical polytope.
///
/// Sums of vertex tuples are hulled incrementally, which yields the same set
/// as hulling all tuple sums at once since Minkowski addition commutes with
/// taking convex hulls.
pub fn minkowski_average(weights: &[f64], polytopes: &[Polytope]) -> Result<Polytope> {
    if weights.len() != polytopes.len() {
        return Err(Error::LengthMismatch { expected: polytopes.len(), found: weights.len() });
    }
    let first = polytopes
        .first()
        .ok_or_else(|| Error::MalformedInput("no polytopes to average".into()))?;
    let dim = first.dim();
    if let Some(bad) = polytopes.iter().find(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
    }
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
        return Err(Error::MalformedInput(format!("negative or non-finite weight {w}")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::MalformedInput(format!("weights sum to {total}, expected 1")));
    }

    let mut acc = Polytope::singleton(Vector::zeros(dim));
    for (&w, p) in weights.iter().zip(polytopes) {
        if w == 0.0 {
            continue;
        }
        let mut sums = Vec::with_capacity(acc.vertices().len() * p.vertices().len());
        for a in acc.vertices() {
            for v in p.vertices() {
                let c: Vec<f64> = a.coords().iter().zip(v.coords()).map(|(x, y)| x + w * y).collect();
                sums.push(Vector::from_vec_unchecked(c));
            }
        }
        acc = Polytope::from_points(sums)?;
    }
    Ok(acc)
}

/// `P ⊆ Q` up to `tol`: every vertex of `P` lies within `tol` of `Q`.
pub fn contains(q: &Polytope, p: &Polytope, tol: f64) -> Result<bool> {
    same_dim(q.dim(), p.dim())?;
    for v in p.vertices() {
        if distance_to_hull(v, q.vertices(), tol.min(1e-10))? > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

fn same_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[(f64, f64)]) -> Polytope {
        Polytope::from_points(c.iter().map(|&(x, y)| Vector::xy(x, y)).collect()).unwrap()
    }

    fn square() -> Polytope {
        poly(&[(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)])
    }

    #[test]
    fn support_examples() {
        assert_eq!(support_function(&square(), &Vector::xy(1.0, 0.0)).unwrap(), 1.0);
        let tri = poly(&[(0.0, 0.0), (4.0, 0.0), (0.0, 4.0)]);
        assert_eq!(support_function(&tri, &Vector::xy(1.0, 1.0)).unwrap(), 4.0);
        let pt = poly(&[(2.0, -3.0)]);
        assert_eq!(support_function(&pt, &Vector::xy(0.5, 2.0)).unwrap(), 1.0 - 6.0);
        assert!(support_function(&pt, &Vector::new(vec![1.0]).unwrap()).is_err());
    }

    #[test]
    fn hausdorff_to_origin_is_norm() {
        let p = poly(&[(3.0, 4.0), (0.0, 1.0), (-1.0, 0.0)]);
        let h = hausdorff_distance(&p, &poly(&[(0.0, 0.0)]), 1e-12).unwrap();
        assert!((h - 5.0).abs() < 1e-12);
        assert_eq!(p.norm(), 5.0);
        assert_eq!(hausdorff_distance(&p, &p, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn shifted_square() {
        let p = square();
        let q = p.translate(&Vector::xy(1.0, 0.0));
        let h = hausdorff_distance(&p, &q, 1e-12).unwrap();
        assert!((h - 1.0).abs() < 1e-12);
    }

    #[test]
    fn minkowski_examples() {
        let a = poly(&[(3.0, -1.0)]);
        let r = minkowski_average(&[1.0], std::slice::from_ref(&a)).unwrap();
        assert_eq!(r, a);

        let r = minkowski_average(&[0.5, 0.5], &[poly(&[(0.0, 0.0)]), poly(&[(2.0, 2.0)])]).unwrap();
        assert_eq!(r.vertices(), &[Vector::xy(1.0, 1.0)]);

        let r = minkowski_average(
            &[0.5, 0.5],
            &[poly(&[(0.0, 0.0), (2.0, 0.0)]), poly(&[(0.0, 0.0), (0.0, 2.0)])],
        )
        .unwrap();
        assert!(r.approx_eq(&poly(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]), 1e-15));
    }

    #[test]
    fn minkowski_errors() {
        let p = square();
        assert!(matches!(
            minkowski_average(&[0.5], &[p.clone(), p.clone()]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(minkowski_average(&[1.5, -0.5], &[p.clone(), p.clone()]).is_err());
        assert!(minkowski_average(&[0.3, 0.3], &[p.clone(), p]).is_err());
    }

    #[test]
    fn containment_examples() {
        let sq = square();
        assert!(contains(&sq, &sq, 1e-9).unwrap());
        assert!(contains(&sq, &poly(&[(0.0, 0.0), (0.5, 0.5)]), 1e-9).unwrap());
        assert!(!contains(&poly(&[(0.0, 0.0), (1.0, 0.0)]), &poly(&[(0.0, 1.0)]), 1e-9).unwrap());
    }

    #[test]
    fn grid_estimate_and_bound() {
        let p = square();
        let q = p.translate(&Vector::xy(1.0, 0.0));
        let grid = DirectionGrid::planar(720).unwrap();
        let est = hausdorff_grid_estimate(&p, &q, &grid).unwrap();
        // (1,0) is on the grid, so the estimate is exact here
        assert!((est - 1.0).abs() < 1e-12);
        assert!(grid_resolution_bound(&p, &q, &grid).unwrap() > 0.0);
    }
}
