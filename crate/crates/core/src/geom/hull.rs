use super::polytope::{Facet, Polytope, CANON_TOL};
use super::vector::{cross2, Vector};
use crate::error::{Error, Result};

/// Planar convex hull by monotone chain.
///
/// Output is the minimal counterclockwise vertex list starting from the
/// lexicographically smallest point. Points within [`CANON_TOL`] of each
/// other are merged and points within [`CANON_TOL`] of a hull edge are
/// dropped.
pub fn convex_hull_2d(points: &[Vector]) -> Result<Polytope> {
    if points.is_empty() {
        return Err(Error::MalformedInput("empty point list".into()));
    }
    if let Some(bad) = points.iter().find(|p| p.dim() != 2) {
        return Err(Error::DimensionMismatch { expected: 2, found: bad.dim() });
    }
    let mut pts: Vec<&Vector> = points.iter().collect();
    pts.sort_by(|a, b| a.lex_cmp(b));

    let mut uniq: Vec<&Vector> = Vec::with_capacity(pts.len());
    for p in pts {
        // Sorted by x, so near-duplicates sit within the trailing x-window.
        let dup = uniq
            .iter()
            .rev()
            .take_while(|q| p[0] - q[0] <= CANON_TOL)
            .any(|q| q.distance(p) <= CANON_TOL);
        if !dup {
            uniq.push(p);
        }
    }
    if uniq.len() <= 2 {
        let verts = uniq.into_iter().cloned().collect();
        return Ok(Polytope::from_canonical(2, verts));
    }

    let mut hull: Vec<&Vector> = Vec::with_capacity(2 * uniq.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &&Vector>> =
            if pass == 0 { Box::new(uniq.iter()) } else { Box::new(uniq.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 {
                let o = hull[hull.len() - 2];
                let a = hull[hull.len() - 1];
                if !strictly_left(o, a, p) {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        // The chain endpoint is the first point of the other chain.
        hull.pop();
    }
    // Collinear inputs collapse to the two extreme points.
    if hull.len() < 3 {
        hull.truncate(2);
        if hull.len() == 2 && hull[0].distance(hull[1]) <= CANON_TOL {
            hull.truncate(1);
        }
    }
    Ok(Polytope::from_canonical(2, hull.into_iter().cloned().collect()))
}

/// `a` is kept between `o` and `p` only if it sits farther than the
/// tolerance to the right of the chord `o → p`, i.e. `o → a → p` turns left.
fn strictly_left(o: &Vector, a: &Vector, p: &Vector) -> bool {
    let op = p - o;
    let len = op.norm();
    if len <= CANON_TOL {
        return true;
    }
    let oa = a - o;
    // Signed distance of `a` to the line through o and p (positive = right).
    cross2(&op, &oa) / len < -CANON_TOL
}

/// Adds the facet block: outward unit normals in counterclockwise order
/// (facet `j` is the edge from vertex `j` to vertex `j+1`) with offsets equal
/// to the support function on each normal.
pub fn v_to_h_2d(p: &Polytope) -> Result<Polytope> {
    if p.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: p.dim() });
    }
    if !p.is_full_dimensional_2d() {
        return Err(Error::Degenerate(format!(
            "polytope with {} vertices is not full-dimensional",
            p.vertices().len()
        )));
    }
    let vs = p.vertices();
    let k = vs.len();
    let mut facets = Vec::with_capacity(k);
    for j in 0..k {
        let e = &vs[(j + 1) % k] - &vs[j];
        let normal = Vector::xy(e[1], -e[0])
            .normalized()
            .ok_or_else(|| Error::Degenerate("zero-length edge".into()))?;
        let offset = p.support(normal.coords());
        facets.push(Facet { normal, offset });
    }
    Ok(p.clone().with_facets_unchecked(facets))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(c: &[(f64, f64)]) -> Vec<Vector> {
        c.iter().map(|&(x, y)| Vector::xy(x, y)).collect()
    }

    #[test]
    fn single_point() {
        let h = convex_hull_2d(&pts(&[(0.0, 0.0)])).unwrap();
        assert_eq!(h.vertices(), pts(&[(0.0, 0.0)]).as_slice());
    }

    #[test]
    fn square_with_center_and_edge_midpoints() {
        let h = convex_hull_2d(&pts(&[
            (1.0, 1.0),
            (-1.0, -1.0),
            (0.0, 0.0),
            (1.0, -1.0),
            (-1.0, 1.0),
            (0.0, 1.0),
            (1.0, 0.0),
        ]))
        .unwrap();
        assert_eq!(h.vertices(), pts(&[(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]).as_slice());
    }

    #[test]
    fn collinear_points_give_segment() {
        let h = convex_hull_2d(&pts(&[(2.0, 2.0), (0.0, 0.0), (1.0, 1.0), (3.0, 3.0)])).unwrap();
        assert_eq!(h.vertices(), pts(&[(0.0, 0.0), (3.0, 3.0)]).as_slice());
    }

    #[test]
    fn near_duplicates_merge() {
        let h = convex_hull_2d(&pts(&[(0.0, 0.0), (1e-12, 0.0), (0.0, -1e-12)])).unwrap();
        assert_eq!(h.vertices().len(), 1);
    }

    #[test]
    fn example_triangle_vertices() {
        // eta = (1,1,1): (-e1,-e2), (e2+e3,-e2), (-e1,e1+e3)
        let h = convex_hull_2d(&pts(&[(-1.0, -1.0), (2.0, -1.0), (-1.0, 2.0)])).unwrap();
        assert_eq!(h.vertices(), pts(&[(-1.0, -1.0), (2.0, -1.0), (-1.0, 2.0)]).as_slice());
    }

    #[test]
    fn unit_triangle_h_rep() {
        let p = convex_hull_2d(&pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])).unwrap();
        let h = v_to_h_2d(&p).unwrap();
        let f = h.facets().unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(f[0].normal.approx_eq(&Vector::xy(0.0, -1.0), 1e-15));
        assert!(f[1].normal.approx_eq(&Vector::xy(s, s), 1e-15));
        assert!(f[2].normal.approx_eq(&Vector::xy(-1.0, 0.0), 1e-15));
        let offsets: Vec<f64> = f.iter().map(|f| f.offset).collect();
        assert!(offsets[0].abs() < 1e-15 && (offsets[1] - s).abs() < 1e-15 && offsets[2].abs() < 1e-15);
        // cross-check against the support function on every normal
        for facet in f {
            assert_eq!(facet.offset, p.support(facet.normal.coords()));
        }
    }

    #[test]
    fn unit_square_h_rep() {
        let p = convex_hull_2d(&pts(&[(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)])).unwrap();
        let h = v_to_h_2d(&p).unwrap();
        for f in h.facets().unwrap() {
            assert!((f.offset - 1.0).abs() < 1e-15);
            assert!((f.normal.norm_inf() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn segment_is_degenerate() {
        let p = convex_hull_2d(&pts(&[(0.0, 0.0), (1.0, 0.0)])).unwrap();
        assert!(matches!(v_to_h_2d(&p), Err(Error::Degenerate(_))));
    }
}
