use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{v_to_h_2d, Polytope, Vector, CANON_TOL};

/// Convex conic hull of finitely many nonzero generators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cone {
    generators: Vec<Vector>,
}

impl Cone {
    /// Unit-normalizes and deduplicates. A planar two-generator cone is
    /// ordered so that the counterclockwise sweep from the first to the
    /// second generator is less than π.
    pub fn new(generators: Vec<Vector>) -> Result<Self> {
        let mut gens: Vec<Vector> = Vec::with_capacity(generators.len());
        for g in generators {
            let u = g
                .normalized()
                .ok_or_else(|| Error::MalformedInput("zero cone generator".into()))?;
            if let Some(first) = gens.first() {
                if first.dim() != u.dim() {
                    return Err(Error::DimensionMismatch { expected: first.dim(), found: u.dim() });
                }
            }
            if !gens.iter().any(|h| h.approx_eq(&u, CANON_TOL)) {
                gens.push(u);
            }
        }
        if gens.is_empty() {
            return Err(Error::MalformedInput("cone without generators".into()));
        }
        if gens.len() == 2 && gens[0].dim() == 2 && gens[0].cross2(&gens[1]) < 0.0 {
            gens.swap(0, 1);
        }
        Ok(Self { generators: gens })
    }

    pub fn generators(&self) -> &[Vector] {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.generators[0].dim()
    }

    /// Opening angle of a planar two-generator cone.
    pub fn angle(&self) -> Option<f64> {
        (self.dim() == 2 && self.generators.len() == 2).then(|| {
            let (a, b) = (&self.generators[0], &self.generators[1]);
            a.cross2(b).atan2(a.dot(b))
        })
    }

    /// Signed angular margin of a planar direction inside a pointed
    /// two-generator cone: positive iff strictly interior, equal to the
    /// angle to the nearer boundary ray.
    pub fn angular_margin(&self, dir: &Vector) -> Option<f64> {
        let open = self.angle()?;
        let a = &self.generators[0];
        let t = a.cross2(dir).atan2(a.dot(dir));
        Some(t.min(open - t))
    }

    /// Membership of a planar direction with tolerance on the margin.
    pub fn contains_direction(&self, dir: &Vector, angtol: f64) -> Option<bool> {
        self.angular_margin(dir).map(|m| m >= -angtol)
    }
}

/// Normal cone of a full-dimensional planar polytope at a vertex: generated
/// by the outward normals of the two incident edges.
pub fn normal_cone_at_vertex_2d(p: &Polytope, v: &Vector) -> Result<Cone> {
    let h = v_to_h_2d(p)?;
    let verts = h.vertices();
    let (idx, dist) = verts
        .iter()
        .enumerate()
        .map(|(i, w)| (i, w.distance(v)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty");
    if dist > CANON_TOL {
        return Err(Error::NotAVertex { distance: dist });
    }
    let facets = h.facets().expect("populated");
    let k = facets.len();
    Cone::new(vec![facets[(idx + k - 1) % k].normal.clone(), facets[idx].normal.clone()])
}
