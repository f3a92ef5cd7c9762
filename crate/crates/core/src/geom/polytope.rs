use serde::{Deserialize, Serialize};

use super::hull::convex_hull_2d;
use super::nearest::{distance_to_hull, DEFAULT_DISTANCE_TOL};
use super::vector::{dot, Vector};
use crate::error::{Error, Result};

/// Absolute tolerance for vertex deduplication and collinearity pruning.
pub const CANON_TOL: f64 = 1e-9;

/// Half-plane `⟨normal, x⟩ <= offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub normal: Vector,
    pub offset: f64,
}

/// Compact convex polytope stored by its minimal vertex list.
///
/// Vertices are canonical: counterclockwise from the lexicographically
/// smallest vertex in d=2, lexicographic otherwise. The optional facet block
/// is only ever populated in d=2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolytopeJson", into = "PolytopeJson")]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vector>,
    facets: Option<Vec<Facet>>,
}

impl Polytope {
    /// Convex hull of a nonempty point list, canonicalized.
    pub fn from_points(points: Vec<Vector>) -> Result<Self> {
        let dim = check_points(&points)?;
        let vertices = match dim {
            1 => hull_1d(points),
            2 => return convex_hull_2d(&points),
            _ => prune_general(points),
        };
        Ok(Self { dim, vertices, facets: None })
    }

    pub fn singleton(v: Vector) -> Self {
        Self { dim: v.dim(), vertices: vec![v], facets: None }
    }

    /// Assumes `vertices` is already minimal and canonically ordered.
    pub(crate) fn from_canonical(dim: usize, vertices: Vec<Vector>) -> Self {
        debug_assert!(!vertices.is_empty());
        Self { dim, vertices, facets: None }
    }

    pub(crate) fn with_facets_unchecked(mut self, facets: Vec<Facet>) -> Self {
        self.facets = Some(facets);
        self
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn facets(&self) -> Option<&[Facet]> {
        self.facets.as_deref()
    }

    /// `max_v ⟨dir, v⟩`. The caller guarantees matching dimension.
    #[inline]
    pub fn support(&self, dir: &[f64]) -> f64 {
        debug_assert_eq!(dir.len(), self.dim);
        self.vertices
            .iter()
            .map(|v| dot(v.coords(), dir))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `h(P, {0})`, the largest vertex norm.
    pub fn norm(&self) -> f64 {
        self.vertices.iter().map(Vector::norm).fold(0.0, f64::max)
    }

    /// Average of the vertex list.
    pub fn vertex_centroid(&self) -> Vector {
        let mut c = vec![0.0; self.dim];
        for v in &self.vertices {
            for (ci, vi) in c.iter_mut().zip(v.coords()) {
                *ci += vi;
            }
        }
        let n = self.vertices.len() as f64;
        Vector::from_vec_unchecked(c.into_iter().map(|x| x / n).collect())
    }

    /// Full-dimensional in the plane: at least three canonical vertices.
    pub fn is_full_dimensional_2d(&self) -> bool {
        self.dim == 2 && self.vertices.len() >= 3
    }

    pub fn translate(&self, by: &Vector) -> Polytope {
        self.map_vertices(|v| v + by)
    }

    /// Homothety `c + s (P - c)`; `s` must be positive to keep the ordering.
    pub fn scale_about(&self, center: &Vector, s: f64) -> Polytope {
        assert!(s > 0.0);
        self.map_vertices(|v| &(&(v - center) * s) + center)
    }

    /// Applies a planar linear map given row-major, re-canonicalizing.
    pub fn linear_map_2d(&self, m: [[f64; 2]; 2]) -> Result<Polytope> {
        if self.dim != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: self.dim });
        }
        let pts = self
            .vertices
            .iter()
            .map(|v| Vector::xy(m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]))
            .collect();
        Polytope::from_points(pts)
    }

    fn map_vertices(&self, f: impl Fn(&Vector) -> Vector) -> Polytope {
        // Translations and positive homotheties keep the canonical order.
        Polytope { dim: self.dim, vertices: self.vertices.iter().map(f).collect(), facets: None }
    }

    /// Vertex-wise equality of canonical forms.
    pub fn approx_eq(&self, other: &Polytope, tol: f64) -> bool {
        self.dim == other.dim
            && self.vertices.len() == other.vertices.len()
            && self.vertices.iter().zip(&other.vertices).all(|(a, b)| a.approx_eq(b, tol))
    }
}

fn check_points(points: &[Vector]) -> Result<usize> {
    let first = points
        .first()
        .ok_or_else(|| Error::MalformedInput("empty vertex list".into()))?;
    let dim = first.dim();
    if let Some(bad) = points.iter().find(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
    }
    Ok(dim)
}

fn hull_1d(points: Vec<Vector>) -> Vec<Vector> {
    let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= CANON_TOL {
        vec![Vector::from_vec_unchecked(vec![lo])]
    } else {
        vec![Vector::from_vec_unchecked(vec![lo]), Vector::from_vec_unchecked(vec![hi])]
    }
}

/// Dedup then drop every point lying in the hull of the remaining ones.
fn prune_general(mut points: Vec<Vector>) -> Vec<Vector> {
    points.sort_by(|a, b| a.lex_cmp(b));
    let mut uniq: Vec<Vector> = Vec::with_capacity(points.len());
    for p in points {
        if !uniq.iter().any(|q| q.distance(&p) <= CANON_TOL) {
            uniq.push(p);
        }
    }
    let mut i = 0;
    while i < uniq.len() && uniq.len() > 1 {
        let others: Vec<Vector> = uniq
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, v)| v.clone())
            .collect();
        // A non-converged distance only ever keeps a point, never drops one.
        let d = distance_to_hull(&uniq[i], &others, DEFAULT_DISTANCE_TOL).unwrap_or(f64::INFINITY);
        if d <= CANON_TOL {
            uniq.remove(i);
        } else {
            i += 1;
        }
    }
    uniq
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolytopeJson {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    facets: Option<FacetBlock>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FacetBlock {
    normals: Vec<Vec<f64>>,
    offsets: Vec<f64>,
}

impl TryFrom<PolytopeJson> for Polytope {
    type Error = Error;

    fn try_from(raw: PolytopeJson) -> Result<Self> {
        if raw.dim == 0 {
            return Err(Error::MalformedInput("dim must be at least 1".into()));
        }
        let pts = raw
            .vertices
            .into_iter()
            .map(Vector::new)
            .collect::<Result<Vec<_>>>()?;
        let mut p = Polytope::from_points(pts)?;
        if p.dim != raw.dim {
            return Err(Error::DimensionMismatch { expected: raw.dim, found: p.dim });
        }
        if let Some(block) = raw.facets {
            if raw.dim != 2 {
                return Err(Error::MalformedInput("facet block is only supported in d=2".into()));
            }
            if block.normals.len() != block.offsets.len() {
                return Err(Error::LengthMismatch {
                    expected: block.normals.len(),
                    found: block.offsets.len(),
                });
            }
            let facets = block
                .normals
                .into_iter()
                .zip(block.offsets)
                .map(|(n, offset)| {
                    let normal = Vector::new(n)?;
                    if normal.dim() != 2 {
                        return Err(Error::DimensionMismatch { expected: 2, found: normal.dim() });
                    }
                    Ok(Facet { normal, offset })
                })
                .collect::<Result<Vec<_>>>()?;
            for f in &facets {
                let slack = p.support(f.normal.coords()) - f.offset;
                if slack > CANON_TOL * (1.0 + f.normal.norm()) {
                    return Err(Error::MalformedInput(format!(
                        "vertex violates facet {:?} by {slack:e}",
                        f.normal
                    )));
                }
            }
            p.facets = Some(facets);
        }
        Ok(p)
    }
}

impl From<Polytope> for PolytopeJson {
    fn from(p: Polytope) -> Self {
        PolytopeJson {
            dim: p.dim,
            vertices: p.vertices.into_iter().map(Vector::into_inner).collect(),
            facets: p.facets.map(|fs| FacetBlock {
                normals: fs.iter().map(|f| f.normal.coords().to_vec()).collect(),
                offsets: fs.iter().map(|f| f.offset).collect(),
            }),
        }
    }
}
