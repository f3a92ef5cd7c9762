use std::collections::BTreeMap;

use serde::Serialize;

use super::normal_fan::{adjacent_maximal_pairs, Fan};
use crate::error::{Error, Result};
use crate::geom::linalg::solve_dense;
use crate::geom::{Polytope, Vector};

/// Strict-inequality margin for type-cone membership.
pub const ADMISSIBLE_TOL: f64 = 1e-12;

const PIVOT_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-10;

/// Coefficients of the linear dependence among the rays of two adjacent
/// maximal cones, normalized so the two distinguished coefficients sum to 2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaRow {
    /// Ray index → coefficient, over `J_{C₁} ∪ J_{C₂}`.
    pub alpha: BTreeMap<usize, f64>,
    /// The adjacent maximal cones, smaller index first.
    pub pair: (usize, usize),
    #[serde(skip)]
    pub distinguished: (usize, usize),
}

impl AlphaRow {
    /// `Σ_j α(j) h_j`.
    pub fn evaluate(&self, h: &[f64]) -> f64 {
        self.alpha.iter().map(|(&j, &a)| a * h[j]).sum()
    }

    /// Dense coefficient vector of length `ray_count`.
    pub fn dense(&self, ray_count: usize) -> Vec<f64> {
        let mut out = vec![0.0; ray_count];
        for (&j, &a) in &self.alpha {
            out[j] = a;
        }
        out
    }
}

/// Open polyhedral cone `{h : Σ_j α(j) h_j > 0 for every row}` of offset
/// vectors whose polytope has the given normal fan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeCone {
    #[serde(skip)]
    pub ray_count: usize,
    pub rows: Vec<AlphaRow>,
}

impl TypeCone {
    pub fn contains(&self, h: &[f64]) -> Result<bool> {
        if h.len() != self.ray_count {
            return Err(Error::LengthMismatch { expected: self.ray_count, found: h.len() });
        }
        Ok(self.rows.iter().all(|r| r.evaluate(h) > ADMISSIBLE_TOL))
    }

    /// Rows with distinct dense coefficient vectors (first occurrence kept).
    pub fn distinct_rows(&self, tol: f64) -> Vec<&AlphaRow> {
        let mut kept: Vec<(&AlphaRow, Vec<f64>)> = Vec::new();
        for r in &self.rows {
            let d = r.dense(self.ray_count);
            let dup = kept
                .iter()
                .any(|(_, k)| k.iter().zip(&d).all(|(a, b)| (a - b).abs() <= tol));
            if !dup {
                kept.push((r, d));
            }
        }
        kept.into_iter().map(|(r, _)| r).collect()
    }
}

/// Solves `Σ_{j ∈ J₁ ∪ J₂} α(j) x*ʲ = 0`, `α(j₁) + α(j₂) = 2` by direct
/// elimination on the `(d+1) × (d+1)` system.
pub fn alpha_coefficients(f: &Fan, c1: usize, c2: usize) -> Result<AlphaRow> {
    let d = f.dim();
    let cones = f.maximal_cones();
    let (j1s, j2s) = match (cones.get(c1), cones.get(c2)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::MalformedInput(format!("cone index out of range ({c1}, {c2})"))),
    };
    if j1s.len() != d || j2s.len() != d {
        return Err(Error::FanPrecondition("maximal cones must have d rays (simplicial)".into()));
    }
    let shared: Vec<usize> = j1s.iter().copied().filter(|j| j2s.contains(j)).collect();
    if shared.len() != d - 1 {
        return Err(Error::NonAdjacent(c1, c2));
    }
    let j1 = *j1s.iter().find(|j| !shared.contains(j)).expect("one extra ray");
    let j2 = *j2s.iter().find(|j| !shared.contains(j)).expect("one extra ray");
    let mut union: Vec<usize> = j1s.iter().chain(j2s).copied().collect();
    union.sort_unstable();
    union.dedup();

    let n = d + 1;
    let mut a = vec![vec![0.0; n]; n];
    for (col, &j) in union.iter().enumerate() {
        let ray = &f.rays()[j];
        for k in 0..d {
            a[k][col] = ray[k];
        }
        if j == j1 || j == j2 {
            a[d][col] = 1.0;
        }
    }
    let mut b = vec![0.0; n];
    b[d] = 2.0;
    let sol = solve_dense(a, b, PIVOT_TOL)?;

    let alpha: BTreeMap<usize, f64> = union.iter().copied().zip(sol).collect();
    let residual = residual_norm(f.rays(), &alpha);
    let norm_gap = (alpha[&j1] + alpha[&j2] - 2.0).abs();
    if residual > RESIDUAL_TOL || norm_gap > RESIDUAL_TOL {
        return Err(Error::NumericalFailure {
            reason: "linear-dependence residual above tolerance".into(),
            best_bound: residual.max(norm_gap),
        });
    }
    Ok(AlphaRow { alpha, pair: (c1.min(c2), c1.max(c2)), distinguished: (j1, j2) })
}

/// `‖Σ_j α(j) x*ʲ‖`.
pub(crate) fn residual_norm(rays: &[Vector], alpha: &BTreeMap<usize, f64>) -> f64 {
    let d = rays[0].dim();
    let mut acc = vec![0.0; d];
    for (&j, &a) in alpha {
        for (k, c) in acc.iter_mut().enumerate() {
            *c += a * rays[j][k];
        }
    }
    acc.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// One row per adjacent maximal pair. Requires a complete, simplicial and
/// essential fan.
pub fn type_cone(f: &Fan) -> Result<TypeCone> {
    if !f.is_essential() {
        return Err(Error::FanPrecondition("type cone needs an essential fan".into()));
    }
    let pairs = adjacent_maximal_pairs(f)?;
    let rows = pairs
        .iter()
        .map(|p| alpha_coefficients(f, p.cones.0, p.cones.1))
        .collect::<Result<Vec<_>>>()?;
    Ok(TypeCone { ray_count: f.ray_count(), rows })
}

/// Whether `P_h = {x : ⟨x*ʲ, x⟩ <= h_j}` has normal fan `f`.
pub fn is_admissible(f: &Fan, h: &[f64]) -> Result<bool> {
    if h.len() != f.ray_count() {
        return Err(Error::LengthMismatch { expected: f.ray_count(), found: h.len() });
    }
    type_cone(f)?.contains(h)
}

/// Vertex form of `P_h` for a planar simplicial fan: each maximal cone
/// `{a, b}` contributes the intersection of the lines `⟨x*ᵃ, x⟩ = h_a` and
/// `⟨x*ᵇ, x⟩ = h_b`; the result is their convex hull. For admissible `h` the
/// hull has normal fan `f` and support `h_j` on every ray.
pub fn offset_polytope_2d(f: &Fan, h: &[f64]) -> Result<Polytope> {
    if h.len() != f.ray_count() {
        return Err(Error::LengthMismatch { expected: f.ray_count(), found: h.len() });
    }
    let sectors = f.sectors_2d()?;
    let pts = sectors
        .iter()
        .map(|s| {
            let (ra, rb) = (&f.rays()[s.from], &f.rays()[s.to]);
            let det = ra[0] * rb[1] - ra[1] * rb[0];
            if det.abs() <= PIVOT_TOL {
                return Err(Error::SingularSystem { pivot: det.abs() });
            }
            let (ha, hb) = (h[s.from], h[s.to]);
            Ok(Vector::xy((ha * rb[1] - hb * ra[1]) / det, (ra[0] * hb - rb[0] * ha) / det))
        })
        .collect::<Result<Vec<_>>>()?;
    Polytope::from_points(pts)
}
