use std::collections::BTreeSet;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{v_to_h_2d, Polytope, Vector};

/// Default angular tolerance (radians) for matching rays across fans.
pub const DEFAULT_ANGTOL: f64 = 1e-8;

const SECTOR_TOL: f64 = 1e-12;

/// A finite polyhedral fan given by its rays and the ray-index sets of its
/// maximal cones. Faces of the maximal cones are implied.
///
/// JSON form: `{"rays": [[..], ..], "maximal": [[j, ..], ..]}` with
/// zero-based ray indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FanJson", into = "FanJson")]
pub struct Fan {
    rays: Vec<Vector>,
    maximal: Vec<Vec<usize>>,
}

/// A pointed two-ray maximal cone of a planar fan, oriented so that the
/// counterclockwise sweep `from → to` has angle `angle ∈ (0, π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sector {
    pub cone: usize,
    pub from: usize,
    pub to: usize,
    pub angle: f64,
}

/// Two adjacent maximal cones. `distinguished.0 ∈ J_{C₁}` and
/// `distinguished.1 ∈ J_{C₂}` are the rays outside the shared facet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdjacentPair {
    pub cones: (usize, usize),
    pub shared: Vec<usize>,
    pub distinguished: (usize, usize),
}

impl Fan {
    pub fn new(rays: Vec<Vector>, maximal: Vec<Vec<usize>>) -> Result<Self> {
        let dim = rays
            .first()
            .map(Vector::dim)
            .ok_or_else(|| Error::MalformedInput("fan without rays".into()))?;
        let mut scaled = Vec::with_capacity(rays.len());
        for r in rays {
            if r.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: r.dim() });
            }
            let m = r.norm_inf();
            if m == 0.0 {
                return Err(Error::MalformedInput("zero ray".into()));
            }
            // Adding 0.0 turns negative zeros into positive ones.
            let r = Vector::from_vec_unchecked(r.coords().iter().map(|c| c / m + 0.0).collect());
            if scaled.iter().any(|s: &Vector| angle_between(s, &r) <= DEFAULT_ANGTOL) {
                return Err(Error::MalformedInput(format!("duplicate ray direction {r:?}")));
            }
            scaled.push(r);
        }
        if maximal.is_empty() {
            return Err(Error::MalformedInput("fan without maximal cones".into()));
        }
        let mut cones = Vec::with_capacity(maximal.len());
        for set in maximal {
            let set: Vec<usize> = set.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
            if set.is_empty() {
                return Err(Error::MalformedInput("empty maximal cone".into()));
            }
            if let Some(&bad) = set.iter().find(|&&j| j >= scaled.len()) {
                return Err(Error::MalformedInput(format!("ray index {bad} out of range")));
            }
            cones.push(set);
        }
        Ok(Self { rays: scaled, maximal: cones })
    }

    pub fn dim(&self) -> usize {
        self.rays[0].dim()
    }

    pub fn rays(&self) -> &[Vector] {
        &self.rays
    }

    pub fn maximal_cones(&self) -> &[Vec<usize>] {
        &self.maximal
    }

    pub fn ray_count(&self) -> usize {
        self.rays.len()
    }

    /// Oriented sectors of a planar fan whose maximal cones are all pointed
    /// two-ray cones.
    pub fn sectors_2d(&self) -> Result<Vec<Sector>> {
        if self.dim() != 2 {
            return Err(Error::FanPrecondition(format!("planar fan required, got d={}", self.dim())));
        }
        self.maximal
            .iter()
            .enumerate()
            .map(|(c, set)| {
                if set.len() != 2 {
                    return Err(Error::FanPrecondition(format!(
                        "maximal cone {c} has {} rays, expected 2 (not simplicial)",
                        set.len()
                    )));
                }
                let (a, b) = (set[0], set[1]);
                let t = ccw_angle(&self.rays[a], &self.rays[b]);
                if t > SECTOR_TOL && t < PI - SECTOR_TOL {
                    Ok(Sector { cone: c, from: a, to: b, angle: t })
                } else if TAU - t > SECTOR_TOL && TAU - t < PI - SECTOR_TOL {
                    Ok(Sector { cone: c, from: b, to: a, angle: TAU - t })
                } else {
                    Err(Error::FanPrecondition(format!("maximal cone {c} is not pointed")))
                }
            })
            .collect()
    }

    /// Every maximal cone is generated by `d` linearly independent rays.
    pub fn is_simplicial(&self) -> bool {
        match self.dim() {
            2 => self.sectors_2d().is_ok(),
            d => self.maximal.iter().all(|s| s.len() == d),
        }
    }

    /// All maximal cones pointed, so the fan has trivial lineality space.
    pub fn is_essential(&self) -> bool {
        self.dim() == 2 && self.sectors_2d().is_ok()
    }

    /// Planar completeness: sectors chain around the origin (every sector's
    /// end ray starts exactly one other sector) and their angles sum to 2π.
    pub fn is_complete(&self) -> bool {
        let Ok(sectors) = self.sectors_2d() else { return false };
        let total: f64 = sectors.iter().map(|s| s.angle).sum();
        (total - TAU).abs() <= 1e-9
            && sectors
                .iter()
                .all(|s| sectors.iter().filter(|t| t.from == s.to).count() == 1)
    }

    /// Sum of sector angles (2π for complete planar fans).
    pub fn total_angle(&self) -> Result<f64> {
        Ok(self.sectors_2d()?.iter().map(|s| s.angle).sum())
    }
}

/// Counterclockwise angle from `a` to `b` in `[0, 2π)`.
pub(crate) fn ccw_angle(a: &Vector, b: &Vector) -> f64 {
    let t = a.cross2(b).atan2(a.dot(b));
    if t < 0.0 {
        t + TAU
    } else {
        t
    }
}

pub(crate) fn angle_between(a: &Vector, b: &Vector) -> f64 {
    if a.dim() == 2 {
        a.cross2(b).abs().atan2(a.dot(b))
    } else {
        let c = a.dot(b) / (a.norm() * b.norm());
        c.clamp(-1.0, 1.0).acos()
    }
}

/// Normal fan of a full-dimensional planar polytope: rays are the facet
/// normals in counterclockwise facet order, and maximal cone `i` is the
/// normal cone at vertex `i`, spanned by facets `i-1` and `i`.
pub fn normal_fan_2d(p: &Polytope) -> Result<Fan> {
    let h = v_to_h_2d(p)?;
    let facets = h.facets().expect("populated");
    let k = facets.len();
    let rays = facets.iter().map(|f| f.normal.clone()).collect();
    let maximal = (0..k).map(|i| vec![(i + k - 1) % k, i]).collect();
    let fan = Fan::new(rays, maximal)?;
    if !fan.is_complete() {
        return Err(Error::NumericalFailure {
            reason: "normal fan failed the completeness check".into(),
            best_bound: fan.total_angle().unwrap_or(f64::NAN),
        });
    }
    Ok(fan)
}

/// Equality of fans up to a ray relabelling: rays are matched one-to-one by
/// direction within `angtol` radians and the maximal index sets must agree
/// under that matching.
pub fn fans_equal(f1: &Fan, f2: &Fan, angtol: f64) -> bool {
    if f1.dim() != f2.dim() || f1.ray_count() != f2.ray_count() || f1.maximal.len() != f2.maximal.len() {
        return false;
    }
    let mut matching = vec![usize::MAX; f1.ray_count()];
    let mut used = vec![false; f2.ray_count()];
    for (i, r) in f1.rays.iter().enumerate() {
        let hit = f2
            .rays
            .iter()
            .enumerate()
            .filter(|&(j, _)| !used[j])
            .map(|(j, s)| (j, angle_between(r, s)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match hit {
            Some((j, a)) if a <= angtol => {
                matching[i] = j;
                used[j] = true;
            }
            _ => return false,
        }
    }
    let mapped: BTreeSet<Vec<usize>> = f1
        .maximal
        .iter()
        .map(|s| {
            let mut m: Vec<usize> = s.iter().map(|&j| matching[j]).collect();
            m.sort_unstable();
            m
        })
        .collect();
    let target: BTreeSet<Vec<usize>> = f2.maximal.iter().cloned().collect();
    mapped == target
}

/// Adjacent maximal cones of a complete, simplicial, essential planar fan:
/// consecutive sectors, each pair sharing exactly one ray. Pairs are listed
/// with the smaller cone index first, sorted.
pub fn adjacent_maximal_pairs(f: &Fan) -> Result<Vec<AdjacentPair>> {
    let sectors = f.sectors_2d()?;
    if !f.is_complete() {
        return Err(Error::FanPrecondition("fan is not complete".into()));
    }
    let mut pairs = Vec::with_capacity(sectors.len());
    for s in &sectors {
        let t = sectors.iter().find(|t| t.from == s.to).expect("complete fan chains");
        let (c1, c2, j1, j2) = if s.cone < t.cone {
            (s.cone, t.cone, s.from, t.to)
        } else {
            (t.cone, s.cone, t.to, s.from)
        };
        pairs.push(AdjacentPair { cones: (c1, c2), shared: vec![s.to], distinguished: (j1, j2) });
    }
    pairs.sort_by_key(|p| p.cones);
    pairs.dedup_by_key(|p| p.cones);
    Ok(pairs)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FanJson {
    rays: Vec<Vec<f64>>,
    maximal: Vec<Vec<usize>>,
}

impl TryFrom<FanJson> for Fan {
    type Error = Error;
    fn try_from(raw: FanJson) -> Result<Self> {
        let rays = raw.rays.into_iter().map(Vector::new).collect::<Result<Vec<_>>>()?;
        Fan::new(rays, raw.maximal)
    }
}

impl From<Fan> for FanJson {
    fn from(f: Fan) -> Self {
        FanJson { rays: f.rays.into_iter().map(Vector::into_inner).collect(), maximal: f.maximal }
    }
}

#[cfg(test)]
mod tests {
    use super::super::triangle_fan;
    use super::*;

    fn poly(c: &[(f64, f64)]) -> Polytope {
        Polytope::from_points(c.iter().map(|&(x, y)| Vector::xy(x, y)).collect()).unwrap()
    }

    fn square() -> Polytope {
        poly(&[(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)])
    }

    #[test]
    fn triangle_normal_fan_index_sets() {
        let tri = poly(&[(-1.0, -1.0), (2.0, -1.0), (-1.0, 2.0)]);
        let f = normal_fan_2d(&tri).unwrap();
        assert!(fans_equal(&f, &triangle_fan(), DEFAULT_ANGTOL));
        // rays keep the integer form (1,1)
        assert!(f.rays().iter().any(|r| r.approx_eq(&Vector::xy(1.0, 1.0), 1e-15)));
        let sets: BTreeSet<Vec<usize>> = f.maximal_cones().iter().cloned().collect();
        assert_eq!(sets, [vec![0, 1], vec![1, 2], vec![0, 2]].into_iter().collect());
    }

    #[test]
    fn square_fan_is_four_quadrants() {
        let f = normal_fan_2d(&square()).unwrap();
        assert_eq!(f.maximal_cones().len(), 4);
        for s in f.sectors_2d().unwrap() {
            assert!((s.angle - PI / 2.0).abs() < 1e-15);
        }
        assert!(f.is_complete() && f.is_simplicial() && f.is_essential());
    }

    #[test]
    fn translation_and_scaling_invariance() {
        let p = poly(&[(0.0, 0.0), (3.0, 1.0), (1.0, 4.0), (-1.0, 2.0)]);
        let f = normal_fan_2d(&p).unwrap();
        let moved = normal_fan_2d(&p.translate(&Vector::xy(5.0, -7.0))).unwrap();
        assert_eq!(f, moved);
        let scaled = normal_fan_2d(&p.scale_about(&Vector::xy(0.0, 0.0), 2.0)).unwrap();
        assert!(fans_equal(&f, &scaled, DEFAULT_ANGTOL));
    }

    #[test]
    fn square_and_triangle_fans_differ() {
        let sq = normal_fan_2d(&square()).unwrap();
        assert!(fans_equal(&sq, &sq, DEFAULT_ANGTOL));
        assert!(!fans_equal(&sq, &triangle_fan(), DEFAULT_ANGTOL));
    }

    #[test]
    fn fans_equal_under_relabelling() {
        let t = triangle_fan();
        let relabelled = Fan::new(
            vec![Vector::xy(1.0, 1.0), Vector::xy(-1.0, 0.0), Vector::xy(0.0, -1.0)],
            vec![vec![1, 2], vec![0, 2], vec![0, 1]],
        )
        .unwrap();
        assert!(fans_equal(&t, &relabelled, DEFAULT_ANGTOL));
        let wrong = Fan::new(
            vec![Vector::xy(1.0, 1.0), Vector::xy(-1.0, 0.0), Vector::xy(0.0, -1.0)],
            vec![vec![1, 2], vec![0, 2], vec![1, 0, 2]],
        )
        .unwrap();
        assert!(!fans_equal(&t, &wrong, DEFAULT_ANGTOL));
    }

    #[test]
    fn adjacency_counts() {
        assert_eq!(adjacent_maximal_pairs(&triangle_fan()).unwrap().len(), 3);
        let pairs = adjacent_maximal_pairs(&normal_fan_2d(&square()).unwrap()).unwrap();
        assert_eq!(pairs.len(), 4);
        for p in pairs {
            assert_eq!(p.shared.len(), 1);
        }
    }

    #[test]
    fn whole_plane_cone_is_rejected() {
        let f = Fan::new(
            vec![Vector::xy(1.0, 0.0), Vector::xy(0.0, 1.0), Vector::xy(-1.0, 0.0), Vector::xy(0.0, -1.0)],
            vec![vec![0, 1, 2, 3]],
        )
        .unwrap();
        assert!(matches!(adjacent_maximal_pairs(&f), Err(Error::FanPrecondition(_))));
        assert!(!f.is_simplicial());
    }

    #[test]
    fn incomplete_fan_is_rejected() {
        let f = Fan::new(vec![Vector::xy(1.0, 0.0), Vector::xy(0.0, 1.0)], vec![vec![0, 1]]).unwrap();
        assert!(!f.is_complete());
        assert!(adjacent_maximal_pairs(&f).is_err());
    }

    #[test]
    fn fan_json_round_trip() {
        let f = triangle_fan();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"rays":[[-1.0,0.0],[0.0,-1.0],[1.0,1.0]],"maximal":[[0,1],[1,2],[0,2]]}"#);
        let back: Fan = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<Fan>(r#"{"rays":[[0,0]],"maximal":[[0]]}"#).is_err());
    }
}
