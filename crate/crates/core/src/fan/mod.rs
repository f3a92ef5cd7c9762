//! Normal cones, normal fans and type cones in the plane.
//!
//! Fan rays are stored scaled to unit max-norm (`max_k |x_k| = 1`), so
//! integer-direction normals such as `(1,1)` keep their integer form and the
//! linear-dependence coefficients of adjacent cones come out as small
//! integers. Cone generators are Euclidean-unit.

mod cone;
mod detfan;
mod normal_fan;
mod typecone;

pub use cone::{normal_cone_at_vertex_2d, Cone};
pub use detfan::{deterministic_fan_test, ArgmaxWitness, DeterministicFanReport, FanShape};
pub use normal_fan::{adjacent_maximal_pairs, fans_equal, normal_fan_2d, AdjacentPair, Fan, Sector, DEFAULT_ANGTOL};
pub use typecone::{
    alpha_coefficients, is_admissible, offset_polytope_2d, type_cone, AlphaRow, TypeCone, ADMISSIBLE_TOL,
};

/// The triangle fan with rays `(-1,0), (0,-1), (1,1)` and maximal cones
/// `{0,1}, {1,2}, {0,2}`. Offsets `h` describe `{-x₁ ≤ h₀, -x₂ ≤ h₁, x₁+x₂ ≤ h₂}`.
pub fn triangle_fan() -> Fan {
    use crate::geom::Vector;
    Fan::new(
        vec![Vector::xy(-1.0, 0.0), Vector::xy(0.0, -1.0), Vector::xy(1.0, 1.0)],
        vec![vec![0, 1], vec![1, 2], vec![0, 2]],
    )
    .expect("static fan is valid")
}
