use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use svset_core::fan::{fans_equal, is_admissible, normal_fan_2d, offset_polytope_2d, triangle_fan, type_cone, DEFAULT_ANGTOL};
use svset_core::geom::{grid_resolution_bound, hausdorff_distance, hausdorff_grid_estimate, minkowski_average, v_to_h_2d};
use svset_core::mc::{
    brownian_paths, run_triangle_experiment, support_trend_test, DriverMode, Integrand, SupremumVerdict,
    TriangleExperimentConfig, ZMatrix, ZProcess,
};
use svset_core::tree::corpus::equivalence_corpus;
use svset_core::tree::{hull_vs_conditional, randomization_identity, GAP_TOL};
use svset_core::fan::deterministic_fan_test;
use svset_core::{DirectionGrid, Polytope, Vector};

use super::emit;
use crate::report::{Report, Verdict};
use crate::{Suite, VerifyArgs};

const TOL: f64 = 1e-9;

#[derive(Serialize)]
struct Check {
    suite: &'static str,
    name: &'static str,
    passed: usize,
    total: usize,
}

impl Check {
    fn ok(&self) -> bool {
        self.passed == self.total
    }
}

fn count(suite: &'static str, name: &'static str, results: impl IntoIterator<Item = bool>) -> Check {
    let (mut passed, mut total) = (0, 0);
    for r in results {
        total += 1;
        passed += usize::from(r);
    }
    Check { suite, name, passed, total }
}

fn random_polytope(rng: &mut ChaCha8Rng) -> Polytope {
    let n = rng.random_range(3..=8);
    let pts = (0..n).map(|_| Vector::xy(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect();
    Polytope::from_points(pts).expect("finite points")
}

fn geometry(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = DirectionGrid::planar(360)?;
    let mut dual = Vec::new();
    let mut symmetric = Vec::new();
    let mut triangle = Vec::new();
    let mut additive = Vec::new();
    for _ in 0..200 {
        let (p, q, r) = (random_polytope(&mut rng), random_polytope(&mut rng), random_polytope(&mut rng));
        let h = hausdorff_distance(&p, &q, 1e-12)?;
        let g = hausdorff_grid_estimate(&p, &q, &grid)?;
        let bound = grid_resolution_bound(&p, &q, &grid).unwrap_or(f64::INFINITY);
        dual.push(g <= h + TOL && h - g <= bound + TOL);
        symmetric.push((h - hausdorff_distance(&q, &p, 1e-12)?).abs() <= 1e-12 && hausdorff_distance(&p, &p, 1e-12)? == 0.0);
        triangle.push(hausdorff_distance(&p, &r, 1e-12)? <= h + hausdorff_distance(&q, &r, 1e-12)? + TOL);
        let w: f64 = rng.random_range(0.0..1.0);
        let avg = minkowski_average(&[w, 1.0 - w], &[p.clone(), q.clone()])?;
        additive.push(grid.directions().iter().all(|u| {
            let lhs = avg.support(u.coords());
            let rhs = w * p.support(u.coords()) + (1.0 - w) * q.support(u.coords());
            (lhs - rhs).abs() <= TOL
        }));
    }
    Ok(vec![
        count("geometry", "hausdorff_dual_oracle", dual),
        count("geometry", "hausdorff_symmetry", symmetric),
        count("geometry", "hausdorff_triangle_inequality", triangle),
        count("geometry", "minkowski_support_additivity", additive),
    ])
}

fn fan(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = triangle_fan();
    let tc = type_cone(&f)?;
    let distinct = tc.distinct_rows(1e-10);
    let single_row = distinct.len() == 1 && distinct[0].alpha.values().all(|a| (a - 1.0).abs() <= 1e-12);

    let mut round_trip = Vec::new();
    let mut rejected = Vec::new();
    while round_trip.len() < 500 || rejected.len() < 500 {
        let h = [rng.random_range(-1.0..2.0), rng.random_range(-1.0..2.0), rng.random_range(-1.0..2.0)];
        let s: f64 = h.iter().sum();
        if s > 0.05 && round_trip.len() < 500 {
            let ok = offset_polytope_2d(&f, &h)
                .and_then(|p| v_to_h_2d(&p))
                .and_then(|p| normal_fan_2d(&p))
                .map(|g| fans_equal(&f, &g, DEFAULT_ANGTOL))
                .unwrap_or(false);
            round_trip.push(ok && is_admissible(&f, &h)?);
        } else if s <= 0.0 && rejected.len() < 500 {
            rejected.push(!is_admissible(&f, &h)?);
        }
    }
    Ok(vec![
        count("fan", "triangle_type_cone_single_row", [single_row]),
        count("fan", "admissible_round_trip", round_trip),
        count("fan", "inadmissible_rejected", rejected),
    ])
}

fn tree(seed: u64) -> Result<Vec<Check>> {
    let grid = DirectionGrid::planar(720)?;
    let mut agree = Vec::new();
    for (tf, _) in equivalence_corpus(seed, 100, 4) {
        let det = deterministic_fan_test(&tf.leaf_tuples(), &grid)?;
        let gap = hull_vs_conditional(&tf.tree, &tf.selections)?;
        agree.push(det.verdict == (gap.max_gap <= GAP_TOL));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut identity = Vec::new();
    for _ in 0..200 {
        let n = rng.random_range(1..=4);
        let atoms = rng.random_range(1..=8);
        let raw: Vec<f64> = (0..atoms).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mut probs: Vec<f64> = raw.iter().map(|p| p / total).collect();
        let head: f64 = probs[..atoms - 1].iter().sum();
        probs[atoms - 1] = 1.0 - head;
        let zeta: Vec<Vec<f64>> = (0..n).map(|_| (0..atoms).map(|_| rng.random_range(-3i32..=3) as f64).collect()).collect();
        identity.push(randomization_identity(&probs, &zeta)?.consistent);
    }
    Ok(vec![count("tree", "equivalence_corpus", agree), count("tree", "randomization_identity", identity)])
}

fn mc(seed: u64, samples: usize) -> Result<Vec<Check>> {
    let cfg = TriangleExperimentConfig { seed, samples, steps: 200, grid_k: 72, paths_out: 1, ..Default::default() };
    let exp = run_triangle_experiment(&cfg)?;
    let fam = vec![
        Integrand::new(Vector::xy(0.0, 0.0), ZProcess::Constant(ZMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.5]])?))?,
        Integrand::new(Vector::xy(1.0, 0.0), ZProcess::Constant(ZMatrix::from_rows(&[vec![0.0, -0.7], vec![0.3, 0.0]])?))?,
        Integrand::new(Vector::xy(0.0, 1.0), ZProcess::Constant(ZMatrix::from_rows(&[vec![0.2, 0.2], vec![-0.4, 0.6]])?))?,
    ];
    let ens = brownian_paths(2, 100, 1.0, DriverMode::Gauss, seed, samples)?;
    let checkpoints: Vec<usize> = (1..=10).map(|j| 10 * j).collect();
    let trend = support_trend_test(&fam, &ens, &checkpoints, &DirectionGrid::planar(72)?)?;
    Ok(vec![
        count("mc", "vertex_martingality", exp.vertex_means.iter().map(|v| v.within_threshold)),
        count("mc", "supremum_consistent", [exp.supremum.verdict == SupremumVerdict::ConsistentWithMartingale]),
        count("mc", "control_detected", [exp.control.verdict == SupremumVerdict::StrictSubmartingale]),
        count("mc", "support_trend_nondecreasing", [trend.nondecreasing]),
    ])
}

pub fn run(args: &VerifyArgs) -> Result<bool> {
    let (name, suites): (&str, &[Suite]) = match args.suite {
        Suite::Geometry => ("geometry", &[Suite::Geometry]),
        Suite::Fan => ("fan", &[Suite::Fan]),
        Suite::Tree => ("tree", &[Suite::Tree]),
        Suite::Mc => ("mc", &[Suite::Mc]),
        Suite::All => ("all", &[Suite::Geometry, Suite::Fan, Suite::Tree, Suite::Mc]),
    };
    let mut checks = Vec::new();
    for s in suites {
        checks.extend(match s {
            Suite::Geometry => geometry(args.seed)?,
            Suite::Fan => fan(args.seed)?,
            Suite::Tree => tree(args.seed)?,
            Suite::Mc => mc(args.seed, args.samples)?,
            Suite::All => unreachable!("expanded above"),
        });
    }
    let mut report = Report::new("verify", json!({ "suite": name, "seed": args.seed, "samples": args.samples }));
    for c in &checks {
        report.verdict(&format!("{}.{}", c.suite, c.name), Verdict::from_bool(c.ok()));
    }
    report.result("checks", &checks)?;
    emit(&report, args.out.as_deref())
}
