//! Acceptance run: one line per criterion, nonzero exit on any failure.
//!
//! Reference values (the triangle vertices, the single type-cone row and
//! the tolerances) are written out here rather than taken from the library,
//! and every derived quantity is recomputed by a small oracle in this file.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use svset_core::fan::{
    adjacent_maximal_pairs, alpha_coefficients, deterministic_fan_test, fans_equal, is_admissible, normal_fan_2d,
    offset_polytope_2d, type_cone, DEFAULT_ANGTOL,
};
use svset_core::geom::{grid_resolution_bound, hausdorff_distance, hausdorff_grid_estimate, v_to_h_2d};
use svset_core::mc::{brownian_paths, support_trend_test, DriverMode, Integrand, ZMatrix, ZProcess};
use svset_core::tree::corpus::equivalence_corpus;
use svset_core::tree::{hull_vs_conditional, randomization_identity, TreeFile};
use svset_core::{DirectionGrid, Fan, Polytope, Vector};

const BIN: &str = env!("CARGO_BIN_EXE_svset");

/// Initial triangle `(-1,-1), (2,-1), (-1,2)`.
const X0: [[f64; 2]; 3] = [[-1.0, -1.0], [2.0, -1.0], [-1.0, 2.0]];
const Z_MAX: f64 = 4.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

type P2 = (f64, f64);

fn cr(o: P2, a: P2, b: P2) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn seg_dist(p: P2, a: P2, b: P2) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let l2 = dx * dx + dy * dy;
    let t = if l2 == 0.0 { 0.0 } else { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / l2).clamp(0.0, 1.0) };
    (p.0 - a.0 - t * dx).hypot(p.1 - a.1 - t * dy)
}

/// Distance to a counterclockwise convex polygon.
fn poly_dist(p: P2, poly: &[P2]) -> f64 {
    let n = poly.len();
    if n >= 3 && (0..n).all(|i| cr(poly[i], poly[(i + 1) % n], p) >= 0.0) {
        return 0.0;
    }
    (0..n).map(|i| seg_dist(p, poly[i], poly[(i + 1) % n])).fold(f64::INFINITY, f64::min)
}

fn pts(p: &Polytope) -> Vec<P2> {
    p.vertices().iter().map(|v| (v[0], v[1])).collect()
}

fn criterion_1() -> Outcome {
    let s = 0.5f64.sqrt();
    let fan = Fan::new(
        vec![Vector::xy(-1.0, 0.0), Vector::xy(0.0, -1.0), Vector::xy(s, s)],
        vec![vec![0, 1], vec![1, 2], vec![0, 2]],
    )
    .unwrap();
    let pairs = adjacent_maximal_pairs(&fan).unwrap();
    let mut worst: f64 = 0.0;
    for p in &pairs {
        let row = alpha_coefficients(&fan, p.cones.0, p.cones.1).unwrap();
        for j in 0..3 {
            worst = worst.max((row.alpha.get(&j).copied().unwrap_or(0.0) - 1.0).abs());
        }
    }
    let tc = type_cone(&fan).unwrap();
    let distinct = tc.distinct_rows(1e-10);
    let single = distinct.len() == 1 && (0..3).all(|j| (distinct[0].dense(3)[j] - 1.0).abs() <= 1e-12);
    outcome(
        pairs.len() == 3 && worst <= 1e-12 && single,
        format!("{} adjacent pairs, max |alpha-1| = {worst:.1e}, {} distinct row(s)", pairs.len(), distinct.len()),
    )
}

/// Vertices of `{x : <r_j, x> <= h_j}` for the rays `(-1,0), (0,-1), (1,1)`.
fn triangle_from_offsets(h: [f64; 3]) -> Vec<P2> {
    vec![(-h[0], -h[1]), (h[1] + h[2], -h[1]), (-h[0], h[0] + h[2])]
}

fn criterion_2() -> Outcome {
    let fan = Fan::new(
        vec![Vector::xy(-1.0, 0.0), Vector::xy(0.0, -1.0), Vector::xy(0.5f64.sqrt(), 0.5f64.sqrt())],
        vec![vec![0, 1], vec![1, 2], vec![0, 2]],
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut ok, mut rejected, mut accepted_n, mut rejected_n) = (0, 0, 0, 0);
    while accepted_n < 500 || rejected_n < 500 {
        let h = [rng.random_range(-1.0..2.0), rng.random_range(-1.0..2.0), rng.random_range(-1.0..2.0)];
        let sum: f64 = h.iter().sum();
        if sum > 0.0 && accepted_n < 500 {
            accepted_n += 1;
            let good = (|| -> svset_core::Result<bool> {
                let p = offset_polytope_2d(&fan, &h)?;
                let back = normal_fan_2d(&v_to_h_2d(&p)?)?;
                let expected = Polytope::from_points(triangle_from_offsets(h).into_iter().map(|(x, y)| Vector::xy(x, y)).collect())?;
                let scale = 1.0 + h.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                Ok(is_admissible(&fan, &h)? && fans_equal(&fan, &back, DEFAULT_ANGTOL) && p.approx_eq(&expected, 1e-9 * scale))
            })()
            .unwrap_or(false);
            ok += usize::from(good);
        } else if sum <= 0.0 && rejected_n < 500 {
            rejected_n += 1;
            rejected += usize::from(!is_admissible(&fan, &h).unwrap());
        }
    }
    outcome(ok == 500 && rejected == 500, format!("round trips {ok}/500, rejections {rejected}/500"))
}

/// Largest support-function discrepancy between `co{E[xi^i | node]}` and
/// `sum p(leaf|node) co{xi^i(leaf)}` over all nodes and grid directions.
fn oracle_gap(tf: &TreeFile, grid: &DirectionGrid) -> f64 {
    let tree = &tf.tree;
    let probs = tree.leaf_probs();
    let mut worst: f64 = 0.0;
    for level in 0..=tree.depth() {
        let per = tree.leaf_count() / tree.node_count(level);
        for node in 0..tree.node_count(level) {
            let leaves = node * per..(node + 1) * per;
            let mass: f64 = leaves.clone().map(|l| probs[l]).sum();
            let means: Vec<Vector> = tf
                .selections
                .iter()
                .map(|s| {
                    let (x, y) = leaves.clone().fold((0.0, 0.0), |(x, y), l| {
                        (x + probs[l] * s.values()[l][0], y + probs[l] * s.values()[l][1])
                    });
                    Vector::xy(x / mass, y / mass)
                })
                .collect();
            for u in grid.directions() {
                let s_g = means.iter().map(|m| u.dot(m)).fold(f64::NEG_INFINITY, f64::max);
                let s_m = leaves
                    .clone()
                    .map(|l| probs[l] * tf.selections.iter().map(|s| u.dot(&s.values()[l])).fold(f64::NEG_INFINITY, f64::max))
                    .sum::<f64>()
                    / mass;
                worst = worst.max((s_m - s_g).abs());
            }
        }
    }
    worst
}

fn criterion_3() -> Outcome {
    let grid = DirectionGrid::planar(720).unwrap();
    let corpus = equivalence_corpus(3, 100, 4);
    let (mut agree, mut det_ok, mut rot_ok, mut oracle_ok) = (0, 0, 0, 0);
    let mut max_det_gap: f64 = 0.0;
    let mut min_rot_gap = f64::INFINITY;
    for (tf, deterministic) in &corpus {
        assert!(tf.tree.depth() <= 4 && tf.tree.branching().iter().all(|&b| b == 2));
        let fan = deterministic_fan_test(&tf.leaf_tuples(), &grid).unwrap();
        let gaps = hull_vs_conditional(&tf.tree, &tf.selections).unwrap();
        let martingale = gaps.max_gap <= 1e-7;
        agree += usize::from(fan.verdict == martingale && fan.verdict == *deterministic);
        let oracle = oracle_gap(tf, &grid);
        if *deterministic {
            max_det_gap = max_det_gap.max(gaps.max_gap);
            det_ok += usize::from(gaps.max_gap <= 1e-9);
            oracle_ok += usize::from(oracle <= 1e-9);
        } else {
            min_rot_gap = min_rot_gap.min(gaps.max_gap);
            rot_ok += usize::from(gaps.max_gap >= 1e-3);
            // The grid value is a lower bound on the Hausdorff gap.
            oracle_ok += usize::from(oracle >= 1e-3 && oracle <= gaps.max_gap + 1e-9);
        }
    }
    outcome(
        corpus.len() == 200 && agree == 200 && det_ok == 100 && rot_ok == 100 && oracle_ok == 200,
        format!(
            "agree {agree}/200, deterministic max gap {max_det_gap:.1e}, rotated min gap {min_rot_gap:.3}, oracle {oracle_ok}/200"
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut ok, mut worst) = (0, 0.0f64);
    for _ in 0..1000 {
        let n = rng.random_range(1..=4usize);
        let atoms = rng.random_range(1..=8usize);
        let raw: Vec<f64> = (0..atoms).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mut probs: Vec<f64> = raw.iter().map(|p| p / total).collect();
        let head: f64 = probs[..atoms - 1].iter().sum();
        probs[atoms - 1] = 1.0 - head;
        // Half the instances use small integers so that ties are frequent.
        let ties = rng.random_bool(0.5);
        let zeta: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..atoms)
                    .map(|_| if ties { f64::from(rng.random_range(-2i32..=2)) } else { rng.random_range(-3.0..3.0) })
                    .collect()
            })
            .collect();
        let r = randomization_identity(&probs, &zeta).unwrap();

        let mut best = f64::NEG_INFINITY;
        let mut first_opt: Option<Vec<usize>> = None;
        for code in 0..n.pow(atoms as u32) {
            let mut c = code;
            let mut assign = vec![0usize; atoms];
            for a in (0..atoms).rev() {
                assign[a] = c % n;
                c /= n;
            }
            best = best.max((0..atoms).map(|a| probs[a] * zeta[assign[a]][a]).sum());
            if first_opt.is_none() && (0..atoms).all(|a| (0..n).all(|j| zeta[assign[a]][a] >= zeta[j][a])) {
                first_opt = Some(assign);
            }
        }
        let dev = (r.partition_value - r.max_value).abs().max((r.simplex_value - r.max_value).abs()).max((best - r.max_value).abs());
        worst = worst.max(dev);
        ok += usize::from(dev <= 1e-12 && Some(&r.partition) == first_opt.as_ref());
    }
    outcome(ok == 1000, format!("{ok}/1000 instances, max deviation {worst:.1e}"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let grid = DirectionGrid::planar(720).unwrap();
    let random_poly = |rng: &mut ChaCha8Rng| loop {
        let n = rng.random_range(1..=9);
        let c = rng.random_range(-3.0..3.0);
        let pts: Vec<Vector> =
            (0..n).map(|_| Vector::xy(c + rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect();
        if let Ok(p) = Polytope::from_points(pts) {
            return p;
        }
    };
    let (mut ok, mut worst_slack) = (0, f64::INFINITY);
    for _ in 0..1000 {
        let p = random_poly(&mut rng);
        let q = random_poly(&mut rng);
        let h = hausdorff_distance(&p, &q, 1e-12).unwrap();
        let g = hausdorff_grid_estimate(&p, &q, &grid).unwrap();
        let bound = grid_resolution_bound(&p, &q, &grid).unwrap();
        // Point-sampled lower bound: distances of edge points to the other
        // polygon, measured with the exact segment oracle above.
        let sample = |a: &[P2], b: &[P2]| -> f64 {
            let n = a.len();
            let mut m: f64 = 0.0;
            for i in 0..n {
                let (s, t) = (a[i], a[(i + 1) % n]);
                for k in 1..8 {
                    let w = f64::from(k) / 8.0;
                    m = m.max(poly_dist((s.0 + w * (t.0 - s.0), s.1 + w * (t.1 - s.1)), b));
                }
            }
            m
        };
        let (pa, qa) = (pts(&p), pts(&q));
        let lower = sample(&pa, &qa).max(sample(&qa, &pa));
        let pass = g <= h + 1e-9 && h - g <= bound + 1e-9 && lower <= h + 1e-9 && lower <= g + bound + 1e-9;
        worst_slack = worst_slack.min(bound - (h - g));
        ok += usize::from(pass);
    }
    outcome(ok == 1000, format!("{ok}/1000 pairs, smallest bound slack {worst_slack:.2e}"))
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn criterion_6() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(BIN).args(["simulate", "--out"]).arg(dir.path()).output().unwrap();
    if !out.status.success() && out.status.code() != Some(1) {
        return outcome(false, format!("simulate failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    let report = read_json(&dir.path().join("report_simulate.json"));
    let cfg = &report["config"];
    let defaults = cfg["N"] == 10_000 && cfg["T"] == 1.0 && cfg["alpha"] == 0.5 && cfg["samples"] == 100_000;

    // Trajectory files: 4 samples on the thinned grid of 501 points.
    let lines = |name: &str| fs::read_to_string(dir.path().join(name)).map(|t| t.lines().count()).unwrap_or(0);
    let files = lines("triangle_trajectory.csv") == 1 + 4 * 501 * 3
        && lines("right_angle_vertex.csv") == 1 + 4 * 501
        && lines("hypotenuse.csv") == 1 + 4 * 501;

    let mut vertex_z: f64 = 0.0;
    for (i, vm) in report["results"]["vertex_means"].as_array().unwrap().iter().enumerate() {
        for c in 0..2 {
            let mean = vm["mean"][c].as_f64().unwrap();
            let se = vm["stderr"][c].as_f64().unwrap();
            vertex_z = vertex_z.max((mean - X0[i][c]).abs() / se);
        }
    }

    let dot = |u: &[f64], x: &[f64; 2]| u[0] * x[0] + u[1] * x[1];
    let rot = |x: &[f64; 2]| [-x[1], x[0]];
    let dirs = |key: &str| -> Vec<(Vec<f64>, f64, f64)> {
        report["results"][key]["directions"]
            .as_array()
            .unwrap()
            .iter()
            .map(|d| {
                let u = vec![d["direction"][0].as_f64().unwrap(), d["direction"][1].as_f64().unwrap()];
                (u, d["estimate"].as_f64().unwrap(), d["stderr"].as_f64().unwrap())
            })
            .collect()
    };
    let main = dirs("supremum");
    let mut main_z: f64 = 0.0;
    for (u, est, se) in &main {
        let target = X0.iter().map(|x| dot(u, x)).fold(f64::NEG_INFINITY, f64::max);
        main_z = main_z.max((est - target).abs() / se);
    }
    // Control: targets are the averaged vertices; the estimate itself has
    // the closed form (s(T0,u) + s(T0,R^T u)) / 2 for a martingale triangle.
    let control = dirs("control");
    let (mut witness_z, mut closed_form_z) = (f64::NEG_INFINITY, 0.0f64);
    for (u, est, se) in &control {
        let mids: Vec<[f64; 2]> = X0.iter().map(|x| [(x[0] + rot(x)[0]) / 2.0, (x[1] + rot(x)[1]) / 2.0]).collect();
        let target = mids.iter().map(|x| dot(u, x)).fold(f64::NEG_INFINITY, f64::max);
        witness_z = witness_z.max((est - target) / se);
        let back = [u[1], -u[0]];
        let s0 = |v: &[f64]| X0.iter().map(|x| dot(v, x)).fold(f64::NEG_INFINITY, f64::max);
        closed_form_z = closed_form_z.max((est - 0.5 * (s0(u) + s0(&back))).abs() / se);
    }
    let pass = defaults
        && files
        && vertex_z <= Z_MAX
        && main.len() == 720
        && main_z <= Z_MAX
        && witness_z >= Z_MAX
        && closed_form_z <= Z_MAX;
    outcome(
        pass,
        format!(
            "vertex max|z| {vertex_z:.2}, 720-direction max|z| {main_z:.2}, control witness z {witness_z:.1}, control closed-form max|z| {closed_form_z:.2}, files {}",
            if files { "ok" } else { "missing" }
        ),
    )
}

fn criterion_7() -> Outcome {
    let z = |r: [[f64; 3]; 2]| ZProcess::Constant(ZMatrix::from_rows(&[r[0].to_vec(), r[1].to_vec()]).unwrap());
    let xs = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    let zs = [
        [[1.0, 0.0, 0.3], [0.0, 0.5, 0.0]],
        [[0.0, -0.7, 0.0], [0.3, 0.0, 0.4]],
        [[0.2, 0.2, -0.5], [-0.4, 0.6, 0.0]],
    ];
    let fam: Vec<Integrand> =
        xs.iter().zip(&zs).map(|(x, r)| Integrand::new(Vector::xy(x[0], x[1]), z(*r)).unwrap()).collect();
    let ens = brownian_paths(3, 1000, 1.0, DriverMode::Gauss, 7, 20_000).unwrap();
    let cps: Vec<usize> = (1..=10).map(|j| 100 * j).collect();
    let grid = DirectionGrid::planar(720).unwrap();
    let report = support_trend_test(&fam, &ens, &cps, &grid).unwrap();

    // Oracle: with constant z, J^i_t = x^i + z^i B_t, so the support values
    // follow directly from the driver positions.
    let nd = grid.len();
    let mut sum = vec![0.0; nd * 10];
    let mut step = vec![(0.0, 0.0); nd * 9];
    for s in 0..ens.samples {
        let p = ens.path(s);
        let pos: Vec<Vec<f64>> = (0..3).map(|c| p.positions(c)).collect();
        for (di, u) in grid.directions().iter().enumerate() {
            let mut prev = 0.0;
            for (j, &k) in cps.iter().enumerate() {
                let b = [pos[0][k], pos[1][k], pos[2][k]];
                let sv = (0..3)
                    .map(|i| {
                        let jx = xs[i][0] + (0..3).map(|c| zs[i][0][c] * b[c]).sum::<f64>();
                        let jy = xs[i][1] + (0..3).map(|c| zs[i][1][c] * b[c]).sum::<f64>();
                        u[0] * jx + u[1] * jy
                    })
                    .fold(f64::NEG_INFINITY, f64::max);
                sum[di * 10 + j] += sv;
                if j > 0 {
                    let d = sv - prev;
                    let e = &mut step[di * 9 + j - 1];
                    e.0 += d;
                    e.1 += d * d;
                }
                prev = sv;
            }
        }
    }
    let n = ens.samples as f64;
    let mut oracle_worst = f64::INFINITY;
    let mut mean_err: f64 = 0.0;
    for di in 0..nd {
        for j in 0..10 {
            mean_err = mean_err.max((sum[di * 10 + j] / n - report.directions[di].means[j]).abs());
        }
        for j in 0..9 {
            let (s1, s2) = step[di * 9 + j];
            let m = s1 / n;
            let se = ((s2 - n * m * m) / (n - 1.0) / n).max(0.0).sqrt();
            oracle_worst = oracle_worst.min(if se > 0.0 { m / se } else { 0.0 });
        }
    }
    let pass = report.nondecreasing && oracle_worst >= -Z_MAX && mean_err <= 1e-9 && report.directions.len() == 720;
    outcome(
        pass,
        format!("worst step z {:.2} (oracle {oracle_worst:.2}), mean agreement {mean_err:.1e}", report.worst_z),
    )
}

/// Runs a command and returns stdout plus every output file except the
/// wall-clock sidecar.
fn capture(args: &[&str], threads: &str, out_dir: Option<&Path>) -> (Vec<u8>, BTreeMap<String, Vec<u8>>, Option<i32>) {
    let mut cmd = Command::new(BIN);
    cmd.env("SVSET_THREADS", threads).args(args);
    if let Some(d) = out_dir {
        cmd.arg("--out").arg(d);
    }
    let out = cmd.output().unwrap();
    let mut files = BTreeMap::new();
    if let Some(d) = out_dir {
        for e in fs::read_dir(d).unwrap() {
            let e = e.unwrap();
            let name = e.file_name().to_string_lossy().into_owned();
            if name != "timing.json" {
                files.insert(name, fs::read(e.path()).unwrap());
            }
        }
    }
    (out.stdout, files, out.status.code())
}

fn criterion_8() -> Outcome {
    let corpus = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let p = |name: &str| corpus.join(name).to_string_lossy().into_owned();
    let commands: Vec<Vec<String>> = vec![
        vec!["fan".into(), p("triangle.json")],
        vec!["tree".into(), p("tree_deterministic.json"), "--mode".into(), "audit".into()],
        vec!["tree".into(), p("tree_rotating.json"), "--mode".into(), "equivalence".into()],
        vec!["tree".into(), p("tree_deterministic.json"), "--mode".into(), "randomization".into()],
        ["simulate", "--seed", "1", "--samples", "20000", "--steps", "1000", "--grid-k", "720"].map(String::from).to_vec(),
        ["verify", "all", "--seed", "3"].map(String::from).to_vec(),
    ];
    let tmp = tempfile::tempdir().unwrap();
    let mut identical = 0;
    let mut failures = Vec::new();
    for (ci, args) in commands.iter().enumerate() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let runs: Vec<_> = [("1", 0), ("4", 1), ("1", 2)]
            .iter()
            .map(|(threads, rep)| {
                let d = tmp.path().join(format!("c{ci}_r{rep}"));
                capture(&args, threads, Some(&d))
            })
            .collect();
        let same = runs.windows(2).all(|w| w[0] == w[1]) && runs[0].2.is_some() && !runs[0].1.is_empty();
        if same {
            identical += 1;
        } else {
            failures.push(args[0].to_string());
        }
    }
    outcome(
        identical == commands.len(),
        format!("{identical}/{} commands byte-identical over SVSET_THREADS 1/4/1{}", commands.len(),
            if failures.is_empty() { String::new() } else { format!(", differing: {failures:?}") }),
    )
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 8] = [
        ("type cone of the triangle fan", Duration::from_secs(1), criterion_1),
        ("type-cone round trip, 500 + 500 offsets", Duration::from_secs(10), criterion_2),
        ("exact tree equivalence on 200 trees", Duration::from_secs(60), criterion_3),
        ("randomization identity, 1000 instances", Duration::from_secs(30), criterion_4),
        ("Hausdorff dual oracles, 1000 pairs", Duration::from_secs(60), criterion_5),
        ("random triangle reproduction, 1e5 x 1e4", Duration::from_secs(600), criterion_6),
        ("support-function monotonicity, 10 checkpoints", Duration::from_secs(120), criterion_7),
        ("determinism across runs and thread counts", Duration::from_secs(60), criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        let took = start.elapsed();
        let pass = o.pass && took <= *budget;
        failed += usize::from(!pass);
        println!(
            "criterion {} {}: {name}: {} [{:.2}s / budget {}s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

