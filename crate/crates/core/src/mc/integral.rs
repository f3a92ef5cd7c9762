use super::paths::{stochastic_exponential, PathEnsemble, SamplePath};
use super::triangle::triangle_vertices;
use super::map_chunks;
use crate::error::{Error, Result};
use crate::geom::{Polytope, Vector};

/// A `rows × cols` matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ZMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ZMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch { expected: rows * cols, found: data.len() });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::MalformedInput("integrand entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::MalformedInput("ragged matrix rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    /// Squared Frobenius norm.
    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }
}

/// The integrand's matrix process: either one matrix for all steps or one
/// per grid interval.
#[derive(Debug, Clone, PartialEq)]
pub enum ZProcess {
    Constant(ZMatrix),
    Steps(Vec<ZMatrix>),
}

impl ZProcess {
    #[inline]
    pub fn at(&self, k: usize) -> &ZMatrix {
        match self {
            ZProcess::Constant(z) => z,
            ZProcess::Steps(zs) => &zs[k],
        }
    }
}

/// A pair `(x, z)`: initial point plus a piecewise-constant `d × m` process.
#[derive(Debug, Clone, PartialEq)]
pub struct Integrand {
    pub x: Vector,
    pub z: ZProcess,
}

impl Integrand {
    pub fn new(x: Vector, z: ZProcess) -> Result<Self> {
        let d = x.dim();
        let check = |m: &ZMatrix| -> Result<()> {
            if m.rows != d {
                return Err(Error::DimensionMismatch { expected: d, found: m.rows });
            }
            Ok(())
        };
        match &z {
            ZProcess::Constant(m) => check(m)?,
            ZProcess::Steps(ms) => {
                for m in ms {
                    check(m)?;
                }
                if ms.windows(2).any(|w| w[0].cols != w[1].cols) {
                    return Err(Error::MalformedInput("integrand column count varies over time".into()));
                }
            }
        }
        Ok(Self { x, z })
    }

    /// Zero-volatility integrand pinned at `x`.
    pub fn constant_point(x: Vector, m: usize) -> Self {
        let d = x.dim();
        Self { x, z: ZProcess::Constant(ZMatrix::zeros(d, m)) }
    }

    fn check_grid(&self, path: &SamplePath) -> Result<()> {
        let cols = match &self.z {
            ZProcess::Constant(m) => m.cols,
            ZProcess::Steps(ms) => {
                if ms.len() != path.steps() {
                    return Err(Error::LengthMismatch { expected: path.steps(), found: ms.len() });
                }
                ms.first().map_or(path.m(), |m| m.cols)
            }
        };
        if cols != path.m() {
            return Err(Error::DimensionMismatch { expected: path.m(), found: cols });
        }
        Ok(())
    }

    /// `∫₀^{t_N} |z_s|² ds` on the path grid.
    pub fn energy(&self, path: &SamplePath) -> f64 {
        let dt = path.dt();
        match &self.z {
            ZProcess::Constant(m) => m.norm_sq() * path.horizon(),
            ZProcess::Steps(ms) => ms.iter().map(|m| m.norm_sq() * dt).sum(),
        }
    }
}

#[inline]
fn accumulate(acc: &mut [f64], z: &ZMatrix, path: &SamplePath, k: usize) {
    for (r, a) in acc.iter_mut().enumerate() {
        let mut s = 0.0;
        for c in 0..z.cols {
            s += z.get(r, c) * path.increment(k, c);
        }
        *a += s;
    }
}

/// Left-point sums `x + Σ_{j<k} z_j ΔB_j` for `k = 0..=N`.
pub fn trajectory_integral(integrand: &Integrand, path: &SamplePath) -> Result<Vec<Vector>> {
    integrand.check_grid(path)?;
    let mut acc = integrand.x.coords().to_vec();
    let mut out = Vec::with_capacity(path.steps() + 1);
    out.push(integrand.x.clone());
    for k in 0..path.steps() {
        accumulate(&mut acc, integrand.z.at(k), path, k);
        out.push(Vector::from_vec_unchecked(acc.clone()));
    }
    Ok(out)
}

/// The integral at grid index `step` only.
pub fn integral_at(integrand: &Integrand, path: &SamplePath, step: usize) -> Result<Vector> {
    Ok(integral_checkpoints(integrand, path, &[step])?.remove(0))
}

/// The integral at each of the nondecreasing grid indices `steps`.
pub(crate) fn integral_checkpoints(integrand: &Integrand, path: &SamplePath, steps: &[usize]) -> Result<Vec<Vector>> {
    integrand.check_grid(path)?;
    if steps.windows(2).any(|w| w[1] < w[0]) || steps.last().is_some_and(|&s| s > path.steps()) {
        return Err(Error::MalformedInput("checkpoints must be sorted grid indices".into()));
    }
    let mut acc = integrand.x.coords().to_vec();
    let mut out = Vec::with_capacity(steps.len());
    let mut k = 0;
    for &target in steps {
        while k < target {
            accumulate(&mut acc, integrand.z.at(k), path, k);
            k += 1;
        }
        out.push(Vector::from_vec_unchecked(acc.clone()));
    }
    Ok(out)
}

/// A finite list of integrands, possibly built from the driver path itself.
pub trait IntegrandFamily: Sync {
    /// Dimension `d` of the integrals.
    fn dim(&self) -> usize;

    /// Number of integrands.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The integrands seen by one sample path.
    fn integrands(&self, path: &SamplePath) -> Result<Vec<Integrand>>;

    /// `out[j][i]` is integral `i` at grid index `steps[j]`.
    fn evaluate(&self, path: &SamplePath, steps: &[usize]) -> Result<Vec<Vec<Vector>>> {
        let list = self.integrands(path)?;
        let cols: Vec<Vec<Vector>> =
            list.iter().map(|g| integral_checkpoints(g, path, steps)).collect::<Result<_>>()?;
        Ok((0..steps.len()).map(|j| cols.iter().map(|c| c[j].clone()).collect()).collect())
    }

    /// `Σ_i |x^i|² + ∫|z^i|² ds` for one path.
    fn summability_term(&self, path: &SamplePath) -> Result<f64> {
        Ok(self.integrands(path)?.iter().map(|g| g.x.dot(&g.x) + g.energy(path)).sum())
    }
}

impl IntegrandFamily for Vec<Integrand> {
    fn dim(&self) -> usize {
        self.first().map_or(0, |g| g.x.dim())
    }

    fn len(&self) -> usize {
        Vec::len(self)
    }

    fn integrands(&self, _path: &SamplePath) -> Result<Vec<Integrand>> {
        Ok(self.clone())
    }

    fn evaluate(&self, path: &SamplePath, steps: &[usize]) -> Result<Vec<Vec<Vector>>> {
        let cols: Vec<Vec<Vector>> =
            self.iter().map(|g| integral_checkpoints(g, path, steps)).collect::<Result<_>>()?;
        Ok((0..steps.len()).map(|j| cols.iter().map(|c| c[j].clone()).collect()).collect())
    }
}

/// Integrands whose integrals are the three triangle vertices driven by
/// the discrete stochastic exponentials `η_c` of components `0, 1, 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleFamily {
    pub alpha: f64,
}

impl IntegrandFamily for TriangleFamily {
    fn dim(&self) -> usize {
        2
    }

    fn len(&self) -> usize {
        3
    }

    fn integrands(&self, path: &SamplePath) -> Result<Vec<Integrand>> {
        if path.m() < 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: path.m() });
        }
        let m = path.m();
        let eta: Vec<Vec<f64>> = (0..3).map(|c| stochastic_exponential(path, self.alpha, c)).collect::<Result<_>>()?;
        let a = self.alpha;
        let mut z = [Vec::new(), Vec::new(), Vec::new()];
        for k in 0..path.steps() {
            let (e1, e2, e3) = (eta[0][k], eta[1][k], eta[2][k]);
            let mut rows = [[0.0; 6]; 3];
            rows[0][0] = -a * e1;
            rows[0][4] = -a * e2;
            rows[1][1] = a * e2;
            rows[1][2] = a * e3;
            rows[1][4] = -a * e2;
            rows[2][0] = -a * e1;
            rows[2][3] = a * e1;
            rows[2][5] = a * e3;
            for (i, r) in rows.iter().enumerate() {
                let mut data = vec![0.0; 2 * m];
                data[..3].copy_from_slice(&r[..3]);
                data[m..m + 3].copy_from_slice(&r[3..]);
                z[i].push(ZMatrix::new(2, m, data)?);
            }
        }
        let x0 = triangle_vertices([1.0, 1.0, 1.0]);
        let [z1, z2, z3] = z;
        Ok(vec![
            Integrand { x: x0[0].clone(), z: ZProcess::Steps(z1) },
            Integrand { x: x0[1].clone(), z: ZProcess::Steps(z2) },
            Integrand { x: x0[2].clone(), z: ZProcess::Steps(z3) },
        ])
    }
}

/// Per-sample snapshot of a finite set-valued integral.
#[derive(Debug, Clone, PartialEq)]
pub enum Snapshot {
    Points(Vec<Vector>),
    Hull(Polytope),
}

/// The point set `{J_t(x^i, z^i)}` of every sample at grid index `step`,
/// or its convex hull when `convexify` is set.
pub fn finite_integral_snapshot(
    family: &dyn IntegrandFamily,
    ensemble: &PathEnsemble,
    step: usize,
    convexify: bool,
) -> Result<Vec<Snapshot>> {
    let chunks = map_chunks(ensemble.samples, |r| -> Result<Vec<Snapshot>> {
        r.map(|s| {
            let pts = family.evaluate(&ensemble.path(s), &[step])?.remove(0);
            Ok(if convexify { Snapshot::Hull(Polytope::from_points(pts)?) } else { Snapshot::Points(pts) })
        })
        .collect()
    });
    let mut out = Vec::with_capacity(ensemble.samples);
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}
