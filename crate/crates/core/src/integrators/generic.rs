//! Implicit midpoint integration of finite-dimensional Hamiltonian systems.
//!
//! Coordinates are interleaved `(q1, p1, ..., qn, pn)` with
//! `q' = dH/dp`, `p' = -dH/dq`.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

pub type GradientFn = Arc<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>;
pub type HamiltonianFn = Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>;

/// Affine growth bound `|grad H_t(z)| <= a + b |z|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthCertificate {
    pub a: f64,
    pub b: f64,
}

impl GrowthCertificate {
    pub fn bound(&self, z_norm: f64) -> f64 {
        self.a + self.b * z_norm
    }
}

#[derive(Clone)]
pub struct GenericHamiltonianSystem {
    dim: usize,
    grad: GradientFn,
    value: Option<HamiltonianFn>,
    growth: Option<GrowthCertificate>,
}

impl fmt::Debug for GenericHamiltonianSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GenericHamiltonianSystem")
            .field("dim", &self.dim)
            .field("has_value", &self.value.is_some())
            .field("growth", &self.growth)
            .finish()
    }
}

const PROBES: usize = 256;

fn probe_points(dim: usize, seed: u64) -> Vec<(f64, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..PROBES)
        .map(|k| {
            let radius = 10f64.powf(-1.0 + 4.0 * k as f64 / PROBES as f64);
            let z: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0) * radius).collect();
            (rng.random_range(-2.0..2.0), z)
        })
        .collect()
}

pub(crate) fn norm(z: &[f64]) -> f64 {
    z.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl GenericHamiltonianSystem {
    /// Checks that `dim` is even and the gradient is finite on probe points.
    pub fn new<G>(dim: usize, grad: G) -> Result<Self>
    where
        G: Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        if dim == 0 || dim % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "dimension {dim} is not a positive even number"
            )));
        }
        let grad: GradientFn = Arc::new(grad);
        for (t, z) in probe_points(dim, 0x5eed) {
            let g = grad(t, &z);
            if g.len() != dim {
                return Err(Error::LengthMismatch {
                    expected: dim,
                    found: g.len(),
                });
            }
            if g.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("gradient on probe point"));
            }
        }
        Ok(Self {
            dim,
            grad,
            value: None,
            growth: None,
        })
    }

    pub fn with_value<H>(mut self, value: H) -> Self
    where
        H: Fn(f64, &[f64]) -> f64 + Send + Sync + 'static,
    {
        self.value = Some(Arc::new(value));
        self
    }

    /// Attaches a growth certificate after spot-checking it on samples.
    pub fn with_growth(mut self, cert: GrowthCertificate) -> Result<Self> {
        if !(cert.a >= 0.0 && cert.b >= 0.0) {
            return Err(Error::InvalidArgument("growth constants must be non-negative".into()));
        }
        for (t, z) in probe_points(self.dim, 0xb0b) {
            let g = norm(&(self.grad)(t, &z));
            let bound = cert.bound(norm(&z));
            if g > bound * (1.0 + 1e-12) + 1e-12 {
                return Err(Error::BoundViolation(format!(
                    "|grad H| = {g} exceeds {bound} at |z| = {}",
                    norm(&z)
                )));
            }
        }
        self.growth = Some(cert);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn growth(&self) -> Option<GrowthCertificate> {
        self.growth
    }

    pub fn gradient(&self, t: f64, z: &[f64]) -> Vec<f64> {
        (self.grad)(t, z)
    }

    pub fn hamiltonian(&self, t: f64, z: &[f64]) -> Option<f64> {
        self.value.as_ref().map(|h| h(t, z))
    }

    /// `X_H = J grad H`.
    pub fn vector_field(&self, t: f64, z: &[f64]) -> Vec<f64> {
        let g = self.gradient(t, z);
        let mut x = vec![0.0; self.dim];
        for i in 0..self.dim / 2 {
            x[2 * i] = g[2 * i + 1];
            x[2 * i + 1] = -g[2 * i];
        }
        x
    }
}

/// One step of `z' = z + dt X_H((z + z')/2, t + dt/2)`, solved by fixed point.
pub fn midpoint_step_generic(z: &[f64], t: f64, dt: f64, sys: &GenericHamiltonianSystem) -> Result<Vec<f64>> {
    if z.len() != sys.dim {
        return Err(Error::LengthMismatch {
            expected: sys.dim,
            found: z.len(),
        });
    }
    let tm = t + 0.5 * dt;
    let tol = 1e-14 * (1.0 + norm(z));
    let mut next: Vec<f64> = {
        let x = sys.vector_field(t, z);
        z.iter().zip(&x).map(|(a, b)| a + dt * b).collect()
    };
    let mut mid = vec![0.0; z.len()];
    let mut prev_change = f64::INFINITY;
    let mut contraction: f64 = 0.0;
    for _ in 0..100 {
        for ((m, a), b) in mid.iter_mut().zip(z).zip(&next) {
            *m = 0.5 * (a + b);
        }
        let x = sys.vector_field(tm, &mid);
        let mut change: f64 = 0.0;
        for ((n, a), v) in next.iter_mut().zip(z).zip(&x) {
            let cand = a + dt * v;
            change = change.max((cand - *n).abs());
            *n = cand;
        }
        if !change.is_finite() {
            return Err(Error::NonFinite("midpoint stage"));
        }
        if converged(change, prev_change, tol) {
            return Ok(next);
        }
        if prev_change.is_finite() && prev_change > 0.0 {
            contraction = contraction.max(change / prev_change);
        }
        prev_change = change;
    }
    Err(Error::NonConvergence {
        what: "implicit midpoint stage",
        iterations: 100,
        contraction,
    })
}

/// Below `tol`, or stalled at a noise floor far under any useful accuracy
/// (vector fields built from inner numerical flows are only smooth to ~1e-10).
fn converged(change: f64, prev_change: f64, tol: f64) -> bool {
    change <= tol || (change >= 0.5 * prev_change && change <= 1e4 * tol)
}

/// Butcher data of the `s`-stage Gauss–Legendre collocation method (order `2s`).
/// One stage is the implicit midpoint rule.
#[derive(Debug, Clone)]
pub struct GaussCollocation {
    c: Vec<f64>,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
}

impl GaussCollocation {
    pub fn new(stages: usize) -> Self {
        let rule = GaussLegendre::new(stages);
        let (c, b) = rule.unit_nodes();
        Self {
            a: rule.integration_matrix(),
            c,
            b,
        }
    }

    pub fn stages(&self) -> usize {
        self.c.len()
    }

    /// One step; stages solved by fixed-point iteration.
    pub fn step(&self, z: &[f64], t: f64, dt: f64, sys: &GenericHamiltonianSystem) -> Result<Vec<f64>> {
        if z.len() != sys.dim {
            return Err(Error::LengthMismatch {
                expected: sys.dim,
                found: z.len(),
            });
        }
        let s = self.stages();
        let d = z.len();
        let x0 = sys.vector_field(t, z);
        let mut k: Vec<Vec<f64>> = vec![x0; s];
        let tol = 1e-14 * (1.0 + norm(z));
        let mut prev_change = f64::INFINITY;
        let mut contraction: f64 = 0.0;
        let mut y = vec![0.0; d];
        for _ in 0..100 {
            let mut change: f64 = 0.0;
            let mut next = Vec::with_capacity(s);
            for i in 0..s {
                for (l, yl) in y.iter_mut().enumerate() {
                    *yl = z[l] + dt * (0..s).map(|j| self.a[i][j] * k[j][l]).sum::<f64>();
                }
                let ki = sys.vector_field(t + self.c[i] * dt, &y);
                for (new, old) in ki.iter().zip(&k[i]) {
                    change = change.max(dt.abs() * (new - old).abs());
                }
                next.push(ki);
            }
            k = next;
            if !change.is_finite() {
                return Err(Error::NonFinite("collocation stage"));
            }
            if converged(change, prev_change, tol) {
                return Ok((0..d)
                    .map(|l| z[l] + dt * (0..s).map(|j| self.b[j] * k[j][l]).sum::<f64>())
                    .collect());
            }
            if prev_change.is_finite() && prev_change > 0.0 {
                contraction = contraction.max(change / prev_change);
            }
            prev_change = change;
        }
        Err(Error::NonConvergence {
            what: "collocation stages",
            iterations: 100,
            contraction,
        })
    }

    /// Flow from `t0` to `t1` in equal steps no longer than `max_dt`. Equal
    /// steps make the backward run the exact mirror of the forward one.
    pub fn flow(&self, z0: &[f64], t0: f64, t1: f64, max_dt: f64, sys: &GenericHamiltonianSystem) -> Result<Vec<f64>> {
        if !(max_dt > 0.0 && max_dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt = {max_dt} must be positive")));
        }
        let span = t1 - t0;
        let steps = (span.abs() / max_dt).ceil() as usize;
        let mut z = z0.to_vec();
        if steps == 0 {
            return Ok(z);
        }
        let h = span / steps as f64;
        for i in 0..steps {
            z = self.step(&z, t0 + i as f64 * h, h, sys)?;
        }
        Ok(z)
    }
}

fn step_sizes(t0: f64, t1: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt = {dt} must be positive")));
    }
    if !(t0.is_finite() && t1.is_finite()) {
        return Err(Error::NonFinite("time window"));
    }
    let span = t1 - t0;
    let sign = span.signum();
    let full = (span.abs() / dt * (1.0 + 1e-12)).floor() as usize;
    let rem = span.abs() - full as f64 * dt;
    let mut steps = vec![sign * dt; full];
    if rem > 1e-12 * dt.max(span.abs()) {
        steps.push(sign * rem);
    }
    Ok(steps)
}

/// Endpoint of the midpoint flow from `t0` to `t1`; `t1 < t0` runs backwards.
pub fn flow_generic(z0: &[f64], t0: f64, t1: f64, dt: f64, sys: &GenericHamiltonianSystem) -> Result<Vec<f64>> {
    let mut z = z0.to_vec();
    let mut t = t0;
    for h in step_sizes(t0, t1, dt)? {
        z = midpoint_step_generic(&z, t, h, sys)?;
        t += h;
    }
    Ok(z)
}

/// Like [`flow_generic`] but keeps every state.
pub fn trajectory_generic(
    z0: &[f64],
    t0: f64,
    t1: f64,
    dt: f64,
    sys: &GenericHamiltonianSystem,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let steps = step_sizes(t0, t1, dt)?;
    let mut times = vec![t0];
    let mut states = vec![z0.to_vec()];
    let mut t = t0;
    for (k, h) in steps.iter().enumerate() {
        let z = midpoint_step_generic(states.last().expect("non-empty"), t, *h, sys)?;
        t = if k + 1 == steps.len() { t1 } else { t + h };
        times.push(t);
        states.push(z);
    }
    Ok((times, states))
}

/// Central-difference Jacobian, one column per coordinate.
pub fn jacobian_fd<F>(mut f: F, z: &[f64], h: f64) -> Result<DMatrix<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("fd step {h} must be positive")));
    }
    let mut cols = Vec::with_capacity(z.len());
    let mut zp = z.to_vec();
    let mut rows = None;
    for i in 0..z.len() {
        zp[i] = z[i] + h;
        let fp = f(&zp)?;
        zp[i] = z[i] - h;
        let fm = f(&zp)?;
        zp[i] = z[i];
        if fp.len() != fm.len() || rows.is_some_and(|r| r != fp.len()) {
            return Err(Error::LengthMismatch {
                expected: rows.unwrap_or(fm.len()),
                found: fp.len(),
            });
        }
        rows = Some(fp.len());
        cols.push(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<_>>());
    }
    let r = rows.unwrap_or(0);
    Ok(DMatrix::from_fn(r, z.len(), |i, j| cols[j][i]))
}

/// Matrix of the canonical form in interleaved coordinates.
pub fn canonical_omega(dim: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim / 2 {
        m[(2 * i, 2 * i + 1)] = 1.0;
        m[(2 * i + 1, 2 * i)] = -1.0;
    }
    m
}

/// `max |D^T Omega D - Omega|`, relative to `max |Omega| = 1`.
pub fn symplectic_defect(d: &DMatrix<f64>) -> f64 {
    let omega = canonical_omega(d.nrows());
    let lhs = d.transpose() * &omega * d;
    (lhs - &omega).amax()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn oscillator() -> GenericHamiltonianSystem {
        GenericHamiltonianSystem::new(2, |_, z| z.to_vec())
            .unwrap()
            .with_value(|_, z| 0.5 * (z[0] * z[0] + z[1] * z[1]))
    }

    #[test]
    fn midpoint_examples() {
        let zero = GenericHamiltonianSystem::new(4, |_, _| vec![0.0; 4]).unwrap();
        let z = [0.1, -0.2, 0.3, 0.4];
        assert_eq!(midpoint_step_generic(&z, 0.0, 0.5, &zero).unwrap(), z.to_vec());

        let translation = GenericHamiltonianSystem::new(2, |_, _| vec![0.0, 1.0]).unwrap();
        let out = midpoint_step_generic(&[1.0, 2.0], 0.0, 0.25, &translation).unwrap();
        assert_eq!(out, vec![1.25, 2.0]);

        let dt = 0.3;
        let s = 1.0 + dt * dt / 4.0;
        let c = 1.0 - dt * dt / 4.0;
        let out = midpoint_step_generic(&[0.7, -0.4], 0.0, dt, &oscillator()).unwrap();
        assert_abs_diff_eq!(out[0], (c * 0.7 + dt * -0.4) / s, epsilon = 1e-14);
        assert_abs_diff_eq!(out[1], (-dt * 0.7 + c * -0.4) / s, epsilon = 1e-14);
    }

    #[test]
    fn quadratic_energy_is_conserved_and_flow_reverses() {
        let sys = oscillator();
        let z0 = [0.3, 0.9];
        let z1 = flow_generic(&z0, 0.0, 3.0, 0.07, &sys).unwrap();
        let h0 = sys.hamiltonian(0.0, &z0).unwrap();
        assert_abs_diff_eq!(sys.hamiltonian(3.0, &z1).unwrap(), h0, epsilon = 1e-13);
        let back = flow_generic(&z1, 3.0, 0.0, 0.07, &sys).unwrap();
        assert_abs_diff_eq!(back[0], z0[0], epsilon = 1e-12);
        assert_abs_diff_eq!(back[1], z0[1], epsilon = 1e-12);

        let (times, states) = trajectory_generic(&z0, 0.0, 1.0, 0.3, &sys).unwrap();
        assert_eq!(times.len(), 5);
        assert_eq!(*times.last().unwrap(), 1.0);
        assert_eq!(states.len(), 5);
    }

    #[test]
    fn jacobian_examples() {
        let id = jacobian_fd(|z| Ok(z.to_vec()), &[1.0, 2.0, 3.0], 1e-4).unwrap();
        assert!((id - DMatrix::identity(3, 3)).amax() < 1e-10);

        let l = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, -3.0, 0.5]);
        let lc = l.clone();
        let d = jacobian_fd(
            move |z| Ok((&lc * DMatrix::from_column_slice(2, 1, z)).iter().copied().collect()),
            &[0.3, -0.2],
            1e-3,
        )
        .unwrap();
        assert!((d - l).amax() < 1e-12);
    }

    #[test]
    fn midpoint_is_symplectic_on_nonlinear_system() {
        // H = 1/2 p1^2 + 1/2 p2^2 + cos q1 * q2^2 / 2
        let sys = GenericHamiltonianSystem::new(4, |_, z| {
            vec![-z[0].sin() * z[2] * z[2] * 0.5, z[1], z[0].cos() * z[2], z[3]]
        })
        .unwrap();
        let z = [0.4, -0.3, 0.8, 0.2];
        let d = jacobian_fd(|w| midpoint_step_generic(w, 0.0, 0.1, &sys), &z, 1e-5).unwrap();
        assert!(symplectic_defect(&d) < 1e-8, "{}", symplectic_defect(&d));
    }

    #[test]
    fn gauss_collocation_orders() {
        let sys = oscillator();
        let z0 = [0.3, 0.9];
        let exact = |t: f64| [0.3 * t.cos() + 0.9 * t.sin(), -0.3 * t.sin() + 0.9 * t.cos()];
        let mid = GaussCollocation::new(1);
        let one = mid.step(&z0, 0.0, 0.2, &sys).unwrap();
        let reference = midpoint_step_generic(&z0, 0.0, 0.2, &sys).unwrap();
        assert!((one[0] - reference[0]).abs() < 1e-15 && (one[1] - reference[1]).abs() < 1e-15);
        let g3 = GaussCollocation::new(3);
        let err = |dt: f64| {
            let z = g3.flow(&z0, 0.0, 2.0, dt, &sys).unwrap();
            let e = exact(2.0);
            (z[0] - e[0]).hypot(z[1] - e[1])
        };
        let (e1, e2) = (err(0.2), err(0.1));
        assert!(e1 < 1e-7 && e2 < e1 / 40.0, "{e1} {e2}");
        let back = g3
            .flow(&g3.flow(&z0, 0.0, 1.3, 0.1, &sys).unwrap(), 1.3, 0.0, 0.1, &sys)
            .unwrap();
        assert!((back[0] - z0[0]).abs() < 1e-14 && (back[1] - z0[1]).abs() < 1e-14);
    }

    #[test]
    fn growth_certificate_is_checked() {
        let sys = oscillator();
        assert!(sys.clone().with_growth(GrowthCertificate { a: 0.0, b: 1.0 }).is_ok());
        assert!(sys.with_growth(GrowthCertificate { a: 1.0, b: 0.5 }).is_err());
        assert!(GenericHamiltonianSystem::new(3, |_, z| z.to_vec()).is_err());
        assert!(GenericHamiltonianSystem::new(2, |_, _| vec![f64::NAN, 0.0]).is_err());
    }
}
