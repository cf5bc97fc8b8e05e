//! Composition `H # K` (flow `phi^H_t o phi^K_t`) and inverse `H-bar`
//! (flow `(phi^H_t)^{-1}`) of Hamiltonians given only by their gradients.
//!
//! Vector fields are built from inner flows:
//!
//! ```text
//! X_{H#K}(t, z) = X_H(t, z) + D phi_t(w) X_K(t, w),     w = phi_t^{-1}(z)
//! X_{Hbar}(t, z) = -D(phi_t^{-1})(y) X_H(t, y),         y = phi_t(z)
//! ```
//!
//! with `phi = phi^H`. Inner flows use 3-stage Gauss collocation; the
//! directional derivatives are central differences along the unit direction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrators::generic::norm;
use crate::integrators::{flow_generic, GaussCollocation, GenericHamiltonianSystem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgebraOptions {
    /// Largest inner step.
    pub inner_dt: f64,
    /// Finite-difference step, scaled by `1 + |w|`.
    pub fd_step: f64,
}

impl Default for AlgebraOptions {
    fn default() -> Self {
        Self {
            inner_dt: 0.1,
            fd_step: 1e-5,
        }
    }
}

#[derive(Clone)]
struct InnerFlow {
    sys: GenericHamiltonianSystem,
    rule: GaussCollocation,
    dt: f64,
}

impl InnerFlow {
    fn new(sys: &GenericHamiltonianSystem, opts: &AlgebraOptions) -> Result<Self> {
        if !(opts.inner_dt > 0.0 && opts.fd_step > 0.0) {
            return Err(Error::InvalidArgument("inner step and fd step must be positive".into()));
        }
        Ok(Self {
            sys: sys.clone(),
            rule: GaussCollocation::new(3),
            dt: opts.inner_dt,
        })
    }

    fn run(&self, z: &[f64], t0: f64, t1: f64) -> Result<Vec<f64>> {
        self.rule.flow(z, t0, t1, self.dt, &self.sys)
    }

    /// `D(flow t0 -> t1)(w) v`.
    fn push_forward(&self, w: &[f64], v: &[f64], t0: f64, t1: f64, fd: f64) -> Result<Vec<f64>> {
        let vn = norm(v);
        if vn == 0.0 {
            return Ok(vec![0.0; v.len()]);
        }
        let h = fd * (1.0 + norm(w));
        let shift = |s: f64| -> Vec<f64> { w.iter().zip(v).map(|(a, b)| a + s * h * b / vn).collect() };
        let plus = self.run(&shift(1.0), t0, t1)?;
        let minus = self.run(&shift(-1.0), t0, t1)?;
        Ok(plus.iter().zip(&minus).map(|(p, m)| vn * (p - m) / (2.0 * h)).collect())
    }
}

/// `grad = -J X`.
fn gradient_of_field(x: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    for i in 0..x.len() / 2 {
        g[2 * i] = -x[2 * i + 1];
        g[2 * i + 1] = x[2 * i];
    }
    g
}

fn or_nan(r: Result<Vec<f64>>, dim: usize) -> Vec<f64> {
    r.unwrap_or_else(|_| vec![f64::NAN; dim])
}

/// The Hamiltonian generating `phi^H_t o phi^K_t`. Values, when both inputs
/// carry them, are `H + K o (phi^H_t)^{-1}`.
pub fn compose_hamiltonians(
    h: &GenericHamiltonianSystem,
    k: &GenericHamiltonianSystem,
    opts: &AlgebraOptions,
) -> Result<GenericHamiltonianSystem> {
    if h.dim() != k.dim() {
        return Err(Error::LengthMismatch {
            expected: h.dim(),
            found: k.dim(),
        });
    }
    let dim = h.dim();
    let inner = InnerFlow::new(h, opts)?;
    let (hs, ks, fd) = (h.clone(), k.clone(), opts.fd_step);
    let field = inner.clone();
    let out = GenericHamiltonianSystem::new(dim, move |t, z| {
        let x = (|| -> Result<Vec<f64>> {
            let w = field.run(z, t, 0.0)?;
            let pushed = field.push_forward(&w, &ks.vector_field(t, &w), 0.0, t, fd)?;
            Ok(hs.vector_field(t, z).iter().zip(&pushed).map(|(a, b)| a + b).collect())
        })();
        gradient_of_field(&or_nan(x, dim))
    })?;
    if h.hamiltonian(0.0, &vec![0.0; dim]).is_some() && k.hamiltonian(0.0, &vec![0.0; dim]).is_some() {
        let (hs, ks) = (h.clone(), k.clone());
        Ok(out.with_value(move |t, z| match inner.run(z, t, 0.0) {
            Ok(w) => hs.hamiltonian(t, z).unwrap_or(f64::NAN) + ks.hamiltonian(t, &w).unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        }))
    } else {
        Ok(out)
    }
}

/// The Hamiltonian generating `(phi^H_t)^{-1}`; values are `-H o phi^H_t`.
pub fn invert_hamiltonian(h: &GenericHamiltonianSystem, opts: &AlgebraOptions) -> Result<GenericHamiltonianSystem> {
    let dim = h.dim();
    let inner = InnerFlow::new(h, opts)?;
    let (hs, fd) = (h.clone(), opts.fd_step);
    let field = inner.clone();
    let out = GenericHamiltonianSystem::new(dim, move |t, z| {
        let x = (|| -> Result<Vec<f64>> {
            let y = field.run(z, 0.0, t)?;
            let back = field.push_forward(&y, &hs.vector_field(t, &y), t, 0.0, fd)?;
            Ok(back.iter().map(|v| -v).collect())
        })();
        gradient_of_field(&or_nan(x, dim))
    })?;
    if h.hamiltonian(0.0, &vec![0.0; dim]).is_some() {
        let hs = h.clone();
        Ok(out.with_value(move |t, z| match inner.run(z, 0.0, t) {
            Ok(y) => -hs.hamiltonian(t, &y).unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        }))
    } else {
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraReport {
    pub t: f64,
    pub dt: f64,
    pub points: usize,
    /// `max |phi^{H#K}_t(z) - phi^H_t(phi^K_t(z))|`.
    pub composition_error: f64,
    /// `max |phi^{Hbar}_t(phi^H_t(z)) - z|`.
    pub inverse_error: f64,
}

/// Runs every flow with the midpoint rule at step `dt` from time `0` to `t`.
pub fn verify_algebra(
    h: &GenericHamiltonianSystem,
    k: &GenericHamiltonianSystem,
    points: &[Vec<f64>],
    t: f64,
    dt: f64,
    opts: &AlgebraOptions,
) -> Result<AlgebraReport> {
    let hk = compose_hamiltonians(h, k, opts)?;
    let hbar = invert_hamiltonian(h, opts)?;
    let gap = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let mut composition_error: f64 = 0.0;
    let mut inverse_error: f64 = 0.0;
    for z in points {
        let lhs = flow_generic(z, 0.0, t, dt, &hk)?;
        let rhs = flow_generic(&flow_generic(z, 0.0, t, dt, k)?, 0.0, t, dt, h)?;
        composition_error = composition_error.max(gap(&lhs, &rhs));
        let back = flow_generic(&flow_generic(z, 0.0, t, dt, h)?, 0.0, t, dt, &hbar)?;
        inverse_error = inverse_error.max(gap(&back, z));
    }
    Ok(AlgebraReport {
        t,
        dt,
        points: points.len(),
        composition_error,
        inverse_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation(omega: f64) -> GenericHamiltonianSystem {
        GenericHamiltonianSystem::new(2, move |_, z| vec![omega * z[0], omega * z[1]])
            .unwrap()
            .with_value(move |_, z| 0.5 * omega * (z[0] * z[0] + z[1] * z[1]))
    }

    #[test]
    fn commuting_rotations_add() {
        let hk = compose_hamiltonians(&rotation(1.0), &rotation(0.5), &AlgebraOptions::default()).unwrap();
        let z = [0.3, -0.7];
        let g = hk.gradient(0.4, &z);
        assert!((g[0] - 1.5 * 0.3).abs() < 1e-8 && (g[1] + 1.5 * 0.7).abs() < 1e-8);
        assert!((hk.hamiltonian(0.4, &z).unwrap() - 0.75 * 0.58).abs() < 1e-10);
    }

    #[test]
    fn inverse_of_autonomous_is_negation() {
        let hbar = invert_hamiltonian(&rotation(2.0), &AlgebraOptions::default()).unwrap();
        let z = [1.1, 0.2];
        let g = hbar.gradient(0.7, &z);
        assert!((g[0] + 2.2).abs() < 1e-8 && (g[1] + 0.4).abs() < 1e-8);
        assert!((hbar.hamiltonian(0.7, &z).unwrap() + 1.25).abs() < 1e-10);
    }
}
