//! A priori bounds on camel points for Hamiltonians with affine gradient
//! growth, and the radial cutoff that turns such a Hamiltonian into a
//! compactly supported one.

use serde::{Deserialize, Serialize};

use super::points::CamelPointSet;
use crate::error::{Error, Result};
use crate::integrators::generic::norm;
use crate::integrators::{trajectory_generic, GenericHamiltonianSystem, GrowthCertificate};

/// `(r + A/B) / (2 - e^{B|t|})`, or `+inf` once `e^{B|t|} >= 2`.
pub fn camel_radius_bound(r: f64, cert: GrowthCertificate, t: f64) -> f64 {
    let grow = (cert.b * t.abs()).exp();
    if grow >= 2.0 {
        f64::INFINITY
    } else {
        (r + cert.a / cert.b) / (2.0 - grow)
    }
}

/// `ln 2 / (3B)`: the time window in which the cutoff argument applies.
pub fn time_limit(b: f64) -> f64 {
    std::f64::consts::LN_2 / (3.0 * b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CamelBoundReport {
    pub r: f64,
    pub a: f64,
    pub b: f64,
    pub t: f64,
    pub bound: f64,
    pub time_limit: f64,
    pub in_regime: bool,
    pub points_checked: usize,
    pub max_norm: f64,
    /// `(index, |z|)` of camel points above `bound * (1 + slack)`.
    pub violations: Vec<(usize, f64)>,
    /// Trajectory states breaking either Gronwall envelope.
    pub envelope_violations: usize,
    /// Largest `|psi_s(z) - z| / ((e^{Bs} - 1)(|z| + A/B))` seen.
    pub max_envelope_ratio: f64,
}

impl CamelBoundReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.envelope_violations == 0
    }
}

/// Checks every camel point against the radius bound and every camel
/// trajectory (midpoint rule, step `dt`) against the Gronwall envelopes.
pub fn camel_bound_check(
    sys: &GenericHamiltonianSystem,
    r: f64,
    t: f64,
    pts: &CamelPointSet,
    dt: f64,
    slack: f64,
) -> Result<CamelBoundReport> {
    let cert = sys
        .growth()
        .ok_or_else(|| Error::InvalidArgument("system carries no growth certificate".into()))?;
    if !(cert.b > 0.0) {
        return Err(Error::InvalidArgument("bound needs B > 0".into()));
    }
    let bound = camel_radius_bound(r, cert, t);
    let offset = cert.a / cert.b;
    let mut violations = Vec::new();
    let mut envelope_violations = 0;
    let mut max_norm: f64 = 0.0;
    let mut max_ratio: f64 = 0.0;
    for (i, z) in pts.points.iter().enumerate() {
        let zn = norm(z);
        max_norm = max_norm.max(zn);
        if zn > bound * (1.0 + slack) {
            violations.push((i, zn));
        }
        let (times, states) = trajectory_generic(z, 0.0, t, dt, sys)?;
        for (s, w) in times.iter().zip(&states).skip(1) {
            let grow = (cert.b * s.abs()).exp();
            let size_env = grow * (zn + offset) - offset;
            let moved: f64 = w.iter().zip(z).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let move_env = (grow - 1.0) * (zn + offset);
            if norm(w) > size_env * (1.0 + slack) || moved > move_env * (1.0 + slack) {
                envelope_violations += 1;
            }
            if move_env > 0.0 {
                max_ratio = max_ratio.max(moved / move_env);
            }
        }
    }
    Ok(CamelBoundReport {
        r,
        a: cert.a,
        b: cert.b,
        t,
        bound,
        time_limit: time_limit(cert.b),
        in_regime: t.abs() < time_limit(cert.b),
        points_checked: pts.len(),
        max_norm,
        violations,
        envelope_violations,
        max_envelope_ratio: max_ratio,
    })
}

/// Quintic smoothstep: `1` on `[0, R]`, `0` on `[2R, inf)`.
pub fn cutoff_profile(s: f64, big_r: f64) -> f64 {
    let x = ((s - big_r) / big_r).clamp(0.0, 1.0);
    1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x)
}

pub fn cutoff_profile_derivative(s: f64, big_r: f64) -> f64 {
    let x = (s - big_r) / big_r;
    if !(0.0..=1.0).contains(&x) {
        return 0.0;
    }
    -30.0 * x * x * (1.0 - x) * (1.0 - x) / big_r
}

/// Sup of `|chi'|`, attained at `s = 3R/2`.
pub fn cutoff_slope_max(big_r: f64) -> f64 {
    15.0 / (8.0 * big_r)
}

/// `G_t(z) = chi(|z|) (H_t(z) - H_t(0))`. Subtracting `H_t(0)` leaves the
/// flow inside `B(0, R)` unchanged. A certificate `(A, B)` on `H` becomes
/// `(5A, 3B)` on `G`, spot-checked on attachment.
pub fn cutoff_hamiltonian(sys: &GenericHamiltonianSystem, big_r: f64) -> Result<GenericHamiltonianSystem> {
    if !(big_r > 0.0 && big_r.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "cutoff radius {big_r} must be positive"
        )));
    }
    if sys.hamiltonian(0.0, &vec![0.0; sys.dim()]).is_none() {
        return Err(Error::InvalidArgument(
            "cutoff needs Hamiltonian values, not only gradients".into(),
        ));
    }
    if cutoff_slope_max(big_r) > 2.0 / big_r {
        return Err(Error::BoundViolation("cutoff slope exceeds 2/R".into()));
    }
    let dim = sys.dim();
    let value_sys = sys.clone();
    let grad_sys = sys.clone();
    let shifted = move |s: &GenericHamiltonianSystem, t: f64, z: &[f64]| -> f64 {
        s.hamiltonian(t, z).unwrap_or(0.0) - s.hamiltonian(t, &vec![0.0; z.len()]).unwrap_or(0.0)
    };
    let grad = move |t: f64, z: &[f64]| -> Vec<f64> {
        let zn = norm(z);
        if zn >= 2.0 * big_r {
            return vec![0.0; z.len()];
        }
        let chi = cutoff_profile(zn, big_r);
        let mut g: Vec<f64> = grad_sys.gradient(t, z).iter().map(|x| chi * x).collect();
        let dchi = cutoff_profile_derivative(zn, big_r);
        if dchi != 0.0 {
            let h = shifted(&grad_sys, t, z);
            for (gi, zi) in g.iter_mut().zip(z) {
                *gi += dchi * h * zi / zn;
            }
        }
        g
    };
    let out = GenericHamiltonianSystem::new(dim, grad)?
        .with_value(move |t, z| cutoff_profile(norm(z), big_r) * shifted(&value_sys, t, z));
    match sys.growth() {
        Some(c) => out.with_growth(GrowthCertificate {
            a: 5.0 * c.a,
            b: 3.0 * c.b,
        }),
        None => Ok(out),
    }
}
