//! The nonlinear data `f(t, x, u)` of the string equation `u_tt = u_xx - f`,
//! its potential and the pseudo-spectral gradients `grad h_t`, `grad h_n`.
//!
//! Sign convention: with `J(a, b) = (b, -a)` and `grad h = (B^{-1} f, 0)` the
//! vector field `JAu + J grad h` reproduces `v' = (B - B^{-1})u + B^{-1} f`
//! only if `h(u) = +(1/2pi) int F(t, x, u(x)) dx`. That is the sign used by
//! [`h_value`]; it makes the finite-difference derivative of `h` agree with
//! [`grad_h`] and `1/2 <Au,u> + h` the conserved energy.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linear::{apply_diag, lambda, DiagOp};
use crate::phase_space::{check_grid, from_grid, to_grid, GridFunction, PhaseVector, Region};
use crate::quadrature::GaussLegendre;

pub type ScalarField = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    SineGordon,
    Zero,
    CustomBounded,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::SineGordon => "sine-gordon",
            Family::Zero => "zero",
            Family::CustomBounded => "custom",
        })
    }
}

/// `f(t, x, u)` with a certified sup bound `|f| <= c0`.
#[derive(Clone)]
pub struct NonlinearitySpec {
    family: Family,
    c0: f64,
    f: ScalarField,
    potential: Option<ScalarField>,
    /// Optional higher growth constants `(C_k, M_k)`, informational.
    pub growth_constants: Vec<(f64, f64)>,
}

impl fmt::Debug for NonlinearitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonlinearitySpec")
            .field("family", &self.family)
            .field("c0", &self.c0)
            .finish_non_exhaustive()
    }
}

const PROBES: usize = 4096;

impl NonlinearitySpec {
    /// `f = sin u`.
    pub fn sine_gordon() -> Self {
        Self {
            family: Family::SineGordon,
            c0: 1.0,
            f: Arc::new(|_, _, u: f64| u.sin()),
            potential: Some(Arc::new(|_, _, u: f64| 1.0 - u.cos())),
            growth_constants: vec![(1.0, 0.0), (1.0, 0.0)],
        }
    }

    pub fn zero() -> Self {
        Self {
            family: Family::Zero,
            c0: 0.0,
            f: Arc::new(|_, _, _| 0.0),
            potential: Some(Arc::new(|_, _, _| 0.0)),
            growth_constants: Vec::new(),
        }
    }

    /// A user-supplied bounded nonlinearity. The declared bound is spot-checked
    /// on random probes `(t, x, u)` and the spec is rejected on a violation.
    pub fn custom<F>(f: F, c0: f64) -> Result<Self>
    where
        F: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    {
        if !(c0.is_finite() && c0 >= 0.0) {
            return Err(Error::InvalidArgument(format!("bound C0 = {c0}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);
        for _ in 0..PROBES {
            let t = rng.random_range(-10.0..10.0);
            let x = rng.random_range(0.0..2.0 * PI);
            let u = rng.random_range(-50.0..50.0) * rng.random::<f64>().powi(2);
            let val = f(t, x, u);
            if !val.is_finite() || val.abs() > c0 * (1.0 + 1e-12) {
                return Err(Error::BoundViolation(format!(
                    "|f({t}, {x}, {u})| = {} exceeds C0 = {c0}",
                    val.abs()
                )));
            }
        }
        Ok(Self {
            family: Family::CustomBounded,
            c0,
            f: Arc::new(f),
            potential: None,
            growth_constants: Vec::new(),
        })
    }

    /// Attaches a closed-form potential `F = int_0^u f`.
    pub fn with_potential<F>(mut self, potential: F) -> Self
    where
        F: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    {
        self.potential = Some(Arc::new(potential));
        self
    }

    /// Parses the names accepted on the command line.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "sine-gordon" | "sine_gordon" => Ok(Self::sine_gordon()),
            "zero" => Ok(Self::zero()),
            other => Err(Error::Parse(format!(
                "unknown nonlinearity `{other}` (expected `sine-gordon` or `zero`)"
            ))),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn is_zero(&self) -> bool {
        self.family == Family::Zero
    }

    #[inline]
    pub fn eval(&self, t: f64, x: f64, u: f64) -> f64 {
        (self.f)(t, x, u)
    }

    /// `F(t, x, u) = int_0^u f(t, x, s) ds`.
    pub fn potential(&self, t: f64, x: f64, u: f64) -> f64 {
        match &self.potential {
            Some(p) => p(t, x, u),
            None => {
                let rule = GaussLegendre::new(16);
                let panels = (u.abs().ceil() as usize).max(1);
                let h = u / panels as f64;
                (0..panels)
                    .map(|k| {
                        let lo = k as f64 * h;
                        rule.integrate(lo, lo + h, |s| self.eval(t, x, s))
                    })
                    .sum()
            }
        }
    }
}

fn apply_pointwise(spec: &NonlinearitySpec, t: f64, grid: &GridFunction) -> GridFunction {
    let u = grid.points().zip(&grid.u).map(|(x, &u)| spec.eval(t, x, u)).collect();
    GridFunction {
        u,
        v: vec![0.0; grid.len()],
    }
}

/// `grad h_t(u) = (B^{-1} f(t, x, u(x)), 0)` evaluated pseudo-spectrally on
/// `m` points and truncated to the order of `u`.
pub fn grad_h(spec: &NonlinearitySpec, t: f64, u: &PhaseVector, m: usize) -> Result<PhaseVector> {
    let n = u.order();
    check_grid(m, n)?;
    if spec.is_zero() {
        return Ok(PhaseVector::zeros(n));
    }
    let grid = to_grid(u, m)?;
    let fx = apply_pointwise(spec, t, &grid);
    let coeffs = from_grid(&fx, n)?;
    Ok(apply_diag(DiagOp::BInv, &coeffs))
}

/// `grad h_n(u) = Pi_n grad h_t(Pi_n u)`, returned in the order of `u`.
///
/// Only the projected state enters the grid evaluation, so `m` has to satisfy
/// the grid rule for `n` rather than for the order of `u`.
pub fn grad_h_trunc(spec: &NonlinearitySpec, t: f64, u: &PhaseVector, n: usize, m: usize) -> Result<PhaseVector> {
    if n > u.order() {
        return Err(Error::OutOfRange {
            what: "Galerkin index",
            detail: format!("{n} > order {}", u.order()),
        });
    }
    let low = u.resized(n);
    Ok(grad_h(spec, t, &low, m)?.resized(u.order()))
}

/// `h_t(u) = (1/2pi) int F(t, x, u(x)) dx` by the trapezoid rule on `m` points.
pub fn h_value(spec: &NonlinearitySpec, t: f64, u: &PhaseVector, m: usize) -> Result<f64> {
    check_grid(m, u.order())?;
    if spec.is_zero() {
        return Ok(0.0);
    }
    let grid = to_grid(u, m)?;
    let total: f64 = grid
        .points()
        .zip(&grid.u)
        .map(|(x, &ux)| spec.potential(t, x, ux))
        .sum();
    Ok(total / m as f64)
}

/// `h_n(u) = h_t(Pi_n u)`.
pub fn h_value_trunc(spec: &NonlinearitySpec, t: f64, u: &PhaseVector, n: usize, m: usize) -> Result<f64> {
    let low = u.project(Region::Low(n))?.resized(n);
    h_value(spec, t, &low, m)
}

/// `1/2 <Au, u> + h_n(u)`, conserved by the truncated flow for autonomous `f`.
pub fn total_energy(spec: &NonlinearitySpec, t: f64, u: &PhaseVector, n: usize, m: usize) -> Result<f64> {
    Ok(crate::linear::quadratic_energy(u) + h_value_trunc(spec, t, u, n, m)?)
}

/// `lambda_j^{-1/2}` weight linking E-coefficients to trigonometric amplitudes.
pub fn basis_weight(j: i64) -> f64 {
    lambda(j).sqrt().recip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn smooth_state(order: usize, scale: f64, seed: u64) -> PhaseVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = 2 * order + 1;
        let mut a = Vec::with_capacity(k);
        let mut b = Vec::with_capacity(k);
        for j in -(order as i64)..=order as i64 {
            let w = scale / lambda(j);
            a.push(w * rng.random_range(-1.0..1.0));
            b.push(w * rng.random_range(-1.0..1.0));
        }
        PhaseVector::new(order, a, b).unwrap()
    }

    fn constant_state(order: usize, value: f64) -> PhaseVector {
        // phi_0 = 1 and lambda_0 = 1, so a_0 is the constant itself.
        let mut u = PhaseVector::zeros(order);
        u.coeffs_mut().0[order] = value;
        u
    }

    #[test]
    fn zero_state_has_zero_gradient() {
        let g = grad_h(&NonlinearitySpec::sine_gordon(), 0.3, &PhaseVector::zeros(4), 32).unwrap();
        assert_eq!(g.e_norm(), 0.0);
    }

    #[test]
    fn constant_half_pi_state() {
        let u = constant_state(3, FRAC_PI_2);
        let g = grad_h(&NonlinearitySpec::sine_gordon(), 0.0, &u, 16).unwrap();
        assert_abs_diff_eq!(g.a(0), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g.e_norm(), 1.0, epsilon = 1e-14);
        assert!(g.b_coeffs().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn gradient_bound_sine_gordon() {
        let spec = NonlinearitySpec::sine_gordon();
        for seed in 0..50 {
            let u = smooth_state(12, 3.0, seed);
            let g = grad_h(&spec, 0.0, &u, 64).unwrap();
            assert!(g.e_norm() <= 1.0);
        }
    }

    #[test]
    fn truncated_gradient_properties() {
        let spec = NonlinearitySpec::sine_gordon();
        let u = smooth_state(10, 1.0, 4);
        let full = grad_h(&spec, 0.0, &u, 64).unwrap();
        let same = grad_h_trunc(&spec, 0.0, &u, 10, 64).unwrap();
        assert_eq!(full, same);
        let g4 = grad_h_trunc(&spec, 0.0, &u, 4, 64).unwrap();
        assert_eq!(g4, g4.project(Region::Low(4)).unwrap());
        let zero = NonlinearitySpec::zero();
        for n in 0..=10 {
            assert_eq!(grad_h_trunc(&zero, 0.0, &u, n, 64).unwrap().e_norm(), 0.0);
        }
        assert!(grad_h_trunc(&spec, 0.0, &u, 11, 64).is_err());
        assert!(matches!(grad_h(&spec, 0.0, &u, 32), Err(Error::GridTooSmall { .. })));
    }

    #[test]
    fn potential_values() {
        let spec = NonlinearitySpec::sine_gordon();
        assert_eq!(h_value(&spec, 0.0, &PhaseVector::zeros(3), 16).unwrap(), 0.0);
        let h = h_value(&spec, 0.0, &constant_state(3, PI), 16).unwrap();
        assert_abs_diff_eq!(h, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn numeric_potential_matches_closed_form() {
        let custom = NonlinearitySpec::custom(|_, _, u| u.sin(), 1.0).unwrap();
        let sg = NonlinearitySpec::sine_gordon();
        for u in [-7.3, -0.2, 0.0, 1.1, 4.9] {
            assert_abs_diff_eq!(
                custom.potential(0.0, 0.0, u),
                sg.potential(0.0, 0.0, u),
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn custom_bound_is_checked() {
        assert!(matches!(
            NonlinearitySpec::custom(|_, _, u| 2.0 * u.sin(), 1.0),
            Err(Error::BoundViolation(_))
        ));
        let ok = NonlinearitySpec::custom(|t, x, u| 0.5 * (u + x + t).cos(), 0.5).unwrap();
        assert_eq!(ok.family(), Family::CustomBounded);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let spec = NonlinearitySpec::sine_gordon();
        let m = 128;
        let eps = 1e-5;
        for seed in 0..5 {
            let u = smooth_state(12, 2.0, seed);
            let w = smooth_state(12, 1.0, seed + 100);
            let fd = (h_value(&spec, 0.0, &u.axpy(eps, &w), m).unwrap()
                - h_value(&spec, 0.0, &u.axpy(-eps, &w), m).unwrap())
                / (2.0 * eps);
            let exact = grad_h(&spec, 0.0, &u, m).unwrap().dot(&w);
            assert!(
                (fd - exact).abs() <= 1e-6 * exact.abs().max(1e-3),
                "fd {fd} vs grad {exact}"
            );
        }
    }

    #[test]
    fn names() {
        assert_eq!(
            NonlinearitySpec::from_name("sine-gordon").unwrap().family(),
            Family::SineGordon
        );
        assert!(NonlinearitySpec::from_name("zero").unwrap().is_zero());
        assert!(NonlinearitySpec::from_name("kdv").is_err());
    }
}
