//! Displacing an unbounded open set with bounded energy: the shear
//! `(q, p_n) -> (q, p_n + 2t f'(q_n))` generated by `H = -2 f(q_n)` moves
//! `V = {|p_n| < f'(q_n)}` off itself at `t = 1`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrators::{flow_generic, GenericHamiltonianSystem};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Smooth increasing `f: R -> (0, 1)` with its derivative.
#[derive(Clone)]
pub struct MonotoneProfile {
    name: String,
    f: ScalarFn,
    df: ScalarFn,
}

impl fmt::Debug for MonotoneProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotoneProfile").field("name", &self.name).finish()
    }
}

impl MonotoneProfile {
    /// Validates range and strict monotonicity on a probe grid over `[-50, 50]`.
    pub fn new<F, D>(name: &str, f: F, df: D) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        for i in 0..=1000 {
            let q = -50.0 + 0.1 * i as f64;
            let (v, d) = (f(q), df(q));
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "profile value {v} at q = {q} outside (0, 1)"
                )));
            }
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "profile slope {d} at q = {q} is not positive"
                )));
            }
        }
        Ok(Self {
            name: name.to_string(),
            f: Arc::new(f),
            df: Arc::new(df),
        })
    }

    /// `f(q) = 1/2 + arctan(q)/pi`.
    pub fn arctan() -> Self {
        use std::f64::consts::PI;
        Self::new("arctan", |q| 0.5 + q.atan() / PI, |q| 1.0 / (PI * (1.0 + q * q))).expect("arctan profile is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self, q: f64) -> f64 {
        (self.f)(q)
    }

    pub fn slope(&self, q: f64) -> f64 {
        (self.df)(q)
    }

    /// `H = -2 f(q_n)` on `C^n`.
    pub fn hamiltonian(&self, n: usize) -> Result<GenericHamiltonianSystem> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        let (f, df) = (self.f.clone(), self.df.clone());
        let qn = 2 * (n - 1);
        GenericHamiltonianSystem::new(2 * n, move |_, z| {
            let mut g = vec![0.0; z.len()];
            g[qn] = -2.0 * df(z[qn]);
            g
        })
        .map(|s| s.with_value(move |_, z| -2.0 * f(z[qn])))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplacementReport {
    pub profile: String,
    pub n: usize,
    pub t: f64,
    pub samples: usize,
    pub seed: u64,
    /// Samples whose image stays inside `V`.
    pub violations: usize,
    /// Smallest `|p_n'| - f'(q_n)` over the images; positive means displaced.
    pub min_margin: f64,
    /// `sup H - inf H = 2 sup f`.
    pub energy_bound: f64,
    /// Largest gap between the closed form and the midpoint flow.
    pub flow_check_error: f64,
    pub flow_checked: usize,
}

impl DisplacementReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Samples `V` with `q_n` uniform in `[-q_range, q_range]`, maps each sample
/// by the closed-form time-1 flow and counts images left in `V`. The first
/// `flow_checked` samples are also pushed through the midpoint rule.
pub fn displacement_demo(
    profile: &MonotoneProfile,
    n: usize,
    samples: usize,
    seed: u64,
    q_range: f64,
) -> Result<DisplacementReport> {
    if !(q_range > 0.0 && q_range.is_finite()) {
        return Err(Error::InvalidArgument(format!("q range {q_range} must be positive")));
    }
    let sys = profile.hamiltonian(n)?;
    let (qn, pn) = (2 * (n - 1), 2 * n - 1);
    let t = 1.0;
    let flow_checked = samples.min(32);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut min_margin = f64::INFINITY;
    let mut flow_err: f64 = 0.0;
    for i in 0..samples {
        let mut z: Vec<f64> = (0..2 * n).map(|_| rng.random_range(-2.0..2.0)).collect();
        z[qn] = rng.random_range(-q_range..=q_range);
        let slope = profile.slope(z[qn]);
        z[pn] = loop {
            let p = rng.random_range(-slope..slope);
            if p != -slope {
                break p;
            }
        };
        let mut w = z.clone();
        w[pn] += 2.0 * t * slope;
        let margin = w[pn].abs() - profile.slope(w[qn]);
        min_margin = min_margin.min(margin);
        if margin <= 0.0 {
            violations += 1;
        }
        if i < flow_checked {
            let num = flow_generic(&z, 0.0, t, 1e-2, &sys)?;
            let err = num.iter().zip(&w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            flow_err = flow_err.max(err);
        }
    }
    Ok(DisplacementReport {
        profile: profile.name.clone(),
        n,
        t,
        samples,
        seed,
        violations,
        min_margin,
        energy_bound: 2.0,
        flow_check_error: flow_err,
        flow_checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arctan_profile_displaces() {
        let rep = displacement_demo(&MonotoneProfile::arctan(), 2, 2000, 3, 20.0).unwrap();
        assert_eq!(rep.violations, 0);
        assert!(rep.min_margin > 0.0);
        assert_eq!(rep.energy_bound, 2.0);
        assert!(rep.flow_check_error < 1e-12);
    }

    #[test]
    fn bad_profiles_rejected() {
        assert!(MonotoneProfile::new("flat", |_| 0.5, |_| 0.0).is_err());
        assert!(MonotoneProfile::new("wide", |q| q.atan(), |q| 1.0 / (1.0 + q * q)).is_err());
        let tanh = MonotoneProfile::new(
            "tanh",
            |q| 0.5 + 0.5 * (q / 20.0).tanh(),
            |q| 0.025 / (q / 20.0).cosh().powi(2),
        )
        .unwrap();
        assert!(displacement_demo(&tanh, 1, 500, 0, 10.0).unwrap().passed());
    }
}
