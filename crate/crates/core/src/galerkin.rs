//! Measured truncation error of the gradient and of the interaction flow.
//!
//! Sup norms over balls are replaced by a max over seeded samples; the
//! resulting curves are regularised with isotonic (non-increasing) regression.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrators::{interaction_flow, FlowConfig};
use crate::linear::lambda;
use crate::nonlinearity::{grad_h, grad_h_trunc, NonlinearitySpec};
use crate::phase_space::{min_grid_size, PhaseVector};

/// Random states in `B_{E_order}(0, radius)` with spectral decay `lambda^{-decay}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallSampler {
    pub order: usize,
    pub radius: f64,
    pub decay: f64,
}

impl BallSampler {
    pub fn new(order: usize, radius: f64) -> Self {
        Self {
            order,
            radius,
            decay: 1.0,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PhaseVector {
        let k = 2 * self.order + 1;
        let mut a = Vec::with_capacity(k);
        let mut b = Vec::with_capacity(k);
        let n = self.order as i64;
        for j in -n..=n {
            let w = lambda(j).powf(-self.decay);
            a.push(w * rng.sample::<f64, _>(StandardNormal));
            b.push(w * rng.sample::<f64, _>(StandardNormal));
        }
        let u = PhaseVector::new(self.order, a, b).expect("lengths match order");
        let norm = u.e_norm();
        if norm == 0.0 {
            return u;
        }
        let dim = (2 * k) as f64;
        let r = self.radius * rng.random::<f64>().powf(1.0 / dim);
        u.scaled(r / norm)
    }
}

/// Pool-adjacent-violators fit of a non-increasing sequence (least squares).
pub fn isotonic_nonincreasing(values: &[f64]) -> Vec<f64> {
    // Blocks of (mean, weight); merge while a later block exceeds an earlier one.
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for &v in values {
        blocks.push((v, 1));
        while blocks.len() >= 2 {
            let (m2, w2) = blocks[blocks.len() - 1];
            let (m1, w1) = blocks[blocks.len() - 2];
            if m2 <= m1 {
                break;
            }
            blocks.pop();
            let last = blocks.last_mut().expect("at least one block");
            *last = ((m1 * w1 as f64 + m2 * w2 as f64) / (w1 + w2) as f64, w1 + w2);
        }
    }
    blocks
        .into_iter()
        .flat_map(|(m, w)| std::iter::repeat(m).take(w))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub radius: f64,
    pub horizon: f64,
    pub n_values: Vec<usize>,
    pub raw_errors: Vec<f64>,
    pub isotonic_errors: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub n_probe: usize,
    pub m: usize,
}

impl ConvergenceReport {
    /// `n,raw_error,isotonic_error` after `# key=value` lines.
    pub fn to_csv(&self, metadata: &[(&str, String)]) -> String {
        let mut s = String::new();
        for (k, v) in metadata {
            let _ = writeln!(s, "# {k}={v}");
        }
        let _ = writeln!(s, "# R={}", self.radius);
        let _ = writeln!(s, "# T={}", self.horizon);
        let _ = writeln!(s, "# samples={}", self.samples);
        let _ = writeln!(s, "# seed={}", self.seed);
        let _ = writeln!(s, "# n_probe={}", self.n_probe);
        let _ = writeln!(s, "# m={}", self.m);
        s.push_str("n,raw_error,isotonic_error\n");
        for ((n, r), i) in self.n_values.iter().zip(&self.raw_errors).zip(&self.isotonic_errors) {
            let _ = writeln!(s, "{n},{r:.16e},{i:.16e}");
        }
        s
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.isotonic_errors.windows(2).all(|w| w[1] < w[0])
    }
}

fn check_n_values(n_values: &[usize], cap: usize, cap_name: &str) -> Result<()> {
    if n_values.is_empty() {
        return Err(Error::InvalidArgument("n_values is empty".into()));
    }
    if n_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("n_values must be strictly increasing".into()));
    }
    let last = *n_values.last().expect("non-empty");
    if last > cap {
        return Err(Error::OutOfRange {
            what: "Galerkin index",
            detail: format!("{last} > {cap_name} = {cap}"),
        });
    }
    Ok(())
}

/// `eps_R(n) ~ max ||grad h_t(u) - grad h_n(u)||` over samples
/// `(t, u) in [-T, T] x B_{E_{n_probe}}(0, R)`.
#[allow(clippy::too_many_arguments)]
pub fn epsilon_curve(
    spec: &NonlinearitySpec,
    radius: f64,
    horizon: f64,
    n_values: &[usize],
    samples: usize,
    seed: u64,
    n_probe: usize,
    m: usize,
) -> Result<ConvergenceReport> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius {radius} must be positive")));
    }
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} must be non-negative"
        )));
    }
    check_n_values(n_values, n_probe, "n_probe")?;
    let m = m.max(min_grid_size(n_probe));

    let sampler = BallSampler::new(n_probe, radius);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<(f64, PhaseVector)> = (0..samples)
        .map(|_| {
            let t = if horizon > 0.0 {
                rng.random_range(-horizon..=horizon)
            } else {
                0.0
            };
            (t, sampler.sample(&mut rng))
        })
        .collect();

    let per_sample: Vec<Vec<f64>> = draws
        .par_iter()
        .map(|(t, u)| -> Result<Vec<f64>> {
            let full = grad_h(spec, *t, u, m)?;
            n_values
                .iter()
                .map(|&n| Ok((&full - &grad_h_trunc(spec, *t, u, n, m)?).e_norm()))
                .collect()
        })
        .collect::<Result<_>>()?;

    let raw: Vec<f64> = (0..n_values.len())
        .map(|i| per_sample.iter().map(|e| e[i]).fold(0.0, f64::max))
        .collect();
    Ok(ConvergenceReport {
        radius,
        horizon,
        n_values: n_values.to_vec(),
        isotonic_errors: isotonic_nonincreasing(&raw),
        raw_errors: raw,
        samples,
        seed,
        n_probe,
        m,
    })
}

/// `max ||V^t_{n_ref}(u) - V^t_n(u)||` over samples `u in B_{E_{n_ref}}(0, R)`.
#[allow(clippy::too_many_arguments)]
pub fn approx_error(
    spec: &NonlinearitySpec,
    t: f64,
    n: usize,
    n_ref: usize,
    radius: f64,
    samples: usize,
    seed: u64,
    cfg: &FlowConfig,
) -> Result<f64> {
    Ok(approx_error_curve(spec, t, &[n], n_ref, radius, samples, seed, cfg)?[0])
}

/// [`approx_error`] for several `n` against one shared set of samples.
#[allow(clippy::too_many_arguments)]
pub fn approx_error_curve(
    spec: &NonlinearitySpec,
    t: f64,
    n_values: &[usize],
    n_ref: usize,
    radius: f64,
    samples: usize,
    seed: u64,
    cfg: &FlowConfig,
) -> Result<Vec<f64>> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius {radius} must be positive")));
    }
    check_n_values(n_values, n_ref, "n_ref")?;
    let m = cfg.m.max(min_grid_size(n_ref));
    let sampler = BallSampler::new(n_ref, radius);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<PhaseVector> = (0..samples).map(|_| sampler.sample(&mut rng)).collect();

    let per_sample: Vec<Vec<f64>> = draws
        .par_iter()
        .map(|u| -> Result<Vec<f64>> {
            let reference = interaction_flow(u, t, &FlowConfig { n: n_ref, m, ..*cfg }, spec)?;
            n_values
                .iter()
                .map(|&n| {
                    if n == n_ref {
                        return Ok(0.0);
                    }
                    let v = interaction_flow(u, t, &FlowConfig { n, m, ..*cfg }, spec)?;
                    Ok((&reference - &v).e_norm())
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok((0..n_values.len())
        .map(|i| per_sample.iter().map(|e| e[i]).fold(0.0, f64::max))
        .collect())
}

/// Smallest `C` with `approx[i] <= C * eps[i]` for all `i` with `eps[i] > 0`.
pub fn envelope_constant(approx: &[f64], eps: &[f64]) -> f64 {
    approx
        .iter()
        .zip(eps)
        .filter(|(_, &e)| e > 0.0)
        .map(|(a, e)| a / e)
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pava_examples() {
        assert_eq!(isotonic_nonincreasing(&[3.0, 2.0, 1.0]), vec![3.0, 2.0, 1.0]);
        assert_eq!(isotonic_nonincreasing(&[1.0, 3.0]), vec![2.0, 2.0]);
        assert_eq!(isotonic_nonincreasing(&[4.0, 1.0, 2.0, 0.0]), vec![4.0, 1.5, 1.5, 0.0]);
        assert!(isotonic_nonincreasing(&[]).is_empty());
    }

    #[test]
    fn sampler_stays_in_ball() {
        let s = BallSampler::new(10, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let u = s.sample(&mut rng);
            assert!(u.e_norm() <= 2.0 + 1e-12);
            assert_eq!(u.order(), 10);
        }
    }

    #[test]
    fn zero_nonlinearity_curves_vanish() {
        let zero = NonlinearitySpec::zero();
        let rep = epsilon_curve(&zero, 1.0, 1.0, &[2, 4], 10, 1, 8, 64).unwrap();
        assert!(rep.raw_errors.iter().all(|&e| e == 0.0));
        let cfg = FlowConfig::strang(4, 0.05, 0.5);
        let e = approx_error(&zero, 0.5, 4, 8, 1.0, 4, 1, &cfg).unwrap();
        assert!(e < 1e-12);
    }

    #[test]
    fn full_index_has_no_truncation_error() {
        let sg = NonlinearitySpec::sine_gordon();
        let rep = epsilon_curve(&sg, 2.0, 1.0, &[4, 16], 20, 3, 16, 128).unwrap();
        assert!(rep.raw_errors[1] < 1e-8, "{}", rep.raw_errors[1]);
        let cfg = FlowConfig::strang(8, 0.05, 0.5);
        assert_eq!(approx_error(&sg, 0.5, 8, 8, 1.0, 3, 1, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn reports_are_reproducible() {
        let sg = NonlinearitySpec::sine_gordon();
        let a = epsilon_curve(&sg, 1.0, 1.0, &[2, 4, 8], 16, 9, 16, 0).unwrap();
        let b = epsilon_curve(&sg, 1.0, 1.0, &[2, 4, 8], 16, 9, 16, 0).unwrap();
        assert_eq!(a.to_csv(&[]), b.to_csv(&[]));
        assert!(a.to_csv(&[]).contains("n,raw_error,isotonic_error"));
    }

    #[test]
    fn invalid_inputs() {
        let sg = NonlinearitySpec::sine_gordon();
        assert!(epsilon_curve(&sg, 0.0, 1.0, &[2], 4, 1, 8, 64).is_err());
        assert!(epsilon_curve(&sg, 1.0, 1.0, &[4, 2], 4, 1, 8, 64).is_err());
        assert!(epsilon_curve(&sg, 1.0, 1.0, &[16], 4, 1, 8, 64).is_err());
    }
}
