//! Splitting integrators for `u' = JAu + J grad h_n(t, u)`.
//!
//! Both sub-flows are exact: the linear part is `e^{tJA}` and, because
//! `grad h_n` only depends on the `a`-coefficients, the kick
//! `b <- b - dt * grad h_n(t*, u)` is the exact time-`dt` flow of the frozen
//! Hamiltonian `h_{t*} o Pi_n`. Compositions are therefore symplectic.

use crate::error::{Error, Result};
use crate::integrators::{picard_mild_from, FlowConfig, PicardOptions, Scheme, Trajectory};
use crate::linear::{apply_exp_tja, BlockCache};
use crate::nonlinearity::{grad_h_trunc, NonlinearitySpec};
use crate::phase_space::PhaseVector;

use super::DIVERGENCE_THRESHOLD;

pub fn kick_step(
    u: &PhaseVector,
    t_star: f64,
    dt: f64,
    spec: &NonlinearitySpec,
    n: usize,
    m: usize,
) -> Result<PhaseVector> {
    if spec.is_zero() {
        return Ok(u.clone());
    }
    let g = grad_h_trunc(spec, t_star, u, n, m)?;
    let mut out = u.clone();
    let (_, b) = out.coeffs_mut();
    for (bj, gj) in b.iter_mut().zip(g.a_coeffs()) {
        *bj -= dt * gj;
    }
    Ok(out)
}

fn strang_with(
    u: &PhaseVector,
    t: f64,
    dt: f64,
    spec: &NonlinearitySpec,
    n: usize,
    m: usize,
    linear: impl Fn(&PhaseVector, f64) -> PhaseVector,
) -> Result<PhaseVector> {
    let half = 0.5 * dt;
    let u = kick_step(u, t, half, spec, n, m)?;
    let u = linear(&u, dt);
    kick_step(&u, t + dt, half, spec, n, m)
}

/// Half kick at `t`, exact linear flow over `dt`, half kick at `t + dt`.
pub fn strang_step(
    u: &PhaseVector,
    t: f64,
    dt: f64,
    spec: &NonlinearitySpec,
    n: usize,
    m: usize,
) -> Result<PhaseVector> {
    strang_with(u, t, dt, spec, n, m, apply_exp_tja)
}

/// First-order splitting: kick at `t`, then the linear flow.
pub fn lie_step(u: &PhaseVector, t: f64, dt: f64, spec: &NonlinearitySpec, n: usize, m: usize) -> Result<PhaseVector> {
    let u = kick_step(u, t, dt, spec, n, m)?;
    Ok(apply_exp_tja(&u, dt))
}

/// Integrates from `cfg.t0` to `cfg.t1`, hitting `t1` exactly with a shorter
/// final step when needed. Modes above `cfg.n` only feel the linear flow.
pub fn flow(u0: &PhaseVector, cfg: &FlowConfig, spec: &NonlinearitySpec) -> Result<Trajectory> {
    cfg.validate(u0.order())?;
    let span = cfg.t1 - cfg.t0;
    let full_steps = (span / cfg.dt * (1.0 + 1e-12)).floor() as usize;
    let remainder = span - full_steps as f64 * cfg.dt;
    let mut steps: Vec<f64> = vec![cfg.dt; full_steps];
    if remainder > 1e-12 * cfg.dt.max(span) {
        steps.push(remainder);
    }

    let cache = BlockCache::new();
    let picard_opts = PicardOptions::default();
    let mut times = Vec::with_capacity(steps.len() + 1);
    let mut states = Vec::with_capacity(steps.len() + 1);
    times.push(cfg.t0);
    states.push(u0.clone());
    let mut t = cfg.t0;
    let mut u = u0.clone();
    for (k, &h) in steps.iter().enumerate() {
        u = match cfg.scheme {
            Scheme::Strang => strang_with(&u, t, h, spec, cfg.n, cfg.m, |v, s| cache.apply(v, s))?,
            Scheme::Lie => {
                let v = kick_step(&u, t, h, spec, cfg.n, cfg.m)?;
                cache.apply(&v, h)
            }
            Scheme::Picard => picard_mild_from(&u, t, h, spec, cfg.n, cfg.m, &picard_opts)?.state,
        };
        t = if k + 1 == steps.len() {
            cfg.t1
        } else {
            cfg.t0 + (k + 1) as f64 * cfg.dt
        };
        let norm = u.e_norm();
        if !u.is_finite() || norm > DIVERGENCE_THRESHOLD {
            return Err(Error::Diverged { t, norm });
        }
        times.push(t);
        states.push(u.clone());
    }
    Ok(Trajectory { times, states })
}

/// `V_n^t(u0) = e^{-tJA} Phi_n^t(u0)`, integrated with `cfg` over `[0, t]`.
pub fn interaction_flow(u0: &PhaseVector, t: f64, cfg: &FlowConfig, spec: &NonlinearitySpec) -> Result<PhaseVector> {
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "interaction flow needs t >= 0, got {t}"
        )));
    }
    let cfg = FlowConfig { t0: 0.0, t1: t, ..*cfg };
    let traj = flow(u0, &cfg, spec)?;
    Ok(apply_exp_tja(traj.last(), -t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::Region;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn smooth_state(order: usize, scale: f64, seed: u64) -> PhaseVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = 2 * order + 1;
        let mut a = Vec::with_capacity(k);
        let mut b = Vec::with_capacity(k);
        for j in -(order as i64)..=order as i64 {
            let w = scale / crate::linear::lambda(j);
            a.push(w * rng.random_range(-1.0..1.0));
            b.push(w * rng.random_range(-1.0..1.0));
        }
        PhaseVector::new(order, a, b).unwrap()
    }

    #[test]
    fn kick_examples() {
        let zero = NonlinearitySpec::zero();
        let u = smooth_state(4, 1.0, 1);
        assert_eq!(kick_step(&u, 0.0, 0.3, &zero, 4, 32).unwrap(), u);

        let mut c = PhaseVector::zeros(3);
        c.coeffs_mut().0[3] = FRAC_PI_2;
        let sg = NonlinearitySpec::sine_gordon();
        let k = kick_step(&c, 0.0, 0.1, &sg, 3, 16).unwrap();
        assert_abs_diff_eq!(k.b(0), -0.1, epsilon = 1e-15);
        assert_eq!(k.a_coeffs(), c.a_coeffs());

        let u = smooth_state(6, 1.5, 2);
        let two = kick_step(&kick_step(&u, 0.2, 0.05, &sg, 6, 32).unwrap(), 0.2, 0.05, &sg, 6, 32).unwrap();
        let one = kick_step(&u, 0.2, 0.1, &sg, 6, 32).unwrap();
        assert!((&two - &one).e_norm() < 1e-15);
    }

    #[test]
    fn strang_with_zero_nonlinearity_is_linear_flow() {
        let u = smooth_state(5, 1.0, 3);
        let s = strang_step(&u, 0.0, 0.37, &NonlinearitySpec::zero(), 5, 32).unwrap();
        assert_eq!(s, apply_exp_tja(&u, 0.37));
    }

    #[test]
    fn flow_examples() {
        let sg = NonlinearitySpec::sine_gordon();
        let u0 = smooth_state(6, 1.0, 4);
        let cfg = FlowConfig {
            t1: 0.0,
            ..FlowConfig::strang(6, 0.01, 0.0)
        };
        let tr = flow(&u0, &cfg, &sg).unwrap();
        assert_eq!(tr.len(), 1);
        assert_eq!(tr.last(), &u0);

        let cfg = FlowConfig::strang(6, 0.03, 1.0);
        let tr = flow(&u0, &cfg, &NonlinearitySpec::zero()).unwrap();
        assert_eq!(*tr.times.last().unwrap(), 1.0);
        for (t, s) in tr.times.iter().zip(&tr.states) {
            assert!((s - &apply_exp_tja(&u0, *t)).e_norm() < 1e-12);
        }
        assert!(tr.times.windows(2).all(|w| w[1] > w[0]));

        let tr = flow(&PhaseVector::zeros(6), &cfg, &sg).unwrap();
        assert!(tr.states.iter().all(|s| s.e_norm() == 0.0));
    }

    #[test]
    fn invalid_configs() {
        let u0 = PhaseVector::zeros(4);
        let sg = NonlinearitySpec::sine_gordon();
        let bad_dt = FlowConfig {
            dt: 0.0,
            ..FlowConfig::strang(4, 0.1, 1.0)
        };
        assert!(flow(&u0, &bad_dt, &sg).is_err());
        let bad_n = FlowConfig::strang(5, 0.1, 1.0);
        assert!(flow(&u0, &bad_n, &sg).is_err());
        let bad_window = FlowConfig {
            t0: 1.0,
            t1: 0.5,
            ..FlowConfig::strang(4, 0.1, 1.0)
        };
        assert!(flow(&u0, &bad_window, &sg).is_err());
    }

    #[test]
    fn tail_untouched_in_interaction_picture() {
        let sg = NonlinearitySpec::sine_gordon();
        let u0 = smooth_state(20, 2.0, 5);
        let cfg = FlowConfig {
            m: 64,
            ..FlowConfig::strang(6, 0.01, 1.0)
        };
        let v = interaction_flow(&u0, 1.0, &cfg, &sg).unwrap();
        let tail = (&v - &u0).project(Region::Tail(6)).unwrap();
        assert!(tail.e_norm() < 1e-13, "{}", tail.e_norm());
        assert!((&v - &u0).e_norm() > 1e-3);

        let id = interaction_flow(&u0, 0.8, &cfg, &NonlinearitySpec::zero()).unwrap();
        assert!((&id - &u0).e_norm() < 1e-12);
    }

    #[test]
    fn schemes_agree_to_their_order() {
        let sg = NonlinearitySpec::sine_gordon();
        let u0 = smooth_state(6, 1.0, 6);
        let base = FlowConfig::strang(6, 0.01, 0.5);
        let strang = flow(&u0, &base, &sg).unwrap();
        let lie = flow(
            &u0,
            &FlowConfig {
                scheme: Scheme::Lie,
                ..base
            },
            &sg,
        )
        .unwrap();
        let picard = flow(
            &u0,
            &FlowConfig {
                scheme: Scheme::Picard,
                dt: 0.25,
                ..base
            },
            &sg,
        )
        .unwrap();
        let e_strang = (strang.last() - picard.last()).e_norm();
        let e_lie = (lie.last() - picard.last()).e_norm();
        assert!(e_strang < 1e-4, "{e_strang}");
        assert!(e_lie < 1e-2 && e_lie > e_strang, "{e_lie}");
    }
}
