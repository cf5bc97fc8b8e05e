//! Reference solver for the Duhamel integral equation.
//!
//! Iterates in the interaction picture `w(s) = e^{-sJA} u(s)`, where the
//! equation reads `w(s) = u0 + int_0^s e^{-rJA} J grad h(e^{rJA} w(r)) dr`.
//! The integral is discretised by Gauss–Legendre collocation with 8 nodes per
//! panel; panels are doubled until the endpoint stops moving.

use crate::error::{Error, Result};
use crate::linear::apply_exp_tja;
use crate::nonlinearity::{grad_h, NonlinearitySpec};
use crate::phase_space::{check_grid, PhaseVector};
use crate::quadrature::GaussLegendre;

const NODES_PER_PANEL: usize = 8;
const MAX_PANELS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardOptions {
    /// Stopping threshold on the E-norm of successive iterates and of the
    /// endpoint change under panel refinement.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iterations: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardOutcome {
    pub state: PhaseVector,
    /// Iterations spent on the finest panel count.
    pub iterations: usize,
    pub panels: usize,
    /// Largest observed ratio of consecutive update norms.
    pub contraction: f64,
}

/// Solves on `[0, t]`.
pub fn picard_mild(
    u0: &PhaseVector,
    t: f64,
    spec: &NonlinearitySpec,
    n: usize,
    m: usize,
    tol: f64,
) -> Result<PicardOutcome> {
    let opts = PicardOptions {
        tol,
        ..PicardOptions::default()
    };
    picard_mild_from(u0, 0.0, t, spec, n, m, &opts)
}

/// Solves on `[t0, t0 + dt]`; `dt` may be negative.
pub fn picard_mild_from(
    u0: &PhaseVector,
    t0: f64,
    dt: f64,
    spec: &NonlinearitySpec,
    n: usize,
    m: usize,
    opts: &PicardOptions,
) -> Result<PicardOutcome> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol = {} must be positive", opts.tol)));
    }
    if !dt.is_finite() || !t0.is_finite() {
        return Err(Error::NonFinite("time"));
    }
    if n > u0.order() {
        return Err(Error::OutOfRange {
            what: "Galerkin index",
            detail: format!("{n} > order {}", u0.order()),
        });
    }
    check_grid(m, n)?;

    // Modes above n only see the linear flow.
    let linear = apply_exp_tja(u0, dt);
    if spec.is_zero() || dt == 0.0 {
        return Ok(PicardOutcome {
            state: linear,
            iterations: 1,
            panels: 0,
            contraction: 0.0,
        });
    }

    let solver = Collocation::new(spec, t0, n, m);
    let low0 = u0.resized(n);
    let mut panels = (dt.abs().ceil() as usize).max(1);
    let mut prev = solver.solve(&low0, dt, panels, opts)?;
    loop {
        panels *= 2;
        let next = solver.solve(&low0, dt, panels, opts)?;
        let change = (&next.0 - &prev.0).e_norm();
        prev = next;
        if change < opts.tol || panels >= MAX_PANELS {
            break;
        }
    }
    let (w_end, iterations, contraction) = prev;
    let low_end = apply_exp_tja(&w_end, dt);

    let mut state = linear;
    let k = n as i64;
    let order = state.order() as i64;
    let (a, b) = state.coeffs_mut();
    for j in -k..=k {
        let i = (j + order) as usize;
        a[i] = low_end.a(j);
        b[i] = low_end.b(j);
    }
    Ok(PicardOutcome {
        state,
        iterations,
        panels,
        contraction,
    })
}

struct Collocation<'a> {
    spec: &'a NonlinearitySpec,
    t0: f64,
    m: usize,
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    integ: Vec<Vec<f64>>,
}

impl<'a> Collocation<'a> {
    fn new(spec: &'a NonlinearitySpec, t0: f64, order: usize, m: usize) -> Self {
        let rule = GaussLegendre::new(NODES_PER_PANEL);
        let (nodes, weights) = rule.unit_nodes();
        let integ = rule.integration_matrix();
        Self {
            spec,
            t0,
            m,
            order,
            nodes,
            weights,
            integ,
        }
    }

    /// Interaction-picture vector field `e^{-rJA} J grad h(e^{rJA} w)`.
    fn field(&self, r: f64, w: &PhaseVector) -> Result<PhaseVector> {
        let u = apply_exp_tja(w, r);
        let g = grad_h(self.spec, self.t0 + r, &u, self.m)?;
        let neg: Vec<f64> = g.a_coeffs().iter().map(|x| -x).collect();
        let jg = PhaseVector::new(self.order, vec![0.0; neg.len()], neg)?;
        Ok(apply_exp_tja(&jg, -r))
    }

    /// Returns `(w(dt), iterations, contraction)` for a fixed panel count.
    fn solve(
        &self,
        w0: &PhaseVector,
        dt: f64,
        panels: usize,
        opts: &PicardOptions,
    ) -> Result<(PhaseVector, usize, f64)> {
        let h = dt / panels as f64;
        let p = self.nodes.len();
        let times: Vec<f64> = (0..panels)
            .flat_map(|k| self.nodes.iter().map(move |x| (k as f64 + x) * h))
            .collect();
        let mut w: Vec<PhaseVector> = vec![w0.clone(); panels * p];
        let mut end = w0.clone();
        let mut last_update = f64::INFINITY;
        let mut contraction: f64 = 0.0;
        for iter in 1..=opts.max_iterations {
            let fields = times
                .iter()
                .zip(&w)
                .map(|(&r, wi)| self.field(r, wi))
                .collect::<Result<Vec<_>>>()?;
            let mut start = w0.clone();
            let mut update: f64 = 0.0;
            let mut next = Vec::with_capacity(w.len());
            for k in 0..panels {
                let f = &fields[k * p..(k + 1) * p];
                for (i, row) in self.integ.iter().enumerate() {
                    let mut wi = start.clone();
                    for (s, fk) in row.iter().zip(f) {
                        wi = wi.axpy(h * s, fk);
                    }
                    update = update.max((&wi - &w[k * p + i]).e_norm());
                    next.push(wi);
                }
                for (wk, fk) in self.weights.iter().zip(f) {
                    start = start.axpy(h * wk, fk);
                }
            }
            update = update.max((&start - &end).e_norm());
            w = next;
            end = start;
            if !end.is_finite() {
                return Err(Error::Diverged {
                    t: self.t0 + dt,
                    norm: end.e_norm(),
                });
            }
            if iter > 1 && last_update > 0.0 {
                contraction = contraction.max(update / last_update);
            }
            if update < opts.tol {
                return Ok((end, iter, contraction));
            }
            last_update = update;
        }
        Err(Error::NonConvergence {
            what: "Picard iteration",
            iterations: opts.max_iterations,
            contraction,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(order: usize) -> PhaseVector {
        let k = 2 * order + 1;
        let a = (0..k)
            .map(|i| 0.3 * ((i as f64) * 0.7).sin() / (1.0 + i as f64))
            .collect();
        let b = (0..k)
            .map(|i| 0.2 * ((i as f64) * 1.3).cos() / (1.0 + i as f64))
            .collect();
        PhaseVector::new(order, a, b).unwrap()
    }

    #[test]
    fn zero_nonlinearity_is_linear_flow() {
        let u0 = state(5);
        let out = picard_mild(&u0, 1.3, &NonlinearitySpec::zero(), 5, 32, 1e-10).unwrap();
        assert_eq!(out.iterations, 1);
        assert_eq!(out.state, apply_exp_tja(&u0, 1.3));
    }

    #[test]
    fn iterations_grow_with_time() {
        let sg = NonlinearitySpec::sine_gordon();
        let u0 = state(4);
        let short = picard_mild(&u0, 0.1, &sg, 4, 32, 1e-12).unwrap();
        let long = picard_mild(&u0, 1.0, &sg, 4, 32, 1e-12).unwrap();
        assert!(short.iterations < long.iterations);
        assert!(short.contraction < 0.2, "{}", short.contraction);
    }

    #[test]
    fn backward_undoes_forward() {
        let sg = NonlinearitySpec::sine_gordon();
        let u0 = state(4);
        let opts = PicardOptions::default();
        let fwd = picard_mild_from(&u0, 0.3, 0.7, &sg, 4, 32, &opts).unwrap();
        let back = picard_mild_from(&fwd.state, 1.0, -0.7, &sg, 4, 32, &opts).unwrap();
        assert!((&back.state - &u0).e_norm() < 1e-11);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let sg = NonlinearitySpec::sine_gordon();
        assert!(picard_mild(&state(2), 1.0, &sg, 2, 16, 0.0).is_err());
    }
}
