//! Lower bounds for how far the flow can push a single mode: maximize
//! `|U_l(t0)|` over states whose low part lies in a disk or ball, with the
//! positions of higher modes free inside a box and their momenta zero.

use nalgebra::Matrix2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::enclosing::min_enclosing_ball;
use crate::error::{Error, Result};
use crate::integrators::{flow, FlowConfig};
use crate::linear::exp_block;
use crate::nonlinearity::NonlinearitySpec;
use crate::optimize::{coordinate_search, nelder_mead};
use crate::phase_space::PhaseVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "base", rename_all = "snake_case")]
pub enum ModeBase {
    /// Disk of radius `r` in the `(a_l, b_l)` plane, other low modes zero.
    Disk { l: i64, r: f64 },
    /// E-norm ball of radius `r` in the low modes `|j| <= k`.
    Ball { r: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSearch {
    pub starts: usize,
    pub evals_per_start: usize,
    /// Half-width of the box for the free positions `a_j`, `|j| > k`.
    pub plus_box: f64,
    pub seed: u64,
}

impl Default for ModeSearch {
    fn default() -> Self {
        Self {
            starts: 32,
            evals_per_start: 200,
            plus_box: 1.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeWitness {
    pub state: PhaseVector,
    pub image: PhaseVector,
    pub value: f64,
    pub evals: usize,
    /// Index of the start that produced the witness.
    pub start: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Objective {
    Amplitude,
    Along(f64, f64),
}

struct Problem<'a> {
    spec: &'a NonlinearitySpec,
    cfg: FlowConfig,
    l: i64,
    k: usize,
    base: ModeBase,
    plus_box: f64,
    objective: Objective,
}

impl Problem<'_> {
    fn low_len(&self) -> usize {
        match self.base {
            ModeBase::Disk { .. } => 2,
            ModeBase::Ball { .. } => 2 * (2 * self.k + 1),
        }
    }

    fn dim(&self) -> usize {
        self.low_len() + 2 * (self.cfg.n - self.k)
    }

    /// Parameters to an admissible state: radial projection on the base and
    /// clamping on the box.
    fn state(&self, x: &[f64]) -> PhaseVector {
        let n = self.cfg.n;
        let mut u = PhaseVector::zeros(n);
        let (a, b) = u.coeffs_mut();
        let idx = |j: i64| (j + n as i64) as usize;
        let low = &x[..self.low_len()];
        let r = match self.base {
            ModeBase::Disk { r, .. } | ModeBase::Ball { r } => r,
        };
        let len = low.iter().map(|v| v * v).sum::<f64>().sqrt();
        let s = if len > r { r / len } else { 1.0 };
        match self.base {
            ModeBase::Disk { l, .. } => {
                a[idx(l)] = s * low[0];
                b[idx(l)] = s * low[1];
            }
            ModeBase::Ball { .. } => {
                let k = self.k as i64;
                for (i, j) in (-k..=k).enumerate() {
                    a[idx(j)] = s * low[2 * i];
                    b[idx(j)] = s * low[2 * i + 1];
                }
            }
        }
        let plus = (self.k + 1..=n).flat_map(|j| [-(j as i64), j as i64]);
        for (v, j) in x[self.low_len()..].iter().zip(plus) {
            a[idx(j)] = v.clamp(-self.plus_box, self.plus_box);
        }
        u
    }

    fn image(&self, u: &PhaseVector) -> Result<PhaseVector> {
        Ok(flow(u, &self.cfg, self.spec)?.last().clone())
    }

    fn score(&self, w: &PhaseVector) -> f64 {
        match self.objective {
            Objective::Amplitude => w.a(self.l).hypot(w.b(self.l)),
            Objective::Along(c, s) => c * w.a(self.l) + s * w.b(self.l),
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.image(&self.state(x))
            .map(|w| self.score(&w))
            .unwrap_or(f64::NEG_INFINITY)
    }

    /// Maximizer of the linear problem: `r v` with `v` the top right singular
    /// vector of the mode block, or `r M^T d / |M^T d|` for a direction `d`.
    fn warm_start(&self) -> Vec<f64> {
        let blk = exp_block(self.l, self.cfg.t1 - self.cfg.t0);
        let m = Matrix2::new(blk.m11, blk.m12, blk.m21, blk.m22);
        let v = match self.objective {
            Objective::Amplitude => {
                let svd = m.svd(false, true);
                let vt = svd.v_t.expect("requested");
                let i = if svd.singular_values[0] >= svd.singular_values[1] {
                    0
                } else {
                    1
                };
                [vt[(i, 0)], vt[(i, 1)]]
            }
            Objective::Along(c, s) => {
                let w = m.transpose() * nalgebra::Vector2::new(c, s);
                let n = w.norm();
                [w[0] / n, w[1] / n]
            }
        };
        let r = match self.base {
            ModeBase::Disk { r, .. } | ModeBase::Ball { r } => r,
        };
        let mut x = vec![0.0; self.dim()];
        let off = match self.base {
            ModeBase::Disk { .. } => 0,
            ModeBase::Ball { .. } => 2 * (self.l + self.k as i64) as usize,
        };
        x[off] = r * v[0];
        x[off + 1] = r * v[1];
        x
    }

    fn random_start(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let r = match self.base {
            ModeBase::Disk { r, .. } | ModeBase::Ball { r } => r,
        };
        let low: Vec<f64> = (0..self.low_len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let len = low.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        let rad = r * rng.random::<f64>().powf(1.0 / self.low_len() as f64);
        let mut x: Vec<f64> = low.iter().map(|v| v * rad / len).collect();
        x.extend((self.low_len()..self.dim()).map(|_| rng.random_range(-self.plus_box..=self.plus_box)));
        x
    }

    fn local_search(&self, x0: &[f64], budget: usize) -> (Vec<f64>, f64, usize) {
        let r = match self.base {
            ModeBase::Disk { r, .. } | ModeBase::Ball { r } => r,
        };
        let step = 0.25 * r.max(self.plus_box);
        let coarse = coordinate_search(|x| self.eval(x), x0, step, 1e-3 * step, budget / 2);
        let fine = nelder_mead(
            |x| self.eval(x),
            &coarse.x,
            0.1 * step,
            1e-12,
            budget - coarse.evals.min(budget),
        );
        if fine.value > coarse.value {
            (fine.x, fine.value, coarse.evals + fine.evals)
        } else {
            (coarse.x, coarse.value, coarse.evals + fine.evals)
        }
    }
}

fn validate(l: i64, k: usize, base: &ModeBase, cfg: &FlowConfig, search: &ModeSearch) -> Result<()> {
    cfg.validate(cfg.n)?;
    if k > cfg.n {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds the Galerkin index {}",
            cfg.n
        )));
    }
    if l.unsigned_abs() as usize > k {
        return Err(Error::OutOfRange {
            what: "mode index",
            detail: format!("|{l}| > k = {k}"),
        });
    }
    let r = match *base {
        ModeBase::Disk { l: dl, r } => {
            if dl != l {
                return Err(Error::InvalidArgument(format!(
                    "disk lives in mode {dl}, objective in mode {l}"
                )));
            }
            r
        }
        ModeBase::Ball { r } => r,
    };
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("base radius {r} must be positive")));
    }
    if !(search.plus_box >= 0.0 && search.plus_box.is_finite()) || search.starts == 0 || search.evals_per_start < 2 {
        return Err(Error::InvalidArgument(
            "search needs starts >= 1, evals >= 2 and a finite box".into(),
        ));
    }
    Ok(())
}

fn run_starts(problem: &Problem<'_>, search: &ModeSearch) -> Result<ModeWitness> {
    let results: Vec<(Vec<f64>, f64, usize)> = (0..search.starts)
        .into_par_iter()
        .map(|i| {
            let x0 = if i == 0 {
                problem.warm_start()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
                rng.set_stream(i as u64);
                problem.random_start(&mut rng)
            };
            problem.local_search(&x0, search.evals_per_start)
        })
        .collect();
    let evals = results.iter().map(|r| r.2).sum();
    let (start, (x, value, _)) = results
        .into_iter()
        .enumerate()
        .fold(None::<(usize, (Vec<f64>, f64, usize))>, |best, (i, cand)| match best {
            Some(b) if b.1 .1 >= cand.1 => Some(b),
            _ => Some((i, cand)),
        })
        .expect("at least one start");
    if !value.is_finite() {
        return Err(Error::NonConvergence {
            what: "mode search",
            iterations: search.starts,
            contraction: f64::NAN,
        });
    }
    let state = problem.state(&x);
    let image = problem.image(&state)?;
    Ok(ModeWitness {
        value: problem.score(&image),
        state,
        image,
        evals,
        start,
    })
}

/// Maximizes `|U_l(t1)|` over admissible states at `t0`, with the flow
/// described by `cfg`. The best value is nondecreasing in `search.starts`.
pub fn maximize_mode(
    spec: &NonlinearitySpec,
    l: i64,
    k: usize,
    base: &ModeBase,
    cfg: &FlowConfig,
    search: &ModeSearch,
) -> Result<ModeWitness> {
    validate(l, k, base, cfg, search)?;
    let problem = Problem {
        spec,
        cfg: *cfg,
        l,
        k,
        base: *base,
        plus_box: search.plus_box,
        objective: Objective::Amplitude,
    };
    run_starts(&problem, search)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessCloud {
    /// `(a_l, b_l)` of each witness image.
    pub points: Vec<Vec<f64>>,
    pub witnesses: Vec<ModeWitness>,
    pub center: Vec<f64>,
    pub radius: f64,
}

/// For each of `directions` golden-angle unit vectors `d`, maximizes
/// `d . (a_l, b_l)(t1)`; the enclosing ball of the maximizers lower-bounds
/// the size of the projected image.
pub fn mode_witness_cloud(
    spec: &NonlinearitySpec,
    l: i64,
    k: usize,
    base: &ModeBase,
    cfg: &FlowConfig,
    directions: usize,
    search: &ModeSearch,
) -> Result<WitnessCloud> {
    validate(l, k, base, cfg, search)?;
    if directions == 0 {
        return Err(Error::InvalidArgument("need at least one direction".into()));
    }
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let witnesses = (0..directions)
        .map(|i| {
            let theta = golden * i as f64;
            let problem = Problem {
                spec,
                cfg: *cfg,
                l,
                k,
                base: *base,
                plus_box: search.plus_box,
                objective: Objective::Along(theta.cos(), theta.sin()),
            };
            run_starts(
                &problem,
                &ModeSearch {
                    seed: search.seed.wrapping_add(i as u64),
                    ..*search
                },
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<Vec<f64>> = witnesses.iter().map(|w| vec![w.image.a(l), w.image.b(l)]).collect();
    let ball = min_enclosing_ball(&points)?;
    Ok(WitnessCloud {
        points,
        witnesses,
        center: ball.center,
        radius: ball.radius,
    })
}
