use std::fmt::Write as _;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cylinder::CoisotropicCylinder;
use crate::error::{Error, Result};
use crate::integrators::jacobian_fd;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CamelSearch {
    pub starts: usize,
    pub tol: f64,
    pub seed: u64,
    pub fd_step: f64,
    pub max_newton: usize,
}

impl Default for CamelSearch {
    fn default() -> Self {
        Self {
            starts: 64,
            tol: 1e-8,
            seed: 0,
            fd_step: 1e-6,
            max_newton: 50,
        }
    }
}

/// Points `z` of the cylinder with `Pi_+ psi_t(z) = 0` (real fiber parts of the image vanish).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CamelPointSet {
    pub t: f64,
    pub n: usize,
    pub k: usize,
    pub points: Vec<Vec<f64>>,
    pub images: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
}

impl CamelPointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Columns `z0..z{2n-1},residual` after `# key=value` lines.
    pub fn to_csv(&self, metadata: &[(&str, String)]) -> String {
        let mut s = String::new();
        for (k, v) in metadata {
            let _ = writeln!(s, "# {k}={v}");
        }
        let _ = writeln!(s, "# t={}", self.t);
        let _ = writeln!(s, "# n={}", self.n);
        let _ = writeln!(s, "# k={}", self.k);
        let header: Vec<String> = (0..2 * self.n).map(|i| format!("z{i}")).collect();
        let _ = writeln!(s, "{},residual", header.join(","));
        for (z, r) in self.points.iter().zip(&self.residuals) {
            let row: Vec<String> = z.iter().map(|x| format!("{x:.16e}")).collect();
            let _ = writeln!(s, "{},{r:.16e}", row.join(","));
        }
        s
    }
}

/// `Pi_+ w`: the positions `q_{k+1..n}`.
pub fn fiber_residual(w: &[f64], k: usize) -> Vec<f64> {
    (k..w.len() / 2).map(|i| w[2 * i]).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Multistart Newton on the fiber positions, base point fixed per start.
/// Starts whose flow fails or whose iteration stalls are dropped.
pub fn find_camel_points<F>(flow: F, cyl: &CoisotropicCylinder, t: f64, search: &CamelSearch) -> Result<CamelPointSet>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    if !(search.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol = {} must be positive", search.tol)));
    }
    let starts: Vec<(Vec<f64>, Vec<f64>)> = (0..search.starts)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(search.seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let base = cyl.base.sample(cyl.k, &mut rng);
            let fiber = (cyl.k..cyl.n)
                .map(|_| rng.random_range(-cyl.fiber_box..=cyl.fiber_box))
                .collect();
            (base, fiber)
        })
        .collect();

    let found: Vec<Option<(Vec<f64>, Vec<f64>, f64)>> = starts
        .par_iter()
        .map(|(base, fiber)| newton_fiber(&flow, cyl, base, fiber.clone(), search))
        .collect();

    let mut set = CamelPointSet {
        t,
        n: cyl.n,
        k: cyl.k,
        points: Vec::new(),
        images: Vec::new(),
        residuals: Vec::new(),
    };
    for (z, w, r) in found.into_iter().flatten() {
        set.points.push(z);
        set.images.push(w);
        set.residuals.push(r);
    }
    Ok(set)
}

fn newton_fiber<F>(
    flow: &F,
    cyl: &CoisotropicCylinder,
    base: &[f64],
    mut x: Vec<f64>,
    search: &CamelSearch,
) -> Option<(Vec<f64>, Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let residual_at = |x: &[f64]| -> Result<(Vec<f64>, Vec<f64>)> {
        let w = flow(&cyl.point(base, x))?;
        Ok((fiber_residual(&w, cyl.k), w))
    };
    let (mut r, mut w) = residual_at(&x).ok()?;
    let mut rn = norm(&r);
    for _ in 0..search.max_newton {
        if rn <= 1e-6 * search.tol {
            break;
        }
        let jac = jacobian_fd(|y| residual_at(y).map(|(r, _)| r), &x, search.fd_step).ok()?;
        let step = jac.lu().solve(&DVector::from_column_slice(&r))?;
        let mut alpha = 1.0;
        let mut accepted = false;
        while alpha > 1e-4 {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a - alpha * s).collect();
            if let Ok((tr, tw)) = residual_at(&trial) {
                let tn = norm(&tr);
                if tn < rn {
                    x = trial;
                    r = tr;
                    w = tw;
                    rn = tn;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (rn <= search.tol).then(|| (cyl.point(base, &x), w, rn))
}

/// `Pi_k psi_t(z)` for every camel point: reduction by `C^k x iR^{n-k}`.
pub fn reduce_points(set: &CamelPointSet, k: usize) -> Vec<Vec<f64>> {
    set.images.iter().map(|w| w[..2 * k].to_vec()).collect()
}

/// Recomputes every residual from scratch; returns the largest.
pub fn reverify_points<F>(flow: F, set: &CamelPointSet) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    set.points
        .iter()
        .try_fold(0.0f64, |acc, z| Ok(acc.max(norm(&fiber_residual(&flow(z)?, set.k)))))
}
