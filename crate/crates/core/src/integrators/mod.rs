//! Time integration of the truncated string equation and of generic
//! finite-dimensional Hamiltonian systems.

pub(crate) mod generic;
mod picard;
mod splitting;

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_space::{min_grid_size, PhaseVector};

pub use generic::{
    canonical_omega, flow_generic, jacobian_fd, midpoint_step_generic, symplectic_defect, trajectory_generic,
    GaussCollocation, GenericHamiltonianSystem, GradientFn, GrowthCertificate, HamiltonianFn,
};
pub use picard::{picard_mild, picard_mild_from, PicardOptions, PicardOutcome};
pub use splitting::{flow, interaction_flow, kick_step, lie_step, strang_step};

/// States whose E-norm exceeds this are treated as a blow-up.
pub const DIVERGENCE_THRESHOLD: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Strang,
    Lie,
    Picard,
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strang" => Ok(Scheme::Strang),
            "lie" => Ok(Scheme::Lie),
            "picard" => Ok(Scheme::Picard),
            other => Err(Error::Parse(format!("unknown scheme `{other}`"))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Strang => "strang",
            Scheme::Lie => "lie",
            Scheme::Picard => "picard",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub dt: f64,
    pub scheme: Scheme,
    /// Galerkin index of the nonlinearity.
    pub n: usize,
    /// Grid size for pseudo-spectral evaluation.
    pub m: usize,
    pub t0: f64,
    pub t1: f64,
}

impl FlowConfig {
    /// Strang splitting on `[0, t1]` with the smallest admissible grid.
    pub fn strang(n: usize, dt: f64, t1: f64) -> Self {
        Self {
            dt,
            scheme: Scheme::Strang,
            n,
            m: min_grid_size(n),
            t0: 0.0,
            t1,
        }
    }

    pub fn validate(&self, n_max: usize) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t0.is_finite() && self.t1.is_finite() && self.t1 >= self.t0) {
            return Err(Error::InvalidArgument(format!(
                "time window [{}, {}] is not ordered",
                self.t0, self.t1
            )));
        }
        if self.n > n_max {
            return Err(Error::OutOfRange {
                what: "Galerkin index",
                detail: format!("{} > state order {n_max}", self.n),
            });
        }
        crate::phase_space::check_grid(self.m, self.n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhaseVector>,
}

impl Trajectory {
    pub fn last(&self) -> &PhaseVector {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Long-form CSV `t,j,a_j,b_j` after `# key=value` metadata lines.
    pub fn to_csv(&self, metadata: &[(&str, String)]) -> String {
        let mut s = String::new();
        for (k, v) in metadata {
            let _ = writeln!(s, "# {k}={v}");
        }
        s.push_str("t,j,a_j,b_j\n");
        for (t, u) in self.times.iter().zip(&self.states) {
            for j in u.modes() {
                let _ = writeln!(s, "{t:.16e},{j},{:.16e},{:.16e}", u.a(j), u.b(j));
            }
        }
        s
    }
}
