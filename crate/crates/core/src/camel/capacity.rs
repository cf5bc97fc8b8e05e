//! Closed-form values of the capacities `c <= gamma` on model sets.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum ModelShape {
    /// `B^{2n}_r`.
    Ball { r: f64, n: usize },
    /// `B^2_r x C^{n-1}`.
    SymplecticCylinder { r: f64, n: usize },
    /// `S^1(r)^m`.
    LagrangianTorus { r: f64, m: usize },
    /// `C^k x R^{n-k}` with `k < n`.
    CoisotropicSubspace { k: usize, n: usize },
}

impl ModelShape {
    pub fn tag(&self) -> &'static str {
        match self {
            ModelShape::Ball { .. } => "ball",
            ModelShape::SymplecticCylinder { .. } => "cylinder",
            ModelShape::LagrangianTorus { .. } => "torus",
            ModelShape::CoisotropicSubspace { .. } => "coisotropic",
        }
    }

    /// The image under `z -> lambda z`.
    pub fn scaled(&self, lambda: f64) -> Self {
        match *self {
            ModelShape::Ball { r, n } => ModelShape::Ball { r: r * lambda.abs(), n },
            ModelShape::SymplecticCylinder { r, n } => ModelShape::SymplecticCylinder { r: r * lambda.abs(), n },
            ModelShape::LagrangianTorus { r, m } => ModelShape::LagrangianTorus { r: r * lambda.abs(), m },
            ModelShape::CoisotropicSubspace { k, n } => ModelShape::CoisotropicSubspace { k, n },
        }
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            ModelShape::Ball { r, n } | ModelShape::SymplecticCylinder { r, n } => {
                vec![("r", r), ("n", n as f64)]
            }
            ModelShape::LagrangianTorus { r, m } => vec![("r", r), ("m", m as f64)],
            ModelShape::CoisotropicSubspace { k, n } => vec![("k", k as f64), ("n", n as f64)],
        }
    }
}

impl fmt::Display for ModelShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ModelShape::Ball { r, n } => write!(f, "B^{}({r})", 2 * n),
            ModelShape::SymplecticCylinder { r, n } => write!(f, "B^2({r}) x C^{}", n - 1),
            ModelShape::LagrangianTorus { r, m } => write!(f, "S^1({r})^{m}"),
            ModelShape::CoisotropicSubspace { k, n } => write!(f, "C^{k} x R^{}", n - k),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityOracleEntry {
    pub shape: ModelShape,
    pub params: Vec<(String, f64)>,
    pub c_value: f64,
    pub gamma_value: f64,
    pub note: String,
}

pub fn capacity_oracle(shape: ModelShape) -> Result<CapacityOracleEntry> {
    let positive = |r: f64| r > 0.0 && r.is_finite();
    let (c, gamma, note) = match shape {
        ModelShape::Ball { r, n } if positive(r) && n >= 1 => {
            (PI * r * r, PI * r * r, "normalization and conformality")
        }
        ModelShape::SymplecticCylinder { r, n } if positive(r) && n >= 1 => {
            (PI * r * r, PI * r * r, "normalization and conformality")
        }
        ModelShape::LagrangianTorus { r, m } if positive(r) && m >= 1 => (
            PI * r * r,
            PI * r * r,
            "c from the Lagrangian camel; gamma squeezed by c <= gamma <= gamma(B^2_r x C^{m-1})",
        ),
        ModelShape::CoisotropicSubspace { k, n } if k < n => {
            (0.0, 0.0, "invariant under dilation and displaceable with finite energy")
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unsupported or degenerate model shape {other:?}"
            )))
        }
    };
    Ok(CapacityOracleEntry {
        shape,
        params: shape.params().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        c_value: c,
        gamma_value: gamma,
        note: note.to_string(),
    })
}

/// One entry per supported family over a small parameter grid.
pub fn capacity_table() -> Vec<CapacityOracleEntry> {
    let mut shapes = Vec::new();
    for &r in &[0.5, 1.0, 2.0] {
        for n in 1..=3 {
            shapes.push(ModelShape::Ball { r, n });
            shapes.push(ModelShape::SymplecticCylinder { r, n });
            shapes.push(ModelShape::LagrangianTorus { r, m: n });
        }
    }
    for n in 1..=4 {
        for k in 0..n {
            shapes.push(ModelShape::CoisotropicSubspace { k, n });
        }
    }
    shapes
        .into_iter()
        .map(|s| capacity_oracle(s).expect("table shapes are valid"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let ball = capacity_oracle(ModelShape::Ball { r: 1.0, n: 2 }).unwrap();
        assert_eq!(ball.c_value, PI);
        let torus = capacity_oracle(ModelShape::LagrangianTorus { r: 0.7, m: 3 }).unwrap();
        assert!((torus.c_value - PI * 0.49).abs() < 1e-15);
        let co = capacity_oracle(ModelShape::CoisotropicSubspace { k: 1, n: 3 }).unwrap();
        assert_eq!((co.c_value, co.gamma_value), (0.0, 0.0));
        assert!(capacity_oracle(ModelShape::CoisotropicSubspace { k: 3, n: 3 }).is_err());
        assert!(capacity_oracle(ModelShape::Ball { r: 0.0, n: 1 }).is_err());
    }
}
