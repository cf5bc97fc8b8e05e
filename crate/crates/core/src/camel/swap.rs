//! The coordinate swap `(z_1..z_n) -> (z_{k+1}..z_n, z_1..z_k)`: a linear
//! symplectomorphism that squeezes coisotropic cylinders.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::capacity::{capacity_oracle, ModelShape};
use super::cylinder::{sample_cylinder, CoisotropicCylinder};
use crate::error::Result;
use crate::integrators::symplectic_defect;

/// Applies the swap on interleaved coordinates of `C^n`.
pub fn swap(z: &[f64], k: usize) -> Vec<f64> {
    let n = z.len() / 2;
    (0..n)
        .flat_map(|i| {
            let src = (i + k) % n;
            [z[2 * src], z[2 * src + 1]]
        })
        .collect()
}

pub fn swap_matrix(n: usize, k: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        let src = (i + k) % n;
        m[(2 * i, 2 * src)] = 1.0;
        m[(2 * i + 1, 2 * src + 1)] = 1.0;
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapReport {
    pub n: usize,
    pub k: usize,
    pub samples: usize,
    /// Complex coordinates of the `k`-projection forced to be real.
    pub real_block: usize,
    /// Largest `|p|` found in the real block; zero for an exact swap.
    pub max_real_block_momentum: f64,
    /// The set containing the projection, as `C^a x R^b`.
    pub container: ModelShape,
    pub container_gamma: f64,
    pub base_capacity: Option<f64>,
    pub symplectic_defect: f64,
    /// `c(X) > gamma(container)`: the inequality fails for this map.
    pub squeezes: bool,
}

pub fn swap_counterexample(cyl: &CoisotropicCylinder, samples: usize, seed: u64) -> Result<SwapReport> {
    let (n, k) = (cyl.n, cyl.k);
    let real_block = k.min(n - k);
    let mut max_p: f64 = 0.0;
    for z in sample_cylinder(cyl, samples, seed) {
        let w = swap(&z, k);
        for i in 0..real_block {
            max_p = max_p.max(w[2 * i + 1].abs());
        }
    }
    // Projection lies in R^{n-k} x C^{2k-n} when k > n/2, else in R^k.
    let container = ModelShape::CoisotropicSubspace {
        k: k - real_block,
        n: k,
    };
    let container_gamma = capacity_oracle(container)?.gamma_value;
    let base_capacity = match &cyl.base {
        super::cylinder::BaseShape::Ball { r } => Some(capacity_oracle(ModelShape::Ball { r: *r, n: k })?.c_value),
        super::cylinder::BaseShape::Torus { r } => {
            Some(capacity_oracle(ModelShape::LagrangianTorus { r: *r, m: k })?.c_value)
        }
        _ => None,
    };
    Ok(SwapReport {
        n,
        k,
        samples,
        real_block,
        max_real_block_momentum: max_p,
        container,
        container_gamma,
        base_capacity,
        symplectic_defect: symplectic_defect(&swap_matrix(n, k)),
        squeezes: base_capacity.is_some_and(|c| c > container_gamma) && max_p == 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::camel::cylinder::BaseShape;

    #[test]
    fn disk_in_c2() {
        let cyl = CoisotropicCylinder::new(2, 1, BaseShape::Ball { r: 1.0 }, 2.0).unwrap();
        let rep = swap_counterexample(&cyl, 200, 4).unwrap();
        assert_eq!(rep.max_real_block_momentum, 0.0);
        assert_eq!(rep.container, ModelShape::CoisotropicSubspace { k: 0, n: 1 });
        assert_eq!(rep.container_gamma, 0.0);
        assert!(rep.squeezes);
        assert!(rep.symplectic_defect == 0.0);
    }

    #[test]
    fn large_k_and_involution() {
        let cyl = CoisotropicCylinder::new(3, 2, BaseShape::Ball { r: 1.0 }, 2.0).unwrap();
        let rep = swap_counterexample(&cyl, 50, 1).unwrap();
        assert_eq!(rep.container, ModelShape::CoisotropicSubspace { k: 1, n: 2 });
        assert!(rep.squeezes);
        let z: Vec<f64> = (0..6).map(|i| i as f64).collect();
        assert_eq!(swap(&swap(&z, 2), 1), z);
        assert_eq!(swap(&z, 0), z);
    }
}
