use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Compact base `X` in `C^k`, in interleaved real coordinates `(q1, p1, ..., qk, pk)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum BaseShape {
    Ball {
        r: f64,
    },
    Polydisk {
        radii: Vec<f64>,
    },
    /// `S^1(r)^k`.
    Torus {
        r: f64,
    },
    PointCloud {
        points: Vec<Vec<f64>>,
    },
}

impl BaseShape {
    /// Radius of a centred ball containing the base in `C^k`.
    pub fn outer_radius(&self, k: usize) -> f64 {
        match self {
            BaseShape::Ball { r } => *r,
            BaseShape::Polydisk { radii } => radii.iter().map(|r| r * r).sum::<f64>().sqrt(),
            BaseShape::Torus { r } => r * (k as f64).sqrt(),
            BaseShape::PointCloud { points } => points
                .iter()
                .map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt())
                .fold(0.0, f64::max),
        }
    }

    fn validate(&self, k: usize) -> Result<()> {
        let positive = |r: f64| r > 0.0 && r.is_finite();
        match self {
            BaseShape::Ball { r } | BaseShape::Torus { r } if !positive(*r) => {
                Err(Error::InvalidArgument(format!("base radius {r} must be positive")))
            }
            BaseShape::Polydisk { radii } if radii.len() != k => Err(Error::LengthMismatch {
                expected: k,
                found: radii.len(),
            }),
            BaseShape::Polydisk { radii } if !radii.iter().all(|&r| positive(r)) => {
                Err(Error::InvalidArgument("polydisk radii must be positive".into()))
            }
            BaseShape::PointCloud { points } if points.is_empty() => {
                Err(Error::InvalidArgument("point cloud base is empty".into()))
            }
            BaseShape::PointCloud { points } => match points.iter().find(|p| p.len() != 2 * k) {
                Some(p) => Err(Error::LengthMismatch {
                    expected: 2 * k,
                    found: p.len(),
                }),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }

    /// Membership of a point of `R^{2k}` up to `tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        let planar = |i: usize| x[2 * i].hypot(x[2 * i + 1]);
        match self {
            BaseShape::Ball { r } => x.iter().map(|v| v * v).sum::<f64>().sqrt() <= r + tol,
            BaseShape::Polydisk { radii } => radii.iter().enumerate().all(|(i, r)| planar(i) <= r + tol),
            BaseShape::Torus { r } => (0..x.len() / 2).all(|i| (planar(i) - r).abs() <= tol),
            BaseShape::PointCloud { points } => points
                .iter()
                .any(|p| p.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() <= tol),
        }
    }

    /// One random point of the base in `R^{2k}`.
    pub fn sample<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Vec<f64> {
        match self {
            BaseShape::Ball { r } => {
                let g: Vec<f64> = (0..2 * k).map(|_| rng.sample(StandardNormal)).collect();
                let norm = g.iter().map(|v: &f64| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
                let rho = r * rng.random::<f64>().powf(1.0 / (2 * k) as f64);
                g.iter().map(|v| v * rho / norm).collect()
            }
            BaseShape::Polydisk { radii } => radii
                .iter()
                .flat_map(|r| {
                    let rho = r * rng.random::<f64>().sqrt();
                    let th = rng.random_range(0.0..std::f64::consts::TAU);
                    [rho * th.cos(), rho * th.sin()]
                })
                .collect(),
            BaseShape::Torus { r } => (0..k)
                .flat_map(|_| {
                    let th = rng.random_range(0.0..std::f64::consts::TAU);
                    [r * th.cos(), r * th.sin()]
                })
                .collect(),
            BaseShape::PointCloud { points } => points[rng.random_range(0..points.len())].clone(),
        }
    }
}

/// `X x R^{n-k}` inside `C^k x C^{n-k}`: base in the first `k` complex
/// coordinates, real fiber `q_{k+1..n}` (with `p_{k+1..n} = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoisotropicCylinder {
    pub n: usize,
    pub k: usize,
    pub base: BaseShape,
    /// Half-width of the box fiber coordinates are sampled from.
    pub fiber_box: f64,
}

impl CoisotropicCylinder {
    pub fn new(n: usize, k: usize, base: BaseShape, fiber_box: f64) -> Result<Self> {
        if k == 0 || k >= n {
            return Err(Error::InvalidArgument(format!("need 1 <= k < n, got k = {k}, n = {n}")));
        }
        if !(fiber_box > 0.0 && fiber_box.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "fiber box {fiber_box} must be positive"
            )));
        }
        base.validate(k)?;
        Ok(Self { n, k, base, fiber_box })
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// Radius of a centred ball containing the base.
    pub fn base_radius(&self) -> f64 {
        self.base.outer_radius(self.k)
    }

    /// Base coordinates of `z`, i.e. the first `2k` entries.
    pub fn base_part<'a>(&self, z: &'a [f64]) -> &'a [f64] {
        &z[..2 * self.k]
    }

    /// Fiber positions `q_{k+1..n}`.
    pub fn fiber_q(&self, z: &[f64]) -> Vec<f64> {
        (self.k..self.n).map(|i| z[2 * i]).collect()
    }

    /// Assembles a point from base coordinates and fiber positions.
    pub fn point(&self, base: &[f64], fiber: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; self.dim()];
        z[..2 * self.k].copy_from_slice(base);
        for (i, q) in fiber.iter().enumerate() {
            z[2 * (self.k + i)] = *q;
        }
        z
    }

    pub fn contains(&self, z: &[f64], tol: f64) -> bool {
        z.len() == self.dim()
            && self.base.contains(self.base_part(z), tol)
            && (self.k..self.n).all(|i| z[2 * i + 1].abs() <= tol)
    }
}

/// `count` seeded samples of the cylinder, fiber positions uniform in `[-L, L]`.
pub fn sample_cylinder(cyl: &CoisotropicCylinder, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let base = cyl.base.sample(cyl.k, &mut rng);
            let fiber: Vec<f64> = (cyl.k..cyl.n)
                .map(|_| rng.random_range(-cyl.fiber_box..=cyl.fiber_box))
                .collect();
            cyl.point(&base, &fiber)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_samples_lie_in_cylinder() {
        let cyl = CoisotropicCylinder::new(2, 1, BaseShape::Ball { r: 1.0 }, 3.0).unwrap();
        let pts = sample_cylinder(&cyl, 500, 11);
        for z in &pts {
            assert!(z[0].hypot(z[1]) <= 1.0);
            assert!(z[2].abs() <= 3.0);
            assert_eq!(z[3], 0.0);
            assert!(cyl.contains(z, 0.0));
        }
        assert!(sample_cylinder(&cyl, 0, 11).is_empty());
        assert_eq!(pts, sample_cylinder(&cyl, 500, 11));
    }

    #[test]
    fn other_bases() {
        let torus = CoisotropicCylinder::new(3, 2, BaseShape::Torus { r: 0.5 }, 1.0).unwrap();
        for z in sample_cylinder(&torus, 50, 1) {
            assert!(torus.contains(&z, 1e-12));
        }
        assert!((torus.base_radius() - 0.5 * 2f64.sqrt()).abs() < 1e-15);
        let poly = BaseShape::Polydisk { radii: vec![1.0, 2.0] };
        let cyl = CoisotropicCylinder::new(3, 2, poly, 1.0).unwrap();
        for z in sample_cylinder(&cyl, 50, 2) {
            assert!(cyl.contains(&z, 0.0));
        }
        let cloud = BaseShape::PointCloud {
            points: vec![vec![0.1, 0.2], vec![-0.3, 0.0]],
        };
        let cyl = CoisotropicCylinder::new(2, 1, cloud, 1.0).unwrap();
        for z in sample_cylinder(&cyl, 20, 3) {
            assert!(cyl.contains(&z, 0.0));
        }
    }

    #[test]
    fn invalid_cylinders() {
        assert!(CoisotropicCylinder::new(2, 2, BaseShape::Ball { r: 1.0 }, 1.0).is_err());
        assert!(CoisotropicCylinder::new(2, 1, BaseShape::Ball { r: -1.0 }, 1.0).is_err());
        assert!(CoisotropicCylinder::new(2, 1, BaseShape::Ball { r: 1.0 }, 0.0).is_err());
        let bad = BaseShape::Polydisk { radii: vec![1.0, 1.0] };
        assert!(CoisotropicCylinder::new(2, 1, bad, 1.0).is_err());
    }
}
