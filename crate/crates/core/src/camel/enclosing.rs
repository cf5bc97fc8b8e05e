//! Smallest enclosing ball in any dimension, Welzl's algorithm with the
//! move-to-front heuristic. Recursion depth is bounded by `d + 1`.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    fn contains(&self, p: &[f64]) -> bool {
        if self.radius < 0.0 {
            return false;
        }
        let d2: f64 = self.center.iter().zip(p).map(|(c, x)| (c - x).powi(2)).sum();
        d2.sqrt() <= self.radius * (1.0 + 1e-12) + 1e-14
    }
}

/// Smallest ball whose boundary passes through all support points, i.e. the
/// circumsphere within their affine hull.
fn circumball(support: &[&[f64]], dim: usize) -> Ball {
    match support.len() {
        0 => Ball {
            center: vec![0.0; dim],
            radius: -1.0,
        },
        1 => Ball {
            center: support[0].to_vec(),
            radius: 0.0,
        },
        m => {
            let p0 = support[0];
            let diffs: Vec<Vec<f64>> = support[1..]
                .iter()
                .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
                .collect();
            let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
            let gram = DMatrix::from_fn(m - 1, m - 1, |i, j| 2.0 * dot(&diffs[i], &diffs[j]));
            let rhs = DVector::from_fn(m - 1, |i, _| dot(&diffs[i], &diffs[i]));
            let coeffs = gram
                .clone()
                .svd(true, true)
                .solve(&rhs, 1e-14 * gram.amax().max(f64::MIN_POSITIVE))
                .unwrap_or_else(|_| DVector::zeros(m - 1));
            let mut center = p0.to_vec();
            for (c, d) in coeffs.iter().zip(&diffs) {
                for (x, y) in center.iter_mut().zip(d) {
                    *x += c * y;
                }
            }
            let radius = support
                .iter()
                .map(|p| p.iter().zip(&center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
                .fold(0.0, f64::max);
            Ball { center, radius }
        }
    }
}

fn move_to_front(pts: &mut Vec<Vec<f64>>, end: usize, support: &mut Vec<Vec<f64>>, dim: usize) -> Ball {
    let refs: Vec<&[f64]> = support.iter().map(|p| p.as_slice()).collect();
    let mut ball = circumball(&refs, dim);
    if support.len() == dim + 1 {
        return ball;
    }
    for i in 0..end {
        if !ball.contains(&pts[i]) {
            support.push(pts[i].clone());
            ball = move_to_front(pts, i, support, dim);
            support.pop();
            let p = pts.remove(i);
            pts.insert(0, p);
        }
    }
    ball
}

/// Exact smallest enclosing ball of a non-empty point set.
pub fn min_enclosing_ball(points: &[Vec<f64>]) -> Result<Ball> {
    let first = points
        .first()
        .ok_or_else(|| Error::InvalidArgument("no points".into()))?;
    let dim = first.len();
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::LengthMismatch {
            expected: dim,
            found: p.len(),
        });
    }
    if points.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("enclosing ball input"));
    }
    let mut pts = points.to_vec();
    pts.shuffle(&mut ChaCha8Rng::seed_from_u64(0x3eb));
    let end = pts.len();
    let mut ball = move_to_front(&mut pts, end, &mut Vec::new(), dim);
    // Round-off can leave an input point a hair outside; grow to cover it.
    for p in points {
        let d: f64 = p
            .iter()
            .zip(&ball.center)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        ball.radius = ball.radius.max(d);
    }
    Ok(ball)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn examples() {
        let one = min_enclosing_ball(&[vec![0.3, -0.2]]).unwrap();
        assert_eq!(one.radius, 0.0);
        let square = vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![-1.0, 1.0], vec![-1.0, -1.0]];
        let b = min_enclosing_ball(&square).unwrap();
        assert!((b.radius - 2f64.sqrt()).abs() < 1e-14);
        assert!(b.center.iter().all(|c| c.abs() < 1e-14));
        assert!(min_enclosing_ball(&[]).is_err());
        assert!(min_enclosing_ball(&[vec![0.0, 0.0], vec![1.0]]).is_err());
    }

    #[test]
    fn random_disk_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<Vec<f64>> = (0..1000)
            .map(|_| {
                let r = rng.random::<f64>().sqrt();
                let t = rng.random_range(0.0..std::f64::consts::TAU);
                vec![r * t.cos(), r * t.sin()]
            })
            .collect();
        let b = min_enclosing_ball(&pts).unwrap();
        let max_norm = pts.iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max);
        assert!(b.radius <= 1.0 + 1e-12);
        assert!(b.radius >= 0.5 * max_norm);
        for p in &pts {
            assert!(p[0].hypot(p[1]) <= 1.0);
            let d = (p[0] - b.center[0]).hypot(p[1] - b.center[1]);
            assert!(d <= b.radius + 1e-12);
        }
    }

    #[test]
    fn higher_dimension_and_degenerate_sets() {
        let collinear = vec![vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 1.0], vec![2.0, 2.0, 2.0]];
        let b = min_enclosing_ball(&collinear).unwrap();
        assert!((b.radius - 3f64.sqrt()).abs() < 1e-12);
        let dup = vec![vec![1.0, 2.0]; 5];
        assert_eq!(min_enclosing_ball(&dup).unwrap().radius, 0.0);
        let simplex: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let b = min_enclosing_ball(&simplex).unwrap();
        assert!((b.radius - (0.75f64).sqrt()).abs() < 1e-12);
    }
}
