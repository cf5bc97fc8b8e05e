//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

/// Dormand-Prince 5(4) with standard step control. `f(t, y) -> y'`.
pub fn dopri45<const N: usize, F>(f: F, y0: [f64; N], t0: f64, t1: f64, tol: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let dir = (t1 - t0).signum();
    let mut y = y0;
    let mut t = t0;
    let mut h = dir * 1e-3 * (t1 - t0).abs().max(1e-3);
    let mut k = [[0.0; N]; 7];
    while dir * (t1 - t) > 0.0 {
        if dir * (t + h - t1) > 0.0 {
            h = t1 - t;
        }
        for s in 0..7 {
            let mut ys = y;
            for (i, v) in ys.iter_mut().enumerate() {
                *v += h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        let mut y5 = y;
        let mut err = 0.0;
        for i in 0..N {
            y5[i] += h * (0..7).map(|s| B5[s] * k[s][i]).sum::<f64>();
            let e = h * (0..7).map(|s| (B5[s] - B4[s]) * k[s][i]).sum::<f64>();
            err += (e / (tol * (1.0 + y[i].abs().max(y5[i].abs())))).powi(2);
        }
        let err = (err / N as f64).sqrt();
        if err <= 1.0 {
            t += h;
            y = y5;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    y
}

/// Circumcenter of affinely independent points by Gaussian elimination on
/// `2 (p_i - p_0) . c = |p_i|^2 - |p_0|^2` restricted to their span.
fn circumball(pts: &[&[f64]]) -> Option<(Vec<f64>, f64)> {
    let p0 = pts[0];
    let m = pts.len() - 1;
    let diffs: Vec<Vec<f64>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    let mut a: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row: Vec<f64> = (0..m).map(|j| 2.0 * dot(&diffs[i], &diffs[j])).collect();
            row.push(dot(&diffs[i], &diffs[i]));
            row
        })
        .collect();
    for col in 0..m {
        let piv = (col..m).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        for r in 0..m {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=m {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let mut center = p0.to_vec();
    for i in 0..m {
        let coef = a[i][m] / a[i][i];
        for (c, d) in center.iter_mut().zip(&diffs[i]) {
            *c += coef * d;
        }
    }
    let r = pts.iter().map(|p| dot_dist(p, &center)).fold(0.0, f64::max);
    Some((center, r))
}

fn dot_dist(p: &[f64], c: &[f64]) -> f64 {
    p.iter().zip(c).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
}

/// Smallest ball through some subset of at most `d + 1` points that covers
/// them all. Exponential; only for tiny inputs.
pub fn brute_force_meb(points: &[Vec<f64>]) -> f64 {
    let d = points[0].len();
    let n = points.len();
    let mut best = f64::INFINITY;
    let mut subset = Vec::new();
    fn rec(start: usize, n: usize, max: usize, subset: &mut Vec<usize>, points: &[Vec<f64>], best: &mut f64) {
        if !subset.is_empty() {
            let refs: Vec<&[f64]> = subset.iter().map(|&i| points[i].as_slice()).collect();
            if let Some((c, r)) = circumball(&refs) {
                if r < *best && points.iter().all(|p| dot_dist(p, &c) <= r * (1.0 + 1e-9) + 1e-12) {
                    *best = r;
                }
            }
        }
        if subset.len() == max {
            return;
        }
        for i in start..n {
            subset.push(i);
            rec(i + 1, n, max, subset, points, best);
            subset.pop();
        }
    }
    rec(0, n, d + 1, &mut subset, points, &mut best);
    best
}
