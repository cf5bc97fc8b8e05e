//! Gauss–Legendre rules and the spectral integration matrix used by the
//! collocation form of the Picard iteration.

use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    /// Nodes on `[-1, 1]`, ascending.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes mapped to `[0, 1]` and the matching weights.
    pub fn unit_nodes(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.nodes.iter().map(|x| 0.5 * (x + 1.0)).collect(),
            self.weights.iter().map(|w| 0.5 * w).collect(),
        )
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
    }

    /// `S[i][k] = int_0^{x_i} L_k(s) ds` on `[0, 1]`, where `L_k` is the
    /// Lagrange basis on the unit nodes. Integrating the interpolant of nodal
    /// values `F_k` from the panel start to node `i` is then `sum_k S[i][k] F_k`.
    pub fn integration_matrix(&self) -> Vec<Vec<f64>> {
        let (x, _) = self.unit_nodes();
        let p = x.len();
        let inner = GaussLegendre::new(p);
        (0..p)
            .map(|i| {
                (0..p)
                    .map(|k| inner.integrate(0.0, x[i], |s| lagrange(&x, k, s)))
                    .collect()
            })
            .collect()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn lagrange(nodes: &[f64], k: usize, s: f64) -> f64 {
    nodes
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, &xi)| (s - xi) / (nodes[k] - xi))
        .product()
}
