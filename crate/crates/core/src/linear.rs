//! Diagonal operators `B`, `B^{-1}`, `A`, the complex structure `J` and the
//! exact linear flow `e^{tJA}`, all acting plane by plane on `(a_j, b_j)`.

use std::collections::HashMap;
use std::sync::RwLock;

use crate::phase_space::PhaseVector;

/// `lambda_j = sqrt(j^2 + 1)`.
#[inline]
pub fn lambda(j: i64) -> f64 {
    ((j * j) as f64 + 1.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagOp {
    B,
    BInv,
    A,
}

impl DiagOp {
    /// Multipliers on `(a_j, b_j)`.
    fn factors(self, j: i64) -> (f64, f64) {
        let l = lambda(j);
        match self {
            DiagOp::B => (l, l),
            DiagOp::BInv => (1.0 / l, 1.0 / l),
            DiagOp::A => (l - 1.0 / l, l),
        }
    }
}

pub fn apply_diag(op: DiagOp, u: &PhaseVector) -> PhaseVector {
    let mut out = u.clone();
    let n = u.order() as i64;
    let (a, b) = out.coeffs_mut();
    for (i, j) in (-n..=n).enumerate() {
        let (fa, fb) = op.factors(j);
        a[i] *= fa;
        b[i] *= fb;
    }
    out
}

/// `J(a_j, b_j) = (b_j, -a_j)`, i.e. `J phi_j^+ = -phi_j^-`, `J phi_j^- = phi_j^+`.
pub fn apply_j(u: &PhaseVector) -> PhaseVector {
    let mut out = u.clone();
    let (a, b) = out.coeffs_mut();
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let (na, nb) = (*y, -*x);
        *x = na;
        *y = nb;
    }
    out
}

/// Half the quadratic part of the energy, `1/2 <Au, u>`.
pub fn quadratic_energy(u: &PhaseVector) -> f64 {
    0.5 * u
        .modes()
        .map(|j| {
            let l = lambda(j);
            (l - 1.0 / l) * u.a(j).powi(2) + l * u.b(j).powi(2)
        })
        .sum::<f64>()
}

/// The 2x2 matrix of `e^{tJA}` on the plane spanned by `phi_j^+, phi_j^-`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearBlock {
    pub j: i64,
    pub t: f64,
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl LinearBlock {
    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    #[inline]
    pub fn apply(&self, a: f64, b: f64) -> (f64, f64) {
        (self.m11 * a + self.m12 * b, self.m21 * a + self.m22 * b)
    }

    pub fn transpose(&self) -> Self {
        Self {
            m12: self.m21,
            m21: self.m12,
            ..*self
        }
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        let fro2 = self.m11.powi(2) + self.m12.powi(2) + self.m21.powi(2) + self.m22.powi(2);
        let det = self.det();
        let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
        (0.5 * (fro2 + disc)).sqrt()
    }

    /// Smallest singular value.
    pub fn min_singular_value(&self) -> f64 {
        let fro2 = self.m11.powi(2) + self.m12.powi(2) + self.m21.powi(2) + self.m22.powi(2);
        let det = self.det();
        let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
        (0.5 * (fro2 - disc)).max(0.0).sqrt()
    }
}

/// Exact solution operator of `a' = lambda b`, `b' = -(lambda - 1/lambda) a`.
///
/// For `j != 0` this is `[[cos jt, (lambda/j) sin jt], [-(j/lambda) sin jt, cos jt]]`;
/// the zero mode has no restoring term and shears: `[[1, t], [0, 1]]`.
pub fn exp_block(j: i64, t: f64) -> LinearBlock {
    if j == 0 {
        return LinearBlock {
            j,
            t,
            m11: 1.0,
            m12: t,
            m21: 0.0,
            m22: 1.0,
        };
    }
    let l = lambda(j);
    let jf = j as f64;
    let (s, c) = (jf * t).sin_cos();
    LinearBlock {
        j,
        t,
        m11: c,
        m12: (l / jf) * s,
        m21: -(jf / l) * s,
        m22: c,
    }
}

pub fn apply_exp_tja(u: &PhaseVector, t: f64) -> PhaseVector {
    let mut out = u.clone();
    let n = u.order() as i64;
    let (a, b) = out.coeffs_mut();
    for (i, j) in (-n..=n).enumerate() {
        let (na, nb) = exp_block(j, t).apply(a[i], b[i]);
        a[i] = na;
        b[i] = nb;
    }
    out
}

/// `max_{|j| <= n_max} ||e^{tJA}|_{plane j}||`.
pub fn group_norm_bound(t: f64, n_max: usize) -> f64 {
    let n = n_max as i64;
    (-n..=n).map(|j| exp_block(j, t).operator_norm()).fold(1.0, f64::max)
}

/// Memoised blocks keyed by `(j, t)`; safe for concurrent readers.
#[derive(Debug, Default)]
pub struct BlockCache {
    blocks: RwLock<HashMap<(i64, u64), LinearBlock>>,
}

impl BlockCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, j: i64, t: f64) -> LinearBlock {
        let key = (j, t.to_bits());
        if let Some(b) = self.blocks.read().expect("block cache poisoned").get(&key) {
            return *b;
        }
        let block = exp_block(j, t);
        self.blocks.write().expect("block cache poisoned").insert(key, block);
        block
    }

    pub fn len(&self) -> usize {
        self.blocks.read().expect("block cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Same result as [`apply_exp_tja`], reusing cached blocks.
    pub fn apply(&self, u: &PhaseVector, t: f64) -> PhaseVector {
        let mut out = u.clone();
        let n = u.order() as i64;
        let (a, b) = out.coeffs_mut();
        for (i, j) in (-n..=n).enumerate() {
            let (na, nb) = self.get(j, t).apply(a[i], b[i]);
            a[i] = na;
            b[i] = nb;
        }
        out
    }
}
