//! Truncated phase space `E_n` of the string equation.
//!
//! A [`PhaseVector`] of order `n` stores the coefficients `a_j`, `b_j` for
//! `|j| <= n` on the symplectic Hilbert basis
//!
//! ```text
//! phi_j^+ = lambda_j^{-1/2} (phi_j, 0),    phi_j^- = lambda_j^{-1/2} (0, -phi_j),
//! phi_j(x) = sqrt(2) sin(jx)   (j > 0)
//!          = 1                 (j = 0)
//!          = sqrt(2) cos(|j|x) (j < 0)
//! ```
//!
//! with `lambda_j = sqrt(j^2 + 1)`. Under the `H^{1/2}` scalar product
//! `<u1, u2> = (1/2pi) int B u1 u2` this basis is orthonormal, so the E-norm is
//! the Euclidean norm of the coefficient arrays and the symplectic form is the
//! canonical one in each `(a_j, b_j)` plane.
//!
//! Coefficients are stored contiguously in the order `j = -n, ..., n`.

use std::cell::RefCell;
use std::f64::consts::{PI, SQRT_2};
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};
use std::path::Path;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::linear::lambda;

/// Integer mode index `j` with a checked range `|j| <= n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeIndex(i64);

impl ModeIndex {
    pub fn new(j: i64, n_max: usize) -> Result<Self> {
        if j.unsigned_abs() as usize > n_max {
            return Err(Error::OutOfRange {
                what: "mode index",
                detail: format!("|{j}| > {n_max}"),
            });
        }
        Ok(Self(j))
    }

    pub fn get(self) -> i64 {
        self.0
    }
}

/// Which coordinates a projection keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// `Pi_k`: both components for `|j| <= k`.
    Low(usize),
    /// `Pi_+^k`: `a_j` for `|j| >= k + 1`.
    Plus(usize),
    /// `Pi_-^k`: `b_j` for `|j| >= k + 1`.
    Minus(usize),
    /// `Pi^n`: both components for `|j| > n`.
    Tail(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector {
    order: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl PhaseVector {
    /// Builds a state from coefficient arrays ordered `j = -n..=n`.
    pub fn new(order: usize, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let expected = 2 * order + 1;
        for arr in [&a, &b] {
            if arr.len() != expected {
                return Err(Error::LengthMismatch {
                    expected,
                    found: arr.len(),
                });
            }
        }
        if a.iter().chain(&b).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("phase vector coefficients"));
        }
        Ok(Self { order, a, b })
    }

    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            a: vec![0.0; 2 * order + 1],
            b: vec![0.0; 2 * order + 1],
        }
    }

    /// The basis vector `phi_j^+` inside `E_order`.
    pub fn plus_basis(order: usize, j: i64) -> Result<Self> {
        let idx = ModeIndex::new(j, order)?;
        let mut v = Self::zeros(order);
        let i = v.index(idx.get());
        v.a[i] = 1.0;
        Ok(v)
    }

    /// The basis vector `phi_j^-` inside `E_order`.
    pub fn minus_basis(order: usize, j: i64) -> Result<Self> {
        let idx = ModeIndex::new(j, order)?;
        let mut v = Self::zeros(order);
        let i = v.index(idx.get());
        v.b[i] = 1.0;
        Ok(v)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Mode indices `-n..=n` in storage order.
    pub fn modes(&self) -> impl Iterator<Item = i64> {
        let n = self.order as i64;
        -n..=n
    }

    #[inline]
    fn index(&self, j: i64) -> usize {
        (j + self.order as i64) as usize
    }

    /// `a_j`, or zero outside the stored range.
    pub fn a(&self, j: i64) -> f64 {
        if j.unsigned_abs() as usize > self.order {
            0.0
        } else {
            self.a[self.index(j)]
        }
    }

    /// `b_j`, or zero outside the stored range.
    pub fn b(&self, j: i64) -> f64 {
        if j.unsigned_abs() as usize > self.order {
            0.0
        } else {
            self.b[self.index(j)]
        }
    }

    pub fn a_coeffs(&self) -> &[f64] {
        &self.a
    }

    pub fn b_coeffs(&self) -> &[f64] {
        &self.b
    }

    pub(crate) fn coeffs_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.a, &mut self.b)
    }

    /// Returns the same vector in `E_order`, zero-padding or dropping modes.
    pub fn resized(&self, order: usize) -> Self {
        let mut out = Self::zeros(order);
        let common = order.min(self.order) as i64;
        for j in -common..=common {
            let (src, dst) = (self.index(j), out.index(j));
            out.a[dst] = self.a[src];
            out.b[dst] = self.b[src];
        }
        out
    }

    pub fn e_norm(&self) -> f64 {
        self.a.iter().chain(&self.b).map(|x| x * x).sum::<f64>().sqrt()
    }

    /// E scalar product, zero-padding the shorter vector.
    pub fn dot(&self, other: &Self) -> f64 {
        let common = self.order.min(other.order) as i64;
        (-common..=common)
            .map(|j| self.a(j) * other.a(j) + self.b(j) * other.b(j))
            .sum()
    }

    /// Norm of `F_theta = H^{1/2-theta} x H^{1/2-theta}`; diagnostic only.
    pub fn f_theta_norm(&self, theta: f64) -> Result<f64> {
        if !(theta > 0.0 && theta < 0.5) {
            return Err(Error::OutOfRange {
                what: "theta",
                detail: format!("{theta} not in (0, 1/2)"),
            });
        }
        let s: f64 = self
            .modes()
            .map(|j| {
                let w = lambda(j).powf(-2.0 * theta);
                w * (self.a(j).powi(2) + self.b(j).powi(2))
            })
            .sum();
        Ok(s.sqrt())
    }

    /// `omega(self, other) = sum_j a_j(self) b_j(other) - b_j(self) a_j(other)`.
    pub fn symplectic_form(&self, other: &Self) -> f64 {
        let common = self.order.min(other.order) as i64;
        (-common..=common)
            .map(|j| self.a(j) * other.b(j) - self.b(j) * other.a(j))
            .sum()
    }

    pub fn project(&self, region: Region) -> Result<Self> {
        let bound = match region {
            Region::Low(k) | Region::Plus(k) | Region::Minus(k) | Region::Tail(k) => k,
        };
        if bound > self.order {
            return Err(Error::OutOfRange {
                what: "projection index",
                detail: format!("{bound} > order {}", self.order),
            });
        }
        let mut out = Self::zeros(self.order);
        for j in self.modes() {
            let i = self.index(j);
            let aj = j.unsigned_abs() as usize;
            let (keep_a, keep_b) = match region {
                Region::Low(k) => (aj <= k, aj <= k),
                Region::Plus(k) => (aj > k, false),
                Region::Minus(k) => (false, aj > k),
                Region::Tail(n) => (aj > n, aj > n),
            };
            if keep_a {
                out.a[i] = self.a[i];
            }
            if keep_b {
                out.b[i] = self.b[i];
            }
        }
        Ok(out)
    }

    /// `|U_l| = |a_l - i b_l|`.
    pub fn mode_amplitude(&self, l: i64) -> Result<f64> {
        let l = ModeIndex::new(l, self.order)?.get();
        Ok(self.a(l).hypot(self.b(l)))
    }

    /// `self + alpha * other`, zero-padding to the larger order.
    pub fn axpy(&self, alpha: f64, other: &Self) -> Self {
        let order = self.order.max(other.order);
        let mut out = self.resized(order);
        let off = (order - other.order) as usize;
        for (i, (oa, ob)) in other.a.iter().zip(&other.b).enumerate() {
            out.a[i + off] += alpha * oa;
            out.b[i + off] += alpha * ob;
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            order: self.order,
            a: self.a.iter().map(|x| x * s).collect(),
            b: self.b.iter().map(|x| x * s).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.a.iter().chain(&self.b).all(|x| x.is_finite())
    }

    /// Interleaved real coordinates `(a_{-n}, b_{-n}, ..., a_n, b_n)`.
    pub fn to_flat(&self) -> Vec<f64> {
        self.a.iter().zip(&self.b).flat_map(|(&x, &y)| [x, y]).collect()
    }

    pub fn from_flat(order: usize, z: &[f64]) -> Result<Self> {
        if z.len() != 2 * (2 * order + 1) {
            return Err(Error::LengthMismatch {
                expected: 2 * (2 * order + 1),
                found: z.len(),
            });
        }
        let a = z.iter().step_by(2).copied().collect();
        let b = z.iter().skip(1).step_by(2).copied().collect();
        Self::new(order, a, b)
    }

    /// CSV with a `# order=n` header and rows `j,a_j,b_j` at 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = format!("# order={}\nj,a_j,b_j\n", self.order);
        for j in self.modes() {
            let _ = writeln!(s, "{j},{:.16e},{:.16e}", self.a(j), self.b(j));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut order = None;
        let mut rows = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(v) = rest.trim().strip_prefix("order=") {
                    order = Some(
                        v.trim()
                            .parse::<usize>()
                            .map_err(|e| Error::Parse(format!("order header: {e}")))?,
                    );
                }
                continue;
            }
            if line.starts_with('j') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!("expected 3 fields in `{line}`")));
            }
            let j: i64 = fields[0]
                .parse()
                .map_err(|e| Error::Parse(format!("mode index `{}`: {e}", fields[0])))?;
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("coefficient `{s}`: {e}")))
            };
            rows.push((j, parse(fields[1])?, parse(fields[2])?));
        }
        let order = order.ok_or_else(|| Error::Parse("missing `# order=n` header".into()))?;
        let mut v = Self::zeros(order);
        if rows.len() != 2 * order + 1 {
            return Err(Error::LengthMismatch {
                expected: 2 * order + 1,
                found: rows.len(),
            });
        }
        for (j, a, b) in rows {
            let j = ModeIndex::new(j, order)?.get();
            let i = v.index(j);
            v.a[i] = a;
            v.b[i] = b;
        }
        if !v.is_finite() {
            return Err(Error::NonFinite("phase vector coefficients"));
        }
        Ok(v)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

impl Add for &PhaseVector {
    type Output = PhaseVector;
    fn add(self, rhs: &PhaseVector) -> PhaseVector {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &PhaseVector {
    type Output = PhaseVector;
    fn sub(self, rhs: &PhaseVector) -> PhaseVector {
        self.axpy(-1.0, rhs)
    }
}

impl Neg for &PhaseVector {
    type Output = PhaseVector;
    fn neg(self) -> PhaseVector {
        self.scaled(-1.0)
    }
}

impl Mul<f64> for &PhaseVector {
    type Output = PhaseVector;
    fn mul(self, s: f64) -> PhaseVector {
        self.scaled(s)
    }
}

/// Samples of `(u, v)` at `x_i = 2 pi i / m`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl GridFunction {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::LengthMismatch {
                expected: u.len(),
                found: v.len(),
            });
        }
        if !u.len().is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "grid size {} is not a power of two",
                u.len()
            )));
        }
        Ok(Self { u, v })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> {
        let m = self.len();
        (0..m).map(move |i| 2.0 * PI * i as f64 / m as f64)
    }
}

/// Smallest admissible grid for truncation `n`: a power of two `>= 4(n + 1)`.
pub fn min_grid_size(n: usize) -> usize {
    (4 * (n + 1)).next_power_of_two()
}

pub(crate) fn check_grid(m: usize, n: usize) -> Result<()> {
    let required = 4 * (n + 1);
    if m < required || !m.is_power_of_two() {
        return Err(Error::GridTooSmall { m, n, required });
    }
    Ok(())
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(m: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(m)
        } else {
            p.plan_fft_forward(m)
        }
    })
}

/// Coefficient of `cos(kx)` / `sin(kx)` attached to mode `j` in the function
/// `sum_j c_j lambda_j^{-1/2} phi_j(x)`.
#[inline]
fn trig_weight(j: i64) -> f64 {
    if j == 0 {
        1.0
    } else {
        SQRT_2 / lambda(j).sqrt()
    }
}

/// Evaluates `u(x) = sum a_j lambda_j^{-1/2} phi_j(x)` and
/// `v(x) = -sum b_j lambda_j^{-1/2} phi_j(x)` on `m` equispaced points.
pub fn to_grid(state: &PhaseVector, m: usize) -> Result<GridFunction> {
    let n = state.order;
    check_grid(m, n)?;
    // Pack u + i v into one complex spectrum: Z_k = U_k + i V_k.
    let mut spec = vec![Complex64::new(0.0, 0.0); m];
    let half = 0.5;
    let mut put = |k: usize, cos_c: f64, sin_c: f64, is_v: bool| {
        // real signal c cos(kx) + s sin(kx) has X_k = (c - i s)/2, X_{m-k} = conj.
        let xk = Complex64::new(half * cos_c, -half * sin_c);
        let xmk = xk.conj();
        let (zk, zmk) = if is_v {
            (Complex64::i() * xk, Complex64::i() * xmk)
        } else {
            (xk, xmk)
        };
        spec[k] += zk;
        spec[m - k] += zmk;
    };
    for k in 1..=n as i64 {
        let w = trig_weight(k);
        put(k as usize, w * state.a(-k), w * state.a(k), false);
        put(k as usize, -w * state.b(-k), -w * state.b(k), true);
    }
    spec[0] = Complex64::new(state.a(0), -state.b(0));
    plan(m, true).process(&mut spec);
    let u = spec.iter().map(|z| z.re).collect();
    let v = spec.iter().map(|z| z.im).collect();
    Ok(GridFunction { u, v })
}

/// Discrete inverse of [`to_grid`], keeping modes `|j| <= n`. Exact on
/// band-limited samples.
pub fn from_grid(grid: &GridFunction, n: usize) -> Result<PhaseVector> {
    let m = grid.len();
    check_grid(m, n)?;
    let mut z: Vec<Complex64> = grid
        .u
        .iter()
        .zip(&grid.v)
        .map(|(&u, &v)| Complex64::new(u, v))
        .collect();
    plan(m, false).process(&mut z);
    let scale = 1.0 / m as f64;
    let mut out = PhaseVector::zeros(n);
    for k in 0..=n {
        let zk = z[k] * scale;
        let zmk = z[(m - k) % m].conj() * scale;
        let uk = (zk + zmk) * 0.5;
        let vk = (zk - zmk) * Complex64::new(0.0, -0.5);
        if k == 0 {
            let i0 = out.index(0);
            out.a[i0] = uk.re;
            out.b[i0] = -vk.re;
            continue;
        }
        // X_k = (c - i s)/2  =>  c = 2 Re X_k, s = -2 Im X_k
        let kk = k as i64;
        let w = 1.0 / trig_weight(kk);
        let (ic, is) = (out.index(-kk), out.index(kk));
        out.a[ic] = 2.0 * uk.re * w;
        out.a[is] = -2.0 * uk.im * w;
        out.b[ic] = -2.0 * vk.re * w;
        out.b[is] = 2.0 * vk.im * w;
    }
    Ok(out)
}
