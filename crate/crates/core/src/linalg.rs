//! Dense complex linear algebra for the simulation pipeline.
//!
//! Everything here is double precision and sized for blocks of at most a few
//! hundred subcarriers, so the kernels are straightforward O(N³) loops:
//! matrix products, conjugate transpose, a Cholesky solver for Hermitian
//! positive-definite systems, and a one-sided Jacobi SVD that backs the
//! Moore-Penrose pseudo-inverse and condition numbers.
//!
//! Linear systems are always solved through the factorization; explicit
//! inverses are never formed. Solves estimate the condition number of the
//! coefficient matrix and refuse to proceed past [`CONDITION_LIMIT`], since a
//! zero-forcing precoder built on a near-singular channel would otherwise
//! turn quietly into noise amplification.

use num_complex::Complex64;
use thiserror::Error;

/// Condition-number cutoff beyond which a Hermitian solve is treated as
/// singular. Chosen to leave ~4 decimal digits of double-precision headroom.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch in {context}: {left} vs {right}")]
    DimensionMismatch {
        context: &'static str,
        left: String,
        right: String,
    },
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("{name} is singular or not positive definite (condition estimate {cond:.3e})")]
    Singular { name: String, cond: f64 },
}

/// Dense complex matrix, row-major, immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

/// Dense complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CVector {
    data: Vec<Complex64>,
}

impl CMatrix {
    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                context: "CMatrix::new",
                left: format!("{rows}x{cols}"),
                right: format!("{} entries", data.len()),
            });
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c] = v;
    }

    /// Contiguous view of row `r`.
    #[inline]
    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Standard complex matrix product.
    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                context: "matmul",
                left: format!("{}x{}", self.rows, self.cols),
                right: format!("{}x{}", other.rows, other.cols),
            });
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.data[i * self.cols + k];
                if aik.re == 0.0 && aik.im == 0.0 {
                    continue;
                }
                let brow = other.row(k);
                let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += aik * b;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn matvec(&self, v: &CVector) -> Result<CVector, LinalgError> {
        if self.cols != v.len() {
            return Err(LinalgError::DimensionMismatch {
                context: "matvec",
                left: format!("{}x{}", self.rows, self.cols),
                right: format!("len {}", v.len()),
            });
        }
        let mut out = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, x) in self.row(r).iter().zip(v.as_slice()) {
                acc += a * x;
            }
            out.push(acc);
        }
        Ok(CVector { data: out })
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c].conj();
            }
        }
        out
    }

    /// sqrt of the sum of squared entry magnitudes.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix, LinalgError> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix, LinalgError> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &CMatrix,
        context: &'static str,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<CMatrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                context,
                left: format!("{}x{}", self.rows, self.cols),
                right: format!("{}x{}", other.rows, other.cols),
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    /// `self + s·I`; requires a square matrix.
    pub fn add_scaled_identity(&self, s: f64) -> Result<CMatrix, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::DimensionMismatch {
                context: "add_scaled_identity",
                left: format!("{}x{}", self.rows, self.cols),
                right: "square".to_string(),
            });
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            out.data[i * self.cols + i] += s;
        }
        Ok(out)
    }
}

impl CVector {
    pub fn new(data: Vec<Complex64>) -> Result<Self, LinalgError> {
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { data })
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            data: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> Complex64) -> Result<Self, LinalgError> {
        Self::new((0..len).map(|i| f(i)).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> Complex64 {
        self.data[i]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn norm(&self) -> f64 {
        self.energy().sqrt()
    }

    /// Sum of squared magnitudes.
    pub fn energy(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn sub(&self, other: &CVector) -> Result<CVector, LinalgError> {
        if self.len() != other.len() {
            return Err(LinalgError::DimensionMismatch {
                context: "vector sub",
                left: format!("len {}", self.len()),
                right: format!("len {}", other.len()),
            });
        }
        Ok(CVector {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, s: Complex64) -> CVector {
        CVector {
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Cholesky factorization and Hermitian solves
// ---------------------------------------------------------------------------

/// Lower-triangular Cholesky factor of a Hermitian positive-definite matrix.
struct Cholesky {
    n: usize,
    l: Vec<Complex64>, // row-major lower triangle, full n x n storage
}

impl Cholesky {
    /// Factors `a = L·Lᴴ` reading the lower triangle of `a`.
    fn factor(a: &CMatrix) -> Option<Cholesky> {
        let n = a.rows();
        if n != a.cols() {
            return None;
        }
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut diag = a.get(j, j).re;
            for k in 0..j {
                diag -= l[j * n + k].norm_sqr();
            }
            if !(diag > 0.0) || !diag.is_finite() {
                return None;
            }
            let ljj = diag.sqrt();
            l[j * n + j] = Complex64::new(ljj, 0.0);
            for i in (j + 1)..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / ljj;
            }
        }
        Some(Cholesky { n, l })
    }

    /// Solves `L·Lᴴ·x = b` in place.
    fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.n;
        // forward: L y = b
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[i * n + k] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
        // backward: Lᴴ x = y
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i].conj() * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
    }
}

/// Deterministic start vector for the power iterations; a mild ramp keeps it
/// from being orthogonal to any structured eigenvector.
fn probe_vector(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|i| {
            let t = (i as u64).wrapping_mul(2_654_435_761) % 97;
            Complex64::new(1.0 + 0.01 * t as f64 / 97.0, 0.005 * (i % 7) as f64)
        })
        .collect()
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
    n
}

/// Estimates the condition number of a Hermitian positive-definite matrix by
/// power iteration (largest eigenvalue) and inverse iteration through the
/// Cholesky factor (smallest). Fixed iteration count keeps it deterministic.
fn condition_estimate_hpd(a: &CMatrix, chol: &Cholesky) -> f64 {
    let n = a.rows();
    const ITERS: usize = 24;

    let mut v = probe_vector(n);
    normalize(&mut v);
    let mut lambda_max = 0.0;
    for _ in 0..ITERS {
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        for (i, wi) in w.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                *wi += a.get(i, j) * vj;
            }
        }
        lambda_max = normalize(&mut w);
        v = w;
    }

    let mut u = probe_vector(n);
    normalize(&mut u);
    let mut inv_lambda_min = 0.0;
    for _ in 0..ITERS {
        let mut w = u.clone();
        chol.solve_in_place(&mut w);
        inv_lambda_min = normalize(&mut w);
        u = w;
    }
    if inv_lambda_min <= 0.0 {
        return f64::INFINITY;
    }
    lambda_max * inv_lambda_min
}

/// Solves `a·X = b` for Hermitian positive-definite `a` via Cholesky.
///
/// `name` identifies the coefficient matrix in singularity errors. Fails if
/// the factorization breaks down or the condition estimate exceeds
/// [`CONDITION_LIMIT`].
pub fn solve_hermitian_system(
    a: &CMatrix,
    b: &CMatrix,
    name: &str,
) -> Result<CMatrix, LinalgError> {
    if a.rows() != a.cols() {
        return Err(LinalgError::DimensionMismatch {
            context: "solve_hermitian_system",
            left: format!("{}x{}", a.rows(), a.cols()),
            right: "square".to_string(),
        });
    }
    if a.cols() != b.rows() {
        return Err(LinalgError::DimensionMismatch {
            context: "solve_hermitian_system",
            left: format!("{}x{}", a.rows(), a.cols()),
            right: format!("{}x{}", b.rows(), b.cols()),
        });
    }
    let chol = Cholesky::factor(a).ok_or_else(|| LinalgError::Singular {
        name: name.to_string(),
        cond: f64::INFINITY,
    })?;
    let cond = condition_estimate_hpd(a, &chol);
    if cond > CONDITION_LIMIT {
        return Err(LinalgError::Singular {
            name: name.to_string(),
            cond,
        });
    }
    let n = a.rows();
    let mut out = CMatrix::zeros(n, b.cols());
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for c in 0..b.cols() {
        for r in 0..n {
            col[r] = b.get(r, c);
        }
        chol.solve_in_place(&mut col);
        for r in 0..n {
            out.set(r, c, col[r]);
        }
    }
    Ok(out)
}

/// Vector right-hand-side convenience wrapper around [`solve_hermitian_system`].
pub fn solve_hermitian_vec(
    a: &CMatrix,
    b: &CVector,
    name: &str,
) -> Result<CVector, LinalgError> {
    if a.rows() != a.cols() {
        return Err(LinalgError::DimensionMismatch {
            context: "solve_hermitian_vec",
            left: format!("{}x{}", a.rows(), a.cols()),
            right: "square".to_string(),
        });
    }
    if a.cols() != b.len() {
        return Err(LinalgError::DimensionMismatch {
            context: "solve_hermitian_vec",
            left: format!("{}x{}", a.rows(), a.cols()),
            right: format!("len {}", b.len()),
        });
    }
    let chol = Cholesky::factor(a).ok_or_else(|| LinalgError::Singular {
        name: name.to_string(),
        cond: f64::INFINITY,
    })?;
    let cond = condition_estimate_hpd(a, &chol);
    if cond > CONDITION_LIMIT {
        return Err(LinalgError::Singular {
            name: name.to_string(),
            cond,
        });
    }
    let mut x = b.as_slice().to_vec();
    chol.solve_in_place(&mut x);
    Ok(CVector { data: x })
}

// ---------------------------------------------------------------------------
// SVD (one-sided Jacobi) and pseudo-inverse
// ---------------------------------------------------------------------------

/// Singular value decomposition `a = U·diag(sigma)·Vᴴ`.
///
/// `sigma` is sorted descending. Columns of `u` beyond the numerical rank are
/// zero (they never enter a reconstruction or pseudo-inverse).
pub struct Svd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

/// One-sided Jacobi SVD. Robust for the small dense matrices used here.
pub fn svd(a: &CMatrix) -> Svd {
    if a.rows() < a.cols() {
        // factor the adjoint and swap the roles of U and V
        let s = svd(&a.hermitian());
        return Svd {
            u: s.v,
            sigma: s.sigma,
            v: s.u,
        };
    }
    let m = a.rows();
    let n = a.cols();
    // column-major working copies of W (= A·V) and V
    let mut w: Vec<Vec<Complex64>> = (0..n).map(|c| (0..m).map(|r| a.get(r, c)).collect()).collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|c| {
            (0..n)
                .map(|r| Complex64::new(if r == c { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect();

    const TOL: f64 = 1e-14;
    const MAX_SWEEPS: usize = 64;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let app: f64 = w[p].iter().map(|z| z.norm_sqr()).sum();
                let aqq: f64 = w[q].iter().map(|z| z.norm_sqr()).sum();
                let apq: Complex64 = w[p]
                    .iter()
                    .zip(&w[q])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let g = apq.norm();
                if g <= TOL * (app * aqq).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                // absorb the phase so the 2x2 Gram block becomes real
                let phase = apq / g;
                let tau = (aqq - app) / (2.0 * g);
                let t = tau.signum_or_one() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for i in 0..m {
                    let wp = w[p][i];
                    let wq = w[q][i] * phase.conj();
                    w[p][i] = cs * wp - sn * wq;
                    w[q][i] = sn * wp + cs * wq;
                }
                for i in 0..n {
                    let vp = v[p][i];
                    let vq = v[q][i] * phase.conj();
                    v[p][i] = cs * vp - sn * vq;
                    v[q][i] = sn * vp + cs * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = w
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let mut u = CMatrix::zeros(m, n);
    let mut vm = CMatrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (k, &c) in order.iter().enumerate() {
        let s = norms[c];
        sigma.push(s);
        if s > 0.0 {
            for r in 0..m {
                u.set(r, k, w[c][r] / s);
            }
        }
        for r in 0..n {
            vm.set(r, k, v[c][r]);
        }
    }
    Svd { u, sigma, v: vm }
}

trait SignumOrOne {
    fn signum_or_one(self) -> f64;
}

impl SignumOrOne for f64 {
    // signum with sign(0) = +1, the convention the Jacobi rotation wants
    fn signum_or_one(self) -> f64 {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

/// Moore-Penrose pseudo-inverse via SVD with the standard rank cutoff
/// `max(m,n)·eps·sigma_max`.
pub fn pseudo_inverse(a: &CMatrix) -> CMatrix {
    let s = svd(a);
    let smax = s.sigma.first().copied().unwrap_or(0.0);
    let tol = smax * (a.rows().max(a.cols()) as f64) * f64::EPSILON;
    // A⁺ = V·diag(1/sigma)·Uᴴ over singular values above the cutoff
    let mut out = CMatrix::zeros(a.cols(), a.rows());
    for (k, &sk) in s.sigma.iter().enumerate() {
        if sk <= tol || sk == 0.0 {
            continue;
        }
        let inv = 1.0 / sk;
        for i in 0..a.cols() {
            let vik = s.v.get(i, k) * inv;
            for j in 0..a.rows() {
                let val = out.get(i, j) + vik * s.u.get(j, k).conj();
                out.set(i, j, val);
            }
        }
    }
    out
}

/// 2-norm condition number from the SVD; infinite for singular input.
pub fn condition_number(a: &CMatrix) -> f64 {
    let s = svd(a);
    let smax = s.sigma.first().copied().unwrap_or(0.0);
    let smin = s.sigma.last().copied().unwrap_or(0.0);
    if smin == 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}

/// Largest singular value without forming the full SVD.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    svd(a).sigma.first().copied().unwrap_or(0.0)
}
