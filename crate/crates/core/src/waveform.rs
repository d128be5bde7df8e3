//! Chirp-carrier modulation with subcarrier compression.
//!
//! The transmit chain multiplexes a block of `N` symbols onto quadratic-phase
//! (chirp) carriers whose frequency spacing is compressed by a factor
//! `alpha <= 1`. At `alpha = 1` the carriers are orthogonal and the chain is
//! standard AFDM; with `c1 = c2 = 0` it degenerates further to plain OFDM.
//! Compression buys bandwidth at the price of inter-carrier interference,
//! which downstream modules cancel.
//!
//! The combined modulation matrix uses the entry convention
//!
//! ```text
//! A[m, n] = exp(-j·2π·(c1·n² + c2·m² + alpha·m·n/N)) / sqrt(N)
//! ```
//!
//! so that modulation is `s = Aᴴ·x` and demodulation is `y = A·r`; the two
//! are exact adjoints of each other. Matrices are built once per parameter
//! set and reused across frames.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::linalg::{CMatrix, CVector};
use crate::Error;

/// Waveform parameters: block size, compression factor, chirp rates, and
/// prefix length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationParams {
    /// Subcarrier count `N`.
    pub n: usize,
    /// Compression factor in `(0, 1]`; 1 is the orthogonal waveform.
    pub alpha: f64,
    /// Time-domain chirp rate (cycles per sample squared).
    pub c1: f64,
    /// Frequency-domain chirp rate.
    pub c2: f64,
    /// Chirp-periodic prefix length in samples.
    pub cpp_len: usize,
}

impl ModulationParams {
    pub fn new(n: usize, alpha: f64, c1: f64, c2: f64, cpp_len: usize) -> Result<Self, Error> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("block size N={n} must be >= 2")));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "compression factor alpha={alpha} must lie in (0, 1]"
            )));
        }
        if cpp_len >= n {
            return Err(Error::InvalidParameter(format!(
                "cpp_len={cpp_len} must be smaller than N={n}"
            )));
        }
        if !c1.is_finite() || !c2.is_finite() {
            return Err(Error::InvalidParameter("chirp rates must be finite".into()));
        }
        Ok(Self { n, alpha, c1, c2, cpp_len })
    }

    /// Conventional time-domain chirp rate giving full delay-Doppler
    /// separability: `(2·ceil(nu_max) + 1) / (2N)`.
    pub fn default_c1(n: usize, nu_max: f64) -> f64 {
        (2.0 * nu_max.abs().ceil() + 1.0) / (2.0 * n as f64)
    }

    /// Small fixed frequency-domain chirp rate, `1 / (2·N·π)`.
    pub fn default_c2(n: usize) -> f64 {
        1.0 / (2.0 * n as f64 * PI)
    }
}

fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

/// Diagonal chirp matrix `diag(exp(-j·2π·c·n²))`, unitary by construction.
pub fn build_chirp_matrix(n: usize, c: f64) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for k in 0..n {
        let phase = -2.0 * PI * c * (k * k) as f64;
        m.set(k, k, cis(phase));
    }
    m
}

/// Compressed DFT matrix with entries `exp(-j·2π·alpha·m·n/N)/sqrt(N)`.
/// Unitary exactly when `alpha = 1`.
pub fn build_fractional_dft(n: usize, alpha: f64) -> CMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    let mut f = CMatrix::zeros(n, n);
    for m in 0..n {
        for k in 0..n {
            let phase = -2.0 * PI * alpha * (m * k) as f64 / n as f64;
            f.set(m, k, cis(phase) * scale);
        }
    }
    f
}

/// Combined modulation matrix `A`, its adjoint, and the cached correlation
/// matrix `A·Aᴴ` that drives interference cancellation.
#[derive(Debug, Clone)]
pub struct ModMatrix {
    params: ModulationParams,
    a: CMatrix,
    a_h: CMatrix,
    corr: CMatrix,
}

impl ModMatrix {
    /// Builds `A = Λ_c2 · F_alpha · Λ_c1` and derived matrices.
    pub fn build(params: ModulationParams) -> Self {
        let lc1 = build_chirp_matrix(params.n, params.c1);
        let lc2 = build_chirp_matrix(params.n, params.c2);
        let f = build_fractional_dft(params.n, params.alpha);
        let a = lc2.matmul(&f).unwrap().matmul(&lc1).unwrap();
        let a_h = a.hermitian();
        let corr = a.matmul(&a_h).unwrap();
        Self { params, a, a_h, corr }
    }

    pub fn params(&self) -> &ModulationParams {
        &self.params
    }

    /// The demodulation matrix `A`.
    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    /// The modulation matrix `Aᴴ`.
    pub fn a_h(&self) -> &CMatrix {
        &self.a_h
    }
}

/// A transmit frame: DAFT-domain payload plus prefixed time samples.
#[derive(Debug, Clone)]
pub struct Frame {
    pub payload: CVector,
    pub time_samples: CVector,
}

fn expect_len(v: &CVector, expected: usize) -> Result<(), Error> {
    if v.len() != expected {
        return Err(Error::LengthMismatch { expected, got: v.len() });
    }
    Ok(())
}

/// Time-domain samples for a payload block: `s = Aᴴ·x`.
pub fn modulate(mm: &ModMatrix, x: &CVector) -> Result<CVector, Error> {
    expect_len(x, mm.params.n)?;
    Ok(mm.a_h.matvec(x)?)
}

/// Projects received samples back into the detection domain: `y = A·r`.
pub fn demodulate(mm: &ModMatrix, r: &CVector) -> Result<CVector, Error> {
    expect_len(r, mm.params.n)?;
    Ok(mm.a.matvec(r)?)
}

/// Prepends the chirp-periodic prefix.
///
/// Prefix sample `n ∈ [-L, -1]` is `s[N+n]·exp(-j·2π·c1·(N² + 2·N·n))`; with
/// `c1 = 0` this is an ordinary cyclic prefix.
pub fn add_cpp(params: &ModulationParams, s: &CVector) -> Result<CVector, Error> {
    expect_len(s, params.n)?;
    let n = params.n as i64;
    let l = params.cpp_len as i64;
    let mut out = Vec::with_capacity((n + l) as usize);
    for idx in -l..0 {
        let body = s.get((n + idx) as usize);
        let phase = -2.0 * PI * params.c1 * (n * n + 2 * n * idx) as f64;
        out.push(body * cis(phase));
    }
    out.extend_from_slice(s.as_slice());
    Ok(CVector::new(out)?)
}

/// Drops the prefix; exact inverse of [`add_cpp`].
pub fn remove_cpp(params: &ModulationParams, s_cpp: &CVector) -> Result<CVector, Error> {
    expect_len(s_cpp, params.n + params.cpp_len)?;
    Ok(CVector::new(s_cpp.as_slice()[params.cpp_len..].to_vec())?)
}

/// Modulates and prefixes a payload in one step.
pub fn build_frame(mm: &ModMatrix, x: &CVector) -> Result<Frame, Error> {
    let s = modulate(mm, x)?;
    let time_samples = add_cpp(&mm.params, &s)?;
    Ok(Frame { payload: x.clone(), time_samples })
}

/// Oversampled compressed-FDM reference generator,
/// `X[k] = Σ_n s[n]·exp(+j·2π·alpha·k·n/Q)/sqrt(Q)` with `Q = rho·N`.
///
/// Used only as a validation oracle for the critically sampled chain.
pub fn build_sefdm_reference(
    n: usize,
    alpha: f64,
    rho: usize,
    s: &CVector,
) -> Result<CVector, Error> {
    if rho < 1 {
        return Err(Error::InvalidParameter("oversampling factor rho must be >= 1".into()));
    }
    expect_len(s, n)?;
    let q = rho * n;
    let scale = 1.0 / (q as f64).sqrt();
    let mut out = Vec::with_capacity(q);
    for k in 0..q {
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, &sn) in s.as_slice().iter().enumerate() {
            let phase = 2.0 * PI * alpha * (k * idx) as f64 / q as f64;
            acc += sn * cis(phase);
        }
        out.push(acc * scale);
    }
    Ok(CVector::new(out)?)
}

/// Modulation correlation matrix `A·Aᴴ`.
///
/// Its diagonal is identically 1 (rows of `A` have unit norm) and the
/// off-diagonal entries follow a Dirichlet-kernel law in `alpha·(m - m')`;
/// they vanish at `alpha = 1`.
pub fn correlation_matrix(mm: &ModMatrix) -> &CMatrix {
    &mm.corr
}
