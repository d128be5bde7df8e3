//! ZF and MMSE transmit precoding.
//!
//! With channel knowledge at the transmitter, a linear precoder `P` is
//! applied so the receiver sees `A·H·P·Aᴴ·x + A·w`. Zero forcing inverts the
//! channel outright, `P = Hᴴ·(H·Hᴴ)⁻¹`, and errors out on near-singular
//! channels rather than silently regularizing: the resulting noise
//! amplification on weak channel modes is a behaviour the simulation is
//! meant to expose. MMSE adds the noise variance on the diagonal,
//! `P = Hᴴ·(H·Hᴴ + σ²·I)⁻¹`, trading residual distortion for bounded gains.
//!
//! Precoding removes the channel but not the interference induced by the
//! subcarrier compression: with perfect ZF, the noiseless receive signal is
//! exactly `(A·Aᴴ)·x`.

use num_complex::Complex64;

use crate::linalg::{solve_hermitian_system, CMatrix, CVector};
use crate::waveform::{modulate, ModMatrix};
use crate::Error;

/// Which linear precoder the transmitter applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecoderKind {
    None,
    Zf,
    Mmse,
}

/// Where the precoder acts.
///
/// `TimeDomain` multiplies the modulated time samples (`s = P·Aᴴ·x`), which
/// is the model the receiver equations assume. `DaftDomain` precodes the
/// symbol vector before modulation (`s = Aᴴ·P·x`) and exists for
/// experimentation only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecodeOrder {
    TimeDomain,
    DaftDomain,
}

/// A built precoder. `matrix` is `None` for [`PrecoderKind::None`].
#[derive(Debug, Clone)]
pub struct Precoder {
    pub kind: PrecoderKind,
    pub matrix: Option<CMatrix>,
    /// Noise variance the MMSE construction used.
    pub sigma2_used: Option<f64>,
}

impl Precoder {
    pub fn none() -> Self {
        Self {
            kind: PrecoderKind::None,
            matrix: None,
            sigma2_used: None,
        }
    }
}

/// Zero-forcing precoder `P = Hᴴ·(H·Hᴴ)⁻¹`.
///
/// Fails with a singularity error when `H·Hᴴ` is not positive definite
/// within the solver's condition limit; callers decide whether to redraw,
/// fall back, or abort.
pub fn build_zf(h: &CMatrix) -> Result<Precoder, Error> {
    build_regularized(h, 0.0, PrecoderKind::Zf)
}

/// MMSE precoder `P = Hᴴ·(H·Hᴴ + σ²·I)⁻¹`.
///
/// For `sigma2 = 0` this degenerates to zero forcing, including its failure
/// mode on singular channels.
pub fn build_mmse(h: &CMatrix, sigma2: f64) -> Result<Precoder, Error> {
    if sigma2 < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "noise variance must be nonnegative, got {sigma2}"
        )));
    }
    build_regularized(h, sigma2, PrecoderKind::Mmse)
}

fn build_regularized(h: &CMatrix, sigma2: f64, kind: PrecoderKind) -> Result<Precoder, Error> {
    if h.rows() != h.cols() {
        return Err(Error::InvalidParameter(format!(
            "channel matrix must be square, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let gram = h.matmul(&h.hermitian())?.add_scaled_identity(sigma2)?;
    let name = match kind {
        PrecoderKind::Zf => "ZF Gram matrix H·Hᴴ",
        _ => "MMSE Gram matrix H·Hᴴ + σ²I",
    };
    // P = Hᴴ·G⁻¹ computed as (G⁻¹·H)ᴴ, G Hermitian
    let y = solve_hermitian_system(&gram, h, name)?;
    Ok(Precoder {
        kind,
        matrix: Some(y.hermitian()),
        sigma2_used: (kind == PrecoderKind::Mmse).then_some(sigma2),
    })
}

/// Transmit samples for payload `x` under the given precoder and ordering.
///
/// `PrecoderKind::None` is the plain modulated signal `Aᴴ·x`.
pub fn apply_precoder(
    pre: &Precoder,
    mm: &ModMatrix,
    x: &CVector,
    order: PrecodeOrder,
) -> Result<CVector, Error> {
    match (&pre.matrix, order) {
        (None, _) => modulate(mm, x),
        (Some(p), PrecodeOrder::TimeDomain) => Ok(p.matvec(&modulate(mm, x)?)?),
        (Some(p), PrecodeOrder::DaftDomain) => {
            if x.len() != mm.params().n {
                return Err(Error::LengthMismatch {
                    expected: mm.params().n,
                    got: x.len(),
                });
            }
            modulate(mm, &p.matvec(x)?)
        }
    }
}
