//! Delay-Doppler multipath channel and calibrated AWGN.
//!
//! A realization is a small set of discrete paths, each with a complex gain,
//! an integer sample delay, and a Doppler shift in normalized cycles per
//! block. Per-path Doppler follows Jakes' model: `nu = nu_max·cos(theta)`
//! with the arrival angle uniform on `[-π, π)`. Gains are i.i.d. complex
//! Gaussian with the total average power normalized to one, and the first
//! path is pinned to delay zero so there is always a causal reference.
//!
//! Two equivalent channel applications exist on purpose: a sample-domain
//! tapped-delay-line run over the prefixed frame, and the equivalent `N×N`
//! circular matrix acting on the body after prefix removal. Tests hold the
//! two within 1e-9 of each other; the harness uses whichever is convenient.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CMatrix, CVector};
use crate::waveform::{ModMatrix, ModulationParams};
use crate::{seeds, Error};

/// One propagation path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelPath {
    /// Complex gain `h`.
    pub gain: Complex64,
    /// Delay in samples; must not exceed the prefix length.
    pub delay: usize,
    /// Doppler shift in normalized cycles per block; the per-sample phase
    /// ramp is `2π·doppler·n/N`.
    pub doppler: f64,
}

/// A drawn channel: paths plus the equivalent body-domain matrix.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub paths: Vec<ChannelPath>,
    /// `N×N` equivalent matrix after prefix removal.
    pub h: CMatrix,
    pub seed: u64,
}

/// Noise calibration: `sigma2 = Es·10^(-snr_db/10)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub snr_db: f64,
    pub sigma2: f64,
}

impl NoiseSpec {
    /// Per-symbol Es/N0 calibration against a measured symbol energy.
    pub fn from_snr_db(snr_db: f64, es: f64) -> Self {
        Self {
            snr_db,
            sigma2: es * 10f64.powf(-snr_db / 10.0),
        }
    }

    pub fn noiseless() -> Self {
        Self {
            snr_db: f64::INFINITY,
            sigma2: 0.0,
        }
    }
}

/// Jakes' formula: Doppler shift of a path arriving at angle `theta`.
pub fn jakes_doppler(nu_max: f64, theta: f64) -> f64 {
    nu_max * theta.cos()
}

/// Draws a seeded multipath realization.
///
/// Path 0 sits at delay 0; remaining delays are uniform on
/// `{0, ..., max_delay}`. Gains are CN(0, 1/num_paths).
pub fn draw_channel(
    params: &ModulationParams,
    num_paths: usize,
    max_delay: usize,
    nu_max: f64,
    seed: u64,
) -> Result<ChannelRealization, Error> {
    if num_paths == 0 {
        return Err(Error::InvalidParameter("num_paths must be >= 1".into()));
    }
    if max_delay > params.cpp_len {
        return Err(Error::InvalidParameter(format!(
            "max_delay={max_delay} exceeds cpp_len={}",
            params.cpp_len
        )));
    }
    let mut rng = seeds::rng_from(seed);
    let gain_scale = (1.0 / (2.0 * num_paths as f64)).sqrt();
    let mut paths = Vec::with_capacity(num_paths);
    for i in 0..num_paths {
        let delay = if i == 0 { 0 } else { rng.gen_range(0..=max_delay) };
        let theta = rng.gen_range(-PI..PI);
        let doppler = jakes_doppler(nu_max, theta);
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        paths.push(ChannelPath {
            gain: Complex64::new(re, im) * gain_scale,
            delay,
            doppler,
        });
    }
    let h = build_channel_matrix(&paths, params)?;
    Ok(ChannelRealization { paths, h, seed })
}

/// Equivalent `N×N` channel matrix seen by the frame body.
///
/// Row `n` picks up path `i` at column `(n - delay_i) mod N`; entries that
/// wrap through the prefix acquire the prefix phase
/// `exp(-j·2π·c1·(N² + 2·N·(n - delay_i)))`.
pub fn build_channel_matrix(
    paths: &[ChannelPath],
    params: &ModulationParams,
) -> Result<CMatrix, Error> {
    let n = params.n;
    let mut h = CMatrix::zeros(n, n);
    for p in paths {
        if p.delay > params.cpp_len {
            return Err(Error::InvalidParameter(format!(
                "path delay {} exceeds cpp_len {}",
                p.delay, params.cpp_len
            )));
        }
        for row in 0..n {
            let col = (row + n - p.delay % n) % n;
            let ramp = 2.0 * PI * p.doppler * row as f64 / n as f64;
            let mut tap = p.gain * Complex64::new(ramp.cos(), ramp.sin());
            if row < p.delay {
                // sample came out of the prefix region
                let shifted = row as i64 - p.delay as i64;
                let phase = -2.0 * PI * params.c1 * ((n * n) as i64 + 2 * n as i64 * shifted) as f64;
                tap *= Complex64::new(phase.cos(), phase.sin());
            }
            let cur = h.get(row, col);
            h.set(row, col, cur + tap);
        }
    }
    Ok(h)
}

/// Sample-domain tapped delay line over a prefixed frame, with the Doppler
/// ramp referenced to the post-prefix-removal sample index.
pub fn apply_channel_time_domain(
    paths: &[ChannelPath],
    params: &ModulationParams,
    s_cpp: &CVector,
) -> CVector {
    let total = s_cpp.len();
    let l = params.cpp_len as i64;
    let n = params.n as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); total];
    for p in paths {
        for j in 0..total {
            let src = j as i64 - p.delay as i64;
            if src < 0 {
                continue;
            }
            let ramp = 2.0 * PI * p.doppler * (j as i64 - l) as f64 / n;
            out[j] += s_cpp.get(src as usize) * p.gain * Complex64::new(ramp.cos(), ramp.sin());
        }
    }
    CVector::new(out).expect("finite taps on finite input")
}

/// Adds seeded circularly-symmetric Gaussian noise of variance `sigma2`.
pub fn add_awgn(r: &CVector, noise: &NoiseSpec, seed: u64) -> CVector {
    if noise.sigma2 == 0.0 {
        return r.clone();
    }
    let mut rng = seeds::rng_from(seed);
    let scale = (noise.sigma2 / 2.0).sqrt();
    let data = r
        .as_slice()
        .iter()
        .map(|&z| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            z + Complex64::new(re, im) * scale
        })
        .collect();
    CVector::new(data).expect("finite noise")
}

/// Channel conjugated into the detection domain: `A·H·Aᴴ`.
pub fn effective_channel(mm: &ModMatrix, h: &CMatrix) -> Result<CMatrix, Error> {
    Ok(mm.a().matmul(h)?.matmul(mm.a_h())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waveform::{add_cpp, remove_cpp};
    use rand::Rng;

    fn params(n: usize, cpp: usize, c1: f64) -> ModulationParams {
        ModulationParams::new(n, 0.9, c1, 0.01, cpp).unwrap()
    }

    fn rand_cvec(n: usize, seed: u64) -> CVector {
        let mut rng = seeds::rng_from(seed);
        CVector::from_fn(n, |_| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
        .unwrap()
    }

    #[test]
    fn jakes_formula_extremes() {
        assert!((jakes_doppler(2.0, 0.0) - 2.0).abs() < 1e-15);
        assert!(jakes_doppler(2.0, PI).abs() - 2.0 < 1e-15);
        assert!(jakes_doppler(2.0, PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn single_identity_path_gives_identity_matrix() {
        let p = params(8, 2, 0.0625);
        let path = ChannelPath {
            gain: Complex64::new(1.0, 0.0),
            delay: 0,
            doppler: 0.0,
        };
        let h = build_channel_matrix(&[path], &p).unwrap();
        assert!(h.sub(&CMatrix::identity(8)).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn delayed_path_is_cyclic_shift_when_unchirped() {
        let p = params(8, 2, 0.0);
        let g = Complex64::new(0.3, -0.7);
        let path = ChannelPath { gain: g, delay: 1, doppler: 0.0 };
        let h = build_channel_matrix(&[path], &p).unwrap();
        for row in 0..8 {
            for col in 0..8 {
                let expect = if col == (row + 7) % 8 { g } else { Complex64::new(0.0, 0.0) };
                assert!((h.get(row, col) - expect).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn matrix_matches_sample_domain_pipeline() {
        let p = params(8, 2, 0.0625);
        let path = ChannelPath {
            gain: Complex64::new(0.8, 0.1),
            delay: 1,
            doppler: 0.5,
        };
        let s = rand_cvec(8, 70);
        let h = build_channel_matrix(&[path], &p).unwrap();
        let via_matrix = h.matvec(&s).unwrap();
        let via_samples = remove_cpp(
            &p,
            &apply_channel_time_domain(&[path], &p, &add_cpp(&p, &s).unwrap()),
        )
        .unwrap();
        let err = via_matrix.sub(&via_samples).unwrap().norm();
        assert!(err <= 1e-10 * s.norm().max(1.0), "err {err}");
    }

    #[test]
    fn matrix_and_sample_domain_agree_over_seeded_draws() {
        let p = params(16, 2, ModulationParams::default_c1(16, 2.0));
        for seed in 0..100u64 {
            let chan = draw_channel(&p, 3, 2, 2.0, seed).unwrap();
            let s = rand_cvec(16, 1000 + seed);
            let via_matrix = chan.h.matvec(&s).unwrap();
            let via_samples = remove_cpp(
                &p,
                &apply_channel_time_domain(&chan.paths, &p, &add_cpp(&p, &s).unwrap()),
            )
            .unwrap();
            let err = via_matrix.sub(&via_samples).unwrap().norm();
            assert!(err <= 1e-9 * s.norm(), "seed {seed}: err {err}");
        }
    }

    #[test]
    fn draws_are_deterministic_and_valid() {
        let p = params(8, 2, 0.0625);
        let a = draw_channel(&p, 3, 2, 2.0, 99).unwrap();
        let b = draw_channel(&p, 3, 2, 2.0, 99).unwrap();
        assert_eq!(a.paths, b.paths);
        assert_eq!(a.h, b.h);
        assert_eq!(a.paths[0].delay, 0);
        for path in &a.paths {
            assert!(path.delay <= 2);
            assert!(path.doppler.abs() <= 2.0);
        }
    }

    #[test]
    fn invalid_draw_arguments() {
        let p = params(8, 2, 0.0625);
        assert!(draw_channel(&p, 0, 2, 2.0, 1).is_err());
        assert!(draw_channel(&p, 3, 3, 2.0, 1).is_err());
        let bad = ChannelPath {
            gain: Complex64::new(1.0, 0.0),
            delay: 5,
            doppler: 0.0,
        };
        assert!(build_channel_matrix(&[bad], &p).is_err());
    }

    #[test]
    fn identity_path_time_domain_is_identity() {
        let p = params(8, 2, 0.0625);
        let path = ChannelPath {
            gain: Complex64::new(1.0, 0.0),
            delay: 0,
            doppler: 0.0,
        };
        let s = rand_cvec(10, 71);
        assert_eq!(apply_channel_time_domain(&[path], &p, &s), s);
        assert_eq!(
            apply_channel_time_domain(&[path], &p, &CVector::zeros(10)),
            CVector::zeros(10)
        );
    }

    #[test]
    fn awgn_zero_variance_is_identity_and_seeded() {
        let r = rand_cvec(16, 72);
        assert_eq!(add_awgn(&r, &NoiseSpec::noiseless(), 5), r);
        let spec = NoiseSpec::from_snr_db(10.0, 1.0);
        let a = add_awgn(&r, &spec, 5);
        let b = add_awgn(&r, &spec, 5);
        assert_eq!(a, b);
        assert_ne!(add_awgn(&r, &spec, 6), a);
    }

    #[test]
    fn awgn_empirical_variance() {
        let zeros = CVector::zeros(1_000_000);
        let spec = NoiseSpec::from_snr_db(3.0, 1.0);
        let noisy = add_awgn(&zeros, &spec, 7);
        let var = noisy.energy() / 1_000_000.0;
        assert!(
            (var - spec.sigma2).abs() < 0.01 * spec.sigma2,
            "empirical {var} vs sigma2 {}",
            spec.sigma2
        );
    }

    #[test]
    fn noise_calibration_formula() {
        let s = NoiseSpec::from_snr_db(10.0, 2.0);
        assert!((s.sigma2 - 0.2).abs() < 1e-15);
        assert_eq!(NoiseSpec::from_snr_db(f64::INFINITY, 1.0).sigma2, 0.0);
    }

    #[test]
    fn effective_channel_cases() {
        let mm1 = ModMatrix::build(ModulationParams::new(8, 1.0, 0.0625, 0.01, 2).unwrap());
        let eff = effective_channel(&mm1, &CMatrix::identity(8)).unwrap();
        assert!(eff.sub(&CMatrix::identity(8)).unwrap().frobenius_norm() <= 1e-10);

        let mm = ModMatrix::build(ModulationParams::new(8, 0.85, 0.0625, 0.01, 2).unwrap());
        let eff = effective_channel(&mm, &CMatrix::identity(8)).unwrap();
        assert!(
            eff.sub(crate::waveform::correlation_matrix(&mm))
                .unwrap()
                .frobenius_norm()
                < 1e-12
        );

        // conjugation against a re-computed triple product, opposite association
        let p = params(8, 2, 0.0625);
        let chan = draw_channel(&p, 3, 2, 2.0, 11).unwrap();
        let mm = ModMatrix::build(p);
        let eff = effective_channel(&mm, &chan.h).unwrap();
        let redo = mm.a().matmul(&chan.h.matmul(mm.a_h()).unwrap()).unwrap();
        assert!(eff.sub(&redo).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn average_total_path_power_is_unit() {
        let p = params(8, 2, 0.0625);
        let mut total = 0.0;
        let draws = 10_000;
        for seed in 0..draws {
            let chan = draw_channel(&p, 3, 2, 2.0, seed).unwrap();
            total += chan.paths.iter().map(|q| q.gain.norm_sqr()).sum::<f64>();
        }
        let mean = total / draws as f64;
        assert!((mean - 1.0).abs() < 0.02, "mean path power {mean}");
    }

    #[test]
    fn doppler_distribution_matches_arcsine_law() {
        // KS test of nu/nu_max against the arcsine CDF 1 - acos(x)/π
        let p = params(8, 2, 0.0625);
        let mut samples = Vec::with_capacity(100_002);
        let mut seed = 0u64;
        while samples.len() < 100_000 {
            let chan = draw_channel(&p, 3, 2, 2.0, 500_000 + seed).unwrap();
            for path in &chan.paths {
                samples.push(path.doppler / 2.0);
            }
            seed += 1;
        }
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = samples.len() as f64;
        let mut ks: f64 = 0.0;
        for (i, &x) in samples.iter().enumerate() {
            let cdf = 1.0 - x.clamp(-1.0, 1.0).acos() / PI;
            let lo = i as f64 / n;
            let hi = (i + 1) as f64 / n;
            ks = ks.max((cdf - lo).abs()).max((hi - cdf).abs());
        }
        let critical = 1.628 / n.sqrt(); // 1% significance
        assert!(ks < critical, "KS statistic {ks} >= {critical}");
    }

    #[test]
    fn channel_matrix_is_path_sparse() {
        let p = params(16, 2, 0.078125);
        let chan = draw_channel(&p, 3, 2, 2.0, 42).unwrap();
        let nonzeros = chan
            .h
            .entries()
            .iter()
            .filter(|z| z.norm_sqr() > 0.0)
            .count();
        assert!(nonzeros <= 16 * 3);
    }
}
