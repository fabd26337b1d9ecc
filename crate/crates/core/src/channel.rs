//! Rayleigh flat-fading MIMO channel: generation, transmission with
//! retransmissions and AWGN, matched filtering and retransmission combining.
//!
//! Channel entries are zero-mean circular complex Gaussians with variance
//! `sigma2_h` per dimension. Rows (receive antennas) are always mutually
//! independent; with `correlation_rho > 0` each row carries an AR(1)
//! correlation along the transmit-antenna axis, `R[m] = rho^|m| sigma2_h`,
//! produced by a unit-energy first-order recursive filter.
//!
//! All variances exposed here are per dimension: the closed-form
//! interference-plus-noise expressions are derived as complex powers
//! `E[|U|^2]` and halved here, so the decoder's branch metric
//! `exp(-|y - F s|^2 / (2 sigma2))` receives the quantity it expects.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// Number of correlated-filter warm-up samples per row, enough to keep the
/// along-row autocorrelation within 0.1% of `rho^|m| sigma2_h`.
const AR_BURN_IN: usize = 64;

/// Static description of the MIMO link.
#[derive(Debug, Clone, Copy)]
pub struct ChannelConfig {
    /// Transmit antennas `N_t`.
    pub n_t: usize,
    /// Receive antennas `N_r`.
    pub n_r: usize,
    /// Retransmissions `N_rt` (>= 1).
    pub n_rt: usize,
    /// Channel tap variance per dimension.
    pub sigma2_h: f64,
    /// Noise variance per dimension.
    pub sigma2_w: f64,
    /// Along-row channel correlation, in `[0, 1)`. Zero means white.
    pub correlation_rho: f64,
    /// Average symbol power; 2 for the `±1 ± j` QPSK alphabet.
    pub p_av: f64,
}

impl ChannelConfig {
    pub fn n_tot(&self) -> usize {
        self.n_t + self.n_r
    }

    /// Along-row autocorrelation `R[m] = rho^|m| sigma2_h`.
    pub fn autocorrelation(&self, lag: i64) -> f64 {
        self.correlation_rho.powi(lag.unsigned_abs() as i32) * self.sigma2_h
    }
}

/// Matched-filtered, combined observations for one frame.
///
/// `y[i] = F_i S_i + U_i` after averaging over retransmissions, `f` holds
/// the combined gains and `sigma2_u` the per-symbol effective
/// interference-plus-noise variance per dimension used by the decoder.
#[derive(Debug, Clone, Default)]
pub struct EqualizedFrame {
    pub y: Vec<Complex64>,
    pub f: Vec<f64>,
    pub sigma2_u: Vec<f64>,
}

impl EqualizedFrame {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Splits the frame at `at`, for codes that decode the two halves with
    /// separate constituent decoders.
    pub fn split_at(&self, at: usize) -> (EqualizedFrame, EqualizedFrame) {
        let first = EqualizedFrame {
            y: self.y[..at].to_vec(),
            f: self.f[..at].to_vec(),
            sigma2_u: self.sigma2_u[..at].to_vec(),
        };
        let second = EqualizedFrame {
            y: self.y[at..].to_vec(),
            f: self.f[at..].to_vec(),
            sigma2_u: self.sigma2_u[at..].to_vec(),
        };
        (first, second)
    }
}

/// One zero-mean complex Gaussian with the given per-dimension variance.
#[inline]
pub fn complex_gaussian<R: Rng>(rng: &mut R, sigma2_per_dim: f64) -> Complex64 {
    let s = sigma2_per_dim.sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Draws one `N_r x N_t` channel realization.
///
/// White case: i.i.d. entries, filled row by row. Correlated case: each row
/// is an AR(1) sequence `x[n] = rho x[n-1] + sqrt(1-rho^2) w[n]` warmed up
/// for [`AR_BURN_IN`] samples, which preserves the per-dimension variance
/// (unit-energy filter) and gives `R[m] = rho^|m| sigma2_h` along the row.
pub fn draw_channel<R: Rng>(cfg: &ChannelConfig, rng: &mut R) -> DMatrix<Complex64> {
    let rho = cfg.correlation_rho;
    if rho == 0.0 {
        return DMatrix::from_row_iterator(
            cfg.n_r,
            cfg.n_t,
            std::iter::repeat_with(|| complex_gaussian(rng, cfg.sigma2_h))
                .take(cfg.n_r * cfg.n_t),
        );
    }
    let scale = (1.0 - rho * rho).sqrt();
    let mut rows = Vec::with_capacity(cfg.n_r * cfg.n_t);
    for _ in 0..cfg.n_r {
        let mut x = Complex64::new(0.0, 0.0);
        for _ in 0..AR_BURN_IN {
            x = rho * x + scale * complex_gaussian(rng, cfg.sigma2_h);
        }
        for _ in 0..cfg.n_t {
            x = rho * x + scale * complex_gaussian(rng, cfg.sigma2_h);
            rows.push(x);
        }
    }
    DMatrix::from_row_iterator(cfg.n_r, cfg.n_t, rows)
}

/// Transmits one block over `N_rt` independent channels.
///
/// Returns `R_k = H_k (B) S + W_k` for each retransmission, with noise of
/// variance `sigma2_w` per dimension drawn from `noise_rng(k)`.
pub fn transmit_block<R, F>(
    s: &DVector<Complex64>,
    h_list: &[DMatrix<Complex64>],
    precode_b: Option<&DMatrix<Complex64>>,
    cfg: &ChannelConfig,
    mut noise_rng: F,
) -> Result<Vec<DVector<Complex64>>>
where
    R: Rng,
    F: FnMut(usize) -> R,
{
    if h_list.is_empty() {
        return Err(Error::InvalidArgument("no channel realizations".into()));
    }
    if s.len() != cfg.n_t {
        return Err(Error::DimensionMismatch(format!(
            "block has {} symbols, expected N_t = {}",
            s.len(),
            cfg.n_t
        )));
    }
    let xs = match precode_b {
        Some(b) => {
            if b.nrows() != cfg.n_t || b.ncols() != cfg.n_t {
                return Err(Error::DimensionMismatch(format!(
                    "precoding matrix is {}x{}, expected {}x{}",
                    b.nrows(),
                    b.ncols(),
                    cfg.n_t,
                    cfg.n_t
                )));
            }
            b * s
        }
        None => s.clone(),
    };
    let mut out = Vec::with_capacity(h_list.len());
    for (k, h) in h_list.iter().enumerate() {
        if h.nrows() != cfg.n_r || h.ncols() != cfg.n_t {
            return Err(Error::DimensionMismatch(format!(
                "channel {k} is {}x{}, expected {}x{}",
                h.nrows(),
                h.ncols(),
                cfg.n_r,
                cfg.n_t
            )));
        }
        let mut r = h * &xs;
        if cfg.sigma2_w > 0.0 {
            let mut rng = noise_rng(k);
            for v in r.iter_mut() {
                *v += complex_gaussian(&mut rng, cfg.sigma2_w);
            }
        }
        out.push(r);
    }
    Ok(out)
}

/// Matched filter plus retransmission combining.
///
/// `y_i = (1/N_rt) sum_k (Z_k^H R_k)_i` and
/// `f_i = (1/N_rt) sum_k (Z_k^H Z_k)_{ii}`, where `Z_k` is the effective
/// channel (`H_k` unprecoded, `H_k B` precoded).
pub fn matched_filter_combine(
    r_list: &[DVector<Complex64>],
    z_list: &[DMatrix<Complex64>],
) -> Result<(Vec<Complex64>, Vec<f64>)> {
    if r_list.is_empty() || r_list.len() != z_list.len() {
        return Err(Error::InvalidArgument(format!(
            "combining needs matching, non-empty lists (got {} received, {} channels)",
            r_list.len(),
            z_list.len()
        )));
    }
    let n_t = z_list[0].ncols();
    let n_rt = r_list.len() as f64;
    let mut y = vec![Complex64::new(0.0, 0.0); n_t];
    let mut f = vec![0.0f64; n_t];
    for (r, z) in r_list.iter().zip(z_list) {
        if z.nrows() != r.len() || z.ncols() != n_t {
            return Err(Error::DimensionMismatch(
                "received vector and effective channel disagree".into(),
            ));
        }
        let yk = z.ad_mul(r);
        for i in 0..n_t {
            y[i] += yk[(i, 0)];
            f[i] += z.column(i).norm_squared();
        }
    }
    for i in 0..n_t {
        y[i] /= n_rt;
        f[i] /= n_rt;
    }
    Ok((y, f))
}

/// Effective interference-plus-noise variance per dimension for the white
/// channel after combining:
/// `(4 sigma_h^4 N_r (N_t - 1) + 2 sigma2_w sigma2_h N_r) / N_rt`,
/// i.e. half the complex power `E[|U_i|^2]`.
pub fn effective_noise_variance(cfg: &ChannelConfig) -> f64 {
    let s4 = cfg.sigma2_h * cfg.sigma2_h;
    (4.0 * s4 * cfg.n_r as f64 * (cfg.n_t as f64 - 1.0)
        + 2.0 * cfg.sigma2_w * cfg.sigma2_h * cfg.n_r as f64)
        / cfg.n_rt as f64
}

/// Per-antenna interference-plus-noise variance per dimension for the
/// correlated channel, before (`combined = false`) or after combining.
///
/// `i` is the 1-based transmit antenna index. With `rho = 0` this reduces
/// to the white-channel formula; with `n_rt = 1` the two variants coincide.
pub fn effective_noise_variance_correlated(
    cfg: &ChannelConfig,
    i: usize,
    combined: bool,
) -> Result<f64> {
    if i < 1 || i > cfg.n_t {
        return Err(Error::AntennaIndex { index: i, n_t: cfg.n_t });
    }
    let n_r = cfg.n_r as f64;
    let s4 = cfg.sigma2_h * cfg.sigma2_h;
    // sum over j != i of (sigma_h^4 + N_r R^2) and of R^2 alone
    let mut base = 0.0;
    let mut r2_sum = 0.0;
    for j in 1..=cfg.n_t {
        if j == i {
            continue;
        }
        let r = cfg.autocorrelation(j as i64 - i as i64);
        base += s4 + n_r * r * r;
        r2_sum += r * r;
    }
    let noise = 4.0 * n_r * cfg.sigma2_h * cfg.sigma2_w;
    let complex_power = if combined {
        let n_rt = cfg.n_rt as f64;
        (4.0 * cfg.p_av * n_r * base + 4.0 * cfg.p_av * n_r * n_r * (n_rt - 1.0) * r2_sum + noise)
            / n_rt
    } else {
        4.0 * cfg.p_av * n_r * base + noise
    };
    Ok(complex_power / 2.0)
}

/// Per-antenna interference-plus-noise variance per dimension with
/// precoding, given the prediction-error variances `sigma2_z[i-1]`.
pub fn effective_noise_variance_precoded(
    cfg: &ChannelConfig,
    sigma2_z: &[f64],
    i: usize,
    combined: bool,
) -> Result<f64> {
    if i < 1 || i > cfg.n_t {
        return Err(Error::AntennaIndex { index: i, n_t: cfg.n_t });
    }
    if sigma2_z.len() != cfg.n_t {
        return Err(Error::DimensionMismatch(format!(
            "{} prediction-error variances for N_t = {}",
            sigma2_z.len(),
            cfg.n_t
        )));
    }
    let n_r = cfg.n_r as f64;
    let others: f64 = sigma2_z
        .iter()
        .enumerate()
        .filter(|(j, _)| j + 1 != i)
        .map(|(_, v)| v)
        .sum();
    let complex_power =
        4.0 * n_r * sigma2_z[i - 1] * (cfg.p_av * others + cfg.sigma2_w);
    let scale = if combined { cfg.n_rt as f64 } else { 1.0 };
    Ok(complex_power / (2.0 * scale))
}
