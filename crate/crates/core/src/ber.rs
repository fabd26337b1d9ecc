//! Semi-analytic BER estimation from decoder LLRs, empirical error
//! counting, and Gaussianity histogram diagnostics.
//!
//! After convergence the per-position a-posteriori log-ratios behave like a
//! BPSK decision statistic in Gaussian noise. Averaging the ground-truth
//! aligned log-ratios over the qualifying positions of one frame yields a
//! statistic `Y` whose value fixes the frame error probability
//! `P_f = erfc(sqrt(|Y| / 4)) / 2`, without counting a single error.
//! Positions where either a-posteriori probability has collapsed below
//! `e^-500` are left out of the average.

use serde::Serialize;

use crate::{bit_to_amp, Error, Result};

/// Qualification threshold on the per-position probabilities.
const QUALIFY_MIN: f64 = 7.124576406741286e-218; // e^-500

/// Numerically stable split of an LLR into its probability pair.
#[inline]
fn llr_to_pair(llr: f64) -> (f64, f64) {
    if llr >= 0.0 {
        let e = (-llr).exp();
        (1.0 / (1.0 + e), e / (1.0 + e))
    } else {
        let e = llr.exp();
        (e / (1.0 + e), 1.0 / (1.0 + e))
    }
}

/// Semi-analytic error probability of one frame.
///
/// `llr` are the decoder's final a-posteriori log-ratios and `a` the
/// transmitted bits (simulation ground truth). Returns `(P_f, L_d2)` where
/// `L_d2` counts the qualifying positions. A frame with no qualifying
/// position is reported as [`Error::DegenerateFrame`]; the harness records
/// `P_f = 0.5` for it.
pub fn semi_analytic_frame_ber(llr: &[f64], a: &[u8]) -> Result<(f64, usize)> {
    if llr.len() != a.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} LLRs against {} bits",
            llr.len(),
            a.len()
        )));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for (&l, &bit) in llr.iter().zip(a) {
        let (p, m) = llr_to_pair(l);
        if p > QUALIFY_MIN && m > QUALIFY_MIN {
            sum += bit_to_amp(bit) * l;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::DegenerateFrame);
    }
    let y = sum / count as f64;
    Ok((0.5 * libm::erfc((y.abs() / 4.0).sqrt()), count))
}

/// Average frame error probability.
pub fn aggregate(p_f: &[f64]) -> f64 {
    if p_f.is_empty() {
        return 0.0;
    }
    p_f.iter().sum::<f64>() / p_f.len() as f64
}

/// Hamming distance over the non-excluded positions.
pub fn empirical_ber(a_hat: &[u8], a: &[u8], exclude: Option<&[bool]>) -> Result<(u64, u64)> {
    if a_hat.len() != a.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} decisions against {} bits",
            a_hat.len(),
            a.len()
        )));
    }
    if let Some(mask) = exclude {
        if mask.len() != a.len() {
            return Err(Error::DimensionMismatch("exclude mask length".into()));
        }
    }
    let mut errors = 0u64;
    let mut counted = 0u64;
    for i in 0..a.len() {
        if exclude.is_some_and(|m| m[i]) {
            continue;
        }
        counted += 1;
        if a_hat[i] != a[i] {
            errors += 1;
        }
    }
    Ok((errors, counted))
}

/// Density-normalized histogram with sample moments.
#[derive(Debug, Clone, Serialize)]
pub struct Histogram {
    pub bin_left: Vec<f64>,
    pub bin_right: Vec<f64>,
    pub density: Vec<f64>,
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

/// Builds a histogram over equal-width bins spanning the sample range,
/// normalized to unit area, plus the first four sample moments.
pub fn histogram_diagnostics(values: &[f64], bins: usize) -> Result<Histogram> {
    if bins < 10 {
        return Err(Error::InvalidArgument(format!(
            "need at least 10 bins, got {bins}"
        )));
    }
    if values.len() < 30 {
        return Err(Error::InsufficientData(values.len(), 30));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for &v in values {
        let d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let (skewness, excess_kurtosis) = if m2 > 0.0 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    } else {
        (0.0, 0.0)
    };

    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &v in values {
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let mut bin_left = Vec::with_capacity(bins);
    let mut bin_right = Vec::with_capacity(bins);
    let mut density = Vec::with_capacity(bins);
    for (b, &c) in counts.iter().enumerate() {
        bin_left.push(lo + b as f64 * width);
        bin_right.push(lo + (b + 1) as f64 * width);
        density.push(c as f64 / (n * width));
    }
    Ok(Histogram {
        bin_left,
        bin_right,
        density,
        count: values.len(),
        mean,
        variance: m2,
        skewness,
        excess_kurtosis,
    })
}

/// Positions whose LLR passes the qualification filter, exposed for the
/// histogram diagnostics which plot the same statistic the estimator uses.
pub fn qualifying_llrs(llr: &[f64]) -> Vec<f64> {
    llr.iter()
        .copied()
        .filter(|&l| {
            let (p, m) = llr_to_pair(l);
            p > QUALIFY_MIN && m > QUALIFY_MIN
        })
        .collect()
}
