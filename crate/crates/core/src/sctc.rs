//! Serially concatenated turbo code: outer RSC, interleaver, inner RSC
//! mapped to QPSK, and the iterative two-stage BCJR decoder.
//!
//! One trellis step of the inner code emits one QPSK symbol whose in-phase
//! axis carries the systematic bit and quadrature axis the parity bit. The
//! decoder alternates an inner pass (channel observations plus a prior from
//! the outer code) and an outer pass (soft inputs only), exchanging
//! extrinsic probabilities through the interleaver.

use num_complex::Complex64;

use crate::channel::EqualizedFrame;
use crate::codes::{rsc_encode, Interleaver, Trellis};
use crate::siso::{siso_pass, SisoInput};
use crate::{bit_to_amp, Error, Result};

/// Probability floor before forming log-ratios.
pub const PROB_FLOOR: f64 = 1e-300;

/// Per-bit probability pairs flowing between decoder stages.
///
/// `plus[i]` is the probability that position `i` carries the antipodal
/// symbol +1 (bit 0); pairs are kept normalized to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftSequence {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

impl SoftSequence {
    pub fn uniform(len: usize) -> Self {
        SoftSequence {
            plus: vec![0.5; len],
            minus: vec![0.5; len],
        }
    }

    pub fn len(&self) -> usize {
        self.plus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plus.is_empty()
    }

    pub(crate) fn from_pairs(pairs: Vec<[f64; 2]>) -> Self {
        let mut plus = Vec::with_capacity(pairs.len());
        let mut minus = Vec::with_capacity(pairs.len());
        for p in pairs {
            plus.push(p[0]);
            minus.push(p[1]);
        }
        SoftSequence { plus, minus }
    }

    pub(crate) fn pairs(&self) -> Vec<[f64; 2]> {
        self.plus
            .iter()
            .zip(&self.minus)
            .map(|(&p, &m)| [p, m])
            .collect()
    }

    /// Log probability ratio at `i`, with both probabilities floored.
    pub fn log_ratio(&self, i: usize) -> f64 {
        (self.plus[i].max(PROB_FLOOR)).ln() - (self.minus[i].max(PROB_FLOOR)).ln()
    }
}

/// One encoded frame of the serial scheme.
#[derive(Debug, Clone)]
pub struct SctcFrame {
    /// Data bits, length `L_d1`.
    pub a: Vec<u8>,
    /// Outer codeword, length `L_d = 2 L_d1`.
    pub b: Vec<u8>,
    /// Interleaved codeword feeding the inner encoder.
    pub c: Vec<u8>,
    /// QPSK symbols, one per inner trellis step.
    pub s: Vec<Complex64>,
}

/// Encodes `a` through the outer code, interleaver and inner code.
pub fn sctc_encode(a: &[u8], interleaver: &Interleaver, trellis: &Trellis) -> Result<SctcFrame> {
    let l_d = 2 * a.len();
    if interleaver.len() != l_d {
        return Err(Error::DimensionMismatch(format!(
            "interleaver length {} != L_d = {l_d}",
            interleaver.len()
        )));
    }
    let b = rsc_encode(a, trellis);
    let c = interleaver.permute(&b);
    let inner = rsc_encode(&c, trellis);
    let s = (0..l_d)
        .map(|i| Complex64::new(bit_to_amp(inner[2 * i]), bit_to_amp(inner[2 * i + 1])))
        .collect();
    Ok(SctcFrame {
        a: a.to_vec(),
        b,
        c,
        s,
    })
}

/// Branch metric form for channel-facing decoders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GammaForm {
    /// `exp(-|y - F s|^2 / (2 sigma2))`: consistent with the observation
    /// model `y = F s + u`.
    #[default]
    GainScaled,
    /// `exp(-|y - s|^2 / (2 sigma2))`: compatibility form without the gain.
    Unscaled,
}

/// Builds the per-step systematic/parity channel weights for one observed
/// symbol. Exponents are shifted by their per-axis minimum before
/// exponentiation; the shift is a per-step constant factor that cancels in
/// every normalized output.
pub(crate) fn channel_gammas(
    eq: &EqualizedFrame,
    form: GammaForm,
) -> Result<(crate::siso::BitPairs, crate::siso::BitPairs)> {
    let len = eq.len();
    if eq.f.len() != len || eq.sigma2_u.len() != len {
        return Err(Error::DimensionMismatch(
            "equalized frame fields have unequal lengths".into(),
        ));
    }
    let mut gamma_sys = Vec::with_capacity(len);
    let mut gamma_par = Vec::with_capacity(len);
    for i in 0..len {
        let v = eq.sigma2_u[i];
        if !(v > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "non-positive noise variance at symbol {i}"
            )));
        }
        let gain = match form {
            GammaForm::GainScaled => eq.f[i],
            GammaForm::Unscaled => 1.0,
        };
        let axis = |obs: f64| -> [f64; 2] {
            let d0 = (obs - gain).powi(2);
            let d1 = (obs + gain).powi(2);
            let dmin = d0.min(d1);
            [
                (-(d0 - dmin) / (2.0 * v)).exp(),
                (-(d1 - dmin) / (2.0 * v)).exp(),
            ]
        };
        gamma_sys.push(axis(eq.y[i].re));
        gamma_par.push(axis(eq.y[i].im));
    }
    Ok((gamma_sys, gamma_par))
}

/// Inner-code BCJR pass: returns the extrinsic probabilities on the inner
/// input bits `c`, fed to the outer decoder.
pub fn bcjr_inner(
    eq: &EqualizedFrame,
    prior: &SoftSequence,
    trellis: &Trellis,
    form: GammaForm,
) -> Result<SoftSequence> {
    if prior.len() != eq.len() {
        return Err(Error::DimensionMismatch(format!(
            "prior length {} != frame length {}",
            prior.len(),
            eq.len()
        )));
    }
    let (gamma_sys, gamma_par) = channel_gammas(eq, form)?;
    let out = siso_pass(
        &SisoInput {
            gamma_sys: &gamma_sys,
            gamma_par: &gamma_par,
            prior: &prior.pairs(),
        },
        trellis,
    )?;
    Ok(SoftSequence::from_pairs(out.ext_sys_channel))
}

/// Outer-code BCJR pass over the deinterleaved inner extrinsics.
///
/// Returns the extrinsic probabilities on the outer codeword bits `b`
/// (sent back to the inner decoder through the interleaver) and the
/// a-posteriori probabilities of the data bits.
pub fn bcjr_outer(
    extrinsic_c: &SoftSequence,
    interleaver: &Interleaver,
    trellis: &Trellis,
) -> Result<(SoftSequence, SoftSequence)> {
    let l_d = extrinsic_c.len();
    if interleaver.len() != l_d || !l_d.is_multiple_of(2) {
        return Err(Error::DimensionMismatch(format!(
            "extrinsic length {l_d} incompatible with interleaver length {}",
            interleaver.len()
        )));
    }
    let l_d1 = l_d / 2;
    let deint = SoftSequence {
        plus: interleaver.unpermute(&extrinsic_c.plus),
        minus: interleaver.unpermute(&extrinsic_c.minus),
    };
    let mut gamma_sys = Vec::with_capacity(l_d1);
    let mut gamma_par = Vec::with_capacity(l_d1);
    for i in 0..l_d1 {
        gamma_sys.push([deint.plus[2 * i], deint.minus[2 * i]]);
        gamma_par.push([deint.plus[2 * i + 1], deint.minus[2 * i + 1]]);
    }
    // no side information about the data bits themselves
    let prior = vec![[0.5f64; 2]; l_d1];
    let out = siso_pass(
        &SisoInput {
            gamma_sys: &gamma_sys,
            gamma_par: &gamma_par,
            prior: &prior,
        },
        trellis,
    )?;

    let mut ext_b = SoftSequence::uniform(l_d);
    for i in 0..l_d1 {
        ext_b.plus[2 * i] = out.ext_sys[i][0];
        ext_b.minus[2 * i] = out.ext_sys[i][1];
        ext_b.plus[2 * i + 1] = out.ext_par[i][0];
        ext_b.minus[2 * i + 1] = out.ext_par[i][1];
    }

    let mut app = SoftSequence::uniform(l_d1);
    for i in 0..l_d1 {
        let plus = out.ext_sys[i][0] * gamma_sys[i][0];
        let minus = out.ext_sys[i][1] * gamma_sys[i][1];
        let total = plus + minus;
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::NumericalFailure { step: i });
        }
        app.plus[i] = plus / total;
        app.minus[i] = minus / total;
    }
    Ok((ext_b, app))
}

/// Moment comparison between a decoder's output extrinsics and its input
/// priors, both mapped through the log-ratio over non-saturated positions.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExchangeMoments {
    pub prior_mean: f64,
    pub prior_var: f64,
    pub extrinsic_mean: f64,
    pub extrinsic_var: f64,
    pub count: usize,
}

fn log_ratio_moments(seq: &SoftSequence) -> (f64, f64, usize) {
    let mut values = Vec::new();
    for i in 0..seq.len() {
        let lr = seq.log_ratio(i);
        // open-interval entries only; saturation clips at the floor and
        // would dominate the moments
        if seq.plus[i] > 0.0 && seq.plus[i] < 1.0 && seq.minus[i] > 0.0 && lr.abs() < 500.0 {
            values.push(lr);
        }
    }
    if values.is_empty() {
        return (0.0, 0.0, 0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var, values.len())
}

/// Output of a full iterative decode.
#[derive(Debug, Clone)]
pub struct DecodedFrame {
    /// Hard decisions on the data bits.
    pub bits: Vec<u8>,
    /// Final a-posteriori log-likelihood ratios, `ln(P(+1)/P(-1))`.
    pub llr: Vec<f64>,
    /// Final-iteration exchange statistics (inner decoder side).
    pub exchange: ExchangeMoments,
}

/// Runs the configured number of inner/outer iterations and produces hard
/// decisions plus the LLR sequence for the semi-analytic BER estimator.
pub fn sctc_decode(
    eq: &EqualizedFrame,
    interleaver: &Interleaver,
    trellis: &Trellis,
    iterations: usize,
    form: GammaForm,
) -> Result<DecodedFrame> {
    if iterations == 0 {
        return Err(Error::InvalidArgument("iterations must be >= 1".into()));
    }
    let l_d = eq.len();
    if interleaver.len() != l_d || !l_d.is_multiple_of(2) {
        return Err(Error::DimensionMismatch(format!(
            "frame length {l_d} incompatible with interleaver length {}",
            interleaver.len()
        )));
    }
    let mut prior_c = SoftSequence::uniform(l_d);
    let mut app = SoftSequence::uniform(l_d / 2);
    let mut exchange = ExchangeMoments::default();
    for it in 0..iterations {
        let ext_c = bcjr_inner(eq, &prior_c, trellis, form)?;
        let (ext_b, app_a) = bcjr_outer(&ext_c, interleaver, trellis)?;
        app = app_a;
        if it + 1 == iterations {
            let (pm, pv, _) = log_ratio_moments(&prior_c);
            let (em, ev, n) = log_ratio_moments(&ext_c);
            exchange = ExchangeMoments {
                prior_mean: pm,
                prior_var: pv,
                extrinsic_mean: em,
                extrinsic_var: ev,
                count: n,
            };
        }
        prior_c = SoftSequence {
            plus: interleaver.permute(&ext_b.plus),
            minus: interleaver.permute(&ext_b.minus),
        };
    }
    let llr: Vec<f64> = (0..app.len()).map(|i| app.log_ratio(i)).collect();
    let bits = llr.iter().map(|&l| u8::from(l < 0.0)).collect();
    Ok(DecodedFrame {
        bits,
        llr,
        exchange,
    })
}
