//! Parallel concatenated turbo code over the MIMO channel.
//!
//! The frame carries `2 L_d1` QPSK symbols: the first half pairs each data
//! bit with the first encoder's parity on the quadrature axis, the second
//! half pairs the interleaved data with the second encoder's parity. The
//! decoder runs one SISO pass per constituent code and exchanges systematic
//! extrinsics through the permutation each half-iteration; the exchanged
//! message excludes the sender's own systematic channel factor, which is
//! restored in the final a-posteriori combination.

use num_complex::Complex64;

use crate::channel::EqualizedFrame;
use crate::codes::{rsc_parity, Interleaver, Trellis};
use crate::sctc::{channel_gammas, DecodedFrame, ExchangeMoments, GammaForm, SoftSequence};
use crate::siso::{siso_pass, SisoInput};
use crate::{bit_to_amp, Error, Result};

/// One encoded frame of the parallel scheme.
#[derive(Debug, Clone)]
pub struct PctcFrame {
    /// Data bits, length `L_d1`.
    pub a: Vec<u8>,
    /// Parity of encoder 1 on `a`.
    pub p1: Vec<u8>,
    /// Parity of encoder 2 on the interleaved data.
    pub p2: Vec<u8>,
    /// QPSK symbols, length `L_d = 2 L_d1`.
    pub s: Vec<Complex64>,
}

/// Encodes `a` with both constituent encoders. The interleaver acts on the
/// data block: the second encoder consumes `a[pi(i)]` at step `i`.
pub fn pctc_encode(a: &[u8], interleaver: &Interleaver, trellis: &Trellis) -> Result<PctcFrame> {
    if interleaver.len() != a.len() {
        return Err(Error::DimensionMismatch(format!(
            "interleaver length {} != L_d1 = {}",
            interleaver.len(),
            a.len()
        )));
    }
    let p1 = rsc_parity(a, trellis);
    let a2 = interleaver.unpermute(a);
    let p2 = rsc_parity(&a2, trellis);
    let l_d1 = a.len();
    let mut s = Vec::with_capacity(2 * l_d1);
    for i in 0..l_d1 {
        s.push(Complex64::new(bit_to_amp(a[i]), bit_to_amp(p1[i])));
    }
    for i in 0..l_d1 {
        s.push(Complex64::new(bit_to_amp(a2[i]), bit_to_amp(p2[i])));
    }
    Ok(PctcFrame {
        a: a.to_vec(),
        p1,
        p2,
        s,
    })
}

/// One constituent SISO pass.
pub struct ConstituentOutput {
    /// Systematic extrinsic excluding the prior and the systematic channel
    /// factor; this is the exchanged message.
    pub ext: SoftSequence,
    /// Normalized systematic channel factor, kept for the final
    /// a-posteriori combination.
    pub sys_channel: SoftSequence,
}

/// Runs one constituent decoder over its half of the observations.
pub fn constituent_pass(
    eq_half: &EqualizedFrame,
    prior: &SoftSequence,
    trellis: &Trellis,
    form: GammaForm,
) -> Result<ConstituentOutput> {
    if prior.len() != eq_half.len() {
        return Err(Error::DimensionMismatch(format!(
            "prior length {} != half-frame length {}",
            prior.len(),
            eq_half.len()
        )));
    }
    let (gamma_sys, gamma_par) = channel_gammas(eq_half, form)?;
    let out = siso_pass(
        &SisoInput {
            gamma_sys: &gamma_sys,
            gamma_par: &gamma_par,
            prior: &prior.pairs(),
        },
        trellis,
    )?;
    let sys_channel = SoftSequence::from_pairs(
        gamma_sys
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let total = g[0] + g[1];
                if !(total > 0.0) {
                    return Err(Error::NumericalFailure { step: i });
                }
                Ok([g[0] / total, g[1] / total])
            })
            .collect::<Result<Vec<_>>>()?,
    );
    Ok(ConstituentOutput {
        ext: SoftSequence::from_pairs(out.ext_sys),
        sys_channel,
    })
}

fn product_app(factors: [&SoftSequence; 4], len: usize) -> Result<SoftSequence> {
    let mut app = SoftSequence::uniform(len);
    for i in 0..len {
        let plus: f64 = factors.iter().map(|f| f.plus[i]).product();
        let minus: f64 = factors.iter().map(|f| f.minus[i]).product();
        let total = plus + minus;
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::NumericalFailure { step: i });
        }
        app.plus[i] = plus / total;
        app.minus[i] = minus / total;
    }
    Ok(app)
}

/// Iterative two-decoder MAP decode of one frame.
///
/// The final a-posteriori probability of each data bit combines both
/// decoders' systematic channel factors and both extrinsics, each piece of
/// evidence appearing exactly once.
pub fn pctc_decode(
    eq: &EqualizedFrame,
    interleaver: &Interleaver,
    trellis: &Trellis,
    iterations: usize,
    form: GammaForm,
) -> Result<DecodedFrame> {
    pctc_decode_ordered(eq, interleaver, trellis, iterations, form, false)
}

/// [`pctc_decode`] with an explicit starting decoder, used to examine the
/// decoder-order sensitivity of the converged decisions.
pub fn pctc_decode_ordered(
    eq: &EqualizedFrame,
    interleaver: &Interleaver,
    trellis: &Trellis,
    iterations: usize,
    form: GammaForm,
    second_first: bool,
) -> Result<DecodedFrame> {
    if iterations == 0 {
        return Err(Error::InvalidArgument("iterations must be >= 1".into()));
    }
    let l_d = eq.len();
    if !l_d.is_multiple_of(2) || interleaver.len() != l_d / 2 {
        return Err(Error::DimensionMismatch(format!(
            "frame length {l_d} incompatible with data interleaver length {}",
            interleaver.len()
        )));
    }
    let l_d1 = l_d / 2;
    let (half1, half2) = eq.split_at(l_d1);

    let mut prior1 = SoftSequence::uniform(l_d1);
    let mut prior2 = SoftSequence::uniform(l_d1);
    let mut out1 = None;
    let mut out2 = None;
    for _ in 0..iterations {
        if second_first {
            let o2 = constituent_pass(&half2, &prior2, trellis, form)?;
            prior1 = SoftSequence {
                plus: interleaver.permute(&o2.ext.plus),
                minus: interleaver.permute(&o2.ext.minus),
            };
            out2 = Some(o2);
            let o1 = constituent_pass(&half1, &prior1, trellis, form)?;
            prior2 = SoftSequence {
                plus: interleaver.unpermute(&o1.ext.plus),
                minus: interleaver.unpermute(&o1.ext.minus),
            };
            out1 = Some(o1);
        } else {
            let o1 = constituent_pass(&half1, &prior1, trellis, form)?;
            prior2 = SoftSequence {
                plus: interleaver.unpermute(&o1.ext.plus),
                minus: interleaver.unpermute(&o1.ext.minus),
            };
            out1 = Some(o1);
            let o2 = constituent_pass(&half2, &prior2, trellis, form)?;
            prior1 = SoftSequence {
                plus: interleaver.permute(&o2.ext.plus),
                minus: interleaver.permute(&o2.ext.minus),
            };
            out2 = Some(o2);
        }
    }
    let o1 = out1.expect("at least one iteration ran");
    let o2 = out2.expect("at least one iteration ran");

    // Map decoder 2 quantities from its positions onto data-bit positions.
    let ext2 = SoftSequence {
        plus: interleaver.permute(&o2.ext.plus),
        minus: interleaver.permute(&o2.ext.minus),
    };
    let sys2 = SoftSequence {
        plus: interleaver.permute(&o2.sys_channel.plus),
        minus: interleaver.permute(&o2.sys_channel.minus),
    };
    let app = product_app([&o1.sys_channel, &o1.ext, &sys2, &ext2], l_d1)?;

    let llr: Vec<f64> = (0..l_d1).map(|i| app.log_ratio(i)).collect();
    let bits = llr.iter().map(|&l| u8::from(l < 0.0)).collect();
    Ok(DecodedFrame {
        bits,
        llr,
        exchange: ExchangeMoments::default(),
    })
}
