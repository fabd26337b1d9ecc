//! Shared probability-domain forward/backward pass over the four-state
//! trellis.
//!
//! Branch weights factor into a systematic and a parity part, each indexed
//! by the bit value, plus an a-priori probability on the systematic bit.
//! The forward and backward recursions normalize to unit row sum at every
//! step; branch products are floored at 1e-300 and a step whose row still
//! sums to zero raises [`Error::NumericalFailure`].

use crate::codes::Trellis;
use crate::{Error, Result};

/// Floor applied to every gamma product before it enters a recursion.
const GAMMA_FLOOR: f64 = 1e-300;

/// Per-step weight pairs indexed by bit value.
pub(crate) type BitPairs = Vec<[f64; 2]>;

/// Per-step branch inputs, indexed by bit value (0 maps to +1).
pub(crate) struct SisoInput<'a> {
    pub gamma_sys: &'a [[f64; 2]],
    pub gamma_par: &'a [[f64; 2]],
    pub prior: &'a [[f64; 2]],
}

/// Normalized pairwise outputs, indexed by bit value.
pub(crate) struct SisoOutput {
    /// Extrinsic on the systematic bit including the systematic channel
    /// factor (the serial scheme's inner-to-outer message).
    pub ext_sys_channel: Vec<[f64; 2]>,
    /// Extrinsic on the systematic bit excluding both the prior and the
    /// systematic factor (outer-code and parallel-scheme message).
    pub ext_sys: Vec<[f64; 2]>,
    /// Extrinsic on the parity bit, excluding the parity factor.
    pub ext_par: Vec<[f64; 2]>,
}

#[inline]
fn branch(inp: &SisoInput, i: usize, m: usize, u: usize, t: &Trellis) -> f64 {
    let p = t.parity_out[m][u] as usize;
    (inp.gamma_sys[i][u] * inp.gamma_par[i][p]).max(GAMMA_FLOOR)
}

fn normalize(row: &mut [f64; 4], step: usize) -> Result<()> {
    let total: f64 = row.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::NumericalFailure { step });
    }
    for v in row.iter_mut() {
        *v /= total;
    }
    Ok(())
}

pub(crate) fn forward_pass(inp: &SisoInput, t: &Trellis) -> Result<Vec<[f64; 4]>> {
    let len = inp.gamma_sys.len();
    let mut alpha = vec![[0.25f64; 4]; len + 1];
    for i in 0..len {
        let mut next = [0.0f64; 4];
        for n in 0..4 {
            for &(m, u) in &t.converge[n] {
                let u = u as usize;
                next[n] += alpha[i][m] * branch(inp, i, m, u, t) * inp.prior[i][u];
            }
        }
        normalize(&mut next, i)?;
        alpha[i + 1] = next;
    }
    Ok(alpha)
}

pub(crate) fn backward_pass(inp: &SisoInput, t: &Trellis) -> Result<Vec<[f64; 4]>> {
    let len = inp.gamma_sys.len();
    let mut beta = vec![[0.25f64; 4]; len + 1];
    for i in (0..len).rev() {
        let mut cur = [0.0f64; 4];
        for m in 0..4 {
            for u in 0..2usize {
                let n = t.next_state[m][u];
                cur[m] += beta[i + 1][n] * branch(inp, i, m, u, t) * inp.prior[i][u];
            }
        }
        normalize(&mut cur, i)?;
        beta[i] = cur;
    }
    Ok(beta)
}

fn pair_normalize(plus: f64, minus: f64, step: usize) -> Result<[f64; 2]> {
    let total = plus + minus;
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::NumericalFailure { step });
    }
    Ok([plus / total, minus / total])
}

/// Runs the full pass and produces all three extrinsic streams.
pub(crate) fn siso_pass(inp: &SisoInput, t: &Trellis) -> Result<SisoOutput> {
    let len = inp.gamma_sys.len();
    debug_assert_eq!(inp.gamma_par.len(), len);
    debug_assert_eq!(inp.prior.len(), len);
    let alpha = forward_pass(inp, t)?;
    let beta = backward_pass(inp, t)?;

    let mut ext_sys_channel = Vec::with_capacity(len);
    let mut ext_sys = Vec::with_capacity(len);
    let mut ext_par = Vec::with_capacity(len);
    for i in 0..len {
        let mut c = [0.0f64; 2];
        let mut bs = [0.0f64; 2];
        let mut bp = [0.0f64; 2];
        for n in 0..4 {
            let a = alpha[i][n];
            // systematic-bit sums over the rho transitions
            for u in 0..2usize {
                let succ = t.next_state[n][u];
                let par = t.parity_out[n][u] as usize;
                let w = a * beta[i + 1][succ];
                c[u] += w * (inp.gamma_sys[i][u] * inp.gamma_par[i][par]).max(GAMMA_FLOOR);
                bs[u] += w * inp.gamma_par[i][par];
            }
            // parity-bit sums over the mu transitions
            for p in 0..2usize {
                let u = t.input_for_parity(n, p as u8) as usize;
                let succ = t.next_state[n][u];
                bp[p] += a * beta[i + 1][succ] * inp.gamma_sys[i][u];
            }
        }
        ext_sys_channel.push(pair_normalize(c[0], c[1], i)?);
        ext_sys.push(pair_normalize(bs[0], bs[1], i)?);
        ext_par.push(pair_normalize(bp[0], bp[1], i)?);
    }
    Ok(SisoOutput {
        ext_sys_channel,
        ext_sys,
        ext_par,
    })
}
