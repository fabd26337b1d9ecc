//! Shared oracles for the integration tests.
//!
//! Everything here is computed by brute force, independent of the library's
//! forward/backward recursions: an explicit shift-register encoder and
//! exhaustive path enumeration over all input words and initial states
//! (matching the decoder's uniform boundary conditions).

#![allow(dead_code)]

use num_complex::Complex64;

/// One shift-register step of the `[1, (1+D^2)/(1+D+D^2)]` generator from
/// register contents `(w1, w2)`: returns `(parity, next_w1, next_w2)`.
pub fn register_step(w1: u8, w2: u8, u: u8) -> (u8, u8, u8) {
    let w = u ^ w1 ^ w2;
    (w ^ w2, w, w1)
}

/// Parity sequence from an arbitrary initial state packed as `w1 << 1 | w2`.
pub fn register_parities(bits: &[u8], initial_state: usize) -> Vec<u8> {
    let mut w1 = ((initial_state >> 1) & 1) as u8;
    let mut w2 = (initial_state & 1) as u8;
    bits.iter()
        .map(|&u| {
            let (p, nw1, nw2) = register_step(w1, w2, u);
            w1 = nw1;
            w2 = nw2;
            p
        })
        .collect()
}

/// Pairwise-normalized outputs of the exhaustive sum-over-paths, indexed by
/// bit value like the library's soft sequences.
pub struct OracleSiso {
    /// Systematic extrinsic including the systematic channel factor,
    /// excluding the prior at the own position.
    pub ext_sys_channel: Vec<[f64; 2]>,
    /// Systematic extrinsic excluding both the own systematic factor and
    /// the own prior.
    pub ext_sys: Vec<[f64; 2]>,
    /// Parity extrinsic excluding the own parity factor and own prior.
    pub ext_par: Vec<[f64; 2]>,
}

/// Enumerates all `4 * 2^L` (initial state, input word) paths and sums the
/// factor products for the three extrinsic definitions.
pub fn oracle_siso(
    gamma_sys: &[[f64; 2]],
    gamma_par: &[[f64; 2]],
    prior: &[[f64; 2]],
) -> OracleSiso {
    let len = gamma_sys.len();
    assert!(len <= 16, "enumeration oracle is exponential in the length");
    let mut acc_sys_ch = vec![[0.0f64; 2]; len];
    let mut acc_sys = vec![[0.0f64; 2]; len];
    let mut acc_par = vec![[0.0f64; 2]; len];

    for s0 in 0..4usize {
        for word in 0..(1u32 << len) {
            let us: Vec<u8> = (0..len).map(|i| ((word >> i) & 1) as u8).collect();
            let ps = register_parities(&us, s0);
            let gs: Vec<f64> = (0..len).map(|i| gamma_sys[i][us[i] as usize]).collect();
            let gp: Vec<f64> = (0..len).map(|i| gamma_par[i][ps[i] as usize]).collect();
            let pr: Vec<f64> = (0..len).map(|i| prior[i][us[i] as usize]).collect();
            for i in 0..len {
                let mut w_sys_ch = 1.0;
                let mut w_sys = 1.0;
                let mut w_par = 1.0;
                for j in 0..len {
                    let full = gs[j] * gp[j];
                    if j == i {
                        w_sys_ch *= full;
                        w_sys *= gp[j];
                        w_par *= gs[j];
                    } else {
                        w_sys_ch *= full * pr[j];
                        w_sys *= full * pr[j];
                        w_par *= full * pr[j];
                    }
                }
                acc_sys_ch[i][us[i] as usize] += w_sys_ch;
                acc_sys[i][us[i] as usize] += w_sys;
                acc_par[i][ps[i] as usize] += w_par;
            }
        }
    }
    let norm = |acc: Vec<[f64; 2]>| -> Vec<[f64; 2]> {
        acc.into_iter()
            .map(|p| {
                let t = p[0] + p[1];
                [p[0] / t, p[1] / t]
            })
            .collect()
    };
    OracleSiso {
        ext_sys_channel: norm(acc_sys_ch),
        ext_sys: norm(acc_sys),
        ext_par: norm(acc_par),
    }
}

/// Straightforward channel weights `exp(-(axis - f amp)^2 / (2 v))`, with
/// no exponent shifting.
pub fn oracle_channel_gammas(
    y: &[Complex64],
    f: &[f64],
    v: &[f64],
) -> (Vec<[f64; 2]>, Vec<[f64; 2]>) {
    let amp = |bit: usize| 1.0 - 2.0 * bit as f64;
    let mut gamma_sys = Vec::with_capacity(y.len());
    let mut gamma_par = Vec::with_capacity(y.len());
    for i in 0..y.len() {
        gamma_sys.push([
            (-(y[i].re - f[i] * amp(0)).powi(2) / (2.0 * v[i])).exp(),
            (-(y[i].re - f[i] * amp(1)).powi(2) / (2.0 * v[i])).exp(),
        ]);
        gamma_par.push([
            (-(y[i].im - f[i] * amp(0)).powi(2) / (2.0 * v[i])).exp(),
            (-(y[i].im - f[i] * amp(1)).powi(2) / (2.0 * v[i])).exp(),
        ]);
    }
    (gamma_sys, gamma_par)
}

pub fn pairs_of(seq: &sumimo::sctc::SoftSequence) -> Vec<[f64; 2]> {
    seq.plus
        .iter()
        .zip(&seq.minus)
        .map(|(&p, &m)| [p, m])
        .collect()
}

pub fn max_pair_diff(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x[0] - y[0]).abs().max((x[1] - y[1]).abs()))
        .fold(0.0, f64::max)
}
