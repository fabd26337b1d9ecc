//! Link-level simulator and analysis library for single-user massive MIMO
//! (SU-MMIMO) spatial multiplexing with concatenated turbo codes.
//!
//! The library covers the full chain of a QPSK SU-MMIMO link:
//!
//! * [`codes`] — the rate-1/2 recursive systematic convolutional code shared
//!   by both concatenation schemes, and the seeded interleaver.
//! * [`channel`] — Rayleigh flat-fading MIMO channel generation (white or
//!   AR(1)-correlated across transmit antennas), retransmissions, matched
//!   filtering and retransmission combining.
//! * [`precoder`] — forward linear-prediction filters (Levinson-Durbin) and
//!   the triangular precoding matrix that decorrelates the channel.
//! * [`sinr`] — closed-form average SINR per bit for all supported regimes,
//!   upper bounds, surface export and noise calibration.
//! * [`sctc`] — serially concatenated turbo code: encoder and the iterative
//!   BCJR decoder (inner and outer passes in the probability domain).
//! * [`pctc`] — parallel concatenated turbo code over the same channel.
//! * [`ber`] — semi-analytic per-frame BER estimation from decoder LLRs,
//!   empirical error counting and Gaussianity histogram diagnostics.
//! * [`engine`] — the Monte-Carlo experiment loop: deterministic seeded
//!   parallel frame simulation, sweep orchestration and result persistence.
//!
//! Conventions used throughout: bit `0` maps to the amplitude `+1` and bit
//! `1` to `-1`; QPSK symbols are `±1 ± j`, so the average symbol power is
//! `P_av = 2`; all noise and interference variances are *per dimension*
//! (real or imaginary part), which is what the branch metric `exp(-|y - F
//! s|^2 / (2 sigma^2))` expects.

// `!(x > 0.0)` guards deliberately catch NaN alongside non-positive values,
// and trellis/antenna loops index fixed small state tables.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod ber;
pub mod channel;
pub mod codes;
pub mod config;
pub mod engine;
pub mod pctc;
pub mod precoder;
pub mod report;
pub mod rng;
pub mod sctc;
pub mod sinr;

mod error;
mod siso;

pub use error::{Error, Result};

/// Maps a bit to its antipodal amplitude: bit 0 -> +1, bit 1 -> -1.
#[inline]
pub fn bit_to_amp(bit: u8) -> f64 {
    1.0 - 2.0 * f64::from(bit)
}

/// Inverse of [`bit_to_amp`] by sign; an exact zero decides for bit 0.
#[inline]
pub fn amp_to_bit(amp: f64) -> u8 {
    if amp < 0.0 {
        1
    } else {
        0
    }
}
