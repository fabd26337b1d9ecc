//! Deterministic counter-based random substreams.
//!
//! Every stochastic quantity in a simulation run is drawn from a ChaCha12
//! stream addressed by `(master seed, purpose, frame, block, retransmission)`.
//! The 256-bit ChaCha key is expanded from the master seed and the 64-bit
//! stream number packs the remaining coordinates, so draws are independent
//! of evaluation order and of how frames are distributed over workers.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// What a substream is used for. Part of the stream address.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    /// Frame data bits.
    DataBits = 1,
    /// Channel matrix entries for one (frame, block, retransmission).
    Channel = 2,
    /// Receiver noise for one (frame, block, retransmission).
    Noise = 3,
    /// Dummy QPSK symbol on the first antenna of one (frame, block).
    Dummy = 4,
    /// The run-wide interleaver permutation.
    Interleaver = 5,
}

/// Stream-number layout: 4 bits purpose | 28 bits frame | 26 bits block |
/// 6 bits retransmission.
const FRAME_BITS: u32 = 28;
const BLOCK_BITS: u32 = 26;
const RT_BITS: u32 = 6;

/// Derives the substream for `(seed, purpose, frame, block, k)`.
pub fn substream(seed: u64, purpose: Purpose, frame: u64, block: u64, k: u64) -> ChaCha12Rng {
    assert!(frame < 1 << FRAME_BITS, "frame index {frame} exceeds stream address space");
    assert!(block < 1 << BLOCK_BITS, "block index {block} exceeds stream address space");
    assert!(k < 1 << RT_BITS, "retransmission index {k} exceeds stream address space");
    let stream = ((purpose as u64) << (FRAME_BITS + BLOCK_BITS + RT_BITS))
        | (frame << (BLOCK_BITS + RT_BITS))
        | (block << RT_BITS)
        | k;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
