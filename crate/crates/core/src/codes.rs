//! The rate-1/2 recursive systematic convolutional code used by both
//! concatenation schemes, and the seeded interleaver.
//!
//! The generator matrix is `[1, (1+D^2)/(1+D+D^2)]`: feedback polynomial
//! `1+D+D^2`, feedforward `1+D^2`, four encoder states. Encoders start in
//! state 0 and append no termination tail; the decoder boundary conditions
//! (uniform forward and backward initialization) match the open trellis.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::{Error, Result};

/// Number of encoder states for the `1+D+D^2` feedback polynomial.
pub const NUM_STATES: usize = 4;

/// Transition structure of the four-state recursive systematic code.
///
/// The state is the two-bit shift register content `(w[n-1], w[n-2])`
/// packed as `w[n-1] << 1 | w[n-2]`, where `w` is the feedback sequence
/// `w[n] = u[n] ^ w[n-1] ^ w[n-2]` and the parity output is
/// `w[n] ^ w[n-2]`.
#[derive(Debug, Clone)]
pub struct Trellis {
    pub num_states: usize,
    /// `next_state[m][u]`: successor of state `m` under input bit `u`.
    pub next_state: [[usize; 2]; NUM_STATES],
    /// `parity_out[m][u]`: parity bit emitted on the transition.
    pub parity_out: [[u8; 2]; NUM_STATES],
    /// `converge[n]`: the two `(predecessor state, input bit)` pairs whose
    /// transition lands in state `n`.
    pub converge: [[(usize, u8); 2]; NUM_STATES],
    /// `input_for_parity[m][p]`: input bit whose transition from state `m`
    /// emits parity `p`. Well defined because the two outgoing parities of
    /// every state differ (asserted at construction).
    pub input_for_parity: [[u8; 2]; NUM_STATES],
}

impl Trellis {
    /// Successor of `state` under the systematic symbol +1 (bit 0).
    #[inline]
    pub fn rho_plus(&self, state: usize) -> usize {
        self.next_state[state][0]
    }

    /// Successor of `state` under the systematic symbol -1 (bit 1).
    #[inline]
    pub fn rho_minus(&self, state: usize) -> usize {
        self.next_state[state][1]
    }

    /// Successor of `state` whose transition carries parity symbol +1.
    #[inline]
    pub fn mu_plus(&self, state: usize) -> usize {
        self.next_state[state][self.input_for_parity[state][0] as usize]
    }

    /// Successor of `state` whose transition carries parity symbol -1.
    #[inline]
    pub fn mu_minus(&self, state: usize) -> usize {
        self.next_state[state][self.input_for_parity[state][1] as usize]
    }

    /// Systematic input bit of the transition from `state` with parity `p`.
    #[inline]
    pub fn input_for_parity(&self, state: usize, p: u8) -> u8 {
        self.input_for_parity[state][p as usize]
    }

    /// The diverge set of `state`: its two successors, indexed by input bit.
    #[inline]
    pub fn successors(&self, state: usize) -> [usize; 2] {
        self.next_state[state]
    }
}

/// Builds the four-state trellis of the shared generator.
///
/// Panics only on an internal inconsistency of the generator tables, which
/// the construction asserts: two distinct successors and predecessors per
/// state and distinct parity bits on the two outgoing transitions.
pub fn build_trellis() -> Trellis {
    let mut next_state = [[0usize; 2]; NUM_STATES];
    let mut parity_out = [[0u8; 2]; NUM_STATES];

    for m in 0..NUM_STATES {
        let w1 = (m >> 1) & 1;
        let w2 = m & 1;
        for u in 0..2usize {
            let w = u ^ w1 ^ w2;
            let p = w ^ w2;
            next_state[m][u] = (w << 1) | w1;
            parity_out[m][u] = p as u8;
        }
    }

    let mut converge = [[(usize::MAX, 0u8); 2]; NUM_STATES];
    let mut fill = [0usize; NUM_STATES];
    for m in 0..NUM_STATES {
        for u in 0..2usize {
            let n = next_state[m][u];
            converge[n][fill[n]] = (m, u as u8);
            fill[n] += 1;
        }
    }
    assert!(
        fill.iter().all(|&c| c == 2),
        "every state must have exactly two predecessors"
    );

    let mut input_for_parity = [[0u8; 2]; NUM_STATES];
    for m in 0..NUM_STATES {
        assert_ne!(next_state[m][0], next_state[m][1]);
        assert_ne!(
            parity_out[m][0], parity_out[m][1],
            "outgoing parities of state {m} must differ"
        );
        for u in 0..2usize {
            input_for_parity[m][parity_out[m][u] as usize] = u as u8;
        }
    }

    Trellis {
        num_states: NUM_STATES,
        next_state,
        parity_out,
        converge,
        input_for_parity,
    }
}

/// Encodes `bits` with the rate-1/2 systematic code from state 0, without a
/// termination tail. Output index `2i` is the systematic bit `bits[i]`,
/// index `2i+1` the parity bit.
pub fn rsc_encode(bits: &[u8], trellis: &Trellis) -> Vec<u8> {
    let mut out = Vec::with_capacity(2 * bits.len());
    let mut state = 0usize;
    for &u in bits {
        let u = (u & 1) as usize;
        out.push(u as u8);
        out.push(trellis.parity_out[state][u]);
        state = trellis.next_state[state][u];
    }
    out
}

/// Parity stream only, for the parallel concatenation where the systematic
/// bits are mapped separately.
pub fn rsc_parity(bits: &[u8], trellis: &Trellis) -> Vec<u8> {
    let mut out = Vec::with_capacity(bits.len());
    let mut state = 0usize;
    for &u in bits {
        let u = (u & 1) as usize;
        out.push(trellis.parity_out[state][u]);
        state = trellis.next_state[state][u];
    }
    out
}

/// A fixed permutation `pi` of `0..length` together with its inverse.
///
/// The direction convention matches the serial concatenation: the
/// interleaved stream `c` satisfies `c[pi[j]] = b[j]`, i.e. [`Interleaver::permute`]
/// scatters and [`Interleaver::unpermute`] gathers.
#[derive(Debug, Clone)]
pub struct Interleaver {
    pi: Vec<usize>,
    pi_inv: Vec<usize>,
    seed: u64,
}

impl Interleaver {
    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn pi(&self, i: usize) -> usize {
        self.pi[i]
    }

    #[inline]
    pub fn pi_inv(&self, i: usize) -> usize {
        self.pi_inv[i]
    }

    /// Scatter: `out[pi[j]] = x[j]`.
    pub fn permute<T: Copy + Default>(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.pi.len());
        let mut out = vec![T::default(); x.len()];
        for (j, &v) in x.iter().enumerate() {
            out[self.pi[j]] = v;
        }
        out
    }

    /// Gather: `out[j] = x[pi[j]]`. Exact inverse of [`Interleaver::permute`].
    pub fn unpermute<T: Copy + Default>(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.pi.len());
        self.pi.iter().map(|&p| x[p]).collect()
    }
}

/// Builds a uniform random interleaver of the given length.
///
/// The permutation is a Fisher-Yates shuffle of the identity driven by a
/// ChaCha12 generator seeded with `seed`, so identical `(length, seed)`
/// yields an identical permutation on every platform.
pub fn make_interleaver(length: usize, seed: u64) -> Result<Interleaver> {
    if length < 2 {
        return Err(Error::InvalidArgument(format!(
            "interleaver length must be at least 2, got {length}"
        )));
    }
    let mut pi: Vec<usize> = (0..length).collect();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    pi.shuffle(&mut rng);
    Ok(finish(pi, seed))
}

/// Identity permutation, for tests and debugging.
pub fn identity_interleaver(length: usize) -> Interleaver {
    finish((0..length).collect(), 0)
}

fn finish(pi: Vec<usize>, seed: u64) -> Interleaver {
    let mut pi_inv = vec![0usize; pi.len()];
    for (j, &p) in pi.iter().enumerate() {
        pi_inv[p] = j;
    }
    Interleaver { pi, pi_inv, seed }
}
