//! Parallel-concatenated turbo encoder with two identical recursive
//! systematic convolutional (RSC) constituents and dual trellis termination.
//!
//! Octal generators are read with the `D^0` coefficient as the most
//! significant bit: `13 = 1011` is `1 + D^2 + D^3` (feedback) and
//! `15 = 1101` is `1 + D + D^3` (forward). Reversing that bit order yields a
//! different code and therefore a different distance spectrum.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Tail bits per constituent encoder: `memory` systematic plus `memory` parity.
pub const TAIL_BITS_PER_ENCODER: usize = 6;

/// Generator description of one RSC constituent encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RscSpec {
    memory: usize,
    /// Coefficient of `D^k` is bit `k`.
    feedback: u32,
    forward: u32,
}

/// One trellis branch: next state and the parity bit emitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Branch {
    pub next: u8,
    pub parity: u8,
}

impl RscSpec {
    /// The `G = [1, 15/13]` memory-3 code.
    pub fn lte() -> Self {
        Self::from_octal(3, 0o13, 0o15).expect("valid generator")
    }

    /// Builds a spec from octal generators of `memory + 1` binary digits, most
    /// significant digit = `D^0` coefficient.
    pub fn from_octal(memory: usize, feedback_octal: u32, forward_octal: u32) -> Result<Self> {
        if memory == 0 || memory > 7 {
            return Err(Error::InvalidArgument(format!(
                "memory {memory} not in 1..=7"
            )));
        }
        let width = memory + 1;
        let reverse = |g: u32| -> Result<u32> {
            if g >> width != 0 {
                return Err(Error::InvalidArgument(format!(
                    "generator {g:o} wider than {width} bits"
                )));
            }
            Ok((0..width).fold(0, |acc, k| acc | (((g >> (width - 1 - k)) & 1) << k)))
        };
        let feedback = reverse(feedback_octal)?;
        let forward = reverse(forward_octal)?;
        if feedback & 1 == 0 {
            return Err(Error::InvalidArgument(
                "feedback polynomial needs a D^0 term".into(),
            ));
        }
        Ok(Self {
            memory,
            feedback,
            forward,
        })
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn num_states(&self) -> usize {
        1 << self.memory
    }

    /// Feedback taps as a `D^k` bit mask.
    pub fn feedback_mask(&self) -> u32 {
        self.feedback
    }

    /// Forward taps as a `D^k` bit mask.
    pub fn forward_mask(&self) -> u32 {
        self.forward
    }

    /// State bit `k - 1` holds the register value delayed by `k`.
    fn feedback_sum(&self, state: u32) -> u32 {
        ((self.feedback >> 1) & state).count_ones() & 1
    }

    /// Branch taken from `state` on input `bit`.
    pub fn branch(&self, state: u32, bit: u32) -> Branch {
        let a = (bit ^ self.feedback_sum(state)) & 1;
        let parity = ((self.forward & 1) * a) ^ (((self.forward >> 1) & state).count_ones() & 1);
        let next = ((state << 1) | a) & ((1 << self.memory) - 1);
        Branch {
            next: next as u8,
            parity: parity as u8,
        }
    }

    /// Input that zeroes the register feedback, i.e. the termination input.
    pub fn termination_input(&self, state: u32) -> u32 {
        self.feedback_sum(state)
    }
}

/// Output of one terminated RSC encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RscOutput {
    pub parity: Vec<u8>,
    pub tail_sys: Vec<u8>,
    pub tail_par: Vec<u8>,
}

/// Encodes `info` from the zero state and appends `memory` termination cycles.
pub fn rsc_encode_terminated(info: &[u8], spec: &RscSpec) -> Result<RscOutput> {
    if info.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut state = 0u32;
    let mut parity = Vec::with_capacity(info.len());
    for &bit in info {
        let b = spec.branch(state, u32::from(bit & 1));
        parity.push(b.parity);
        state = u32::from(b.next);
    }
    let mut tail_sys = Vec::with_capacity(spec.memory());
    let mut tail_par = Vec::with_capacity(spec.memory());
    for _ in 0..spec.memory() {
        let u = spec.termination_input(state);
        let b = spec.branch(state, u);
        tail_sys.push(u as u8);
        tail_par.push(b.parity);
        state = u32::from(b.next);
    }
    debug_assert_eq!(state, 0);
    Ok(RscOutput {
        parity,
        tail_sys,
        tail_par,
    })
}

/// Systematic, two parity streams and the 12 termination bits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurboCodeword {
    pub systematic: Vec<u8>,
    pub parity1: Vec<u8>,
    pub parity2: Vec<u8>,
    /// Encoder 1 `(x, z)` x3, then encoder 2 `(x, z)` x3.
    pub tail: Vec<u8>,
}

impl TurboCodeword {
    pub fn len(&self) -> usize {
        self.systematic.len() + self.parity1.len() + self.parity2.len() + self.tail.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn weight(&self) -> usize {
        codeword_weight(self)
    }

    /// Transmission-order bit vector: systematic, parity1, parity2, tail.
    pub fn bits(&self) -> Vec<u8> {
        [&self.systematic, &self.parity1, &self.parity2, &self.tail]
            .into_iter()
            .flatten()
            .copied()
            .collect()
    }
}

fn interleave_tails(out: &RscOutput, tail: &mut Vec<u8>) {
    for (x, z) in out.tail_sys.iter().zip(&out.tail_par) {
        tail.push(*x);
        tail.push(*z);
    }
}

/// Encodes with the `G = [1, 15/13]` constituents; encoder 2 reads
/// `info[perm(k)]` at time `k`.
pub fn turbo_encode(info: &[u8], perm: &Permutation) -> Result<TurboCodeword> {
    turbo_encode_with(info, perm, &RscSpec::lte())
}

pub fn turbo_encode_with(info: &[u8], perm: &Permutation, spec: &RscSpec) -> Result<TurboCodeword> {
    if info.len() != perm.len() {
        return Err(Error::LengthMismatch {
            expected: perm.len(),
            actual: info.len(),
        });
    }
    let interleaved: Vec<u8> = perm.forward().iter().map(|&j| info[j]).collect();
    let first = rsc_encode_terminated(info, spec)?;
    let second = rsc_encode_terminated(&interleaved, spec)?;
    let mut tail = Vec::with_capacity(4 * spec.memory());
    interleave_tails(&first, &mut tail);
    interleave_tails(&second, &mut tail);
    Ok(TurboCodeword {
        systematic: info.iter().map(|b| b & 1).collect(),
        parity1: first.parity,
        parity2: second.parity,
        tail,
    })
}

/// Hamming weight of every transmitted bit.
pub fn codeword_weight(cw: &TurboCodeword) -> usize {
    [&cw.systematic, &cw.parity1, &cw.parity2, &cw.tail]
        .into_iter()
        .flatten()
        .filter(|&&b| b != 0)
        .count()
}

/// `L / (3L + 12)` in lowest terms.
pub fn code_rate(length: u64) -> Result<Ratio<u64>> {
    if length < 1 {
        return Err(Error::InvalidArgument("length must be at least 1".into()));
    }
    Ok(Ratio::new(length, 3 * length + 12))
}
