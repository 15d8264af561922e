//! Overlapping PPM: a w-chip pulse whose start position carries the data.
//!
//! A symbol spans n chips and places one contiguous pulse of w chips at a
//! start position in [0, n-w]. Adjacent positions overlap, which packs
//! log2(n-w+1) bits into a symbol where the equal-duty plain PPM (one w-chip
//! slot out of n/w) would carry only log2(n/w). Only the first 2^k positions
//! are used, k = floor(log2(n-w+1)), so symbols map to whole bit words.

use crate::error::{Error, Result};

use super::{bits_to_index, index_to_bits, NOMINAL_MEAN_POWER};

/// Bits per symbol: floor(log2(n - w + 1)).
pub(super) fn usable_bits(chips_per_symbol: usize, pulse_width_chips: usize) -> usize {
    let positions = chips_per_symbol - pulse_width_chips + 1;
    (usize::BITS - 1 - positions.leading_zeros()) as usize
}

pub(super) fn encode(bits: &[u8], n: usize, w: usize) -> Vec<f64> {
    if bits.is_empty() {
        return Vec::new();
    }
    let kb = usable_bits(n, w);
    let symbols = bits.len().div_ceil(kb);
    // Pulse amplitude (n/w) * nominal keeps the symbol mean at the nominal
    // power for every position.
    let amplitude = n as f64 / w as f64 * NOMINAL_MEAN_POWER;
    let mut samples = vec![0.0; symbols * n];
    let mut padded = Vec::new();
    let bits = if bits.len() % kb == 0 {
        bits
    } else {
        padded.extend_from_slice(bits);
        padded.resize(symbols * kb, 0);
        &padded
    };
    for (sym, chunk) in bits.chunks_exact(kb).enumerate() {
        let start = sym * n + bits_to_index(chunk);
        samples[start..start + w].fill(amplitude);
    }
    samples
}

pub(super) fn decode(samples: &[f64], n: usize, w: usize) -> Result<Vec<u8>> {
    if samples.len() % n != 0 {
        return Err(Error::Framing(format!(
            "{} samples is not a whole number of {n}-chip symbols",
            samples.len()
        )));
    }
    let kb = usable_bits(n, w);
    let positions = 1usize << kb;
    let mut bits = Vec::with_capacity(samples.len() / n * kb);
    for symbol in samples.chunks_exact(n) {
        // ML for a rectangular pulse in white noise: correlate against each
        // candidate window and take the largest; strict > keeps ties on the
        // smallest start.
        let mut best = (0usize, f64::NEG_INFINITY);
        let mut window: f64 = symbol[..w].iter().sum();
        for p in 0..positions {
            if window > best.1 {
                best = (p, window);
            }
            if p + 1 < positions {
                window += symbol[p + w] - symbol[p];
            }
        }
        index_to_bits(best.0, kb, &mut bits);
    }
    Ok(bits)
}
