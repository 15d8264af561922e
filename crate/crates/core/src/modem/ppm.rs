//! L-ary pulse position modulation.
//!
//! Each symbol maps log2(L) bits (MSB first) to a pulse in one of L slots.
//! The pulse amplitude is L times the nominal mean power, so the average
//! optical power is data-independent and equal to the nominal level while
//! peak power grows with L.

use crate::error::{Error, Result};

use super::{bits_to_index, index_to_bits, NOMINAL_MEAN_POWER};

pub(super) fn encode(bits: &[u8], slots_per_symbol: usize) -> Vec<f64> {
    if bits.is_empty() {
        return Vec::new();
    }
    let kb = slots_per_symbol.trailing_zeros() as usize;
    let symbols = bits.len().div_ceil(kb);
    let amplitude = slots_per_symbol as f64 * NOMINAL_MEAN_POWER;
    let mut samples = vec![0.0; symbols * slots_per_symbol];
    let mut padded;
    let bits = if bits.len() % kb == 0 {
        bits
    } else {
        padded = bits.to_vec();
        padded.resize(symbols * kb, 0);
        &padded
    };
    for (sym, chunk) in bits.chunks_exact(kb).enumerate() {
        samples[sym * slots_per_symbol + bits_to_index(chunk)] = amplitude;
    }
    samples
}

pub(super) fn decode(samples: &[f64], slots_per_symbol: usize) -> Result<Vec<u8>> {
    if samples.len() % slots_per_symbol != 0 {
        return Err(Error::Framing(format!(
            "{} samples is not a whole number of {slots_per_symbol}-slot symbols",
            samples.len()
        )));
    }
    let kb = slots_per_symbol.trailing_zeros() as usize;
    let mut bits = Vec::with_capacity(samples.len() / slots_per_symbol * kb);
    for symbol in samples.chunks_exact(slots_per_symbol) {
        // Strict > keeps ties on the smallest slot index.
        let best = symbol
            .iter()
            .enumerate()
            .fold((0usize, f64::NEG_INFINITY), |acc, (i, &s)| {
                if s > acc.1 {
                    (i, s)
                } else {
                    acc
                }
            })
            .0;
        index_to_bits(best, kb, &mut bits);
    }
    Ok(bits)
}
