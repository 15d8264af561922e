//! Binary variable PPM: pulse position carries the bit, pulse width carries
//! the dimming level.
//!
//! A 0 transmits a leading pulse (flush with the slot start), a 1 a trailing
//! pulse (flush with the slot end); both have width fraction d, so dimming is
//! data-independent. Decoding compares the energies of the two slot halves.

use crate::error::{Error, Result};

use super::diffused_widths;

const ON_LEVEL: f64 = 1.0;

/// Even sample count resolving both the pulse (>= 2 samples) and the gap,
/// with a floor of 16. Evenness makes the half-slot energy split exact.
pub(super) fn samples_per_slot(dimming: f64) -> usize {
    let need = (2.0 / dimming).ceil().max((2.0 / (1.0 - dimming)).ceil()) as usize;
    let sps = need.max(16);
    sps + sps % 2
}

pub(super) fn encode(bits: &[u8], dimming: f64) -> Vec<f64> {
    let sps = samples_per_slot(dimming);
    let ideal = std::iter::repeat(dimming * sps as f64).take(bits.len());
    let mut samples = vec![0.0; bits.len() * sps];
    for (slot, (&bit, width)) in bits.iter().zip(diffused_widths(ideal)).enumerate() {
        debug_assert!(width >= 1 && width <= sps);
        let width = width.min(sps);
        let start = slot * sps + if bit != 0 { sps - width } else { 0 };
        samples[start..start + width].fill(ON_LEVEL);
    }
    samples
}

pub(super) fn decode(samples: &[f64], dimming: f64) -> Result<Vec<u8>> {
    let sps = samples_per_slot(dimming);
    if samples.len() % sps != 0 {
        return Err(Error::Framing(format!(
            "{} samples is not a whole number of {sps}-sample slots",
            samples.len()
        )));
    }
    Ok(samples
        .chunks_exact(sps)
        .map(|slot| {
            let lead: f64 = slot[..sps / 2].iter().sum();
            let trail: f64 = slot[sps / 2..].iter().sum();
            u8::from(lead <= trail)
        })
        .collect())
}
