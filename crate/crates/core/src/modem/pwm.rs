//! Pulse-width keying around the dimming duty.
//!
//! Each bit occupies one slot of `samples_per_slot` samples holding a single
//! full-amplitude pulse: width fraction d + delta for a 1, d - delta for a 0.
//! Widths are quantized with cumulative error diffusion, so the waveform mean
//! stays on the dimming target for balanced payloads while every slot still
//! decodes on its own energy.

use crate::error::{Error, Result};

use super::diffused_widths;

const ON_LEVEL: f64 = 1.0;

/// Enough samples that the two widths differ by at least four samples, with
/// a floor of 16 for coarse deltas.
pub(super) fn samples_per_slot(width_delta: f64) -> usize {
    ((2.0 / width_delta).ceil() as usize).max(16)
}

pub(super) fn encode(bits: &[u8], dimming: f64, width_delta: f64) -> Vec<f64> {
    let sps = samples_per_slot(width_delta);
    let ideal = bits.iter().map(|&b| {
        let frac = if b != 0 {
            dimming + width_delta
        } else {
            dimming - width_delta
        };
        frac * sps as f64
    });
    let mut samples = vec![0.0; bits.len() * sps];
    for (slot, width) in diffused_widths(ideal).into_iter().enumerate() {
        debug_assert!(width <= sps);
        let start = slot * sps;
        samples[start..start + width.min(sps)].fill(ON_LEVEL);
    }
    samples
}

pub(super) fn decode(samples: &[f64], dimming: f64, width_delta: f64) -> Result<Vec<u8>> {
    let sps = samples_per_slot(width_delta);
    if samples.len() % sps != 0 {
        return Err(Error::Framing(format!(
            "{} samples is not a whole number of {sps}-sample slots",
            samples.len()
        )));
    }
    // The two hypotheses are symmetric about d, so the energy midpoint d*sps
    // is the ML threshold.
    let threshold = dimming * sps as f64;
    Ok(samples
        .chunks_exact(sps)
        .map(|slot| u8::from(slot.iter().sum::<f64>() > threshold))
        .collect())
}
