//! On-off keying with compensation-time dimming.
//!
//! Data slots carry the bits at full amplitude; dimming away from 50% is done
//! by appending a run of compensation slots pinned to the majority level (all
//! on to brighten, all off to darken) rather than by touching data slots, so
//! the per-bit decision threshold never moves. For a payload whose ones and
//! zeros balance, the slot average lands on the dimming target exactly (up to
//! the one-slot quantization of the compensation run).

use crate::error::{Error, Result};

const ON_LEVEL: f64 = 1.0;
const THRESHOLD: f64 = 0.5;

/// Compensation slots appended after `data_slots` payload slots.
///
/// The run length solves mean = d for a balanced payload: with r defined by
/// r = |2d-1| / (1 - |2d-1|), a payload of n slots (mean 1/2) plus round(n*r)
/// slots at the majority level averages to d.
fn compensation_slots(data_slots: usize, dimming: f64) -> usize {
    let excess = (2.0 * dimming - 1.0).abs();
    let ratio = excess / (1.0 - excess);
    (data_slots as f64 * ratio).round() as usize
}

pub(super) fn encode(bits: &[u8], dimming: f64) -> Vec<f64> {
    if bits.is_empty() {
        return Vec::new();
    }
    let comp = compensation_slots(bits.len(), dimming);
    let fill = if dimming > 0.5 { ON_LEVEL } else { 0.0 };
    let mut samples = Vec::with_capacity(bits.len() + comp);
    samples.extend(bits.iter().map(|&b| if b != 0 { ON_LEVEL } else { 0.0 }));
    samples.extend(std::iter::repeat(fill).take(comp));
    samples
}

pub(super) fn decode(samples: &[f64], dimming: f64) -> Result<Vec<u8>> {
    if samples.is_empty() {
        return Ok(Vec::new());
    }
    let data_slots = payload_len(samples.len(), dimming)?;
    Ok(samples[..data_slots]
        .iter()
        .map(|&s| u8::from(s > THRESHOLD))
        .collect())
}

/// Inverts n + compensation_slots(n) = total. The left side is strictly
/// increasing in n, so the payload length is unique when it exists.
fn payload_len(total: usize, dimming: f64) -> Result<usize> {
    let excess = (2.0 * dimming - 1.0).abs();
    let ratio = excess / (1.0 - excess);
    let guess = (total as f64 / (1.0 + ratio)).round() as i64;
    for n in (guess - 2).max(1)..=(guess + 2) {
        let n = n as usize;
        if n <= total && n + compensation_slots(n, dimming) == total {
            return Ok(n);
        }
    }
    Err(Error::Framing(format!(
        "{total} slots is not a valid payload+compensation length at dimming {dimming}"
    )))
}
