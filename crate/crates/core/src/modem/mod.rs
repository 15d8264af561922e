//! IM/DD waveform codecs and per-scheme efficiency metrics.
//!
//! Every encoder produces a [`Waveform`] of non-negative intensity samples
//! (information rides on optical intensity only), normalized so the mean
//! optical power equals the scheme's dimming level, or
//! [`NOMINAL_MEAN_POWER`] for schemes without a dimming knob. Decoders make
//! maximum-likelihood per-symbol decisions: threshold tests for OOK/PWM/VPPM,
//! largest-slot search for PPM/OPPM, per-subcarrier QAM slicing for OFDM.
//!
//! Bit blocks are zero-padded to a whole symbol where a scheme needs it
//! (PPM/OPPM/OFDM); `decode` then returns the padded length, so round-trip
//! comparisons should truncate to the original bit count.

pub mod ofdm;
mod ook;
mod oppm;
mod ppm;
mod pwm;
mod vppm;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean optical power target for schemes without a dimming parameter
/// (PPM, OPPM, OFDM), so cross-scheme duty/power comparisons are made at the
/// same average intensity as a 50%-dimmed OOK signal.
pub const NOMINAL_MEAN_POWER: f64 = 0.5;

/// Normalized slot clock; all waveforms run at one slot per time unit.
pub const DEFAULT_SLOT_RATE_HZ: f64 = 1.0;

/// A non-negative intensity sample sequence with its slot clock.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: Vec<f64>,
    pub samples_per_slot: usize,
    pub slot_rate_hz: f64,
}

impl Waveform {
    pub fn mean(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Fraction of samples carrying light (strictly positive).
    pub fn duty(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().filter(|&&s| s > 0.0).count() as f64 / self.samples.len() as f64
    }
}

/// Modulation scheme selector plus its per-variant parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SchemeConfig {
    /// On-off keying with compensation-time dimming.
    Ook { dimming: f64 },
    /// Two-width pulse-width keying around the dimming duty.
    Pwm { dimming: f64, width_delta: f64 },
    /// L-ary pulse position modulation, one pulse per L-slot symbol.
    Ppm { slots_per_symbol: usize },
    /// Binary variable PPM: pulse position carries the bit, width the dimming.
    Vppm { dimming: f64 },
    /// Overlapping PPM: a w-chip pulse starting at one of n-w+1 positions.
    Oppm {
        chips_per_symbol: usize,
        pulse_width_chips: usize,
    },
    /// DC-biased optical OFDM over all data subcarriers.
    DcoOfdm {
        subcarriers: usize,
        qam_order: usize,
        bias_db: f64,
    },
    /// Asymmetrically clipped optical OFDM, odd subcarriers only.
    AcoOfdm { subcarriers: usize, qam_order: usize },
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SchemeConfig::Ook { dimming } => check_unit_open("dimming", dimming),
            SchemeConfig::Pwm {
                dimming,
                width_delta,
            } => {
                check_unit_open("dimming", dimming)?;
                let cap = dimming.min(1.0 - dimming);
                if !(width_delta > 0.0 && width_delta < cap) {
                    return Err(Error::InvalidConfig(format!(
                        "width_delta {width_delta} outside (0, min(d, 1-d) = {cap})"
                    )));
                }
                Ok(())
            }
            SchemeConfig::Ppm { slots_per_symbol } => {
                if slots_per_symbol < 2 || !slots_per_symbol.is_power_of_two() {
                    return Err(Error::InvalidConfig(format!(
                        "slots_per_symbol {slots_per_symbol} must be a power of two >= 2"
                    )));
                }
                Ok(())
            }
            SchemeConfig::Vppm { dimming } => check_unit_open("dimming", dimming),
            SchemeConfig::Oppm {
                chips_per_symbol,
                pulse_width_chips,
            } => {
                if pulse_width_chips < 1 || pulse_width_chips >= chips_per_symbol {
                    return Err(Error::InvalidConfig(format!(
                        "pulse width {pulse_width_chips} must satisfy 1 <= w < n = {chips_per_symbol}"
                    )));
                }
                Ok(())
            }
            SchemeConfig::DcoOfdm {
                subcarriers,
                qam_order,
                bias_db,
            } => {
                check_ofdm_sizes(subcarriers, qam_order)?;
                if !(bias_db > 0.0 && bias_db.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "bias_db {bias_db} must be positive and finite"
                    )));
                }
                Ok(())
            }
            SchemeConfig::AcoOfdm {
                subcarriers,
                qam_order,
            } => check_ofdm_sizes(subcarriers, qam_order),
        }
    }

    /// The short scheme name used by front ends (`ook`, `ppm4`, `oppm8,4`,
    /// `dco-ofdm`, ...).
    pub fn name(&self) -> String {
        match self {
            SchemeConfig::Ook { .. } => "ook".into(),
            SchemeConfig::Pwm { .. } => "pwm".into(),
            SchemeConfig::Ppm { slots_per_symbol } => format!("ppm{slots_per_symbol}"),
            SchemeConfig::Vppm { .. } => "vppm".into(),
            SchemeConfig::Oppm {
                chips_per_symbol,
                pulse_width_chips,
            } => format!("oppm{chips_per_symbol},{pulse_width_chips}"),
            SchemeConfig::DcoOfdm { .. } => "dco-ofdm".into(),
            SchemeConfig::AcoOfdm { .. } => "aco-ofdm".into(),
        }
    }

    /// Parses a front-end scheme name. Parameterized forms take their
    /// parameters inline (`ppm8`, `oppm16,4`); everything else uses defaults
    /// of dimming 0.5, width_delta 0.1, 64 subcarriers, 4-QAM, 13 dB bias.
    pub fn parse_name(name: &str) -> Result<SchemeConfig> {
        let unknown = || {
            Error::InvalidConfig(format!(
                "unknown scheme '{name}'; valid: ook, pwm, ppm<L>, vppm, oppm<n>,<w>, dco-ofdm, aco-ofdm"
            ))
        };
        let cfg = match name {
            "ook" => SchemeConfig::Ook { dimming: 0.5 },
            "pwm" => SchemeConfig::Pwm {
                dimming: 0.5,
                width_delta: 0.1,
            },
            "vppm" => SchemeConfig::Vppm { dimming: 0.5 },
            "dco-ofdm" => SchemeConfig::DcoOfdm {
                subcarriers: 64,
                qam_order: 4,
                bias_db: 13.0,
            },
            "aco-ofdm" => SchemeConfig::AcoOfdm {
                subcarriers: 64,
                qam_order: 4,
            },
            _ => {
                if let Some(rest) = name.strip_prefix("oppm") {
                    let (n, w) = rest.split_once(',').ok_or_else(unknown)?;
                    SchemeConfig::Oppm {
                        chips_per_symbol: n.parse().map_err(|_| unknown())?,
                        pulse_width_chips: w.parse().map_err(|_| unknown())?,
                    }
                } else if let Some(rest) = name.strip_prefix("ppm") {
                    SchemeConfig::Ppm {
                        slots_per_symbol: rest.parse().map_err(|_| unknown())?,
                    }
                } else {
                    return Err(unknown());
                }
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Samples per slot the encoder will use for this config.
    pub fn samples_per_slot(&self) -> usize {
        match *self {
            SchemeConfig::Ook { .. } | SchemeConfig::Ppm { .. } | SchemeConfig::Oppm { .. } => 1,
            SchemeConfig::Pwm { width_delta, .. } => pwm::samples_per_slot(width_delta),
            SchemeConfig::Vppm { dimming } => vppm::samples_per_slot(dimming),
            SchemeConfig::DcoOfdm { subcarriers, .. }
            | SchemeConfig::AcoOfdm { subcarriers, .. } => subcarriers,
        }
    }
}

fn check_unit_open(name: &str, value: f64) -> Result<()> {
    if !(value > 0.0 && value < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "{name} {value} outside (0, 1)"
        )));
    }
    Ok(())
}

fn check_ofdm_sizes(subcarriers: usize, qam_order: usize) -> Result<()> {
    if subcarriers < 8 || !subcarriers.is_power_of_two() {
        return Err(Error::InvalidConfig(format!(
            "subcarriers {subcarriers} must be a power of two >= 8"
        )));
    }
    // Square power of two: 4, 16, 64, 256, ...
    let is_square_pow2 = qam_order.is_power_of_two()
        && qam_order >= 4
        && qam_order.trailing_zeros() % 2 == 0;
    if !is_square_pow2 {
        return Err(Error::InvalidConfig(format!(
            "qam_order {qam_order} must be a square power of two (4, 16, 64, ...)"
        )));
    }
    Ok(())
}

/// Spectral-efficiency, power, and throughput proxies for one scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeMetrics {
    /// Bits carried per slot (per chip/sample for multi-slot symbols).
    pub bits_per_slot: f64,
    /// Average on-fraction of the waveform, a transmit-power proxy.
    pub duty_cycle: f64,
    /// Throughput relative to the scheme's 50%-dimming / nominal maximum.
    pub rate_factor: f64,
}

/// Encodes a bit block (values 0/1) into an intensity waveform.
pub fn encode(bits: &[u8], config: &SchemeConfig) -> Result<Waveform> {
    config.validate()?;
    let samples = match *config {
        SchemeConfig::Ook { dimming } => ook::encode(bits, dimming),
        SchemeConfig::Pwm {
            dimming,
            width_delta,
        } => pwm::encode(bits, dimming, width_delta),
        SchemeConfig::Ppm { slots_per_symbol } => ppm::encode(bits, slots_per_symbol),
        SchemeConfig::Vppm { dimming } => vppm::encode(bits, dimming),
        SchemeConfig::Oppm {
            chips_per_symbol,
            pulse_width_chips,
        } => oppm::encode(bits, chips_per_symbol, pulse_width_chips),
        SchemeConfig::DcoOfdm {
            subcarriers,
            qam_order,
            bias_db,
        } => ofdm::encode_dco(bits, subcarriers, qam_order, bias_db)?,
        SchemeConfig::AcoOfdm {
            subcarriers,
            qam_order,
        } => ofdm::encode_aco(bits, subcarriers, qam_order)?,
    };
    Ok(Waveform {
        samples,
        samples_per_slot: config.samples_per_slot(),
        slot_rate_hz: DEFAULT_SLOT_RATE_HZ,
    })
}

/// Decodes a (possibly noisy) waveform produced by a compatible config.
pub fn decode(waveform: &Waveform, config: &SchemeConfig) -> Result<Vec<u8>> {
    config.validate()?;
    if waveform.samples_per_slot != config.samples_per_slot() {
        return Err(Error::Framing(format!(
            "waveform has {} samples per slot, config {} expects {}",
            waveform.samples_per_slot,
            config.name(),
            config.samples_per_slot()
        )));
    }
    let s = &waveform.samples;
    match *config {
        SchemeConfig::Ook { dimming } => ook::decode(s, dimming),
        SchemeConfig::Pwm {
            dimming,
            width_delta,
        } => pwm::decode(s, dimming, width_delta),
        SchemeConfig::Ppm { slots_per_symbol } => ppm::decode(s, slots_per_symbol),
        SchemeConfig::Vppm { dimming } => vppm::decode(s, dimming),
        SchemeConfig::Oppm {
            chips_per_symbol,
            pulse_width_chips,
        } => oppm::decode(s, chips_per_symbol, pulse_width_chips),
        SchemeConfig::DcoOfdm {
            subcarriers,
            qam_order,
            bias_db,
        } => ofdm::decode_dco(s, subcarriers, qam_order, bias_db),
        SchemeConfig::AcoOfdm {
            subcarriers,
            qam_order,
        } => ofdm::decode_aco(s, subcarriers, qam_order),
    }
}

/// Efficiency metrics for one scheme config.
pub fn scheme_metrics(config: &SchemeConfig) -> Result<SchemeMetrics> {
    config.validate()?;
    Ok(match *config {
        SchemeConfig::Ook { dimming } => SchemeMetrics {
            bits_per_slot: 1.0,
            duty_cycle: dimming,
            rate_factor: 1.0 - (2.0 * dimming - 1.0).abs(),
        },
        SchemeConfig::Pwm { dimming, .. } => SchemeMetrics {
            bits_per_slot: 1.0,
            duty_cycle: dimming,
            rate_factor: 1.0,
        },
        SchemeConfig::Ppm { slots_per_symbol } => {
            let l = slots_per_symbol as f64;
            SchemeMetrics {
                bits_per_slot: l.log2() / l,
                duty_cycle: 1.0 / l,
                rate_factor: 1.0,
            }
        }
        SchemeConfig::Vppm { dimming } => SchemeMetrics {
            bits_per_slot: 0.5,
            duty_cycle: dimming,
            rate_factor: 1.0,
        },
        SchemeConfig::Oppm {
            chips_per_symbol,
            pulse_width_chips,
        } => {
            let n = chips_per_symbol as f64;
            let w = pulse_width_chips as f64;
            SchemeMetrics {
                // Alphabet of n-w+1 start positions per n-chip symbol.
                bits_per_slot: (n - w + 1.0).log2() / n,
                duty_cycle: w / n,
                rate_factor: 1.0,
            }
        }
        SchemeConfig::DcoOfdm {
            subcarriers,
            qam_order,
            ..
        } => {
            let n = subcarriers as f64;
            let data_bins = (subcarriers / 2 - 1) as f64;
            SchemeMetrics {
                bits_per_slot: data_bins * (qam_order as f64).log2() / n,
                duty_cycle: 1.0,
                rate_factor: 1.0,
            }
        }
        SchemeConfig::AcoOfdm {
            subcarriers,
            qam_order,
        } => {
            let n = subcarriers as f64;
            let data_bins = (subcarriers / 4) as f64;
            SchemeMetrics {
                bits_per_slot: data_bins * (qam_order as f64).log2() / n,
                // Zero-clipping darkens half of every symbol.
                duty_cycle: 0.5,
                rate_factor: 1.0,
            }
        }
    })
}

// ------------------------------------------------- shared codec helpers --

/// MSB-first bit block -> integer. Any nonzero bit counts as 1.
pub(crate) fn bits_to_index(bits: &[u8]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b != 0))
}

/// Integer -> MSB-first bit block of fixed width.
pub(crate) fn index_to_bits(index: usize, width: usize, out: &mut Vec<u8>) {
    for k in (0..width).rev() {
        out.push(((index >> k) & 1) as u8);
    }
}

/// Quantizes a sequence of ideal pulse widths (in samples) to integers with
/// cumulative error diffusion, so the total rounds once globally instead of
/// once per symbol. Keeps each width within one sample of its ideal.
pub(crate) fn diffused_widths(ideal: impl Iterator<Item = f64>) -> Vec<usize> {
    let mut target = 0.0;
    let mut emitted = 0usize;
    ideal
        .map(|w| {
            target += w;
            let total = target.round().max(emitted as f64) as usize;
            let width = total - emitted;
            emitted = total;
            width
        })
        .collect()
}
