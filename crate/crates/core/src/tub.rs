//! Truncated union bounds on bit and frame error rates.
//!
//! With `s = 10^(snr_db / 10)` taken as `Eb/N0` and `R` the code rate:
//!
//! * AWGN: `BER <= 0.5 Σ (w_i / L) erfc(sqrt(d_i R s))`, `FER <= 0.5 Σ N_i erfc(...)`
//! * independent Rayleigh: the `erfc` factor becomes `(1 / (1 + R s))^{d_i}`.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::DistanceSpectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelModel {
    Awgn,
    Rayleigh,
}

impl std::str::FromStr for ChannelModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "awgn" => Ok(Self::Awgn),
            "rayleigh" => Ok(Self::Rayleigh),
            other => Err(Error::InvalidArgument(format!(
                "unknown channel {other:?}, expected awgn or rayleigh"
            ))),
        }
    }
}

impl std::fmt::Display for ChannelModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Awgn => "awgn",
            Self::Rayleigh => "rayleigh",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub tub_ber: f64,
    pub tub_fer: f64,
    pub snr_db: f64,
    /// Code rate as `(numerator, denominator)`.
    pub rate: (u64, u64),
    pub terms_used: usize,
}

/// Neumaier-compensated running sum.
#[derive(Default)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

fn check(length: u64, snr_db: f64) -> Result<()> {
    if length == 0 {
        return Err(Error::InvalidArgument("length must be positive".into()));
    }
    if !snr_db.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "SNR {snr_db} dB is not finite"
        )));
    }
    Ok(())
}

fn bound_with(
    spec: &DistanceSpectrum,
    length: u64,
    rate: Ratio<u64>,
    snr_db: f64,
    term: impl Fn(f64) -> f64,
) -> Result<BoundResult> {
    check(length, snr_db)?;
    let mut ber = Compensated::default();
    let mut fer = Compensated::default();
    for line in &spec.lines {
        let t = term(f64::from(line.d));
        ber.add(line.w as f64 / length as f64 * t);
        fer.add(line.n as f64 * t);
    }
    Ok(BoundResult {
        tub_ber: 0.5 * ber.value(),
        tub_fer: 0.5 * fer.value(),
        snr_db,
        rate: (*rate.numer(), *rate.denom()),
        terms_used: spec.lines.len(),
    })
}

fn rate_f64(rate: Ratio<u64>) -> f64 {
    *rate.numer() as f64 / *rate.denom() as f64
}

fn linear_snr(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0)
}

/// Truncated union bounds for coherent BPSK on AWGN.
pub fn tub_awgn(
    spec: &DistanceSpectrum,
    length: u64,
    rate: Ratio<u64>,
    snr_db: f64,
) -> Result<BoundResult> {
    let rs = rate_f64(rate) * linear_snr(snr_db);
    bound_with(spec, length, rate, snr_db, |d| libm::erfc((d * rs).sqrt()))
}

/// Truncated union bounds for independent Rayleigh fading.
pub fn tub_rayleigh(
    spec: &DistanceSpectrum,
    length: u64,
    rate: Ratio<u64>,
    snr_db: f64,
) -> Result<BoundResult> {
    let base = 1.0 / (1.0 + rate_f64(rate) * linear_snr(snr_db));
    bound_with(spec, length, rate, snr_db, |d| base.powf(d))
}

pub fn tub(
    channel: ChannelModel,
    spec: &DistanceSpectrum,
    length: u64,
    rate: Ratio<u64>,
    snr_db: f64,
) -> Result<BoundResult> {
    match channel {
        ChannelModel::Awgn => tub_awgn(spec, length, rate, snr_db),
        ChannelModel::Rayleigh => tub_rayleigh(spec, length, rate, snr_db),
    }
}
