//! Largest-spread, best-spectrum interleaver search.
//!
//! Candidates are enumerated one per null-polynomial class (the member with
//! the smallest `(q1, q2, q3)`), filtered to permutation polynomials that are
//! not reducible to linear ones, then to the classes with the largest spread
//! (or a spread of at least a floor). Every survivor's distance spectrum is
//! computed and the truncated union bound picked as objective decides the
//! winner; exact ties go to the smallest `(q1, q2, q3)`.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{null_class_size, null_polynomials_up_to, quadratic_null_class_size, ModPoly};
use crate::presets;
use crate::spectrum::{
    distance_spectrum_with, wu_max_stable, DistanceSpectrum, SpectrumOptions, DEFAULT_WU_MAX,
};
use crate::spread::spread_at_least;
use crate::tub::{tub_awgn, tub_rayleigh, ChannelModel};
use crate::turbo::code_rate;

/// Relative gap below which two objective values are grouped as a tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Ber,
    Fer,
}

impl Objective {
    /// BER for AWGN, FER for Rayleigh fading.
    pub fn default_for(channel: ChannelModel) -> Self {
        match channel {
            ChannelModel::Awgn => Self::Ber,
            ChannelModel::Rayleigh => Self::Fer,
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ber" => Ok(Self::Ber),
            "fer" => Ok(Self::Fer),
            other => Err(Error::InvalidArgument(format!(
                "unknown objective {other:?}, expected ber or fer"
            ))),
        }
    }
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Ber => "ber",
            Self::Fer => "fer",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Trellis nodes allowed per spectrum computation.
    pub spectrum_nodes: Option<u64>,
    /// Wall-clock limit for the spectrum phase.
    #[serde(with = "opt_secs")]
    pub deadline: Option<Duration>,
}

mod opt_secs {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Option<Duration>, s: S) -> Result<S::Ok, S::Error> {
        d.map(|d| d.as_secs_f64()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Duration>, D::Error> {
        let secs = Option::<f64>::deserialize(d)?;
        secs.map(|s| Duration::try_from_secs_f64(s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub length: u64,
    /// 2 for quadratic, 3 for cubic (cubic classes include quadratic ones).
    pub degree: usize,
    pub channel: ChannelModel,
    pub objective: Objective,
    pub snr_db: f64,
    pub terms: usize,
    pub wu_max: usize,
    pub d_floor: Option<usize>,
    pub budget: Budget,
}

impl SearchConfig {
    /// Configuration with the reference-table SNR and truncation for `length`.
    pub fn preset(length: u64, degree: usize, channel: ChannelModel) -> Result<Self> {
        let snr_db = presets::default_snr_db(channel, length).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "no reference SNR for L = {length}; pass one explicitly"
            ))
        })?;
        Ok(Self {
            length,
            degree,
            channel,
            objective: Objective::default_for(channel),
            snr_db,
            terms: presets::default_terms(length),
            wu_max: DEFAULT_WU_MAX,
            d_floor: None,
            budget: Budget::default(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.length < 2 {
            return bad(format!("length {} below 2", self.length));
        }
        if !matches!(self.degree, 2 | 3) {
            return bad(format!("degree {} not 2 or 3", self.degree));
        }
        if self.terms == 0 {
            return bad("spectrum terms must be at least 1".into());
        }
        if self.wu_max == 0 {
            return bad("wu_max must be at least 1".into());
        }
        if !self.snr_db.is_finite() {
            return bad(format!("SNR {} dB is not finite", self.snr_db));
        }
        if self.d_floor.is_some_and(|f| f < 2) {
            return bad("spread floor must be at least 2".into());
        }
        Ok(())
    }
}

/// Sizes of the successive candidate sets.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateCounts {
    /// Null-polynomial classes of coefficient triples.
    pub classes: u64,
    /// Classes that permute and are not reducible to linear.
    pub permutation_classes: u64,
    /// Classes passing the spread filter.
    pub survivors: u64,
    /// Survivors whose spectrum was computed.
    pub spectra_computed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub config: SearchConfig,
    pub winner: ModPoly,
    /// Winner in table notation.
    pub winner_text: String,
    /// Spread of the winner.
    pub d_max: usize,
    /// Largest spread over all permutation classes.
    pub largest_spread: usize,
    pub tub_ber: f64,
    pub tub_fer: f64,
    /// Raw coefficient triples (`q0 = 0`) attaining the optimum.
    pub optimum_count: u64,
    pub optimal_classes: Vec<ModPoly>,
    /// Classes grouped with the optimum by [`TIE_TOLERANCE`] without being bit-equal.
    pub near_ties: Vec<ModPoly>,
    pub candidates: CandidateCounts,
    pub winner_spectrum: DistanceSpectrum,
    /// Set when a budget stopped the search; the report is then not authoritative.
    pub budget_exceeded: bool,
    /// For runs with `wu_max` below the default: whether the winner's spectrum
    /// is unchanged at `wu_max - 1`.
    pub wu_max_stable: Option<bool>,
}

/// Closed-form number of null-polynomial classes over `(q1, ..., q_degree)`.
pub fn class_count(length: u64, degree: usize) -> u64 {
    match degree {
        2 => length * length / quadratic_null_class_size(length),
        _ => length * length * length / null_class_size(length),
    }
}

/// Number of raw coefficient triples in one class of the given search degree.
pub fn class_size(length: u64, degree: usize) -> u64 {
    match degree {
        2 => quadratic_null_class_size(length),
        _ => null_class_size(length),
    }
}

fn nulls_for(length: u64, degree: usize) -> Result<Vec<(u64, u64, u64)>> {
    Ok(null_polynomials_up_to(length, degree)?
        .iter()
        .filter(|n| !n.is_zero())
        .map(ModPoly::key)
        .collect())
}

#[inline]
fn is_canonical(key: (u64, u64, u64), nulls: &[(u64, u64, u64)], m: u64) -> bool {
    nulls.iter().all(|n| {
        let shifted = ((key.0 + n.0) % m, (key.1 + n.1) % m, (key.2 + n.2) % m);
        shifted > key
    })
}

fn check_degree(degree: usize) -> Result<()> {
    if matches!(degree, 2 | 3) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "degree {degree} not 2 or 3"
        )))
    }
}

/// One canonical representative per class, before any permutation filtering,
/// in lexicographic `(q1, q2, q3)` order.
pub fn enumerate_classes(length: u64, degree: usize) -> Result<Vec<ModPoly>> {
    check_degree(degree)?;
    let nulls = nulls_for(length, degree)?;
    let q3_range = if degree == 3 { length } else { 1 };
    let mut out = Vec::new();
    for q1 in 0..length {
        for q2 in 0..length {
            for q3 in 0..q3_range {
                if is_canonical((q1, q2, q3), &nulls, length) {
                    out.push(ModPoly::cubic(length, q1, q2, q3)?);
                }
            }
        }
    }
    Ok(out)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A permutation of `Z_L` reduces to a permutation of `Z_p` for every prime
/// `p | L`; tabulating that necessary condition rejects most triples cheaply.
struct PrimeSieve {
    primes: Vec<(u64, Vec<bool>)>,
}

impl PrimeSieve {
    fn new(length: u64) -> Self {
        let primes = prime_factors(length)
            .into_iter()
            .filter(|&p| p <= 64)
            .map(|p| {
                let mut table = vec![false; (p * p * p) as usize];
                for a in 0..p {
                    for b in 0..p {
                        for c in 0..p {
                            let q = ModPoly::cubic(p.max(2), a, b, c).expect("p >= 2");
                            table[((a * p + b) * p + c) as usize] = q.is_permutation();
                        }
                    }
                }
                (p, table)
            })
            .collect();
        Self { primes }
    }

    fn may_permute(&self, key: (u64, u64, u64)) -> bool {
        self.primes.iter().all(|(p, table)| {
            let idx = ((key.0 % p) * p + key.1 % p) * p + key.2 % p;
            table[idx as usize]
        })
    }
}

/// Canonical representatives of every class that permutes `Z_L` and is not
/// reducible to a linear polynomial, in lexicographic order.
pub fn enumerate_candidates(length: u64, degree: usize) -> Result<Vec<ModPoly>> {
    Ok(enumerate_candidates_counted(length, degree)?.1)
}

fn enumerate_candidates_counted(length: u64, degree: usize) -> Result<(u64, Vec<ModPoly>)> {
    check_degree(degree)?;
    let nulls = nulls_for(length, degree)?;
    let all_nulls = nulls_for(length, 3)?;
    let sieve = PrimeSieve::new(length);
    let q3_range = if degree == 3 { length } else { 1 };
    let per_q1: Vec<(u64, Vec<ModPoly>)> = (0..length)
        .into_par_iter()
        .map(|q1| {
            let mut classes = 0;
            let mut keep = Vec::new();
            for q2 in 0..length {
                for q3 in 0..q3_range {
                    let key = (q1, q2, q3);
                    if !is_canonical(key, &nulls, length) {
                        continue;
                    }
                    classes += 1;
                    if !sieve.may_permute(key) {
                        continue;
                    }
                    let p = ModPoly::cubic(length, q1, q2, q3).expect("valid modulus");
                    if !p.is_permutation() {
                        continue;
                    }
                    // reducible to linear iff some null polynomial cancels q2 and q3
                    let linear = (q2 == 0 && q3 == 0)
                        || all_nulls
                            .iter()
                            .any(|n| (q2 + n.1) % length == 0 && (q3 + n.2) % length == 0);
                    if !linear {
                        keep.push(p);
                    }
                }
            }
            (classes, keep)
        })
        .collect();
    let classes = per_q1.iter().map(|(c, _)| c).sum();
    let candidates = per_q1.into_iter().flat_map(|(_, k)| k).collect();
    Ok((classes, candidates))
}

/// Outcome of the spread filter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpreadFilter {
    /// Largest spread among the candidates.
    pub d_max: usize,
    /// Surviving candidates with their spread, in input order.
    pub survivors: Vec<(ModPoly, usize)>,
}

/// Keeps the candidates attaining the largest spread, or with `floor` set,
/// every candidate whose spread is at least `floor`.
pub fn largest_spread_set(candidates: &[ModPoly], floor: Option<usize>) -> Result<SpreadFilter> {
    if candidates.is_empty() {
        return Err(Error::NoCandidates);
    }
    let best = AtomicUsize::new(floor.unwrap_or(0));
    let spreads: Vec<Option<usize>> = candidates
        .par_iter()
        .map(|p| {
            let perm = p.as_permutation().ok()?;
            let lower = match floor {
                Some(f) => f,
                None => best.load(Ordering::Relaxed),
            };
            let d = spread_at_least(&perm, lower)?;
            best.fetch_max(d, Ordering::Relaxed);
            Some(d)
        })
        .collect();
    let d_max = spreads.iter().flatten().copied().max();
    let survivors: Vec<(ModPoly, usize)> = candidates
        .iter()
        .zip(&spreads)
        .filter_map(|(p, d)| {
            let d = (*d)?;
            let keep = match floor {
                Some(f) => d >= f,
                None => Some(d) == d_max,
            };
            keep.then_some((*p, d))
        })
        .collect();
    match d_max {
        Some(d_max) if !survivors.is_empty() => Ok(SpreadFilter { d_max, survivors }),
        _ => Err(Error::NoCandidates),
    }
}

struct Evaluated {
    poly: ModPoly,
    d: usize,
    spectrum: DistanceSpectrum,
    tub_ber: f64,
    tub_fer: f64,
}

impl Evaluated {
    fn objective(&self, objective: Objective) -> f64 {
        match objective {
            Objective::Ber => self.tub_ber,
            Objective::Fer => self.tub_fer,
        }
    }
}

/// Runs the full search described by `config`.
pub fn optimize(config: &SearchConfig) -> Result<SearchReport> {
    config.validate()?;
    let length = config.length;
    let (classes, candidates) = enumerate_candidates_counted(length, config.degree)?;
    let filter = largest_spread_set(&candidates, config.d_floor)?;
    let rate = code_rate(length)?;
    let started = Instant::now();
    let spec_options = SpectrumOptions {
        node_budget: config.budget.spectrum_nodes,
        parallel: false,
    };
    let outcomes: Vec<Option<Evaluated>> = filter
        .survivors
        .par_iter()
        .map(|&(poly, d)| -> Result<Option<Evaluated>> {
            if config
                .budget
                .deadline
                .is_some_and(|limit| started.elapsed() > limit)
            {
                return Ok(None);
            }
            let perm = poly.as_permutation()?;
            let spectrum =
                match distance_spectrum_with(&perm, config.terms, config.wu_max, &spec_options) {
                    Ok(s) => s,
                    Err(Error::BudgetExceeded { .. }) => return Ok(None),
                    Err(e) => return Err(e),
                };
            let bound = match config.channel {
                ChannelModel::Awgn => tub_awgn(&spectrum, length, rate, config.snr_db)?,
                ChannelModel::Rayleigh => tub_rayleigh(&spectrum, length, rate, config.snr_db)?,
            };
            Ok(Some(Evaluated {
                poly,
                d,
                spectrum,
                tub_ber: bound.tub_ber,
                tub_fer: bound.tub_fer,
            }))
        })
        .collect::<Result<_>>()?;
    let budget_exceeded = outcomes.iter().any(Option::is_none);
    let evaluated: Vec<Evaluated> = outcomes.into_iter().flatten().collect();
    if evaluated.is_empty() {
        return Err(Error::BudgetExceeded { explored: 0 });
    }

    let best = evaluated
        .iter()
        .map(|e| e.objective(config.objective))
        .fold(f64::INFINITY, f64::min);
    let group: Vec<&Evaluated> = evaluated
        .iter()
        .filter(|e| e.objective(config.objective) <= best + best.abs() * TIE_TOLERANCE)
        .collect();
    let winner = group[0];
    let near_ties = group
        .iter()
        .filter(|e| e.objective(config.objective) != best)
        .map(|e| e.poly)
        .collect();
    let wu_max_stable = if config.wu_max < DEFAULT_WU_MAX {
        Some(wu_max_stable(
            &winner.poly.as_permutation()?,
            config.terms,
            config.wu_max,
            &SpectrumOptions::default(),
        )?)
    } else {
        None
    };
    Ok(SearchReport {
        config: config.clone(),
        winner: winner.poly,
        winner_text: winner.poly.to_string(),
        d_max: winner.d,
        largest_spread: filter.d_max,
        tub_ber: winner.tub_ber,
        tub_fer: winner.tub_fer,
        optimum_count: group.len() as u64 * class_size(length, config.degree),
        optimal_classes: group.iter().map(|e| e.poly).collect(),
        near_ties,
        candidates: CandidateCounts {
            classes,
            permutation_classes: candidates.len() as u64,
            survivors: filter.survivors.len() as u64,
            spectra_computed: evaluated.len() as u64,
        },
        winner_spectrum: winner.spectrum.clone(),
        budget_exceeded,
        wu_max_stable,
    })
}

/// Search over every class whose spread is at least `config.d_floor`.
pub fn dmin_imposed_search(config: &SearchConfig) -> Result<SearchReport> {
    if config.d_floor.is_none() {
        return Err(Error::InvalidArgument("a spread floor is required".into()));
    }
    optimize(config)
}
