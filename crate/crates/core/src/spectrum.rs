//! Distance spectrum of a turbo code restricted to low-weight information words.
//!
//! [`distance_spectrum`] finds every information word of weight at most
//! `wu_max` whose codeword weight is at most a threshold `T`, raising `T`
//! until `M` distinct weights are covered. Writing the codeword weight as
//! `d = w + c1 + c2` (information weight plus the parity and tail weight of
//! each constituent encoder), any codeword with `d <= T` satisfies
//! `w + 2 c1 <= T` or `w + 2 c2 <= T`. Two depth-first trellis walks cover
//! those halves: the first runs on encoder 1 in natural order, the second on
//! encoder 2 in interleaved order, and a word found by both is counted only
//! by the first. Each walk prunes on `w + 2 c` plus an admissible bound on
//! the cost of returning the encoder to the zero state.
//!
//! [`brute_force_spectrum`] enumerates all `2^L - 1` words and is the oracle
//! the trellis search is tested against.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::turbo::{turbo_encode, RscSpec};

/// Largest length accepted by [`brute_force_spectrum`].
pub const BRUTE_FORCE_MAX_LEN: usize = 22;

/// Information-weight cap used for the published tables.
pub const DEFAULT_WU_MAX: usize = 10;

/// One spectrum line `(d, N, w)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpectrumLine {
    /// Codeword weight.
    pub d: u32,
    /// Number of codewords of weight `d`.
    #[serde(rename = "N")]
    pub n: u64,
    /// Total information weight of those codewords.
    pub w: u64,
}

/// First `M` lines of a distance spectrum, ascending in `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceSpectrum {
    pub wu_max: usize,
    #[serde(rename = "M")]
    pub terms: usize,
    pub lines: Vec<SpectrumLine>,
}

impl DistanceSpectrum {
    /// Spectrum with no lines; the identity of [`merge_spectra`].
    pub fn empty(wu_max: usize, terms: usize) -> Self {
        Self {
            wu_max,
            terms,
            lines: Vec::new(),
        }
    }

    /// Builds a spectrum from unsorted lines, validating the line invariants.
    pub fn from_lines(wu_max: usize, terms: usize, mut lines: Vec<SpectrumLine>) -> Result<Self> {
        lines.sort_by_key(|l| l.d);
        for pair in lines.windows(2) {
            if pair[0].d == pair[1].d {
                return Err(Error::InvalidArgument(format!(
                    "duplicate distance {}",
                    pair[0].d
                )));
            }
        }
        for l in &lines {
            if l.d == 0 || l.n == 0 || l.w < l.n {
                return Err(Error::InvalidArgument(format!(
                    "line ({}, {}, {}) violates d >= 1, N >= 1, w >= N",
                    l.d, l.n, l.w
                )));
            }
            if l.n.checked_mul(wu_max as u64).is_some_and(|cap| l.w > cap) {
                return Err(Error::InvalidArgument(format!(
                    "line ({}, {}, {}) exceeds w <= N * wu_max",
                    l.d, l.n, l.w
                )));
            }
        }
        lines.truncate(terms);
        Ok(Self {
            wu_max,
            terms,
            lines,
        })
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Smallest codeword weight, if any line exists.
    pub fn free_distance(&self) -> Option<u32> {
        self.lines.first().map(|l| l.d)
    }

    /// Largest distance up to which the lines are exact: unbounded if fewer
    /// than `M` lines are present.
    fn coverage(&self) -> Option<u32> {
        if self.lines.len() < self.terms {
            None
        } else {
            self.lines.last().map(|l| l.d)
        }
    }

    /// `d,N,w` CSV with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,N,w\n");
        for l in &self.lines {
            let _ = writeln!(out, "{},{},{}", l.d, l.n, l.w);
        }
        out
    }

    /// Parses the CSV written by [`DistanceSpectrum::to_csv`].
    pub fn from_csv(text: &str, wu_max: usize, terms: usize) -> Result<Self> {
        let err = |reason: String| Error::Parse {
            what: "spectrum CSV",
            reason,
        };
        let mut rows = text.lines().map(str::trim).filter(|l| !l.is_empty());
        match rows.next() {
            Some(h) if h.split(',').map(str::trim).eq(["d", "N", "w"]) => {}
            Some(h) => return Err(err(format!("unexpected header {h:?}"))),
            None => return Err(err("missing header".into())),
        }
        let mut lines = Vec::new();
        for (i, row) in rows.enumerate() {
            let fields: Vec<&str> = row.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(err(format!(
                    "row {}: expected 3 fields, got {}",
                    i + 1,
                    fields.len()
                )));
            }
            let num = |s: &str| {
                s.parse::<u64>()
                    .map_err(|e| err(format!("row {}: {s:?}: {e}", i + 1)))
            };
            let d = num(fields[0])?;
            let d = u32::try_from(d)
                .map_err(|_| err(format!("row {}: distance {d} too large", i + 1)))?;
            lines.push(SpectrumLine {
                d,
                n: num(fields[1])?,
                w: num(fields[2])?,
            });
        }
        for pair in lines.windows(2) {
            if pair[0].d >= pair[1].d {
                return Err(err("distances must be strictly increasing".into()));
            }
        }
        Self::from_lines(wu_max, terms, lines)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spectrum serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: DistanceSpectrum = serde_json::from_str(text).map_err(|e| Error::Parse {
            what: "spectrum JSON",
            reason: e.to_string(),
        })?;
        Self::from_lines(raw.wu_max, raw.terms, raw.lines)
    }

    fn from_accumulator(acc: &BTreeMap<u32, (u64, u64)>, wu_max: usize, terms: usize) -> Self {
        Self {
            wu_max,
            terms,
            lines: acc
                .iter()
                .take(terms)
                .map(|(&d, &(n, w))| SpectrumLine { d, n, w })
                .collect(),
        }
    }
}

/// Combines spectra of disjoint input sets. Lines with equal `d` add their
/// counters; the result keeps only distances covered by both inputs and is
/// truncated to `min(M_a, M_b)` lines.
pub fn merge_spectra(a: &DistanceSpectrum, b: &DistanceSpectrum) -> Result<DistanceSpectrum> {
    if a.wu_max != b.wu_max {
        return Err(Error::WuMaxMismatch(a.wu_max, b.wu_max));
    }
    let limit = match (a.coverage(), b.coverage()) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    };
    let mut acc: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
    for l in a.lines.iter().chain(&b.lines) {
        if limit.is_some_and(|lim| l.d > lim) {
            continue;
        }
        let e = acc.entry(l.d).or_default();
        e.0 += l.n;
        e.1 += l.w;
    }
    Ok(DistanceSpectrum::from_accumulator(
        &acc,
        a.wu_max,
        a.terms.min(b.terms),
    ))
}

/// Exhaustive spectrum over all nonzero information words (`L <= 22`).
pub fn brute_force_spectrum(perm: &Permutation, terms: usize) -> Result<DistanceSpectrum> {
    let l = perm.len();
    if l == 0 {
        return Err(Error::EmptyInput);
    }
    if l > BRUTE_FORCE_MAX_LEN {
        return Err(Error::TooLarge {
            length: l,
            limit: BRUTE_FORCE_MAX_LEN,
        });
    }
    // Codeword of each unit vector packed into a u128 (3L + 12 <= 78 bits);
    // a Gray-code walk then visits every word with one XOR per step.
    let basis: Vec<u128> = (0..l)
        .map(|i| {
            let mut info = vec![0u8; l];
            info[i] = 1;
            let cw = turbo_encode(&info, perm)?;
            Ok(cw
                .bits()
                .iter()
                .enumerate()
                .fold(0u128, |acc, (k, &b)| acc | (u128::from(b) << k)))
        })
        .collect::<Result<_>>()?;
    let max_d = 3 * l + 12;
    let mut counts = vec![(0u64, 0u64); max_d + 1];
    let mut word = 0u128;
    let mut info = 0u32;
    for step in 1u64..(1u64 << l) {
        let bit = step.trailing_zeros() as usize;
        word ^= basis[bit];
        info ^= 1 << bit;
        let d = word.count_ones() as usize;
        counts[d].0 += 1;
        counts[d].1 += u64::from(info.count_ones());
    }
    let lines = counts
        .iter()
        .enumerate()
        .filter(|(_, c)| c.0 > 0)
        .take(terms)
        .map(|(d, &(n, w))| SpectrumLine { d: d as u32, n, w })
        .collect();
    Ok(DistanceSpectrum {
        wu_max: l,
        terms,
        lines,
    })
}

/// Resource limits for the trellis search.
#[derive(Debug, Clone, Default)]
pub struct SpectrumOptions {
    /// Maximum number of trellis nodes visited, over all threshold rounds.
    pub node_budget: Option<u64>,
    /// Run the partitioned walk on the current rayon pool.
    pub parallel: bool,
}

impl SpectrumOptions {
    pub fn parallel() -> Self {
        Self {
            node_budget: None,
            parallel: true,
        }
    }
}

/// Precomputed trellis tables for one constituent code and block length.
#[derive(Debug, Clone)]
pub(crate) struct Trellis {
    next: [[u8; 2]; 8],
    parity: [[u8; 2]; 8],
    /// Systematic + parity weight of the termination from each state.
    tail: [u32; 8],
    /// Lower bound on `inputs + 2 * (parity + tail)` to return to zero.
    bound: [u32; 8],
    /// `zero_run[s][n]`: state and parity weight after `n` zero inputs from `s`.
    zero_run: Vec<Vec<(u8, u32)>>,
}

impl Trellis {
    pub(crate) fn new(spec: &RscSpec, len: usize) -> Self {
        assert_eq!(
            spec.num_states(),
            8,
            "trellis tables are sized for memory 3"
        );
        let mut next = [[0u8; 2]; 8];
        let mut parity = [[0u8; 2]; 8];
        let mut tail = [0u32; 8];
        for s in 0..8u32 {
            for bit in 0..2u32 {
                let b = spec.branch(s, bit);
                next[s as usize][bit as usize] = b.next;
                parity[s as usize][bit as usize] = b.parity;
            }
            let mut st = s;
            let mut w = 0;
            for _ in 0..spec.memory() {
                let u = spec.termination_input(st);
                let b = spec.branch(st, u);
                w += u + u32::from(b.parity);
                st = u32::from(b.next);
            }
            tail[s as usize] = w;
        }
        let mut bound = [0u32; 8];
        for s in 1..8 {
            bound[s] = 2 * tail[s];
        }
        // relax until stable: bound(s) = min(2 tail(s), bit + 2 parity + bound(next))
        loop {
            let mut changed = false;
            for s in 1..8 {
                for bit in 0..2 {
                    let cand =
                        bit as u32 + 2 * u32::from(parity[s][bit]) + bound[next[s][bit] as usize];
                    if cand < bound[s] {
                        bound[s] = cand;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let zero_run = (0..8)
            .map(|s| {
                let mut row = Vec::with_capacity(len + 1);
                let mut st = s as u8;
                let mut w = 0u32;
                row.push((st, 0));
                for _ in 0..len {
                    w += u32::from(parity[st as usize][0]);
                    st = next[st as usize][0];
                    row.push((st, w));
                }
                row
            })
            .collect();
        Self {
            next,
            parity,
            tail,
            bound,
            zero_run,
        }
    }

    /// Parity plus tail weight of the encoder fed ones at the sorted `ones` positions.
    #[inline]
    pub(crate) fn sparse_weight(&self, ones: &[usize], len: usize) -> u32 {
        let mut state = 0u8;
        let mut pos = 0usize;
        let mut weight = 0u32;
        for &p in ones {
            if state != 0 {
                let (s, w) = self.zero_run[state as usize][p - pos];
                state = s;
                weight += w;
            }
            weight += u32::from(self.parity[state as usize][1]);
            state = self.next[state as usize][1];
            pos = p + 1;
        }
        if state != 0 {
            let (s, w) = self.zero_run[state as usize][len - pos];
            weight += w + self.tail[s as usize];
        }
        weight
    }
}

/// Shared state of one threshold round.
struct Walk<'a> {
    trellis: &'a Trellis,
    len: usize,
    wu_max: usize,
    threshold: u32,
    /// Position in the other encoder's time order of each position here.
    partner: &'a [usize],
    /// Skip words already counted by the first walk.
    dedupe: bool,
    nodes: &'a AtomicU64,
    node_budget: Option<u64>,
    aborted: &'a AtomicBool,
}

struct WalkState {
    ones: Vec<usize>,
    scratch: Vec<usize>,
    acc: BTreeMap<u32, (u64, u64)>,
    local_nodes: u64,
}

const NODE_FLUSH: u64 = 1 << 14;

impl Walk<'_> {
    fn flush(&self, st: &mut WalkState) -> bool {
        let total = self.nodes.fetch_add(st.local_nodes, Ordering::Relaxed) + st.local_nodes;
        st.local_nodes = 0;
        if self.node_budget.is_some_and(|b| total > b) {
            self.aborted.store(true, Ordering::Relaxed);
        }
        !self.aborted.load(Ordering::Relaxed)
    }

    #[inline]
    fn tick(&self, st: &mut WalkState) -> bool {
        st.local_nodes += 1;
        if st.local_nodes >= NODE_FLUSH {
            return self.flush(st);
        }
        true
    }

    fn leaf(&self, st: &mut WalkState, cost: u32) {
        let w = st.ones.len() as u32;
        let own = (cost - w) / 2;
        st.scratch.clear();
        st.scratch.extend(st.ones.iter().map(|&p| self.partner[p]));
        st.scratch.sort_unstable();
        let other = self.trellis.sparse_weight(&st.scratch, self.len);
        if self.dedupe && w + 2 * other <= self.threshold {
            return;
        }
        let d = w + own + other;
        if d <= self.threshold {
            let e = st.acc.entry(d).or_default();
            e.0 += 1;
            e.1 += u64::from(w);
        }
    }

    /// Encoder in the zero state at `pos`; `cost = w + 2 c` so far.
    fn walk_from_zero(&self, st: &mut WalkState, pos: usize, cost: u32) -> bool {
        if !st.ones.is_empty() {
            self.leaf(st, cost);
        }
        if st.ones.len() >= self.wu_max {
            return true;
        }
        let s1 = self.trellis.next[0][1] as usize;
        let c1 = cost + 1 + 2 * u32::from(self.trellis.parity[0][1]);
        if c1 + self.trellis.bound[s1] > self.threshold {
            return true;
        }
        for j in pos..self.len {
            st.ones.push(j);
            let ok = self.in_event(st, j + 1, s1 as u8, c1);
            st.ones.pop();
            if !ok {
                return false;
            }
        }
        true
    }

    fn in_event(&self, st: &mut WalkState, pos: usize, state: u8, cost: u32) -> bool {
        if !self.tick(st) {
            return false;
        }
        let t = self.trellis;
        if pos == self.len {
            let total = cost + 2 * t.tail[state as usize];
            if total <= self.threshold {
                self.leaf(st, total);
            }
            return true;
        }
        for bit in 0..2usize {
            if bit == 1 && st.ones.len() >= self.wu_max {
                continue;
            }
            let next = t.next[state as usize][bit];
            let c = cost + bit as u32 + 2 * u32::from(t.parity[state as usize][bit]);
            if c + t.bound[next as usize] > self.threshold {
                continue;
            }
            if bit == 1 {
                st.ones.push(pos);
            }
            let ok = if next == 0 {
                self.walk_from_zero(st, pos + 1, c)
            } else {
                self.in_event(st, pos + 1, next, c)
            };
            if bit == 1 {
                st.ones.pop();
            }
            if !ok {
                return false;
            }
        }
        true
    }

    /// Subtree whose first one sits at `first`.
    fn run_from(&self, first: usize) -> Option<BTreeMap<u32, (u64, u64)>> {
        let mut st = WalkState {
            ones: vec![first],
            scratch: Vec::with_capacity(self.wu_max),
            acc: BTreeMap::new(),
            local_nodes: 0,
        };
        let t = self.trellis;
        let s1 = t.next[0][1];
        let c1 = 1 + 2 * u32::from(t.parity[0][1]);
        let ok = self.wu_max == 0
            || c1 + t.bound[s1 as usize] > self.threshold
            || self.in_event(&mut st, first + 1, s1, c1);
        let ok = self.flush(&mut st) && ok;
        ok.then_some(st.acc)
    }
}

fn merge_acc(
    mut a: BTreeMap<u32, (u64, u64)>,
    b: BTreeMap<u32, (u64, u64)>,
) -> BTreeMap<u32, (u64, u64)> {
    for (d, (n, w)) in b {
        let e = a.entry(d).or_default();
        e.0 += n;
        e.1 += w;
    }
    a
}

/// Every codeword of weight `<= threshold` produced by information words of
/// weight `1..=wu_max`, as a complete (untruncated) spectrum.
pub fn codewords_up_to(
    perm: &Permutation,
    wu_max: usize,
    threshold: u32,
    options: &SpectrumOptions,
) -> Result<DistanceSpectrum> {
    let nodes = AtomicU64::new(0);
    let acc = walk_round(
        perm,
        wu_max,
        threshold,
        options,
        &nodes,
        &Trellis::new(&RscSpec::lte(), perm.len()),
    )?;
    Ok(DistanceSpectrum::from_accumulator(&acc, wu_max, usize::MAX))
}

fn walk_round(
    perm: &Permutation,
    wu_max: usize,
    threshold: u32,
    options: &SpectrumOptions,
    nodes: &AtomicU64,
    trellis: &Trellis,
) -> Result<BTreeMap<u32, (u64, u64)>> {
    let len = perm.len();
    let inverse = perm.inverse();
    let aborted = AtomicBool::new(false);
    // walk 1 enumerates u on encoder 1; u_j lands at time inverse(j) of encoder 2.
    // walk 2 enumerates encoder-2 input v; v_k is u at position perm(k).
    let walks = [
        Walk {
            trellis,
            len,
            wu_max,
            threshold,
            partner: inverse.forward(),
            dedupe: false,
            nodes,
            node_budget: options.node_budget,
            aborted: &aborted,
        },
        Walk {
            trellis,
            len,
            wu_max,
            threshold,
            partner: perm.forward(),
            dedupe: true,
            nodes,
            node_budget: options.node_budget,
            aborted: &aborted,
        },
    ];
    let tasks: Vec<(usize, usize)> = (0..2).flat_map(|w| (0..len).map(move |j| (w, j))).collect();
    let run = |&(w, j): &(usize, usize)| walks[w].run_from(j);
    let acc = if options.parallel {
        tasks
            .par_iter()
            .map(run)
            .try_reduce(BTreeMap::new, |a, b| Some(merge_acc(a, b)))
    } else {
        tasks
            .iter()
            .map(run)
            .try_fold(BTreeMap::new(), |a, b| b.map(|b| merge_acc(a, b)))
    };
    acc.ok_or(Error::BudgetExceeded {
        explored: nodes.load(Ordering::Relaxed),
    })
}

/// First `terms` lines of the spectrum of the subcode spanned by information
/// words of weight at most `wu_max`.
pub fn distance_spectrum(
    perm: &Permutation,
    terms: usize,
    wu_max: usize,
) -> Result<DistanceSpectrum> {
    distance_spectrum_with(perm, terms, wu_max, &SpectrumOptions::default())
}

pub fn distance_spectrum_with(
    perm: &Permutation,
    terms: usize,
    wu_max: usize,
    options: &SpectrumOptions,
) -> Result<DistanceSpectrum> {
    if perm.is_empty() {
        return Err(Error::EmptyInput);
    }
    if terms == 0 || wu_max == 0 {
        return Err(Error::InvalidArgument(
            "terms and wu_max must be at least 1".into(),
        ));
    }
    let len = perm.len();
    let trellis = Trellis::new(&RscSpec::lte(), len);
    let nodes = AtomicU64::new(0);
    let max_weight = (3 * len + 12) as u32;
    let mut threshold = initial_threshold(&trellis);
    loop {
        let acc = walk_round(perm, wu_max, threshold, options, &nodes, &trellis)?;
        if acc.len() >= terms || threshold >= max_weight {
            return Ok(DistanceSpectrum::from_accumulator(&acc, wu_max, terms));
        }
        // each missing line needs a distinct larger weight
        threshold = (threshold + (terms - acc.len()) as u32).min(max_weight);
    }
}

/// Weight of the cheapest possible codeword is at least the weight of one
/// input bit followed by the cheapest return to zero, on both encoders.
fn initial_threshold(trellis: &Trellis) -> u32 {
    let s1 = trellis.next[0][1] as usize;
    let one_side = u32::from(trellis.parity[0][1]) + trellis.bound[s1] / 2;
    1 + 2 * one_side
}

/// Whether lowering the cap to `wu_max - 1` leaves the first `terms` lines unchanged.
pub fn wu_max_stable(
    perm: &Permutation,
    terms: usize,
    wu_max: usize,
    options: &SpectrumOptions,
) -> Result<bool> {
    if wu_max < 2 {
        return Ok(false);
    }
    let hi = distance_spectrum_with(perm, terms, wu_max, options)?;
    let lo = distance_spectrum_with(perm, terms, wu_max - 1, options)?;
    Ok(hi.lines == lo.lines)
}
