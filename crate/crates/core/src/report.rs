//! Table-shaped output of search results, run manifests and comparison
//! against the published reference rows.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::presets::{printed_decimals, GoldenEntry};
use crate::search::SearchReport;

pub const REPORT_CSV_HEADER: &str = "L,SNR_dB,num_dist,poly,D,TUB_BER_e7,TUB_FER_e5,count";

/// Relative tolerance applied to printed bound values.
pub const PRINTED_RELATIVE_TOLERANCE: f64 = 5e-4;

/// One row of a result table. Bounds are scaled as printed: BER x 10^7, FER x 10^5.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub length: u64,
    pub snr_db: f64,
    pub terms: usize,
    pub poly: String,
    pub d: usize,
    pub ber_e7: f64,
    pub fer_e5: f64,
    pub count: u64,
}

impl ReportRow {
    pub fn from_report(r: &SearchReport) -> Self {
        Self {
            length: r.config.length,
            snr_db: r.config.snr_db,
            terms: r.config.terms,
            poly: r.winner_text.clone(),
            d: r.d_max,
            ber_e7: r.tub_ber * 1e7,
            fer_e5: r.tub_fer * 1e5,
            count: r.optimum_count,
        }
    }

    /// CSV line with bounds to four decimals.
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{:.4},{:.4},{}",
            self.length,
            self.snr_db,
            self.terms,
            self.poly,
            self.d,
            self.ber_e7,
            self.fer_e5,
            self.count
        )
    }
}

pub fn rows_to_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(REPORT_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.csv_line());
    }
    out
}

/// Parses a result table written by [`rows_to_csv`].
pub fn rows_from_csv(text: &str) -> Result<Vec<ReportRow>> {
    let err = |reason: String| Error::Parse {
        what: "result table",
        reason,
    };
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == REPORT_CSV_HEADER => {}
        Some(h) => return Err(err(format!("unexpected header {h:?}"))),
        None => return Err(err("missing header".into())),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 8 {
                return Err(err(format!(
                    "row {}: expected 8 fields, got {}",
                    i + 1,
                    f.len()
                )));
            }
            let bad = |s: &str| err(format!("row {}: cannot parse {s:?}", i + 1));
            let float = |s: &str| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| bad(s))
            };
            Ok(ReportRow {
                length: f[0].parse().map_err(|_| bad(f[0]))?,
                snr_db: float(f[1])?,
                terms: f[2].parse().map_err(|_| bad(f[2]))?,
                poly: f[3].to_string(),
                d: f[4].parse().map_err(|_| bad(f[4]))?,
                ber_e7: float(f[5])?,
                fer_e5: float(f[6])?,
                count: f[7].parse().map_err(|_| bad(f[7]))?,
            })
        })
        .collect()
}

/// How a computed value agrees with a printed one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrintedMatch {
    /// Within [`PRINTED_RELATIVE_TOLERANCE`].
    Relative,
    /// Rounding to the printed decimals gives the printed digits.
    Rounded,
    /// Truncating to the printed decimals gives the printed digits.
    Truncated,
}

/// Compares `ours` with a value printed at fixed decimals. Small values
/// printed that way carry fewer significant digits than the relative
/// tolerance assumes, and the reference tables round some entries and
/// truncate others, so agreement of the printed digits under either rule is
/// also accepted.
pub fn printed_match(ours: f64, printed_text: &str) -> Option<PrintedMatch> {
    let printed: f64 = printed_text.trim().parse().ok()?;
    if !ours.is_finite() {
        return None;
    }
    if (ours - printed).abs() <= PRINTED_RELATIVE_TOLERANCE * printed.abs() {
        return Some(PrintedMatch::Relative);
    }
    let scale = 10f64.powi(printed_decimals(printed_text) as i32);
    let units = (printed * scale).round();
    if (ours * scale).round() == units {
        Some(PrintedMatch::Rounded)
    } else if (ours * scale).trunc() == units {
        Some(PrintedMatch::Truncated)
    } else {
        None
    }
}

pub fn matches_printed(ours: f64, printed_text: &str) -> bool {
    printed_match(ours, printed_text).is_some()
}

/// One field compared against a reference row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldCheck {
    pub field: String,
    pub ours: String,
    pub printed: String,
    /// Set for approximate fields that agreed.
    pub matched_by: Option<PrintedMatch>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenComparison {
    pub table: u8,
    pub length: u64,
    /// "qpp" or "cpp".
    pub family: String,
    pub checks: Vec<FieldCheck>,
}

impl GoldenComparison {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Compares a search result against a published entry field by field.
pub fn compare_golden(
    table: u8,
    family: &str,
    ours: &SearchReport,
    golden: &GoldenEntry,
) -> GoldenComparison {
    let row = ReportRow::from_report(ours);
    let exact = |field: &str, a: String, b: String| FieldCheck {
        field: field.into(),
        pass: a == b,
        ours: a,
        printed: b,
        matched_by: None,
    };
    let approx = |field: &str, a: f64, b: &str| {
        let matched_by = printed_match(a, b);
        FieldCheck {
            field: field.into(),
            ours: format!("{a:.7}"),
            printed: b.to_string(),
            matched_by,
            pass: matched_by.is_some(),
        }
    };
    GoldenComparison {
        table,
        length: row.length,
        family: family.into(),
        checks: vec![
            exact("poly", ours.winner.to_string(), golden.poly.to_string()),
            exact("D", row.d.to_string(), golden.d.to_string()),
            approx("TUB_BER_e7", row.ber_e7, &golden.ber_text),
            approx("TUB_FER_e5", row.fer_e5, &golden.fer_text),
            exact("count", row.count.to_string(), golden.count.to_string()),
        ],
    }
}

pub const COMPARISON_CSV_HEADER: &str = "table,L,family,field,ours,printed,matched_by,pass";

pub fn comparisons_to_csv(rows: &[GoldenComparison]) -> String {
    let mut out = String::from(COMPARISON_CSV_HEADER);
    out.push('\n');
    for r in rows {
        for c in &r.checks {
            let how = match c.matched_by {
                Some(PrintedMatch::Relative) => "relative",
                Some(PrintedMatch::Rounded) => "rounded",
                Some(PrintedMatch::Truncated) => "truncated",
                None if c.pass => "exact",
                None => "",
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.table, r.length, r.family, c.field, c.ours, c.printed, how, c.pass
            );
        }
    }
    out
}

/// Provenance written next to every result file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: Vec<String>,
    pub config: serde_json::Value,
    pub elapsed_secs: f64,
    pub threads: usize,
    pub budget_exceeded: bool,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: Vec<String>, config: serde_json::Value) -> Self {
        Self {
            tool: "ppturbo".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command,
            config,
            elapsed_secs: 0.0,
            threads: rayon::current_num_threads(),
            budget_exceeded: false,
            outputs: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}
