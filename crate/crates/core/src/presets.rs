//! Published reference rows for the interleaver tables, used as per-length
//! run configurations and as golden fixtures.
//!
//! Tables 2 and 3 are AWGN searches minimizing TUB(BER); tables 4 and 5 are
//! Rayleigh searches minimizing TUB(FER). Tables 3 and 5 impose a spread
//! floor on the cubic search equal to the largest quadratic spread.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::ModPoly;
use crate::tub::ChannelModel;

const TABLE2: &str = include_str!("../data/table2.csv");
const TABLE3: &str = include_str!("../data/table3.csv");
const TABLE4: &str = include_str!("../data/table4.csv");
const TABLE5: &str = include_str!("../data/table5.csv");

/// One interleaver entry of a table row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenEntry {
    pub poly: ModPoly,
    pub d: usize,
    /// TUB(BER) x 10^7 as printed.
    pub ber_e7: f64,
    /// TUB(FER) x 10^5 as printed.
    pub fer_e5: f64,
    /// Printed text of the two bounds, kept to recover the printed precision.
    pub ber_text: String,
    pub fer_text: String,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenRow {
    pub table: u8,
    pub length: u64,
    pub snr_db: f64,
    pub terms: usize,
    pub quadratic: GoldenEntry,
    pub cubic: GoldenEntry,
}

/// Channel and objective a table was produced for.
pub fn table_channel(table: u8) -> Result<ChannelModel> {
    match table {
        2 | 3 => Ok(ChannelModel::Awgn),
        4 | 5 => Ok(ChannelModel::Rayleigh),
        t => Err(Error::InvalidArgument(format!(
            "no table {t}; expected 2, 3, 4 or 5"
        ))),
    }
}

/// Whether the cubic column of `table` is a spread-floor search.
pub fn table_uses_floor(table: u8) -> bool {
    matches!(table, 3 | 5)
}

/// Spectrum truncation used for each length: 9 below 120, 7 below 296, else 5.
pub fn default_terms(length: u64) -> usize {
    match length {
        0..=119 => 9,
        120..=295 => 7,
        _ => 5,
    }
}

fn parse_err(reason: String) -> Error {
    Error::Parse {
        what: "reference table",
        reason,
    }
}

/// Parses a reference table CSV (header plus 14 columns per row).
pub fn parse_table(table: u8, text: &str) -> Result<Vec<GoldenRow>> {
    let mut rows = Vec::new();
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| parse_err("missing header".into()))?;
    if !header.starts_with("L,snr_db,num_dist") {
        return Err(parse_err(format!("unexpected header {header:?}")));
    }
    for (i, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 14 {
            return Err(parse_err(format!(
                "row {}: expected 14 fields, got {}",
                i + 1,
                f.len()
            )));
        }
        let num = |s: &str| -> Result<u64> {
            s.parse()
                .map_err(|e| parse_err(format!("row {}: {s:?}: {e}", i + 1)))
        };
        let real = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|e| parse_err(format!("row {}: {s:?}: {e}", i + 1)))
        };
        let length = num(f[0])?;
        if length < 2 {
            return Err(parse_err(format!("row {}: length {length} below 2", i + 1)));
        }
        let entry = |o: usize| -> Result<GoldenEntry> {
            Ok(GoldenEntry {
                poly: ModPoly::parse(f[o], length)?,
                d: num(f[o + 1])? as usize,
                ber_e7: real(f[o + 2])?,
                fer_e5: real(f[o + 3])?,
                ber_text: f[o + 2].to_string(),
                fer_text: f[o + 3].to_string(),
                count: num(f[o + 4])?,
            })
        };
        rows.push(GoldenRow {
            table,
            length,
            snr_db: real(f[1])?,
            terms: num(f[2])? as usize,
            quadratic: entry(3)?,
            cubic: entry(8)?,
        });
    }
    Ok(rows)
}

/// All rows of a built-in table.
pub fn table_rows(table: u8) -> Result<Vec<GoldenRow>> {
    let text = match table {
        2 => TABLE2,
        3 => TABLE3,
        4 => TABLE4,
        5 => TABLE5,
        t => {
            return Err(Error::InvalidArgument(format!(
                "no table {t}; expected 2, 3, 4 or 5"
            )))
        }
    };
    parse_table(table, text)
}

pub fn table_row(table: u8, length: u64) -> Result<GoldenRow> {
    table_rows(table)?
        .into_iter()
        .find(|r| r.length == length)
        .ok_or_else(|| Error::InvalidArgument(format!("table {table} has no row for L = {length}")))
}

/// SNR used by the reference tables for `length` on `channel`, if listed.
pub fn default_snr_db(channel: ChannelModel, length: u64) -> Option<f64> {
    let table = match channel {
        ChannelModel::Awgn => 2,
        ChannelModel::Rayleigh => 4,
    };
    table_row(table, length).ok().map(|r| r.snr_db)
}

/// Number of decimals in a printed value.
pub fn printed_decimals(text: &str) -> usize {
    text.trim()
        .split_once('.')
        .map_or(0, |(_, frac)| frac.len())
}
