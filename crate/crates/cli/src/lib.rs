//! Argument handling and dispatch for the `ppturbo` binary.

pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ppturbo::presets::{table_channel, table_row, table_uses_floor};
use ppturbo::report::{compare_golden, comparisons_to_csv, rows_to_csv, ReportRow, RunManifest};
use ppturbo::search::{optimize, Budget, Objective, SearchConfig, SearchReport};
use ppturbo::spectrum::{
    distance_spectrum_with, SpectrumOptions, BRUTE_FORCE_MAX_LEN, DEFAULT_WU_MAX,
};
use ppturbo::tub::tub;
use ppturbo::{
    brute_force_spectrum, code_rate, null_polynomials, spread, ChannelModel, DistanceSpectrum,
    ModPoly,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ppturbo",
    version,
    about = "Permutation-polynomial turbo interleaver toolkit"
)]
#[command(args_override_self = true)]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "PPTURBO_JOBS")]
    pub jobs: Option<usize>,

    /// `key = value` file of flags; flags on the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the null polynomials of degree at most 3 with zero constant term.
    Npp {
        #[arg(long = "mod")]
        modulus: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check whether a polynomial permutes Z_L and report its effective degree.
    Check(PolyArgs),
    /// Spread of the interleaver induced by a polynomial.
    Spread(PolyArgs),
    /// Low-weight distance spectrum of the turbo code using a polynomial interleaver.
    Spectrum {
        #[command(flatten)]
        poly: PolyArgs,
        #[command(flatten)]
        spec: SpectrumArgs,
        /// Exhaustive enumeration instead of the trellis search (small L only).
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        out: OutArgs,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Truncated union bounds from a polynomial or a saved spectrum.
    Tub {
        #[arg(long = "mod")]
        modulus: u64,
        #[arg(
            long,
            conflicts_with = "spectrum",
            required_unless_present = "spectrum"
        )]
        poly: Option<String>,
        /// Spectrum file in CSV or JSON form.
        #[arg(long)]
        spectrum: Option<PathBuf>,
        #[arg(long)]
        channel: ChannelModel,
        #[arg(long = "snr-db", allow_negative_numbers = true)]
        snr_db: f64,
        #[command(flatten)]
        spec: SpectrumArgs,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Largest-spread, best-bound interleaver search.
    Search {
        #[arg(long = "mod")]
        modulus: u64,
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
        degree: u8,
        #[arg(long)]
        channel: ChannelModel,
        /// Defaults to ber on AWGN and fer on Rayleigh.
        #[arg(long)]
        objective: Option<Objective>,
        /// Defaults to the reference-table SNR for this length.
        #[arg(long = "snr-db", allow_negative_numbers = true)]
        snr_db: Option<f64>,
        /// Spectrum lines (default from the reference schedule).
        #[arg(long)]
        terms: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_WU_MAX)]
        wumax: usize,
        /// Keep every class with spread at least this value instead of only the largest.
        #[arg(long)]
        dmin: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        out: OutArgs,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Rerun reference-table rows and compare against the printed values.
    Reproduce {
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=5))]
        table: u8,
        #[arg(long, value_delimiter = ',', required = true)]
        lengths: Vec<u64>,
        #[arg(long, default_value_t = DEFAULT_WU_MAX)]
        wumax: usize,
        /// Also write the result rows in table layout.
        #[arg(long = "rows-out")]
        rows_out: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct PolyArgs {
    #[arg(long = "mod")]
    pub modulus: u64,
    /// Polynomial such as "3x+8x^2+16x^3".
    #[arg(long)]
    pub poly: String,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long, default_value_t = 9)]
    pub terms: usize,
    #[arg(long, default_value_t = DEFAULT_WU_MAX)]
    pub wumax: usize,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Write the result here (a manifest is written next to it).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    /// Trellis nodes allowed per spectrum.
    #[arg(long = "node-budget")]
    pub node_budget: Option<u64>,
    /// Wall-clock limit in seconds for the spectrum phase of a search.
    #[arg(long = "time-limit")]
    pub time_limit: Option<f64>,
}

impl BudgetArgs {
    fn budget(&self) -> Result<Budget, CliError> {
        let deadline = self
            .time_limit
            .map(|s| {
                Duration::try_from_secs_f64(s)
                    .map_err(|e| CliError::Invalid(format!("--time-limit {s}: {e}")))
            })
            .transpose()?;
        Ok(Budget {
            spectrum_nodes: self.node_budget,
            deadline,
        })
    }
}

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Invalid(_) => EXIT_INVALID,
            Self::Budget(_) => EXIT_BUDGET,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Invalid(m) => write!(f, "error: {m}"),
            Self::Budget(m) => write!(f, "budget exceeded: {m}"),
        }
    }
}

impl From<ppturbo::Error> for CliError {
    fn from(e: ppturbo::Error) -> Self {
        match e {
            ppturbo::Error::BudgetExceeded { .. } => Self::Budget(e.to_string()),
            other => Self::Invalid(other.to_string()),
        }
    }
}

const SUBCOMMANDS: [&str; 7] = [
    "npp",
    "check",
    "spread",
    "spectrum",
    "tub",
    "search",
    "reproduce",
];

/// Replaces `--config FILE` with the flags the file lists, placed right after
/// the subcommand so flags given on the command line take precedence.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            let p = it
                .next()
                .ok_or_else(|| CliError::Invalid("--config needs a file".into()))?;
            path = Some(PathBuf::from(p));
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))?;
    let cfg = config::parse_config(&text)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    let extra = cfg.to_args();
    let sub = rest
        .iter()
        .skip(1)
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
        .map(|p| p + 1);
    Ok(match (sub, cfg.command) {
        (Some(i), _) => {
            let tail = rest.split_off(i + 1);
            rest.extend(extra);
            rest.extend(tail);
            rest
        }
        (None, Some(cmd)) => {
            let tail = rest.split_off(1.min(rest.len()));
            rest.push(cmd.into());
            rest.extend(extra);
            rest.extend(tail);
            rest
        }
        (None, None) => {
            return Err(CliError::Invalid(format!(
                "{} does not name a command",
                path.display()
            )));
        }
    })
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run(args: impl IntoIterator<Item = OsString>) -> i32 {
    let args = match expand_config(args.into_iter().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
        }
    };
    let command_line: Vec<String> = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return EXIT_INVALID;
        }
        pool = pool.num_threads(j);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_INVALID;
        }
    };
    match pool.install(|| dispatch(&cli.command, &command_line, &mut std::io::stdout())) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn parse_poly(args: &PolyArgs) -> Result<ModPoly, CliError> {
    ModPoly::parse(&args.poly, args.modulus)
        .map_err(|e| CliError::Invalid(format!("--poly {:?}: {e}", args.poly)))
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Invalid(format!("cannot write {}: {e}", path.display()))
}

fn manifest_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes `body` to `path` and its manifest next to it.
fn write_result(
    path: &Path,
    body: &str,
    mut manifest: RunManifest,
    started: Instant,
) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|e| io_err(path, e))?;
    manifest.elapsed_secs = started.elapsed().as_secs_f64();
    manifest.outputs.push(path.display().to_string());
    let mpath = manifest_path(path);
    std::fs::write(&mpath, manifest.to_json()).map_err(|e| io_err(&mpath, e))
}

fn emit(w: &mut impl Write, text: &str) -> Result<(), CliError> {
    w.write_all(text.as_bytes())
        .map_err(|e| CliError::Invalid(format!("cannot write output: {e}")))
}

fn compute_spectrum(
    poly: &ModPoly,
    spec: &SpectrumArgs,
    oracle: bool,
    budget: &BudgetArgs,
) -> Result<DistanceSpectrum, CliError> {
    let perm = poly.as_permutation().map_err(|_| {
        CliError::Invalid(format!(
            "{poly} is not a permutation polynomial mod {}",
            poly.modulus()
        ))
    })?;
    if oracle {
        if perm.len() > BRUTE_FORCE_MAX_LEN {
            return Err(CliError::Invalid(format!(
                "--oracle supports L <= {BRUTE_FORCE_MAX_LEN}, got {}",
                perm.len()
            )));
        }
        return Ok(brute_force_spectrum(&perm, spec.terms)?);
    }
    let options = SpectrumOptions {
        node_budget: budget.node_budget,
        parallel: true,
    };
    Ok(distance_spectrum_with(
        &perm, spec.terms, spec.wumax, &options,
    )?)
}

fn scaled(value: f64, exponent: i32) -> String {
    format!(
        "{value:.7e} ({:.7}e-{exponent})",
        value * 10f64.powi(exponent)
    )
}

fn report_summary(r: &SearchReport) -> String {
    let mut s = format!(
        "winner={} D={} TUB_BER={} TUB_FER={} count={} classes={} candidates={} survivors={} spectra={}\n",
        r.winner_text,
        r.d_max,
        scaled(r.tub_ber, 7),
        scaled(r.tub_fer, 5),
        r.optimum_count,
        r.candidates.classes,
        r.candidates.permutation_classes,
        r.candidates.survivors,
        r.candidates.spectra_computed,
    );
    if !r.near_ties.is_empty() {
        let ties: Vec<String> = r.near_ties.iter().map(ToString::to_string).collect();
        s.push_str(&format!(
            "near ties grouped with the optimum: {}\n",
            ties.join(" ")
        ));
    }
    if let Some(stable) = r.wu_max_stable {
        s.push_str(&format!("wu_max={} stable={stable}\n", r.config.wu_max));
    }
    if r.budget_exceeded {
        s.push_str("budget exceeded: result covers only the spectra computed in time and is not authoritative\n");
    }
    s
}

fn dispatch(
    command: &Command,
    command_line: &[String],
    w: &mut impl Write,
) -> Result<i32, CliError> {
    let started = Instant::now();
    match command {
        Command::Npp { modulus, format } => {
            let nulls = null_polynomials(*modulus)?;
            let text = match format {
                Format::Json => {
                    let list: Vec<String> = nulls.iter().map(ToString::to_string).collect();
                    format!(
                        "{}\n",
                        serde_json::json!({ "L": modulus, "count": list.len(), "polynomials": list })
                    )
                }
                _ => {
                    let mut s = format!("L={modulus} count={}\n", nulls.len());
                    for n in &nulls {
                        s.push_str(&format!("{n}\n"));
                    }
                    s
                }
            };
            emit(w, &text)?;
        }
        Command::Check(args) => {
            let p = parse_poly(args)?;
            emit(
                w,
                &format!(
                    "poly={p} L={} permutation={} effective_degree={} canonical={}\n",
                    p.modulus(),
                    p.is_permutation(),
                    p.effective_degree(),
                    p.canonical()
                ),
            )?;
        }
        Command::Spread(args) => {
            let p = parse_poly(args)?;
            let perm = p.as_permutation().map_err(|_| {
                CliError::Invalid(format!(
                    "{p} is not a permutation polynomial mod {}",
                    p.modulus()
                ))
            })?;
            let s = spread(&perm)?;
            emit(
                w,
                &format!(
                    "poly={p} L={} D={} witness=({},{})\n",
                    p.modulus(),
                    s.d_value,
                    s.witness.0,
                    s.witness.1
                ),
            )?;
        }
        Command::Spectrum {
            poly,
            spec,
            oracle,
            format,
            out,
            budget,
        } => {
            let p = parse_poly(poly)?;
            let s = compute_spectrum(&p, spec, *oracle, budget)?;
            let body = match format {
                Format::Json => format!("{}\n", s.to_json()),
                _ => s.to_csv(),
            };
            match &out.out {
                Some(path) => {
                    let manifest = RunManifest::new(
                        command_line.to_vec(),
                        serde_json::json!({ "L": p.modulus(), "poly": p.to_string(), "terms": spec.terms,
                            "wu_max": s.wu_max, "oracle": oracle, "node_budget": budget.node_budget }),
                    );
                    write_result(path, &body, manifest, started)?;
                }
                None => emit(w, &body)?,
            }
        }
        Command::Tub {
            modulus,
            poly,
            spectrum,
            channel,
            snr_db,
            spec,
            budget,
        } => {
            let s = match (poly, spectrum) {
                (Some(text), _) => {
                    let p = parse_poly(&PolyArgs {
                        modulus: *modulus,
                        poly: text.clone(),
                    })?;
                    compute_spectrum(&p, spec, false, budget)?
                }
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(path).map_err(|e| {
                        CliError::Invalid(format!("cannot read {}: {e}", path.display()))
                    })?;
                    if text.trim_start().starts_with('{') {
                        DistanceSpectrum::from_json(&text)?
                    } else {
                        DistanceSpectrum::from_csv(&text, spec.wumax, spec.terms)?
                    }
                }
                (None, None) => return Err(CliError::Invalid("give --poly or --spectrum".into())),
            };
            let rate = code_rate(*modulus)?;
            let b = tub(*channel, &s, *modulus, rate, *snr_db)?;
            emit(
                w,
                &format!(
                    "channel={channel} snr_db={snr_db} rate={}/{} terms={}\nTUB_BER={}\nTUB_FER={}\n",
                    b.rate.0,
                    b.rate.1,
                    b.terms_used,
                    scaled(b.tub_ber, 7),
                    scaled(b.tub_fer, 5)
                ),
            )?;
        }
        Command::Search {
            modulus,
            degree,
            channel,
            objective,
            snr_db,
            terms,
            wumax,
            dmin,
            format,
            out,
            budget,
        } => {
            let snr_db = match snr_db {
                Some(s) => *s,
                None => ppturbo::presets::default_snr_db(*channel, *modulus).ok_or_else(|| {
                    CliError::Invalid(format!("no reference SNR for L = {modulus}; pass --snr-db"))
                })?,
            };
            let config = SearchConfig {
                length: *modulus,
                degree: usize::from(*degree),
                channel: *channel,
                objective: objective.unwrap_or(Objective::default_for(*channel)),
                snr_db,
                terms: terms.unwrap_or(ppturbo::presets::default_terms(*modulus)),
                wu_max: *wumax,
                d_floor: *dmin,
                budget: budget.budget()?,
            };
            let report = optimize(&config)?;
            eprint!("{}", report_summary(&report));
            let body = match format {
                Format::Json => format!(
                    "{}\n",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                ),
                _ => rows_to_csv(&[ReportRow::from_report(&report)]),
            };
            match &out.out {
                Some(path) => {
                    let mut manifest = RunManifest::new(
                        command_line.to_vec(),
                        serde_json::to_value(&config).expect("config serializes"),
                    );
                    manifest.budget_exceeded = report.budget_exceeded;
                    write_result(path, &body, manifest, started)?;
                }
                None => emit(w, &body)?,
            }
            if report.budget_exceeded {
                return Ok(EXIT_BUDGET);
            }
        }
        Command::Reproduce {
            table,
            lengths,
            wumax,
            rows_out,
            out,
            budget,
        } => {
            let channel = table_channel(*table)?;
            let budget = budget.budget()?;
            let mut comparisons = Vec::new();
            let mut rows = Vec::new();
            let mut exceeded = false;
            for &length in lengths {
                let golden = table_row(*table, length)?;
                let base = SearchConfig {
                    length,
                    degree: 2,
                    channel,
                    objective: Objective::default_for(channel),
                    snr_db: golden.snr_db,
                    terms: golden.terms,
                    wu_max: *wumax,
                    d_floor: None,
                    budget: budget.clone(),
                };
                let qpp = optimize(&base)?;
                let cubic = SearchConfig {
                    degree: 3,
                    d_floor: table_uses_floor(*table).then_some(qpp.d_max),
                    ..base
                };
                let cpp = optimize(&cubic)?;
                for (family, report, entry) in [
                    ("qpp", &qpp, &golden.quadratic),
                    ("cpp", &cpp, &golden.cubic),
                ] {
                    eprint!("L={length} {family}: {}", report_summary(report));
                    exceeded |= report.budget_exceeded;
                    comparisons.push(compare_golden(*table, family, report, entry));
                    rows.push(ReportRow::from_report(report));
                }
            }
            let failed = comparisons.iter().filter(|c| !c.passed()).count();
            eprintln!(
                "{} of {} rows match the reference",
                comparisons.len() - failed,
                comparisons.len()
            );
            let body = comparisons_to_csv(&comparisons);
            let config = serde_json::json!({ "table": table, "lengths": lengths, "wu_max": wumax, "budget": budget });
            match &out.out {
                Some(path) => {
                    let mut manifest = RunManifest::new(command_line.to_vec(), config.clone());
                    manifest.budget_exceeded = exceeded;
                    write_result(path, &body, manifest, started)?;
                }
                None => emit(w, &body)?,
            }
            if let Some(path) = rows_out {
                let mut manifest = RunManifest::new(command_line.to_vec(), config);
                manifest.budget_exceeded = exceeded;
                write_result(path, &rows_to_csv(&rows), manifest, started)?;
            }
            if exceeded {
                return Ok(EXIT_BUDGET);
            }
        }
    }
    Ok(EXIT_OK)
}
