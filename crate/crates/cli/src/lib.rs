//! Command implementations behind the `gofi` binary.
//!
//! `simulate` writes a snapshot file, `compute` turns snapshots into
//! interval indicators, `regress` fits ΔP on each indicator per instrument
//! and `report` renders the R² tables. Each command writes its artifact
//! to `--output` and its progress messages to the supplied writer.
//!
//! Failures confined to one instrument (a day that cannot be computed, a
//! degenerate regression) are reported and skipped; configuration and
//! input errors abort the command.

pub mod intervals;

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::thread;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use gofi::config::{Config, ConfigError};
use gofi::indicators::{compute_records, GofiReading, IndicatorError, IndicatorKind, IndicatorPoint, IndicatorSeries};
use gofi::ingestion::{exclude_limit_days, lay_out_sessions, parse_snapshots, write_snapshots, DayStatus, IngestError};
use gofi::lob::LobError;
use gofi::regression::{evaluate_indicator, OosMode, R2Mode};
use gofi::report::{self, ReportError, ResultRecord, RowStatus};
use gofi::simulator::{self, SimError, SimRun};
use thiserror::Error;

use crate::intervals::{IntervalFileError, IntervalRow, IntervalTable};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Session(#[from] LobError),
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error(transparent)]
    Indicator(#[from] IndicatorError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    IntervalFile {
        path: PathBuf,
        #[source]
        source: IntervalFileError,
    },
    #[error("no instrument has both an in-sample and an out-of-sample interval around {0}")]
    EmptyPartition(NaiveDate),
    #[error("{0}")]
    NoData(String),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "gofi",
    version,
    about = "Order flow imbalance indicators and their price-impact fits"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a batch of instruments and write their snapshots.
    Simulate(SimulateArgs),
    /// Compute interval indicators from a snapshot file.
    Compute(ComputeArgs),
    /// Fit mid-price changes on each indicator, in and out of sample.
    Regress(RegressArgs),
    /// Render the R² tables of a results file.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub output: PathBuf,
    /// Base seed; instrument i uses seed + i.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct ComputeArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Comma-separated kinds, e.g. `OFI,log-GOFI`; all four by default.
    #[arg(long, value_delimiter = ',')]
    pub kinds: Option<Vec<IndicatorKind>>,
    /// A single interval length in seconds instead of the configured list.
    #[arg(long)]
    pub interval: Option<u32>,
    #[arg(long, value_parser = ["symmetric", "levelwise"])]
    pub gofi_reading: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct RegressArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub input: PathBuf,
    /// Results file; plot data goes next to it with a `_plot` suffix.
    #[arg(long)]
    pub output: PathBuf,
    /// Last in-sample date.
    #[arg(long)]
    pub boundary_date: Option<NaiveDate>,
    /// Only fit this interval length.
    #[arg(long)]
    pub interval: Option<u32>,
    #[arg(long, value_parser = ["fixed-beta", "refit"])]
    pub oos_mode: Option<String>,
    #[arg(long, value_parser = ["centered", "uncentered"])]
    pub r2: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Also write the tables as tab-separated values.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn run(command: &Command, log: &mut dyn Write) -> Result<()> {
    match command {
        Command::Simulate(args) => cmd_simulate(args, log),
        Command::Compute(args) => cmd_compute(args, log),
        Command::Regress(args) => cmd_regress(args, log),
        Command::Report(args) => cmd_report(args, log),
    }
}

fn load_config(path: Option<&Path>) -> Result<Config> {
    match path {
        Some(p) => Ok(Config::load(p)?),
        None => {
            let config = Config::default();
            config.validate()?;
            Ok(config)
        }
    }
}

fn say(log: &mut dyn Write, line: std::fmt::Arguments<'_>) {
    // Progress output is best effort; a closed pipe must not fail a command.
    let _ = writeln!(log, "{line}");
}

/// Path of the plot-data file that accompanies a results file.
pub fn plot_path(results: &Path) -> PathBuf {
    let stem = results.file_stem().and_then(|s| s.to_str()).unwrap_or("results");
    results.with_file_name(format!("{stem}_plot.csv"))
}

pub fn cmd_simulate(args: &SimulateArgs, log: &mut dyn Write) -> Result<()> {
    let mut config = load_config(args.config.as_deref())?;
    if let Some(seed) = args.seed {
        config.simulation.seed = seed;
    }
    let spec = config.session(config.snapshot_period)?;
    let names = config.batch.instrument_names();
    let sims = (0..names.len())
        .map(|i| config.batch_simulation(i))
        .collect::<Result<Vec<_>, _>>()?;

    let runs: Vec<Result<SimRun, SimError>> = thread::scope(|scope| {
        let handles: Vec<_> = sims
            .iter()
            .map(|sim| scope.spawn(move || simulator::run(sim)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect()
    });

    say(
        log,
        format_args!("seed {} (instrument i uses seed + i)", config.simulation.seed),
    );
    let mut days = Vec::new();
    for ((name, sim), run) in names.iter().zip(&sims).zip(runs) {
        let run = match run {
            Ok(run) => run,
            Err(e) => {
                say(log, format_args!("{name}: skipped: {e}"));
                continue;
            }
        };
        let t = run.totals;
        let exhausted = run.gaps.iter().filter(|g| g.exhausted).count();
        say(
            log,
            format_args!(
                "{name}: seed {} events {} (limit {}/{} cancel {}/{} market buy {} sell {}), \
                 multi-tick gaps {}, exhaustion gaps {}, skipped events {}, depth-cap law {:.3}%",
                sim.seed,
                t.total(),
                t.limit_bid,
                t.limit_ask,
                t.cancel_bid,
                t.cancel_ask,
                t.market_buy,
                t.market_sell,
                run.multi_tick_gaps(),
                exhausted,
                run.skipped_events,
                run.law_agreement(sim.depth_cap) * 100.0,
            ),
        );
        days.extend(lay_out_sessions(name, run.snapshots, &spec, config.batch.start_date));
    }
    if days.is_empty() {
        return Err(CliError::NoData("every simulated instrument failed".into()));
    }
    write_snapshots(&args.output, &days, config.simulation.snapshot_depth, config.tick()?)?;
    say(
        log,
        format_args!("wrote {} instrument-days to {}", days.len(), args.output.display()),
    );
    Ok(())
}

pub fn cmd_compute(args: &ComputeArgs, log: &mut dyn Write) -> Result<()> {
    let config = load_config(args.config.as_deref())?;
    let reading = match &args.gofi_reading {
        Some(r) => r.parse::<GofiReading>().map_err(CliError::NoData)?,
        None => config.gofi_reading,
    };
    let kinds = args.kinds.clone().unwrap_or_else(|| IndicatorKind::ALL.to_vec());
    let lengths = match args.interval {
        Some(l) => vec![l],
        None => config.interval_lengths.clone(),
    };
    let specs = lengths
        .iter()
        .map(|&l| config.session(l))
        .collect::<Result<Vec<_>, _>>()?;

    let parsed = parse_snapshots(&args.input, &specs[0])?;
    let (days, exclusions) = exclude_limit_days(parsed.days, &specs[0], &config.exclusion_policy()?);
    let filter = parsed.report.merge(exclusions);
    for (instrument, date, status) in filter.iter() {
        if let DayStatus::Excluded { reason, detail } = status {
            say(
                log,
                format_args!("excluded {instrument} {date}: {} ({detail})", reason.as_str()),
            );
        }
    }
    say(
        log,
        format_args!(
            "{} days kept, {} excluded",
            filter.len() - filter.excluded(),
            filter.excluded()
        ),
    );

    let mut rows = Vec::new();
    let mut truncations = vec![0u64; kinds.len()];
    for spec in &specs {
        for day in &days {
            if day.snapshots.is_empty() {
                continue;
            }
            let (records, trunc, _) = match compute_records(&day.snapshots, spec, &kinds, reading) {
                Ok(r) => r,
                Err(e) => {
                    say(
                        log,
                        format_args!(
                            "skipped {} {} at {} s: {e}",
                            day.instrument, day.date, spec.interval_length
                        ),
                    );
                    continue;
                }
            };
            for (total, t) in truncations.iter_mut().zip(trunc) {
                *total += t;
            }
            let midnight = day.date.and_hms_opt(0, 0, 0).expect("midnight exists");
            rows.extend(records.into_iter().map(|r| IntervalRow {
                instrument: day.instrument.clone(),
                interval_s: spec.interval_length,
                start: midnight + chrono::Duration::milliseconds(r.start_ms),
                delta_mid: r.delta_mid,
                values: r.values,
            }));
        }
    }
    if rows.is_empty() {
        return Err(CliError::NoData(format!(
            "{}: no complete interval could be computed",
            args.input.display()
        )));
    }
    rows.sort_by(|a, b| (&a.instrument, a.interval_s, a.start).cmp(&(&b.instrument, b.interval_s, b.start)));

    let table = IntervalTable {
        kinds: kinds.clone(),
        rows,
    };
    write_artifact(&args.output, |w| {
        intervals::write_intervals(w, &table).map_err(|source| CliError::IntervalFile {
            path: args.output.clone(),
            source,
        })
    })?;
    let summary: Vec<String> = kinds
        .iter()
        .zip(&truncations)
        .filter(|(k, _)| k.is_generalized())
        .map(|(k, t)| format!("{k} {t}"))
        .collect();
    say(
        log,
        format_args!("wrote {} intervals to {}", table.rows.len(), args.output.display()),
    );
    if !summary.is_empty() {
        say(log, format_args!("depth-truncated level sums: {}", summary.join(", ")));
    }
    Ok(())
}

fn write_artifact(path: &Path, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    body(&mut out)?;
    out.flush().map_err(io_err(path))
}

fn series(kind: IndicatorKind, interval_s: u32, column: usize, rows: &[&IntervalRow]) -> IndicatorSeries {
    IndicatorSeries {
        kind,
        interval_length: interval_s,
        points: rows
            .iter()
            .enumerate()
            .map(|(k, r)| IndicatorPoint {
                k,
                start_ms: r.start.and_utc().timestamp_millis(),
                value: r.values[column],
                delta_mid: r.delta_mid,
            })
            .collect(),
        truncations: 0,
        incomplete_intervals: 0,
    }
}

pub fn cmd_regress(args: &RegressArgs, log: &mut dyn Write) -> Result<()> {
    let config = load_config(args.config.as_deref())?;
    let boundary = args.boundary_date.unwrap_or(config.boundary_date);
    let mut options = config.regression_options();
    if let Some(m) = &args.oos_mode {
        options.oos_mode = m.parse::<OosMode>().map_err(CliError::NoData)?;
    }
    if let Some(m) = &args.r2 {
        options.r2_mode = m.parse::<R2Mode>().map_err(CliError::NoData)?;
    }

    let file = File::open(&args.input).map_err(io_err(&args.input))?;
    let table = intervals::read_intervals(BufReader::new(file)).map_err(|source| CliError::IntervalFile {
        path: args.input.clone(),
        source,
    })?;

    type Split<'a> = (Vec<&'a IntervalRow>, Vec<&'a IntervalRow>);
    let mut groups: BTreeMap<(String, u32), Split> = BTreeMap::new();
    for row in &table.rows {
        if args.interval.is_some_and(|l| l != row.interval_s) {
            continue;
        }
        let (inside, outside) = groups.entry((row.instrument.clone(), row.interval_s)).or_default();
        if row.start.date() <= boundary {
            inside.push(row);
        } else {
            outside.push(row);
        }
    }
    if !groups.values().any(|(i, o)| !i.is_empty() && !o.is_empty()) {
        return Err(CliError::EmptyPartition(boundary));
    }

    let mut records = Vec::new();
    for ((instrument, interval_s), (inside, outside)) in &groups {
        for (column, &kind) in table.kinds.iter().enumerate() {
            let degenerate = |note: String| {
                ResultRecord::degenerate(instrument, *interval_s, kind, options.r2_mode, options.oos_mode, note)
            };
            let record = if inside.is_empty() || outside.is_empty() {
                let which = if inside.is_empty() {
                    "in-sample"
                } else {
                    "out-of-sample"
                };
                degenerate(format!("empty {which} partition"))
            } else {
                let s_in = series(kind, *interval_s, column, inside);
                let s_out = series(kind, *interval_s, column, outside);
                match evaluate_indicator(&s_in, &s_out, &options) {
                    Ok(result) => ResultRecord::from_result(instrument, &result, options.r2_mode, options.oos_mode),
                    Err(e) => degenerate(e.to_string()),
                }
            };
            if record.status == RowStatus::Degenerate {
                say(
                    log,
                    format_args!("{instrument} {kind} at {interval_s} s: degenerate: {}", record.note),
                );
            }
            records.push(record);
        }
    }
    let records = report::with_averages(records);
    write_artifact(&args.output, |w| Ok(report::write_results(w, &records)?))?;
    let plot = plot_path(&args.output);
    let points = report::plot_points(&records);
    write_artifact(&plot, |w| Ok(report::write_plot_points(w, &points)?))?;

    let averages = records.iter().filter(|r| r.status == RowStatus::Average).count();
    let degenerate = records.iter().filter(|r| r.status == RowStatus::Degenerate).count();
    say(
        log,
        format_args!(
            "wrote {} results ({degenerate} degenerate) and {averages} averages to {}; plot data in {}",
            records.len() - averages,
            args.output.display(),
            plot.display()
        ),
    );
    Ok(())
}

pub fn cmd_report(args: &ReportArgs, log: &mut dyn Write) -> Result<()> {
    let file = File::open(&args.input).map_err(io_err(&args.input))?;
    let records = report::read_results(BufReader::new(file))?;
    let tables = report::build_tables(&records)?;
    log.write_all(report::render_text(&tables).as_bytes())
        .map_err(io_err(Path::new("<stdout>")))?;
    if let Some(path) = &args.output {
        fs::write(path, report::render_tsv(&tables)).map_err(io_err(path))?;
    }
    Ok(())
}
