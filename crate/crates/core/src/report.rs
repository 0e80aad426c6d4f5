//! Regression result files and the R² comparison tables built from them.
//!
//! A results file holds one [`ResultRecord`] per (instrument, interval
//! length, kind) plus one `Average` record per (interval length, kind).
//! Tables have one row per instrument with the columns
//! `OFI_in, OFI_out, GOFI_in, GOFI_out, log-OFI_in, log-OFI_out,
//! log-GOFI_in, log-GOFI_out`, as percentages with two decimals, and the
//! averages row last.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::indicators::IndicatorKind;
use crate::regression::{OosMode, R2Mode, RegressionResult};

/// Instrument label of averages records.
pub const AVERAGE: &str = "Average";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("results contain no rows")]
    Empty,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("no averages row for {kind} at {interval} s")]
    MissingAverage { interval: u32, kind: IndicatorKind },
    #[error("stored average {column} at {interval} s is {stored:.2}%, instrument rows give {recomputed:.2}%")]
    AverageMismatch {
        interval: u32,
        column: String,
        stored: f64,
        recomputed: f64,
    },
    #[error("duplicate row for {instrument}, {kind} at {interval} s")]
    Duplicate {
        instrument: String,
        interval: u32,
        kind: IndicatorKind,
    },
}

pub type Result<T, E = ReportError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    /// The fit or one of the R² values could not be computed.
    Degenerate,
    Average,
}

/// One line of a results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub instrument: String,
    pub interval_s: u32,
    pub kind: IndicatorKind,
    pub status: RowStatus,
    pub beta: Option<f64>,
    pub intercept: Option<f64>,
    pub r2_in: Option<f64>,
    pub r2_out: Option<f64>,
    pub r2_out_refit: Option<f64>,
    pub n_in: Option<usize>,
    pub n_out: Option<usize>,
    pub r2_mode: R2Mode,
    pub oos_mode: OosMode,
    pub note: String,
}

impl ResultRecord {
    pub fn from_result(instrument: &str, result: &RegressionResult, r2_mode: R2Mode, oos_mode: OosMode) -> Self {
        ResultRecord {
            instrument: instrument.to_string(),
            interval_s: result.interval_length,
            kind: result.kind,
            status: RowStatus::Ok,
            beta: Some(result.beta),
            intercept: Some(result.intercept),
            r2_in: Some(result.r2_in),
            r2_out: Some(result.r2_out),
            r2_out_refit: result.r2_out_refit,
            n_in: Some(result.n_in),
            n_out: Some(result.n_out),
            r2_mode,
            oos_mode,
            note: String::new(),
        }
    }

    pub fn degenerate(
        instrument: &str,
        interval_s: u32,
        kind: IndicatorKind,
        r2_mode: R2Mode,
        oos_mode: OosMode,
        note: impl Into<String>,
    ) -> Self {
        ResultRecord {
            instrument: instrument.to_string(),
            interval_s,
            kind,
            status: RowStatus::Degenerate,
            beta: None,
            intercept: None,
            r2_in: None,
            r2_out: None,
            r2_out_refit: None,
            n_in: None,
            n_out: None,
            r2_mode,
            oos_mode,
            note: note.into(),
        }
    }

    fn key(&self) -> (u32, bool, String, IndicatorKind) {
        (
            self.interval_s,
            self.status == RowStatus::Average,
            self.instrument.clone(),
            self.kind,
        )
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Sorts instrument records and appends one averages record per
/// (interval, kind), averaging the non-degenerate rows.
pub fn with_averages(mut records: Vec<ResultRecord>) -> Vec<ResultRecord> {
    records.retain(|r| r.status != RowStatus::Average);
    let mut groups: BTreeMap<(u32, IndicatorKind), Vec<&ResultRecord>> = BTreeMap::new();
    for r in &records {
        groups.entry((r.interval_s, r.kind)).or_default().push(r);
    }
    let averages: Vec<ResultRecord> = groups
        .into_iter()
        .map(|((interval_s, kind), rows)| {
            let ok: Vec<_> = rows.iter().filter(|r| r.status == RowStatus::Ok).collect();
            let avg = |f: fn(&ResultRecord) -> Option<f64>| mean(ok.iter().filter_map(|r| f(r)));
            ResultRecord {
                instrument: AVERAGE.into(),
                interval_s,
                kind,
                status: RowStatus::Average,
                beta: None,
                intercept: None,
                r2_in: avg(|r| r.r2_in),
                r2_out: avg(|r| r.r2_out),
                r2_out_refit: avg(|r| r.r2_out_refit),
                n_in: None,
                n_out: None,
                r2_mode: rows[0].r2_mode,
                oos_mode: rows[0].oos_mode,
                note: format!("{} of {} instruments", ok.len(), rows.len()),
            }
        })
        .collect();
    records.extend(averages);
    records.sort_by_key(ResultRecord::key);
    records
}

pub fn write_results<W: Write>(writer: W, records: &[ResultRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_results<R: Read>(reader: R) -> Result<Vec<ResultRecord>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let records = rdr.deserialize().collect::<Result<Vec<ResultRecord>, _>>()?;
    Ok(records)
}

/// Column labels in table order.
pub fn column_labels() -> Vec<String> {
    IndicatorKind::ALL
        .iter()
        .flat_map(|k| [format!("{k}_in"), format!("{k}_out")])
        .collect()
}

/// One table line: R² fractions in column order, `None` where degenerate.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub instrument: String,
    pub cells: [Option<f64>; 8],
}

/// The comparison table for one interval length.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportTable {
    pub interval_s: u32,
    pub rows: Vec<ReportRow>,
    pub average: ReportRow,
}

fn column_of(kind: IndicatorKind) -> usize {
    IndicatorKind::ALL
        .iter()
        .position(|&k| k == kind)
        .expect("every kind has a column")
        * 2
}

/// Percentage with two decimals, as printed.
pub fn percent(value: f64) -> String {
    format!("{:.2}", value * 100.0)
}

fn cell(value: Option<f64>) -> String {
    value.map(percent).unwrap_or_else(|| "n/a".into())
}

/// Builds one table per interval length and checks every stored average
/// against the mean of its instrument rows, to the printed precision.
pub fn build_tables(records: &[ResultRecord]) -> Result<Vec<ReportTable>> {
    if records.is_empty() {
        return Err(ReportError::Empty);
    }
    let mut by_interval: BTreeMap<u32, (BTreeMap<String, ReportRow>, ReportRow)> = BTreeMap::new();
    let mut seen = std::collections::BTreeSet::new();
    for r in records {
        if !seen.insert(r.key()) {
            return Err(ReportError::Duplicate {
                instrument: r.instrument.clone(),
                interval: r.interval_s,
                kind: r.kind,
            });
        }
        let (rows, average) = by_interval.entry(r.interval_s).or_insert_with(|| {
            (
                BTreeMap::new(),
                ReportRow {
                    instrument: AVERAGE.into(),
                    cells: [None; 8],
                },
            )
        });
        let row = if r.status == RowStatus::Average {
            average
        } else {
            rows.entry(r.instrument.clone()).or_insert_with(|| ReportRow {
                instrument: r.instrument.clone(),
                cells: [None; 8],
            })
        };
        let c = column_of(r.kind);
        row.cells[c] = r.r2_in;
        row.cells[c + 1] = r.r2_out;
    }

    let labels = column_labels();
    let mut tables = Vec::with_capacity(by_interval.len());
    for (interval_s, (rows, average)) in by_interval {
        let rows: Vec<ReportRow> = rows.into_values().collect();
        for kind in IndicatorKind::ALL {
            let present = records
                .iter()
                .any(|r| r.interval_s == interval_s && r.kind == kind && r.status != RowStatus::Average);
            let has_average = records
                .iter()
                .any(|r| r.interval_s == interval_s && r.kind == kind && r.status == RowStatus::Average);
            if present && !has_average {
                return Err(ReportError::MissingAverage {
                    interval: interval_s,
                    kind,
                });
            }
        }
        for (c, label) in labels.iter().enumerate() {
            let recomputed = mean(rows.iter().filter_map(|r| r.cells[c]));
            match (average.cells[c], recomputed) {
                (None, None) => {}
                (Some(stored), Some(recomputed)) if (stored - recomputed).abs() * 100.0 < 0.005 => {}
                (stored, recomputed) => {
                    return Err(ReportError::AverageMismatch {
                        interval: interval_s,
                        column: label.clone(),
                        stored: stored.unwrap_or(f64::NAN) * 100.0,
                        recomputed: recomputed.unwrap_or(f64::NAN) * 100.0,
                    })
                }
            }
        }
        tables.push(ReportTable {
            interval_s,
            rows,
            average,
        });
    }
    Ok(tables)
}

impl ReportTable {
    fn lines(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().chain(std::iter::once(&self.average))
    }

    /// Aligned plain-text rendering.
    pub fn render_text(&self) -> String {
        let labels = column_labels();
        let name_width = self
            .lines()
            .map(|r| r.instrument.len())
            .chain(["instrument".len()])
            .max()
            .unwrap_or(0);
        let widths: Vec<usize> = labels.iter().map(|l| l.len().max(6)).collect();
        let mut out = String::new();
        let _ = writeln!(out, "R² (%) at {} s intervals", self.interval_s);
        let _ = write!(out, "{:<name_width$}", "instrument");
        for (l, w) in labels.iter().zip(&widths) {
            let _ = write!(out, "  {l:>w$}");
        }
        out.push('\n');
        for row in self.lines() {
            let _ = write!(out, "{:<name_width$}", row.instrument);
            for (c, w) in row.cells.iter().zip(&widths) {
                let _ = write!(out, "  {:>w$}", cell(*c));
            }
            out.push('\n');
        }
        out
    }

    /// Tab-separated rendering with an `interval_s` column, header included.
    pub fn render_tsv(&self, with_header: bool) -> String {
        let mut out = String::new();
        if with_header {
            out.push_str("interval_s\tinstrument\t");
            out.push_str(&column_labels().join("\t"));
            out.push('\n');
        }
        for row in self.lines() {
            let _ = write!(out, "{}\t{}", self.interval_s, row.instrument);
            for c in &row.cells {
                let _ = write!(out, "\t{}", cell(*c));
            }
            out.push('\n');
        }
        out
    }
}

pub fn render_text(tables: &[ReportTable]) -> String {
    tables
        .iter()
        .map(ReportTable::render_text)
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn render_tsv(tables: &[ReportTable]) -> String {
    tables.iter().enumerate().map(|(i, t)| t.render_tsv(i == 0)).collect()
}

/// One point of the R² comparison plots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub interval_s: u32,
    pub kind: IndicatorKind,
    pub sample: String,
    pub instrument: String,
    pub r2_percent: f64,
}

/// Long-format plot data: one point per instrument, kind and sample.
pub fn plot_points(records: &[ResultRecord]) -> Vec<PlotPoint> {
    let mut points = Vec::new();
    for r in records.iter().filter(|r| r.status == RowStatus::Ok) {
        for (sample, value) in [("in", r.r2_in), ("out", r.r2_out)] {
            if let Some(v) = value {
                points.push(PlotPoint {
                    interval_s: r.interval_s,
                    kind: r.kind,
                    sample: sample.into(),
                    instrument: r.instrument.clone(),
                    r2_percent: v * 100.0,
                });
            }
        }
    }
    points.sort_by(|a, b| {
        (a.interval_s, a.kind, &a.sample, &a.instrument).cmp(&(b.interval_s, b.kind, &b.sample, &b.instrument))
    });
    points
}

pub fn write_plot_points<W: Write>(writer: W, points: &[PlotPoint]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for p in points {
        wtr.serialize(p)?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}
