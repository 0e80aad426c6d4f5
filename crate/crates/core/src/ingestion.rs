//! Snapshot CSV files, session-window filtering, day exclusion and the
//! in-sample / out-of-sample split.
//!
//! File layout: one header line
//! `instrument,date,time,bp1,bq1,ap1,aq1,...,bpK,bqK,apK,aqK` followed by one
//! row per snapshot. Missing levels are written as empty price and quantity
//! fields; they may only trail the present levels of a side.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use chrono::{Datelike, NaiveDate, NaiveTime, Weekday};
use serde::Serialize;
use thiserror::Error;

use crate::lob::{clock_ms, BookLevel, SessionSpec, Snapshot, TickSize};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Schema { line: u64, message: String },
    #[error("line {line}: price {price} is not on the {tick} tick grid")]
    PriceGrid { line: u64, price: String, tick: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0} partition is empty")]
    EmptyPartition(&'static str),
    #[error("snapshots of one file must share a depth: found {0} and {1}")]
    MixedDepth(usize, usize),
}

impl IngestError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        IngestError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = IngestError> = std::result::Result<T, E>;

/// All snapshots of one instrument on one trading date.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstrumentDay {
    pub instrument: String,
    pub date: NaiveDate,
    pub snapshots: Vec<Snapshot>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExclusionReason {
    LimitLocked,
    GapExcess,
    Malformed,
}

impl ExclusionReason {
    pub fn as_str(self) -> &'static str {
        match self {
            ExclusionReason::LimitLocked => "limit-locked",
            ExclusionReason::GapExcess => "gap-excess",
            ExclusionReason::Malformed => "malformed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DayStatus {
    Kept,
    Excluded { reason: ExclusionReason, detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DayFilterReport {
    entries: BTreeMap<(String, NaiveDate), DayStatus>,
}

impl DayFilterReport {
    pub fn record(&mut self, instrument: &str, date: NaiveDate, status: DayStatus) {
        self.entries.insert((instrument.to_string(), date), status);
    }

    /// Overlays `later` on `self`; later verdicts win.
    pub fn merge(mut self, later: DayFilterReport) -> DayFilterReport {
        self.entries.extend(later.entries);
        self
    }

    pub fn status(&self, instrument: &str, date: NaiveDate) -> Option<&DayStatus> {
        self.entries.get(&(instrument.to_string(), date))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, NaiveDate, &DayStatus)> {
        self.entries
            .iter()
            .map(|((inst, date), status)| (inst.as_str(), *date, status))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn excluded(&self) -> usize {
        self.entries
            .values()
            .filter(|s| matches!(s, DayStatus::Excluded { .. }))
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedSnapshots {
    pub depth: usize,
    pub days: Vec<InstrumentDay>,
    pub report: DayFilterReport,
}

pub fn header(depth: usize) -> Vec<String> {
    let mut cols = vec!["instrument".to_string(), "date".into(), "time".into()];
    for i in 1..=depth {
        cols.extend([format!("bp{i}"), format!("bq{i}"), format!("ap{i}"), format!("aq{i}")]);
    }
    cols
}

fn depth_from_header(record: &csv::StringRecord) -> Result<usize> {
    let bad = |message: String| IngestError::Schema { line: 1, message };
    let n = record.len();
    if n < 3 || !(n - 3).is_multiple_of(4) || n == 3 {
        return Err(bad(format!("expected 3 + 4k columns, found {n}")));
    }
    let depth = (n - 3) / 4;
    let expected = header(depth);
    for (i, (got, want)) in record.iter().zip(&expected).enumerate() {
        if got.trim() != want {
            return Err(bad(format!("column {} is {got:?}, expected {want:?}", i + 1)));
        }
    }
    Ok(depth)
}

fn parse_time(s: &str) -> Option<NaiveTime> {
    NaiveTime::parse_from_str(s, "%H:%M:%S").ok()
}

/// Why a row invalidates its whole day.
struct Malformed(String);

fn parse_side(
    fields: &[&str],
    offset: usize,
    depth: usize,
    tick: TickSize,
    line: u64,
) -> Result<Result<Vec<BookLevel>, Malformed>> {
    let mut levels = Vec::with_capacity(depth);
    let mut ended = false;
    for i in 0..depth {
        let price = fields[3 + 4 * i + offset].trim();
        let qty = fields[4 + 4 * i + offset].trim();
        match (price.is_empty(), qty.is_empty()) {
            (true, true) => {
                ended = true;
                continue;
            }
            (false, false) if !ended => {}
            (false, false) => return Ok(Err(Malformed(format!("level {} follows a missing level", i + 1)))),
            _ => {
                return Ok(Err(Malformed(format!(
                    "level {} has only one of price and quantity",
                    i + 1
                ))))
            }
        }
        let Ok(p) = price.parse::<f64>() else {
            return Ok(Err(Malformed(format!("unreadable price {price:?}"))));
        };
        let Ok(q) = qty.parse::<u64>() else {
            return Ok(Err(Malformed(format!("unreadable quantity {qty:?}"))));
        };
        let ticks = tick.to_ticks(p).map_err(|_| IngestError::PriceGrid {
            line,
            price: price.to_string(),
            tick: tick.to_string(),
        })?;
        levels.push(BookLevel {
            price: ticks,
            quantity: q,
        });
    }
    Ok(Ok(levels))
}

#[derive(Default)]
struct DayAccumulator {
    snapshots: Vec<Snapshot>,
    malformed: Option<String>,
}

/// Reads snapshot rows, keeping those inside the session window.
///
/// Rows that fail validation mark their day as malformed; the day is
/// reported and left out. Grid errors and schema errors are fatal.
pub fn read_snapshots<R: Read>(reader: R, spec: &SessionSpec) -> Result<ParsedSnapshots> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();
    let head = match records.next() {
        Some(r) => r?,
        None => {
            return Err(IngestError::Schema {
                line: 1,
                message: "missing header".into(),
            })
        }
    };
    let depth = depth_from_header(&head)?;
    let width = 3 + 4 * depth;

    let mut days: BTreeMap<(String, NaiveDate), DayAccumulator> = BTreeMap::new();
    for (i, record) in records.enumerate() {
        let line = i as u64 + 2;
        let record = record?;
        let fields: Vec<&str> = record.iter().collect();
        if fields.len() < 3 {
            return Err(IngestError::Schema {
                line,
                message: format!("expected {width} columns, found {}", fields.len()),
            });
        }
        let instrument = fields[0].trim().to_string();
        let date = NaiveDate::parse_from_str(fields[1].trim(), "%Y-%m-%d").map_err(|e| IngestError::Schema {
            line,
            message: format!("bad date {:?}: {e}", fields[1]),
        })?;
        let day = days.entry((instrument, date)).or_default();
        if day.malformed.is_some() {
            continue;
        }
        let Some(time) = parse_time(fields[2].trim()) else {
            day.malformed = Some(format!("line {line}: bad time {:?}", fields[2]));
            continue;
        };
        let timestamp = clock_ms(time);
        if !spec.contains(timestamp) {
            continue;
        }
        if fields.len() != width {
            day.malformed = Some(format!("line {line}: expected {width} columns, found {}", fields.len()));
            continue;
        }
        let bids = parse_side(&fields, 0, depth, spec.tick_size, line)?;
        let asks = parse_side(&fields, 2, depth, spec.tick_size, line)?;
        let (bids, asks) = match (bids, asks) {
            (Ok(b), Ok(a)) => (b, a),
            (Err(Malformed(m)), _) | (_, Err(Malformed(m))) => {
                day.malformed = Some(format!("line {line}: {m}"));
                continue;
            }
        };
        let snapshot = Snapshot::new(timestamp, bids, asks, depth);
        if let Err(e) = snapshot.validate() {
            day.malformed = Some(format!("line {line}: {e}"));
            continue;
        }
        if let Some(prev) = day.snapshots.last() {
            if prev.timestamp >= timestamp {
                day.malformed = Some(format!("line {line}: time does not increase"));
                continue;
            }
        }
        day.snapshots.push(snapshot);
    }

    let mut report = DayFilterReport::default();
    let mut kept = Vec::new();
    for ((instrument, date), day) in days {
        match day.malformed {
            Some(detail) => report.record(
                &instrument,
                date,
                DayStatus::Excluded {
                    reason: ExclusionReason::Malformed,
                    detail,
                },
            ),
            None => {
                report.record(&instrument, date, DayStatus::Kept);
                kept.push(InstrumentDay {
                    instrument,
                    date,
                    snapshots: day.snapshots,
                });
            }
        }
    }
    Ok(ParsedSnapshots {
        depth,
        days: kept,
        report,
    })
}

pub fn parse_snapshots(path: impl AsRef<Path>, spec: &SessionSpec) -> Result<ParsedSnapshots> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| IngestError::io(path, e))?;
    read_snapshots(io::BufReader::new(file), spec)
}

/// Rules for dropping whole trading days.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExclusionPolicy {
    /// Largest tolerated fraction of missing grid slots; 5% when `None`.
    pub max_missing_fraction: Option<f64>,
    /// Days known to have hit a price limit.
    pub listed: BTreeSet<(String, NaiveDate)>,
}

impl ExclusionPolicy {
    pub const DEFAULT_MAX_MISSING: f64 = 0.05;

    fn max_missing(&self) -> f64 {
        self.max_missing_fraction.unwrap_or(Self::DEFAULT_MAX_MISSING)
    }
}

/// Drops days with a one-sided snapshot (a locked price limit), listed
/// days, and days missing too many grid slots.
pub fn exclude_limit_days(
    days: Vec<InstrumentDay>,
    spec: &SessionSpec,
    policy: &ExclusionPolicy,
) -> (Vec<InstrumentDay>, DayFilterReport) {
    let expected = spec.expected_slots();
    let mut report = DayFilterReport::default();
    let mut kept = Vec::with_capacity(days.len());
    for day in days {
        let excluded = |reason, detail: String| DayStatus::Excluded { reason, detail };
        let status = if policy.listed.contains(&(day.instrument.clone(), day.date)) {
            excluded(ExclusionReason::LimitLocked, "listed as a price-limit day".into())
        } else if let Some(s) = day.snapshots.iter().find(|s| !s.is_two_sided()) {
            excluded(
                ExclusionReason::LimitLocked,
                format!("one-sided book at {} ms", s.timestamp),
            )
        } else {
            let present = day.snapshots.iter().filter(|s| spec.contains(s.timestamp)).count();
            let missing = 1.0 - present as f64 / expected as f64;
            if missing > policy.max_missing() {
                excluded(
                    ExclusionReason::GapExcess,
                    format!("{:.2}% of {expected} grid slots missing", missing * 100.0),
                )
            } else {
                DayStatus::Kept
            }
        };
        let keep = status == DayStatus::Kept;
        report.record(&day.instrument, day.date, status);
        if keep {
            kept.push(day);
        }
    }
    (kept, report)
}

/// Splits at `boundary`: dates on or before it are in-sample.
pub fn split_in_out(days: Vec<InstrumentDay>, boundary: NaiveDate) -> Result<(Vec<InstrumentDay>, Vec<InstrumentDay>)> {
    let (inside, outside): (Vec<_>, Vec<_>) = days.into_iter().partition(|d| d.date <= boundary);
    if inside.is_empty() {
        return Err(IngestError::EmptyPartition("in-sample"));
    }
    if outside.is_empty() {
        return Err(IngestError::EmptyPartition("out-of-sample"));
    }
    Ok((inside, outside))
}

fn format_time(ms: i64) -> String {
    let secs = ms.div_euclid(1000);
    format!("{:02}:{:02}:{:02}", secs / 3600, (secs / 60) % 60, secs % 60)
}

/// Writes days in the snapshot CSV layout.
pub fn write_snapshots_to<W: Write>(writer: W, days: &[InstrumentDay], depth: usize, tick: TickSize) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    wtr.write_record(header(depth))?;
    let mut row: Vec<String> = Vec::with_capacity(3 + 4 * depth);
    for day in days {
        let date = day.date.format("%Y-%m-%d").to_string();
        for s in &day.snapshots {
            if s.depth != depth {
                return Err(IngestError::MixedDepth(depth, s.depth));
            }
            row.clear();
            row.push(day.instrument.clone());
            row.push(date.clone());
            row.push(format_time(s.timestamp));
            for i in 0..depth {
                for level in [s.bids.get(i), s.asks.get(i)] {
                    match level {
                        Some(l) => {
                            row.push(tick.format(l.price));
                            row.push(l.quantity.to_string());
                        }
                        None => {
                            row.push(String::new());
                            row.push(String::new());
                        }
                    }
                }
            }
            wtr.write_record(&row)?;
        }
    }
    wtr.flush().map_err(|e| IngestError::io("<writer>", e))?;
    Ok(())
}

pub fn write_snapshots(path: impl AsRef<Path>, days: &[InstrumentDay], depth: usize, tick: TickSize) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| IngestError::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_snapshots_to(&mut out, days, depth, tick)?;
    out.flush().map_err(|e| IngestError::io(path, e))
}

/// Next weekday strictly after `date`.
pub fn next_trading_day(date: NaiveDate) -> NaiveDate {
    let mut d = date.succ_opt().expect("date in range");
    while matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
        d = d.succ_opt().expect("date in range");
    }
    d
}

/// Grid timestamps of one session day, in order.
pub fn session_slots(spec: &SessionSpec) -> Vec<i64> {
    let p = spec.period_ms();
    spec.segments
        .iter()
        .flat_map(|seg| (seg.start_ms..seg.end_ms).step_by(p as usize))
        .collect()
}

/// Places a continuous snapshot stream onto consecutive trading days,
/// filling every grid slot of each session in order. Weekends are skipped
/// and a trailing partial day is kept.
pub fn lay_out_sessions(
    instrument: &str,
    snapshots: Vec<Snapshot>,
    spec: &SessionSpec,
    first_date: NaiveDate,
) -> Vec<InstrumentDay> {
    let slots = session_slots(spec);
    let mut date = first_date;
    while matches!(date.weekday(), Weekday::Sat | Weekday::Sun) {
        date = next_trading_day(date);
    }
    let mut days = Vec::new();
    let mut iter = snapshots.into_iter().peekable();
    while iter.peek().is_some() {
        let snapshots: Vec<Snapshot> = slots
            .iter()
            .zip(iter.by_ref())
            .map(|(&t, s)| Snapshot { timestamp: t, ..s })
            .collect();
        days.push(InstrumentDay {
            instrument: instrument.to_string(),
            date,
            snapshots,
        });
        date = next_trading_day(date);
    }
    days
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> SessionSpec {
        SessionSpec::china_a_share(30).unwrap()
    }

    fn parse(text: &str) -> Result<ParsedSnapshots> {
        read_snapshots(text.as_bytes(), &spec())
    }

    const HEAD: &str = "instrument,date,time,bp1,bq1,ap1,aq1,bp2,bq2,ap2,aq2\n";

    #[test]
    fn happy_path() {
        let text = format!(
            "{HEAD}\
             A,2021-01-05,09:30:00,10.00,500,10.01,300,9.99,100,10.02,200\n\
             A,2021-01-05,09:30:03,10.00,600,10.01,300,9.99,100,10.02,200\n\
             A,2021-01-05,09:30:06,10.01,50,10.02,300,10.00,600,10.03,200\n"
        );
        let parsed = parse(&text).unwrap();
        assert_eq!(parsed.depth, 2);
        assert_eq!(parsed.days.len(), 1);
        let day = &parsed.days[0];
        assert_eq!(day.snapshots.len(), 3);
        assert_eq!(day.snapshots[0].timestamp, (9 * 3600 + 30 * 60) * 1000);
        assert_eq!(day.snapshots[2].bids[0], BookLevel::new(1001, 50));
        assert_eq!(parsed.report.status("A", day.date), Some(&DayStatus::Kept));
    }

    #[test]
    fn rows_outside_window_are_dropped() {
        let text = format!(
            "{HEAD}\
             A,2021-01-05,09:25:00,10.00,500,10.01,300,,,,\n\
             A,2021-01-05,14:56:57,10.00,500,10.01,300,,,,\n\
             A,2021-01-05,14:58:00,10.00,500,10.01,300,,,,\n\
             A,2021-01-05,12:00:00,10.00,500,10.01,300,,,,\n"
        );
        let parsed = parse(&text).unwrap();
        assert_eq!(parsed.days[0].snapshots.len(), 1);
    }

    #[test]
    fn off_grid_price_reports_row() {
        let text = format!("{HEAD}A,2021-01-05,09:30:00,10.003,500,10.01,300,,,,\n");
        match parse(&text) {
            Err(IngestError::PriceGrid { line, price, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(price, "10.003");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_rows_exclude_their_day_only() {
        let text = format!(
            "{HEAD}\
             A,2021-01-05,09:30:00,10.00,0,10.01,300,,,,\n\
             A,2021-01-05,09:30:03,10.00,5,10.01,300,,,,\n\
             A,2021-01-06,09:30:00,10.00,5,10.01,300,,,,\n\
             B,2021-01-05,09:30:00,10.02,5,10.01,300,,,,\n\
             C,2021-01-05,09:30:00,10.00,5,10.01,300,,7,,\n\
             D,2021-01-05,09:30:03,10.00,5,10.01,300,,,,\n\
             D,2021-01-05,09:30:00,10.00,5,10.01,300,,,,\n"
        );
        let parsed = parse(&text).unwrap();
        let kept: Vec<_> = parsed.days.iter().map(|d| (d.instrument.as_str(), d.date)).collect();
        assert_eq!(kept, vec![("A", NaiveDate::from_ymd_opt(2021, 1, 6).unwrap())]);
        assert_eq!(parsed.report.len(), 5);
        assert_eq!(parsed.report.excluded(), 4);
        for (_, _, status) in parsed.report.iter().filter(|(i, ..)| *i != "A") {
            assert!(matches!(
                status,
                DayStatus::Excluded {
                    reason: ExclusionReason::Malformed,
                    ..
                }
            ));
        }
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(parse(""), Err(IngestError::Schema { line: 1, .. })));
        assert!(matches!(
            parse("instrument,date,time,bp1,bq1,ap1\n"),
            Err(IngestError::Schema { line: 1, .. })
        ));
        assert!(matches!(
            parse("instrument,date,time,bp1,bq1,aq1,ap1\n"),
            Err(IngestError::Schema { line: 1, .. })
        ));
        let text = format!("{HEAD}A,20210105,09:30:00,10.00,5,10.01,300,,,,\n");
        assert!(matches!(parse(&text), Err(IngestError::Schema { line: 2, .. })));
    }

    fn day(inst: &str, date: NaiveDate, snapshots: Vec<Snapshot>) -> InstrumentDay {
        InstrumentDay {
            instrument: inst.into(),
            date,
            snapshots,
        }
    }

    fn full_day(spec: &SessionSpec) -> Vec<Snapshot> {
        session_slots(spec)
            .into_iter()
            .map(|t| Snapshot::new(t, vec![BookLevel::new(1000, 5)], vec![BookLevel::new(1001, 5)], 1))
            .collect()
    }

    #[test]
    fn exclusion_rules() {
        let s = spec();
        let d = NaiveDate::from_ymd_opt(2021, 1, 5).unwrap();
        let good = full_day(&s);
        let mut locked = full_day(&s);
        locked[100].asks.clear();
        let mut gappy = full_day(&s);
        let n = gappy.len();
        gappy.truncate(n - n / 10);
        let mut few_missing = full_day(&s);
        few_missing.truncate(n - n / 50);

        let days = vec![
            day("A", d, good),
            day("B", d, locked),
            day("C", d, gappy),
            day("D", d, few_missing),
        ];
        let (kept, report) = exclude_limit_days(days.clone(), &s, &ExclusionPolicy::default());
        let names: Vec<_> = kept.iter().map(|d| d.instrument.as_str()).collect();
        assert_eq!(names, vec!["A", "D"]);
        assert!(matches!(
            report.status("B", d),
            Some(DayStatus::Excluded {
                reason: ExclusionReason::LimitLocked,
                ..
            })
        ));
        assert!(matches!(
            report.status("C", d),
            Some(DayStatus::Excluded {
                reason: ExclusionReason::GapExcess,
                ..
            })
        ));
        assert_eq!(report.len(), 4);

        // idempotent
        let (again, report2) = exclude_limit_days(kept.clone(), &s, &ExclusionPolicy::default());
        assert_eq!(again, kept);
        assert_eq!(report2.excluded(), 0);

        let policy = ExclusionPolicy {
            listed: [("A".to_string(), d)].into_iter().collect(),
            ..Default::default()
        };
        let (kept, _) = exclude_limit_days(days, &s, &policy);
        assert_eq!(kept.len(), 1);
    }

    #[test]
    fn split_examples() {
        let ymd = |m, d| NaiveDate::from_ymd_opt(2021, m, d).unwrap();
        let days = vec![day("A", ymd(1, 5), vec![]), day("A", ymd(4, 2), vec![])];
        let (a, b) = split_in_out(days.clone(), ymd(3, 31)).unwrap();
        assert_eq!((a[0].date, b[0].date), (ymd(1, 5), ymd(4, 2)));
        assert!(matches!(
            split_in_out(days.clone(), ymd(4, 30)),
            Err(IngestError::EmptyPartition("out-of-sample"))
        ));
        let (a, b) = split_in_out(days, ymd(1, 5)).unwrap();
        assert_eq!((a.len(), b.len()), (1, 1));
    }

    #[test]
    fn empty_write_is_header_only() {
        let mut buf = Vec::new();
        write_snapshots_to(&mut buf, &[], 2, TickSize::new(0.01).unwrap()).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), HEAD);
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let err = write_snapshots("/nonexistent-dir/x.csv", &[], 1, TickSize::new(0.01).unwrap());
        assert!(matches!(err, Err(IngestError::Io { .. })));
    }

    #[test]
    fn layout_fills_sessions_and_skips_weekends() {
        let s = spec();
        let slots = s.expected_slots();
        let snaps: Vec<Snapshot> = (0..slots + 10)
            .map(|i| {
                Snapshot::new(
                    i as i64,
                    vec![BookLevel::new(1000, 1)],
                    vec![BookLevel::new(1001, 1)],
                    1,
                )
            })
            .collect();
        // 2021-01-08 is a Friday
        let days = lay_out_sessions("X", snaps, &s, NaiveDate::from_ymd_opt(2021, 1, 8).unwrap());
        assert_eq!(days.len(), 2);
        assert_eq!(days[0].snapshots.len(), slots);
        assert_eq!(days[1].date, NaiveDate::from_ymd_opt(2021, 1, 11).unwrap());
        assert_eq!(days[1].snapshots.len(), 10);
        assert_eq!(days[0].snapshots[2400].timestamp, 13 * 3600 * 1000);
    }
}
