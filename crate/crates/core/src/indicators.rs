//! Order flow imbalance indicators over snapshot sequences.
//!
//! Each pair of consecutive snapshots contributes one observation term:
//! the change in buying pressure at the bid minus the change in selling
//! pressure at the ask. Summing the terms over the observation gaps of an
//! interval gives the interval's indicator value.
//!
//! The classic terms (OFI, log-OFI) only look at the best level of each
//! side. The generalized terms (GOFI, log-GOFI) also account for best-price
//! jumps of more than one tick by summing the quantities of every level the
//! jump crossed. The log variants replace each quantity with its natural
//! logarithm.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lob::{mid_price, BookLevel, HalfTicks, LobError, SessionSpec, Side, Snapshot, TickPrice};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndicatorError {
    #[error("quantity must be at least 1")]
    NonpositiveQuantity,
    #[error("{0} side of the book is empty")]
    EmptySide(Side),
    #[error("expected {expected} observation terms, got {got}")]
    WrongCount { expected: usize, got: usize },
    #[error("snapshot {index} is not strictly after its predecessor")]
    UnsortedInput { index: usize },
    #[error("no snapshots to process")]
    EmptyInput,
    #[error("snapshot at {timestamp} ms is not on the snapshot grid")]
    OffGrid { timestamp: i64 },
    #[error("unknown indicator kind {0:?}")]
    UnknownKind(String),
    #[error(transparent)]
    Lob(#[from] LobError),
}

pub type Result<T, E = IndicatorError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IndicatorKind {
    #[serde(rename = "OFI")]
    Ofi,
    #[serde(rename = "GOFI")]
    Gofi,
    #[serde(rename = "log-OFI")]
    LogOfi,
    #[serde(rename = "log-GOFI")]
    LogGofi,
}

impl IndicatorKind {
    /// Report order: OFI, GOFI, log-OFI, log-GOFI.
    pub const ALL: [IndicatorKind; 4] = [
        IndicatorKind::Ofi,
        IndicatorKind::Gofi,
        IndicatorKind::LogOfi,
        IndicatorKind::LogGofi,
    ];

    pub fn is_log(self) -> bool {
        matches!(self, IndicatorKind::LogOfi | IndicatorKind::LogGofi)
    }

    pub fn is_generalized(self) -> bool {
        matches!(self, IndicatorKind::Gofi | IndicatorKind::LogGofi)
    }

    pub fn name(self) -> &'static str {
        match self {
            IndicatorKind::Ofi => "OFI",
            IndicatorKind::Gofi => "GOFI",
            IndicatorKind::LogOfi => "log-OFI",
            IndicatorKind::LogGofi => "log-GOFI",
        }
    }
}

impl fmt::Display for IndicatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IndicatorKind {
    type Err = IndicatorError;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match norm.as_str() {
            "ofi" => Ok(IndicatorKind::Ofi),
            "gofi" => Ok(IndicatorKind::Gofi),
            "logofi" => Ok(IndicatorKind::LogOfi),
            "loggofi" => Ok(IndicatorKind::LogGofi),
            _ => Err(IndicatorError::UnknownKind(s.to_string())),
        }
    }
}

/// How the rising-bid branch of the generalized bid term is read.
///
/// `Symmetric` subtracts only the previous best quantity from the sum of the
/// new levels, mirroring the falling-ask branch. `Levelwise` subtracts the
/// previous quantity level by level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GofiReading {
    #[default]
    Symmetric,
    Levelwise,
}

impl FromStr for GofiReading {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "symmetric" => Ok(GofiReading::Symmetric),
            "levelwise" => Ok(GofiReading::Levelwise),
            other => Err(format!("unknown GOFI reading {other:?}")),
        }
    }
}

/// Quantity as seen by an indicator: the raw count, or its natural log.
pub fn value_of(quantity: u64, kind: IndicatorKind) -> Result<f64> {
    if quantity == 0 {
        return Err(IndicatorError::NonpositiveQuantity);
    }
    let q = quantity as f64;
    Ok(if kind.is_log() { q.ln() } else { q })
}

/// Number of price levels spanned by a best-price move, endpoints included.
pub fn level_span(prev_best: TickPrice, next_best: TickPrice) -> usize {
    (next_best.0 - prev_best.0).unsigned_abs() as usize + 1
}

/// Sign of a best-price move from the side's point of view: positive when
/// the quote moved toward the spread.
fn improvement(prev: TickPrice, next: TickPrice, side: Side) -> i64 {
    ((next.0 - prev.0) * side.direction()).signum()
}

/// Classic best-level term (ΔBid or ΔAsk).
pub fn classic_side_term(prev_best: &BookLevel, next_best: &BookLevel, side: Side, kind: IndicatorKind) -> Result<f64> {
    let v_prev = value_of(prev_best.quantity, kind)?;
    let v_next = value_of(next_best.quantity, kind)?;
    Ok(match improvement(prev_best.price, next_best.price, side) {
        1 => v_next,
        0 => v_next - v_prev,
        _ => -v_prev,
    })
}

/// A side term together with whether its level sum ran out of depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideTerm {
    pub value: f64,
    pub truncated: bool,
}

fn sum_levels(levels: &[BookLevel], m: usize, kind: IndicatorKind) -> Result<(f64, bool)> {
    let take = m.min(levels.len());
    let mut sum = 0.0;
    for level in &levels[..take] {
        sum += value_of(level.quantity, kind)?;
    }
    Ok((sum, take < m))
}

/// Generalized term (ΔGBid or ΔGAsk).
///
/// Level sums over `m = level_span` levels stop at the deepest level present
/// in the snapshot; `truncated` is set when that happens.
pub fn generalized_side_term(
    prev: &Snapshot,
    next: &Snapshot,
    side: Side,
    kind: IndicatorKind,
    reading: GofiReading,
) -> Result<SideTerm> {
    let prev_levels = prev.side(side);
    let next_levels = next.side(side);
    let prev_best = prev_levels.first().ok_or(IndicatorError::EmptySide(side))?;
    let next_best = next_levels.first().ok_or(IndicatorError::EmptySide(side))?;
    let m = level_span(prev_best.price, next_best.price);

    let term = match improvement(prev_best.price, next_best.price, side) {
        1 if side == Side::Bid && reading == GofiReading::Levelwise => {
            let take = m.min(prev_levels.len()).min(next_levels.len());
            let mut value = 0.0;
            for (p, n) in prev_levels[..take].iter().zip(&next_levels[..take]) {
                value += value_of(n.quantity, kind)? - value_of(p.quantity, kind)?;
            }
            SideTerm {
                value,
                truncated: take < m,
            }
        }
        1 => {
            let (sum, truncated) = sum_levels(next_levels, m, kind)?;
            SideTerm {
                value: sum - value_of(prev_best.quantity, kind)?,
                truncated,
            }
        }
        0 => SideTerm {
            value: value_of(next_best.quantity, kind)? - value_of(prev_best.quantity, kind)?,
            truncated: false,
        },
        _ => {
            let (sum, truncated) = sum_levels(prev_levels, m, kind)?;
            SideTerm {
                value: value_of(next_best.quantity, kind)? - sum,
                truncated,
            }
        }
    };
    Ok(term)
}

/// Contribution of one observation gap: `bid_term - ask_term`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationTerm {
    pub bid_term: f64,
    pub ask_term: f64,
    pub value: f64,
    /// Number of sides (0..=2) whose level sum was truncated by depth.
    pub truncations: u8,
}

impl ObservationTerm {
    fn new(bid: SideTerm, ask: SideTerm) -> Self {
        ObservationTerm {
            bid_term: bid.value,
            ask_term: ask.value,
            value: bid.value - ask.value,
            truncations: bid.truncated as u8 + ask.truncated as u8,
        }
    }
}

pub fn observation_term(
    prev: &Snapshot,
    next: &Snapshot,
    kind: IndicatorKind,
    reading: GofiReading,
) -> Result<ObservationTerm> {
    let side_term = |side: Side| -> Result<SideTerm> {
        if kind.is_generalized() {
            generalized_side_term(prev, next, side, kind, reading)
        } else {
            let p = prev.best(side).map_err(|_| IndicatorError::EmptySide(side))?;
            let n = next.best(side).map_err(|_| IndicatorError::EmptySide(side))?;
            Ok(SideTerm {
                value: classic_side_term(p, n, side, kind)?,
                truncated: false,
            })
        }
    };
    Ok(ObservationTerm::new(side_term(Side::Bid)?, side_term(Side::Ask)?))
}

/// Sums the `n` observation terms of one interval.
pub fn interval_indicator(terms: &[ObservationTerm], n: usize) -> Result<f64> {
    if n == 0 || terms.len() != n {
        return Err(IndicatorError::WrongCount {
            expected: n,
            got: terms.len(),
        });
    }
    Ok(terms.iter().map(|t| t.value).sum())
}

/// Swaps the two sides and reflects every price about `center / 2`.
///
/// Under this transform every observation term and every mid-price change
/// changes sign.
pub fn mirror(s: &Snapshot, center: i64) -> Snapshot {
    let reflect = |levels: &[BookLevel]| -> Vec<BookLevel> {
        levels
            .iter()
            .map(|l| BookLevel {
                price: TickPrice(center - l.price.0),
                quantity: l.quantity,
            })
            .collect()
    };
    Snapshot {
        timestamp: s.timestamp,
        bids: reflect(&s.asks),
        asks: reflect(&s.bids),
        depth: s.depth,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorPoint {
    /// Interval index within the trading day.
    pub k: usize,
    /// Timestamp of the interval's opening snapshot.
    pub start_ms: i64,
    pub value: f64,
    pub delta_mid: HalfTicks,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorSeries {
    pub kind: IndicatorKind,
    pub interval_length: u32,
    pub points: Vec<IndicatorPoint>,
    /// Observation terms whose level sums ran past the recorded depth.
    pub truncations: u64,
    /// Intervals opened but never completed (gaps, segment ends).
    pub incomplete_intervals: u64,
}

impl IndicatorSeries {
    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.delta_mid.as_ticks()).collect()
    }

    /// Appends another day's points; interval indices keep their day-local
    /// meaning.
    pub fn extend(&mut self, other: IndicatorSeries) {
        debug_assert_eq!(self.kind, other.kind);
        self.points.extend(other.points);
        self.truncations += other.truncations;
        self.incomplete_intervals += other.incomplete_intervals;
    }
}

/// One completed interval with a value per requested kind.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalRecord {
    pub k: usize,
    pub start_ms: i64,
    pub delta_mid: HalfTicks,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone)]
struct OpenInterval {
    k: usize,
    start_ms: i64,
    start_mid: HalfTicks,
    sums: Vec<f64>,
    terms: usize,
}

/// Single-pass interval aggregator for several indicator kinds at once.
///
/// Holds the previous snapshot and the running sums of the open interval.
/// Intervals are disjoint, consecutive and anchored at each session segment
/// start. A missing snapshot discards the open interval; aggregation resumes
/// at the next interval boundary.
#[derive(Debug, Clone)]
pub struct SeriesBuilder<'a> {
    spec: &'a SessionSpec,
    kinds: Vec<IndicatorKind>,
    reading: GofiReading,
    segment_offsets: Vec<usize>,
    prev: Option<(usize, Snapshot)>,
    open: Option<OpenInterval>,
    pushed: usize,
    truncations: Vec<u64>,
    incomplete: u64,
}

impl<'a> SeriesBuilder<'a> {
    pub fn new(spec: &'a SessionSpec, kinds: &[IndicatorKind], reading: GofiReading) -> Self {
        let interval = spec.interval_ms();
        let mut offsets = Vec::with_capacity(spec.segments.len());
        let mut acc = 0;
        for seg in &spec.segments {
            offsets.push(acc);
            acc += ((seg.len_ms() + interval - 1) / interval) as usize;
        }
        SeriesBuilder {
            spec,
            kinds: kinds.to_vec(),
            reading,
            segment_offsets: offsets,
            prev: None,
            open: None,
            pushed: 0,
            truncations: vec![0; kinds.len()],
            incomplete: 0,
        }
    }

    pub fn kinds(&self) -> &[IndicatorKind] {
        &self.kinds
    }

    fn abandon(&mut self) {
        if self.open.take().is_some() {
            self.incomplete += 1;
        }
    }

    /// Feeds the next snapshot; returns the interval it completes, if any.
    pub fn push(&mut self, snapshot: &Snapshot) -> Result<Option<IntervalRecord>> {
        let index = self.pushed;
        self.pushed += 1;
        if let Some((_, prev)) = &self.prev {
            if snapshot.timestamp <= prev.timestamp {
                return Err(IndicatorError::UnsortedInput { index });
            }
        }
        let t = snapshot.timestamp;
        let Some(seg_idx) = self.spec.segment_of(t) else {
            self.abandon();
            self.prev = None;
            return Ok(None);
        };
        let seg = self.spec.segments[seg_idx];
        let pos = t - seg.start_ms;
        if pos % self.spec.period_ms() != 0 {
            return Err(IndicatorError::OffGrid { timestamp: t });
        }
        for side in [Side::Bid, Side::Ask] {
            if snapshot.side(side).is_empty() {
                return Err(IndicatorError::EmptySide(side));
            }
        }

        let contiguous = matches!(
            &self.prev,
            Some((s, p)) if *s == seg_idx && t - p.timestamp == self.spec.period_ms()
        );
        if contiguous {
            if let (Some(open), Some((_, prev))) = (self.open.as_mut(), self.prev.as_ref()) {
                for (i, &kind) in self.kinds.iter().enumerate() {
                    let term = observation_term(prev, snapshot, kind, self.reading)?;
                    open.sums[i] += term.value;
                    self.truncations[i] += term.truncations as u64;
                }
                open.terms += 1;
            }
        } else {
            self.abandon();
        }

        let mut completed = None;
        if pos % self.spec.interval_ms() == 0 {
            let mid = mid_price(snapshot)?;
            if let Some(open) = self.open.take() {
                if open.terms == self.spec.observations_per_interval() {
                    completed = Some(IntervalRecord {
                        k: open.k,
                        start_ms: open.start_ms,
                        delta_mid: mid - open.start_mid,
                        values: open.sums,
                    });
                } else {
                    self.incomplete += 1;
                }
            }
            self.open = Some(OpenInterval {
                k: self.segment_offsets[seg_idx] + (pos / self.spec.interval_ms()) as usize,
                start_ms: t,
                start_mid: mid,
                sums: vec![0.0; self.kinds.len()],
                terms: 0,
            });
        }
        self.prev = Some((seg_idx, snapshot.clone()));
        Ok(completed)
    }

    /// Truncation counts per kind, in the order the kinds were given.
    pub fn truncations(&self) -> &[u64] {
        &self.truncations
    }

    /// Closes the stream, discarding a trailing partial interval.
    pub fn finish(mut self) -> (Vec<u64>, u64) {
        self.abandon();
        (self.truncations, self.incomplete)
    }
}

/// Computes the interval series of several kinds in one pass.
pub fn compute_records(
    snapshots: &[Snapshot],
    spec: &SessionSpec,
    kinds: &[IndicatorKind],
    reading: GofiReading,
) -> Result<(Vec<IntervalRecord>, Vec<u64>, u64)> {
    if snapshots.is_empty() {
        return Err(IndicatorError::EmptyInput);
    }
    let mut builder = SeriesBuilder::new(spec, kinds, reading);
    let mut records = Vec::new();
    for s in snapshots {
        if let Some(r) = builder.push(s)? {
            records.push(r);
        }
    }
    let (truncations, incomplete) = builder.finish();
    Ok((records, truncations, incomplete))
}

pub fn compute_series(snapshots: &[Snapshot], spec: &SessionSpec, kind: IndicatorKind) -> Result<IndicatorSeries> {
    compute_series_with(snapshots, spec, kind, GofiReading::default())
}

pub fn compute_series_with(
    snapshots: &[Snapshot],
    spec: &SessionSpec,
    kind: IndicatorKind,
    reading: GofiReading,
) -> Result<IndicatorSeries> {
    let (records, truncations, incomplete) = compute_records(snapshots, spec, &[kind], reading)?;
    Ok(IndicatorSeries {
        kind,
        interval_length: spec.interval_length,
        points: records
            .into_iter()
            .map(|r| IndicatorPoint {
                k: r.k,
                start_ms: r.start_ms,
                value: r.values[0],
                delta_mid: r.delta_mid,
            })
            .collect(),
        truncations: truncations[0],
        incomplete_intervals: incomplete,
    })
}
