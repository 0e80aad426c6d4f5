//! Order book snapshot types shared by every other module.
//!
//! Prices are integer multiples of the instrument's minimum quotation unit
//! (the tick). All equality comparisons between prices are therefore exact,
//! and the mid-price is carried as an integer count of half ticks.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use chrono::{NaiveTime, Timelike};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Maximum tolerated distance between a decimal price and the tick grid,
/// measured in ticks.
pub const GRID_TOLERANCE: f64 = 1e-6;

/// Largest number of decimal places a tick size may carry.
const MAX_TICK_DECIMALS: u32 = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LobError {
    #[error("crossed book: best bid {bid} >= best ask {ask}")]
    CrossedBook { bid: i64, ask: i64 },
    #[error("{side} levels are not strictly ordered away from the spread at level {level}")]
    UnsortedLevels { side: Side, level: usize },
    #[error("{side} level {level} has non-positive quantity")]
    NonpositiveQuantity { side: Side, level: usize },
    #[error("{side} level {level} has non-positive price {ticks} ticks")]
    NonpositivePrice { side: Side, level: usize, ticks: i64 },
    #[error("{side} side holds {levels} levels, more than the declared depth {depth}")]
    TooManyLevels { side: Side, levels: usize, depth: usize },
    #[error("price {price} is not on the {tick} tick grid")]
    PriceNotOnGrid { price: f64, tick: f64 },
    #[error("{0} side of the book is empty")]
    EmptySide(Side),
    #[error("invalid tick size {0}")]
    InvalidTickSize(f64),
    #[error("invalid session: {0}")]
    InvalidSession(String),
}

pub type Result<T, E = LobError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Bid,
    Ask,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Bid => Side::Ask,
            Side::Ask => Side::Bid,
        }
    }

    /// +1 for bids (better prices are higher), -1 for asks.
    pub fn direction(self) -> i64 {
        match self {
            Side::Bid => 1,
            Side::Ask => -1,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Bid => f.write_str("bid"),
            Side::Ask => f.write_str("ask"),
        }
    }
}

/// A price expressed as a signed count of ticks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TickPrice(pub i64);

impl TickPrice {
    pub fn ticks(self) -> i64 {
        self.0
    }

    pub fn offset(self, ticks: i64) -> TickPrice {
        TickPrice(self.0 + ticks)
    }
}

impl fmt::Display for TickPrice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The minimum quotation unit of an instrument.
///
/// Stored as an integer in units of `10^-decimals` so prices can be
/// re-serialized from tick counts without floating-point error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TickSize {
    scaled: u64,
    decimals: u32,
}

impl TickSize {
    pub fn new(tick: f64) -> Result<Self> {
        if !tick.is_finite() || tick <= 0.0 {
            return Err(LobError::InvalidTickSize(tick));
        }
        for decimals in 0..=MAX_TICK_DECIMALS {
            let scaled = tick * 10f64.powi(decimals as i32);
            let rounded = scaled.round();
            if rounded >= 1.0 && (scaled - rounded).abs() < 1e-9 * scaled.max(1.0) {
                return Ok(TickSize {
                    scaled: rounded as u64,
                    decimals,
                });
            }
        }
        Err(LobError::InvalidTickSize(tick))
    }

    pub fn value(self) -> f64 {
        self.scaled as f64 / 10f64.powi(self.decimals as i32)
    }

    pub fn decimals(self) -> u32 {
        self.decimals
    }

    /// Converts a decimal price to ticks, rejecting prices off the grid.
    pub fn to_ticks(self, price: f64) -> Result<TickPrice> {
        let ratio = price / self.value();
        let rounded = ratio.round();
        if !ratio.is_finite() || (ratio - rounded).abs() >= GRID_TOLERANCE {
            return Err(LobError::PriceNotOnGrid {
                price,
                tick: self.value(),
            });
        }
        Ok(TickPrice(rounded as i64))
    }

    /// Formats a tick count as a decimal price with exactly `decimals` places.
    pub fn format(self, price: TickPrice) -> String {
        let raw = price.0 as i128 * self.scaled as i128;
        if self.decimals == 0 {
            return raw.to_string();
        }
        let unit = 10i128.pow(self.decimals);
        let sign = if raw < 0 { "-" } else { "" };
        let raw = raw.abs();
        format!(
            "{sign}{}.{:0width$}",
            raw / unit,
            raw % unit,
            width = self.decimals as usize
        )
    }
}

impl fmt::Display for TickSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format(TickPrice(1)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BookLevel {
    pub price: TickPrice,
    pub quantity: u64,
}

impl BookLevel {
    pub fn new(ticks: i64, quantity: u64) -> Self {
        BookLevel {
            price: TickPrice(ticks),
            quantity,
        }
    }
}

/// One timestamped observation of the top of the book.
///
/// `bids` are ordered from the best (highest) price down, `asks` from the
/// best (lowest) price up.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Snapshot {
    /// Milliseconds since the session epoch (midnight for ingested data).
    pub timestamp: i64,
    pub bids: Vec<BookLevel>,
    pub asks: Vec<BookLevel>,
    pub depth: usize,
}

impl Snapshot {
    pub fn new(timestamp: i64, bids: Vec<BookLevel>, asks: Vec<BookLevel>, depth: usize) -> Self {
        Snapshot {
            timestamp,
            bids,
            asks,
            depth,
        }
    }

    pub fn side(&self, side: Side) -> &[BookLevel] {
        match side {
            Side::Bid => &self.bids,
            Side::Ask => &self.asks,
        }
    }

    pub fn best(&self, side: Side) -> Result<&BookLevel> {
        self.side(side).first().ok_or(LobError::EmptySide(side))
    }

    pub fn is_two_sided(&self) -> bool {
        !self.bids.is_empty() && !self.asks.is_empty()
    }

    /// Checks every snapshot invariant, reporting the first violation.
    pub fn validate(&self) -> Result<()> {
        for side in [Side::Bid, Side::Ask] {
            let levels = self.side(side);
            if levels.len() > self.depth {
                return Err(LobError::TooManyLevels {
                    side,
                    levels: levels.len(),
                    depth: self.depth,
                });
            }
            for (i, level) in levels.iter().enumerate() {
                if level.quantity == 0 {
                    return Err(LobError::NonpositiveQuantity { side, level: i + 1 });
                }
                if level.price.0 <= 0 {
                    return Err(LobError::NonpositivePrice {
                        side,
                        level: i + 1,
                        ticks: level.price.0,
                    });
                }
            }
            let dir = side.direction();
            if let Some(i) = levels.windows(2).position(|w| (w[0].price.0 - w[1].price.0) * dir <= 0) {
                return Err(LobError::UnsortedLevels { side, level: i + 2 });
            }
        }
        if let (Some(bid), Some(ask)) = (self.bids.first(), self.asks.first()) {
            if bid.price >= ask.price {
                return Err(LobError::CrossedBook {
                    bid: bid.price.0,
                    ask: ask.price.0,
                });
            }
        }
        Ok(())
    }
}

pub fn validate_snapshot(s: &Snapshot) -> Result<()> {
    s.validate()
}

/// A price in units of half a tick; mid-prices are always representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfTicks(pub i64);

impl HalfTicks {
    pub fn from_ticks(ticks: i64) -> Self {
        HalfTicks(2 * ticks)
    }

    pub fn as_ticks(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl Add for HalfTicks {
    type Output = HalfTicks;
    fn add(self, rhs: HalfTicks) -> HalfTicks {
        HalfTicks(self.0 + rhs.0)
    }
}

impl Sub for HalfTicks {
    type Output = HalfTicks;
    fn sub(self, rhs: HalfTicks) -> HalfTicks {
        HalfTicks(self.0 - rhs.0)
    }
}

impl Neg for HalfTicks {
    type Output = HalfTicks;
    fn neg(self) -> HalfTicks {
        HalfTicks(-self.0)
    }
}

impl fmt::Display for HalfTicks {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}", self.as_ticks())
        }
    }
}

/// Mid-price in tick units: `(best_bid + best_ask) / 2`.
pub fn mid_price(s: &Snapshot) -> Result<HalfTicks> {
    let bid = s.best(Side::Bid)?.price.0;
    let ask = s.best(Side::Ask)?.price.0;
    Ok(HalfTicks(bid + ask))
}

pub fn mid_price_change(prev: &Snapshot, next: &Snapshot) -> Result<HalfTicks> {
    Ok(mid_price(next)? - mid_price(prev)?)
}

/// A half-open window `[start_ms, end_ms)` of continuous trading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionSegment {
    pub start_ms: i64,
    pub end_ms: i64,
}

impl SessionSegment {
    pub fn new(start_ms: i64, end_ms: i64) -> Self {
        SessionSegment { start_ms, end_ms }
    }

    pub fn from_clock(start: NaiveTime, end: NaiveTime) -> Self {
        SessionSegment {
            start_ms: clock_ms(start),
            end_ms: clock_ms(end),
        }
    }

    pub fn contains(&self, t: i64) -> bool {
        t >= self.start_ms && t < self.end_ms
    }

    pub fn len_ms(&self) -> i64 {
        self.end_ms - self.start_ms
    }
}

pub fn clock_ms(t: NaiveTime) -> i64 {
    t.num_seconds_from_midnight() as i64 * 1000 + (t.nanosecond() / 1_000_000) as i64
}

/// Trading-session layout and sampling parameters for one venue.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionSpec {
    pub segments: Vec<SessionSegment>,
    /// Seconds between consecutive snapshots.
    pub snapshot_period: u32,
    pub tick_size: TickSize,
    /// Seconds per indicator interval.
    pub interval_length: u32,
}

impl SessionSpec {
    pub fn new(
        segments: Vec<SessionSegment>,
        snapshot_period: u32,
        tick_size: TickSize,
        interval_length: u32,
    ) -> Result<Self> {
        let spec = SessionSpec {
            segments,
            snapshot_period,
            tick_size,
            interval_length,
        };
        spec.check()?;
        Ok(spec)
    }

    /// Continuous bidding on Chinese exchanges: 09:30-11:30 and 13:00-14:57.
    pub fn china_a_share(interval_length: u32) -> Result<Self> {
        let t = |h, m| NaiveTime::from_hms_opt(h, m, 0).expect("valid clock time");
        SessionSpec::new(
            vec![
                SessionSegment::from_clock(t(9, 30), t(11, 30)),
                SessionSegment::from_clock(t(13, 0), t(14, 57)),
            ],
            3,
            TickSize::new(0.01)?,
            interval_length,
        )
    }

    /// A single segment `[0, duration_s)`, as produced by the simulator.
    pub fn continuous(
        duration_s: u32,
        snapshot_period: u32,
        tick_size: TickSize,
        interval_length: u32,
    ) -> Result<Self> {
        SessionSpec::new(
            vec![SessionSegment::new(0, duration_s as i64 * 1000)],
            snapshot_period,
            tick_size,
            interval_length,
        )
    }

    pub fn with_interval(&self, interval_length: u32) -> Result<Self> {
        SessionSpec::new(
            self.segments.clone(),
            self.snapshot_period,
            self.tick_size,
            interval_length,
        )
    }

    fn check(&self) -> Result<()> {
        if self.snapshot_period == 0 {
            return Err(LobError::InvalidSession("snapshot period must be positive".into()));
        }
        if self.interval_length == 0 || !self.interval_length.is_multiple_of(self.snapshot_period) {
            return Err(LobError::InvalidSession(format!(
                "interval length {} s is not a positive multiple of the {} s snapshot period",
                self.interval_length, self.snapshot_period
            )));
        }
        if self.segments.is_empty() {
            return Err(LobError::InvalidSession("no session segments".into()));
        }
        for seg in &self.segments {
            if seg.end_ms <= seg.start_ms {
                return Err(LobError::InvalidSession(format!(
                    "segment [{}, {}) ms is empty",
                    seg.start_ms, seg.end_ms
                )));
            }
        }
        if self.segments.windows(2).any(|w| w[1].start_ms < w[0].end_ms) {
            return Err(LobError::InvalidSession("segments overlap or are unordered".into()));
        }
        Ok(())
    }

    /// Observation gaps per interval (N).
    pub fn observations_per_interval(&self) -> usize {
        (self.interval_length / self.snapshot_period) as usize
    }

    pub fn period_ms(&self) -> i64 {
        self.snapshot_period as i64 * 1000
    }

    pub fn interval_ms(&self) -> i64 {
        self.interval_length as i64 * 1000
    }

    pub fn segment_of(&self, t: i64) -> Option<usize> {
        self.segments.iter().position(|s| s.contains(t))
    }

    pub fn contains(&self, t: i64) -> bool {
        self.segment_of(t).is_some()
    }

    /// Grid slots in the whole session: one per snapshot period per segment.
    pub fn expected_slots(&self) -> usize {
        let p = self.period_ms();
        self.segments.iter().map(|s| ((s.len_ms() + p - 1) / p) as usize).sum()
    }
}
