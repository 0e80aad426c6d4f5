//! Discrete-event simulator of a depth-capped limit order book.
//!
//! Each price level holds at most `D` orders. Limit orders join the best
//! level of their side; once it is full, further arrivals accumulate one
//! tick closer to the spread, or trade against the opposite best when that
//! tick is already quoted by the other side. Cancellations and market orders
//! deplete the best level; once it is empty the quote falls back to the
//! next level, which holds `D` orders.
//!
//! Because every level behind the best is full, the best-price displacement
//! of a side over any window is fixed by the net order flow it received:
//!
//! ```text
//! Δbid = floor((q_bid - 1 + L_b - C_b - M_s) / D)
//! Δask = -floor((q_ask - 1 + L_a - C_a - M_b) / D)
//! ```
//!
//! where `q` is the best-level queue at the start of the window. This makes
//! the simulated mid-price change a linear function of the order flow
//! imbalance, with slope `1 / (2D)`, up to the floor truncation.

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lob::{BookLevel, HalfTicks, Side, Snapshot, TickPrice};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid simulator config: {0}")]
    InvalidConfig(String),
    #[error("book exhausted: last tracked {side} level emptied at t = {time:.3} s")]
    BookExhausted { side: Side, time: f64 },
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;

/// What the event loop does when an event would empty a side entirely.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExhaustionPolicy {
    /// Stop the run and report the error.
    #[default]
    Abort,
    /// Drop the offending event and flag the snapshot gap it fell into.
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Maximum number of orders a price level can hold (D).
    pub depth_cap: u32,
    /// Limit order arrival rate per side, per second.
    pub rate_limit: f64,
    /// Cancellation rate per side, per second.
    pub rate_cancel: f64,
    /// Market order arrival rate per side, per second.
    pub rate_market: f64,
    pub tick_size: f64,
    /// Seconds between snapshots.
    pub snapshot_period: u32,
    /// Simulated seconds; snapshots are taken on `[0, duration)`.
    pub duration: u32,
    /// Levels per side written into each snapshot.
    pub snapshot_depth: usize,
    pub seed: u64,
    /// Initial mid-price in ticks.
    pub initial_mid: i64,
    /// Initial spread in ticks.
    pub initial_spread: i64,
    /// Levels tracked on each side, counted from the initial best.
    pub reserve_levels: usize,
    /// Orders resting on untouched levels behind the initial best. Defaults
    /// to `depth_cap`, which keeps the displacement law exact.
    pub reserve_fill: Option<u32>,
    pub on_exhaustion: ExhaustionPolicy,
}

impl Default for SimConfig {
    /// Balanced preset: D = 20, 5/1/3 orders per second per side,
    /// 10,000 snapshots three seconds apart.
    fn default() -> Self {
        SimConfig {
            depth_cap: 20,
            rate_limit: 5.0,
            rate_cancel: 1.0,
            rate_market: 3.0,
            tick_size: 0.01,
            snapshot_period: 3,
            duration: 30_000,
            snapshot_depth: 5,
            seed: 20_210_401,
            initial_mid: 2_000,
            initial_spread: 2,
            reserve_levels: 1_000,
            reserve_fill: None,
            on_exhaustion: ExhaustionPolicy::Abort,
        }
    }
}

impl SimConfig {
    /// High-activity preset: 40/8/30 orders per second per side, so best
    /// quotes regularly move by several ticks between snapshots.
    pub fn high_rate() -> Self {
        SimConfig {
            rate_limit: 40.0,
            rate_cancel: 8.0,
            rate_market: 30.0,
            seed: 20_210_630,
            ..SimConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(SimError::InvalidConfig(msg));
        if self.depth_cap == 0 {
            return bad("depth cap must be at least 1".into());
        }
        if self.snapshot_depth == 0 {
            return bad("snapshot depth must be at least 1".into());
        }
        if self.snapshot_period == 0 {
            return bad("snapshot period must be positive".into());
        }
        for (name, rate) in [
            ("limit", self.rate_limit),
            ("cancel", self.rate_cancel),
            ("market", self.rate_market),
        ] {
            if !rate.is_finite() || rate < 0.0 {
                return bad(format!("{name} rate {rate} must be finite and non-negative"));
            }
        }
        // An idle book (no placement, no cancellation) is allowed.
        if self.rate_cancel > 0.0 && self.rate_cancel >= self.rate_limit {
            return bad(format!(
                "cancel rate {} must be below limit rate {}",
                self.rate_cancel, self.rate_limit
            ));
        }
        if !self.tick_size.is_finite() || self.tick_size <= 0.0 {
            return bad(format!("tick size {} must be positive", self.tick_size));
        }
        if self.initial_spread < 1 {
            return bad(format!("initial spread {} would cross the book", self.initial_spread));
        }
        if self.reserve_levels == 0 {
            return bad("at least one level per side must be tracked".into());
        }
        if self.reserve_fill == Some(0) {
            return bad("reserve fill must be at least 1".into());
        }
        let (bid, _) = self.initial_quotes();
        if bid - self.reserve_levels as i64 + 1 < 1 {
            return bad(format!(
                "{} reserve levels below a best bid of {bid} ticks reach non-positive prices",
                self.reserve_levels
            ));
        }
        Ok(())
    }

    fn initial_quotes(&self) -> (i64, i64) {
        let bid = self.initial_mid - self.initial_spread / 2;
        (bid, bid + self.initial_spread)
    }

    pub fn snapshot_count(&self) -> usize {
        let p = self.snapshot_period as usize;
        (self.duration as usize).div_ceil(p)
    }
}

/// Price-impact slope of the depth-capped model, in ticks per order.
pub fn theoretical_slope(config: &SimConfig) -> f64 {
    1.0 / (2.0 * config.depth_cap as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventType {
    Limit,
    Cancel,
    Market,
}

/// A book event. For market orders `side` is the aggressor: a bid-side
/// market order is a buy and removes liquidity from the ask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    pub side: Side,
    pub kind: EventType,
}

impl Event {
    pub fn new(side: Side, kind: EventType) -> Self {
        Event { side, kind }
    }

    /// The six independent event streams.
    pub const STREAMS: [Event; 6] = [
        Event {
            side: Side::Bid,
            kind: EventType::Limit,
        },
        Event {
            side: Side::Bid,
            kind: EventType::Cancel,
        },
        Event {
            side: Side::Bid,
            kind: EventType::Market,
        },
        Event {
            side: Side::Ask,
            kind: EventType::Limit,
        },
        Event {
            side: Side::Ask,
            kind: EventType::Cancel,
        },
        Event {
            side: Side::Ask,
            kind: EventType::Market,
        },
    ];
}

/// Order flow counted since the last snapshot.
///
/// A limit order that arrives when its side is full and the next tick is
/// quoted by the other side trades immediately; it is counted as a market
/// order of its side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EventCounters {
    pub limit_bid: u64,
    pub cancel_bid: u64,
    /// Market sells, executed against the bid.
    pub market_sell: u64,
    pub limit_ask: u64,
    pub cancel_ask: u64,
    /// Market buys, executed against the ask.
    pub market_buy: u64,
}

impl EventCounters {
    /// Net orders added to a side's queue: `L - C - M(opposite)`.
    pub fn net_flow(&self, side: Side) -> i64 {
        match side {
            Side::Bid => self.limit_bid as i64 - self.cancel_bid as i64 - self.market_sell as i64,
            Side::Ask => self.limit_ask as i64 - self.cancel_ask as i64 - self.market_buy as i64,
        }
    }

    /// Order flow imbalance implied by the counters: `F_bid - F_ask`.
    pub fn imbalance(&self) -> i64 {
        self.net_flow(Side::Bid) - self.net_flow(Side::Ask)
    }

    pub fn total(&self) -> u64 {
        self.limit_bid + self.cancel_bid + self.market_sell + self.limit_ask + self.cancel_ask + self.market_buy
    }

    fn add(&mut self, other: &EventCounters) {
        self.limit_bid += other.limit_bid;
        self.cancel_bid += other.cancel_bid;
        self.market_sell += other.market_sell;
        self.limit_ask += other.limit_ask;
        self.cancel_ask += other.cancel_ask;
        self.market_buy += other.market_buy;
    }
}

/// One side of the book: resident order counts from the best level outward.
#[derive(Debug, Clone, PartialEq, Eq)]
struct BookSide {
    side: Side,
    best: i64,
    levels: VecDeque<u32>,
}

impl BookSide {
    fn front(&self) -> u32 {
        self.levels[0]
    }

    fn price_at(&self, i: usize) -> i64 {
        self.best - self.side.direction() * i as i64
    }

    /// Whether removing one order from the best would leave no level.
    fn would_exhaust(&self) -> bool {
        self.levels.len() == 1 && self.levels[0] == 1
    }

    fn remove_one(&mut self) {
        self.levels[0] -= 1;
        if self.levels[0] == 0 {
            self.levels.pop_front();
            self.best -= self.side.direction();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BookState {
    depth_cap: u32,
    bid: BookSide,
    ask: BookSide,
    pub counters: EventCounters,
}

impl BookState {
    /// Best quotes at `initial_mid` minus/plus half the spread; the best
    /// levels hold `ceil(D/2)` orders, every level behind holds `D`.
    pub fn init(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let d = config.depth_cap;
        let fill = config.reserve_fill.unwrap_or(d);
        let (bid, ask) = config.initial_quotes();
        let build = |side, best| {
            let mut levels = VecDeque::with_capacity(config.reserve_levels);
            levels.push_back(d.div_ceil(2));
            levels.extend(std::iter::repeat_n(fill, config.reserve_levels - 1));
            BookSide { side, best, levels }
        };
        Ok(BookState {
            depth_cap: d,
            bid: build(Side::Bid, bid),
            ask: build(Side::Ask, ask),
            counters: EventCounters::default(),
        })
    }

    fn book_side(&self, side: Side) -> &BookSide {
        match side {
            Side::Bid => &self.bid,
            Side::Ask => &self.ask,
        }
    }

    fn book_side_mut(&mut self, side: Side) -> &mut BookSide {
        match side {
            Side::Bid => &mut self.bid,
            Side::Ask => &mut self.ask,
        }
    }

    pub fn depth_cap(&self) -> u32 {
        self.depth_cap
    }

    pub fn best_price(&self, side: Side) -> TickPrice {
        TickPrice(self.book_side(side).best)
    }

    pub fn best_quantity(&self, side: Side) -> u32 {
        self.book_side(side).front()
    }

    /// Resident orders at `price`, or `None` outside the tracked levels.
    pub fn quantity_at(&self, side: Side, price: TickPrice) -> Option<u32> {
        let s = self.book_side(side);
        let offset = (s.best - price.0) * side.direction();
        if offset < 0 {
            return None;
        }
        s.levels.get(offset as usize).copied()
    }

    /// Price where the next limit order of `side` will rest: the best level,
    /// or one tick toward the spread once the best holds `D` orders.
    pub fn accumulation_price(&self, side: Side) -> TickPrice {
        let s = self.book_side(side);
        if s.front() < self.depth_cap {
            TickPrice(s.best)
        } else {
            TickPrice(s.best + side.direction())
        }
    }

    pub fn tracked_levels(&self, side: Side) -> usize {
        self.book_side(side).levels.len()
    }

    /// Total resident orders over all tracked levels of both sides.
    pub fn resident_orders(&self) -> u64 {
        self.bid.levels.iter().chain(&self.ask.levels).map(|&q| q as u64).sum()
    }

    pub fn mid(&self) -> HalfTicks {
        HalfTicks(self.bid.best + self.ask.best)
    }

    /// Removes one order from the best of `side`; `None` if that would
    /// empty the last tracked level.
    fn take_from(&mut self, side: Side) -> Option<()> {
        let s = self.book_side_mut(side);
        if s.would_exhaust() {
            return None;
        }
        s.remove_one();
        Some(())
    }

    /// Applies one event. On error the state is left unchanged.
    pub fn step(&mut self, event: Event) -> Result<(), Side> {
        let side = event.side;
        match event.kind {
            EventType::Limit => {
                let d = self.depth_cap;
                let opposite_best = self.book_side(side.opposite()).best;
                let s = self.book_side_mut(side);
                if s.front() < d {
                    s.levels[0] += 1;
                } else if (opposite_best - (s.best + side.direction())) * side.direction() > 0 {
                    s.best += side.direction();
                    s.levels.push_front(1);
                } else {
                    // the next tick is the opposite quote: trade against it
                    self.take_from(side.opposite()).ok_or(side.opposite())?;
                    self.count_market(side);
                    return Ok(());
                }
                match side {
                    Side::Bid => self.counters.limit_bid += 1,
                    Side::Ask => self.counters.limit_ask += 1,
                }
            }
            EventType::Cancel => {
                self.take_from(side).ok_or(side)?;
                match side {
                    Side::Bid => self.counters.cancel_bid += 1,
                    Side::Ask => self.counters.cancel_ask += 1,
                }
            }
            EventType::Market => {
                self.take_from(side.opposite()).ok_or(side.opposite())?;
                self.count_market(side);
            }
        }
        Ok(())
    }

    fn count_market(&mut self, aggressor: Side) {
        match aggressor {
            Side::Bid => self.counters.market_buy += 1,
            Side::Ask => self.counters.market_sell += 1,
        }
    }

    /// The top `depth` levels of each side.
    pub fn snapshot(&self, timestamp: i64, depth: usize) -> Snapshot {
        let levels = |s: &BookSide| -> Vec<BookLevel> {
            s.levels
                .iter()
                .take(depth)
                .enumerate()
                .map(|(i, &q)| BookLevel::new(s.price_at(i), q as u64))
                .collect()
        };
        Snapshot::new(timestamp, levels(&self.bid), levels(&self.ask), depth)
    }
}

pub fn init_book(config: &SimConfig) -> Result<BookState> {
    BookState::init(config)
}

/// Flow and quote movement between two consecutive snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapRecord {
    pub flow: EventCounters,
    /// Best-level queues at the opening snapshot.
    pub start_queue: [u32; 2],
    /// Best-price displacement in ticks, `[bid, ask]`.
    pub displacement: [i64; 2],
    /// Change in resident orders across all tracked levels.
    pub resident_change: i64,
    /// An event inside this gap was dropped to avoid exhausting a side.
    pub exhausted: bool,
}

impl GapRecord {
    fn side_index(side: Side) -> usize {
        match side {
            Side::Bid => 0,
            Side::Ask => 1,
        }
    }

    pub fn displacement(&self, side: Side) -> i64 {
        self.displacement[Self::side_index(side)]
    }

    /// Displacement implied by the depth-capped law, anchored at the queue
    /// resting at the best when the gap opened.
    pub fn predicted_displacement(&self, side: Side, depth_cap: u32) -> i64 {
        let q = self.start_queue[Self::side_index(side)] as i64;
        let d = depth_cap as i64;
        side.direction() * (q - 1 + self.flow.net_flow(side)).div_euclid(d)
    }

    /// `floor(F / D)` without the queue anchor.
    pub fn unanchored_displacement(&self, side: Side, depth_cap: u32) -> i64 {
        side.direction() * self.flow.net_flow(side).div_euclid(depth_cap as i64)
    }

    pub fn law_holds(&self, depth_cap: u32) -> bool {
        [Side::Bid, Side::Ask]
            .iter()
            .all(|&s| self.predicted_displacement(s, depth_cap) == self.displacement(s))
    }

    pub fn max_move(&self) -> i64 {
        self.displacement[0].abs().max(self.displacement[1].abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimRun {
    pub snapshots: Vec<Snapshot>,
    /// `gaps[i]` covers `snapshots[i]` to `snapshots[i + 1]`.
    pub gaps: Vec<GapRecord>,
    pub totals: EventCounters,
    pub skipped_events: u64,
}

impl SimRun {
    /// Fraction of gaps obeying the anchored displacement law.
    pub fn law_agreement(&self, depth_cap: u32) -> f64 {
        if self.gaps.is_empty() {
            return 1.0;
        }
        let ok = self.gaps.iter().filter(|g| g.law_holds(depth_cap)).count();
        ok as f64 / self.gaps.len() as f64
    }

    pub fn multi_tick_gaps(&self) -> usize {
        self.gaps.iter().filter(|g| g.max_move() > 1).count()
    }
}

struct Streams {
    rng: ChaCha8Rng,
    dists: [Option<Exp<f64>>; 6],
    next: [f64; 6],
}

impl Streams {
    fn new(config: &SimConfig) -> Self {
        let rates = [
            config.rate_limit,
            config.rate_cancel,
            config.rate_market,
            config.rate_limit,
            config.rate_cancel,
            config.rate_market,
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let dists = rates.map(|r| (r > 0.0).then(|| Exp::new(r).expect("positive finite rate")));
        let mut next = [f64::INFINITY; 6];
        for (t, dist) in next.iter_mut().zip(&dists) {
            if let Some(d) = dist {
                *t = d.sample(&mut rng);
            }
        }
        Streams { rng, dists, next }
    }

    fn peek(&self) -> (usize, f64) {
        let mut best = 0;
        for i in 1..6 {
            if self.next[i] < self.next[best] {
                best = i;
            }
        }
        (best, self.next[best])
    }

    fn advance(&mut self, stream: usize) {
        if let Some(d) = &self.dists[stream] {
            self.next[stream] += d.sample(&mut self.rng);
        }
    }
}

/// Runs the simulator and records a snapshot every `snapshot_period`.
///
/// Six independent Poisson streams (limit, cancel, market on each side)
/// drive the book. The output is a pure function of `config`.
pub fn run(config: &SimConfig) -> Result<SimRun> {
    let mut state = BookState::init(config)?;
    let mut streams = Streams::new(config);
    let n = config.snapshot_count();
    let period = config.snapshot_period as f64;

    let mut snapshots = Vec::with_capacity(n);
    let mut gaps = Vec::with_capacity(n.saturating_sub(1));
    let mut totals = EventCounters::default();
    let mut skipped = 0;
    let mut flagged = false;
    let mut resident = state.resident_orders();

    for k in 0..n {
        let t_snap = k as f64 * period;
        loop {
            let (stream, t) = streams.peek();
            if t >= t_snap {
                break;
            }
            if let Err(side) = state.step(Event::STREAMS[stream]) {
                match config.on_exhaustion {
                    ExhaustionPolicy::Abort => return Err(SimError::BookExhausted { side, time: t }),
                    ExhaustionPolicy::Skip => {
                        skipped += 1;
                        flagged = true;
                    }
                }
            }
            streams.advance(stream);
        }

        let snap = state.snapshot(k as i64 * config.snapshot_period as i64 * 1000, config.snapshot_depth);
        let now_resident = state.resident_orders();
        if let Some(prev) = snapshots.last() {
            let prev: &Snapshot = prev;
            gaps.push(GapRecord {
                flow: state.counters,
                start_queue: [prev.bids[0].quantity as u32, prev.asks[0].quantity as u32],
                displacement: [
                    snap.bids[0].price.0 - prev.bids[0].price.0,
                    snap.asks[0].price.0 - prev.asks[0].price.0,
                ],
                resident_change: now_resident as i64 - resident as i64,
                exhausted: flagged,
            });
        }
        totals.add(&state.counters);
        state.counters = EventCounters::default();
        flagged = false;
        resident = now_resident;
        snapshots.push(snap);
    }

    Ok(SimRun {
        snapshots,
        gaps,
        totals,
        skipped_events: skipped,
    })
}
