//! Straightforward reference implementation of the interval indicators.
//!
//! Written directly from the indicator definitions with no shared helpers
//! and no streaming state: every interval is located by timestamp lookup and
//! recomputed from its snapshots. It is slow and meant as an oracle for
//! [`crate::indicators`].

use std::collections::HashMap;

use crate::indicators::{GofiReading, IndicatorKind};
use crate::lob::{BookLevel, SessionSpec, Snapshot};

/// One complete interval: opening timestamp, mid change in half ticks, and a
/// value per requested kind.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceInterval {
    pub k: usize,
    pub start_ms: i64,
    pub delta_mid_half_ticks: i64,
    pub values: Vec<f64>,
}

fn q(level: &BookLevel, log: bool) -> f64 {
    let x = level.quantity as f64;
    if log {
        x.ln()
    } else {
        x
    }
}

fn sum_first(levels: &[BookLevel], m: usize, log: bool) -> f64 {
    levels.iter().take(m).map(|l| q(l, log)).sum()
}

fn bid_term(prev: &Snapshot, next: &Snapshot, kind: IndicatorKind, reading: GofiReading) -> f64 {
    let log = kind.is_log();
    let (p, n) = (&prev.bids[0], &next.bids[0]);
    let general = kind.is_generalized();
    let m = (n.price.0 - p.price.0).unsigned_abs() as usize + 1;
    if n.price.0 > p.price.0 {
        if !general {
            q(n, log)
        } else if reading == GofiReading::Levelwise {
            let mut total = 0.0;
            for i in 0..m.min(prev.bids.len()).min(next.bids.len()) {
                total += q(&next.bids[i], log) - q(&prev.bids[i], log);
            }
            total
        } else {
            sum_first(&next.bids, m, log) - q(p, log)
        }
    } else if n.price.0 == p.price.0 {
        q(n, log) - q(p, log)
    } else if !general {
        -q(p, log)
    } else {
        q(n, log) - sum_first(&prev.bids, m, log)
    }
}

fn ask_term(prev: &Snapshot, next: &Snapshot, kind: IndicatorKind) -> f64 {
    let log = kind.is_log();
    let (p, n) = (&prev.asks[0], &next.asks[0]);
    let general = kind.is_generalized();
    let m = (n.price.0 - p.price.0).unsigned_abs() as usize + 1;
    if n.price.0 < p.price.0 {
        if general {
            sum_first(&next.asks, m, log) - q(p, log)
        } else {
            q(n, log)
        }
    } else if n.price.0 == p.price.0 {
        q(n, log) - q(p, log)
    } else if general {
        q(n, log) - sum_first(&prev.asks, m, log)
    } else {
        -q(p, log)
    }
}

fn mid2(s: &Snapshot) -> i64 {
    s.bids[0].price.0 + s.asks[0].price.0
}

/// All complete intervals of one trading day, in time order.
///
/// An interval `[t, t + L]` counts when every grid snapshot from `t` to
/// `t + L` is present and inside one session segment.
pub fn reference_intervals(
    snapshots: &[Snapshot],
    spec: &SessionSpec,
    kinds: &[IndicatorKind],
    reading: GofiReading,
) -> Vec<ReferenceInterval> {
    let by_time: HashMap<i64, &Snapshot> = snapshots.iter().map(|s| (s.timestamp, s)).collect();
    let period = spec.snapshot_period as i64 * 1000;
    let length = spec.interval_length as i64 * 1000;
    let steps = (length / period) as usize;
    let mut out = Vec::new();
    let mut k_base = 0;
    for seg in &spec.segments {
        let count = (seg.end_ms - seg.start_ms + length - 1) / length;
        for j in 0..count {
            let start = seg.start_ms + j * length;
            let times: Vec<i64> = (0..=steps).map(|i| start + i as i64 * period).collect();
            if *times.last().unwrap() >= seg.end_ms {
                continue;
            }
            let Some(snaps) = times
                .iter()
                .map(|t| by_time.get(t).copied())
                .collect::<Option<Vec<_>>>()
            else {
                continue;
            };
            let values = kinds
                .iter()
                .map(|&kind| {
                    let mut total = 0.0;
                    for w in snaps.windows(2) {
                        total += bid_term(w[0], w[1], kind, reading) - ask_term(w[0], w[1], kind);
                    }
                    total
                })
                .collect();
            out.push(ReferenceInterval {
                k: k_base + j as usize,
                start_ms: start,
                delta_mid_half_ticks: mid2(snaps[steps]) - mid2(snaps[0]),
                values,
            });
        }
        k_base += count as usize;
    }
    out
}
