//! Shared generators for the property tests.
#![allow(dead_code)]

use gofi::lob::{BookLevel, Snapshot};
use proptest::prelude::*;

pub const DEPTH: usize = 5;

/// Levels walking away from `best` in steps of 1..=3 ticks.
pub fn side_levels(best: i64, direction: i64, count: usize) -> impl Strategy<Value = Vec<BookLevel>> {
    (
        prop::collection::vec(1i64..=3, count),
        prop::collection::vec(1u64..=2_000, count),
    )
        .prop_map(move |(steps, quantities)| {
            let mut price = best;
            steps
                .iter()
                .zip(quantities)
                .enumerate()
                .map(|(i, (step, q))| {
                    if i > 0 {
                        price -= direction * step;
                    }
                    BookLevel::new(price, q)
                })
                .collect()
        })
}

/// A valid two-sided snapshot with its best bid at `bid`.
pub fn book_at(bid: i64) -> impl Strategy<Value = Snapshot> {
    (1i64..=3, 1..=DEPTH, 1..=DEPTH).prop_flat_map(move |(spread, nb, na)| {
        (side_levels(bid, 1, nb), side_levels(bid + spread, -1, na))
            .prop_map(|(bids, asks)| Snapshot::new(0, bids, asks, DEPTH))
    })
}

pub fn book() -> impl Strategy<Value = Snapshot> {
    (500i64..1500).prop_flat_map(book_at)
}

/// Two consecutive snapshots whose best quotes move by up to four ticks.
pub fn book_pair() -> impl Strategy<Value = (Snapshot, Snapshot)> {
    (500i64..1500, -4i64..=4).prop_flat_map(|(bid, shift)| {
        (book_at(bid), book_at(bid + shift)).prop_map(|(a, mut b)| {
            b.timestamp = 3000;
            (a, b)
        })
    })
}

/// A pair whose best prices do not move.
pub fn unmoved_pair() -> impl Strategy<Value = (Snapshot, Snapshot)> {
    (500i64..1500, 1i64..=3).prop_flat_map(|(bid, spread)| {
        let side = move |dir: i64, best: i64| (1..=DEPTH).prop_flat_map(move |n| side_levels(best, dir, n));
        (
            side(1, bid),
            side(-1, bid + spread),
            side(1, bid),
            side(-1, bid + spread),
        )
            .prop_map(|(b0, a0, b1, a1)| (Snapshot::new(0, b0, a0, DEPTH), Snapshot::new(3000, b1, a1, DEPTH)))
    })
}

/// A walk of `len` snapshots on a 3 s grid starting at 0 ms.
pub fn book_walk(len: usize) -> impl Strategy<Value = Vec<Snapshot>> {
    (1000i64..1100, prop::collection::vec(-3i64..=3, len)).prop_flat_map(|(start, moves)| {
        let mut bid = start;
        let books: Vec<_> = moves
            .into_iter()
            .map(|m| {
                bid += m;
                book_at(bid)
            })
            .collect();
        books.prop_map(|mut snaps| {
            for (i, s) in snaps.iter_mut().enumerate() {
                s.timestamp = i as i64 * 3000;
            }
            snaps
        })
    })
}

pub fn shift(s: &Snapshot, ticks: i64) -> Snapshot {
    let move_side = |levels: &[BookLevel]| {
        levels
            .iter()
            .map(|l| BookLevel::new(l.price.0 + ticks, l.quantity))
            .collect()
    };
    Snapshot {
        timestamp: s.timestamp,
        bids: move_side(&s.bids),
        asks: move_side(&s.asks),
        depth: s.depth,
    }
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
