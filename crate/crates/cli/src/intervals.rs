//! The interval file written by `compute` and read by `regress`.
//!
//! Columns: `instrument,interval_s,interval_start,delta_mid`, then one
//! column per indicator kind named after it (`OFI`, `GOFI`, `log-OFI`,
//! `log-GOFI`). `interval_start` is the local date and time of the
//! interval's opening snapshot; `delta_mid` is the mid-price change in
//! ticks and may end in `.5`. Indicator values use the shortest decimal
//! form that reads back to the same float.

use std::io::{Read, Write};

use chrono::NaiveDateTime;
use gofi::indicators::IndicatorKind;
use gofi::lob::HalfTicks;
use thiserror::Error;

const KEY_COLUMNS: [&str; 4] = ["instrument", "interval_s", "interval_start", "delta_mid"];
const TIME_FORMAT: &str = "%Y-%m-%dT%H:%M:%S";

#[derive(Debug, Error)]
pub enum IntervalFileError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("line {line}: {message}")]
    Format { line: u64, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalRow {
    pub instrument: String,
    pub interval_s: u32,
    pub start: NaiveDateTime,
    pub delta_mid: HalfTicks,
    /// One value per kind, in the table's kind order.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalTable {
    pub kinds: Vec<IndicatorKind>,
    pub rows: Vec<IntervalRow>,
}

pub fn write_intervals<W: Write>(writer: W, table: &IntervalTable) -> Result<(), IntervalFileError> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = KEY_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend(table.kinds.iter().map(|k| k.name().to_string()));
    wtr.write_record(&header)?;
    for row in &table.rows {
        let mut record = vec![
            row.instrument.clone(),
            row.interval_s.to_string(),
            row.start.format(TIME_FORMAT).to_string(),
            row.delta_mid.to_string(),
        ];
        record.extend(row.values.iter().map(|v| v.to_string()));
        wtr.write_record(&record)?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn parse_half_ticks(s: &str) -> Option<HalfTicks> {
    let doubled = s.parse::<f64>().ok()? * 2.0;
    (doubled.fract() == 0.0 && doubled.abs() < 9e15).then_some(HalfTicks(doubled as i64))
}

pub fn read_intervals<R: Read>(reader: R) -> Result<IntervalTable, IntervalFileError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header = rdr.headers()?.clone();
    let bad = |line: u64, message: String| IntervalFileError::Format { line, message };
    if header.len() <= KEY_COLUMNS.len() || header.iter().zip(KEY_COLUMNS).any(|(a, b)| a != b) {
        return Err(bad(
            1,
            format!("expected {} followed by indicator columns", KEY_COLUMNS.join(",")),
        ));
    }
    let kinds = header
        .iter()
        .skip(KEY_COLUMNS.len())
        .map(|name| name.parse::<IndicatorKind>().map_err(|e| bad(1, e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;

    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i as u64 + 2;
        let record = record?;
        let field = |j: usize| record.get(j).unwrap_or("");
        let interval_s = field(1)
            .parse()
            .map_err(|_| bad(line, format!("bad interval_s {:?}", field(1))))?;
        let start = NaiveDateTime::parse_from_str(field(2), TIME_FORMAT)
            .map_err(|_| bad(line, format!("bad interval_start {:?}", field(2))))?;
        let delta_mid = parse_half_ticks(field(3)).ok_or_else(|| bad(line, format!("bad delta_mid {:?}", field(3))))?;
        let values = (0..kinds.len())
            .map(|j| {
                let raw = field(KEY_COLUMNS.len() + j);
                raw.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| bad(line, format!("bad {} value {raw:?}", kinds[j])))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(IntervalRow {
            instrument: field(0).to_string(),
            interval_s,
            start,
            delta_mid,
            values,
        });
    }
    Ok(IntervalTable { kinds, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    #[test]
    fn round_trip() {
        let start = NaiveDate::from_ymd_opt(2021, 3, 30)
            .unwrap()
            .and_hms_opt(9, 30, 0)
            .unwrap();
        let table = IntervalTable {
            kinds: vec![IndicatorKind::Ofi, IndicatorKind::LogGofi],
            rows: vec![IntervalRow {
                instrument: "SIM01".into(),
                interval_s: 30,
                start,
                delta_mid: HalfTicks(-3),
                values: vec![-12.0, 0.1 + 0.2],
            }],
        };
        let mut buf = Vec::new();
        write_intervals(&mut buf, &table).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            text,
            "instrument,interval_s,interval_start,delta_mid,OFI,log-GOFI\n\
             SIM01,30,2021-03-30T09:30:00,-1.5,-12,0.30000000000000004\n"
        );
        assert_eq!(read_intervals(buf.as_slice()).unwrap(), table);
    }

    #[test]
    fn rejects_bad_rows() {
        let text = "instrument,interval_s,interval_start,delta_mid,OFI\nA,30,2021-03-30T09:30:00,0.25,1\n";
        assert!(matches!(
            read_intervals(text.as_bytes()),
            Err(IntervalFileError::Format { line: 2, .. })
        ));
        let text = "instrument,interval_s,interval_start,delta_mid,XOFI\n";
        assert!(matches!(
            read_intervals(text.as_bytes()),
            Err(IntervalFileError::Format { line: 1, .. })
        ));
    }
}
