//! Pipeline configuration, read from a TOML file.
//!
//! ```toml
//! tick_size = 0.01
//! snapshot_period = 3
//! sessions = ["09:30:00-11:30:00", "13:00:00-14:57:00"]
//! interval_lengths = [30, 60, 300]
//! boundary_date = "2021-03-31"
//! exclusion_list = "limit_days.csv"   # optional, relative to this file
//!
//! [simulation]
//! depth_cap = 20
//! seed = 20210401
//!
//! [batch]
//! instruments = 10
//! start_date = "2021-03-30"
//! days = 4
//! ```
//!
//! Every key is optional; the defaults reproduce the layout above.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{NaiveDate, NaiveTime};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::indicators::GofiReading;
use crate::ingestion::ExclusionPolicy;
use crate::lob::{LobError, SessionSegment, SessionSpec, TickSize};
use crate::regression::{OosMode, R2Mode, RegressionOptions};
use crate::simulator::{SimConfig, SimError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: Box<toml::de::Error>,
    },
    #[error("invalid session segment {0:?}, expected HH:MM:SS-HH:MM:SS")]
    Segment(String),
    #[error("exclusion list {path}, line {line}: {message}")]
    ExclusionList {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Session(#[from] LobError),
    #[error(transparent)]
    Simulation(#[from] SimError),
}

pub type Result<T, E = ConfigError> = std::result::Result<T, E>;

/// How a simulated dataset is laid out as instruments and trading days.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatchConfig {
    pub instruments: usize,
    pub instrument_prefix: String,
    pub start_date: NaiveDate,
    /// Trading days per instrument.
    pub days: usize,
}

impl Default for BatchConfig {
    fn default() -> Self {
        BatchConfig {
            instruments: 10,
            instrument_prefix: "SIM".into(),
            start_date: NaiveDate::from_ymd_opt(2021, 3, 30).expect("valid date"),
            days: 4,
        }
    }
}

impl BatchConfig {
    /// Instrument identifiers, zero-padded so they sort numerically.
    pub fn instrument_names(&self) -> Vec<String> {
        let width = self.instruments.saturating_sub(1).to_string().len().max(2);
        (0..self.instruments)
            .map(|i| format!("{}{:0width$}", self.instrument_prefix, i + 1))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub tick_size: f64,
    pub snapshot_period: u32,
    pub sessions: Vec<String>,
    pub interval_lengths: Vec<u32>,
    pub boundary_date: NaiveDate,
    pub exclusion_list: Option<PathBuf>,
    pub max_missing_fraction: f64,
    pub gofi_reading: GofiReading,
    pub oos_mode: OosMode,
    pub r2: R2Mode,
    pub intercept: bool,
    /// Report the refit out-of-sample R² alongside the fixed-beta one.
    pub report_both: bool,
    pub simulation: SimConfig,
    pub batch: BatchConfig,
    /// Directory that relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            tick_size: 0.01,
            snapshot_period: 3,
            sessions: vec!["09:30:00-11:30:00".into(), "13:00:00-14:57:00".into()],
            interval_lengths: vec![30, 60, 300],
            boundary_date: NaiveDate::from_ymd_opt(2021, 3, 31).expect("valid date"),
            exclusion_list: None,
            max_missing_fraction: ExclusionPolicy::DEFAULT_MAX_MISSING,
            gofi_reading: GofiReading::default(),
            oos_mode: OosMode::default(),
            r2: R2Mode::default(),
            intercept: false,
            report_both: false,
            simulation: SimConfig::default(),
            batch: BatchConfig::default(),
            base_dir: PathBuf::new(),
        }
    }
}

fn parse_segment(s: &str) -> Result<SessionSegment> {
    let bad = || ConfigError::Segment(s.to_string());
    let (a, b) = s.split_once('-').ok_or_else(bad)?;
    let t = |x: &str| NaiveTime::parse_from_str(x.trim(), "%H:%M:%S").map_err(|_| bad());
    Ok(SessionSegment::from_clock(t(a)?, t(b)?))
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Config, toml::de::Error> {
        toml::from_str(text)
    }

    /// Reads and validates a config file.
    pub fn load(path: impl AsRef<Path>) -> Result<Config> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config = Config::from_toml(&text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source: Box::new(source),
        })?;
        config.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.session(self.interval_lengths.first().copied().unwrap_or(self.snapshot_period))?;
        if self.interval_lengths.is_empty() {
            return Err(ConfigError::Invalid("interval_lengths is empty".into()));
        }
        for &len in &self.interval_lengths {
            self.session(len)?;
        }
        if !(0.0..=1.0).contains(&self.max_missing_fraction) {
            return Err(ConfigError::Invalid(format!(
                "max_missing_fraction {} is outside [0, 1]",
                self.max_missing_fraction
            )));
        }
        if self.simulation.tick_size != self.tick_size || self.simulation.snapshot_period != self.snapshot_period {
            return Err(ConfigError::Invalid(
                "simulation tick_size and snapshot_period must match the top-level values".into(),
            ));
        }
        if self.batch.instruments == 0 || self.batch.days == 0 {
            return Err(ConfigError::Invalid(
                "batch needs at least one instrument and one day".into(),
            ));
        }
        Ok(())
    }

    pub fn tick(&self) -> Result<TickSize> {
        Ok(TickSize::new(self.tick_size)?)
    }

    pub fn segments(&self) -> Result<Vec<SessionSegment>> {
        self.sessions.iter().map(|s| parse_segment(s)).collect()
    }

    /// Session layout at the given interval length.
    pub fn session(&self, interval_length: u32) -> Result<SessionSpec> {
        Ok(SessionSpec::new(
            self.segments()?,
            self.snapshot_period,
            self.tick()?,
            interval_length,
        )?)
    }

    pub fn regression_options(&self) -> RegressionOptions {
        RegressionOptions {
            oos_mode: self.oos_mode,
            r2_mode: self.r2,
            intercept: self.intercept,
            report_both: self.report_both,
        }
    }

    fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    /// Exclusion policy, reading the listed days if a list is configured.
    ///
    /// The list is a CSV with an `instrument,date` header.
    pub fn exclusion_policy(&self) -> Result<ExclusionPolicy> {
        let mut listed = BTreeSet::new();
        if let Some(rel) = &self.exclusion_list {
            let path = self.resolve(rel);
            let err = |line, message: String| ConfigError::ExclusionList {
                path: path.clone(),
                line,
                message,
            };
            let mut rdr = csv::Reader::from_path(&path).map_err(|e| err(0, e.to_string()))?;
            for (i, row) in rdr.records().enumerate() {
                let line = i + 2;
                let row = row.map_err(|e| err(line, e.to_string()))?;
                let (Some(inst), Some(date)) = (row.get(0), row.get(1)) else {
                    return Err(err(line, "expected instrument,date".into()));
                };
                let date = NaiveDate::parse_from_str(date.trim(), "%Y-%m-%d").map_err(|e| err(line, e.to_string()))?;
                listed.insert((inst.trim().to_string(), date));
            }
        }
        Ok(ExclusionPolicy {
            max_missing_fraction: Some(self.max_missing_fraction),
            listed,
        })
    }

    /// Simulator settings for the `index`-th instrument of the batch: the
    /// seed is offset by the index and the duration covers every session
    /// slot of the configured number of days.
    pub fn batch_simulation(&self, index: usize) -> Result<SimConfig> {
        let slots = self.session(self.snapshot_period)?.expected_slots();
        let seconds = self.batch.days * slots * self.snapshot_period as usize;
        let duration = u32::try_from(seconds).map_err(|_| ConfigError::Invalid("batch duration overflows".into()))?;
        let sim = SimConfig {
            seed: self.simulation.seed.wrapping_add(index as u64),
            duration,
            ..self.simulation.clone()
        };
        sim.validate()?;
        Ok(sim)
    }
}
