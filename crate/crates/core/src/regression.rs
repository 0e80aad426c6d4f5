//! Least-squares price-impact regressions and their coefficients of
//! determination.
//!
//! The default model is a line through the origin, `ΔP = β·x + ε`, fit on
//! the in-sample series. Out-of-sample R² evaluates that same β on the
//! holdout series unless refitting is requested.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::indicators::{IndicatorKind, IndicatorSeries};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegressionError {
    #[error("x has {x} values but y has {y}")]
    LengthMismatch { x: usize, y: usize },
    #[error("need at least 2 observations, got {0}")]
    TooFewPoints(usize),
    #[error("regressor is identically zero")]
    DegenerateRegressor,
    #[error("response has zero variance")]
    ConstantResponse,
    #[error("series kinds differ: {0} vs {1}")]
    KindMismatch(IndicatorKind, IndicatorKind),
    #[error("series interval lengths differ: {0} s vs {1} s")]
    IntervalMismatch(u32, u32),
}

pub type Result<T, E = RegressionError> = std::result::Result<T, E>;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.compensation += (self.sum - t) + v;
        } else {
            self.compensation += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.compensation
    }
}

fn sum_of(values: impl Iterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

fn check_lengths(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(RegressionError::LengthMismatch { x: x.len(), y: y.len() });
    }
    if x.len() < 2 {
        return Err(RegressionError::TooFewPoints(x.len()));
    }
    Ok(())
}

/// Least-squares slope through the origin: `Σxy / Σx²`.
pub fn fit_no_intercept(x: &[f64], y: &[f64]) -> Result<f64> {
    check_lengths(x, y)?;
    let sxx = sum_of(x.iter().map(|v| v * v));
    if sxx == 0.0 {
        return Err(RegressionError::DegenerateRegressor);
    }
    let sxy = sum_of(x.iter().zip(y).map(|(a, b)| a * b));
    Ok(sxy / sxx)
}

/// Ordinary least squares with an intercept; returns `(intercept, slope)`.
pub fn fit_with_intercept(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    check_lengths(x, y)?;
    let n = x.len() as f64;
    let mx = sum_of(x.iter().copied()) / n;
    let my = sum_of(y.iter().copied()) / n;
    let sxx = sum_of(x.iter().map(|v| (v - mx) * (v - mx)));
    if sxx == 0.0 {
        return Err(RegressionError::DegenerateRegressor);
    }
    let sxy = sum_of(x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)));
    let slope = sxy / sxx;
    Ok((my - slope * mx, slope))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum R2Mode {
    /// `1 - SSR / Σ(y - ȳ)²`.
    #[default]
    Centered,
    /// `1 - SSR / Σy²`.
    Uncentered,
}

impl FromStr for R2Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "centered" => Ok(R2Mode::Centered),
            "uncentered" => Ok(R2Mode::Uncentered),
            other => Err(format!("unknown R² mode {other:?}")),
        }
    }
}

impl fmt::Display for R2Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            R2Mode::Centered => "centered",
            R2Mode::Uncentered => "uncentered",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OosMode {
    /// Evaluate the in-sample coefficients on the holdout.
    #[default]
    FixedBeta,
    /// Refit on the holdout before evaluating it.
    Refit,
}

impl FromStr for OosMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fixed-beta" => Ok(OosMode::FixedBeta),
            "refit" => Ok(OosMode::Refit),
            other => Err(format!("unknown out-of-sample mode {other:?}")),
        }
    }
}

impl fmt::Display for OosMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OosMode::FixedBeta => "fixed-beta",
            OosMode::Refit => "refit",
        })
    }
}

/// A fitted line `y = intercept + beta·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub intercept: f64,
    pub beta: f64,
}

impl LinearFit {
    pub fn through_origin(beta: f64) -> Self {
        LinearFit { intercept: 0.0, beta }
    }

    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.beta * x
    }
}

/// Centered coefficient of determination of `y ≈ beta·x`.
pub fn r_squared(x: &[f64], y: &[f64], beta: f64) -> Result<f64> {
    r_squared_with(x, y, LinearFit::through_origin(beta), R2Mode::Centered)
}

pub fn r_squared_with(x: &[f64], y: &[f64], fit: LinearFit, mode: R2Mode) -> Result<f64> {
    check_lengths(x, y)?;
    let total = match mode {
        R2Mode::Centered => {
            let mean = sum_of(y.iter().copied()) / y.len() as f64;
            sum_of(y.iter().map(|v| (v - mean) * (v - mean)))
        }
        R2Mode::Uncentered => sum_of(y.iter().map(|v| v * v)),
    };
    if total == 0.0 {
        return Err(RegressionError::ConstantResponse);
    }
    let ssr = sum_of(x.iter().zip(y).map(|(a, b)| {
        let r = b - fit.predict(*a);
        r * r
    }));
    Ok(1.0 - ssr / total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RegressionOptions {
    pub oos_mode: OosMode,
    pub r2_mode: R2Mode,
    /// Fit an intercept as well as the slope.
    pub intercept: bool,
    /// Also report the refit out-of-sample R² next to the primary one.
    pub report_both: bool,
}

impl RegressionOptions {
    fn fit(&self, x: &[f64], y: &[f64]) -> Result<LinearFit> {
        if self.intercept {
            let (intercept, beta) = fit_with_intercept(x, y)?;
            Ok(LinearFit { intercept, beta })
        } else {
            fit_no_intercept(x, y).map(LinearFit::through_origin)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub kind: IndicatorKind,
    pub interval_length: u32,
    /// Ticks of mid-price change per unit of imbalance.
    pub beta: f64,
    pub intercept: f64,
    pub r2_in: f64,
    pub r2_out: f64,
    /// Refit out-of-sample R², when both modes were requested.
    pub r2_out_refit: Option<f64>,
    pub n_in: usize,
    pub n_out: usize,
}

/// Fits on `series_in` and scores both partitions.
pub fn evaluate_indicator(
    series_in: &IndicatorSeries,
    series_out: &IndicatorSeries,
    options: &RegressionOptions,
) -> Result<RegressionResult> {
    if series_in.kind != series_out.kind {
        return Err(RegressionError::KindMismatch(series_in.kind, series_out.kind));
    }
    if series_in.interval_length != series_out.interval_length {
        return Err(RegressionError::IntervalMismatch(
            series_in.interval_length,
            series_out.interval_length,
        ));
    }
    let (x_in, y_in) = (series_in.xs(), series_in.ys());
    let (x_out, y_out) = (series_out.xs(), series_out.ys());
    evaluate_xy(&x_in, &y_in, &x_out, &y_out, options).map(|e| RegressionResult {
        kind: series_in.kind,
        interval_length: series_in.interval_length,
        beta: e.fit.beta,
        intercept: e.fit.intercept,
        r2_in: e.r2_in,
        r2_out: e.r2_out,
        r2_out_refit: e.r2_out_refit,
        n_in: x_in.len(),
        n_out: x_out.len(),
    })
}

/// Scores of one in-sample / out-of-sample evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub fit: LinearFit,
    pub r2_in: f64,
    pub r2_out: f64,
    pub r2_out_refit: Option<f64>,
}

pub fn evaluate_xy(
    x_in: &[f64],
    y_in: &[f64],
    x_out: &[f64],
    y_out: &[f64],
    options: &RegressionOptions,
) -> Result<Evaluation> {
    let fit = options.fit(x_in, y_in)?;
    // An all-zero holdout indicator carries no signal to evaluate.
    if x_out.iter().all(|v| *v == 0.0) {
        return Err(RegressionError::DegenerateRegressor);
    }
    let r2_in = r_squared_with(x_in, y_in, fit, options.r2_mode)?;
    let r2_fixed = || r_squared_with(x_out, y_out, fit, options.r2_mode);
    let r2_refit = || -> Result<f64> {
        let refit = options.fit(x_out, y_out)?;
        r_squared_with(x_out, y_out, refit, options.r2_mode)
    };
    let r2_out = match options.oos_mode {
        OosMode::FixedBeta => r2_fixed()?,
        OosMode::Refit => r2_refit()?,
    };
    let r2_out_refit = if options.report_both { Some(r2_refit()?) } else { None };
    Ok(Evaluation {
        fit,
        r2_in,
        r2_out,
        r2_out_refit,
    })
}
