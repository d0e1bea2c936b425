//! Parameter sweeps over refractory period and ON/OFF threshold ratio.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::array::{derive_seed, simulate_array, ArrayConfig, ArrayError};
use crate::event::{DvsEvent, Polarity};
use crate::params::{ParamError, PixelParams};
use crate::stats::{isis_by_class, median_us, pair_transitions, StatsError, TransitionClass};

const SWEEP_STREAM: u64 = 0x7377_6570;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("sweep has no values")]
    Empty,
    #[error("sweep values must be strictly monotonic (index {index})")]
    NotMonotonic { index: usize },
    #[error("invalid sweep value {value} at index {index}: {reason}")]
    InvalidValue {
        index: usize,
        value: f64,
        reason: &'static str,
    },
    #[error("duration must be finite and > 0, got {0}")]
    InvalidDuration(f64),
    #[error("expected a {expected} sweep, got {found}")]
    WrongKind { expected: SweepKind, found: SweepKind },
    #[error("sweep point {index} (value {value}): {source}")]
    Point {
        index: usize,
        value: f64,
        #[source]
        source: PointError,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

#[derive(Debug, Error)]
pub enum PointError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Array(#[from] ArrayError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Refractory,
    ThresholdRatio,
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepKind::Refractory => "refractory",
            SweepKind::ThresholdRatio => "threshold_ratio",
        })
    }
}

impl FromStr for SweepKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "refractory" => Ok(SweepKind::Refractory),
            "threshold_ratio" => Ok(SweepKind::ThresholdRatio),
            other => Err(format!("unknown sweep kind `{other}`")),
        }
    }
}

/// Which threshold stays put while the ON/OFF ratio is swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdHold {
    /// theta_off fixed at base; theta_on = ratio * theta_off.
    #[default]
    ThetaOff,
    /// theta_on fixed at base; theta_off = theta_on / ratio.
    ThetaOn,
    /// theta_on + theta_off fixed at the base sum, as when only I_d moves.
    Sum,
}

impl fmt::Display for ThresholdHold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThresholdHold::ThetaOff => "theta_off",
            ThresholdHold::ThetaOn => "theta_on",
            ThresholdHold::Sum => "sum",
        })
    }
}

impl FromStr for ThresholdHold {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "theta_off" => Ok(ThresholdHold::ThetaOff),
            "theta_on" => Ok(ThresholdHold::ThetaOn),
            "sum" => Ok(ThresholdHold::Sum),
            other => Err(format!("unknown threshold hold `{other}`")),
        }
    }
}

impl ThresholdHold {
    /// `(theta_on, theta_off)` for `ratio = theta_on / theta_off`.
    pub fn thresholds(self, base: &PixelParams, ratio: f64) -> (f64, f64) {
        match self {
            ThresholdHold::ThetaOff => (ratio * base.theta_off(), base.theta_off()),
            ThresholdHold::ThetaOn => (base.theta_on(), base.theta_on() / ratio),
            ThresholdHold::Sum => {
                let sum = base.theta_on() + base.theta_off();
                (sum * ratio / (1.0 + ratio), sum / (1.0 + ratio))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub kind: SweepKind,
    /// Refractory periods in seconds, or theta_on/theta_off ratios.
    pub values: Vec<f64>,
    pub base_cfg: ArrayConfig,
    /// Simulated seconds per point.
    pub duration: f64,
    pub hold: ThresholdHold,
}

impl SweepSpec {
    pub fn new(kind: SweepKind, values: Vec<f64>, base_cfg: ArrayConfig, duration: f64) -> Self {
        Self {
            kind,
            values,
            base_cfg,
            duration,
            hold: ThresholdHold::default(),
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        if self.values.is_empty() {
            return Err(SweepError::Empty);
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(SweepError::InvalidDuration(self.duration));
        }
        for (index, &value) in self.values.iter().enumerate() {
            let reason = match self.kind {
                _ if !value.is_finite() => Some("not finite"),
                SweepKind::Refractory if value < 0.0 => Some("refractory period must be >= 0"),
                SweepKind::ThresholdRatio if value <= 0.0 => Some("ratio must be > 0"),
                _ => None,
            };
            if let Some(reason) = reason {
                return Err(SweepError::InvalidValue {
                    index,
                    value,
                    reason,
                });
            }
        }
        let increasing = self.values.windows(2).all(|w| w[0] < w[1]);
        let decreasing = self.values.windows(2).all(|w| w[0] > w[1]);
        if !(increasing || decreasing) {
            let index = self
                .values
                .windows(3)
                .position(|w| (w[1] - w[0]) * (w[2] - w[1]) <= 0.0)
                .map_or(1, |i| i + 2);
            return Err(SweepError::NotMonotonic {
                index: index.min(self.values.len() - 1),
            });
        }
        Ok(())
    }

    /// Array configuration of point `index`, with its own seed.
    pub fn point_config(&self, index: usize) -> Result<ArrayConfig, ParamError> {
        let value = self.values[index];
        let base = self.base_cfg.base;
        let params = match self.kind {
            SweepKind::Refractory => base.with_refractory(value)?,
            SweepKind::ThresholdRatio => {
                let (on, off) = self.hold.thresholds(&base, value);
                base.with_thresholds(on, off)?
            }
        };
        let mut cfg = self.base_cfg.clone();
        cfg.base = params;
        cfg.master_seed = derive_seed(&[self.base_cfg.master_seed, index as u64, SWEEP_STREAM]);
        Ok(cfg)
    }
}

/// One row of a sweep: rates are means over all pixels, in Hz per pixel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub rate_total_hz: f64,
    pub rate_on_hz: f64,
    pub rate_off_hz: f64,
    pub opposite_fraction: f64,
    pub isi_med_on_on_us: Option<f64>,
    pub isi_med_on_off_us: Option<f64>,
    pub isi_med_off_on_us: Option<f64>,
    pub isi_med_off_off_us: Option<f64>,
}

impl SweepRow {
    /// Summarizes a merged array stream.
    pub fn from_events(
        value: f64,
        events: &[DvsEvent],
        pixel_count: usize,
        duration: f64,
    ) -> Result<Self, StatsError> {
        let pairs = pair_transitions(events)?;
        let isis = isis_by_class(events)?;
        let on = events.iter().filter(|e| e.polarity == Polarity::On).count();
        let off = events.len() - on;
        let norm = pixel_count as f64 * duration;
        let med = |c: TransitionClass| median_us(&isis[c.index()]);
        Ok(Self {
            value,
            rate_total_hz: events.len() as f64 / norm,
            rate_on_hz: on as f64 / norm,
            rate_off_hz: off as f64 / norm,
            opposite_fraction: pairs.opposite_fraction,
            isi_med_on_on_us: med(TransitionClass::OnOn),
            isi_med_on_off_us: med(TransitionClass::OnOff),
            isi_med_off_on_us: med(TransitionClass::OffOn),
            isi_med_off_off_us: med(TransitionClass::OffOff),
        })
    }

    pub fn isi_median(&self, class: TransitionClass) -> Option<f64> {
        match class {
            TransitionClass::OnOn => self.isi_med_on_on_us,
            TransitionClass::OnOff => self.isi_med_on_off_us,
            TransitionClass::OffOn => self.isi_med_off_on_us,
            TransitionClass::OffOff => self.isi_med_off_off_us,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub kind: SweepKind,
    pub rows: Vec<SweepRow>,
}

/// Simulates one array configuration and summarizes it.
pub fn evaluate_point(cfg: &ArrayConfig, value: f64, duration: f64) -> Result<SweepRow, PointError> {
    let events = simulate_array(cfg, duration)?;
    Ok(SweepRow::from_events(value, &events, cfg.pixel_count(), duration)?)
}

fn run(spec: &SweepSpec) -> Result<SweepResult, SweepError> {
    spec.validate()?;
    let rows = spec
        .values
        .iter()
        .enumerate()
        .map(|(index, &value)| {
            spec.point_config(index)
                .map_err(PointError::from)
                .and_then(|cfg| evaluate_point(&cfg, value, spec.duration))
                .map_err(|source| SweepError::Point {
                    index,
                    value,
                    source,
                })
        })
        .collect::<Result<_, _>>()?;
    Ok(SweepResult {
        kind: spec.kind,
        rows,
    })
}

fn expect_kind(spec: &SweepSpec, expected: SweepKind) -> Result<(), SweepError> {
    if spec.kind == expected {
        Ok(())
    } else {
        Err(SweepError::WrongKind {
            expected,
            found: spec.kind,
        })
    }
}

pub fn run_refractory_sweep(spec: &SweepSpec) -> Result<SweepResult, SweepError> {
    expect_kind(spec, SweepKind::Refractory)?;
    run(spec)
}

pub fn run_threshold_ratio_sweep(spec: &SweepSpec) -> Result<SweepResult, SweepError> {
    expect_kind(spec, SweepKind::ThresholdRatio)?;
    run(spec)
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, SweepError> {
    match spec.kind {
        SweepKind::Refractory => run_refractory_sweep(spec),
        SweepKind::ThresholdRatio => run_threshold_ratio_sweep(spec),
    }
}

pub const SWEEP_CSV_HEADER: &str = "value,rate_total_hz,rate_on_hz,rate_off_hz,opposite_fraction,isi_med_on_on_us,isi_med_on_off_us,isi_med_off_on_us,isi_med_off_off_us";

/// Writes the sweep table; medians of empty classes are left blank.
pub fn write_sweep_csv<W: std::io::Write>(rows: &[SweepRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record(SWEEP_CSV_HEADER.split(','))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sweep_csv<R: std::io::Read>(input: R) -> Result<Vec<SweepRow>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

pub fn emit_sweep_csv(result: &SweepResult, path: &Path) -> Result<(), SweepError> {
    let file = std::fs::File::create(path).map_err(|source| SweepError::Io {
        path: path.to_owned(),
        source,
    })?;
    write_sweep_csv(&result.rows, std::io::BufWriter::new(file)).map_err(|source| {
        SweepError::Csv {
            path: path.to_owned(),
            source,
        }
    })
}

pub fn load_sweep_csv(path: &Path) -> Result<Vec<SweepRow>, SweepError> {
    let file = std::fs::File::open(path).map_err(|source| SweepError::Io {
        path: path.to_owned(),
        source,
    })?;
    read_sweep_csv(file).map_err(|source| SweepError::Csv {
        path: path.to_owned(),
        source,
    })
}
