//! Line-oriented `key = value` run configuration.
//!
//! ```text
//! # pixel model
//! width = 32
//! height = 32
//! theta_on = 0.15
//! theta_off = 0.15
//! tau_refr = 1e-5
//! f3db = 100
//! sigma_noise = 0.05
//! duration = 10
//! events_out = noise.evb
//! ```
//!
//! Everything after `#` is a comment. Relative paths are resolved against
//! the directory holding the config file.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::array::{ArrayConfig, DEFAULT_EVENT_CAP};
use crate::params::PixelParams;
use crate::sweep::{SweepKind, SweepSpec, ThresholdHold};

const KEYS: &[&str] = &[
    "width",
    "height",
    "theta_on",
    "theta_off",
    "tau_refr",
    "f3db",
    "sigma_noise",
    "dt",
    "mismatch_sigma_thresh",
    "seed",
    "duration",
    "max_events",
    "events_out",
    "events_csv_out",
    "sweep_kind",
    "sweep_values",
    "sweep_hold",
    "sweep_out",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigErrorKind {
    Syntax(String),
    UnknownKey,
    DuplicateKey { first_line: usize },
    BadValue(String),
    Missing,
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub kind: ConfigErrorKind,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(key) = &self.key {
            write!(f, "key `{key}`: ")?;
        }
        match &self.kind {
            ConfigErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            ConfigErrorKind::UnknownKey => f.write_str("unknown key"),
            ConfigErrorKind::DuplicateKey { first_line } => {
                write!(f, "duplicate key (first set on line {first_line})")
            }
            ConfigErrorKind::BadValue(msg) => write!(f, "bad value: {msg}"),
            ConfigErrorKind::Missing => f.write_str("required key is missing"),
            ConfigErrorKind::Invalid(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub array: ArrayConfig,
    pub duration: f64,
    pub events_out: Option<PathBuf>,
    pub events_csv_out: Option<PathBuf>,
    pub sweep: Option<SweepSpec>,
    pub sweep_out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, LoadError> {
        let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
            path: path.to_owned(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        parse_config(&text, base).map_err(LoadError::Config)
    }

    /// Replaces the master seed, including the sweep's copy.
    pub fn set_seed(&mut self, seed: u64) {
        self.array.master_seed = seed;
        if let Some(sweep) = &mut self.sweep {
            sweep.base_cfg.master_seed = seed;
        }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Config(ConfigError),
}

struct Entries<'a> {
    map: HashMap<&'a str, (usize, &'a str)>,
}

impl<'a> Entries<'a> {
    fn err(&self, key: &str, kind: ConfigErrorKind) -> ConfigError {
        ConfigError {
            line: self.map.get(key).map(|&(l, _)| l),
            key: Some(key.to_owned()),
            kind,
        }
    }

    fn raw(&self, key: &str) -> Option<&'a str> {
        self.map.get(key).map(|&(_, v)| v)
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| self.err(key, ConfigErrorKind::BadValue(format!("`{v}`: {e}"))))
            })
            .transpose()
    }

    fn require<T: std::str::FromStr>(&self, key: &str) -> Result<T, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.parse(key)?.ok_or_else(|| self.err(key, ConfigErrorKind::Missing))
    }

    fn path(&self, key: &str, base: &Path) -> Option<PathBuf> {
        self.raw(key).map(|v| base.join(v))
    }
}

/// Parses config text; `base_dir` anchors relative paths.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<RunConfig, ConfigError> {
    let mut map = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError {
                line: Some(line),
                key: None,
                kind: ConfigErrorKind::Syntax(format!("expected `key = value`, got `{content}`")),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        let err = |kind| ConfigError {
            line: Some(line),
            key: Some(key.to_owned()),
            kind,
        };
        if key.is_empty() {
            return Err(err(ConfigErrorKind::Syntax("empty key".into())));
        }
        let Some(&key) = KEYS.iter().find(|&&k| k == key) else {
            return Err(err(ConfigErrorKind::UnknownKey));
        };
        if value.is_empty() {
            return Err(err(ConfigErrorKind::BadValue("empty value".into())));
        }
        if let Some(&(first_line, _)) = map.get(key) {
            return Err(err(ConfigErrorKind::DuplicateKey { first_line }));
        }
        map.insert(key, (line, value));
    }
    let e = Entries { map };

    let f3db: f64 = e.require("f3db")?;
    let theta_on = e.require("theta_on")?;
    let theta_off = e.require("theta_off")?;
    let tau_refr = e.require("tau_refr")?;
    let sigma_noise = e.require("sigma_noise")?;
    let params = match e.parse::<f64>("dt")? {
        Some(dt) => PixelParams::with_dt(theta_on, theta_off, tau_refr, f3db, sigma_noise, dt),
        None => PixelParams::new(theta_on, theta_off, tau_refr, f3db, sigma_noise),
    }
    .map_err(|err| ConfigError {
        line: None,
        key: None,
        kind: ConfigErrorKind::Invalid(err.to_string()),
    })?;

    let mut array = ArrayConfig::new(
        e.require("width")?,
        e.require("height")?,
        params,
        e.parse("seed")?.unwrap_or(0),
    );
    array.mismatch_sigma_thresh = e.parse("mismatch_sigma_thresh")?.unwrap_or(0.0);
    array.max_events = e.parse("max_events")?.unwrap_or(DEFAULT_EVENT_CAP);
    array.validate().map_err(|err| ConfigError {
        line: None,
        key: None,
        kind: ConfigErrorKind::Invalid(err.to_string()),
    })?;

    let duration: f64 = e.require("duration")?;
    if !(duration.is_finite() && duration > 0.0) {
        return Err(e.err("duration", ConfigErrorKind::BadValue("must be finite and > 0".into())));
    }

    let sweep = match e.parse::<SweepKind>("sweep_kind")? {
        None => {
            for key in ["sweep_values", "sweep_hold", "sweep_out"] {
                if e.raw(key).is_some() {
                    return Err(e.err(
                        key,
                        ConfigErrorKind::Invalid("requires `sweep_kind`".into()),
                    ));
                }
            }
            None
        }
        Some(kind) => {
            let raw = e.raw("sweep_values").ok_or_else(|| e.err("sweep_values", ConfigErrorKind::Missing))?;
            let values = raw
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|err| format!("`{}`: {err}", v.trim())))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|msg| e.err("sweep_values", ConfigErrorKind::BadValue(msg)))?;
            let mut spec = SweepSpec::new(kind, values, array.clone(), duration);
            if let Some(hold) = e.parse::<ThresholdHold>("sweep_hold")? {
                if kind != SweepKind::ThresholdRatio {
                    return Err(e.err(
                        "sweep_hold",
                        ConfigErrorKind::Invalid("only applies to threshold_ratio sweeps".into()),
                    ));
                }
                spec.hold = hold;
            }
            spec.validate()
                .map_err(|err| e.err("sweep_values", ConfigErrorKind::Invalid(err.to_string())))?;
            Some(spec)
        }
    };

    Ok(RunConfig {
        array,
        duration,
        events_out: e.path("events_out", base_dir),
        events_csv_out: e.path("events_csv_out", base_dir),
        sweep,
        sweep_out: e.path("sweep_out", base_dir),
    })
}
