//! Pixel arrays with per-pixel threshold mismatch.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use thiserror::Error;

use crate::event::{sort_stream, DvsEvent};
use crate::noise::OuNoise;
use crate::params::{check_non_negative, ParamError, PixelParams};
use crate::pixel::{run_pixel, step_count, SimError};

pub const DEFAULT_EVENT_CAP: usize = 20_000_000;

const STREAM_MISMATCH: u64 = 0x6d69_736d;
const STREAM_NOISE: u64 = 0x6e6f_6973;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArrayError {
    #[error("array dimensions must be within 1..=65535, got {width}x{height}")]
    BadDimensions { width: u32, height: u32 },
    #[error("pixel ({x}, {y}) outside {width}x{height} array")]
    OutOfBounds {
        x: u32,
        y: u32,
        width: u32,
        height: u32,
    },
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrayConfig {
    pub width: u32,
    pub height: u32,
    /// Nominal parameters shared by every pixel before mismatch.
    pub base: PixelParams,
    /// Log-std of the independent lognormal ON and OFF threshold factors.
    pub mismatch_sigma_thresh: f64,
    pub master_seed: u64,
    pub max_events: usize,
}

impl ArrayConfig {
    pub fn new(width: u32, height: u32, base: PixelParams, master_seed: u64) -> Self {
        Self {
            width,
            height,
            base,
            mismatch_sigma_thresh: 0.0,
            master_seed,
            max_events: DEFAULT_EVENT_CAP,
        }
    }

    pub fn with_mismatch(mut self, sigma: f64) -> Self {
        self.mismatch_sigma_thresh = sigma;
        self
    }

    pub fn validate(&self) -> Result<(), ArrayError> {
        let max = u16::MAX as u32;
        if self.width == 0 || self.height == 0 || self.width > max || self.height > max {
            return Err(ArrayError::BadDimensions {
                width: self.width,
                height: self.height,
            });
        }
        check_non_negative("mismatch_sigma_thresh", self.mismatch_sigma_thresh)?;
        Ok(())
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Counter-based seed derivation: a pure function of all `parts`.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x9e37_79b9_7f4a_7c15, |acc, &p| {
        mix64(acc.wrapping_add(0x9e37_79b9_7f4a_7c15) ^ mix64(p))
    })
}

fn pixel_seed(master: u64, x: u32, y: u32, stream: u64) -> u64 {
    derive_seed(&[master, x as u64, y as u64, stream])
}

/// Parameters of pixel `(x, y)` after threshold mismatch.
pub fn make_pixel_params(cfg: &ArrayConfig, x: u32, y: u32) -> Result<PixelParams, ArrayError> {
    cfg.validate()?;
    if x >= cfg.width || y >= cfg.height {
        return Err(ArrayError::OutOfBounds {
            x,
            y,
            width: cfg.width,
            height: cfg.height,
        });
    }
    if cfg.mismatch_sigma_thresh == 0.0 {
        return Ok(cfg.base);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(pixel_seed(cfg.master_seed, x, y, STREAM_MISMATCH));
    let z_on: f64 = StandardNormal.sample(&mut rng);
    let z_off: f64 = StandardNormal.sample(&mut rng);
    let s = cfg.mismatch_sigma_thresh;
    Ok(cfg.base.with_thresholds(
        cfg.base.theta_on() * (s * z_on).exp(),
        cfg.base.theta_off() * (s * z_off).exp(),
    )?)
}

/// Simulates pixel `(x, y)` of the array on its own noise stream.
pub fn simulate_array_pixel(
    cfg: &ArrayConfig,
    x: u32,
    y: u32,
    duration: f64,
) -> Result<Vec<DvsEvent>, ArrayError> {
    let params = make_pixel_params(cfg, x, y)?;
    let steps = step_count(duration, params.dt())?;
    let mut noise = OuNoise::for_pixel(&params, pixel_seed(cfg.master_seed, x, y, STREAM_NOISE));
    Ok(run_pixel(
        &params,
        &mut noise,
        steps,
        x as u16,
        y as u16,
        cfg.max_events,
    )?)
}

/// Simulates every pixel and merges the streams in canonical order.
///
/// Pixels run in parallel on the current rayon pool; the result does not
/// depend on the pool size.
pub fn simulate_array(cfg: &ArrayConfig, duration: f64) -> Result<Vec<DvsEvent>, ArrayError> {
    cfg.validate()?;
    step_count(duration, cfg.base.dt())?;
    let width = cfg.width;
    let per_pixel: Vec<Vec<DvsEvent>> = (0..cfg.pixel_count())
        .into_par_iter()
        .map(|i| simulate_array_pixel(cfg, i as u32 % width, i as u32 / width, duration))
        .collect::<Result<_, _>>()?;
    let total: usize = per_pixel.iter().map(Vec::len).sum();
    if total > cfg.max_events {
        return Err(SimError::EventCapExceeded {
            cap: cfg.max_events,
        }
        .into());
    }
    let mut events = Vec::with_capacity(total);
    for pixel in per_pixel {
        events.extend(pixel);
    }
    sort_stream(&mut events);
    Ok(events)
}
