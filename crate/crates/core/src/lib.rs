//! Shot-noise event simulation for DVS (event camera) pixels.
//!
//! A pixel sees photoreceptor noise modeled as low-pass filtered Gaussian
//! noise and emits ON/OFF events whenever the signal leaves a band around
//! its memorized reference level. Because the reference is re-sampled from
//! the signal when the post-event reset releases, noise events come in
//! alternating ON/OFF pairs unless the refractory period is long enough to
//! let the signal decorrelate.
//!
//! Modules:
//! - [`params`], [`noise`], [`pixel`]: single-pixel model.
//! - [`array`], [`bias`]: arrays with threshold mismatch, bias-current mapping.
//! - [`stats`]: pair statistics, ISI histograms, per-pixel rates.
//! - [`sweep`]: refractory and threshold-ratio sweeps.
//! - [`io`], [`config`], [`cli`]: files, configuration and the command line.

pub mod array;
pub mod bias;
pub mod cli;
pub mod config;
pub mod event;
pub mod io;
pub mod noise;
pub mod params;
pub mod pixel;
pub mod stats;
pub mod sweep;

pub use array::{make_pixel_params, simulate_array, ArrayConfig};
pub use event::{DvsEvent, Polarity};
pub use noise::{OuNoise, SignalSource};
pub use params::PixelParams;
pub use pixel::{simulate_pixel, PixelState};
