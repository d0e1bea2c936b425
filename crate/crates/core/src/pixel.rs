//! Change-detector state machine with self-timed reset.
//!
//! A pixel compares each sample against a memorized reference level. When
//! the deviation exceeds the ON or OFF threshold it emits an event and holds
//! its change amplifier in reset for the refractory period. The reference
//! is re-sampled from the signal at the moment the reset releases, so with
//! a short refractory period it lands near the level that fired the event.

use thiserror::Error;

use crate::event::{seconds_to_us, DvsEvent, Polarity};
use crate::noise::{OuNoise, SignalSource};
use crate::params::PixelParams;

/// Largest step count a run may request; beyond this `k * dt` loses integer precision.
pub const MAX_STEPS: u64 = 1 << 53;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("time went backwards: t = {t} s after {previous} s")]
    NonMonotonicTime { t: f64, previous: f64 },
    #[error("duration must be finite and > 0, got {0}")]
    InvalidDuration(f64),
    #[error("duration {duration} s at dt = {dt} s overflows the step counter")]
    StepOverflow { duration: f64, dt: f64 },
    #[error("event count exceeds the cap of {cap} events")]
    EventCapExceeded { cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelState {
    v_ref: f64,
    in_refractory: bool,
    refractory_end: f64,
    last_t: f64,
}

impl PixelState {
    /// A pixel armed at time `t0` with its reference at `initial_sample`.
    pub fn new(initial_sample: f64, t0: f64) -> Self {
        Self {
            v_ref: initial_sample,
            in_refractory: false,
            refractory_end: t0,
            last_t: t0,
        }
    }

    pub fn v_ref(&self) -> f64 {
        self.v_ref
    }

    pub fn in_refractory(&self) -> bool {
        self.in_refractory
    }

    pub fn refractory_end(&self) -> f64 {
        self.refractory_end
    }

    /// Feeds one sample taken at time `t`; `t` must increase strictly.
    pub fn step(
        &mut self,
        sample: f64,
        t: f64,
        params: &PixelParams,
    ) -> Result<Option<Polarity>, SimError> {
        if !(t > self.last_t) {
            return Err(SimError::NonMonotonicTime {
                t,
                previous: self.last_t,
            });
        }
        self.last_t = t;

        if self.in_refractory {
            if t < self.refractory_end {
                return Ok(None);
            }
            self.in_refractory = false;
            self.v_ref = sample;
        }

        let deviation = sample - self.v_ref;
        let on_excursion = deviation / params.theta_on();
        let off_excursion = -deviation / params.theta_off();
        if on_excursion <= 1.0 && off_excursion <= 1.0 {
            return Ok(None);
        }
        // Larger normalized excursion wins; a tie goes to ON.
        let polarity = if on_excursion >= off_excursion {
            Polarity::On
        } else {
            Polarity::Off
        };
        self.in_refractory = true;
        self.refractory_end = t + params.tau_refr();
        Ok(Some(polarity))
    }
}

/// Number of timesteps needed to cover `duration`.
pub fn step_count(duration: f64, dt: f64) -> Result<u64, SimError> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(SimError::InvalidDuration(duration));
    }
    let steps = (duration / dt).floor();
    if !(steps < MAX_STEPS as f64) {
        return Err(SimError::StepOverflow { duration, dt });
    }
    Ok(steps as u64)
}

/// Runs one pixel for `steps` timesteps after an initial sample at `t = 0`.
///
/// The initial sample sets the reference, so no startup event is emitted.
/// `cap` bounds the number of events kept.
pub fn run_pixel<S: SignalSource>(
    params: &PixelParams,
    source: &mut S,
    steps: u64,
    x: u16,
    y: u16,
    cap: usize,
) -> Result<Vec<DvsEvent>, SimError> {
    let dt = params.dt();
    let mut state = PixelState::new(source.next_sample(), 0.0);
    let mut events = Vec::new();
    for k in 1..=steps {
        let t = k as f64 * dt;
        if let Some(polarity) = state.step(source.next_sample(), t, params)? {
            if events.len() == cap {
                return Err(SimError::EventCapExceeded { cap });
            }
            events.push(DvsEvent::new(seconds_to_us(t), x, y, polarity));
        }
    }
    Ok(events)
}

/// Simulates a single pixel at address (0, 0) driven by OU noise.
pub fn simulate_pixel(
    params: &PixelParams,
    duration: f64,
    seed: u64,
) -> Result<Vec<DvsEvent>, SimError> {
    let steps = step_count(duration, params.dt())?;
    let mut noise = OuNoise::for_pixel(params, seed);
    run_pixel(params, &mut noise, steps, 0, 0, usize::MAX)
}
