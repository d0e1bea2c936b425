use std::f64::consts::PI;

use thiserror::Error;

/// Finest allowed timestep, as a fraction of the corner-frequency period.
pub const MAX_DT_FRACTION: f64 = 1.0 / 20.0;
/// Default timestep, as a fraction of the corner-frequency period.
pub const DEFAULT_DT_FRACTION: f64 = 1.0 / 50.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{name} must be finite, got {value}")]
    NotFinite { name: &'static str, value: f64 },
    #[error("{name} must be > 0, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("{name} must be >= 0, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("dt = {dt} s exceeds 1/(20*f3db) = {limit} s")]
    TimestepTooCoarse { dt: f64, limit: f64 },
}

/// Complete per-pixel model configuration.
///
/// Thresholds and `sigma_noise` share the same natural-log intensity units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelParams {
    theta_on: f64,
    theta_off: f64,
    tau_refr: f64,
    f3db: f64,
    sigma_noise: f64,
    dt: f64,
}

impl PixelParams {
    /// Builds validated parameters with the default timestep `1/(50*f3db)`.
    pub fn new(
        theta_on: f64,
        theta_off: f64,
        tau_refr: f64,
        f3db: f64,
        sigma_noise: f64,
    ) -> Result<Self, ParamError> {
        check_positive("f3db", f3db)?;
        Self::with_dt(
            theta_on,
            theta_off,
            tau_refr,
            f3db,
            sigma_noise,
            DEFAULT_DT_FRACTION / f3db,
        )
    }

    pub fn with_dt(
        theta_on: f64,
        theta_off: f64,
        tau_refr: f64,
        f3db: f64,
        sigma_noise: f64,
        dt: f64,
    ) -> Result<Self, ParamError> {
        check_positive("theta_on", theta_on)?;
        check_positive("theta_off", theta_off)?;
        check_non_negative("tau_refr", tau_refr)?;
        check_positive("f3db", f3db)?;
        check_non_negative("sigma_noise", sigma_noise)?;
        check_positive("dt", dt)?;
        let limit = MAX_DT_FRACTION / f3db;
        if dt > limit {
            return Err(ParamError::TimestepTooCoarse { dt, limit });
        }
        Ok(Self {
            theta_on,
            theta_off,
            tau_refr,
            f3db,
            sigma_noise,
            dt,
        })
    }

    pub fn theta_on(&self) -> f64 {
        self.theta_on
    }

    pub fn theta_off(&self) -> f64 {
        self.theta_off
    }

    pub fn tau_refr(&self) -> f64 {
        self.tau_refr
    }

    pub fn f3db(&self) -> f64 {
        self.f3db
    }

    pub fn sigma_noise(&self) -> f64 {
        self.sigma_noise
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Noise correlation time `1/(2*pi*f3db)`.
    pub fn correlation_time(&self) -> f64 {
        correlation_time(self.f3db)
    }

    pub fn with_thresholds(self, theta_on: f64, theta_off: f64) -> Result<Self, ParamError> {
        Self::with_dt(
            theta_on,
            theta_off,
            self.tau_refr,
            self.f3db,
            self.sigma_noise,
            self.dt,
        )
    }

    pub fn with_refractory(self, tau_refr: f64) -> Result<Self, ParamError> {
        Self::with_dt(
            self.theta_on,
            self.theta_off,
            tau_refr,
            self.f3db,
            self.sigma_noise,
            self.dt,
        )
    }

    pub fn with_sigma_noise(self, sigma_noise: f64) -> Result<Self, ParamError> {
        Self::with_dt(
            self.theta_on,
            self.theta_off,
            self.tau_refr,
            self.f3db,
            sigma_noise,
            self.dt,
        )
    }
}

pub fn correlation_time(f3db: f64) -> f64 {
    1.0 / (2.0 * PI * f3db)
}

pub(crate) fn check_finite(name: &'static str, value: f64) -> Result<(), ParamError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ParamError::NotFinite { name, value })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<(), ParamError> {
    check_finite(name, value)?;
    if value > 0.0 {
        Ok(())
    } else {
        Err(ParamError::NotPositive { name, value })
    }
}

pub(crate) fn check_non_negative(name: &'static str, value: f64) -> Result<(), ParamError> {
    check_finite(name, value)?;
    if value >= 0.0 {
        Ok(())
    } else {
        Err(ParamError::Negative { name, value })
    }
}
