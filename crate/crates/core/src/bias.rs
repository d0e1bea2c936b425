//! Mapping from pixel bias currents to model parameters.
//!
//! Thresholds follow `theta_on = k*ln(I_on/I_d)` and
//! `theta_off = k*ln(I_d/I_off)`. The refractory period uses a linear
//! charging model of the reset node: `tau_refr = C_reset * V_swing / I_refr`.

use thiserror::Error;

use crate::params::{check_positive, ParamError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BiasError {
    #[error(transparent)]
    Invalid(#[from] ParamError),
    #[error("i_on ({i_on} A) must exceed i_d ({i_d} A)")]
    OnNotAboveDiff { i_on: f64, i_d: f64 },
    #[error("i_off ({i_off} A) must be below i_d ({i_d} A)")]
    OffNotBelowDiff { i_off: f64, i_d: f64 },
}

/// Comparator, refractory and reset-node parameters of one bias setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasPoint {
    pub i_on: f64,
    pub i_off: f64,
    pub i_d: f64,
    pub i_refr: f64,
    pub c_reset: f64,
    pub v_swing: f64,
    pub k_thresh: f64,
}

impl BiasPoint {
    pub fn validate(&self) -> Result<(), BiasError> {
        check_positive("i_on", self.i_on)?;
        check_positive("i_off", self.i_off)?;
        check_positive("i_d", self.i_d)?;
        check_positive("i_refr", self.i_refr)?;
        check_positive("c_reset", self.c_reset)?;
        check_positive("v_swing", self.v_swing)?;
        check_positive("k_thresh", self.k_thresh)?;
        Ok(())
    }
}

/// Returns `(theta_on, theta_off)`.
pub fn bias_to_thresholds(bp: &BiasPoint) -> Result<(f64, f64), BiasError> {
    bp.validate()?;
    if bp.i_on <= bp.i_d {
        return Err(BiasError::OnNotAboveDiff {
            i_on: bp.i_on,
            i_d: bp.i_d,
        });
    }
    if bp.i_off >= bp.i_d {
        return Err(BiasError::OffNotBelowDiff {
            i_off: bp.i_off,
            i_d: bp.i_d,
        });
    }
    Ok((
        bp.k_thresh * (bp.i_on / bp.i_d).ln(),
        bp.k_thresh * (bp.i_d / bp.i_off).ln(),
    ))
}

/// Refractory period in seconds.
pub fn bias_to_refractory(bp: &BiasPoint) -> Result<f64, BiasError> {
    bp.validate()?;
    Ok(bp.c_reset * bp.v_swing / bp.i_refr)
}
