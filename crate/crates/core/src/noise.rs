//! Filtered-Gaussian photoreceptor noise.
//!
//! White Gaussian noise passed through a first-order low-pass with corner
//! `f3db` is an Ornstein-Uhlenbeck process with correlation time
//! `tau = 1/(2*pi*f3db)`. It is advanced with the exact discretization
//!
//! ```text
//! x' = a*x + sigma*sqrt(1 - a^2)*g,    a = exp(-dt/tau),  g ~ N(0, 1)
//! ```
//!
//! so the stationary standard deviation is `sigma` for any `dt`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::params::{correlation_time, PixelParams};

/// Anything that can feed a pixel one log-intensity sample per timestep.
pub trait SignalSource {
    fn next_sample(&mut self) -> f64;
}

/// Decay factor `a` and innovation scale `sigma*sqrt(1-a^2)` for one step.
pub fn ou_coefficients(sigma_noise: f64, f3db: f64, dt: f64) -> (f64, f64) {
    let a = (-dt / correlation_time(f3db)).exp();
    (a, sigma_noise * (1.0 - a * a).sqrt())
}

/// State of one Ornstein-Uhlenbeck noise process with its own random stream.
#[derive(Debug, Clone)]
pub struct OuNoise {
    value: f64,
    decay: f64,
    scale: f64,
    rng: ChaCha8Rng,
}

impl OuNoise {
    /// Starts the process at `initial`.
    pub fn new(sigma_noise: f64, f3db: f64, dt: f64, seed: u64, initial: f64) -> Self {
        let (decay, scale) = ou_coefficients(sigma_noise, f3db, dt);
        Self {
            value: initial,
            decay,
            scale,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Starts the process with a draw from its stationary distribution.
    pub fn stationary(sigma_noise: f64, f3db: f64, dt: f64, seed: u64) -> Self {
        let mut noise = Self::new(sigma_noise, f3db, dt, seed, 0.0);
        let g: f64 = StandardNormal.sample(&mut noise.rng);
        noise.value = sigma_noise * g;
        noise
    }

    pub fn for_pixel(params: &PixelParams, seed: u64) -> Self {
        Self::stationary(params.sigma_noise(), params.f3db(), params.dt(), seed)
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// Advances one timestep and returns the new sample.
    pub fn step(&mut self) -> f64 {
        let g: f64 = StandardNormal.sample(&mut self.rng);
        self.value = self.decay * self.value + self.scale * g;
        self.value
    }
}

impl SignalSource for OuNoise {
    fn next_sample(&mut self) -> f64 {
        self.step()
    }
}
