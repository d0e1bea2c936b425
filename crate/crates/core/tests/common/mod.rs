//! Shared fixtures and the random-walk Markov-chain oracle.
#![allow(dead_code)]

use dvs_shotnoise::{PixelParams, SignalSource};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const F3DB: f64 = 100.0;
pub const SIGMA: f64 = 0.05;

pub fn corr_time() -> f64 {
    1.0 / (2.0 * std::f64::consts::PI * F3DB)
}

/// Thresholds at `k` noise standard deviations, refractory at `refr_frac` correlation times.
pub fn params(k_on: f64, k_off: f64, refr_frac: f64) -> PixelParams {
    PixelParams::new(k_on * SIGMA, k_off * SIGMA, refr_frac * corr_time(), F3DB, SIGMA).unwrap()
}

/// Regime in which the model shows paper-like pairing: thresholds at 3 sigma,
/// effectively instantaneous reset.
pub fn paired_regime() -> PixelParams {
    params(3.0, 3.0, 0.01)
}

/// Symmetric +-1 random walk on levels `0..levels`; moves off the grid are rejected.
pub struct RandomWalk {
    level: i64,
    levels: i64,
    rng: ChaCha8Rng,
}

impl RandomWalk {
    pub fn new(levels: i64, start: i64, seed: u64) -> Self {
        Self {
            level: start,
            levels,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl SignalSource for RandomWalk {
    fn next_sample(&mut self) -> f64 {
        let next = if self.rng.random::<bool>() {
            self.level + 1
        } else {
            self.level - 1
        };
        if (0..self.levels).contains(&next) {
            self.level = next;
        }
        self.level as f64
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OracleResult {
    pub events_per_step: f64,
    /// Pair fractions in ON->ON, ON->OFF, OFF->ON, OFF->OFF order.
    pub class_fraction: [f64; 4],
}

/// Exact event statistics of a pixel with thresholds `theta` (grid steps,
/// strict crossing) and zero refractory period driven by [`RandomWalk`].
///
/// After an event at level `w` the pixel is held for one step, then the
/// reference is re-sampled at the walk's next level. Between events the
/// pair (walk level, reference) is a Markov chain absorbed when the level
/// leaves the band `reference +- theta`. Absorption probabilities and mean
/// absorption times give the kernel of the embedded chain on
/// (polarity, level) event states, whose stationary law yields the rate and
/// the transition-class frequencies.
pub fn markov_oracle(levels: usize, theta: usize) -> OracleResult {
    let n = levels as i64;
    let th = theta as i64;
    let moves = |w: i64| -> [(i64, f64); 2] {
        let up = if w + 1 < n { w + 1 } else { w };
        let down = if w >= 1 { w - 1 } else { w };
        [(up, 0.5), (down, 0.5)]
    };

    // Transient states: armed (w, r) with |w - r| <= theta.
    let mut armed = Vec::new();
    let mut index = vec![vec![usize::MAX; levels]; levels];
    for w in 0..n {
        for r in 0..n {
            if (w - r).abs() <= th {
                index[w as usize][r as usize] = armed.len();
                armed.push((w, r));
            }
        }
    }
    // Absorbing targets: (polarity 0 = ON / 1 = OFF, level).
    let target = |pol: usize, level: i64| pol * levels + level as usize;
    let n_targets = 2 * levels;

    let mut absorb = vec![vec![0.0; n_targets]; armed.len()];
    let mut time = vec![0.0; armed.len()];
    for _ in 0..200_000 {
        let mut delta: f64 = 0.0;
        for (s, &(w, r)) in armed.iter().enumerate() {
            let mut row = vec![0.0; n_targets];
            let mut t = 1.0;
            for (w2, p) in moves(w) {
                if w2 - r > th {
                    row[target(0, w2)] += p;
                } else if r - w2 > th {
                    row[target(1, w2)] += p;
                } else {
                    let s2 = index[w2 as usize][r as usize];
                    for (acc, v) in row.iter_mut().zip(&absorb[s2]) {
                        *acc += p * v;
                    }
                    t += p * time[s2];
                }
            }
            delta = delta.max((t - time[s]).abs());
            for (old, new) in absorb[s].iter().zip(&row) {
                delta = delta.max((old - new).abs());
            }
            absorb[s] = row;
            time[s] = t;
        }
        if delta < 1e-13 {
            break;
        }
    }

    // From an event at level w: one held step, then armed at (w', w').
    let kernel: Vec<Vec<f64>> = (0..n)
        .map(|w| {
            let mut row = vec![0.0; n_targets];
            for (w2, p) in moves(w) {
                let s = index[w2 as usize][w2 as usize];
                for (acc, v) in row.iter_mut().zip(&absorb[s]) {
                    *acc += p * v;
                }
            }
            row
        })
        .collect();
    let cycle: Vec<f64> = (0..n)
        .map(|w| {
            1.0 + moves(w)
                .iter()
                .map(|&(w2, p)| p * time[index[w2 as usize][w2 as usize]])
                .sum::<f64>()
        })
        .collect();

    // Stationary law of the embedded chain on event states.
    let mut mu = vec![1.0 / n_targets as f64; n_targets];
    for _ in 0..100_000 {
        let mut next = vec![0.0; n_targets];
        for (e, &m) in mu.iter().enumerate() {
            let level = e % levels;
            for (acc, k) in next.iter_mut().zip(&kernel[level]) {
                *acc += m * k;
            }
        }
        let diff: f64 = next.iter().zip(&mu).map(|(a, b)| (a - b).abs()).sum();
        mu = next;
        if diff < 1e-15 {
            break;
        }
    }

    let mean_cycle: f64 = mu.iter().enumerate().map(|(e, m)| m * cycle[e % levels]).sum();
    let mut class_fraction = [0.0; 4];
    for (e, &m) in mu.iter().enumerate() {
        let (prev, level) = (e / levels, e % levels);
        for (t, k) in kernel[level].iter().enumerate() {
            class_fraction[prev * 2 + t / levels] += m * k;
        }
    }
    OracleResult {
        events_per_step: 1.0 / mean_cycle,
        class_fraction,
    }
}

/// Pair fractions from simulated counts, in the oracle's class order.
pub fn class_fractions(counts: [[u64; 2]; 2]) -> [f64; 4] {
    let total: u64 = counts.iter().flatten().sum();
    let c = [counts[0][0], counts[0][1], counts[1][0], counts[1][1]];
    c.map(|v| v as f64 / total as f64)
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}
