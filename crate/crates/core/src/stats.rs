//! Per-pixel noise statistics: polarity transitions, ISI histograms by
//! transition class, and per-pixel event rates.
//!
//! Pairs are always formed from consecutive events of the same pixel.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::event::{DvsEvent, Polarity};

pub const DEFAULT_BINS_PER_DECADE: u32 = 8;
pub const DEFAULT_ISI_MIN_US: f64 = 10.0;
pub const DEFAULT_ISI_MAX_US: f64 = 1e7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("events out of order at index {index}")]
    Unsorted { index: usize },
    #[error("invalid ISI binning: {0}")]
    BadBinning(String),
    #[error("duration must be finite and > 0, got {0}")]
    InvalidDuration(f64),
    #[error("percentile must be in (0, 100), got {0}")]
    BadPercentile(f64),
    #[error("rate table is empty")]
    EmptyTable,
}

/// Polarity of the earlier and later event of a same-pixel pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransitionClass {
    OnOn,
    OnOff,
    OffOn,
    OffOff,
}

impl TransitionClass {
    pub const ALL: [TransitionClass; 4] = [
        TransitionClass::OnOn,
        TransitionClass::OnOff,
        TransitionClass::OffOn,
        TransitionClass::OffOff,
    ];

    pub fn from_pair(prev: Polarity, next: Polarity) -> Self {
        Self::ALL[prev.index() * 2 + next.index()]
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn prev(self) -> Polarity {
        Polarity::from_index(self.index() / 2)
    }

    pub fn next(self) -> Polarity {
        Polarity::from_index(self.index() % 2)
    }

    pub fn is_opposite(self) -> bool {
        self.prev() != self.next()
    }

    /// Short lowercase name used in CSV output, e.g. `on_off`.
    pub fn key(self) -> &'static str {
        match self {
            TransitionClass::OnOn => "on_on",
            TransitionClass::OnOff => "on_off",
            TransitionClass::OffOn => "off_on",
            TransitionClass::OffOff => "off_off",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.key() == key)
    }
}

impl fmt::Display for TransitionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.prev(), self.next())
    }
}

/// Walks consecutive same-pixel pairs, calling `visit(class, isi_us)` for
/// each one. Returns the number of pixels with at least one event.
fn for_each_pair(
    events: &[DvsEvent],
    mut visit: impl FnMut(TransitionClass, u64),
) -> Result<usize, StatsError> {
    let mut last: HashMap<(u16, u16), (u64, Polarity)> = HashMap::new();
    let mut prev_t = 0;
    for (index, ev) in events.iter().enumerate() {
        if ev.t_us < prev_t {
            return Err(StatsError::Unsorted { index });
        }
        prev_t = ev.t_us;
        if let Some((t, pol)) = last.insert((ev.x, ev.y), (ev.t_us, ev.polarity)) {
            // Same-pixel events sharing a timestamp must be ON before OFF.
            if t == ev.t_us && pol.index() > ev.polarity.index() {
                return Err(StatsError::Unsorted { index });
            }
            visit(TransitionClass::from_pair(pol, ev.polarity), ev.t_us - t);
        }
    }
    Ok(last.len())
}

/// Consecutive-pair counts indexed `[prev][next]` by [`Polarity::index`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairStats {
    pub counts: [[u64; 2]; 2],
    /// Share of pairs with differing polarity; 0 when there are no pairs.
    pub opposite_fraction: f64,
    pub active_pixels: usize,
}

impl PairStats {
    pub fn from_counts(counts: [[u64; 2]; 2], active_pixels: usize) -> Self {
        let total: u64 = counts.iter().flatten().sum();
        let opposite = counts[0][1] + counts[1][0];
        let opposite_fraction = if total == 0 {
            0.0
        } else {
            opposite as f64 / total as f64
        };
        Self {
            counts,
            opposite_fraction,
            active_pixels,
        }
    }

    pub fn count(&self, class: TransitionClass) -> u64 {
        self.counts[class.prev().index()][class.next().index()]
    }

    pub fn total_pairs(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

pub fn pair_transitions(events: &[DvsEvent]) -> Result<PairStats, StatsError> {
    let mut counts = [[0u64; 2]; 2];
    let active = for_each_pair(events, |class, _| {
        counts[class.prev().index()][class.next().index()] += 1;
    })?;
    Ok(PairStats::from_counts(counts, active))
}

/// All same-pixel ISIs in microseconds, grouped by [`TransitionClass::index`].
pub fn isis_by_class(events: &[DvsEvent]) -> Result<[Vec<u64>; 4], StatsError> {
    let mut out: [Vec<u64>; 4] = Default::default();
    for_each_pair(events, |class, isi| out[class.index()].push(isi))?;
    Ok(out)
}

/// Median of a sample; the mean of the two middle values for even sizes.
pub fn median_us(values: &[u64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_unstable();
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid] as f64
    } else {
        (v[mid - 1] as f64 + v[mid] as f64) / 2.0
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsiHistogram {
    pub class: TransitionClass,
    /// Log-spaced bin edges in microseconds; `counts.len() + 1` entries.
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl IsiHistogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Bin index for an ISI; values outside the edges clamp to the end bins.
    pub fn bin_of(&self, isi_us: f64) -> usize {
        let upper = self.bin_edges.partition_point(|&e| e <= isi_us);
        upper.saturating_sub(1).min(self.counts.len() - 1)
    }
}

/// Log-spaced edges from `t_min_us` to `t_max_us`; the last bin is
/// truncated at `t_max_us` when the span is not a whole number of bins.
pub fn log_bin_edges(
    bins_per_decade: u32,
    t_min_us: f64,
    t_max_us: f64,
) -> Result<Vec<f64>, StatsError> {
    if bins_per_decade < 1 {
        return Err(StatsError::BadBinning("bins_per_decade must be >= 1".into()));
    }
    if !(t_min_us >= 1.0 && t_max_us.is_finite()) {
        return Err(StatsError::BadBinning(format!(
            "t_min_us must be >= 1, got {t_min_us}"
        )));
    }
    if !(t_max_us > t_min_us) {
        return Err(StatsError::BadBinning(format!(
            "t_max_us ({t_max_us}) must exceed t_min_us ({t_min_us})"
        )));
    }
    let bpd = bins_per_decade as f64;
    let exact = bpd * (t_max_us / t_min_us).log10();
    // Snap near-integer spans so 10..1e7 at 8/decade gives exactly 48 bins.
    let bins = if (exact - exact.round()).abs() < 1e-9 {
        exact.round()
    } else {
        exact.ceil()
    }
    .max(1.0) as usize;
    let mut edges: Vec<f64> = (0..bins)
        .map(|i| t_min_us * 10f64.powf(i as f64 / bpd))
        .collect();
    edges.push(t_max_us);
    Ok(edges)
}

/// Four ISI histograms in [`TransitionClass::ALL`] order.
pub fn isi_by_class(
    events: &[DvsEvent],
    bins_per_decade: u32,
    t_min_us: f64,
    t_max_us: f64,
) -> Result<[IsiHistogram; 4], StatsError> {
    let edges = log_bin_edges(bins_per_decade, t_min_us, t_max_us)?;
    let mut hists = TransitionClass::ALL.map(|class| IsiHistogram {
        class,
        bin_edges: edges.clone(),
        counts: vec![0; edges.len() - 1],
    });
    for_each_pair(events, |class, isi| {
        let h = &mut hists[class.index()];
        let bin = h.bin_of(isi as f64);
        h.counts[bin] += 1;
    })?;
    Ok(hists)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelRate {
    pub x: u16,
    pub y: u16,
    pub rate_on: f64,
    pub rate_off: f64,
}

impl PixelRate {
    pub fn magnitude(&self) -> f64 {
        self.rate_on.hypot(self.rate_off)
    }
}

/// Per-pixel ON/OFF rates in Hz, rows ordered by (y, x).
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    pub duration: f64,
    pub rows: Vec<PixelRate>,
}

impl RateTable {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Pixels without events are omitted.
pub fn per_pixel_rates(events: &[DvsEvent], duration: f64) -> Result<RateTable, StatsError> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(StatsError::InvalidDuration(duration));
    }
    let mut counts: HashMap<(u16, u16), [u64; 2]> = HashMap::new();
    for ev in events {
        counts.entry((ev.y, ev.x)).or_default()[ev.polarity.index()] += 1;
    }
    let mut keys: Vec<_> = counts.keys().copied().collect();
    keys.sort_unstable();
    let rows = keys
        .into_iter()
        .map(|(y, x)| {
            let c = counts[&(y, x)];
            PixelRate {
                x,
                y,
                rate_on: c[0] as f64 / duration,
                rate_off: c[1] as f64 / duration,
            }
        })
        .collect();
    Ok(RateTable { duration, rows })
}

/// Nearest-rank `p`-th percentile of per-pixel rate magnitude
/// `sqrt(rate_on^2 + rate_off^2)`.
pub fn rate_percentile_radius(table: &RateTable, p: f64) -> Result<f64, StatsError> {
    if !(p > 0.0 && p < 100.0) {
        return Err(StatsError::BadPercentile(p));
    }
    if table.rows.is_empty() {
        return Err(StatsError::EmptyTable);
    }
    let mut mags: Vec<f64> = table.rows.iter().map(PixelRate::magnitude).collect();
    mags.sort_unstable_by(f64::total_cmp);
    let rank = (p / 100.0 * mags.len() as f64).ceil() as usize;
    Ok(mags[rank.clamp(1, mags.len()) - 1])
}
