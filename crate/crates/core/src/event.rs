use std::cmp::Ordering;
use std::fmt;

/// Polarity of a brightness-change event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    On,
    Off,
}

impl Polarity {
    /// Row/column index used by transition matrices: ON = 0, OFF = 1.
    pub const fn index(self) -> usize {
        match self {
            Polarity::On => 0,
            Polarity::Off => 1,
        }
    }

    pub const fn from_index(i: usize) -> Polarity {
        if i == 0 {
            Polarity::On
        } else {
            Polarity::Off
        }
    }

    /// Wire value shared by the binary and CSV formats (1 = ON, 0 = OFF).
    pub const fn as_bit(self) -> u8 {
        match self {
            Polarity::On => 1,
            Polarity::Off => 0,
        }
    }

    pub const fn from_bit(bit: u8) -> Option<Polarity> {
        match bit {
            1 => Some(Polarity::On),
            0 => Some(Polarity::Off),
            _ => None,
        }
    }

    pub const fn opposite(self) -> Polarity {
        match self {
            Polarity::On => Polarity::Off,
            Polarity::Off => Polarity::On,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::On => "ON",
            Polarity::Off => "OFF",
        })
    }
}

/// A single DVS event: timestamp in microseconds, pixel address, polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DvsEvent {
    pub t_us: u64,
    pub x: u16,
    pub y: u16,
    pub polarity: Polarity,
}

impl DvsEvent {
    pub const fn new(t_us: u64, x: u16, y: u16, polarity: Polarity) -> Self {
        Self {
            t_us,
            x,
            y,
            polarity,
        }
    }

    /// Canonical stream order: (t, y, x, polarity) with ON before OFF.
    pub fn stream_cmp(&self, other: &Self) -> Ordering {
        (self.t_us, self.y, self.x, self.polarity.index()).cmp(&(
            other.t_us,
            other.y,
            other.x,
            other.polarity.index(),
        ))
    }
}

/// Sorts events into canonical stream order.
pub fn sort_stream(events: &mut [DvsEvent]) {
    events.sort_unstable_by(DvsEvent::stream_cmp);
}

/// Converts an internal time in seconds to an exported microsecond timestamp.
///
/// Times are floored; a tolerance of 1e-6 µs absorbs the representation
/// error of `k * dt` so that grid-aligned times do not drop a microsecond.
pub fn seconds_to_us(t: f64) -> u64 {
    (t * 1e6 + 1e-6).floor() as u64
}
