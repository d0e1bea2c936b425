use std::path::Path;

use super::{EventIoError, FormatError};
use crate::event::{DvsEvent, Polarity};

pub const MAGIC: [u8; 8] = *b"DVSNOISE";
pub const FORMAT_VERSION: u32 = 1;
pub const HEADER_LEN: usize = 28;
pub const RECORD_LEN: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventFileHeader {
    pub version: u32,
    pub width: u32,
    pub height: u32,
    pub event_count: u64,
}

impl EventFileHeader {
    pub fn new(width: u32, height: u32, event_count: u64) -> Self {
        Self {
            version: FORMAT_VERSION,
            width,
            height,
            event_count,
        }
    }

    fn to_bytes(self) -> [u8; HEADER_LEN] {
        let mut b = [0u8; HEADER_LEN];
        b[..8].copy_from_slice(&MAGIC);
        b[8..12].copy_from_slice(&self.version.to_le_bytes());
        b[12..16].copy_from_slice(&self.width.to_le_bytes());
        b[16..20].copy_from_slice(&self.height.to_le_bytes());
        b[20..28].copy_from_slice(&self.event_count.to_le_bytes());
        b
    }

    fn parse(bytes: &[u8]) -> Result<Self, FormatError> {
        if bytes.len() < HEADER_LEN {
            return Err(FormatError::Truncated {
                expected: HEADER_LEN as u64,
                found: bytes.len() as u64,
            });
        }
        let magic: [u8; 8] = bytes[..8].try_into().unwrap();
        if magic != MAGIC {
            return Err(FormatError::BadMagic(magic));
        }
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        let version = u32_at(8);
        if version != FORMAT_VERSION {
            return Err(FormatError::UnsupportedVersion(version));
        }
        Ok(Self {
            version,
            width: u32_at(12),
            height: u32_at(16),
            event_count: u64::from_le_bytes(bytes[20..28].try_into().unwrap()),
        })
    }
}

fn check_event(
    index: usize,
    ev: &DvsEvent,
    prev_t: u64,
    header: &EventFileHeader,
) -> Result<(), FormatError> {
    let index = index as u64;
    if ev.t_us < prev_t {
        return Err(FormatError::Unsorted { index });
    }
    if ev.x as u32 >= header.width || ev.y as u32 >= header.height {
        return Err(FormatError::OutOfBounds {
            index,
            x: ev.x,
            y: ev.y,
            width: header.width,
            height: header.height,
        });
    }
    Ok(())
}

/// Serializes a header plus records.
pub fn encode_events(header: &EventFileHeader, events: &[DvsEvent]) -> Result<Vec<u8>, FormatError> {
    if header.version != FORMAT_VERSION {
        return Err(FormatError::UnsupportedVersion(header.version));
    }
    if header.event_count != events.len() as u64 {
        return Err(FormatError::CountMismatch {
            declared: header.event_count,
            actual: events.len() as u64,
        });
    }
    let mut out = Vec::with_capacity(HEADER_LEN + RECORD_LEN * events.len());
    out.extend_from_slice(&header.to_bytes());
    let mut prev_t = 0;
    for (i, ev) in events.iter().enumerate() {
        check_event(i, ev, prev_t, header)?;
        prev_t = ev.t_us;
        out.extend_from_slice(&ev.t_us.to_le_bytes());
        out.extend_from_slice(&ev.x.to_le_bytes());
        out.extend_from_slice(&ev.y.to_le_bytes());
        out.push(ev.polarity.as_bit());
    }
    Ok(out)
}

pub fn decode_events(bytes: &[u8]) -> Result<(EventFileHeader, Vec<DvsEvent>), FormatError> {
    let header = EventFileHeader::parse(bytes)?;
    let body = (bytes.len() - HEADER_LEN) as u64;
    let expected = header
        .event_count
        .checked_mul(RECORD_LEN as u64)
        .unwrap_or(u64::MAX);
    if body < expected {
        return Err(FormatError::Truncated {
            expected: expected.saturating_add(HEADER_LEN as u64),
            found: bytes.len() as u64,
        });
    }
    if body > expected {
        return Err(FormatError::TrailingData {
            extra: body - expected,
        });
    }
    let mut events = Vec::with_capacity(header.event_count as usize);
    let mut prev_t = 0;
    for (i, rec) in bytes[HEADER_LEN..].chunks_exact(RECORD_LEN).enumerate() {
        let polarity = Polarity::from_bit(rec[12]).ok_or(FormatError::InvalidPolarity {
            index: i as u64,
            value: rec[12],
        })?;
        let ev = DvsEvent {
            t_us: u64::from_le_bytes(rec[..8].try_into().unwrap()),
            x: u16::from_le_bytes([rec[8], rec[9]]),
            y: u16::from_le_bytes([rec[10], rec[11]]),
            polarity,
        };
        check_event(i, &ev, prev_t, &header)?;
        prev_t = ev.t_us;
        events.push(ev);
    }
    Ok((header, events))
}

pub fn write_events_binary(
    events: &[DvsEvent],
    header: &EventFileHeader,
    path: &Path,
) -> Result<(), EventIoError> {
    let bytes = encode_events(header, events).map_err(|e| EventIoError::format(path, e))?;
    std::fs::write(path, bytes).map_err(|e| EventIoError::io(path, e))
}

pub fn read_events_binary(path: &Path) -> Result<(EventFileHeader, Vec<DvsEvent>), EventIoError> {
    let bytes = std::fs::read(path).map_err(|e| EventIoError::io(path, e))?;
    decode_events(&bytes).map_err(|e| EventIoError::format(path, e))
}
