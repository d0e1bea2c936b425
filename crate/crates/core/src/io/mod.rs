//! Event file formats.
//!
//! The binary format is a 28-byte little-endian header followed by fixed
//! 13-byte records:
//!
//! ```text
//! header: magic "DVSNOISE" (8) | version u32 | width u32 | height u32 | count u64
//! record: t_us u64 | x u16 | y u16 | polarity u8 (1 = ON, 0 = OFF)
//! ```
//!
//! The CSV format has the header `t_us,x,y,polarity` with polarity `1`/`0`.

mod binary;
mod csv_events;

use std::path::PathBuf;

use thiserror::Error;

pub use binary::{
    decode_events, encode_events, read_events_binary, write_events_binary, EventFileHeader,
    FORMAT_VERSION, HEADER_LEN, MAGIC, RECORD_LEN,
};
pub use csv_events::{read_events_csv, write_events_csv};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad magic bytes {0:02x?}")]
    BadMagic([u8; 8]),
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),
    #[error("truncated file: expected {expected} bytes, found {found}")]
    Truncated { expected: u64, found: u64 },
    #[error("{extra} unexpected bytes after the last record")]
    TrailingData { extra: u64 },
    #[error("invalid polarity byte {value} in record {index}")]
    InvalidPolarity { index: u64, value: u8 },
    #[error("event {index} at ({x}, {y}) outside {width}x{height} sensor")]
    OutOfBounds {
        index: u64,
        x: u16,
        y: u16,
        width: u32,
        height: u32,
    },
    #[error("header declares {declared} events but {actual} were given")]
    CountMismatch { declared: u64, actual: u64 },
    #[error("events not in timestamp order at index {index}")]
    Unsorted { index: u64 },
    #[error("line {line}: {message}")]
    BadCsv { line: u64, message: String },
}

#[derive(Debug, Error)]
pub enum EventIoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Format {
        path: PathBuf,
        #[source]
        source: FormatError,
    },
}

impl EventIoError {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        EventIoError::Io {
            path: path.to_owned(),
            source,
        }
    }

    pub(crate) fn format(path: &std::path::Path, source: FormatError) -> Self {
        EventIoError::Format {
            path: path.to_owned(),
            source,
        }
    }
}
