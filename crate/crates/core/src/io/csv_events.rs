use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{EventIoError, FormatError};
use crate::event::{DvsEvent, Polarity};

const HEADER: [&str; 4] = ["t_us", "x", "y", "polarity"];

pub fn write_events_csv(events: &[DvsEvent], path: &Path) -> Result<(), EventIoError> {
    let file = File::create(path).map_err(|e| EventIoError::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let to_io = |e: csv::Error| EventIoError::io(path, e.into());
    w.write_record(HEADER).map_err(to_io)?;
    for ev in events {
        w.write_record(&[
            ev.t_us.to_string(),
            ev.x.to_string(),
            ev.y.to_string(),
            ev.polarity.as_bit().to_string(),
        ])
        .map_err(to_io)?;
    }
    w.into_inner()
        .map_err(|e| EventIoError::io(path, e.into_error()))?
        .flush()
        .map_err(|e| EventIoError::io(path, e))
}

pub fn read_events_csv(path: &Path) -> Result<Vec<DvsEvent>, EventIoError> {
    let file = File::open(path).map_err(|e| EventIoError::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let bad = |line: u64, message: String| EventIoError::format(path, FormatError::BadCsv { line, message });
    let header = r.headers().map_err(|e| bad(1, e.to_string()))?;
    if header.iter().ne(HEADER) {
        return Err(bad(1, format!("expected header {}", HEADER.join(","))));
    }
    let mut events = Vec::new();
    for (i, record) in r.records().enumerate() {
        let line = i as u64 + 2;
        let record = record.map_err(|e| bad(line, e.to_string()))?;
        if record.len() != 4 {
            return Err(bad(line, format!("expected 4 fields, got {}", record.len())));
        }
        let field = |k: usize| record[k].trim();
        let t_us = field(0).parse().map_err(|e| bad(line, format!("t_us: {e}")))?;
        let x = field(1).parse().map_err(|e| bad(line, format!("x: {e}")))?;
        let y = field(2).parse().map_err(|e| bad(line, format!("y: {e}")))?;
        let polarity = field(3)
            .parse::<u8>()
            .ok()
            .and_then(Polarity::from_bit)
            .ok_or_else(|| bad(line, format!("polarity must be 1 or 0, got `{}`", field(3))))?;
        events.push(DvsEvent::new(t_us, x, y, polarity));
    }
    Ok(events)
}
