use crate::error::{Error, Result};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use std::path::Path;

/// One rating event. Round 0 is the initial rating; re-ratings count up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingRecord {
    pub composition_id: String,
    pub rating: u8,
    pub round: u32,
    pub timestamp: DateTime<Utc>,
    pub rater_id: String,
}

impl RatingRecord {
    pub fn validate(&self) -> Result<()> {
        if !(1..=5).contains(&self.rating) {
            return Err(Error::Config(format!("rating {} outside 1..=5", self.rating)));
        }
        if self.composition_id.is_empty() || self.rater_id.is_empty() {
            return Err(Error::Config("composition_id and rater_id must be non-empty".into()));
        }
        Ok(())
    }

    pub fn key(&self) -> (&str, &str, u32) {
        (&self.composition_id, &self.rater_id, self.round)
    }
}

/// Reads one record per non-blank line. Parse errors carry the line number.
pub fn read_jsonl(path: &Path) -> Result<Vec<RatingRecord>> {
    let f = match std::fs::File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(Error::io(path, e)),
    };
    let mut out = Vec::new();
    for (i, line) in std::io::BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: RatingRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: i + 1,
            column: e.column(),
            message: e.to_string(),
        })?;
        rec.validate().map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: i + 1,
            column: 1,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn write_jsonl(path: &Path, records: &[RatingRecord]) -> Result<()> {
    let mut buf = Vec::new();
    for r in records {
        serde_json::to_writer(&mut buf, r).expect("record serializes");
        buf.push(b'\n');
    }
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Appends one line with a single write call and fsyncs. Callers serialize
/// appends (the service holds a mutex around this).
pub fn append_jsonl(path: &Path, record: &RatingRecord) -> Result<()> {
    let mut line = serde_json::to_vec(record).expect("record serializes");
    line.push(b'\n');
    let mut f = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    f.write_all(&line).map_err(|e| Error::io(path, e))?;
    f.sync_data().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
pub(crate) fn rec(id: &str, rating: u8, round: u32) -> RatingRecord {
    RatingRecord {
        composition_id: id.into(),
        rating,
        round,
        timestamp: DateTime::from_timestamp(1_700_000_000 + round as i64, 0).unwrap(),
        rater_id: "r1".into(),
    }
}
