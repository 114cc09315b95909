//! Daily index levels from CSV.
//!
//! Files must already be cleaned of splices and adjustments; only the
//! date and close columns are read.

use std::io::Read;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error("column `{0}` not found in header")]
    MissingColumn(String),

    #[error("row {row}: cannot parse date `{value}` (expected YYYY-MM-DD)")]
    UnparseableDate { row: usize, value: String },

    #[error("row {row}: date {date} does not follow {previous}")]
    NonMonotonicDates { row: usize, previous: NaiveDate, date: NaiveDate },

    #[error("only {len} usable rows, need at least {min}")]
    TooShort { len: usize, min: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexDataset {
    pub name: String,
    pub dates: Vec<NaiveDate>,
    pub closes: Vec<f64>,
    /// Rows dropped for a missing, unparseable or non-positive close.
    pub dropped: usize,
}

impl IndexDataset {
    pub fn len(&self) -> usize {
        self.closes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closes.is_empty()
    }
}

pub fn ingest_csv(path: &Path, date_col: &str, close_col: &str) -> Result<IndexDataset, IngestError> {
    let file = std::fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_dataset(file, name, date_col, close_col)
}

pub fn read_dataset<R: Read>(
    reader: R,
    name: String,
    date_col: &str,
    close_col: &str,
) -> Result<IndexDataset, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
    };
    let date_idx = column(date_col)?;
    let close_idx = column(close_col)?;

    let mut out = IndexDataset {
        name,
        dates: Vec::new(),
        closes: Vec::new(),
        dropped: 0,
    };
    let mut previous: Option<NaiveDate> = None;
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        // header is line 1
        let row = i + 2;
        let raw_date = record.get(date_idx).unwrap_or("");
        let date = NaiveDate::parse_from_str(raw_date, "%Y-%m-%d").map_err(|_| {
            IngestError::UnparseableDate {
                row,
                value: raw_date.to_string(),
            }
        })?;
        if let Some(prev) = previous {
            if date <= prev {
                return Err(IngestError::NonMonotonicDates {
                    row,
                    previous: prev,
                    date,
                });
            }
        }
        previous = Some(date);
        match record.get(close_idx).and_then(|v| v.parse::<f64>().ok()) {
            Some(close) if close > 0.0 && close.is_finite() => {
                out.dates.push(date);
                out.closes.push(close);
            }
            _ => out.dropped += 1,
        }
    }
    if out.dropped > 0 {
        log::warn!("{}: dropped {} rows without a positive close", out.name, out.dropped);
    }
    if out.len() < 2 {
        return Err(IngestError::TooShort { len: out.len(), min: 2 });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str) -> Result<IndexDataset, IngestError> {
        read_dataset(text.as_bytes(), "t".into(), "Date", "Close")
    }

    #[test]
    fn well_formed_rows() {
        let d = read("Date,Open,Close\n2020-01-02,1,10.5\n2020-01-03,1,11\n2020-01-06,1,10.75\n").unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.closes, vec![10.5, 11.0, 10.75]);
        assert_eq!(d.dropped, 0);
    }

    #[test]
    fn negative_and_missing_closes_are_dropped() {
        let d = read("Date,Close\n2020-01-02,10\n2020-01-03,-4\n2020-01-06,12\n").unwrap();
        assert_eq!((d.len(), d.dropped), (2, 1));
        let d = read("Date,Close\n2020-01-02,10\n2020-01-03,\n2020-01-06,12\n2020-01-07,null\n").unwrap();
        assert_eq!((d.len(), d.dropped), (2, 2));
    }

    #[test]
    fn shuffled_dates_are_rejected() {
        let err = read("Date,Close\n2020-01-03,10\n2020-01-02,11\n2020-01-06,12\n").unwrap_err();
        assert!(matches!(err, IngestError::NonMonotonicDates { row: 3, .. }));
        let dup = read("Date,Close\n2020-01-03,10\n2020-01-03,11\n").unwrap_err();
        assert!(matches!(dup, IngestError::NonMonotonicDates { .. }));
    }

    #[test]
    fn header_and_date_errors() {
        assert!(matches!(read("When,Close\n2020-01-02,1\n"), Err(IngestError::MissingColumn(c)) if c == "Date"));
        assert!(matches!(read("Date,Last\n2020-01-02,1\n"), Err(IngestError::MissingColumn(c)) if c == "Close"));
        assert!(matches!(
            read("Date,Close\n02/01/2020,1\n"),
            Err(IngestError::UnparseableDate { row: 2, .. })
        ));
        assert!(matches!(read("Date,Close\n2020-01-02,1\n"), Err(IngestError::TooShort { len: 1, .. })));
    }
}
