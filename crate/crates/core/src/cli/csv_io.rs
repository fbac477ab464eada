use std::fs::File;
use std::path::Path;

use crate::data::{LabeledDataset, Task};
use crate::error::{Error, Result};

/// Which CSV column holds the label.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum LabelColumn {
    #[default]
    Last,
    Name(String),
    Index(usize),
}

impl LabelColumn {
    /// A header name, or a 0-based position when the text is an integer.
    pub fn parse(s: &str) -> Self {
        match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        }
    }

    fn position(&self, headers: &csv::StringRecord) -> Result<usize> {
        let missing = |msg: String| Error::CsvParse { row: 0, col: 0, msg };
        match self {
            LabelColumn::Last if headers.is_empty() => Err(missing("header row is empty".into())),
            LabelColumn::Last => Ok(headers.len() - 1),
            LabelColumn::Index(i) if *i < headers.len() => Ok(*i),
            LabelColumn::Index(i) => Err(missing(format!("label column {i} out of range ({} columns)", headers.len()))),
            LabelColumn::Name(n) => headers
                .iter()
                .position(|h| h.trim() == n)
                .ok_or_else(|| missing(format!("no column named {n:?}"))),
        }
    }
}

/// Reads a numeric CSV with a header row into a dataset.
///
/// Every column except the label column is a feature. Errors name the
/// 1-based data row and column of the offending cell.
pub fn load_csv(path: &Path, label: &LabelColumn, task: Task) -> Result<LabeledDataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, label, task)
}

pub fn read_csv<R: std::io::Read>(reader: R, label: &LabelColumn, task: Task) -> Result<LabeledDataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::CsvParse { row: 0, col: 0, msg: e.to_string() })?
        .clone();
    let label_pos = label.position(&headers)?;
    let dim = headers.len() - 1;

    let (mut coords, mut labels) = (Vec::new(), Vec::new());
    for (r, record) in rdr.records().enumerate() {
        let row = r + 1;
        let record = record.map_err(|e| Error::CsvParse { row, col: 0, msg: e.to_string() })?;
        for (c, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::CsvParse {
                row,
                col: c + 1,
                msg: format!("{cell:?} is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::CsvParse { row, col: c + 1, msg: format!("{cell:?} is not finite") });
            }
            if c == label_pos {
                if task == Task::Classification && v != 0.0 && v != 1.0 {
                    return Err(Error::NonBinaryLabel { row, value: v });
                }
                labels.push(v);
            } else {
                coords.push(v);
            }
        }
    }
    if labels.is_empty() {
        return Err(Error::EmptyDataset);
    }
    LabeledDataset::from_flat(dim, coords, labels, task)
}
