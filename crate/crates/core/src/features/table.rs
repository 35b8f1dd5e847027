//! Feature CSV: a `# layout: <version>` comment line, a header row
//! (`id` followed by column names) and one row per composition.

use crate::error::{Error, Result};
use std::io::{BufRead, Write};
use std::path::Path;

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureTable {
    pub layout_version: String,
    pub names: Vec<String>,
    pub ids: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl FeatureTable {
    pub fn new(layout_version: impl Into<String>, names: Vec<String>) -> Self {
        FeatureTable {
            layout_version: layout_version.into(),
            names,
            ids: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, id: impl Into<String>, row: Vec<f64>) -> Result<()> {
        if row.len() != self.names.len() {
            return Err(Error::Dimension(format!(
                "row has {} values, table has {} columns",
                row.len(),
                self.names.len()
            )));
        }
        self.ids.push(id.into());
        self.rows.push(row);
        Ok(())
    }

    /// Column indices whose names start with `prefix`.
    pub fn columns_with_prefix(&self, prefix: &str) -> Vec<usize> {
        self.names
            .iter()
            .enumerate()
            .filter(|(_, n)| n.starts_with(prefix))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# layout: {}", self.layout_version).map_err(|e| Error::io("<csv>", e))?;
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["id".to_string()];
        header.extend(self.names.iter().cloned());
        w.write_record(&header)?;
        for (id, row) in self.ids.iter().zip(&self.rows) {
            let mut rec = vec![id.clone()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write(std::io::BufWriter::new(f))
    }

    pub fn read<R: BufRead>(mut input: R, origin: &str) -> Result<Self> {
        let mut first = String::new();
        input
            .read_line(&mut first)
            .map_err(|e| Error::io(origin, e))?;
        let layout_version = first
            .trim_end()
            .strip_prefix("# layout: ")
            .ok_or_else(|| Error::Parse {
                path: origin.to_string(),
                line: 1,
                column: 1,
                message: "missing `# layout:` line".into(),
            })?
            .to_string();
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers()?.clone();
        let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut table = FeatureTable::new(layout_version, names);
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let mut row = Vec::with_capacity(rec.len().saturating_sub(1));
            for (j, field) in rec.iter().enumerate().skip(1) {
                row.push(field.parse::<f64>().map_err(|e| Error::Parse {
                    path: origin.to_string(),
                    line: i + 3,
                    column: j + 1,
                    message: format!("{field:?}: {e}"),
                })?);
            }
            table.push(rec.get(0).unwrap_or_default().to_string(), row)?;
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(std::io::BufReader::new(f), &path.display().to_string())
    }
}
