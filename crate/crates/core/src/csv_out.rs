//! Plain numeric CSV output.

use std::io::Write;
use std::path::Path;

use crate::error::{domain, Error, Result};

/// Significant digits written by default.
pub const DEFAULT_PRECISION: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        self.rows.push(row);
    }

    /// Writes the header and rows with `precision` significant digits.
    pub fn write<W: Write>(&self, out: W, precision: usize) -> Result<()> {
        if self.rows.is_empty() {
            return domain("refusing to write a table without rows");
        }
        if precision == 0 {
            return domain("precision must be at least one digit");
        }
        if let Some(r) = self.rows.iter().find(|r| r.len() != self.header.len()) {
            return domain(format!("row width {} does not match header width {}", r.len(), self.header.len()));
        }
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format_number(*v, precision)))
                .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Scientific notation with `precision` significant digits.
pub fn format_number(v: f64, precision: usize) -> String {
    format!("{:.*e}", precision - 1, v)
}

/// Writes `table` to `path`, or to standard output when `path` is `None`.
pub fn emit_csv(table: &CsvTable, path: Option<&Path>, precision: usize) -> Result<()> {
    match path {
        Some(p) => {
            let file = std::fs::File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            table.write(std::io::BufWriter::new(file), precision)
        }
        None => table.write(std::io::stdout().lock(), precision),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(t: &CsvTable) -> String {
        let mut buf = Vec::new();
        t.write(&mut buf, DEFAULT_PRECISION).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn one_row_two_lines() {
        let mut t = CsvTable::new(&["theta", "waste"]);
        t.push(vec![0.5, 0.5]);
        let s = render(&t);
        assert_eq!(s, "theta,waste\n5.00000000000e-1,5.00000000000e-1\n");
    }

    #[test]
    fn round_trip_precision() {
        let mut t = CsvTable::new(&["x"]);
        let xs = [1.0 / 3.0, std::f64::consts::PI * 1e-7, 123456.789012345, 1e-300];
        for x in xs {
            t.push(vec![x]);
        }
        let s = render(&t);
        for (line, x) in s.lines().skip(1).zip(xs) {
            let back: f64 = line.parse().unwrap();
            assert!(((back - x) / x).abs() <= 1e-11);
        }
    }

    #[test]
    fn rejects_ragged_and_empty() {
        let mut t = CsvTable::new(&["a", "b"]);
        assert!(t.write(Vec::new(), 12).is_err());
        t.push(vec![1.0]);
        assert!(t.write(Vec::new(), 12).is_err());
    }

    #[test]
    fn unwritable_path() {
        let mut t = CsvTable::new(&["a"]);
        t.push(vec![1.0]);
        let r = emit_csv(&t, Some(Path::new("/nonexistent-dir/x.csv")), 12);
        assert!(matches!(r, Err(Error::Io(_))));
    }
}
