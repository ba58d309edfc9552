//! Plain-text output helpers. Every number leaves the crate through
//! [`num`], which keeps 17 significant digits so files round-trip exactly.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Builds a CSV table with `\n` line endings.
pub struct CsvTable {
    text: String,
    columns: usize,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self {
            text,
            columns: header.len(),
        }
    }

    pub fn row(&mut self, values: &[f64]) {
        debug_assert_eq!(values.len(), self.columns);
        let mut first = true;
        for &v in values {
            if !first {
                self.text.push(',');
            }
            first = false;
            let _ = write!(self.text, "{}", num(v));
        }
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn into_string(self) -> String {
        self.text
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, &self.text)?;
        Ok(())
    }
}

/// Parses a CSV produced by [`CsvTable`]; returns the header and rows.
pub fn read_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines
        .next()
        .map(|h| h.split(',').map(str::to_owned).collect())
        .unwrap_or_default();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(|v| v.parse().unwrap_or(f64::NAN)).collect())
        .collect();
    (header, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::f64::consts::PI] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn table_layout() {
        let mut t = CsvTable::new(&["a", "b"]);
        t.row(&[1.0, 2.0]);
        assert_eq!(t.as_str(), "a,b\n1.0000000000000000e0,2.0000000000000000e0\n");
        let (h, rows) = read_csv(t.as_str());
        assert_eq!(h, vec!["a", "b"]);
        assert_eq!(rows, vec![vec![1.0, 2.0]]);
    }
}
