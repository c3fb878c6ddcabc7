//! Dense real operator matrices on a labelled basis.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::charfun::CharFn;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub entries: DMatrix<f64>,
    /// Description of the ordered basis, e.g. `fock |0>..|3>`.
    pub basis_label: String,
    /// One label per basis state (rows and columns share the basis).
    pub states: Vec<String>,
}

impl OperatorMatrix {
    pub fn new(entries: DMatrix<f64>, basis_label: impl Into<String>, states: Vec<String>) -> Self {
        debug_assert_eq!(entries.nrows(), states.len());
        debug_assert_eq!(entries.ncols(), states.len());
        Self {
            entries,
            basis_label: basis_label.into(),
            states,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[(row, col)]
    }

    pub fn transpose(&self) -> Self {
        Self {
            entries: self.entries.transpose(),
            basis_label: self.basis_label.clone(),
            states: self.states.clone(),
        }
    }

    pub fn with_entries(&self, entries: DMatrix<f64>) -> Self {
        Self {
            entries,
            basis_label: self.basis_label.clone(),
            states: self.states.clone(),
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.entries.diagonal().iter().copied().collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    /// RFC 4180 CSV with LF line endings: a header row of column state
    /// labels, then one row per state starting with its label.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Csv(e.to_string());
        let mut header = vec![self.basis_label.clone()];
        header.extend(self.states.iter().cloned());
        w.write_record(&header).map_err(csv_err)?;
        for (i, row) in self.entries.row_iter().enumerate() {
            let mut rec = vec![self.states[i].clone()];
            rec.extend(row.iter().map(|&x| format_float(x)));
            w.write_record(&rec).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Csv(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Csv(e.to_string()))
    }
}

/// Shortest round-trip decimal representation.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

/// `sum a_i M^i` for a square matrix, by Horner's scheme.
pub fn poly_of_matrix(f: &CharFn, m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut acc = DMatrix::<f64>::zeros(n, n);
    for &a in f.coefficients().iter().rev() {
        acc = &acc * m;
        for i in 0..n {
            acc[(i, i)] += a;
        }
    }
    acc
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Largest absolute entry of `m` restricted to columns `0..cols`.
pub fn max_abs_columns(m: &DMatrix<f64>, cols: usize) -> f64 {
    m.columns(0, cols.min(m.ncols()))
        .iter()
        .fold(0.0, |acc, x| acc.max(x.abs()))
}

/// JSON form of a matrix: row-major nested arrays plus labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub basis_label: String,
    pub states: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl From<&OperatorMatrix> for MatrixDocument {
    fn from(m: &OperatorMatrix) -> Self {
        Self {
            basis_label: m.basis_label.clone(),
            states: m.states.clone(),
            rows: m.rows(),
        }
    }
}
