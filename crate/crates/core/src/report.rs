use serde::{Deserialize, Serialize};

/// Which columns of a residual matrix are inspected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coverage {
    /// Every entry.
    All,
    /// Columns `0..dim-1`: the last basis state is excluded because a
    /// truncated raising operator maps it out of the space.
    Interior,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub relation: String,
    pub max_abs: f64,
    pub passed: bool,
}

/// Maximum residual per checked relation. A failing report is data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub tol: f64,
    pub coverage: Coverage,
    pub residuals: Vec<Residual>,
    pub passed: bool,
}

impl ResidualReport {
    pub fn new(tol: f64, coverage: Coverage) -> Self {
        Self {
            tol,
            coverage,
            residuals: Vec::new(),
            passed: true,
        }
    }

    pub fn push(&mut self, relation: impl Into<String>, max_abs: f64) {
        // NaN never passes.
        let passed = max_abs <= self.tol;
        self.passed &= passed;
        self.residuals.push(Residual {
            relation: relation.into(),
            max_abs,
            passed,
        });
    }

    pub fn get(&self, relation: &str) -> Option<f64> {
        self.residuals
            .iter()
            .find(|r| r.relation == relation)
            .map(|r| r.max_abs)
    }

    pub fn worst(&self) -> f64 {
        self.residuals.iter().fold(0.0, |acc, r| acc.max(r.max_abs))
    }
}
