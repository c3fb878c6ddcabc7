//! Fock-space representation of a generalized Heisenberg algebra.
//!
//! Starting from a vacuum with `H|0> = alpha0 |0>`, the eigenvalue of `|m>`
//! is the `m`-th iterate `f^(m)(alpha0)` and
//!
//! ```text
//! A+|m> = M_m |m+1>,    A|m> = M_{m-1} |m-1>,    M_{m-1}^2 = f^(m)(alpha0) - alpha0.
//! ```
//!
//! All matrices are truncated to `dim` states. The raising operator maps the
//! top state out of the space, so relations involving `A A+` only hold on the
//! interior columns.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::charfun::{CharFn, Orientation};
use crate::error::{Error, Result};
use crate::matrix::{max_abs, max_abs_columns, poly_of_matrix, OperatorMatrix};
use crate::report::{Coverage, ResidualReport};

/// Norm squares in `[-NORM_FLOOR, 0)` are clamped to zero.
pub const NORM_FLOOR: f64 = 1e-12;
const FIXED_POINT_VACUUM_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGhaRep")]
pub struct GhaRep {
    #[serde(rename = "fn")]
    f: CharFn,
    alpha0: f64,
    dim: usize,
    eigenvalues: Vec<f64>,
    ladder: Vec<f64>,
}

#[derive(Deserialize)]
struct RawGhaRep {
    #[serde(rename = "fn")]
    f: CharFn,
    alpha0: f64,
    dim: usize,
    eigenvalues: Vec<f64>,
    ladder: Vec<f64>,
}

// Deserialization only checks shapes so that stored (possibly edited)
// representations can still be fed to the verifiers.
impl TryFrom<RawGhaRep> for GhaRep {
    type Error = Error;

    fn try_from(raw: RawGhaRep) -> Result<Self> {
        if raw.dim == 0 || raw.eigenvalues.len() != raw.dim || raw.ladder.len() != raw.dim - 1 {
            return Err(Error::InvalidData(format!(
                "dim {} with {} eigenvalues and {} ladder entries",
                raw.dim,
                raw.eigenvalues.len(),
                raw.ladder.len()
            )));
        }
        Ok(Self {
            f: raw.f,
            alpha0: raw.alpha0,
            dim: raw.dim,
            eigenvalues: raw.eigenvalues,
            ladder: raw.ladder,
        })
    }
}

pub fn build_gha(f: &CharFn, alpha0: f64, dim: usize) -> Result<GhaRep> {
    if dim == 0 {
        return Err(Error::InvalidDimension { min: 1, got: dim });
    }
    f.require_orientation(Orientation::OscillatorLike)?;
    if !f.in_invertible_region(alpha0) {
        return Err(Error::InvalidVacuum(alpha0));
    }
    let mut eigenvalues = Vec::with_capacity(dim);
    eigenvalues.push(alpha0);
    for m in 1..dim {
        let next = f.evaluate(eigenvalues[m - 1]);
        if !next.is_finite() {
            return Err(Error::NonFinite(m));
        }
        eigenvalues.push(next);
    }
    let ladder = eigenvalues[1..]
        .iter()
        .enumerate()
        .map(|(m, &e)| {
            let sq = e - alpha0;
            if sq < -NORM_FLOOR {
                Err(Error::NegativeNormSquared { m, value: sq })
            } else {
                Ok(sq.max(0.0).sqrt())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GhaRep {
        f: f.clone(),
        alpha0,
        dim,
        eigenvalues,
        ladder,
    })
}

impl GhaRep {
    pub fn char_fn(&self) -> &CharFn {
        &self.f
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `f^(m)(alpha0)` for `m = 0..dim`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `M_m` for `m = 0..dim-1`.
    pub fn ladder(&self) -> &[f64] {
        &self.ladder
    }

    fn states(&self) -> Vec<String> {
        (0..self.dim).map(|m| format!("|{m}>")).collect()
    }

    fn operator(&self, entries: DMatrix<f64>) -> OperatorMatrix {
        let label = format!("fock |0>..|{}>", self.dim - 1);
        OperatorMatrix::new(entries, label, self.states())
    }

    pub fn matrix_h(&self) -> OperatorMatrix {
        self.operator(DMatrix::from_diagonal(&DVector::from_column_slice(
            &self.eigenvalues,
        )))
    }

    pub fn matrix_adag(&self) -> OperatorMatrix {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (k, &l) in self.ladder.iter().enumerate() {
            m[(k + 1, k)] = l;
        }
        self.operator(m)
    }

    pub fn matrix_a(&self) -> OperatorMatrix {
        self.matrix_adag().transpose()
    }

    pub fn matrix_n(&self) -> OperatorMatrix {
        self.operator(DMatrix::from_fn(self.dim, self.dim, |i, j| {
            if i == j {
                i as f64
            } else {
                0.0
            }
        }))
    }

    /// `C = A+ A - H`, equal to `-alpha0` times the identity on every state.
    pub fn casimir(&self) -> OperatorMatrix {
        let adag = self.matrix_adag().entries;
        let a = adag.transpose();
        self.operator(&adag * &a - self.matrix_h().entries)
    }

    pub fn matrices(&self) -> GhaMatrices {
        GhaMatrices {
            h: self.matrix_h(),
            a: self.matrix_a(),
            adag: self.matrix_adag(),
        }
    }

    /// `(A+)^n |0>` divided by `M_0^n sqrt([n]_f!)`; the unit vector `|n>`
    /// when the representation is consistent.
    pub fn normalized_excitation(&self, n: usize) -> Result<DVector<f64>> {
        if n >= self.dim {
            return Err(Error::InvalidDimension {
                min: n + 1,
                got: self.dim,
            });
        }
        let adag = self.matrix_adag().entries;
        let mut v = DVector::zeros(self.dim);
        v[0] = 1.0;
        for _ in 0..n {
            v = &adag * v;
        }
        if n == 0 {
            return Ok(v);
        }
        let m0 = self.ladder[0];
        let norm = m0.powi(n as i32) * gauss_factorial(&self.f, self.alpha0, n)?.sqrt();
        Ok(v / norm)
    }
}

/// `[m]_f = (f^(m)(alpha0) - alpha0) / (f(alpha0) - alpha0)`.
pub fn gauss_number(f: &CharFn, alpha0: f64, m: usize) -> Result<f64> {
    let denom = f.evaluate(alpha0) - alpha0;
    if denom.abs() <= FIXED_POINT_VACUUM_TOL {
        return Err(Error::FixedPointVacuum);
    }
    let mut x = alpha0;
    for _ in 0..m {
        x = f.evaluate(x);
    }
    Ok((x - alpha0) / denom)
}

/// `[m]_f! = [m]_f [m-1]_f ... [1]_f`, with `[0]_f! = 1`.
pub fn gauss_factorial(f: &CharFn, alpha0: f64, m: usize) -> Result<f64> {
    (1..=m).try_fold(1.0, |acc, k| Ok(acc * gauss_number(f, alpha0, k)?))
}

/// The three generators of a (possibly edited) truncated representation.
#[derive(Debug, Clone, PartialEq)]
pub struct GhaMatrices {
    pub h: OperatorMatrix,
    pub a: OperatorMatrix,
    pub adag: OperatorMatrix,
}

/// Residuals of the defining relations on the interior columns, plus the
/// Casimir identities and adjoint structure.
pub fn verify_gha_relations(rep: &GhaRep, tol: f64) -> ResidualReport {
    verify_gha_matrices(&rep.matrices(), rep.char_fn(), rep.alpha0(), tol)
}

pub fn verify_gha_matrices(m: &GhaMatrices, f: &CharFn, alpha0: f64, tol: f64) -> ResidualReport {
    let h = &m.h.entries;
    let a = &m.a.entries;
    let adag = &m.adag.entries;
    let dim = h.nrows();
    let interior = dim.saturating_sub(1);
    let fh = poly_of_matrix(f, h);

    let mut report = ResidualReport::new(tol, Coverage::Interior);
    report.push(
        "H A+ - A+ f(H)",
        max_abs_columns(&(h * adag - adag * &fh), interior),
    );
    report.push(
        "A H - f(H) A",
        max_abs_columns(&(a * h - &fh * a), interior),
    );
    report.push(
        "[A, A+] - (f(H) - H)",
        max_abs_columns(&(a * adag - adag * a - (&fh - h)), interior),
    );
    let c1 = adag * a - h;
    let c2 = a * adag - &fh;
    report.push(
        "(A+ A - H) - (A A+ - f(H))",
        max_abs_columns(&(&c1 - c2), interior),
    );
    let identity = DMatrix::<f64>::identity(dim, dim);
    report.push("A+ A - H + alpha0", max_abs(&(c1 + identity * alpha0)));
    report.push("A - (A+)^T", max_abs(&(a - adag.transpose())));
    report.push("H - H^T", max_abs(&(h - h.transpose())));
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boson() -> CharFn {
        CharFn::oscillator(&[1.0, 1.0]).unwrap()
    }

    fn fig1() -> CharFn {
        CharFn::oscillator(&[1.225, -2.5, 2.5]).unwrap()
    }

    fn fig4() -> CharFn {
        CharFn::oscillator(&[1.0, 3.0, 1.0]).unwrap()
    }

    #[test]
    fn harmonic_oscillator() {
        let rep = build_gha(&boson(), 0.0, 4).unwrap();
        assert_eq!(rep.eigenvalues(), &[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(rep.ladder(), &[1.0, 2f64.sqrt(), 3f64.sqrt()]);
        let adag = build_gha(&boson(), 0.0, 3).unwrap().matrix_adag();
        assert_eq!(adag.get(1, 0), 1.0);
        assert_eq!(adag.get(2, 1), 2f64.sqrt());
        assert_eq!(adag.get(0, 1), 0.0);
    }

    #[test]
    fn fixed_point_vacuum_is_one_dimensional() {
        let rep = build_gha(&fig1(), 0.7, 3).unwrap();
        for &e in rep.eigenvalues() {
            assert!((e - 0.7).abs() < 1e-15);
        }
        assert!(rep.ladder().iter().all(|&l| l < 1e-7));
    }

    #[test]
    fn fig4_vacuum() {
        let rep = build_gha(&fig4(), -0.15, 2).unwrap();
        assert_eq!(rep.eigenvalues()[0], -0.15);
        assert!((rep.eigenvalues()[1] - 0.5725).abs() < 1e-15);
        assert!((rep.ladder()[0] - 0.85).abs() < 1e-15);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            build_gha(&fig1(), 0.4, 3),
            Err(Error::InvalidVacuum(_))
        ));
        assert!(matches!(
            build_gha(&boson(), 0.0, 0),
            Err(Error::InvalidDimension { .. })
        ));
        // f(x) = 0.5 x + 1 with alpha0 = 3: eigenvalues decrease
        let f = CharFn::oscillator(&[1.0, 0.5]).unwrap();
        assert!(matches!(
            build_gha(&f, 3.0, 3),
            Err(Error::NegativeNormSquared { m: 0, .. })
        ));
        let g = CharFn::weight(&[-1.0, 1.0]).unwrap();
        assert!(matches!(
            build_gha(&g, 0.0, 3),
            Err(Error::WrongOrientation { .. })
        ));
    }

    #[test]
    fn h_and_a_matrices() {
        let rep = build_gha(&fig1(), 0.56, 2).unwrap();
        let h = rep.matrix_h();
        assert_eq!(h.get(0, 0), 0.56);
        assert!((h.get(1, 1) - 0.609).abs() < 1e-15);
        assert_eq!(
            rep.matrix_a().entries,
            rep.matrix_adag().entries.transpose()
        );
        assert_eq!(rep.matrix_n().diagonal(), vec![0.0, 1.0]);
        // A annihilates the vacuum
        assert!(rep.matrix_a().entries.column(0).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn casimir_examples() {
        let c = build_gha(&boson(), 0.0, 5).unwrap().casimir();
        assert!(max_abs(&c.entries) < 1e-15);
        for (f, alpha0) in [(fig4(), -0.15), (fig1(), 0.7)] {
            let rep = build_gha(&f, alpha0, 6).unwrap();
            let scale = rep.eigenvalues().iter().fold(1f64, |m, e| m.max(e.abs()));
            let c = rep.casimir();
            for i in 0..6 {
                for j in 0..6 {
                    let expected = if i == j { -alpha0 } else { 0.0 };
                    assert!((c.get(i, j) - expected).abs() <= 1e-12 * scale);
                }
            }
        }
    }

    #[test]
    fn gauss_numbers() {
        assert_eq!(gauss_number(&boson(), 0.3, 5).unwrap(), 5.0);
        assert_eq!(gauss_number(&fig4(), -0.15, 0).unwrap(), 0.0);
        assert_eq!(gauss_number(&fig4(), -0.15, 1).unwrap(), 1.0);
        // independent hand evaluation: f(0.5725) = 0.5725^2 + 3*0.5725 + 1
        let f_of = 0.5725f64 * 0.5725 + 3.0 * 0.5725 + 1.0;
        let expected = (f_of + 0.15) / 0.7225;
        assert!((gauss_number(&fig4(), -0.15, 2).unwrap() - expected).abs() < 1e-13);
        assert!((expected - 4.4225).abs() < 1e-13);
        assert_eq!(gauss_factorial(&fig4(), -0.15, 0).unwrap(), 1.0);
        assert_eq!(gauss_factorial(&boson(), 0.0, 4).unwrap(), 24.0);
        assert_eq!(
            gauss_number(&fig1(), 0.7, 2).unwrap_err(),
            Error::FixedPointVacuum
        );
    }

    #[test]
    fn relations_hold_and_heisenberg_limit() {
        let rep = build_gha(&fig4(), -0.15, 5).unwrap();
        let report = verify_gha_relations(&rep, 1e-10);
        assert!(report.passed, "{report:?}");

        let rep = build_gha(&boson(), 0.0, 6).unwrap();
        let m = rep.matrices();
        let comm = &m.a.entries * &m.adag.entries - &m.adag.entries * &m.a.entries;
        for j in 0..5 {
            for i in 0..6 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((comm[(i, j)] - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn corrupted_ladder_fails() {
        let rep = build_gha(&fig4(), -0.15, 4).unwrap();
        let mut value = serde_json::to_value(&rep).unwrap();
        let l0 = value["ladder"][0].as_f64().unwrap();
        value["ladder"][0] = serde_json::json!(l0 + 0.1);
        let corrupted: GhaRep = serde_json::from_value(value).unwrap();
        assert!(!verify_gha_relations(&corrupted, 1e-10).passed);
    }

    #[test]
    fn excitations_are_unit_vectors() {
        let rep = build_gha(&fig4(), -0.15, 5).unwrap();
        for n in 0..5 {
            let v = rep.normalized_excitation(n).unwrap();
            for (i, x) in v.iter().enumerate() {
                let expected = if i == n { 1.0 } else { 0.0 };
                assert!((x - expected).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn json_roundtrip_checks_shape() {
        let rep = build_gha(&fig4(), -0.15, 3).unwrap();
        let s = serde_json::to_string(&rep).unwrap();
        assert!(s.starts_with(r#"{"fn":{"coefficients":[1.0,3.0,1.0],"orientation":"oscillator"},"alpha0":-0.15,"dim":3"#));
        assert_eq!(serde_json::from_str::<GhaRep>(&s).unwrap(), rep);
        let mut v: serde_json::Value = serde_json::from_str(&s).unwrap();
        v["ladder"] = serde_json::json!([1.0]);
        assert!(serde_json::from_value::<GhaRep>(v).is_err());
    }
}
