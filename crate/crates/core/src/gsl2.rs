//! Highest-weight representations of the generalized sl(2) algebra
//!
//! ```text
//! J0 J- = J- g(J0),    J+ J0 = g(J0) J+,    [J+, J-] = J0(J0+1) - g(J0)(g(J0)+1).
//! ```
//!
//! The basis is ordered from the highest weight down: state `m` carries the
//! weight `g^(m)(alpha_j)`, and `J-` takes state `m` to `m+1` with amplitude
//! `sqrt(ladder_sq[m])` where
//! `ladder_sq[m] = (alpha_j - w_{m+1})(alpha_j + w_{m+1} + 1)`.
//!
//! A representation with `d` states closes when the next ladder square
//! vanishes, i.e. when the weight `w_d = g^(d)(alpha_j)` satisfies either
//! `w_d = alpha_j` (periodic) or `alpha_j + w_d + 1 = 0` (cut).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::charfun::{CharFn, Orientation};
use crate::error::{Error, Result};
use crate::gha::NORM_FLOOR;
use crate::matrix::{max_abs, max_abs_columns, poly_of_matrix, OperatorMatrix};
use crate::report::{Coverage, ResidualReport};
use crate::roots::{scan_roots, ScanOptions};

/// Default tolerance on the closing condition of finite representations.
pub const CLOSURE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RepKind {
    /// Closed by `g^(d)(alpha_j) = alpha_j`.
    #[serde(rename = "periodic")]
    FinitePeriodic,
    /// Closed by `alpha_j + g^(d)(alpha_j) + 1 = 0`.
    #[serde(rename = "cut")]
    FiniteCut,
    /// An infinite representation cut off after `dim` states.
    #[serde(rename = "truncated")]
    TruncatedInfinite,
}

impl RepKind {
    pub fn is_finite(self) -> bool {
        !matches!(self, RepKind::TruncatedInfinite)
    }

    pub fn coverage(self) -> Coverage {
        if self.is_finite() {
            Coverage::All
        } else {
            Coverage::Interior
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gsl2Options {
    pub closure_tol: f64,
}

impl Default for Gsl2Options {
    fn default() -> Self {
        Self {
            closure_tol: CLOSURE_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGsl2Rep")]
pub struct Gsl2Rep {
    gn: CharFn,
    alpha_j: f64,
    dim: usize,
    kind: RepKind,
    cut_residual: Option<f64>,
    weights: Vec<f64>,
    ladder_sq: Vec<f64>,
}

#[derive(Deserialize)]
struct RawGsl2Rep {
    gn: CharFn,
    alpha_j: f64,
    dim: usize,
    kind: RepKind,
    cut_residual: Option<f64>,
    weights: Vec<f64>,
    ladder_sq: Vec<f64>,
}

impl TryFrom<RawGsl2Rep> for Gsl2Rep {
    type Error = Error;

    fn try_from(raw: RawGsl2Rep) -> Result<Self> {
        if raw.dim == 0 || raw.weights.len() != raw.dim || raw.ladder_sq.len() != raw.dim - 1 {
            return Err(Error::InvalidData(format!(
                "dim {} with {} weights and {} ladder squares",
                raw.dim,
                raw.weights.len(),
                raw.ladder_sq.len()
            )));
        }
        Ok(Self {
            gn: raw.gn,
            alpha_j: raw.alpha_j,
            dim: raw.dim,
            kind: raw.kind,
            cut_residual: raw.cut_residual,
            weights: raw.weights,
            ladder_sq: raw.ladder_sq,
        })
    }
}

pub fn build_gsl2(gn: &CharFn, alpha_j: f64, dim: usize, kind: RepKind) -> Result<Gsl2Rep> {
    build_gsl2_with(gn, alpha_j, dim, kind, &Gsl2Options::default())
}

pub fn build_gsl2_with(
    gn: &CharFn,
    alpha_j: f64,
    dim: usize,
    kind: RepKind,
    opts: &Gsl2Options,
) -> Result<Gsl2Rep> {
    if dim == 0 {
        return Err(Error::InvalidDimension { min: 1, got: dim });
    }
    gn.require_orientation(Orientation::WeightLike)?;
    if !gn.in_invertible_region(alpha_j) {
        return Err(Error::InvalidHighestWeight(alpha_j));
    }

    // One weight past the last state: it decides closure.
    let mut weights = Vec::with_capacity(dim + 1);
    weights.push(alpha_j);
    for m in 1..=dim {
        let w = gn.evaluate(weights[m - 1]);
        if !w.is_finite() {
            return Err(Error::NonFinite(m));
        }
        weights.push(w);
    }
    let closing = weights.pop().unwrap_or(alpha_j);

    for (m, &w) in weights.iter().enumerate().skip(1) {
        if !(w < alpha_j) {
            return Err(Error::DescentViolation { m, value: w });
        }
    }

    let mut ladder_sq = Vec::with_capacity(dim - 1);
    for (m, &w) in weights[1..].iter().enumerate() {
        let sq = ladder_square(alpha_j, w);
        if sq < -NORM_FLOOR {
            return Err(Error::NegativeLadderSquare { m, value: sq });
        }
        if kind == RepKind::FiniteCut && sq <= NORM_FLOOR {
            return Err(Error::PrematureClosure(m));
        }
        ladder_sq.push(sq.max(0.0));
    }

    let cut_residual = match kind {
        RepKind::FiniteCut => {
            let residual = alpha_j + closing + 1.0;
            if !(residual.abs() <= opts.closure_tol) {
                return Err(Error::CutResidualTooLarge {
                    residual,
                    tol: opts.closure_tol,
                });
            }
            Some(residual)
        }
        RepKind::FinitePeriodic => {
            let residual = closing - alpha_j;
            if !(residual.abs() <= opts.closure_tol) {
                return Err(Error::PeriodicResidualTooLarge {
                    residual,
                    tol: opts.closure_tol,
                });
            }
            None
        }
        RepKind::TruncatedInfinite => None,
    };

    Ok(Gsl2Rep {
        gn: gn.clone(),
        alpha_j,
        dim,
        kind,
        cut_residual,
        weights,
        ladder_sq,
    })
}

/// `(alpha_j - w)(alpha_j + w + 1)`; the factored form stays accurate as
/// the product approaches zero.
pub fn ladder_square(alpha_j: f64, w: f64) -> f64 {
    (alpha_j - w) * (alpha_j + w + 1.0)
}

impl Gsl2Rep {
    pub fn char_fn(&self) -> &CharFn {
        &self.gn
    }

    pub fn alpha_j(&self) -> f64 {
        self.alpha_j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> RepKind {
        self.kind
    }

    pub fn cut_residual(&self) -> Option<f64> {
        self.cut_residual
    }

    /// `alpha_{j-m} = g^(m)(alpha_j)` for `m = 0..dim`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn ladder_sq(&self) -> &[f64] {
        &self.ladder_sq
    }

    /// The ladder square one step past the last state; zero (to the closure
    /// tolerance) for finite representations.
    pub fn closing_ladder_sq(&self) -> f64 {
        let last = self.weights[self.dim - 1];
        ladder_square(self.alpha_j, self.gn.evaluate(last))
    }

    fn operator(&self, entries: DMatrix<f64>) -> OperatorMatrix {
        let states = (0..self.dim).map(|m| format!("|j-{m}>")).collect();
        let label = format!("highest weight |j-0>..|j-{}>", self.dim - 1);
        OperatorMatrix::new(entries, label, states)
    }

    pub fn matrix_j0(&self) -> OperatorMatrix {
        self.operator(DMatrix::from_diagonal(&DVector::from_column_slice(
            &self.weights,
        )))
    }

    pub fn matrix_jplus(&self) -> OperatorMatrix {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (k, &sq) in self.ladder_sq.iter().enumerate() {
            m[(k, k + 1)] = sq.sqrt();
        }
        self.operator(m)
    }

    pub fn matrix_jminus(&self) -> OperatorMatrix {
        self.matrix_jplus().transpose()
    }

    pub fn matrices(&self) -> Gsl2Matrices {
        Gsl2Matrices {
            j0: self.matrix_j0(),
            jplus: self.matrix_jplus(),
            jminus: self.matrix_jminus(),
        }
    }

    pub fn casimir(&self) -> OperatorMatrix {
        let m = self.matrices();
        self.operator(casimir_of(
            &self.gn,
            &m.j0.entries,
            &m.jplus.entries,
            &m.jminus.entries,
        ))
    }
}

/// `1/2 {J+ J- + J- J+ + J0(J0+1) + g(J0)(g(J0)+1)}`.
pub fn casimir_of(
    g: &CharFn,
    j0: &DMatrix<f64>,
    jplus: &DMatrix<f64>,
    jminus: &DMatrix<f64>,
) -> DMatrix<f64> {
    let n = j0.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let gj0 = poly_of_matrix(g, j0);
    (jplus * jminus + jminus * jplus + j0 * (j0 + &id) + &gj0 * (&gj0 + &id)) * 0.5
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gsl2Matrices {
    pub j0: OperatorMatrix,
    pub jplus: OperatorMatrix,
    pub jminus: OperatorMatrix,
}

/// Relation residuals; finite representations are checked on every entry,
/// truncated ones on the interior columns.
pub fn verify_gsl2_relations(rep: &Gsl2Rep, tol: f64) -> ResidualReport {
    verify_gsl2_matrices(
        &rep.matrices(),
        rep.char_fn(),
        rep.alpha_j(),
        rep.kind().coverage(),
        tol,
    )
}

pub fn verify_gsl2_matrices(
    m: &Gsl2Matrices,
    g: &CharFn,
    alpha_j: f64,
    coverage: Coverage,
    tol: f64,
) -> ResidualReport {
    let j0 = &m.j0.entries;
    let jp = &m.jplus.entries;
    let jm = &m.jminus.entries;
    let n = j0.nrows();
    let cols = match coverage {
        Coverage::All => n,
        Coverage::Interior => n.saturating_sub(1),
    };
    let id = DMatrix::<f64>::identity(n, n);
    let gj0 = poly_of_matrix(g, j0);

    let mut report = ResidualReport::new(tol, coverage);
    report.push(
        "J0 J- - J- g(J0)",
        max_abs_columns(&(j0 * jm - jm * &gj0), cols),
    );
    report.push(
        "J+ J0 - g(J0) J+",
        max_abs_columns(&(jp * j0 - &gj0 * jp), cols),
    );
    let rhs = j0 * (j0 + &id) - &gj0 * (&gj0 + &id);
    report.push(
        "[J+, J-] - (J0(J0+1) - g(J0)(g(J0)+1))",
        max_abs_columns(&(jp * jm - jm * jp - rhs), cols),
    );
    let c = casimir_of(g, j0, jp, jm);
    let scalar = alpha_j * (alpha_j + 1.0);
    report.push(
        "C - alpha_j(alpha_j+1)",
        max_abs_columns(&(c - &id * scalar), cols),
    );
    if n > 0 {
        report.push("J+ |j>", max_abs_columns(jp, 1));
    }
    report.push("J- - (J+)^T", max_abs(&(jm - jp.transpose())));
    report.push("J0 - J0^T", max_abs(&(j0 - j0.transpose())));
    report
}

/// Where the dense scans of the closure equations look.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// The scan covers `[center - half_width, center + half_width]`, centered
    /// on the vertex for quadratics and on 0 otherwise.
    pub half_width: f64,
    pub scan: ScanOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            half_width: 100.0,
            scan: ScanOptions::default(),
        }
    }
}

impl SolveOptions {
    fn window(&self, gn: &CharFn) -> (f64, f64) {
        let center = gn.invertibility_boundary().unwrap_or(0.0);
        (center - self.half_width, center + self.half_width)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ExclusionReason {
    OutsideInvertibleRegion,
    NotUnitary(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedRoot {
    pub alpha: f64,
    pub reason: ExclusionReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutSolutions {
    pub d: usize,
    pub included: Vec<f64>,
    pub excluded: Vec<ExcludedRoot>,
}

/// Highest weights of `d`-dimensional cut representations: real roots of
/// `alpha + g^(d)(alpha) + 1 = 0`.
///
/// Roots outside the invertibility region, or whose representation fails to
/// build, are returned as excluded with the reason.
pub fn cut_condition_solve(gn: &CharFn, d: usize) -> Result<CutSolutions> {
    cut_condition_solve_with(gn, d, &SolveOptions::default())
}

pub fn cut_condition_solve_with(
    gn: &CharFn,
    d: usize,
    opts: &SolveOptions,
) -> Result<CutSolutions> {
    if d == 0 {
        return Err(Error::InvalidDimension { min: 1, got: d });
    }
    let (lo, hi) = opts.window(gn);
    let roots = scan_roots(
        |a| {
            let (v, dv) = gn.compose_with_derivative(a, d);
            (a + v + 1.0, 1.0 + dv)
        },
        lo,
        hi,
        opts.scan,
    );
    let mut out = CutSolutions {
        d,
        included: Vec::new(),
        excluded: Vec::new(),
    };
    for alpha in roots {
        if !gn.in_invertible_region(alpha) {
            out.excluded.push(ExcludedRoot {
                alpha,
                reason: ExclusionReason::OutsideInvertibleRegion,
            });
            continue;
        }
        match build_gsl2(gn, alpha, d, RepKind::FiniteCut) {
            Ok(_) => out.included.push(alpha),
            Err(e) => out.excluded.push(ExcludedRoot {
                alpha,
                reason: ExclusionReason::NotUnitary(e.to_string()),
            }),
        }
    }
    Ok(out)
}

/// Period-`d` points of `g` inside the invertibility region (candidates for
/// periodic representations; unitarity is not claimed).
pub fn periodic_condition_solve(gn: &CharFn, d: usize) -> Result<Vec<f64>> {
    periodic_condition_solve_with(gn, d, &SolveOptions::default())
}

pub fn periodic_condition_solve_with(
    gn: &CharFn,
    d: usize,
    opts: &SolveOptions,
) -> Result<Vec<f64>> {
    if d == 0 {
        return Err(Error::InvalidDimension { min: 1, got: d });
    }
    let (lo, hi) = opts.window(gn);
    let roots = scan_roots(
        |a| {
            let (v, dv) = gn.compose_with_derivative(a, d);
            (v - a, dv - 1.0)
        },
        lo,
        hi,
        opts.scan,
    );
    Ok(roots
        .into_iter()
        .filter(|&a| gn.in_invertible_region(a))
        .collect())
}
