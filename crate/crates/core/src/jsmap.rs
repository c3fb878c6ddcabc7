//! Generalized Jordan-Schwinger map: a generalized sl(2) realized on two
//! independent copies of the same generalized Heisenberg algebra.
//!
//! ```text
//! S_z = G(N1, N2),    S+ = F(N1, N2) A1+ A2,    S- = A2+ A1 F(N1, N2)
//! G = alpha_j + Q2 [j - (N1-N2)/2]_g
//! F = sqrt(-Q2 [k]_g (2 alpha_j + 1 + Q2 [k]_g)) / (M0^2 sqrt([k]_f [j + (N1-N2)/2]_f)),
//!     k = j + 1 - (N1-N2)/2
//! ```
//!
//! With `j = (n1+n2)/2` the indices reduce to plain occupation numbers:
//! `j - (n1-n2)/2 = n2`, `j + 1 - (n1-n2)/2 = n2 + 1` and
//! `j + (n1-n2)/2 = n1`. The shell state `|alpha_j, j-m>` is `(n1, n2) =
//! (2j-m, m)`, so the basis of a fixed-`j` shell is ordered by `n2`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::charfun::{CharFn, Orientation};
use crate::error::{Error, Result};
use crate::gha::{build_gha, GhaRep, NORM_FLOOR};
use crate::gsl2::{casimir_of, verify_gsl2_matrices, Gsl2Matrices, Gsl2Rep, CLOSURE_TOL};
use crate::matrix::{max_abs, MatrixDocument, OperatorMatrix};
use crate::report::{Coverage, ResidualReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SpaceMode {
    /// The `2j+1` states with `n1 + n2 = 2j`.
    FixedJ { two_j: usize },
    /// All `n1, n2 < dim`, ordered `n1` major. The map's `alpha_j` belongs to
    /// the designated shell; other shells are built but not claimed.
    FullGrid { dim: usize, designated_two_j: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoOscillatorSpace {
    gha: GhaRep,
    mode: SpaceMode,
    basis: Vec<(usize, usize)>,
}

impl TwoOscillatorSpace {
    pub fn new(f: &CharFn, alpha0: f64, mode: SpaceMode) -> Result<Self> {
        let (gha_dim, basis) = match mode {
            SpaceMode::FixedJ { two_j } => {
                (two_j + 1, (0..=two_j).map(|m| (two_j - m, m)).collect())
            }
            SpaceMode::FullGrid {
                dim,
                designated_two_j,
            } => {
                if dim == 0 {
                    return Err(Error::InvalidDimension { min: 1, got: dim });
                }
                if designated_two_j >= dim {
                    return Err(Error::InvalidShell(designated_two_j as i64));
                }
                let basis = (0..dim)
                    .flat_map(|n1| (0..dim).map(move |n2| (n1, n2)))
                    .collect();
                (dim, basis)
            }
        };
        Ok(Self {
            gha: build_gha(f, alpha0, gha_dim)?,
            mode,
            basis,
        })
    }

    pub fn fixed_j(f: &CharFn, alpha0: f64, two_j: usize) -> Result<Self> {
        Self::new(f, alpha0, SpaceMode::FixedJ { two_j })
    }

    pub fn full_grid(f: &CharFn, alpha0: f64, dim: usize, designated_two_j: usize) -> Result<Self> {
        Self::new(
            f,
            alpha0,
            SpaceMode::FullGrid {
                dim,
                designated_two_j,
            },
        )
    }

    pub fn gha(&self) -> &GhaRep {
        &self.gha
    }

    pub fn mode(&self) -> SpaceMode {
        self.mode
    }

    pub fn basis(&self) -> &[(usize, usize)] {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn designated_two_j(&self) -> usize {
        match self.mode {
            SpaceMode::FixedJ { two_j } => two_j,
            SpaceMode::FullGrid {
                designated_two_j, ..
            } => designated_two_j,
        }
    }

    pub fn index_of(&self, n1: usize, n2: usize) -> Option<usize> {
        match self.mode {
            SpaceMode::FixedJ { two_j } => (n1 + n2 == two_j).then_some(n2),
            SpaceMode::FullGrid { dim, .. } => (n1 < dim && n2 < dim).then(|| n1 * dim + n2),
        }
    }

    /// Largest occupation number present in the basis.
    fn max_occupation(&self) -> usize {
        self.gha.dim() - 1
    }

    fn operator(&self, entries: DMatrix<f64>) -> OperatorMatrix {
        let states = self
            .basis
            .iter()
            .map(|(n1, n2)| format!("|{n1},{n2}>"))
            .collect();
        let label = match self.mode {
            SpaceMode::FixedJ { two_j } => format!("shell n1+n2={two_j}, ordered by n2"),
            SpaceMode::FullGrid { dim, .. } => format!("grid n1,n2<{dim}, n1 major"),
        };
        OperatorMatrix::new(entries, label, states)
    }

    fn diagonal(&self, values: Vec<f64>) -> OperatorMatrix {
        self.operator(DMatrix::from_diagonal(&DVector::from_vec(values)))
    }

    /// `A1+ A2`: `(n1, n2) -> (n1+1, n2-1)` with amplitude `M_{n1} M_{n2-1}`.
    fn raising(&self) -> DMatrix<f64> {
        match self.mode {
            SpaceMode::FullGrid { .. } => {
                let adag = self.gha.matrix_adag().entries;
                let a = adag.transpose();
                adag.kronecker(&a)
            }
            SpaceMode::FixedJ { .. } => {
                let ladder = self.gha.ladder();
                let n = self.len();
                let mut m = DMatrix::zeros(n, n);
                for (col, &(n1, n2)) in self.basis.iter().enumerate() {
                    if n2 == 0 {
                        continue;
                    }
                    if let Some(row) = self.index_of(n1 + 1, n2 - 1) {
                        m[(row, col)] = ladder[n1] * ladder[n2 - 1];
                    }
                }
                m
            }
        }
    }

    /// `A2+ A1`: `(n1, n2) -> (n1-1, n2+1)` with amplitude `M_{n1-1} M_{n2}`.
    fn lowering(&self) -> DMatrix<f64> {
        match self.mode {
            SpaceMode::FullGrid { .. } => {
                let adag = self.gha.matrix_adag().entries;
                let a = adag.transpose();
                a.kronecker(&adag)
            }
            SpaceMode::FixedJ { .. } => {
                let ladder = self.gha.ladder();
                let n = self.len();
                let mut m = DMatrix::zeros(n, n);
                for (col, &(n1, n2)) in self.basis.iter().enumerate() {
                    if n1 == 0 {
                        continue;
                    }
                    if let Some(row) = self.index_of(n1 - 1, n2 + 1) {
                        m[(row, col)] = ladder[n1 - 1] * ladder[n2];
                    }
                }
                m
            }
        }
    }

    /// Whether `(n1, n2)` is reached by `A1+ A2` from inside the space.
    fn is_raising_image(&self, n1: usize, n2: usize) -> bool {
        n1 >= 1 && self.index_of(n1 - 1, n2 + 1).is_some()
    }
}

/// `g^(k)(alpha_j)` for `k = 0..=n`.
fn weight_orbit(gn: &CharFn, alpha_j: f64, n: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(alpha_j);
    for k in 1..=n {
        let w = gn.evaluate(out[k - 1]);
        if !w.is_finite() {
            return Err(Error::NonFinite(k));
        }
        out.push(w);
    }
    Ok(out)
}

/// Scaled Gauss numbers `Q2 [k]_g = g^(k)(alpha_j) - alpha_j`, which stay
/// defined when `alpha_j` is a fixed point of `g`.
struct WeightGauss {
    alpha_j: f64,
    orbit: Vec<f64>,
}

impl WeightGauss {
    /// `Q2 = g(alpha_j) - alpha_j` must be negative unless the space is a
    /// single state, where the weights never move.
    fn new(gn: &CharFn, alpha_j: f64, space: &TwoOscillatorSpace) -> Result<Self> {
        gn.require_orientation(Orientation::WeightLike)?;
        let q2 = gn.evaluate(alpha_j) - alpha_j;
        if q2 > 0.0 || q2.is_nan() || (q2 == 0.0 && space.len() > 1) {
            return Err(Error::NonNegativeQ2(q2));
        }
        Ok(Self {
            alpha_j,
            orbit: weight_orbit(gn, alpha_j, space.max_occupation() + 1)?,
        })
    }

    fn q_gauss(&self, k: usize) -> f64 {
        self.orbit[k] - self.alpha_j
    }

    /// `-Q2 [k]_g (2 alpha_j + 1 + Q2 [k]_g)`.
    fn radicand(&self, k: usize) -> f64 {
        let qk = self.q_gauss(k);
        -qk * (2.0 * self.alpha_j + 1.0 + qk)
    }
}

/// Gauss numbers of `f` read off the oscillator spectrum.
struct OscillatorGauss<'a> {
    eigenvalues: &'a [f64],
    alpha0: f64,
    m0sq: f64,
}

impl<'a> OscillatorGauss<'a> {
    fn new(gha: &'a GhaRep) -> Self {
        let alpha0 = gha.alpha0();
        Self {
            eigenvalues: gha.eigenvalues(),
            alpha0,
            m0sq: gha.char_fn().evaluate(alpha0) - alpha0,
        }
    }

    fn gauss(&self, k: usize) -> f64 {
        (self.eigenvalues[k] - self.alpha0) / self.m0sq
    }
}

/// Diagonal `G(N1, N2) = alpha_j + Q2 [n2]_g`.
pub fn functional_g(
    space: &TwoOscillatorSpace,
    gn: &CharFn,
    alpha_j: f64,
) -> Result<OperatorMatrix> {
    let wg = WeightGauss::new(gn, alpha_j, space)?;
    let values = space
        .basis()
        .iter()
        .map(|&(_, n2)| alpha_j + wg.q_gauss(n2))
        .collect();
    Ok(space.diagonal(values))
}

/// Diagonal `F(N1, N2)` evaluated with `k = n2 + 1` and `[n1]_f` in the
/// denominator.
///
/// Only states reached by `A1+ A2` are evaluated; elsewhere `F` multiplies a
/// vanishing ladder product and the entry is set to 0.
pub fn functional_f(
    space: &TwoOscillatorSpace,
    gn: &CharFn,
    alpha_j: f64,
) -> Result<OperatorMatrix> {
    let wg = WeightGauss::new(gn, alpha_j, space)?;
    let fg = OscillatorGauss::new(space.gha());
    let mut values = vec![0.0; space.len()];
    for (i, &(n1, n2)) in space.basis().iter().enumerate() {
        if !space.is_raising_image(n1, n2) {
            continue;
        }
        let k = n2 + 1;
        let rad = wg.radicand(k);
        if rad < -NORM_FLOOR {
            return Err(Error::NegativeRadicand { n1, n2, value: rad });
        }
        let denom_sq = fg.gauss(k) * fg.gauss(n1);
        if !(fg.m0sq > 0.0) || !(denom_sq > 0.0) {
            return Err(Error::FixedPointVacuum);
        }
        values[i] = rad.max(0.0).sqrt() / (fg.m0sq * denom_sq.sqrt());
    }
    Ok(space.diagonal(values))
}

/// `F` in the reflection-paired setting:
/// `sqrt(2 alpha_j + 1 + Q2 [n2+1]_g) / sqrt(-Q2 [n1]_g)`.
pub fn functional_f_paired(
    space: &TwoOscillatorSpace,
    gn: &CharFn,
    alpha_j: f64,
) -> Result<OperatorMatrix> {
    let wg = WeightGauss::new(gn, alpha_j, space)?;
    let mut values = vec![0.0; space.len()];
    for (i, &(n1, n2)) in space.basis().iter().enumerate() {
        if !space.is_raising_image(n1, n2) {
            continue;
        }
        let num = 2.0 * alpha_j + 1.0 + wg.q_gauss(n2 + 1);
        let den = -wg.q_gauss(n1);
        if num < -NORM_FLOOR || !(den > 0.0) {
            return Err(Error::NegativeRadicand {
                n1,
                n2,
                value: num.min(den),
            });
        }
        values[i] = num.max(0.0).sqrt() / den.sqrt();
    }
    Ok(space.diagonal(values))
}

#[derive(Debug, Clone, PartialEq)]
pub struct JsMapRep {
    space: TwoOscillatorSpace,
    gn: CharFn,
    alpha_j: f64,
    q2: f64,
    m0sq: f64,
    f: OperatorMatrix,
    g: OperatorMatrix,
    s_z: OperatorMatrix,
    s_plus: OperatorMatrix,
    s_minus: OperatorMatrix,
    s_sq: OperatorMatrix,
}

pub fn build_jsmap(
    f: &CharFn,
    alpha0: f64,
    gn: &CharFn,
    alpha_j: f64,
    mode: SpaceMode,
) -> Result<JsMapRep> {
    let space = TwoOscillatorSpace::new(f, alpha0, mode)?;
    let g_mat = functional_g(&space, gn, alpha_j)?;
    let f_mat = functional_f(&space, gn, alpha_j)?;

    let s_plus = &f_mat.entries * space.raising();
    // F sits to the right of the ladder pair in S-.
    let s_minus = space.lowering() * &f_mat.entries;
    let s_z = g_mat.entries.clone();
    let s_sq = casimir_of(gn, &s_z, &s_plus, &s_minus);

    Ok(JsMapRep {
        q2: gn.evaluate(alpha_j) - alpha_j,
        m0sq: f.evaluate(alpha0) - alpha0,
        s_z: space.operator(s_z),
        s_plus: space.operator(s_plus),
        s_minus: space.operator(s_minus),
        s_sq: space.operator(s_sq),
        f: f_mat,
        g: g_mat,
        gn: gn.clone(),
        alpha_j,
        space,
    })
}

/// The four mapped operators restricted to one shell `n1 + n2 = 2j`, in the
/// order `m = n2 = 0..=2j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellMatrices {
    pub two_j: usize,
    pub s_z: OperatorMatrix,
    pub s_plus: OperatorMatrix,
    pub s_minus: OperatorMatrix,
    pub s_sq: OperatorMatrix,
}

impl ShellMatrices {
    pub fn as_gsl2(&self) -> Gsl2Matrices {
        Gsl2Matrices {
            j0: self.s_z.clone(),
            jplus: self.s_plus.clone(),
            jminus: self.s_minus.clone(),
        }
    }
}

impl JsMapRep {
    pub fn space(&self) -> &TwoOscillatorSpace {
        &self.space
    }

    pub fn char_fn(&self) -> &CharFn {
        &self.gn
    }

    pub fn alpha_j(&self) -> f64 {
        self.alpha_j
    }

    pub fn q2(&self) -> f64 {
        self.q2
    }

    pub fn m0sq(&self) -> f64 {
        self.m0sq
    }

    pub fn functional_f(&self) -> &OperatorMatrix {
        &self.f
    }

    pub fn functional_g(&self) -> &OperatorMatrix {
        &self.g
    }

    pub fn s_z(&self) -> &OperatorMatrix {
        &self.s_z
    }

    pub fn s_plus(&self) -> &OperatorMatrix {
        &self.s_plus
    }

    pub fn s_minus(&self) -> &OperatorMatrix {
        &self.s_minus
    }

    pub fn s_sq(&self) -> &OperatorMatrix {
        &self.s_sq
    }

    /// Restriction to the shell `n1 + n2 = two_j`, which must lie entirely
    /// inside the space.
    pub fn shell(&self, two_j: usize) -> Result<ShellMatrices> {
        let indices = (0..=two_j)
            .map(|m| {
                self.space
                    .index_of(two_j - m, m)
                    .ok_or(Error::InvalidShell(two_j as i64))
            })
            .collect::<Result<Vec<_>>>()?;
        let states: Vec<String> = (0..=two_j)
            .map(|m| format!("|{},{}>", two_j - m, m))
            .collect();
        let label = format!("shell n1+n2={two_j}, ordered by n2");
        let block = |m: &OperatorMatrix| {
            let n = indices.len();
            let entries = DMatrix::from_fn(n, n, |r, c| m.get(indices[r], indices[c]));
            OperatorMatrix::new(entries, label.clone(), states.clone())
        };
        Ok(ShellMatrices {
            two_j,
            s_z: block(&self.s_z),
            s_plus: block(&self.s_plus),
            s_minus: block(&self.s_minus),
            s_sq: block(&self.s_sq),
        })
    }

    /// Whether the designated shell is a closed (finite) representation:
    /// the weight one step past the shell satisfies the cut or periodic
    /// condition.
    pub fn designated_shell_closes(&self) -> bool {
        let two_j = self.space.designated_two_j();
        let (w, _) = self.gn.compose_with_derivative(self.alpha_j, two_j + 1);
        (self.alpha_j + w + 1.0).abs() <= CLOSURE_TOL || (w - self.alpha_j).abs() <= CLOSURE_TOL
    }

    pub fn document(&self) -> JsMapDocument {
        JsMapDocument {
            mode: self.space.mode(),
            basis: self.space.basis().to_vec(),
            alpha0: self.space.gha().alpha0(),
            alpha_j: self.alpha_j,
            q2: self.q2,
            m0sq: self.m0sq,
            functional_f: (&self.f).into(),
            functional_g: (&self.g).into(),
            s_z: (&self.s_z).into(),
            s_plus: (&self.s_plus).into(),
            s_minus: (&self.s_minus).into(),
            s_sq: (&self.s_sq).into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsMapDocument {
    pub mode: SpaceMode,
    pub basis: Vec<(usize, usize)>,
    pub alpha0: f64,
    pub alpha_j: f64,
    pub q2: f64,
    pub m0sq: f64,
    pub functional_f: MatrixDocument,
    pub functional_g: MatrixDocument,
    pub s_z: MatrixDocument,
    pub s_plus: MatrixDocument,
    pub s_minus: MatrixDocument,
    pub s_sq: MatrixDocument,
}

/// G-sl(2) relation residuals of the mapped operators on the designated
/// shell, plus conservation of `N1 + N2` on the whole space.
pub fn verify_jsmap_relations(js: &JsMapRep, tol: f64) -> Result<ResidualReport> {
    let shell = js.shell(js.space.designated_two_j())?;
    let coverage = if js.designated_shell_closes() {
        Coverage::All
    } else {
        Coverage::Interior
    };
    let mut report = verify_gsl2_matrices(&shell.as_gsl2(), &js.gn, js.alpha_j, coverage, tol);
    let total = DMatrix::from_diagonal(&DVector::from_iterator(
        js.space.len(),
        js.space.basis().iter().map(|&(n1, n2)| (n1 + n2) as f64),
    ));
    let conserved = [&js.s_z, &js.s_plus, &js.s_minus]
        .iter()
        .map(|s| max_abs(&(&s.entries * &total - &total * &s.entries)))
        .fold(0.0, f64::max);
    report.push("[S, N1+N2]", conserved);
    Ok(report)
}

/// Entrywise agreement of the mapped operators on the shell `2j+1 = dim`
/// with the direct representation's `J0, J+, J-` and Casimir.
pub fn verify_map_equals_gsl2(js: &JsMapRep, rep: &Gsl2Rep, tol: f64) -> Result<ResidualReport> {
    if rep.alpha_j() != js.alpha_j || rep.char_fn() != &js.gn {
        return Err(Error::InvalidData(
            "map and representation use different g or alpha_j".into(),
        ));
    }
    let two_j = rep.dim() - 1;
    let shell = match js.space.mode() {
        SpaceMode::FixedJ { two_j: own } if own != two_j => {
            return Err(Error::DimensionMismatch(format!(
                "shell has {} states, representation has {}",
                own + 1,
                rep.dim()
            )))
        }
        _ => js.shell(two_j).map_err(|_| {
            Error::DimensionMismatch(format!("no complete shell with {} states", rep.dim()))
        })?,
    };
    let j = rep.matrices();
    let c = rep.casimir();
    Ok(compare_realization(&shell, &j, &c, tol))
}

pub fn compare_realization(
    shell: &ShellMatrices,
    j: &Gsl2Matrices,
    casimir: &OperatorMatrix,
    tol: f64,
) -> ResidualReport {
    let mut report = ResidualReport::new(tol, Coverage::All);
    let pairs = [
        ("S_z - J0", &shell.s_z, &j.j0),
        ("S+ - J+", &shell.s_plus, &j.jplus),
        ("S- - J-", &shell.s_minus, &j.jminus),
        ("S^2 - C", &shell.s_sq, casimir),
    ];
    for (name, s, t) in pairs {
        let diff = if s.dim() == t.dim() {
            max_abs(&(&s.entries - &t.entries))
        } else {
            f64::INFINITY
        };
        report.push(name, diff);
    }
    report
}

/// Both sides of the reflection-pairing identity `-Q2 [m]_g = M0^2 [m]_f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingSequences {
    /// `M0^2 [m]_f` for `m = 0..=m_max`.
    pub oscillator_side: Vec<f64>,
    /// `-Q2 [m]_g` for `m = 0..=m_max`.
    pub weight_side: Vec<f64>,
    /// `alpha_bar* + alpha*` when both functions are quadratics with a
    /// double fixed point.
    pub fixed_point_gap: Option<f64>,
}

/// Checks that `(gn, alpha_j)` is the reflection partner of `(f, alpha0)`
/// and computes both sides of the pairing identity.
pub fn pairing_sequences(
    f: &CharFn,
    alpha0: f64,
    gn: &CharFn,
    alpha_j: f64,
    m_max: usize,
) -> Result<PairingSequences> {
    let partner = f.reflection_pair()?;
    let scale = f
        .coefficients()
        .iter()
        .fold(1f64, |acc, a| acc.max(a.abs()));
    let matches = partner.coefficients().len() == gn.coefficients().len()
        && partner
            .coefficients()
            .iter()
            .zip(gn.coefficients())
            .all(|(a, b)| (a - b).abs() <= 1e-14 * scale);
    if !matches {
        return Err(Error::PairingMismatch(format!(
            "expected g coefficients {:?}, found {:?}",
            partner.coefficients(),
            gn.coefficients()
        )));
    }
    if (alpha_j + alpha0).abs() > 1e-14 * alpha0.abs().max(1.0) {
        return Err(Error::PairingMismatch(format!(
            "alpha_j = {alpha_j} is not -alpha0 = {}",
            -alpha0
        )));
    }

    let m0sq = f.evaluate(alpha0) - alpha0;
    let q2 = gn.evaluate(alpha_j) - alpha_j;
    if m0sq.abs() <= 1e-14 || q2.abs() <= 1e-14 {
        return Err(Error::FixedPointVacuum);
    }
    let mut x = alpha0;
    let mut y = alpha_j;
    let mut oscillator_side = Vec::with_capacity(m_max + 1);
    let mut weight_side = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        if m > 0 {
            x = f.evaluate(x);
            y = gn.evaluate(y);
        }
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::NonFinite(m));
        }
        oscillator_side.push(m0sq * ((x - alpha0) / m0sq));
        weight_side.push(-q2 * ((y - alpha_j) / q2));
    }

    let fixed_point_gap = match (f.classify_region(alpha0), gn.classify_region(alpha_j)) {
        (Ok(_), Ok(_)) => {
            let a = f.fixed_points()?;
            let b = gn.fixed_points()?;
            Some(b[0].location + a[0].location)
        }
        _ => None,
    };
    Ok(PairingSequences {
        oscillator_side,
        weight_side,
        fixed_point_gap,
    })
}

impl PairingSequences {
    /// Passes when `|-Q2[m]_g - M0^2[m]_f| <= tol * max(1, |M0^2[m]_f|)` for
    /// every `m` (reported as the largest scaled difference).
    pub fn report(&self, tol: f64) -> ResidualReport {
        let mut report = ResidualReport::new(tol, Coverage::All);
        let scaled = if self.oscillator_side.len() == self.weight_side.len() {
            self.oscillator_side
                .iter()
                .zip(&self.weight_side)
                .map(|(a, b)| (b - a).abs() / a.abs().max(1.0))
                .fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        report.push("-Q2[m]_g - M0^2[m]_f (scaled)", scaled);
        if let Some(gap) = self.fixed_point_gap {
            report.push("alpha_bar* + alpha*", gap.abs());
        }
        report
    }
}

pub fn verify_pairing_identity(
    f: &CharFn,
    alpha0: f64,
    gn: &CharFn,
    alpha_j: f64,
    m_max: usize,
    tol: f64,
) -> Result<ResidualReport> {
    Ok(pairing_sequences(f, alpha0, gn, alpha_j, m_max)?.report(tol))
}

/// `(A1+)^n1 (A2+)^n2 |0,0>` divided by `M0^(n1+n2) sqrt([n1]_f! [n2]_f!)`.
pub fn build_state_vector(
    space: &TwoOscillatorSpace,
    n1: usize,
    n2: usize,
) -> Result<DVector<f64>> {
    let dim = match space.mode() {
        SpaceMode::FullGrid { dim, .. } => dim,
        SpaceMode::FixedJ { .. } => {
            return Err(Error::InvalidData(
                "state construction needs the full two-oscillator grid".into(),
            ))
        }
    };
    if n1 >= dim || n2 >= dim {
        return Err(Error::OutOfBasis { n1, n2 });
    }
    let adag = space.gha().matrix_adag().entries;
    let id = DMatrix::<f64>::identity(dim, dim);
    let a1dag = adag.kronecker(&id);
    let a2dag = id.kronecker(&adag);
    let mut v = DVector::zeros(space.len());
    v[0] = 1.0;
    for _ in 0..n2 {
        v = &a2dag * v;
    }
    for _ in 0..n1 {
        v = &a1dag * v;
    }
    if n1 + n2 == 0 {
        return Ok(v);
    }
    let fg = OscillatorGauss::new(space.gha());
    let factorial = |n: usize| (1..=n).map(|k| fg.gauss(k)).product::<f64>();
    let norm = fg.m0sq.sqrt().powi((n1 + n2) as i32) * (factorial(n1) * factorial(n2)).sqrt();
    Ok(v / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gsl2::{build_gsl2, RepKind};

    const CUT_ROOT: f64 = 0.334_784_750_268_992_2;

    fn boson() -> CharFn {
        CharFn::oscillator(&[1.0, 1.0]).unwrap()
    }

    fn spin() -> CharFn {
        CharFn::weight(&[-1.0, 1.0]).unwrap()
    }

    fn fq() -> CharFn {
        CharFn::oscillator(&[1.0, 3.0, 1.0]).unwrap()
    }

    fn gq() -> CharFn {
        CharFn::weight(&[-1.0, 3.0, -1.0]).unwrap()
    }

    #[test]
    fn basis_ordering() {
        let s = TwoOscillatorSpace::fixed_j(&boson(), 0.0, 3).unwrap();
        assert_eq!(s.basis(), &[(3, 0), (2, 1), (1, 2), (0, 3)]);
        let s = TwoOscillatorSpace::full_grid(&boson(), 0.0, 2, 1).unwrap();
        assert_eq!(s.basis(), &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert_eq!(s.index_of(1, 0), Some(2));
    }

    #[test]
    fn g_examples() {
        let s = TwoOscillatorSpace::fixed_j(&boson(), 0.0, 2).unwrap();
        let g = functional_g(&s, &spin(), 1.0).unwrap();
        assert_eq!(g.diagonal(), vec![1.0, 0.0, -1.0]);

        let s = TwoOscillatorSpace::fixed_j(&fq(), -0.33479, 1).unwrap();
        let g = functional_g(&s, &gq(), 0.33479).unwrap();
        assert_eq!(g.get(0, 0), 0.33479);
        let w1 = -(0.33479f64 * 0.33479) + 3.0 * 0.33479 - 1.0;
        assert!((g.get(1, 1) - w1).abs() < 1e-15);
    }

    #[test]
    fn f_is_one_in_standard_limit() {
        for two_j in 0..6 {
            let s = TwoOscillatorSpace::fixed_j(&boson(), 0.0, two_j).unwrap();
            let f = functional_f(&s, &spin(), two_j as f64 / 2.0).unwrap();
            for (i, &(n1, _)) in s.basis().iter().enumerate() {
                let expected = if n1 >= 1 { 1.0 } else { 0.0 };
                assert_eq!(f.get(i, i), expected, "2j={two_j} state {i}");
            }
        }
    }

    #[test]
    fn f_general_and_paired_forms_agree() {
        // direct hand evaluation on the shell j = 1/2, state (1, 0):
        // k = 1, [1]_g = [1]_f = 1, so F = sqrt(-Q2 (2a+1+Q2)) / M0^2
        let a = CUT_ROOT;
        let s = TwoOscillatorSpace::fixed_j(&fq(), -a, 1).unwrap();
        let f = functional_f(&s, &gq(), a).unwrap();
        let q2 = gq().evaluate(a) - a;
        let m0sq = fq().evaluate(-a) + a;
        let expected = (-q2 * (2.0 * a + 1.0 + q2)).sqrt() / m0sq;
        assert!((f.get(0, 0) - expected).abs() <= 1e-12 * expected);
        let p = functional_f_paired(&s, &gq(), a).unwrap();
        assert!((p.get(0, 0) - f.get(0, 0)).abs() <= 1e-12 * expected);
        assert_eq!(f.get(1, 1), 0.0);
    }

    #[test]
    fn standard_spin_one() {
        let js = build_jsmap(&boson(), 0.0, &spin(), 1.0, SpaceMode::FixedJ { two_j: 2 }).unwrap();
        assert_eq!(js.s_z().diagonal(), vec![1.0, 0.0, -1.0]);
        assert!((js.s_plus().get(0, 1) - 2f64.sqrt()).abs() < 1e-15);
        assert!((js.s_plus().get(1, 2) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(js.s_minus().entries, js.s_plus().entries.transpose());
        let rep = build_gsl2(&spin(), 1.0, 3, RepKind::FiniteCut).unwrap();
        let report = verify_map_equals_gsl2(&js, &rep, 1e-12).unwrap();
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn paired_quadratic_half_spin() {
        let a = CUT_ROOT;
        let js = build_jsmap(&fq(), -a, &gq(), a, SpaceMode::FixedJ { two_j: 1 }).unwrap();
        let q2 = js.q2();
        let expected = (-q2 * (2.0 * a + 1.0 + q2)).sqrt();
        assert!((js.s_plus().get(0, 1) - expected).abs() < 1e-14);
        assert!(js.designated_shell_closes());
        let rep = build_gsl2(&gq(), a, 2, RepKind::FiniteCut).unwrap();
        assert!(verify_map_equals_gsl2(&js, &rep, 1e-10).unwrap().passed);
        assert!(verify_jsmap_relations(&js, 1e-10).unwrap().passed);
    }

    #[test]
    fn one_dimensional_shell() {
        let js = build_jsmap(&fq(), -0.3, &gq(), 0.3, SpaceMode::FixedJ { two_j: 0 }).unwrap();
        assert_eq!(js.s_z().get(0, 0), 0.3);
        assert_eq!(js.s_plus().get(0, 0), 0.0);
        assert_eq!(js.s_minus().get(0, 0), 0.0);
    }

    #[test]
    fn fixed_point_highest_weight() {
        // a single state needs no Gauss numbers of g
        let js = build_jsmap(
            &fq(),
            -1.0 + 0.5,
            &gq(),
            1.0,
            SpaceMode::FixedJ { two_j: 0 },
        )
        .unwrap();
        assert_eq!(js.s_z().get(0, 0), 1.0);
        assert_eq!(js.s_sq().get(0, 0), 2.0);
        assert!(matches!(
            build_jsmap(&fq(), -0.5, &gq(), 1.0, SpaceMode::FixedJ { two_j: 1 }),
            Err(Error::NonNegativeQ2(_))
        ));
        // rising weights never descend to a lowest weight
        let rising = CharFn::weight(&[1.0, 1.0]).unwrap();
        assert!(matches!(
            build_jsmap(&boson(), 0.0, &rising, 0.0, SpaceMode::FixedJ { two_j: 0 }),
            Err(Error::NonNegativeQ2(q)) if q == 1.0
        ));
    }

    #[test]
    fn dimension_mismatch() {
        let js = build_jsmap(&boson(), 0.0, &spin(), 1.0, SpaceMode::FixedJ { two_j: 2 }).unwrap();
        let rep = build_gsl2(&spin(), 1.0, 2, RepKind::TruncatedInfinite).unwrap();
        assert!(matches!(
            verify_map_equals_gsl2(&js, &rep, 1e-12),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn full_grid_shells_match_fixed_j() {
        let a = 1.2;
        let grid = build_jsmap(
            &fq(),
            -a,
            &gq(),
            a,
            SpaceMode::FullGrid {
                dim: 5,
                designated_two_j: 3,
            },
        )
        .unwrap();
        for two_j in 0..5 {
            let fixed = build_jsmap(&fq(), -a, &gq(), a, SpaceMode::FixedJ { two_j }).unwrap();
            let shell = grid.shell(two_j).unwrap();
            for (x, y) in [
                (&shell.s_z, fixed.s_z()),
                (&shell.s_plus, fixed.s_plus()),
                (&shell.s_minus, fixed.s_minus()),
                (&shell.s_sq, fixed.s_sq()),
            ] {
                assert!(max_abs(&(&x.entries - &y.entries)) < 1e-13);
            }
        }
        assert!(grid.shell(5).is_err());
        let report = verify_jsmap_relations(&grid, 1e-10).unwrap();
        assert!(report.passed, "{report:?}");
        assert_eq!(report.get("[S, N1+N2]"), Some(0.0));
    }

    #[test]
    fn negative_radicand_is_reported() {
        // alpha_j = -0.05 for g = -x^2+3x-1: the first ladder square is negative
        let e = build_jsmap(&fq(), 0.05, &gq(), -0.05, SpaceMode::FixedJ { two_j: 1 }).unwrap_err();
        assert!(matches!(e, Error::NegativeRadicand { n1: 1, n2: 0, .. }));
    }

    #[test]
    fn pairing_examples() {
        let r = verify_pairing_identity(&fq(), -0.15, &gq(), 0.15, 10, 1e-10).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.get("alpha_bar* + alpha*"), Some(0.0));

        let seq = pairing_sequences(&boson(), -0.4, &spin(), 0.4, 6).unwrap();
        for m in 0..=6 {
            assert!((seq.oscillator_side[m] - m as f64).abs() < 1e-14);
            assert!((seq.weight_side[m] - m as f64).abs() < 1e-14);
        }
        assert!(matches!(
            verify_pairing_identity(&fq(), -0.15, &gq(), 0.2, 4, 1e-10),
            Err(Error::PairingMismatch(_))
        ));
        let wrong = CharFn::weight(&[-1.0, 3.0, -2.0]).unwrap();
        assert!(matches!(
            verify_pairing_identity(&fq(), -0.15, &wrong, 0.15, 4, 1e-10),
            Err(Error::PairingMismatch(_))
        ));
    }

    #[test]
    fn state_vectors() {
        let space = TwoOscillatorSpace::full_grid(&boson(), 0.0, 4, 1).unwrap();
        let v = build_state_vector(&space, 0, 0).unwrap();
        assert_eq!(v[0], 1.0);
        let v = build_state_vector(&space, 2, 1).unwrap();
        let idx = space.index_of(2, 1).unwrap();
        for (i, x) in v.iter().enumerate() {
            let expected = if i == idx { 1.0 } else { 0.0 };
            assert!((x - expected).abs() < 1e-12);
        }

        let space = TwoOscillatorSpace::full_grid(&fq(), -0.15, 3, 1).unwrap();
        let v = build_state_vector(&space, 1, 1).unwrap();
        // single ladder entries 0.85 each, divided by M0^2 = 0.7225
        let idx = space.index_of(1, 1).unwrap();
        assert!((v[idx] - 1.0).abs() < 1e-12);
        assert_eq!(v.iter().filter(|x| x.abs() > 1e-12).count(), 1);
        assert!(matches!(
            build_state_vector(&space, 3, 0),
            Err(Error::OutOfBasis { .. })
        ));
    }
}
