//! Polynomial characteristic functions and their one-dimensional dynamics.
//!
//! A characteristic function drives both algebras: successive eigenvalues of
//! `H` (or weights of `J0`) are its iterates. For quadratics the admissible
//! domain is the branch on which the function is increasing, bounded by the
//! vertex: above it for oscillator-like functions (leading coefficient > 0),
//! below it for weight-like ones (leading coefficient < 0).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{self, horner};

/// Default magnitude beyond which an orbit counts as divergent.
pub const DEFAULT_DIVERGENCE_BOUND: f64 = 1e12;

const NEUTRAL_TOL: f64 = 1e-9;
const DOUBLE_ROOT_TOL: f64 = 1e-9;
const ONE_SIDED_PROBE: f64 = 1e-6;
const ON_FIXED_POINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    /// Admissible branch lies above the vertex (`f` of a generalized
    /// Heisenberg algebra).
    #[serde(rename = "oscillator")]
    OscillatorLike,
    /// Admissible branch lies below the vertex (`g` of a generalized sl(2)).
    #[serde(rename = "weight")]
    WeightLike,
}

impl Orientation {
    pub fn name(self) -> &'static str {
        match self {
            Orientation::OscillatorLike => "oscillator",
            Orientation::WeightLike => "weight",
        }
    }
}

/// A real polynomial characteristic function `sum a_i x^i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCharFn", into = "RawCharFn")]
pub struct CharFn {
    coefficients: Vec<f64>,
    orientation: Orientation,
}

#[derive(Serialize, Deserialize)]
struct RawCharFn {
    coefficients: Vec<f64>,
    orientation: Orientation,
}

impl TryFrom<RawCharFn> for CharFn {
    type Error = Error;

    fn try_from(raw: RawCharFn) -> Result<Self> {
        CharFn::new(raw.coefficients, raw.orientation)
    }
}

impl From<CharFn> for RawCharFn {
    fn from(f: CharFn) -> Self {
        RawCharFn {
            coefficients: f.coefficients,
            orientation: f.orientation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stability {
    Attracting,
    Repelling,
    NeutralTangent,
}

/// How orbits behave on either side of a neutral fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OneSidedBehavior {
    ConvergesFromBelow,
    ConvergesFromAbove,
    DivergesBothSides,
    Attracting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointInfo {
    pub location: f64,
    pub multiplier: f64,
    pub stability: Stability,
    pub one_sided_behavior: Option<OneSidedBehavior>,
    pub in_invertible_region: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionLabel {
    OnFixedPoint,
    ConvergentInterval,
    DivergentInterval,
    OutsideInvertibleRegion,
}

impl CharFn {
    /// Builds a characteristic function from coefficients `a_0..a_n`.
    ///
    /// Trailing zero coefficients are dropped. Quadratics must have a leading
    /// coefficient whose sign matches the orientation.
    pub fn new(coefficients: Vec<f64>, orientation: Orientation) -> Result<Self> {
        if let Some(i) = coefficients.iter().position(|a| !a.is_finite()) {
            return Err(Error::NonFiniteCoefficient(i));
        }
        let mut coefficients = coefficients;
        let len = roots::trim(&coefficients).len();
        coefficients.truncate(len);
        if coefficients.len() < 2 {
            return Err(Error::ConstantFunction);
        }
        if coefficients.len() == 3 {
            let leading = coefficients[2];
            let ok = match orientation {
                Orientation::OscillatorLike => leading > 0.0,
                Orientation::WeightLike => leading < 0.0,
            };
            if !ok {
                return Err(Error::OrientationMismatch {
                    leading,
                    orientation: orientation.name(),
                });
            }
        }
        Ok(Self {
            coefficients,
            orientation,
        })
    }

    pub fn oscillator(coefficients: &[f64]) -> Result<Self> {
        Self::new(coefficients.to_vec(), Orientation::OscillatorLike)
    }

    pub fn weight(coefficients: &[f64]) -> Result<Self> {
        Self::new(coefficients.to_vec(), Orientation::WeightLike)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn is_quadratic(&self) -> bool {
        self.degree() == 2
    }

    pub(crate) fn require_orientation(&self, expected: Orientation) -> Result<()> {
        if self.orientation == expected {
            Ok(())
        } else {
            Err(Error::WrongOrientation {
                expected: expected.name(),
            })
        }
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        horner(&self.coefficients, x)
    }

    pub fn derivative_at(&self, x: f64) -> f64 {
        horner(&roots::derivative(&self.coefficients), x)
    }

    /// Coefficients of `f(x) - x`.
    pub fn fixed_point_polynomial(&self) -> Vec<f64> {
        let mut p = self.coefficients.clone();
        p[1] -= 1.0;
        p
    }

    /// `[x0, f(x0), ..., f^(m)(x0)]`, failing once an iterate exceeds
    /// [`DEFAULT_DIVERGENCE_BOUND`] in magnitude.
    pub fn iterate(&self, x0: f64, m: usize) -> Result<Vec<f64>> {
        self.iterate_bounded(x0, m, DEFAULT_DIVERGENCE_BOUND)
    }

    pub fn iterate_bounded(&self, x0: f64, m: usize, bound: f64) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(m + 1);
        let mut x = x0;
        out.push(x);
        for step in 1..=m {
            x = self.evaluate(x);
            if !x.is_finite() || x.abs() > bound {
                return Err(Error::OverflowDiverged {
                    step,
                    value: x,
                    bound,
                });
            }
            out.push(x);
        }
        Ok(out)
    }

    /// `f^(m)(x)` together with its derivative, by the chain rule.
    pub fn compose_with_derivative(&self, x: f64, m: usize) -> (f64, f64) {
        let mut value = x;
        let mut slope = 1.0;
        for _ in 0..m {
            slope *= self.derivative_at(value);
            value = self.evaluate(value);
        }
        (value, slope)
    }

    /// Discriminant of `f(x) - x = 0`: `(a1 - 1)^2 - 4 a2 a0`.
    pub fn discriminant(&self) -> Result<f64> {
        let [a0, a1, a2] = self.quadratic()?;
        Ok((a1 - 1.0) * (a1 - 1.0) - 4.0 * a2 * a0)
    }

    fn quadratic(&self) -> Result<[f64; 3]> {
        match self.coefficients[..] {
            [a0, a1, a2] => Ok([a0, a1, a2]),
            _ => Err(Error::NotQuadratic(self.degree())),
        }
    }

    fn has_double_fixed_point(&self) -> Result<bool> {
        let [a0, a1, a2] = self.quadratic()?;
        let scale = 1f64.max((a1 - 1.0) * (a1 - 1.0)).max((4.0 * a2 * a0).abs());
        Ok(self.discriminant()?.abs() <= DOUBLE_ROOT_TOL * scale)
    }

    /// The vertex `-a1 / (2 a2)` bounding the admissible branch.
    pub fn invertibility_boundary(&self) -> Result<f64> {
        let [_, a1, a2] = self.quadratic()?;
        Ok(-a1 / (2.0 * a2))
    }

    /// Whether `x` lies on the increasing branch used by the algebra.
    ///
    /// Quadratics use the vertex and the orientation; other degrees accept
    /// any point with positive slope (the boundary is then the nearest
    /// critical point).
    pub fn in_invertible_region(&self, x: f64) -> bool {
        match self.invertibility_boundary() {
            Ok(b) => match self.orientation {
                Orientation::OscillatorLike => x > b,
                Orientation::WeightLike => x < b,
            },
            Err(_) => self.derivative_at(x) > 0.0,
        }
    }

    pub fn fixed_points(&self) -> Result<Vec<FixedPointInfo>> {
        let p = self.fixed_point_polynomial();
        let locations = if self.is_quadratic() {
            roots::quadratic_roots(p[2], p[1], p[0])
        } else {
            roots::find_roots(&p, (f64::NEG_INFINITY, f64::INFINITY), 1e-15)
        };
        if locations.is_empty() {
            return Err(Error::NoRealFixedPoint);
        }
        Ok(locations
            .into_iter()
            .map(|x| self.describe_fixed_point(x))
            .collect())
    }

    fn describe_fixed_point(&self, location: f64) -> FixedPointInfo {
        let multiplier = self.derivative_at(location);
        let stability = if (multiplier.abs() - 1.0).abs() <= NEUTRAL_TOL {
            Stability::NeutralTangent
        } else if multiplier.abs() < 1.0 {
            Stability::Attracting
        } else {
            Stability::Repelling
        };
        let one_sided_behavior =
            (stability == Stability::NeutralTangent && multiplier > 0.0).then(|| {
                let below =
                    self.evaluate(location - ONE_SIDED_PROBE) - (location - ONE_SIDED_PROBE);
                let above =
                    self.evaluate(location + ONE_SIDED_PROBE) - (location + ONE_SIDED_PROBE);
                match (below > 0.0, above > 0.0) {
                    (true, true) => OneSidedBehavior::ConvergesFromBelow,
                    (false, false) => OneSidedBehavior::ConvergesFromAbove,
                    (false, true) => OneSidedBehavior::DivergesBothSides,
                    (true, false) => OneSidedBehavior::Attracting,
                }
            });
        FixedPointInfo {
            location,
            multiplier,
            stability,
            one_sided_behavior,
            in_invertible_region: self.in_invertible_region(location),
        }
    }

    /// Classifies a starting point of a quadratic with a double fixed point.
    pub fn classify_region(&self, x0: f64) -> Result<RegionLabel> {
        let boundary = self.invertibility_boundary()?;
        if !self.has_double_fixed_point()? {
            return Err(Error::UnsupportedDiscriminant(self.discriminant()?));
        }
        let p = self.fixed_point_polynomial();
        let star = -p[1] / (2.0 * p[2]);
        if (x0 - star).abs() <= ON_FIXED_POINT_TOL {
            return Ok(RegionLabel::OnFixedPoint);
        }
        let label = match self.orientation {
            Orientation::OscillatorLike if x0 <= boundary => RegionLabel::OutsideInvertibleRegion,
            Orientation::OscillatorLike if x0 < star => RegionLabel::ConvergentInterval,
            Orientation::OscillatorLike => RegionLabel::DivergentInterval,
            Orientation::WeightLike if x0 >= boundary => RegionLabel::OutsideInvertibleRegion,
            Orientation::WeightLike if x0 > star => RegionLabel::ConvergentInterval,
            Orientation::WeightLike => RegionLabel::DivergentInterval,
        };
        Ok(label)
    }

    /// The partner `g` with `g(-x) = -f(x)`.
    ///
    /// Requires `f = sum_{i>=1} a_i x^i + 1`; the partner is
    /// `sum_{i>=1} abar_i x^i - 1` with `abar_i = -a_i` for even `i` and
    /// `abar_i = a_i` for odd `i`, oriented the other way.
    pub fn reflection_pair(&self) -> Result<CharFn> {
        if self.coefficients[0] != 1.0 {
            return Err(Error::PairingMismatch(format!(
                "constant term must be 1, found {}",
                self.coefficients[0]
            )));
        }
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, &a)| if i % 2 == 0 { -a } else { a })
            .collect();
        let orientation = match self.orientation {
            Orientation::OscillatorLike => Orientation::WeightLike,
            Orientation::WeightLike => Orientation::OscillatorLike,
        };
        CharFn::new(coefficients, orientation)
    }
}
