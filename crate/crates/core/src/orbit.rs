//! Cobweb plot data for characteristic-function orbits.

use serde::{Deserialize, Serialize};

use crate::charfun::{CharFn, FixedPointInfo, RegionLabel, DEFAULT_DIVERGENCE_BOUND};
use crate::error::{Error, Result};
use crate::gsl2::cut_condition_solve;
use crate::matrix::format_float;

pub const DEFAULT_SAMPLES: usize = 512;

/// Relative padding added on each side of a figure's landmark range.
pub const WINDOW_PADDING: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    /// `(x_k, x_k) -> (x_k, f(x_k))`: diagonal to curve.
    Vertical,
    /// `(x_k, x_{k+1}) -> (x_{k+1}, x_{k+1})`: curve to diagonal.
    Horizontal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    pub from: (f64, f64),
    pub to: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineOrientation {
    Vertical,
    Horizontal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuideLine {
    pub orientation: LineOrientation,
    pub value: f64,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CobwebOptions {
    pub samples: usize,
    pub bound: f64,
}

impl Default for CobwebOptions {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            bound: DEFAULT_DIVERGENCE_BOUND,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub figure: String,
    pub series: String,
    #[serde(rename = "fn")]
    pub char_fn: CharFn,
    pub x0: f64,
    pub window: (f64, f64),
    pub fn_samples: Vec<(f64, f64)>,
    pub diagonal_samples: Vec<(f64, f64)>,
    pub cobweb_segments: Vec<Segment>,
    /// `x0, f(x0), ...` up to the requested step count, stopping early only
    /// at the divergence bound.
    pub iterates: Vec<f64>,
    /// The cobweb stopped before `steps` because the orbit left the window
    /// or crossed the divergence bound.
    pub truncated: bool,
    /// An iterate exceeded the divergence bound.
    pub diverged: bool,
    pub fixed_points: Vec<FixedPointInfo>,
    pub boundary: Option<f64>,
    pub guide_lines: Vec<GuideLine>,
    pub region_label: Option<RegionLabel>,
}

pub fn cobweb(f: &CharFn, x0: f64, steps: usize, window: (f64, f64)) -> OrbitReport {
    cobweb_with(f, x0, steps, window, &CobwebOptions::default())
}

/// Cobweb trace from `x0`.
///
/// The segment pair for step `k` is drawn while `x_k` lies in the window; the
/// pair that carries the orbit out of the window is the last one drawn.
pub fn cobweb_with(
    f: &CharFn,
    x0: f64,
    steps: usize,
    window: (f64, f64),
    opts: &CobwebOptions,
) -> OrbitReport {
    let (lo, hi) = window;
    let inside = |x: f64| x >= lo && x <= hi;

    let mut iterates = vec![x0];
    let mut diverged = false;
    let mut x = x0;
    for _ in 0..steps {
        let next = f.evaluate(x);
        if !next.is_finite() || next.abs() > opts.bound {
            diverged = true;
            break;
        }
        iterates.push(next);
        x = next;
    }

    let mut cobweb_segments = Vec::new();
    for pair in iterates.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if !inside(a) {
            break;
        }
        cobweb_segments.push(Segment {
            kind: SegmentKind::Vertical,
            from: (a, a),
            to: (a, b),
        });
        cobweb_segments.push(Segment {
            kind: SegmentKind::Horizontal,
            from: (a, b),
            to: (b, b),
        });
    }
    let truncated = cobweb_segments.len() < 2 * steps;

    let n = opts.samples.max(2);
    let xs: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();

    OrbitReport {
        figure: "cobweb".into(),
        series: "orbit".into(),
        char_fn: f.clone(),
        x0,
        window,
        fn_samples: xs.iter().map(|&x| (x, f.evaluate(x))).collect(),
        diagonal_samples: xs.iter().map(|&x| (x, x)).collect(),
        cobweb_segments,
        iterates,
        truncated,
        diverged,
        fixed_points: f.fixed_points().unwrap_or_default(),
        boundary: f.invertibility_boundary().ok(),
        guide_lines: Vec::new(),
        region_label: f.classify_region(x0).ok(),
    }
}

impl OrbitReport {
    /// x-coordinates of successive horizontal segment endpoints, preceded by
    /// the start point.
    pub fn cobweb_orbit(&self) -> Vec<f64> {
        std::iter::once(self.x0)
            .chain(
                self.cobweb_segments
                    .iter()
                    .filter(|s| s.kind == SegmentKind::Horizontal)
                    .map(|s| s.to.0),
            )
            .collect()
    }

    pub fn file_stem(&self) -> String {
        format!("{}_{}", self.figure, self.series)
    }

    /// Curve samples: `x, fn(x), diagonal`.
    pub fn curve_csv(&self) -> Result<String> {
        let mut w = csv_writer();
        write(&mut w, ["x", "fn", "diagonal"])?;
        for ((x, y), (_, d)) in self.fn_samples.iter().zip(&self.diagonal_samples) {
            write(
                &mut w,
                [format_float(*x), format_float(*y), format_float(*d)],
            )?;
        }
        finish(w)
    }

    pub fn cobweb_csv(&self) -> Result<String> {
        let mut w = csv_writer();
        write(&mut w, ["segment", "kind", "x1", "y1", "x2", "y2"])?;
        for (i, s) in self.cobweb_segments.iter().enumerate() {
            let kind = match s.kind {
                SegmentKind::Vertical => "vertical",
                SegmentKind::Horizontal => "horizontal",
            };
            write(
                &mut w,
                [
                    i.to_string(),
                    kind.to_string(),
                    format_float(s.from.0),
                    format_float(s.from.1),
                    format_float(s.to.0),
                    format_float(s.to.1),
                ],
            )?;
        }
        finish(w)
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn write<I, T>(w: &mut csv::Writer<Vec<u8>>, record: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: AsRef<[u8]>,
{
    w.write_record(record)
        .map_err(|e| Error::Csv(e.to_string()))
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Csv(e.to_string()))
}

/// Limit of an orbit creeping monotonically toward a tangent fixed point.
///
/// Fits `f(x) - x = c (x - L)^2` to the last three iterates, which is exact
/// when `f(x) - x` is a perfect square. Returns `None` when the last two
/// steps do not shrink in the same direction.
pub fn tangent_limit_estimate(iterates: &[f64]) -> Option<f64> {
    let n = iterates.len();
    if n < 3 {
        return None;
    }
    let (x0, x1, x2) = (iterates[n - 3], iterates[n - 2], iterates[n - 1]);
    let (d0, d1) = (x1 - x0, x2 - x1);
    if d0 == 0.0 && d1 == 0.0 {
        return Some(x2);
    }
    if d0 * d1 <= 0.0 || d1.abs() >= d0.abs() {
        return None;
    }
    let r = (d0 / d1).sqrt();
    Some((r * x1 - x0) / (r - 1.0))
}

/// Window spanning `landmarks`, padded by [`WINDOW_PADDING`] of the span on
/// each side.
pub fn padded_window(landmarks: &[f64]) -> (f64, f64) {
    let lo = landmarks.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = landmarks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pad = WINDOW_PADDING * (hi - lo).max(1e-3);
    (lo - pad, hi + pad)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::Fig1, Figure::Fig2, Figure::Fig3, Figure::Fig4];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
        }
    }
}

impl std::str::FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidData(format!("unknown figure {s:?}")))
    }
}

pub const FIG1_STEPS: usize = 200;
pub const FIG2_STEPS: usize = 60;
pub const FIG4_STEPS: usize = 40;

fn fig1_fn() -> CharFn {
    CharFn::oscillator(&[1.225, -2.5, 2.5]).expect("valid quadratic")
}

fn quadratic_g() -> CharFn {
    CharFn::weight(&[-1.0, 3.0, -1.0]).expect("valid quadratic")
}

fn quadratic_f() -> CharFn {
    CharFn::oscillator(&[1.0, 3.0, 1.0]).expect("valid quadratic")
}

fn labelled(mut r: OrbitReport, figure: Figure, series: &str) -> OrbitReport {
    r.figure = figure.name().into();
    r.series = series.into();
    r
}

pub fn figure_bundle(figure: Figure) -> Vec<OrbitReport> {
    figure_bundle_with(figure, &CobwebOptions::default())
}

/// Plot data for the four reference figures:
///
/// * `fig1`: `2.5x^2 - 2.5x + 1.225` from 0.56 (converging to 0.7) and 0.85
///   (escaping);
/// * `fig2`: `-x^2 + 3x - 1` from -0.05 (escaping to -infinity);
/// * `fig3`: the same `g` from the two-dimensional cut root, with the cut line
///   `-alpha_j - 1` reached after two steps;
/// * `fig4`: `x^2 + 3x + 1` from -0.15 and its reflection partner from 0.15.
pub fn figure_bundle_with(figure: Figure, opts: &CobwebOptions) -> Vec<OrbitReport> {
    match figure {
        Figure::Fig1 => {
            let f = fig1_fn();
            let window = padded_window(&[0.5, 0.7, 0.56, 0.85]);
            vec![
                labelled(cobweb_with(&f, 0.56, FIG1_STEPS, window, opts), figure, "a"),
                labelled(cobweb_with(&f, 0.85, FIG1_STEPS, window, opts), figure, "b"),
            ]
        }
        Figure::Fig2 => {
            let g = quadratic_g();
            let window = padded_window(&[1.5, 1.0, -0.05]);
            vec![labelled(
                cobweb_with(&g, -0.05, FIG2_STEPS, window, opts),
                figure,
                "g",
            )]
        }
        Figure::Fig3 => {
            let g = quadratic_g();
            let alpha_j = cut_condition_solve(&g, 2)
                .expect("degree 2 cut condition is solvable")
                .included
                .first()
                .copied()
                .expect("quadratic g has an admissible two-dimensional cut root");
            let cut = -alpha_j - 1.0;
            let window = padded_window(&[1.5, 1.0, alpha_j, cut]);
            let mut r = labelled(cobweb_with(&g, alpha_j, 2, window, opts), figure, "g");
            r.guide_lines.push(GuideLine {
                orientation: LineOrientation::Vertical,
                value: cut,
                label: "-alpha_j - 1".into(),
            });
            vec![r]
        }
        Figure::Fig4 => {
            let f = quadratic_f();
            let g = quadratic_g();
            let window = padded_window(&[-1.5, 1.5, -1.0, 1.0, -0.15, 0.15]);
            vec![
                labelled(
                    cobweb_with(&f, -0.15, FIG4_STEPS, window, opts),
                    figure,
                    "f",
                ),
                labelled(cobweb_with(&g, 0.15, FIG4_STEPS, window, opts), figure, "g"),
            ]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fig1_window_and_convergence() {
        let f = fig1_fn();
        let r = cobweb(&f, 0.56, 50, (0.4, 1.0));
        assert_eq!(r.region_label, Some(RegionLabel::ConvergentInterval));
        assert!(!r.truncated);
        let last = *r.iterates.last().unwrap();
        assert!(last > 0.68 && last < 0.7);
    }

    #[test]
    fn segments_alternate_and_connect() {
        let f = fig1_fn();
        let r = cobweb(&f, 0.56, 30, (0.4, 1.0));
        assert_eq!(r.cobweb_segments.len(), 60);
        for (i, s) in r.cobweb_segments.iter().enumerate() {
            let expected = if i % 2 == 0 {
                SegmentKind::Vertical
            } else {
                SegmentKind::Horizontal
            };
            assert_eq!(s.kind, expected);
            if s.kind == SegmentKind::Vertical {
                assert_eq!(s.to.1, f.evaluate(s.from.0));
            }
            if i > 0 {
                assert_eq!(r.cobweb_segments[i - 1].to, s.from);
            }
        }
        assert_eq!(r.cobweb_orbit(), f.iterate(0.56, 30).unwrap());
    }

    #[test]
    fn start_on_fixed_point_is_degenerate() {
        let r = cobweb(&fig1_fn(), 0.7, 5, (0.4, 1.0));
        assert_eq!(r.region_label, Some(RegionLabel::OnFixedPoint));
        assert!(r
            .cobweb_segments
            .iter()
            .all(|s| (s.from.0 - s.to.0).abs() + (s.from.1 - s.to.1).abs() < 1e-15));
    }

    #[test]
    fn escaping_orbit_is_truncated() {
        let g = quadratic_g();
        let r = cobweb(&g, -0.05, 40, (-0.4, 1.8));
        assert!(r.truncated);
        assert_eq!(r.cobweb_segments.len(), 2);
        assert!(r.diverged);
        assert!(r.iterates.iter().any(|&x| x < -1e6));
    }

    #[test]
    fn windows_pad_landmarks() {
        let (lo, hi) = padded_window(&[0.5, 0.85]);
        assert_relative_eq!(lo, 0.43, epsilon = 1e-12);
        assert_relative_eq!(hi, 0.92, epsilon = 1e-12);
    }

    #[test]
    fn tangent_limit_of_fig1() {
        let iterates = fig1_fn().iterate(0.56, 200).unwrap();
        assert!((iterates[200] - 0.7).abs() > 1e-3);
        let limit = tangent_limit_estimate(&iterates).unwrap();
        assert!((limit - 0.7).abs() < 1e-6, "{limit}");
        assert_eq!(tangent_limit_estimate(&[1.0, 2.0]), None);
        assert_eq!(tangent_limit_estimate(&[0.0, 1.0, 3.0]), None);
    }

    #[test]
    fn bundles() {
        let fig1 = figure_bundle(Figure::Fig1);
        assert_eq!(fig1.len(), 2);
        assert_eq!(fig1[0].boundary, Some(0.5));
        assert_relative_eq!(fig1[0].fixed_points[0].location, 0.7, epsilon = 1e-12);

        let fig3 = &figure_bundle(Figure::Fig3)[0];
        let cut = fig3.guide_lines[0].value;
        assert!((cut + 1.33479).abs() < 1e-4);
        assert!((fig3.iterates[2] - cut).abs() < 1e-9);
        assert_eq!(fig3.cobweb_segments.len(), 4);

        let fig4 = figure_bundle(Figure::Fig4);
        let (f, g) = (&fig4[0], &fig4[1]);
        let n = f.iterates.len().min(g.iterates.len());
        assert!(n > 2);
        for m in 0..n {
            assert!((g.iterates[m] + f.iterates[m]).abs() <= 1e-12 * f.iterates[m].abs().max(1.0));
        }
    }

    #[test]
    fn csv_exports() {
        let r = &figure_bundle(Figure::Fig3)[0];
        let curve = r.curve_csv().unwrap();
        assert!(curve.starts_with("x,fn,diagonal\n"));
        assert_eq!(curve.lines().count(), DEFAULT_SAMPLES + 1);
        let web = r.cobweb_csv().unwrap();
        assert_eq!(web.lines().count(), 5);
        assert!(web.lines().nth(1).unwrap().starts_with("0,vertical,"));
        assert_eq!(r.file_stem(), "fig3_g");
    }

    #[test]
    fn figure_names_parse() {
        for f in Figure::ALL {
            assert_eq!(f.name().parse::<Figure>().unwrap(), f);
        }
        assert!("fig5".parse::<Figure>().is_err());
    }
}
