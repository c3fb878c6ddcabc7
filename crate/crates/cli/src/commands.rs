use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use gjs_core::charfun::{CharFn, FixedPointInfo, RegionLabel, DEFAULT_DIVERGENCE_BOUND};
use gjs_core::error::Error;
use gjs_core::gha::{build_gha, verify_gha_matrices, GhaRep};
use gjs_core::gsl2::{
    build_gsl2, cut_condition_solve, periodic_condition_solve, verify_gsl2_matrices, ExcludedRoot,
    Gsl2Rep, RepKind, CLOSURE_TOL,
};
use gjs_core::jsmap::{
    build_jsmap, compare_realization, pairing_sequences, verify_jsmap_relations, JsMapRep,
    SpaceMode,
};
use gjs_core::matrix::OperatorMatrix;
use gjs_core::orbit::{
    cobweb_with, figure_bundle_with, padded_window, tangent_limit_estimate, CobwebOptions,
    GuideLine, OrbitReport,
};
use gjs_core::report::{Coverage, ResidualReport};
use serde::Serialize;
use serde_json::Value;

use crate::args::{
    CharfunCommand, Command, GhaCommand, Gsl2Command, JsmapCommand, MapParams, OrbitCommand,
};
use crate::perturb::{unknown_target, Perturbation};

pub const BOUND_ENV: &str = "GJS_DIVERGENCE_BOUND";

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub divergence_bound: f64,
}

impl Settings {
    pub fn from_env() -> Result<Self> {
        let divergence_bound = match std::env::var(BOUND_ENV) {
            Ok(s) => {
                let b: f64 = s
                    .trim()
                    .parse()
                    .with_context(|| format!("{BOUND_ENV}={s:?} is not a number"))?;
                if !(b.is_finite() && b > 0.0) {
                    bail!("{BOUND_ENV} must be a positive finite number, got {s:?}");
                }
                b
            }
            Err(_) => DEFAULT_DIVERGENCE_BOUND,
        };
        Ok(Self { divergence_bound })
    }
}

/// Result of one subcommand, computed entirely in memory.
#[derive(Debug, Clone)]
pub struct Outcome {
    /// Pretty-printed JSON document, also written as `result.json`.
    pub document: String,
    /// Extra files (name, contents) for the output directory.
    pub files: Vec<(String, String)>,
    pub out: Option<PathBuf>,
    /// `Some(false)` when a verification report failed.
    pub verified: Option<bool>,
}

impl Outcome {
    fn new(doc: &impl Serialize, out: Option<PathBuf>) -> Result<Self> {
        let mut document = serde_json::to_string_pretty(doc)?;
        document.push('\n');
        Ok(Self {
            document,
            files: Vec::new(),
            out,
            verified: None,
        })
    }

    fn verified(mut self, passed: bool) -> Self {
        self.verified = Some(passed);
        self
    }

    fn with_matrix(mut self, name: &str, m: &OperatorMatrix) -> Result<Self> {
        self.files.push((format!("{name}.csv"), m.to_csv()?));
        Ok(self)
    }

    pub fn write(&self) -> Result<()> {
        let Some(dir) = &self.out else {
            return Ok(());
        };
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        write_file(&dir.join("result.json"), &self.document)?;
        for (name, contents) in &self.files {
            write_file(&dir.join(name), contents)?;
        }
        Ok(())
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// The output directory a command declares, if any.
pub fn declared_out(cmd: &Command) -> Option<&Path> {
    let out = match cmd {
        Command::Charfun(CharfunCommand::Analyze { output, .. })
        | Command::Gha(GhaCommand::Build { output, .. })
        | Command::Gsl2(Gsl2Command::Build { output, .. })
        | Command::Gsl2(Gsl2Command::Cut { output, .. })
        | Command::Gsl2(Gsl2Command::Periodic { output, .. })
        | Command::Jsmap(JsmapCommand::Build { output, .. })
        | Command::Jsmap(JsmapCommand::Verify { output, .. })
        | Command::Jsmap(JsmapCommand::Pairing { output, .. })
        | Command::Orbit(OrbitCommand::Cobweb { output, .. }) => output.out.as_deref(),
        Command::Orbit(OrbitCommand::Figure { out, .. }) => Some(out.as_path()),
        Command::Run { .. } => None,
    };
    out
}

pub fn execute(cmd: &Command, settings: &Settings) -> Result<Outcome> {
    let out = declared_out(cmd).map(Path::to_path_buf);
    match cmd {
        Command::Charfun(CharfunCommand::Analyze { f, x0, .. }) => analyze(f, *x0, out),
        Command::Gha(GhaCommand::Build {
            f,
            alpha0,
            dim,
            check,
            ..
        }) => {
            let rep = build_gha(f, *alpha0, *dim)?;
            let report = if check.verify || check.perturb.is_some() {
                Some(verify_gha(&rep, check.perturb.as_ref(), check.tol)?)
            } else {
                None
            };
            let passed = report.as_ref().map(|r| r.passed);
            let m = rep.matrices();
            let mut outcome = Outcome::new(&RepDocument { rep: &rep, report }, out)?
                .with_matrix("H", &m.h)?
                .with_matrix("A", &m.a)?
                .with_matrix("Adag", &m.adag)?
                .with_matrix("casimir", &rep.casimir())?;
            outcome.verified = passed;
            Ok(outcome)
        }
        Command::Gsl2(Gsl2Command::Build {
            gn,
            alphaj,
            dim,
            kind,
            check,
            ..
        }) => {
            let rep = build_gsl2(gn, *alphaj, *dim, (*kind).into())?;
            let report = if check.verify || check.perturb.is_some() {
                Some(verify_gsl2(&rep, check.perturb.as_ref(), check.tol)?)
            } else {
                None
            };
            let passed = report.as_ref().map(|r| r.passed);
            let m = rep.matrices();
            let mut outcome = Outcome::new(&RepDocument { rep: &rep, report }, out)?
                .with_matrix("J0", &m.j0)?
                .with_matrix("Jplus", &m.jplus)?
                .with_matrix("Jminus", &m.jminus)?
                .with_matrix("casimir", &rep.casimir())?;
            outcome.verified = passed;
            Ok(outcome)
        }
        Command::Gsl2(Gsl2Command::Cut { gn, d, .. }) => {
            let s = cut_condition_solve(gn, *d)?;
            let doc = CutDocument {
                gn,
                d: *d,
                included_residuals: s
                    .included
                    .iter()
                    .map(|&a| (a + gn.compose_with_derivative(a, *d).0 + 1.0).abs())
                    .collect(),
                included: s.included,
                excluded: s.excluded,
            };
            Outcome::new(&doc, out)
        }
        Command::Gsl2(Gsl2Command::Periodic { gn, d, .. }) => {
            let roots = periodic_condition_solve(gn, *d)?;
            Outcome::new(
                &serde_json::json!({ "gn": gn, "d": d, "roots": roots }),
                out,
            )
        }
        Command::Jsmap(JsmapCommand::Build { params, .. }) => {
            let js = build_map(params)?;
            Outcome::new(&js.document(), out)?
                .with_matrix("S_z", js.s_z())?
                .with_matrix("S_plus", js.s_plus())?
                .with_matrix("S_minus", js.s_minus())?
                .with_matrix("S_sq", js.s_sq())?
                .with_matrix("F", js.functional_f())?
                .with_matrix("G", js.functional_g())
        }
        Command::Jsmap(JsmapCommand::Verify {
            params,
            kind,
            tol,
            perturb,
            ..
        }) => {
            let js = build_map(params)?;
            let kind = kind
                .map(RepKind::from)
                .unwrap_or_else(|| infer_kind(&js, params.two_j));
            let rep = build_gsl2(&params.gn, params.alphaj, params.two_j + 1, kind)?;
            let doc = verify_map(&js, &rep, params, perturb.as_ref(), *tol)?;
            let passed = doc.passed;
            Ok(Outcome::new(&doc, out)?.verified(passed))
        }
        Command::Jsmap(JsmapCommand::Pairing {
            f,
            alpha0,
            mmax,
            tol,
            perturb,
            ..
        }) => {
            let gn = f.reflection_pair()?;
            let alpha_j = -alpha0;
            let mut seq = pairing_sequences(f, *alpha0, &gn, alpha_j, *mmax)?;
            if let Some(p) = perturb {
                if p.applies_to("oscillator_side") {
                    p.apply_sequence_scaled(&mut seq.oscillator_side)?;
                } else if p.applies_to("weight_side") {
                    p.apply_sequence_scaled(&mut seq.weight_side)?;
                } else {
                    return Err(unknown_target(p, &["oscillator_side", "weight_side"]));
                }
            }
            let report = seq.report(*tol);
            let passed = report.passed;
            let doc = serde_json::json!({
                "fn": f,
                "alpha0": alpha0,
                "gn": gn,
                "alpha_j": alpha_j,
                "m_max": mmax,
                "sequences": seq,
                "report": report,
            });
            Ok(Outcome::new(&doc, out)?.verified(passed))
        }
        Command::Orbit(OrbitCommand::Figure { name, .. }) => {
            let opts = CobwebOptions {
                bound: settings.divergence_bound,
                ..CobwebOptions::default()
            };
            let reports = figure_bundle_with(*name, &opts);
            let summaries: Vec<OrbitSummary> = reports.iter().map(OrbitSummary::from).collect();
            let mut outcome = Outcome::new(&summaries, out)?;
            for r in &reports {
                push_orbit_files(&mut outcome, r)?;
            }
            Ok(outcome)
        }
        Command::Orbit(OrbitCommand::Cobweb {
            f,
            x0,
            steps,
            window,
            samples,
            ..
        }) => {
            if *steps == 0 {
                bail!("--steps must be at least 1");
            }
            let window = window.unwrap_or_else(|| default_window(f, *x0));
            let opts = CobwebOptions {
                samples: *samples,
                bound: settings.divergence_bound,
            };
            let r = cobweb_with(f, *x0, *steps, window, &opts);
            let mut outcome = Outcome::new(&r, out)?;
            push_orbit_files(&mut outcome, &r)?;
            Ok(outcome)
        }
        Command::Run { .. } => bail!("run jobs cannot be nested"),
    }
}

fn analyze(f: &CharFn, x0: Option<f64>, out: Option<PathBuf>) -> Result<Outcome> {
    let fixed_points = match f.fixed_points() {
        Ok(p) => p,
        Err(Error::NoRealFixedPoint) => Vec::new(),
        Err(e) => return Err(e.into()),
    };
    let doc = Analysis {
        f,
        degree: f.degree(),
        fixed_points,
        discriminant: f.discriminant().ok(),
        boundary: f.invertibility_boundary().ok(),
        x0,
        in_invertible_region: x0.map(|x| f.in_invertible_region(x)),
        region: x0.and_then(|x| f.classify_region(x).ok()),
    };
    Outcome::new(&doc, out)
}

#[derive(Serialize)]
struct Analysis<'a> {
    #[serde(rename = "fn")]
    f: &'a CharFn,
    degree: usize,
    fixed_points: Vec<FixedPointInfo>,
    /// Only defined for quadratics.
    discriminant: Option<f64>,
    boundary: Option<f64>,
    x0: Option<f64>,
    in_invertible_region: Option<bool>,
    /// Only defined for quadratics with a double fixed point.
    region: Option<RegionLabel>,
}

#[derive(Serialize)]
struct RepDocument<'a, T> {
    rep: &'a T,
    report: Option<ResidualReport>,
}

#[derive(Serialize)]
struct CutDocument<'a> {
    gn: &'a CharFn,
    d: usize,
    included: Vec<f64>,
    included_residuals: Vec<f64>,
    excluded: Vec<ExcludedRoot>,
}

/// Rebuilds `rep` after editing one stored sequence entry.
fn edited<T>(rep: &T, p: &Perturbation, field: &str) -> Result<T>
where
    T: Serialize + serde::de::DeserializeOwned,
{
    let mut value: Value = serde_json::to_value(rep)?;
    p.apply_json(&mut value, field)?;
    Ok(serde_json::from_value(value)?)
}

fn verify_gha(rep: &GhaRep, perturb: Option<&Perturbation>, tol: f64) -> Result<ResidualReport> {
    const TARGETS: [&str; 5] = ["H", "A", "Adag", "ladder", "eigenvalues"];
    let rep = match perturb {
        Some(p) if p.applies_to("ladder") => edited(rep, p, "ladder")?,
        Some(p) if p.applies_to("eigenvalues") => edited(rep, p, "eigenvalues")?,
        _ => rep.clone(),
    };
    let mut m = rep.matrices();
    if let Some(p) = perturb {
        match p.target.to_ascii_lowercase().as_str() {
            "h" => p.apply_matrix(&mut m.h)?,
            "a" => p.apply_matrix(&mut m.a)?,
            "adag" => p.apply_matrix(&mut m.adag)?,
            "ladder" | "eigenvalues" => {}
            _ => return Err(unknown_target(p, &TARGETS)),
        }
    }
    Ok(verify_gha_matrices(&m, rep.char_fn(), rep.alpha0(), tol))
}

fn verify_gsl2(rep: &Gsl2Rep, perturb: Option<&Perturbation>, tol: f64) -> Result<ResidualReport> {
    const TARGETS: [&str; 5] = ["J0", "Jplus", "Jminus", "weights", "ladder_sq"];
    let rep = match perturb {
        Some(p) if p.applies_to("weights") => edited(rep, p, "weights")?,
        Some(p) if p.applies_to("ladder_sq") => edited(rep, p, "ladder_sq")?,
        _ => rep.clone(),
    };
    let mut m = rep.matrices();
    if let Some(p) = perturb {
        match p.target.to_ascii_lowercase().as_str() {
            "j0" => p.apply_matrix(&mut m.j0)?,
            "jplus" => p.apply_matrix(&mut m.jplus)?,
            "jminus" => p.apply_matrix(&mut m.jminus)?,
            "weights" | "ladder_sq" => {}
            _ => return Err(unknown_target(p, &TARGETS)),
        }
    }
    Ok(verify_gsl2_matrices(
        &m,
        rep.char_fn(),
        rep.alpha_j(),
        rep.kind().coverage(),
        tol,
    ))
}

fn build_map(p: &MapParams) -> Result<JsMapRep> {
    let mode = match p.full_grid {
        Some(dim) => SpaceMode::FullGrid {
            dim,
            designated_two_j: p.two_j,
        },
        None => SpaceMode::FixedJ { two_j: p.two_j },
    };
    Ok(build_jsmap(&p.f, p.alpha0, &p.gn, p.alphaj, mode)?)
}

/// Finite kind when the weight after the shell closes it, truncated otherwise.
fn infer_kind(js: &JsMapRep, two_j: usize) -> RepKind {
    let a = js.alpha_j();
    let (w, _) = js.char_fn().compose_with_derivative(a, two_j + 1);
    if (a + w + 1.0).abs() <= CLOSURE_TOL {
        RepKind::FiniteCut
    } else if (w - a).abs() <= CLOSURE_TOL {
        RepKind::FinitePeriodic
    } else {
        RepKind::TruncatedInfinite
    }
}

#[derive(Serialize)]
struct MapVerification {
    two_j: usize,
    kind: RepKind,
    /// Largest entrywise difference between the realization and the direct
    /// representation.
    max_difference: f64,
    equality: ResidualReport,
    relations: ResidualReport,
    passed: bool,
}

fn verify_map(
    js: &JsMapRep,
    rep: &Gsl2Rep,
    params: &MapParams,
    perturb: Option<&Perturbation>,
    tol: f64,
) -> Result<MapVerification> {
    const TARGETS: [&str; 8] = ["Sz", "Splus", "Sminus", "S2", "J0", "Jplus", "Jminus", "C"];
    let mut shell = js.shell(params.two_j)?;
    let mut j = rep.matrices();
    let mut c = rep.casimir();
    if let Some(p) = perturb {
        let m = match p.target.to_ascii_lowercase().as_str() {
            "sz" => &mut shell.s_z,
            "splus" => &mut shell.s_plus,
            "sminus" => &mut shell.s_minus,
            "s2" => &mut shell.s_sq,
            "j0" => &mut j.j0,
            "jplus" => &mut j.jplus,
            "jminus" => &mut j.jminus,
            "c" => &mut c,
            _ => return Err(unknown_target(p, &TARGETS)),
        };
        p.apply_matrix(m)?;
    }
    let equality = compare_realization(&shell, &j, &c, tol);
    let coverage = if js.designated_shell_closes() {
        Coverage::All
    } else {
        Coverage::Interior
    };
    let mut relations =
        verify_gsl2_matrices(&shell.as_gsl2(), &params.gn, params.alphaj, coverage, tol);
    let conserved = verify_jsmap_relations(js, tol)?
        .get("[S, N1+N2]")
        .unwrap_or(f64::NAN);
    relations.push("[S, N1+N2]", conserved);
    Ok(MapVerification {
        two_j: params.two_j,
        kind: rep.kind(),
        max_difference: equality.worst(),
        passed: equality.passed && relations.passed,
        equality,
        relations,
    })
}

fn default_window(f: &CharFn, x0: f64) -> (f64, f64) {
    let mut landmarks = vec![x0, f.evaluate(x0)];
    landmarks.extend(
        f.fixed_points()
            .unwrap_or_default()
            .iter()
            .map(|p| p.location),
    );
    landmarks.extend(f.invertibility_boundary().ok());
    landmarks.retain(|x| x.is_finite());
    padded_window(&landmarks)
}

fn push_orbit_files(outcome: &mut Outcome, r: &OrbitReport) -> Result<()> {
    let stem = r.file_stem();
    let mut json = serde_json::to_string_pretty(r)?;
    json.push('\n');
    outcome.files.push((format!("{stem}.json"), json));
    outcome
        .files
        .push((format!("{stem}_curve.csv"), r.curve_csv()?));
    outcome
        .files
        .push((format!("{stem}_cobweb.csv"), r.cobweb_csv()?));
    Ok(())
}

#[derive(Serialize)]
struct OrbitSummary {
    figure: String,
    series: String,
    x0: f64,
    window: (f64, f64),
    steps: usize,
    last_iterate: f64,
    /// Tangent-fit estimate of the orbit's limit, when it creeps monotonically.
    limit_estimate: Option<f64>,
    truncated: bool,
    diverged: bool,
    region_label: Option<RegionLabel>,
    fixed_points: Vec<f64>,
    boundary: Option<f64>,
    guide_lines: Vec<GuideLine>,
    files: Vec<String>,
}

impl From<&OrbitReport> for OrbitSummary {
    fn from(r: &OrbitReport) -> Self {
        let stem = r.file_stem();
        Self {
            figure: r.figure.clone(),
            series: r.series.clone(),
            x0: r.x0,
            window: r.window,
            steps: r.iterates.len() - 1,
            last_iterate: *r.iterates.last().expect("orbit contains its start point"),
            limit_estimate: if r.diverged {
                None
            } else {
                tangent_limit_estimate(&r.iterates)
            },
            truncated: r.truncated,
            diverged: r.diverged,
            region_label: r.region_label,
            fixed_points: r.fixed_points.iter().map(|p| p.location).collect(),
            boundary: r.boundary,
            guide_lines: r.guide_lines.clone(),
            files: vec![
                format!("{stem}.json"),
                format!("{stem}_curve.csv"),
                format!("{stem}_cobweb.csv"),
            ],
        }
    }
}
