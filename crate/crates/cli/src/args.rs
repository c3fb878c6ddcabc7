use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gjs_core::charfun::CharFn;
use gjs_core::gsl2::RepKind;
use gjs_core::orbit::Figure;

use crate::perturb::Perturbation;

#[derive(Debug, Parser)]
#[command(
    name = "gjs",
    version,
    about = "Generalized Heisenberg / generalized sl(2) representations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Characteristic-function analysis.
    #[command(subcommand)]
    Charfun(CharfunCommand),
    /// Generalized Heisenberg algebra representations.
    #[command(subcommand)]
    Gha(GhaCommand),
    /// Generalized sl(2) representations and closure conditions.
    #[command(subcommand)]
    Gsl2(Gsl2Command),
    /// Two-oscillator realization of generalized sl(2).
    #[command(subcommand)]
    Jsmap(JsmapCommand),
    /// Cobweb plot data.
    #[command(subcommand)]
    Orbit(OrbitCommand),
    /// Run a batch of jobs from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum CharfunCommand {
    /// Fixed points, discriminant, invertibility boundary and region of a start point.
    Analyze {
        #[arg(long = "fn", value_parser = parse_char_fn)]
        f: CharFn,
        #[arg(long, allow_hyphen_values = true)]
        x0: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Args)]
pub struct Output {
    /// Directory receiving `result.json` and any CSV files.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Verification {
    /// Verify the defining relations and report residuals.
    #[arg(long)]
    pub verify: bool,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Perturb one entry before verifying: `TARGET:ROW:COL:DELTA` for
    /// matrices, `TARGET:INDEX:DELTA` for sequences.
    #[arg(long, value_parser = Perturbation::parse)]
    pub perturb: Option<Perturbation>,
}

#[derive(Debug, Subcommand)]
pub enum GhaCommand {
    /// Build the truncated Fock representation of H, A, A+.
    Build {
        #[arg(long = "fn", value_parser = parse_char_fn)]
        f: CharFn,
        #[arg(long, allow_hyphen_values = true)]
        alpha0: f64,
        #[arg(long)]
        dim: usize,
        #[command(flatten)]
        check: Verification,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Periodic,
    Cut,
    Truncated,
}

impl From<KindArg> for RepKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Periodic => RepKind::FinitePeriodic,
            KindArg::Cut => RepKind::FiniteCut,
            KindArg::Truncated => RepKind::TruncatedInfinite,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Gsl2Command {
    /// Build the highest-weight representation of J0, J+, J-.
    Build {
        #[arg(long, value_parser = parse_char_fn)]
        gn: CharFn,
        #[arg(long, allow_hyphen_values = true)]
        alphaj: f64,
        #[arg(long)]
        dim: usize,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[command(flatten)]
        check: Verification,
        #[command(flatten)]
        output: Output,
    },
    /// Highest weights closing a d-dimensional representation by the cut condition.
    Cut {
        #[arg(long, value_parser = parse_char_fn)]
        gn: CharFn,
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Highest weights with g^(d)(alpha) = alpha.
    Periodic {
        #[arg(long, value_parser = parse_char_fn)]
        gn: CharFn,
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Args)]
pub struct MapParams {
    #[arg(long = "fn", value_parser = parse_char_fn)]
    pub f: CharFn,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha0: f64,
    #[arg(long, value_parser = parse_char_fn)]
    pub gn: CharFn,
    #[arg(long, allow_hyphen_values = true)]
    pub alphaj: f64,
    /// Shell label j as `p/q`, an integer or a decimal half-integer.
    #[arg(long = "j", value_parser = parse_two_j)]
    pub two_j: usize,
    /// Build on the full grid n1, n2 < D instead of the single shell.
    #[arg(long)]
    pub full_grid: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum JsmapCommand {
    /// Build S_z, S+, S-, S^2 on two oscillators.
    Build {
        #[command(flatten)]
        params: MapParams,
        #[command(flatten)]
        output: Output,
    },
    /// Compare the realization with the direct representation and check its relations.
    Verify {
        #[command(flatten)]
        params: MapParams,
        /// Kind of the direct representation; inferred from the closure
        /// residuals when omitted.
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_parser = Perturbation::parse)]
        perturb: Option<Perturbation>,
        #[command(flatten)]
        output: Output,
    },
    /// Check -Q2 [m]_g = M0^2 [m]_f for the reflection partner of fn.
    Pairing {
        #[arg(long = "fn", value_parser = parse_char_fn)]
        f: CharFn,
        #[arg(long, allow_hyphen_values = true)]
        alpha0: f64,
        #[arg(long)]
        mmax: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_parser = Perturbation::parse)]
        perturb: Option<Perturbation>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Subcommand)]
pub enum OrbitCommand {
    /// Plot data of a reference figure.
    Figure {
        #[arg(long, value_parser = parse_figure)]
        name: Figure,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cobweb trace of an arbitrary start point.
    Cobweb {
        #[arg(long = "fn", value_parser = parse_char_fn)]
        f: CharFn,
        #[arg(long, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long)]
        steps: usize,
        /// Plot window `LO,HI`; defaults to the padded landmark range.
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Option<(f64, f64)>,
        #[arg(long, default_value_t = gjs_core::orbit::DEFAULT_SAMPLES)]
        samples: usize,
        #[command(flatten)]
        output: Output,
    },
}

fn parse_char_fn(s: &str) -> Result<CharFn, String> {
    serde_json::from_str(s).map_err(|e| format!("invalid characteristic function: {e}"))
}

fn parse_figure(s: &str) -> Result<Figure, String> {
    s.parse().map_err(|e: gjs_core::Error| e.to_string())
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected LO,HI")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err("window must be finite with LO < HI".into());
    }
    Ok((lo, hi))
}

/// `j` as `p/q`, an integer, or a decimal; stored as the integer `2j`.
pub fn parse_two_j(s: &str) -> Result<usize, String> {
    let twice = match s.split_once('/') {
        Some((p, q)) => {
            let p: u64 = p.trim().parse().map_err(|e| format!("{e}"))?;
            let q: u64 = q.trim().parse().map_err(|e| format!("{e}"))?;
            if q == 0 || !(2 * p).is_multiple_of(q) {
                return Err(format!("j = {s} is not a non-negative half-integer"));
            }
            2 * p / q
        }
        None => {
            let x: f64 = s.trim().parse().map_err(|e| format!("{e}"))?;
            let twice = 2.0 * x;
            if twice.is_nan() || twice < 0.0 || twice.fract() != 0.0 || twice > u32::MAX as f64 {
                return Err(format!("j = {s} is not a non-negative half-integer"));
            }
            twice as u64
        }
    };
    Ok(twice as usize)
}
