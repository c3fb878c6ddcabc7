//! Batch mode: a JSON list of jobs, each one subcommand invocation.
//!
//! ```json
//! {"jobs": [
//!   {"command": "gsl2 cut",
//!    "params": {"gn": {"coefficients": [-1, 3, -1], "orientation": "weight"}, "d": 2},
//!    "out": "cut-d2"}
//! ]}
//! ```
//!
//! Parameter names are the long flags without dashes (`_` may stand for
//! `-`); objects and arrays are passed as JSON, `true` as a bare flag.
//! Relative output directories resolve against the config file's directory.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Parser;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::args::{Cli, Command};
use crate::commands::{declared_out, execute, Outcome, Settings};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub jobs: Vec<Job>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    pub command: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    pub out: PathBuf,
}

impl Job {
    pub fn argv(&self, base: &Path) -> Result<Vec<String>> {
        let mut argv = vec!["gjs".to_string()];
        argv.extend(self.command.split_whitespace().map(str::to_string));
        for (key, value) in &self.params {
            if key == "out" {
                bail!("declare the output directory with the job's \"out\" field");
            }
            let flag = format!("--{}", key.replace('_', "-"));
            match value {
                Value::Bool(true) => argv.push(flag),
                Value::Bool(false) | Value::Null => {}
                Value::String(s) => argv.push(format!("{flag}={s}")),
                Value::Number(n) => argv.push(format!("{flag}={n}")),
                Value::Array(_) | Value::Object(_) => argv.push(format!("{flag}={value}")),
            }
        }
        argv.push(format!("--out={}", base.join(&self.out).display()));
        Ok(argv)
    }
}

#[derive(Debug, Serialize)]
struct JobSummary<'a> {
    job: usize,
    command: &'a str,
    out: String,
    verified: Option<bool>,
}

/// Validates every job, runs them in parallel and writes outputs only when
/// all succeed. Returns the process exit code.
pub fn run(path: &Path, settings: &Settings) -> Result<u8> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let config: RunConfig =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new("."));

    let commands = parse_jobs(&config, base)?;
    let results: Vec<Result<Outcome>> = commands
        .par_iter()
        .map(|cmd| execute(cmd, settings))
        .collect();

    let mut failed = false;
    for (i, r) in results.iter().enumerate() {
        if let Err(e) = r {
            eprintln!("job {i} ({}): {e:#}", config.jobs[i].command);
            failed = true;
        }
    }
    if failed {
        eprintln!("no output written");
        return Ok(1);
    }
    let outcomes: Vec<Outcome> = results.into_iter().map(Result::unwrap).collect();
    for o in &outcomes {
        o.write()?;
    }

    let summary: Vec<JobSummary> = outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| JobSummary {
            job: i,
            command: &config.jobs[i].command,
            out: o
                .out
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default(),
            verified: o.verified,
        })
        .collect();
    println!("{}", serde_json::to_string_pretty(&summary)?);
    let any_failed = outcomes.iter().any(|o| o.verified == Some(false));
    Ok(if any_failed { 2 } else { 0 })
}

/// Parses every job against the subcommand schema and rejects shared output
/// directories, before anything runs.
pub fn parse_jobs(config: &RunConfig, base: &Path) -> Result<Vec<Command>> {
    let mut seen = HashSet::new();
    let mut commands = Vec::with_capacity(config.jobs.len());
    for (i, job) in config.jobs.iter().enumerate() {
        let argv = job.argv(base).with_context(|| format!("job {i}"))?;
        let cli = Cli::try_parse_from(&argv)
            .map_err(|e| anyhow::anyhow!("job {i} ({}): {}", job.command, e.render()))?;
        if matches!(cli.command, Command::Run { .. }) {
            bail!("job {i}: run jobs cannot be nested");
        }
        let out = declared_out(&cli.command).expect("jobs always declare --out");
        let key = std::path::absolute(out)
            .with_context(|| format!("job {i}: resolving {}", out.display()))?;
        if !seen.insert(normalize(&key)) {
            bail!(
                "job {i}: output directory {} is used by another job",
                out.display()
            );
        }
        commands.push(cli.command);
    }
    Ok(commands)
}

fn normalize(p: &Path) -> PathBuf {
    let mut out = PathBuf::new();
    for c in p.components() {
        match c {
            std::path::Component::CurDir => {}
            std::path::Component::ParentDir => {
                out.pop();
            }
            other => out.push(other),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(jobs: Value) -> RunConfig {
        serde_json::from_value(serde_json::json!({ "jobs": jobs })).unwrap()
    }

    #[test]
    fn argv_from_params() {
        let c = config(serde_json::json!([{
            "command": "gha build",
            "params": {"fn": {"coefficients": [1, 1], "orientation": "oscillator"},
                       "alpha0": -0.5, "dim": 3, "verify": true, "perturb": null},
            "out": "a"
        }]));
        let argv = c.jobs[0].argv(Path::new("/tmp")).unwrap();
        assert_eq!(
            argv,
            vec![
                "gjs",
                "gha",
                "build",
                "--alpha0=-0.5",
                "--dim=3",
                r#"--fn={"coefficients":[1,1],"orientation":"oscillator"}"#,
                "--verify",
                "--out=/tmp/a",
            ]
        );
        assert_eq!(parse_jobs(&c, Path::new("/tmp")).unwrap().len(), 1);
    }

    #[test]
    fn duplicate_outputs_are_rejected() {
        let job =
            serde_json::json!({"command": "orbit figure", "params": {"name": "fig1"}, "out": "x"});
        let mut other = job.clone();
        other["out"] = "./y/../x".into();
        let c = config(serde_json::json!([job, other]));
        let e = parse_jobs(&c, Path::new("/tmp")).unwrap_err();
        assert!(e.to_string().contains("used by another job"));
    }

    #[test]
    fn schema_errors_are_reported_per_job() {
        let c = config(serde_json::json!([
            {"command": "gsl2 cut", "params": {"d": 2}, "out": "a"}
        ]));
        assert!(parse_jobs(&c, Path::new("/tmp")).is_err());
        let c = config(
            serde_json::json!([{"command": "run", "params": {"config": "c.json"}, "out": "a"}]),
        );
        assert!(parse_jobs(&c, Path::new("/tmp")).is_err());
    }
}
