//! Single-entry perturbations used as negative controls for the verifiers.

use anyhow::{bail, ensure, Context, Result};
use gjs_core::matrix::OperatorMatrix;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Index {
    Entry(usize, usize),
    Element(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub target: String,
    pub index: Index,
    pub delta: f64,
}

impl Perturbation {
    /// `TARGET:ROW:COL:DELTA` or `TARGET:INDEX:DELTA`.
    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| p.parse::<usize>().map_err(|e| format!("{p:?}: {e}"));
        let (target, index, delta) = match parts[..] {
            [t, r, c, d] => (t, Index::Entry(num(r)?, num(c)?), d),
            [t, i, d] => (t, Index::Element(num(i)?), d),
            _ => return Err("expected TARGET:ROW:COL:DELTA or TARGET:INDEX:DELTA".into()),
        };
        let delta: f64 = delta.parse().map_err(|e| format!("{delta:?}: {e}"))?;
        if target.is_empty() || !delta.is_finite() {
            return Err("perturbation needs a target and a finite delta".into());
        }
        Ok(Self {
            target: target.to_string(),
            index,
            delta,
        })
    }

    pub fn applies_to(&self, target: &str) -> bool {
        self.target.eq_ignore_ascii_case(target)
    }

    pub fn apply_matrix(&self, m: &mut OperatorMatrix) -> Result<()> {
        let Index::Entry(r, c) = self.index else {
            bail!(
                "{} is a matrix: use {}:ROW:COL:DELTA",
                self.target,
                self.target
            );
        };
        ensure!(
            r < m.dim() && c < m.dim(),
            "entry ({r}, {c}) is outside the {}x{} matrix {}",
            m.dim(),
            m.dim(),
            self.target
        );
        m.entries[(r, c)] += self.delta;
        Ok(())
    }

    /// Adds `delta * max(1, |x|)`: for sequences compared on a relative scale,
    /// where an absolute nudge would vanish below rounding of large entries.
    pub fn apply_sequence_scaled(&self, v: &mut [f64]) -> Result<()> {
        let Index::Element(i) = self.index else {
            bail!(
                "{} is a sequence: use {}:INDEX:DELTA",
                self.target,
                self.target
            );
        };
        let len = v.len();
        let x = v
            .get_mut(i)
            .with_context(|| format!("index {i} is outside {} (length {len})", self.target))?;
        *x += self.delta * x.abs().max(1.0);
        Ok(())
    }

    /// Perturbs `value[field][i]` of a serialized representation.
    pub fn apply_json(&self, value: &mut Value, field: &str) -> Result<()> {
        let Index::Element(i) = self.index else {
            bail!(
                "{} is a sequence: use {}:INDEX:DELTA",
                self.target,
                self.target
            );
        };
        let slot = value
            .get_mut(field)
            .and_then(|v| v.get_mut(i))
            .with_context(|| format!("index {i} is outside {field}"))?;
        let x = slot.as_f64().context("non-numeric entry")?;
        *slot = serde_json::json!(x + self.delta);
        Ok(())
    }
}

pub fn unknown_target(p: &Perturbation, allowed: &[&str]) -> anyhow::Error {
    anyhow::anyhow!(
        "unknown perturbation target {:?}; expected one of {}",
        p.target,
        allowed.join(", ")
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        let p = Perturbation::parse("Jplus:0:1:0.01").unwrap();
        assert_eq!(p.index, Index::Entry(0, 1));
        assert_eq!(p.delta, 0.01);
        let p = Perturbation::parse("ladder:2:-1e-2").unwrap();
        assert_eq!(p.index, Index::Element(2));
        assert_eq!(p.delta, -0.01);
        assert!(Perturbation::parse("H:0").is_err());
        assert!(Perturbation::parse("H:0:0:inf").is_err());
        assert!(Perturbation::parse(":0:0.1").is_err());
        assert!(Perturbation::parse("H:a:0.1").is_err());
    }

    #[test]
    fn scaled_sequence_edit() {
        let mut v = [0.0, 1e20];
        let p = Perturbation::parse("s:1:0.01").unwrap();
        p.apply_sequence_scaled(&mut v).unwrap();
        assert!((v[1] / 1.01e20 - 1.0).abs() < 1e-15);
        Perturbation::parse("s:0:0.01")
            .unwrap()
            .apply_sequence_scaled(&mut v)
            .unwrap();
        assert_eq!(v[0], 0.01);
    }

    #[test]
    fn json_edit() {
        let mut v = serde_json::json!({"ladder": [1.0, 2.0]});
        Perturbation::parse("ladder:1:0.5")
            .unwrap()
            .apply_json(&mut v, "ladder")
            .unwrap();
        assert_eq!(v["ladder"][1], 2.5);
        assert!(Perturbation::parse("ladder:5:0.5")
            .unwrap()
            .apply_json(&mut v, "ladder")
            .is_err());
    }
}
