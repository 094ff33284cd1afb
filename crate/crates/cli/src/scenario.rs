//! Scenario files: a task, a state, one POVM per party and noise.
//!
//! ```json
//! { "task": "G223", "state": "singlet", "povms": ["trine", "trine"],
//!   "noise": { "eps_state": 0.9 } }
//! ```
//!
//! States and effects may be given inline as nested `[re, im]` arrays:
//! `"state": { "dims": [2, 2], "matrix": [[[0.5, 0], ...], ...] }` and
//! `{ "effects": [ [[[1, 0], [0, 0]], [[0, 0], [0, 0]]], ... ] }`.
//! A single POVM entry is used by every party.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use povmw::linalg::{c, CMat};
use povmw::quantum::{
    catalog_povm, catalog_state, depolarize_povm, depolarize_state, DensityMatrix, NoiseParams,
    Povm,
};
use povmw::tasks::TaskSpec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Name(String),
    Matrix {
        dims: Vec<usize>,
        matrix: Vec<Vec<[f64; 2]>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PovmSpec {
    Name(String),
    Effects { effects: Vec<Vec<Vec<[f64; 2]>>> },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    #[serde(default = "one")]
    pub eps_state: f64,
    #[serde(default = "one")]
    pub eps_a: f64,
    #[serde(default = "one")]
    pub eps_b: f64,
    #[serde(default = "one")]
    pub eps_c: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            eps_state: 1.0,
            eps_a: 1.0,
            eps_b: 1.0,
            eps_c: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub task: Option<String>,
    pub state: StateSpec,
    pub povms: Vec<PovmSpec>,
    #[serde(default)]
    pub noise: NoiseSpec,
    /// Target sets to test membership against; defaults to every set whose
    /// outcome count matches.
    #[serde(default)]
    pub targets: Vec<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

fn matrix(rows: &[Vec<[f64; 2]>]) -> Result<CMat> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        bail!("matrix is not square");
    }
    Ok(CMat::from_fn(n, n, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing scenario {}", path.display()))
    }

    pub fn task(&self) -> Result<Option<TaskSpec>> {
        self.task
            .as_deref()
            .map(|t| Ok(t.parse::<TaskSpec>()?))
            .transpose()
    }

    pub fn noise(&self) -> Result<NoiseParams> {
        let n = self.noise;
        Ok(NoiseParams::new(n.eps_state, n.eps_a, n.eps_b, n.eps_c)?)
    }

    /// Noisy state and one noisy POVM per party.
    pub fn resolve(&self) -> Result<(DensityMatrix, Vec<Povm>)> {
        let noise = self.noise()?;
        let rho = match &self.state {
            StateSpec::Name(name) => catalog_state(name)?,
            StateSpec::Matrix { dims, matrix: m } => DensityMatrix::new(dims.clone(), matrix(m)?)?,
        };
        let rho = depolarize_state(&rho, noise.eps_state)?;
        let n = rho.n_parties();
        let specs: Vec<&PovmSpec> = match self.povms.len() {
            1 => vec![&self.povms[0]; n],
            m if m == n => self.povms.iter().collect(),
            m => bail!("{m} POVMs for a {n}-party state"),
        };
        let povms = specs
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                let p = match s {
                    PovmSpec::Name(name) => catalog_povm(name)?,
                    PovmSpec::Effects { effects } => Povm::new(
                        effects
                            .iter()
                            .map(|e| matrix(e))
                            .collect::<Result<Vec<_>>>()?,
                    )?,
                };
                Ok(depolarize_povm(&p, noise.party(i))?)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((rho, povms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_and_broadcast() {
        let s: Scenario = serde_json::from_str(
            r#"{"task":"G235","state":"qutrit_state_235","povms":["qutrit_povm_5"]}"#,
        )
        .unwrap();
        let (rho, povms) = s.resolve().unwrap();
        assert_eq!(rho.n_parties(), 2);
        assert_eq!(povms.len(), 2);
    }

    #[test]
    fn inline_matrices() {
        let s: Scenario = serde_json::from_str(
            r#"{"state":{"dims":[2],"matrix":[[[1,0],[0,0]],[[0,0],[0,0]]]},
                "povms":[{"effects":[[[[1,0],[0,0]],[[0,0],[0,0]]],[[[0,0],[0,0]],[[0,0],[1,0]]]]}],
                "noise":{"eps_state":0.5}}"#,
        )
        .unwrap();
        let (rho, povms) = s.resolve().unwrap();
        assert!((rho.entries()[(0, 0)].re - 0.75).abs() < 1e-15);
        assert_eq!(povms[0].outcomes(), 2);
    }

    #[test]
    fn errors() {
        let bad: Scenario = serde_json::from_str(r#"{"state":"nope","povms":["trine"]}"#).unwrap();
        assert!(bad.resolve().is_err());
        let mismatch: Scenario =
            serde_json::from_str(r#"{"state":"singlet","povms":["trine","trine","trine"]}"#)
                .unwrap();
        assert!(mismatch.resolve().is_err());
        assert!(
            serde_json::from_str::<Scenario>(r#"{"state":"singlet","povms":[],"extra":1}"#)
                .is_err()
        );
    }
}
