//! Task registry: payoff functions, target correlation sets and the
//! mutual-information regions of the k = 3, 4 planes.

mod region;
mod targets;

pub use region::{
    mi_on_line, mi_threshold_crossing, region_classify, Region, RegionPoint, RegionTask,
};
pub use targets::{membership, nab_correlation, Fitted, Membership, TargetSet, TARGET_IDS};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::correlation::Correlation;
use crate::error::{Error, Result};
use crate::search::MinLinearObjective;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TaskId {
    G223,
    G224,
    G235,
    G335,
    G223Sym,
    G235Sym,
}

impl TaskId {
    pub const ALL: [TaskId; 6] = [
        TaskId::G223,
        TaskId::G224,
        TaskId::G235,
        TaskId::G335,
        TaskId::G223Sym,
        TaskId::G235Sym,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskId::G223 => "G223",
            TaskId::G224 => "G224",
            TaskId::G235 => "G235",
            TaskId::G335 => "G335",
            TaskId::G223Sym => "G223_SYM",
            TaskId::G235Sym => "G235_SYM",
        }
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s
            .to_ascii_uppercase()
            .replace(['(', ')', ',', ' ', '-'], "");
        TaskId::ALL
            .into_iter()
            .find(|t| t.as_str().replace('_', "") == norm.replace('_', ""))
            .ok_or_else(|| Error::UnknownTask(s.to_string()))
    }
}

/// G(n, d, k): n parties, local dimension d, k outcomes each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub id: TaskId,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub symmetric: bool,
}

impl TaskSpec {
    pub fn get(id: TaskId) -> Self {
        let (n, d, k, symmetric) = match id {
            TaskId::G223 => (2, 2, 3, false),
            TaskId::G224 => (2, 2, 4, false),
            TaskId::G235 => (2, 3, 5, false),
            TaskId::G335 => (3, 3, 5, false),
            TaskId::G223Sym => (2, 2, 3, true),
            TaskId::G235Sym => (2, 3, 5, true),
        };
        Self {
            id,
            n,
            d,
            k,
            symmetric,
        }
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.k; self.n]
    }

    /// Payoff as `min over include − Σ penalty`, with outcome tuples.
    pub fn payoff_rule(&self) -> PayoffRule {
        let k = self.k;
        let mut include = Vec::new();
        let mut penalty = Vec::new();
        match self.id {
            TaskId::G223 | TaskId::G224 | TaskId::G223Sym => {
                for a in 0..k {
                    for b in 0..k {
                        if a != b {
                            include.push(vec![a, b]);
                        }
                    }
                }
            }
            TaskId::G235 | TaskId::G235Sym => {
                let excluded = [(0, 4), (4, 0)];
                for a in 0..k {
                    for b in 0..k {
                        if a != b && !excluded.contains(&(a, b)) {
                            include.push(vec![a, b]);
                        }
                    }
                    penalty.push(vec![a, a]);
                }
            }
            TaskId::G335 => {
                for a in 0..k {
                    for b in 0..k {
                        for c in 0..k {
                            let in_s =
                                (a != b && c == 0) || (a != c && b == 0) || (b != c && a == 0);
                            if in_s {
                                include.push(vec![a, b, c]);
                            }
                        }
                    }
                }
            }
        }
        PayoffRule { include, penalty }
    }

    pub fn objective(&self) -> MinLinearObjective {
        let rule = self.payoff_rule();
        let flat = |idx: &Vec<usize>| idx.iter().fold(0, |acc, &i| acc * self.k + i);
        MinLinearObjective {
            include: rule.include.iter().map(flat).collect(),
            penalty: rule.penalty.iter().map(flat).collect(),
        }
    }
}

impl FromStr for TaskSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(TaskSpec::get(s.parse()?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayoffRule {
    pub include: Vec<Vec<usize>>,
    pub penalty: Vec<Vec<usize>>,
}

pub fn payoff(task: &TaskSpec, corr: &Correlation) -> Result<f64> {
    if corr.outcomes() != task.shape().as_slice() {
        return Err(Error::Dimension(format!(
            "task {} expects shape {:?}, got {:?}",
            task.id,
            task.shape(),
            corr.outcomes()
        )));
    }
    Ok(task.objective().eval(corr.probs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in TaskId::ALL {
            assert_eq!(id.as_str().parse::<TaskId>().unwrap(), id);
        }
        assert_eq!("G(2,2,3)".parse::<TaskId>().unwrap(), TaskId::G223);
        assert!("G999".parse::<TaskId>().is_err());
    }

    #[test]
    fn g335_set_has_48_elements() {
        let rule = TaskSpec::get(TaskId::G335).payoff_rule();
        assert_eq!(rule.include.len(), 48);
        assert!(rule.penalty.is_empty());
    }

    #[test]
    fn g235_excludes_corner_pairs() {
        let rule = TaskSpec::get(TaskId::G235).payoff_rule();
        assert_eq!(rule.include.len(), 18);
        assert!(!rule.include.contains(&vec![0, 4]));
        assert!(!rule.include.contains(&vec![4, 0]));
        assert_eq!(rule.penalty.len(), 5);
    }

    #[test]
    fn uniform_g223_payoff() {
        let t = TaskSpec::get(TaskId::G223);
        let p = payoff(&t, &Correlation::uniform(vec![3, 3])).unwrap();
        assert!((p - 1.0 / 9.0).abs() < 1e-15);
        assert!(payoff(&t, &Correlation::uniform(vec![4, 4])).is_err());
    }
}
