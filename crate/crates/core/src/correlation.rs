//! Joint outcome distributions p(a_1, …, a_n).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const NORM_TOL: f64 = 1e-12;

/// Row-major probability tensor; party 0 is the slowest index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    outcomes: Vec<usize>,
    probs: Vec<f64>,
}

impl Correlation {
    pub fn new(outcomes: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        let c = Self::new_unchecked(outcomes, probs)?;
        c.validate(NORM_TOL)?;
        Ok(c)
    }

    /// Shape-checked but not normalization-checked; used for targets and
    /// intermediate model outputs.
    pub fn new_unchecked(outcomes: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if outcomes.is_empty() || outcomes.contains(&0) {
            return Err(Error::InvalidCorrelation(format!(
                "bad outcome counts {outcomes:?}"
            )));
        }
        let len: usize = outcomes.iter().product();
        if len != probs.len() {
            return Err(Error::InvalidCorrelation(format!(
                "shape {outcomes:?} needs {len} entries, got {}",
                probs.len()
            )));
        }
        Ok(Self { outcomes, probs })
    }

    pub fn from_fn(outcomes: Vec<usize>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let len: usize = outcomes.iter().product();
        let mut probs = Vec::with_capacity(len);
        let mut idx = vec![0usize; outcomes.len()];
        for flat in 0..len {
            unflatten(flat, &outcomes, &mut idx);
            probs.push(f(&idx));
        }
        Self::new(outcomes, probs)
    }

    /// Square bipartite table from rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.len();
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidCorrelation("table is not square".into()));
        }
        Self::new(vec![k, k], rows.iter().flatten().copied().collect())
    }

    pub fn uniform(outcomes: Vec<usize>) -> Self {
        let len: usize = outcomes.iter().product();
        Self {
            outcomes,
            probs: vec![1.0 / len as f64; len],
        }
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let sum: f64 = self.probs.iter().sum();
        if !sum.is_finite() || (sum - 1.0).abs() > tol {
            return Err(Error::InvalidCorrelation(format!("sum is {sum}")));
        }
        if let Some(p) = self.probs.iter().find(|&&p| p < -tol) {
            return Err(Error::InvalidCorrelation(format!("negative entry {p}")));
        }
        Ok(())
    }

    pub fn n_parties(&self) -> usize {
        self.outcomes.len()
    }

    pub fn outcomes(&self) -> &[usize] {
        &self.outcomes
    }

    /// Common outcome count if all parties agree.
    pub fn k(&self) -> Option<usize> {
        let k = self.outcomes[0];
        self.outcomes.iter().all(|&o| o == k).then_some(k)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.outcomes.len());
        idx.iter()
            .zip(&self.outcomes)
            .fold(0, |acc, (&i, &k)| acc * k + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.probs[self.flat_index(idx)]
    }

    /// Outcome tuple for each flat position, in storage order.
    pub fn indices(&self) -> Vec<Vec<usize>> {
        let mut idx = vec![0usize; self.outcomes.len()];
        (0..self.probs.len())
            .map(|flat| {
                unflatten(flat, &self.outcomes, &mut idx);
                idx.clone()
            })
            .collect()
    }

    pub fn marginal(&self, party: usize) -> Vec<f64> {
        let mut m = vec![0.0; self.outcomes[party]];
        for (idx, p) in self.indices().iter().zip(&self.probs) {
            m[idx[party]] += p;
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Correlation) -> f64 {
        assert_eq!(self.outcomes, other.outcomes, "shape mismatch");
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn sq_distance(&self, other: &Correlation) -> f64 {
        sq_distance(&self.probs, &other.probs)
    }

    /// Bipartite view as a row-major matrix.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        assert_eq!(self.n_parties(), 2, "rows() needs a bipartite table");
        self.probs
            .chunks(self.outcomes[1])
            .map(|r| r.to_vec())
            .collect()
    }

    /// Copy with entries in [−tol, 0) clamped to zero.
    pub fn clamped(&self) -> Correlation {
        Correlation {
            outcomes: self.outcomes.clone(),
            probs: self.probs.iter().map(|&p| p.max(0.0)).collect(),
        }
    }
}

pub(crate) fn sq_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn unflatten(mut flat: usize, shape: &[usize], out: &mut [usize]) {
    for (slot, &k) in out.iter_mut().zip(shape).rev() {
        *slot = flat % k;
        flat /= k;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trip() {
        let c = Correlation::from_fn(vec![2, 3, 4], |_| 1.0 / 24.0).unwrap();
        for (flat, idx) in c.indices().iter().enumerate() {
            assert_eq!(c.flat_index(idx), flat);
        }
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(Correlation::new(vec![2], vec![0.5, 0.6]).is_err());
        assert!(Correlation::new(vec![2], vec![1.5, -0.5]).is_err());
        assert!(Correlation::new(vec![2], vec![0.5]).is_err());
    }

    #[test]
    fn marginals() {
        let c = Correlation::from_rows(&[vec![0.5, 0.0], vec![0.25, 0.25]]).unwrap();
        assert_eq!(c.marginal(0), vec![0.5, 0.5]);
        assert_eq!(c.marginal(1), vec![0.75, 0.25]);
    }
}
