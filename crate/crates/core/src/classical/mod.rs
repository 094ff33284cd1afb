//! Classically correlated states, local post-processing and the
//! feasibility/bound searches over them.

mod bound;
mod feasibility;
mod support;

pub use bound::{classical_bound, classical_bound_grid, BoundResult, G223_REFERENCE};
pub use feasibility::{
    certificate, feasibility, sym_adaptive_feasibility, Certificate, Constraints,
    FeasibilityResult, FeasibilityStatus, Target, FEASIBLE_TOL, INFEASIBLE_EVIDENCE_TOL,
    SPECTRAL_TOL,
};
pub use support::{
    support_certificate, SupportStructure, SupportVerdict, DEFAULT_BUDGET, ZERO_TOL,
};

use serde::{Deserialize, Serialize};

use crate::correlation::Correlation;
use crate::error::{check_unit, Error, Result};
use crate::search::{LinearGroup, SimplexSpec};

pub const WEIGHT_TOL: f64 = 1e-12;

/// Weights λ over d^n joint outcomes, party 0 slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalState {
    n_parties: usize,
    d: usize,
    weights: Vec<f64>,
}

impl ClassicalState {
    pub fn new(n_parties: usize, d: usize, weights: Vec<f64>) -> Result<Self> {
        if n_parties == 0 || d == 0 || weights.len() != d.pow(n_parties as u32) {
            return Err(Error::Dimension(format!(
                "{} weights for n = {n_parties}, d = {d}",
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
            return Err(Error::InvalidState(format!("negative weight {w}")));
        }
        let s: f64 = weights.iter().sum();
        if (s - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidState(format!("weights sum to {s}")));
        }
        Ok(Self {
            n_parties,
            d,
            weights,
        })
    }

    /// Clamps negatives and rescales before validating.
    pub fn from_weights_renormalized(
        n_parties: usize,
        d: usize,
        mut weights: Vec<f64>,
    ) -> Result<Self> {
        weights.iter_mut().for_each(|w| *w = w.max(0.0));
        let s: f64 = weights.iter().sum();
        if s > 0.0 {
            weights.iter_mut().for_each(|w| *w /= s);
        }
        Self::new(n_parties, d, weights)
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Column-stochastic k×d matrix, s[l][m] = P(output l | input m).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StochasticMap {
    k: usize,
    d: usize,
    entries: Vec<f64>,
}

impl StochasticMap {
    /// `entries` in row-major order (k rows of d).
    pub fn new(k: usize, d: usize, entries: Vec<f64>) -> Result<Self> {
        if k == 0 || d == 0 || entries.len() != k * d {
            return Err(Error::InvalidMap(format!(
                "{} entries for {k}x{d}",
                entries.len()
            )));
        }
        if let Some(e) = entries.iter().find(|e| !(**e >= 0.0)) {
            return Err(Error::InvalidMap(format!("negative entry {e}")));
        }
        for m in 0..d {
            let s: f64 = (0..k).map(|l| entries[l * d + m]).sum();
            if (s - 1.0).abs() > WEIGHT_TOL {
                return Err(Error::InvalidMap(format!("column {m} sums to {s}")));
            }
        }
        Ok(Self { k, d, entries })
    }

    /// Builds a map from its columns (each a distribution over k outputs).
    pub fn from_columns(columns: &[&[f64]]) -> Result<Self> {
        let d = columns.len();
        let k = columns.first().map_or(0, |c| c.len());
        let mut entries = vec![0.0; k * d];
        for (m, col) in columns.iter().enumerate() {
            if col.len() != k {
                return Err(Error::InvalidMap("ragged columns".into()));
            }
            for (l, v) in col.iter().enumerate() {
                entries[l * d + m] = *v;
            }
        }
        Self::new(k, d, entries)
    }

    pub fn identity(d: usize) -> Self {
        Self::deterministic(d, &(0..d).collect::<Vec<_>>()).expect("valid")
    }

    /// Input m is relabeled to output `labels[m]`.
    pub fn deterministic(k: usize, labels: &[usize]) -> Result<Self> {
        let d = labels.len();
        let mut entries = vec![0.0; k * d];
        for (m, &l) in labels.iter().enumerate() {
            if l >= k {
                return Err(Error::InvalidMap(format!("label {l} >= {k}")));
            }
            entries[l * d + m] = 1.0;
        }
        Self::new(k, d, entries)
    }

    pub fn uniform(k: usize, d: usize) -> Self {
        Self {
            k,
            d,
            entries: vec![1.0 / k as f64; k * d],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, l: usize, m: usize) -> f64 {
        self.entries[l * self.d + m]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

/// The two-level state (λ, 0, 0, 1 − λ).
pub fn canonical_two_level(lambda: f64) -> Result<ClassicalState> {
    check_unit("lambda", lambda)?;
    ClassicalState::new(2, 2, vec![lambda, 0.0, 0.0, 1.0 - lambda])
}

/// p(a_1…a_n) = Σ_m λ_m Π_i s_i[a_i][m_i].
pub fn apply_maps(state: &ClassicalState, maps: &[StochasticMap]) -> Result<Correlation> {
    if maps.len() != state.n_parties() {
        return Err(Error::Dimension(format!(
            "{} maps for {} parties",
            maps.len(),
            state.n_parties()
        )));
    }
    if let Some(m) = maps.iter().find(|m| m.d() != state.d()) {
        return Err(Error::Dimension(format!(
            "map input {} vs local dimension {}",
            m.d(),
            state.d()
        )));
    }
    let mut cur = state.weights().to_vec();
    let mut shape: Vec<usize> = vec![state.d(); state.n_parties()];
    for (i, map) in maps.iter().enumerate() {
        let outer: usize = shape[..i].iter().product();
        let inner: usize = shape[i + 1..].iter().product();
        let (d, k) = (map.d(), map.k());
        let mut next = vec![0.0; outer * k * inner];
        for o in 0..outer {
            for l in 0..k {
                for m in 0..d {
                    let s = map.get(l, m);
                    if s == 0.0 {
                        continue;
                    }
                    for r in 0..inner {
                        next[(o * k + l) * inner + r] += s * cur[(o * d + m) * inner + r];
                    }
                }
            }
        }
        shape[i] = k;
        cur = next;
    }
    Correlation::new(shape, cur)
}

/// Which classical family a search ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ansatz {
    /// Arbitrary weights over d^n outcomes.
    General,
    /// Bipartite d = 2 with weights (λ, 0, 0, 1 − λ).
    Canonical,
    /// Two canonical copies (λ and λ′) read jointly as one 4-level input
    /// per party, with one shared 4 → k map.
    AdaptivePair,
}

/// Parameter layout of a classical correlation model over simplex blocks:
/// the state block(s) first, then map columns (party-major, column-major).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalModel {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub identical: bool,
    pub ansatz: Ansatz,
}

const STACK: usize = 128;

impl ClassicalModel {
    pub fn general(n: usize, d: usize, k: usize, identical: bool) -> Self {
        Self {
            n,
            d,
            k,
            identical,
            ansatz: Ansatz::General,
        }
    }

    pub fn canonical(k: usize, identical: bool) -> Self {
        Self {
            n: 2,
            d: 2,
            k,
            identical,
            ansatz: Ansatz::Canonical,
        }
    }

    pub fn adaptive_pair(k: usize) -> Self {
        Self {
            n: 2,
            d: 4,
            k,
            identical: true,
            ansatz: Ansatz::AdaptivePair,
        }
    }

    fn state_blocks(&self) -> Vec<usize> {
        match self.ansatz {
            Ansatz::General => vec![self.d.pow(self.n as u32)],
            Ansatz::Canonical => vec![2],
            Ansatz::AdaptivePair => vec![2, 2],
        }
    }

    fn map_count(&self) -> usize {
        if self.identical {
            1
        } else {
            self.n
        }
    }

    pub fn spec(&self) -> SimplexSpec {
        let mut blocks = self.state_blocks();
        blocks.extend(std::iter::repeat_n(self.k, self.map_count() * self.d));
        SimplexSpec::new(blocks).expect("nonempty")
    }

    pub fn out_len(&self) -> usize {
        self.k.pow(self.n as u32)
    }

    fn state_len(&self) -> usize {
        self.state_blocks().iter().sum()
    }

    fn weights_into(&self, x: &[f64], w: &mut [f64]) {
        match self.ansatz {
            Ansatz::General => w.copy_from_slice(&x[..w.len()]),
            Ansatz::Canonical => {
                w.copy_from_slice(&[x[0], 0.0, 0.0, x[1]]);
            }
            Ansatz::AdaptivePair => {
                w.iter_mut().for_each(|v| *v = 0.0);
                for i in 0..2 {
                    for j in 0..2 {
                        let m = 2 * i + j;
                        w[m * 4 + m] = x[i] * x[2 + j];
                    }
                }
            }
        }
    }

    /// Largest intermediate tensor during contraction.
    fn scratch_len(&self) -> usize {
        (0..=self.n)
            .map(|i| self.k.pow(i as u32) * self.d.pow((self.n - i) as u32))
            .max()
            .unwrap_or(1)
    }

    /// Writes the k^n correlation for parameters `x` into `out`.
    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        let len = self.scratch_len();
        if len <= STACK {
            let mut a = [0.0f64; STACK];
            let mut b = [0.0f64; STACK];
            self.contract(x, &mut a, &mut b, out);
        } else {
            let mut a = vec![0.0; len];
            let mut b = vec![0.0; len];
            self.contract(x, &mut a, &mut b, out);
        }
    }

    fn contract<'a>(&self, x: &[f64], mut a: &'a mut [f64], mut b: &'a mut [f64], out: &mut [f64]) {
        let (n, d, k) = (self.n, self.d, self.k);
        let wlen = d.pow(n as u32);
        self.weights_into(x, &mut a[..wlen]);
        let base = self.state_len();
        let mut cur_len = wlen;
        for i in 0..n {
            let map = base + if self.identical { 0 } else { i * d * k };
            let outer = k.pow(i as u32);
            let inner = d.pow((n - i - 1) as u32);
            let next_len = outer * k * inner;
            b[..next_len].iter_mut().for_each(|v| *v = 0.0);
            for o in 0..outer {
                for m in 0..d {
                    let src = &a[(o * d + m) * inner..(o * d + m + 1) * inner];
                    if src.iter().all(|v| *v == 0.0) {
                        continue;
                    }
                    for l in 0..k {
                        let s = x[map + m * k + l];
                        let dst = &mut b[(o * k + l) * inner..(o * k + l + 1) * inner];
                        for (t, v) in dst.iter_mut().zip(src) {
                            *t += s * v;
                        }
                    }
                }
            }
            std::mem::swap(&mut a, &mut b);
            cur_len = next_len;
        }
        out.copy_from_slice(&a[..cur_len]);
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.out_len()];
        self.eval_into(x, &mut out);
        out
    }

    /// State and per-party maps encoded by `x`.
    pub fn witness(&self, x: &[f64]) -> Result<(ClassicalState, Vec<StochasticMap>)> {
        let (n, d, k) = (self.n, self.d, self.k);
        let mut w = vec![0.0; d.pow(n as u32)];
        self.weights_into(x, &mut w);
        let state = ClassicalState::from_weights_renormalized(n, d, w)?;
        let base = self.state_len();
        let maps = (0..n)
            .map(|i| {
                let off = base + if self.identical { 0 } else { i * d * k };
                let cols: Vec<&[f64]> =
                    (0..d).map(|m| &x[off + m * k..off + (m + 1) * k]).collect();
                StochasticMap::from_columns(&cols)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((state, maps))
    }

    /// Block groups in which the output is linear (used by LP polishing).
    pub fn linear_groups(&self) -> Vec<LinearGroup> {
        let s = self.state_blocks().len();
        match self.ansatz {
            Ansatz::AdaptivePair => vec![],
            _ if self.identical => vec![LinearGroup::blocks(vec![0])],
            _ => {
                let mut g = vec![LinearGroup::blocks((0..s).collect())];
                for p in 0..self.n {
                    g.push(LinearGroup::blocks(
                        (0..self.d).map(|m| s + p * self.d + m).collect(),
                    ));
                }
                g
            }
        }
    }
}
