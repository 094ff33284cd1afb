use serde::{Deserialize, Serialize};

use super::{DensityMatrix, Povm};
use crate::error::{check_unit, Error, Result};
use crate::linalg::{identity, paulis, trace, CMat};

/// Depolarizing strengths; 1 means noiseless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub eps_state: f64,
    pub eps_a: f64,
    pub eps_b: f64,
    pub eps_c: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self {
            eps_state: 1.0,
            eps_a: 1.0,
            eps_b: 1.0,
            eps_c: 1.0,
        }
    }
}

impl NoiseParams {
    pub fn new(eps_state: f64, eps_a: f64, eps_b: f64, eps_c: f64) -> Result<Self> {
        let n = Self {
            eps_state,
            eps_a,
            eps_b,
            eps_c,
        };
        n.validate()?;
        Ok(n)
    }

    pub fn validate(&self) -> Result<()> {
        check_unit("eps_state", self.eps_state)?;
        check_unit("eps_A", self.eps_a)?;
        check_unit("eps_B", self.eps_b)?;
        check_unit("eps_C", self.eps_c)
    }

    /// Measurement noise for party `i` (A, B, C).
    pub fn party(&self, i: usize) -> f64 {
        match i {
            0 => self.eps_a,
            1 => self.eps_b,
            _ => self.eps_c,
        }
    }
}

/// eps·ρ + (1 − eps)·I/D.
pub fn depolarize_state(rho: &DensityMatrix, eps: f64) -> Result<DensityMatrix> {
    check_unit("eps", eps)?;
    let dim = rho.dim();
    let mixed = identity(dim).unscale(dim as f64);
    let m = rho.entries().scale(eps) + mixed.scale(1.0 - eps);
    Ok(DensityMatrix::from_parts_unchecked(
        rho.local_dims().to_vec(),
        m,
    ))
}

/// E ↦ eps·E + (1 − eps)·(Tr E / d)·I for every effect.
pub fn depolarize_povm(povm: &Povm, eps: f64) -> Result<Povm> {
    check_unit("eps", eps)?;
    let d = povm.dim();
    let effects = povm
        .effects()
        .iter()
        .map(|e| e.scale(eps) + identity(d).scale((1.0 - eps) * trace(e).re / d as f64))
        .collect();
    Ok(Povm::from_parts_unchecked(d, effects))
}

/// Qubit POVM {w_i (I + n_i·σ)}.
pub fn povm_from_bloch(weights: &[f64], axes: &[[f64; 3]]) -> Result<Povm> {
    if weights.len() != axes.len() || weights.is_empty() {
        return Err(Error::InvalidPovm(
            "weights and axes differ in length".into(),
        ));
    }
    if weights.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::InvalidPovm("weights must be positive".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidPovm(format!("weights sum to {total}")));
    }
    let mut balance = [0.0; 3];
    for (w, n) in weights.iter().zip(axes) {
        let norm = n.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidPovm(format!("axis {n:?} is not unit length")));
        }
        for (b, x) in balance.iter_mut().zip(n) {
            *b += w * x;
        }
    }
    if balance.iter().any(|b| b.abs() > 1e-10) {
        return Err(Error::InvalidPovm(format!("Σ w n = {balance:?} ≠ 0")));
    }
    let sigma = paulis();
    let effects: Vec<CMat> = weights
        .iter()
        .zip(axes)
        .map(|(&w, n)| {
            let mut m = identity(2);
            for (s, x) in sigma.iter().zip(n) {
                m += s.scale(*x);
            }
            m.scale(w)
        })
        .collect();
    Povm::new(effects)
}
