//! Quantum states, POVMs, noise channels and Born-rule correlations.

mod born;
mod catalog;
mod entropy;
mod noise;
mod reduction;

pub use born::born_correlation;
pub use catalog::{catalog, catalog_povm, catalog_state, CatalogItem, CATALOG_NAMES};
pub use entropy::{entropy_bits, mutual_information};
pub use noise::{depolarize_povm, depolarize_state, povm_from_bloch, NoiseParams};
pub use reduction::{projective_simulable_povm, projective_to_classical, Basis};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_defect, identity, max_abs_diff, min_eigenvalue, projector, trace, CMat, CVec,
};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
pub const COMPLETENESS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    local_dims: Vec<usize>,
    entries: CMat,
}

impl DensityMatrix {
    pub fn new(local_dims: Vec<usize>, entries: CMat) -> Result<Self> {
        let dim: usize = local_dims.iter().product();
        if local_dims.is_empty() || local_dims.contains(&0) {
            return Err(Error::InvalidState(format!("local dims {local_dims:?}")));
        }
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::Dimension(format!(
                "local dims {local_dims:?} need a {dim}x{dim} matrix, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let herm = hermitian_defect(&entries);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (defect {herm:e})"
            )));
        }
        let tr = trace(&entries);
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let lo = min_eigenvalue(&entries);
        if lo < -PSD_TOL {
            return Err(Error::InvalidState(format!("eigenvalue {lo:e}")));
        }
        Ok(Self {
            local_dims,
            entries,
        })
    }

    /// |ψ⟩⟨ψ| for a normalized ψ.
    pub fn pure(local_dims: Vec<usize>, psi: &CVec) -> Result<Self> {
        Self::new(local_dims, projector(psi))
    }

    pub fn maximally_mixed(local_dims: Vec<usize>) -> Self {
        let dim: usize = local_dims.iter().product();
        Self {
            local_dims,
            entries: identity(dim).unscale(dim as f64),
        }
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn n_parties(&self) -> usize {
        self.local_dims.len()
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    pub(crate) fn from_parts_unchecked(local_dims: Vec<usize>, entries: CMat) -> Self {
        Self {
            local_dims,
            entries,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    effects: Vec<CMat>,
}

impl Povm {
    pub fn new(effects: Vec<CMat>) -> Result<Self> {
        let Some(first) = effects.first() else {
            return Err(Error::InvalidPovm("no effects".into()));
        };
        let dim = first.nrows();
        let mut sum = CMat::zeros(dim, dim);
        for (i, e) in effects.iter().enumerate() {
            if e.nrows() != dim || e.ncols() != dim {
                return Err(Error::InvalidPovm(format!("effect {i} has wrong shape")));
            }
            if hermitian_defect(e) > HERMITIAN_TOL {
                return Err(Error::InvalidPovm(format!("effect {i} is not Hermitian")));
            }
            let lo = min_eigenvalue(e);
            if lo < -PSD_TOL {
                return Err(Error::InvalidPovm(format!(
                    "effect {i} has eigenvalue {lo:e}"
                )));
            }
            sum += e;
        }
        let gap = max_abs_diff(&sum, &identity(dim));
        if gap > COMPLETENESS_TOL {
            return Err(Error::InvalidPovm(format!(
                "effects sum to identity only within {gap:e}"
            )));
        }
        Ok(Self { dim, effects })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[CMat] {
        &self.effects
    }

    pub fn effect(&self, i: usize) -> &CMat {
        &self.effects[i]
    }

    pub(crate) fn from_parts_unchecked(dim: usize, effects: Vec<CMat>) -> Self {
        Self { dim, effects }
    }
}
