use super::{DensityMatrix, Povm};
use crate::correlation::{unflatten, Correlation};
use crate::error::{Error, Result};
use crate::linalg::{kron_all, trace_product, CMat};

/// p(a_1, …, a_n) = Tr[(E_{a_1} ⊗ … ⊗ E_{a_n}) ρ].
pub fn born_correlation(rho: &DensityMatrix, povms: &[Povm]) -> Result<Correlation> {
    if povms.len() != rho.n_parties() {
        return Err(Error::Dimension(format!(
            "{} POVMs for a {}-party state",
            povms.len(),
            rho.n_parties()
        )));
    }
    for (i, (p, &d)) in povms.iter().zip(rho.local_dims()).enumerate() {
        if p.dim() != d {
            return Err(Error::Dimension(format!(
                "party {i}: POVM dimension {} vs local dimension {d}",
                p.dim()
            )));
        }
    }
    let outcomes: Vec<usize> = povms.iter().map(Povm::outcomes).collect();
    let len: usize = outcomes.iter().product();
    let mut idx = vec![0; outcomes.len()];
    let mut probs = Vec::with_capacity(len);
    for flat in 0..len {
        unflatten(flat, &outcomes, &mut idx);
        let factors: Vec<&CMat> = idx.iter().zip(povms).map(|(&a, p)| p.effect(a)).collect();
        let op = kron_all(factors);
        probs.push(trace_product(&op, rho.entries()).re);
    }
    Correlation::new(outcomes, probs)
}
