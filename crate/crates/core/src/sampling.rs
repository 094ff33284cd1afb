//! Random instances for property tests and sweeps.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::classical::{ClassicalState, StochasticMap};
use crate::error::Result;
use crate::linalg::{c, CMat};
use crate::quantum::{projective_simulable_povm, Basis, DensityMatrix, Povm};

/// Uniform point on the probability simplex of size `n`.
pub fn dirichlet_point(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

fn ginibre(d: usize, rng: &mut impl Rng) -> CMat {
    DMatrix::from_fn(d, d, |_, _| {
        c(StandardNormal.sample(rng), StandardNormal.sample(rng))
    })
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix, with
/// the phases of R's diagonal absorbed into Q.
pub fn random_unitary(d: usize, rng: &mut impl Rng) -> CMat {
    let qr = ginibre(d, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let rjj = r[(j, j)];
        let n = rjj.norm();
        if n > 0.0 {
            let phase = rjj / n;
            for i in 0..d {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Hilbert–Schmidt random density matrix G G† / Tr(G G†).
pub fn random_density_matrix(local_dims: &[usize], rng: &mut impl Rng) -> Result<DensityMatrix> {
    let d: usize = local_dims.iter().product();
    let g = ginibre(d, rng);
    let mut rho = &g * g.adjoint();
    let tr = rho.trace();
    rho /= tr;
    // exact Hermitian part; the product is Hermitian only up to rounding
    let rho = (&rho + rho.adjoint()) * c(0.5, 0.0);
    DensityMatrix::new(local_dims.to_vec(), rho)
}

pub fn random_stochastic_map(k: usize, d: usize, rng: &mut impl Rng) -> StochasticMap {
    let cols: Vec<Vec<f64>> = (0..d).map(|_| dirichlet_point(k, rng)).collect();
    let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
    StochasticMap::from_columns(&refs).expect("dirichlet columns are stochastic")
}

pub fn random_classical_state(n: usize, d: usize, rng: &mut impl Rng) -> ClassicalState {
    ClassicalState::from_weights_renormalized(n, d, dirichlet_point(d.pow(n as u32), rng))
        .expect("dirichlet weights")
}

pub fn random_basis(d: usize, rng: &mut impl Rng) -> Basis {
    Basis::new(random_unitary(d, rng)).expect("unitary columns")
}

/// A random projective-simulable strategy: state, one basis and
/// post-processing map per party.
pub struct ProjectiveStrategy {
    pub rho: DensityMatrix,
    pub bases: Vec<Basis>,
    pub posts: Vec<StochasticMap>,
}

impl ProjectiveStrategy {
    pub fn povms(&self) -> Result<Vec<Povm>> {
        self.bases
            .iter()
            .zip(&self.posts)
            .map(|(b, s)| projective_simulable_povm(b, s))
            .collect()
    }
}

pub fn random_projective_strategy(
    n: usize,
    d: usize,
    k: usize,
    rng: &mut impl Rng,
) -> Result<ProjectiveStrategy> {
    let rho = random_density_matrix(&vec![d; n], rng)?;
    let bases = (0..n).map(|_| random_basis(d, rng)).collect();
    let posts = (0..n).map(|_| random_stochastic_map(k, d, rng)).collect();
    Ok(ProjectiveStrategy { rho, bases, posts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 1..5 {
            let u = random_unitary(d, &mut rng);
            let err = (&u.adjoint() * &u - CMat::identity(d, d)).norm();
            assert!(err < 1e-12);
        }
    }

    #[test]
    fn density_matrix_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            random_density_matrix(&[2, 3], &mut rng).unwrap();
        }
    }

    #[test]
    fn dirichlet_sums_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = dirichlet_point(7, &mut rng);
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(v.iter().all(|x| *x >= 0.0));
    }
}
