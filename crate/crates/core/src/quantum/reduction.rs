use super::{DensityMatrix, Povm};
use crate::classical::{ClassicalState, StochasticMap};
use crate::error::{Error, Result};
use crate::linalg::{identity, kron_vec, max_abs_diff, projector, CMat, CVec};

pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// Orthonormal basis stored as the columns of a unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    columns: CMat,
}

impl Basis {
    pub fn new(columns: CMat) -> Result<Self> {
        if columns.nrows() != columns.ncols() {
            return Err(Error::InvalidBasis("basis matrix is not square".into()));
        }
        let gram = columns.adjoint() * &columns;
        let gap = max_abs_diff(&gram, &identity(columns.nrows()));
        if gap > ORTHONORMAL_TOL {
            return Err(Error::InvalidBasis(format!(
                "Gram matrix off identity by {gap:e}"
            )));
        }
        Ok(Self { columns })
    }

    pub fn computational(d: usize) -> Self {
        Self {
            columns: identity(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn vector(&self, m: usize) -> CVec {
        self.columns.column(m).into_owned()
    }

    pub fn matrix(&self) -> &CMat {
        &self.columns
    }
}

/// E_a = Σ_m s[a][m] |ψ_m⟩⟨ψ_m|.
pub fn projective_simulable_povm(basis: &Basis, post: &StochasticMap) -> Result<Povm> {
    if post.d() != basis.dim() {
        return Err(Error::Dimension(format!(
            "map input {} vs basis dimension {}",
            post.d(),
            basis.dim()
        )));
    }
    let projectors: Vec<CMat> = (0..basis.dim())
        .map(|m| projector(&basis.vector(m)))
        .collect();
    let effects = (0..post.k())
        .map(|a| {
            let mut e = CMat::zeros(basis.dim(), basis.dim());
            for (m, p) in projectors.iter().enumerate() {
                e += p.scale(post.get(a, m));
            }
            e
        })
        .collect();
    Povm::new(effects)
}

/// Diagonal classical state α_{m_1…m_n} = ⟨ψ_{m_1} … ψ_{m_n}| ρ |ψ_{m_1} … ψ_{m_n}⟩
/// together with the unchanged post-processing maps.
pub fn projective_to_classical(
    rho: &DensityMatrix,
    bases: &[Basis],
    posts: &[StochasticMap],
) -> Result<(ClassicalState, Vec<StochasticMap>)> {
    let n = rho.n_parties();
    if bases.len() != n || posts.len() != n {
        return Err(Error::Dimension(format!(
            "{n}-party state with {} bases and {} maps",
            bases.len(),
            posts.len()
        )));
    }
    let d = rho.local_dims()[0];
    for (i, (b, &ld)) in bases.iter().zip(rho.local_dims()).enumerate() {
        if ld != d || b.dim() != d {
            return Err(Error::Dimension(format!(
                "party {i}: dims must all equal {d}"
            )));
        }
        if posts[i].d() != d {
            return Err(Error::Dimension(format!(
                "party {i}: map input must be {d}"
            )));
        }
    }
    let total = d.pow(n as u32);
    let mut weights = Vec::with_capacity(total);
    let mut idx = vec![0; n];
    for flat in 0..total {
        crate::correlation::unflatten(flat, &vec![d; n], &mut idx);
        let mut v = bases[0].vector(idx[0]);
        for party in 1..n {
            v = kron_vec(&v, &bases[party].vector(idx[party]));
        }
        let amp = (v.adjoint() * rho.entries() * &v)[(0, 0)].re;
        weights.push(amp.max(0.0));
    }
    let state = ClassicalState::from_weights_renormalized(n, d, weights)?;
    Ok((state, posts.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::apply_maps;
    use crate::linalg::{c, real_ket};
    use crate::quantum::{born_correlation, catalog_state};

    #[test]
    fn singlet_in_computational_basis() {
        let (state, _) = projective_to_classical(
            &catalog_state("singlet").unwrap(),
            &[Basis::computational(2), Basis::computational(2)],
            &[StochasticMap::identity(2), StochasticMap::identity(2)],
        )
        .unwrap();
        let w = state.weights();
        let want = [0.0, 0.5, 0.5, 0.0];
        for (a, b) in w.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn product_state_gives_product_weights() {
        let phi = real_ket(&[0.6, 0.8]);
        let chi = crate::linalg::ket(&[c(0.0, 1.0 / 2f64.sqrt()), c(1.0 / 2f64.sqrt(), 0.0)]);
        let rho = DensityMatrix::pure(vec![2, 2], &kron_vec(&phi, &chi)).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let hadamard = CMat::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]);
        let bases = [Basis::computational(2), Basis::new(hadamard).unwrap()];
        let (state, _) = projective_to_classical(
            &rho,
            &bases,
            &[StochasticMap::identity(2), StochasticMap::identity(2)],
        )
        .unwrap();
        let w = state.weights();
        let ma = [w[0] + w[1], w[2] + w[3]];
        let mb = [w[0] + w[2], w[1] + w[3]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((w[2 * i + j] - ma[i] * mb[j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn non_orthonormal_basis_rejected() {
        let m = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(Basis::new(m), Err(Error::InvalidBasis(_))));
    }

    #[test]
    fn round_trip_matches_born_rule() {
        let rho = catalog_state("qutrit_state_235").unwrap();
        let post = StochasticMap::new(
            5,
            3,
            vec![
                0.2, 0.0, 0.5, 0.3, 0.1, 0.0, 0.0, 0.4, 0.25, 0.5, 0.5, 0.0, 0.0, 0.0, 0.25,
            ],
        )
        .unwrap();
        let basis = Basis::computational(3);
        let povm = projective_simulable_povm(&basis, &post).unwrap();
        let quantum = born_correlation(&rho, &[povm.clone(), povm]).unwrap();
        let (state, maps) =
            projective_to_classical(&rho, &[basis.clone(), basis], &[post.clone(), post]).unwrap();
        let classical = apply_maps(&state, &maps).unwrap();
        assert!(quantum.max_abs_diff(&classical) < 1e-12);
    }
}
