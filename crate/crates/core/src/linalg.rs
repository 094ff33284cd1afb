//! Small dense complex-matrix helpers on top of nalgebra.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn projector(v: &CVec) -> CMat {
    v * v.adjoint()
}

pub fn ket(amps: &[C64]) -> CVec {
    CVec::from_column_slice(amps)
}

pub fn real_ket(amps: &[f64]) -> CVec {
    CVec::from_iterator(amps.len(), amps.iter().map(|&a| c(a, 0.0)))
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_all<'a, I: IntoIterator<Item = &'a CMat>>(mats: I) -> CMat {
    let mut it = mats.into_iter();
    let first = it
        .next()
        .expect("kron_all needs at least one factor")
        .clone();
    it.fold(first, |acc, m| acc.kronecker(m))
}

pub fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    a.kronecker(b)
}

pub fn trace(a: &CMat) -> C64 {
    a.diagonal().iter().sum()
}

/// Tr(AB) without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> C64 {
    let n = a.nrows();
    let mut acc = c(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Largest elementwise modulus of A − A†.
pub fn hermitian_defect(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Smallest eigenvalue of the Hermitian part of `a`.
pub fn min_eigenvalue(a: &CMat) -> f64 {
    let h = (a + a.adjoint()).scale(0.5);
    h.symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Pauli matrices (X, Y, Z).
pub fn paulis() -> [CMat; 3] {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        CMat::from_row_slice(2, 2, &[z, one, one, z]),
        CMat::from_row_slice(2, 2, &[z, -i, i, z]),
        CMat::from_row_slice(2, 2, &[one, z, z, -one]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_shapes_and_trace() {
        let a = identity(2);
        let b = identity(3);
        let k = kron(&a, &b);
        assert_eq!(k.nrows(), 6);
        assert!((trace(&k).re - 6.0).abs() < 1e-15);
    }

    #[test]
    fn trace_product_matches_product() {
        let [x, y, z] = paulis();
        let m = &x + &z.scale(0.3);
        let n = &y + &x.scale(2.0);
        let direct = trace(&(&m * &n));
        assert!((trace_product(&m, &n) - direct).norm() < 1e-15);
    }

    #[test]
    fn pauli_spectrum() {
        for p in paulis() {
            assert!((min_eigenvalue(&p) + 1.0).abs() < 1e-14);
            assert!(hermitian_defect(&p) < 1e-15);
        }
    }
}
