use crate::correlation::{Correlation, NORM_TOL};
use crate::error::{Error, Result};

/// Shannon entropy in bits with 0·log 0 = 0.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// I(A;B) = H(A) + H(B) − H(AB) in bits.
pub fn mutual_information(corr: &Correlation) -> Result<f64> {
    if corr.n_parties() != 2 {
        return Err(Error::Dimension(format!(
            "mutual information needs a bipartite table, got {} parties",
            corr.n_parties()
        )));
    }
    corr.validate(NORM_TOL)?;
    let ha = entropy_bits(&corr.marginal(0));
    let hb = entropy_bits(&corr.marginal(1));
    let hab = entropy_bits(corr.probs());
    Ok(ha + hb - hab)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_diagonal_trine_table() {
        let c = Correlation::from_fn(vec![3, 3], |i| if i[0] == i[1] { 0.0 } else { 1.0 / 6.0 })
            .unwrap();
        let mi = mutual_information(&c).unwrap();
        assert!((mi - 1.5f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn uniform_is_independent() {
        let mi = mutual_information(&Correlation::uniform(vec![3, 3])).unwrap();
        assert!(mi.abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let c = Correlation::new_unchecked(vec![2, 2], vec![0.5, 0.5, 0.5, 0.0]).unwrap();
        assert!(mutual_information(&c).is_err());
        assert!(mutual_information(&Correlation::uniform(vec![2, 2, 2])).is_err());
    }
}
