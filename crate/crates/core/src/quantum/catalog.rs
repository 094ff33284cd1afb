use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::{DensityMatrix, Povm};
use crate::error::{Error, Result};
use crate::linalg::{c, ket, projector, real_ket, CVec, C64};

/// Names accepted by [`catalog`].
pub const CATALOG_NAMES: &[&str] = &[
    "singlet",
    "psi_plus",
    "phi_plus",
    "trine",
    "trine_rotated",
    "trine_rotated_b",
    "sic",
    "sic_rotA",
    "sic_rotB",
    "qutrit_state_235",
    "qutrit_povm_5",
    "qutrit_povm_335",
    "tripartite_antisym_335",
];

#[derive(Debug, Clone, PartialEq)]
pub enum CatalogItem {
    State(DensityMatrix),
    Povm(Povm),
}

pub fn catalog(name: &str) -> Result<CatalogItem> {
    let item = match name {
        "singlet" => CatalogItem::State(two_qubit(&[0.0, 1.0, -1.0, 0.0])),
        "psi_plus" => CatalogItem::State(two_qubit(&[0.0, 1.0, 1.0, 0.0])),
        "phi_plus" => CatalogItem::State(two_qubit(&[1.0, 0.0, 0.0, 1.0])),
        "trine" => CatalogItem::Povm(trine(|t| [t.cos(), t.sin()])),
        // Trine in the |±⟩ basis.
        "trine_rotated" => CatalogItem::Povm(trine(|t| {
            let (a, b) = (t.cos(), t.sin());
            [(a + b) * FRAC_1_SQRT_2, (a - b) * FRAC_1_SQRT_2]
        })),
        // Mirror image of `trine_rotated` (angle → −angle); the partner of
        // `trine_rotated` on ψ⁺ that makes the diagonal 2/9.
        "trine_rotated_b" => CatalogItem::Povm(trine(|t| {
            let (a, b) = (t.cos(), -t.sin());
            [(a + b) * FRAC_1_SQRT_2, (a - b) * FRAC_1_SQRT_2]
        })),
        "sic" => CatalogItem::Povm(sic(
            real_ket(&[1.0, 0.0]),
            |w| ket(&[c((1.0f64 / 3.0).sqrt(), 0.0), w * (2.0f64 / 3.0).sqrt()]),
            1.0,
        )),
        "sic_rotA" => CatalogItem::Povm(sic(
            real_ket(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]),
            rotated_sic_ket,
            1.0,
        )),
        "sic_rotB" => CatalogItem::Povm(sic(
            real_ket(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]),
            rotated_sic_ket,
            -1.0,
        )),
        "qutrit_state_235" => {
            let s = 1.0 / 6f64.sqrt();
            // |01⟩+|02⟩+|10⟩+|12⟩+|20⟩−|21⟩
            let amps = [0.0, s, s, s, 0.0, s, s, -s, 0.0];
            CatalogItem::State(DensityMatrix::pure(vec![3, 3], &real_ket(&amps)).expect("valid"))
        }
        "qutrit_povm_5" => {
            let h = FRAC_1_SQRT_2;
            let vecs: [[f64; 3]; 5] = [
                [1.0, 0.0, 0.0],
                [0.0, h, 0.0],
                [0.0, 0.0, h],
                [0.0, 0.5, 0.5],
                [0.0, 0.5, -0.5],
            ];
            CatalogItem::Povm(
                Povm::new(vecs.iter().map(|v| projector(&real_ket(v))).collect()).expect("valid"),
            )
        }
        // |0⟩⟨0| + ⅐ of the {|1⟩,|2⟩} plane, plus a qubit SIC in that plane
        // weighted 3/7. On the antisymmetric state every (a,b,c) in the
        // G335 set then has probability 1/49 or more.
        "qutrit_povm_335" => {
            let plane = |x: CVec| ket(&[c(0.0, 0.0), x[0], x[1]]);
            let mut effects = vec![
                projector(&real_ket(&[1.0, 0.0, 0.0]))
                    + projector(&real_ket(&[0.0, 1.0, 0.0])).scale(1.0 / 7.0)
                    + projector(&real_ket(&[0.0, 0.0, 1.0])).scale(1.0 / 7.0),
            ];
            effects.push(projector(&plane(real_ket(&[1.0, 0.0]))).scale(3.0 / 7.0));
            for a in 0..3 {
                let w = C64::from_polar(1.0, 2.0 * PI * a as f64 / 3.0);
                let v = ket(&[c((1.0f64 / 3.0).sqrt(), 0.0), w * (2.0f64 / 3.0).sqrt()]);
                effects.push(projector(&plane(v)).scale(3.0 / 7.0));
            }
            CatalogItem::Povm(Povm::new(effects).expect("valid"))
        }
        "tripartite_antisym_335" => {
            let s = 1.0 / 6f64.sqrt();
            let mut amps = [0.0; 27];
            for (idx, sign) in [
                ([0, 1, 2], 1.0),
                ([1, 2, 0], 1.0),
                ([2, 0, 1], 1.0),
                ([0, 2, 1], -1.0),
                ([1, 0, 2], -1.0),
                ([2, 1, 0], -1.0),
            ] {
                amps[idx[0] * 9 + idx[1] * 3 + idx[2]] = sign * s;
            }
            CatalogItem::State(DensityMatrix::pure(vec![3, 3, 3], &real_ket(&amps)).expect("valid"))
        }
        other => return Err(Error::Catalog(other.to_string())),
    };
    Ok(item)
}

pub fn catalog_state(name: &str) -> Result<DensityMatrix> {
    match catalog(name)? {
        CatalogItem::State(s) => Ok(s),
        CatalogItem::Povm(_) => Err(Error::Catalog(format!("{name} is a POVM, not a state"))),
    }
}

pub fn catalog_povm(name: &str) -> Result<Povm> {
    match catalog(name)? {
        CatalogItem::Povm(p) => Ok(p),
        CatalogItem::State(_) => Err(Error::Catalog(format!("{name} is a state, not a POVM"))),
    }
}

fn two_qubit(amps: &[f64; 4]) -> DensityMatrix {
    let v = real_ket(amps).unscale(2f64.sqrt());
    DensityMatrix::pure(vec![2, 2], &v).expect("valid")
}

fn trine(vector: impl Fn(f64) -> [f64; 2]) -> Povm {
    let effects = (0..3)
        .map(|a| projector(&real_ket(&vector(2.0 * PI * a as f64 / 3.0))).scale(2.0 / 3.0))
        .collect();
    Povm::new(effects).expect("valid")
}

fn sic(first: CVec, rest: impl Fn(C64) -> CVec, sign: f64) -> Povm {
    let mut effects = vec![projector(&first).scale(0.5)];
    for a in 1..=3 {
        let w = C64::from_polar(1.0, sign * 2.0 * PI * (a as f64 - 1.0) / 3.0);
        effects.push(projector(&rest(w)).scale(0.5));
    }
    Povm::new(effects).expect("valid")
}

fn rotated_sic_ket(w: C64) -> CVec {
    let r2 = 2f64.sqrt();
    let one = c(1.0, 0.0);
    ket(&[one + w * r2, one - w * r2]).unscale(6f64.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::trace;

    #[test]
    fn every_name_resolves() {
        for name in CATALOG_NAMES {
            catalog(name).unwrap();
        }
        assert!(matches!(catalog("nope"), Err(Error::Catalog(_))));
    }

    #[test]
    fn povm_335_on_antisymmetric_state() {
        use crate::quantum::born_correlation;
        use crate::tasks::{payoff, TaskId, TaskSpec};
        let p = catalog_povm("qutrit_povm_335").unwrap();
        let rho = catalog_state("tripartite_antisym_335").unwrap();
        let corr = born_correlation(&rho, &[p.clone(), p.clone(), p]).unwrap();
        let v = payoff(&TaskSpec::get(TaskId::G335), &corr).unwrap();
        assert!((v - 1.0 / 49.0).abs() < 1e-13, "{v}");
    }

    #[test]
    fn trine_effects() {
        let p = catalog_povm("trine").unwrap();
        assert_eq!(p.outcomes(), 3);
        for e in p.effects() {
            assert!((trace(e).re - 2.0 / 3.0).abs() < 1e-14);
            // rank one: determinant vanishes
            assert!(e.determinant().norm() < 1e-14);
        }
    }

    #[test]
    fn singlet_entries() {
        let s = catalog_state("singlet").unwrap();
        let m = s.entries();
        assert!((m[(1, 1)].re - 0.5).abs() < 1e-15);
        assert!((m[(2, 2)].re - 0.5).abs() < 1e-15);
        assert!((m[(1, 2)].re + 0.5).abs() < 1e-15);
        assert!(m[(0, 0)].norm() < 1e-15 && m[(3, 3)].norm() < 1e-15);
    }

    #[test]
    fn qutrit_povm_traces() {
        let p = catalog_povm("qutrit_povm_5").unwrap();
        let traces: Vec<f64> = p.effects().iter().map(|e| trace(e).re).collect();
        assert!((traces[0] - 1.0).abs() < 1e-15);
        for t in &traces[1..] {
            assert!((t - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn kind_mismatch_is_an_error() {
        assert!(catalog_state("trine").is_err());
        assert!(catalog_povm("singlet").is_err());
    }
}
