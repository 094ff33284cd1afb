//! Can a target correlation be produced by a d-level classical model?
//!
//! Every query runs the residual search; bipartite targets are additionally
//! checked against exact obstructions, which take precedence over numerics.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::support::{support_certificate, SupportVerdict, DEFAULT_BUDGET, ZERO_TOL};
use super::{Ansatz, ClassicalModel, ClassicalState, StochasticMap};
use crate::correlation::Correlation;
use crate::error::{Error, Result};
use crate::search::{minimize_residual, SearchConfig};
use crate::tasks::TargetSet;

/// Squared residual below which a target counts as reproduced.
pub const FEASIBLE_TOL: f64 = 1e-9;
/// Squared residual above which a failed search counts as evidence.
pub const INFEASIBLE_EVIDENCE_TOL: f64 = 1e-4;
/// Singular values and eigenvalues beyond this are treated as nonzero.
pub const SPECTRAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Target {
    Point(Correlation),
    /// Searched through the set's representative member; the exact
    /// obstructions used for sets hold for every member of the family.
    Set(TargetSet),
}

impl Target {
    pub fn correlation(&self) -> Result<Correlation> {
        match self {
            Target::Point(c) => Ok(c.clone()),
            Target::Set(s) => s.correlation(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Target::Point(_) => "point".into(),
            Target::Set(s) => s.id().into(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraints {
    /// All parties apply the same map.
    pub identical_maps: bool,
    /// Two canonical qubit copies with one shared 4 → k map.
    pub adaptive_pair: bool,
    /// Restrict the state to (λ, 0, 0, 1 − λ).
    pub canonical: bool,
}

impl Constraints {
    pub fn model(&self, n: usize, d: usize, k: usize) -> Result<ClassicalModel> {
        let qubit_pair = |what: &str| {
            if n == 2 && d == 2 {
                Ok(())
            } else {
                Err(Error::Dimension(format!(
                    "{what} ansatz needs n = 2, d = 2, got n = {n}, d = {d}"
                )))
            }
        };
        if d == 0 || k == 0 || n == 0 {
            return Err(Error::Dimension("empty model".into()));
        }
        if self.adaptive_pair {
            qubit_pair("adaptive pair")?;
            Ok(ClassicalModel::adaptive_pair(k))
        } else if self.canonical {
            qubit_pair("canonical")?;
            Ok(ClassicalModel::canonical(k, self.identical_maps))
        } else {
            Ok(ClassicalModel::general(n, d, k, self.identical_maps))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FeasibilityStatus {
    Feasible,
    /// An exact obstruction was found.
    Infeasible,
    /// No obstruction known, but the best residual exceeds
    /// [`INFEASIBLE_EVIDENCE_TOL`].
    InfeasibleEvidence,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// No support pattern of the model family matches the target's zeros.
    SignPattern,
    /// For qubit models P − p_A p_Bᵀ has rank at most one.
    MarginalForcing {
        sigma2: f64,
    },
    RankBound {
        rank: usize,
        d: usize,
    },
    /// A shared map on a diagonal state cannot vanish on the whole diagonal.
    ZeroDiagonalColumns,
    NotPsd {
        min_eigenvalue: f64,
    },
    Asymmetric {
        max_diff: f64,
    },
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::SignPattern => {
                write!(f, "zero pattern not realizable by any model support")
            }
            Certificate::MarginalForcing { sigma2 } => {
                write!(f, "centered correlation has second singular value {sigma2:.3e}; qubit models allow rank 1")
            }
            Certificate::RankBound { rank, d } => {
                write!(f, "rank {rank} exceeds local dimension {d}")
            }
            Certificate::ZeroDiagonalColumns => {
                write!(
                    f,
                    "zero diagonal forces every weighted column of the shared map to vanish"
                )
            }
            Certificate::NotPsd { min_eigenvalue } => {
                write!(
                    f,
                    "shared-map model is PSD but target has eigenvalue {min_eigenvalue:.3e}"
                )
            }
            Certificate::Asymmetric { max_diff } => {
                write!(f, "shared-map model is symmetric but target differs from its transpose by {max_diff:.3e}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityResult {
    pub status: FeasibilityStatus,
    pub proof: Option<Certificate>,
    /// Present when feasible.
    pub witness: Option<(ClassicalState, Vec<StochasticMap>)>,
    /// Model output closest to the target.
    pub closest: Correlation,
    pub best_residual: f64,
    pub restarts_used: usize,
    pub target: Correlation,
    pub model: ClassicalModel,
}

fn matrix(c: &Correlation) -> DMatrix<f64> {
    let (ka, kb) = (c.outcomes()[0], c.outcomes()[1]);
    DMatrix::from_fn(ka, kb, |a, b| c.get(&[a, b]))
}

fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn sign_pattern(c: &Correlation, d: usize, model: &ClassicalModel) -> Option<Certificate> {
    match support_certificate(c, d, model.ansatz, model.identical, DEFAULT_BUDGET) {
        Ok(SupportVerdict::Incompatible) => Some(Certificate::SignPattern),
        _ => None,
    }
}

/// Exact obstructions for bipartite targets, strongest-known first.
pub fn certificate(target: &Correlation, d: usize, model: &ClassicalModel) -> Option<Certificate> {
    if target.n_parties() != 2 {
        return None;
    }
    let p = matrix(target);
    let square = p.nrows() == p.ncols();
    if model.ansatz == Ansatz::AdaptivePair {
        if !square {
            return None;
        }
        let max_diff = (&p - p.transpose()).abs().max();
        if max_diff > SPECTRAL_TOL {
            return Some(Certificate::Asymmetric { max_diff });
        }
        if (0..p.nrows()).all(|a| p[(a, a)] <= ZERO_TOL) {
            return Some(Certificate::ZeroDiagonalColumns);
        }
        let min_eigenvalue = p.clone().symmetric_eigen().eigenvalues.min();
        if min_eigenvalue < -SPECTRAL_TOL {
            return Some(Certificate::NotPsd { min_eigenvalue });
        }
        return if square {
            sign_pattern(target, d, model)
        } else {
            None
        };
    }
    let d_eff = if model.ansatz == Ansatz::Canonical {
        2
    } else {
        d
    };
    if square {
        if let Some(c) = sign_pattern(target, d_eff, model) {
            return Some(c);
        }
    }
    if d_eff == 2 {
        let pa = target.marginal(0);
        let pb = target.marginal(1);
        let centered = DMatrix::from_fn(p.nrows(), p.ncols(), |a, b| p[(a, b)] - pa[a] * pb[b]);
        let sigma2 = singular_values(&centered).get(1).copied().unwrap_or(0.0);
        if sigma2 > SPECTRAL_TOL {
            return Some(Certificate::MarginalForcing { sigma2 });
        }
    }
    let rank = singular_values(&p)
        .iter()
        .filter(|s| **s > SPECTRAL_TOL)
        .count();
    (rank > d_eff).then_some(Certificate::RankBound { rank, d: d_eff })
}

/// Searches for a d-level classical model of `target` under `constraints`.
pub fn feasibility(
    target: &Target,
    d: usize,
    constraints: Constraints,
    cfg: &SearchConfig,
) -> Result<FeasibilityResult> {
    cfg.validate()?;
    let corr = target.correlation()?;
    let k = corr.k().ok_or_else(|| {
        Error::Dimension(format!(
            "parties have unequal outcome counts {:?}",
            corr.outcomes()
        ))
    })?;
    let model = constraints.model(corr.n_parties(), d, k)?;
    let proof = certificate(&corr, d, &model);
    let spec = model.spec();
    let eval = |x: &[f64], out: &mut [f64]| model.eval_into(x, out);
    let out = minimize_residual(corr.probs(), &eval, &spec, cfg, Some(FEASIBLE_TOL / 2.0))?;
    let closest = Correlation::new_unchecked(corr.outcomes().to_vec(), model.eval(&out.argmin))?;
    let status = match (&proof, out.best_residual) {
        (Some(c), r) => {
            if r < FEASIBLE_TOL {
                log::error!("search residual {r:.3e} contradicts certificate: {c}");
            }
            FeasibilityStatus::Infeasible
        }
        (None, r) if r < FEASIBLE_TOL => FeasibilityStatus::Feasible,
        (None, r) if r > INFEASIBLE_EVIDENCE_TOL => FeasibilityStatus::InfeasibleEvidence,
        _ => FeasibilityStatus::Inconclusive,
    };
    let witness = match status {
        FeasibilityStatus::Feasible => Some(model.witness(&out.argmin)?),
        _ => None,
    };
    Ok(FeasibilityResult {
        status,
        proof,
        witness,
        closest,
        best_residual: out.best_residual,
        restarts_used: out.restarts_used,
        target: corr,
        model,
    })
}

/// Two canonical qubit copies per party read through one shared 4 → 3 map.
///
/// A single copy (λ′ ∈ {0, 1}) is tried first; if it suffices, its witness
/// is returned.
pub fn sym_adaptive_feasibility(
    target: &Correlation,
    cfg: &SearchConfig,
) -> Result<FeasibilityResult> {
    if target.outcomes() != [3, 3] {
        return Err(Error::Dimension(format!(
            "expected a 3x3 target, got {:?}",
            target.outcomes()
        )));
    }
    let point = Target::Point(target.clone());
    let single = Constraints {
        identical_maps: true,
        canonical: true,
        adaptive_pair: false,
    };
    let r = feasibility(&point, 2, single, cfg)?;
    if r.status == FeasibilityStatus::Feasible {
        return Ok(r);
    }
    let pair = Constraints {
        identical_maps: true,
        adaptive_pair: true,
        canonical: false,
    };
    feasibility(&point, 2, pair, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{apply_maps, canonical_two_level};

    fn cfg() -> SearchConfig {
        SearchConfig::for_infeasibility(5).with_restarts(64)
    }

    #[test]
    fn uniform_sixteen_is_feasible() {
        let t = Target::Point(Correlation::uniform(vec![4, 4]));
        let r = feasibility(&t, 2, Constraints::default(), &cfg()).unwrap();
        assert_eq!(r.status, FeasibilityStatus::Feasible);
        let (s, maps) = r.witness.unwrap();
        let c = apply_maps(&s, &maps).unwrap();
        assert!(c.sq_distance(&r.target) < FEASIBLE_TOL);
    }

    #[test]
    fn embedded_copy_is_feasible() {
        let t = Correlation::from_fn(vec![3, 3], |i| match (i[0], i[1]) {
            (0, 0) | (1, 1) => 0.5,
            _ => 0.0,
        })
        .unwrap();
        let r = feasibility(&Target::Point(t), 2, Constraints::default(), &cfg()).unwrap();
        assert_eq!(r.status, FeasibilityStatus::Feasible);
        assert!(r.proof.is_none());
    }

    #[test]
    fn t2_member_is_forced_infeasible() {
        let r = feasibility(
            &Target::Set(TargetSet::T2_223 { x: 0.05 }),
            2,
            Constraints::default(),
            &cfg(),
        )
        .unwrap();
        assert_eq!(r.status, FeasibilityStatus::Infeasible);
        assert!(matches!(r.proof, Some(Certificate::MarginalForcing { .. })));
        assert!(r.best_residual > INFEASIBLE_EVIDENCE_TOL);
    }

    #[test]
    fn adaptive_zero_diagonal() {
        let t = Correlation::from_fn(vec![3, 3], |i| if i[0] == i[1] { 0.0 } else { 1.0 / 6.0 })
            .unwrap();
        let r = sym_adaptive_feasibility(&t, &cfg()).unwrap();
        assert_eq!(r.proof, Some(Certificate::ZeroDiagonalColumns));
    }

    #[test]
    fn adaptive_deterministic_copies() {
        let t = Correlation::from_fn(vec![3, 3], |i| match (i[0], i[1]) {
            (0, 0) | (2, 2) => 0.25,
            (1, 1) => 0.5,
            _ => 0.0,
        })
        .unwrap();
        let r = sym_adaptive_feasibility(&t, &cfg()).unwrap();
        assert_eq!(r.status, FeasibilityStatus::Feasible);
        assert_eq!(r.model.ansatz, Ansatz::AdaptivePair);
        let u = sym_adaptive_feasibility(&Correlation::uniform(vec![3, 3]), &cfg()).unwrap();
        assert_eq!(u.status, FeasibilityStatus::Feasible);
        assert!(sym_adaptive_feasibility(&Correlation::uniform(vec![4, 4]), &cfg()).is_err());
    }

    #[test]
    fn canonical_model_certificates_stay_silent() {
        let s = canonical_two_level(0.3).unwrap();
        let m =
            crate::classical::StochasticMap::new(3, 2, vec![0.2, 0.5, 0.3, 0.1, 0.5, 0.4]).unwrap();
        let c = apply_maps(&s, &[m.clone(), m]).unwrap();
        assert_eq!(
            certificate(&c, 2, &ClassicalModel::general(2, 2, 3, false)),
            None
        );
    }
}
