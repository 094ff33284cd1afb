use serde::{Deserialize, Serialize};

use crate::boxworld::{bw_correlation, example_strategy};
use crate::correlation::Correlation;
use crate::error::{check_unit, Error, Result};

pub const TARGET_IDS: &[&str] = &["T1_223", "T2_223", "T1_224", "T2_224", "T_235_SYM", "T_PR"];

/// Strict positivity threshold for the off-diagonal entries of T1 sets.
pub const T1_POSITIVE: f64 = 1e-12;

/// Target correlation sets. T1 sets are sign patterns; the others are
/// parameterized families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id")]
pub enum TargetSet {
    #[serde(rename = "T1_223")]
    T1_223,
    #[serde(rename = "T2_223")]
    T2_223 { x: f64 },
    #[serde(rename = "T1_224")]
    T1_224,
    #[serde(rename = "T2_224")]
    T2_224 { x: f64 },
    #[serde(rename = "T_235_SYM")]
    T235Sym { p: f64, eps: f64 },
    #[serde(rename = "T_PR")]
    TPr { p1: f64 },
}

impl TargetSet {
    /// Builds a set from its identifier; family parameters default to the
    /// noiseless point (x = 0, p = ε = 1, p1 = 1/2).
    pub fn parse(
        id: &str,
        x: Option<f64>,
        p: Option<f64>,
        eps: Option<f64>,
        p1: Option<f64>,
    ) -> Result<Self> {
        let set = match id.to_ascii_uppercase().as_str() {
            "T1_223" => TargetSet::T1_223,
            "T2_223" => TargetSet::T2_223 {
                x: x.unwrap_or(0.0),
            },
            "T1_224" => TargetSet::T1_224,
            "T2_224" => TargetSet::T2_224 {
                x: x.unwrap_or(0.0),
            },
            "T_235_SYM" | "T235_SYM" => TargetSet::T235Sym {
                p: p.unwrap_or(1.0),
                eps: eps.unwrap_or(1.0),
            },
            "T_PR" | "TPR" => TargetSet::TPr {
                p1: p1.unwrap_or(0.5),
            },
            _ => return Err(Error::UnknownTarget(id.to_string())),
        };
        set.correlation()?;
        Ok(set)
    }

    pub fn id(&self) -> &'static str {
        match self {
            TargetSet::T1_223 => "T1_223",
            TargetSet::T2_223 { .. } => "T2_223",
            TargetSet::T1_224 => "T1_224",
            TargetSet::T2_224 { .. } => "T2_224",
            TargetSet::T235Sym { .. } => "T_235_SYM",
            TargetSet::TPr { .. } => "T_PR",
        }
    }

    pub fn k(&self) -> usize {
        match self {
            TargetSet::T1_223 | TargetSet::T2_223 { .. } | TargetSet::TPr { .. } => 3,
            TargetSet::T1_224 | TargetSet::T2_224 { .. } => 4,
            TargetSet::T235Sym { .. } => 5,
        }
    }

    /// True for sign-pattern sets that have no numeric parameters.
    pub fn is_pattern(&self) -> bool {
        matches!(self, TargetSet::T1_223 | TargetSet::T1_224)
    }

    /// Concrete member: the family point for parameterized sets, the
    /// constant off-diagonal member for T1 patterns. For T2 at x = 1/k² this
    /// is the uniform table, which lies on the closure of the family but
    /// not in it.
    pub fn correlation(&self) -> Result<Correlation> {
        match *self {
            TargetSet::T1_223 => t2_point(3, 0.0),
            TargetSet::T1_224 => t2_point(4, 0.0),
            TargetSet::T2_223 { x } => t2_point(3, x),
            TargetSet::T2_224 { x } => t2_point(4, x),
            TargetSet::T235Sym { p, eps } => nab_correlation(p, eps),
            TargetSet::TPr { p1 } => {
                let (omega, f, g) = example_strategy(p1)?;
                bw_correlation(&omega, &f, &g)
            }
        }
    }
}

/// Diagonal x, off-diagonal y = (1/k − x)/(k − 1).
fn t2_point(k: usize, x: f64) -> Result<Correlation> {
    let kf = k as f64;
    if !(0.0..=1.0 / kf).contains(&x) {
        return Err(Error::Parameter {
            name: "x",
            value: x,
            range: "[0, 1/k]",
        });
    }
    let y = (1.0 / kf - x) / (kf - 1.0);
    Correlation::from_fn(vec![k, k], |i| if i[0] == i[1] { x } else { y })
}

/// Closed-form table of the N_AB family with q = ε²p, r = εp.
pub fn nab_correlation(p: f64, eps: f64) -> Result<Correlation> {
    check_unit("p", p)?;
    check_unit("eps", eps)?;
    let q = eps * eps * p;
    let r = eps * p;
    let t = [
        [
            (1.0 - q) / 9.0,
            (2.0 + q) / 36.0,
            (2.0 + q) / 36.0,
            (2.0 + r + 3.0 * q) / 36.0,
            (2.0 - r - q) / 36.0,
        ],
        [
            (2.0 + q) / 36.0,
            (1.0 - q) / 36.0,
            (2.0 + q) / 72.0,
            (4.0 + 2.0 * r - 3.0 * q) / 144.0,
            (4.0 - 2.0 * r + q) / 144.0,
        ],
        [
            (2.0 + q) / 36.0,
            (2.0 + q) / 72.0,
            (1.0 - q) / 36.0,
            (4.0 + 2.0 * r - 3.0 * q) / 144.0,
            (4.0 - 2.0 * r + q) / 144.0,
        ],
        [
            (2.0 + r + 3.0 * q) / 36.0,
            (4.0 + 2.0 * r - 3.0 * q) / 144.0,
            (4.0 + 2.0 * r - 3.0 * q) / 144.0,
            (1.0 + r - 2.0 * q) / 36.0,
            (2.0 + q) / 72.0,
        ],
        [
            (2.0 - r - q) / 36.0,
            (4.0 - 2.0 * r + q) / 144.0,
            (4.0 - 2.0 * r + q) / 144.0,
            (2.0 + q) / 72.0,
            (1.0 - r) / 36.0,
        ],
    ];
    Correlation::from_fn(vec![5, 5], |i| t[i[0]][i[1]])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fitted {
    None,
    Xy {
        x: f64,
        y: f64,
    },
    /// `eps` is `None` when p·ε = 0 and ε is not identifiable.
    PEps {
        p: f64,
        eps: Option<f64>,
    },
    P1 {
        p1: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub member: bool,
    pub fitted: Fitted,
    pub tol: f64,
}

/// Checks whether `corr` matches the defining pattern of `set` within `tol`.
/// Family parameters stored in `set` are ignored; they are fitted instead.
pub fn membership(corr: &Correlation, set: &TargetSet, tol: f64) -> Membership {
    let k = set.k();
    let no = |fitted| Membership {
        member: false,
        fitted,
        tol,
    };
    if corr.outcomes() != [k, k] {
        return no(Fitted::None);
    }
    let rows = corr.rows();
    let diag: Vec<f64> = (0..k).map(|i| rows[i][i]).collect();
    let off: Vec<f64> = (0..k)
        .flat_map(|a| (0..k).filter(move |&b| b != a).map(move |b| (a, b)))
        .map(|(a, b)| rows[a][b])
        .collect();
    let spread = |v: &[f64]| {
        v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - v.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    match set {
        TargetSet::T1_223 | TargetSet::T1_224 => Membership {
            member: diag.iter().all(|p| p.abs() <= tol) && off.iter().all(|&p| p > T1_POSITIVE),
            fitted: Fitted::None,
            tol,
        },
        TargetSet::T2_223 { .. } | TargetSet::T2_224 { .. } => {
            let (x, y) = (mean(&diag), mean(&off));
            Membership {
                member: spread(&diag) <= tol && spread(&off) <= tol && (x - y).abs() > tol,
                fitted: Fitted::Xy { x, y },
                tol,
            }
        }
        TargetSet::T235Sym { .. } => {
            let q = 1.0 - 9.0 * rows[0][0];
            let r = 1.0 - 36.0 * rows[4][4];
            let (p, eps) = if r.abs() <= tol {
                (0.0, None)
            } else {
                let eps = q / r;
                (r / eps.max(f64::MIN_POSITIVE), Some(eps))
            };
            let in_range = |v: f64| (-tol..=1.0 + tol).contains(&v);
            let fitted = Fitted::PEps { p, eps };
            let ok_range = in_range(p) && eps.is_none_or(in_range);
            let member = ok_range
                && nab_correlation(p.clamp(0.0, 1.0), eps.unwrap_or(1.0).clamp(0.0, 1.0))
                    .map(|t| t.max_abs_diff(corr) <= tol)
                    .unwrap_or(false);
            Membership {
                member,
                fitted,
                tol,
            }
        }
        TargetSet::TPr { .. } => {
            let (Ok(a), Ok(b)) = (
                TargetSet::TPr { p1: 0.0 }.correlation(),
                TargetSet::TPr { p1: 1.0 }.correlation(),
            ) else {
                return no(Fitted::None);
            };
            let dir: Vec<f64> = b
                .probs()
                .iter()
                .zip(a.probs())
                .map(|(u, v)| u - v)
                .collect();
            let rel: Vec<f64> = corr
                .probs()
                .iter()
                .zip(a.probs())
                .map(|(u, v)| u - v)
                .collect();
            let norm: f64 = dir.iter().map(|v| v * v).sum();
            let p1 = if norm > 0.0 {
                (dir.iter().zip(&rel).map(|(u, v)| u * v).sum::<f64>() / norm).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let member = TargetSet::TPr { p1 }
                .correlation()
                .map(|t| t.max_abs_diff(corr) <= tol)
                .unwrap_or(false);
            Membership {
                member,
                fitted: Fitted::P1 { p1 },
                tol,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nab_at_one_is_the_zero_diagonal_table() {
        let c = nab_correlation(1.0, 1.0).unwrap();
        let t48 = [
            [0.0, 4.0, 4.0, 8.0, 0.0],
            [4.0, 0.0, 2.0, 1.0, 1.0],
            [4.0, 2.0, 0.0, 1.0, 1.0],
            [8.0, 1.0, 1.0, 0.0, 2.0],
            [0.0, 1.0, 1.0, 2.0, 0.0],
        ];
        for a in 0..5 {
            for b in 0..5 {
                assert!((c.get(&[a, b]) - t48[a][b] / 48.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn nab_at_zero_noise_parameter() {
        let c = nab_correlation(0.0, 0.4).unwrap();
        assert!((c.get(&[0, 0]) - 1.0 / 9.0).abs() < 1e-15);
        assert!((c.get(&[3, 3]) - 1.0 / 36.0).abs() < 1e-15);
        // product of marginals
        let (ma, mb) = (c.marginal(0), c.marginal(1));
        for a in 0..5 {
            for b in 0..5 {
                assert!((c.get(&[a, b]) - ma[a] * mb[b]).abs() < 1e-15);
            }
        }
        assert!(nab_correlation(1.2, 0.5).is_err());
    }

    #[test]
    fn t2_generator_round_trip() {
        for x in [0.0, 0.05, 0.2, 1.0 / 3.0] {
            let set = TargetSet::T2_223 { x };
            let m = membership(&set.correlation().unwrap(), &set, 1e-12);
            assert!(m.member);
            let Fitted::Xy { x: fx, y: fy } = m.fitted else {
                panic!()
            };
            assert!((fx - x).abs() < 1e-12 && (fy - (1.0 / 3.0 - x) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_is_not_in_t2() {
        let set = TargetSet::T2_223 { x: 0.0 };
        assert!(!membership(&Correlation::uniform(vec![3, 3]), &set, 1e-12).member);
        let set = TargetSet::T2_224 { x: 0.0 };
        assert!(!membership(&Correlation::uniform(vec![4, 4]), &set, 1e-12).member);
    }

    #[test]
    fn t1_pattern() {
        let set = TargetSet::T1_223;
        assert!(membership(&set.correlation().unwrap(), &set, 1e-12).member);
        let c = Correlation::from_fn(vec![3, 3], |i| match (i[0], i[1]) {
            (a, b) if a == b => 0.0,
            (0, 1) => 0.0,
            _ => 0.2,
        })
        .unwrap();
        assert!(!membership(&c, &set, 1e-12).member);
        assert!(!membership(&Correlation::uniform(vec![4, 4]), &set, 1e-12).member);
    }

    #[test]
    fn nab_fit_round_trip() {
        for &(p, eps) in &[(1.0, 1.0), (0.3, 0.7), (0.9, 0.2)] {
            let set = TargetSet::T235Sym { p, eps };
            let m = membership(&nab_correlation(p, eps).unwrap(), &set, 1e-12);
            assert!(m.member);
            let Fitted::PEps {
                p: fp,
                eps: Some(fe),
            } = m.fitted
            else {
                panic!()
            };
            assert!((fp - p).abs() < 1e-12 && (fe - eps).abs() < 1e-12);
        }
    }

    #[test]
    fn parse_sets() {
        assert_eq!(
            TargetSet::parse("T2_223", Some(0.1), None, None, None).unwrap(),
            TargetSet::T2_223 { x: 0.1 }
        );
        assert!(TargetSet::parse("T2_223", Some(0.5), None, None, None).is_err());
        assert!(TargetSet::parse("T9", None, None, None, None).is_err());
        for id in TARGET_IDS {
            TargetSet::parse(id, None, None, None, None).unwrap();
        }
    }
}
