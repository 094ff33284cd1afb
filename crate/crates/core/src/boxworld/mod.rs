//! The square-bit box world and its PR-model composite.
//!
//! Vectors live in R^3 with the unit effect u = (0, 0, 1). A bipartite state
//! is a 3×3 matrix Ω and a pair of local effects (f, g) has probability
//! fᵀ Ω g. Only product effects are admitted.

mod catalog;

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use num_traits::ToPrimitive;
use serde::Serialize;

pub use catalog::{
    bilinear as bilinear_exact, dot as dot_exact, entangled_state_exact, extremal_effect_exact,
    pr_state_exact, product_state_exact, pure_state_exact, unit_exact, zero_exact, QMat, QVec, Q,
};

use crate::correlation::Correlation;
use crate::error::{check_unit, Error, Result};
use crate::search::{
    lp_block_ascent, maximize_with, slp_refine, LinearGroup, MaximizeOptions, SearchConfig,
    SimplexSpec,
};
use crate::tasks::{TaskId, TaskSpec};

const TOL: f64 = 1e-12;
/// Number of pure PR-model states (16 products, 8 entangled).
pub const PR_STATES: usize = 24;

fn to_f64(v: &QVec) -> [f64; 3] {
    v.map(|x| x.to_f64().unwrap_or(f64::NAN))
}

fn mat_to_f64(m: &QMat) -> [[f64; 3]; 3] {
    m.map(|r| r.map(|x| x.to_f64().unwrap_or(f64::NAN)))
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn bilinear(a: &[f64; 3], m: &[[f64; 3]; 3], b: &[f64; 3]) -> f64 {
    let mut s = 0.0;
    for r in 0..3 {
        for c in 0..3 {
            s += a[r] * m[r][c] * b[c];
        }
    }
    s
}

fn pure_states() -> [[f64; 3]; 4] {
    [1, 2, 3, 4].map(|i| to_f64(&pure_state_exact(i).expect("index in range")))
}

fn extremal_effects() -> [[f64; 3]; 4] {
    [1, 2, 3, 4].map(|i| to_f64(&extremal_effect_exact(i).expect("index in range")))
}

const UNIT: [f64; 3] = [0.0, 0.0, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BwState {
    v: [f64; 3],
}

impl BwState {
    pub fn new(v: [f64; 3]) -> Result<Self> {
        if (dot(&UNIT, &v) - 1.0).abs() > TOL {
            return Err(Error::InvalidBwState(format!(
                "u·ω = {} ≠ 1",
                dot(&UNIT, &v)
            )));
        }
        for (i, e) in extremal_effects().iter().enumerate() {
            let p = dot(e, &v);
            if !(-TOL..=1.0 + TOL).contains(&p) {
                return Err(Error::InvalidBwState(format!(
                    "e_{}·ω = {p} outside [0, 1]",
                    i + 1
                )));
            }
        }
        Ok(Self { v })
    }

    pub fn vector(&self) -> [f64; 3] {
        self.v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BwEffect {
    v: [f64; 3],
}

impl BwEffect {
    pub fn new(v: [f64; 3]) -> Result<Self> {
        effect_violation(&v)
            .le(&TOL)
            .then_some(Self { v })
            .ok_or_else(|| {
                Error::InvalidMeasurement(format!("effect {v:?} leaves [0, 1] on some pure state"))
            })
    }

    pub fn vector(&self) -> [f64; 3] {
        self.v
    }
}

/// Largest amount by which `e·ω_i` leaves [0, 1] over the pure states.
fn effect_violation(e: &[f64; 3]) -> f64 {
    pure_states()
        .iter()
        .map(|w| {
            let p = dot(e, w);
            (-p).max(p - 1.0).max(0.0)
        })
        .fold(0.0, f64::max)
}

fn effect_violation_sum(e: &[f64; 3], states: &[[f64; 3]; 4]) -> f64 {
    states
        .iter()
        .map(|w| {
            let p = dot(e, w);
            (-p).max(0.0) + (p - 1.0).max(0.0)
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BwBipartiteState {
    m: [[f64; 3]; 3],
}

impl BwBipartiteState {
    pub fn new(m: [[f64; 3]; 3]) -> Result<Self> {
        let norm = bilinear(&UNIT, &m, &UNIT);
        if (norm - 1.0).abs() > TOL {
            return Err(Error::InvalidBwState(format!("uᵀΩu = {norm} ≠ 1")));
        }
        let es = extremal_effects();
        for (i, a) in es.iter().enumerate() {
            for (j, b) in es.iter().enumerate() {
                let p = bilinear(a, &m, b);
                if p < -TOL {
                    return Err(Error::InvalidBwState(format!(
                        "e_{}ᵀ Ω e_{} = {p} < 0",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Self { m })
    }

    /// Convex combination of the 24 pure PR-model states.
    pub fn mixture(weights: &[f64]) -> Result<Self> {
        if weights.len() != PR_STATES {
            return Err(Error::Dimension(format!(
                "expected {PR_STATES} weights, got {}",
                weights.len()
            )));
        }
        if weights.iter().any(|&w| w < -TOL) || (weights.iter().sum::<f64>() - 1.0).abs() > TOL {
            return Err(Error::InvalidBwState(
                "mixture weights are not a distribution".into(),
            ));
        }
        Self::new(mix(&pr_states_f64(), weights))
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.m
    }
}

fn mix(states: &[[[f64; 3]; 3]], weights: &[f64]) -> [[f64; 3]; 3] {
    let mut m = [[0.0; 3]; 3];
    for (s, &w) in states.iter().zip(weights) {
        for r in 0..3 {
            for c in 0..3 {
                m[r][c] += w * s[r][c];
            }
        }
    }
    m
}

fn pr_states_f64() -> Vec<[[f64; 3]; 3]> {
    (1..=PR_STATES)
        .map(|n| mat_to_f64(&pr_state_exact(n).expect("index in range")))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BwMeasurement {
    effects: Vec<BwEffect>,
}

impl BwMeasurement {
    pub fn new(effects: Vec<[f64; 3]>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::InvalidMeasurement("no effects".into()));
        }
        let effects = effects
            .into_iter()
            .map(BwEffect::new)
            .collect::<Result<Vec<_>>>()?;
        let mut s = [0.0; 3];
        for e in &effects {
            for c in 0..3 {
                s[c] += e.v[c];
            }
        }
        if (0..3).any(|c| (s[c] - UNIT[c]).abs() > TOL) {
            return Err(Error::InvalidMeasurement(format!(
                "effects sum to {s:?}, not u"
            )));
        }
        Ok(Self { effects })
    }

    pub fn effects(&self) -> &[BwEffect] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }
}

/// Floating-point view of the exact catalog.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BwCatalog {
    pub pure_states: [BwState; 4],
    pub extremal_effects: [BwEffect; 4],
    pub unit: BwEffect,
    pub zero: BwEffect,
}

impl BwCatalog {
    /// ω_i ω_jᵀ for i, j in 1..=4.
    pub fn product_state(&self, i: usize, j: usize) -> Result<BwBipartiteState> {
        BwBipartiteState::new(mat_to_f64(&product_state_exact(i, j)?))
    }

    /// Ω_m for m in 17..=24.
    pub fn entangled_state(&self, m: usize) -> Result<BwBipartiteState> {
        BwBipartiteState::new(mat_to_f64(&entangled_state_exact(m)?))
    }

    /// Ω_n for n in 1..=24, products first.
    pub fn pr_state(&self, n: usize) -> Result<BwBipartiteState> {
        BwBipartiteState::new(mat_to_f64(&pr_state_exact(n)?))
    }
}

pub fn bw_catalog() -> BwCatalog {
    let to_state = |v| BwState::new(v).expect("catalog state");
    let to_effect = |v| BwEffect::new(v).expect("catalog effect");
    BwCatalog {
        pure_states: pure_states().map(to_state),
        extremal_effects: extremal_effects().map(to_effect),
        unit: to_effect(to_f64(&unit_exact())),
        zero: to_effect(to_f64(&zero_exact())),
    }
}

/// p(a, b) = f_aᵀ Ω g_b.
pub fn bw_correlation(
    omega: &BwBipartiteState,
    f: &BwMeasurement,
    g: &BwMeasurement,
) -> Result<Correlation> {
    let (ka, kb) = (f.len(), g.len());
    let probs = f
        .effects
        .iter()
        .flat_map(|fa| {
            g.effects
                .iter()
                .map(move |gb| bilinear(&fa.v, &omega.m, &gb.v))
        })
        .collect();
    Correlation::new(vec![ka, kb], probs)
}

/// Ω = (p1/2) Ω_6 + ((1 − p1)/2) Ω_22 + ½ Ω_16 with F = G =
/// {½e_2 + ⅙e_3, ⅓e_3 + ⅓e_4, ½e_1 + ⅙e_4}.
pub fn example_strategy(p1: f64) -> Result<(BwBipartiteState, BwMeasurement, BwMeasurement)> {
    check_unit("p1", p1)?;
    let states = pr_states_f64();
    let mut w = vec![0.0; PR_STATES];
    w[5] = p1 / 2.0;
    w[21] = (1.0 - p1) / 2.0;
    w[15] = 0.5;
    let omega = BwBipartiteState::new(mix(&states, &w))?;
    let e = extremal_effects();
    let comb = |terms: &[(f64, usize)]| {
        let mut v = [0.0; 3];
        for &(c, i) in terms {
            for r in 0..3 {
                v[r] += c * e[i - 1][r];
            }
        }
        v
    };
    let effects = vec![
        comb(&[(0.5, 2), (1.0 / 6.0, 3)]),
        comb(&[(1.0 / 3.0, 3), (1.0 / 3.0, 4)]),
        comb(&[(0.5, 1), (1.0 / 6.0, 4)]),
    ];
    let f = BwMeasurement::new(effects.clone())?;
    let g = BwMeasurement::new(effects)?;
    Ok((omega, f, g))
}

/// Payoff value the printed strategy is claimed to reach.
pub const EXAMPLE_PAYOFF: f64 = 0.15;
pub const EXAMPLE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub best_p1: f64,
    pub best_payoff: f64,
    /// A p1 at which the payoff equals [`EXAMPLE_PAYOFF`] within
    /// [`EXAMPLE_TOL`], if one exists.
    pub p1_at_target: Option<f64>,
    pub curve: Vec<(f64, f64)>,
}

fn example_payoff(p1: f64) -> f64 {
    let task = TaskSpec::get(TaskId::G223);
    example_strategy(p1)
        .and_then(|(o, f, g)| bw_correlation(&o, &f, &g))
        .map(|c| task.objective().eval(c.probs()))
        .unwrap_or(f64::NEG_INFINITY)
}

/// Scans the payoff of [`example_strategy`] over p1 ∈ [0, 1].
///
/// The payoff is a minimum of affine functions of p1, hence concave; the grid
/// maximum is refined by golden-section search.
pub fn scan_example_strategy(points: usize) -> ScanResult {
    let points = points.max(2);
    let curve: Vec<(f64, f64)> = (0..points)
        .map(|i| {
            let p1 = i as f64 / (points - 1) as f64;
            (p1, example_payoff(p1))
        })
        .collect();
    let (imax, _) =
        curve.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &(_, v))| if v > acc.1 { (i, v) } else { acc },
        );
    let h = 1.0 / (points - 1) as f64;
    let (mut lo, mut hi) = ((curve[imax].0 - h).max(0.0), (curve[imax].0 + h).min(1.0));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let a = hi - phi * (hi - lo);
        let b = lo + phi * (hi - lo);
        if example_payoff(a) < example_payoff(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    let mut best_p1 = 0.5 * (lo + hi);
    let mut best_payoff = example_payoff(best_p1);
    if curve[imax].1 > best_payoff {
        (best_p1, best_payoff) = curve[imax];
    }
    let p1_at_target = if (best_payoff - EXAMPLE_PAYOFF).abs() <= EXAMPLE_TOL {
        Some(best_p1)
    } else if best_payoff > EXAMPLE_PAYOFF {
        // concave: bisect on the left flank
        let (mut a, mut b) = (0.0, best_p1);
        if example_payoff(a) >= EXAMPLE_PAYOFF {
            Some(a)
        } else {
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if example_payoff(m) < EXAMPLE_PAYOFF {
                    a = m;
                } else {
                    b = m;
                }
            }
            Some(b)
        }
    } else {
        None
    };
    if p1_at_target.is_none() {
        log::warn!(
            "example strategy peaks at {best_payoff:.6} (p1 = {best_p1:.6}); no p1 reaches {EXAMPLE_PAYOFF}"
        );
    }
    ScanResult {
        best_p1,
        best_payoff,
        p1_at_target,
        curve,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BwBound {
    pub value: f64,
    pub state_weights: Vec<f64>,
    pub f: Vec<[f64; 3]>,
    pub g: Vec<[f64; 3]>,
    pub correlation: Correlation,
    pub restarts_used: usize,
}

/// Precomputed e_iᵀ Ω_n e_j for the sharp effect pairs.
fn sharp_table() -> Vec<[[f64; 2]; 2]> {
    let e = extremal_effects();
    let (a_eff, b_eff) = ([e[0], e[2]], [e[1], e[3]]);
    pr_states_f64()
        .iter()
        .map(|m| {
            let mut t = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    t[i][j] = bilinear(&a_eff[i], m, &b_eff[j]);
                }
            }
            t
        })
        .collect()
}

/// Layout: 24 state weights, then Alice's outcome distributions for the sharp
/// effects e_1 and e_3, then Bob's for e_2 and e_4.
fn sharp_model(table: &[[[f64; 2]; 2]], x: &[f64], out: &mut [f64]) {
    let mut beta = [[0.0; 2]; 2];
    for (t, &w) in table.iter().zip(&x[..PR_STATES]) {
        for i in 0..2 {
            for j in 0..2 {
                beta[i][j] += w * t[i][j];
            }
        }
    }
    let q = &x[PR_STATES..PR_STATES + 6];
    let r = &x[PR_STATES + 6..PR_STATES + 12];
    for a in 0..3 {
        for b in 0..3 {
            let mut s = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    s += q[i * 3 + a] * r[j * 3 + b] * beta[i][j];
                }
            }
            out[a * 3 + b] = s;
        }
    }
}

/// Maximum G(2,2,3) payoff with sharp-simulable measurements on PR-model
/// states.
pub fn sharp_simulable_bound(cfg: &SearchConfig) -> Result<BwBound> {
    let task = TaskSpec::get(TaskId::G223);
    let objective = task.objective();
    let table = sharp_table();
    let spec = SimplexSpec::new(vec![PR_STATES, 3, 3, 3, 3])?;
    let model = |x: &[f64], out: &mut [f64]| sharp_model(&table, x, out);
    let f = |x: &[f64]| {
        let mut y = [0.0; 9];
        model(x, &mut y);
        objective.eval(&y)
    };
    let groups = [
        LinearGroup::blocks(vec![0]),
        LinearGroup::blocks(vec![1, 2]),
        LinearGroup::blocks(vec![3, 4]),
    ];
    let polish = |x: &[f64]| lp_block_ascent(&model, 9, &spec, &groups, &objective, x, 50);
    let refine = |x: &[f64]| slp_refine(&model, 9, &spec, &[], &objective, x, 60);
    let out = maximize_with(
        &f,
        &spec,
        cfg,
        &MaximizeOptions {
            stop_at: None,
            polish: Some(&polish),
            refine: Some(&refine),
        },
    )?;
    let x = &out.argmax;
    let e = extremal_effects();
    let effects = |cols: &[f64], i: usize, j: usize| -> Vec<[f64; 3]> {
        (0..3)
            .map(|a| {
                let mut v = [0.0; 3];
                for r in 0..3 {
                    v[r] = cols[a] * e[i][r] + cols[3 + a] * e[j][r];
                }
                v
            })
            .collect()
    };
    let mut y = vec![0.0; 9];
    model(x, &mut y);
    Ok(BwBound {
        value: out.value,
        state_weights: x[..PR_STATES].to_vec(),
        f: effects(&x[PR_STATES..PR_STATES + 6], 0, 2),
        g: effects(&x[PR_STATES + 6..PR_STATES + 12], 1, 3),
        correlation: Correlation::new_unchecked(vec![3, 3], y)?,
        restarts_used: out.restarts_used,
    })
}

/// The cone generators O, u, e_1..e_4; every valid effect is a convex
/// combination of them.
fn generators() -> [[f64; 3]; 6] {
    let e = extremal_effects();
    [[0.0; 3], UNIT, e[0], e[1], e[2], e[3]]
}

fn combine(gens: &[[f64; 3]; 6], c: &[f64]) -> [f64; 3] {
    let mut v = [0.0; 3];
    for (g, &w) in gens.iter().zip(c) {
        for r in 0..3 {
            v[r] += w * g[r];
        }
    }
    v
}

/// Convex weights over the generators reproducing `e`, if any.
fn decompose(gens: &[[f64; 3]; 6], e: &[f64; 3]) -> Option<Vec<f64>> {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = (0..6)
        .map(|_| lp.add_var(0.0, (0.0, f64::INFINITY)))
        .collect();
    for r in 0..3 {
        let row: Vec<_> = vars.iter().zip(gens).map(|(&v, g)| (v, g[r])).collect();
        lp.add_constraint(row.as_slice(), ComparisonOp::Eq, e[r]);
    }
    let row: Vec<_> = vars.iter().map(|&v| (v, 1.0)).collect();
    lp.add_constraint(row.as_slice(), ComparisonOp::Eq, 1.0);
    let sol = crate::search::lp::solve_lp(&lp)?;
    let mut c: Vec<f64> = vars.iter().map(|&v| sol.var_value(v).max(0.0)).collect();
    let s: f64 = c.iter().sum();
    c.iter_mut().for_each(|v| *v /= s);
    Some(c)
}

struct PrModel {
    states: Vec<[[f64; 3]; 3]>,
    gens: [[f64; 3]; 6],
    pure: [[f64; 3]; 4],
}

impl PrModel {
    fn new() -> Self {
        Self {
            states: pr_states_f64(),
            gens: generators(),
            pure: pure_states(),
        }
    }

    fn correlation(&self, w: &[f64], f: &[[f64; 3]; 3], g: &[[f64; 3]; 3], out: &mut [f64]) {
        let omega = mix(&self.states, w);
        for a in 0..3 {
            for b in 0..3 {
                out[a * 3 + b] = bilinear(&f[a], &omega, &g[b]);
            }
        }
    }

    /// Eliminated layout [24, 6, 6, 6, 6]: f_3 = u − f_1 − f_2 and likewise g_3.
    fn reduced_effects(&self, x: &[f64]) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
        let o = PR_STATES;
        let third = |a: [f64; 3], b: [f64; 3]| {
            [
                UNIT[0] - a[0] - b[0],
                UNIT[1] - a[1] - b[1],
                UNIT[2] - a[2] - b[2],
            ]
        };
        let f1 = combine(&self.gens, &x[o..o + 6]);
        let f2 = combine(&self.gens, &x[o + 6..o + 12]);
        let g1 = combine(&self.gens, &x[o + 12..o + 18]);
        let g2 = combine(&self.gens, &x[o + 18..o + 24]);
        ([f1, f2, third(f1, f2)], [g1, g2, third(g1, g2)])
    }

    /// Full layout [24, 6, 6, 6, 6, 6, 6].
    fn full_effects(&self, x: &[f64]) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
        let eff = |b: usize| combine(&self.gens, &x[PR_STATES + 6 * b..PR_STATES + 6 * b + 6]);
        ([eff(0), eff(1), eff(2)], [eff(3), eff(4), eff(5)])
    }
}

const EFFECT_PENALTY: f64 = 10.0;

/// Maximum G(2,2,3) payoff over mixtures of the 24 PR-model states and all
/// three-outcome local measurements.
pub fn pr_max_bound(cfg: &SearchConfig) -> Result<BwBound> {
    let task = TaskSpec::get(TaskId::G223);
    let objective = task.objective();
    let pm = PrModel::new();
    let spec = SimplexSpec::new(vec![PR_STATES, 6, 6, 6, 6])?;
    let full_spec = SimplexSpec::new(vec![PR_STATES, 6, 6, 6, 6, 6, 6])?;

    let f = |x: &[f64]| {
        let (fa, gb) = pm.reduced_effects(x);
        let mut y = [0.0; 9];
        pm.correlation(&x[..PR_STATES], &fa, &gb, &mut y);
        let viol = effect_violation_sum(&fa[2], &pm.pure) + effect_violation_sum(&gb[2], &pm.pure);
        objective.eval(&y) - EFFECT_PENALTY * viol
    };

    let full_model = |x: &[f64], out: &mut [f64]| {
        let (fa, gb) = pm.full_effects(x);
        pm.correlation(&x[..PR_STATES], &fa, &gb, out);
    };
    let sum_to_unit = |first_block: usize| -> Vec<(Vec<(usize, f64)>, f64)> {
        (0..3)
            .map(|r| {
                let terms = (0..3)
                    .flat_map(|a| {
                        let base = PR_STATES + 6 * (first_block + a);
                        pm.gens
                            .iter()
                            .enumerate()
                            .map(move |(gi, g)| (base + gi, g[r]))
                    })
                    .filter(|&(_, c)| c != 0.0)
                    .collect();
                (terms, UNIT[r])
            })
            .collect()
    };
    let groups = [
        LinearGroup::blocks(vec![0]),
        LinearGroup {
            blocks: vec![1, 2, 3],
            equalities: sum_to_unit(0),
        },
        LinearGroup {
            blocks: vec![4, 5, 6],
            equalities: sum_to_unit(3),
        },
    ];
    let equalities: Vec<_> = groups
        .iter()
        .flat_map(|g| g.equalities.iter().cloned())
        .collect();
    let lift = |x: &[f64], refine: bool| -> Vec<f64> {
        let (fa, gb) = pm.reduced_effects(x);
        let (Some(c3), Some(d3)) = (decompose(&pm.gens, &fa[2]), decompose(&pm.gens, &gb[2]))
        else {
            return x.to_vec();
        };
        let o = PR_STATES;
        let mut full = Vec::with_capacity(full_spec.len());
        full.extend_from_slice(&x[..o + 12]);
        full.extend_from_slice(&c3);
        full.extend_from_slice(&x[o + 12..o + 24]);
        full.extend_from_slice(&d3);
        let best = lp_block_ascent(&full_model, 9, &full_spec, &groups, &objective, &full, 50);
        let best = if refine {
            slp_refine(
                &full_model,
                9,
                &full_spec,
                &equalities,
                &objective,
                &best,
                60,
            )
        } else {
            best
        };
        let mut back = Vec::with_capacity(spec.len());
        back.extend_from_slice(&best[..o + 12]);
        back.extend_from_slice(&best[o + 18..o + 30]);
        back
    };
    let polish = |x: &[f64]| lift(x, false);
    let refine = |x: &[f64]| lift(x, true);
    let out = maximize_with(
        &f,
        &spec,
        cfg,
        &MaximizeOptions {
            stop_at: None,
            polish: Some(&polish),
            refine: Some(&refine),
        },
    )?;
    let x = &out.argmax;
    let (fa, gb) = pm.reduced_effects(x);
    let mut y = vec![0.0; 9];
    pm.correlation(&x[..PR_STATES], &fa, &gb, &mut y);
    Ok(BwBound {
        value: out.value,
        state_weights: x[..PR_STATES].to_vec(),
        f: fa.to_vec(),
        g: gb.to_vec(),
        correlation: Correlation::new_unchecked(vec![3, 3], y)?,
        restarts_used: out.restarts_used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{apply_maps, ClassicalState, StochasticMap};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn catalog_float_view_is_valid() {
        let cat = bw_catalog();
        for n in 1..=PR_STATES {
            cat.pr_state(n).unwrap();
        }
        assert!(cat.entangled_state(25).is_err());
        assert!(cat.product_state(0, 1).is_err());
        let e = cat.extremal_effects.map(|e| e.vector());
        let w = cat.pure_states.map(|s| s.vector());
        assert_eq!(dot(&e[1], &w[0]), 0.0);
        assert_eq!(dot(&e[1], &w[1]), 1.0);
    }

    #[test]
    fn distinguishable_product_gives_point_distribution() {
        let cat = bw_catalog();
        let e = cat.extremal_effects.map(|e| e.vector());
        let f = BwMeasurement::new(vec![e[0], e[2]]).unwrap();
        let g = BwMeasurement::new(vec![e[1], e[3]]).unwrap();
        let c = bw_correlation(&cat.product_state(1, 2).unwrap(), &f, &g).unwrap();
        let nonzero: Vec<_> = c.probs().iter().filter(|p| **p != 0.0).collect();
        assert_eq!(nonzero, vec![&1.0]);
    }

    #[test]
    fn uniform_product_mixture_factorizes() {
        let mut w = vec![0.0; PR_STATES];
        w[..16].iter_mut().for_each(|v| *v = 1.0 / 16.0);
        let omega = BwBipartiteState::mixture(&w).unwrap();
        let (_, f, g) = example_strategy(0.3).unwrap();
        let c = bw_correlation(&omega, &f, &g).unwrap();
        let (ma, mb) = (c.marginal(0), c.marginal(1));
        for a in 0..3 {
            for b in 0..3 {
                assert!((c.get(&[a, b]) - ma[a] * mb[b]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn example_strategy_is_valid_on_grid() {
        for i in 0..=10 {
            let (o, f, g) = example_strategy(i as f64 / 10.0).unwrap();
            BwBipartiteState::new(o.matrix()).unwrap();
            bw_correlation(&o, &f, &g).unwrap();
        }
        assert!(example_strategy(1.5).is_err());
        let (_, f, _) = example_strategy(0.0).unwrap();
        let mut s = [0.0; 3];
        for e in f.effects() {
            for r in 0..3 {
                s[r] += e.vector()[r];
            }
        }
        assert!((0..3).all(|r| (s[r] - UNIT[r]).abs() < 1e-15));
    }

    #[test]
    fn invalid_objects_rejected() {
        assert!(BwEffect::new([0.0, 0.0, 1.5]).is_err());
        assert!(BwState::new([2.0, 0.0, 1.0]).is_err());
        assert!(BwMeasurement::new(vec![UNIT, UNIT]).is_err());
        let mut m = [[0.0; 3]; 3];
        m[2][2] = 1.0;
        m[0][0] = 2.0;
        assert!(BwBipartiteState::new(m).is_err());
    }

    #[test]
    fn scan_peak_is_concave_maximum() {
        let s = scan_example_strategy(101);
        assert!(s.curve.iter().all(|&(_, v)| v <= s.best_payoff + 1e-12));
    }

    #[test]
    fn sharp_measurements_match_classical_two_level_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let e = extremal_effects();
        for _ in 0..100 {
            let mut w: Vec<f64> = (0..PR_STATES).map(|_| rng.random::<f64>()).collect();
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|v| *v /= s);
            let omega = BwBipartiteState::mixture(&w).unwrap();
            let col = |rng: &mut ChaCha8Rng| {
                let v: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
                let s: f64 = v.iter().sum();
                v.into_iter().map(|x| x / s).collect::<Vec<_>>()
            };
            let (q1, q3, r2, r4) = (col(&mut rng), col(&mut rng), col(&mut rng), col(&mut rng));
            let meas = |c1: &[f64], c2: &[f64], i: usize, j: usize| {
                let eff = (0..3)
                    .map(|a| {
                        let mut v = [0.0; 3];
                        for r in 0..3 {
                            v[r] = c1[a] * e[i][r] + c2[a] * e[j][r];
                        }
                        v
                    })
                    .collect();
                BwMeasurement::new(eff).unwrap()
            };
            let c = bw_correlation(&omega, &meas(&q1, &q3, 0, 2), &meas(&r2, &r4, 1, 3)).unwrap();

            let m = omega.matrix();
            let beta: Vec<f64> = [(0, 1), (0, 3), (2, 1), (2, 3)]
                .iter()
                .map(|&(i, j)| bilinear(&e[i], &m, &e[j]))
                .collect();
            let state = ClassicalState::new(2, 2, beta).unwrap();
            let smap = |c1: &[f64], c2: &[f64]| StochasticMap::from_columns(&[c1, c2]).unwrap();
            let cl = apply_maps(&state, &[smap(&q1, &q3), smap(&r2, &r4)]).unwrap();
            assert!(c.max_abs_diff(&cl) < 1e-9);
        }
    }

    #[test]
    fn decompose_recovers_valid_effects() {
        let gens = generators();
        for v in [[0.1, -0.2, 0.5], [0.0, 0.0, 0.3], [0.25, 0.25, 0.5]] {
            let c = decompose(&gens, &v).unwrap();
            let back = combine(&gens, &c);
            assert!((0..3).all(|r| (back[r] - v[r]).abs() < 1e-9));
        }
        assert!(decompose(&gens, &[0.9, 0.0, 0.5]).is_none());
    }
}
