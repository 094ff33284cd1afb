//! Block-coordinate LP ascent for max–min objectives of multilinear models.
//!
//! With every group but one held fixed the model output is linear in the
//! free group, so maximizing `min_s y_s − Σ_t y_t` over that group is a
//! small linear program.

use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOutcome};

use super::SimplexSpec;

/// Objective `min_{s ∈ include} y_s − Σ_{t ∈ penalty} y_t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinLinearObjective {
    pub include: Vec<usize>,
    pub penalty: Vec<usize>,
}

impl MinLinearObjective {
    pub fn eval(&self, y: &[f64]) -> f64 {
        let m = self
            .include
            .iter()
            .map(|&s| y[s])
            .fold(f64::INFINITY, f64::min);
        m - self.penalty.iter().map(|&t| y[t]).sum::<f64>()
    }
}

/// A set of simplex blocks in which the model is jointly linear, plus any
/// extra equality rows `Σ coef·x[var] = rhs` over global variable indices.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearGroup {
    pub blocks: Vec<usize>,
    pub equalities: Vec<(Vec<(usize, f64)>, f64)>,
}

impl LinearGroup {
    pub fn blocks(blocks: Vec<usize>) -> Self {
        Self {
            blocks,
            equalities: Vec::new(),
        }
    }
}

const IMPROVE_TOL: f64 = 1e-14;
const MIN_RADIUS: f64 = 1e-10;

/// Solver failures (infeasible, numerically stuck, interrupted) all mean
/// "no better point here".
pub(crate) fn solve_lp(lp: &Problem) -> Option<microlp::Solution> {
    match lp.solve() {
        Ok(SolveOutcome::Solution(sol)) => Some(sol),
        _ => None,
    }
}

pub fn lp_block_ascent<M>(
    model: &M,
    out_len: usize,
    spec: &SimplexSpec,
    groups: &[LinearGroup],
    objective: &MinLinearObjective,
    x0: &[f64],
    max_rounds: usize,
) -> Vec<f64>
where
    M: Fn(&[f64], &mut [f64]),
{
    let offsets = spec.offsets();
    let mut x = x0.to_vec();
    let mut y = vec![0.0; out_len];
    model(&x, &mut y);
    let mut value = objective.eval(&y);
    for _ in 0..max_rounds {
        let round_start = value;
        for g in groups {
            let vars: Vec<usize> = g
                .blocks
                .iter()
                .flat_map(|&b| offsets[b]..offsets[b] + spec.blocks()[b])
                .collect();
            let Some(candidate) =
                solve_group(model, out_len, spec, &offsets, g, &vars, objective, &x)
            else {
                continue;
            };
            model(&candidate, &mut y);
            let v = objective.eval(&y);
            if v > value + IMPROVE_TOL {
                value = v;
                x = candidate;
            }
        }
        if value <= round_start + IMPROVE_TOL {
            break;
        }
    }
    x
}

#[allow(clippy::too_many_arguments)]
fn solve_group<M>(
    model: &M,
    out_len: usize,
    spec: &SimplexSpec,
    offsets: &[usize],
    group: &LinearGroup,
    vars: &[usize],
    objective: &MinLinearObjective,
    x: &[f64],
) -> Option<Vec<f64>>
where
    M: Fn(&[f64], &mut [f64]),
{
    // Column v of the coefficient matrix is the model output with the group
    // set to the unit vector e_v.
    let mut probe = x.to_vec();
    let mut cols = vec![vec![0.0; out_len]; vars.len()];
    for &v in vars {
        probe[v] = 0.0;
    }
    for (j, &v) in vars.iter().enumerate() {
        probe[v] = 1.0;
        model(&probe, &mut cols[j]);
        probe[v] = 0.0;
    }

    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let lp_vars: Vec<_> = vars
        .iter()
        .enumerate()
        .map(|(j, _)| {
            let pen: f64 = objective.penalty.iter().map(|&t| cols[j][t]).sum();
            lp.add_var(-pen, (0.0, f64::INFINITY))
        })
        .collect();
    let t = lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
    for &s in &objective.include {
        let mut row: Vec<_> = lp_vars
            .iter()
            .enumerate()
            .map(|(j, &lv)| (lv, cols[j][s]))
            .collect();
        row.push((t, -1.0));
        lp.add_constraint(row.as_slice(), ComparisonOp::Ge, 0.0);
    }
    let mut j = 0;
    for &b in &group.blocks {
        let len = spec.blocks()[b];
        let row: Vec<_> = (j..j + len).map(|i| (lp_vars[i], 1.0)).collect();
        lp.add_constraint(row.as_slice(), ComparisonOp::Eq, 1.0);
        j += len;
        debug_assert_eq!(offsets[b], vars[j - len]);
    }
    for (terms, rhs) in &group.equalities {
        let mut row = Vec::new();
        let mut fixed = 0.0;
        for &(var, coef) in terms {
            match vars.iter().position(|&v| v == var) {
                Some(pos) => row.push((lp_vars[pos], coef)),
                None => fixed += coef * x[var],
            }
        }
        lp.add_constraint(row.as_slice(), ComparisonOp::Eq, rhs - fixed);
    }
    let sol = solve_lp(&lp)?;
    let mut out = x.to_vec();
    for (pos, &v) in vars.iter().enumerate() {
        out[v] = sol.var_value(lp_vars[pos]).max(0.0);
    }
    let mut j = 0;
    for &b in &group.blocks {
        let len = spec.blocks()[b];
        let s: f64 = out[vars[j]..vars[j] + len].iter().sum();
        if !(s > 0.0) {
            return None;
        }
        out[vars[j]..vars[j] + len].iter_mut().for_each(|v| *v /= s);
        j += len;
    }
    Some(out)
}

/// Jacobian of a model that is linear in each simplex block: column `v` is
/// the output with v's block replaced by the unit vector e_v.
fn block_jacobian<M>(model: &M, out_len: usize, spec: &SimplexSpec, x: &[f64]) -> Vec<Vec<f64>>
where
    M: Fn(&[f64], &mut [f64]),
{
    let offsets = spec.offsets();
    let mut probe = x.to_vec();
    let mut cols = vec![vec![0.0; out_len]; x.len()];
    for (b, &len) in spec.blocks().iter().enumerate() {
        let o = offsets[b];
        probe[o..o + len].iter_mut().for_each(|v| *v = 0.0);
        for v in o..o + len {
            probe[v] = 1.0;
            model(&probe, &mut cols[v]);
            probe[v] = 0.0;
        }
        probe[o..o + len].copy_from_slice(&x[o..o + len]);
    }
    cols
}

/// Joint trust-region refinement: maximizes the linearized max–min
/// objective over all blocks at once, which gets past the kinks where
/// single-block ascent stalls. `equalities` are rows over global indices
/// that `x0` already satisfies.
#[allow(clippy::too_many_arguments)]
pub fn slp_refine<M>(
    model: &M,
    out_len: usize,
    spec: &SimplexSpec,
    equalities: &[(Vec<(usize, f64)>, f64)],
    objective: &MinLinearObjective,
    x0: &[f64],
    max_iters: usize,
) -> Vec<f64>
where
    M: Fn(&[f64], &mut [f64]),
{
    let offsets = spec.offsets();
    let mut x = x0.to_vec();
    let mut y = vec![0.0; out_len];
    model(&x, &mut y);
    let mut value = objective.eval(&y);
    let mut radius: f64 = 0.05;
    for _ in 0..max_iters {
        if radius < MIN_RADIUS {
            break;
        }
        let jac = block_jacobian(model, out_len, spec, &x);
        let mut lp = Problem::new(OptimizationDirection::Maximize);
        let steps: Vec<_> = (0..x.len())
            .map(|v| {
                let pen: f64 = objective.penalty.iter().map(|&t| jac[v][t]).sum();
                lp.add_var(-pen, ((-radius).max(-x[v]), radius.min(1.0 - x[v])))
            })
            .collect();
        let t = lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
        for &s in &objective.include {
            let mut row: Vec<_> = steps
                .iter()
                .enumerate()
                .map(|(v, &d)| (d, jac[v][s]))
                .collect();
            row.push((t, -1.0));
            lp.add_constraint(row.as_slice(), ComparisonOp::Ge, -y[s]);
        }
        for (b, &len) in spec.blocks().iter().enumerate() {
            let row: Vec<_> = (offsets[b]..offsets[b] + len)
                .map(|v| (steps[v], 1.0))
                .collect();
            lp.add_constraint(row.as_slice(), ComparisonOp::Eq, 0.0);
        }
        for (terms, _) in equalities {
            let row: Vec<_> = terms.iter().map(|&(v, c)| (steps[v], c)).collect();
            lp.add_constraint(row.as_slice(), ComparisonOp::Eq, 0.0);
        }
        let Some(sol) = solve_lp(&lp) else {
            radius /= 4.0;
            continue;
        };
        let mut cand: Vec<f64> = x
            .iter()
            .zip(&steps)
            .map(|(&xv, &d)| (xv + sol.var_value(d)).max(0.0))
            .collect();
        spec.renormalize(&mut cand);
        model(&cand, &mut y);
        let v = objective.eval(&y);
        if v > value + IMPROVE_TOL {
            value = v;
            x = cand;
            radius = (radius * 2.0).min(0.5);
        } else {
            radius /= 4.0;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bilinear_min_coordinate_optimum() {
        // y = outer product of two 2-simplex points; maximize min(y01, y10).
        // From this start each block is already LP-optimal after one pass:
        // the ascent finds a coordinate-wise optimum (0.16), not 1/4.
        let spec = SimplexSpec::new(vec![2, 2]).unwrap();
        let model = |x: &[f64], y: &mut [f64]| {
            for a in 0..2 {
                for b in 0..2 {
                    y[2 * a + b] = x[a] * x[2 + b];
                }
            }
        };
        let obj = MinLinearObjective {
            include: vec![1, 2],
            penalty: vec![],
        };
        let groups = [LinearGroup::blocks(vec![0]), LinearGroup::blocks(vec![1])];
        let x = lp_block_ascent(&model, 4, &spec, &groups, &obj, &[0.9, 0.1, 0.8, 0.2], 50);
        let mut y = [0.0; 4];
        model(&x, &mut y);
        assert!((obj.eval(&y) - 0.16).abs() < 1e-12, "{:?}", x);
    }

    #[test]
    fn joint_refinement_leaves_the_coordinate_optimum() {
        let spec = SimplexSpec::new(vec![2, 2]).unwrap();
        let model = |x: &[f64], y: &mut [f64]| {
            for a in 0..2 {
                for b in 0..2 {
                    y[2 * a + b] = x[a] * x[2 + b];
                }
            }
        };
        let obj = MinLinearObjective {
            include: vec![1, 2],
            penalty: vec![],
        };
        let groups = [LinearGroup::blocks(vec![0]), LinearGroup::blocks(vec![1])];
        let stuck = lp_block_ascent(&model, 4, &spec, &groups, &obj, &[0.9, 0.1, 0.8, 0.2], 50);
        let x = slp_refine(&model, 4, &spec, &[], &obj, &stuck, 200);
        let mut y = [0.0; 4];
        model(&x, &mut y);
        assert!((obj.eval(&y) - 0.25).abs() < 1e-12, "{x:?}");
    }

    #[test]
    fn penalty_terms_count() {
        let obj = MinLinearObjective {
            include: vec![0, 1],
            penalty: vec![2],
        };
        assert_eq!(obj.eval(&[0.5, 0.25, 0.125]), 0.125);
    }
}
