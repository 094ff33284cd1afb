//! Best classical payoff of a task.

use serde::Serialize;

use super::{ClassicalModel, ClassicalState, StochasticMap};
use crate::correlation::Correlation;
use crate::error::Result;
use crate::search::{
    grid_oracle, lp_block_ascent, maximize_with, slp_refine, MaximizeOptions, SearchConfig,
};
use crate::tasks::TaskSpec;

/// Classical G(2,2,3) optimum found by the lattice oracle and the restart
/// search alike.
pub const G223_REFERENCE: f64 = 0.125;

const POLISH_ROUNDS: usize = 50;
const REFINE_ITERS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult {
    pub value: f64,
    pub argmax: Vec<f64>,
    pub state: ClassicalState,
    pub maps: Vec<StochasticMap>,
    pub correlation: Correlation,
    pub restarts_used: usize,
    pub model: ClassicalModel,
}

fn finish(
    model: ClassicalModel,
    value: f64,
    argmax: Vec<f64>,
    restarts_used: usize,
    task: &TaskSpec,
) -> Result<BoundResult> {
    let (state, maps) = model.witness(&argmax)?;
    let correlation = Correlation::new_unchecked(task.shape(), model.eval(&argmax))?;
    Ok(BoundResult {
        value,
        argmax,
        state,
        maps,
        correlation,
        restarts_used,
        model,
    })
}

/// Maximizes the task payoff over d-level classical states and local maps
/// (one shared map for symmetric tasks).
pub fn classical_bound(task: &TaskSpec, cfg: &SearchConfig) -> Result<BoundResult> {
    let model = ClassicalModel::general(task.n, task.d, task.k, task.symmetric);
    let objective = task.objective();
    let spec = model.spec();
    let out_len = model.out_len();
    let eval = |x: &[f64], out: &mut [f64]| model.eval_into(x, out);
    let f = |x: &[f64]| {
        let mut buf = [0.0f64; 128];
        if out_len <= buf.len() {
            let y = &mut buf[..out_len];
            eval(x, y);
            objective.eval(y)
        } else {
            objective.eval(&model.eval(x))
        }
    };
    let groups = model.linear_groups();
    let equalities: Vec<_> = groups
        .iter()
        .flat_map(|g| g.equalities.iter().cloned())
        .collect();
    let polish =
        |x: &[f64]| lp_block_ascent(&eval, out_len, &spec, &groups, &objective, x, POLISH_ROUNDS);
    let refine = |x: &[f64]| {
        slp_refine(
            &eval,
            out_len,
            &spec,
            &equalities,
            &objective,
            x,
            REFINE_ITERS,
        )
    };
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
    finish(model, out.value, out.argmax, out.restarts_used, task)
}

/// Exhaustive lattice maximum at the given resolution.
///
/// Bipartite qubit tasks without a shared map are searched over the
/// canonical states (λ, 0, 0, 1 − λ), which reach every qubit correlation.
pub fn classical_bound_grid(task: &TaskSpec, resolution: usize) -> Result<BoundResult> {
    let model = if task.n == 2 && task.d == 2 && !task.symmetric {
        ClassicalModel::canonical(task.k, false)
    } else {
        ClassicalModel::general(task.n, task.d, task.k, task.symmetric)
    };
    let objective = task.objective();
    let out_len = model.out_len();
    let f = |x: &[f64]| {
        let mut buf = vec![0.0; out_len];
        model.eval_into(x, &mut buf);
        objective.eval(&buf)
    };
    let g = grid_oracle(&f, &model.spec(), resolution)?;
    finish(model, g.value, g.argmax, 0, task)
}
