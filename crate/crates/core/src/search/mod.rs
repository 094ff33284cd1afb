//! Deterministic global search over products of probability simplices.

mod grid;
pub(crate) mod lp;
mod nelder_mead;

pub use grid::{grid_oracle, lattice_size, GridOutcome, GRID_LIMIT};
pub use lp::{lp_block_ascent, slp_refine, LinearGroup, MinLinearObjective};
pub use nelder_mead::{nelder_mead, NmOptions, NmResult};

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entries below this are rounded to zero by the vertex-snap pass.
pub const SNAP_THRESHOLD: f64 = 1e-8;
const POLISH_SNAPS: [f64; 4] = [SNAP_THRESHOLD, 1e-5, 1e-3, 1e-2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub seed: u64,
    pub restarts: usize,
    pub max_iters: usize,
    pub xtol: f64,
    pub ftol: f64,
    pub grid_resolution: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 256,
            max_iters: 20_000,
            xtol: 1e-10,
            ftol: 1e-12,
            grid_resolution: 10,
        }
    }
}

impl SearchConfig {
    /// Defaults for bound computations (256 restarts).
    pub fn for_bounds(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    /// Defaults for infeasibility evidence (512 restarts).
    pub fn for_infeasibility(seed: u64) -> Self {
        Self {
            seed,
            restarts: 512,
            ..Self::default()
        }
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Parameter {
                name: "restarts",
                value: 0.0,
                range: ">= 1",
            });
        }
        if !(self.xtol > 0.0 && self.ftol > 0.0) {
            return Err(Error::Parameter {
                name: "tolerance",
                value: self.xtol.min(self.ftol),
                range: "> 0",
            });
        }
        Ok(())
    }

    pub(crate) fn nm_options(&self) -> NmOptions {
        NmOptions {
            max_iters: self.max_iters,
            xtol: self.xtol,
            ftol: self.ftol,
            initial_step: 1.0,
        }
    }
}

/// Lengths of the probability-vector blocks making up a search point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplexSpec {
    blocks: Vec<usize>,
}

impl SimplexSpec {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(Error::EmptySearch);
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    /// Length of the concatenated point.
    pub fn len(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Number of unconstrained softmax parameters.
    pub fn n_params(&self) -> usize {
        self.blocks.iter().map(|b| b - 1).sum()
    }

    pub fn offsets(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |acc, &b| {
                let o = *acc;
                *acc += b;
                Some(o)
            })
            .collect()
    }

    /// Softmax decode; the first entry of every block has logit 0.
    pub fn decode(&self, theta: &[f64], out: &mut [f64]) {
        let mut t = 0;
        let mut o = 0;
        for &b in &self.blocks {
            let logits = &theta[t..t + b - 1];
            let top = logits.iter().cloned().fold(0.0, f64::max);
            let block = &mut out[o..o + b];
            block[0] = (-top).exp();
            for (slot, l) in block[1..].iter_mut().zip(logits) {
                *slot = (l - top).exp();
            }
            let s: f64 = block.iter().sum();
            block.iter_mut().for_each(|v| *v /= s);
            t += b - 1;
            o += b;
        }
    }

    /// Inverse of [`decode`](Self::decode) for strictly positive blocks.
    pub fn encode(&self, x: &[f64]) -> Vec<f64> {
        let mut theta = Vec::with_capacity(self.n_params());
        let mut o = 0;
        for &b in &self.blocks {
            let first = x[o].max(1e-300);
            for v in &x[o + 1..o + b] {
                theta.push((v.max(1e-300) / first).ln());
            }
            o += b;
        }
        theta
    }

    /// Uniform point on each block (Dirichlet(1) draw).
    pub fn sample(&self, rng: &mut impl Rng) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.len());
        for &b in &self.blocks {
            let start = x.len();
            for _ in 0..b {
                let e: f64 = Exp1.sample(rng);
                x.push(e);
            }
            let s: f64 = x[start..].iter().sum();
            x[start..].iter_mut().for_each(|v| *v /= s);
        }
        x
    }

    /// Clamp negatives, renormalize every block.
    pub fn renormalize(&self, x: &mut [f64]) {
        let mut o = 0;
        for &b in &self.blocks {
            let block = &mut x[o..o + b];
            block.iter_mut().for_each(|v| *v = v.max(0.0));
            let s: f64 = block.iter().sum();
            if s > 0.0 {
                block.iter_mut().for_each(|v| *v /= s);
            } else {
                block.iter_mut().for_each(|v| *v = 1.0 / b as f64);
            }
            o += b;
        }
    }

    /// Vertex snap: entries below [`SNAP_THRESHOLD`] become zero.
    pub fn snap(&self, x: &[f64]) -> Vec<f64> {
        self.snap_below(x, SNAP_THRESHOLD)
    }

    pub fn snap_below(&self, x: &[f64], threshold: f64) -> Vec<f64> {
        let mut y: Vec<f64> = x
            .iter()
            .map(|&v| if v < threshold { 0.0 } else { v })
            .collect();
        self.renormalize(&mut y);
        y
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub value: f64,
    pub argmax: Vec<f64>,
    /// Restarts actually run (fewer than requested when a stop value was hit).
    pub restarts_used: usize,
    pub discarded: usize,
    pub best_restart: usize,
}

/// Optional hooks for [`maximize_with`].
pub struct MaximizeOptions<'a> {
    /// Stop once some restart reaches this value; the lowest such restart
    /// index wins, so the result does not depend on scheduling.
    pub stop_at: Option<f64>,
    /// Problem-specific improvement applied after each vertex snap.
    pub polish: Option<&'a (dyn Fn(&[f64]) -> Vec<f64> + Sync)>,
    /// Costlier local refinement run once on the best polished point.
    pub refine: Option<&'a (dyn Fn(&[f64]) -> Vec<f64> + Sync)>,
}

impl Default for MaximizeOptions<'_> {
    fn default() -> Self {
        Self {
            stop_at: None,
            polish: None,
            refine: None,
        }
    }
}

pub fn restart_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Worker pool; `POVMW_THREADS` caps its size.
pub fn pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let threads = std::env::var("POVMW_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&t| t > 0)
            .unwrap_or(0);
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool")
    })
}

pub fn maximize<F>(objective: &F, spec: &SimplexSpec, cfg: &SearchConfig) -> Result<SearchOutcome>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    maximize_with(objective, spec, cfg, &MaximizeOptions::default())
}

struct RestartResult {
    index: usize,
    value: f64,
    x: Vec<f64>,
}

pub fn maximize_with<F>(
    objective: &F,
    spec: &SimplexSpec,
    cfg: &SearchConfig,
    opts: &MaximizeOptions,
) -> Result<SearchOutcome>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    cfg.validate()?;
    const BATCH: usize = 64;
    let mut best: Option<RestartResult> = None;
    let mut discarded = 0;
    let mut used = 0;
    let mut start = 0;
    while start < cfg.restarts {
        let end = (start + BATCH).min(cfg.restarts);
        let results: Vec<Option<RestartResult>> = pool().install(|| {
            (start..end)
                .into_par_iter()
                .map(|i| run_restart(objective, spec, cfg, opts, i))
                .collect()
        });
        let mut stop_index = None;
        for r in results.into_iter() {
            let Some(r) = r else {
                discarded += 1;
                continue;
            };
            if let Some(target) = opts.stop_at {
                if r.value >= target && stop_index.is_none() {
                    stop_index = Some(r.index);
                }
            }
            if stop_index.is_some_and(|s| r.index > s) {
                continue;
            }
            let better = match &best {
                None => true,
                Some(b) => r.value > b.value,
            };
            if better {
                best = Some(r);
            }
        }
        if let Some(s) = stop_index {
            used = s + 1;
            // restarts after the stopping one in this batch do not count
            break;
        }
        used = end;
        start = end;
    }
    let best = best.ok_or(Error::EmptySearch)?;
    if discarded > 0 {
        log::warn!("{discarded} restart(s) discarded after non-finite objective values");
    }
    Ok(SearchOutcome {
        value: best.value,
        argmax: best.x,
        restarts_used: used,
        discarded,
        best_restart: best.index,
    })
}

fn run_restart<F>(
    objective: &F,
    spec: &SimplexSpec,
    cfg: &SearchConfig,
    opts: &MaximizeOptions,
    index: usize,
) -> Option<RestartResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(cfg.seed, index as u64));
    let x0 = spec.sample(&mut rng);
    let theta0 = spec.encode(&x0);
    let mut buf = vec![0.0; spec.len()];
    let mut neg = |theta: &[f64]| {
        spec.decode(theta, &mut buf);
        -objective(&buf)
    };
    let nm = nelder_mead(&mut neg, &theta0, &cfg.nm_options());
    if !nm.finite {
        log::debug!("restart {index}: non-finite objective, discarded");
        return None;
    }
    let mut x = vec![0.0; spec.len()];
    spec.decode(&nm.x, &mut x);
    spec.renormalize(&mut x);
    let mut value = objective(&x);
    let snapped = spec.snap(&x);
    let v = objective(&snapped);
    if v >= value {
        value = v;
        x = snapped;
    }
    if let Some(polish) = opts.polish {
        // Softmax iterates never reach the boundary, so the polish is also
        // tried from coarser snaps that zero out small-but-stuck entries.
        let start = x.clone();
        for threshold in POLISH_SNAPS {
            let mut y = polish(&spec.snap_below(&start, threshold));
            spec.renormalize(&mut y);
            let v = objective(&y);
            if v.is_finite() && v > value {
                value = v;
                x = y;
            }
        }
    }
    if let Some(refine) = opts.refine {
        let mut y = refine(&x);
        spec.renormalize(&mut y);
        let v = objective(&y);
        if v.is_finite() && v > value {
            value = v;
            x = y;
        }
    }
    if !value.is_finite() {
        return None;
    }
    Some(RestartResult { index, value, x })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualOutcome {
    pub best_residual: f64,
    pub argmin: Vec<f64>,
    pub restarts_used: usize,
}

/// Minimizes ‖model(x) − target‖² by maximizing its negation.
pub fn minimize_residual<M>(
    target: &[f64],
    model: &M,
    spec: &SimplexSpec,
    cfg: &SearchConfig,
    stop_below: Option<f64>,
) -> Result<ResidualOutcome>
where
    M: Fn(&[f64], &mut [f64]) + Sync,
{
    let objective = |x: &[f64]| {
        if target.len() <= 128 {
            let mut out = [0.0f64; 128];
            let out = &mut out[..target.len()];
            model(x, out);
            -crate::correlation::sq_distance(out, target)
        } else {
            let mut out = vec![0.0; target.len()];
            model(x, &mut out);
            -crate::correlation::sq_distance(&out, target)
        }
    };
    let opts = MaximizeOptions {
        stop_at: stop_below.map(|t| -t),
        polish: None,
        refine: None,
    };
    let r = maximize_with(&objective, spec, cfg, &opts)?;
    Ok(ResidualOutcome {
        best_residual: -r.value,
        argmin: r.argmax,
        restarts_used: r.restarts_used,
    })
}
