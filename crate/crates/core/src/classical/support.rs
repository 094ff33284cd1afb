//! Sign-pattern test for bipartite classical models.
//!
//! For p = (S_A ⊗ S_B)(λ), p(a, b) > 0 exactly when some (i, j) in the
//! support of λ has a ∈ C_i and b ∈ D_j, where C_i, D_j are the supports of
//! the map columns. If no choice of column supports and state support yields
//! the target's zero pattern, no model exists at any numeric values.

use serde::Serialize;

use super::Ansatz;
use crate::correlation::Correlation;
use crate::error::{Error, Result};

/// Target entries at or below this are treated as exact zeros.
pub const ZERO_TOL: f64 = 1e-12;

/// Enumeration limit on pairs of column-support tuples.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

/// A support pattern compatible with the target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportStructure {
    /// Output-set bitmask of each of Alice's map columns.
    pub alice: Vec<u32>,
    pub bob: Vec<u32>,
    /// Hidden-level pairs carrying state weight.
    pub pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum SupportVerdict {
    Compatible(SupportStructure),
    /// No support pattern reproduces the target's zeros: infeasible.
    Incompatible,
    OverBudget,
}

struct Problem {
    d: usize,
    k: usize,
    rows: Vec<u32>,
    /// Fixed state-support options, or `None` for arbitrary supports.
    options: Option<Vec<Vec<(usize, usize)>>>,
    identical: bool,
    /// Hidden levels are interchangeable, so column tuples can be sorted.
    sorted: bool,
}

impl Problem {
    fn rect_inside(&self, c: u32, dm: u32) -> bool {
        let mut m = c;
        while m != 0 {
            let a = m.trailing_zeros() as usize;
            if dm & !self.rows[a] != 0 {
                return false;
            }
            m &= m - 1;
        }
        true
    }

    fn covers(&self, alice: &[u32], bob: &[u32]) -> Option<Vec<(usize, usize)>> {
        let mut cov = vec![0u32; self.k];
        let add = |c: u32, dm: u32, cov: &mut [u32]| {
            let mut m = c;
            while m != 0 {
                let a = m.trailing_zeros() as usize;
                cov[a] |= dm;
                m &= m - 1;
            }
        };
        match &self.options {
            None => {
                let mut pairs = Vec::new();
                for (i, &c) in alice.iter().enumerate() {
                    for (j, &dm) in bob.iter().enumerate() {
                        if self.rect_inside(c, dm) {
                            add(c, dm, &mut cov);
                            pairs.push((i, j));
                        }
                    }
                }
                (cov == self.rows).then_some(pairs)
            }
            Some(opts) => opts.iter().find_map(|pairs| {
                cov.iter_mut().for_each(|v| *v = 0);
                for &(i, j) in pairs {
                    if !self.rect_inside(alice[i], bob[j]) {
                        return None;
                    }
                    add(alice[i], bob[j], &mut cov);
                }
                (cov == self.rows).then(|| pairs.clone())
            }),
        }
    }

    /// Column tuples for one party, in enumeration order.
    fn tuples(&self) -> Vec<Vec<u32>> {
        let full = (1u32 << self.k) - 1;
        let mut out = Vec::new();
        let mut cur = vec![1u32; self.d];
        loop {
            if !self.sorted || cur.windows(2).all(|w| w[0] <= w[1]) {
                out.push(cur.clone());
            }
            let mut i = 0;
            loop {
                if i == self.d {
                    return out;
                }
                if cur[i] < full {
                    cur[i] += 1;
                    break;
                }
                cur[i] = 1;
                i += 1;
            }
        }
    }
}

fn count_tuples(k: usize, d: usize, sorted: bool) -> f64 {
    let m = ((1u64 << k) - 1) as f64;
    if sorted {
        // multisets of size d from m options
        (0..d).fold(1.0, |acc, i| acc * (m + i as f64) / (i + 1) as f64)
    } else {
        m.powi(d as i32)
    }
}

fn product_diagonal_options() -> Vec<Vec<(usize, usize)>> {
    // supports of (λ, 1 − λ) ⊗ (λ′, 1 − λ′) on the joint diagonal m = 2i + j
    let single: [&[usize]; 3] = [&[0], &[1], &[0, 1]];
    let mut out = Vec::new();
    for s in single {
        for t in single {
            let mut v = Vec::new();
            for &i in s {
                for &j in t {
                    let m = 2 * i + j;
                    v.push((m, m));
                }
            }
            out.push(v);
        }
    }
    out
}

/// Searches for a support pattern of a d-level model reproducing the zero
/// pattern of the bipartite `target`.
pub fn support_certificate(
    target: &Correlation,
    d: usize,
    ansatz: Ansatz,
    identical: bool,
    budget: u64,
) -> Result<SupportVerdict> {
    let k = match target.outcomes() {
        [a, b] if a == b => *a,
        s => {
            return Err(Error::Dimension(format!(
                "support test needs a square bipartite target, got {s:?}"
            )))
        }
    };
    if k > 16 {
        return Ok(SupportVerdict::OverBudget);
    }
    let (d, options, identical) = match ansatz {
        Ansatz::General => (d, None, identical),
        Ansatz::Canonical => (
            2,
            Some(vec![vec![(0, 0)], vec![(1, 1)], vec![(0, 0), (1, 1)]]),
            identical,
        ),
        Ansatz::AdaptivePair => (4, Some(product_diagonal_options()), true),
    };
    let rows: Vec<u32> = (0..k)
        .map(|a| {
            (0..k)
                .filter(|&b| target.get(&[a, b]) > ZERO_TOL)
                .fold(0, |m, b| m | (1 << b))
        })
        .collect();
    let p = Problem {
        d,
        k,
        rows,
        sorted: options.is_none(),
        options,
        identical,
    };
    let per_party = count_tuples(k, d, p.sorted);
    let total = if identical {
        per_party
    } else {
        per_party * per_party
    };
    if total > budget as f64 {
        return Ok(SupportVerdict::OverBudget);
    }
    let tuples = p.tuples();
    // Alice's outputs must include every row with positive mass.
    let live_rows = p
        .rows
        .iter()
        .enumerate()
        .filter(|(_, r)| **r != 0)
        .fold(0u32, |m, (a, _)| m | (1 << a));
    let live_cols = p.rows.iter().fold(0u32, |m, r| m | r);
    let union = |t: &[u32]| t.iter().fold(0u32, |m, c| m | c);
    let alice: Vec<&Vec<u32>> = tuples
        .iter()
        .filter(|t| union(t) & live_rows == live_rows)
        .collect();
    let bob: Vec<&Vec<u32>> = tuples
        .iter()
        .filter(|t| union(t) & live_cols == live_cols)
        .collect();
    for a in &alice {
        if p.identical {
            if union(a) & live_cols != live_cols {
                continue;
            }
            if let Some(pairs) = p.covers(a, a) {
                return Ok(SupportVerdict::Compatible(SupportStructure {
                    alice: a.to_vec(),
                    bob: a.to_vec(),
                    pairs,
                }));
            }
            continue;
        }
        for b in &bob {
            if let Some(pairs) = p.covers(a, b) {
                return Ok(SupportVerdict::Compatible(SupportStructure {
                    alice: a.to_vec(),
                    bob: b.to_vec(),
                    pairs,
                }));
            }
        }
    }
    Ok(SupportVerdict::Incompatible)
}
