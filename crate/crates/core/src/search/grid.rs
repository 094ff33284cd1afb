//! Exhaustive evaluation over the simplex lattice {x : r·x ∈ ℕ^b, Σx = 1}.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{pool, SimplexSpec};
use crate::error::{Error, Result};

/// Largest lattice the oracle will enumerate.
pub const GRID_LIMIT: f64 = 1e9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridOutcome {
    pub value: f64,
    pub argmax: Vec<f64>,
    pub points: u64,
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Number of lattice points at the given resolution.
pub fn lattice_size(spec: &SimplexSpec, resolution: usize) -> f64 {
    spec.blocks()
        .iter()
        .map(|&b| binomial((resolution + b - 1) as u64, (b - 1) as u64).round())
        .product()
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub fn grid_oracle<F>(objective: &F, spec: &SimplexSpec, resolution: usize) -> Result<GridOutcome>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if resolution == 0 {
        return Err(Error::Parameter {
            name: "resolution",
            value: 0.0,
            range: ">= 1",
        });
    }
    let size = lattice_size(spec, resolution);
    if size > GRID_LIMIT {
        return Err(Error::GridTooLarge {
            points: size,
            limit: GRID_LIMIT,
        });
    }
    let r = resolution as f64;
    let lattices: Vec<Vec<Vec<f64>>> = spec
        .blocks()
        .iter()
        .map(|&b| {
            compositions(resolution, b)
                .into_iter()
                .map(|c| c.into_iter().map(|v| v as f64 / r).collect())
                .collect()
        })
        .collect();
    let radices: Vec<u64> = lattices.iter().map(|l| l.len() as u64).collect();
    let total: u64 = radices.iter().product();
    let offsets = spec.offsets();
    let chunks = (rayon::current_num_threads() as u64 * 32).clamp(1, total);
    let chunk_len = total.div_ceil(chunks);

    let best = pool().install(|| {
        (0..chunks)
            .into_par_iter()
            .filter_map(|c| {
                let lo = c * chunk_len;
                let hi = ((c + 1) * chunk_len).min(total);
                if lo >= hi {
                    return None;
                }
                // mixed-radix digits, last block fastest
                let mut digits = vec![0u64; radices.len()];
                let mut rem = lo;
                for (d, &rad) in digits.iter_mut().zip(&radices).rev() {
                    *d = rem % rad;
                    rem /= rad;
                }
                let mut x = vec![0.0; spec.len()];
                for (bi, &d) in digits.iter().enumerate() {
                    let o = offsets[bi];
                    x[o..o + spec.blocks()[bi]].copy_from_slice(&lattices[bi][d as usize]);
                }
                let mut best: Option<(f64, u64)> = None;
                for flat in lo..hi {
                    let v = objective(&x);
                    if v.is_finite() && best.is_none_or(|(bv, _)| v > bv) {
                        best = Some((v, flat));
                    }
                    // advance odometer
                    for bi in (0..digits.len()).rev() {
                        digits[bi] += 1;
                        if digits[bi] < radices[bi] {
                            let o = offsets[bi];
                            x[o..o + spec.blocks()[bi]]
                                .copy_from_slice(&lattices[bi][digits[bi] as usize]);
                            break;
                        }
                        digits[bi] = 0;
                        let o = offsets[bi];
                        x[o..o + spec.blocks()[bi]].copy_from_slice(&lattices[bi][0]);
                    }
                }
                best
            })
            .reduce_with(|a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            })
    });
    let (value, flat) = best.ok_or(Error::EmptySearch)?;
    let mut argmax = vec![0.0; spec.len()];
    let mut rem = flat;
    for bi in (0..radices.len()).rev() {
        let d = (rem % radices[bi]) as usize;
        rem /= radices[bi];
        let o = offsets[bi];
        argmax[o..o + spec.blocks()[bi]].copy_from_slice(&lattices[bi][d]);
    }
    Ok(GridOutcome {
        value,
        argmax,
        points: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_entry_on_a_segment() {
        let spec = SimplexSpec::new(vec![2]).unwrap();
        let f = |x: &[f64]| x[0].min(x[1]);
        let g = grid_oracle(&f, &spec, 10).unwrap();
        assert_eq!(g.value, 0.5);
        assert_eq!(g.argmax, vec![0.5, 0.5]);
        assert_eq!(g.points, 11);
    }

    #[test]
    fn lattice_counts() {
        let spec = SimplexSpec::new(vec![3, 3]).unwrap();
        assert_eq!(lattice_size(&spec, 4), 225.0);
        let g = grid_oracle(&|x: &[f64]| x[0] * x[4], &spec, 4).unwrap();
        assert_eq!(g.points, 225);
        assert_eq!(g.value, 1.0);
    }

    #[test]
    fn guard_trips() {
        let spec = SimplexSpec::new(vec![2, 3, 3, 3, 3]).unwrap();
        assert!(matches!(
            grid_oracle(&|_: &[f64]| 0.0, &spec, 50),
            Err(Error::GridTooLarge { .. })
        ));
    }

    #[test]
    fn ties_resolve_to_first_lattice_point() {
        let spec = SimplexSpec::new(vec![3]).unwrap();
        let g = grid_oracle(&|_: &[f64]| 1.0, &spec, 3).unwrap();
        assert_eq!(g.argmax, vec![1.0, 0.0, 0.0]);
    }
}
