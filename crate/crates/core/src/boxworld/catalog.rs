//! Exact square-bit states and effects.

use num_rational::Rational64;

use crate::error::{Error, Result};

pub type Q = Rational64;
pub type QVec = [Q; 3];
pub type QMat = [[Q; 3]; 3];

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn qv(v: [i64; 3], d: i64) -> QVec {
    v.map(|x| q(x, d))
}

/// ω_1..ω_4: the vertices of the square.
pub fn pure_state_exact(i: usize) -> Result<QVec> {
    let v = match i {
        1 => [1, 0, 1],
        2 => [0, 1, 1],
        3 => [-1, 0, 1],
        4 => [0, -1, 1],
        _ => {
            return Err(Error::Index {
                index: i,
                range: "1..=4",
            })
        }
    };
    Ok(qv(v, 1))
}

/// e_1..e_4 = ẽ_i / 2.
pub fn extremal_effect_exact(i: usize) -> Result<QVec> {
    let v = match i {
        1 => [1, 1, 1],
        2 => [-1, 1, 1],
        3 => [-1, -1, 1],
        4 => [1, -1, 1],
        _ => {
            return Err(Error::Index {
                index: i,
                range: "1..=4",
            })
        }
    };
    Ok(qv(v, 2))
}

pub fn unit_exact() -> QVec {
    qv([0, 0, 1], 1)
}

pub fn zero_exact() -> QVec {
    qv([0, 0, 0], 1)
}

pub fn outer(a: &QVec, b: &QVec) -> QMat {
    let mut m = [[q(0, 1); 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            m[r][c] = a[r] * b[c];
        }
    }
    m
}

/// Ω_{4(i−1)+j} = ω_i ω_jᵀ.
pub fn product_state_exact(i: usize, j: usize) -> Result<QMat> {
    Ok(outer(&pure_state_exact(i)?, &pure_state_exact(j)?))
}

/// Ω_17..Ω_24, each ½ Σ ±ω_a ω_bᵀ over four terms.
pub fn entangled_state_exact(m: usize) -> Result<QMat> {
    let terms: [(i64, usize, usize); 4] = match m {
        17 => [(1, 2, 2), (-1, 3, 3), (1, 3, 4), (1, 4, 3)],
        18 => [(1, 1, 4), (-1, 1, 1), (1, 2, 2), (1, 4, 1)],
        19 => [(1, 1, 1), (-1, 2, 2), (1, 2, 3), (1, 3, 2)],
        20 => [(1, 1, 1), (-1, 1, 4), (1, 2, 4), (1, 4, 3)],
        21 => [(1, 1, 4), (-1, 1, 1), (1, 2, 1), (1, 4, 2)],
        22 => [(1, 1, 1), (-1, 1, 2), (1, 2, 2), (1, 4, 3)],
        23 => [(1, 2, 2), (-1, 3, 2), (1, 3, 3), (1, 4, 1)],
        24 => [(1, 1, 2), (-1, 2, 2), (1, 2, 3), (1, 3, 1)],
        _ => {
            return Err(Error::Index {
                index: m,
                range: "17..=24",
            })
        }
    };
    let mut acc = [[q(0, 1); 3]; 3];
    for (sign, a, b) in terms {
        let t = product_state_exact(a, b)?;
        for r in 0..3 {
            for c in 0..3 {
                acc[r][c] += q(sign, 2) * t[r][c];
            }
        }
    }
    Ok(acc)
}

/// Any of the 24 pure PR-model states by index 1..=24.
pub fn pr_state_exact(n: usize) -> Result<QMat> {
    match n {
        1..=16 => product_state_exact((n - 1) / 4 + 1, (n - 1) % 4 + 1),
        17..=24 => entangled_state_exact(n),
        _ => Err(Error::Index {
            index: n,
            range: "1..=24",
        }),
    }
}

pub fn dot(a: &QVec, b: &QVec) -> Q {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// aᵀ M b.
pub fn bilinear(a: &QVec, m: &QMat, b: &QVec) -> Q {
    let mut s = q(0, 1);
    for r in 0..3 {
        for c in 0..3 {
            s += a[r] * m[r][c] * b[c];
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinguishable_pair() {
        let e2 = extremal_effect_exact(2).unwrap();
        assert_eq!(dot(&e2, &pure_state_exact(1).unwrap()), q(0, 1));
        assert_eq!(dot(&e2, &pure_state_exact(2).unwrap()), q(1, 1));
    }

    #[test]
    fn all_pr_states_are_consistent_exactly() {
        let u = unit_exact();
        for n in 1..=24 {
            let m = pr_state_exact(n).unwrap();
            assert_eq!(bilinear(&u, &m, &u), q(1, 1), "state {n}");
            for i in 1..=4 {
                for j in 1..=4 {
                    let p = bilinear(
                        &extremal_effect_exact(i).unwrap(),
                        &m,
                        &extremal_effect_exact(j).unwrap(),
                    );
                    assert!(
                        p >= q(0, 1) && p <= q(1, 1),
                        "state {n} effects {i},{j}: {p}"
                    );
                }
            }
        }
    }

    #[test]
    fn product_indexing() {
        assert_eq!(
            pr_state_exact(6).unwrap(),
            product_state_exact(2, 2).unwrap()
        );
        assert_eq!(
            pr_state_exact(16).unwrap(),
            product_state_exact(4, 4).unwrap()
        );
        assert_eq!(
            pr_state_exact(1).unwrap(),
            product_state_exact(1, 1).unwrap()
        );
        assert!(pr_state_exact(25).is_err());
        assert!(entangled_state_exact(16).is_err());
    }

    #[test]
    fn effects_sum_to_twice_unit() {
        let mut s = zero_exact();
        for i in 1..=4 {
            let e = extremal_effect_exact(i).unwrap();
            for c in 0..3 {
                s[c] += e[c];
            }
        }
        assert_eq!(s, unit_exact().map(|v| v * q(2, 1)));
    }
}
