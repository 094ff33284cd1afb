//! Nelder–Mead simplex minimizer with adaptive coefficients and restarts
//! around the incumbent.

#[derive(Debug, Clone, Copy)]
pub struct NmOptions {
    pub max_iters: usize,
    pub xtol: f64,
    pub ftol: f64,
    pub initial_step: f64,
}

#[derive(Debug, Clone)]
pub struct NmResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iters: usize,
    /// False when some evaluation returned a non-finite value.
    pub finite: bool,
}

pub fn nelder_mead(f: &mut impl FnMut(&[f64]) -> f64, x0: &[f64], opts: &NmOptions) -> NmResult {
    let n = x0.len();
    let mut finite = true;
    let mut eval = |x: &[f64], finite: &mut bool| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            *finite = false;
            f64::INFINITY
        }
    };
    if n == 0 {
        let v = eval(x0, &mut finite);
        return NmResult {
            x: vec![],
            f: v,
            iters: 0,
            finite,
        };
    }
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = if n <= 2 {
        (1.0, 2.0, 0.5, 0.5)
    } else {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf)
    };

    let mut best_x = x0.to_vec();
    let mut best_f = eval(x0, &mut finite);
    let mut iters = 0;
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];
    let mut worst = vec![0.0; n];

    while iters < opts.max_iters {
        let start_f = best_f;
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((best_x.clone(), best_f));
        for i in 0..n {
            let mut v = best_x.clone();
            v[i] += opts.initial_step;
            let fv = eval(&v, &mut finite);
            simplex.push((v, fv));
        }
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let f_lo = simplex[0].1;
            let f_hi = simplex[n].1;
            let spread = simplex[1..]
                .iter()
                .flat_map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if ((f_hi - f_lo).abs() <= opts.ftol && spread <= opts.xtol) || iters >= opts.max_iters
            {
                break;
            }
            iters += 1;

            centroid.iter_mut().for_each(|c| *c = 0.0);
            for (v, _) in &simplex[..n] {
                for (c, x) in centroid.iter_mut().zip(v) {
                    *c += x / nf;
                }
            }
            worst.copy_from_slice(&simplex[n].0);
            let along = |t: f64, out: &mut Vec<f64>| {
                for ((o, c), w) in out.iter_mut().zip(&centroid).zip(&worst) {
                    *o = c + t * (c - w);
                }
            };
            along(alpha, &mut trial);
            let fr = eval(&trial, &mut finite);
            if fr < simplex[0].1 {
                along(alpha * gamma, &mut trial2);
                let fe = eval(&trial2, &mut finite);
                if fe < fr {
                    simplex[n].0.copy_from_slice(&trial2);
                    simplex[n].1 = fe;
                } else {
                    simplex[n].0.copy_from_slice(&trial);
                    simplex[n].1 = fr;
                }
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n].0.copy_from_slice(&trial);
                simplex[n].1 = fr;
                continue;
            }
            let (t, reference) = if fr < simplex[n].1 {
                (alpha * rho, fr)
            } else {
                (-rho, simplex[n].1)
            };
            along(t, &mut trial2);
            let fc = eval(&trial2, &mut finite);
            if fc <= reference {
                simplex[n].0.copy_from_slice(&trial2);
                simplex[n].1 = fc;
                continue;
            }
            let (head, tail) = simplex.split_at_mut(1);
            let anchor = &head[0].0;
            for (v, fv) in tail.iter_mut() {
                for (x, a) in v.iter_mut().zip(anchor) {
                    *x = a + sigma * (*x - a);
                }
                *fv = eval(v, &mut finite);
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[0].1 < best_f {
            best_f = simplex[0].1;
            best_x = simplex[0].0.clone();
        }
        // Restart around the incumbent until a pass stops paying off.
        if !(start_f - best_f > opts.ftol) {
            break;
        }
    }
    NmResult {
        x: best_x,
        f: best_f,
        iters,
        finite,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> NmOptions {
        NmOptions {
            max_iters: 20_000,
            xtol: 1e-10,
            ftol: 1e-14,
            initial_step: 0.5,
        }
    }

    #[test]
    fn rosenbrock() {
        let mut f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = nelder_mead(&mut f, &[-1.2, 1.0], &opts());
        assert!(
            (r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] - 1.0).abs() < 1e-5,
            "{:?}",
            r.x
        );
        assert!(r.finite);
    }

    #[test]
    fn quadratic_in_ten_dims() {
        let mut f = |x: &[f64]| {
            x.iter()
                .enumerate()
                .map(|(i, v)| (i as f64 + 1.0) * (v - 0.3).powi(2))
                .sum()
        };
        let r = nelder_mead(&mut f, &[0.0; 10], &opts());
        assert!(r.f < 1e-10, "{}", r.f);
    }

    #[test]
    fn flags_non_finite() {
        let mut f = |x: &[f64]| if x[0] > 0.2 { f64::NAN } else { x[0] * x[0] };
        let r = nelder_mead(&mut f, &[0.0, 0.0], &opts());
        assert!(!r.finite);
    }

    #[test]
    fn zero_dimensional() {
        let mut f = |_: &[f64]| 3.0;
        let r = nelder_mead(&mut f, &[], &opts());
        assert_eq!(r.f, 3.0);
    }
}
