//! Classical minimizers for the variational loop.

use serde::{Deserialize, Serialize};

/// Outcome of one local minimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadOptions {
    pub max_iters: usize,
    pub f_tol: f64,
    /// Stop once every vertex is within this distance of the best one.
    pub x_tol: f64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    /// Times the simplex is rebuilt around the best vertex after a collapse.
    pub rebuilds: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            f_tol: 1e-9,
            x_tol: 1e-7,
            initial_step: 0.5,
            rebuilds: 2,
        }
    }
}

/// Nelder–Mead with standard coefficients (reflect 1, expand 2, contract ½,
/// shrink ½). Non-finite objective values are treated as `+∞`.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64]| {
        evals += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    if n == 0 {
        let v = eval(x0);
        return Minimum {
            x: Vec::new(),
            f: v,
            iterations: 0,
            evaluations: 1,
            converged: true,
        };
    }

    let build = |center: &[f64], step: f64| -> Vec<Vec<f64>> {
        let mut s = vec![center.to_vec()];
        for i in 0..n {
            let mut v = center.to_vec();
            v[i] += step;
            s.push(v);
        }
        s
    };

    let mut simplex = build(x0, opts.initial_step);
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();
    let mut iters = 0usize;
    let mut rebuilds_left = opts.rebuilds;
    let mut converged = false;
    let mut best_at_rebuild = f64::INFINITY;

    while iters < opts.max_iters {
        // order vertices
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = simplex[1..]
            .iter()
            .map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if (values[n] - values[0]).abs() <= opts.f_tol || spread <= opts.x_tol {
            let improved = best_at_rebuild - values[0] > opts.f_tol;
            if rebuilds_left > 0 && improved {
                rebuilds_left -= 1;
                best_at_rebuild = values[0];
                let best = simplex[0].clone();
                let f0 = values[0];
                simplex = build(&best, opts.initial_step * 0.1);
                values = std::iter::once(f0)
                    .chain(simplex[1..].iter().map(|v| eval(v)))
                    .collect();
                continue;
            }
            converged = true;
            break;
        }
        iters += 1;

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(1.0);
        let fr = eval(&xr);
        if fr < values[0] {
            let xe = along(2.0);
            let fe = eval(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[n] {
            let xc = along(0.5);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(-0.5);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        // shrink toward the best vertex
        let best = simplex[0].clone();
        for i in 1..=n {
            for (x, b) in simplex[i].iter_mut().zip(&best) {
                *x = b + 0.5 * (*x - b);
            }
            values[i] = eval(&simplex[i]);
        }
    }

    let (ib, _) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty simplex");
    Minimum {
        x: simplex[ib].clone(),
        f: values[ib],
        iterations: iters,
        evaluations: evals,
        converged,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientDescentOptions {
    pub max_iters: usize,
    pub f_tol: f64,
    pub learning_rate: f64,
}

impl Default for GradientDescentOptions {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            f_tol: 1e-9,
            learning_rate: 0.2,
        }
    }
}

/// Gradient descent with Armijo backtracking from `learning_rate`.
/// `fg` returns `(value, gradient)`; `f` alone is used for line-search probes.
pub fn gradient_descent<F, G>(mut f: F, mut fg: G, x0: &[f64], opts: &GradientDescentOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
    G: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let mut x = x0.to_vec();
    let mut evals = 0usize;
    let mut converged = false;
    let mut iters = 0usize;
    let (mut fx, mut grad) = fg(&x);
    evals += 1;
    while iters < opts.max_iters {
        iters += 1;
        let g2: f64 = grad.iter().map(|g| g * g).sum();
        if g2 == 0.0 || !fx.is_finite() {
            converged = g2 == 0.0;
            break;
        }
        let mut step = opts.learning_rate;
        let mut accepted = None;
        for _ in 0..30 {
            let trial: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi - step * gi).collect();
            let ft = f(&trial);
            evals += 1;
            if ft.is_finite() && ft <= fx - 1e-4 * step * g2 {
                accepted = Some(trial);
                break;
            }
            step *= 0.5;
        }
        let Some(next) = accepted else {
            converged = true;
            break;
        };
        let (fn_, gn) = fg(&next);
        evals += 1;
        let delta = fx - fn_;
        x = next;
        fx = fn_;
        grad = gn;
        if delta.abs() <= opts.f_tol {
            converged = true;
            break;
        }
    }
    Minimum {
        x,
        f: fx,
        iterations: iters,
        evaluations: evals,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn nm_quadratic() {
        let m = nelder_mead(
            |x| x.iter().enumerate().map(|(i, v)| (v - i as f64).powi(2)).sum(),
            &[3.0, -2.0, 0.5, 1.0],
            &NelderMeadOptions::default(),
        );
        assert!(m.converged);
        assert!(m.f < 1e-8);
        for (i, v) in m.x.iter().enumerate() {
            assert!((v - i as f64).abs() < 1e-3);
        }
    }

    #[test]
    fn nm_rosenbrock() {
        let opts = NelderMeadOptions {
            max_iters: 5000,
            f_tol: 1e-14,
            ..Default::default()
        };
        let m = nelder_mead(rosenbrock, &[-1.2, 1.0], &opts);
        assert!((m.x[0] - 1.0).abs() < 1e-4 && (m.x[1] - 1.0).abs() < 1e-4, "{:?}", m.x);
    }

    #[test]
    fn nm_iteration_cap_reports_non_convergence() {
        let opts = NelderMeadOptions {
            max_iters: 3,
            f_tol: 1e-15,
            ..Default::default()
        };
        let m = nelder_mead(rosenbrock, &[-1.2, 1.0], &opts);
        assert!(!m.converged);
        assert!(m.f <= rosenbrock(&[-1.2, 1.0]));
    }

    #[test]
    fn nm_treats_nan_as_infinite() {
        let m = nelder_mead(
            |x| if x[0] < 0.0 { f64::NAN } else { (x[0] - 1.0).powi(2) },
            &[0.2],
            &NelderMeadOptions::default(),
        );
        assert!((m.x[0] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn gd_quadratic() {
        let f = |x: &[f64]| x[0] * x[0] + 3.0 * x[1] * x[1];
        let fg = |x: &[f64]| (f(x), vec![2.0 * x[0], 6.0 * x[1]]);
        let m = gradient_descent(f, fg, &[1.0, -1.0], &GradientDescentOptions::default());
        assert!(m.f < 1e-8, "{}", m.f);
    }
}
