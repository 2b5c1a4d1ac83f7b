//! Small derivative-free optimisation toolkit: Nelder-Mead simplex search and
//! Latin-hypercube sampling.

use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    /// Stop when the spread of simplex values falls below `ftol·(|f_best| + tiny)`.
    pub ftol: f64,
    /// ... and every vertex lies within `xtol` of the best one (max-norm).
    pub xtol: f64,
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { max_evals: 4000, ftol: 1e-12, xtol: 1e-9, initial_step: 0.25 }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

fn finite_or_inf(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Minimise `f` starting from `x0` with the standard reflection / expansion /
/// contraction / shrink coefficients (1, 2, 1/2, 1/2). NaN values are treated
/// as +∞ so the simplex walks away from them.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult {
    let n = x0.len();
    let eval = |x: &[f64]| finite_or_inf(f(x));
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for k in 0..n {
        let mut v = x0.to_vec();
        v[k] += opts.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();
    let mut evals = n + 1;
    let mut converged = false;

    while evals < opts.max_evals {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let best = values[0];
        let worst = values[n];
        let size =
            simplex[1..].iter().flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs())).fold(0.0, f64::max);
        if (worst - best).abs() <= opts.ftol * (best.abs() + 1e-300) && size <= opts.xtol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n).map(|d| simplex[..n].iter().map(|v| v[d]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|d| centroid[d] + t * (simplex[n][d] - centroid[d])).collect() };

        let xr = along(-1.0);
        let fr = eval(&xr);
        evals += 1;
        if fr < values[0] {
            let xe = along(-2.0);
            let fe = eval(&xe);
            evals += 1;
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
            let xc = along(-0.5);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(0.5);
            let fc = eval(&xc);
            (xc, fc)
        };
        evals += 1;
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        for k in 1..=n {
            let best = simplex[0].clone();
            for (x, b) in simplex[k].iter_mut().zip(&best) {
                *x = b + 0.5 * (*x - b);
            }
            values[k] = eval(&simplex[k]);
        }
        evals += n;
    }

    let (i_best, _) = values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("simplex is non-empty");
    NelderMeadResult { x: simplex[i_best].clone(), f: values[i_best], evals, converged }
}

/// `n` points in [0, 1)^dims with exactly one point per stratum along every axis.
pub fn latin_hypercube<R: Rng>(n: usize, dims: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut columns: Vec<Vec<f64>> = (0..dims)
        .map(|_| {
            let mut strata: Vec<usize> = (0..n).collect();
            strata.shuffle(rng);
            strata.into_iter().map(|s| (s as f64 + rng.gen::<f64>()) / n as f64).collect()
        })
        .collect();
    (0..n).map(|i| columns.iter_mut().map(|c| c[i]).collect()).collect()
}
