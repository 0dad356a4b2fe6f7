//! Derivative-free minimization: exhaustive grid scans and Nelder–Mead polish.

use std::cell::Cell;

use rayon::prelude::*;

/// Result of a local minimization.
#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Nelder–Mead simplex with the standard coefficients
/// (reflection 1, expansion 2, contraction ½, shrink ½).
#[derive(Clone, Debug)]
pub struct NelderMead {
    /// Per-coordinate offsets of the initial simplex vertices.
    pub initial_step: Vec<f64>,
    /// Stop once every vertex is within `xatol` of the best one (max-norm)...
    pub xatol: f64,
    /// ...and every vertex value is within `fatol` of the best value.
    pub fatol: f64,
    pub max_evals: usize,
}

impl NelderMead {
    pub fn minimize<F>(&self, mut f: F, x0: &[f64]) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        let n = x0.len();
        assert_eq!(self.initial_step.len(), n, "initial_step length must match x0");
        let evals = Cell::new(0usize);
        let mut eval = |x: &[f64]| {
            evals.set(evals.get() + 1);
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };

        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((x0.to_vec(), eval(x0)));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += self.initial_step[i];
            let v = eval(&x);
            simplex.push((x, v));
        }

        let mut converged = false;
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let best = &simplex[0];
            let f_spread = simplex.iter().map(|(_, v)| (v - best.1).abs()).fold(0.0, f64::max);
            let x_spread =
                simplex.iter().flat_map(|(x, _)| x.iter().zip(&best.0).map(|(a, b)| (a - b).abs())).fold(0.0, f64::max);
            if f_spread <= self.fatol && x_spread <= self.xatol {
                converged = true;
                break;
            }
            if evals.get() >= self.max_evals {
                break;
            }

            let centroid: Vec<f64> =
                (0..n).map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64).collect();
            let worst = simplex[n].clone();
            let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect() };

            let xr = along(1.0);
            let fr = eval(&xr);
            if fr < simplex[0].1 {
                let xe = along(2.0);
                let fe = eval(&xe);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < worst.1 {
                let xc = along(0.5);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = along(-0.5);
                let fc = eval(&xc);
                (xc, fc)
            };
            if fc < fr.min(worst.1) {
                simplex[n] = (xc, fc);
                continue;
            }
            let x0 = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let xs: Vec<f64> = x0.iter().zip(&vertex.0).map(|(b, x)| b + 0.5 * (x - b)).collect();
                let fs = eval(&xs);
                *vertex = (xs, fs);
            }
        }

        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, value) = simplex.swap_remove(0);
        Minimum { x, value, evals: evals.get(), converged }
    }
}

/// Evaluates `objective` at every flat grid index in parallel and returns the
/// `keep` smallest `(index, value)` pairs in ascending order.
///
/// Ties are broken by the lower index, so the selection does not depend on
/// thread scheduling. NaN values rank last.
pub fn grid_best<F>(points: usize, keep: usize, objective: F) -> Vec<(usize, f64)>
where
    F: Fn(usize) -> f64 + Sync,
{
    let values: Vec<f64> = (0..points)
        .into_par_iter()
        .map(|i| {
            let v = objective(i);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        })
        .collect();
    let mut idx: Vec<usize> = (0..points).collect();
    let cmp = |a: &usize, b: &usize| values[*a].total_cmp(&values[*b]).then(a.cmp(b));
    let keep = keep.min(points);
    if keep == 0 {
        return Vec::new();
    }
    if keep < points {
        idx.select_nth_unstable_by(keep - 1, cmp);
        idx.truncate(keep);
    }
    idx.sort_by(cmp);
    idx.into_iter().map(|i| (i, values[i])).collect()
}

/// `n` evenly spaced points covering `[lo, hi]` inclusive (`n ≥ 2`).
pub fn closed_grid(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    debug_assert!(n >= 2);
    if i + 1 == n {
        hi
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}
