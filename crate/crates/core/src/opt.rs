//! Preconditioned ascent on the discrete Sobolev sphere.
//!
//! Both the Gagliardo-Nirenberg quotient and the exponential functionals are
//! maximized by the same loop: a pointwise L^2 gradient is lifted through the
//! (Delta^2 + 1) / (-Delta + 1) solve, projected onto the tangent space of
//! {||u||_H = 1}, and stepped with a Barzilai-Borwein length guarded by
//! backtracking. Plain L^2 gradients of the fourth-order problem are too
//! stiff to be usable; the Helmholtz lift is what makes the ascent converge.

use std::sync::Arc;

use crate::grid::RadialGrid;
use crate::operators::{helmholtz_solve, laplacian_values, radial_derivative};

#[derive(Debug, Clone, Copy)]
pub struct AscentOpts {
    pub max_iter: usize,
    /// Relative objective change below which an iteration counts as stalled.
    pub value_tol: f64,
    /// Number of consecutive stalled iterations that ends the ascent.
    pub patience: usize,
    pub step_init: f64,
    pub step_min: f64,
    pub step_max: f64,
    /// Project the iterate onto its positive part when sign oscillation is
    /// detected (the maximizing objects are sign-normalized).
    pub project_positive: bool,
}

impl Default for AscentOpts {
    fn default() -> Self {
        AscentOpts {
            max_iter: 5000,
            value_tol: 1e-10,
            patience: 20,
            step_init: 0.5,
            step_min: 1e-6,
            step_max: 50.0,
            project_positive: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AscentResult {
    pub u: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective value at every accepted iterate (non-decreasing).
    pub history: Vec<f64>,
}

/// Derivative part of the Sobolev inner product: Delta in R^4, d/dr in R^2.
fn d_apply(grid: &RadialGrid, u: &[f64]) -> Vec<f64> {
    match grid.dimension() {
        4 => laplacian_values(grid, u),
        _ => radial_derivative(grid, u),
    }
}

fn h_inner(grid: &RadialGrid, u: &[f64], du: &[f64], v: &[f64], dv: &[f64]) -> f64 {
    grid.weights()
        .iter()
        .enumerate()
        .map(|(i, w)| w * (u[i] * v[i] + du[i] * dv[i]))
        .sum()
}

fn l2_inner(grid: &RadialGrid, u: &[f64], v: &[f64]) -> f64 {
    grid.weights()
        .iter()
        .enumerate()
        .map(|(i, w)| w * u[i] * v[i])
        .sum()
}

pub(crate) fn h_normalize(grid: &RadialGrid, u: &mut [f64]) -> f64 {
    let du = d_apply(grid, u);
    let n = h_inner(grid, u, &du, u, &du).sqrt();
    if n > 0.0 {
        for v in u.iter_mut() {
            *v /= n;
        }
    }
    n
}

/// Maximize `objective` over the unit Sobolev sphere. `objective` returns
/// None for inadmissible iterates (overflow guard); `gradient` returns the
/// pointwise L^2 gradient field.
pub fn sphere_ascent(
    grid: &Arc<RadialGrid>,
    init: &[f64],
    objective: impl Fn(&[f64]) -> Option<f64>,
    gradient: impl Fn(&[f64]) -> Vec<f64>,
    opts: &AscentOpts,
) -> AscentResult {
    let mut u = init.to_vec();
    h_normalize(grid, &mut u);
    let mut value = objective(&u).expect("initial iterate must be admissible");
    let mut history = vec![value];
    let mut step = opts.step_init;
    let mut stalled = 0usize;
    let mut prev_u: Option<Vec<f64>> = None;
    let mut prev_g: Option<Vec<f64>> = None;
    let mut iterations = 0usize;
    let mut converged = false;

    for it in 0..opts.max_iter {
        iterations = it + 1;
        let raw = gradient(&u);
        let mut g = helmholtz_solve(grid, &raw);
        // tangent projection on the sphere
        let du = d_apply(grid, &u);
        let dg = d_apply(grid, &g);
        let proj = h_inner(grid, &g, &dg, &u, &du);
        for i in 0..g.len() {
            g[i] -= proj * u[i];
        }

        // Barzilai-Borwein step from the previous accepted move
        if let (Some(pu), Some(pg)) = (&prev_u, &prev_g) {
            let s: Vec<f64> = u.iter().zip(pu).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = pg.iter().zip(&g).map(|(a, b)| a - b).collect();
            let ss = l2_inner(grid, &s, &s);
            let sy = l2_inner(grid, &s, &y);
            if sy.abs() > 1e-300 {
                step = (ss / sy).abs().clamp(opts.step_min, opts.step_max);
            }
        }

        // backtracking on the sphere
        let mut accepted = false;
        let mut tau = step;
        for _ in 0..45 {
            let mut trial: Vec<f64> = u.iter().zip(&g).map(|(a, b)| a + tau * b).collect();
            if opts.project_positive && it > 10 && oscillating(&trial) {
                for v in trial.iter_mut() {
                    *v = v.max(0.0);
                }
            }
            let nrm = h_normalize(grid, &mut trial);
            if nrm == 0.0 {
                tau *= 0.5;
                continue;
            }
            match objective(&trial) {
                Some(v) if v >= value => {
                    let gain = v - value;
                    prev_u = Some(std::mem::replace(&mut u, trial));
                    prev_g = Some(g.clone());
                    value = v;
                    history.push(v);
                    accepted = true;
                    if gain <= opts.value_tol * value.abs().max(1e-300) {
                        stalled += 1;
                    } else {
                        stalled = 0;
                    }
                    break;
                }
                _ => {
                    tau *= 0.5;
                    if tau < 1e-18 {
                        break;
                    }
                }
            }
        }
        if !accepted {
            converged = true;
            break;
        }
        if stalled >= opts.patience {
            converged = true;
            break;
        }
    }
    AscentResult {
        u,
        value,
        iterations,
        converged,
        history,
    }
}

fn oscillating(u: &[f64]) -> bool {
    let mut pos = 0.0f64;
    let mut neg = 0.0f64;
    for &v in u {
        if v > 0.0 {
            pos = pos.max(v);
        } else {
            neg = neg.max(-v);
        }
    }
    neg > 0.02 * pos && pos > 0.0
}
