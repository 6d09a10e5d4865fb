//! Finite-difference calculus on radial grids.
//!
//! Derivatives are taken in the uniform mapped coordinate s (with r = g(s)
//! the grid's node map) and converted through the analytic metric factors:
//! u_r = u_s / g', u_rr = (u_ss - u_s g''/g') / g'^2. Differencing in s keeps
//! the stencil data O(1) wherever the grid resolves the profile, so the
//! 1/h^2 amplification of rounding noise that kills composed fourth-order
//! operators on strongly graded physical nodes never materializes.
//!
//! Grids that include the origin use the even extension of radial profiles
//! (u(-r) = u(r), so u'(0) = 0): the node maps are odd in s, ghosts fold back
//! onto their mirror nodes, and stencils stay centered all the way to r = 0.
//! The radial Laplacian is u'' + (n-1) u'/r with the regularized value
//! n u''(0) at the origin.

use std::sync::Arc;

use crate::banded::{Banded, BandedLu};
use crate::error::{Error, Result};
use crate::grid::RadialGrid;

const STENCIL: usize = 9;
const HALF: usize = STENCIL / 2;

/// Per-node stencils for first and second s-derivatives (start index plus
/// weights), together with the metric factors of the node map.
#[derive(Debug)]
pub struct DiffOps {
    d1: Vec<(usize, Vec<f64>)>,
    d2: Vec<(usize, Vec<f64>)>,
    /// 1 / g'(s_i)
    inv_gp: Vec<f64>,
    /// g''(s_i) / g'(s_i)
    curv: Vec<f64>,
}

/// Fornberg weights for derivatives 0..=m at x0 over the given nodes.
pub(crate) fn fornberg(x0: f64, xs: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0f64; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

impl DiffOps {
    fn build(grid: &RadialGrid) -> Result<DiffOps> {
        let n = grid.len();
        if n < STENCIL {
            return Err(Error::GridTooCoarse {
                needed: STENCIL,
                got: n,
            });
        }
        let h = 1.0 / (n - 1) as f64;
        let origin = grid.includes_origin();
        let (gp, curv) = grid.metric_factors();
        let inv_gp: Vec<f64> = gp.iter().map(|g| 1.0 / g).collect();

        let mut d1 = Vec::with_capacity(n);
        let mut d2 = Vec::with_capacity(n);
        for i in 0..n {
            if origin && i < HALF {
                // centered stencil across s = 0; the map is odd so ghosts
                // mirror onto positive nodes with even data
                let mut xs = [0.0f64; STENCIL];
                for (k, x) in xs.iter_mut().enumerate() {
                    *x = (i as f64 + k as f64 - HALF as f64) * h;
                }
                let c = fornberg(i as f64 * h, &xs, 2);
                let mut w1 = vec![0.0f64; i + HALF + 1];
                let mut w2 = vec![0.0f64; i + HALF + 1];
                for k in 0..STENCIL {
                    let idx = i as isize + k as isize - HALF as isize;
                    let tgt = idx.unsigned_abs();
                    w1[tgt] += c[1][k];
                    w2[tgt] += c[2][k];
                }
                zero_sum(&mut w1, i);
                zero_sum(&mut w2, i);
                d1.push((0, w1));
                d2.push((0, w2));
            } else {
                let start = i.saturating_sub(HALF).min(n - STENCIL);
                let xs: Vec<f64> = (0..STENCIL).map(|k| (start + k) as f64 * h).collect();
                let c = fornberg(i as f64 * h, &xs, 2);
                let mut w1 = c[1].clone();
                let mut w2 = c[2].clone();
                zero_sum(&mut w1, i - start);
                zero_sum(&mut w2, i - start);
                d1.push((start, w1));
                d2.push((start, w2));
            }
        }
        Ok(DiffOps {
            d1,
            d2,
            inv_gp,
            curv,
        })
    }

    #[inline]
    fn s_derivative(op: &[(usize, Vec<f64>)], u: &[f64], i: usize) -> f64 {
        // Differencing against the evaluation node keeps the accumulated
        // rounding at the scale of the local variation instead of |u|;
        // exact because the weights sum to zero.
        let (start, w) = &op[i];
        let uc = u[i];
        let mut acc = 0.0;
        for (k, wk) in w.iter().enumerate() {
            acc += wk * (u[start + k] - uc);
        }
        acc
    }
}

/// Force an exact zero sum onto a derivative stencil by absorbing the
/// rounding residue into the evaluation node's weight.
fn zero_sum(w: &mut [f64], center: usize) {
    let s: f64 = w.iter().sum();
    w[center] -= s;
}

pub(crate) fn ops(grid: &RadialGrid) -> Arc<DiffOps> {
    grid.ops
        .get_or_init(|| Arc::new(DiffOps::build(grid).expect("grid passed construction checks")))
        .clone()
}

/// du/dr at every node.
pub fn radial_derivative(grid: &RadialGrid, u: &[f64]) -> Vec<f64> {
    let o = ops(grid);
    (0..u.len())
        .map(|i| DiffOps::s_derivative(&o.d1, u, i) * o.inv_gp[i])
        .collect()
}

/// d2u/dr2 at every node.
pub fn radial_second_derivative(grid: &RadialGrid, u: &[f64]) -> Vec<f64> {
    let o = ops(grid);
    (0..u.len())
        .map(|i| {
            let us = DiffOps::s_derivative(&o.d1, u, i);
            let uss = DiffOps::s_derivative(&o.d2, u, i);
            (uss - us * o.curv[i]) * o.inv_gp[i] * o.inv_gp[i]
        })
        .collect()
}

/// Radial Laplacian: u'' + (n-1) u'/r, with n u''(0) at the origin.
pub fn laplacian_values(grid: &RadialGrid, u: &[f64]) -> Vec<f64> {
    let n = grid.dimension() as f64;
    let r = grid.nodes();
    let o = ops(grid);
    (0..u.len())
        .map(|i| {
            let us = DiffOps::s_derivative(&o.d1, u, i);
            let uss = DiffOps::s_derivative(&o.d2, u, i);
            let urr = (uss - us * o.curv[i]) * o.inv_gp[i] * o.inv_gp[i];
            if r[i] == 0.0 {
                n * urr
            } else {
                urr + (n - 1.0) * us * o.inv_gp[i] / r[i]
            }
        })
        .collect()
}

/// Bilaplacian as the composition laplacian(laplacian(u)); interior values
/// agree with a single widened stencil by construction.
pub fn bilaplacian_values(grid: &RadialGrid, u: &[f64]) -> Vec<f64> {
    let lap = laplacian_values(grid, u);
    laplacian_values(grid, &lap)
}

/// The Laplacian assembled as a banded matrix (for operator composition).
pub fn laplacian_matrix(grid: &RadialGrid) -> Banded {
    let o = ops(grid);
    let n = grid.len();
    let dim = grid.dimension() as f64;
    let r = grid.nodes();
    let mut m = Banded::zeros(n, STENCIL - 1, STENCIL - 1);
    for i in 0..n {
        let (s1, w1) = &o.d1[i];
        let (s2, w2) = &o.d2[i];
        let ig = o.inv_gp[i];
        let ig2 = ig * ig;
        let scale = if r[i] == 0.0 { dim } else { 1.0 };
        for (k, wk) in w2.iter().enumerate() {
            m.add(i, s2 + k, wk * ig2 * scale);
        }
        let c1 = if r[i] == 0.0 {
            -o.curv[i] * ig2 * dim
        } else {
            -o.curv[i] * ig2 + (dim - 1.0) * ig / r[i]
        };
        for (k, wk) in w1.iter().enumerate() {
            m.add(i, s1 + k, c1 * wk);
        }
    }
    m
}

/// Factorization of the Sobolev preconditioner: (Delta^2 + 1) in R^4,
/// (-Delta + 1) in R^2, with decay (Dirichlet) rows at the outer boundary.
pub(crate) fn helmholtz_solver(grid: &RadialGrid) -> Arc<(Banded, BandedLu)> {
    grid.helmholtz
        .get_or_init(|| {
            let lap = laplacian_matrix(grid);
            let n = grid.len();
            let mut a = if grid.dimension() == 4 {
                let mut b = lap.matmul(&lap);
                b.add_identity(1.0);
                b
            } else {
                let mut b = lap;
                b.scale(-1.0);
                b.add_identity(1.0);
                b
            };
            // pin the outer boundary to zero (fields are required to decay)
            let pinned = if grid.dimension() == 4 { 2 } else { 1 };
            for i in n - pinned..n {
                for j in i.saturating_sub(a.kl)..=(i + a.ku).min(n - 1) {
                    a.set(i, j, if i == j { 1.0 } else { 0.0 });
                }
            }
            let lu = a.clone().lu().expect("helmholtz operator is nonsingular");
            Arc::new((a, lu))
        })
        .clone()
}

/// Solve (Delta^2 + 1) g = f (R^4) or (-Delta + 1) g = f (R^2) with decay
/// boundary conditions, plus iterative refinement (the factored fourth-order
/// operator is ill-conditioned enough on fine grids that the raw solve loses
/// digits). Used as the gradient preconditioner and by the ground-state
/// fixed point.
pub fn helmholtz_solve(grid: &RadialGrid, f: &[f64]) -> Vec<f64> {
    let pair = helmholtz_solver(grid);
    let (a, lu) = (&pair.0, &pair.1);
    let n = grid.len();
    let pinned = if grid.dimension() == 4 { 2 } else { 1 };
    let mut rhs = f.to_vec();
    for v in rhs[n - pinned..].iter_mut() {
        *v = 0.0;
    }
    let mut x = lu.solve(&rhs);
    for _ in 0..2 {
        let ax = a.matvec(&x);
        let res: Vec<f64> = rhs.iter().zip(&ax).map(|(b, v)| b - v).collect();
        let dx = lu.solve(&res);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridMapping;

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn laplacian_of_r2_is_2n() {
        for &(dim, want) in &[(4usize, 8.0f64), (2, 4.0)] {
            let g = RadialGrid::build(dim, 5.0, 64, GridMapping::Uniform).unwrap();
            let u: Vec<f64> = g.nodes().iter().map(|r| r * r).collect();
            let lap = laplacian_values(&g, &u);
            for (i, v) in lap.iter().enumerate() {
                assert!((v - want).abs() < 1e-9, "dim {dim} node {i}: {v}");
            }
        }
    }

    #[test]
    fn laplacian_of_gaussian_matches_closed_form() {
        // Delta e^{-r^2/2} = (r^2 - n) e^{-r^2/2}
        for &dim in &[4usize, 2] {
            let g = RadialGrid::build(dim, 10.0, 512, GridMapping::stretched_default()).unwrap();
            let u: Vec<f64> = g.nodes().iter().map(|r| (-r * r / 2.0).exp()).collect();
            let lap = laplacian_values(&g, &u);
            for (i, r) in g.nodes().iter().enumerate() {
                let exact = (r * r - dim as f64) * (-r * r / 2.0).exp();
                let tol = 1e-6 * exact.abs().max(1e-3);
                assert!(
                    (lap[i] - exact).abs() < tol,
                    "dim {dim} r={r}: {} vs {exact}",
                    lap[i]
                );
            }
        }
    }

    #[test]
    fn bilaplacian_of_r4_is_192_and_r2_vanishes() {
        let g = RadialGrid::build(4, 4.0, 96, GridMapping::Uniform).unwrap();
        let u4: Vec<f64> = g.nodes().iter().map(|r| r.powi(4)).collect();
        let b4 = bilaplacian_values(&g, &u4);
        let u2: Vec<f64> = g.nodes().iter().map(|r| r * r).collect();
        let b2 = bilaplacian_values(&g, &u2);
        for i in 0..g.len() {
            assert!((b4[i] - 192.0).abs() < 1e-5, "node {i}: {}", b4[i]);
            assert!(b2[i].abs() < 1e-6, "node {i}: {}", b2[i]);
        }
    }

    #[test]
    fn bilaplacian_equals_composition_exactly() {
        let g = RadialGrid::build(4, 8.0, 128, GridMapping::stretched_default()).unwrap();
        let u: Vec<f64> = g.nodes().iter().map(|r| (1.0 + r * r).recip()).collect();
        let blap = bilaplacian_values(&g, &u);
        let comp = laplacian_values(&g, &laplacian_values(&g, &u));
        assert_eq!(max_abs_diff(&blap, &comp), 0.0);
    }

    #[test]
    fn laplacian_matrix_matches_apply() {
        let g = RadialGrid::build(4, 6.0, 80, GridMapping::stretched_default()).unwrap();
        let u: Vec<f64> = g
            .nodes()
            .iter()
            .map(|r| (-r * r / 3.0).exp() * (1.0 + r * r))
            .collect();
        let direct = laplacian_values(&g, &u);
        let via_matrix = laplacian_matrix(&g).matvec(&u);
        assert!(max_abs_diff(&direct, &via_matrix) < 1e-9);
    }

    #[test]
    fn helmholtz_solve_recovers_manufactured_solution() {
        // g = e^{-r^2}: (Delta^2 + 1) g = (16 r^4 - 96 r^2 + 97) e^{-r^2} in R^4
        let g4 = RadialGrid::build(4, 12.0, 768, GridMapping::stretched_default()).unwrap();
        let f: Vec<f64> = g4
            .nodes()
            .iter()
            .map(|r| {
                let r2 = r * r;
                (16.0 * r2 * r2 - 96.0 * r2 + 97.0) * (-r2).exp()
            })
            .collect();
        let sol = helmholtz_solve(&g4, &f);
        for (i, r) in g4.nodes().iter().enumerate() {
            let exact = (-r * r).exp();
            assert!(
                (sol[i] - exact).abs() < 5e-7,
                "r={r}: {} vs {exact}",
                sol[i]
            );
        }
        // R^2: (-Delta + 1) e^{-r^2/2} = (3 - r^2) e^{-r^2/2}
        let g2 = RadialGrid::build(2, 12.0, 768, GridMapping::stretched_default()).unwrap();
        let f2: Vec<f64> = g2
            .nodes()
            .iter()
            .map(|r| (3.0 - r * r) * (-r * r / 2.0).exp())
            .collect();
        let sol2 = helmholtz_solve(&g2, &f2);
        for (i, r) in g2.nodes().iter().enumerate() {
            let exact = (-r * r / 2.0).exp();
            assert!((sol2[i] - exact).abs() < 1e-8, "r={r}");
        }
    }

    #[test]
    fn annulus_grid_handles_singular_profiles() {
        let g = RadialGrid::build_annulus(4, 0.05, 2.0, 128).unwrap();
        // Delta (1/r^2) = 0 away from the origin in R^4
        let u: Vec<f64> = g.nodes().iter().map(|r| r.powi(-2)).collect();
        let lap = laplacian_values(&g, &u);
        for (i, r) in g.nodes().iter().enumerate() {
            if *r >= 0.08 && *r <= 1.8 {
                assert!(lap[i].abs() < 1e-7, "r={r}: {}", lap[i]);
            }
        }
    }
}
