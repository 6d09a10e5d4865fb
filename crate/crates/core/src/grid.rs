//! Discrete radial grids on R^2 and R^4.
//!
//! A grid carries strictly increasing radii together with quadrature weights
//! that absorb the surface measure and the r^(n-1) Jacobian, so that
//! `sum_i w_i f(r_i)` approximates the full volume integral of a radial f.
//! Weights come from product integration: on each node interval the integrand
//! is replaced by its local cubic interpolant and integrated exactly against
//! r^(n-1) dr (Gauss-Legendre on the polynomial integrand). This makes the
//! total measure of the grid exact to rounding for any node placement, and
//! the rule fourth-order accurate for smooth profiles.

use std::sync::{Arc, OnceLock};

use crate::banded::{Banded, BandedLu};
use crate::error::{Error, Result};
use crate::operators::DiffOps;

/// Surface measure of the unit sphere S^{n-1} in R^n for n = 2, 4.
pub fn surface_measure(dimension: usize) -> f64 {
    match dimension {
        2 => 2.0 * std::f64::consts::PI,
        4 => 2.0 * std::f64::consts::PI * std::f64::consts::PI,
        _ => panic!("surface_measure: dimension {dimension} unsupported"),
    }
}

/// Node placement rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridMapping {
    /// Equispaced radii on [0, r_max].
    Uniform,
    /// sinh-graded radii clustering near the origin; `strength` controls the
    /// ratio of outer to inner spacing (~e^strength).
    Stretched { strength: f64 },
    /// Geometrically spaced radii on an annulus [r_min, r_max], r_min > 0.
    LogAnnulus,
}

impl GridMapping {
    pub fn stretched_default() -> Self {
        GridMapping::Stretched { strength: 4.0 }
    }
}

#[derive(Debug)]
pub struct RadialGrid {
    dimension: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    r_min: f64,
    r_max: f64,
    mapping: GridMapping,
    pub(crate) ops: OnceLock<Arc<DiffOps>>,
    pub(crate) helmholtz: OnceLock<Arc<(Banded, BandedLu)>>,
}

impl Clone for RadialGrid {
    fn clone(&self) -> Self {
        RadialGrid {
            dimension: self.dimension,
            nodes: self.nodes.clone(),
            weights: self.weights.clone(),
            r_min: self.r_min,
            r_max: self.r_max,
            mapping: self.mapping,
            ops: OnceLock::new(),
            helmholtz: OnceLock::new(),
        }
    }
}

impl RadialGrid {
    /// Ball grid [0, r_max] with `node_count` nodes (first node at r = 0).
    pub fn build(
        dimension: usize,
        r_max: f64,
        node_count: usize,
        mapping: GridMapping,
    ) -> Result<Arc<RadialGrid>> {
        if dimension != 2 && dimension != 4 {
            return Err(Error::InvalidDimension(dimension));
        }
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::param(
                "r_max",
                format!("must be positive, got {r_max}"),
            ));
        }
        if node_count < 16 {
            return Err(Error::GridTooCoarse {
                needed: 16,
                got: node_count,
            });
        }
        let n = node_count;
        let nodes: Vec<f64> = match mapping {
            GridMapping::Uniform => (0..n).map(|i| r_max * i as f64 / (n - 1) as f64).collect(),
            GridMapping::Stretched { strength } => {
                if !(strength > 0.0) {
                    return Err(Error::param("strength", "must be positive"));
                }
                let d = strength.sinh();
                (0..n)
                    .map(|i| r_max * (strength * i as f64 / (n - 1) as f64).sinh() / d)
                    .collect()
            }
            GridMapping::LogAnnulus => {
                return Err(Error::param("mapping", "LogAnnulus requires build_annulus"))
            }
        };
        Self::finish(dimension, nodes, 0.0, r_max, mapping)
    }

    /// Annulus grid [r_min, r_max], r_min > 0, geometrically spaced. Used for
    /// residual checks of profiles singular at the origin.
    pub fn build_annulus(
        dimension: usize,
        r_min: f64,
        r_max: f64,
        node_count: usize,
    ) -> Result<Arc<RadialGrid>> {
        if dimension != 2 && dimension != 4 {
            return Err(Error::InvalidDimension(dimension));
        }
        if !(r_min > 0.0 && r_max > r_min) {
            return Err(Error::param("r_min/r_max", "need 0 < r_min < r_max"));
        }
        if node_count < 16 {
            return Err(Error::GridTooCoarse {
                needed: 16,
                got: node_count,
            });
        }
        let n = node_count;
        let q = (r_max / r_min).ln();
        let nodes: Vec<f64> = (0..n)
            .map(|i| r_min * (q * i as f64 / (n - 1) as f64).exp())
            .collect();
        Self::finish(dimension, nodes, r_min, r_max, GridMapping::LogAnnulus)
    }

    fn finish(
        dimension: usize,
        nodes: Vec<f64>,
        r_min: f64,
        r_max: f64,
        mapping: GridMapping,
    ) -> Result<Arc<RadialGrid>> {
        let weights = product_weights(dimension, &nodes)?;
        Ok(Arc::new(RadialGrid {
            dimension,
            nodes,
            weights,
            r_min,
            r_max,
            mapping,
            ops: OnceLock::new(),
            helmholtz: OnceLock::new(),
        }))
    }

    /// New grid with all radii scaled by `factor` (weights scale by factor^n).
    pub fn scale_radii(&self, factor: f64) -> Result<Arc<RadialGrid>> {
        if !(factor > 0.0) {
            return Err(Error::param("factor", "must be positive"));
        }
        let fn_pow = factor.powi(self.dimension as i32);
        Ok(Arc::new(RadialGrid {
            dimension: self.dimension,
            nodes: self.nodes.iter().map(|r| r * factor).collect(),
            weights: self.weights.iter().map(|w| w * fn_pow).collect(),
            r_min: self.r_min * factor,
            r_max: self.r_max * factor,
            mapping: self.mapping,
            ops: OnceLock::new(),
            helmholtz: OnceLock::new(),
        }))
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn r_min(&self) -> f64 {
        self.r_min
    }
    pub fn r_max(&self) -> f64 {
        self.r_max
    }
    pub fn mapping(&self) -> GridMapping {
        self.mapping
    }
    pub fn includes_origin(&self) -> bool {
        self.r_min == 0.0
    }

    /// Analytic metric factors of the node map r = g(s) on the uniform
    /// parameter s in [0, 1]: (g'(s_i), g''(s_i)/g'(s_i)).
    pub(crate) fn metric_factors(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.nodes.len();
        let mut gp = Vec::with_capacity(n);
        let mut curv = Vec::with_capacity(n);
        match self.mapping {
            GridMapping::Uniform => {
                let span = self.r_max - self.r_min;
                for _ in 0..n {
                    gp.push(span);
                    curv.push(0.0);
                }
            }
            GridMapping::Stretched { strength } => {
                let d = strength.sinh();
                for i in 0..n {
                    let s = i as f64 / (n - 1) as f64;
                    gp.push(self.r_max * strength * (strength * s).cosh() / d);
                    // g'' / g' = strength * tanh(strength * s)
                    curv.push(strength * (strength * s).tanh());
                }
            }
            GridMapping::LogAnnulus => {
                let q = (self.r_max / self.r_min).ln();
                for i in 0..n {
                    // r = r_min e^{q s}: g' = q r, g''/g' = q
                    gp.push(q * self.nodes[i]);
                    curv.push(q);
                }
            }
        }
        (gp, curv)
    }

    /// Total measure carried by the weights (= omega_{n-1} (r_max^n - r_min^n)/n).
    pub fn total_measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Quadrature of a sampled radial integrand.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.weights.len());
        self.weights
            .iter()
            .zip(values.iter())
            .map(|(w, v)| w * v)
            .sum()
    }
}

/// 8-point Gauss-Legendre on [-1, 1]; exact through polynomial degree 15.
pub(crate) const GL8: [(f64, f64); 8] = [
    (-9.60289856497536176e-01, 1.01228536290376689e-01),
    (-7.96666477413626728e-01, 2.22381034453374343e-01),
    (-5.25532409916328991e-01, 3.13706645877887047e-01),
    (-1.83434642495649780e-01, 3.62683783378361768e-01),
    (1.83434642495649780e-01, 3.62683783378361768e-01),
    (5.25532409916328991e-01, 3.13706645877887047e-01),
    (7.96666477413626728e-01, 2.22381034453374343e-01),
    (9.60289856497536176e-01, 1.01228536290376689e-01),
];

/// 16-point Gauss-Legendre on [-1, 1].
pub(crate) const GL16: [(f64, f64); 16] = [
    (-9.89400934991649939e-01, 2.71524594117540374e-02),
    (-9.44575023073232600e-01, 6.22535239386477063e-02),
    (-8.65631202387831755e-01, 9.51585116824925914e-02),
    (-7.55404408355002999e-01, 1.24628971255534030e-01),
    (-6.17876244402643771e-01, 1.49595988816576764e-01),
    (-4.58016777657227370e-01, 1.69156519395002619e-01),
    (-2.81603550779258915e-01, 1.82603415044923612e-01),
    (-9.50125098376374544e-02, 1.89450610455068585e-01),
    (9.50125098376374544e-02, 1.89450610455068585e-01),
    (2.81603550779258915e-01, 1.82603415044923612e-01),
    (4.58016777657227370e-01, 1.69156519395002619e-01),
    (6.17876244402643771e-01, 1.49595988816576764e-01),
    (7.55404408355002999e-01, 1.24628971255534030e-01),
    (8.65631202387831755e-01, 9.51585116824925914e-02),
    (9.44575023073232600e-01, 6.22535239386477063e-02),
    (9.89400934991649939e-01, 2.71524594117540374e-02),
];

/// Product-integration weights against omega_{n-1} r^{n-1} dr: on each
/// interval the four surrounding nodes supply a cubic interpolant whose
/// Lagrange basis is integrated exactly against the measure.
fn product_weights(dimension: usize, nodes: &[f64]) -> Result<Vec<f64>> {
    let n = nodes.len();
    let omega = surface_measure(dimension);
    let p = (dimension - 1) as i32;
    let mut w = vec![0.0f64; n];
    for j in 0..n - 1 {
        let (a, b) = (nodes[j], nodes[j + 1]);
        if !(b > a) {
            return Err(Error::param("nodes", "radii must be strictly increasing"));
        }
        // Stencil choice: centered on the interval, but shifted so the first
        // and last nodes never sit outside their stencil's interior span --
        // exterior Lagrange lobes against the r^{n-1} measure would otherwise
        // push the endpoint weights negative.
        let s = match j {
            0 => 0,
            1 => 1,
            _ if j == n - 2 => n - 4,
            _ if j == n - 3 => n - 5,
            _ => (j - 1).min(n - 4),
        };
        let xs = [nodes[s], nodes[s + 1], nodes[s + 2], nodes[s + 3]];
        // integrate each cubic Lagrange basis against r^p dr over [a, b]
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (t, gw) in GL8.iter() {
            let r = mid + half * t;
            let meas = gw * half * r.powi(p) * omega;
            for m in 0..4 {
                let mut l = 1.0;
                for k in 0..4 {
                    if k != m {
                        l *= (r - xs[k]) / (xs[m] - xs[k]);
                    }
                }
                w[s + m] += meas * l;
            }
        }
    }
    if w.iter().any(|&wi| !(wi > 0.0) || !wi.is_finite()) {
        return Err(Error::param(
            "weights",
            "quadrature weights not positive; node distribution too irregular",
        ));
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_ball_volumes_exact() {
        // |B_1| in R^4 = pi^2/2, unit disc area = pi
        for &n in &[16usize, 33, 100, 257] {
            let g4 = RadialGrid::build(4, 1.0, n, GridMapping::Uniform).unwrap();
            assert!(
                (g4.total_measure() - PI * PI / 2.0).abs() < 1e-10 * PI * PI / 2.0,
                "n={n}"
            );
            let g2 = RadialGrid::build(2, 1.0, n, GridMapping::Uniform).unwrap();
            assert!((g2.total_measure() - PI).abs() < 1e-10 * PI);
        }
        // stretched grids keep the identity by construction
        for &s in &[2.0, 6.0, 10.0] {
            let g = RadialGrid::build(4, 7.5, 64, GridMapping::Stretched { strength: s }).unwrap();
            let exact = PI * PI / 2.0 * 7.5f64.powi(4);
            assert!((g.total_measure() - exact).abs() < 1e-10 * exact);
        }
        let ga = RadialGrid::build_annulus(4, 0.05, 1.0, 64).unwrap();
        let exact = PI * PI / 2.0 * (1.0 - 0.05f64.powi(4));
        assert!((ga.total_measure() - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn gaussian_integral_converges_fast() {
        // int_{R^4} e^{-r^2} dx = pi^2
        let exact = PI * PI;
        let mut prev_err = f64::INFINITY;
        for &n in &[128usize, 256, 512, 2048] {
            let g = RadialGrid::build(4, 12.0, n, GridMapping::stretched_default()).unwrap();
            let vals: Vec<f64> = g.nodes().iter().map(|r| (-r * r).exp()).collect();
            let err = (g.integrate(&vals) - exact).abs() / exact;
            assert!(err < prev_err || err < 1e-12, "n={n} err={err:.3e}");
            prev_err = err;
        }
        assert!(prev_err < 1e-8, "final rel err {prev_err:.3e}");
    }

    #[test]
    fn gaussian_moments_r2() {
        // int_{R^2} e^{-r^2} dx = pi, int r^2 e^{-r^2} dx = pi
        let g = RadialGrid::build(2, 12.0, 2048, GridMapping::stretched_default()).unwrap();
        let v0: Vec<f64> = g.nodes().iter().map(|r| (-r * r).exp()).collect();
        let v2: Vec<f64> = g.nodes().iter().map(|r| r * r * (-r * r).exp()).collect();
        assert!((g.integrate(&v0) - PI).abs() < 1e-9 * PI);
        assert!((g.integrate(&v2) - PI).abs() < 1e-9 * PI);
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(RadialGrid::build(3, 1.0, 64, GridMapping::Uniform).is_err());
        assert!(RadialGrid::build(4, -1.0, 64, GridMapping::Uniform).is_err());
        assert!(RadialGrid::build(4, 1.0, 8, GridMapping::Uniform).is_err());
        assert!(RadialGrid::build_annulus(4, 0.0, 1.0, 64).is_err());
    }

    #[test]
    fn nodes_strictly_increasing_and_weights_positive() {
        let g = RadialGrid::build(4, 20.0, 200, GridMapping::Stretched { strength: 8.0 }).unwrap();
        for i in 1..g.len() {
            assert!(g.nodes()[i] > g.nodes()[i - 1]);
        }
        assert!(g.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn scale_radii_scales_measure_exactly() {
        let g = RadialGrid::build(4, 3.0, 64, GridMapping::stretched_default()).unwrap();
        let s = g.scale_radii(2.5).unwrap();
        assert!((s.total_measure() - g.total_measure() * 2.5f64.powi(4)).abs() < 1e-9);
        assert_eq!(s.r_max(), 7.5);
    }
}
