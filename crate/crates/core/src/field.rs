//! Radial fields: samples of a radial profile on a grid, with the norms and
//! functionals the variational experiments are built from.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::operators::{laplacian_values, radial_derivative};

/// Hard cap on exponential arguments; beyond this the functional fails
/// loudly instead of returning infinity.
pub const EXP_ARG_LIMIT: f64 = 700.0;

/// Parameters of the functional integral(exp(beta u^2) - 1 - alpha u^2).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FunctionalSpec {
    pub beta: f64,
    pub alpha: f64,
    pub dimension: usize,
}

/// Critical exponent coefficient: 32 pi^2 on R^4 (Adams), 4 pi on R^2
/// (Trudinger-Moser).
pub fn critical_constant(dimension: usize) -> f64 {
    let pi = std::f64::consts::PI;
    match dimension {
        4 => 32.0 * pi * pi,
        2 => 4.0 * pi,
        _ => panic!("critical_constant: dimension {dimension} unsupported"),
    }
}

impl FunctionalSpec {
    pub fn new(beta: f64, alpha: f64, dimension: usize) -> Result<Self> {
        if dimension != 2 && dimension != 4 {
            return Err(Error::InvalidDimension(dimension));
        }
        if !(beta > 0.0) {
            return Err(Error::param("beta", "must be positive"));
        }
        Ok(FunctionalSpec {
            beta,
            alpha,
            dimension,
        })
    }

    /// Spec at the critical coefficient for the dimension.
    pub fn critical(alpha: f64, dimension: usize) -> Result<Self> {
        Self::new(critical_constant(dimension), alpha, dimension)
    }
}

/// Value of the exponential functional plus a certified bound on the mass
/// beyond the truncation radius.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ExpFunctionalValue {
    pub value: f64,
    pub tail_bound: f64,
}

#[derive(Debug, Clone)]
pub struct RadialField {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl RadialField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::param(
                "values",
                format!("length {} != grid size {}", values.len(), grid.len()),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "field construction",
            });
        }
        Ok(RadialField { grid, values })
    }

    pub fn from_fn(grid: &Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid.clone(), values)
    }

    pub fn zeros(grid: &Arc<RadialGrid>) -> Self {
        RadialField {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            self.grid.clone(),
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        self.map(|v| c * v)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Discrete radial Laplacian of this field.
    pub fn laplacian(&self) -> Result<Self> {
        Self::new(
            self.grid.clone(),
            laplacian_values(&self.grid, &self.values),
        )
    }

    /// Discrete bilaplacian (Laplacian applied twice).
    pub fn bilaplacian(&self) -> Result<Self> {
        let lap = laplacian_values(&self.grid, &self.values);
        Self::new(self.grid.clone(), laplacian_values(&self.grid, &lap))
    }

    /// du/dr samples.
    pub fn radial_derivative(&self) -> Result<Self> {
        Self::new(
            self.grid.clone(),
            radial_derivative(&self.grid, &self.values),
        )
    }

    /// (integral |u|^p dx)^(1/p); p >= 1.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::param("p", "must be >= 1"));
        }
        let s: f64 = self
            .grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v.abs().powf(p))
            .sum();
        if !s.is_finite() {
            return Err(Error::NonFinite { context: "lp_norm" });
        }
        Ok(s.powf(1.0 / p))
    }

    /// integral u^2 dx.
    pub fn l2_norm_sq(&self) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v * v)
            .sum()
    }

    /// integral u^4 dx.
    pub fn l4_norm_4(&self) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v.powi(4))
            .sum()
    }

    /// integral |D u|^2 dx with D = Delta in R^4, D = grad in R^2. This is the
    /// seminorm entering both the Sobolev sphere and the quotient.
    pub fn dnorm_sq(&self) -> Result<f64> {
        let dv = match self.grid.dimension() {
            4 => laplacian_values(&self.grid, &self.values),
            2 => radial_derivative(&self.grid, &self.values),
            d => return Err(Error::InvalidDimension(d)),
        };
        let s: f64 = self
            .grid
            .weights()
            .iter()
            .zip(&dv)
            .map(|(w, v)| w * v * v)
            .sum();
        if !s.is_finite() {
            return Err(Error::NonFinite {
                context: "dnorm_sq",
            });
        }
        Ok(s)
    }

    /// Full Sobolev norm: (||u||_2^2 + ||D u||_2^2)^(1/2), H^2 in R^4 and H^1
    /// in R^2.
    pub fn sobolev_norm(&self) -> Result<f64> {
        Ok((self.l2_norm_sq() + self.dnorm_sq()?).sqrt())
    }

    /// integral (exp(beta u^2) - 1 - alpha u^2) dx over the grid, plus a tail
    /// bound for the truncated exterior, assuming the field keeps decaying at
    /// its fitted exponential rate.
    pub fn exp_functional(&self, spec: &FunctionalSpec) -> Result<ExpFunctionalValue> {
        if spec.dimension != self.grid.dimension() {
            return Err(Error::param("spec", "dimension mismatch with grid"));
        }
        let beta = spec.beta;
        let alpha = spec.alpha;
        let mut value = 0.0;
        for (w, v) in self.grid.weights().iter().zip(&self.values) {
            let arg = beta * v * v;
            if arg > EXP_ARG_LIMIT {
                return Err(Error::Overflow {
                    arg,
                    limit: EXP_ARG_LIMIT,
                });
            }
            // exp_m1 keeps precision when beta u^2 is tiny
            value += w * (arg.exp_m1() - alpha * v * v);
        }
        if !value.is_finite() {
            return Err(Error::NonFinite {
                context: "exp_functional",
            });
        }
        let tail_bound = self.exp_tail_bound(spec);
        Ok(ExpFunctionalValue { value, tail_bound })
    }

    /// Exponential decay fit |u(r)| <= c e^{-kappa (r - r_max)} from the outer
    /// nodes; returns (c, kappa), with kappa <= 0 when no decay is seen.
    pub fn decay_fit(&self) -> (f64, f64) {
        let n = self.grid.len();
        let r = self.grid.nodes();
        let lo = (3 * n) / 4;
        let mut pts: Vec<(f64, f64)> = Vec::new();
        for i in lo..n {
            let a = self.values[i].abs();
            if a > 1e-290 {
                pts.push((r[i], a.ln()));
            }
        }
        if pts.len() < 4 {
            return (0.0, f64::INFINITY); // effectively zero tail
        }
        // least squares line ln|u| = b - kappa r
        let m = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        let intercept = (sy - slope * sx) / m;
        let kappa = -slope;
        // ln|u| = intercept + slope r, so |u(r_max)| = exp(intercept + slope r_max)
        let c = (intercept + slope * self.grid.r_max()).exp();
        (c, kappa)
    }

    fn exp_tail_bound(&self, spec: &FunctionalSpec) -> f64 {
        let (c, kappa) = self.decay_fit();
        if kappa == f64::INFINITY || c == 0.0 {
            return 0.0;
        }
        if kappa <= 0.0 {
            return f64::INFINITY; // no decay: tail cannot be certified
        }
        let r_max = self.grid.r_max();
        let u_edge = c;
        let arg_edge = spec.beta * u_edge * u_edge;
        // For r > r_max: exp(b u^2) - 1 - a u^2 <= (b E + |a|) u^2 with
        // E = exp(b u_edge^2) bounding the convexity factor.
        let factor = spec.beta * arg_edge.min(EXP_ARG_LIMIT).exp() + spec.alpha.abs();
        // integral_{r_max}^inf c^2 e^{-2 kappa (r - r_max)} omega r^{n-1} dr
        let n = self.grid.dimension();
        let omega = crate::grid::surface_measure(n);
        let two_k = 2.0 * kappa;
        let mut moment = 0.0;
        // expand (r_max + t)^{n-1}
        let nm1 = n - 1;
        for m in 0..=nm1 {
            let binom = match (nm1, m) {
                (1, 0) | (1, 1) => 1.0,
                (3, 0) | (3, 3) => 1.0,
                (3, 1) | (3, 2) => 3.0,
                _ => 1.0,
            };
            let fact: f64 = (1..=m).map(|k| k as f64).product::<f64>().max(1.0);
            moment += binom * r_max.powi((nm1 - m) as i32) * fact / two_k.powi(m as i32 + 1);
        }
        factor * c * c * omega * moment
    }

    /// Dilation/scale invariant Gagliardo-Nirenberg quotient:
    /// ||u||_4^4 / (||D u||_2^2 ||u||_2^2).
    pub fn gn_quotient(&self) -> Result<f64> {
        let l2 = self.l2_norm_sq();
        let l4 = self.l4_norm_4();
        let d2 = self.dnorm_sq()?;
        if l2 <= 0.0 || d2 <= 0.0 {
            return Err(Error::ZeroField);
        }
        Ok(l4 / (d2 * l2))
    }

    /// Fraction of the L^4 mass inside radius `r0`.
    pub fn l4_mass_fraction_inside(&self, r0: f64) -> f64 {
        let total = self.l4_norm_4();
        if total <= 0.0 {
            return 0.0;
        }
        let inside: f64 = self
            .grid
            .weights()
            .iter()
            .zip(self.grid.nodes())
            .zip(&self.values)
            .filter(|((_, r), _)| **r <= r0)
            .map(|((w, _), v)| w * v.powi(4))
            .sum();
        inside / total
    }

    /// Two-column CSV (r, value).
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,value\n");
        for (r, v) in self.grid.nodes().iter().zip(&self.values) {
            s.push_str(&format!("{:.17e},{:.17e}\n", r, v));
        }
        s
    }
}
