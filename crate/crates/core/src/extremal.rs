//! The main experiments: constrained maximization of the (sub)critical
//! exponential functionals on the unit Sobolev sphere, the vanishing
//! diagnostics g_v(t) and the explicit vanishing witness, the matched
//! inner/outer test function and its surpass inequality against the
//! concentration level, the nonexistence series F(t), and sweeps over the
//! subtraction coefficient that bracket the attainment threshold.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::bubble_green::{whole_space_concentration_bound, FundamentalSolution};
use crate::constants::{bk_chain_upper_ln, ln_factorial};
use crate::error::{Error, Result};
use crate::field::{critical_constant, FunctionalSpec, RadialField};
use crate::grid::{GridMapping, RadialGrid};
use crate::opt::{sphere_ascent, AscentOpts};

// ---------------------------------------------------------------------------
// scaling family diagnostics

/// g_v(t) along the scaling family v_t: g(0) = 1, and the sign of g'(0)
/// decides whether the vanishing level can be beaten near v.
#[derive(Debug, Clone, serde::Serialize)]
pub struct VanishingCurve {
    pub alpha: f64,
    pub t_grid: Vec<f64>,
    pub g_values: Vec<f64>,
}

fn gv_parts(v: &RadialField, alpha: f64) -> Result<(f64, f64, f64, f64)> {
    let dim = v.grid().dimension();
    let crit = critical_constant(dim);
    if !(alpha < crit) {
        return Err(Error::param("alpha", "need alpha < critical"));
    }
    let n = v.l2_norm_sq();
    let d = v.dnorm_sq()?;
    let f = v.l4_norm_4();
    if n <= 0.0 || d <= 0.0 {
        return Err(Error::ZeroField);
    }
    let kappa = crit * crit / (2.0 * (crit - alpha));
    Ok((n, d, f, kappa))
}

/// g_v(t) = ||v||_2^2/(t ||Dv||_2^2 + ||v||_2^2)
///        + kappa t ||v||_4^4/(t ||Dv||_2^2 + ||v||_2^2)^2,
/// kappa = crit^2 / (2 (crit - alpha)).
pub fn gv_curve(v: &RadialField, alpha: f64, t_grid: &[f64]) -> Result<VanishingCurve> {
    let (n, d, f, kappa) = gv_parts(v, alpha)?;
    let g_values = t_grid
        .iter()
        .map(|&t| {
            let den = t * d + n;
            n / den + kappa * t * f / (den * den)
        })
        .collect();
    Ok(VanishingCurve {
        alpha,
        t_grid: t_grid.to_vec(),
        g_values,
    })
}

/// g_v'(0) = (||Dv||^2/||v||^2) (-1 + kappa ||v||_4^4/(||Dv||^2 ||v||^2)).
pub fn gv_prime_at_zero(v: &RadialField, alpha: f64) -> Result<f64> {
    let (n, d, f, kappa) = gv_parts(v, alpha)?;
    Ok(d / n * (-1.0 + kappa * f / (d * n)))
}

// ---------------------------------------------------------------------------
// vanishing witness

/// Compactly supported bump q(s) = (1 - s^2)^4 on [0, 1]; the witness
/// rescales it to unit L^2 and unit derivative norms.
fn bump(s: f64) -> f64 {
    if s >= 1.0 {
        0.0
    } else {
        let w = 1.0 - s * s;
        w * w * w * w
    }
}

/// Closed-form norms of the unit-radius bump:
/// R^4: ||q||_2^2 = pi^2/90,      ||Delta q||_2^2 = 288 pi^2/35;
/// R^2: ||q||_2^2 = pi/9,         ||grad q||_2^2  = 8 pi/7.
fn bump_norms(dimension: usize) -> (f64, f64) {
    match dimension {
        4 => (PI * PI / 90.0, 288.0 * PI * PI / 35.0),
        _ => (PI / 9.0, 8.0 * PI / 7.0),
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct WitnessReport {
    pub rho: f64,
    pub value: f64,
    pub tail_bound: f64,
    pub sobolev_norm: f64,
    pub support_radius: f64,
    pub grid_r_max: f64,
}

/// The normalized vanishing witness at scale rho, on its own uniform grid:
/// omega(x) = rho^{n/2} eta(rho x), eta = c q(|x|/R0) with unit L^2 and unit
/// derivative norms, normalized in the full Sobolev norm. Its functional
/// value approaches crit - alpha as rho -> 0.
pub fn vanishing_witness(rho: f64, spec: &FunctionalSpec, nodes: usize) -> Result<WitnessReport> {
    if !(rho > 0.0) {
        return Err(Error::param("rho", "must be positive"));
    }
    let dim = spec.dimension;
    let (q2, dq2) = bump_norms(dim);
    // eta = c q(./R0): solve ||eta||_2 = ||D eta||_2 = 1
    let (r0, c) = match dim {
        4 => {
            let r0 = (dq2 / q2).powf(0.25);
            (r0, 1.0 / dq2.sqrt())
        }
        _ => {
            let r0 = (dq2 / q2).sqrt();
            (r0, 1.0 / dq2.sqrt())
        }
    };
    let support = r0 / rho;
    let grid = RadialGrid::build(dim, 1.05 * support, nodes.max(256), GridMapping::Uniform)?;
    witness_on_grid(&grid, rho, spec, r0, c, support)
}

/// Witness built on a caller-provided grid; errors when the support leaves
/// the grid.
pub fn vanishing_witness_on_grid(
    grid: &Arc<RadialGrid>,
    rho: f64,
    spec: &FunctionalSpec,
) -> Result<WitnessReport> {
    if !(rho > 0.0) {
        return Err(Error::param("rho", "must be positive"));
    }
    let dim = spec.dimension;
    let (q2, dq2) = bump_norms(dim);
    let r0 = match dim {
        4 => (dq2 / q2).powf(0.25),
        _ => (dq2 / q2).sqrt(),
    };
    let support = r0 / rho;
    if support > 0.98 * grid.r_max() {
        return Err(Error::param(
            "rho",
            format!(
                "witness support {support:.3} exits the grid (r_max {})",
                grid.r_max()
            ),
        ));
    }
    witness_on_grid(grid, rho, spec, r0, 1.0 / dq2.sqrt(), support)
}

fn witness_on_grid(
    grid: &Arc<RadialGrid>,
    rho: f64,
    spec: &FunctionalSpec,
    r0: f64,
    c: f64,
    support: f64,
) -> Result<WitnessReport> {
    if grid.dimension() != spec.dimension {
        return Err(Error::param("grid", "dimension mismatch with spec"));
    }
    let half_dim = spec.dimension as f64 / 2.0;
    let amp = rho.powf(half_dim) * c;
    let mut w = RadialField::from_fn(grid, |r| amp * bump(rho * r / r0))?;
    // exact normalization on the discrete Sobolev sphere
    let h = w.sobolev_norm()?;
    if h == 0.0 {
        return Err(Error::ZeroField);
    }
    w = w.scaled(1.0 / h)?;
    let out = w.exp_functional(spec)?;
    Ok(WitnessReport {
        rho,
        value: out.value,
        tail_bound: out.tail_bound,
        sobolev_norm: w.sobolev_norm()?,
        support_radius: support,
        grid_r_max: grid.r_max(),
    })
}

// ---------------------------------------------------------------------------
// the matched test function

/// Parameters of the assembled test function phi_eps.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TestFunctionParams {
    pub epsilon: f64,
    /// L = ln(1/eps)
    pub l: f64,
    pub c: f64,
    pub a: f64,
    pub b: f64,
    /// regular-part constant A of the whole-space Green function
    pub regular_part_a: f64,
    /// interface radius L eps between the inner bubble-log profile and the
    /// outer Green-function branch
    pub interface_radius: f64,
    /// measured one-sided derivative jump of the assembled profile at the
    /// interface (diagnostic; the parameter b makes it vanish analytically)
    pub derivative_jump: f64,
    /// |32 pi^2 C^2 - (2 ln(pi/(sqrt6 eps^2)) - 5/3 + 32 pi^2 A)|
    pub c_equation_discrepancy: f64,
}

/// Inner profile numerator (independent of C after the matching constant a
/// is substituted): V(r) = a0 + A + phi(r) + b r^2 - (1/16 pi^2) ln(1 + (pi/sqrt6) r^2/eps^2),
/// with V(L eps) = Gamma(L eps) exactly.
struct TestInner<'a> {
    fs: &'a FundamentalSolution,
    a0: f64,
    b: f64,
    eps: f64,
}

impl TestInner<'_> {
    fn eval(&self, r: f64) -> f64 {
        let c6 = PI / 6.0f64.sqrt();
        let x = r / self.eps;
        self.a0 + self.fs.regular_part_a() + self.fs.phi_at(r) + self.b * r * r
            - (1.0 + c6 * x * x).ln() / (16.0 * PI * PI)
    }
}

/// Assemble phi_eps on the grid. The constant C is solved so the discrete
/// Sobolev norm is exactly 1 (the inner constant a = a0 - C^2 makes the
/// profile a fixed shape divided by C, so C equals the norm of that shape).
pub fn build_test_function(
    epsilon: f64,
    fs: &FundamentalSolution,
    grid: &Arc<RadialGrid>,
) -> Result<(TestFunctionParams, RadialField)> {
    if grid.dimension() != 4 {
        return Err(Error::InvalidDimension(grid.dimension()));
    }
    if !(epsilon > 0.0 && epsilon <= 0.1) {
        return Err(Error::param("epsilon", "need 0 < eps <= 0.1"));
    }
    let l = -(epsilon.ln());
    let r_i = l * epsilon;
    if r_i > 0.05 * grid.r_max() {
        return Err(Error::param(
            "epsilon",
            "inner and outer regions overlap: interface too close to r_max",
        ));
    }
    let inside = grid
        .nodes()
        .iter()
        .filter(|&&r| r > 0.0 && r <= r_i)
        .count();
    if inside < 48 {
        return Err(Error::param(
            "grid",
            format!("only {inside} nodes resolve the inner region r <= {r_i:.3e}"),
        ));
    }
    let c6 = PI / 6.0f64.sqrt();
    let b = -1.0 / (16.0 * PI * PI * l * l * epsilon * epsilon * (1.0 + c6 * l * l));
    let a0 = -(r_i.ln()) / (8.0 * PI * PI) + (1.0 + c6 * l * l).ln() / (16.0 * PI * PI)
        - b * l * l * epsilon * epsilon;
    let inner = TestInner {
        fs,
        a0,
        b,
        eps: epsilon,
    };
    let shape = RadialField::from_fn(grid, |r| {
        if r <= r_i {
            inner.eval(r)
        } else {
            fs.green_at(r)
        }
    })?;
    let c = shape.sobolev_norm()?;
    if !(c > 0.0) {
        return Err(Error::ZeroField);
    }
    let phi_eps = shape.scaled(1.0 / c)?;

    // diagnostics: interface derivative jump and the C^2 equation
    let dr = 1e-6 * r_i;
    let d_in = (inner.eval(r_i) - inner.eval(r_i - dr)) / dr;
    let d_out = (fs.green_at(r_i + dr) - fs.green_at(r_i)) / dr;
    let derivative_jump = (d_out - d_in) / c;
    let a_const = fs.regular_part_a();
    let target = 2.0 * (PI / (6.0f64.sqrt() * epsilon * epsilon)).ln() - 5.0 / 3.0
        + 32.0 * PI * PI * a_const;
    let c_equation_discrepancy = (32.0 * PI * PI * c * c - target).abs();
    Ok((
        TestFunctionParams {
            epsilon,
            l,
            c,
            a: a0 - c * c,
            b,
            regular_part_a: a_const,
            interface_radius: r_i,
            derivative_jump,
            c_equation_discrepancy,
        },
        phi_eps,
    ))
}

/// Value match of the two branches at the interface (should be exact).
pub fn test_function_branch_mismatch(params: &TestFunctionParams, fs: &FundamentalSolution) -> f64 {
    let inner = TestInner {
        fs,
        a0: params.a + params.c * params.c,
        b: params.b,
        eps: params.epsilon,
    };
    (inner.eval(params.interface_radius) - fs.green_at(params.interface_radius)).abs()
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SurpassReport {
    pub epsilon: f64,
    pub alpha: f64,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub params: TestFunctionParams,
}

/// Evaluate the functional on phi_eps and compare against the whole-space
/// concentration level pi^2/6 exp(5/3 + 32 pi^2 A).
pub fn surpass_check(
    epsilon: f64,
    alpha: f64,
    fs: &FundamentalSolution,
    grid: &Arc<RadialGrid>,
) -> Result<SurpassReport> {
    let (params, phi_eps) = build_test_function(epsilon, fs, grid)?;
    let spec = FunctionalSpec::critical(alpha, 4)?;
    let value = phi_eps.exp_functional(&spec)?.value;
    let bound = whole_space_concentration_bound(fs.regular_part_a());
    Ok(SurpassReport {
        epsilon,
        alpha,
        value,
        bound,
        margin: value - bound,
        params,
    })
}

// ---------------------------------------------------------------------------
// nonexistence series

#[derive(Debug, Clone, serde::Serialize)]
pub struct NonexistenceBound {
    pub alpha: f64,
    pub t_grid: Vec<f64>,
    pub f_values: Vec<f64>,
    pub truncation_bounds: Vec<f64>,
    /// Largest verified t with F decreasing on [0, t0].
    pub t0: Option<f64>,
    /// Supplied cap M on the pure exponential part.
    pub m: f64,
    /// M / t0 when a decreasing range exists.
    pub alpha_star_star: Option<f64>,
}

const T_LIMIT: f64 = 0.36787944117144233; // 1/e

/// Series term (32 pi^2)^k / k! * B_k^chain * t^{k-1}, in log space.
fn series_term_ln(k: usize, ln_t: f64) -> f64 {
    let c = 32.0 * PI * PI;
    bk_chain_upper_ln(k).expect("k >= 2") + k as f64 * c.ln() - ln_factorial(k)
        + (k as f64 - 1.0) * ln_t
}

/// Sum_{k>=2} c_k t^{k-1} with a certified geometric tail bound; returns
/// (sum, truncation bound). The term ratio tends to e t < 1.
fn series_sum(t: f64, tol: f64) -> Result<(f64, f64)> {
    if t == 0.0 {
        return Ok((0.0, 0.0));
    }
    let ln_t = t.ln();
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut k = 2usize;
    loop {
        let term = series_term_ln(k, ln_t).exp();
        sum += term;
        let ratio = term / prev;
        // ratios eventually decrease monotonically toward e t; certify the
        // tail once the current ratio is safely below 1
        if k > 8 && ratio < 0.999 && term > 0.0 {
            let tail = term * ratio / (1.0 - ratio);
            if tail < tol {
                return Ok((sum, tail));
            }
        }
        prev = term;
        k += 1;
        if k > 60000 {
            return Err(Error::NonConvergence {
                context: "nonexistence series",
                iterations: k,
            });
        }
    }
}

/// F(t) = (crit - alpha)(1 - t) + (1 - t) sum_{k>=2} c_k B_k t^{k-1} on
/// t in [0, 1/e); evaluation refuses t >= 1/e where the bound degenerates.
pub fn nonexistence_bound(alpha: f64, t_grid: &[f64], m: f64) -> Result<NonexistenceBound> {
    let crit = critical_constant(4);
    if !(alpha < crit) {
        return Err(Error::param("alpha", "need alpha < 32 pi^2"));
    }
    if !(m >= 0.0) {
        return Err(Error::param("m", "must be nonnegative"));
    }
    let mut f_values = Vec::with_capacity(t_grid.len());
    let mut truncation_bounds = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        if !(0.0..T_LIMIT).contains(&t) {
            return Err(Error::param(
                "t_grid",
                format!("t = {t} outside [0, 1/e); the series bound only converges there"),
            ));
        }
        let (s, tail) = series_sum(t, 1e-10)?;
        f_values.push((crit - alpha) * (1.0 - t) + (1.0 - t) * s);
        truncation_bounds.push(tail * (1.0 - t));
    }
    // derivative sign scan on a fine internal grid up to each requested t
    let t_max = t_grid.iter().cloned().fold(0.0f64, f64::max);
    let mut t0 = None;
    if f_prime(alpha, 0.0)? < 0.0 {
        let steps = 400;
        let mut last_ok = 0.0;
        for i in 1..=steps {
            let t = t_max * i as f64 / steps as f64;
            if f_prime(alpha, t)? < 0.0 {
                last_ok = t;
            } else {
                break;
            }
        }
        if last_ok > 0.0 {
            t0 = Some(last_ok);
        }
    }
    let alpha_star_star = t0.map(|t| m / t);
    Ok(NonexistenceBound {
        alpha,
        t_grid: t_grid.to_vec(),
        f_values,
        truncation_bounds,
        t0,
        m,
        alpha_star_star,
    })
}

/// F'(t) = -(crit - alpha) + sum_{k>=2} c_k B_k ((k-1) t^{k-2}(1-t) - t^{k-1}).
fn f_prime(alpha: f64, t: f64) -> Result<f64> {
    let crit = critical_constant(4);
    if t == 0.0 {
        // only the k = 2 term survives: c_2 B_2 (1 - t) at t = 0
        return Ok(-(crit - alpha) + series_term_ln(2, 0.0).exp());
    }
    let ln_t = t.ln();
    let mut acc = -(crit - alpha);
    let mut prev = f64::INFINITY;
    let mut k = 2usize;
    loop {
        let base = series_term_ln(k, ln_t).exp();
        acc += base * ((k as f64 - 1.0) * (1.0 - t) / t - 1.0);
        let ratio = base / prev;
        if k > 8 && ratio < 0.999 {
            let tail = base * ratio / (1.0 - ratio) * (k as f64) / t;
            if tail < 1e-9 {
                return Ok(acc);
            }
        }
        prev = base;
        k += 1;
        if k > 60000 {
            return Err(Error::NonConvergence {
                context: "nonexistence series derivative",
                iterations: k,
            });
        }
    }
}

// ---------------------------------------------------------------------------
// constrained maximization and sweeps

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Attained,
    VanishingDominated,
    Inconclusive,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct MaximizerDiagnostics {
    pub interior_l4_fraction: f64,
    pub peak_height: f64,
    pub peak_radius: f64,
    pub iterations: usize,
    pub trial_values: Vec<(String, f64)>,
}

#[derive(Debug, Clone)]
pub struct MaximizerReport {
    pub spec: FunctionalSpec,
    pub maximizer: RadialField,
    pub value: f64,
    pub classification: Classification,
    pub diagnostics: MaximizerDiagnostics,
}

#[derive(Debug, Clone)]
pub struct MaximizeOpts {
    pub ascent: AscentOpts,
    /// Fractions of the critical coefficient for the subcritical ladder used
    /// when the spec sits exactly at the critical exponent.
    pub beta_ladder: Vec<f64>,
    /// Add a dispersed (witness-shaped) start next to the supplied init.
    pub dispersed_start: bool,
    /// Evaluate the matched test function at this epsilon as a trial point
    /// (needs the fundamental solution).
    pub test_function_eps: Option<f64>,
    /// Radius separating "interior" mass for classification.
    pub interior_radius: f64,
}

impl Default for MaximizeOpts {
    fn default() -> Self {
        MaximizeOpts {
            ascent: AscentOpts {
                max_iter: 2000,
                ..AscentOpts::default()
            },
            beta_ladder: vec![0.96, 0.98, 0.99],
            dispersed_start: true,
            test_function_eps: None,
            interior_radius: 1.0,
        }
    }
}

/// Maximize the functional of `spec` over the unit Sobolev sphere of the
/// grid. At the critical coefficient the maximization runs up a subcritical
/// ladder beta_k -> crit with warm starts and extrapolates; below it a single
/// solve is performed. The classification follows the attained /
/// vanishing-dominated dichotomy with explicit margins.
pub fn maximize_on_sphere(
    spec: &FunctionalSpec,
    grid: &Arc<RadialGrid>,
    init: &RadialField,
    opts: &MaximizeOpts,
    fs: Option<&FundamentalSolution>,
) -> Result<MaximizerReport> {
    let dim = grid.dimension();
    if spec.dimension != dim {
        return Err(Error::param("spec", "dimension mismatch with grid"));
    }
    let crit = critical_constant(dim);
    if spec.beta > crit * (1.0 + 1e-12) {
        return Err(Error::param(
            "beta",
            "must not exceed the critical constant",
        ));
    }
    if init.max_abs() == 0.0 {
        return Err(Error::ZeroField);
    }

    let objective = |beta: f64, alpha: f64| {
        let grid = grid.clone();
        move |vals: &[f64]| -> Option<f64> {
            let f = RadialField::new(grid.clone(), vals.to_vec()).ok()?;
            let s = FunctionalSpec {
                beta,
                alpha,
                dimension: dim,
            };
            f.exp_functional(&s).ok().map(|o| o.value)
        }
    };
    let gradient = |beta: f64, alpha: f64| {
        move |vals: &[f64]| -> Vec<f64> {
            vals.iter()
                .map(|&u| {
                    let arg = (beta * u * u).min(700.0);
                    2.0 * u * (beta * arg.exp() - alpha)
                })
                .collect()
        }
    };

    let mut budget_ok = true;
    let mut starts: Vec<(String, Vec<f64>)> = vec![("init".into(), init.values().to_vec())];
    if opts.dispersed_start {
        if let Ok(w) = dispersed_profile(grid) {
            starts.push(("dispersed".into(), w));
        }
    }

    let at_critical = (spec.beta - crit).abs() <= 1e-12 * crit;
    let mut best: Option<(f64, Vec<f64>, usize)> = None;
    let mut trial_values: Vec<(String, f64)> = Vec::new();

    for (name, start) in &starts {
        let mut u = start.clone();
        let mut iterations = 0usize;
        let mut ladder_vals: Vec<(f64, f64)> = Vec::new();
        if at_critical {
            for &frac in &opts.beta_ladder {
                let beta = crit * frac;
                let res = sphere_ascent(
                    grid,
                    &u,
                    objective(beta, spec.alpha),
                    gradient(beta, spec.alpha),
                    &opts.ascent,
                );
                iterations += res.iterations;
                budget_ok &= res.converged;
                ladder_vals.push((crit - beta, res.value));
                u = res.u;
            }
        } else {
            let res = sphere_ascent(
                grid,
                &u,
                objective(spec.beta, spec.alpha),
                gradient(spec.beta, spec.alpha),
                &opts.ascent,
            );
            iterations += res.iterations;
            budget_ok &= res.converged;
            ladder_vals.push((0.0, res.value));
            u = res.u;
        }
        // value at the target coefficient for the final field, and the
        // ladder extrapolation (monotone in beta, so take the larger)
        let direct = objective(spec.beta, spec.alpha)(&u);
        let extrap = extrapolate_to_zero(&ladder_vals);
        let mut value = ladder_vals.last().unwrap().1;
        if let Some(v) = direct {
            value = value.max(v);
        }
        if let Some(v) = extrap {
            value = value.max(v);
        }
        trial_values.push((format!("ascent-{name}"), value));
        if best.as_ref().map_or(true, |(bv, _, _)| value > *bv) {
            best = Some((value, u, iterations));
        }
    }

    // the matched test function as an explicit trial point
    if let (Some(eps), Some(fs)) = (opts.test_function_eps, fs) {
        if dim == 4 {
            if let Ok((_, phi)) = build_test_function(eps, fs, grid) {
                if let Ok(out) = phi.exp_functional(spec) {
                    trial_values.push((format!("test-function-eps-{eps}"), out.value));
                    if best.as_ref().map_or(true, |(bv, _, _)| out.value > *bv) {
                        let iters = best.as_ref().map_or(0, |b| b.2);
                        best = Some((out.value, phi.values().to_vec(), iters));
                    }
                }
            }
        }
    }

    let (value, u, iterations) = best.expect("at least one start");
    let maximizer = RadialField::new(grid.clone(), u)?;
    let interior_l4 = maximizer.l4_mass_fraction_inside(opts.interior_radius);
    let (peak_radius, peak_height) = peak_of(&maximizer);
    // an exhausted iteration budget is reported, never silently classified
    let classification = if !budget_ok {
        Classification::Inconclusive
    } else {
        classify(
            spec,
            crit,
            value,
            interior_l4,
            peak_radius,
            opts.interior_radius,
            at_critical,
        )
    };
    Ok(MaximizerReport {
        spec: *spec,
        maximizer,
        value,
        classification,
        diagnostics: MaximizerDiagnostics {
            interior_l4_fraction: interior_l4,
            peak_height,
            peak_radius,
            iterations,
            trial_values,
        },
    })
}

/// Witness-shaped dispersed start filling most of the grid.
fn dispersed_profile(grid: &Arc<RadialGrid>) -> Result<Vec<f64>> {
    let dim = grid.dimension();
    let (q2, dq2) = bump_norms(dim);
    let r0 = match dim {
        4 => (dq2 / q2).powf(0.25),
        _ => (dq2 / q2).sqrt(),
    };
    let rho = r0 / (0.9 * grid.r_max());
    let f = RadialField::from_fn(grid, |r| bump(rho * r / r0))?;
    Ok(f.into_values())
}

/// Quadratic (or linear) extrapolation of ladder values to crit - beta = 0.
fn extrapolate_to_zero(pts: &[(f64, f64)]) -> Option<f64> {
    match pts.len() {
        0 => None,
        1 => Some(pts[0].1),
        2 => {
            let (x1, v1) = pts[0];
            let (x2, v2) = pts[1];
            Some(v2 + (v2 - v1) * x2 / (x1 - x2))
        }
        _ => {
            let n = pts.len();
            let (x1, v1) = pts[n - 3];
            let (x2, v2) = pts[n - 2];
            let (x3, v3) = pts[n - 1];
            // Lagrange at 0
            let l1 = (x2 * x3) / ((x1 - x2) * (x1 - x3));
            let l2 = (x1 * x3) / ((x2 - x1) * (x2 - x3));
            let l3 = (x1 * x2) / ((x3 - x1) * (x3 - x2));
            Some(v1 * l1 + v2 * l2 + v3 * l3)
        }
    }
}

fn peak_of(u: &RadialField) -> (f64, f64) {
    let mut best = (0.0, 0.0f64);
    for (r, v) in u.grid().nodes().iter().zip(u.values()) {
        if v.abs() > best.1 {
            best = (*r, v.abs());
        }
    }
    best
}

/// Attained: persistent interior peak and value above crit - alpha by > 5%.
/// Vanishing-dominated: value within 2% of crit - alpha and interior L^4
/// fraction below 0.1. Everything else: inconclusive.
fn classify(
    spec: &FunctionalSpec,
    crit: f64,
    value: f64,
    interior_l4: f64,
    peak_radius: f64,
    interior_radius: f64,
    at_critical: bool,
) -> Classification {
    if !at_critical || spec.alpha >= crit {
        return Classification::Inconclusive;
    }
    let dnv = crit - spec.alpha;
    let excess = (value - dnv) / dnv;
    if excess > 0.05 && peak_radius < interior_radius && interior_l4 >= 0.3 {
        Classification::Attained
    } else if excess.abs() < 0.02 && interior_l4 < 0.1 {
        Classification::VanishingDominated
    } else {
        Classification::Inconclusive
    }
}

// ---------------------------------------------------------------------------
// threshold sweep

#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub value: f64,
    pub classification: Classification,
    pub d_nv: f64,
    pub d_nc: Option<f64>,
    pub interior_l4_fraction: f64,
    pub peak_height: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepResult {
    pub dimension: usize,
    pub rows: Vec<SweepRow>,
    /// [largest crit - alpha classified attained,
    ///  smallest crit - alpha classified vanishing-dominated]
    pub threshold_bracket: Option<(f64, f64)>,
    /// alphas violating the monotone-transfer property (attained must persist
    /// as crit - alpha shrinks)
    pub monotone_violations: Vec<f64>,
}

pub struct SweepOpts {
    pub maximize: MaximizeOpts,
    pub grid: Arc<RadialGrid>,
}

/// Run the critical maximization across sorted alphas and bracket the
/// attainment threshold.
pub fn threshold_sweep(
    alpha_list: &[f64],
    dimension: usize,
    opts: &SweepOpts,
    fs: Option<&FundamentalSolution>,
) -> Result<SweepResult> {
    if alpha_list.is_empty() {
        return Err(Error::param("alpha_list", "must be nonempty"));
    }
    let crit = critical_constant(dimension);
    for w in alpha_list.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::param("alpha_list", "must be strictly increasing"));
        }
    }
    if alpha_list.iter().any(|&a| a >= crit) {
        return Err(Error::param(
            "alpha_list",
            "all alphas must be below critical",
        ));
    }
    let d_nc = fs.map(|f| whole_space_concentration_bound(f.regular_part_a()));
    let init = RadialField::from_fn(&opts.grid, |r| (-r * r / 2.0).exp())?;
    let mut rows = Vec::with_capacity(alpha_list.len());
    for &alpha in alpha_list {
        let spec = FunctionalSpec::critical(alpha, dimension)?;
        let rep = maximize_on_sphere(&spec, &opts.grid, &init, &opts.maximize, fs)?;
        rows.push(SweepRow {
            alpha,
            value: rep.value,
            classification: rep.classification,
            d_nv: crit - alpha,
            d_nc,
            interior_l4_fraction: rep.diagnostics.interior_l4_fraction,
            peak_height: rep.diagnostics.peak_height,
            iterations: rep.diagnostics.iterations,
        });
    }
    // bracket and monotone transfer in terms of d_nv = crit - alpha
    let mut attained_max: Option<f64> = None;
    let mut vanishing_min: Option<f64> = None;
    for row in &rows {
        match row.classification {
            Classification::Attained => {
                attained_max = Some(attained_max.map_or(row.d_nv, |v: f64| v.max(row.d_nv)));
            }
            Classification::VanishingDominated => {
                vanishing_min = Some(vanishing_min.map_or(row.d_nv, |v: f64| v.min(row.d_nv)));
            }
            Classification::Inconclusive => {}
        }
    }
    let threshold_bracket = match (attained_max, vanishing_min) {
        (Some(a), Some(v)) => Some((a, v)),
        _ => None,
    };
    // once attained at some d_nv, every smaller d_nv must not be vanishing
    let mut monotone_violations = Vec::new();
    if let Some(a_max) = attained_max {
        for row in &rows {
            if row.classification == Classification::VanishingDominated && row.d_nv < a_max {
                monotone_violations.push(row.alpha);
            }
        }
    }
    Ok(SweepResult {
        dimension,
        rows,
        threshold_bracket,
        monotone_violations,
    })
}

/// Numerical stand-in for the constant M of the nonexistence argument: the
/// maximized value of the pure exponential part at alpha = crit (where the
/// subtraction removes the quadratic term entirely).
pub fn estimate_m(dimension: usize, grid: &Arc<RadialGrid>, opts: &MaximizeOpts) -> Result<f64> {
    let crit = critical_constant(dimension);
    let spec = FunctionalSpec {
        beta: crit,
        alpha: crit,
        dimension,
    };
    let init = RadialField::from_fn(grid, |r| (-r * r / 2.0).exp())?;
    let rep = maximize_on_sphere(&spec, grid, &init, opts, None)?;
    Ok(rep.value)
}
