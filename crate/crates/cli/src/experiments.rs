//! The experiment implementations: each takes the typed config and returns a
//! JSON summary plus CSV tables. All computation happens before any file is
//! written, so validation failures leave no partial output behind.

use std::sync::Arc;

use anyhow::{bail, Result};
use serde_json::{json, Value};

use mtlab_core::bubble_green::{
    ball_concentration_bound, default_ladder, fundamental_solution,
    whole_space_concentration_bound, BubbleProfile, FundamentalSolution, GammaQuadOpts, GreenBall,
};
use mtlab_core::constants::{
    bj_from_cj, bk_chain_upper, bk_formula_upper, cj_chain_upper, critical_constants,
    gaussian_quotient_exact, kernel_integral, kernel_integral_quadrature, trial_family_lower_bound,
    young_constant,
};
use mtlab_core::extremal::{
    estimate_m, nonexistence_bound, surpass_check, threshold_sweep, vanishing_witness,
    Classification, MaximizeOpts, SweepOpts,
};
use mtlab_core::field::{critical_constant, FunctionalSpec, RadialField};
use mtlab_core::grid::{GridMapping, RadialGrid};
use mtlab_core::ground_state::{gaussian_init, maximize_quotient, QuotientSolveOpts};

use crate::config::Config;

pub struct RunOutput {
    pub summary: Value,
    pub tables: Vec<(String, String)>,
}

fn grid_from(
    cfg: &Config,
    dimension: usize,
    default_nodes: usize,
    default_rmax: f64,
    default_stretch: f64,
) -> Result<Arc<RadialGrid>> {
    let nodes = cfg.get_usize("nodes", default_nodes)?;
    let rmax = cfg.get_f64("rmax", default_rmax)?;
    let mapping = match cfg.get_str("mapping", "stretched").as_str() {
        "uniform" => GridMapping::Uniform,
        "stretched" => GridMapping::Stretched {
            strength: cfg.get_f64("stretch", default_stretch)?,
        },
        other => bail!("mapping must be uniform|stretched, got {other:?}"),
    };
    Ok(RadialGrid::build(dimension, rmax, nodes, mapping)?)
}

fn csv(header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

pub fn constants(cfg: &Config) -> Result<RunOutput> {
    let j_max = cfg.get_usize("j_max", 5)?;
    let k_max = cfg.get_usize("k_max", 10)?;
    let gammas = cfg.get_f64_list("gamma_list", &[5.0, 10.0, 20.0, 50.0, 100.0, 200.0])?;
    if gammas.is_empty() {
        bail!("gamma_list must be nonempty");
    }
    let trial = trial_family_lower_bound(&gammas)?;
    let gauss = gaussian_quotient_exact(4)?;
    let chain2 = bk_chain_upper(2)?;

    // bounds table: index, lower, upper, method
    let mut table = String::from("index,lower,upper,method\n");
    table.push_str(&format!("2,{gauss:.17e},{chain2:.17e},interval\n"));
    for j in 2..=j_max {
        table.push_str(&format!("{j},,{:.17e},chain\n", bk_chain_upper(j)?));
    }
    for k in 2..=k_max {
        table.push_str(&format!("{k},,{:.17e},formula\n", bk_formula_upper(k)?));
    }
    table.push_str(&format!(
        "2,{:.17e},,trial-family\n",
        trial.bound.lower.unwrap()
    ));

    let youngs: Vec<Value> = [4.0 / 3.0, 1.5, 2.0, 3.0, 4.0]
        .iter()
        .map(|&t| json!({ "t": t, "value": young_constant(t).unwrap() }))
        .collect();
    let kernels: Vec<Value> = [2.0, 3.0, 4.0]
        .iter()
        .map(|&j| {
            json!({
                "j": j,
                "closed_form": kernel_integral(j).unwrap(),
                "quadrature": kernel_integral_quadrature(j).unwrap(),
            })
        })
        .collect();
    let cj: Vec<Value> = (2..=j_max)
        .map(|j| {
            let c = cj_chain_upper(j).unwrap();
            json!({ "j": j, "c_j_upper": c, "b_j_from_c_j": bj_from_cj(j, c).unwrap() })
        })
        .collect();

    let summary = json!({
        "b2_interval": { "lower": gauss, "upper": chain2 },
        "chain_vs_formula_ratio_at_2": bk_formula_upper(2)? / chain2,
        "young_constants": youngs,
        "kernel_integrals": kernels,
        "cj_chain": cj,
        "trial_family": {
            "per_gamma": trial.per_gamma,
            "family_best": trial.family_best,
            "family_limit_estimate": trial.family_limit_estimate,
            "gaussian": trial.gaussian,
            "note": trial.bound.notes,
        },
        "critical_constants": {
            "adams_r4": critical_constants(4, 2)?,
            "moser_trudinger_r2": critical_constants(2, 1)?,
        },
    });
    Ok(RunOutput {
        summary,
        tables: vec![("bounds.csv".into(), table)],
    })
}

pub fn ground_state(cfg: &Config) -> Result<RunOutput> {
    let dimension = cfg.get_usize("dimension", 4)?;
    let grid = grid_from(cfg, dimension, 2048, 14.0, 2.0)?;
    let init = gaussian_init(&grid)?;
    let gs = maximize_quotient(
        dimension,
        &grid,
        &init,
        &QuotientSolveOpts::for_dimension(dimension),
    )?;
    let summary = json!({
        "dimension": dimension,
        "quotient": gs.quotient,
        "el_residual": gs.el_residual,
        "el_residual_relative": gs.el_residual / gs.profile.max_abs(),
        "rescale_mu": gs.rescale_mu,
        "rescale_lambda": gs.rescale_lambda,
        "iterations": gs.iterations,
        "reference": {
            "gaussian_quotient": gaussian_quotient_exact(dimension)?,
            "chain_upper_r4": if dimension == 4 { Some(bk_chain_upper(2)?) } else { None },
        },
    });
    Ok(RunOutput {
        summary,
        tables: vec![("profile.csv".into(), gs.profile.to_csv())],
    })
}

pub fn bubble(cfg: &Config) -> Result<RunOutput> {
    let mass_grid = RadialGrid::build(
        4,
        cfg.get_f64("mass_rmax", 40.0)?,
        cfg.get_usize("mass_nodes", 2048)?,
        GridMapping::Stretched { strength: 4.0 },
    )?;
    let mass = BubbleProfile.mass(&mass_grid)?;
    let grid = grid_from(cfg, 4, 2048, 12.0, 2.0)?;
    let (lo, hi) = (
        cfg.get_f64("window_lo", 0.1)?,
        cfg.get_f64("window_hi", 10.0)?,
    );
    let residual_sup = BubbleProfile.pde_residual_sup(&grid, lo, hi)?;
    let profile = RadialField::from_fn(&grid, |r| BubbleProfile.eval(r))?;
    let mut table = String::from("r,psi,exp_mass_density\n");
    for (r, v) in grid.nodes().iter().zip(profile.values()) {
        table.push_str(&format!(
            "{r:.17e},{v:.17e},{:.17e}\n",
            BubbleProfile.exp_mass_density(*r)
        ));
    }
    let summary = json!({
        "mass": mass,
        "mass_error": (mass - 1.0).abs(),
        "residual_sup": residual_sup,
        "residual_window": [lo, hi],
    });
    Ok(RunOutput {
        summary,
        tables: vec![("profile.csv".into(), table)],
    })
}

fn build_green(cfg: &Config) -> Result<FundamentalSolution> {
    let lo = cfg.get_f64("ladder_min", 1e-4)?;
    let hi = cfg.get_f64("ladder_max", 30.0)?;
    let count = cfg.get_usize("ladder_count", 1600)?;
    let ladder = default_ladder(lo, hi, count);
    let opts = GammaQuadOpts {
        resolution: cfg.get_f64("quad_resolution", 1.0)?,
        tol: cfg.get_f64("quad_tol", 1e-8)?,
    };
    Ok(fundamental_solution(&ladder, &opts)?)
}

pub fn green(cfg: &Config) -> Result<RunOutput> {
    let fs = build_green(cfg)?;
    let mut table = String::from("r,gamma,phi,quad_err\n");
    for i in 0..fs.radii().len() {
        let r = fs.radii()[i];
        table.push_str(&format!(
            "{r:.17e},{:.17e},{:.17e},{:.3e}\n",
            fs.gamma_values()[i],
            fs.phi_at(r),
            fs.quad_errors()[i]
        ));
    }
    let a = fs.regular_part_a();
    let gb = GreenBall::new(1.0)?;
    let summary = json!({
        "regular_part_a": a,
        "d_nc": whole_space_concentration_bound(a),
        "ball_bound_r1": ball_concentration_bound(1.0)?,
        "ball_regular_part_r1": gb.regular_part_at_0(),
        "log_decay_slope_0p5_to_4p5": fs.log_decay_slope(0.5, 4.5),
        "phi_at_1e3": fs.phi_at(1e-3),
    });
    Ok(RunOutput {
        summary,
        tables: vec![("gamma.csv".into(), table)],
    })
}

pub fn test_function(cfg: &Config) -> Result<RunOutput> {
    let eps_list = cfg.get_f64_list("eps_list", &[1e-2, 1e-3])?;
    if eps_list.is_empty() {
        bail!("eps_list must be nonempty");
    }
    let alpha = cfg.get_f64("alpha", 206.0)?;
    let fs = build_green(cfg)?;
    let grid = grid_from(cfg, 4, 4096, 15.0, 10.0)?;
    let mut rows = Vec::new();
    let mut tables = Vec::new();
    for (i, &eps) in eps_list.iter().enumerate() {
        let rep = surpass_check(eps, alpha, &fs, &grid)?;
        let (_, phi) = mtlab_core::extremal::build_test_function(eps, &fs, &grid)?;
        tables.push((format!("test_function_{i}.csv"), phi.to_csv()));
        rows.push(json!({
            "epsilon": eps,
            "alpha": alpha,
            "c": rep.params.c,
            "a": rep.params.a,
            "b": rep.params.b,
            "l": rep.params.l,
            "interface_radius": rep.params.interface_radius,
            "sobolev_norm_deviation": (phi.sobolev_norm()? - 1.0).abs(),
            "c_equation_discrepancy": rep.params.c_equation_discrepancy,
            "c_equation_scale": 1.0 / (eps.ln() * eps.ln()),
            "derivative_jump": rep.params.derivative_jump,
            "value": rep.value,
            "bound": rep.bound,
            "margin": rep.margin,
        }));
    }
    let summary = json!({
        "regular_part_a": fs.regular_part_a(),
        "per_epsilon": rows,
    });
    Ok(RunOutput { summary, tables })
}

fn classification_str(c: Classification) -> &'static str {
    match c {
        Classification::Attained => "attained",
        Classification::VanishingDominated => "vanishing-dominated",
        Classification::Inconclusive => "inconclusive",
    }
}

fn run_sweep(cfg: &Config, dimension: usize) -> Result<(Value, String)> {
    let alphas = cfg.get_f64_list("alpha_list", &[])?;
    if alphas.is_empty() {
        bail!("alpha_list must be a nonempty comma-separated list");
    }
    let default_rmax = if dimension == 4 { 24.0 } else { 40.0 };
    let grid = grid_from(cfg, dimension, 1024, default_rmax, 6.0)?;
    let with_green = dimension == 4 && cfg.get_str("with_green", "true") == "true";
    let fs = if with_green {
        Some(build_green(cfg)?)
    } else {
        None
    };
    let mut maximize = MaximizeOpts::default();
    if fs.is_some() {
        maximize.test_function_eps = Some(cfg.get_f64("trial_eps", 1e-2)?);
    }
    let sweep = threshold_sweep(
        &alphas,
        dimension,
        &SweepOpts {
            maximize,
            grid: grid.clone(),
        },
        fs.as_ref(),
    )?;
    let mut table = String::from(
        "alpha,value,classification,d_nv,d_nc,interior_l4_fraction,peak_height,iterations\n",
    );
    for row in &sweep.rows {
        table.push_str(&format!(
            "{:.17e},{:.17e},{},{:.17e},{},{:.17e},{:.17e},{}\n",
            row.alpha,
            row.value,
            classification_str(row.classification),
            row.d_nv,
            row.d_nc.map_or(String::new(), |v| format!("{v:.17e}")),
            row.interior_l4_fraction,
            row.peak_height,
            row.iterations
        ));
    }
    let rows_json: Vec<Value> = sweep
        .rows
        .iter()
        .map(|r| {
            json!({
                "alpha": r.alpha,
                "value": r.value,
                "classification": classification_str(r.classification),
                "d_nv": r.d_nv,
                "d_nc": r.d_nc,
                "diagnostics": {
                    "interior_l4_fraction": r.interior_l4_fraction,
                    "peak_height": r.peak_height,
                    "iterations": r.iterations,
                },
            })
        })
        .collect();
    let summary = json!({
        "dimension": dimension,
        "critical_constant": critical_constant(dimension),
        "rows": rows_json,
        "threshold_bracket_d_nv": sweep.threshold_bracket,
        "monotone_violations": sweep.monotone_violations,
    });
    Ok((summary, table))
}

pub fn sweep(cfg: &Config) -> Result<RunOutput> {
    let dimension = cfg.get_usize("dimension", 4)?;
    let (summary, table) = run_sweep(cfg, dimension)?;
    Ok(RunOutput {
        summary,
        tables: vec![("sweep.csv".into(), table)],
    })
}

pub fn nonexistence(cfg: &Config) -> Result<RunOutput> {
    let crit = critical_constant(4);
    let alpha = cfg.get_f64("alpha", crit - 1000.0)?;
    let t_grid = cfg.get_f64_list(
        "t_grid",
        &[0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.33, 0.36],
    )?;
    let (m, m_source) = if cfg.has("m") {
        (cfg.get_f64("m", 0.0)?, "config")
    } else {
        let grid = grid_from(cfg, 4, 1024, 24.0, 6.0)?;
        (estimate_m(4, &grid, &MaximizeOpts::default())?, "estimated")
    };
    let nb = nonexistence_bound(alpha, &t_grid, m)?;
    let table = csv(
        "t,f,truncation_bound",
        nb.t_grid
            .iter()
            .zip(nb.f_values.iter().zip(&nb.truncation_bounds))
            .map(|(t, (f, e))| vec![*t, *f, *e]),
    );
    let summary = json!({
        "alpha": alpha,
        "crit_minus_alpha": crit - alpha,
        "m": m,
        "m_source": m_source,
        "t0": nb.t0,
        "alpha_star_star": nb.alpha_star_star,
    });
    Ok(RunOutput {
        summary,
        tables: vec![("f_curve.csv".into(), table)],
    })
}

pub fn tm2d(cfg: &Config) -> Result<RunOutput> {
    let crit = critical_constant(2);
    // ground state and threshold
    let gs_grid = RadialGrid::build(
        2,
        cfg.get_f64("gs_rmax", 14.0)?,
        cfg.get_usize("gs_nodes", 1024)?,
        GridMapping::Stretched { strength: 2.0 },
    )?;
    let init = gaussian_init(&gs_grid)?;
    let gs = maximize_quotient(2, &gs_grid, &init, &QuotientSolveOpts::for_dimension(2))?;
    let threshold = crit * crit * gs.quotient / 2.0;

    // vanishing witness levels
    let witness_alphas = cfg.get_f64_list("witness_alphas", &[2.0, 6.0, 11.0])?;
    let witnesses: Vec<Value> = witness_alphas
        .iter()
        .map(|&alpha| {
            let spec = FunctionalSpec::critical(alpha, 2).unwrap();
            let rep = vanishing_witness(1e-3, &spec, 2048).unwrap();
            json!({
                "alpha": alpha,
                "value": rep.value,
                "d_nv": crit - alpha,
                "relative_gap": (rep.value - (crit - alpha)).abs() / (crit - alpha),
            })
        })
        .collect();

    // sweep across the threshold (fractions of the measured threshold when no
    // explicit list is configured)
    let default_alphas: Vec<f64> = [0.5, 0.8, 1.0, 1.3, 1.8, 3.0]
        .iter()
        .map(|f| crit - f * threshold)
        .rev()
        .collect();
    let mut sweep_cfg_alphas = cfg.get_f64_list("alpha_list", &default_alphas)?;
    sweep_cfg_alphas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if sweep_cfg_alphas.is_empty() {
        bail!("alpha_list must be a nonempty comma-separated list");
    }
    let grid = grid_from(cfg, 2, 1024, 40.0, 6.0)?;
    let sweep = threshold_sweep(
        &sweep_cfg_alphas,
        2,
        &SweepOpts {
            maximize: MaximizeOpts::default(),
            grid,
        },
        None,
    )?;
    let mut table = String::from("alpha,value,classification,d_nv\n");
    for row in &sweep.rows {
        table.push_str(&format!(
            "{:.17e},{:.17e},{},{:.17e}\n",
            row.alpha,
            row.value,
            classification_str(row.classification),
            row.d_nv
        ));
    }
    let rows_json: Vec<Value> = sweep
        .rows
        .iter()
        .map(|r| {
            json!({
                "alpha": r.alpha, "value": r.value, "d_nv": r.d_nv,
                "classification": classification_str(r.classification),
            })
        })
        .collect();
    let summary = json!({
        "critical_constant": crit,
        "b1_estimate": gs.quotient,
        "b1_gaussian_floor": gaussian_quotient_exact(2)?,
        "threshold_crit2_b1_over_2": threshold,
        "threshold_exceeds_critical": threshold > crit,
        "witness_levels": witnesses,
        "sweep_rows": rows_json,
        "beta_star_bracket_d_nv": sweep.threshold_bracket,
        "monotone_violations": sweep.monotone_violations,
    });
    Ok(RunOutput {
        summary,
        tables: vec![("sweep2d.csv".into(), table)],
    })
}
