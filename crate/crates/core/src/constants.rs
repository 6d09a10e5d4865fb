//! Closed-form and semi-closed-form bounds for the Gagliardo-Nirenberg
//! constants B_k on R^4, the sharp convolution-Young constants feeding the
//! C_j chain, the Adams/Moser critical exponent coefficients, and the
//! two-power scaling infimum.
//!
//! Two distinct upper-bound routes for B_k are kept side by side:
//! `bk_chain_upper` evaluates the Young/Hausdorff-Young chain in closed form
//! (its large-k behaviour tracks (8 pi^2 sqrt(e)/sqrt(k)) (k/32 pi^2)^k and
//! it feeds the nonexistence series), while `bk_formula_upper` evaluates the
//! displayed per-k formula as printed, which is larger by x9.38 at k = 2.
//! Only the chain value reproduces the 32/(729 pi^2) bound for B_2.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::RadialField;
use crate::grid::{RadialGrid, GL16};

/// Method provenance of a constant bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundMethod {
    Chain,
    Formula,
    TrialFamily,
    GroundState,
}

/// A certified numeric interval for a constant, with provenance.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ConstantBound {
    pub k_or_j: usize,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub method: BoundMethod,
    pub notes: String,
}

impl ConstantBound {
    pub fn validate(&self) -> Result<()> {
        if let (Some(l), Some(u)) = (self.lower, self.upper) {
            if l > u {
                return Err(Error::param("bound", format!("lower {l} > upper {u}")));
            }
        }
        for v in [self.lower, self.upper].into_iter().flatten() {
            if !(v > 0.0) {
                return Err(Error::param("bound", "values must be positive"));
            }
        }
        Ok(())
    }
}

/// ln Gamma via the Lanczos approximation (g = 7, 9 terms), ~1e-14 relative.
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

pub(crate) fn ln_factorial(k: usize) -> f64 {
    ln_gamma(k as f64 + 1.0)
}

/// Sharp convolution-Young constant A_t = (t^{1/t} / t'^{1/t'})^{1/2},
/// 1/t + 1/t' = 1.
pub fn young_constant(t: f64) -> Result<f64> {
    if !(t > 1.0) {
        return Err(Error::param("t", format!("need t > 1, got {t}")));
    }
    let tp = t / (t - 1.0);
    Ok((t.powf(1.0 / t) / tp.powf(1.0 / tp)).sqrt())
}

/// integral over R^4 of (16 pi^4 |xi|^4 + 1)^{-j'}, j' = j/(j-1): closed form
/// (j-1)/(32 pi^2) after the substitution u = 16 pi^4 rho^4.
pub fn kernel_integral(j: f64) -> Result<f64> {
    if !(j > 1.0) {
        return Err(Error::param("j", format!("need j > 1, got {j}")));
    }
    Ok((j - 1.0) / (32.0 * PI * PI))
}

/// Same integral by numeric frequency-space quadrature:
/// omega_3 int_0^P rho^3 (16 pi^4 rho^4 + 1)^{-j'} drho on geometric panels,
/// plus the elementary two-term tail beyond P.
pub fn kernel_integral_quadrature(j: f64) -> Result<f64> {
    if !(j > 1.0) {
        return Err(Error::param("j", format!("need j > 1, got {j}")));
    }
    let jp = j / (j - 1.0);
    let c = 16.0 * PI.powi(4);
    let omega = 2.0 * PI * PI;
    let big_p = 50.0f64;
    let mut acc = 0.0;
    let mut a = 0.0f64;
    let mut b = 0.05f64;
    while a < big_p {
        let hi = b.min(big_p);
        let half = 0.5 * (hi - a);
        let mid = 0.5 * (a + hi);
        for (x, w) in GL16.iter() {
            let rho = mid + half * x;
            acc += w * half * rho.powi(3) * (c * rho.powi(4) + 1.0).powf(-jp);
        }
        a = hi;
        b *= 1.6;
    }
    // (c rho^4 + 1)^{-j'} = (c rho^4)^{-j'} (1 - j' (c rho^4)^{-1} + O(rho^-8))
    let tail = c.powf(-jp)
        * (big_p.powf(4.0 - 4.0 * jp) / (4.0 * jp - 4.0)
            - jp / c * big_p.powf(-4.0 * jp) / (4.0 * jp));
    Ok(omega * (acc + tail))
}

/// Upper bound for C_j from the sharp Young / Hausdorff-Young chain:
/// (A_{2j/(2j-1)} A_j / A_{2j})^4 (j'^{1/j'} j^{-1/j})^{1/2} K_j^{1/j'}.
pub fn cj_chain_upper(j: usize) -> Result<f64> {
    if j < 2 {
        return Err(Error::param("j", "need j >= 2"));
    }
    let jf = j as f64;
    let jp = jf / (jf - 1.0);
    let a_factor = (young_constant(2.0 * jf / (2.0 * jf - 1.0))? * young_constant(jf)?
        / young_constant(2.0 * jf)?)
    .powi(4);
    let mid = (jp.powf(1.0 / jp) * jf.powf(-1.0 / jf)).sqrt();
    let ker = kernel_integral(jf)?.powf(1.0 / jp);
    Ok(a_factor * mid * ker)
}

/// B_j = C_j^j j^j / (j-1)^{j-1}.
pub fn bj_from_cj(j: usize, c_j: f64) -> Result<f64> {
    if j < 2 {
        return Err(Error::param("j", "need j >= 2"));
    }
    if !(c_j > 0.0) {
        return Err(Error::param("c_j", "must be positive"));
    }
    let jf = j as f64;
    Ok(c_j.powi(j as i32) * jf.powi(j as i32) / (jf - 1.0).powi(j as i32 - 1))
}

/// ln of the chain upper bound for B_k in closed form; equal to
/// ln bj_from_cj(k, cj_chain_upper(k)) but stable for large k.
pub fn bk_chain_upper_ln(k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::param("k", "need k >= 2"));
    }
    let k = k as f64;
    let c = 32.0 * PI * PI;
    Ok(-(4.0f64.ln())
        + 2.0 * k * (2.0 * k / (2.0 * k - 1.0)).ln()
        + (2.0 * k - 2.0) * ((2.0 * k - 2.0) / (2.0 * k - 1.0)).ln()
        + 0.5 * (k - 1.0) * (k / (k - 1.0)).ln()
        - 0.5 * k.ln()
        + k * (k / c).ln()
        + c.ln())
}

/// Chain upper bound for B_k (log-space internally for k > 20).
pub fn bk_chain_upper(k: usize) -> Result<f64> {
    if k <= 20 {
        bj_from_cj(k, cj_chain_upper(k)?)
    } else {
        Ok(bk_chain_upper_ln(k)?.exp())
    }
}

/// The displayed per-k upper-bound formula for B_k, evaluated as printed:
/// (1/4)(1 + 2k/(2k-1))^{2k} (2(k-1)/(2k-1))^{2k-2} sqrt((k/(k-1))^{k-1})
///   k^{-1/2} (k/(32 pi^2))^k 32 pi^2.
pub fn bk_formula_upper(k: usize) -> Result<f64> {
    Ok(bk_formula_upper_ln(k)?.exp())
}

pub fn bk_formula_upper_ln(k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::param("k", "need k >= 2"));
    }
    let k = k as f64;
    let c = 32.0 * PI * PI;
    Ok(-(4.0f64.ln())
        + 2.0 * k * (1.0 + 2.0 * k / (2.0 * k - 1.0)).ln()
        + (2.0 * k - 2.0) * (2.0 * (k - 1.0) / (2.0 * k - 1.0)).ln()
        + 0.5 * (k - 1.0) * (k / (k - 1.0)).ln()
        - 0.5 * k.ln()
        + k * (k / c).ln()
        + c.ln())
}

/// ln of the large-k envelope (8 pi^2 sqrt(e)/sqrt(k)) (k/32 pi^2)^k.
pub fn bk_asymptotic_ln(k: usize) -> f64 {
    let k = k as f64;
    let c = 32.0 * PI * PI;
    (8.0 * PI * PI).ln() + 0.5 - 0.5 * k.ln() + k * (k / c).ln()
}

/// Exact quotient of the Gaussian trial function: 1/(24 pi^2) on R^4,
/// 1/(2 pi) on R^2 (closed-form moments).
pub fn gaussian_quotient_exact(dimension: usize) -> Result<f64> {
    match dimension {
        4 => Ok(1.0 / (24.0 * PI * PI)),
        2 => Ok(1.0 / (2.0 * PI)),
        d => Err(Error::InvalidDimension(d)),
    }
}

/// Quotient of the trial function (1+r)^{-gamma} on R^4, computed by
/// quadrature on an annulus grid. The Laplacian is supplied analytically:
/// the profile has a corner at the origin (u'(0) = -gamma), so difference
/// stencils across r = 0 do not apply; the weighted integrals converge.
pub fn trial_quotient(gamma: f64) -> Result<f64> {
    if !(gamma > 2.0) {
        return Err(Error::param(
            "gamma",
            format!("need gamma > 2, got {gamma}"),
        ));
    }
    let grid = trial_grid(gamma)?;
    let u = RadialField::from_fn(&grid, |r| (1.0 + r).powf(-gamma))?;
    let lap = RadialField::from_fn(&grid, |r| {
        gamma * (gamma + 1.0) * (1.0 + r).powf(-gamma - 2.0)
            - 3.0 * gamma * (1.0 + r).powf(-gamma - 1.0) / r
    })?;
    let l2 = u.l2_norm_sq();
    let l4 = u.l4_norm_4();
    let d2 = lap.l2_norm_sq();
    Ok(l4 / (d2 * l2))
}

fn trial_grid(gamma: f64) -> Result<Arc<RadialGrid>> {
    // outer radius from the L^2 tail ~ R^{4-2 gamma}/(2 gamma - 4)
    let r_hi = (1e12f64.powf(1.0 / (2.0 * gamma - 4.0))).clamp(60.0, 2e5);
    let r_lo = (1e-7 / gamma).min(1e-8);
    RadialGrid::build_annulus(4, r_lo, r_hi, 4096)
}

/// Closed-form quotient of (1+r)^{-gamma} from Beta-function moments; the
/// independent oracle for `trial_quotient`.
pub fn trial_quotient_closed_form(gamma: f64) -> Result<f64> {
    if !(gamma > 2.0) {
        return Err(Error::param("gamma", "need gamma > 2"));
    }
    let g = gamma;
    let lnb = |s: f64, t: f64| ln_gamma(s) + ln_gamma(t) - ln_gamma(s + t);
    let l2 = lnb(4.0, 2.0 * g - 4.0).exp();
    let l4 = lnb(4.0, 4.0 * g - 4.0).exp();
    let t1 = g * g * (g + 1.0) * (g + 1.0) * lnb(4.0, 2.0 * g).exp();
    let t2 = -6.0 * g * g * (g + 1.0) * lnb(3.0, 2.0 * g).exp();
    let t3 = 9.0 * g * g * lnb(2.0, 2.0 * g).exp();
    // the 2 pi^2 surface factors: l4 / (d2 * l2) picks up 1/(2 pi^2)
    Ok(l4 / ((t1 + t2 + t3) * l2) / (2.0 * PI * PI))
}

/// Outcome of the trial-family sweep augmented with the Gaussian.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TrialFamilyReport {
    pub per_gamma: Vec<(f64, f64)>,
    pub family_best: f64,
    pub family_limit_estimate: f64,
    pub gaussian: f64,
    pub bound: ConstantBound,
}

/// Lower bound for B_2 from the (1+r)^{-gamma} sweep, always augmented by
/// the Gaussian (which attains exactly 1/(24 pi^2)). The pure family limit
/// is recorded for comparison, not asserted: numerically it settles near
/// 1/(36 pi^2), below the Gaussian value.
pub fn trial_family_lower_bound(gamma_list: &[f64]) -> Result<TrialFamilyReport> {
    if gamma_list.is_empty() {
        return Err(Error::param("gamma_list", "must be nonempty"));
    }
    let mut per_gamma = Vec::with_capacity(gamma_list.len());
    for &g in gamma_list {
        per_gamma.push((g, trial_quotient(g)?));
    }
    let family_best = per_gamma.iter().map(|p| p.1).fold(f64::MIN, f64::max);
    // Richardson in 1/gamma on the two largest gammas of the sweep
    let mut sorted = per_gamma.clone();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let n = sorted.len();
    let family_limit_estimate = if n >= 2 {
        let (g1, q1) = sorted[n - 2];
        let (g2, q2) = sorted[n - 1];
        (q2 * g2 - q1 * g1) / (g2 - g1)
    } else {
        sorted[n - 1].1
    };
    let gaussian = gaussian_quotient_exact(4)?;
    let lower = family_best.max(gaussian);
    let bound = ConstantBound {
        k_or_j: 2,
        lower: Some(lower),
        upper: None,
        method: BoundMethod::TrialFamily,
        notes: format!(
            "(1+r)^-gamma sweep best {family_best:.6e}, limit est {family_limit_estimate:.6e}, gaussian {gaussian:.6e}"
        ),
    };
    bound.validate()?;
    Ok(TrialFamilyReport {
        per_gamma,
        family_best,
        family_limit_estimate,
        gaussian,
        bound,
    })
}

/// inf_{s>0} (s^a M + s^{-b} N) and its minimizer
/// s* = (b N / (a M))^{1/(a+b)}.
pub fn lem3_infimum(a: f64, b: f64, m: f64, n: f64) -> Result<(f64, f64)> {
    for (name, v) in [("a", a), ("b", b), ("M", m), ("N", n)] {
        if !(v > 0.0) {
            return Err(Error::param("lem3", format!("{name} must be positive")));
        }
    }
    let s_star = (b * n / (a * m)).powf(1.0 / (a + b));
    let value =
        (a + b) / a * (b / a).powf(-b / (a + b)) * m.powf(b / (a + b)) * n.powf(a / (a + b));
    Ok((s_star, value))
}

/// Critical exponent coefficient beta(n, m) of the Adams inequality
/// (even/odd m), with the first-order path (m = 1) returning the
/// Trudinger-Moser constant alpha_n = n omega_{n-1}^{1/(n-1)}.
pub fn critical_constants(n: usize, m: usize) -> Result<f64> {
    if n < 2 || m == 0 || m >= n {
        return Err(Error::param(
            "n,m",
            format!("need n >= 2, 1 <= m < n; got ({n},{m})"),
        ));
    }
    let nf = n as f64;
    let omega = 2.0 * PI.powf(nf / 2.0) / (ln_gamma(nf / 2.0).exp());
    if m == 1 {
        return Ok(nf * omega.powf(1.0 / (nf - 1.0)));
    }
    let mf = m as f64;
    let p = nf / (nf - mf);
    let inner = if m % 2 == 0 {
        PI.powf(nf / 2.0) * 2.0f64.powf(mf) * ln_gamma(mf / 2.0).exp()
            / ln_gamma((nf - mf) / 2.0).exp()
    } else {
        PI.powf(nf / 2.0) * 2.0f64.powf(mf) * ln_gamma((mf + 1.0) / 2.0).exp()
            / ln_gamma((nf - mf + 1.0) / 2.0).exp()
    };
    Ok(nf / omega * inner.powf(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn young_constants_and_conjugacy() {
        assert!((young_constant(2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((young_constant(4.0 / 3.0).unwrap() - 0.936687074375248).abs() < 1e-12);
        assert!((young_constant(4.0).unwrap() - 1.067592398098351).abs() < 1e-12);
        for t in [4.0 / 3.0, 1.5, 2.0, 3.0, 4.0, 10.0] {
            let tp = t / (t - 1.0);
            let prod = young_constant(t).unwrap() * young_constant(tp).unwrap();
            assert!((prod - 1.0).abs() < 1e-12, "t={t}: {prod}");
        }
        assert!(young_constant(1.0).is_err());
    }

    #[test]
    fn kernel_integral_closed_form_and_quadrature() {
        let k2 = kernel_integral(2.0).unwrap();
        assert!((k2 - 1.0 / (32.0 * PI * PI)).abs() < 1e-18);
        assert!((kernel_integral(3.0).unwrap() - 2.0 / (32.0 * PI * PI)).abs() < 1e-18);
        for j in [2.0, 3.0, 4.0] {
            let q = kernel_integral_quadrature(j).unwrap();
            let c = kernel_integral(j).unwrap();
            assert!((q - c).abs() < 1e-8 * c, "j={j}: {q} vs {c}");
        }
        assert!(kernel_integral(1.0).is_err());
    }

    #[test]
    fn chain_upper_bound_at_j2() {
        // A-factor alone collapses to 16/27
        let af = (young_constant(4.0 / 3.0).unwrap() * young_constant(2.0).unwrap()
            / young_constant(4.0).unwrap())
        .powi(4);
        assert!((af - 16.0 / 27.0).abs() < 1e-13);
        let c2 = cj_chain_upper(2).unwrap();
        let exact = 16.0 / (27.0 * 32.0f64.sqrt() * PI);
        assert!((c2 - exact).abs() < 1e-14, "{c2} vs {exact}");
        let b2 = bj_from_cj(2, c2).unwrap();
        let expect = 32.0 / (729.0 * PI * PI);
        assert!((b2 - expect).abs() < 1e-10 * expect);
        // formula arithmetic sanity
        assert!((bj_from_cj(2, 1.0).unwrap() - 4.0).abs() < 1e-14);
        assert!((bj_from_cj(3, 1.0).unwrap() - 27.0 / 4.0).abs() < 1e-13);
        assert!(cj_chain_upper(1).is_err());
    }

    #[test]
    fn displayed_formula_vs_chain() {
        let f2 = bk_formula_upper(2).unwrap();
        let expect = 2401.0 / (5832.0 * PI * PI);
        assert!((f2 - expect).abs() < 1e-12 * expect, "{f2} vs {expect}");
        let chain2 = bk_chain_upper(2).unwrap();
        let ratio = f2 / chain2;
        assert!((ratio - 2401.0 / 256.0).abs() < 1e-9, "ratio {ratio}");
        // k = 3 formula value: finite, positive, recorded
        assert!(bk_formula_upper(3).unwrap() > 0.0);
        assert!(bk_formula_upper(1).is_err());
    }

    #[test]
    fn chain_bound_tracks_asymptotic() {
        // closed-form ln agrees with the explicit chain where both are stable
        for k in [2usize, 5, 10, 20] {
            let a = bk_chain_upper_ln(k).unwrap();
            let b = bj_from_cj(k, cj_chain_upper(k).unwrap()).unwrap().ln();
            assert!((a - b).abs() < 1e-9, "k={k}: {a} vs {b}");
        }
        let r50 = (bk_chain_upper_ln(50).unwrap() - bk_asymptotic_ln(50)).exp();
        assert!((0.5..2.0).contains(&r50), "k=50 ratio {r50}");
        let r500 = (bk_chain_upper_ln(500).unwrap() - bk_asymptotic_ln(500)).exp();
        assert!((r500 - 1.0).abs() < 0.01, "k=500 ratio {r500}");
    }

    #[test]
    fn trial_quotient_matches_beta_closed_form() {
        for g in [3.0, 6.0, 20.0] {
            let q = trial_quotient(g).unwrap();
            let cf = trial_quotient_closed_form(g).unwrap();
            assert!((q - cf).abs() < 1e-6 * cf, "gamma={g}: {q} vs {cf}");
        }
        // gamma = 3 stays under the chain upper bound for B_2
        let q3 = trial_quotient(3.0).unwrap();
        assert!(q3 > 0.0 && q3 < 32.0 / (729.0 * PI * PI));
        assert!(trial_quotient(2.0).is_err());
    }

    #[test]
    fn trial_family_sweep_certifies_gaussian_floor() {
        let rep = trial_family_lower_bound(&[5.0, 10.0, 20.0, 50.0, 100.0, 200.0]).unwrap();
        let gauss = 1.0 / (24.0 * PI * PI);
        assert!(rep.bound.lower.unwrap() >= gauss - 1e-6);
        // the pure family limit sits near 1/(36 pi^2), below the Gaussian
        let limit = 1.0 / (36.0 * PI * PI);
        assert!(
            (rep.family_limit_estimate - limit).abs() < 0.05 * limit,
            "family limit {:.6e} vs 1/(36 pi^2) = {limit:.6e}",
            rep.family_limit_estimate
        );
        assert!(rep.family_best < gauss);
        // interval consistency against the chain upper bound
        assert!(rep.bound.lower.unwrap() <= bk_chain_upper(2).unwrap());
    }

    #[test]
    fn lem3_infimum_cases() {
        let (s, v) = lem3_infimum(1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((s - 1.0).abs() < 1e-15 && (v - 2.0).abs() < 1e-15);
        let (s, v) = lem3_infimum(1.0, 1.0, 4.0, 1.0).unwrap();
        assert!((s - 0.5).abs() < 1e-15 && (v - 4.0).abs() < 1e-14);
        assert!(lem3_infimum(0.0, 1.0, 1.0, 1.0).is_err());
        // closed form is a true lower bound for h(s)
        let params = [
            (0.7, 2.3, 1.9, 0.4),
            (2.0, 0.5, 3.0, 5.0),
            (1.3, 1.1, 0.2, 0.9),
        ];
        for &(a, b, m, n) in &params {
            let (_, v) = lem3_infimum(a, b, m, n).unwrap();
            let mut s: f64 = 0.013;
            for _ in 0..100 {
                s *= 1.13;
                let h = s.powf(a) * m + s.powf(-b) * n;
                assert!(v <= h * (1.0 + 1e-12), "h({s}) = {h} < inf {v}");
            }
        }
    }

    #[test]
    fn critical_constants_known_values() {
        assert!((critical_constants(4, 2).unwrap() - 32.0 * PI * PI).abs() < 1e-9);
        assert!((critical_constants(2, 1).unwrap() - 4.0 * PI).abs() < 1e-12);
        // generic first-order: n omega_{n-1}^{1/(n-1)}
        let omega2 = 4.0 * PI; // surface of S^2 in R^3
        assert!((critical_constants(3, 1).unwrap() - 3.0 * omega2.sqrt()).abs() < 1e-10);
        assert!(critical_constants(4, 4).is_err());
        assert!(critical_constants(1, 1).is_err());
    }
}
