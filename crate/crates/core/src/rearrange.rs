//! Fourier rearrangement of radial fields.
//!
//! u# is the inverse Fourier transform of the symmetric decreasing
//! rearrangement of the Fourier transform. For radial fields both transforms
//! reduce to one-dimensional Bessel-kernel integrals: J1(2 pi rho r)/(pi rho r)
//! in R^4 and J0(2 pi rho r) in R^2 (the angular average of the plane wave).
//! The decreasing rearrangement is realized discretely by sorting transform
//! samples against the measure carried by the frequency grid, which is the
//! discrete analogue of Schwarz symmetrization of a radial function.

use std::sync::Arc;

use crate::bessel::{j0, j1_over_x};
use crate::error::{Error, Result};
use crate::field::RadialField;
use crate::grid::{GridMapping, RadialGrid};

/// Angular average of exp(-2 pi i xi.x) over a sphere, as a function of
/// 2 pi rho r.
fn kernel(dimension: usize, two_pi_rho_r: f64) -> f64 {
    match dimension {
        4 => 2.0 * j1_over_x(two_pi_rho_r),
        2 => j0(two_pi_rho_r),
        _ => unreachable!(),
    }
}

/// Radial Fourier transform onto `target` (self-inverse kernel; the same
/// routine maps physical to frequency space and back).
pub fn radial_fourier_transform(
    field: &RadialField,
    target: &Arc<RadialGrid>,
) -> Result<RadialField> {
    let src = field.grid();
    if src.dimension() != target.dimension() {
        return Err(Error::param("target", "dimension mismatch"));
    }
    let dim = src.dimension();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut out = vec![0.0f64; target.len()];
    let w = src.weights();
    let u = field.values();
    let rs = src.nodes();
    for (i, &rho) in target.nodes().iter().enumerate() {
        let mut acc = 0.0;
        for j in 0..rs.len() {
            acc += kernel(dim, two_pi * rho * rs[j]) * u[j] * w[j];
        }
        out[i] = acc;
    }
    RadialField::new(target.clone(), out)
}

/// Sort |values| decreasingly against the grid measure and resample the
/// resulting step function at the cumulative-measure midpoints of the grid.
fn decreasing_rearrangement(grid: &RadialGrid, values: &[f64]) -> Vec<f64> {
    let w = grid.weights();
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        values[b]
            .abs()
            .partial_cmp(&values[a].abs())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    // The sorted samples are values of the continuum decreasing rearrangement
    // at the cumulative-measure midpoints of their own cells; interpolate
    // that decreasing function at the target midpoints (piecewise linear in
    // measure, so an already-decreasing input is reproduced exactly).
    let mut xs = Vec::with_capacity(idx.len());
    let mut ys = Vec::with_capacity(idx.len());
    let mut acc = 0.0;
    for &k in &idx {
        xs.push(acc + 0.5 * w[k]);
        acc += w[k];
        ys.push(values[k].abs());
    }
    let mut out = vec![0.0; values.len()];
    let mut pos = 0usize;
    let mut target_acc = 0.0;
    for i in 0..values.len() {
        let mid = target_acc + 0.5 * w[i];
        target_acc += w[i];
        while pos + 1 < xs.len() && xs[pos + 1] < mid {
            pos += 1;
        }
        out[i] = if mid <= xs[0] {
            ys[0]
        } else if mid >= *xs.last().unwrap() {
            *ys.last().unwrap()
        } else {
            let t = (mid - xs[pos]) / (xs[pos + 1] - xs[pos]);
            ys[pos] * (1.0 - t) + ys[pos + 1] * t
        };
    }
    // Resampling the step function drifts the L^2 mass slightly; rescale so
    // the rearrangement preserves it exactly (the factor is 1 when the input
    // is already decreasing, keeping fixed points exact).
    let orig: f64 = w.iter().zip(values).map(|(wi, v)| wi * v * v).sum();
    let new: f64 = w.iter().zip(&out).map(|(wi, v)| wi * v * v).sum();
    if new > 0.0 {
        let c = (orig / new).sqrt();
        for v in &mut out {
            *v *= c;
        }
    }
    out
}

/// Options for the rearrangement transform pair.
#[derive(Debug, Clone, Copy)]
pub struct RearrangeOpts {
    /// Outer radius of the frequency grid.
    pub freq_max: f64,
    /// Nodes on the frequency grid (defaults to the field's node count).
    pub freq_nodes: Option<usize>,
    /// Decay tolerance at the outer boundary, relative to max |u|.
    pub tail_tol: f64,
}

impl Default for RearrangeOpts {
    fn default() -> Self {
        RearrangeOpts {
            freq_max: 3.0,
            freq_nodes: None,
            tail_tol: 1e-6,
        }
    }
}

fn check_decay(field: &RadialField, tol: f64) -> Result<()> {
    let n = field.grid().len();
    let m = field.max_abs();
    if m == 0.0 {
        return Err(Error::ZeroField);
    }
    let tail = field.values()[n - n / 20..]
        .iter()
        .fold(0.0f64, |a, v| a.max(v.abs()));
    if tail > tol * m {
        return Err(Error::NonDecaying {
            tail: tail / m,
            tol,
        });
    }
    Ok(())
}

/// Round trip without the rearrangement step: transform then inverse.
pub fn fourier_roundtrip(field: &RadialField, opts: &RearrangeOpts) -> Result<RadialField> {
    check_decay(field, opts.tail_tol)?;
    let n = opts.freq_nodes.unwrap_or(field.grid().len());
    let fgrid = RadialGrid::build(
        field.grid().dimension(),
        opts.freq_max,
        n,
        GridMapping::Uniform,
    )?;
    let hat = radial_fourier_transform(field, &fgrid)?;
    radial_fourier_transform(&hat, field.grid())
}

/// Fourier rearrangement u#.
pub fn fourier_rearrange(field: &RadialField, opts: &RearrangeOpts) -> Result<RadialField> {
    check_decay(field, opts.tail_tol)?;
    let n = opts.freq_nodes.unwrap_or(field.grid().len());
    let fgrid = RadialGrid::build(
        field.grid().dimension(),
        opts.freq_max,
        n,
        GridMapping::Uniform,
    )?;
    let hat = radial_fourier_transform(field, &fgrid)?;
    let rearranged = decreasing_rearrangement(&fgrid, hat.values());
    let star = RadialField::new(fgrid, rearranged)?;
    radial_fourier_transform(&star, field.grid())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gaussian(dim: usize) -> RadialField {
        let g =
            RadialGrid::build(dim, 14.0, 1024, GridMapping::Stretched { strength: 3.0 }).unwrap();
        RadialField::from_fn(&g, |r| (-r * r / 2.0).exp()).unwrap()
    }

    #[test]
    fn transform_of_gaussian_matches_closed_form() {
        // F[e^{-r^2/2}] = (2 pi)^{n/2} e^{-2 pi^2 rho^2}
        for &dim in &[4usize, 2] {
            let u = gaussian(dim);
            let fgrid = RadialGrid::build(dim, 2.0, 512, GridMapping::Uniform).unwrap();
            let hat = radial_fourier_transform(&u, &fgrid).unwrap();
            let amp = (2.0 * PI).powi(dim as i32 / 2);
            for (i, &rho) in fgrid.nodes().iter().enumerate() {
                let exact = amp * (-2.0 * PI * PI * rho * rho).exp();
                assert!(
                    (hat.values()[i] - exact).abs() < 1e-7 * amp,
                    "dim {dim} rho={rho}: {} vs {exact}",
                    hat.values()[i]
                );
            }
        }
    }

    #[test]
    fn gaussian_is_a_fixed_point() {
        let u = gaussian(4);
        let out = fourier_rearrange(&u, &RearrangeOpts::default()).unwrap();
        let scale = u.max_abs();
        for (a, b) in out.values().iter().zip(u.values()) {
            assert!((a - b).abs() < 1e-6 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn roundtrip_reproduces_input() {
        for &dim in &[4usize, 2] {
            let g = RadialGrid::build(dim, 14.0, 1024, GridMapping::Stretched { strength: 3.0 })
                .unwrap();
            // radial profiles are even in r; keep the test fields that way
            let u = RadialField::from_fn(&g, |r| {
                let r2 = r * r;
                0.7 * (-r2 / 2.0).exp() - 0.4 * (-(r2 - 2.0) * (r2 - 2.0) / 6.0).exp()
            })
            .unwrap();
            let back = fourier_roundtrip(&u, &RearrangeOpts::default()).unwrap();
            let scale = u.max_abs();
            for (a, b) in back.values().iter().zip(u.values()) {
                assert!((a - b).abs() < 1e-6 * scale, "dim {dim}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn rearrangement_preserves_l2_and_improves_l4() {
        // Build the field through a positive non-monotone transform: the
        // rearrangement then genuinely permutes samples while the rearranged
        // transform stays kink-free, so no mass escapes the truncated grid.
        let g = RadialGrid::build(4, 14.0, 1024, GridMapping::Stretched { strength: 3.0 }).unwrap();
        let fg = RadialGrid::build(4, 3.0, 1024, GridMapping::Uniform).unwrap();
        let hat = RadialField::from_fn(&fg, |p| {
            (0.4 + 5.0 * p * p) * (-4.0 * p * p).exp() + 0.2 * (-30.0 * (p - 1.0) * (p - 1.0)).exp()
        })
        .unwrap();
        let u = radial_fourier_transform(&hat, &g).unwrap();
        let us = fourier_rearrange(&u, &RearrangeOpts::default()).unwrap();
        let l2 = u.lp_norm(2.0).unwrap();
        let l2s = us.lp_norm(2.0).unwrap();
        assert!((l2 - l2s).abs() < 1e-6 * l2, "{l2} vs {l2s}");
        assert!(us.dnorm_sq().unwrap() <= u.dnorm_sq().unwrap() + 1e-6);
        assert!(us.lp_norm(4.0).unwrap() >= u.lp_norm(4.0).unwrap() - 1e-6);
    }

    #[test]
    fn non_decaying_input_rejected() {
        let g = RadialGrid::build(4, 10.0, 256, GridMapping::Uniform).unwrap();
        let u = RadialField::from_fn(&g, |r| 1.0 / (1.0 + r)).unwrap();
        assert!(matches!(
            fourier_rearrange(&u, &RearrangeOpts::default()),
            Err(Error::NonDecaying { .. })
        ));
    }
}
