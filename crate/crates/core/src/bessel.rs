//! Bessel functions J0/J1 and zeros of J1, accurate to ~1e-11 absolute.
//!
//! Power series below the switch point, Hankel asymptotic expansion above.
//! These drive the radial Fourier kernels (J1/x in R^4, J0 in R^2) and the
//! oscillatory frequency-space quadratures, so plain library-grade ~1e-8
//! approximations are not enough for the round-trip tolerances downstream.

use std::f64::consts::PI;

const SWITCH: f64 = 12.0;

/// Bessel function of the first kind, order 0.
pub fn j0(x: f64) -> f64 {
    let x = x.abs();
    if x < SWITCH {
        j_series(0, x)
    } else {
        j_asymptotic(0, x)
    }
}

/// Bessel function of the first kind, order 1.
pub fn j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < SWITCH {
        j_series(1, ax)
    } else {
        j_asymptotic(1, ax)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// J1(x)/x, finite at x = 0 (value 1/2).
pub fn j1_over_x(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-4 {
        // J1(x)/x = 1/2 - x^2/16 + x^4/384
        0.5 - ax * ax / 16.0 + ax.powi(4) / 384.0
    } else {
        j1(ax) / ax
    }
}

fn j_series(nu: u32, x: f64) -> f64 {
    // J_nu(x) = sum_k (-1)^k (x/2)^(2k+nu) / (k! (k+nu)!)
    let h = 0.5 * x;
    let q = h * h;
    let mut term = if nu == 0 { 1.0 } else { h };
    let mut sum = term;
    let mut k = 1.0f64;
    loop {
        term *= -q / (k * (k + nu as f64));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-30) || k > 60.0 {
            break;
        }
        k += 1.0;
    }
    sum
}

fn j_asymptotic(nu: u32, x: f64) -> f64 {
    // DLMF 10.17.3: J_nu(x) ~ sqrt(2/(pi x)) (cos(w) P - sin(w) Q),
    // w = x - nu pi/2 - pi/4, with a_k = prod_{m=1..k}(4nu^2-(2m-1)^2)/(k 8),
    // P = sum of even-k (-1)^(k/2) a_k / x^k, Q the odd-k part.
    let mu = 4.0 * (nu as f64) * (nu as f64);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0f64; // a_k, accumulated
    let mut prev = f64::INFINITY;
    for k in 1..=18usize {
        let m = (2 * k - 1) as f64;
        a *= (mu - m * m) / (k as f64 * 8.0);
        let t = a / x.powi(k as i32);
        if t.abs() > prev {
            break; // divergent tail of the asymptotic series
        }
        prev = t.abs();
        match k % 4 {
            0 => p += t,
            1 => q += t,
            2 => p -= t,
            _ => q -= t,
        }
        if t.abs() < 1e-17 {
            break;
        }
    }
    let w = x - (nu as f64) * 0.5 * PI - 0.25 * PI;
    (2.0 / (PI * x)).sqrt() * (w.cos() * p - w.sin() * q)
}

/// k-th positive zero of J1 (k = 1, 2, ...), via McMahon expansion plus
/// Newton refinement with J1'(x) = J0(x) - J1(x)/x.
pub fn j1_zero(k: usize) -> f64 {
    // McMahon leading terms for nu = 1; Newton does the rest.
    let b = (k as f64 + 0.25) * PI;
    let mut x = b - 3.0 / (8.0 * b);
    for _ in 0..4 {
        let f = j1(x);
        let fp = j0(x) - f / x;
        let dx = f / fp;
        x -= dx;
        if dx.abs() < 1e-14 * x {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values computed with 25-digit arithmetic.
    const J0_REF: [(f64, f64); 15] = [
        (0.001, 0.99999975000001562),
        (0.5, 0.9384698072408129),
        (1.0, 0.76519768655796655),
        (2.5, -0.048383776468197996),
        (4.0, -0.39714980986384737),
        (7.3, 0.2882169476350144),
        (8.0, 0.17165080713755391),
        (11.9, 0.025049441699589645),
        (12.0, 0.047689310796833537),
        (13.7, 0.20322083263300717),
        (25.0, 0.096266783275958116),
        (60.0, -0.09147180408906187),
        (123.5, -0.070484621663252289),
        (400.0, -0.038825181530783956),
        (1234.5, -0.013550379618035722),
    ];
    const J1_REF: [(f64, f64); 15] = [
        (0.001, 0.00049999993750000261),
        (0.5, 0.24226845767487389),
        (1.0, 0.44005058574493352),
        (2.5, 0.49709410246427404),
        (4.0, -0.066043328023549136),
        (7.3, 0.082570430493257831),
        (8.0, 0.23463634685391462),
        (11.9, -0.22898324966192406),
        (12.0, -0.22344710449062761),
        (13.7, 0.079142765100114513),
        (25.0, -0.1253502495802899),
        (60.0, 0.046598383758166318),
        (123.5, -0.013948992295178035),
        (400.0, -0.0092220584285863513),
        (1234.5, 0.018217508337392498),
    ];

    #[test]
    fn j0_reference_values() {
        for &(x, v) in &J0_REF {
            assert!((j0(x) - v).abs() < 2e-11, "j0({x}) = {} vs {v}", j0(x));
        }
    }

    #[test]
    fn j1_reference_values() {
        for &(x, v) in &J1_REF {
            assert!((j1(x) - v).abs() < 2e-11, "j1({x}) = {} vs {v}", j1(x));
        }
        assert_eq!(j1(-2.5), -j1(2.5));
    }

    #[test]
    fn j1_zeros_match_reference() {
        let zeros = [
            3.8317059702075123,
            7.0155866698156188,
            10.173468135062722,
            13.323691936314223,
            16.470630050877633,
        ];
        for (k, &z) in zeros.iter().enumerate() {
            let got = j1_zero(k + 1);
            assert!((got - z).abs() < 1e-10, "zero {}: {} vs {}", k + 1, got, z);
        }
        // far zero stays a zero
        let z = j1_zero(5000);
        assert!(j1(z).abs() < 1e-10);
    }

    #[test]
    fn j1_over_x_continuous_at_zero() {
        assert!((j1_over_x(0.0) - 0.5).abs() < 1e-15);
        assert!((j1_over_x(1e-5) - j1(1e-5) / 1e-5).abs() < 1e-14);
        assert!((j1_over_x(2e-4) - j1(2e-4) / 2e-4).abs() < 1e-15);
    }
}
