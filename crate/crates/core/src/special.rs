//! Special functions needed by the Riesz multiplier.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use crate::quad::GaussLegendre;

/// Constant of the Riesz multiplier: `|x|^{-alpha}` has Fourier transform
/// `c(3, alpha) |xi|^{alpha - 3}` for `0 < alpha < 3`.
pub fn riesz_constant(alpha: f64) -> f64 {
    2f64.powf(3.0 - alpha) * PI.powf(1.5) * gamma(0.5 * (3.0 - alpha)) / gamma(0.5 * alpha)
}

/// `\int_0^inf sin(u) u^{1 - alpha} du`, continued analytically to the
/// whole range `0 < alpha < 3` (Abel summation for `alpha <= 1`).
fn sine_moment_total(alpha: f64) -> f64 {
    let s = 2.0 - alpha;
    if s.abs() < 1e-12 {
        return 0.5 * PI;
    }
    // Gamma(s) sin(pi s / 2), written without the pole at s = 0.
    gamma(s + 1.0) * (0.5 * PI * s).sin() / s
}

const SERIES_LIMIT: f64 = 8.0;
const ASYMPTOTIC_LIMIT: f64 = 30.0;

/// Incomplete sine moment `\int_0^x sin(u) u^{1 - alpha} du`, `x >= 0`.
///
/// Power series below 8, Gauss-Legendre panels up to 30 and the
/// integration-by-parts expansion of the tail beyond.
pub fn sine_moment(x: f64, alpha: f64) -> f64 {
    debug_assert!(x >= 0.0 && alpha > 0.0 && alpha < 3.0);
    if x <= SERIES_LIMIT {
        return sine_moment_series(x, alpha);
    }
    if x >= ASYMPTOTIC_LIMIT {
        return sine_moment_total(alpha) - sine_tail(x, alpha - 1.0);
    }
    let gl = GaussLegendre::new(16);
    let panels = (x - SERIES_LIMIT).ceil() as usize;
    sine_moment_series(SERIES_LIMIT, alpha)
        + gl.composite(SERIES_LIMIT, x, panels, |u| u.sin() * u.powf(1.0 - alpha))
}

fn sine_moment_series(x: f64, alpha: f64) -> f64 {
    let x2 = x * x;
    // term_k = (-1)^k x^{2k} / (2k+1)!
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 0..200 {
        let p = 2.0 * k as f64 + 3.0 - alpha;
        let contrib = term / p;
        sum += contrib;
        if contrib.abs() < 1e-17 * sum.abs() && k > 2 {
            break;
        }
        let kk = 2.0 * k as f64;
        term *= -x2 / ((kk + 2.0) * (kk + 3.0));
    }
    sum * x.powf(3.0 - alpha)
}

/// `\int_x^inf sin(u) u^{-beta} du` by the asymptotic expansion
/// `Im[i e^{ix} x^{-beta} sum_k (-i)^k (beta)_k x^{-k}]`, truncated at the
/// smallest term.
fn sine_tail(x: f64, beta: f64) -> f64 {
    // (-i)^k cycles through 1, -i, -1, i
    let (mut re, mut im) = (0.0, 0.0);
    let mut mag: f64 = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..80 {
        if mag.abs() > prev {
            break;
        }
        match k % 4 {
            0 => re += mag,
            1 => im -= mag,
            2 => re -= mag,
            _ => im += mag,
        }
        prev = mag.abs();
        mag *= (beta + k as f64) / x;
        if mag == 0.0 || prev < 1e-18 {
            break;
        }
    }
    // i e^{ix} (re + i im) = i (cos x + i sin x)(re + i im)
    let (c, s) = (x.cos(), x.sin());
    let prod_re = c * re - s * im;
    x.powf(-beta) * prod_re
}
