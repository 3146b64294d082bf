//! Mixed space-time norms of free waves against `H^theta` data norms.

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::free_propagate_spectral;
use crate::error::{invalid, Error, Result};
use crate::field::RadialField;
use crate::norms::{lr_norm, plancherel_norm, sobolev_norm_spectral};
use crate::regression::log_log_fit;
use crate::transform::{forward_transform, inverse_transform};

/// Derivative loss `(3/2)(2 - alpha)(1/2 - 1/r)`; exactly zero at `alpha = 2`.
pub fn strichartz_theta(alpha: f64, r: f64) -> f64 {
    1.5 * (2.0 - alpha) * (0.5 - 1.0 / r)
}

/// `q > 2`, `r >= 2` and `2/q + 3/r = 3/2`.
pub fn is_admissible(q: f64, r: f64) -> bool {
    q > 2.0 && r >= 2.0 && (2.0 / q + 3.0 / r - 1.5).abs() < 1e-12
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrichartzOptions {
    /// Window is `[-c / rho_c^alpha, c / rho_c^alpha]` with `rho_c` the spectral centroid.
    pub window_factor: f64,
    /// Time step as a fraction of `rho_top^{-alpha}`.
    pub dt_factor: f64,
    pub tail_fraction: f64,
    pub extrapolate_tail: bool,
    pub wall_fraction: f64,
}

impl Default for StrichartzOptions {
    fn default() -> Self {
        Self { window_factor: 20.0, dt_factor: 0.1, tail_fraction: 0.25, extrapolate_tail: true, wall_fraction: 0.9 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrichartzReport {
    pub q: f64,
    pub r: f64,
    pub theta: f64,
    /// `||S(t) f||_{L^q_t L^r_x}` including the tail estimate.
    pub lhs: f64,
    pub lhs_window: f64,
    /// Share of `lhs^q` coming from the extrapolated tails.
    pub tail_share: f64,
    pub tail_exponent: f64,
    /// Inhomogeneous `||f||_{H^theta}`.
    pub data_norm: f64,
    pub ratio: f64,
    pub window: f64,
    pub steps: usize,
    /// Set when `f = 0`; the ratio is then reported as 0.
    pub zero_input: bool,
}

/// Integral of `C t^{-p}` beyond the last sample, fitted on `(t, G)` with `t > 0`.
fn tail(ts: &[f64], gs: &[f64]) -> (f64, f64) {
    let (xs, ys): (Vec<f64>, Vec<f64>) = ts.iter().zip(gs).filter(|(t, g)| **t > 0.0 && **g > 0.0).map(|(t, g)| (*t, *g)).unzip();
    if xs.len() < 3 {
        return (0.0, f64::NAN);
    }
    match log_log_fit(&xs, &ys) {
        Ok(fit) => {
            let p = (-fit.slope).clamp(1.1, 12.0);
            (ys[ys.len() - 1] * xs[xs.len() - 1] / (p - 1.0), p)
        }
        Err(_) => (0.0, f64::NAN),
    }
}

pub fn strichartz_report(f: &RadialField, q: f64, r: f64, alpha: f64, opts: &StrichartzOptions) -> Result<StrichartzReport> {
    if !is_admissible(q, r) {
        return Err(invalid("q, r", format!("({q}, {r}) is not admissible")));
    }
    if !(1.0..=2.0).contains(&alpha) {
        return Err(invalid("alpha", format!("{alpha} not in [1, 2]")));
    }
    let theta = strichartz_theta(alpha, r);
    let spec = forward_transform(f)?;
    let mass = plancherel_norm(&spec).powi(2);
    let empty = StrichartzReport {
        q,
        r,
        theta,
        lhs: 0.0,
        lhs_window: 0.0,
        tail_share: 0.0,
        tail_exponent: f64::NAN,
        data_norm: 0.0,
        ratio: 0.0,
        window: 0.0,
        steps: 0,
        zero_input: true,
    };
    if mass == 0.0 {
        return Ok(empty);
    }
    let grid = f.grid();
    let (mut first, mut top, mut cum, mut total) = (0.0, 0.0, 0.0, 0.0);
    let w: Vec<f64> = spec.values().iter().enumerate().map(|(i, v)| v.norm_sqr() * grid.spectral_weight(i)).collect();
    let sum_w: f64 = w.iter().sum();
    for (i, wi) in w.iter().enumerate() {
        first += grid.frequency(i) * wi;
        total += wi;
    }
    let centroid = first / total;
    for (i, wi) in w.iter().enumerate() {
        cum += wi;
        if cum >= (1.0 - 1e-10) * sum_w {
            top = grid.frequency(i);
            break;
        }
    }
    let window = opts.window_factor / centroid.powf(alpha);
    let speed = alpha * top.powf(alpha - 1.0);
    if speed * window >= opts.wall_fraction * grid.r_max() {
        return Err(Error::WallReached(format!("group velocity {speed:.3} times window {window:.3}")));
    }
    let dt = opts.dt_factor / top.powf(alpha);
    let half = (window / dt).ceil().max(8.0) as usize;
    let h = window / half as f64;
    let ts: Vec<f64> = (0..=2 * half).map(|m| -window + m as f64 * h).collect();
    let gs = ts
        .par_iter()
        .map(|&t| Ok(lr_norm(&inverse_transform(&free_propagate_spectral(&spec, t, alpha)?)?, r).powf(q)))
        .collect::<Result<Vec<f64>>>()?;
    let last = gs.len() - 1;
    let integral = h * (gs.iter().sum::<f64>() - 0.5 * (gs[0] + gs[last]));
    let (mut tails, mut p_sum, mut p_n) = (0.0, 0.0, 0);
    if opts.extrapolate_tail {
        let k = ((half as f64 * opts.tail_fraction).ceil() as usize).max(3);
        let left_t: Vec<f64> = ts[..=k].iter().rev().map(|t| -t).collect();
        let left_g: Vec<f64> = gs[..=k].iter().rev().copied().collect();
        for (tt, gg) in [(ts[last - k..].to_vec(), gs[last - k..].to_vec()), (left_t, left_g)] {
            let (v, p) = tail(&tt, &gg);
            tails += v;
            if p.is_finite() {
                p_sum += p;
                p_n += 1;
            }
        }
    }
    let lhs = (integral + tails).powf(1.0 / q);
    let data_norm = sobolev_norm_spectral(&spec, theta);
    Ok(StrichartzReport {
        lhs,
        lhs_window: integral.powf(1.0 / q),
        tail_share: tails / (integral + tails),
        tail_exponent: if p_n > 0 { p_sum / p_n as f64 } else { f64::NAN },
        data_norm,
        ratio: lhs / data_norm,
        window,
        steps: 2 * half,
        zero_input: false,
        ..empty
    })
}

/// `||S f||_{L^q L^r} / ||f||_{H^theta}`; 0 for `f = 0`.
pub fn strichartz_ratio(f: &RadialField, q: f64, r: f64, alpha: f64) -> Result<f64> {
    Ok(strichartz_report(f, q, r, alpha, &StrichartzOptions::default())?.ratio)
}
