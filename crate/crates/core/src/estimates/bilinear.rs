//! Space-time `L^2` norms of products of two free waves, and the dyadic
//! bilinear estimates built on them.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::free_propagate_spectral;
use crate::error::{invalid, Error, Result};
use crate::field::{RadialField, SpectralField};
use crate::grid::RadialGrid;
use crate::littlewood_paley::{BumpFamily, DyadicIndex};
use crate::norms::{plancherel_norm, weighted_spectral_norm};
use crate::regression::log_log_fit;
use crate::transform::{forward_transform, inverse_transform};

use super::report::DyadicRecord;

/// How the second factor of the product evolves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SecondFactor {
    /// `v(t) = S(-t) g`.
    Backward,
    /// `v(t) = conj(S(t) g)`.
    ConjugateForward,
}

/// Frequency weight applied to the product before taking the `L^2` norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum OutputWeight {
    /// `chi_mu`.
    Band(f64),
    /// `chi_{<= mu}`.
    Low(f64),
    /// `rho^p`.
    Power(f64),
}

impl OutputWeight {
    pub fn eval(&self, rho: f64) -> f64 {
        match *self {
            OutputWeight::Band(mu) => BumpFamily.chi(mu, rho),
            OutputWeight::Low(mu) => BumpFamily.chi_leq(mu, rho),
            OutputWeight::Power(p) => rho.powf(p),
        }
    }

    /// Largest output frequency the weight lets through.
    pub fn max_frequency(&self) -> f64 {
        match *self {
            OutputWeight::Band(mu) | OutputWeight::Low(mu) => 2.0 * mu,
            OutputWeight::Power(_) => f64::INFINITY,
        }
    }
}

/// Time-window and step controls.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowOptions {
    /// Multiplies the default window `8 / (alpha lambda_2^{alpha-1} mu)`.
    pub window_factor: f64,
    /// Time step as a fraction of `1 / tau_max`.
    pub dt_factor: f64,
    /// Fraction of each half-window used to fit the power-law tail.
    pub tail_fraction: f64,
    pub extrapolate_tail: bool,
    /// Waves may travel at most this fraction of `r_max`.
    pub wall_fraction: f64,
}

impl Default for WindowOptions {
    fn default() -> Self {
        Self { window_factor: 1.0, dt_factor: 0.25, tail_fraction: 0.25, extrapolate_tail: true, wall_fraction: 0.9 }
    }
}

/// A space-time norm over a symmetric window plus its tail estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpaceTimeNorm {
    pub total: f64,
    pub windowed: f64,
    /// Squared-norm contribution of both extrapolated tails.
    pub tail_sq: f64,
    pub tail_exponent: f64,
    pub window: f64,
    pub steps: usize,
}

/// `F(t) = ||w(D) (u(t) v(t))||_{L^2}^2` with `u(t) = S(t) f`.
fn product_density(
    u_hat: &SpectralField,
    v_hat: &SpectralField,
    second: SecondFactor,
    weight: OutputWeight,
    alpha: f64,
    t: f64,
) -> Result<f64> {
    let (u, v) = waves(u_hat, v_hat, second, alpha, t)?;
    let prod = forward_transform(&u.mul_pointwise(&v)?)?;
    Ok(weighted_spectral_norm(&prod, |rho| weight.eval(rho).powi(2)).powi(2))
}

/// Free waves at time `t`: `(S(t) u, v(t))` in physical space.
fn waves(u_hat: &SpectralField, v_hat: &SpectralField, second: SecondFactor, alpha: f64, t: f64) -> Result<(RadialField, RadialField)> {
    let u = inverse_transform(&free_propagate_spectral(u_hat, t, alpha)?)?;
    let v = match second {
        SecondFactor::Backward => inverse_transform(&free_propagate_spectral(v_hat, -t, alpha)?)?,
        SecondFactor::ConjugateForward => inverse_transform(&free_propagate_spectral(v_hat, t, alpha)?)?.conj(),
    };
    Ok((u, v))
}

/// `\int_a^b ||w_k(D)(u v)(t)||^2 dt` for several weights at once, by the
/// trapezoid rule with step at most `dt`.
pub(crate) fn interval_integrals(
    u_hat: &SpectralField,
    v_hat: &SpectralField,
    second: SecondFactor,
    weights: &[&(dyn Fn(f64) -> f64 + Sync)],
    alpha: f64,
    a: f64,
    b: f64,
    dt: f64,
) -> Result<Vec<f64>> {
    let steps = ((b - a) / dt).ceil().max(2.0) as usize;
    let h = (b - a) / steps as f64;
    let rows = (0..=steps)
        .into_par_iter()
        .map(|m| {
            let (u, v) = waves(u_hat, v_hat, second, alpha, a + m as f64 * h)?;
            let prod = forward_transform(&u.mul_pointwise(&v)?)?;
            let end = if m == 0 || m == steps { 0.5 } else { 1.0 };
            Ok(weights.iter().map(|w| end * h * weighted_spectral_norm(&prod, |rho| w(rho).powi(2)).powi(2)).collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![0.0; weights.len()];
    for row in rows {
        for (o, x) in out.iter_mut().zip(row) {
            *o += x;
        }
    }
    Ok(out)
}

/// Power-law tail `\int_T^inf C t^{-p}` fitted on `(t, F)` samples with `t > 0`.
fn tail_estimate(ts: &[f64], fs: &[f64]) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = ts.iter().zip(fs).filter(|(t, f)| **t > 0.0 && **f > 0.0).map(|(t, f)| (*t, *f)).collect();
    if pts.len() < 3 {
        return (0.0, f64::NAN);
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
    let p = match log_log_fit(&xs, &ys) {
        Ok(fit) => (-fit.slope).clamp(1.1, 12.0),
        Err(_) => return (0.0, f64::NAN),
    };
    let (t_end, f_end) = *pts.last().unwrap();
    (f_end * t_end / (p - 1.0), p)
}

/// `(\int_{-T}^{T} F(t) dt + tails)^{1/2}` by the trapezoid rule.
pub fn space_time_norm(
    u_hat: &SpectralField,
    v_hat: &SpectralField,
    second: SecondFactor,
    weight: OutputWeight,
    alpha: f64,
    window: f64,
    dt: f64,
    opts: &WindowOptions,
) -> Result<SpaceTimeNorm> {
    if u_hat.grid() != v_hat.grid() {
        return Err(Error::GridMismatch);
    }
    if !(window > 0.0 && dt > 0.0) {
        return Err(invalid("window", "window and dt must be positive"));
    }
    let half_steps = (window / dt).ceil().max(4.0) as usize;
    let h = window / half_steps as f64;
    let ts: Vec<f64> = (0..=2 * half_steps).map(|m| -window + m as f64 * h).collect();
    let fs = ts
        .par_iter()
        .map(|&t| product_density(u_hat, v_hat, second, weight, alpha, t))
        .collect::<Result<Vec<f64>>>()?;
    let last = fs.len() - 1;
    let integral = h * (fs.iter().sum::<f64>() - 0.5 * (fs[0] + fs[last]));
    let (mut tail_sq, mut p_sum, mut p_count) = (0.0, 0.0, 0);
    if opts.extrapolate_tail {
        let k = ((half_steps as f64 * opts.tail_fraction).ceil() as usize).max(3);
        let right_t: Vec<f64> = ts[last - k..].to_vec();
        let right_f: Vec<f64> = fs[last - k..].to_vec();
        let left_t: Vec<f64> = ts[..=k].iter().rev().map(|t| -t).collect();
        let left_f: Vec<f64> = fs[..=k].iter().rev().copied().collect();
        for (tt, ff) in [(right_t, right_f), (left_t, left_f)] {
            let (tail, p) = tail_estimate(&tt, &ff);
            tail_sq += tail;
            if p.is_finite() {
                p_sum += p;
                p_count += 1;
            }
        }
    }
    let total = (integral + tail_sq).max(0.0).sqrt();
    Ok(SpaceTimeNorm {
        total,
        windowed: integral.max(0.0).sqrt(),
        tail_sq,
        tail_exponent: if p_count > 0 { p_sum / p_count as f64 } else { f64::NAN },
        window,
        steps: 2 * half_steps,
    })
}

/// Resolution and window checks shared by the scans; returns `(T_w, dt)`.
pub fn scan_window(grid: &RadialGrid, mu: f64, lambda1: f64, lambda2: f64, alpha: f64, weight: OutputWeight, opts: &WindowOptions) -> Result<(f64, f64)> {
    let top = lambda1.max(lambda2);
    if 2.0 * top >= 0.5 * grid.rho_max() {
        return Err(Error::Aliasing(format!(
            "band edge 2 lambda = {} must stay below rho_max / 2 = {}",
            2.0 * top,
            0.5 * grid.rho_max()
        )));
    }
    let window = opts.window_factor * 8.0 / (alpha * lambda2.powf(alpha - 1.0) * mu);
    let speed = alpha * (2.0 * top).powf(alpha - 1.0);
    if speed * window >= opts.wall_fraction * grid.r_max() {
        return Err(Error::WallReached(format!(
            "group velocity {speed:.3} times window {window:.3} exceeds {} r_max",
            opts.wall_fraction
        )));
    }
    let xi_max = weight.max_frequency().min(2.0 * (lambda1 + lambda2));
    let tau_max = alpha * (2.0 * top).powf(alpha - 1.0) * xi_max;
    Ok((window, opts.dt_factor / tau_max))
}

/// `\hat f` multiplied by `chi_lambda`, plus `||P_lambda f||`.
pub(crate) fn band_part(f: &RadialField, lambda: DyadicIndex) -> Result<(SpectralField, f64)> {
    let l = lambda.check(f.grid())?.value();
    let spec = forward_transform(f)?.apply_real_symbol(|rho| BumpFamily.chi(l, rho));
    let norm = plancherel_norm(&spec);
    Ok((spec, norm))
}

fn record(
    mu: DyadicIndex,
    lambda1: DyadicIndex,
    lambda2: DyadicIndex,
    f: &RadialField,
    g: &RadialField,
    alpha: f64,
    second: SecondFactor,
    weight: OutputWeight,
    rhs_factor: f64,
    opts: &WindowOptions,
) -> Result<DyadicRecord> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    if !(1.0..=2.0).contains(&alpha) {
        return Err(invalid("alpha", format!("{alpha} not in [1, 2]")));
    }
    let grid = f.grid();
    mu.check(grid)?;
    let (fu, nf) = band_part(f, lambda1)?;
    let (gv, ng) = band_part(g, lambda2)?;
    let (window, dt) = scan_window(grid, mu.value(), lambda1.value(), lambda2.value(), alpha, weight, opts)?;
    let rhs = rhs_factor * nf * ng;
    if nf == 0.0 || ng == 0.0 {
        let mut r = DyadicRecord::new(mu.value(), lambda1.value(), lambda2.value(), 0.0, rhs);
        r.window = window;
        return Ok(r);
    }
    let norm = space_time_norm(&fu, &gv, second, weight, alpha, window, dt, opts)?;
    let mut r = DyadicRecord::new(mu.value(), lambda1.value(), lambda2.value(), norm.total, rhs);
    r.lhs_window = norm.windowed;
    r.tail_share = if norm.total > 0.0 { norm.tail_sq / norm.total.powi(2) } else { 0.0 };
    r.window = window;
    r.steps = norm.steps;
    Ok(r)
}

/// `||P_mu (S(t) P_{lambda1} f * S(-t) P_{lambda2} g)||_{L^2_{t,x}}` against
/// `mu lambda_2^{(1-alpha)/2} ||P_{lambda1} f|| ||P_{lambda2} g||`.
pub fn bilinear_scan(
    lambda1: DyadicIndex,
    lambda2: DyadicIndex,
    mu: DyadicIndex,
    f: &RadialField,
    g: &RadialField,
    alpha: f64,
    opts: &WindowOptions,
) -> Result<DyadicRecord> {
    if lambda1 < lambda2 {
        return Err(invalid("lambda1", "must be at least lambda2"));
    }
    let rhs = mu.value() * lambda2.value().powf(0.5 * (1.0 - alpha));
    record(mu, lambda1, lambda2, f, g, alpha, SecondFactor::Backward, OutputWeight::Band(mu.value()), rhs, opts)
}

/// `||P_{<= mu} (P_{lambda1} u_1 conj(P_{lambda2} u_2))||` for free flows
/// `u_i = S(t) f_i`, against `mu^{(3-alpha)/2} (mu/lambda1)^{(alpha-1)/2}`.
pub fn bilinear_scan_leq(
    mu: DyadicIndex,
    lambda1: DyadicIndex,
    lambda2: DyadicIndex,
    f: &RadialField,
    g: &RadialField,
    alpha: f64,
    opts: &WindowOptions,
) -> Result<DyadicRecord> {
    let (m, l1) = (mu.value(), lambda1.value());
    let rhs = m.powf(0.5 * (3.0 - alpha)) * (m / l1).powf(0.5 * (alpha - 1.0));
    record(mu, lambda1, lambda2, f, g, alpha, SecondFactor::ConjugateForward, OutputWeight::Low(m), rhs, opts)
}

/// `||P_mu (P_{lambda1} u_1 conj(P_{lambda2} u_2))||` against
/// `min(mu, lambda1, lambda2)^{1/2} (lambda1 lambda2)^{(2-alpha)/4}`.
pub fn bernstein_scan(
    mu: DyadicIndex,
    lambda1: DyadicIndex,
    lambda2: DyadicIndex,
    f: &RadialField,
    g: &RadialField,
    alpha: f64,
    opts: &WindowOptions,
) -> Result<DyadicRecord> {
    let (m, l1, l2) = (mu.value(), lambda1.value(), lambda2.value());
    let rhs = m.min(l1).min(l2).sqrt() * (l1 * l2).powf(0.25 * (2.0 - alpha));
    record(mu, lambda1, lambda2, f, g, alpha, SecondFactor::ConjugateForward, OutputWeight::Band(m), rhs, opts)
}

/// Spectral shapes for scan data, all of the form `F(rho / lambda)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BandProfile {
    /// `chi(s)` itself.
    Bump,
    /// `chi(s) exp(-(s - 1.25)^2 / (2 * 0.3^2))`.
    GaussianBand,
}

impl BandProfile {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            BandProfile::Bump => BumpFamily.annulus(s),
            BandProfile::GaussianBand => BumpFamily.annulus(s) * (-(s - 1.25).powi(2) / (2.0 * 0.09)).exp(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BandProfile::Bump => "chi(rho/lambda)",
            BandProfile::GaussianBand => "chi(rho/lambda) exp(-(rho/lambda-1.25)^2/0.18)",
        }
    }
}

/// Unit-mass datum with spectrum `profile(rho / lambda)`.
pub fn band_datum(grid: &RadialGrid, lambda: f64, profile: BandProfile) -> Result<RadialField> {
    let spec = SpectralField::from_real_fn(grid, |rho| profile.eval(rho / lambda))?;
    let n = plancherel_norm(&spec);
    if n == 0.0 {
        return Err(Error::InsufficientData(format!("band {lambda} is not resolved by the grid")));
    }
    inverse_transform(&spec.scale(Complex64::new(1.0 / n, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> WindowOptions {
        WindowOptions::default()
    }

    #[test]
    fn zero_inputs_give_zero() {
        let g = RadialGrid::desk();
        let f = band_datum(&g, 4.0, BandProfile::GaussianBand).unwrap();
        let z = RadialField::zeros(&g);
        let (m, l) = (DyadicIndex::new(0), DyadicIndex::new(2));
        assert_eq!(bilinear_scan(l, l, m, &f, &z, 1.5, &opts()).unwrap().lhs, 0.0);
        assert_eq!(bilinear_scan_leq(m, l, l, &z, &f, 1.5, &opts()).unwrap().lhs, 0.0);
        assert_eq!(bernstein_scan(m, l, l, &z, &z, 1.5, &opts()).unwrap().lhs, 0.0);
    }

    #[test]
    fn guards() {
        let g = RadialGrid::new(256, 8.0).unwrap();
        let f = RadialField::zeros(&g);
        // rho_max = 100.5, so lambda = 16 puts 2 lambda above rho_max / 2... only just; 32 is out of range
        assert!(bilinear_scan(DyadicIndex::new(5), DyadicIndex::new(5), DyadicIndex::new(0), &f, &f, 1.5, &opts()).is_err());
        assert!(bilinear_scan(DyadicIndex::new(1), DyadicIndex::new(2), DyadicIndex::new(0), &f, &f, 1.5, &opts()).is_err());
        let small = RadialGrid::new(256, 8.0).unwrap();
        let h = band_datum(&small, 2.0, BandProfile::Bump).unwrap();
        let r = bilinear_scan_leq(DyadicIndex::new(-1), DyadicIndex::new(1), DyadicIndex::new(1), &h, &h, 1.5, &opts());
        assert!(matches!(r, Err(Error::WallReached(_)) | Err(Error::DyadicOutOfRange { .. })));
    }

    #[test]
    fn phase_rotation_invariance() {
        let g = RadialGrid::desk();
        let f = band_datum(&g, 4.0, BandProfile::GaussianBand).unwrap();
        let c = Complex64::from_polar(1.0, 1.1);
        let (m, l) = (DyadicIndex::new(0), DyadicIndex::new(2));
        let a = bilinear_scan_leq(m, l, l, &f, &f, 1.5, &opts()).unwrap();
        let b = bilinear_scan_leq(m, l, l, &f.scale(c), &f.scale(c), 1.5, &opts()).unwrap();
        assert!((a.ratio - b.ratio).abs() <= 1e-12 * a.ratio);
    }

    #[test]
    fn refining_the_time_step_changes_little() {
        let g = RadialGrid::desk();
        let f = band_datum(&g, 8.0, BandProfile::GaussianBand).unwrap();
        let (m, l) = (DyadicIndex::new(0), DyadicIndex::new(3));
        let coarse = bilinear_scan(l, l, m, &f, &f, 1.5, &opts()).unwrap();
        let mut o = opts();
        o.dt_factor *= 0.5;
        let fine = bilinear_scan(l, l, m, &f, &f, 1.5, &o).unwrap();
        assert!((coarse.lhs - fine.lhs).abs() < 1e-3 * fine.lhs, "{} vs {}", coarse.lhs, fine.lhs);
    }
}
