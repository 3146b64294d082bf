//! The delta integral
//!
//! ```text
//! I(phi, psi)(tau, xi) = \int_{R^3} phi(|eta|) psi(|xi - eta|) delta(tau - |eta|^alpha + |xi - eta|^alpha) d eta
//! ```
//!
//! in closed (one-dimensional) form and by brute-force quadrature with a
//! mollified delta.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::quad::{adaptive_gk15, GaussLegendre};

/// Smooth compactly supported radial profile
/// `exp(1 - 1 / (1 - x^2))`, `x = (rho - center) / half_width`, optionally
/// multiplied by a Gaussian window of width `window` about the center.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
    pub window: Option<f64>,
}

impl Bump {
    pub fn new(center: f64, half_width: f64) -> Self {
        Self { center, half_width, window: None }
    }

    pub fn windowed(center: f64, half_width: f64, window: f64) -> Self {
        Self { center, half_width, window: Some(window) }
    }

    pub fn eval(&self, rho: f64) -> f64 {
        let x = (rho - self.center) / self.half_width;
        if x.abs() >= 1.0 {
            return 0.0;
        }
        let base = (1.0 - 1.0 / (1.0 - x * x)).exp();
        match self.window {
            Some(w) => base * (-0.5 * ((rho - self.center) / w).powi(2)).exp(),
            None => base,
        }
    }

    /// Support `[lo, hi]` intersected with `rho >= 0`.
    pub fn support(&self) -> (f64, f64) {
        ((self.center - self.half_width).max(0.0), self.center + self.half_width)
    }

    /// Outer support radius.
    pub fn radius(&self) -> f64 {
        self.support().1
    }

    pub fn zero() -> Self {
        Self { center: 1.0, half_width: 0.0, window: None }
    }

    pub fn is_zero(&self) -> bool {
        self.half_width <= 0.0
    }
}

/// A pair of radial profiles, `phi` in the `|eta|` slot and `psi` in the
/// `|xi - eta|` slot.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BumpPair {
    pub phi: Bump,
    pub psi: Bump,
}

impl BumpPair {
    pub fn new(phi: Bump, psi: Bump) -> Self {
        Self { phi, psi }
    }

    pub fn swapped(&self) -> Self {
        Self { phi: self.psi, psi: self.phi }
    }

    /// `alpha max(r, R)^{alpha - 1} |xi|`, beyond which `I` vanishes.
    pub fn vanishing_threshold(&self, xi: f64, alpha: f64) -> f64 {
        alpha * self.phi.radius().max(self.psi.radius()).powf(alpha - 1.0) * xi
    }

    /// The three pairs used by the oracle comparison.
    pub fn standard_pairs() -> [BumpPair; 3] {
        [
            BumpPair::new(Bump::windowed(2.0, 0.5, 0.5), Bump::windowed(1.0, 0.5, 0.5)),
            BumpPair::new(Bump::new(1.5, 1.0), Bump::new(1.5, 1.0)),
            BumpPair::new(Bump::new(1.0, 0.6), Bump::windowed(2.5, 0.8, 0.6)),
        ]
    }
}

fn check_args(tau: f64, xi: f64, alpha: f64) -> Result<()> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(invalid("tau", "must be finite and >= 0; use closed_form_i_signed for tau < 0"));
    }
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(invalid("xi", "must be positive"));
    }
    if !(1.0..=2.0).contains(&alpha) {
        return Err(invalid("alpha", format!("{alpha} not in [1, 2]")));
    }
    Ok(())
}

/// Smallest `rho` with `rho^alpha - |rho - xi|^alpha >= tau`, or `None`
/// when the left side never reaches `tau` (possible only for `alpha = 1`).
///
/// The left side is nondecreasing in `rho` for `alpha >= 1`.
pub fn delta_lower_limit(tau: f64, xi: f64, alpha: f64) -> Option<f64> {
    let h = |rho: f64| rho.powf(alpha) - (rho - xi).abs().powf(alpha);
    if h(0.0) >= tau {
        return Some(0.0);
    }
    let mut hi = xi.max(tau.powf(1.0 / alpha)).max(1.0);
    let mut grow = 0;
    while h(hi) < tau {
        hi *= 2.0;
        grow += 1;
        if grow > 200 {
            return None;
        }
    }
    if alpha == 1.0 && tau >= xi {
        return None;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) >= tau {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Some(hi)
}

fn closed_form_from(pair: &BumpPair, tau: f64, xi: f64, alpha: f64, lower: f64) -> f64 {
    delta_integral(&|r| pair.phi.eval(r), pair.phi.support(), &|r| pair.psi.eval(r), pair.psi.support(), tau, xi, alpha, lower)
}

#[allow(clippy::too_many_arguments)]
fn delta_integral(
    phi: &dyn Fn(f64) -> f64,
    (plo, phi_hi): (f64, f64),
    psi: &dyn Fn(f64) -> f64,
    (slo, shi): (f64, f64),
    tau: f64,
    xi: f64,
    alpha: f64,
    lower: f64,
) -> f64 {
    // omega(rho) in [slo, shi]  <=>  rho^alpha in [tau + slo^alpha, tau + shi^alpha]
    let a = lower.max(plo).max((tau + slo.powf(alpha)).powf(1.0 / alpha));
    let b = phi_hi.min((tau + shi.powf(alpha)).powf(1.0 / alpha));
    if !(b > a) {
        return 0.0;
    }
    let integrand = |rho: f64| {
        let w = (rho.powf(alpha) - tau).max(0.0).powf(1.0 / alpha);
        phi(rho) * psi(w) * w.powf(2.0 - alpha) * rho
    };
    let q = adaptive_gk15(integrand, a, b, 1e-15, 1e-11, 2000);
    2.0 * PI / (alpha * xi) * q.value
}

/// [`closed_form_i_signed`] for arbitrary radial profiles with the given
/// supports `[lo, hi]` (in `|eta|` and `|xi - eta|` respectively).
pub fn closed_form_profiles(
    phi: &dyn Fn(f64) -> f64,
    phi_support: (f64, f64),
    psi: &dyn Fn(f64) -> f64,
    psi_support: (f64, f64),
    tau: f64,
    xi: f64,
    alpha: f64,
) -> Result<f64> {
    if tau < 0.0 {
        return closed_form_profiles(psi, psi_support, phi, phi_support, -tau, xi, alpha);
    }
    check_args(tau, xi, alpha)?;
    if tau > alpha * phi_support.1.max(psi_support.1).powf(alpha - 1.0) * xi {
        return Ok(0.0);
    }
    Ok(match delta_lower_limit(tau, xi, alpha) {
        Some(lower) => delta_integral(phi, phi_support, psi, psi_support, tau, xi, alpha, lower),
        None => 0.0,
    })
}

/// `I(phi, psi)(tau, |xi|)` for `tau >= 0` by one-dimensional adaptive
/// quadrature of `(2 pi / (alpha |xi|)) \int phi(rho) psi(omega) omega^{2-alpha} rho d rho`,
/// `omega = (rho^alpha - tau)^{1/alpha}`, over the exact set where the
/// delta has a zero on the sphere. Exactly 0 above the vanishing threshold.
pub fn closed_form_i(pair: &BumpPair, tau: f64, xi: f64, alpha: f64) -> Result<f64> {
    check_args(tau, xi, alpha)?;
    if pair.phi.is_zero() || pair.psi.is_zero() || tau > pair.vanishing_threshold(xi, alpha) {
        return Ok(0.0);
    }
    Ok(match delta_lower_limit(tau, xi, alpha) {
        Some(lower) => closed_form_from(pair, tau, xi, alpha, lower),
        None => 0.0,
    })
}

/// Same integrand with the lower limit `a(tau, xi) = (xi^2 + tau^{2/alpha}) / (2 xi)`.
/// Exact for `alpha = 2`; for `alpha < 2` the limit is only necessary, so
/// this overestimates `I` for nonnegative profiles.
pub fn closed_form_i_simple_limit(pair: &BumpPair, tau: f64, xi: f64, alpha: f64) -> Result<f64> {
    check_args(tau, xi, alpha)?;
    if pair.phi.is_zero() || pair.psi.is_zero() || tau > pair.vanishing_threshold(xi, alpha) {
        return Ok(0.0);
    }
    let a = (xi * xi + tau.powf(2.0 / alpha)) / (2.0 * xi);
    Ok(closed_form_from(pair, tau, xi, alpha, a))
}

/// Any sign of `tau`, using `I(phi, psi)(-tau) = I(psi, phi)(tau)`.
pub fn closed_form_i_signed(pair: &BumpPair, tau: f64, xi: f64, alpha: f64) -> Result<f64> {
    if tau < 0.0 {
        closed_form_i(&pair.swapped(), -tau, xi, alpha)
    } else {
        closed_form_i(pair, tau, xi, alpha)
    }
}

/// Brute-force value with its refinement diagnostics.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BruteForce {
    /// Richardson value `(4 I_{eps/2} - I_eps) / 3`.
    pub value: f64,
    pub coarse: f64,
    pub fine: f64,
    pub eps: f64,
    /// `|I_eps - I_{eps/2}| / |value|` stayed below 1/4, so `eps` is in the
    /// asymptotic regime of the extrapolation.
    pub converged: bool,
}

/// Mollified integral with a unit-mass Gaussian of width `eps` in place of
/// the delta, reduced to `(rho, b = cos angle)` by axial symmetry:
///
/// ```text
/// I_eps = 2 pi \int rho^2 phi(rho) \int_{-1}^{1} psi(s) G_eps(tau - rho^alpha + s^alpha) db d rho,
/// s = sqrt(xi^2 + rho^2 - 2 xi rho b)
/// ```
pub fn mollified_i(pair: &BumpPair, tau: f64, xi: f64, alpha: f64, eps: f64) -> f64 {
    if pair.phi.is_zero() || pair.psi.is_zero() {
        return 0.0;
    }
    let (plo, phi_hi) = pair.phi.support();
    let gl = GaussLegendre::new(8);
    // phase changes by ~alpha rho^{alpha-1} per unit rho near the edge of the
    // delta set; resolve eps with a few panels
    let slope = 2.0 * alpha * phi_hi.max(1.0).powf(alpha - 1.0) * xi.max(1.0);
    let panels = ((phi_hi - plo) * slope / eps).ceil().clamp(64.0, 20000.0) as usize;
    let norm = 1.0 / (eps * (2.0 * PI).sqrt());
    let inner = |rho: f64| -> f64 {
        let f = pair.phi.eval(rho);
        if f == 0.0 {
            return 0.0;
        }
        let ra = rho.powf(alpha);
        let lo_u = ra - tau - 10.0 * eps;
        let hi_u = ra - tau + 10.0 * eps;
        if hi_u <= 0.0 {
            return 0.0;
        }
        let s_lo = lo_u.max(0.0).powf(1.0 / alpha);
        let s_hi = hi_u.powf(1.0 / alpha);
        let denom = 2.0 * xi * rho;
        let b_lo = ((xi * xi + rho * rho - s_hi * s_hi) / denom).max(-1.0);
        let b_hi = ((xi * xi + rho * rho - s_lo * s_lo) / denom).min(1.0);
        if b_hi <= b_lo {
            return 0.0;
        }
        let g = |b: f64| {
            let s = (xi * xi + rho * rho - 2.0 * xi * rho * b).max(0.0).sqrt();
            let p = tau - ra + s.powf(alpha);
            pair.psi.eval(s) * norm * (-0.5 * (p / eps).powi(2)).exp()
        };
        rho * rho * f * gl.composite(b_lo, b_hi, 24, g)
    };
    2.0 * PI * gl.composite(plo, phi_hi, panels, inner)
}

/// Richardson-extrapolated brute-force value from widths `eps` and `eps/2`.
pub fn brute_force_i(pair: &BumpPair, tau: f64, xi: f64, alpha: f64, eps: f64) -> Result<BruteForce> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid("eps", "mollifier width must be positive"));
    }
    if !(xi > 0.0) {
        return Err(invalid("xi", "must be positive"));
    }
    let coarse = mollified_i(pair, tau, xi, alpha, eps);
    let fine = mollified_i(pair, tau, xi, alpha, 0.5 * eps);
    let value = (4.0 * fine - coarse) / 3.0;
    // the eps^2 bias is removed by the extrapolation; a bias below a quarter
    // of the value means eps is small enough for that to apply
    let converged = value == 0.0 || (coarse - fine).abs() <= 0.25 * value.abs();
    Ok(BruteForce { value, coarse, fine, eps, converged })
}

/// Default mollifier width: a small fraction of the admissible tau range.
pub fn default_eps(pair: &BumpPair, xi: f64, alpha: f64) -> f64 {
    1e-2 * pair.vanishing_threshold(xi, alpha)
}

/// One oracle comparison.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LemmaSample {
    pub tau: f64,
    pub xi: f64,
    pub closed: f64,
    pub brute: f64,
    pub rel_err: f64,
    pub converged: bool,
}

/// Draws `count` admissible `(tau, xi)` points where `I` is not negligible
/// (at least 1% of its peak over the sampled region) and compares both
/// evaluations.
pub fn lemma_oracle_samples(pair: &BumpPair, alpha: f64, count: usize, seed: u64) -> Result<Vec<LemmaSample>> {
    let xi_max = pair.phi.radius() + pair.psi.radius();
    let xi_min = 0.05 * xi_max;
    let tau_of = |xi: f64, u: f64| u * pair.vanishing_threshold(xi, alpha);
    let mut peak = 0.0f64;
    for i in 0..40 {
        let xi = xi_min + (xi_max - xi_min) * (i as f64 + 0.5) / 40.0;
        for k in 0..40 {
            peak = peak.max(closed_form_i(pair, tau_of(xi, k as f64 / 40.0), xi, alpha)?);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(count);
    let mut attempts = 0;
    while points.len() < count && attempts < 100_000 {
        attempts += 1;
        let xi = rng.random_range(xi_min..xi_max);
        let tau = tau_of(xi, rng.random_range(0.0..1.0));
        let closed = closed_form_i(pair, tau, xi, alpha)?;
        if closed >= 1e-2 * peak {
            points.push((tau, xi, closed));
        }
    }
    use rayon::prelude::*;
    points
        .into_par_iter()
        .map(|(tau, xi, closed)| {
            let b = brute_force_i(pair, tau, xi, alpha, default_eps(pair, xi, alpha))?;
            Ok(LemmaSample { tau, xi, closed, brute: b.value, rel_err: (b.value - closed).abs() / closed, converged: b.converged })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vanishes_above_threshold_and_for_zero_profiles() {
        let pair = BumpPair::standard_pairs()[0];
        let thr = pair.vanishing_threshold(1.0, 1.5);
        assert_eq!(closed_form_i(&pair, 1.0001 * thr, 1.0, 1.5).unwrap(), 0.0);
        let z = BumpPair::new(Bump::zero(), pair.psi);
        assert_eq!(closed_form_i(&z, 0.3, 1.0, 1.5).unwrap(), 0.0);
        assert!(closed_form_i(&pair, -0.1, 1.0, 1.5).is_err());
        assert_eq!(brute_force_i(&z, 0.3, 1.0, 1.5, 0.01).unwrap().value, 0.0);
    }

    #[test]
    fn lower_limit_matches_the_quadratic_case() {
        for &(tau, xi) in &[(0.3, 1.0), (2.0, 1.5), (0.0, 0.7)] {
            let a = (xi * xi + tau) / (2.0 * xi);
            let r = delta_lower_limit(tau, xi, 2.0).unwrap();
            assert!((r - a).abs() < 1e-12);
        }
        assert!(delta_lower_limit(1.2, 1.0, 1.0).is_none());
        // for alpha < 2 the simple limit is only a lower bound of the exact one
        for &alpha in &[1.0, 1.25, 1.5, 1.75] {
            let (tau, xi) = (0.4f64, 1.3f64);
            let a = (xi * xi + tau.powf(2.0 / alpha)) / (2.0 * xi);
            assert!(a <= delta_lower_limit(tau, xi, alpha).unwrap() + 1e-12);
        }
    }

    #[test]
    fn windowed_bumps_example() {
        let pair = BumpPair::standard_pairs()[0];
        let c = closed_form_i(&pair, 0.3, 1.0, 1.5).unwrap();
        let b = brute_force_i(&pair, 0.3, 1.0, 1.5, default_eps(&pair, 1.0, 1.5)).unwrap();
        assert!(b.converged, "{b:?}");
        assert!((b.value - c).abs() < 1e-2 * c, "{} vs {c}", b.value);
    }

    #[test]
    fn swap_symmetry_of_the_mollified_integral() {
        let pair = BumpPair::standard_pairs()[2];
        let (tau, xi, alpha) = (0.5, 2.0, 1.5);
        let eps = 0.02;
        let a = mollified_i(&pair, -tau, xi, alpha, eps);
        let b = mollified_i(&pair.swapped(), tau, xi, alpha, eps);
        assert!((a - b).abs() < 1e-3 * b.abs(), "{a} vs {b}");
        let c = closed_form_i_signed(&pair, -tau, xi, alpha).unwrap();
        assert_eq!(c, closed_form_i(&pair.swapped(), tau, xi, alpha).unwrap());
    }
}
