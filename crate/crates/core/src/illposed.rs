//! Norm growth of the first cubic Picard term for annulus data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{duhamel_j, free_trajectory};
use crate::error::{invalid, Error, Result};
use crate::field::{RadialField, SpectralField};
use crate::grid::RadialGrid;
use crate::norms::sobolev_norm_spectral;
use crate::params::ModelParams;
use crate::regression::log_log_slope;
use crate::transform::{forward_transform, inverse_transform};

/// Datum whose spectrum is the sharp indicator of `lambda <= rho <= 2 lambda`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnulusDatum {
    pub lambda: f64,
    pub field: RadialField,
    pub spectrum: SpectralField,
}

pub fn build_annulus(lambda: f64, grid: &RadialGrid) -> Result<AnnulusDatum> {
    if !(lambda > 0.0) {
        return Err(invalid("lambda", format!("{lambda} must be positive")));
    }
    if 2.0 * lambda >= 0.5 * grid.rho_max() {
        return Err(Error::Aliasing(format!("2 lambda = {} must stay below rho_max / 2 = {}", 2.0 * lambda, 0.5 * grid.rho_max())));
    }
    let spectrum = SpectralField::from_real_fn(grid, |rho| if (lambda..=2.0 * lambda).contains(&rho) { 1.0 } else { 0.0 })?;
    let field = inverse_transform(&spectrum)?;
    Ok(AnnulusDatum { lambda, field, spectrum })
}

/// `Phi(t)` together with how it was computed.
#[derive(Clone, Debug, PartialEq)]
pub struct PicardTerm {
    pub t: f64,
    pub field: RadialField,
    pub steps: usize,
    /// False when `t` exceeds `0.1 lambda^{-alpha}`.
    pub in_regime: bool,
}

/// `Phi(t) = \int_0^t S(t - s)[(|x|^{-alpha} * |S(s) phi|^2) S(s) phi] ds`
/// with `lambda^alpha dt <= 0.05` and at least 16 steps.
pub fn first_picard_term(datum: &AnnulusDatum, t: f64, params: &ModelParams) -> Result<PicardTerm> {
    if !(t >= 0.0) {
        return Err(invalid("t", format!("{t} must be non-negative")));
    }
    let grid = datum.field.grid();
    if 6.0 * datum.lambda > grid.rho_max() {
        return Err(Error::Aliasing(format!("cubic term reaches 6 lambda = {} above rho_max = {}", 6.0 * datum.lambda, grid.rho_max())));
    }
    let scale = datum.lambda.powf(params.alpha);
    let in_regime = t * scale <= 0.1 * (1.0 + 1e-12);
    if t == 0.0 {
        return Ok(PicardTerm { t, field: RadialField::zeros(grid), steps: 0, in_regime });
    }
    let steps = ((t * scale / 0.05).ceil() as usize).max(16);
    let times: Vec<f64> = (0..=steps).map(|m| t * m as f64 / steps as f64).collect();
    let u = free_trajectory(&datum.field, &times, params)?;
    let field = duhamel_j(&u, &u, &u, t, params)?;
    Ok(PicardTerm { t, field, steps, in_regime })
}

/// One scale of the growth experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthEntry {
    pub lambda: f64,
    pub datum_norm: f64,
    pub phi_norm: f64,
    /// `||Phi(T)||_{H^s} / ||phi||_{H^s}^3`.
    pub ratio: f64,
    pub t: f64,
    /// Largest `|\hat Phi|` beyond `6 lambda` relative to its peak.
    pub leakage: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRecord {
    pub s: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub entries: Vec<GrowthEntry>,
    pub datum_slope: f64,
    pub phi_slope: f64,
    pub ratio_slope: f64,
}

/// Annulus data and their `Phi(epsilon lambda^{-alpha})`, one per scale.
pub fn picard_terms(lambdas: &[f64], alpha: f64, epsilon: f64, grid: &RadialGrid) -> Result<Vec<(AnnulusDatum, PicardTerm)>> {
    let params = ModelParams::new(alpha, 1.0)?;
    lambdas
        .par_iter()
        .map(|&l| {
            let d = build_annulus(l, grid)?;
            let term = first_picard_term(&d, epsilon * l.powf(-alpha), &params)?;
            Ok((d, term))
        })
        .collect()
}

/// Sobolev norms and slopes at exponent `s` from precomputed terms.
pub fn growth_record(terms: &[(AnnulusDatum, PicardTerm)], s: f64, alpha: f64, epsilon: f64) -> Result<GrowthRecord> {
    if terms.len() < 3 {
        return Err(Error::InsufficientData(format!("{} scales, need at least 3", terms.len())));
    }
    if terms.windows(2).any(|w| w[0].0.lambda >= w[1].0.lambda) {
        return Err(invalid("lambdas", "must be strictly ascending"));
    }
    let mut entries = Vec::with_capacity(terms.len());
    for (d, term) in terms {
        let spec = forward_transform(&term.field)?;
        let datum_norm = sobolev_norm_spectral(&d.spectrum, s);
        let phi_norm = sobolev_norm_spectral(&spec, s);
        let peak = spec.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let outside = spec.samples().filter(|(rho, _)| *rho > 6.0 * d.lambda).map(|(_, v)| v.norm()).fold(0.0, f64::max);
        entries.push(GrowthEntry {
            lambda: d.lambda,
            datum_norm,
            phi_norm,
            ratio: phi_norm / datum_norm.powi(3),
            t: term.t,
            leakage: if peak > 0.0 { outside / peak } else { 0.0 },
        });
    }
    let xs: Vec<f64> = entries.iter().map(|e| e.lambda).collect();
    let slope = |f: fn(&GrowthEntry) -> f64| log_log_slope(&xs, &entries.iter().map(f).collect::<Vec<_>>());
    Ok(GrowthRecord {
        s,
        alpha,
        epsilon,
        datum_slope: slope(|e| e.datum_norm)?,
        phi_slope: slope(|e| e.phi_norm)?,
        ratio_slope: slope(|e| e.ratio)?,
        entries,
    })
}

pub fn growth_experiment(lambdas: &[f64], s: f64, alpha: f64, epsilon: f64, grid: &RadialGrid) -> Result<GrowthRecord> {
    if lambdas.len() < 3 {
        return Err(Error::InsufficientData(format!("{} scales, need at least 3", lambdas.len())));
    }
    growth_record(&picard_terms(lambdas, alpha, epsilon, grid)?, s, alpha, epsilon)
}

/// Largest sampled `|t g_alpha(xi, eta, sigma)|` on the annulus triple product.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseBound {
    pub max_phase: f64,
    /// `(2^{alpha+1} - 2) epsilon`, the exact supremum over the region.
    pub bound: f64,
    pub accepted: usize,
}

fn random_vector(rng: &mut ChaCha8Rng, lambda: f64) -> [f64; 3] {
    let r = rng.random_range(lambda..=2.0 * lambda);
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi = rng.random_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - z * z).sqrt();
    [r * s * phi.cos(), r * s * phi.sin(), r * z]
}

/// Samples `eta, sigma, zeta` in `A_lambda`, keeps `xi = eta + sigma + zeta`
/// when it also lies in `A_lambda`, and evaluates
/// `g = |xi|^a - |eta|^a + |sigma|^a - |zeta|^a` at `t = epsilon lambda^{-a}`.
pub fn phase_smallness(lambda: f64, alpha: f64, epsilon: f64, samples: usize, seed: u64) -> PhaseBound {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = epsilon * lambda.powf(-alpha);
    let norm = |v: [f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let (mut max_phase, mut accepted) = (0.0f64, 0);
    for _ in 0..samples {
        let (e, s, z) = (random_vector(&mut rng, lambda), random_vector(&mut rng, lambda), random_vector(&mut rng, lambda));
        let xi = norm([e[0] + s[0] + z[0], e[1] + s[1] + z[1], e[2] + s[2] + z[2]]);
        if !(lambda..=2.0 * lambda).contains(&xi) {
            continue;
        }
        accepted += 1;
        let g = xi.powf(alpha) - norm(e).powf(alpha) + norm(s).powf(alpha) - norm(z).powf(alpha);
        max_phase = max_phase.max((t * g).abs());
    }
    PhaseBound { max_phase, bound: (2f64.powf(alpha + 1.0) - 2.0) * epsilon, accepted }
}

/// `vol(A_lambda) / (2 pi)^3`, the squared `L^2` norm of the annulus datum.
pub fn annulus_mass(lambda: f64) -> f64 {
    4.0 * std::f64::consts::PI * 7.0 * lambda.powi(3) / 3.0 / (2.0 * std::f64::consts::PI).powi(3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{l2_norm, plancherel_norm};
    use num_complex::Complex64;

    fn grid() -> RadialGrid {
        RadialGrid::new(2048, 64.0).unwrap()
    }

    #[test]
    fn annulus_support_and_mass() {
        let d = build_annulus(4.0, &grid()).unwrap();
        for (rho, v) in d.spectrum.samples() {
            if !(4.0..=8.0).contains(&rho) {
                assert_eq!(v, Complex64::new(0.0, 0.0));
            }
        }
        // the sampled indicator loses up to one frequency cell at each edge
        for (l, g) in [(8.0, grid()), (4.0, RadialGrid::new(4096, 128.0).unwrap())] {
            let m = plancherel_norm(&build_annulus(l, &g).unwrap().spectrum).powi(2);
            assert!((m / annulus_mass(l) - 1.0).abs() < 1e-2);
        }
        let m = plancherel_norm(&d.spectrum).powi(2);
        assert!((l2_norm(&d.field) / m.sqrt() - 1.0).abs() < 1e-10);
        assert!(build_annulus(30.0, &grid()).is_err());
    }

    #[test]
    fn zero_time_gives_zero() {
        let d = build_annulus(2.0, &grid()).unwrap();
        let p = ModelParams::new(1.5, 1.0).unwrap();
        assert!(first_picard_term(&d, 0.0, &p).unwrap().field.is_zero());
    }

    #[test]
    fn short_time_growth_is_linear() {
        let d = build_annulus(4.0, &grid()).unwrap();
        let p = ModelParams::new(1.5, 1.0).unwrap();
        let t0 = 0.0025 * 4f64.powf(-1.5);
        let a = l2_norm(&first_picard_term(&d, t0, &p).unwrap().field);
        let b = l2_norm(&first_picard_term(&d, 4.0 * t0, &p).unwrap().field);
        assert!((b / a / 4.0 - 1.0).abs() < 0.05, "ratio {}", b / a);
    }

    #[test]
    fn regime_flag() {
        let d = build_annulus(2.0, &grid()).unwrap();
        let p = ModelParams::new(1.5, 1.0).unwrap();
        let t = 0.2 * 2f64.powf(-1.5);
        assert!(!first_picard_term(&d, t, &p).unwrap().in_regime);
    }

    #[test]
    fn phase_stays_small() {
        let b = phase_smallness(8.0, 1.5, 0.05, 20000, 7);
        assert!(b.accepted > 100);
        assert!(b.max_phase <= b.bound && b.bound < 10.0 * 0.05);
    }

    #[test]
    fn too_few_scales_rejected() {
        assert!(growth_experiment(&[2.0, 4.0], 0.0, 1.5, 0.05, &grid()).is_err());
    }
}
