//! Discrete Lebesgue and Sobolev norms on radial fields.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{RadialField, SpectralField};
use crate::transform::forward_transform;

/// `||f||_{L^2(R^3)}`, trapezoid rule on `4 pi r^2 dr`.
pub fn l2_norm(f: &RadialField) -> f64 {
    mass(f).sqrt()
}

/// `||f||_{L^2}^2`.
pub fn mass(f: &RadialField) -> f64 {
    let g = f.grid();
    f.values()
        .iter()
        .enumerate()
        .map(|(j, v)| g.physical_weight(j) * v.norm_sqr())
        .sum()
}

/// `||f||_{L^r(R^3)}` for `r >= 1`.
pub fn lr_norm(f: &RadialField, r: f64) -> f64 {
    let g = f.grid();
    let s: f64 = f
        .values()
        .iter()
        .enumerate()
        .map(|(j, v)| g.physical_weight(j) * v.norm().powf(r))
        .sum();
    s.powf(1.0 / r)
}

/// `<f, g> = \int f conj(g) dx`.
pub fn inner_product(f: &RadialField, g: &RadialField) -> Result<Complex64> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = f.grid();
    Ok(f.values()
        .iter()
        .zip(g.values())
        .enumerate()
        .map(|(j, (a, b))| a * b.conj() * grid.physical_weight(j))
        .sum())
}

/// `L^2` norm evaluated on the frequency side, `(2 pi)^-3 \int |\hat f|^2`.
pub fn plancherel_norm(spec: &SpectralField) -> f64 {
    weighted_spectral_norm(spec, |_| 1.0)
}

/// `(2 pi)^-3 \int w(|xi|) |\hat f(xi)|^2 d xi`, square-rooted.
pub fn weighted_spectral_norm(spec: &SpectralField, weight: impl Fn(f64) -> f64) -> f64 {
    let g = spec.grid();
    spec.values()
        .iter()
        .enumerate()
        .map(|(k, v)| g.spectral_weight(k) * weight(g.frequency(k)) * v.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Spectral inner product `(2 pi)^-3 \int \hat f conj(\hat g)`.
pub fn spectral_inner_product(f: &SpectralField, g: &SpectralField) -> Result<Complex64> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = f.grid();
    Ok(f.values()
        .iter()
        .zip(g.values())
        .enumerate()
        .map(|(k, (a, b))| a * b.conj() * grid.spectral_weight(k))
        .sum())
}

/// Inhomogeneous Sobolev norm `||(1 + |xi|^2)^{s/2} \hat f||` on the
/// spectral side.
pub fn sobolev_norm_spectral(spec: &SpectralField, s: f64) -> f64 {
    weighted_spectral_norm(spec, |rho| (1.0 + rho * rho).powf(s))
}

/// `||f||_{H^s}`, computed on the frequency side.
pub fn sobolev_norm(f: &RadialField, s: f64) -> Result<f64> {
    Ok(sobolev_norm_spectral(&forward_transform(f)?, s))
}

/// Homogeneous Sobolev norm `|| |xi|^s \hat f ||`.
pub fn homogeneous_sobolev_norm(spec: &SpectralField, s: f64) -> f64 {
    weighted_spectral_norm(spec, |rho| rho.powf(2.0 * s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RadialGrid;
    use std::f64::consts::PI;

    #[test]
    fn zero_field_norms() {
        let g = RadialGrid::new(256, 8.0).unwrap();
        let z = RadialField::zeros(&g);
        assert_eq!(l2_norm(&z), 0.0);
        assert_eq!(sobolev_norm(&z, 0.7).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_l2_norm() {
        // \int e^{-|x|^2} dx = pi^{3/2}
        let g = RadialGrid::desk();
        let f = RadialField::from_real_fn(&g, |r| (-0.5 * r * r).exp()).unwrap();
        assert!((l2_norm(&f) - PI.powf(0.75)).abs() < 1e-12);
        assert!((sobolev_norm(&f, 0.0).unwrap() - l2_norm(&f)).abs() < 1e-6 * l2_norm(&f));
    }

    #[test]
    fn l_infinity_limit_and_l1() {
        let g = RadialGrid::new(1024, 16.0).unwrap();
        let f = RadialField::from_real_fn(&g, |r| (-r * r).exp()).unwrap();
        assert!((lr_norm(&f, 1.0) - PI.powf(1.5)).abs() < 1e-10);
        // ||e^{-r^2}||_{L^3} = (pi/3)^{3/2 * 1/3}
        assert!((lr_norm(&f, 3.0) - (PI / 3.0).powf(0.5)).abs() < 1e-10);
    }

    #[test]
    fn inner_product_is_sesquilinear() {
        let g = RadialGrid::new(256, 8.0).unwrap();
        let f = RadialField::from_real_fn(&g, |r| (-r * r).exp()).unwrap();
        let c = Complex64::new(0.3, -1.2);
        let ip = inner_product(&f.scale(c), &f).unwrap();
        assert!((ip - c * mass(&f)).norm() < 1e-14);
        let ip2 = inner_product(&f, &f.scale(c)).unwrap();
        assert!((ip2 - c.conj() * mass(&f)).norm() < 1e-14);
    }
}
