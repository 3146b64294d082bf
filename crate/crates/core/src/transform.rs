//! The 3D radial Fourier transform pair, reduced to a type-I sine transform
//! of `g(r) = r f(r)`.
//!
//! Convention: `\hat f(xi) = \int e^{-i x.xi} f(x) dx`, so for radial `f`
//!
//! ```text
//! \hat f(rho) = (4 pi / rho) \int_0^{r_max} sin(rho r) f(r) r dr
//! f(r)        = (1 / (2 pi^2 r)) \int_0^{rho_max} sin(rho r) \hat f(rho) rho d rho
//! ```
//!
//! Both integrals are evaluated by the trapezoid rule on the grid nodes,
//! which makes the pair exactly inverse to each other (and exactly
//! unitary with the weights of [`RadialGrid`]).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{RadialField, SpectralField, ZERO};
use crate::grid::{DstPlan, RadialGrid};

fn check_finite(values: &[Complex64]) -> Result<()> {
    match values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}

/// Sine-transform core shared by the plain and the padded grids.
///
/// `values` has one sample per node (the last one is the wall and is
/// ignored); returns the transform with a zero appended for the top node.
pub(crate) fn forward_raw(plan: &DstPlan, h: f64, values: &[Complex64]) -> Vec<Complex64> {
    let n = plan.len();
    let dk = PI / ((n + 1) as f64 * h);
    let mut buf: Vec<Complex64> = values[..n]
        .iter()
        .enumerate()
        .map(|(j, &f)| f * ((j + 1) as f64 * h))
        .collect();
    plan.apply(&mut buf);
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= 4.0 * PI * h / ((k + 1) as f64 * dk);
    }
    buf.push(ZERO);
    buf
}

pub(crate) fn inverse_raw(plan: &DstPlan, h: f64, values: &[Complex64]) -> Vec<Complex64> {
    let n = plan.len();
    let dk = PI / ((n + 1) as f64 * h);
    let mut buf: Vec<Complex64> = values[..n]
        .iter()
        .enumerate()
        .map(|(k, &f)| f * ((k + 1) as f64 * dk))
        .collect();
    plan.apply(&mut buf);
    for (j, v) in buf.iter_mut().enumerate() {
        *v *= dk / (2.0 * PI * PI * (j + 1) as f64 * h);
    }
    buf.push(ZERO);
    buf
}

/// Radial Fourier transform of a physical field.
pub fn forward_transform(f: &RadialField) -> Result<SpectralField> {
    let grid = f.grid();
    check_finite(f.values())?;
    let out = forward_raw(grid.dst(), grid.spacing(), f.values());
    Ok(SpectralField::from_raw(grid.clone(), out))
}

/// Inverse radial Fourier transform (carries the `(2 pi)^-3` factor).
pub fn inverse_transform(spec: &SpectralField) -> Result<RadialField> {
    let grid = spec.grid();
    check_finite(spec.values())?;
    let out = inverse_raw(grid.dst(), grid.spacing(), spec.values());
    Ok(RadialField::from_raw(grid.clone(), out))
}

/// Same as [`forward_transform`] but checks that `f` lives on `grid`.
pub fn forward_transform_on(grid: &RadialGrid, f: &RadialField) -> Result<SpectralField> {
    if f.grid() != grid {
        return Err(Error::GridMismatch);
    }
    forward_transform(f)
}

/// Same as [`inverse_transform`] but checks that `spec` lives on `grid`.
pub fn inverse_transform_on(grid: &RadialGrid, spec: &SpectralField) -> Result<RadialField> {
    if spec.grid() != grid {
        return Err(Error::GridMismatch);
    }
    inverse_transform(spec)
}

/// Evaluates the band-limited interpolant of a spectral field at arbitrary
/// radii `r > 0`, i.e. the inverse-transform sum at off-grid points.
///
/// Cost is `O(n)` per point; `sin(k theta)` comes from the Chebyshev
/// recurrence rather than repeated `sin` calls.
pub fn evaluate_at(spec: &SpectralField, r: f64) -> Complex64 {
    let grid = spec.grid();
    let dk = grid.freq_spacing();
    let theta = dk * r;
    let two_cos = 2.0 * theta.cos();
    let (mut s_prev, mut s_cur) = (0.0f64, theta.sin());
    let mut acc = ZERO;
    for (k, &v) in spec.values().iter().enumerate() {
        acc += v * (s_cur * (k + 1) as f64 * dk);
        let s_next = two_cos * s_cur - s_prev;
        s_prev = s_cur;
        s_cur = s_next;
    }
    acc * (dk / (2.0 * PI * PI * r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(grid: &RadialGrid) -> RadialField {
        RadialField::from_real_fn(grid, |r| (-0.5 * r * r).exp()).unwrap()
    }

    #[test]
    fn zero_maps_to_zero() {
        let g = RadialGrid::new(512, 16.0).unwrap();
        let z = RadialField::zeros(&g);
        assert!(forward_transform(&z).unwrap().is_zero());
        assert!(inverse_transform(&SpectralField::zeros(&g)).unwrap().is_zero());
    }

    #[test]
    fn gaussian_pair_forward() {
        let g = RadialGrid::new(1024, 16.0).unwrap();
        let spec = forward_transform(&gaussian(&g)).unwrap();
        let c = (2.0 * PI).powf(1.5);
        let mut worst = 0.0f64;
        for (rho, v) in spec.samples() {
            let exact = c * (-0.5 * rho * rho).exp();
            if exact > 1e-8 {
                worst = worst.max((v.re - exact).abs() / exact);
            }
            assert!(v.im.abs() < 1e-14);
        }
        assert!(worst < 1e-6, "max rel error {worst}");
    }

    #[test]
    fn gaussian_pair_inverse() {
        let g = RadialGrid::new(1024, 16.0).unwrap();
        let c = (2.0 * PI).powf(1.5);
        let spec = SpectralField::from_real_fn(&g, |rho| c * (-0.5 * rho * rho).exp()).unwrap();
        let f = inverse_transform(&spec).unwrap();
        for (r, v) in f.samples().take(400) {
            assert!((v.re - (-0.5 * r * r).exp()).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_non_finite() {
        let g = RadialGrid::new(256, 8.0).unwrap();
        let mut f = RadialField::zeros(&g);
        f.values_mut()[3] = Complex64::new(f64::INFINITY, 0.0);
        assert_eq!(forward_transform(&f).unwrap_err(), Error::NonFinite(3));
        let other = RadialGrid::new(256, 9.0).unwrap();
        assert_eq!(
            forward_transform_on(&other, &RadialField::zeros(&g)).unwrap_err(),
            Error::GridMismatch
        );
    }

    #[test]
    fn interpolant_reproduces_nodes() {
        let g = RadialGrid::new(256, 12.0).unwrap();
        let f = RadialField::from_fn(&g, |r| Complex64::new((-r * r).exp(), 0.3 * (-r * r / 2.0).exp()))
            .unwrap();
        let spec = forward_transform(&f).unwrap();
        for j in [0usize, 5, 40, 100] {
            let r = g.radius(j);
            assert!((evaluate_at(&spec, r) - f.values()[j]).norm() < 1e-12);
        }
    }
}
