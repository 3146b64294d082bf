use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::field::{RadialField, SpectralField};
use crate::params::ModelParams;
use crate::transform::{forward_transform, inverse_transform};

use super::trajectory::Trajectory;

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(invalid("t", "must be finite"));
    }
    Ok(())
}

/// `e^{-i t rho^alpha} F`.
pub fn free_propagate_spectral(spec: &SpectralField, t: f64, alpha: f64) -> Result<SpectralField> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(spec.clone());
    }
    Ok(spec.apply_symbol(|rho| Complex64::from_polar(1.0, -t * rho.powf(alpha))))
}

/// `S(t) f`, the free flow of `-i u_t + (-Delta)^{alpha/2} u = 0`.
pub fn free_propagate(f: &RadialField, t: f64, params: &ModelParams) -> Result<RadialField> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(f.clone());
    }
    let spec = forward_transform(f)?;
    inverse_transform(&free_propagate_spectral(&spec, t, params.alpha)?)
}

/// Free flow sampled on a time mesh.
pub fn free_trajectory(f: &RadialField, times: &[f64], params: &ModelParams) -> Result<Trajectory> {
    let spec = forward_transform(f)?;
    let states = times
        .iter()
        .map(|&t| inverse_transform(&free_propagate_spectral(&spec, t, params.alpha)?))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::from_states(times.to_vec(), states, *params)
}
