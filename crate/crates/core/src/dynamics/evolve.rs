use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::field::{RadialField, SpectralField};
use crate::norms::{l2_norm, weighted_spectral_norm};
use crate::params::ModelParams;
use crate::riesz::{hartree_potential, RieszKernel};
use crate::transform::{forward_transform, inverse_transform};

use super::propagator::free_propagate_spectral;
use super::trajectory::Trajectory;

/// Step control for [`evolve_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct EvolveOptions {
    /// Requested step; the actual step is `T / ceil(T / dt)`.
    pub dt: f64,
    /// Store every `save_every`-th step (the final time is always stored).
    pub save_every: usize,
    /// Abort once `||u||_{L^2}` or `||u||_{L^inf}` exceeds this multiple of
    /// its initial value.
    pub blowup_factor: f64,
    pub record_energy: bool,
}

impl EvolveOptions {
    pub fn new(dt: f64) -> Self {
        Self { dt, save_every: 1, blowup_factor: 1e3, record_energy: true }
    }
}

/// Kinetic part `1/2 <(-Delta)^{alpha/2} u, u>`, evaluated spectrally.
pub fn kinetic_energy(spec: &SpectralField, alpha: f64) -> f64 {
    0.5 * weighted_spectral_norm(spec, |rho| rho.powf(alpha)).powi(2)
}

fn potential_energy(u: &RadialField, potential: &[f64], sigma: f64) -> f64 {
    let g = u.grid();
    let pairing: f64 = u
        .values()
        .iter()
        .zip(potential)
        .enumerate()
        .map(|(j, (v, p))| g.physical_weight(j) * p * v.norm_sqr())
        .sum();
    -0.25 * sigma * pairing
}

/// Conserved energy `1/2 <(-Delta)^{alpha/2} u, u> - sigma/4 <V[u] u, u>`
/// with `V[u] = |x|^{-alpha} * |u|^2`.
///
/// The sign of the potential term is the one that makes the functional
/// invariant under `-i u_t + (-Delta)^{alpha/2} u = sigma V[u] u`.
pub fn energy(f: &RadialField, params: &ModelParams) -> Result<f64> {
    energy_with_kernel(f, params, &RieszKernel::new(f.grid(), params.alpha)?)
}

pub fn energy_with_kernel(f: &RadialField, params: &ModelParams, kernel: &RieszKernel) -> Result<f64> {
    let kin = kinetic_energy(&forward_transform(f)?, params.alpha);
    if params.sigma == 0.0 {
        return Ok(kin);
    }
    let pot = hartree_potential(kernel, f)?;
    Ok(kin + potential_energy(f, &pot, params.sigma))
}

fn rotate(u: &mut RadialField, potential: &[f64], angle: f64) {
    if angle == 0.0 {
        return;
    }
    for (v, p) in u.values_mut().iter_mut().zip(potential) {
        *v *= Complex64::from_polar(1.0, angle * p);
    }
}

/// Strang splitting with default options (every step stored).
pub fn evolve(f: &RadialField, t_final: f64, params: &ModelParams, dt: f64) -> Result<Trajectory> {
    evolve_with(f, t_final, params, &EvolveOptions::new(dt))
}

/// Strang splitting
///
/// ```text
/// u <- e^{i sigma dt/2 V[u]} u,   u <- S(dt) u,   u <- e^{i sigma dt/2 V[u]} u
/// ```
///
/// The nonlinear substep is exact because `V[u]` is real, so `|u|` and
/// with it `V` are frozen during the rotation; one Riesz convolution per
/// step suffices.
pub fn evolve_with(f: &RadialField, t_final: f64, params: &ModelParams, opts: &EvolveOptions) -> Result<Trajectory> {
    params.validate_dynamics()?;
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(invalid("t_final", "must be finite and nonnegative"));
    }
    if !(opts.dt.is_finite() && opts.dt > 0.0) {
        return Err(invalid("dt", "must be positive"));
    }
    if opts.save_every == 0 {
        return Err(invalid("save_every", "must be at least 1"));
    }
    let grid = f.grid();
    let steps = ((t_final / opts.dt) - 1e-9).ceil().max(1.0) as usize;
    let h = if t_final == 0.0 { 0.0 } else { t_final / steps as f64 };
    let mut warnings = Vec::new();
    let stiffness = h * grid.rho_max().powf(params.alpha);
    if stiffness > 1.0 {
        warnings.push(format!("dt * rho_max^alpha = {stiffness:.3e} exceeds 1"));
    }

    let kernel = RieszKernel::new(grid, params.alpha)?;
    let sigma = params.sigma;
    let mut u = f.clone();
    let mut pot = hartree_potential(&kernel, &u)?;
    let energy_of = |u: &RadialField, pot: &[f64]| -> Result<f64> {
        Ok(kinetic_energy(&forward_transform(u)?, params.alpha) + potential_energy(u, pot, sigma))
    };

    let norm0 = l2_norm(f);
    let sup0 = f.max_abs();
    let mut times = vec![0.0];
    let mut states = vec![u.clone()];
    let mut energies = Vec::new();
    if opts.record_energy {
        energies.push(energy_of(&u, &pot)?);
    }
    if t_final == 0.0 {
        return Ok(Trajectory::from_states(times, states, *params)?.with_diagnostics(h, opts.record_energy.then_some(energies), warnings));
    }

    for m in 1..=steps {
        rotate(&mut u, &pot, 0.5 * sigma * h);
        let spec = forward_transform(&u)?;
        u = inverse_transform(&free_propagate_spectral(&spec, h, params.alpha)?)?;
        if sigma != 0.0 {
            pot = hartree_potential(&kernel, &u)?;
        }
        rotate(&mut u, &pot, 0.5 * sigma * h);

        let t = m as f64 * h;
        let norm = l2_norm(&u);
        let sup = u.max_abs();
        if !(norm.is_finite() && sup.is_finite()) {
            return Err(Error::BlowUp { time: t, growth: f64::INFINITY });
        }
        let growth = (if norm0 > 0.0 { norm / norm0 } else { 1.0 }).max(if sup0 > 0.0 { sup / sup0 } else { 1.0 });
        if growth > opts.blowup_factor {
            return Err(Error::BlowUp { time: t, growth });
        }
        if m % opts.save_every == 0 || m == steps {
            times.push(t);
            states.push(u.clone());
            if opts.record_energy {
                energies.push(energy_of(&u, &pot)?);
            }
        }
    }
    Ok(Trajectory::from_states(times, states, *params)?.with_diagnostics(h, opts.record_energy.then_some(energies), warnings))
}
