use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::field::{RadialField, ZERO};
use crate::params::ModelParams;
use crate::transform::{evaluate_at, forward_transform};

use super::trajectory::Trajectory;

/// Fraction of the mass that may be lost to the rescaled grid's edges.
const LOSS_TOLERANCE: f64 = 1e-10;

/// `lambda^{3/2} f(lambda r)`, resampled with the band-limited interpolant.
///
/// `lambda > 1` pushes spectral content up by `lambda`, so the content above
/// `rho_max / lambda` must be negligible; `lambda < 1` spreads the profile
/// out, so the mass beyond `lambda r_max` must be negligible.
pub fn rescale(f: &RadialField, lambda: f64, _params: &ModelParams) -> Result<RadialField> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(invalid("lambda", "must be positive"));
    }
    if lambda == 1.0 {
        return Ok(f.clone());
    }
    let grid = f.grid();
    let spec = forward_transform(f)?;
    let total: f64 = (0..grid.n_points()).map(|k| grid.spectral_weight(k) * spec.values()[k].norm_sqr()).sum();
    if total == 0.0 {
        return Ok(f.clone());
    }
    if lambda > 1.0 {
        let cut = grid.rho_max() / lambda;
        let lost: f64 = spec
            .samples()
            .enumerate()
            .filter(|(_, (rho, _))| *rho > cut)
            .map(|(k, (_, v))| grid.spectral_weight(k) * v.norm_sqr())
            .sum();
        if lost > LOSS_TOLERANCE * total {
            return Err(Error::Aliasing(format!(
                "relative mass {:.2e} above rho_max / lambda = {cut:.3}",
                lost / total
            )));
        }
    } else {
        let cut = lambda * grid.r_max();
        let lost: f64 = f
            .samples()
            .enumerate()
            .filter(|(_, (r, _))| *r > cut)
            .map(|(j, (_, v))| grid.physical_weight(j) * v.norm_sqr())
            .sum();
        if lost > LOSS_TOLERANCE * total {
            return Err(Error::Support(format!(
                "relative mass {:.2e} beyond lambda r_max = {cut:.3}",
                lost / total
            )));
        }
    }
    let amp = lambda.powf(1.5);
    let r_max = grid.r_max();
    let values: Vec<Complex64> = (0..grid.n_points())
        .into_par_iter()
        .map(|j| {
            let x = lambda * grid.radius(j);
            if x >= r_max * (1.0 - 1e-12) {
                ZERO
            } else {
                amp * evaluate_at(&spec, x)
            }
        })
        .collect();
    RadialField::new(grid.clone(), values)
}

/// `u_lambda(t) = lambda^{3/2} u(lambda^alpha t, lambda .)`: every state is
/// rescaled and the sample times become `t / lambda^alpha`.
pub fn rescale_trajectory(traj: &Trajectory, lambda: f64) -> Result<Trajectory> {
    let params = *traj.params();
    let factor = lambda.powf(params.alpha);
    let states = traj
        .states()
        .iter()
        .map(|u| rescale(u, lambda, &params))
        .collect::<Result<Vec<_>>>()?;
    let times = traj.times().iter().map(|t| t / factor).collect();
    Ok(Trajectory::from_states(times, states, params)?.with_diagnostics(traj.dt() / factor, None, Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::free_propagate;
    use crate::grid::RadialGrid;
    use crate::norms::{l2_norm, mass};

    fn bump(g: &RadialGrid) -> RadialField {
        RadialField::from_fn(g, |r| Complex64::new((-r * r / 2.0).exp(), 0.2 * r * r * (-r * r / 3.0).exp())).unwrap()
    }

    #[test]
    fn identity_and_mass_invariance() {
        let g = RadialGrid::new(1024, 32.0).unwrap();
        let p = ModelParams::new(1.5, 1.0).unwrap();
        let f = bump(&g);
        assert_eq!(rescale(&f, 1.0, &p).unwrap(), f);
        for &lam in &[2.0, 0.5, 1.7] {
            let m = mass(&rescale(&f, lam, &p).unwrap());
            assert!((m - mass(&f)).abs() < 1e-6 * mass(&f), "lambda={lam}");
        }
        let back = rescale(&rescale(&f, 2.0, &p).unwrap(), 0.5, &p).unwrap();
        let e = l2_norm(&(&back - &f)) / l2_norm(&f);
        assert!(e < 1e-8, "{e}");
    }

    #[test]
    fn free_flow_commutes_with_scaling() {
        // For alpha < 2 the symbol is not smooth at the origin and S(t) f
        // decays only like t |x|^{-3-alpha}; the box must be large enough
        // that this tail is below the tolerance.
        let g = RadialGrid::new(4096, 128.0).unwrap();
        for &(alpha, t) in &[(1.5, 0.1), (2.0, 0.7)] {
            let p = ModelParams::new(alpha, 0.0).unwrap();
            let f = bump(&g);
            let lam = 2.0;
            let a = rescale(&free_propagate(&f, t, &p).unwrap(), lam, &p).unwrap();
            let b = free_propagate(&rescale(&f, lam, &p).unwrap(), t / lam.powf(alpha), &p).unwrap();
            let e = l2_norm(&(&a - &b)) / l2_norm(&a);
            assert!(e < 1e-6, "alpha={alpha}: {e}");
        }
    }

    #[test]
    fn guards_fire() {
        let g = RadialGrid::new(256, 8.0).unwrap();
        let p = ModelParams::new(1.5, 0.0).unwrap();
        let wide = RadialField::from_real_fn(&g, |r| (-r * r / 16.0).exp()).unwrap();
        assert!(matches!(rescale(&wide, 0.25, &p), Err(Error::Support(_))));
        let sharp = RadialField::from_real_fn(&g, |r| (-r * r * 40.0).exp()).unwrap();
        assert!(matches!(rescale(&sharp, 8.0, &p), Err(Error::Aliasing(_))));
    }
}
