//! Free-space Riesz potentials `|x|^{-alpha} * rho` on a radial grid.
//!
//! The bare multiplier `c(3, alpha) rho^{alpha - 3}` applied on the sine grid
//! computes the potential of the density with Dirichlet data at `r_max`,
//! which is off by a term of order `Q / r_max`. Instead the kernel is
//! truncated at `R = 2 r_max` (the largest distance between two points of
//! the computational ball) and the density is zero-padded to `4 r_max`.
//! The truncated kernel has the smooth transform
//!
//! ```text
//! K_R(rho) = 4 pi rho^{alpha - 3} \int_0^{rho R} sin(u) u^{1 - alpha} du
//! ```
//!
//! which tends to `c(3, alpha) rho^{alpha - 3}` for `rho R -> inf`, and the
//! padded periodic convolution agrees with the free-space one on `[0, r_max]`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::field::{RadialField, ZERO};
use crate::grid::{RadialGrid, PAD_FACTOR};
use crate::params::ModelParams;
use crate::special::sine_moment;
use crate::transform::{forward_raw, inverse_raw};

/// Precomputed truncated-kernel symbol for one grid and one exponent.
#[derive(Clone, Debug)]
pub struct RieszKernel {
    grid: RadialGrid,
    alpha: f64,
    symbol: Vec<f64>,
}

impl RieszKernel {
    pub fn new(grid: &RadialGrid, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 3.0) {
            return Err(invalid("alpha", format!("Riesz exponent {alpha} not in (0, 3)")));
        }
        let n_pad = PAD_FACTOR * grid.n_points();
        let dk = PI / (PAD_FACTOR as f64 * grid.r_max());
        let cutoff = 2.0 * grid.r_max();
        let symbol = (0..n_pad - 1)
            .into_par_iter()
            .map(|k| {
                let rho = (k + 1) as f64 * dk;
                4.0 * PI * rho.powf(alpha - 3.0) * sine_moment(rho * cutoff, alpha)
            })
            .collect();
        Ok(Self { grid: grid.clone(), alpha, symbol })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    /// `(|x|^{-alpha} * density)(r_j)` at every node.
    pub fn apply(&self, density: &RadialField) -> Result<RadialField> {
        if density.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let n = self.grid.n_points();
        let plan = self.grid.padded_dst();
        let h = self.grid.spacing();
        let mut padded = vec![ZERO; PAD_FACTOR * n];
        // The wall sample is dropped by the plain transform too.
        padded[..n - 1].copy_from_slice(&density.values()[..n - 1]);
        let mut spec = forward_raw(plan, h, &padded);
        for (v, s) in spec.iter_mut().zip(&self.symbol) {
            *v *= *s;
        }
        let mut out = inverse_raw(plan, h, &spec);
        out.truncate(n);
        RadialField::new(self.grid.clone(), out)
    }
}

/// Convenience wrapper building the kernel for a single use.
pub fn riesz_convolution(density: &RadialField, params: &ModelParams) -> Result<RadialField> {
    RieszKernel::new(density.grid(), params.alpha)?.apply(density)
}

/// Real Hartree potential `V[u] = |x|^{-alpha} * |u|^2`.
pub(crate) fn hartree_potential(kernel: &RieszKernel, u: &RadialField) -> Result<Vec<f64>> {
    let v = kernel.apply(&u.density())?;
    Ok(v.values().iter().map(|z| z.re).collect())
}

/// `V[u1 conj(u2)] u3`, the trilinear Hartree term.
pub(crate) fn hartree_trilinear(
    kernel: &RieszKernel,
    u1: &RadialField,
    u2: &RadialField,
    u3: &RadialField,
) -> Result<RadialField> {
    let pot = kernel.apply(&u1.mul_conj(u2)?)?;
    pot.mul_pointwise(u3)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive_gk15;
    use crate::special::riesz_constant;

    fn gaussian_density(g: &RadialGrid) -> RadialField {
        RadialField::from_real_fn(g, |r| (-r * r).exp()).unwrap()
    }

    /// Radial reduction of `\int |x - y|^{-alpha} f(|y|) dy`:
    /// `(2 pi / r) \int_0^inf s f(s) [(r+s)^{2-a} - |r-s|^{2-a}] / (2-a) ds`.
    fn radial_oracle(r: f64, alpha: f64, f: impl Fn(f64) -> f64) -> f64 {
        let g = |s: f64| {
            let k = ((r + s).powf(2.0 - alpha) - (r - s).abs().powf(2.0 - alpha)) / (2.0 - alpha);
            s * f(s) * k
        };
        let a = adaptive_gk15(&g, 0.0, r, 1e-15, 1e-12, 2000).value;
        let b = adaptive_gk15(&g, r, r + 12.0, 1e-15, 1e-12, 2000).value;
        2.0 * PI / r * (a + b)
    }

    #[test]
    fn zero_density_gives_zero() {
        let g = RadialGrid::new(256, 8.0).unwrap();
        let p = ModelParams::new(1.5, 1.0).unwrap();
        assert!(riesz_convolution(&RadialField::zeros(&g), &p).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn rejects_bad_exponent() {
        let g = RadialGrid::new(256, 8.0).unwrap();
        assert!(RieszKernel::new(&g, 3.0).is_err());
        assert!(RieszKernel::new(&g, 0.0).is_err());
    }

    #[test]
    fn newtonian_potential_of_gaussian() {
        // e^{-r^2} has mass pi^{3/2}; its potential is pi^{3/2} erf(r) / r.
        let g = RadialGrid::new(1024, 16.0).unwrap();
        let v = RieszKernel::new(&g, 1.0).unwrap().apply(&gaussian_density(&g)).unwrap();
        for (r, val) in v.samples().step_by(7) {
            let exact = PI.powf(1.5) * erf(r) / r;
            assert!((val.re - exact).abs() < 1e-4 * exact, "r={r}: {} vs {exact}", val.re);
        }
    }

    #[test]
    fn fractional_potential_matches_quadrature() {
        let g = RadialGrid::new(1024, 16.0).unwrap();
        let v = RieszKernel::new(&g, 1.5).unwrap().apply(&gaussian_density(&g)).unwrap();
        for j in [3usize, 40, 100, 300, 700, 1000] {
            let r = g.radius(j);
            let exact = radial_oracle(r, 1.5, |s| (-s * s).exp());
            assert!((v.values()[j].re - exact).abs() < 1e-3 * exact, "r={r}");
        }
    }

    #[test]
    fn far_field_follows_the_bare_multiplier_constant() {
        let g = RadialGrid::new(512, 32.0).unwrap();
        let v = RieszKernel::new(&g, 1.5).unwrap().apply(&gaussian_density(&g)).unwrap();
        // Far from the source the potential is Q r^{-alpha}.
        let r = g.radius(400);
        let q = PI.powf(1.5);
        assert!((v.values()[400].re * r.powf(1.5) / q - 1.0).abs() < 2e-3);
        assert!(riesz_constant(1.5) > 0.0);
    }

    fn erf(x: f64) -> f64 {
        statrs::function::erf::erf(x)
    }
}
