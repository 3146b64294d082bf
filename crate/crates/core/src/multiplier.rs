//! Radial Fourier multipliers.

use crate::field::SpectralField;

/// `(-Delta)^beta`, i.e. multiplication by `rho^{2 beta}`.
///
/// The frequency grid starts at `rho_1 > 0`, so negative powers are never
/// evaluated at the origin.
pub fn apply_fractional_laplacian_power(spec: &SpectralField, beta: f64) -> SpectralField {
    if beta == 0.0 {
        return spec.clone();
    }
    spec.apply_real_symbol(|rho| rho.powf(2.0 * beta))
}
