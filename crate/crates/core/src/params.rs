use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Equation parameters: dispersion exponent `alpha` and coupling `sigma`.
/// The space dimension is fixed to 3.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub sigma: f64,
}

impl ModelParams {
    /// Parameters for the evolution problem, `1 < alpha <= 2`.
    pub fn new(alpha: f64, sigma: f64) -> Result<Self> {
        let p = Self { alpha, sigma };
        p.validate_dynamics()?;
        Ok(p)
    }

    /// Parameters for the estimate experiments, which also allow `alpha = 1`.
    pub fn for_estimates(alpha: f64, sigma: f64) -> Result<Self> {
        let p = Self { alpha, sigma };
        p.validate_estimates()?;
        Ok(p)
    }

    pub fn validate_dynamics(&self) -> Result<()> {
        self.check_sigma()?;
        if !(self.alpha > 1.0 && self.alpha <= 2.0) {
            return Err(invalid("alpha", format!("{} not in (1, 2]", self.alpha)));
        }
        Ok(())
    }

    pub fn validate_estimates(&self) -> Result<()> {
        self.check_sigma()?;
        if !(1.0..=2.0).contains(&self.alpha) {
            return Err(invalid("alpha", format!("{} not in [1, 2]", self.alpha)));
        }
        Ok(())
    }

    fn check_sigma(&self) -> Result<()> {
        if !self.sigma.is_finite() {
            return Err(invalid("sigma", "must be finite"));
        }
        Ok(())
    }

    /// Free dispersion relation `rho^alpha`.
    #[inline]
    pub fn dispersion(&self, rho: f64) -> f64 {
        rho.powf(self.alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_ranges() {
        assert!(ModelParams::new(1.5, 1.0).is_ok());
        assert!(ModelParams::new(2.0, -1.0).is_ok());
        assert!(ModelParams::new(1.0, 1.0).is_err());
        assert!(ModelParams::for_estimates(1.0, 1.0).is_ok());
        assert!(ModelParams::for_estimates(2.1, 1.0).is_err());
        assert!(ModelParams::new(1.5, f64::NAN).is_err());
    }
}
