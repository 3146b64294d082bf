//! Smooth dyadic frequency projectors.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{RadialField, SpectralField};
use crate::grid::RadialGrid;
use crate::transform::{forward_transform, inverse_transform};

/// Dyadic scale `lambda = 2^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicIndex {
    pub exponent: i32,
}

impl DyadicIndex {
    pub const fn new(exponent: i32) -> Self {
        Self { exponent }
    }

    /// Exact powers of two only.
    pub fn from_value(lambda: f64) -> Option<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return None;
        }
        let e = lambda.log2().round() as i32;
        (2f64.powi(e) == lambda).then_some(Self::new(e))
    }

    pub fn value(self) -> f64 {
        2f64.powi(self.exponent)
    }

    pub fn half(self) -> Self {
        Self::new(self.exponent - 1)
    }

    pub fn double(self) -> Self {
        Self::new(self.exponent + 1)
    }

    /// Exponents resolvable on `grid`: `2 rho_min <= lambda <= rho_max / 4`.
    pub fn range_for(grid: &RadialGrid) -> (i32, i32) {
        let lo = (2.0 * grid.rho_min()).log2().ceil() as i32;
        let hi = (0.25 * grid.rho_max()).log2().floor() as i32;
        (lo, hi)
    }

    pub fn check(self, grid: &RadialGrid) -> Result<Self> {
        let (lo, hi) = Self::range_for(grid);
        if self.exponent < lo || self.exponent > hi {
            return Err(Error::DyadicOutOfRange {
                exponent: self.exponent,
                min: 2.0 * grid.rho_min(),
                max: 0.25 * grid.rho_max(),
            });
        }
        Ok(self)
    }
}

impl fmt::Display for DyadicIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// The cutoff `rho` and the annulus bumps derived from it.
///
/// `rho(s) = psi(2 - |s|) / (psi(2 - |s|) + psi(|s| - 1))` with
/// `psi(t) = exp(-1/t)` for `t > 0`; it is exactly 1 on `[-1, 1]` and
/// exactly 0 outside `(-2, 2)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BumpFamily;

fn psi(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

impl BumpFamily {
    pub fn base(&self, s: f64) -> f64 {
        let a = s.abs();
        if a <= 1.0 {
            return 1.0;
        }
        if a >= 2.0 {
            return 0.0;
        }
        let p = psi(2.0 - a);
        p / (p + psi(a - 1.0))
    }

    /// `chi(xi) = rho(|xi|) - rho(2 |xi|)`, supported in `1/2 < |xi| < 2`.
    pub fn annulus(&self, xi: f64) -> f64 {
        self.base(xi) - self.base(2.0 * xi)
    }

    /// `chi_lambda(xi) = chi(xi / lambda)`.
    pub fn chi(&self, lambda: f64, xi: f64) -> f64 {
        self.annulus(xi / lambda)
    }

    /// Symbol of `P_{<= lambda}`.
    pub fn chi_leq(&self, lambda: f64, xi: f64) -> f64 {
        self.base(xi / lambda)
    }

    /// Symbol of `P_{> lambda}`.
    pub fn chi_gt(&self, lambda: f64, xi: f64) -> f64 {
        1.0 - self.base(xi / lambda)
    }

    /// `chi_{lambda/2} + chi_lambda + chi_{2 lambda}`, telescoped. Equal to 1
    /// on the support of `chi_lambda`.
    pub fn chi_tilde(&self, lambda: f64, xi: f64) -> f64 {
        self.base(xi / (2.0 * lambda)) - self.base(4.0 * xi / lambda)
    }
}

pub fn build_bump() -> BumpFamily {
    BumpFamily
}

/// Fields that can be multiplied by a radial frequency symbol.
pub trait FrequencyLocalize: Sized {
    fn grid_ref(&self) -> &RadialGrid;
    fn localize(&self, symbol: impl Fn(f64) -> f64 + Sync) -> Result<Self>;
}

impl FrequencyLocalize for SpectralField {
    fn grid_ref(&self) -> &RadialGrid {
        self.grid()
    }

    fn localize(&self, symbol: impl Fn(f64) -> f64 + Sync) -> Result<Self> {
        Ok(self.apply_real_symbol(symbol))
    }
}

impl FrequencyLocalize for RadialField {
    fn grid_ref(&self) -> &RadialGrid {
        self.grid()
    }

    fn localize(&self, symbol: impl Fn(f64) -> f64 + Sync) -> Result<Self> {
        inverse_transform(&forward_transform(self)?.apply_real_symbol(symbol))
    }
}

/// `P_lambda f`.
pub fn project<F: FrequencyLocalize>(f: &F, lambda: DyadicIndex) -> Result<F> {
    let l = lambda.check(f.grid_ref())?.value();
    f.localize(|xi| BumpFamily.chi(l, xi))
}

/// `P_{<= lambda} f`.
pub fn project_leq<F: FrequencyLocalize>(f: &F, lambda: DyadicIndex) -> Result<F> {
    let l = lambda.check(f.grid_ref())?.value();
    f.localize(|xi| BumpFamily.chi_leq(l, xi))
}

/// `P_{> lambda} f`.
pub fn project_gt<F: FrequencyLocalize>(f: &F, lambda: DyadicIndex) -> Result<F> {
    let l = lambda.check(f.grid_ref())?.value();
    f.localize(|xi| BumpFamily.chi_gt(l, xi))
}

/// `\tilde P_lambda f`.
pub fn project_tilde<F: FrequencyLocalize>(f: &F, lambda: DyadicIndex) -> Result<F> {
    let l = lambda.check(f.grid_ref())?.value();
    f.localize(|xi| BumpFamily.chi_tilde(l, xi))
}
