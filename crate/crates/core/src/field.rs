//! Radial fields on the physical and the frequency grid.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::RadialGrid;

pub(crate) const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn check_samples(grid: &RadialGrid, values: &[Complex64]) -> Result<()> {
    if values.len() != grid.n_points() {
        return Err(Error::LengthMismatch {
            expected: grid.n_points(),
            found: values.len(),
        });
    }
    if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite(i));
    }
    Ok(())
}

macro_rules! field_type {
    ($(#[$meta:meta])* $name:ident, $coord:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq)]
        pub struct $name {
            grid: RadialGrid,
            values: Vec<Complex64>,
        }

        impl $name {
            /// Validates the sample count and rejects NaN/Inf.
            pub fn new(grid: RadialGrid, values: Vec<Complex64>) -> Result<Self> {
                check_samples(&grid, &values)?;
                Ok(Self { grid, values })
            }

            pub(crate) fn from_raw(grid: RadialGrid, values: Vec<Complex64>) -> Self {
                debug_assert_eq!(values.len(), grid.n_points());
                Self { grid, values }
            }

            pub fn zeros(grid: &RadialGrid) -> Self {
                Self {
                    values: vec![ZERO; grid.n_points()],
                    grid: grid.clone(),
                }
            }

            /// Samples `f` at every node of the grid.
            pub fn from_fn(grid: &RadialGrid, f: impl Fn(f64) -> Complex64 + Sync) -> Result<Self> {
                let values: Vec<Complex64> = (0..grid.n_points())
                    .into_par_iter()
                    .map(|i| f(grid.$coord(i)))
                    .collect();
                Self::new(grid.clone(), values)
            }

            /// Real-valued variant of [`Self::from_fn`].
            pub fn from_real_fn(grid: &RadialGrid, f: impl Fn(f64) -> f64 + Sync) -> Result<Self> {
                Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
            }

            pub fn grid(&self) -> &RadialGrid {
                &self.grid
            }

            pub fn values(&self) -> &[Complex64] {
                &self.values
            }

            pub fn values_mut(&mut self) -> &mut [Complex64] {
                &mut self.values
            }

            pub fn into_values(self) -> Vec<Complex64> {
                self.values
            }

            pub fn len(&self) -> usize {
                self.values.len()
            }

            pub fn is_empty(&self) -> bool {
                self.values.is_empty()
            }

            /// Node coordinates paired with samples.
            pub fn samples(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
                self.values.iter().enumerate().map(|(i, &v)| (self.grid.$coord(i), v))
            }

            pub fn is_zero(&self) -> bool {
                self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
            }

            /// Pointwise map with access to the node coordinate.
            pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64 + Sync) -> Self {
                let grid = &self.grid;
                let values = self
                    .values
                    .par_iter()
                    .enumerate()
                    .map(|(i, &v)| f(grid.$coord(i), v))
                    .collect();
                Self::from_raw(self.grid.clone(), values)
            }

            /// Pointwise combination of two fields on the same grid.
            pub fn zip_with(
                &self,
                other: &Self,
                f: impl Fn(Complex64, Complex64) -> Complex64 + Sync,
            ) -> Result<Self> {
                if self.grid != other.grid {
                    return Err(Error::GridMismatch);
                }
                let values = self
                    .values
                    .par_iter()
                    .zip(other.values.par_iter())
                    .map(|(&a, &b)| f(a, b))
                    .collect();
                Ok(Self::from_raw(self.grid.clone(), values))
            }

            pub fn scale(&self, c: Complex64) -> Self {
                self.map(|_, v| v * c)
            }

            pub fn conj(&self) -> Self {
                self.map(|_, v| v.conj())
            }

            /// `self + c * other`.
            pub fn add_scaled(&self, c: Complex64, other: &Self) -> Result<Self> {
                self.zip_with(other, |a, b| a + c * b)
            }

            /// Largest sample modulus.
            pub fn max_abs(&self) -> f64 {
                self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
            }
        }

        impl Add for &$name {
            type Output = $name;
            /// Panics when the grids differ; use [`$name::zip_with`] to get an error instead.
            fn add(self, rhs: Self) -> $name {
                self.zip_with(rhs, |a, b| a + b).expect("grid mismatch in field addition")
            }
        }

        impl Sub for &$name {
            type Output = $name;
            fn sub(self, rhs: Self) -> $name {
                self.zip_with(rhs, |a, b| a - b).expect("grid mismatch in field subtraction")
            }
        }

        impl Neg for &$name {
            type Output = $name;
            fn neg(self) -> $name {
                self.map(|_, v| -v)
            }
        }

        impl Mul<Complex64> for &$name {
            type Output = $name;
            fn mul(self, rhs: Complex64) -> $name {
                self.scale(rhs)
            }
        }

        impl Mul<f64> for &$name {
            type Output = $name;
            fn mul(self, rhs: f64) -> $name {
                self.map(|_, v| v * rhs)
            }
        }
    };
}

field_type!(
    /// A radial function `f(|x|)` on R^3 sampled at the physical nodes `r_j`.
    RadialField,
    radius
);

field_type!(
    /// The radial Fourier transform `\hat f(|xi|)` sampled at the frequency
    /// nodes `rho_k`.
    SpectralField,
    frequency
);

impl RadialField {
    /// Pointwise product `self * other`.
    pub fn mul_pointwise(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Pointwise `self * conj(other)`.
    pub fn mul_conj(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b.conj())
    }

    /// `|f|^2` as a (real) field.
    pub fn density(&self) -> Self {
        self.map(|_, v| Complex64::new(v.norm_sqr(), 0.0))
    }
}

impl SpectralField {
    /// Multiplies every sample by `symbol(rho_k)`.
    pub fn apply_symbol(&self, symbol: impl Fn(f64) -> Complex64 + Sync) -> Self {
        self.map(|rho, v| v * symbol(rho))
    }

    /// Real-symbol variant of [`Self::apply_symbol`].
    pub fn apply_real_symbol(&self, symbol: impl Fn(f64) -> f64 + Sync) -> Self {
        self.map(|rho, v| v * symbol(rho))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_wrong_length() {
        let g = RadialGrid::new(256, 8.0).unwrap();
        let mut v = vec![ZERO; 256];
        v[17] = Complex64::new(f64::NAN, 0.0);
        assert_eq!(RadialField::new(g.clone(), v).unwrap_err(), Error::NonFinite(17));
        assert!(matches!(
            RadialField::new(g, vec![ZERO; 3]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn mismatched_grids_do_not_combine() {
        let a = RadialField::zeros(&RadialGrid::new(256, 8.0).unwrap());
        let b = RadialField::zeros(&RadialGrid::new(256, 9.0).unwrap());
        assert_eq!(a.zip_with(&b, |x, _| x).unwrap_err(), Error::GridMismatch);
    }
}
