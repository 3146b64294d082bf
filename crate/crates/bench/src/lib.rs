//! Shared fixtures for the kernel benchmarks.

use hartree_core::{RadialField, RadialGrid};
use num_complex::Complex64;

/// Grid sizes swept by the transform benchmarks.
pub const SIZES: [usize; 3] = [1024, 4096, 16384];

/// A complex Gaussian with a slow phase, on `n` points over `[0, 64]`.
pub fn fixture(n: usize) -> RadialField {
    let grid = RadialGrid::new(n, 64.0).expect("valid bench grid");
    RadialField::from_fn(&grid, |r| Complex64::from_polar((-0.5 * r * r).exp(), 0.3 * r)).expect("finite samples")
}
