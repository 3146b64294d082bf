//! Uniform radial grids and the sine-transform plans attached to them.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Smallest admissible number of radial nodes.
pub const MIN_POINTS: usize = 256;

/// Zero-padding factor used by free-space convolutions.
pub(crate) const PAD_FACTOR: usize = 4;

/// Type-I discrete sine transform of length `len`, computed through a
/// complex FFT of the odd extension (length `2 * (len + 1)`).
///
/// Unnormalized: `X_k = sum_j x_j sin(pi (j+1) (k+1) / (len+1))`.
#[derive(Clone)]
pub(crate) struct DstPlan {
    len: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl DstPlan {
    pub(crate) fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(2 * (len + 1));
        Self { len, fft }
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }

    /// Transforms `data[..len]` in place. Real and imaginary parts are
    /// transformed independently since the kernel is real.
    pub(crate) fn apply(&self, data: &mut [Complex64]) {
        let n = self.len;
        debug_assert_eq!(data.len(), n);
        let m = 2 * (n + 1);
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for (j, &x) in data.iter().enumerate() {
            buf[j + 1] = x;
            buf[m - j - 1] = -x;
        }
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        self.fft.process_with_scratch(&mut buf, &mut scratch);
        // Y_k = -2i * DST_k
        for (k, out) in data.iter_mut().enumerate() {
            let y = buf[k + 1];
            *out = Complex64::new(-0.5 * y.im, 0.5 * y.re);
        }
    }
}

/// Uniform radial grid `r_j = j h`, `j = 1..=n`, with `h = r_max / n`.
///
/// The conjugate frequency nodes are `rho_k = k pi / r_max`, `k = 1..=n`.
/// Neither grid contains the origin. The outermost node `r = r_max` is a
/// Dirichlet wall: every sine mode vanishes there, and likewise every mode
/// vanishes at `rho_max`, so both end samples carry no information.
#[derive(Clone)]
pub struct RadialGrid {
    n_points: usize,
    r_max: f64,
    dst: DstPlan,
    padded: Arc<OnceLock<DstPlan>>,
}

impl RadialGrid {
    pub fn new(n_points: usize, r_max: f64) -> Result<Self> {
        if n_points < MIN_POINTS || !n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_points must be a power of two >= {MIN_POINTS}, got {n_points}"
            )));
        }
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "r_max must be positive and finite, got {r_max}"
            )));
        }
        Ok(Self {
            n_points,
            r_max,
            dst: DstPlan::new(n_points - 1),
            padded: Arc::new(OnceLock::new()),
        })
    }

    /// Desk-scale default: 2048 nodes on `[0, 64]`.
    pub fn desk() -> Self {
        Self::new(2048, 64.0).expect("default grid is valid")
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Physical spacing `h`.
    pub fn spacing(&self) -> f64 {
        self.r_max / self.n_points as f64
    }

    /// Frequency spacing `pi / r_max`.
    pub fn freq_spacing(&self) -> f64 {
        PI / self.r_max
    }

    pub fn rho_max(&self) -> f64 {
        self.n_points as f64 * self.freq_spacing()
    }

    /// Smallest nonzero frequency node.
    pub fn rho_min(&self) -> f64 {
        self.freq_spacing()
    }

    /// Radius of node `index` (zero based, so `index = 0` is `r_1 = h`).
    #[inline]
    pub fn radius(&self, index: usize) -> f64 {
        (index + 1) as f64 * self.spacing()
    }

    /// Frequency of node `index` (zero based).
    #[inline]
    pub fn frequency(&self, index: usize) -> f64 {
        (index + 1) as f64 * self.freq_spacing()
    }

    pub fn radii(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(|j| self.radius(j))
    }

    pub fn frequencies(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(|k| self.frequency(k))
    }

    /// Trapezoid weights for `4 pi r^2 dr`. The origin contributes nothing
    /// and the wall node gets half weight.
    #[inline]
    pub fn physical_weight(&self, index: usize) -> f64 {
        let r = self.radius(index);
        let w = 4.0 * PI * r * r * self.spacing();
        if index + 1 == self.n_points {
            0.5 * w
        } else {
            w
        }
    }

    /// Weights for `rho^2 d rho / (2 pi^2)`, the radial form of
    /// `(2 pi)^-3 d xi`. With these weights the discrete Plancherel
    /// identity holds exactly for fields vanishing at the wall.
    #[inline]
    pub fn spectral_weight(&self, index: usize) -> f64 {
        let rho = self.frequency(index);
        rho * rho * self.freq_spacing() / (2.0 * PI * PI)
    }

    pub(crate) fn dst(&self) -> &DstPlan {
        &self.dst
    }

    /// Sine transform on the zero-padded grid with `PAD_FACTOR * n` nodes.
    pub(crate) fn padded_dst(&self) -> &DstPlan {
        self.padded
            .get_or_init(|| DstPlan::new(PAD_FACTOR * self.n_points - 1))
    }

    /// Largest frequency a band may reach without aliasing in a product of
    /// two fields (half the grid bandwidth).
    pub fn product_bandwidth(&self) -> f64 {
        0.5 * self.rho_max()
    }
}

impl PartialEq for RadialGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n_points == other.n_points && self.r_max.to_bits() == other.r_max.to_bits()
    }
}

impl fmt::Debug for RadialGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialGrid")
            .field("n_points", &self.n_points)
            .field("r_max", &self.r_max)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dst(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        v * (PI * ((j + 1) * (k + 1)) as f64 / (n + 1) as f64).sin()
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn dst_matches_direct_sum() {
        let n = 37;
        let plan = DstPlan::new(n);
        let x: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new((j as f64 * 0.37).sin(), (j as f64).cos() * 0.2))
            .collect();
        let mut y = x.clone();
        plan.apply(&mut y);
        for (a, b) in y.iter().zip(naive_dst(&x)) {
            assert!((a - b).norm() < 1e-11, "{a} vs {b}");
        }
    }

    #[test]
    fn dst_is_self_inverse_up_to_scale() {
        let n = 255;
        let plan = DstPlan::new(n);
        let x: Vec<Complex64> = (0..n).map(|j| Complex64::new(j as f64, -1.0)).collect();
        let mut y = x.clone();
        plan.apply(&mut y);
        plan.apply(&mut y);
        let scale = 2.0 / (n + 1) as f64;
        for (a, b) in y.iter().zip(&x) {
            assert!((a * scale - b).norm() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(RadialGrid::new(1000, 10.0).is_err());
        assert!(RadialGrid::new(128, 10.0).is_err());
        assert!(RadialGrid::new(256, 0.0).is_err());
        assert!(RadialGrid::new(256, f64::NAN).is_err());
        assert!(RadialGrid::new(256, 10.0).is_ok());
    }

    #[test]
    fn frequency_grid_layout() {
        let g = RadialGrid::new(2048, 64.0).unwrap();
        assert!((g.rho_max() - 2048.0 * PI / 64.0).abs() < 1e-12);
        assert!((g.frequency(0) - PI / 64.0).abs() < 1e-15);
        assert!((g.radius(2047) - 64.0).abs() < 1e-12);
        assert_eq!(g, RadialGrid::desk());
    }
}
