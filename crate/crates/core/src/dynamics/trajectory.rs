use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::field::RadialField;
use crate::grid::RadialGrid;
use crate::norms::mass;
use crate::params::ModelParams;

/// A discrete solution curve `t_m -> u(t_m)` on one grid.
#[derive(Clone, Debug)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<RadialField>,
    params: ModelParams,
    dt: f64,
    mass: Vec<f64>,
    energy: Option<Vec<f64>>,
    warnings: Vec<String>,
}

/// Per-sample diagnostics in serializable form.
#[derive(Clone, Debug, Serialize)]
pub struct TrajectorySample {
    pub time: f64,
    pub mass: f64,
    pub energy: Option<f64>,
}

impl Trajectory {
    /// Builds a trajectory from samples; `dt` is taken as the largest gap.
    pub fn from_states(times: Vec<f64>, states: Vec<RadialField>, params: ModelParams) -> Result<Self> {
        if times.is_empty() || times.len() != states.len() {
            return Err(Error::LengthMismatch { expected: times.len(), found: states.len() });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
            return Err(invalid("times", "must be finite and strictly increasing"));
        }
        let grid = states[0].grid();
        if states.iter().any(|s| s.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        let dt = times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        let mass = states.iter().map(mass).collect();
        Ok(Self { times, states, params, dt, mass, energy: None, warnings: Vec::new() })
    }

    pub(crate) fn with_diagnostics(mut self, dt: f64, energy: Option<Vec<f64>>, warnings: Vec<String>) -> Self {
        self.dt = dt;
        self.energy = energy;
        self.warnings = warnings;
        self
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[RadialField] {
        &self.states
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn grid(&self) -> &RadialGrid {
        self.states[0].grid()
    }

    /// Step size used to produce the trajectory.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn energy(&self) -> Option<&[f64]> {
        self.energy.as_deref()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn final_state(&self) -> &RadialField {
        self.states.last().expect("trajectories are never empty")
    }

    /// `max_m |M(t_m) - M(t_0)| / M(t_0)`.
    pub fn relative_mass_drift(&self) -> f64 {
        relative_drift(&self.mass)
    }

    /// Same for the energy, if it was recorded.
    pub fn relative_energy_drift(&self) -> Option<f64> {
        self.energy.as_deref().map(relative_drift)
    }

    /// Index of the stored sample at time `t` (tolerance `1e-9 (1 + |t|)`).
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let tol = 1e-9 * (1.0 + t.abs());
        self.times.iter().position(|&s| (s - t).abs() <= tol)
    }

    pub fn state_at(&self, t: f64) -> Result<&RadialField> {
        self.index_of(t)
            .map(|i| &self.states[i])
            .ok_or_else(|| Error::MeshMismatch(format!("t = {t} is not a sample time")))
    }

    pub fn samples(&self) -> Vec<TrajectorySample> {
        (0..self.len())
            .map(|i| TrajectorySample {
                time: self.times[i],
                mass: self.mass[i],
                energy: self.energy.as_ref().map(|e| e[i]),
            })
            .collect()
    }

    /// True when both trajectories are sampled at the same times on the same grid.
    pub fn shares_mesh(&self, other: &Self) -> bool {
        self.grid() == other.grid()
            && self.times.len() == other.times.len()
            && self.times.iter().zip(&other.times).all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + a.abs()))
    }
}

fn relative_drift(xs: &[f64]) -> f64 {
    let x0 = xs[0];
    let scale = if x0 != 0.0 { x0.abs() } else { 1.0 };
    xs.iter().map(|x| (x - x0).abs()).fold(0.0, f64::max) / scale
}
