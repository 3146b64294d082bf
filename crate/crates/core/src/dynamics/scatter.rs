use crate::error::Result;
use crate::field::RadialField;
use crate::norms::l2_norm;

use super::propagator::free_propagate;
use super::trajectory::Trajectory;

/// Pullbacks `S(-t_i) u(t_i)` at probe times and their mutual distances.
#[derive(Clone, Debug)]
pub struct ScatterRecord {
    pub probe_times: Vec<f64>,
    pub pullbacks: Vec<RadialField>,
    /// `distances[i][j] = ||S(-t_i) u(t_i) - S(-t_j) u(t_j)||_{L^2}`.
    pub distances: Vec<Vec<f64>>,
}

impl ScatterRecord {
    /// The last pullback, the best available approximation of the
    /// asymptotic state.
    pub fn asymptotic_state(&self) -> &RadialField {
        self.pullbacks.last().expect("at least one probe")
    }

    /// Distances between consecutive probes.
    pub fn consecutive_distances(&self) -> Vec<f64> {
        (1..self.probe_times.len()).map(|i| self.distances[i - 1][i]).collect()
    }
}

/// Probe times must be sample times of `traj`.
pub fn scattering_extract(traj: &Trajectory, probe_times: &[f64]) -> Result<ScatterRecord> {
    let params = traj.params();
    let pullbacks = probe_times
        .iter()
        .map(|&t| free_propagate(traj.state_at(t)?, -t, params))
        .collect::<Result<Vec<_>>>()?;
    let k = pullbacks.len();
    let mut distances = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let d = l2_norm(&(&pullbacks[i] - &pullbacks[j]));
            distances[i][j] = d;
            distances[j][i] = d;
        }
    }
    Ok(ScatterRecord { probe_times: probe_times.to_vec(), pullbacks, distances })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve_with, EvolveOptions};
    use crate::grid::RadialGrid;
    use crate::params::ModelParams;

    #[test]
    fn free_flow_has_constant_pullback() {
        let g = RadialGrid::new(1024, 64.0).unwrap();
        let f = RadialField::from_real_fn(&g, |r| (-0.5 * r * r).exp()).unwrap();
        let p = ModelParams::new(1.5, 0.0).unwrap();
        let mut o = EvolveOptions::new(0.5);
        o.record_energy = false;
        let traj = evolve_with(&f, 4.0, &p, &o).unwrap();
        let rec = scattering_extract(&traj, &[1.0, 2.0, 4.0]).unwrap();
        for row in &rec.distances {
            assert!(row.iter().all(|&d| d < 1e-10));
        }
        assert!(scattering_extract(&traj, &[1.25]).is_err());
    }
}
