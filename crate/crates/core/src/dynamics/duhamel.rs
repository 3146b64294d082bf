use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::field::{RadialField, SpectralField};
use crate::norms::l2_norm;
use crate::params::ModelParams;
use crate::riesz::{hartree_trilinear, RieszKernel};
use crate::transform::{forward_transform, inverse_transform};

use super::propagator::free_propagate_spectral;
use super::trajectory::Trajectory;

fn check_meshes(u1: &Trajectory, u2: &Trajectory, u3: &Trajectory) -> Result<()> {
    if !(u1.shares_mesh(u2) && u1.shares_mesh(u3)) {
        return Err(Error::MeshMismatch("trajectories are sampled differently".into()));
    }
    if u1.times()[0].abs() > 1e-12 {
        return Err(Error::MeshMismatch("time mesh must start at t = 0".into()));
    }
    Ok(())
}

/// `J(u1, u2, u3)(t_m)` at every mesh time `t_m`:
///
/// ```text
/// J(t) = \int_0^t S(t - s) [(|x|^{-alpha} * u1 conj(u2)) u3](s) ds
/// ```
///
/// by the trapezoid rule on the shared mesh, via the recurrence
/// `W_m = S(h_m) [W_{m-1} + h_m/2 N_{m-1}] + h_m/2 N_m`.
pub fn duhamel_j_all(u1: &Trajectory, u2: &Trajectory, u3: &Trajectory, params: &ModelParams) -> Result<Vec<RadialField>> {
    check_meshes(u1, u2, u3)?;
    let kernel = RieszKernel::new(u1.grid(), params.alpha)?;
    duhamel_with_kernel(&kernel, u1, u2, u3, params, u1.len())
}

fn duhamel_with_kernel(
    kernel: &RieszKernel,
    u1: &Trajectory,
    u2: &Trajectory,
    u3: &Trajectory,
    params: &ModelParams,
    upto: usize,
) -> Result<Vec<RadialField>> {
    let times = u1.times();
    let nonlinear = |m: usize| -> Result<SpectralField> {
        forward_transform(&hartree_trilinear(kernel, &u1.states()[m], &u2.states()[m], &u3.states()[m])?)
    };
    let grid = u1.grid();
    let mut out = Vec::with_capacity(upto);
    let mut w = SpectralField::zeros(grid);
    out.push(RadialField::zeros(grid));
    let mut n_prev = nonlinear(0)?;
    for m in 1..upto {
        let h = times[m] - times[m - 1];
        let n_cur = nonlinear(m)?;
        let half = Complex64::new(0.5 * h, 0.0);
        w = free_propagate_spectral(&w.add_scaled(half, &n_prev)?, h, params.alpha)?.add_scaled(half, &n_cur)?;
        out.push(inverse_transform(&w)?);
        n_prev = n_cur;
    }
    Ok(out)
}

/// `J(u1, u2, u3)(t)`; `t` must be one of the shared sample times.
pub fn duhamel_j(u1: &Trajectory, u2: &Trajectory, u3: &Trajectory, t: f64, params: &ModelParams) -> Result<RadialField> {
    check_meshes(u1, u2, u3)?;
    let idx = u1
        .index_of(t)
        .ok_or_else(|| Error::MeshMismatch(format!("t = {t} is not a mesh time")))?;
    let kernel = RieszKernel::new(u1.grid(), params.alpha)?;
    let mut all = duhamel_with_kernel(&kernel, u1, u2, u3, params, idx + 1)?;
    Ok(all.pop().expect("at least one sample"))
}

/// Controls for [`picard_iterate_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct PicardOptions {
    pub steps: usize,
    pub k_max: usize,
    /// Iteration stops once `d_k` falls below `stop_rel * ||phi||`.
    pub stop_rel: f64,
    /// Keep every iterate (otherwise only the first and the last).
    pub keep_iterates: bool,
}

impl PicardOptions {
    pub fn new(steps: usize, k_max: usize) -> Self {
        Self { steps, k_max, stop_rel: 1e-13, keep_iterates: true }
    }
}

/// Iterates and the successive differences `d_k = sup_t ||u^{k+1} - u^k||`.
#[derive(Clone, Debug)]
pub struct PicardResult {
    pub iterates: Vec<Trajectory>,
    pub differences: Vec<f64>,
    /// Differences below this level are round-off and carry no ratio information.
    pub floor: f64,
}

impl PicardResult {
    pub fn last(&self) -> &Trajectory {
        self.iterates.last().expect("at least the free flow")
    }

    /// `d_{k+1} / d_k` for consecutive differences above the round-off floor.
    pub fn ratios(&self) -> Vec<f64> {
        self.differences
            .windows(2)
            .filter(|w| w[0] > self.floor)
            .map(|w| w[1] / w[0])
            .collect()
    }

    pub fn converged(&self) -> bool {
        self.differences.last().is_some_and(|&d| d <= self.floor)
    }
}

/// Picard iteration with a mesh of spacing about 0.05.
pub fn picard_iterate(f: &RadialField, t_final: f64, params: &ModelParams, k_max: usize) -> Result<PicardResult> {
    let steps = ((t_final / 0.05).ceil() as usize).max(8);
    picard_iterate_with(f, t_final, params, &PicardOptions::new(steps, k_max))
}

/// `u^0 = S(t) phi`, `u^{k+1} = S(t) phi + i sigma J(u^k, u^k, u^k)` on a
/// uniform mesh of `opts.steps` intervals.
///
/// Fails with [`Error::Divergence`] when `d_k` grows twice in a row.
pub fn picard_iterate_with(f: &RadialField, t_final: f64, params: &ModelParams, opts: &PicardOptions) -> Result<PicardResult> {
    params.validate_dynamics()?;
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(invalid("t_final", "must be positive"));
    }
    if opts.steps == 0 {
        return Err(invalid("steps", "must be at least 1"));
    }
    let times: Vec<f64> = (0..=opts.steps).map(|m| t_final * m as f64 / opts.steps as f64).collect();
    let free = super::propagator::free_trajectory(f, &times, params)?;
    let floor = opts.stop_rel * l2_norm(f);
    let kernel = RieszKernel::new(f.grid(), params.alpha)?;
    let coupling = Complex64::new(0.0, params.sigma);

    let mut iterates = vec![free.clone()];
    let mut current = free.clone();
    let mut differences = Vec::new();
    for _ in 0..opts.k_max {
        let duh = if params.sigma == 0.0 {
            vec![RadialField::zeros(f.grid()); times.len()]
        } else {
            duhamel_with_kernel(&kernel, &current, &current, &current, params, times.len())?
        };
        let states = free
            .states()
            .iter()
            .zip(&duh)
            .map(|(s, j)| s.add_scaled(coupling, j))
            .collect::<Result<Vec<_>>>()?;
        let d = states
            .iter()
            .zip(current.states())
            .map(|(a, b)| l2_norm(&(a - b)))
            .fold(0.0, f64::max);
        differences.push(d);
        let next = Trajectory::from_states(times.clone(), states, *params)?.with_diagnostics(t_final / opts.steps as f64, None, Vec::new());
        if opts.keep_iterates {
            iterates.push(next.clone());
        }
        current = next;
        let n = differences.len();
        if n >= 3 && differences[n - 3] > 1e3 * floor && differences[n - 1] > differences[n - 2] && differences[n - 2] > differences[n - 3] {
            return Err(Error::Divergence(differences));
        }
        if d <= floor {
            break;
        }
    }
    if !opts.keep_iterates && !differences.is_empty() {
        iterates.push(current);
    }
    Ok(PicardResult { iterates, differences, floor })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve, free_trajectory};
    use crate::grid::RadialGrid;

    fn setup(amp: f64) -> (RadialField, ModelParams, Vec<f64>) {
        let g = RadialGrid::new(512, 32.0).unwrap();
        let f = RadialField::from_real_fn(&g, |r| amp * (-0.5 * r * r).exp()).unwrap();
        let times: Vec<f64> = (0..=20).map(|m| m as f64 * 0.05).collect();
        (f, ModelParams::new(1.5, 1.0).unwrap(), times)
    }

    #[test]
    fn vanishes_with_zero_slot_and_is_homogeneous() {
        let (f, p, times) = setup(0.3);
        let u = free_trajectory(&f, &times, &p).unwrap();
        let z = free_trajectory(&RadialField::zeros(f.grid()), &times, &p).unwrap();
        assert!(duhamel_j(&u, &u, &z, 1.0, &p).unwrap().is_zero());
        let c = Complex64::new(0.6, -0.8) * 1.3;
        let cu = free_trajectory(&f.scale(c), &times, &p).unwrap();
        let a = duhamel_j(&cu, &cu, &cu, 1.0, &p).unwrap();
        let b = duhamel_j(&u, &u, &u, 1.0, &p).unwrap().scale(c * c.norm_sqr());
        assert!(l2_norm(&(&a - &b)) < 1e-8 * l2_norm(&b));
    }

    #[test]
    fn rejects_off_mesh_times() {
        let (f, p, times) = setup(0.3);
        let u = free_trajectory(&f, &times, &p).unwrap();
        assert!(matches!(duhamel_j(&u, &u, &u, 0.33, &p), Err(Error::MeshMismatch(_))));
        let v = free_trajectory(&f, &times[..10], &p).unwrap();
        assert!(matches!(duhamel_j(&u, &u, &v, 0.25, &p), Err(Error::MeshMismatch(_))));
    }

    #[test]
    fn trapezoid_error_is_second_order() {
        let (f, p, _) = setup(0.3);
        let at = |steps: usize| {
            let times: Vec<f64> = (0..=steps).map(|m| m as f64 / steps as f64).collect();
            let u = free_trajectory(&f, &times, &p).unwrap();
            duhamel_j(&u, &u, &u, 1.0, &p).unwrap()
        };
        let fine = at(160);
        let e1 = l2_norm(&(&at(10) - &fine));
        let e2 = l2_norm(&(&at(20) - &fine));
        let order = (e1 / e2).log2();
        assert!((order - 2.0).abs() < 0.2, "order {order}");
    }

    #[test]
    fn uncoupled_iteration_stops_at_once() {
        let (f, _, _) = setup(0.3);
        let p = ModelParams::new(1.5, 0.0).unwrap();
        let res = picard_iterate(&f, 1.0, &p, 5).unwrap();
        assert_eq!(res.differences, vec![0.0]);
        assert!(res.converged());
    }

    #[test]
    fn small_data_contract_and_match_splitting() {
        let (f, p, _) = setup(0.2);
        let opts = PicardOptions::new(40, 12);
        let res = picard_iterate_with(&f, 2.0, &p, &opts).unwrap();
        assert!(res.ratios().iter().all(|&q| q < 0.5), "{:?}", res.differences);
        let split = evolve(&f, 2.0, &p, 0.05).unwrap();
        let gap = l2_norm(&(res.last().final_state() - split.final_state()));
        assert!(gap < 1e-3 * l2_norm(&f), "gap {gap}");
        // fixed-point residual
        let last = res.last();
        let again = duhamel_j_all(last, last, last, &p).unwrap();
        let free = free_trajectory(&f, last.times(), &p).unwrap();
        let resid = last
            .states()
            .iter()
            .zip(free.states().iter().zip(&again))
            .map(|(u, (s, j))| l2_norm(&(&s.add_scaled(Complex64::new(0.0, p.sigma), j).unwrap() - u)))
            .fold(0.0, f64::max);
        assert!(resid < 1e-10, "{resid}");
    }
}
