//! Step atoms and their `V^2` norms.

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{free_propagate, Trajectory};
use crate::error::{invalid, Error, Result};
use crate::field::RadialField;
use crate::grid::RadialGrid;
use crate::norms::inner_product;
use crate::params::ModelParams;

/// `a(t) = sum_k 1_{[t_{k-1}, t_k)}(t) S(t) phi_k`, zero outside `[t_0, t_K)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepAtom {
    partition: Vec<f64>,
    pieces: Vec<RadialField>,
    order: f64,
}

impl StepAtom {
    /// `partition` has `K + 1` increasing points and `pieces` has `K` fields.
    pub fn new(partition: Vec<f64>, pieces: Vec<RadialField>, order: f64) -> Result<Self> {
        if pieces.is_empty() || partition.len() != pieces.len() + 1 {
            return Err(invalid("partition", format!("{} points for {} pieces", partition.len(), pieces.len())));
        }
        if partition.iter().any(|t| !t.is_finite()) || partition.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("partition", "must be finite and strictly increasing"));
        }
        if !(order >= 1.0) {
            return Err(invalid("order", format!("{order} < 1")));
        }
        let grid = pieces[0].grid();
        if pieces.iter().any(|p| p.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { partition, pieces, order })
    }

    /// `1_{[t0, t1)}(t) S(t) phi`.
    pub fn single(phi: RadialField, t0: f64, t1: f64) -> Result<Self> {
        Self::new(vec![t0, t1], vec![phi], 2.0)
    }

    pub fn partition(&self) -> &[f64] {
        &self.partition
    }

    pub fn pieces(&self) -> &[RadialField] {
        &self.pieces
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn grid(&self) -> &RadialGrid {
        self.pieces[0].grid()
    }

    pub fn span(&self) -> (f64, f64) {
        (self.partition[0], *self.partition.last().unwrap())
    }

    /// Index of the piece active at `t`.
    pub fn piece_index(&self, t: f64) -> Option<usize> {
        if t < self.partition[0] || t >= *self.partition.last().unwrap() {
            return None;
        }
        Some(self.partition.partition_point(|&s| s <= t) - 1)
    }

    /// Pullback `S(-t) a(t)`: the active piece, or zero.
    pub fn pullback(&self, t: f64) -> RadialField {
        match self.piece_index(t) {
            Some(k) => self.pieces[k].clone(),
            None => RadialField::zeros(self.grid()),
        }
    }

    pub fn eval(&self, t: f64, params: &ModelParams) -> Result<RadialField> {
        match self.piece_index(t) {
            Some(k) => free_propagate(&self.pieces[k], t, params),
            None => Ok(RadialField::zeros(self.grid())),
        }
    }

    /// `(sum_k ||phi_k||^p)^{1/p}`.
    pub fn lp_size(&self) -> Result<f64> {
        let mut s = 0.0;
        for p in &self.pieces {
            s += inner_product(p, p)?.re.sqrt().powf(self.order);
        }
        Ok(s.powf(1.0 / self.order))
    }

    pub fn map_pieces(&self, f: impl Fn(&RadialField) -> Result<RadialField>) -> Result<Self> {
        let pieces = self.pieces.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(Self { partition: self.partition.clone(), pieces, order: self.order })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { partition: self.partition.clone(), pieces: self.pieces.iter().map(|p| p.scale(c)).collect(), order: self.order }
    }

    /// Sum on the merged partition; gaps between the spans carry zero pieces.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid() != other.grid() {
            return Err(Error::GridMismatch);
        }
        let mut points: Vec<f64> = self.partition.iter().chain(&other.partition).copied().collect();
        points.sort_by(f64::total_cmp);
        points.dedup();
        let mut pieces = Vec::with_capacity(points.len() - 1);
        for w in points.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            pieces.push(&self.pullback(mid) + &other.pullback(mid));
        }
        Self::new(points, pieces, self.order.max(other.order))
    }

    /// Subintervals of the common refinement of both partitions.
    pub fn merged_intervals(&self, other: &Self) -> Vec<(f64, f64, usize, usize)> {
        let mut points: Vec<f64> = self.partition.iter().chain(&other.partition).copied().collect();
        points.sort_by(f64::total_cmp);
        points.dedup();
        points
            .windows(2)
            .filter_map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                Some((w[0], w[1], self.piece_index(mid)?, other.piece_index(mid)?))
            })
            .collect()
    }
}

/// `sup_{i_0 < ... < i_m} (sum ||c_{i_j} - c_{i_{j-1}}||^2)^{1/2}` over an
/// ordered list, from its Gram matrix.
fn chain_sup(gram: &[Vec<Complex64>]) -> f64 {
    let n = gram.len();
    let mut best = vec![0.0f64; n];
    for j in 0..n {
        for i in 0..j {
            let d = (gram[i][i].re + gram[j][j].re - 2.0 * gram[i][j].re).max(0.0);
            best[j] = best[j].max(best[i] + d);
        }
    }
    best.into_iter().fold(0.0, f64::max).sqrt()
}

fn gram(values: &[&RadialField]) -> Result<Vec<Vec<Complex64>>> {
    let n = values.len();
    let mut g = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in i..n {
            let v = inner_product(values[i], values[j])?;
            g[i][j] = v;
            g[j][i] = v.conj();
        }
    }
    Ok(g)
}

/// Exact `V^2` norm: the pullback is `0, phi_1, ..., phi_K, 0`, so the
/// supremum over partitions is a longest-chain problem on that sequence.
pub fn v2_norm_exact(atom: &StepAtom) -> Result<f64> {
    let zero = RadialField::zeros(atom.grid());
    let mut seq: Vec<&RadialField> = vec![&zero];
    seq.extend(atom.pieces.iter());
    seq.push(&zero);
    Ok(chain_sup(&gram(&seq)?))
}

/// Lower bound for the `V^2` norm of a sampled trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct V2Lower {
    pub value: f64,
    pub samples_used: usize,
    /// True when the trajectory had more samples than the budget allowed.
    pub budget_exhausted: bool,
}

/// Certified lower bound over partitions drawn from the saved times, with
/// zero before the first and after the last sample. At most `budget`
/// samples enter the search, spread evenly and always including both ends.
pub fn v2_norm_lower(traj: &Trajectory, budget: usize) -> Result<V2Lower> {
    if budget < 2 {
        return Err(invalid("budget", "need at least two samples"));
    }
    let n = traj.len();
    let idx: Vec<usize> = if n <= budget {
        (0..n).collect()
    } else {
        let mut v: Vec<usize> = (0..budget).map(|k| (k * (n - 1) + (budget - 1) / 2) / (budget - 1)).collect();
        v[budget - 1] = n - 1;
        v.dedup();
        v
    };
    let params = traj.params();
    let pulled = idx
        .iter()
        .map(|&i| free_propagate(&traj.states()[i], -traj.times()[i], params))
        .collect::<Result<Vec<_>>>()?;
    let zero = RadialField::zeros(traj.grid());
    let mut seq: Vec<&RadialField> = vec![&zero];
    seq.extend(pulled.iter());
    seq.push(&zero);
    Ok(V2Lower { value: chain_sup(&gram(&seq)?), samples_used: idx.len(), budget_exhausted: n > budget })
}
