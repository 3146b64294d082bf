//! Bilinear estimates for step atoms in place of free waves.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::field::SpectralField;
use crate::grid::RadialGrid;
use crate::littlewood_paley::{BumpFamily, DyadicIndex};
use crate::transform::{forward_transform, inverse_transform};

use super::bilinear::{interval_integrals, scan_window, OutputWeight, SecondFactor, WindowOptions};
use super::report::DyadicRecord;
use super::vnorm::{v2_norm_exact, StepAtom};

fn project_atom(atom: &StepAtom, lambda: f64) -> Result<StepAtom> {
    atom.map_pieces(|p| inverse_transform(&forward_transform(p)?.apply_real_symbol(|rho| BumpFamily.chi(lambda, rho))))
}

fn spectra(atom: &StepAtom) -> Result<Vec<SpectralField>> {
    atom.pieces().iter().map(forward_transform).collect()
}

/// `\int ||w_k(D)(u conj(v))||^2 dt` over the common refinement of both partitions.
fn atom_pair_integrals(u: &StepAtom, v: &StepAtom, weights: &[&(dyn Fn(f64) -> f64 + Sync)], alpha: f64, dt: f64) -> Result<Vec<f64>> {
    if u.grid() != v.grid() {
        return Err(Error::GridMismatch);
    }
    let (su, sv) = (spectra(u)?, spectra(v)?);
    let mut total = vec![0.0; weights.len()];
    for (a, b, i, j) in u.merged_intervals(v) {
        if su[i].is_zero() || sv[j].is_zero() {
            continue;
        }
        let part = interval_integrals(&su[i], &sv[j], SecondFactor::ConjugateForward, weights, alpha, a, b, dt)?;
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    Ok(total)
}

fn check_wall(grid: &RadialGrid, atoms: &[&StepAtom], top: f64, alpha: f64, opts: &WindowOptions) -> Result<()> {
    let reach = atoms.iter().map(|a| a.span().0.abs().max(a.span().1.abs())).fold(0.0, f64::max);
    let speed = alpha * (2.0 * top).powf(alpha - 1.0);
    if speed * reach >= opts.wall_fraction * grid.r_max() {
        return Err(Error::WallReached(format!("atoms reach |t| = {reach:.3} at group velocity {speed:.3}")));
    }
    Ok(())
}

/// `||P_{<= mu}(P_{lambda1} u_1 conj(P_{lambda2} u_2))||_{L^2_{t,x}}` for step
/// atoms against `mu^{(3-alpha)/2} (mu/lambda1)^{(alpha-1)/2}` times the
/// exact `V^2` norms of the projected atoms. No time tail is added, since
/// atoms vanish outside their partitions.
pub fn transference_scan(
    u1: &StepAtom,
    u2: &StepAtom,
    mu: DyadicIndex,
    lambda1: DyadicIndex,
    lambda2: DyadicIndex,
    alpha: f64,
    opts: &WindowOptions,
) -> Result<DyadicRecord> {
    if !(1.0..=2.0).contains(&alpha) {
        return Err(invalid("alpha", format!("{alpha} not in [1, 2]")));
    }
    let grid = u1.grid();
    if u2.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let (m, l1, l2) = (mu.check(grid)?.value(), lambda1.check(grid)?.value(), lambda2.check(grid)?.value());
    let (_, dt) = scan_window(grid, m, l1, l2, alpha, OutputWeight::Low(m), opts)?;
    check_wall(grid, &[u1, u2], l1.max(l2), alpha, opts)?;
    let (p1, p2) = (project_atom(u1, l1)?, project_atom(u2, l2)?);
    let rhs = m.powf(0.5 * (3.0 - alpha)) * (m / l1).powf(0.5 * (alpha - 1.0)) * v2_norm_exact(&p1)? * v2_norm_exact(&p2)?;
    let w = |rho: f64| BumpFamily.chi_leq(m, rho);
    let lhs = atom_pair_integrals(&p1, &p2, &[&w], alpha, dt)?[0].max(0.0).sqrt();
    let mut r = DyadicRecord::new(m, l1, l2, lhs, rhs);
    let (a, b) = (u1.span().0.min(u2.span().0), u1.span().1.max(u2.span().1));
    r.window = 0.5 * (b - a);
    r.steps = ((b - a) / dt).ceil() as usize;
    Ok(r)
}

/// Piece with spectrum `chi_lambda(rho) sum_j c_j cos(rho s_j + theta_j)`:
/// a few shells at radii `s_j`, localized to the band.
pub fn random_band_piece(grid: &RadialGrid, lambda: f64, shells: usize, max_radius: f64, rng: &mut ChaCha8Rng) -> Result<SpectralField> {
    let terms: Vec<(Complex64, f64, f64)> = (0..shells)
        .map(|_| {
            let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            (c, rng.random_range(0.0..max_radius), rng.random_range(0.0..std::f64::consts::TAU))
        })
        .collect();
    SpectralField::from_fn(grid, |rho| {
        let chi = BumpFamily.chi(lambda, rho);
        if chi == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        terms.iter().map(|&(c, s, th)| c * (rho * s + th).cos()).sum::<Complex64>() * chi
    })
}

/// Random `K`-piece `U^2` atom on `[-t_max, t_max]` with band-`lambda` pieces.
pub fn random_atom(grid: &RadialGrid, lambda: f64, pieces: usize, t_max: f64, max_radius: f64, rng: &mut ChaCha8Rng) -> Result<StepAtom> {
    if pieces == 0 {
        return Err(invalid("pieces", "need at least one"));
    }
    let mut cuts: Vec<f64> = (1..pieces).map(|_| rng.random_range(-t_max..t_max)).collect();
    cuts.sort_by(f64::total_cmp);
    let mut partition = vec![-t_max];
    partition.extend(cuts);
    partition.push(t_max);
    let fields = (0..pieces)
        .map(|_| inverse_transform(&random_band_piece(grid, lambda, 3, max_radius, rng)?))
        .collect::<Result<Vec<_>>>()?;
    let atom = StepAtom::new(partition, fields, 2.0)?;
    let size = atom.lp_size()?;
    if size == 0.0 {
        return Err(Error::InsufficientData("random atom vanished".into()));
    }
    Ok(atom.scale(Complex64::new(1.0 / size, 0.0)))
}

/// Outcome of the summed bilinear estimate on a pair of multi-band atoms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumBilinearReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// Octaves entering the finite dyadic proxy for each factor.
    pub bands: Vec<f64>,
    /// `(mu, ||P_mu |D|^{(alpha-3)/2}(u conj v)||)` over the resolved octaves.
    pub band_pieces: Vec<(f64, f64)>,
}

impl SumBilinearReport {
    pub fn piece_sum(&self) -> f64 {
        self.band_pieces.iter().map(|p| p.1).sum()
    }
}

/// `||(-Delta)^{(alpha-3)/4}(u conj v)||_{L^2_{t,x}}` against
/// `(sum_lambda ||P_lambda u||_{V^2}^2)^{1/2} (sum_lambda ||P_lambda v||_{V^2}^2)^{1/2}`
/// with `lambda` over `bands`.
pub fn sum_bilinear_check(u: &StepAtom, v: &StepAtom, bands: &[DyadicIndex], alpha: f64, opts: &WindowOptions) -> Result<SumBilinearReport> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(invalid("alpha", format!("{alpha} not in (1, 2]")));
    }
    if bands.is_empty() {
        return Err(invalid("bands", "empty"));
    }
    let grid = u.grid();
    if v.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let mut proxy = (0.0, 0.0);
    let mut values = Vec::new();
    for b in bands {
        let l = b.check(grid)?.value();
        values.push(l);
        proxy.0 += v2_norm_exact(&project_atom(u, l)?)?.powi(2);
        proxy.1 += v2_norm_exact(&project_atom(v, l)?)?.powi(2);
    }
    let top = values.iter().copied().fold(0.0, f64::max);
    let bottom = values.iter().copied().fold(f64::INFINITY, f64::min);
    let (_, dt) = scan_window(grid, bottom, top, top, alpha, OutputWeight::Power(0.5 * (alpha - 3.0)), opts)?;
    check_wall(grid, &[u, v], top, alpha, opts)?;
    let p = 0.5 * (alpha - 3.0);
    // every sampled frequency of the product lies under some chi_mu
    let (k_lo, k_hi) = (grid.rho_min().log2().floor() as i32 - 1, (4.0 * top).log2().ceil() as i32 + 1);
    let octaves: Vec<f64> = (k_lo..=k_hi).map(|k| 2f64.powi(k)).collect();
    let base = move |rho: f64| if rho > 0.0 { rho.powf(p) } else { 0.0 };
    let band_weights: Vec<Box<dyn Fn(f64) -> f64 + Sync>> =
        octaves.iter().map(|&m| Box::new(move |rho: f64| base(rho) * BumpFamily.chi(m, rho)) as Box<dyn Fn(f64) -> f64 + Sync>).collect();
    let mut weights: Vec<&(dyn Fn(f64) -> f64 + Sync)> = vec![&base];
    weights.extend(band_weights.iter().map(|w| w.as_ref()));
    let ints = atom_pair_integrals(u, v, &weights, alpha, dt)?;
    let lhs = ints[0].max(0.0).sqrt();
    let rhs = proxy.0.sqrt() * proxy.1.sqrt();
    Ok(SumBilinearReport {
        lhs,
        rhs,
        ratio: if rhs > 0.0 { lhs / rhs } else { 0.0 },
        bands: values,
        band_pieces: octaves.into_iter().zip(ints[1..].iter().map(|x| x.max(0.0).sqrt())).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimates::bilinear::{band_datum, bilinear_scan_leq, BandProfile};
    use crate::field::RadialField;
    use rand::SeedableRng;

    #[test]
    fn zero_atoms_give_zero() {
        let g = RadialGrid::desk();
        let z = StepAtom::single(RadialField::zeros(&g), -1.0, 1.0).unwrap();
        let f = StepAtom::single(band_datum(&g, 4.0, BandProfile::GaussianBand).unwrap(), -1.0, 1.0).unwrap();
        let (m, l) = (DyadicIndex::new(0), DyadicIndex::new(2));
        assert_eq!(transference_scan(&f, &z, m, l, l, 1.5, &WindowOptions::default()).unwrap().lhs, 0.0);
        let s = sum_bilinear_check(&z, &f, &[l], 1.5, &WindowOptions::default()).unwrap();
        assert_eq!((s.lhs, s.ratio), (0.0, 0.0));
    }

    #[test]
    fn single_piece_matches_free_scan() {
        let g = RadialGrid::desk();
        let f = band_datum(&g, 8.0, BandProfile::GaussianBand).unwrap();
        let (m, l) = (DyadicIndex::new(0), DyadicIndex::new(3));
        let mut o = WindowOptions::default();
        o.extrapolate_tail = false;
        let free = bilinear_scan_leq(m, l, l, &f, &f, 1.5, &o).unwrap();
        let atom = StepAtom::single(f, -free.window, free.window).unwrap();
        let t = transference_scan(&atom, &atom, m, l, l, 1.5, &o).unwrap();
        assert!((t.lhs - free.lhs).abs() < 1e-3 * free.lhs, "{} vs {}", t.lhs, free.lhs);
        assert!((2.0 * t.ratio - free.ratio).abs() < 1e-3 * free.ratio);
    }

    #[test]
    fn random_atoms_are_normalized_and_banded() {
        let g = RadialGrid::desk();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_atom(&g, 8.0, 4, 2.0, 12.0, &mut rng).unwrap();
        assert_eq!(a.pieces().len(), 4);
        assert!((a.lp_size().unwrap() - 1.0).abs() < 1e-12);
        for p in a.pieces() {
            let spec = forward_transform(p).unwrap();
            for (rho, v) in spec.samples() {
                if !(4.0..=16.0).contains(&rho) {
                    assert!(v.norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn band_pieces_bracket_the_full_norm() {
        let g = RadialGrid::desk();
        let f = &band_datum(&g, 4.0, BandProfile::GaussianBand).unwrap() + &band_datum(&g, 8.0, BandProfile::GaussianBand).unwrap();
        let a = StepAtom::single(f, -1.0, 1.0).unwrap();
        let s = sum_bilinear_check(&a, &a, &[DyadicIndex::new(2), DyadicIndex::new(3)], 1.5, &WindowOptions::default()).unwrap();
        let n = s.band_pieces.len() as f64;
        assert!(s.lhs <= s.piece_sum() * (1.0 + 1e-9));
        assert!(s.piece_sum() <= n.sqrt() * s.lhs);
    }
}
