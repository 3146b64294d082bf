use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::field::RadialField;
use crate::littlewood_paley::{project, project_gt, project_leq, DyadicIndex};
use crate::norms::{inner_product, l2_norm};
use crate::params::ModelParams;

use super::duhamel::{picard_iterate_with, PicardOptions};

/// Knobs of the local-time search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalTimeOptions {
    /// Size of the high-frequency tail, `||P_{>Lambda} phi|| = eta / r`.
    pub eta: f64,
    /// Constant `C` in `R = 4 C r` and `eps = 2^{-6} / (C r)`.
    pub constant: f64,
    /// Contraction threshold for `d_{k+1} / d_k`.
    pub ratio_threshold: f64,
    pub steps: usize,
    pub k_max: usize,
    /// Search bracket in units of `Lambda^{-alpha}`.
    pub bracket: (f64, f64),
    pub bisections: usize,
}

impl Default for LocalTimeOptions {
    fn default() -> Self {
        Self {
            eta: 2f64.powi(-10),
            constant: 1.0,
            ratio_threshold: 0.5,
            steps: 32,
            k_max: 6,
            bracket: (1e-6, 10.0),
            bisections: 24,
        }
    }
}

/// Outcome of a local-time search.
#[derive(Clone, Debug, Serialize)]
pub struct LocalTimeReport {
    pub r: f64,
    pub lambda: f64,
    /// Largest time passing the diagnostic.
    pub t_star: f64,
    /// `t_star` equals the upper end of the bracket.
    pub bracket_maximal: bool,
    pub bracket: (f64, f64),
    /// Picard ratios at `t_star`.
    pub ratios: Vec<f64>,
}

/// Datum of mass `r` with a low-frequency bulk `P_{<= Lambda/2}` of a
/// Gaussian of width `1 / Lambda` and a tail in the band `2 Lambda` sized so
/// that `||P_{> Lambda} phi|| = eta / r`.
pub fn local_time_datum(grid: &crate::grid::RadialGrid, r: f64, lambda: DyadicIndex, eta: f64) -> Result<RadialField> {
    let l = lambda.value();
    let bulk = project_leq(&RadialField::from_real_fn(grid, |x| (-0.5 * (l * x).powi(2)).exp())?, lambda.half())?;
    let tail = project(&RadialField::from_real_fn(grid, |x| (-0.5 * (l * x).powi(2)).exp() * (2.0 * l * x).cos())?, lambda.double())?;
    let high = l2_norm(&project_gt(&tail, lambda)?);
    if high == 0.0 {
        return Err(Error::InsufficientData("tail has no content above Lambda".into()));
    }
    let ct = eta / (r * high);
    // |cb b + ct t|^2 = r^2
    let bb = l2_norm(&bulk).powi(2);
    let bt = inner_product(&bulk, &tail)?.re;
    let tt = l2_norm(&tail).powi(2);
    let disc = (ct * bt).powi(2) - bb * (ct * ct * tt - r * r);
    if disc < 0.0 {
        return Err(invalid("eta", "tail alone exceeds the requested mass"));
    }
    let cb = (-ct * bt + disc.sqrt()) / bb;
    bulk.scale(Complex64::new(cb, 0.0)).add_scaled(Complex64::new(ct, 0.0), &tail)
}

/// Finds the largest `T` for which the Picard map on `[0, T]` contracts
/// (`d_{k+1} / d_k < threshold`) and keeps the iterates inside
/// `sup_t ||u|| <= 4 C r`, `sup_t ||P_{>Lambda} u|| <= 2^{-6} / (C r)`.
pub fn local_time_probe(r: f64, lambda: DyadicIndex, params: &ModelParams, grid: &crate::grid::RadialGrid, opts: &LocalTimeOptions) -> Result<LocalTimeReport> {
    params.validate_dynamics()?;
    if !(r >= 1.0 && r.is_finite()) {
        return Err(invalid("r", "must be at least 1"));
    }
    lambda.half().check(grid)?;
    lambda.double().check(grid)?;
    let phi = local_time_datum(grid, r, lambda, opts.eta)?;
    let scale = lambda.value().powf(-params.alpha);
    let (lo, hi) = (opts.bracket.0 * scale, opts.bracket.1 * scale);
    let big_r = 4.0 * opts.constant * r;
    let eps = 2f64.powi(-6) / (opts.constant * r);

    let passes = |t: f64| -> Result<Option<Vec<f64>>> {
        let mut po = PicardOptions::new(opts.steps, opts.k_max);
        po.keep_iterates = true;
        let res = match picard_iterate_with(&phi, t, params, &po) {
            Ok(res) => res,
            Err(Error::Divergence(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let ratios = res.ratios();
        if ratios.iter().any(|&q| !(q < opts.ratio_threshold)) {
            return Ok(None);
        }
        for it in &res.iterates {
            for u in it.states() {
                if l2_norm(u) > big_r || l2_norm(&project_gt(u, lambda)?) > eps {
                    return Ok(None);
                }
            }
        }
        Ok(Some(ratios))
    };

    if let Some(ratios) = passes(hi)? {
        return Ok(LocalTimeReport { r, lambda: lambda.value(), t_star: hi, bracket_maximal: true, bracket: (lo, hi), ratios });
    }
    let mut best = passes(lo)?.ok_or(Error::NoPassingTime { lo, hi })?;
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..opts.bisections {
        let mid = 0.5 * (a + b);
        match passes(mid.exp())? {
            Some(ratios) => {
                a = mid;
                best = ratios;
            }
            None => b = mid,
        }
    }
    Ok(LocalTimeReport { r, lambda: lambda.value(), t_star: a.exp(), bracket_maximal: false, bracket: (lo, hi), ratios: best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RadialGrid;

    #[test]
    fn datum_lies_in_the_ball() {
        let g = RadialGrid::new(1024, 32.0).unwrap();
        let lam = DyadicIndex::new(2);
        let r = 2.0;
        let eta = 2f64.powi(-10);
        let phi = local_time_datum(&g, r, lam, eta).unwrap();
        assert!((l2_norm(&phi) - r).abs() < 1e-10);
        assert!((l2_norm(&project_gt(&phi, lam).unwrap()) - eta / r).abs() < 1e-12);
    }

    #[test]
    fn uncoupled_probe_is_bracket_maximal() {
        let g = RadialGrid::new(1024, 32.0).unwrap();
        let p = ModelParams::new(1.5, 0.0).unwrap();
        let rep = local_time_probe(2.0, DyadicIndex::new(2), &p, &g, &LocalTimeOptions::default()).unwrap();
        assert!(rep.bracket_maximal);
    }
}
