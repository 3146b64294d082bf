//! End-to-end acceptance checks, one test per criterion. Each prints a
//! single PASS/FAIL line with the measured values.

use hartree_core::estimates::lemma::{brute_force_i, closed_form_i, default_eps, lemma_oracle_samples, BumpPair};
use hartree_core::dynamics::{evolve, evolve_with, local_time_probe, picard_iterate_with, scattering_extract, EvolveOptions, LocalTimeOptions, PicardOptions};
use hartree_core::estimates::{
    band_datum, bilinear_scan, bilinear_scan_leq, random_atom, strichartz_report, strichartz_theta, transference_scan, v2_norm_exact, BandProfile, StepAtom,
    StrichartzOptions, WindowOptions,
};
use hartree_core::illposed::{growth_record, picard_terms};
use hartree_core::regression::log_log_slope;
use hartree_core::{l2_norm, DyadicIndex, ModelParams, RadialField, RadialGrid};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(id: u32, ok: bool, what: &str) {
    println!("[{}] criterion {id}: {what}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} failed: {what}");
}

#[test]
fn criterion_01_delta_integral_oracle() {
    let mut worst = 0.0f64;
    let mut unconverged = 0;
    let mut vanish_worst = 0.0f64;
    for (p, pair) in BumpPair::standard_pairs().iter().enumerate() {
        for &alpha in &[1.0, 1.5, 2.0] {
            let samples = lemma_oracle_samples(pair, alpha, 20, 1000 + p as u64).unwrap();
            assert_eq!(samples.len(), 20);
            for s in &samples {
                worst = worst.max(s.rel_err);
                unconverged += usize::from(!s.converged);
            }
            let peak = samples.iter().map(|s| s.closed).fold(0.0, f64::max);
            for &xi in &[0.5, 1.0, 2.0] {
                let tau = 1.1 * pair.vanishing_threshold(xi, alpha);
                assert_eq!(closed_form_i(pair, tau, xi, alpha).unwrap(), 0.0);
                let b = brute_force_i(pair, tau, xi, alpha, default_eps(pair, xi, alpha)).unwrap();
                vanish_worst = vanish_worst.max(b.value.abs() / peak);
            }
        }
    }
    verdict(
        1,
        worst < 1e-2 && vanish_worst < 1e-3,
        &format!("max rel err {worst:.2e} over 180 points ({unconverged} unconverged), vanishing leak {vanish_worst:.1e} of peak"),
    );
}

#[test]
fn criterion_02_bilinear_exponent() {
    // mu far below lambda so the scan sits in the asymptotic regime
    let grid = RadialGrid::new(8192, 128.0).unwrap();
    let mu = DyadicIndex::new(-2);
    let lambdas: Vec<DyadicIndex> = (2..=5).map(DyadicIndex::new).collect();
    let data: Vec<RadialField> = lambdas.iter().map(|l| band_datum(&grid, l.value(), BandProfile::GaussianBand).unwrap()).collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for &alpha in &[1.0, 1.25, 1.5, 2.0] {
        let (xs, ys): (Vec<f64>, Vec<f64>) = lambdas
            .iter()
            .zip(&data)
            .map(|(&l, f)| {
                let r = bilinear_scan(l, l, mu, f, f, alpha, &WindowOptions::default()).unwrap();
                (l.value(), r.lhs / (r.rhs / (mu.value() * l.value().powf(0.5 * (1.0 - alpha)))))
            })
            .unzip();
        let slope = log_log_slope(&xs, &ys).unwrap();
        let target = 0.5 * (1.0 - alpha);
        ok &= (slope - target).abs() <= 0.1;
        parts.push(format!("alpha {alpha}: {slope:.3} (want {target:.3})"));
    }
    verdict(2, ok, &format!("lambda_2 slopes over lambda in 4..32, mu = 1/4: {}", parts.join(", ")));
}

#[test]
fn criterion_03_radial_bilinear_boundedness() {
    // mu / lambda spans 1/1024 .. 1/4; refinement doubles n at fixed r_max
    let alpha = 1.5;
    let triples: Vec<(i32, i32)> = [2, 4, 5]
        .iter()
        .flat_map(|&l| [-5, -3, -1, 1, 3].into_iter().filter(move |&m| m < l).map(move |m| (m, l)))
        .collect();
    let scan = |n: usize| -> Vec<f64> {
        let grid = RadialGrid::new(n, 512.0).unwrap();
        triples
            .iter()
            .map(|&(m, l)| {
                let (m, l) = (DyadicIndex::new(m), DyadicIndex::new(l));
                let f = band_datum(&grid, l.value(), BandProfile::GaussianBand).unwrap();
                bilinear_scan_leq(m, l, l, &f, &f, alpha, &WindowOptions::default()).unwrap().ratio
            })
            .collect()
    };
    let (coarse, fine) = (scan(32768), scan(65536));
    let sup = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let (sc, sf) = (sup(&coarse), sup(&fine));
    let worst = coarse.iter().zip(&fine).map(|(a, b)| (a / b).max(b / a)).fold(1.0, f64::max);
    verdict(
        3,
        sc.is_finite() && sf.is_finite() && (sc / sf).max(sf / sc) < 2.0 && worst < 2.0,
        &format!("{} triples, mu in 1/32..8, lambda in 4..32: sup ratio {sc:.4} (n 32768) vs {sf:.4} (n 65536), worst per-triple change {worst:.4}", triples.len()),
    );
}

#[test]
fn criterion_04_transference_on_random_atoms() {
    let grid = RadialGrid::desk();
    let alpha = 1.5;
    let (mu, lam) = (DyadicIndex::new(0), DyadicIndex::new(3));
    let t_w = 8.0 / (alpha * lam.value().powf(alpha - 1.0) * mu.value());
    let opts = WindowOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut sup_multi = 0.0f64;
    let mut sup_single = 0.0f64;
    let single = |f: &RadialField| {
        let a = StepAtom::single(f.clone(), -t_w, t_w).unwrap();
        transference_scan(&a, &a, mu, lam, lam, alpha, &opts).unwrap().ratio
    };
    sup_single = sup_single.max(single(&band_datum(&grid, lam.value(), BandProfile::GaussianBand).unwrap()));
    for _ in 0..50 {
        let u = random_atom(&grid, lam.value(), 4, t_w, 12.0, &mut rng).unwrap();
        let v = random_atom(&grid, lam.value(), 4, t_w, 12.0, &mut rng).unwrap();
        let r = transference_scan(&u, &v, mu, lam, lam, alpha, &opts).unwrap();
        sup_multi = sup_multi.max(r.ratio);
        let (a, b) = (StepAtom::single(u.pieces()[0].clone(), -t_w, t_w).unwrap(), StepAtom::single(v.pieces()[0].clone(), -t_w, t_w).unwrap());
        sup_single = sup_single.max(transference_scan(&a, &b, mu, lam, lam, alpha, &opts).unwrap().ratio);
    }
    let factor = sup_multi / sup_single;
    verdict(
        4,
        sup_multi.is_finite() && factor <= 4.0,
        &format!("sup ratio over 50 four-piece pairs {sup_multi:.4e}, single-piece sup {sup_single:.4e}, factor {factor:.3} (two-sided {:.3})", factor.max(1.0 / factor)),
    );
}

#[test]
fn criterion_05_strichartz_scale_family() {
    let grid = RadialGrid::desk();
    let base = band_datum(&grid, 1.0, BandProfile::Bump).unwrap();
    let mut ok = strichartz_theta(2.0, 3.0) == 0.0;
    let mut parts = Vec::new();
    for &alpha in &[1.25, 1.5, 2.0] {
        let p = ModelParams::new(alpha, 1.0).unwrap();
        let ratios: Vec<f64> = [1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|&l| {
                let f = hartree_core::dynamics::rescale(&base, l, &p).unwrap();
                strichartz_report(&f, 4.0, 3.0, alpha, &StrichartzOptions::default()).unwrap().ratio
            })
            .collect();
        let spread = ratios.iter().copied().fold(0.0, f64::max) / ratios.iter().copied().fold(f64::INFINITY, f64::min);
        ok &= spread < 2.0;
        parts.push(format!("alpha {alpha}: theta {:.4}, spread {spread:.4}", strichartz_theta(alpha, 3.0)));
    }
    verdict(5, ok, &format!("(q, r) = (4, 3), lambda in 1..8: {}; theta(2) = {}", parts.join(", "), strichartz_theta(2.0, 3.0)));
}

#[test]
fn criterion_06_conservation() {
    let grid = RadialGrid::desk();
    let f = RadialField::from_real_fn(&grid, |r| 0.5 * (-0.5 * r * r).exp()).unwrap();
    let dts = [0.04, 0.02, 0.01];
    let mut ok = true;
    let mut parts = Vec::new();
    for &sigma in &[1.0, -1.0] {
        let p = ModelParams::new(1.5, sigma).unwrap();
        let mut mass_drift = 0.0f64;
        let mut drifts = Vec::new();
        for &dt in &dts {
            let tr = evolve(&f, 2.0, &p, dt).unwrap();
            mass_drift = mass_drift.max(tr.relative_mass_drift());
            drifts.push(tr.relative_energy_drift().unwrap());
        }
        let order = log_log_slope(&dts, &drifts).unwrap();
        ok &= mass_drift < 1e-8 && (1.8..=2.2).contains(&order);
        parts.push(format!("sigma {sigma:+}: mass drift {mass_drift:.1e}, energy order {order:.3}"));
    }
    verdict(6, ok, &parts.join("; "));
}

#[test]
fn criterion_07_small_data_contraction() {
    let grid = RadialGrid::desk();
    let g = RadialField::from_real_fn(&grid, |r| (-0.5 * r * r).exp()).unwrap();
    let f = g.scale(Complex64::new(0.05 / l2_norm(&g), 0.0));
    let norm = l2_norm(&f);
    let mut ok = true;
    let mut parts = Vec::new();
    for &sigma in &[1.0, -1.0] {
        let p = ModelParams::new(1.5, sigma).unwrap();
        let mut worst_ratio = 0.0f64;
        let mut diffs = Vec::new();
        for &steps in &[100usize, 200] {
            let res = picard_iterate_with(&f, 5.0, &p, &PicardOptions::new(steps, 12)).unwrap();
            worst_ratio = res.ratios().into_iter().fold(worst_ratio, f64::max);
            let dt = 5.0 / steps as f64;
            let ev = evolve(&f, 5.0, &p, dt).unwrap();
            let d = l2_norm(&(res.last().final_state() - ev.final_state()));
            ok &= d <= dt * dt * norm;
            diffs.push(d);
        }
        ok &= worst_ratio < 0.5;
        parts.push(format!(
            "sigma {sigma:+}: max ratio {worst_ratio:.2e}, |Picard - splitting| {:.2e} -> {:.2e} (order {:.2})",
            diffs[0],
            diffs[1],
            (diffs[0] / diffs[1]).log2()
        ));
    }
    verdict(7, ok, &format!("||phi|| = 0.05, alpha 1.5, T 5: {}", parts.join("; ")));
}

#[test]
fn criterion_08_scattering() {
    let grid = RadialGrid::new(4096, 256.0).unwrap();
    let f = RadialField::from_real_fn(&grid, |r| 0.3 * (-0.5 * r * r).exp()).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for &sigma in &[1.0, -1.0] {
        let p = ModelParams::new(1.5, sigma).unwrap();
        let mut o = EvolveOptions::new(0.05);
        o.save_every = 20;
        o.record_energy = false;
        let tr = evolve_with(&f, 40.0, &p, &o).unwrap();
        let d = scattering_extract(&tr, &[10.0, 20.0, 40.0]).unwrap().consecutive_distances();
        ok &= d.windows(2).all(|w| w[1] < w[0]);
        parts.push(format!("sigma {sigma:+}: {:.4e} > {:.4e}", d[0], d[1]));
    }
    verdict(8, ok, &format!("pullback distances at t = 10, 20, 40: {}", parts.join("; ")));
}

#[test]
fn criterion_09_local_time_scaling() {
    let grid = RadialGrid::new(4096, 64.0).unwrap();
    let p = ModelParams::new(1.5, 1.0).unwrap();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut interior = true;
    for k in 1..=4 {
        let rep = local_time_probe(2.0, DyadicIndex::new(k), &p, &grid, &LocalTimeOptions::default()).unwrap();
        interior &= !rep.bracket_maximal;
        xs.push(rep.lambda);
        ys.push(rep.t_star);
    }
    let slope = log_log_slope(&xs, &ys).unwrap();
    verdict(
        9,
        interior && (slope + 1.5).abs() <= 0.2,
        &format!("T* over Lambda in 2..16 at r = 2: slope {slope:.4} (want -1.5), T* = {ys:?}"),
    );
}

#[test]
fn criterion_10_illposedness_exponents() {
    let grid = RadialGrid::new(4096, 64.0).unwrap();
    let terms = picard_terms(&[4.0, 8.0, 16.0, 32.0], 1.5, 0.05, &grid).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for &s in &[-0.25, 0.0, 0.5] {
        let rec = growth_record(&terms, s, 1.5, 0.05).unwrap();
        let leak = rec.entries.iter().map(|e| e.leakage).fold(0.0, f64::max);
        ok &= (rec.datum_slope - (s + 1.5)).abs() <= 0.03
            && (rec.phi_slope - (s + 4.5)).abs() <= 0.15
            && (rec.ratio_slope + 2.0 * s).abs() <= 0.1
            && (rec.ratio_slope > 0.05) == (s < 0.0)
            && leak < 1e-6;
        parts.push(format!("s {s}: datum {:.3}, Phi {:.3}, ratio {:.3}, leak {leak:.0e}", rec.datum_slope, rec.phi_slope, rec.ratio_slope));
    }
    verdict(10, ok, &parts.join("; "));
}

#[test]
fn criterion_11_v2_norm_axioms() {
    let grid = RadialGrid::new(256, 16.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let atom = |rng: &mut ChaCha8Rng| {
        let k = rng.random_range(1..=5usize);
        let mut times: Vec<f64> = (0..=k).map(|_| rng.random_range(-5.0..5.0)).collect();
        times.sort_by(f64::total_cmp);
        let pieces = (0..k)
            .map(|_| {
                let (c, w) = (rng.random_range(1.0..8.0), rng.random_range(0.5..2.0));
                let a = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                RadialField::from_fn(&grid, |r| a * (-((r - c) / w).powi(2)).exp()).unwrap()
            })
            .collect();
        StepAtom::new(times, pieces, 2.0).unwrap()
    };
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (a, b) = (atom(&mut rng), atom(&mut rng));
        let (na, nb) = (v2_norm_exact(&a).unwrap(), v2_norm_exact(&b).unwrap());
        let sum = v2_norm_exact(&a.add(&b).unwrap()).unwrap();
        worst = worst.max((sum - na - nb) / (na + nb));
        let c = Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        worst = worst.max((v2_norm_exact(&a.scale(c)).unwrap() - c.norm() * na).abs() / (c.norm() * na));
    }
    let phi = RadialField::from_real_fn(&grid, |r| (-(r - 3.0).powi(2)).exp()).unwrap();
    let single = v2_norm_exact(&StepAtom::single(phi.clone(), 0.0, 2.0).unwrap()).unwrap();
    let exact_err = (single / (2f64.sqrt() * l2_norm(&phi)) - 1.0).abs();
    verdict(
        11,
        worst <= 1e-9 && exact_err <= 1e-12,
        &format!("axiom violation {worst:.1e} over 100 random pairs, single piece / (sqrt 2 ||phi||) - 1 = {exact_err:.1e}"),
    );
}
