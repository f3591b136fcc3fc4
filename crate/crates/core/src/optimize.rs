//! Maximizing the logarithmic negativity over both measurement strengths.
//!
//! Frequencies are in units of Ω_F: Ω_F = 1 and Ω_x = ratio.

use rayon::prelude::*;
use serde::Serialize;

use crate::entangle::{assemble, log_negativity};
use crate::error::{invalid, Error, Result};
use crate::params::ModeParams;
use crate::wiener::{conditional_moments, Method};

/// E_N below this counts as "no entanglement" when locating the threshold.
pub const THRESHOLD_EN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeConfig {
    /// Grid points per axis.
    pub grid_points: usize,
    /// The grid spans √(Ω_F Ω_x)·10^(±decades).
    pub decades: f64,
    /// Simplex diameter (in ln Ω_α) at which refinement stops.
    pub simplex_tol: f64,
    pub max_iter: usize,
    pub method: Method,
    /// Apply technical laser noise to the differential channel too.
    pub laser_on_both: bool,
    /// Bisection bracket and tolerance for [`threshold_ratio`].
    pub ratio_bracket: (f64, f64),
    pub ratio_tol: f64,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            grid_points: 40,
            decades: 2.0,
            simplex_tol: 1e-6,
            max_iter: 2000,
            method: Method::Closed,
            laser_on_both: false,
            ratio_bracket: (2.0, 50.0),
            ratio_tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub ratio_xf: f64,
    pub laser_db: f64,
    pub e_n_max: f64,
    pub omega_alpha_c_opt: f64,
    pub omega_alpha_d_opt: f64,
    /// The whole search grid gave E_N = 0.
    pub flat: bool,
}

/// The two channels for given measurement strengths, Ω_F = 1, Ω_x = ratio.
pub fn channel_modes(wc: f64, wd: f64, ratio: f64, laser_db: f64, cfg: &OptimizeConfig) -> (ModeParams, ModeParams) {
    let common = ModeParams::new(wc, 1.0, ratio).with_laser_db(laser_db, laser_db);
    let mut differential = ModeParams::new(wd, 1.0, ratio);
    if cfg.laser_on_both {
        differential = differential.with_laser_db(laser_db, laser_db);
    }
    (common, differential)
}

pub fn entanglement_at(wc: f64, wd: f64, ratio: f64, laser_db: f64, cfg: &OptimizeConfig) -> Result<f64> {
    let (c, d) = channel_modes(wc, wd, ratio, laser_db, cfg);
    let v = assemble(&conditional_moments(&c, cfg.method)?, &conditional_moments(&d, cfg.method)?)?;
    Ok(log_negativity(&v)?.e_n)
}

/// Result of a simplex run.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Nelder–Mead minimization with the standard coefficients
/// (reflection 1, expansion 2, contraction ½, shrink ½).
pub fn nelder_mead(f: impl Fn(&[f64]) -> f64, x0: &[f64], step: f64, tol: f64, max_iter: usize) -> Minimum {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let fx = f(&x);
        simplex.push((x, fx));
    }
    let along = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(a, b)| a + t * (b - a)).collect() };

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if diameter < tol {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|(x, _)| x[k]).sum::<f64>() / n as f64)
            .collect();
        let (worst, f_worst) = simplex[n].clone();
        let reflected = along(&centroid, &worst, -1.0);
        let f_r = f(&reflected);
        if f_r < simplex[0].1 {
            let expanded = along(&centroid, &worst, -2.0);
            let f_e = f(&expanded);
            simplex[n] = if f_e < f_r { (expanded, f_e) } else { (reflected, f_r) };
            continue;
        }
        if f_r < simplex[n - 1].1 {
            simplex[n] = (reflected, f_r);
            continue;
        }
        // contract towards the better of the worst point and its reflection
        let (target, f_target) = if f_r < f_worst { (reflected, f_r) } else { (worst, f_worst) };
        let contracted = along(&centroid, &target, 0.5);
        let f_c = f(&contracted);
        if f_c < f_target {
            simplex[n] = (contracted, f_c);
            continue;
        }
        let best = simplex[0].0.clone();
        for (x, fx) in simplex.iter_mut().skip(1) {
            *x = along(&best, x, 0.5);
            *fx = f(x);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Minimum {
        x,
        value,
        iterations,
        converged,
    }
}

/// Largest E_N over (Ω_α^c, Ω_α^d): a log grid, then simplex refinement from
/// the best cell and its four neighbours.
pub fn max_logneg(ratio: f64, laser_db: f64, cfg: &OptimizeConfig) -> Result<SweepPoint> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(invalid("ratio_xf", format!("must be positive, got {ratio}")));
    }
    if !laser_db.is_finite() {
        return Err(invalid("laser_db", "must be finite"));
    }
    if cfg.grid_points < 3 {
        return Err(invalid("grid_points", "need at least 3 per axis"));
    }
    // Validate once so later evaluation failures are genuine numerical issues.
    entanglement_at(1.0, 1.0, ratio, laser_db, cfg)?;

    let n = cfg.grid_points;
    let center = 0.5 * ratio.ln();
    let span = cfg.decades * std::f64::consts::LN_10;
    let h = 2.0 * span / (n - 1) as f64;
    let axis: Vec<f64> = (0..n).map(|i| center - span + h * i as f64).collect();
    let objective = |x: &[f64]| -> f64 {
        entanglement_at(x[0].exp(), x[1].exp(), ratio, laser_db, cfg).unwrap_or(0.0)
    };

    let mut best = (0usize, 0usize, f64::NEG_INFINITY);
    for i in 0..n {
        for j in 0..n {
            let e = objective(&[axis[i], axis[j]]);
            if e > best.2 {
                best = (i, j, e);
            }
        }
    }
    let (bi, bj, grid_max) = best;
    if grid_max <= 0.0 {
        return Ok(SweepPoint {
            ratio_xf: ratio,
            laser_db,
            e_n_max: 0.0,
            omega_alpha_c_opt: axis[bi].exp(),
            omega_alpha_d_opt: axis[bj].exp(),
            flat: true,
        });
    }

    let mut starts = vec![(bi, bj)];
    for (di, dj) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
        let (i, j) = (bi as i64 + di, bj as i64 + dj);
        if (0..n as i64).contains(&i) && (0..n as i64).contains(&j) {
            starts.push((i as usize, j as usize));
        }
    }
    let mut best_x = [axis[bi], axis[bj]];
    let mut best_e = grid_max;
    for (i, j) in starts {
        let m = nelder_mead(|x| -objective(x), &[axis[i], axis[j]], h, cfg.simplex_tol, cfg.max_iter);
        if -m.value > best_e {
            best_e = -m.value;
            best_x = [m.x[0], m.x[1]];
        }
    }
    Ok(SweepPoint {
        ratio_xf: ratio,
        laser_db,
        e_n_max: best_e,
        omega_alpha_c_opt: best_x[0].exp(),
        omega_alpha_d_opt: best_x[1].exp(),
        flat: false,
    })
}

/// Smallest Ω_x/Ω_F with E_N_max > [`THRESHOLD_EN`], by bisection.
pub fn threshold_ratio(laser_db: f64, cfg: &OptimizeConfig) -> Result<f64> {
    if !(laser_db >= 0.0) {
        return Err(invalid("laser_db", format!("must be non-negative, got {laser_db}")));
    }
    let (mut lo, mut hi) = cfg.ratio_bracket;
    let entangled = |r: f64| -> Result<bool> { Ok(max_logneg(r, laser_db, cfg)?.e_n_max > THRESHOLD_EN) };
    if !entangled(hi)? {
        return Err(Error::ThresholdNotFound {
            laser_db,
            max_ratio: hi,
        });
    }
    if entangled(lo)? {
        return Ok(lo);
    }
    while hi - lo > cfg.ratio_tol {
        let mid = 0.5 * (lo + hi);
        if entangled(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// [`max_logneg`] over the Cartesian product, ordered by (noise, ratio).
pub fn sweep(ratios: &[f64], noise_levels_db: &[f64], cfg: &OptimizeConfig) -> Result<Vec<SweepPoint>> {
    if ratios.is_empty() {
        return Err(invalid("ratios", "empty ratio list"));
    }
    if noise_levels_db.is_empty() {
        return Err(invalid("noise_db_list", "empty noise list"));
    }
    let mut levels = noise_levels_db.to_vec();
    levels.sort_by(f64::total_cmp);
    let mut rs = ratios.to_vec();
    rs.sort_by(f64::total_cmp);
    let jobs: Vec<(f64, f64)> = levels.iter().flat_map(|&db| rs.iter().map(move |&r| (db, r))).collect();
    jobs.par_iter().map(|&(db, r)| max_logneg(r, db, cfg)).collect()
}

/// `start, start + step, …` up to `stop` inclusive, in `points` steps.
pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..points)
            .map(|k| start + (stop - start) * k as f64 / (points - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn simplex_finds_rosenbrock_minimum() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = nelder_mead(rosen, &[-1.2, 1.0], 0.5, 1e-10, 5000);
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6, "{:?}", m.x);
    }

    #[test]
    fn reference_ratio_reaches_at_least_the_reference_point() {
        let cfg = OptimizeConfig::default();
        let p = max_logneg(5.522, 0.0, &cfg).unwrap();
        assert!(!p.flat);
        assert_relative_eq!(p.e_n_max, 0.35091, max_relative = 1e-4);
        assert!(p.e_n_max >= 0.3508584807);
        let at = entanglement_at(p.omega_alpha_c_opt, p.omega_alpha_d_opt, p.ratio_xf, 0.0, &cfg).unwrap();
        assert_relative_eq!(at, p.e_n_max, max_relative = 1e-12);
        assert!((p.omega_alpha_c_opt / p.omega_alpha_d_opt - 1.0).abs() > 0.1);
    }

    #[test]
    fn reference_optima() {
        // independent grid + simplex script
        let cfg = OptimizeConfig::default();
        for (r, db, want) in [(8.0, 0.0, 0.67197), (10.0, 0.0, 0.85842), (8.0, 5.0, 0.31206), (10.0, 10.0, 0.10101)] {
            let p = max_logneg(r, db, &cfg).unwrap();
            assert_relative_eq!(p.e_n_max, want, max_relative = 2e-4);
        }
    }

    #[test]
    fn low_ratio_is_flat() {
        let cfg = OptimizeConfig::default();
        for r in [0.5, 1.0, 2.0, 3.0] {
            let p = max_logneg(r, 0.0, &cfg).unwrap();
            assert_eq!(p.e_n_max, 0.0);
            assert!(p.flat);
            assert!(p.omega_alpha_c_opt > 0.0 && p.omega_alpha_d_opt.is_finite());
        }
    }

    #[test]
    fn optimum_is_swap_symmetric_without_laser_noise() {
        let cfg = OptimizeConfig::default();
        let p = max_logneg(7.0, 0.0, &cfg).unwrap();
        let swapped = entanglement_at(p.omega_alpha_d_opt, p.omega_alpha_c_opt, 7.0, 0.0, &cfg).unwrap();
        assert_relative_eq!(swapped, p.e_n_max, max_relative = 1e-12);
    }

    #[test]
    fn sweep_order_is_deterministic() {
        let cfg = OptimizeConfig::default();
        let rows = sweep(&[6.0, 4.0], &[5.0, 0.0], &cfg).unwrap();
        let keys: Vec<(f64, f64)> = rows.iter().map(|p| (p.laser_db, p.ratio_xf)).collect();
        assert_eq!(keys, vec![(0.0, 4.0), (0.0, 6.0), (5.0, 4.0), (5.0, 6.0)]);
        let single = sweep(&[6.0], &[5.0], &cfg).unwrap();
        assert_eq!(single[0], max_logneg(6.0, 5.0, &cfg).unwrap());
        assert!(sweep(&[], &[0.0], &cfg).is_err());
    }

    #[test]
    fn laser_on_both_costs_entanglement() {
        let one = OptimizeConfig::default();
        let both = OptimizeConfig {
            laser_on_both: true,
            ..one
        };
        let a = max_logneg(8.0, 5.0, &one).unwrap().e_n_max;
        let b = max_logneg(8.0, 5.0, &both).unwrap().e_n_max;
        assert!(b < a);
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(2.0, 10.0, 33).len(), 33);
        assert_eq!(linspace(2.0, 10.0, 33)[32], 10.0);
        assert_eq!(linspace(2.0, 10.0, 33)[1], 2.25);
    }
}
