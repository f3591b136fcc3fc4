//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the terminal.

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use sqlent::cli::{entangle_report, RunConfig};
use sqlent::entangle::{assemble, log_negativity, physicality_check, TwoModeCovariance, PHYSICALITY_TOL};
use sqlent::optimize::{
    entanglement_at, linspace, max_logneg, sweep, threshold_ratio, OptimizeConfig, SweepPoint,
};
use sqlent::params::ModeParams;
use sqlent::riccati::{care_steady_state, to_state_space};
use sqlent::spectra::{budget, build_spectra};
use sqlent::wiener::{
    conditional_moments, conditional_moments_closed, conditional_moments_numeric,
    orthogonality_residual, spectral_factorize, split_causal, uncertainty_product, ConditionalMoments, Method,
};

// tolerances
const C1_EN: f64 = 0.35;
const C1_EN_TOL: f64 = 0.02;
const C1_BUDGET: Duration = Duration::from_secs(1);
const C2_UNCERTAINTY_REL: f64 = 1e-12;
const C2_ARGMIN_REL: f64 = 1e-6;
const C2_BUDGET: Duration = Duration::from_secs(5);
const C3_FREE_REL: f64 = 1e-3;
const C3_PENDULUM_REL: f64 = 1e-6;
const C3_BUDGET: Duration = Duration::from_secs(60);
const C4_RECONSTRUCT_REL: f64 = 1e-9;
const C4_SPLIT_REL: f64 = 1e-12;
const C4_ORTHOGONALITY: f64 = 1e-8;
const C4_BUDGET: Duration = Duration::from_secs(10);
const C5_WINDOW: (f64, f64) = (2.0, 3.0);
const C5_BUDGET: Duration = Duration::from_secs(120);
const C6_EN_AT_REFERENCE: f64 = 0.35;
const C6_BUDGET: Duration = Duration::from_secs(300);
const C7_INTERSECTION: f64 = 1e-10;
const C7_BUDGET: Duration = Duration::from_secs(10);

// Frozen thresholds (ratio Ω_x/Ω_F) from an independent scipy grid + simplex
// bisection; agreement within the bisection tolerance of both.
const THRESHOLDS: [(f64, f64); 3] = [(0.0, 3.7785), (5.0, 5.4635), (10.0, 8.7993)];
const THRESHOLD_TOL: f64 = 2e-3;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(n: usize, name: &str, elapsed: Duration, budget: Duration, o: Outcome) -> bool {
    let pass = o.pass && elapsed < budget;
    println!(
        "criterion {n} [{}] {name}: {} ({:.2?} of {:.0?})",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        elapsed,
        budget
    );
    pass
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn log_uniform(rng: &mut StdRng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn moments_rel(a: &ConditionalMoments, b: &ConditionalMoments) -> f64 {
    // V_xp is compared on the scale √(V_xx V_pp) since it can cross zero
    let s = (b.v_xx * b.v_pp).sqrt();
    rel(a.v_xx, b.v_xx).max(rel(a.v_pp, b.v_pp)).max((a.v_xp - b.v_xp).abs() / s)
}

fn reference_config() -> RunConfig {
    RunConfig {
        omega_alpha_c_hz: Some(1600.0),
        omega_alpha_d_hz: Some(184.0),
        omega_f_hz: Some(230.0),
        omega_x_hz: Some(1270.0),
        ..RunConfig::default()
    }
}

fn criterion_1() -> Outcome {
    match entangle_report(&reference_config(), Method::Closed) {
        Ok(r) => Outcome {
            pass: (r.e_n - C1_EN).abs() <= C1_EN_TOL,
            detail: format!("E_N = {:.6} (target {C1_EN} ± {C1_EN_TOL})", r.e_n),
        },
        Err(e) => Outcome {
            pass: false,
            detail: format!("error: {e}"),
        },
    }
}

fn criterion_2() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    let mut worst_u = 0.0f64;
    let mut worst_arg = 0.0f64;
    for _ in 0..1000 {
        let zf = log_uniform(&mut rng, 1e-3, 1e2);
        let zx = log_uniform(&mut rng, 1e-3, 1e2);
        let (wf, wx) = (zf, 1.0 / zx);
        let m = conditional_moments_closed(&ModeParams::new(1.0, wf, wx)).expect("closed form");
        let want = 0.25 * (1.0 + 2.0 * zf * zf) * (1.0 + 2.0 * zx * zx);
        worst_u = worst_u.max(rel(uncertainty_product(&m), want));

        // U is flat to ~ζ_Fζ_x near its minimum, too flat for value comparisons
        // at small ζ; bisect on the sign of the central difference instead
        let u = |t: f64| uncertainty_product(&conditional_moments_closed(&ModeParams::new(t.exp(), wf, wx)).expect("closed form"));
        let slope = |t: f64| u(t + 1e-3) - u(t - 1e-3);
        let (mut lo, mut hi) = (-12.0, 12.0);
        while hi - lo > 1e-10 {
            let mid = 0.5 * (lo + hi);
            if slope(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        worst_arg = worst_arg.max(rel((0.5 * (lo + hi)).exp(), (wx * wf).sqrt()));
    }
    Outcome {
        pass: worst_u <= C2_UNCERTAINTY_REL && worst_arg <= C2_ARGMIN_REL,
        detail: format!("max rel. error U {worst_u:.2e} (≤ {C2_UNCERTAINTY_REL:.0e}), argmin {worst_arg:.2e} (≤ {C2_ARGMIN_REL:.0e})"),
    }
}

fn random_mode(rng: &mut StdRng, pendulum_max: f64, general: bool) -> ModeParams {
    let wf = log_uniform(rng, 0.05, 2.0);
    let wx = log_uniform(rng, 0.5, 20.0);
    let om = rng.gen_range(0.0..pendulum_max);
    let g = log_uniform(rng, pendulum_max * 1e-3, pendulum_max);
    let mut mode = ModeParams::new(1.0, wf, wx).with_pendulum(om, g);
    if general {
        mode = mode
            .with_phi(rng.gen_range(-1.2..1.2))
            .with_laser_db(rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0));
    }
    mode
}

fn criterion_3(covs: &mut Vec<TwoModeCovariance>) -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let mut worst_free = 0.0f64;
    let mut worst_pend = 0.0f64;
    let mut failures = Vec::new();
    for k in 0..100 {
        let mode = random_mode(&mut rng, 1e-3, false);
        let run = || -> sqlent::error::Result<[ConditionalMoments; 3]> {
            Ok([
                conditional_moments(&mode, Method::Numeric)?,
                conditional_moments(&mode, Method::Closed)?,
                conditional_moments(&mode, Method::Riccati)?,
            ])
        };
        match run() {
            Ok([n, c, r]) => {
                worst_free = worst_free
                    .max(moments_rel(&n, &c))
                    .max(moments_rel(&c, &r))
                    .max(moments_rel(&n, &r));
                if let Ok(v) = assemble(&c, &n) {
                    covs.push(v);
                }
            }
            Err(e) => failures.push(format!("free #{k}: {e}")),
        }
    }
    for k in 0..100 {
        let mode = random_mode(&mut rng, 0.5, true);
        let run = || -> sqlent::error::Result<(ConditionalMoments, ConditionalMoments)> {
            Ok((
                conditional_moments_numeric(&build_spectra(&mode)?)?,
                care_steady_state(&to_state_space(&mode)?)?,
            ))
        };
        match run() {
            Ok((n, r)) => {
                worst_pend = worst_pend.max(moments_rel(&n, &r));
                if let Ok(v) = assemble(&n, &r) {
                    covs.push(v);
                }
            }
            Err(e) => failures.push(format!("pendulum #{k}: {e}")),
        }
    }
    Outcome {
        pass: failures.is_empty() && worst_free <= C3_FREE_REL && worst_pend <= C3_PENDULUM_REL,
        detail: format!(
            "free-mass pairwise {worst_free:.2e} (≤ {C3_FREE_REL:.0e}), pendulum Wiener/Riccati {worst_pend:.2e} (≤ {C3_PENDULUM_REL:.0e}){}",
            if failures.is_empty() { String::new() } else { format!(", errors: {failures:?}") }
        ),
    }
}

fn criterion_4() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let hz = TAU;
    let mut corpus = vec![
        ModeParams::new(1600.0 * hz, 230.0 * hz, 1270.0 * hz),
        ModeParams::new(184.0 * hz, 230.0 * hz, 1270.0 * hz),
        ModeParams::new(1.0, 0.3, 3.0).with_pendulum(0.5, 0.2),
    ];
    corpus.extend((0..27).map(|_| random_mode(&mut rng, 0.5, true)));

    let mut worst_rec = 0.0f64;
    let mut max_imag = f64::NEG_INFINITY;
    let mut worst_split = 0.0f64;
    let mut worst_orth = 0.0f64;
    let mut failures = Vec::new();
    for (k, mode) in corpus.iter().enumerate() {
        let mut run = || -> sqlent::error::Result<()> {
            let spectra = build_spectra(mode)?;
            let s = spectra.scale;
            let s_y = spectra.s_y.scale_argument(s);
            let factor = spectral_factorize(&s_y)?;
            for z in factor.zeros.iter().chain(&factor.poles) {
                max_imag = max_imag.max(z.im);
            }
            for i in 0..200 {
                let w = 10f64.powf(-3.0 + 6.0 * i as f64 / 199.0);
                let exact = s_y.eval_real(w).re;
                worst_rec = worst_rec.max(rel(factor.eval(w).norm_sqr(), exact));
            }
            // S_xy/s_y*, with the mechanical poles cancelled as in the filter itself
            let f = spectra.s_xy.scale_argument(s).factor()?.mul(&factor.factored_conj().inverse()?);
            let (plus, minus) = split_causal(&f)?;
            let grid: Vec<f64> = (0..200).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 199.0)).collect();
            let sup = grid.iter().map(|&w| f.eval(Complex64::new(w, 0.0)).norm()).fold(0.0, f64::max);
            for &w in &grid {
                for z in [Complex64::new(w, 0.0), Complex64::new(-w, 0.0)] {
                    let d = (plus.eval(z) + minus.eval(z) - f.eval(z)).norm() / sup;
                    worst_split = worst_split.max(d);
                }
            }
            worst_orth = worst_orth.max(orthogonality_residual(&spectra)?);
            Ok(())
        };
        if let Err(e) = run() {
            failures.push(format!("case {k}: {e}"));
        }
    }
    Outcome {
        pass: failures.is_empty()
            && worst_rec <= C4_RECONSTRUCT_REL
            && max_imag < 0.0
            && worst_split <= C4_SPLIT_REL
            && worst_orth < C4_ORTHOGONALITY,
        detail: format!(
            "{} cases: |s_y|² vs S_y {worst_rec:.2e}, max Im(root) {max_imag:.3e}, split {worst_split:.2e}, orthogonality {worst_orth:.2e}{}",
            corpus.len(),
            if failures.is_empty() { String::new() } else { format!(", errors: {failures:?}") }
        ),
    }
}

/// Largest E_N over a wide log grid, independent of the simplex refinement.
fn coarse_grid_max(ratio: f64, laser_db: f64, cfg: &OptimizeConfig) -> f64 {
    let axis: Vec<f64> = linspace(-4.0, 4.0, 161).into_iter().map(|e| 10f64.powf(e)).collect();
    let mut best = 0.0f64;
    for &wc in &axis {
        for &wd in &axis {
            best = best.max(entanglement_at(wc, wd, ratio, laser_db, cfg).unwrap_or(0.0));
        }
    }
    best
}

fn criterion_5() -> Outcome {
    let cfg = OptimizeConfig::default();
    let mut found = Vec::new();
    let mut notes = Vec::new();
    let mut pass = true;
    for (db, frozen) in THRESHOLDS {
        match threshold_ratio(db, &cfg) {
            Ok(t) => {
                found.push(t);
                if (t - frozen).abs() > THRESHOLD_TOL {
                    pass = false;
                    notes.push(format!("{db} dB off the frozen {frozen}"));
                }
                let below = coarse_grid_max(t - 0.05, db, &cfg);
                let above = coarse_grid_max(t + 0.05, db, &cfg);
                if below > 0.0 || above <= 0.0 {
                    pass = false;
                    notes.push(format!("{db} dB grid check: below {below:.2e}, above {above:.2e}"));
                }
            }
            Err(e) => {
                pass = false;
                notes.push(format!("{db} dB: {e}"));
            }
        }
    }
    if found.len() == 3 {
        if !(found[0] > C5_WINDOW.0 && found[0] < C5_WINDOW.1) {
            pass = false;
            notes.push(format!("0 dB threshold {:.4} outside ({}, {})", found[0], C5_WINDOW.0, C5_WINDOW.1));
        }
        if !(found[0] < found[1] && found[1] < found[2]) {
            pass = false;
            notes.push("thresholds not increasing in laser noise".into());
        }
    }
    Outcome {
        pass,
        detail: format!(
            "thresholds {:?} at 0/5/10 dB{}",
            found.iter().map(|t| (t * 1e4).round() / 1e4).collect::<Vec<_>>(),
            if notes.is_empty() { String::new() } else { format!("; {}", notes.join("; ")) }
        ),
    }
}

fn criterion_6() -> Outcome {
    let cfg = OptimizeConfig::default();
    let ratios = linspace(2.0, 10.0, 33);
    let levels = [0.0, 5.0, 10.0];
    let rows: Vec<SweepPoint> = match sweep(&ratios, &levels, &cfg) {
        Ok(r) => r,
        Err(e) => {
            return Outcome {
                pass: false,
                detail: format!("error: {e}"),
            }
        }
    };
    let curve = |db: f64| rows.iter().filter(|p| p.laser_db == db).map(|p| p.e_n_max).collect::<Vec<_>>();
    let curves: Vec<Vec<f64>> = levels.iter().map(|&db| curve(db)).collect();
    let monotone_ratio = curves.iter().all(|c| c.windows(2).all(|w| w[1] >= w[0]));
    let monotone_noise = (0..ratios.len()).all(|i| curves[0][i] >= curves[1][i] && curves[1][i] >= curves[2][i]);
    let at_reference = max_logneg(5.522, 0.0, &cfg).map(|p| p.e_n_max).unwrap_or(f64::NAN);
    Outcome {
        pass: monotone_ratio && monotone_noise && at_reference >= C6_EN_AT_REFERENCE,
        detail: format!(
            "{} rows, non-decreasing in ratio: {monotone_ratio}, non-increasing in noise: {monotone_noise}, E_N_max(5.522, 0 dB) = {at_reference:.5}",
            rows.len()
        ),
    }
}

fn criterion_7(covs: &[TwoModeCovariance]) -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let mut all = covs.to_vec();
    let mut worst_identical = 0.0f64;
    let mut min_pure = f64::INFINITY;
    let mut worst_cross = 0.0f64;
    for _ in 0..200 {
        let method = [Method::Closed, Method::Riccati][rng.gen_range(0..2)];
        let mode = ModeParams::new(log_uniform(&mut rng, 0.1, 10.0), log_uniform(&mut rng, 0.01, 3.0), log_uniform(&mut rng, 0.3, 100.0))
            .with_laser_db(rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0));
        let m = conditional_moments(&mode, method).expect("moments");
        let v = assemble(&m, &m).expect("assemble");
        worst_identical = worst_identical.max(log_negativity(&v).expect("E_N").e_n);
        all.push(v);

        let a = log_uniform(&mut rng, 0.1, 10.0);
        let b = a * log_uniform(&mut rng, 1.01, 100.0);
        let pure = |w: f64| conditional_moments(&ModeParams::new(w, 0.0, f64::INFINITY), Method::Closed).expect("pure");
        let v = assemble(&pure(a), &pure(b)).expect("assemble");
        min_pure = min_pure.min(log_negativity(&v).expect("E_N").e_n);
        all.push(v);

        let bare = ModeParams::new(mode.omega_alpha, mode.omega_f, mode.omega_x);
        let crossings = [
            budget(&bare, bare.omega_f).expect("budget").s_force,
            budget(&bare, bare.omega_x).expect("budget").s_sens,
            budget(&bare, bare.omega_alpha).expect("budget").s_quant,
        ];
        for c in crossings {
            worst_cross = worst_cross.max((c - 1.0).abs());
        }
    }
    let min_symplectic = all
        .iter()
        .map(|v| physicality_check(v).symplectic_eigenvalues[0])
        .fold(f64::INFINITY, f64::min);
    Outcome {
        pass: min_symplectic >= 0.5 - PHYSICALITY_TOL && worst_identical == 0.0 && min_pure > 0.0 && worst_cross <= C7_INTERSECTION,
        detail: format!(
            "{} covariances, min symplectic eigenvalue {min_symplectic:.6} (≥ 1/2 − {PHYSICALITY_TOL:.0e}), identical-channel E_N max {worst_identical}, pure unequal E_N min {min_pure:.3e}, SQL crossings {worst_cross:.1e}",
            all.len()
        ),
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn main() {
    let mut covs = Vec::new();
    let mut results = Vec::new();

    let (o, t) = timed(criterion_1);
    results.push(report(1, "reference-point E_N", t, C1_BUDGET, o));
    let (o, t) = timed(criterion_2);
    results.push(report(2, "closed-form uncertainty identity", t, C2_BUDGET, o));
    let (o, t) = timed(|| criterion_3(&mut covs));
    results.push(report(3, "three-way method agreement", t, C3_BUDGET, o));
    let (o, t) = timed(criterion_4);
    results.push(report(4, "factorization and projection", t, C4_BUDGET, o));
    let (o, t) = timed(criterion_5);
    results.push(report(5, "entanglement threshold", t, C5_BUDGET, o));
    let (o, t) = timed(criterion_6);
    results.push(report(6, "maximized E_N sweep shape", t, C6_BUDGET, o));
    let (o, t) = timed(|| criterion_7(&covs));
    results.push(report(7, "physics sanity", t, C7_BUDGET, o));

    let failed = results.iter().filter(|p| !**p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
