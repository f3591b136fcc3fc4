//! Adaptive Gauss–Kronrod (7/15) quadrature over the half line.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    /// Accept the result if the estimated error falls below this when the
    /// subdivision budget runs out.
    pub fallback_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            fallback_tol: 1e-7,
            max_intervals: 4000,
        }
    }
}

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// ∫_a^b f with global adaptive bisection of the worst interval.
pub fn integrate(f: impl Fn(f64) -> f64, breakpoints: &[f64], cfg: &QuadratureConfig) -> Result<f64> {
    let mut intervals: Vec<(f64, f64, f64, f64)> = breakpoints
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (v, e) = gk15(&f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    loop {
        let total: f64 = intervals.iter().map(|i| i.2).sum();
        let err: f64 = intervals.iter().map(|i| i.3).sum();
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::Integration("non-finite integrand".into()));
        }
        let scale = total.abs().max(f64::MIN_POSITIVE);
        if err <= cfg.rel_tol * scale {
            return Ok(total);
        }
        if intervals.len() >= cfg.max_intervals {
            if err <= cfg.fallback_tol * scale {
                return Ok(total);
            }
            return Err(Error::Integration(format!(
                "relative error estimate {:.3e} after {} subintervals",
                err / scale,
                intervals.len()
            )));
        }
        let (k, _) = intervals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .3.total_cmp(&b.1 .3))
            .expect("non-empty");
        let (a, b, _, _) = intervals.swap_remove(k);
        let m = 0.5 * (a + b);
        for (lo, hi) in [(a, m), (m, b)] {
            let (v, e) = gk15(&f, lo, hi);
            intervals.push((lo, hi, v, e));
        }
    }
}

/// ∫_0^∞ g(Ω) dΩ through Ω = s·t/(1 − t). `knees` are frequencies where the
/// integrand changes quickly; they become breakpoints in t.
pub fn integrate_half_line(
    g: impl Fn(f64) -> f64,
    s: f64,
    knees: &[f64],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let mut bp = vec![0.0, 1.0];
    bp.extend(knees.iter().filter(|k| **k > 0.0 && k.is_finite()).map(|k| k / (s + k)));
    bp.sort_by(f64::total_cmp);
    bp.dedup();
    integrate(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let u = 1.0 - t;
            g(s * t / u) * s / (u * u)
        },
        &bp,
        cfg,
    )
}
