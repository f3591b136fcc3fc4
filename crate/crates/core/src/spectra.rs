//! (Cross-)spectral densities of one measurement channel and the SQL-normalized
//! noise budget.
//!
//! Conventions: single-sided spectra, vacuum field quadratures have S = 1, and
//! second moments are ∫₀^∞ dΩ/2π · S. The transform is x(t) = ∫ dΩ/2π x(Ω) e^{−iΩt},
//! so the mechanical susceptibility −1/[m(Ω² + iγΩ − ω²)] has its poles in the
//! lower half plane.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::params::{effective_zetas, ModeParams, HBAR};
use crate::poly::{Polynomial, ONE, ZERO};
use crate::rational::RationalFunction;

/// Classical noise PSDs driving the mirror (force) and corrupting the readout
/// (sensing). White by default; any rational PSD may be substituted.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalNoise {
    pub force: RationalFunction,
    pub sensing: RationalFunction,
}

impl ClassicalNoise {
    /// S_ξF = 2ħmΩ_F², S_ξx = 2ħ/(mΩ_x²).
    pub fn white(mode: &ModeParams) -> Self {
        Self {
            force: RationalFunction::constant(mode.force_noise_psd()),
            sensing: RationalFunction::constant(mode.sensing_noise_psd()),
        }
    }
}

/// All spectra the Wiener solver needs for one channel.
#[derive(Debug, Clone)]
pub struct SpectraSet {
    pub s_x: RationalFunction,
    pub s_p: RationalFunction,
    pub s_y: RationalFunction,
    pub s_xy: RationalFunction,
    pub s_py: RationalFunction,
    pub s_xp: RationalFunction,
    /// S_x − |S_xy|²/S_y, assembled source by source so that the large,
    /// nearly cancelling resonant parts never get subtracted numerically.
    pub s_x_residual: RationalFunction,
    /// Natural frequency scale of the channel: Ω_α, or the pendulum frequency
    /// when that is higher.
    pub scale: f64,
}

impl SpectraSet {
    pub fn members(&self) -> [(&'static str, &RationalFunction); 6] {
        [
            ("s_x", &self.s_x),
            ("s_p", &self.s_p),
            ("s_y", &self.s_y),
            ("s_xy", &self.s_xy),
            ("s_py", &self.s_py),
            ("s_xp", &self.s_xp),
        ]
    }
}

struct Source {
    psd: RationalFunction,
    /// numerator of the transfer function to x over the plant polynomial D
    to_x: Polynomial,
    /// direct (non-mechanical) coupling into y
    direct: Complex64,
}

/// Spectra for white classical noise.
pub fn build_spectra(mode: &ModeParams) -> Result<SpectraSet> {
    build_spectra_with_noise(mode, &ClassicalNoise::white(mode))
}

pub fn build_spectra_with_noise(mode: &ModeParams, noise: &ClassicalNoise) -> Result<SpectraSet> {
    mode.validate()?;
    let c = |re: f64| Complex64::new(re, 0.0);
    let alpha = mode.omega_alpha;
    let (sin, cos) = mode.phi.sin_cos();

    // m(Ω² + iγΩ − ω²) with m = 1
    let plant = Polynomial::new(vec![
        c(-mode.omega_m * mode.omega_m),
        Complex64::new(0.0, mode.gamma_m),
        ONE,
    ]);
    let plant_sq = &plant * &plant.conj();

    // y = sinφ a₁ + cosφ [a₂ + (α/ħ)(x + ξ_x)],  x = −(α a₁ + ξ_F)/D
    let sources = [
        Source {
            psd: RationalFunction::constant(mode.s_a1),
            to_x: Polynomial::constant(c(-alpha)),
            direct: c(sin),
        },
        Source {
            psd: RationalFunction::constant(mode.s_a2),
            to_x: Polynomial::zero(),
            direct: c(cos),
        },
        Source {
            psd: noise.force.clone(),
            to_x: Polynomial::constant(c(-1.0)),
            direct: ZERO,
        },
        Source {
            psd: noise.sensing.clone(),
            to_x: Polynomial::zero(),
            direct: c(cos * alpha),
        },
    ];
    let kappa = c(cos * alpha);
    let to_y: Vec<Polynomial> = sources
        .iter()
        .map(|s| &plant.scale(s.direct) + &s.to_x.scale(kappa))
        .collect();

    let weighted_sum = |f: &dyn Fn(usize) -> Polynomial| -> RationalFunction {
        sources
            .iter()
            .enumerate()
            .fold(RationalFunction::zero(), |acc, (k, s)| {
                &acc + &(&s.psd * &RationalFunction::from_poly(f(k)))
            })
    };
    let over_plant = |r: RationalFunction| -> Result<RationalFunction> {
        r.checked_div(&RationalFunction::from_poly(plant_sq.clone()))
    };

    let s_x = over_plant(weighted_sum(&|k| &sources[k].to_x * &sources[k].to_x.conj()))?;
    let s_xy = over_plant(weighted_sum(&|k| &sources[k].to_x * &to_y[k].conj()))?;
    let y_num = weighted_sum(&|k| &to_y[k] * &to_y[k].conj());
    let s_y = over_plant(y_num.clone())?;

    // S_x S_y − |S_xy|² = Σ_{k<l} S_k S_l |h_k d_l − h_l d_k|² / |D|²
    let mut det = RationalFunction::zero();
    for k in 0..sources.len() {
        for l in k + 1..sources.len() {
            let cross = &sources[k].to_x.scale(sources[l].direct)
                - &sources[l].to_x.scale(sources[k].direct);
            if cross.is_zero() {
                continue;
            }
            let w = &sources[k].psd * &sources[l].psd;
            det = &det + &(&w * &RationalFunction::from_poly(&cross * &cross.conj()));
        }
    }
    let s_x_residual = det.checked_div(&y_num)?;

    let omega = Polynomial::x();
    let i_omega = omega.scale(Complex64::new(0.0, 1.0));
    Ok(SpectraSet {
        s_p: s_x.mul_poly(&(&omega * &omega)),
        s_py: s_xy.mul_poly(&(-&i_omega)),
        s_xp: s_x.mul_poly(&i_omega),
        s_x,
        s_y,
        s_xy,
        s_x_residual,
        scale: mode.omega_alpha.max(mode.omega_m),
    })
}

/// Standard quantum limit 2ħ/(mΩ²) in SI units.
pub fn sql(m: f64, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(invalid("omega", format!("must be positive, got {omega}")));
    }
    if !(m > 0.0) {
        return Err(invalid("m", format!("must be positive, got {m}")));
    }
    Ok(2.0 * HBAR / (m * omega * omega))
}

/// Standard quantum limit with ħ = m = 1.
pub fn sql_internal(omega: f64) -> f64 {
    2.0 / (omega * omega)
}

/// Position-referred noise components normalized by the SQL.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseBudget {
    pub s_quant: f64,
    pub s_force: f64,
    pub s_sens: f64,
    pub s_total: f64,
}

/// Detection-band (Ω ≫ ω_m, γ_m) budget. Technical laser noise is folded into
/// the force and sensing terms through the effective ζ's.
pub fn budget(mode: &ModeParams, omega: f64) -> Result<NoiseBudget> {
    if !(omega > 0.0) {
        return Err(invalid("omega", format!("must be positive, got {omega}")));
    }
    let (zf, zx) = effective_zetas(mode)?;
    let r = omega / mode.omega_alpha;
    let s_quant = 0.5 * (r * r + 1.0 / (r * r));
    let s_force = zf / (r * r);
    let s_sens = zx * r * r;
    Ok(NoiseBudget {
        s_quant,
        s_force,
        s_sens,
        s_total: s_quant + s_force + s_sens,
    })
}

/// Same decomposition using the full pendulum susceptibility. Only defined for
/// phase-quadrature readout, where the output refers cleanly to position.
pub fn budget_exact(mode: &ModeParams, omega: f64) -> Result<NoiseBudget> {
    if !(omega > 0.0) {
        return Err(invalid("omega", format!("must be positive, got {omega}")));
    }
    mode.validate()?;
    if mode.phi != 0.0 {
        return Err(invalid("phi", "exact budget requires phase-quadrature readout"));
    }
    effective_zetas(mode)?;
    let a2 = mode.omega_alpha * mode.omega_alpha;
    let d = Complex64::new(
        omega * omega - mode.omega_m * mode.omega_m,
        mode.gamma_m * omega,
    );
    let chi2 = 1.0 / d.norm_sqr();
    let to_sql = omega * omega / 2.0;
    let s_quant = (1.0 / a2 + a2 * chi2) * to_sql;
    let s_force = chi2 * (a2 * (mode.s_a1 - 1.0) + mode.force_noise_psd()) * to_sql;
    let s_sens = (mode.sensing_noise_psd() + (mode.s_a2 - 1.0) / a2) * to_sql;
    Ok(NoiseBudget {
        s_quant,
        s_force,
        s_sens,
        s_total: s_quant + s_force + s_sens,
    })
}
