use std::f64::consts::{PI, SQRT_2};

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::factor::{spectral_factorize, split_causal, SpectralFactor};
use super::quadrature::{integrate_half_line, QuadratureConfig};
use crate::error::{invalid, Error, Result};
use crate::params::{effective_zetas, ModeParams};
use crate::rational::{anticausal_inner_product, real_line_integral, FactoredRational, PartialFractions, RationalFunction};
use crate::spectra::SpectraSet;

/// Second moments of one mode's conditional Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalMoments {
    pub v_xx: f64,
    pub v_pp: f64,
    pub v_xp: f64,
}

impl ConditionalMoments {
    pub fn new(v_xx: f64, v_pp: f64, v_xp: f64) -> Self {
        Self { v_xx, v_pp, v_xp }
    }

    /// Minimum-uncertainty ground state of an oscillator at `omega`.
    pub fn ground_state(omega: f64) -> Self {
        Self::new(0.5 / omega, 0.5 * omega, 0.0)
    }

    pub fn uncertainty(&self) -> f64 {
        uncertainty_product(self)
    }

    pub fn as_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.v_xx, self.v_xp, self.v_xp, self.v_pp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v_xx > 0.0 && self.v_xx.is_finite()) {
            return Err(invalid("v_xx", format!("must be positive, got {}", self.v_xx)));
        }
        if !(self.v_pp > 0.0 && self.v_pp.is_finite()) {
            return Err(invalid("v_pp", format!("must be positive, got {}", self.v_pp)));
        }
        if !self.v_xp.is_finite() {
            return Err(invalid("v_xp", "must be finite"));
        }
        Ok(())
    }
}

/// U = V_xx V_pp − V_xp², bounded below by ħ²/4.
pub fn uncertainty_product(m: &ConditionalMoments) -> f64 {
    m.v_xx * m.v_pp - m.v_xp * m.v_xp
}

/// Filter pieces for one channel, in the rescaled variable u = Ω/scale.
struct Projection {
    factor: SpectralFactor,
    gx: (PartialFractions, PartialFractions),
    gp: (PartialFractions, PartialFractions),
    residual: FactoredRational,
    scale: f64,
}

fn project(spectra: &SpectraSet) -> Result<Projection> {
    let s = spectra.scale;
    let factor = spectral_factorize(&spectra.s_y.scale_argument(s))?;
    let inv_conj = factor.factored_conj().inverse()?;
    let over_sy_conj = |f: &RationalFunction| -> Result<FactoredRational> {
        Ok(f.scale_argument(s).factor()?.mul(&inv_conj))
    };
    let gx = split_causal(&over_sy_conj(&spectra.s_xy)?)?;
    let gp = split_causal(&over_sy_conj(&spectra.s_py)?)?;
    let residual = spectra.s_x_residual.scale_argument(s).factor()?;
    Ok(Projection {
        factor,
        gx,
        gp,
        residual,
        scale: s,
    })
}

/// Causal Wiener filter K_x = [S_xy/s_y*]_+ / s_y, as a function of Ω.
pub fn wiener_gain(spectra: &SpectraSet) -> Result<RationalFunction> {
    let p = project(spectra)?;
    Ok(gain_scaled(&p)?.scale_argument(1.0 / p.scale))
}

fn gain_scaled(p: &Projection) -> Result<RationalFunction> {
    let inv = p.factor.factored().inverse()?.to_rational();
    Ok(&p.gx.0.to_rational() * &inv)
}

/// Size of [(S_xy − K_x S_y)/s_y*]_+ relative to S_xy/s_y*, which vanishes
/// for the optimal filter. The causal part is rebuilt from residues at every
/// lower-half-plane singularity the pieces could have, each found by a contour
/// integral of the pointwise-evaluated function.
pub fn orthogonality_residual(spectra: &SpectraSet) -> Result<f64> {
    let p = project(spectra)?;
    let s = p.scale;
    let k = gain_scaled(&p)?;
    let sxy = spectra.s_xy.scale_argument(s);
    let sy = spectra.s_y.scale_argument(s);
    let sy_conj = p.factor.factored_conj();
    let r = |z: Complex64| (sxy.eval(z) - k.eval(z) * sy.eval(z)) / sy_conj.eval(z);

    let mut singular: Vec<Complex64> = p.factor.zeros.iter().chain(&p.factor.poles).copied().collect();
    singular.extend(sxy.factor()?.poles);
    singular.extend(sy.factor()?.poles);
    let mirrored: Vec<Complex64> = singular.iter().map(|z| z.conj()).collect();
    singular.extend(mirrored);
    let mut lower: Vec<Complex64> = Vec::new();
    for z in singular.iter().filter(|z| z.im < 0.0) {
        if !lower.iter().any(|w| (w - z).norm() <= 1e-9 * z.norm()) {
            lower.push(*z);
        }
    }

    const N: usize = 64;
    let mut principal = Vec::with_capacity(lower.len());
    for &z0 in &lower {
        let gap = singular
            .iter()
            .map(|w| (w - z0).norm())
            .filter(|d| *d > 1e-9 * z0.norm())
            .fold(f64::INFINITY, f64::min);
        let rho = 0.3 * gap.min(z0.norm().max(1e-3));
        let res: Complex64 = (0..N)
            .map(|j| {
                let e = Complex64::from_polar(rho, 2.0 * PI * j as f64 / N as f64);
                r(z0 + e) * e
            })
            .sum::<Complex64>()
            / N as f64;
        principal.push((z0, res));
    }

    let (mut worst, mut size) = (0.0f64, 0.0f64);
    for j in 0..=400 {
        let u = 10f64.powf(-3.0 + 6.0 * j as f64 / 400.0);
        for w in [u, -u] {
            let z = Complex64::new(w, 0.0);
            let plus: Complex64 = principal.iter().map(|(p0, c)| c / (z - p0)).sum();
            worst = worst.max(plus.norm());
            size = size.max((sxy.eval(z) / sy_conj.eval(z)).norm());
        }
    }
    Ok(worst / size.max(f64::MIN_POSITIVE))
}

/// Conditional moments from the Wiener residuals, by residue summation.
/// Falls back to adaptive quadrature when the residue route is unavailable.
pub fn conditional_moments_numeric(spectra: &SpectraSet) -> Result<ConditionalMoments> {
    let p = project(spectra)?;
    match moments_by_residues(&p) {
        Ok(m) => Ok(m),
        Err(Error::Integration(msg)) => {
            log::debug!("residue integration unavailable ({msg}); using quadrature");
            moments_by_quadrature(&p, &QuadratureConfig::default())
        }
        Err(e) => Err(e),
    }
}

/// Same moments, always integrated by quadrature over the half line.
pub fn conditional_moments_quadrature(spectra: &SpectraSet) -> Result<ConditionalMoments> {
    moments_by_quadrature(&project(spectra)?, &QuadratureConfig::default())
}

// V = ∫₀^∞ dΩ/2π Re f = (1/4π) Re ∫_ℝ f for Hermitian f.
fn moments_by_residues(p: &Projection) -> Result<ConditionalMoments> {
    let s = p.scale;
    let e_xx = real_line_integral(&p.residual)?.re;
    let e_pp = real_line_integral(&p.residual.mul_x_pow(2))?.re;
    let gxx = anticausal_inner_product(&p.gx.1, &p.gx.1)?.re;
    let gpp = anticausal_inner_product(&p.gp.1, &p.gp.1)?.re;
    let gxp = anticausal_inner_product(&p.gx.1, &p.gp.1)?.re;
    let k = s / (4.0 * PI);
    Ok(ConditionalMoments {
        v_xx: k * (e_xx + gxx),
        v_pp: k * (s * s * e_pp + gpp),
        v_xp: k * gxp,
    })
}

fn moments_by_quadrature(p: &Projection, cfg: &QuadratureConfig) -> Result<ConditionalMoments> {
    let s = p.scale;
    let knees: Vec<f64> = p
        .residual
        .poles
        .iter()
        .chain(p.gx.1.terms.iter().map(|t| &t.pole))
        .map(|z| z.re.abs())
        .collect();
    let at = |u: f64| Complex64::new(u, 0.0);
    let e = |u: f64| p.residual.eval(at(u)).re;
    let gx = |u: f64| p.gx.1.eval(at(u));
    let gp = |u: f64| p.gp.1.eval(at(u));
    let xx = integrate_half_line(|u| e(u) + gx(u).norm_sqr(), 1.0, &knees, cfg)?;
    let pp = integrate_half_line(|u| s * s * u * u * e(u) + gp(u).norm_sqr(), 1.0, &knees, cfg)?;
    let xp = integrate_half_line(|u| (gx(u) * gp(u).conj()).re, 1.0, &knees, cfg)?;
    let k = s / (2.0 * PI);
    Ok(ConditionalMoments {
        v_xx: k * xx,
        v_pp: k * pp,
        v_xp: k * xp,
    })
}

/// Detection-band closed forms for phase-quadrature readout of a nearly free
/// mass, with technical laser noise folded into the effective ζ's.
pub fn conditional_moments_closed(mode: &ModeParams) -> Result<ConditionalMoments> {
    let (zf, zx) = effective_zetas(mode)?;
    if mode.phi != 0.0 {
        return Err(invalid("phi", "closed form holds for phase-quadrature readout (phi = 0) only"));
    }
    let limit = 0.01 * mode.omega_alpha;
    if mode.omega_m > limit || mode.gamma_m > limit {
        log::warn!(
            "closed form assumes omega_m, gamma_m << omega_alpha (got {:.3e}, {:.3e} vs {:.3e})",
            mode.omega_m,
            mode.gamma_m,
            mode.omega_alpha
        );
    }
    let a = 1.0 + 2.0 * zf;
    let b = 1.0 + 2.0 * zx;
    let w = mode.omega_alpha;
    Ok(ConditionalMoments {
        v_xx: (a * b * b * b).powf(0.25) / (SQRT_2 * w),
        v_pp: w / SQRT_2 * (a * a * a * b).powf(0.25),
        v_xp: 0.5 * (a * b).sqrt(),
    })
}
