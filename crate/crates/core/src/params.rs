//! Physical and normalized parameter records.
//!
//! Everything downstream of this module works in units with ħ = m = 1, where
//! `m` is the reduced mirror mass. Frequencies stay angular (rad/s, or whatever
//! reference unit the caller picked); only frequency ratios enter the conditional
//! moments and the entanglement, so the choice of reference does not matter.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Reduced Planck constant [J s] (CODATA 2018).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light [m/s].
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Conversion between SI quantities and the internal ħ = m = 1 system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    /// Action scale of the internal system. Always 1.
    pub hbar: f64,
    /// Kilograms per internal mass unit (the reduced mirror mass).
    pub mass_unit: f64,
    /// Radians per second per internal frequency unit.
    pub freq_unit: f64,
}

impl UnitSystem {
    pub fn new(mass_kg: f64, freq_unit: f64) -> Result<Self> {
        if !(mass_kg > 0.0 && mass_kg.is_finite()) {
            return Err(invalid("mass_unit", format!("must be positive, got {mass_kg}")));
        }
        if !(freq_unit > 0.0 && freq_unit.is_finite()) {
            return Err(invalid("freq_unit", format!("must be positive, got {freq_unit}")));
        }
        Ok(Self {
            hbar: 1.0,
            mass_unit: mass_kg,
            freq_unit,
        })
    }

    pub fn freq_to_internal(&self, rad_per_s: f64) -> f64 {
        rad_per_s / self.freq_unit
    }

    pub fn freq_to_si(&self, internal: f64) -> f64 {
        internal * self.freq_unit
    }

    /// Position variance: internal units of ħ/(m Ω_ref) to m².
    pub fn xx_to_si(&self, v: f64) -> f64 {
        v * HBAR / (self.mass_unit * self.freq_unit)
    }

    pub fn xx_to_internal(&self, v_si: f64) -> f64 {
        v_si * self.mass_unit * self.freq_unit / HBAR
    }

    /// Momentum variance: internal units of ħ m Ω_ref to (kg m/s)².
    pub fn pp_to_si(&self, v: f64) -> f64 {
        v * HBAR * self.mass_unit * self.freq_unit
    }

    pub fn pp_to_internal(&self, v_si: f64) -> f64 {
        v_si / (HBAR * self.mass_unit * self.freq_unit)
    }

    /// Position-momentum covariance: internal units of ħ to J s.
    pub fn xp_to_si(&self, v: f64) -> f64 {
        v * HBAR
    }

    pub fn xp_to_internal(&self, v_si: f64) -> f64 {
        v_si / HBAR
    }
}

/// Hardware description of the power-recycled Michelson interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalSetup {
    /// Reduced mirror mass [kg].
    pub m: f64,
    /// Pendulum angular frequency [rad/s].
    pub omega_m: f64,
    /// Pendulum damping rate [rad/s].
    pub gamma_m: f64,
    /// Circulating arm power [W].
    pub power: f64,
    /// Carrier angular frequency [rad/s].
    pub omega_0: f64,
    /// Power-recycling mirror transmissivity, 0 < τ ≤ 1.
    pub tau: f64,
    /// Speed of light [m/s].
    pub c: f64,
}

impl PhysicalSetup {
    pub fn validate(&self) -> Result<()> {
        positive("m", self.m)?;
        if !(self.omega_m >= 0.0 && self.omega_m.is_finite()) {
            return Err(invalid("omega_m", "must be non-negative"));
        }
        positive("gamma_m", self.gamma_m)?;
        positive("power", self.power)?;
        positive("omega_0", self.omega_0)?;
        positive("c", self.c)?;
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(invalid("tau", format!("must lie in (0, 1], got {}", self.tau)));
        }
        Ok(())
    }
}

/// Which interferometer port / mirror-motion mode a channel measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    /// Bright port, x_e + x_n.
    Common,
    /// Dark port, x_e - x_n.
    Differential,
}

/// Measurement strength α of a channel, in SI units.
///
/// Dark port: α_d = √(4ħω₀P)/c. The bright port sees the power-recycling
/// cavity enhancement, α_c = (2/τ)·α_d.
pub fn measurement_strength(setup: &PhysicalSetup, channel: Channel) -> Result<f64> {
    setup.validate()?;
    let alpha_d = (4.0 * HBAR * setup.omega_0 * setup.power).sqrt() / setup.c;
    Ok(match channel {
        Channel::Differential => alpha_d,
        Channel::Common => 2.0 / setup.tau * alpha_d,
    })
}

/// Ω_α = α/√(mħ), SI in and out.
pub fn omega_alpha_from_alpha(alpha: f64, m: f64) -> Result<f64> {
    positive("alpha", alpha)?;
    positive("m", m)?;
    Ok(alpha / (m * HBAR).sqrt())
}

/// Noise power relative to vacuum for a level quoted in dB above vacuum.
pub fn db_to_relative_psd(level_db: f64) -> f64 {
    10f64.powf(level_db / 10.0)
}

/// Everything needed to describe one measurement channel, in ħ = m = 1 units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeParams {
    /// Measurement-strength frequency Ω_α.
    pub omega_alpha: f64,
    /// Force-noise corner Ω_F.
    pub omega_f: f64,
    /// Sensing-noise corner Ω_x. `f64::INFINITY` switches sensing noise off.
    pub omega_x: f64,
    pub omega_m: f64,
    pub gamma_m: f64,
    /// Homodyne quadrature angle; 0 is phase-quadrature readout.
    pub phi: f64,
    /// Input amplitude-quadrature PSD relative to vacuum.
    pub s_a1: f64,
    /// Input phase-quadrature PSD relative to vacuum.
    pub s_a2: f64,
}

impl ModeParams {
    /// A nearly free mass (ω_m = 1e-4 Ω_α, γ_m = 1e-6 Ω_α) read out in the
    /// phase quadrature with vacuum input.
    pub fn new(omega_alpha: f64, omega_f: f64, omega_x: f64) -> Self {
        Self {
            omega_alpha,
            omega_f,
            omega_x,
            omega_m: 1e-4 * omega_alpha,
            gamma_m: 1e-6 * omega_alpha,
            phi: 0.0,
            s_a1: 1.0,
            s_a2: 1.0,
        }
    }

    pub fn with_pendulum(mut self, omega_m: f64, gamma_m: f64) -> Self {
        self.omega_m = omega_m;
        self.gamma_m = gamma_m;
        self
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn with_input_noise(mut self, s_a1: f64, s_a2: f64) -> Self {
        self.s_a1 = s_a1;
        self.s_a2 = s_a2;
        self
    }

    /// Technical laser noise given in dB above vacuum for each quadrature.
    pub fn with_laser_db(self, amp_db: f64, phase_db: f64) -> Self {
        self.with_input_noise(db_to_relative_psd(amp_db), db_to_relative_psd(phase_db))
    }

    pub fn with_omega_alpha(mut self, omega_alpha: f64) -> Self {
        self.omega_alpha = omega_alpha;
        self
    }

    pub fn validate(&self) -> Result<()> {
        positive("omega_alpha", self.omega_alpha)?;
        if !(self.omega_f >= 0.0 && self.omega_f.is_finite()) {
            return Err(invalid("omega_f", format!("must be non-negative, got {}", self.omega_f)));
        }
        if !(self.omega_x > 0.0) {
            return Err(invalid("omega_x", format!("must be positive, got {}", self.omega_x)));
        }
        if !(self.omega_m >= 0.0 && self.omega_m.is_finite()) {
            return Err(invalid("omega_m", format!("must be non-negative, got {}", self.omega_m)));
        }
        if !(self.gamma_m > 0.0 && self.gamma_m.is_finite()) {
            return Err(invalid(
                "gamma_m",
                format!("pendulum must be strictly damped, got {}", self.gamma_m),
            ));
        }
        if !self.phi.is_finite() {
            return Err(invalid("phi", "must be finite"));
        }
        for (name, s) in [("s_a1", self.s_a1), ("s_a2", self.s_a2)] {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(invalid(name, format!("must be non-negative, got {s}")));
            }
        }
        Ok(())
    }

    /// Bare (Ω_F/Ω_α)².
    pub fn zeta_f_sq(&self) -> f64 {
        (self.omega_f / self.omega_alpha).powi(2)
    }

    /// Bare (Ω_α/Ω_x)².
    pub fn zeta_x_sq(&self) -> f64 {
        (self.omega_alpha / self.omega_x).powi(2)
    }

    /// White force-noise PSD 2ħmΩ_F².
    pub fn force_noise_psd(&self) -> f64 {
        2.0 * self.omega_f * self.omega_f
    }

    /// White sensing-noise PSD 2ħ/(mΩ_x²).
    pub fn sensing_noise_psd(&self) -> f64 {
        2.0 / (self.omega_x * self.omega_x)
    }
}

/// ζ_F² and ζ_x² with technical input noise folded in: (S_a1 − 1)/2 and
/// (S_a2 − 1)/2 are added respectively.
pub fn effective_zetas(mode: &ModeParams) -> Result<(f64, f64)> {
    mode.validate()?;
    let zf = mode.zeta_f_sq() + (mode.s_a1 - 1.0) / 2.0;
    let zx = mode.zeta_x_sq() + (mode.s_a2 - 1.0) / 2.0;
    if zf < 0.0 {
        return Err(Error::Domain {
            quadrature: "amplitude (force)",
            value: zf,
        });
    }
    if zx < 0.0 {
        return Err(Error::Domain {
            quadrature: "phase (sensing)",
            value: zx,
        });
    }
    Ok((zf, zx))
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be positive and finite, got {v}")))
    }
}
