//! Two-mirror covariance matrix, physicality and logarithmic negativity.
//!
//! Mirror coordinates relate to the measured channels by x_c,d = x_e ± x_n and
//! p_c,d = (p_e ± p_n)/2. All quantities use ħ = 1.

use nalgebra::{Matrix2, Matrix4};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::wiener::ConditionalMoments;

/// Tolerance below ħ/2 still accepted as physical.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Covariance over (x_e, p_e, x_n, p_n).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeCovariance {
    pub v: Matrix4<f64>,
}

impl TwoModeCovariance {
    pub fn from_blocks(ee: Matrix2<f64>, nn: Matrix2<f64>, en: Matrix2<f64>) -> Self {
        let mut v = Matrix4::zeros();
        v.fixed_view_mut::<2, 2>(0, 0).copy_from(&ee);
        v.fixed_view_mut::<2, 2>(2, 2).copy_from(&nn);
        v.fixed_view_mut::<2, 2>(0, 2).copy_from(&en);
        v.fixed_view_mut::<2, 2>(2, 0).copy_from(&en.transpose());
        Self { v }
    }

    pub fn v_ee(&self) -> Matrix2<f64> {
        self.v.fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn v_nn(&self) -> Matrix2<f64> {
        self.v.fixed_view::<2, 2>(2, 2).into_owned()
    }

    pub fn v_en(&self) -> Matrix2<f64> {
        self.v.fixed_view::<2, 2>(0, 2).into_owned()
    }

    /// (det(A + B), det(A − B)) when V = [[A, B], [B, A]] with B symmetric.
    fn block_dets(&self) -> Option<(f64, f64)> {
        let (a, n, b) = (self.v_ee(), self.v_nn(), self.v_en());
        let scale = self.v.abs().max();
        let symmetric = (a - n).abs().max() <= 1e-14 * scale && (b - b.transpose()).abs().max() <= 1e-14 * scale;
        symmetric.then(|| ((a + b).determinant(), (a - b).determinant()))
    }

    /// det V, through det(A + B)·det(A − B) for the symmetric block layout.
    pub fn det(&self) -> f64 {
        match self.block_dets() {
            Some((p, m)) => p * m,
            None => self.v.determinant(),
        }
    }

    /// Covariance over (x_c, p_c, x_d, p_d).
    pub fn to_channel_basis(&self) -> Matrix4<f64> {
        let s = Matrix4::new(
            1.0, 0.0, 1.0, 0.0,
            0.0, 0.5, 0.0, 0.5,
            1.0, 0.0, -1.0, 0.0,
            0.0, 0.5, 0.0, -0.5,
        );
        s * self.v * s.transpose()
    }
}

/// Builds the mirror covariance from the two channels' conditional moments.
pub fn assemble(common: &ConditionalMoments, differential: &ConditionalMoments) -> Result<TwoModeCovariance> {
    common.validate()?;
    differential.validate()?;
    let block = |sign: f64| {
        Matrix2::new(
            (common.v_xx + sign * differential.v_xx) / 4.0,
            (common.v_xp + sign * differential.v_xp) / 2.0,
            (common.v_xp + sign * differential.v_xp) / 2.0,
            common.v_pp + sign * differential.v_pp,
        )
    };
    let ee = block(1.0);
    Ok(TwoModeCovariance::from_blocks(ee, ee, block(-1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Physicality {
    /// (ν₋, ν₊), ascending.
    pub symplectic_eigenvalues: [f64; 2],
    pub is_physical: bool,
}

/// Roots ν² of ν⁴ − Δν² + det = 0, the smaller one taken from the product
/// to avoid cancellation.
fn symplectic_pair(delta: f64, det: f64) -> [f64; 2] {
    let disc = (delta * delta - 4.0 * det).max(0.0).sqrt();
    let big = (delta + disc) / 2.0;
    let small = if big > 0.0 { det / big } else { (delta - disc) / 2.0 };
    [small.max(0.0).sqrt(), big.max(0.0).sqrt()]
}

pub fn physicality_check(v: &TwoModeCovariance) -> Physicality {
    // With the symmetric block layout Δ² − 4 det V = (det(A+B) − det(A−B))²,
    // so ν±² are the two block determinants themselves.
    let nu = match v.block_dets() {
        Some((p, m)) => [p.min(m).max(0.0).sqrt(), p.max(m).max(0.0).sqrt()],
        None => {
            let delta = v.v_ee().determinant() + v.v_nn().determinant() + 2.0 * v.v_en().determinant();
            symplectic_pair(delta, v.det())
        }
    };
    let positive = v.v.cholesky().is_some();
    Physicality {
        symplectic_eigenvalues: nu,
        is_physical: positive && nu[0] >= 0.5 - PHYSICALITY_TOL,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogNegativity {
    pub e_n: f64,
    pub sigma_minus: f64,
    pub sigma: f64,
    pub det_v: f64,
}

/// E_N = max(0, −log₂ 2σ⁻), σ⁻ the smaller symplectic eigenvalue of the
/// partially transposed covariance.
pub fn log_negativity(v: &TwoModeCovariance) -> Result<LogNegativity> {
    let phys = physicality_check(v);
    if !phys.is_physical {
        return Err(Error::Physicality {
            min_eigenvalue: phys.symplectic_eigenvalues[0],
        });
    }
    let sigma = v.v_ee().determinant() + v.v_nn().determinant() - 2.0 * v.v_en().determinant();
    let det_v = v.det();
    let sigma_minus = symplectic_pair(sigma, det_v)[0];
    Ok(LogNegativity {
        e_n: (-(2.0 * sigma_minus).log2()).max(0.0),
        sigma_minus,
        sigma,
        det_v,
    })
}

/// Conditional moments normalized to the ground state of an oscillator at
/// `omega_norm`: x by √(ħ/2mω), p by √(ħmω/2).
pub fn normalized_covariance(m: &ConditionalMoments, omega_norm: f64) -> Result<Matrix2<f64>> {
    m.validate()?;
    if !(omega_norm > 0.0 && omega_norm.is_finite()) {
        return Err(invalid("omega_norm", format!("must be positive, got {omega_norm}")));
    }
    Ok(Matrix2::new(
        2.0 * omega_norm * m.v_xx,
        2.0 * m.v_xp,
        2.0 * m.v_xp,
        2.0 * m.v_pp / omega_norm,
    ))
}

/// Boundary of the one-standard-deviation ellipse in normalized (x, p).
pub fn ellipse_points(m: &ConditionalMoments, omega_norm: f64, n_points: usize) -> Result<Vec<(f64, f64)>> {
    if n_points < 8 {
        return Err(invalid("n_points", format!("need at least 8, got {n_points}")));
    }
    let cov = normalized_covariance(m, omega_norm)?;
    let l = cov
        .cholesky()
        .ok_or_else(|| invalid("moments", "covariance is not positive definite"))?
        .l();
    Ok((0..n_points)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n_points as f64;
            let p = l * nalgebra::Vector2::new(t.cos(), t.sin());
            (p[0], p[1])
        })
        .collect())
}

/// Semi-axes (major, minor) and the major axis angle from the x axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipseAxes {
    pub major: f64,
    pub minor: f64,
    pub angle: f64,
}

pub fn ellipse_axes(m: &ConditionalMoments, omega_norm: f64) -> Result<EllipseAxes> {
    let cov = normalized_covariance(m, omega_norm)?;
    let (a, b, c) = (cov[(0, 0)], cov[(0, 1)], cov[(1, 1)]);
    let mean = 0.5 * (a + c);
    let half = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    Ok(EllipseAxes {
        major: (mean + half).sqrt(),
        minor: (mean - half).max(0.0).sqrt(),
        angle: 0.5 * (2.0 * b).atan2(a - c),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ModeParams;
    use crate::wiener::conditional_moments_closed;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn reference() -> (ConditionalMoments, ConditionalMoments) {
        // frequencies in units of 2π·Hz
        let c = conditional_moments_closed(&ModeParams::new(1600.0, 230.0, 1270.0)).unwrap();
        let d = conditional_moments_closed(&ModeParams::new(184.0, 230.0, 1270.0)).unwrap();
        (c, d)
    }

    #[test]
    fn reference_blocks_and_negativity() {
        let (c, d) = reference();
        let v = assemble(&c, &d).unwrap();
        let ee = v.v_ee();
        assert_relative_eq!(ee[(0, 0)], 1.73802412e-3, max_relative = 1e-8);
        assert_relative_eq!(ee[(0, 1)], 1.03953306, max_relative = 1e-8);
        assert_relative_eq!(ee[(1, 1)], 2047.51711, max_relative = 1e-8);
        let en = v.v_en();
        assert_relative_eq!(en[(0, 0)], -1.08612865e-3, max_relative = 1e-8);
        assert_relative_eq!(en[(0, 1)], 2.93118083e-3, max_relative = 1e-7);
        assert_relative_eq!(en[(1, 1)], 1286.55017, max_relative = 1e-8);
        let ln = log_negativity(&v).unwrap();
        assert_relative_eq!(ln.e_n, 0.3508584807, max_relative = 1e-8);
        assert_relative_eq!(ln.sigma, 7.750745484, max_relative = 1e-8);
        assert_relative_eq!(ln.det_v, 1.167740409, max_relative = 1e-8);
        assert_relative_eq!(ln.sigma_minus, 0.3920586836, max_relative = 1e-8);
        assert_relative_eq!(ln.det_v, v.v.determinant(), max_relative = 1e-9);
    }

    #[test]
    fn identical_channels_form_a_product_state() {
        let (c, _) = reference();
        let v = assemble(&c, &c).unwrap();
        assert_eq!(v.v_en(), Matrix2::zeros());
        assert_eq!(log_negativity(&v).unwrap().e_n, 0.0);
    }

    #[test]
    fn channel_basis_round_trip() {
        let (c, d) = reference();
        let back = assemble(&c, &d).unwrap().to_channel_basis();
        assert_relative_eq!(back[(0, 0)], c.v_xx, max_relative = 1e-12);
        assert_relative_eq!(back[(1, 1)], c.v_pp, max_relative = 1e-12);
        assert_relative_eq!(back[(0, 1)], c.v_xp, max_relative = 1e-12);
        assert_relative_eq!(back[(2, 2)], d.v_xx, max_relative = 1e-12);
        assert_relative_eq!(back[(3, 3)], d.v_pp, max_relative = 1e-12);
        assert_relative_eq!(back[(2, 3)], d.v_xp, max_relative = 1e-12);
        for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            assert!(back[(i, j)].abs() < 1e-12 * back.abs().max());
        }
    }

    #[test]
    fn vacuum_and_sub_heisenberg() {
        let vac = TwoModeCovariance { v: Matrix4::identity() * 0.5 };
        let p = physicality_check(&vac);
        assert!(p.is_physical);
        assert_relative_eq!(p.symplectic_eigenvalues[0], 0.5, max_relative = 1e-15);
        assert_relative_eq!(p.symplectic_eigenvalues[1], 0.5, max_relative = 1e-15);
        let ln = log_negativity(&vac).unwrap();
        assert_relative_eq!(ln.sigma_minus, 0.5, max_relative = 1e-15);
        assert_eq!(ln.e_n, 0.0);

        let squashed = TwoModeCovariance { v: Matrix4::identity() * 0.2 };
        assert!(!physicality_check(&squashed).is_physical);
        assert!(matches!(log_negativity(&squashed), Err(Error::Physicality { .. })));
    }

    #[test]
    fn ellipse_normalization() {
        let w = 3.0;
        let pts = ellipse_points(&ConditionalMoments::ground_state(w), w, 64).unwrap();
        assert_eq!(pts.len(), 64);
        for (x, p) in pts {
            assert_relative_eq!(x.hypot(p), 1.0, max_relative = 1e-14);
        }
        assert!(ellipse_points(&ConditionalMoments::ground_state(w), w, 4).is_err());
    }

    #[test]
    fn reference_common_ellipse_is_squeezed() {
        let (c, _) = reference();
        let w = 0.5 * (1600.0 + 184.0);
        let ax = ellipse_axes(&c, w).unwrap();
        // squeezed below vacuum along a tilted quadrature, stretched across it
        assert!(ax.minor < 1.0 && ax.major > 1.0);
        assert!(ax.angle > 0.0 && ax.angle < std::f64::consts::FRAC_PI_2);
        assert_relative_eq!(ax.major / ax.minor, 2.509935790, max_relative = 1e-8);
        assert_relative_eq!(ax.major * ax.minor, (4.0 * c.uncertainty()).sqrt(), max_relative = 1e-12);
    }

    fn moments(wa: f64, zf: f64, zx: f64) -> ConditionalMoments {
        conditional_moments_closed(&ModeParams::new(wa, zf * wa, wa / zx)).unwrap()
    }

    proptest! {
        #[test]
        fn pure_squeezed_ellipse_keeps_vacuum_area(wa in 0.01f64..100.0, wn in 0.01f64..100.0) {
            let ax = ellipse_axes(&moments(wa, 0.0, 1e-9), wn).unwrap();
            prop_assert!((ax.major * ax.minor - 1.0).abs() < 1e-6);
        }

        #[test]
        fn assembled_states_are_physical_and_swap_symmetric(
            wc in -2.0f64..2.0, wd in -2.0f64..2.0,
            zfc in -3.0f64..1.0, zxc in -3.0f64..1.0, zfd in -3.0f64..1.0, zxd in -3.0f64..1.0,
        ) {
            let c = moments(10f64.powf(wc), 10f64.powf(zfc), 10f64.powf(zxc));
            let d = moments(10f64.powf(wd), 10f64.powf(zfd), 10f64.powf(zxd));
            let v = assemble(&c, &d).unwrap();
            prop_assert!(physicality_check(&v).is_physical);
            let a = log_negativity(&v).unwrap();
            let b = log_negativity(&assemble(&d, &c).unwrap()).unwrap();
            prop_assert!((a.e_n - b.e_n).abs() <= 1e-9 * a.e_n.max(1.0));
            if a.e_n > 0.0 {
                prop_assert!(a.sigma_minus < 0.5);
            }
        }

        #[test]
        fn pure_unequal_channels_are_entangled(wc in -2.0f64..2.0, ratio in 1.05f64..100.0) {
            let wc = 10f64.powf(wc);
            let c = ConditionalMoments::new(1.0 / (2f64.sqrt() * wc), wc / 2f64.sqrt(), 0.5);
            let wd = wc * ratio;
            let d = ConditionalMoments::new(1.0 / (2f64.sqrt() * wd), wd / 2f64.sqrt(), 0.5);
            prop_assert!(log_negativity(&assemble(&c, &d).unwrap()).unwrap().e_n > 0.0);
        }

        #[test]
        fn more_noise_never_helps(zf in -2.0f64..0.5, zx in -2.0f64..0.5, bump in 1.01f64..3.0) {
            let c = moments(1600.0 / 230.0, 10f64.powf(zf), 10f64.powf(zx));
            let d0 = moments(184.0 / 230.0, 10f64.powf(zf), 10f64.powf(zx));
            let d1 = moments(184.0 / 230.0, bump * 10f64.powf(zf), 10f64.powf(zx));
            let d2 = moments(184.0 / 230.0, 10f64.powf(zf), bump * 10f64.powf(zx));
            let e = |d: &ConditionalMoments| log_negativity(&assemble(&c, d).unwrap()).unwrap().e_n;
            prop_assert!(e(&d1) <= e(&d0) + 1e-12);
            prop_assert!(e(&d2) <= e(&d0) + 1e-12);
        }
    }
}
