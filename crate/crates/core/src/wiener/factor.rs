use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{Polynomial, ONE};
use crate::rational::{FactoredRational, PartialFractions, RationalFunction, AXIS_TOL};

/// Minimum-phase factor s_y of a power spectrum S_y = s_y s_y*: every zero and
/// pole lies in the lower half plane, so s_y and 1/s_y are causal.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFactor {
    pub gain: f64,
    pub zeros: Vec<Complex64>,
    pub poles: Vec<Complex64>,
}

impl SpectralFactor {
    pub fn factored(&self) -> FactoredRational {
        FactoredRational {
            gain: Complex64::new(self.gain, 0.0),
            zeros: self.zeros.clone(),
            poles: self.poles.clone(),
        }
    }

    /// s_y*(Ω), analytic in the lower half plane.
    pub fn factored_conj(&self) -> FactoredRational {
        self.factored().conj()
    }

    pub fn s_y(&self) -> RationalFunction {
        RationalFunction::new(
            Polynomial::from_roots(&self.zeros, Complex64::new(self.gain, 0.0)),
            Polynomial::from_roots(&self.poles, ONE),
        )
        .expect("monic denominator")
    }

    pub fn eval(&self, omega: f64) -> Complex64 {
        self.factored().eval(Complex64::new(omega, 0.0))
    }
}

/// Factorizes a Hermitian, strictly positive rational spectrum.
pub fn spectral_factorize(s: &RationalFunction) -> Result<SpectralFactor> {
    if s.is_zero() {
        return Err(Error::Factorization("spectrum is identically zero".into()));
    }
    let f = s.factor().map_err(|e| match e {
        Error::DegreeCap { .. } => e,
        other => Error::Factorization(other.to_string()),
    })?;
    let k = f.gain;
    if !(k.re > 0.0) || k.im.abs() > 1e-9 * k.re {
        return Err(Error::Factorization(format!(
            "leading coefficient ratio {k} is not positive real"
        )));
    }
    let scale = f.scale_hint().max(f64::MIN_POSITIVE);
    let zeros = lower_half(&f.zeros, scale, "zero")?;
    let poles = lower_half(&f.poles, scale, "pole")?;
    Ok(SpectralFactor {
        gain: k.re.sqrt(),
        zeros,
        poles,
    })
}

/// Picks the lower-half-plane member of each conjugate pair, averaging it
/// with the mirror image of its partner so that s s* is exactly Hermitian.
fn lower_half(roots: &[Complex64], scale: f64, what: &str) -> Result<Vec<Complex64>> {
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for &r in roots {
        if r.im.abs() <= AXIS_TOL * scale {
            return Err(Error::Factorization(format!("{what} {r} lies on the real axis")));
        }
        if r.im < 0.0 {
            lower.push(r);
        } else {
            upper.push(r.conj());
        }
    }
    if lower.len() != upper.len() {
        return Err(Error::Factorization(format!(
            "{what}s do not come in conjugate pairs ({} below, {} above the axis)",
            lower.len(),
            upper.len()
        )));
    }
    let mut out = Vec::with_capacity(lower.len());
    for z in lower {
        let (j, _) = upper
            .iter()
            .enumerate()
            .min_by(|a, b| (z - a.1).norm().total_cmp(&(z - b.1).norm()))
            .expect("same length");
        let w = upper.swap_remove(j);
        if (z - w).norm() > 1e-4 * z.norm().max(scale * 1e-8) {
            return Err(Error::Factorization(format!(
                "{what} {z} has no conjugate partner (nearest {})",
                w.conj()
            )));
        }
        out.push((z + w) * 0.5);
    }
    Ok(out)
}

/// [f]_+ and [f]_−: the lower- and upper-half-plane pole parts of a strictly
/// proper function.
pub fn split_causal(f: &FactoredRational) -> Result<(PartialFractions, PartialFractions)> {
    PartialFractions::from_factored(f)?.split_half_planes()
}

/// Positive-time component [f]_+ of a strictly proper rational function.
pub fn causal_part(f: &RationalFunction) -> Result<RationalFunction> {
    if !f.is_strictly_proper() {
        return Err(Error::Projection(format!(
            "function is not strictly proper (relative degree {})",
            f.relative_degree()
        )));
    }
    let (plus, _) = split_causal(&f.factor()?)?;
    Ok(plus.to_rational())
}

/// Negative-time component [f]_−.
pub fn anticausal_part(f: &RationalFunction) -> Result<RationalFunction> {
    if !f.is_strictly_proper() {
        return Err(Error::Projection(format!(
            "function is not strictly proper (relative degree {})",
            f.relative_degree()
        )));
    }
    let (_, minus) = split_causal(&f.factor()?)?;
    Ok(minus.to_rational())
}
