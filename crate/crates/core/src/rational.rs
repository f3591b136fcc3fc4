//! Rational functions of the angular frequency with complex coefficients.
//!
//! Three views of the same object are used:
//! [`RationalFunction`] holds numerator and denominator polynomials and is what the
//! spectra are built from; [`FactoredRational`] holds gain, zeros and poles, which
//! makes half-plane bookkeeping and exact cancellation easy; [`PartialFractions`]
//! holds the pole expansion used for causal projection and residue integrals.

use std::f64::consts::PI;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{Polynomial, ONE, ZERO};

/// Roots closer than this (relative) are treated as one multiple root.
pub const CLUSTER_TOL: f64 = 1e-6;
/// Poles whose imaginary part is below this fraction of the function's largest
/// root magnitude count as lying on the real axis.
pub const AXIS_TOL: f64 = 1e-8;

/// Ratio of two polynomials. The denominator is kept monic.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidParameter {
                name: "denominator",
                reason: "identically zero".into(),
            });
        }
        let lead = den.leading();
        Ok(Self {
            num: num.scale(ONE / lead),
            den: den.scale(ONE / lead),
        })
    }

    pub fn from_poly(p: Polynomial) -> Self {
        Self {
            num: p,
            den: Polynomial::one(),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_poly(Polynomial::constant(Complex64::new(c, 0.0)))
    }

    pub fn zero() -> Self {
        Self::from_poly(Polynomial::zero())
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.num.eval(z) / self.den.eval(z)
    }

    pub fn eval_real(&self, w: f64) -> Complex64 {
        self.eval(Complex64::new(w, 0.0))
    }

    /// deg(den) − deg(num); the zero function counts as infinitely decaying.
    pub fn relative_degree(&self) -> isize {
        if self.num.is_zero() {
            return isize::MAX;
        }
        self.den.degree() as isize - self.num.degree() as isize
    }

    pub fn is_strictly_proper(&self) -> bool {
        self.relative_degree() > 0
    }

    /// f*(Ω): the complex conjugate of f on the real axis, continued analytically.
    pub fn conj(&self) -> Self {
        Self {
            num: self.num.conj(),
            den: self.den.conj(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn mul_poly(&self, p: &Polynomial) -> Self {
        Self {
            num: &self.num * p,
            den: self.den.clone(),
        }
    }

    /// f(s·u) as a function of u.
    pub fn scale_argument(&self, s: f64) -> Self {
        Self::new(self.num.scale_argument(s), self.den.scale_argument(s))
            .expect("scaling keeps the denominator nonzero")
    }

    pub fn factor(&self) -> Result<FactoredRational> {
        FactoredRational::from_rational(self)
    }

    /// Cancels numerator/denominator roots that agree to within [`CLUSTER_TOL`].
    pub fn reduce(&self) -> Result<Self> {
        Ok(self.factor()?.to_rational())
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::InvalidParameter {
                name: "divisor",
                reason: "division by the zero rational function".into(),
            });
        }
        Self::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.den == rhs.den {
            return RationalFunction {
                num: &self.num + &rhs.num,
                den: self.den.clone(),
            };
        }
        if rhs.den.degree() == 0 {
            return RationalFunction {
                num: &self.num + &(&rhs.num * &self.den),
                den: self.den.clone(),
            };
        }
        if self.den.degree() == 0 {
            return rhs + self;
        }
        RationalFunction {
            num: &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            den: &self.den * &rhs.den,
        }
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction {
            num: &self.num * &rhs.num,
            den: &self.den * &rhs.den,
        }
    }
}

impl Div for &RationalFunction {
    type Output = RationalFunction;
    /// Panics when dividing by the zero function; see [`RationalFunction::checked_div`].
    fn div(self, rhs: &RationalFunction) -> RationalFunction {
        self.checked_div(rhs).expect("division by zero rational function")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: RationalFunction) -> RationalFunction {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

/// gain · Π(Ω − zᵢ) / Π(Ω − pⱼ)
#[derive(Debug, Clone, PartialEq)]
pub struct FactoredRational {
    pub gain: Complex64,
    pub zeros: Vec<Complex64>,
    pub poles: Vec<Complex64>,
}

impl FactoredRational {
    pub fn from_rational(f: &RationalFunction) -> Result<Self> {
        let poles = f.den.roots()?;
        if f.num.is_zero() {
            return Ok(Self {
                gain: ZERO,
                zeros: Vec::new(),
                poles,
            });
        }
        let zeros = f.num.roots()?;
        let mut out = Self {
            gain: f.num.leading() / f.den.leading(),
            zeros,
            poles,
        };
        out.cancel(CLUSTER_TOL);
        Ok(out)
    }

    pub fn constant(c: Complex64) -> Self {
        Self {
            gain: c,
            zeros: Vec::new(),
            poles: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.gain == ZERO
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let num: Complex64 = self.zeros.iter().map(|&r| z - r).product();
        let den: Complex64 = self.poles.iter().map(|&r| z - r).product();
        self.gain * num / den
    }

    pub fn relative_degree(&self) -> isize {
        if self.is_zero() {
            return isize::MAX;
        }
        self.poles.len() as isize - self.zeros.len() as isize
    }

    pub fn conj(&self) -> Self {
        Self {
            gain: self.gain.conj(),
            zeros: self.zeros.iter().map(|z| z.conj()).collect(),
            poles: self.poles.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidParameter {
                name: "divisor",
                reason: "inverse of the zero function".into(),
            });
        }
        Ok(Self {
            gain: ONE / self.gain,
            zeros: self.poles.clone(),
            poles: self.zeros.clone(),
        })
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            let mut poles = self.poles.clone();
            poles.extend_from_slice(&rhs.poles);
            return Self {
                gain: ZERO,
                zeros: Vec::new(),
                poles,
            };
        }
        let mut out = Self {
            gain: self.gain * rhs.gain,
            zeros: [self.zeros.as_slice(), rhs.zeros.as_slice()].concat(),
            poles: [self.poles.as_slice(), rhs.poles.as_slice()].concat(),
        };
        out.cancel(CLUSTER_TOL);
        out
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.inverse()?))
    }

    /// Multiply by Ωᵏ.
    pub fn mul_x_pow(&self, k: usize) -> Self {
        let mut zeros = self.zeros.clone();
        zeros.extend(std::iter::repeat_n(ZERO, k));
        let mut out = Self {
            gain: self.gain,
            zeros,
            poles: self.poles.clone(),
        };
        out.cancel(CLUSTER_TOL);
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            gain: self.gain * c,
            ..self.clone()
        }
    }

    /// Removes zero/pole pairs closer than `tol` relative to their magnitude.
    pub fn cancel(&mut self, tol: f64) {
        let mut i = 0;
        while i < self.zeros.len() {
            let z = self.zeros[i];
            let hit = self
                .poles
                .iter()
                .enumerate()
                .filter(|(_, &p)| (z - p).norm() <= tol * z.norm().max(p.norm()))
                .min_by(|a, b| (z - a.1).norm().total_cmp(&(z - b.1).norm()))
                .map(|(j, _)| j);
            match hit {
                Some(j) => {
                    self.zeros.swap_remove(i);
                    self.poles.swap_remove(j);
                }
                None => i += 1,
            }
        }
    }

    pub fn to_rational(&self) -> RationalFunction {
        RationalFunction::new(
            Polynomial::from_roots(&self.zeros, self.gain),
            Polynomial::from_roots(&self.poles, ONE),
        )
        .expect("monic denominator")
    }

    /// Largest root magnitude, used as the natural frequency scale.
    pub fn scale_hint(&self) -> f64 {
        self.zeros
            .iter()
            .chain(&self.poles)
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// One pole of a partial-fraction expansion: Σⱼ coeffs[j] / (Ω − pole)^(j+1).
#[derive(Debug, Clone, PartialEq)]
pub struct PoleTerm {
    pub pole: Complex64,
    pub coeffs: Vec<Complex64>,
}

impl PoleTerm {
    pub fn multiplicity(&self) -> usize {
        self.coeffs.len()
    }

    /// r-th derivative of this term at z.
    fn eval_derivative(&self, z: Complex64, r: usize) -> Complex64 {
        let d = z - self.pole;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                let n = j + 1;
                // d^r/dz^r (z-p)^-n = (-1)^r n (n+1) ... (n+r-1) (z-p)^-(n+r)
                let rising: f64 = (0..r).map(|k| (n + k) as f64).product();
                let sign = if r.is_multiple_of(2) { 1.0 } else { -1.0 };
                c * sign * rising / d.powi((n + r) as i32)
            })
            .sum()
    }
}

/// Strictly proper rational function expanded over its poles.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PartialFractions {
    pub terms: Vec<PoleTerm>,
}

impl PartialFractions {
    /// Expands a strictly proper function. Poles within [`CLUSTER_TOL`] of each
    /// other are merged into one multiple pole.
    pub fn from_factored(f: &FactoredRational) -> Result<Self> {
        if f.is_zero() {
            return Ok(Self::default());
        }
        if f.zeros.len() >= f.poles.len() {
            return Err(Error::Projection(format!(
                "function is not strictly proper ({} zeros, {} poles)",
                f.zeros.len(),
                f.poles.len()
            )));
        }
        let clusters = cluster(&f.poles, CLUSTER_TOL);
        let mut terms = Vec::with_capacity(clusters.len());
        for (k, &(p, m)) in clusters.iter().enumerate() {
            // Taylor coefficients of f(Ω)(Ω − p)^m about p, up to order m − 1.
            let mut series = vec![ZERO; m];
            series[0] = f.gain;
            for &z in &f.zeros {
                mul_series_linear(&mut series, p - z);
            }
            for (j, &(q, mq)) in clusters.iter().enumerate() {
                if j == k {
                    continue;
                }
                for _ in 0..mq {
                    mul_series_inverse_linear(&mut series, p - q);
                }
            }
            let coeffs = (0..m).map(|j| series[m - 1 - j]).collect();
            terms.push(PoleTerm { pole: p, coeffs });
        }
        Ok(Self { terms })
    }

    pub fn from_rational(f: &RationalFunction) -> Result<Self> {
        Self::from_factored(&f.factor()?)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms.iter().map(|t| t.eval_derivative(z, 0)).sum()
    }

    pub fn eval_derivative(&self, z: Complex64, r: usize) -> Complex64 {
        self.terms.iter().map(|t| t.eval_derivative(z, r)).sum()
    }

    pub fn conj(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| PoleTerm {
                    pole: t.pole.conj(),
                    coeffs: t.coeffs.iter().map(|c| c.conj()).collect(),
                })
                .collect(),
        }
    }

    pub fn scale_hint(&self) -> f64 {
        self.terms.iter().map(|t| t.pole.norm()).fold(0.0, f64::max)
    }

    /// Splits into (lower-half-plane poles, upper-half-plane poles). With the
    /// e^{−iΩt} transform convention the first part is the positive-time
    /// (causal) component.
    pub fn split_half_planes(&self) -> Result<(Self, Self)> {
        let scale = self.scale_hint();
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for t in &self.terms {
            if t.pole.im.abs() <= AXIS_TOL * scale {
                return Err(Error::Projection(format!(
                    "pole {} lies on the real axis",
                    t.pole
                )));
            }
            if t.pole.im < 0.0 {
                lower.push(t.clone());
            } else {
                upper.push(t.clone());
            }
        }
        Ok((Self { terms: lower }, Self { terms: upper }))
    }

    pub fn to_rational(&self) -> RationalFunction {
        let den_roots: Vec<Complex64> = self
            .terms
            .iter()
            .flat_map(|t| std::iter::repeat_n(t.pole, t.multiplicity()))
            .collect();
        let mut num = Polynomial::zero();
        for (k, t) in self.terms.iter().enumerate() {
            let others: Vec<Complex64> = self
                .terms
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .flat_map(|(_, o)| std::iter::repeat_n(o.pole, o.multiplicity()))
                .collect();
            let base = Polynomial::from_roots(&others, ONE);
            let m = t.multiplicity();
            for (j, &c) in t.coeffs.iter().enumerate() {
                let own = Polynomial::from_roots(&vec![t.pole; m - 1 - j], c);
                num = &num + &(&base * &own);
            }
        }
        RationalFunction::new(num, Polynomial::from_roots(&den_roots, ONE))
            .expect("monic denominator")
    }

    /// Σ residues at upper-half-plane poles.
    pub fn upper_residue_sum(&self) -> Complex64 {
        self.terms
            .iter()
            .filter(|t| t.pole.im > 0.0)
            .map(|t| t.coeffs[0])
            .sum()
    }
}

/// ∫_{−∞}^{∞} f(Ω) dΩ by closing the contour in the upper half plane.
pub fn real_line_integral(f: &FactoredRational) -> Result<Complex64> {
    if f.is_zero() {
        return Ok(ZERO);
    }
    if f.relative_degree() < 2 {
        return Err(Error::Integration(format!(
            "integrand decays too slowly (relative degree {})",
            f.relative_degree()
        )));
    }
    let pf = PartialFractions::from_factored(f)?;
    check_off_axis(&pf)?;
    Ok(Complex64::new(0.0, 2.0 * PI) * pf.upper_residue_sum())
}

/// ∫_{−∞}^{∞} a(Ω)·b*(Ω) dΩ where every pole of `a` and of `b` lies in the
/// upper half plane (so b* is analytic there).
pub fn anticausal_inner_product(a: &PartialFractions, b: &PartialFractions) -> Result<Complex64> {
    check_off_axis(a)?;
    check_off_axis(b)?;
    if a.terms.iter().chain(&b.terms).any(|t| t.pole.im < 0.0) {
        return Err(Error::Integration(
            "inner product expects upper-half-plane poles only".into(),
        ));
    }
    let bc = b.conj();
    let mut total = ZERO;
    for t in &a.terms {
        let mut fact = 1.0;
        for (j, &c) in t.coeffs.iter().enumerate() {
            if j > 0 {
                fact *= j as f64;
            }
            total += c * bc.eval_derivative(t.pole, j) / fact;
        }
    }
    Ok(Complex64::new(0.0, 2.0 * PI) * total)
}

fn check_off_axis(pf: &PartialFractions) -> Result<()> {
    let scale = pf.scale_hint();
    match pf.terms.iter().find(|t| t.pole.im.abs() <= AXIS_TOL * scale) {
        Some(t) => Err(Error::Integration(format!(
            "pole {} lies on the integration path",
            t.pole
        ))),
        None => Ok(()),
    }
}

/// Groups roots closer than `tol` (relative) into (mean location, multiplicity).
pub(crate) fn cluster(roots: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let mut groups: Vec<(Complex64, usize)> = Vec::new();
    for &r in roots {
        match groups
            .iter_mut()
            .find(|(c, _)| (r - *c).norm() <= tol * r.norm().max(c.norm()))
        {
            Some((c, m)) => {
                *c = (*c * *m as f64 + r) / (*m as f64 + 1.0);
                *m += 1;
            }
            None => groups.push((r, 1)),
        }
    }
    groups
}

/// series ← series · (a + t), truncated.
fn mul_series_linear(series: &mut [Complex64], a: Complex64) {
    for k in (0..series.len()).rev() {
        let prev = if k > 0 { series[k - 1] } else { ZERO };
        series[k] = series[k] * a + prev;
    }
}

/// series ← series / (a + t), truncated.
fn mul_series_inverse_linear(series: &mut [Complex64], a: Complex64) {
    // 1/(a + t) = Σ (−t)ⁿ / a^(n+1)
    let n = series.len();
    let inv: Vec<Complex64> = (0..n)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign / a.powi(k as i32 + 1)
        })
        .collect();
    let orig = series.to_vec();
    for k in 0..n {
        series[k] = (0..=k).map(|j| orig[j] * inv[k - j]).sum();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel_err(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    fn sample(seed: u64) -> RationalFunction {
        // deterministic pseudo-random small rational functions
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let num: Vec<Complex64> = (0..3).map(|_| c(next(), next())).collect();
        let den_roots: Vec<Complex64> = (0..4).map(|_| c(2.0 * next(), 0.3 + next().abs())).collect();
        RationalFunction::new(Polynomial::new(num), Polynomial::from_roots(&den_roots, ONE)).unwrap()
    }

    #[test]
    fn partial_fractions_reproduce_function() {
        for seed in 0..20 {
            let f = sample(seed);
            let pf = PartialFractions::from_rational(&f).unwrap();
            for w in [-3.0, -0.4, 0.0, 0.7, 5.0] {
                let z = c(w, 0.1);
                assert!(rel_err(pf.eval(z), f.eval(z)) < 1e-10);
            }
            let back = pf.to_rational();
            for w in [-1.0, 2.5] {
                assert!(rel_err(back.eval_real(w), f.eval_real(w)) < 1e-10);
            }
        }
    }

    #[test]
    fn double_pole_expansion() {
        // 1/(Ω − i)² · 1/(Ω + 2i)
        let f = FactoredRational {
            gain: ONE,
            zeros: vec![],
            poles: vec![c(0.0, 1.0), c(0.0, 1.0), c(0.0, -2.0)],
        };
        let pf = PartialFractions::from_factored(&f).unwrap();
        assert_eq!(pf.terms.len(), 2);
        for w in [-1.0, 0.3, 4.0] {
            let z = c(w, 0.0);
            assert!(rel_err(pf.eval(z), f.eval(z)) < 1e-12);
        }
    }

    #[test]
    fn improper_input_rejected() {
        let f = RationalFunction::new(Polynomial::from_real(&[1.0, 1.0]), Polynomial::from_real(&[2.0, 1.0])).unwrap();
        assert!(matches!(
            PartialFractions::from_rational(&f),
            Err(Error::Projection(_))
        ));
    }

    #[test]
    fn lorentzian_integral() {
        // ∫ dΩ / (Ω² + a²) = π / a
        let a = 0.7;
        let f = RationalFunction::new(Polynomial::one(), Polynomial::from_real(&[a * a, 0.0, 1.0])).unwrap();
        let got = real_line_integral(&f.factor().unwrap()).unwrap();
        assert!((got.re - PI / a).abs() < 1e-13 && got.im.abs() < 1e-13);
    }

    #[test]
    fn inner_product_matches_direct_integral() {
        // a = 1/(Ω − i), b = 1/(Ω − 2i): ∫ a b* = ∫ 1/((Ω − i)(Ω + 2i)) = 2πi/(3i) = 2π/3
        let a = PartialFractions {
            terms: vec![PoleTerm { pole: c(0.0, 1.0), coeffs: vec![ONE] }],
        };
        let b = PartialFractions {
            terms: vec![PoleTerm { pole: c(0.0, 2.0), coeffs: vec![ONE] }],
        };
        let got = anticausal_inner_product(&a, &b).unwrap();
        assert!((got - c(2.0 * PI / 3.0, 0.0)).norm() < 1e-13);
        // double pole in a: ∫ 1/((Ω − i)²(Ω + 2i)) = 2πi · d/dΩ[1/(Ω + 2i)] at i = 2πi · (−1/(3i)²)
        let a2 = PartialFractions {
            terms: vec![PoleTerm { pole: c(0.0, 1.0), coeffs: vec![ZERO, ONE] }],
        };
        let want = c(0.0, 2.0 * PI) * (-ONE / (c(0.0, 3.0) * c(0.0, 3.0)));
        assert!((anticausal_inner_product(&a2, &b).unwrap() - want).norm() < 1e-13);
    }

    #[test]
    fn cancellation_removes_common_roots() {
        let shared = c(0.4, -1.2);
        let f = RationalFunction::new(
            Polynomial::from_roots(&[shared, c(1.0, 1.0)], ONE),
            Polynomial::from_roots(&[shared, c(-2.0, 0.5), c(0.0, -3.0)], ONE),
        )
        .unwrap();
        let r = f.reduce().unwrap();
        assert_eq!(r.num().degree(), 1);
        assert_eq!(r.den().degree(), 2);
    }

    proptest! {
        #[test]
        fn arithmetic_agrees_pointwise(sa in 0u64..1000, sb in 1000u64..2000, w in -10.0f64..10.0) {
            let a = sample(sa);
            let b = sample(sb);
            let z = c(w, 0.0);
            prop_assert!(rel_err((&a + &b).eval(z), a.eval(z) + b.eval(z)) < 1e-10);
            prop_assert!(rel_err((&a - &b).eval(z), a.eval(z) - b.eval(z)) < 1e-10);
            prop_assert!(rel_err((&a * &b).eval(z), a.eval(z) * b.eval(z)) < 1e-10);
            prop_assert!(rel_err((&a / &b).eval(z), a.eval(z) / b.eval(z)) < 1e-10);
        }
    }
}
