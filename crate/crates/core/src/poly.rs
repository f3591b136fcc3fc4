//! Complex-coefficient polynomials in the angular frequency variable.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Highest degree whose roots we are willing to compute.
pub const DEGREE_CAP: usize = 16;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Polynomial with coefficients in ascending degree.
#[derive(Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![ZERO] }
    }

    pub fn one() -> Self {
        Self::constant(ONE)
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The identity polynomial Ω.
    pub fn x() -> Self {
        Self::new(vec![ZERO, ONE])
    }

    /// lead · Π (Ω − r).
    pub fn from_roots(roots: &[Complex64], lead: Complex64) -> Self {
        let mut c = vec![lead];
        for &r in roots {
            let mut next = vec![ZERO; c.len() + 1];
            for (k, &ck) in c.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= ck * r;
            }
            c = next;
        }
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == ZERO
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().expect("non-empty")
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Coefficient-wise conjugate: on the real axis this evaluates to the
    /// complex conjugate of the original polynomial.
    pub fn conj(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// p(s·u) as a polynomial in u.
    pub fn scale_argument(&self, s: f64) -> Self {
        let mut f = 1.0;
        Self::new(
            self.coeffs
                .iter()
                .map(|&c| {
                    let out = c * f;
                    f *= s;
                    out
                })
                .collect(),
        )
    }

    /// p(u + c) as a polynomial in u (Taylor shift).
    pub fn shift_argument(&self, c: Complex64) -> Self {
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let next = a[j + 1];
                a[j] += c * next;
            }
        }
        Self::new(a)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let n = self.degree();
        let d = divisor.degree();
        if n < d {
            return (Self::zero(), self.clone());
        }
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![ZERO; n - d + 1];
        for k in (0..=n - d).rev() {
            let q = rem[k + d] / lead;
            quot[k] = q;
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= q * dc;
            }
        }
        rem.truncate(d.max(1));
        (Self::new(quot), Self::new(rem))
    }

    /// All roots, via the eigenvalues of the companion matrix followed by a
    /// few Newton steps against the original coefficients.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        if self.is_zero() {
            return Err(Error::Factorization("roots of the zero polynomial".into()));
        }
        let degree = self.degree();
        if degree > DEGREE_CAP {
            return Err(Error::DegreeCap {
                degree,
                cap: DEGREE_CAP,
            });
        }
        // exact zeros at the origin
        let shift = self.coeffs.iter().take_while(|&&c| c == ZERO).count();
        let mut roots = vec![ZERO; shift];
        let reduced = &self.coeffs[shift..];
        let n = reduced.len() - 1;
        match n {
            0 => {}
            1 => roots.push(-reduced[0] / reduced[1]),
            _ => {
                let trimmed = Polynomial::new(reduced.to_vec());
                let deriv = trimmed.derivative();
                // Symmetric root patterns (e.g. even polynomials) can stall the
                // unshifted QR sweep; retry on p(z + c) for a few complex c.
                let radius = (reduced[0] / reduced[n]).norm().powf(1.0 / n as f64);
                let shifts = [ZERO, Complex64::new(0.31, 0.17), Complex64::new(-0.23, 0.41)];
                let found = shifts.iter().find_map(|&k| {
                    let c = k * radius;
                    companion_eigenvalues(&trimmed.shift_argument(c)).map(|ev| (c, ev))
                });
                let (c, ev) = found.ok_or_else(|| {
                    Error::Factorization("companion-matrix eigenvalues did not converge".into())
                })?;
                roots.extend(ev.into_iter().map(|z| polish(&trimmed, &deriv, z + c)));
            }
        }
        Ok(roots)
    }
}

fn companion_eigenvalues(p: &Polynomial) -> Option<Vec<Complex64>> {
    let c = p.coeffs();
    let n = p.degree();
    let lead = c[n];
    let mut companion = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = ONE;
    }
    for i in 0..n {
        companion[(i, n - 1)] = -c[i] / lead;
    }
    let (_, t) = Schur::try_new(companion, f64::EPSILON, 10_000)?.unpack();
    Some((0..n).map(|i| t[(i, i)]).collect())
}

fn polish(p: &Polynomial, dp: &Polynomial, mut z: Complex64) -> Complex64 {
    let mut best = p.eval(z).norm();
    for _ in 0..8 {
        let d = dp.eval(z);
        if d == ZERO {
            break;
        }
        let cand = z - p.eval(z) / d;
        let r = p.eval(cand).norm();
        if r < best {
            z = cand;
            best = r;
        } else {
            break;
        }
    }
    z
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial{:?}", self.coeffs)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let get = |p: &Polynomial, k: usize| p.coeffs.get(k).copied().unwrap_or(ZERO);
        Polynomial::new((0..n).map(|k| get(self, k) + get(rhs, k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
