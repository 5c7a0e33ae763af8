//! Gamma function and the closed-form constants built from it.
//!
//! Every constant here is a ratio or product of Gamma values at real
//! arguments. Arguments below one half go through the reflection identity
//! with an exact `sin(pi x)`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `sin(pi x)` with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    let y = x.rem_euclid(2.0);
    if y == 0.0 || y == 1.0 {
        return 0.0;
    }
    if y <= 0.25 {
        (PI * y).sin()
    } else if y <= 0.75 {
        (PI * (y - 0.5)).cos()
    } else if y <= 1.25 {
        (PI * (1.0 - y)).sin()
    } else if y <= 1.75 {
        -(PI * (y - 1.5)).cos()
    } else {
        -(PI * (2.0 - y)).sin()
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

// Valid for x >= 0.5.
fn gamma_positive(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Gamma function for real arguments.
///
/// Returns [`Error::Pole`] at the non-positive integers.
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain("gamma(NaN)".into()));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(x));
    }
    if x < 0.5 {
        Ok(PI / (sin_pi(x) * gamma_positive(1.0 - x)))
    } else {
        Ok(gamma_positive(x))
    }
}

/// Reciprocal Gamma function, `1/Gamma(x)`, which is entire: it returns an
/// exact zero at the poles of Gamma.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x < 0.5 {
        sin_pi(x) * gamma_positive(1.0 - x) / PI
    } else {
        1.0 / gamma_positive(x)
    }
}

fn gamma_unchecked(x: f64) -> f64 {
    1.0 / rgamma(x)
}

/// Surface area `|S^{n-1}| = 2 pi^{n/2} / Gamma(n/2)` of the unit sphere in `R^n`.
pub fn sphere_area(n: u32) -> f64 {
    let h = 0.5 * n as f64;
    2.0 * PI.powf(h) * rgamma(h)
}

/// Normalisation `B_alpha = 2^{alpha/2} Gamma(alpha/2)` of the power-law
/// Fourier pair `B_alpha F(|x|^{-alpha}) = B_{n-alpha} |xi|^{alpha-n}`.
pub fn b_const(alpha: f64, n: u32) -> Result<f64> {
    if !(alpha > 0.0 && alpha < n as f64) {
        return Err(Error::Domain(format!(
            "B_alpha needs 0 < alpha < n, got alpha = {alpha}, n = {n}"
        )));
    }
    Ok(2f64.powf(0.5 * alpha) * gamma_unchecked(0.5 * alpha))
}

/// Constant in front of the double-integral representation of
/// `(psi, |p|^a psi)`:
/// `2^{a-1} pi^{-n/2} Gamma((n+a)/2) / |Gamma(-a/2)|`.
///
/// Only fractional orders `0 < a < 2` are accepted. At `a = 2` the constant
/// degenerates to zero and the representation no longer holds.
pub fn alpha_const(a: f64, n: u32) -> Result<f64> {
    if !(a > 0.0 && a < 2.0) || n == 0 {
        return Err(Error::Domain(format!(
            "alpha_{{a,n}} needs 0 < a < 2 and n >= 1, got a = {a}, n = {n}"
        )));
    }
    let nf = n as f64;
    let g_neg = gamma_unchecked(-0.5 * a).abs();
    Ok(2f64.powf(a - 1.0) * PI.powf(-0.5 * nf) * gamma_unchecked(0.5 * (nf + a)) / g_neg)
}

/// Sharp Hardy-Herbst constant `C_{a,n} = 2^a [Gamma((n+a)/4) / Gamma((n-a)/4)]^2`.
pub fn hardy_const(a: f64, n: u32) -> Result<f64> {
    let nf = n as f64;
    if !(a > 0.0 && a < nf) {
        return Err(Error::Domain(format!(
            "C_{{a,n}} needs 0 < a < n, got a = {a}, n = {n}"
        )));
    }
    let ratio = gamma_unchecked(0.25 * (nf + a)) * rgamma(0.25 * (nf - a));
    Ok(2f64.powf(a) * ratio * ratio)
}

/// Sharp constant of the ground-state representation for the Jordan product,
/// ```text
/// L_{a,b,n} = 2^a Gamma((n-b+a)/4) Gamma((n+b+a)/4)
///             / ( Gamma((n+b-a)/4) Gamma((n-b-a)/4) ).
/// ```
/// The denominator goes through `1/Gamma`, so `b = n - a` yields an exact zero.
pub fn li_const(a: f64, b: f64, n: u32) -> Result<f64> {
    let nf = n as f64;
    if !(a > 0.0 && b >= 0.0 && b <= nf - a) {
        return Err(Error::Domain(format!(
            "L_{{a,b,n}} needs a > 0 and 0 <= b <= n - a, got a = {a}, b = {b}, n = {n}"
        )));
    }
    let num = gamma_unchecked(0.25 * (nf - b + a)) * gamma_unchecked(0.25 * (nf + b + a));
    let den_inv = rgamma(0.25 * (nf + b - a)) * rgamma(0.25 * (nf - a - b));
    Ok(2f64.powf(a) * num * den_inv)
}

/// Exponents `(a, b)` of `|p|^a` and `|q|^b` together with the dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentTriple {
    pub a: f64,
    pub b: f64,
    pub n: u32,
}

impl ExponentTriple {
    /// Strictly positive exponents and `n >= 1`.
    pub fn new(a: f64, b: f64, n: u32) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) || n == 0 {
            return Err(Error::Domain(format!(
                "exponent triple needs a > 0, b > 0, n >= 1, got ({a}, {b}, {n})"
            )));
        }
        Ok(Self { a, b, n })
    }

    /// Like [`ExponentTriple::new`] but admits `a = 0` or `b = 0`, which is
    /// where the Jordan product collapses to a single power.
    pub fn boundary(a: f64, b: f64, n: u32) -> Result<Self> {
        if !(a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) || n == 0 {
            return Err(Error::Domain(format!(
                "exponent triple needs a >= 0, b >= 0, n >= 1, got ({a}, {b}, {n})"
            )));
        }
        Ok(Self { a, b, n })
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `n >= a + b` and `min(a, b) <= 2`.
    pub fn theorem1_ok(&self) -> bool {
        self.nf() >= self.a + self.b && self.a.min(self.b) <= 2.0
    }

    /// `a + b <= n` and `0 < min(a, b) < 2`.
    pub fn theorem2_ok(&self) -> bool {
        let m = self.a.min(self.b);
        self.a + self.b <= self.nf() && m > 0.0 && m < 2.0
    }

    /// Decay exponent `(n + b - a) / 2` of the virtual ground state `|x|^{-gamma}`.
    pub fn ground_state_exponent(&self) -> f64 {
        0.5 * (self.nf() + self.b - self.a)
    }

    pub fn swapped(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
            n: self.n,
        }
    }
}
