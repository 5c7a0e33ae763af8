//! Closed-form radial test functions `psi(|x|)` and the one-dimensional
//! integrals built from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{dyadic_from_zero, GaussLegendre, Neumaier};
use crate::specialfn::{rgamma, sphere_area};

/// Beyond this radius a Gaussian-polynomial profile is treated as exactly zero.
const GAUSSIAN_HARD_ZERO: f64 = 40.0;

/// The C^2 bump used by the power-cutoff family.
///
/// `eta(t) = 1` for `|t| <= 1`, `0` for `|t| >= 2`, and
/// `1 - S(|t| - 1)` in between, with `S` the quintic smoothstep
/// `S(x) = 10 x^3 - 15 x^4 + 6 x^5`.
#[derive(Debug, Clone, Copy)]
pub struct CutoffShape;

impl CutoffShape {
    /// Monomial coefficients of the smoothstep `S`, lowest degree first.
    pub const SMOOTHSTEP: [f64; 6] = [0.0, 0.0, 0.0, 10.0, -15.0, 6.0];

    fn step(x: f64) -> (f64, f64, f64) {
        let s = x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
        let ds = 30.0 * x * x * (1.0 - x) * (1.0 - x);
        let dds = 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x);
        (s, ds, dds)
    }

    pub fn eta(t: f64) -> f64 {
        let at = t.abs();
        if at <= 1.0 {
            1.0
        } else if at >= 2.0 {
            0.0
        } else {
            1.0 - Self::step(at - 1.0).0
        }
    }

    pub fn eta_prime(t: f64) -> f64 {
        let at = t.abs();
        if at <= 1.0 || at >= 2.0 {
            0.0
        } else {
            -t.signum() * Self::step(at - 1.0).1
        }
    }

    pub fn eta_second(t: f64) -> f64 {
        let at = t.abs();
        if at <= 1.0 || at >= 2.0 {
            0.0
        } else {
            -Self::step(at - 1.0).2
        }
    }
}

/// A radial test function.
///
/// Serialises as `{"family": "GaussianPoly", "coeffs": [...]}` or
/// `{"family": "PowerCutoff", "gamma_exp": g, "cutoff_scale": R}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum RadialProfile {
    /// `psi(r) = p(r) exp(-r^2/2)` with `p(r) = sum_j coeffs[j] r^j`.
    GaussianPoly { coeffs: Vec<f64> },
    /// `psi(r) = r^{-gamma} eta(ln r / ln R)`.
    PowerCutoff { gamma_exp: f64, cutoff_scale: f64 },
}

impl RadialProfile {
    pub fn gaussian() -> Self {
        RadialProfile::GaussianPoly { coeffs: vec![1.0] }
    }

    pub fn gaussian_poly(coeffs: Vec<f64>) -> Result<Self> {
        let p = RadialProfile::GaussianPoly { coeffs };
        p.validate()?;
        Ok(p)
    }

    pub fn power_cutoff(gamma_exp: f64, cutoff_scale: f64) -> Result<Self> {
        let p = RadialProfile::PowerCutoff {
            gamma_exp,
            cutoff_scale,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RadialProfile::GaussianPoly { coeffs } => {
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::Invalid(
                        "GaussianPoly needs a non-empty list of finite coefficients".into(),
                    ));
                }
                if coeffs.iter().all(|&c| c == 0.0) {
                    return Err(Error::Invalid("GaussianPoly coefficients are all zero".into()));
                }
            }
            RadialProfile::PowerCutoff {
                gamma_exp,
                cutoff_scale,
            } => {
                if !gamma_exp.is_finite() || !(cutoff_scale.is_finite() && *cutoff_scale > 1.0) {
                    return Err(Error::Invalid(format!(
                        "PowerCutoff needs finite gamma_exp and cutoff_scale > 1, got {gamma_exp}, {cutoff_scale}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Short human-readable descriptor used in reports.
    pub fn describe(&self) -> String {
        match self {
            RadialProfile::GaussianPoly { coeffs } => {
                let terms: Vec<String> = coeffs.iter().map(|c| format!("{c}")).collect();
                format!("gaussian_poly[{}]", terms.join(","))
            }
            RadialProfile::PowerCutoff {
                gamma_exp,
                cutoff_scale,
            } => format!("power_cutoff(gamma={gamma_exp},R={cutoff_scale})"),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.eval_with_log_derivative(r).0
    }

    /// `(psi(r), r psi'(r))`.
    pub fn eval_with_log_derivative(&self, r: f64) -> (f64, f64) {
        match self {
            RadialProfile::GaussianPoly { coeffs } => {
                if r > GAUSSIAN_HARD_ZERO {
                    return (0.0, 0.0);
                }
                let (mut p, mut dp) = (0.0, 0.0);
                for &c in coeffs.iter().rev() {
                    dp = dp * r + p;
                    p = p * r + c;
                }
                let g = (-0.5 * r * r).exp();
                (p * g, r * (dp - r * p) * g)
            }
            RadialProfile::PowerCutoff {
                gamma_exp,
                cutoff_scale,
            } => {
                if r <= 0.0 {
                    return (0.0, 0.0);
                }
                let l = cutoff_scale.ln();
                let t = r.ln() / l;
                if t.abs() >= 2.0 {
                    return (0.0, 0.0);
                }
                let pw = r.powf(-gamma_exp);
                let eta = CutoffShape::eta(t);
                (pw * eta, pw * (-gamma_exp * eta + CutoffShape::eta_prime(t) / l))
            }
        }
    }

    pub fn is_even_polynomial(&self) -> bool {
        match self {
            RadialProfile::GaussianPoly { coeffs } => {
                coeffs.iter().skip(1).step_by(2).all(|&c| c == 0.0)
            }
            RadialProfile::PowerCutoff { .. } => false,
        }
    }

    /// Lowest power `k` with `psi(r) ~ r^k` as `r -> 0`; `None` when the
    /// profile vanishes identically near the origin.
    pub fn origin_order(&self) -> Option<usize> {
        match self {
            RadialProfile::GaussianPoly { coeffs } => coeffs.iter().position(|&c| c != 0.0),
            RadialProfile::PowerCutoff { .. } => None,
        }
    }

    /// Radius beyond which `psi` (times any moderate power of `r`) is
    /// negligible: below `1e-18` relative to the coefficient scale.
    pub fn outer_radius(&self) -> f64 {
        match self {
            RadialProfile::GaussianPoly { coeffs } => {
                let scale: f64 = coeffs.iter().map(|c| c.abs()).sum();
                let mut r: f64 = 1.0;
                loop {
                    let poly: f64 = coeffs
                        .iter()
                        .enumerate()
                        .map(|(j, c)| c.abs() * r.powi(j as i32))
                        .sum();
                    let log_mag = (poly / scale).ln() + 8.0 * (1.0 + r).ln() - 0.5 * r * r;
                    if log_mag < -41.5 || r >= GAUSSIAN_HARD_ZERO {
                        return r;
                    }
                    r += 0.05;
                }
            }
            RadialProfile::PowerCutoff { cutoff_scale, .. } => cutoff_scale * cutoff_scale,
        }
    }

    /// Log-radius interval outside of which the profile is zero. The lower
    /// end is `-inf` for profiles that do not vanish near the origin.
    pub fn log_support(&self) -> (f64, f64) {
        match self {
            RadialProfile::GaussianPoly { .. } => (f64::NEG_INFINITY, self.outer_radius().ln()),
            RadialProfile::PowerCutoff { cutoff_scale, .. } => {
                let l = cutoff_scale.ln();
                (-2.0 * l, 2.0 * l)
            }
        }
    }

    /// Log-radii where the profile is only finitely differentiable.
    pub fn log_breakpoints(&self) -> Vec<f64> {
        match self {
            RadialProfile::GaussianPoly { .. } => Vec::new(),
            RadialProfile::PowerCutoff { cutoff_scale, .. } => {
                let l = cutoff_scale.ln();
                vec![-2.0 * l, -l, l, 2.0 * l]
            }
        }
    }

    /// The profile `r^kappa psi(r)` when it stays in the same family.
    pub fn times_power(&self, kappa: f64) -> Option<RadialProfile> {
        match self {
            RadialProfile::PowerCutoff {
                gamma_exp,
                cutoff_scale,
            } => Some(RadialProfile::PowerCutoff {
                gamma_exp: gamma_exp - kappa,
                cutoff_scale: *cutoff_scale,
            }),
            RadialProfile::GaussianPoly { coeffs } => {
                if kappa >= 0.0 && kappa == kappa.floor() {
                    let k = kappa as usize;
                    let mut c = vec![0.0; k];
                    c.extend_from_slice(coeffs);
                    Some(RadialProfile::GaussianPoly { coeffs: c })
                } else {
                    None
                }
            }
        }
    }
}

/// `int_0^inf f(r) dr` adapted to the profile's support and behaviour at the
/// origin. `origin_power` is the exponent `p` with `f(r) ~ r^p` near zero
/// (ignored for profiles vanishing near the origin). Resolution is doubled
/// until two successive values agree to `1e-13` relative.
pub(crate) fn integrate_over_profile<F: Fn(f64) -> f64>(
    profile: &RadialProfile,
    origin_power: f64,
    f: F,
) -> Result<f64> {
    let rule = GaussLegendre::new(16);
    let evaluate = |width: f64| -> f64 {
        match profile {
            RadialProfile::GaussianPoly { .. } => {
                let r0 = 0.5;
                let r_max = profile.outer_radius();
                let mut acc = Neumaier::new();
                acc.add(dyadic_from_zero(&rule, r0, 50, origin_power, &f));
                let panels = ((r_max - r0) / width).ceil().max(1.0) as usize;
                let h = (r_max - r0) / panels as f64;
                for i in 0..panels {
                    let lo = r0 + i as f64 * h;
                    acc.add(rule.integrate(lo, lo + h, &f));
                }
                acc.total()
            }
            RadialProfile::PowerCutoff { .. } => {
                let bps = profile.log_breakpoints();
                let mut acc = Neumaier::new();
                for seg in bps.windows(2) {
                    let len = seg[1] - seg[0];
                    let panels = (len / width).ceil().max(1.0) as usize;
                    let h = len / panels as f64;
                    for i in 0..panels {
                        let lo = seg[0] + i as f64 * h;
                        acc.add(rule.integrate(lo, lo + h, |u| {
                            let r = u.exp();
                            f(r) * r
                        }));
                    }
                }
                acc.total()
            }
        }
    };
    let mut width = 0.5;
    let mut prev = evaluate(width);
    for _ in 0..6 {
        width *= 0.5;
        let next = evaluate(width);
        if !next.is_finite() {
            return Err(Error::NonConvergence("radial integral is not finite".into()));
        }
        if (next - prev).abs() <= 1e-13 * next.abs().max(f64::MIN_POSITIVE) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NonConvergence(format!(
        "radial integral for {} did not stabilise",
        profile.describe()
    )))
}

fn check_origin_integrable(profile: &RadialProfile, power: f64, what: &str) -> Result<()> {
    if profile.origin_order().is_some() && power <= -1.0 {
        return Err(Error::Divergent(format!(
            "{what}: integrand ~ r^{power} at the origin for {}",
            profile.describe()
        )));
    }
    Ok(())
}

/// `int_{R^n} |psi(|x|)|^2 |x|^s dx`.
pub fn weighted_norm(profile: &RadialProfile, s: f64, n: u32) -> Result<f64> {
    profile.validate()?;
    let nf = n as f64;
    let k0 = profile.origin_order().unwrap_or(0) as f64;
    let power = s + nf - 1.0 + 2.0 * k0;
    check_origin_integrable(profile, power, "weighted norm")?;
    let radial = integrate_over_profile(profile, power, |r| {
        let p = profile.eval(r);
        if p == 0.0 {
            0.0
        } else {
            p * p * r.powf(s + nf - 1.0)
        }
    })?;
    Ok(sphere_area(n) * radial)
}

/// `int_{R^n} |grad(|x|^kappa psi)|^2 dx`, the local form `(phi, -Delta phi)`
/// of `phi = |x|^kappa psi`, by direct radial quadrature of `|phi'(r)|^2`.
pub fn gradient_norm(profile: &RadialProfile, kappa: f64, n: u32) -> Result<f64> {
    profile.validate()?;
    let nf = n as f64;
    let k0 = profile.origin_order().unwrap_or(0) as f64;
    // phi'(r) ~ r^{kappa + k0 - 1} unless kappa + k0 = 0, in which case the
    // even part of psi makes it ~ r.
    let lead = if kappa + k0 == 0.0 { 1.0 } else { kappa + k0 - 1.0 };
    let power = 2.0 * lead + nf - 1.0;
    check_origin_integrable(profile, power, "gradient norm")?;
    let radial = integrate_over_profile(profile, power, |r| {
        let (p, rdp) = profile.eval_with_log_derivative(r);
        // phi' = r^{kappa-1} (kappa psi + r psi')
        let d = kappa * p + rdp;
        if d == 0.0 {
            0.0
        } else {
            d * d * r.powf(2.0 * kappa - 2.0 + nf - 1.0)
        }
    })?;
    Ok(sphere_area(n) * radial)
}

/// Exact value of `int |psi|^2 |x|^s dx` for a Gaussian-polynomial profile,
/// from the moments `int_0^inf r^m exp(-r^2) dr = Gamma((m+1)/2) / 2`.
pub fn gaussian_poly_norm_closed_form(coeffs: &[f64], s: f64, n: u32) -> f64 {
    let nf = n as f64;
    let mut acc = Neumaier::new();
    for (i, ci) in coeffs.iter().enumerate() {
        for (j, cj) in coeffs.iter().enumerate() {
            let m = (i + j) as f64 + s + nf - 1.0;
            acc.add(ci * cj * 0.5 / rgamma(0.5 * (m + 1.0)));
        }
    }
    sphere_area(n) * acc.total()
}

/// `-Delta psi` for a Gaussian-polynomial profile, by exact coefficient algebra:
/// the result has polynomial part
/// `q_m = -(m+2)(m+n) c_{m+2} + (2m+n) c_m - c_{m-2}`.
///
/// For `n >= 2` a non-zero linear coefficient `c_1` makes `Delta psi`
/// singular like `1/r`, which is not in the family; that is rejected.
pub fn radial_laplacian(profile: &RadialProfile, n: u32) -> Result<RadialProfile> {
    let coeffs = match profile {
        RadialProfile::GaussianPoly { coeffs } => coeffs,
        RadialProfile::PowerCutoff { .. } => {
            return Err(Error::UnsupportedFamily(
                "radial_laplacian is defined for GaussianPoly profiles only".into(),
            ))
        }
    };
    if n >= 2 && coeffs.get(1).copied().unwrap_or(0.0) != 0.0 {
        return Err(Error::UnsupportedFamily(
            "Laplacian of a profile with a linear term leaves the GaussianPoly family".into(),
        ));
    }
    let nf = n as f64;
    let c = |j: i64| -> f64 {
        if j < 0 {
            0.0
        } else {
            coeffs.get(j as usize).copied().unwrap_or(0.0)
        }
    };
    let deg = coeffs.len() as i64 - 1;
    let q: Vec<f64> = (0..=deg + 2)
        .map(|m| {
            let mf = m as f64;
            -(mf + 2.0) * (mf + nf) * c(m + 2) + (2.0 * mf + nf) * c(m) - c(m - 2)
        })
        .collect();
    Ok(RadialProfile::GaussianPoly { coeffs: trim(q) })
}

fn trim(mut q: Vec<f64>) -> Vec<f64> {
    while q.len() > 1 && *q.last().unwrap() == 0.0 {
        q.pop();
    }
    q
}

/// Closed-form unitary Fourier transform of an even Gaussian-polynomial
/// profile, using `F[|x|^2 f] = -Delta F[f]` and `F[exp(-|x|^2/2)] = exp(-|xi|^2/2)`.
pub fn gaussian_poly_fourier(profile: &RadialProfile, n: u32) -> Result<RadialProfile> {
    let coeffs = match profile {
        RadialProfile::GaussianPoly { coeffs } if profile.is_even_polynomial() => coeffs,
        _ => {
            return Err(Error::UnsupportedFamily(
                "closed-form transform needs an even GaussianPoly profile".into(),
            ))
        }
    };
    let mut power = RadialProfile::gaussian();
    let mut out = vec![0.0; coeffs.len().max(1)];
    for (j, &c) in coeffs.iter().enumerate() {
        if j % 2 == 1 {
            continue;
        }
        if j > 0 {
            power = radial_laplacian(&power, n)?;
        }
        if c != 0.0 {
            if let RadialProfile::GaussianPoly { coeffs: pc } = &power {
                if out.len() < pc.len() {
                    out.resize(pc.len(), 0.0);
                }
                for (k, v) in pc.iter().enumerate() {
                    out[k] += c * v;
                }
            }
        }
    }
    Ok(RadialProfile::GaussianPoly { coeffs: trim(out) })
}
