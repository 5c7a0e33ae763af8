//! Quadratic forms of fractional operators as singular double integrals,
//! reduced to two radial variables by the angular kernel.

mod engine;
pub mod kernel;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specialfn::ExponentTriple;
use crate::testfuncs::{gaussian_poly_fourier, RadialProfile};

pub use kernel::{angular_kernel, unit_kernel, KernelTable};

use engine::{evaluate, FormKind};

/// Resolution of the radial double-integral quadrature.
///
/// `u_min`/`u_max` override the automatically chosen log-radius range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    pub u_min: Option<f64>,
    pub u_max: Option<f64>,
    pub panels_per_unit: u32,
    pub gl_order: usize,
    pub diagonal_grading: f64,
    pub refinement_factor: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            u_min: None,
            u_max: None,
            panels_per_unit: 1,
            gl_order: 12,
            diagonal_grading: 0.5,
            refinement_factor: 2,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.gl_order < 4 || self.gl_order > 64 {
            return Err(Error::Invalid(format!("gl_order must be in [4, 64], got {}", self.gl_order)));
        }
        if self.panels_per_unit == 0 || self.panels_per_unit > 256 {
            return Err(Error::Invalid(format!(
                "panels_per_unit must be in [1, 256], got {}",
                self.panels_per_unit
            )));
        }
        if !(self.diagonal_grading > 0.0 && self.diagonal_grading < 1.0) {
            return Err(Error::Invalid(format!(
                "diagonal_grading must lie in (0, 1), got {}",
                self.diagonal_grading
            )));
        }
        if self.refinement_factor < 2 {
            return Err(Error::Invalid("refinement_factor must be at least 2".into()));
        }
        if let (Some(lo), Some(hi)) = (self.u_min, self.u_max) {
            if !(lo < hi) {
                return Err(Error::Invalid(format!("u_min = {lo} must be below u_max = {hi}")));
            }
        }
        Ok(())
    }

    /// The same spec with `panels_per_unit` multiplied by the refinement factor.
    pub fn refined(&self) -> Self {
        Self {
            panels_per_unit: self.panels_per_unit * self.refinement_factor,
            ..self.clone()
        }
    }
}

/// A quadratic-form value with its two-resolution error estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormResult {
    pub value: f64,
    pub error_estimate: f64,
    pub spec_used: QuadratureSpec,
    pub route: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl FormResult {
    pub fn exact(value: f64, route: &str) -> Self {
        Self {
            value,
            error_estimate: 0.0,
            spec_used: QuadratureSpec::default(),
            route: route.into(),
            notes: Vec::new(),
        }
    }
}

fn run(
    profile: &RadialProfile,
    kind: FormKind,
    a: f64,
    n: u32,
    spec: &QuadratureSpec,
    route: &str,
) -> Result<FormResult> {
    spec.validate()?;
    profile.validate()?;
    let bounds = (spec.u_min, spec.u_max);
    let run_at = |ppu: u32| {
        evaluate(
            profile,
            kind,
            a,
            n,
            1.0 / ppu as f64,
            spec.gl_order,
            spec.diagonal_grading,
            bounds,
        )
    };
    let coarse = run_at(spec.panels_per_unit)?;
    let fine = run_at(spec.panels_per_unit * spec.refinement_factor)?;
    let error = (fine.value - coarse.value).abs();
    if error > 1e-2 * fine.abs_value.max(f64::MIN_POSITIVE) {
        return Err(Error::NonConvergence(format!(
            "{route} for {}: refinement changed the value by {error:.3e} (scale {:.3e})",
            profile.describe(),
            fine.abs_value
        )));
    }
    let mut notes = fine.notes;
    if profile.origin_order() == Some(0) && matches!(kind, FormKind::HardyGsr | FormKind::WeightedHardy { .. } | FormKind::Remainder { .. }) {
        notes.push("profile does not vanish at the origin; ground-state form used by density".into());
    }
    Ok(FormResult {
        value: fine.value,
        error_estimate: error,
        spec_used: QuadratureSpec {
            u_min: Some(fine.u_range.0),
            u_max: Some(fine.u_range.1),
            ..spec.clone()
        },
        route: route.into(),
        notes,
    })
}

fn require_fractional(a: f64) -> Result<()> {
    if !(a > 0.0 && a < 2.0) {
        return Err(Error::Domain(format!("the integral route needs 0 < a < 2, got a = {a}")));
    }
    Ok(())
}

fn require_hardy(a: f64, n: u32) -> Result<()> {
    require_fractional(a)?;
    if a >= n as f64 {
        return Err(Error::Domain(format!("the Hardy form needs a < n, got a = {a}, n = {n}")));
    }
    Ok(())
}

/// `(psi, |p|^a psi) = alpha_{a,n} int int |psi(x) - psi(y)|^2 / |x - y|^{n+a}`.
pub fn fractional_form(psi: &RadialProfile, a: f64, n: u32, spec: &QuadratureSpec) -> Result<FormResult> {
    require_fractional(a)?;
    run(psi, FormKind::Fractional, a, n, spec, "integral")
}

/// `(1/2)(psi, (|p|^a |q|^b + |q|^b |p|^a) psi)` by the polarised double integral.
///
/// For `a >= 2 > b` the roles of momentum and position are exchanged by the
/// Fourier transform, which is available in closed form for even
/// Gaussian-polynomial profiles.
pub fn jordan_form(psi: &RadialProfile, triple: &ExponentTriple, spec: &QuadratureSpec) -> Result<FormResult> {
    let (a, b, n) = (triple.a, triple.b, triple.n);
    if !triple.theorem1_ok() {
        return Err(Error::Domain(format!(
            "Jordan form needs n >= a + b and min(a, b) <= 2, got ({a}, {b}, {n})"
        )));
    }
    if a < 2.0 && a > 0.0 {
        return run(psi, FormKind::Jordan { b }, a, n, spec, "integral");
    }
    if b > 0.0 && b < 2.0 {
        let transformed = gaussian_poly_fourier(psi, n)?;
        let mut res = run(&transformed, FormKind::Jordan { b: a }, b, n, spec, "integral, Fourier-swapped")?;
        res.notes.push(format!("evaluated as the ({b}, {a}, {n}) form of the transformed profile"));
        return Ok(res);
    }
    Err(Error::Domain(format!(
        "the integral route needs one exponent strictly between 0 and 2, got ({a}, {b}, {n})"
    )))
}

/// `(psi, H_{a,n} psi)` in ground-state-transformed form.
pub fn hardy_gsr_form(psi: &RadialProfile, a: f64, n: u32, spec: &QuadratureSpec) -> Result<FormResult> {
    require_hardy(a, n)?;
    run(psi, FormKind::HardyGsr, a, n, spec, "integral")
}

/// The last, manifestly non-negative term of the ground-state representation
/// of the Jordan form.
pub fn gsr_remainder(psi: &RadialProfile, triple: &ExponentTriple, spec: &QuadratureSpec) -> Result<FormResult> {
    if !triple.theorem2_ok() {
        return Err(Error::Domain(format!(
            "remainder needs a + b <= n and 0 < min(a, b) < 2, got ({}, {}, {})",
            triple.a, triple.b, triple.n
        )));
    }
    require_hardy(triple.a, triple.n)?;
    run(psi, FormKind::Remainder { b: triple.b }, triple.a, triple.n, spec, "integral")
}

/// `(psi, |q|^{b/2} H_{a,n} |q|^{b/2} psi)`, the Hardy form of `r^{b/2} psi`.
pub fn weighted_hardy_term(psi: &RadialProfile, triple: &ExponentTriple, spec: &QuadratureSpec) -> Result<FormResult> {
    require_hardy(triple.a, triple.n)?;
    if !(triple.b >= 0.0) {
        return Err(Error::Domain(format!("weight exponent must be non-negative, got b = {}", triple.b)));
    }
    run(
        psi,
        FormKind::WeightedHardy { b: triple.b },
        triple.a,
        triple.n,
        spec,
        "integral",
    )
}
