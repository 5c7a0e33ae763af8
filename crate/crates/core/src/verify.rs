//! Named checks that compare two independent routes, or a computed value
//! against an exact one, and turn the comparison into a verdict.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadforms::{
    fractional_form, gsr_remainder, hardy_gsr_form, jordan_form, weighted_hardy_term, FormResult, QuadratureSpec,
};
use crate::specialfn::{hardy_const, li_const, ExponentTriple};
use crate::testfuncs::{gradient_norm, weighted_norm, RadialProfile};
use crate::transforms::{jordan_spectral_form, spectral_form};

pub const SCHEMA_VERSION: u32 = 1;

/// Tolerance for a single route against a closed form or a second route.
pub const ROUTE_TOL: f64 = 1e-3;
/// Tolerance for identities whose sides involve cancellation.
pub const IDENTITY_TOL: f64 = 1e-2;
/// Absolute fallback, relative to the largest term, when both sides are near zero.
pub const ABS_FALLBACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// `|lhs - rhs| <= tolerance * max(|lhs|, |rhs|)` or `|lhs - rhs| <= abs_tolerance`
    Agree,
    /// `lhs >= rhs - abs_tolerance`
    AtLeast,
    /// `lhs - rhs > abs_tolerance`
    Above,
}

fn holds(relation: Relation, lhs: f64, rhs: f64, tolerance: f64, abs_tolerance: f64) -> bool {
    let diff = (lhs - rhs).abs();
    match relation {
        Relation::Agree => diff <= tolerance * lhs.abs().max(rhs.abs()) || diff <= abs_tolerance,
        Relation::AtLeast => lhs >= rhs - abs_tolerance,
        Relation::Above => lhs - rhs > abs_tolerance,
    }
}

fn finite_or_zero(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        0.0
    }
}

/// A secondary condition a report must satisfy on top of its main comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub abs_tolerance: f64,
    pub satisfied: bool,
}

impl Condition {
    pub fn new(name: &str, relation: Relation, lhs: f64, rhs: f64, tolerance: f64, abs_tolerance: f64) -> Self {
        let satisfied = lhs.is_finite() && rhs.is_finite() && holds(relation, lhs, rhs, tolerance, abs_tolerance);
        Self {
            name: name.into(),
            lhs: finite_or_zero(lhs),
            rhs: finite_or_zero(rhs),
            relation,
            tolerance,
            abs_tolerance,
            satisfied,
        }
    }

    pub fn agree(name: &str, lhs: f64, rhs: f64, tolerance: f64, abs_tolerance: f64) -> Self {
        Self::new(name, Relation::Agree, lhs, rhs, tolerance, abs_tolerance)
    }

    pub fn at_least(name: &str, lhs: f64, rhs: f64, slack: f64) -> Self {
        Self::new(name, Relation::AtLeast, lhs, rhs, 0.0, slack)
    }

    pub fn above(name: &str, lhs: f64, rhs: f64, margin: f64) -> Self {
        Self::new(name, Relation::Above, lhs, rhs, 0.0, margin)
    }

    /// Recomputes the verdict from the numeric fields.
    pub fn recheck(&self) -> bool {
        holds(self.relation, self.lhs, self.rhs, self.tolerance, self.abs_tolerance)
    }
}

/// One side of a comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Side {
    pub value: f64,
    pub error: f64,
    pub route: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl From<FormResult> for Side {
    fn from(f: FormResult) -> Self {
        Self {
            value: f.value,
            error: f.error_estimate,
            route: f.route,
            notes: f.notes,
        }
    }
}

impl Side {
    pub fn exact(value: f64, route: &str) -> Self {
        Self {
            value,
            error: 0.0,
            route: route.into(),
            notes: Vec::new(),
        }
    }

    fn derived(value: f64, error: f64, route: &str) -> Self {
        Self {
            value,
            error,
            route: route.into(),
            notes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub n: u32,
    pub profile: Option<RadialProfile>,
    pub spec: Option<QuadratureSpec>,
}

impl ReportParams {
    pub fn triple(t: &ExponentTriple, profile: Option<&RadialProfile>, spec: Option<&QuadratureSpec>) -> Self {
        Self {
            a: Some(t.a),
            b: Some(t.b),
            n: t.n,
            profile: profile.cloned(),
            spec: spec.cloned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub check_name: String,
    pub params: ReportParams,
    pub lhs: Side,
    pub rhs: Side,
    pub relation: Relation,
    pub abs_discrepancy: f64,
    pub rel_discrepancy: f64,
    pub tolerance: f64,
    pub abs_tolerance: f64,
    #[serde(default)]
    pub conditions: Vec<Condition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub runtime_ms: u64,
}

impl VerificationReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        check_name: &str,
        params: ReportParams,
        lhs: impl Into<Side>,
        rhs: impl Into<Side>,
        relation: Relation,
        tolerance: f64,
        abs_tolerance: f64,
        conditions: Vec<Condition>,
        notes: Vec<String>,
        start: Instant,
    ) -> Self {
        let (lhs, rhs) = (lhs.into(), rhs.into());
        let finite = [lhs.value, lhs.error, rhs.value, rhs.error, tolerance, abs_tolerance]
            .iter()
            .all(|x| x.is_finite());
        let abs_discrepancy = (lhs.value - rhs.value).abs();
        let scale = lhs.value.abs().max(rhs.value.abs());
        let rel_discrepancy = if scale > 0.0 { abs_discrepancy / scale } else { 0.0 };
        let mut report = Self {
            schema: SCHEMA_VERSION,
            check_name: check_name.into(),
            params,
            lhs,
            rhs,
            relation,
            abs_discrepancy: finite_or_zero(abs_discrepancy),
            rel_discrepancy: finite_or_zero(rel_discrepancy),
            tolerance,
            abs_tolerance: finite_or_zero(abs_tolerance),
            conditions,
            error: None,
            passed: false,
            notes,
            runtime_ms: start.elapsed().as_millis() as u64,
        };
        if !finite {
            report.error = Some("non-finite value in comparison".into());
            report.lhs.value = finite_or_zero(report.lhs.value);
            report.lhs.error = finite_or_zero(report.lhs.error);
            report.rhs.value = finite_or_zero(report.rhs.value);
            report.rhs.error = finite_or_zero(report.rhs.error);
        }
        report.passed = report.verdict();
        report
    }

    /// A report for a check whose computation failed.
    pub fn errored(check_name: &str, params: ReportParams, err: &Error, start: Instant) -> Self {
        let mut r = Self::new(
            check_name,
            params,
            Side::exact(0.0, "failed"),
            Side::exact(0.0, "failed"),
            Relation::Agree,
            0.0,
            0.0,
            Vec::new(),
            Vec::new(),
            start,
        );
        r.error = Some(err.to_string());
        r.passed = false;
        r
    }

    /// Re-derives the pass/fail verdict from the numeric fields.
    pub fn verdict(&self) -> bool {
        self.error.is_none()
            && holds(self.relation, self.lhs.value, self.rhs.value, self.tolerance, self.abs_tolerance)
            && self.conditions.iter().all(Condition::recheck)
    }

    pub fn condition(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

fn largest(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// `(psi, |p|^a psi)` by the Fourier route and by the singular double integral.
pub fn check_fractional_consistency(
    psi: &RadialProfile,
    a: f64,
    n: u32,
    spec: &QuadratureSpec,
) -> Result<VerificationReport> {
    let start = Instant::now();
    if !(a > 0.0 && a < 2.0) {
        return Err(Error::Domain(format!("consistency check needs 0 < a < 2, got a = {a}")));
    }
    let lhs = spectral_form(psi, a, n)?;
    let rhs = fractional_form(psi, a, n, spec)?;
    let abs_tol = ABS_FALLBACK * largest(&[lhs.value, rhs.value]);
    let params = ReportParams { a: Some(a), b: None, n, profile: Some(psi.clone()), spec: Some(spec.clone()) };
    Ok(VerificationReport::new(
        "fractional",
        params,
        lhs,
        rhs,
        Relation::Agree,
        ROUTE_TOL,
        abs_tol,
        Vec::new(),
        Vec::new(),
        start,
    ))
}

/// `(psi, |p|^a psi) - C_{a,n} (psi, |q|^{-a} psi)` against its ground-state form.
///
/// The `|p|^a` term goes through the Fourier route for Gaussian polynomials
/// and through the double integral for cutoff profiles, whose transforms
/// oscillate over many decades.
pub fn check_hardy_gsr(psi: &RadialProfile, a: f64, n: u32, spec: &QuadratureSpec) -> Result<VerificationReport> {
    let start = Instant::now();
    if !(a > 0.0 && a < 2f64.min(n as f64)) {
        return Err(Error::Domain(format!("Hardy check needs 0 < a < min(2, n), got a = {a}, n = {n}")));
    }
    let kinetic = match psi {
        RadialProfile::GaussianPoly { .. } => spectral_form(psi, a, n)?,
        RadialProfile::PowerCutoff { .. } => fractional_form(psi, a, n, spec)?,
    };
    let c = hardy_const(a, n)?;
    let potential = c * weighted_norm(psi, -a, n)?;
    let difference = kinetic.value - potential;
    let mut lhs = Side::derived(
        difference,
        kinetic.error_estimate + 1e-12 * potential.abs(),
        &format!("{} minus Hardy term", kinetic.route),
    );
    lhs.notes = kinetic.notes;
    let rhs = hardy_gsr_form(psi, a, n, spec)?;
    let scale = largest(&[kinetic.value, potential]);
    let mut notes = Vec::new();
    if difference.abs() < 1e-3 * scale {
        notes.push(format!(
            "severe cancellation: difference {difference:.3e} against terms of size {scale:.3e}"
        ));
    }
    let params = ReportParams { a: Some(a), b: None, n, profile: Some(psi.clone()), spec: Some(spec.clone()) };
    Ok(VerificationReport::new(
        "hardy-gsr",
        params,
        lhs,
        rhs,
        Relation::Agree,
        IDENTITY_TOL,
        ABS_FALLBACK * scale,
        Vec::new(),
        notes,
        start,
    ))
}

/// Both sides of the ground-state representation of the Jordan form.
pub fn check_li_identity(
    psi: &RadialProfile,
    triple: &ExponentTriple,
    spec: &QuadratureSpec,
) -> Result<VerificationReport> {
    let start = Instant::now();
    if !triple.theorem2_ok() {
        return Err(Error::Domain(format!(
            "identity needs a + b <= n and 0 < min(a, b) < 2, got ({}, {}, {})",
            triple.a, triple.b, triple.n
        )));
    }
    let (a, b, n) = (triple.a, triple.b, triple.n);
    let jordan = jordan_form(psi, triple, spec)?;
    let l = li_const(a, b, n)?;
    let potential = if l == 0.0 { 0.0 } else { l * weighted_norm(psi, b - a, n)? };
    let hardy = weighted_hardy_term(psi, triple, spec)?;
    let remainder = gsr_remainder(psi, triple, spec)?;
    let lhs = Side::derived(
        jordan.value - potential,
        jordan.error_estimate + 1e-12 * potential.abs(),
        "integral minus ground-state constant term",
    );
    let rhs = Side::derived(
        hardy.value + remainder.value,
        hardy.error_estimate + remainder.error_estimate,
        "weighted Hardy form plus remainder",
    );
    let scale = largest(&[jordan.value, potential, hardy.value, remainder.value]);
    let mut notes = jordan.notes;
    notes.extend(hardy.notes);
    notes.sort();
    notes.dedup();
    Ok(VerificationReport::new(
        "li-identity",
        ReportParams::triple(triple, Some(psi), Some(spec)),
        lhs,
        rhs,
        Relation::Agree,
        IDENTITY_TOL,
        ABS_FALLBACK * scale,
        Vec::new(),
        notes,
        start,
    ))
}

/// The `a = 2` case: the Fourier value of the Jordan form against the local
/// form `(phi, -Delta phi) - (b^2/4) (phi, |q|^{-2} phi)`, `phi = |x|^{b/2} psi`,
/// and the Hardy bound that follows from it.
pub fn check_a2_identity(psi: &RadialProfile, b: f64, n: u32, spec: &QuadratureSpec) -> Result<VerificationReport> {
    let start = Instant::now();
    let nf = n as f64;
    if !matches!(psi, RadialProfile::GaussianPoly { .. }) {
        return Err(Error::UnsupportedFamily(format!("a = 2 check needs a Gaussian polynomial, got {}", psi.describe())));
    }
    if !(b >= 0.0 && b <= nf - 2.0) {
        return Err(Error::Domain(format!("a = 2 check needs 0 <= b <= n - 2, got b = {b}, n = {n}")));
    }
    let triple = ExponentTriple::boundary(2.0, b, n)?;
    let lhs = jordan_spectral_form(psi, &triple)?;
    let kinetic = gradient_norm(psi, 0.5 * b, n)?;
    let singular = if b == 0.0 && n <= 2 { 0.0 } else { weighted_norm(psi, b - 2.0, n)? };
    let rhs = jordan_local_a2(psi, b, n)?;
    let c = if n > 2 { hardy_const(2.0, n)? } else { 0.0 };
    let hardy_form = kinetic - c * singular;
    let scale = largest(&[lhs.value, kinetic, c * singular]);
    let cond = Condition::at_least("hardy-bound", lhs.value, hardy_form, ROUTE_TOL * scale + lhs.error_estimate);
    let notes = lhs.notes.clone();
    let mut report = VerificationReport::new(
        "a2-identity",
        ReportParams::triple(&triple, Some(psi), Some(spec)),
        lhs,
        rhs,
        Relation::Agree,
        ROUTE_TOL,
        ABS_FALLBACK * scale,
        vec![cond],
        notes,
        start,
    );
    report.notes.push(format!(
        "Hardy-bound margin {:.6e}; expected ((n-2)^2 - b^2)/4 * N = {:.6e}",
        report.lhs.value - hardy_form,
        0.25 * ((nf - 2.0).powi(2) - b * b) * singular
    ));
    Ok(report)
}

/// `(phi, -Delta phi) - (b^2/4) (phi, |q|^{-2} phi)` with `phi = |x|^{b/2} psi`,
/// the local form of the Jordan product at `a = 2`.
pub fn jordan_local_a2(psi: &RadialProfile, b: f64, n: u32) -> Result<FormResult> {
    let kinetic = gradient_norm(psi, 0.5 * b, n)?;
    let singular = if b == 0.0 { 0.0 } else { weighted_norm(psi, b - 2.0, n)? };
    let mut f = FormResult::exact(kinetic - 0.25 * b * b * singular, "local gradient form");
    f.error_estimate = 1e-12 * kinetic.abs().max(singular.abs());
    Ok(f)
}

/// `(psi, J_{a,b,n} psi)` by the route appropriate to the exponents: the
/// double integral for `a < 2`, the local form at `a = 2`, the Fourier side
/// beyond.
pub fn jordan_value(psi: &RadialProfile, triple: &ExponentTriple, spec: &QuadratureSpec) -> Result<FormResult> {
    if triple.a > 0.0 && triple.a < 2.0 {
        jordan_form(psi, triple, spec)
    } else if triple.a == 2.0 {
        jordan_local_a2(psi, triple.b, triple.n)
    } else {
        jordan_spectral_form(psi, triple)
    }
}

/// `(psi, |q|^{b/2} H_{a,n} |q|^{b/2} psi)`; for `a = 2` through the local form.
fn weighted_hardy_value(psi: &RadialProfile, triple: &ExponentTriple, spec: &QuadratureSpec) -> Result<FormResult> {
    let (a, b, n) = (triple.a, triple.b, triple.n);
    if a == 2.0 && n > 2 {
        let kinetic = gradient_norm(psi, 0.5 * b, n)?;
        let potential = hardy_const(2.0, n)? * weighted_norm(psi, b - 2.0, n)?;
        let mut f = FormResult::exact(kinetic - potential, "local gradient form");
        f.error_estimate = 1e-12 * kinetic.abs().max(potential.abs());
        return Ok(f);
    }
    weighted_hardy_term(psi, triple, spec)
}

fn positivity_one(psi: &RadialProfile, triple: &ExponentTriple, spec: &QuadratureSpec) -> Result<VerificationReport> {
    let start = Instant::now();
    let jordan = jordan_value(psi, triple, spec)?;
    let mut conditions = Vec::new();
    let mut notes = vec!["strict positivity is tested against a margin from the error estimates".to_string()];
    let hardy_admissible = triple.a.min(triple.b) < 2.0 && triple.a <= 2.0 && triple.a < triple.nf();
    if hardy_admissible {
        let hardy = weighted_hardy_value(psi, triple, spec)?;
        let slack = jordan.error_estimate + hardy.error_estimate + 1e-9 * largest(&[jordan.value, hardy.value]);
        conditions.push(Condition::at_least("weighted-hardy-bound", jordan.value, hardy.value, slack));
    } else {
        notes.push("weighted Hardy bound not applicable for these exponents".into());
    }
    let err = jordan.error_estimate;
    Ok(VerificationReport::new(
        "positivity",
        ReportParams::triple(triple, Some(psi), Some(spec)),
        jordan,
        Side::exact(0.0, "zero"),
        Relation::AtLeast,
        0.0,
        err,
        conditions,
        notes,
        start,
    ))
}

/// Positivity of the Jordan form, and its lower bound by the weighted Hardy
/// form, over a family of profiles. Failures are reported, not returned.
pub fn positivity_scan(
    family: &[RadialProfile],
    triple: &ExponentTriple,
    spec: &QuadratureSpec,
) -> Vec<VerificationReport> {
    family
        .iter()
        .map(|psi| {
            let start = Instant::now();
            if !triple.theorem1_ok() {
                let e = Error::Domain(format!(
                    "positivity needs n >= a + b and min(a, b) <= 2, got ({}, {}, {})",
                    triple.a, triple.b, triple.n
                ));
                return VerificationReport::errored("positivity", ReportParams::triple(triple, Some(psi), Some(spec)), &e, start);
            }
            positivity_one(psi, triple, spec).unwrap_or_else(|e| {
                VerificationReport::errored("positivity", ReportParams::triple(triple, Some(psi), Some(spec)), &e, start)
            })
        })
        .collect()
}

/// `y^c + y^{-c} - y^{b/2} - y^{-b/2}` with `c = (n - a)/2`, as
/// `4 sinh((c + b/2) t / 2) sinh((c - b/2) t / 2)`, `t = ln y`.
pub fn kernel_numerator(y: f64, a: f64, b: f64, n: u32) -> f64 {
    let c = 0.5 * (n as f64 - a);
    let h = 0.5 * b;
    let t = y.ln();
    4.0 * (0.5 * (c + h) * t).sinh() * (0.5 * (c - h) * t).sinh()
}

/// `n` points spaced logarithmically over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (l0 + (l1 - l0) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Non-negativity of the numerator in the positivity proof, with zeros only
/// at `y = 1` unless `b = n - a`.
pub fn kernel_positivity(a: f64, b: f64, n: u32, grid: &[f64]) -> Result<VerificationReport> {
    let start = Instant::now();
    let nf = n as f64;
    if !(a > 0.0 && b > 0.0 && nf - a >= b) {
        return Err(Error::Domain(format!("kernel positivity needs n - a >= b > 0, got ({a}, {b}, {n})")));
    }
    if grid.is_empty() || grid.iter().any(|y| !(*y > 0.0 && y.is_finite())) {
        return Err(Error::Invalid("grid must be non-empty and positive".into()));
    }
    let values: Vec<f64> = grid.iter().map(|&y| kernel_numerator(y, a, b, n)).collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut conditions = vec![Condition::agree("zero-at-one", kernel_numerator(1.0, a, b, n), 0.0, 0.0, 0.0)];
    let critical = b == nf - a;
    let away: Vec<f64> = grid
        .iter()
        .zip(&values)
        .filter(|(y, _)| **y != 1.0)
        .map(|(_, v)| *v)
        .collect();
    if critical {
        let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        conditions.push(Condition::agree("identically-zero", max_abs, 0.0, 0.0, 0.0));
    } else if let Some(min_away) = away.iter().copied().reduce(f64::min) {
        conditions.push(Condition::above("strict-away-from-one", min_away, 0.0, 0.0));
    }
    let params = ReportParams { a: Some(a), b: Some(b), n, profile: None, spec: None };
    Ok(VerificationReport::new(
        "kernel-positivity",
        params,
        Side::exact(min, "minimum over grid"),
        Side::exact(0.0, "zero"),
        Relation::AtLeast,
        0.0,
        0.0,
        conditions,
        vec![format!("{} grid points", grid.len())],
        start,
    ))
}

/// Rayleigh quotients `Q(R) = (psi_R, J psi_R) / (psi_R, |q|^{b-a} psi_R)` of
/// cutoffs of the virtual ground state, which approach `L_{a,b,n}` from above.
pub fn sharpness_probe(
    triple: &ExponentTriple,
    r_list: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<VerificationReport>> {
    if !triple.theorem2_ok() {
        return Err(Error::Domain(format!(
            "sharpness needs a + b <= n and 0 < min(a, b) < 2, got ({}, {}, {})",
            triple.a, triple.b, triple.n
        )));
    }
    if r_list.is_empty() || r_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Invalid("cutoff scales must be non-empty and strictly increasing".into()));
    }
    if let Some(r) = r_list.iter().find(|r| r.ln() > 50.0) {
        return Err(Error::NonConvergence(format!(
            "cutoff scale {r} exceeds the log-radius truncation of the quadrature"
        )));
    }
    let (a, b, n) = (triple.a, triple.b, triple.n);
    let l = li_const(a, b, n)?;
    let scale = l.max(if a < n as f64 { hardy_const(a, n)? } else { 0.0 });
    let gamma = triple.ground_state_exponent();
    let mut reports: Vec<VerificationReport> = Vec::new();
    let mut previous: Option<(f64, f64)> = None;
    for &r in r_list {
        let start = Instant::now();
        let psi = RadialProfile::power_cutoff(gamma, r)?;
        let jordan = jordan_value(&psi, triple, spec)?;
        let norm = weighted_norm(&psi, b - a, n)?;
        let q = jordan.value / norm;
        let q_err = jordan.error_estimate / norm + 1e-12 * q.abs();
        let mut lhs = Side::derived(q, q_err, &format!("{} over weighted norm", jordan.route));
        lhs.notes = jordan.notes;
        let mut conditions = Vec::new();
        if let Some((prev_q, prev_err)) = previous {
            conditions.push(Condition::at_least("non-increasing", prev_q, q, prev_err + q_err));
        }
        if r >= 1e3 && r == *r_list.last().unwrap() {
            conditions.push(Condition::at_least("approaches-constant", 0.1 * scale, q - l, q_err));
        }
        previous = Some((q, q_err));
        reports.push(VerificationReport::new(
            "sharpness",
            ReportParams::triple(triple, Some(&psi), Some(spec)),
            lhs,
            Side::exact(l, "ground-state constant"),
            Relation::Above,
            0.0,
            q_err,
            conditions,
            vec!["strictness is tested against a margin from the error estimates".into()],
            start,
        ));
    }
    Ok(reports)
}

/// `b -> L_{a,b,n}` is strictly decreasing on `[0, n - a]` and vanishes at `n - a`.
pub fn monotonicity_scan(a: f64, n: u32, b_grid: &[f64]) -> Result<VerificationReport> {
    let start = Instant::now();
    let nf = n as f64;
    if !(a > 0.0 && a < nf) {
        return Err(Error::Domain(format!("monotonicity needs 0 < a < n, got a = {a}, n = {n}")));
    }
    if b_grid.iter().any(|b| !(*b >= 0.0 && *b <= nf - a)) || b_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain(format!("b grid must be increasing within [0, {}]", nf - a)));
    }
    let values = b_grid.iter().map(|&b| li_const(a, b, n)).collect::<Result<Vec<f64>>>()?;
    let mut conditions: Vec<Condition> = b_grid
        .windows(2)
        .zip(values.windows(2))
        .map(|(bs, ls)| Condition::above(&format!("decreasing {}->{}", bs[0], bs[1]), ls[0], ls[1], 0.0))
        .collect();
    if a == 2.0 {
        for (&b, &l) in b_grid.iter().zip(&values) {
            let want = 0.25 * ((nf - 2.0).powi(2) - b * b);
            conditions.push(Condition::agree(&format!("closed-form b={b}"), l, want, 1e-10, 1e-12));
        }
    }
    let params = ReportParams { a: Some(a), b: None, n, profile: None, spec: None };
    Ok(VerificationReport::new(
        "monotonicity",
        params,
        Side::exact(li_const(a, nf - a, n)?, "constant at b = n - a"),
        Side::exact(0.0, "zero"),
        Relation::Agree,
        0.0,
        0.0,
        conditions,
        Vec::new(),
        start,
    ))
}

/// Exponent triples of the default scan: `a, b` in `{0.5, 1, 1.5, 2}` with
/// `a + b <= n`, `n = 1..=5`.
pub fn default_triples() -> Vec<ExponentTriple> {
    let exps = [0.5, 1.0, 1.5, 2.0];
    let mut out = Vec::new();
    for n in 1..=5u32 {
        for &a in &exps {
            for &b in &exps {
                if a + b <= n as f64 {
                    out.push(ExponentTriple { a, b, n });
                }
            }
        }
    }
    out
}

/// `count` even Gaussian polynomials of degree 4 with coefficients drawn
/// uniformly from `[-2, 2]`, reproducible from `seed`.
pub fn random_profiles(count: usize, seed: u64) -> Vec<RadialProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut c = vec![0.0; 5];
            for k in [0, 2, 4] {
                c[k] = rng.gen_range(-2.0..=2.0);
            }
            RadialProfile::GaussianPoly { coeffs: c }
        })
        .collect()
}

pub const DEFAULT_SEED: u64 = 20_240_601;
