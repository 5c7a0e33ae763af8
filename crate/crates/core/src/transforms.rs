//! Radial Fourier (Hankel) transforms and the spectral side of the forms.
//!
//! The transform is unitary with kernel `e^{-i xi.x}`; for radial `f`,
//! `f^(rho) = int_0^inf f(r) Lambda(r rho) r^{n-1} dr` with
//! `Lambda(z) = J_{n/2-1}(z) / z^{n/2-1}`.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel::bessel_j_normalized;
use crate::error::{Error, Result};
use crate::quadforms::{FormResult, QuadratureSpec};
use crate::quadrature::{dyadic_from_zero, GaussLegendre, Neumaier};
use crate::specialfn::{b_const, rgamma, sphere_area, ExponentTriple};
use crate::testfuncs::RadialProfile;
use crate::verify::{Relation, ReportParams, Side, VerificationReport};

const HANKEL_ORDER: usize = 16;
const HANKEL_TOL: f64 = 1e-13;
const MAX_HANKEL_PANELS: usize = 200_000;
const SPECTRAL_START: f64 = 0.5;
const SPECTRAL_CAP: f64 = 128.0;

/// A transform sampled on a radial grid, interpolated cubically in `ln rho`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledProfile {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub n: u32,
}

impl SampledProfile {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, n: u32) -> Result<Self> {
        if nodes.len() != values.len() || nodes.len() < 4 {
            return Err(Error::Invalid("sampled profile needs at least 4 matching nodes and values".into()));
        }
        if !(nodes[0] > 0.0) || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Invalid("sample nodes must be positive and strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("sample values must be finite".into()));
        }
        Ok(Self { nodes, values, n })
    }

    /// Four-point Lagrange interpolation in `ln rho`.
    pub fn interpolate(&self, rho: f64) -> Result<f64> {
        let (first, last) = (self.nodes[0], *self.nodes.last().unwrap());
        if !(rho >= first && rho <= last) {
            return Err(Error::Domain(format!("rho = {rho} outside sampled range [{first}, {last}]")));
        }
        let i = self.nodes.partition_point(|&x| x <= rho);
        let start = i.saturating_sub(2).min(self.nodes.len() - 4);
        let t = rho.ln();
        let xs: Vec<f64> = self.nodes[start..start + 4].iter().map(|x| x.ln()).collect();
        let mut sum = 0.0;
        for j in 0..4 {
            let mut l = 1.0;
            for m in 0..4 {
                if m != j {
                    l *= (t - xs[m]) / (xs[j] - xs[m]);
                }
            }
            sum += l * self.values[start + j];
        }
        Ok(sum)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["node", "value"]).map_err(csv_err)?;
        for (x, v) in self.nodes.iter().zip(&self.values) {
            w.write_record([format!("{x:.17e}"), format!("{v:.17e}")]).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::Invalid(e.to_string()))
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
        self.write_csv(file)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Invalid(format!("csv: {e}"))
}

/// A radial function to be transformed: `r^power psi(r)`.
struct Transformable<'a> {
    profile: &'a RadialProfile,
    power: f64,
}

impl Transformable<'_> {
    fn value(&self, r: f64) -> f64 {
        let p = self.profile.eval(r);
        if p == 0.0 || self.power == 0.0 {
            p
        } else {
            p * r.powf(self.power)
        }
    }

    /// Behaviour `r^k` of the transform integrand near the origin, when the
    /// integrand is not analytic there.
    fn origin_power(&self, n: u32) -> Option<f64> {
        let k0 = self.profile.origin_order()? as f64;
        let analytic = self.power == 0.0 || (self.power > 0.0 && self.power.fract() == 0.0);
        if analytic {
            None
        } else {
            Some(self.power + k0 + n as f64 - 1.0)
        }
    }

    fn range(&self) -> (f64, f64, Vec<f64>) {
        match self.profile {
            RadialProfile::GaussianPoly { .. } => (0.0, self.profile.outer_radius(), Vec::new()),
            RadialProfile::PowerCutoff { cutoff_scale, .. } => {
                let r = *cutoff_scale;
                (1.0 / (r * r), r * r, vec![1.0 / r, r])
            }
        }
    }
}

fn hankel_at(f: &Transformable, n: u32, rho: f64, rule: &GaussLegendre) -> Result<f64> {
    let nu = 0.5 * n as f64 - 1.0;
    let nm1 = n as i32 - 1;
    let g = |r: f64| {
        let v = f.value(r);
        if v == 0.0 {
            0.0
        } else {
            v * bessel_j_normalized(nu, r * rho) * r.powi(nm1)
        }
    };
    let (lo, hi, breaks) = f.range();
    let origin = if lo == 0.0 { f.origin_power(n) } else { None };
    let oscillation = if rho > 0.0 { 3.0 / rho } else { f64::INFINITY };
    let estimate = ((hi - lo) / oscillation.min(0.5)) as usize;
    if estimate > MAX_HANKEL_PANELS {
        return Err(Error::NonConvergence(format!(
            "transform of {} at rho = {rho}: about {estimate} oscillatory panels exceed the budget",
            f.profile.describe()
        )));
    }
    let evaluate = |scale: f64| -> (f64, f64) {
        let mut acc = Neumaier::new();
        let mut abs = Neumaier::new();
        let mut r = lo;
        if let Some(p) = origin {
            let r0 = (0.5 * scale).min(oscillation);
            let v = dyadic_from_zero(rule, r0, 40, p, g);
            acc.add(v);
            abs.add(v.abs());
            r = r0;
        }
        while r < hi {
            let mut width = scale * 0.5f64.min(oscillation);
            if lo > 0.0 {
                width = width.min(scale * 0.25 * r);
            }
            let mut next = (r + width).min(hi);
            if let Some(&bp) = breaks.iter().find(|&&bp| bp > r && bp < next) {
                next = bp;
            }
            for (x, w) in rule.mapped(r, next) {
                let v = w * g(x);
                acc.add(v);
                abs.add(v.abs());
            }
            r = next;
        }
        (acc.total(), abs.total())
    };
    let mut scale = 1.0;
    let (mut prev, _) = evaluate(scale);
    for _ in 0..4 {
        scale *= 0.5;
        let (next, abs) = evaluate(scale);
        if (next - prev).abs() <= HANKEL_TOL * abs + f64::MIN_POSITIVE {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NonConvergence(format!(
        "transform of {} at rho = {rho} did not stabilise",
        f.profile.describe()
    )))
}

/// `psi^(rho)` at a single radius.
pub fn hankel_value(profile: &RadialProfile, n: u32, rho: f64) -> Result<f64> {
    profile.validate()?;
    let rule = GaussLegendre::new(HANKEL_ORDER);
    hankel_at(&Transformable { profile, power: 0.0 }, n, rho, &rule)
}

/// `psi^` sampled on a logarithmic grid over `[1e-2, 1e2]`, with
/// `10 * panels_per_unit` points per decade.
pub fn hankel_transform(profile: &RadialProfile, n: u32, grid: &QuadratureSpec) -> Result<SampledProfile> {
    grid.validate()?;
    profile.validate()?;
    let per_decade = 10 * grid.panels_per_unit as usize;
    let count = 4 * per_decade + 1;
    let nodes: Vec<f64> = (0..count)
        .map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / (count - 1) as f64))
        .collect();
    let rule = GaussLegendre::new(grid.gl_order.max(HANKEL_ORDER));
    let f = Transformable { profile, power: 0.0 };
    let values = nodes
        .par_iter()
        .map(|&rho| hankel_at(&f, n, rho, &rule))
        .collect::<Result<Vec<f64>>>()?;
    SampledProfile::new(nodes, values, n)
}

/// `S_{n-1} int rho^{a+n-1} f^(rho) g^(rho) d rho` at panel width `h`,
/// with the far end extended until the integrand is negligible.
/// Sum of the blocks beyond the last one when consecutive dyadic blocks shrink
/// by a steady ratio, with the change from the previous ratio as the spread.
fn geometric_tail(blocks: &[f64]) -> Option<(f64, f64)> {
    let [.., b0, b1, b2] = blocks else { return None };
    let (q1, q2) = (b1 / b0, b2 / b1);
    if !(q1 > 0.0 && q1 < 1.0 && q2 > 0.0 && q2 < 1.0) {
        return None;
    }
    let tail = b2 * q2 / (1.0 - q2);
    let alt = b2 * q1 / (1.0 - q1);
    Some((tail, (tail - alt).abs()))
}

fn spectral_pairing_at(
    f: &Transformable,
    g: Option<&Transformable>,
    a: f64,
    n: u32,
    h: f64,
    rule: &GaussLegendre,
) -> Result<(f64, f64, Vec<String>)> {
    let hrule = GaussLegendre::new(HANKEL_ORDER);
    let power = a + n as f64 - 1.0;
    let integrand = |rho: f64| -> Result<f64> {
        let fv = hankel_at(f, n, rho, &hrule)?;
        let gv = match g {
            Some(g) => hankel_at(g, n, rho, &hrule)?,
            None => fv,
        };
        Ok(rho.powf(power) * fv * gv)
    };
    let mut notes = Vec::new();
    // [0, SPECTRAL_START] on dyadic panels; rho^{a+n-1} is not smooth at 0.
    let mut near = Neumaier::new();
    let mut hi = SPECTRAL_START;
    let mut failure = None;
    for _ in 0..30 {
        let lo = 0.5 * hi;
        let pts: Vec<(f64, f64)> = rule.mapped(lo, hi).collect();
        for (x, w) in pts {
            match integrand(x) {
                Ok(v) => near.add(w * v),
                Err(e) => failure = Some(e),
            }
        }
        hi = lo;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    near.add(integrand(hi)? * hi / (power + 1.0));

    let mut acc = Neumaier::new();
    acc.add(near.total());
    let mut tail_error = 0.0;
    let mut dyadic = Vec::new();
    let mut lo = SPECTRAL_START;
    let mut block_end = 8.0f64;
    loop {
        // beyond rho = 8 the integrand is a smooth algebraic tail: panels grow with rho
        let panels = ((block_end - lo) / (h * (lo / 8.0).max(1.0))).ceil().max(1.0) as usize;
        let width = (block_end - lo) / panels as f64;
        let pts: Vec<(f64, f64)> = (0..panels)
            .flat_map(|i| {
                let a0 = lo + i as f64 * width;
                rule.mapped(a0, a0 + width).collect::<Vec<_>>()
            })
            .collect();
        let vals = pts
            .par_iter()
            .map(|&(x, w)| integrand(x).map(|v| w * v))
            .collect::<Result<Vec<f64>>>()?;
        let mut block = Neumaier::new();
        let mut last_panel = 0.0f64;
        let per_panel = rule.order();
        for (i, v) in vals.iter().enumerate() {
            block.add(*v);
            if i >= vals.len() - per_panel {
                last_panel += v.abs();
            }
        }
        acc.add(block.total());
        if lo >= 8.0 {
            dyadic.push(block.total());
        }
        let total = acc.total().abs();
        if last_panel <= 1e-16 * total {
            break;
        }
        if block_end >= SPECTRAL_CAP {
            // algebraic decay: extend the dyadic blocks geometrically
            let (tail, spread) = geometric_tail(&dyadic).ok_or_else(|| {
                Error::NonConvergence(format!(
                    "spectral integrand not negligible at rho = {block_end} and its blocks do not decay geometrically"
                ))
            })?;
            acc.add(tail);
            tail_error = spread;
            notes.push(format!(
                "spectral integrand decays algebraically; tail beyond rho = {block_end} extrapolated as {tail:.3e} (spread {spread:.1e})"
            ));
            break;
        }
        lo = block_end;
        block_end = (2.0 * block_end).min(SPECTRAL_CAP);
    }
    Ok((sphere_area(n) * acc.total(), sphere_area(n) * tail_error, notes))
}

fn spectral_pairing(
    f: &Transformable,
    g: Option<&Transformable>,
    a: f64,
    n: u32,
    route: &str,
) -> Result<FormResult> {
    let spec = QuadratureSpec::default();
    let rule = GaussLegendre::new(HANKEL_ORDER);
    let h = 0.5;
    let (coarse, _, _) = spectral_pairing_at(f, g, a, n, h, &rule)?;
    let (fine, tail, notes) = spectral_pairing_at(f, g, a, n, 0.5 * h, &rule)?;
    Ok(FormResult {
        value: fine,
        error_estimate: (fine - coarse).abs() + tail,
        spec_used: spec,
        route: route.into(),
        notes,
    })
}

/// `(psi, |p|^a psi) = int |xi|^a |psi^(xi)|^2 d xi`.
pub fn spectral_form(psi: &RadialProfile, a: f64, n: u32) -> Result<FormResult> {
    if !(a >= 0.0 && a.is_finite()) || n == 0 {
        return Err(Error::Domain(format!("spectral form needs a >= 0 and n >= 1, got a = {a}, n = {n}")));
    }
    psi.validate()?;
    spectral_pairing(&Transformable { profile: psi, power: 0.0 }, None, a, n, "spectral")
}

/// `Re int |xi|^a psi^(xi) conj((|x|^b psi)^(xi)) d xi`, the Fourier-side
/// value of the Jordan form.
pub fn jordan_spectral_form(psi: &RadialProfile, triple: &ExponentTriple) -> Result<FormResult> {
    let (a, b, n) = (triple.a, triple.b, triple.n);
    if !(a >= 0.0 && b >= 0.0) || n == 0 {
        return Err(Error::Domain(format!("Jordan form needs a, b >= 0, got ({a}, {b}, {n})")));
    }
    if !(n as f64 >= a + b && a.min(b) <= 2.0) {
        return Err(Error::Domain(format!(
            "Jordan form needs n >= a + b and min(a, b) <= 2, got ({a}, {b}, {n})"
        )));
    }
    psi.validate()?;
    let f = Transformable { profile: psi, power: 0.0 };
    if b == 0.0 {
        return spectral_pairing(&f, None, a, n, "spectral");
    }
    let g = Transformable { profile: psi, power: b };
    let mut res = spectral_pairing(&f, Some(&g), a, n, "spectral")?;
    if psi.origin_order() == Some(0) && b.fract() != 0.0 {
        res.notes
            .push(format!("|x|^{b} psi is not smooth at the origin; its transform decays algebraically"));
    }
    Ok(res)
}

/// `int |x|^{-alpha} g dx = (B_{n-alpha} / B_alpha) int |xi|^{alpha-n} g^ d xi`
/// for the self-dual Gaussian `g`, both sides from Gamma moments.
pub fn fourier_power_pairing(alpha: f64, n: u32) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    let nf = n as f64;
    if !(alpha > 0.0 && alpha < nf) {
        return Err(Error::Domain(format!("power pairing needs 0 < alpha < n, got alpha = {alpha}, n = {n}")));
    }
    // int_{R^n} |x|^{-s} e^{-|x|^2/2} dx = |S^{n-1}| 2^{(n-s)/2 - 1} Gamma((n-s)/2)
    let moment = |s: f64| sphere_area(n) * 2f64.powf(0.5 * (nf - s) - 1.0) / rgamma(0.5 * (nf - s));
    let lhs = moment(alpha);
    let rhs = b_const(nf - alpha, n)? / b_const(alpha, n)? * moment(nf - alpha);
    let params = ReportParams {
        a: Some(alpha),
        b: None,
        n,
        profile: Some(RadialProfile::gaussian()),
        spec: None,
    };
    Ok(VerificationReport::new(
        "power-pairing",
        params,
        Side::exact(lhs, "gamma moment"),
        Side::exact(rhs, "gamma moment of the transformed side"),
        Relation::Agree,
        1e-12,
        0.0,
        Vec::new(),
        Vec::new(),
        start,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfuncs::{gaussian_poly_fourier, radial_laplacian, weighted_norm};
    use std::f64::consts::PI;

    #[test]
    fn gaussian_fixed_point() {
        let g = RadialProfile::gaussian();
        for n in 1..=6u32 {
            for &rho in &[0.0, 0.01, 0.3, 1.0, 2.5, 6.0, 10.0] {
                let got = hankel_value(&g, n, rho).unwrap();
                let want = (-0.5 * rho * rho).exp();
                assert!((got - want).abs() <= 1e-12 + 1e-10 * want, "n={n} rho={rho}: {got} vs {want}");
            }
        }
        assert!((hankel_value(&g, 3, 1.0).unwrap() - 0.6065306597126334).abs() < 1e-14);
    }

    #[test]
    fn transform_matches_closed_form_for_even_polynomials() {
        let p = RadialProfile::gaussian_poly(vec![0.5, 0.0, -1.0, 0.0, 0.25, 0.0, 0.1]).unwrap();
        for n in 1..=5u32 {
            let exact = gaussian_poly_fourier(&p, n).unwrap();
            for &rho in &[0.05, 0.8, 2.0, 4.5, 9.0] {
                let got = hankel_value(&p, n, rho).unwrap();
                let want = exact.eval(rho);
                assert!((got - want).abs() <= 1e-11 * (1.0 + want.abs()), "n={n} rho={rho}");
            }
        }
    }

    #[test]
    fn one_dimensional_transform_of_odd_power() {
        // r e^{-r^2/2} on the line: sqrt(2/pi) int_0^inf r e^{-r^2/2} cos(r k) dr
        //   = sqrt(2/pi) (1 - k D(k / sqrt 2) * sqrt 2), D the Dawson integral
        let p = RadialProfile::gaussian_poly(vec![0.0, 1.0]).unwrap();
        let k: f64 = 1.3;
        // Dawson integral by its Taylor series
        let x = k / 2f64.sqrt();
        let mut term = x;
        let mut dawson = x;
        for j in 1..80 {
            term *= -2.0 * x * x / (2.0 * j as f64 + 1.0);
            dawson += term;
        }
        let want = (2.0 / PI).sqrt() * (1.0 - 2f64.sqrt() * k * dawson);
        let got = hankel_value(&p, 1, k).unwrap();
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn spectral_form_examples() {
        let g = RadialProfile::gaussian();
        let s1 = spectral_form(&g, 1.0, 3).unwrap();
        assert!((s1.value - 6.283185307179586).abs() < 1e-9);
        let s0 = spectral_form(&g, 0.0, 3).unwrap();
        assert!((s0.value - 5.568327996831708).abs() < 1e-9);
        let s2 = spectral_form(&g, 2.0, 3).unwrap();
        assert!((s2.value - 8.352491995247562).abs() < 1e-9);
    }

    #[test]
    fn parseval_for_polynomial_profiles() {
        let p = RadialProfile::gaussian_poly(vec![0.0, 0.0, 1.0]).unwrap();
        let norm = weighted_norm(&p, 0.0, 3).unwrap();
        let spec = spectral_form(&p, 0.0, 3).unwrap();
        assert!((norm - spec.value).abs() <= 1e-8 * norm);
    }

    #[test]
    fn spectral_laplacian_matches_local_operator() {
        for n in 1..=4u32 {
            let p = RadialProfile::gaussian_poly(vec![1.0, 0.0, 0.5, 0.0, -0.2]).unwrap();
            let lap = radial_laplacian(&p, n).unwrap();
            let RadialProfile::GaussianPoly { coeffs: q } = &lap else { unreachable!() };
            let RadialProfile::GaussianPoly { coeffs: c } = &p else { unreachable!() };
            // (psi, -Delta psi) as the moment sum of p * q against e^{-r^2}
            let mut local = 0.0;
            for (i, ci) in c.iter().enumerate() {
                for (j, qj) in q.iter().enumerate() {
                    local += ci * qj * 0.5 / rgamma(0.5 * ((i + j) as f64 + n as f64));
                }
            }
            local *= sphere_area(n);
            let spec = spectral_form(&p, 2.0, n).unwrap();
            assert!((spec.value - local).abs() <= 1e-6 * local.abs(), "n={n}");
        }
    }

    #[test]
    fn jordan_spectral_reductions() {
        let p = RadialProfile::gaussian_poly(vec![1.0, 0.0, -0.3]).unwrap();
        let t = ExponentTriple::boundary(1.0, 0.0, 3).unwrap();
        assert_eq!(jordan_spectral_form(&p, &t).unwrap().value, spectral_form(&p, 1.0, 3).unwrap().value);
        let t = ExponentTriple::boundary(0.0, 1.0, 3).unwrap();
        let j = jordan_spectral_form(&p, &t).unwrap().value;
        let w = weighted_norm(&p, 1.0, 3).unwrap();
        assert!((j - w).abs() <= 1e-8 * w, "{j} vs {w}");
    }

    #[test]
    fn power_pairing_examples() {
        let r = fourier_power_pairing(1.0, 3).unwrap();
        assert!((r.lhs.value - 4.0 * PI).abs() < 1e-13);
        assert!((r.rhs.value - 4.0 * PI).abs() < 1e-13);
        assert!(r.passed);
        assert!(fourier_power_pairing(2.0, 5).unwrap().passed);
        assert!(fourier_power_pairing(2.0, 4).unwrap().passed);
        assert!(fourier_power_pairing(3.0, 3).is_err());
    }

    #[test]
    fn sampled_grid_and_csv() {
        let g = RadialProfile::gaussian();
        let s = hankel_transform(&g, 2, &QuadratureSpec::default()).unwrap();
        assert_eq!(s.nodes.len(), 41);
        let v = s.interpolate(0.5).unwrap();
        assert!((v - (-0.125f64).exp()).abs() < 1e-4);
        assert!(s.interpolate(1e3).is_err());
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("node,value\n"));
        assert_eq!(text.lines().count(), 42);
    }

    #[test]
    fn parseval_with_algebraic_tail() {
        // |x| e^{-x^2/2} in one dimension: the transform decays like rho^{-2}
        let p = RadialProfile::gaussian_poly(vec![0.0, 1.0]).unwrap();
        let s = spectral_form(&p, 0.0, 1).unwrap();
        let norm = 0.5 * PI.sqrt();
        assert!((s.value - norm).abs() <= 1e-8 * norm, "{} vs {norm}", s.value);
        assert!(s.notes.iter().any(|n| n.contains("extrapolated")));
    }

    #[test]
    fn wide_cutoff_transform_hits_budget() {
        let p = RadialProfile::power_cutoff(1.0, 1000.0).unwrap();
        assert!(matches!(hankel_value(&p, 3, 50.0), Err(Error::NonConvergence(_))));
    }
}
