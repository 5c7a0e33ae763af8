//! Two-dimensional radial quadrature for the singular double integrals.
//!
//! With `r = e^u`, `s = e^{u+w}` and `w >= 0` (the integrands are symmetric,
//! so only `s >= r` is integrated and the result doubled), every form is
//!
//! ```text
//! 2 alpha_{a,n} |S^{n-1}| int du e^{m u} int_0^inf dw F(u, w) k(w),
//! ```
//!
//! where `k(w) = e^{-a w} U(e^{-w})` is the log-radius kernel and `F` is
//! built from the scaled differences `D_kappa(u, w) = e^{kappa w} psi(e^{u+w}) - psi(e^u)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::{GaussLegendre, Neumaier};
use crate::specialfn::{alpha_const, sphere_area};
use crate::testfuncs::RadialProfile;

use super::kernel::KernelTable;

/// Below this `w` the differences are integrated from the derivative.
const SMALL_W: f64 = 1e-3;
/// `e^{-37}` is below double-precision resolution of any partial sum.
const DECAY_LENGTHS: f64 = 37.0;
const U_FLOOR: f64 = -200.0;
/// Ratio of the innermost diagonal sub-panel to the block width.
const DIAGONAL_DEPTH: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum FormKind {
    /// `|psi(r) - psi(s)|^2`
    Fractional,
    /// `(psi(r) - psi(s)) (r^b psi(r) - s^b psi(s))`
    Jordan { b: f64 },
    /// ground-state-transformed Hardy form
    HardyGsr,
    /// the Hardy form of `r^{b/2} psi`
    WeightedHardy { b: f64 },
    /// the remainder of the Jordan ground-state representation
    Remainder { b: f64 },
}

struct Integrand {
    kind: FormKind,
    kappas: [f64; 2],
    count: usize,
    outer_exp: f64,
    damping: f64,
    b: f64,
    lambda_low: f64,
    lambda_high: f64,
    diag_power: f64,
}

impl Integrand {
    fn new(kind: FormKind, a: f64, n: u32) -> Self {
        let nf = n as f64;
        let c = 0.5 * (nf - a);
        let mut it = Integrand {
            kind,
            kappas: [0.0, 0.0],
            count: 1,
            outer_exp: nf - a,
            damping: 0.0,
            b: 0.0,
            lambda_low: nf,
            lambda_high: a,
            diag_power: 1.0 - a,
        };
        match kind {
            FormKind::Fractional => {}
            FormKind::Jordan { b } => {
                it.kappas = [0.0, b];
                it.count = 2;
                it.outer_exp = nf - a + b;
                it.lambda_low = nf.min(nf - a + b + 1.0);
            }
            FormKind::HardyGsr => {
                it.kappas = [c, 0.0];
                it.damping = c;
                it.lambda_low = (0.5 * (nf + a)).min(nf - a);
                it.lambda_high = a + c;
            }
            FormKind::WeightedHardy { b } => {
                it.kappas = [c + 0.5 * b, 0.0];
                it.damping = c;
                it.outer_exp = nf - a + b;
                it.lambda_low = (0.5 * (nf + a)).min(nf - a + b);
                it.lambda_high = a + c;
            }
            FormKind::Remainder { b } => {
                let gamma = c + 0.5 * b;
                it.kappas = [gamma, 0.0];
                it.damping = gamma;
                it.outer_exp = nf - a + b;
                it.b = b;
                it.lambda_low = (0.5 * (nf + a - b)).min(nf - a + b);
                it.lambda_high = 0.5 * (nf + a - b);
                it.diag_power = 3.0 - a;
            }
        }
        it
    }

    fn combine(&self, w: f64, d: &[f64; 2]) -> f64 {
        match self.kind {
            FormKind::Fractional => d[0] * d[0],
            FormKind::Jordan { .. } => d[0] * d[1],
            FormKind::HardyGsr | FormKind::WeightedHardy { .. } => {
                d[0] * d[0] * (-self.damping * w).exp()
            }
            FormKind::Remainder { .. } => {
                let e = (0.5 * self.b * w).exp_m1();
                0.5 * e * e * d[0] * d[0] * (-self.damping * w).exp()
            }
        }
    }
}

/// Where a profile lives in log-radius and where its panels must break.
struct Geometry {
    support_lo: f64,
    support_hi: f64,
    active_lo: f64,
    active_hi: f64,
    gaussian: bool,
    breaks: Vec<f64>,
}

impl Geometry {
    fn of(profile: &RadialProfile) -> Self {
        let (support_lo, support_hi) = profile.log_support();
        let gaussian = matches!(profile, RadialProfile::GaussianPoly { .. });
        let active_lo = if gaussian { -2.0 } else { support_lo };
        let mut breaks = profile.log_breakpoints();
        breaks.push(active_lo);
        breaks.push(support_hi);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        Geometry {
            support_lo,
            support_hi,
            active_lo,
            active_hi: support_hi,
            gaussian,
            breaks,
        }
    }

    /// Panel width at `v`; every width is proportional to `h0`, so the whole
    /// mesh refines together.
    fn width(&self, v: f64, h0: f64) -> f64 {
        let s = 2.0 * h0;
        if v < self.active_lo {
            (s * (self.active_lo - v)).clamp(h0, 4.0 * s)
        } else if v <= self.active_hi {
            if self.gaussian && v > 0.0 {
                h0 * (-v).exp()
            } else {
                h0
            }
        } else {
            h0.max(s * (v - self.active_hi))
        }
    }

    fn next_edge(&self, v: f64, width: f64) -> f64 {
        let mut next = v + width;
        let eps = 1e-12 * (1.0 + v.abs());
        for &bp in &self.breaks {
            if bp > v + eps && bp < next {
                next = bp;
                break;
            }
        }
        next
    }
}

fn scaled(psi: f64, exponent: f64) -> f64 {
    if psi == 0.0 {
        0.0
    } else if exponent < 700.0 {
        psi * exponent.exp()
    } else {
        psi.signum() * (exponent + psi.abs().ln()).exp()
    }
}

struct Engine<'p> {
    profile: &'p RadialProfile,
    integrand: Integrand,
    table: std::sync::Arc<KernelTable>,
    geom: Geometry,
    rule: GaussLegendre,
    grading: f64,
    h0: f64,
    v_top: f64,
}

// 3-point Gauss-Legendre on [0, 1]
const SMALL_NODES: [f64; 3] = [0.112_701_665_379_258_31, 0.5, 0.887_298_334_620_741_7];
const SMALL_WEIGHTS: [f64; 3] = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];

impl<'p> Engine<'p> {
    fn differences(&self, u: f64, w: f64, psi_r: f64) -> [f64; 2] {
        let it = &self.integrand;
        let mut d = [0.0; 2];
        if w >= SMALL_W {
            let psi_s = self.profile.eval((u + w).exp());
            for k in 0..it.count {
                d[k] = scaled(psi_s, it.kappas[k] * w) - psi_r;
            }
        } else {
            for (x, wt) in SMALL_NODES.iter().zip(SMALL_WEIGHTS) {
                let t = w * x;
                let (p, rp) = self.profile.eval_with_log_derivative((u + t).exp());
                for k in 0..it.count {
                    let kappa = it.kappas[k];
                    d[k] += wt * (kappa * t).exp() * (kappa * p + rp);
                }
            }
            for dk in d.iter_mut().take(it.count) {
                *dk *= w;
            }
        }
        d
    }

    fn point(&self, u: f64, w: f64, psi_r: f64) -> f64 {
        let d = self.differences(u, w, psi_r);
        if d[0] == 0.0 && d[1] == 0.0 {
            return 0.0;
        }
        self.integrand.combine(w, &d) * self.table.log_kernel(w)
    }

    fn panel(&self, u: f64, lo: f64, hi: f64, psi_r: f64, acc: &mut Neumaier, abs: &mut Neumaier) {
        for (w, wt) in self.rule.mapped(lo, hi) {
            let f = wt * self.point(u, w, psi_r);
            acc.add(f);
            abs.add(f.abs());
        }
    }

    /// `int_0^inf F(u, w) k(w) dw` and the integral of its absolute value.
    fn inner(&self, u: f64) -> (f64, f64) {
        let psi_r = self.profile.eval(u.exp());
        let mut acc = Neumaier::new();
        let mut abs = Neumaier::new();
        let h0 = self.h0;
        let mut v = if u + h0 <= self.geom.support_lo {
            self.geom.support_lo
        } else {
            let mut hi = h0;
            while hi > DIAGONAL_DEPTH * h0 {
                let lo = hi * self.grading;
                self.panel(u, lo, hi, psi_r, &mut acc, &mut abs);
                hi = lo;
            }
            let tip = self.point(u, hi, psi_r) * hi / (self.integrand.diag_power + 1.0);
            acc.add(tip);
            abs.add(tip.abs());
            u + h0
        };
        while v < self.v_top {
            let w = v - u;
            let width = self.geom.width(v, h0).min(h0.max(w));
            let next = self.geom.next_edge(v, width).min(self.v_top);
            self.panel(u, w, next - u, psi_r, &mut acc, &mut abs);
            v = next;
        }
        (acc.total(), abs.total())
    }
}

pub(crate) struct RawForm {
    pub value: f64,
    pub abs_value: f64,
    pub u_range: (f64, f64),
    pub notes: Vec<String>,
}

/// One evaluation at panel width `h0` (panels per unit `1/h0`).
pub(crate) fn evaluate(
    profile: &RadialProfile,
    kind: FormKind,
    a: f64,
    n: u32,
    h0: f64,
    gl_order: usize,
    grading: f64,
    u_bounds: (Option<f64>, Option<f64>),
) -> Result<RawForm> {
    let integrand = Integrand::new(kind, a, n);
    let geom = Geometry::of(profile);
    let mut notes = Vec::new();
    let mut u_min = geom.active_lo - DECAY_LENGTHS / integrand.lambda_low;
    if u_min < U_FLOOR {
        notes.push(format!(
            "lower log-radius truncation {u_min:.1} capped at {U_FLOOR}; decay rate {:.3}",
            integrand.lambda_low
        ));
        u_min = U_FLOOR;
    }
    let mut u_max = geom.support_hi;
    if let Some(lo) = u_bounds.0 {
        u_min = lo;
    }
    if let Some(hi) = u_bounds.1 {
        u_max = hi;
    }
    if !(u_min < u_max) {
        return Err(Error::Invalid(format!("empty log-radius range [{u_min}, {u_max}]")));
    }
    let engine = Engine {
        profile,
        v_top: geom.support_hi + DECAY_LENGTHS / integrand.lambda_high,
        integrand,
        table: KernelTable::shared(a, n),
        geom,
        rule: GaussLegendre::new(gl_order),
        grading,
        h0,
    };

    let mut outer = Vec::new();
    let mut u = u_min;
    while u < u_max {
        let width = engine.geom.width(u, h0);
        let next = engine.geom.next_edge(u, width).min(u_max);
        outer.extend(engine.rule.mapped(u, next));
        u = next;
    }
    let m = engine.integrand.outer_exp;
    let parts: Vec<(f64, f64)> = outer
        .par_iter()
        .map(|&(u, wt)| {
            let (val, abs) = engine.inner(u);
            let factor = wt * (m * u).exp();
            (factor * val, factor * abs)
        })
        .collect();
    let mut acc = Neumaier::new();
    let mut abs = Neumaier::new();
    for (v, x) in parts {
        acc.add(v);
        abs.add(x);
    }
    let prefactor = 2.0 * alpha_const(a, n)? * sphere_area(n);
    let value = prefactor * acc.total();
    let abs_value = prefactor * abs.total();
    if !value.is_finite() || !abs_value.is_finite() {
        return Err(Error::NonConvergence(format!(
            "double integral for {} is not finite",
            profile.describe()
        )));
    }
    Ok(RawForm {
        value,
        abs_value,
        u_range: (u_min, u_max),
        notes,
    })
}
