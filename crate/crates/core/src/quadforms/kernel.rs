//! The angular kernel `A(r, s) = int_{S^{n-1}} |r e - s w|^{-(n+a)} dw`.
//!
//! By homogeneity `A(r, s) = max^{-(n+a)} U(min/max)` with the unit kernel
//! `U(rho) = A(rho, 1)`, which is what is computed here. It is always
//! evaluated through the gap `delta = 1 - rho` so that the diagonal
//! singularity `U ~ delta^{-(1+a)}` never suffers from cancellation.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::quadrature::{ChebyshevSegment, GaussJacobi, GaussLegendre};
use crate::specialfn::sphere_area;

const JACOBI_NODES: usize = 40;
const THETA_ORDER: usize = 16;
/// Dyadic segments `[2^{-j-1}, 2^{-j}]`, `j = 0..=TABLE_LEVELS`, of the gap.
const TABLE_LEVELS: usize = 44;
const TABLE_DEGREE: usize = 24;

fn jacobi_rule(n: u32) -> Arc<GaussJacobi> {
    static RULES: OnceLock<Mutex<HashMap<u32, Arc<GaussJacobi>>>> = OnceLock::new();
    let map = RULES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = map.lock().expect("jacobi rule cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let beta = 0.5 * (n as f64 - 3.0);
            Arc::new(GaussJacobi::new(JACOBI_NODES, beta, beta).expect("n >= 2 gives beta > -1"))
        })
        .clone()
}

fn theta_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(THETA_ORDER))
}

/// `U(1 - delta)` for `0 < delta <= 1`.
pub fn unit_kernel(delta: f64, a: f64, n: u32) -> f64 {
    let p = 0.5 * (n as f64 + a);
    if n == 1 {
        return delta.powf(-1.0 - a) + (2.0 - delta).powf(-1.0 - a);
    }
    let rho = 1.0 - delta;
    let surface = sphere_area(n - 1);
    if rho <= 0.5 {
        // |rho e - w|^2 = delta^2 + 2 rho (1 - t), t = cos(angle)
        let rule = jacobi_rule(n);
        let d2 = delta * delta;
        return surface * rule.integrate(|t| (d2 + 2.0 * rho * (1.0 - t)).powf(-p));
    }
    // Near the diagonal: |rho e - w|^2 = delta^2 + 4 rho sin^2(theta/2), with
    // theta-panels graded geometrically away from the peak width delta/sqrt(rho).
    let rule = theta_rule();
    let d2 = delta * delta;
    let four_rho = 4.0 * rho;
    let m = n as i32 - 2;
    let f = |theta: f64| {
        let h = (0.5 * theta).sin();
        (d2 + four_rho * h * h).powf(-p) * theta.sin().powi(m)
    };
    let theta0 = delta / rho.sqrt();
    let mut lo = 0.0;
    let mut hi = theta0.min(std::f64::consts::PI);
    let mut total = 0.0;
    loop {
        total += rule.integrate(lo, hi, &f);
        if hi >= std::f64::consts::PI {
            break;
        }
        lo = hi;
        hi = (2.0 * hi).min(std::f64::consts::PI);
    }
    surface * total
}

/// `A(r, s)` for positive `r != s`.
pub fn angular_kernel(r: f64, s: f64, a: f64, n: u32) -> Result<f64> {
    if !(r > 0.0 && s > 0.0 && r.is_finite() && s.is_finite()) {
        return Err(Error::Domain(format!("angular kernel needs r, s > 0, got {r}, {s}")));
    }
    if !(a > 0.0 && a.is_finite()) || n == 0 {
        return Err(Error::Domain(format!("angular kernel needs a > 0, n >= 1, got a = {a}, n = {n}")));
    }
    if r == s {
        return Err(Error::Domain(format!("angular kernel is singular at r = s = {r}")));
    }
    let (lo, hi) = if r < s { (r, s) } else { (s, r) };
    let delta = (hi - lo) / hi;
    Ok(hi.powf(-(n as f64 + a)) * unit_kernel(delta, a, n))
}

/// Piecewise Chebyshev table of `g(delta) = delta^{1+a} U(1 - delta)`, which
/// is bounded and smooth on every dyadic segment of `(0, 1]`.
#[derive(Debug)]
pub struct KernelTable {
    a: f64,
    segments: Vec<ChebyshevSegment>,
}

impl KernelTable {
    pub fn new(a: f64, n: u32) -> Self {
        let segments = (0..=TABLE_LEVELS)
            .map(|j| {
                let hi = 0.5f64.powi(j as i32);
                ChebyshevSegment::fit(0.5 * hi, hi, TABLE_DEGREE, |d| {
                    unit_kernel(d, a, n) * d.powf(1.0 + a)
                })
            })
            .collect();
        Self { a, segments }
    }

    /// Shared table for `(a, n)`, built on first use.
    pub fn shared(a: f64, n: u32) -> Arc<KernelTable> {
        static TABLES: OnceLock<Mutex<HashMap<(u64, u32), Arc<KernelTable>>>> = OnceLock::new();
        let map = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(t) = map.lock().expect("kernel cache poisoned").get(&(a.to_bits(), n)) {
            return t.clone();
        }
        let table = Arc::new(KernelTable::new(a, n));
        map.lock()
            .expect("kernel cache poisoned")
            .entry((a.to_bits(), n))
            .or_insert(table)
            .clone()
    }

    fn scaled(&self, delta: f64) -> f64 {
        let j = (-delta.log2()).floor();
        if j > TABLE_LEVELS as f64 {
            let last = self.segments.last().expect("table is non-empty");
            return last.eval(last.lo);
        }
        let j = (j.max(0.0) as usize).min(TABLE_LEVELS);
        self.segments[j].eval(delta)
    }

    /// `U(1 - delta)`.
    pub fn unit(&self, delta: f64) -> f64 {
        self.scaled(delta) / delta.powf(1.0 + self.a)
    }

    /// `k(w) = e^{-a w} U(e^{-w})` for `w > 0`, the kernel in log-radius
    /// coordinates.
    pub fn log_kernel(&self, w: f64) -> f64 {
        let delta = -(-w).exp_m1();
        (-self.a * w).exp() * self.unit(delta)
    }
}
