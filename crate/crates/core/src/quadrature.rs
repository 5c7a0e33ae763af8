//! One-dimensional quadrature building blocks.
//!
//! Gauss-Legendre rules come from Newton iteration on the Legendre
//! recurrence; Gauss-Jacobi rules from the Golub-Welsch eigenvalue problem.
//! All sums go through [`Neumaier`] so results do not depend on the
//! magnitude ordering of panel contributions.

use nalgebra::{DMatrix, SymmetricEigen};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specialfn::gamma;

/// Compensated (Kahan-Babuska-Neumaier) accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Sum with compensation, in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<Neumaier>().total()
}

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let nf = order as f64;
        for i in 0..order.div_ceil(2) {
            // Tricomi initial guess, then Newton.
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    let (_, d) = legendre_with_derivative(order, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Integrate `f` over `[lo, hi]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut f: F) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc = Neumaier::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(mid + half * x));
        }
        half * acc.total()
    }

    /// Nodes and weights mapped to `[lo, hi]`.
    pub fn mapped(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let (p, pm1) = if n == 0 { (1.0, 0.0) } else { (p1, p0) };
    let d = n as f64 * (x * p - pm1) / (x * x - 1.0);
    (p, d)
}

/// Gauss-Jacobi rule for the weight `(1 - x)^alpha (1 + x)^beta` on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussJacobi {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
}

impl GaussJacobi {
    pub fn new(order: usize, alpha: f64, beta: f64) -> Result<Self> {
        if order == 0 || alpha <= -1.0 || beta <= -1.0 {
            return Err(Error::Domain(format!(
                "Gauss-Jacobi needs order >= 1, alpha, beta > -1; got {order}, {alpha}, {beta}"
            )));
        }
        let ab = alpha + beta;
        let mut jac = DMatrix::<f64>::zeros(order, order);
        for k in 0..order {
            let kf = k as f64;
            let denom = (2.0 * kf + ab) * (2.0 * kf + ab + 2.0);
            let diag = if denom == 0.0 {
                // alpha + beta = 0 at k = 0; the limit is (beta - alpha) / (ab + 2).
                (beta - alpha) / (ab + 2.0)
            } else {
                (beta * beta - alpha * alpha) / denom
            };
            jac[(k, k)] = diag;
            if k + 1 < order {
                let j = kf + 1.0;
                let off2 = if k == 0 {
                    4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
                } else {
                    4.0 * j * (j + alpha) * (j + beta) * (j + ab)
                        / ((2.0 * j + ab).powi(2) * (2.0 * j + ab + 1.0) * (2.0 * j + ab - 1.0))
                };
                let off = off2.sqrt();
                jac[(k, k + 1)] = off;
                jac[(k + 1, k)] = off;
            }
        }
        let mu0 = 2f64.powf(ab + 1.0) * gamma(alpha + 1.0)? * gamma(beta + 1.0)? / gamma(ab + 2.0)?;
        let eig = SymmetricEigen::new(jac);
        let mut pairs: Vec<(f64, f64)> = (0..order)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (eig.eigenvalues[i], mu0 * v0 * v0)
            })
            .collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        Ok(Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
            alpha,
            beta,
        })
    }

    /// `int_{-1}^{1} (1-x)^alpha (1+x)^beta f(x) dx`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        compensated_sum(self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)))
    }
}

/// Integral of `f` over `[0, r0]` where `f(r) ~ C r^power` near the origin.
///
/// The interval is split into `levels` dyadic panels shrinking toward zero;
/// the innermost remainder `[0, r0 2^-levels]` is closed with the leading
/// power-law term.
pub fn dyadic_from_zero<F: FnMut(f64) -> f64>(
    rule: &GaussLegendre,
    r0: f64,
    levels: usize,
    power: f64,
    mut f: F,
) -> f64 {
    let mut acc = Neumaier::new();
    let mut hi = r0;
    for _ in 0..levels {
        let lo = 0.5 * hi;
        acc.add(rule.integrate(lo, hi, &mut f));
        hi = lo;
    }
    if power > -1.0 && hi > 0.0 {
        acc.add(f(hi) * hi / (power + 1.0));
    }
    acc.total()
}

/// Piecewise Chebyshev interpolant on a fixed set of segments.
#[derive(Debug, Clone)]
pub struct ChebyshevSegment {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<f64>,
}

impl ChebyshevSegment {
    /// Interpolate `f` at `degree + 1` Chebyshev points of the first kind.
    pub fn fit<F: FnMut(f64) -> f64>(lo: f64, hi: f64, degree: usize, mut f: F) -> Self {
        let m = degree + 1;
        let mf = m as f64;
        let values: Vec<f64> = (0..m)
            .map(|j| {
                let x = (PI * (j as f64 + 0.5) / mf).cos();
                f(0.5 * (hi + lo) + 0.5 * (hi - lo) * x)
            })
            .collect();
        let coeffs = (0..m)
            .map(|k| {
                let s = compensated_sum((0..m).map(|j| {
                    values[j] * (PI * k as f64 * (j as f64 + 0.5) / mf).cos()
                }));
                let c = 2.0 * s / mf;
                if k == 0 {
                    0.5 * c
                } else {
                    c
                }
            })
            .collect();
        Self { lo, hi, coeffs }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let x = (2.0 * t - self.lo - self.hi) / (self.hi - self.lo);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * x * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        x * b1 - b2 + self.coeffs[0]
    }
}
