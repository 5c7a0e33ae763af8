//! Bessel functions of the first kind for the small orders that occur in
//! radial Fourier transforms, `nu = n/2 - 1` with `n` a dimension.

use std::f64::consts::PI;

use crate::specialfn::rgamma;

const SERIES_LIMIT: f64 = 2.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;

/// `J_k(z)` for integer order `k >= 0` and `z >= 0`.
pub fn bessel_j_int(k: u32, z: f64) -> f64 {
    if z == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if z < SERIES_LIMIT {
        return z.powi(k as i32) * series_normalized(k as f64, z);
    }
    if z < ASYMPTOTIC_LIMIT || 2.0 * k as f64 > z {
        return miller(k, z);
    }
    let j0 = hankel_asymptotic(0.0, z);
    if k == 0 {
        return j0;
    }
    let j1 = hankel_asymptotic(1.0, z);
    // Upward recurrence is stable for k < z.
    let (mut jm, mut jc) = (j0, j1);
    for m in 1..k {
        let jn = 2.0 * m as f64 / z * jc - jm;
        jm = jc;
        jc = jn;
    }
    jc
}

/// `J_nu(z) / z^nu`, the entire function behind the radial Fourier kernel.
///
/// `nu` must be an integer or a half-integer `>= -1/2`.
pub fn bessel_j_normalized(nu: f64, z: f64) -> f64 {
    let z = z.abs();
    if z < SERIES_LIMIT {
        return series_normalized(nu, z);
    }
    let twice = 2.0 * nu;
    debug_assert!(twice == twice.round() && nu >= -0.5, "unsupported order {nu}");
    if (twice as i64) % 2 == 0 {
        bessel_j_int(nu as u32, z) / z.powf(nu)
    } else {
        // J_{k+1/2}(z) = sqrt(2z/pi) j_k(z) with spherical Bessel j_k.
        let k = (nu - 0.5).round() as i64;
        let jk = spherical_j(k, z);
        (2.0 / PI).sqrt() * z.sqrt() * jk / z.powf(nu)
    }
}

/// Spherical Bessel `j_k(z)` for `k >= -1`, with `j_{-1}(z) = cos(z)/z`.
fn spherical_j(k: i64, z: f64) -> f64 {
    let jm1 = z.cos() / z;
    if k == -1 {
        return jm1;
    }
    let j0 = z.sin() / z;
    let (mut a, mut b) = (jm1, j0);
    for m in 0..k {
        let next = (2 * m + 1) as f64 / z * b - a;
        a = b;
        b = next;
    }
    b
}

// sum_m (-1)^m (z/2)^{2m} / (m! Gamma(m + nu + 1)) / 2^nu
fn series_normalized(nu: f64, z: f64) -> f64 {
    let q = 0.25 * z * z;
    let mut term = rgamma(nu + 1.0) / 2f64.powf(nu);
    let mut sum = term;
    for m in 1..60 {
        let mf = m as f64;
        term *= -q / (mf * (mf + nu));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

// Miller's backward recurrence normalised by J_0 + 2 sum J_{2m} = 1.
fn miller(k: u32, z: f64) -> f64 {
    let start = {
        let base = z.max(k as f64) + 20.0 + (40.0 * z.max(k as f64)).sqrt();
        let s = base as u32;
        s + (s % 2)
    };
    let mut jp = 0.0;
    let mut jc = 1e-30;
    let mut norm = 0.0;
    let mut result = 0.0;
    for m in (1..=start).rev() {
        let jm = 2.0 * m as f64 / z * jc - jp;
        jp = jc;
        jc = jm;
        // jc now holds the unnormalised J_{m-1}
        if m - 1 == k {
            result = jc;
        }
        if (m - 1) % 2 == 0 && m - 1 > 0 {
            norm += 2.0 * jc;
        }
        if jc.abs() > 1e250 {
            jc *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            result *= 1e-250;
        }
    }
    norm += jc;
    result / norm
}

fn hankel_asymptotic(nu: f64, z: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        term *= (mu - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * z);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        // a_k contributes to P for even k, to Q for odd k, with alternating signs
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = z - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * z)).sqrt() * (p * chi.cos() - q * chi.sin())
}
