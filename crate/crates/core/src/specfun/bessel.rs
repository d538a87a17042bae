//! Bessel functions of the first kind, integer order.
//!
//! Three regimes: a power series for `x ≤ 1`, Miller backward recurrence
//! normalized by `J₀ + 2ΣJ₂ₖ = 1` for moderate arguments, and the Hankel
//! asymptotic expansion of `J₀, J₁` followed by upward recurrence once
//! `x` is large compared with both the order and the 100 accuracy range.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const RESCALE_ABOVE: f64 = 1e250;
const ASYMPTOTIC_FROM: f64 = 1000.0;

/// `J_n(x)` for `x ≥ 0`.
pub fn bessel_j(n: u32, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::OutOfDomain(format!("bessel argument {x}")));
    }
    if x < 0.0 {
        return Err(Error::OutOfDomain(format!(
            "negative bessel argument {x}; use J_n(-x) = (-1)^n J_n(x)"
        )));
    }
    Ok(jn(n, x))
}

/// `J_n(x)` for any finite `x`, using the parity identity for `x < 0`.
pub fn jn(n: u32, x: f64) -> f64 {
    if x < 0.0 {
        let v = jn(n, -x);
        return if n.is_multiple_of(2) { v } else { -v };
    }
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x <= 1.0 {
        return series(n, x);
    }
    if x >= ASYMPTOTIC_FROM && (n as f64) < 0.5 * x {
        return upward_from_asymptotic(n, x);
    }
    miller(n as usize, x)[n as usize]
}

/// `[J_0(x), …, J_nmax(x)]` in one backward sweep.
pub fn jn_sequence(nmax: usize, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut v = vec![0.0; nmax + 1];
        v[0] = 1.0;
        return v;
    }
    let ax = x.abs();
    let mut v = if ax >= ASYMPTOTIC_FROM && (nmax as f64) < 0.5 * ax {
        let mut v = Vec::with_capacity(nmax + 1);
        let (j0, j1) = (asymptotic(0, ax), asymptotic(1, ax));
        v.push(j0);
        if nmax >= 1 {
            v.push(j1);
        }
        for k in 1..nmax {
            let next = 2.0 * k as f64 / ax * v[k] - v[k - 1];
            v.push(next);
        }
        v
    } else {
        miller(nmax, ax)
    };
    if x < 0.0 {
        for (k, val) in v.iter_mut().enumerate() {
            if k % 2 == 1 {
                *val = -*val;
            }
        }
    }
    v
}

fn series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut lead = 1.0;
    for i in 1..=n {
        lead *= half / i as f64;
    }
    let q = -half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        term *= q / (k as f64 * (n as f64 + k as f64));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// Backward recurrence from an even start index well above `max(nmax, x)`.
fn miller(nmax: usize, x: f64) -> Vec<f64> {
    let base = (nmax as f64).max(x) + 40.0 + 10.0 * x.cbrt();
    let mut start = base.ceil() as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let mut out = vec![0.0; nmax + 1];
    let mut above = 0.0; // J_{k+1}
    let mut cur = 1.0; // J_k, k = start
    let mut norm = 2.0 * cur; // start is even and > 0
    if start <= nmax {
        out[start] = cur;
    }
    let inv_x = 1.0 / x;
    for k in (1..=start).rev() {
        let below = 2.0 * k as f64 * inv_x * cur - above;
        above = cur;
        cur = below;
        let idx = k - 1;
        if idx <= nmax {
            out[idx] = cur;
        }
        if idx > 0 && idx % 2 == 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > RESCALE_ABOVE {
            let s = 1.0 / RESCALE_ABOVE;
            cur *= s;
            above *= s;
            norm *= s;
            for v in out.iter_mut().skip(idx) {
                *v *= s;
            }
        }
    }
    norm += cur;
    for v in &mut out {
        *v /= norm;
    }
    out
}

/// Hankel expansion of `J_ν(x)` for large `x`.
fn asymptotic(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * (nu as f64) * (nu as f64);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..40 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if a.abs() > prev || a.abs() < 1e-18 {
            break;
        }
        prev = a.abs();
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
    }
    let chi = x - (0.5 * nu as f64 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn upward_from_asymptotic(n: u32, x: f64) -> f64 {
    let (mut prev, mut cur) = (asymptotic(0, x), asymptotic(1, x));
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = 2.0 * k as f64 / x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Positive zeros of `J_n` in `(0, upto]`, located by a sign-change scan
/// followed by bisection.
pub fn zeros_below(n: u32, upto: f64) -> Vec<f64> {
    let mut zeros = Vec::new();
    // the first zero of J_n exceeds n + 1.8 n^{1/3}, and J_n > 0 before it
    let mut a = n as f64 + 0.5;
    if a >= upto {
        return zeros;
    }
    let step = 0.5;
    let mut fa = jn(n, a);
    while a < upto {
        let b = (a + step).min(upto);
        let fb = jn(n, b);
        if fb == 0.0 {
            zeros.push(b);
        } else if fa * fb < 0.0 {
            zeros.push(bisect(|t| jn(n, t), a, b, fa));
        }
        a = b;
        fa = fb;
    }
    zeros
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, mut flo: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regimes_agree_at_boundaries() {
        for n in [0u32, 1, 3, 8] {
            let s = series(n, 1.0);
            let m = miller(n as usize, 1.0)[n as usize];
            assert!((s - m).abs() <= 1e-14 * s.abs(), "n={n}: {s} vs {m}");
            let a = upward_from_asymptotic(n, 1200.0);
            let m = miller(n as usize, 1200.0)[n as usize];
            assert!((a - m).abs() < 1e-13, "n={n}: {a} vs {m}");
        }
    }

    #[test]
    fn negative_argument_rejected() {
        assert!(bessel_j(2, -1.0).is_err());
        assert!((jn(3, -2.0) + jn(3, 2.0)).abs() < 1e-16);
    }

    #[test]
    fn sequence_matches_single() {
        let seq = jn_sequence(30, 17.3);
        for (n, &v) in seq.iter().enumerate() {
            assert!((v - jn(n as u32, 17.3)).abs() < 1e-15);
        }
    }
}
