//! Aperture Hankel integrals `I_n(k) = ∫₀ᴿ J_n(kr) r dr` and the
//! inverse Hankel transform used for radially engineered masks.
//!
//! Substituting `u = kr` gives `I_n(k) = R²·Ĩ_n(kR)/(kR)²` with
//! `Ĩ_n(u) = ∫₀ᵘ t J_n(t) dt`, so everything reduces to the single-variable
//! primitive `Ĩ_n`. Two independent routes evaluate it:
//!
//! * adaptive Gauss–Legendre on panels between consecutive zeros of `J_n`;
//! * the closed series `Ĩ_n(u) = u J_{n+1}(u) + 2n Σ_{j≥0} J_{n+2j+2}(u)`.
//!
//! The series is what grid-sized workloads use, via [`ApertureHankelTable`].

use num_complex::Complex64;
use rayon::prelude::*;

use super::bessel::{jn, jn_sequence, zeros_below};
use super::quad::{adaptive, QuadOptions};
use crate::error::{invalid, Error, Result};

/// Validated `(order, radius)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HankelIntegralParams {
    pub order: u32,
    pub radius: f64,
}

/// Highest order for which accuracy is documented.
pub const MAX_DOCUMENTED_ORDER: u32 = 64;

impl HankelIntegralParams {
    pub fn new(order: u32, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return invalid(format!("aperture radius must be positive, got {radius}"));
        }
        if order > MAX_DOCUMENTED_ORDER {
            return invalid(format!("order {order} exceeds {MAX_DOCUMENTED_ORDER}"));
        }
        Ok(Self { order, radius })
    }

    pub fn eval(&self, k: f64) -> f64 {
        aperture_hankel_integral(self.order, k, self.radius)
    }
}

fn k_zero_limit(n: u32, radius: f64) -> f64 {
    if n == 0 {
        0.5 * radius * radius
    } else {
        0.0
    }
}

/// `I_n(k)` by adaptive quadrature between zeros of `J_n`, absolute
/// tolerance `1e−12·R²`.
pub fn aperture_hankel_integral(n: u32, k: f64, radius: f64) -> f64 {
    aperture_hankel_integral_with(n, k, radius, &QuadOptions::default())
}

pub fn aperture_hankel_integral_with(n: u32, k: f64, radius: f64, opts: &QuadOptions) -> f64 {
    let k = k.abs();
    if k == 0.0 {
        return k_zero_limit(n, radius);
    }
    let u_max = k * radius;
    // tolerance on Ĩ_n is scaled so the tolerance on I_n is rel_scale_tol·R²
    let tol = opts.rel_scale_tol * u_max * u_max;
    let mut edges = vec![0.0];
    edges.extend(zeros_below(n, u_max));
    if *edges.last().unwrap() < u_max {
        edges.push(u_max);
    }
    let panel_tol = tol / edges.len() as f64;
    let integrand = |t: f64| t * jn(n, t);
    let total: f64 = edges
        .windows(2)
        .map(|w| adaptive(&integrand, w[0], w[1], panel_tol, opts.max_depth))
        .sum();
    total / (k * k)
}

/// `Ĩ_n(u) = ∫₀ᵘ t J_n(t) dt` from the Bessel series.
pub fn primitive_series(n: u32, u: f64) -> f64 {
    if u == 0.0 {
        return 0.0;
    }
    let nmax = (u.abs().max(n as f64) + 60.0 + 10.0 * u.abs().cbrt()) as usize + n as usize + 2;
    let seq = jn_sequence(nmax, u);
    primitive_from_sequence(n as usize, u, &seq)
}

fn primitive_from_sequence(n: usize, u: f64, seq: &[f64]) -> f64 {
    let tail: f64 = seq.iter().skip(n + 2).step_by(2).sum();
    u * seq[n + 1] + 2.0 * n as f64 * tail
}

/// `I_n(k)` from the closed Bessel series.
pub fn aperture_hankel_series(n: u32, k: f64, radius: f64) -> f64 {
    let k = k.abs();
    if k == 0.0 {
        return k_zero_limit(n, radius);
    }
    let u = k * radius;
    radius * radius * primitive_series(n, u) / (u * u)
}

/// `I_n(k)` for several orders on a fine `u = kR` lattice with cubic Hermite
/// interpolation; the exact derivative `u J_n(u)` makes the interpolant
/// accurate to ~1e−10 at the default step.
#[derive(Debug, Clone)]
pub struct ApertureHankelTable {
    orders: Vec<u32>,
    step: f64,
    u_max: f64,
    /// Per order: primitive values and derivatives on the lattice.
    values: Vec<Vec<f64>>,
    slopes: Vec<Vec<f64>>,
}

/// Below this `u` the table defers to the series (division by `u²`).
const TABLE_SMALL_U: f64 = 0.5;

impl ApertureHankelTable {
    pub fn new(orders: &[u32], u_max: f64) -> Result<Self> {
        Self::with_step(orders, u_max, 0.01)
    }

    pub fn with_step(orders: &[u32], u_max: f64, step: f64) -> Result<Self> {
        if !(u_max.is_finite() && u_max > 0.0 && step > 0.0) {
            return invalid("hankel table needs positive u_max and step");
        }
        let mut orders = orders.to_vec();
        orders.sort_unstable();
        orders.dedup();
        let top = *orders.last().ok_or_else(|| Error::InvalidArgument("no orders".into()))?;
        let count = (u_max / step).ceil() as usize + 2;
        let nmax = (u_max + 60.0 + 10.0 * u_max.cbrt()) as usize + top as usize + 2;
        let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..count)
            .into_par_iter()
            .map(|i| {
                let u = i as f64 * step;
                let seq = jn_sequence(nmax, u);
                let vals = orders
                    .iter()
                    .map(|&n| if u == 0.0 { 0.0 } else { primitive_from_sequence(n as usize, u, &seq) })
                    .collect();
                let slopes = orders.iter().map(|&n| u * seq[n as usize]).collect();
                (vals, slopes)
            })
            .collect();
        let mut values = vec![Vec::with_capacity(count); orders.len()];
        let mut slopes = vec![Vec::with_capacity(count); orders.len()];
        for (v, s) in rows {
            for o in 0..orders.len() {
                values[o].push(v[o]);
                slopes[o].push(s[o]);
            }
        }
        Ok(Self { orders, step, u_max: (count - 1) as f64 * step, values, slopes })
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    fn slot(&self, n: u32) -> Option<usize> {
        self.orders.binary_search(&n).ok()
    }

    /// `I_n(k)` for aperture radius `radius`. Falls back to the series when
    /// the order is not tabulated or `kR` lies outside the table.
    pub fn eval(&self, n: u32, k: f64, radius: f64) -> f64 {
        let k = k.abs();
        if k == 0.0 {
            return k_zero_limit(n, radius);
        }
        let u = k * radius;
        let slot = match self.slot(n) {
            Some(s) if u >= TABLE_SMALL_U && u < self.u_max => s,
            _ => return aperture_hankel_series(n, k, radius),
        };
        let pos = u / self.step;
        let i = (pos.floor() as usize).min(self.values[slot].len() - 2);
        let t = pos - i as f64;
        let (y0, y1) = (self.values[slot][i], self.values[slot][i + 1]);
        let (d0, d1) = (self.slopes[slot][i] * self.step, self.slopes[slot][i + 1] * self.step);
        let t2 = t * t;
        let t3 = t2 * t;
        let prim = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * d0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * d1;
        radius * radius * prim / (u * u)
    }
}

/// Root of `I_n(k) − I_m(k)` inside `bracket`, to relative tolerance 1e−8.
/// Illinois-style false position with bisection safeguards.
pub fn find_k_eq(n: u32, m: u32, radius: f64, bracket: (f64, f64)) -> Result<f64> {
    if n == m {
        return invalid("find_k_eq needs two distinct orders");
    }
    HankelIntegralParams::new(n.max(m), radius)?;
    let f = |k: f64| aperture_hankel_integral(n, k, radius) - aperture_hankel_integral(m, k, radius);
    find_root(f, bracket.0, bracket.1, 1e-10)
}

pub(crate) fn find_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> Result<f64> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa * fb < 0.0) {
        return Err(Error::NoSignChange { lo: a, hi: b });
    }
    let mut side = 0i8;
    for iter in 0..200 {
        let width = b - a;
        if width <= rel_tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        // alternate secant steps with bisection to guarantee shrinkage
        let mut c = if iter % 3 == 2 { 0.5 * (a + b) } else { (a * fb - b * fa) / (fb - fa) };
        if !(c > a && c < b) {
            c = 0.5 * (a + b);
        }
        let fc = f(c);
        if fc == 0.0 {
            return Ok(c);
        }
        if (fc < 0.0) == (fa < 0.0) {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}

/// Natural cubic spline through `(x, y)`.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    second: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if n < 3 || y.len() != n {
            return invalid("spline needs at least 3 points and matching lengths");
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return invalid("spline abscissae must be strictly increasing");
        }
        // tridiagonal solve for second derivatives, natural end conditions
        let mut second = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
            let rhs = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0) - h0 * d[i - 1];
            c[i] = h1 / diag;
            d[i] = rhs / diag;
        }
        for i in (1..n - 1).rev() {
            second[i] = d[i] - c[i] * second[i + 1];
        }
        Ok(Self { x: x.to_vec(), y: y.to_vec(), second })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let hi = self.x.partition_point(|&v| v < t).clamp(1, n - 1);
        let lo = hi - 1;
        let h = self.x[hi] - self.x[lo];
        let a = (self.x[hi] - t) / h;
        let b = (t - self.x[lo]) / h;
        a * self.y[lo]
            + b * self.y[hi]
            + ((a * a * a - a) * self.second[lo] + (b * b * b - b) * self.second[hi]) * h * h / 6.0
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }
}

/// Fraction of the peak the last table entry may still carry.
const TAIL_LIMIT: f64 = 1e-6;

fn check_table(k: &[f64], mags: &[f64]) -> Result<()> {
    if k.len() < 3 || mags.len() != k.len() {
        return invalid("hankel transform needs >= 3 samples with matching lengths");
    }
    if k[0] < 0.0 {
        return invalid("hankel transform table must start at k >= 0");
    }
    let peak = mags.iter().copied().fold(0.0, f64::max);
    if !(peak > 0.0 && peak.is_finite()) {
        return invalid("hankel transform of a zero or non-finite table");
    }
    let tail = mags[mags.len() - 1];
    if tail > TAIL_LIMIT * peak {
        return invalid(format!(
            "table does not decay: last value is {:.3e} of the peak (limit {TAIL_LIMIT:e})",
            tail / peak
        ));
    }
    Ok(())
}

fn transform_one(q: u32, spline: &CubicSpline, r: f64, tol: f64) -> f64 {
    let (k0, k1) = spline.domain();
    let span = k1 - k0;
    let panel = if r > 0.0 { (std::f64::consts::PI / r).min(span) } else { span };
    let panels = (span / panel).ceil().max(1.0) as usize;
    let w = span / panels as f64;
    let integrand = |k: f64| spline.eval(k) * jn(q, k * r) * k;
    (0..panels)
        .map(|p| {
            let a = k0 + p as f64 * w;
            adaptive(&integrand, a, a + w, tol / panels as f64, 30)
        })
        .sum()
}

fn raw_transform(q: u32, k: &[f64], g: &[f64], r: &[f64], tol: f64) -> Result<Vec<f64>> {
    let spline = CubicSpline::new(k, g)?;
    Ok(r.par_iter().map(|&ri| transform_one(q, &spline, ri, tol)).collect())
}

fn quad_tol(k: &[f64], peak: f64) -> f64 {
    let k1 = k[k.len() - 1];
    1e-12 * peak * k1 * k1
}

/// `h(r) ∝ ∫ g(k) J_q(kr) k dk` on the tabulated support, scaled so that
/// `max|h| = 1` over the requested radii.
pub fn inverse_hankel_transform(q: u32, k: &[f64], g: &[f64], r: &[f64]) -> Result<Vec<f64>> {
    let mags: Vec<f64> = g.iter().map(|v| v.abs()).collect();
    check_table(k, &mags)?;
    let peak = mags.iter().copied().fold(0.0, f64::max);
    let h = raw_transform(q, k, g, r, quad_tol(k, peak))?;
    let hmax = h.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if !(hmax > 0.0) {
        return Err(Error::Numeric("inverse hankel transform vanished on all radii".into()));
    }
    Ok(h.into_iter().map(|v| v / hmax).collect())
}

/// Complex table: real and imaginary parts are transformed separately and
/// normalized jointly (`max|h| = 1`).
pub fn inverse_hankel_transform_complex(
    q: u32,
    k: &[f64],
    g: &[Complex64],
    r: &[f64],
) -> Result<Vec<Complex64>> {
    let mags: Vec<f64> = g.iter().map(|v| v.norm()).collect();
    check_table(k, &mags)?;
    let peak = mags.iter().copied().fold(0.0, f64::max);
    let tol = quad_tol(k, peak);
    let re: Vec<f64> = g.iter().map(|v| v.re).collect();
    let im: Vec<f64> = g.iter().map(|v| v.im).collect();
    let hr = raw_transform(q, k, &re, r, tol)?;
    let hi = raw_transform(q, k, &im, r, tol)?;
    let h: Vec<Complex64> = hr.into_iter().zip(hi).map(|(a, b)| Complex64::new(a, b)).collect();
    let hmax = h.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if !(hmax > 0.0) {
        return Err(Error::Numeric("inverse hankel transform vanished on all radii".into()));
    }
    Ok(h.into_iter().map(|v| v / hmax).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn routes_agree() {
        for n in [0u32, 1, 3, 4, 7, 20] {
            for k in [0.3, 2.0, 3.43, 11.0, 40.0] {
                let a = aperture_hankel_integral(n, k, 1.85);
                let b = aperture_hankel_series(n, k, 1.85);
                assert!((a - b).abs() < 1e-11 * 1.85 * 1.85, "n={n} k={k}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn table_matches_series() {
        let t = ApertureHankelTable::new(&[0, 3, 4, 7], 120.0).unwrap();
        for n in [0u32, 3, 4, 7] {
            for k in [0.1, 0.9, 3.0, 17.77, 60.2] {
                let a = t.eval(n, k, 1.85);
                let b = aperture_hankel_series(n, k, 1.85);
                assert!((a - b).abs() < 1e-10, "n={n} k={k}: {a} vs {b}");
            }
        }
        // untabulated order and out-of-range u fall back to the series
        assert_eq!(t.eval(5, 2.0, 1.0), aperture_hankel_series(5, 2.0, 1.0));
        assert_eq!(t.eval(3, 200.0, 1.0), aperture_hankel_series(3, 200.0, 1.0));
    }

    #[test]
    fn spline_reproduces_cubic_interior() {
        let x: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|v| v.sin()).collect();
        let s = CubicSpline::new(&x, &y).unwrap();
        assert!((s.eval(2.345) - 2.345f64.sin()).abs() < 1e-5);
    }

    #[test]
    fn root_finder_reports_missing_sign_change() {
        assert!(matches!(
            find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-10),
            Err(Error::NoSignChange { .. })
        ));
        let r = find_root(|x| x.cos() - x, 0.0, 1.0, 1e-14).unwrap();
        assert!((r - 0.739_085_133_215_160_6).abs() < 1e-13);
    }
}
