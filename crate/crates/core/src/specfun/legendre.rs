use crate::error::{invalid, Result};

/// Associated Legendre function `P_l^m(x)` with the Condon–Shortley phase,
/// so `P_1^1(x) = −√(1−x²)`. Negative `m` uses
/// `P_l^{−m} = (−1)^m (l−m)!/(l+m)! · P_l^m`.
pub fn assoc_legendre(l: u32, m: i32, x: f64) -> Result<f64> {
    if m.unsigned_abs() > l {
        return invalid(format!("|m| = {} exceeds l = {l}", m.unsigned_abs()));
    }
    if !(-1.0..=1.0).contains(&x) {
        return invalid(format!("legendre argument {x} outside [-1, 1]"));
    }
    let am = m.unsigned_abs();
    let p = legendre_nonneg(l, am, x);
    if m >= 0 {
        return Ok(p);
    }
    // (l−m)!/(l+m)! as a product, avoiding factorial overflow
    let mut ratio = 1.0;
    for i in (l - am + 1)..=(l + am) {
        ratio /= i as f64;
    }
    let sign = if am.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * ratio * p)
}

fn legendre_nonneg(l: u32, m: u32, x: f64) -> f64 {
    let s = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    // P_m^m = (−1)^m (2m−1)!! s^m
    let mut pmm = 1.0;
    for i in 1..=m {
        pmm *= -((2 * i - 1) as f64) * s;
    }
    if l == m {
        return pmm;
    }
    let mut prev = pmm;
    let mut cur = x * (2 * m + 1) as f64 * pmm;
    for ll in (m + 2)..=l {
        let next = ((2 * ll - 1) as f64 * x * cur - (ll + m - 1) as f64 * prev) / (ll - m) as f64;
        prev = cur;
        cur = next;
    }
    cur
}
