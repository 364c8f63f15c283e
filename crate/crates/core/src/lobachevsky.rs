//! Milnor's Lobachevsky function `Л(x) = -∫₀ˣ log|2 sin t| dt`.
//!
//! Evaluated through the Clausen function, `Л(x) = Cl₂(2x) / 2`, after
//! reducing `x` to `[-π/2, π/2]`. On `|θ| ≤ π` the Clausen function has the
//! expansion
//!
//! ```text
//! Cl₂(θ) = θ - θ log|θ| + θ Σ_{k≥1} ζ(2k) / (k (2k+1)) · (θ / 2π)^{2k}
//! ```
//!
//! whose ratio `(θ/2π)² ≤ 1/4` gives full double precision in 40 terms.

use std::f64::consts::PI;
use std::sync::OnceLock;

const TERMS: usize = 40;

fn series_coefficients() -> &'static [f64; TERMS] {
    static COEFFS: OnceLock<[f64; TERMS]> = OnceLock::new();
    COEFFS.get_or_init(|| {
        std::array::from_fn(|i| {
            let k = i + 1;
            let zeta = match k {
                1 => PI * PI / 6.0,
                2 => PI.powi(4) / 90.0,
                _ => {
                    // tail after n = 2000 is below 2000^(1-2k) < 1e-16
                    let s: f64 = (2..=2000u32).rev().map(|n| (n as f64).powi(-2 * k as i32)).sum();
                    1.0 + s
                }
            };
            zeta / (k as f64 * (2 * k + 1) as f64)
        })
    })
}

/// Clausen function `Cl₂(θ) = Σ sin(nθ)/n²` for `|θ| ≤ π`.
fn clausen_reduced(theta: f64) -> f64 {
    if theta == 0.0 {
        return 0.0;
    }
    let a = theta.abs();
    let y = (a / (2.0 * PI)).powi(2);
    let c = series_coefficients();
    let mut poly = 0.0;
    for &ck in c.iter().rev() {
        poly = poly * y + ck;
    }
    let value = a - a * a.ln() + a * poly * y;
    value.copysign(theta)
}

/// Lobachevsky function. Odd and π-periodic; accurate to ~1e-15 absolute
/// for moderate arguments.
pub fn lobachevsky(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let r = x - PI * (x / PI).round();
    0.5 * clausen_reduced(2.0 * r)
}
