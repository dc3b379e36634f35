//! The Riemann–Siegel theta function, Gram points, and the scale quantities
//! `a = √(8t/π)`, `N_t = ⌊√(t/2π)⌋` shared by every evaluator.

use serde::Serialize;

use crate::error::{domain, numeric, Result};
use crate::xprec::{ln_dd, ExtendedReal, PI, PI_OVER_8, TWO_PI};

/// Index `n` of the Gram point `g_n` defined by `θ(g_n) = nπ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GramIndex(pub u64);

/// Scale quantities of the two series at height `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScaleSet {
    pub t: f64,
    /// `√(8t/π)`, the point where the odd-integer series starts.
    pub a: f64,
    /// Number of Riemann–Siegel main-sum terms, `⌊√(t/2π)⌋`.
    pub n_t: u64,
    /// `a − NINT_O(a)`.
    pub eps: f64,
    /// `|eps| < t^(−1/6)`.
    pub transition_zone: bool,
}

/// `√(8t/π)` as a two-word value.
pub fn a_ext(t: f64) -> ExtendedReal {
    (ExtendedReal::from_f64(8.0 * t) / PI).sqrt()
}

/// `√(t/2π)` as a two-word value.
pub fn sqrt_t_over_2pi(t: f64) -> ExtendedReal {
    (ExtendedReal::from_f64(t) / TWO_PI).sqrt()
}

/// The leading part `(t/2)·ln(t/2π) − t/2 − π/8` of θ in two-word form.
pub fn theta_leading_ext(t: f64) -> ExtendedReal {
    let l = ln_dd(ExtendedReal::from_f64(t) / TWO_PI);
    l.mul_f64(0.5 * t) - ExtendedReal::from_f64(0.5 * t) - PI_OVER_8
}

/// The four-term expansion of θ in two-word form (no domain check).
pub fn theta_ext(t: f64) -> ExtendedReal {
    let inv = 1.0 / t;
    let inv3 = inv * inv * inv;
    theta_leading_ext(t) + (inv / 48.0 + 7.0 * inv3 / 5760.0)
}

/// Riemann–Siegel theta function
/// `θ(t) ≈ (t/2)ln(t/2π) − t/2 − π/8 + 1/(48t) + 7/(5760t³)`.
///
/// The next term of the expansion is `31/(80640 t⁵)`, below 10⁻¹⁰ once `t > 10`.
///
/// ```
/// let th = zeta_core::theta_gram::theta(20.0).unwrap();
/// assert!(th > 0.0);
/// ```
pub fn theta(t: f64) -> Result<f64> {
    if !(t > 10.0) || !t.is_finite() {
        return Err(domain("theta", format!("expansion needs t > 10, got {t}")));
    }
    Ok(theta_ext(t).to_f64())
}

/// θ'(t) = ½ln(t/2π) − 1/(48t²) − 7/(1920t⁴).
pub fn theta_prime(t: f64) -> f64 {
    let inv2 = 1.0 / (t * t);
    0.5 * (t / TWO_PI.hi).ln() - inv2 / 48.0 - 7.0 * inv2 * inv2 / 1920.0
}

/// Solves `w·e^w = x` for `x ≥ 0` (principal branch).
fn lambert_w0(x: f64) -> f64 {
    let mut w = (1.0 + x).ln();
    for _ in 0..50 {
        let ew = w.exp();
        let f = w * ew - x;
        let step = f / (ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0));
        w -= step;
        if step.abs() <= 1e-15 * w.abs().max(1e-300) {
            break;
        }
    }
    w
}

/// Gram point `g_n`: the solution of `θ(t) = nπ` with `t > 17`.
///
/// The seed inverts the leading term `(t/2)ln(t/2πe) = (n + 1/8)π` through
/// Lambert's W; Newton steps on the two-word θ then converge quadratically.
pub fn gram_point(n: GramIndex) -> Result<f64> {
    let target = PI.mul_f64(n.0 as f64);
    let x = (n.0 as f64 + 0.125) / std::f64::consts::E;
    let mut t = 2.0 * std::f64::consts::PI * std::f64::consts::E * lambert_w0(x).exp();
    let tol = (target.hi.abs() * 1e-13).max(1e-9);
    for _ in 0..64 {
        let resid = (theta_ext(t) - target).to_f64();
        let step = resid / theta_prime(t);
        t -= step;
        if step.abs() <= 4.0 * f64::EPSILON * t {
            let final_resid = (theta_ext(t) - target).to_f64().abs();
            if final_resid <= tol {
                return Ok(t);
            }
        }
    }
    Err(numeric("gram_point", format!("Newton iteration did not converge for n = {}", n.0)))
}

/// Largest odd integer `≤ x`.
///
/// ```
/// use zeta_core::theta_gram::{odd_floor, odd_nearest};
/// assert_eq!(odd_floor(52.92).unwrap(), 51);
/// assert_eq!(odd_nearest(52.92).unwrap(), 53);
/// assert_eq!(odd_nearest(52.0).unwrap(), 53);
/// ```
pub fn odd_floor(x: f64) -> Result<u64> {
    if !(x >= 1.0) || !x.is_finite() {
        return Err(domain("odd_floor", format!("need x >= 1, got {x}")));
    }
    Ok(odd_floor_unchecked(x))
}

/// Odd integer nearest to `x`; an even integer `x` rounds up.
pub fn odd_nearest(x: f64) -> Result<u64> {
    if !(x >= 1.0) || !x.is_finite() {
        return Err(domain("odd_nearest", format!("need x >= 1, got {x}")));
    }
    Ok(odd_nearest_unchecked(x))
}

#[inline]
pub(crate) fn odd_floor_unchecked(x: f64) -> u64 {
    let n = x.floor() as u64;
    if n % 2 == 1 { n } else { n - 1 }
}

#[inline]
pub(crate) fn odd_nearest_unchecked(x: f64) -> u64 {
    let f = odd_floor_unchecked(x);
    if x - f as f64 >= 1.0 { f + 2 } else { f }
}

/// `⌊√(t/2π)⌋` with the square root taken in two-word precision, so that
/// `t` just above `2πN²` is not rounded down to `N − 1`.
pub fn n_t(t: f64) -> u64 {
    let s = sqrt_t_over_2pi(t);
    let f = s.hi.floor();
    if s.hi == f && s.lo < 0.0 { f as u64 - 1 } else { f as u64 }
}

/// All scale quantities at height `t > 30`.
pub fn scales(t: f64) -> Result<ScaleSet> {
    if !(t > 30.0) || !t.is_finite() {
        return Err(domain("scales", format!("need t > 30, got {t}")));
    }
    let a = a_ext(t).to_f64();
    let nint = odd_nearest_unchecked(a) as f64;
    let eps = a - nint;
    Ok(ScaleSet {
        t,
        a,
        n_t: n_t(t),
        eps,
        transition_zone: eps.abs() < t.powf(-1.0 / 6.0),
    })
}
