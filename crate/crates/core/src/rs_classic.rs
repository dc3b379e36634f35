//! The Riemann–Siegel formula: main sum, Ψ corrections and the full Z(t).

use std::f64::consts::PI as PI_F;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{range, Error, Result};
use crate::summation::{blocked_sum, default_workers};
use crate::theta_gram::{n_t, sqrt_t_over_2pi, theta_ext};
use crate::xprec::{ln_dd, reduce_ext, two_sum, ExtendedReal};

/// A full Riemann–Siegel evaluation of Z(t).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RsEvaluation {
    pub z: f64,
    pub main_sum: f64,
    pub correction: f64,
    pub n_t: u64,
    /// Fractional part of `√(t/2π)`.
    pub p: f64,
    pub order_m: u32,
    pub remainder_bound: f64,
}

/// `2·Σ_{N=n_lo}^{n_hi} cos(θ(t) − t·ln N)/√N` using the four-term θ.
///
/// An empty range (`n_lo > n_hi`) sums to zero. `n_hi` may not exceed
/// `⌊√(t/2π)⌋`.
pub fn rs_main_sum(t: f64, n_lo: u64, n_hi: u64) -> Result<f64> {
    rs_main_sum_with(t, n_lo, n_hi, default_workers())
}

/// [`rs_main_sum`] with an explicit worker count. The result does not depend
/// on `workers`.
pub fn rs_main_sum_with(t: f64, n_lo: u64, n_hi: u64, workers: usize) -> Result<f64> {
    if !(t > 30.0) || !t.is_finite() {
        return Err(crate::error::domain("rs_main_sum", format!("need t > 30, got {t}")));
    }
    if n_lo == 0 {
        return Err(crate::error::argument("rs_main_sum", "summation starts at N = 1"));
    }
    let nt = n_t(t);
    if n_hi > nt {
        return Err(range("rs_main_sum", format!("n_hi = {n_hi} exceeds N_t = {nt} at t = {t}")));
    }
    Ok(rs_partial_sum(t, theta_ext(t), n_lo, n_hi, workers))
}

/// `2·Σ_{N=n_lo}^{n_hi} cos(θ − t·ln N)/√N` for a caller-supplied phase
/// constant `θ`, without range checks.
///
/// The Gram-point error sweeps use this with the leading part of θ only.
pub fn rs_partial_sum(t: f64, theta: ExtendedReal, n_lo: u64, n_hi: u64, workers: usize) -> f64 {
    if n_lo > n_hi {
        return 0.0;
    }
    let n_terms = n_hi - n_lo + 1;
    let s = blocked_sum(n_terms, workers, |first, count| {
        let n0 = n_lo + first;
        let mut ln = IntegerLog::new(n0 as f64);
        let mut acc = ExtendedReal::ZERO;
        for n in n0..n0 + count {
            let nf = n as f64;
            let ln_n = ln.at(nf);
            let phase = reduce_ext(theta - ln_n.mul_f64(t));
            acc = acc.add_f64((phase.hi + phase.lo).cos() / nf.sqrt());
        }
        acc
    });
    2.0 * s.to_f64()
}

/// Two-word `ln N` for increasing integers `N`, from an anchor `N₀` and
/// `ln N = ln N₀ + 2·atanh(u)`, `u = (N − N₀)/(N + N₀)`.
///
/// Numerator and denominator of `u` are exact integers, so `u` itself is
/// obtained to two words with one division and one fused multiply-add. The
/// anchor moves once `u` exceeds 1/64; the series beyond `2u` is then below
/// `6·10⁻⁶` and carried in binary64 through `u¹³`, leaving a relative error
/// near `10⁻²²` in `ln N`.
struct IntegerLog {
    n0: f64,
    ln_n0: ExtendedReal,
}

impl IntegerLog {
    fn new(n0: f64) -> Self {
        IntegerLog { n0, ln_n0: ln_dd(ExtendedReal::from_f64(n0)) }
    }

    #[inline]
    fn at(&mut self, n: f64) -> ExtendedReal {
        let k = n - self.n0;
        let d = n + self.n0;
        if 64.0 * k > d {
            *self = IntegerLog::new(n);
            return self.ln_n0;
        }
        let uh = k / d;
        let ul = (-uh).mul_add(d, k) / d;
        let v2 = uh * uh;
        let tail = uh
            * v2
            * (2.0 / 3.0
                + v2 * (2.0 / 5.0 + v2 * (2.0 / 7.0 + v2 * (2.0 / 9.0 + v2 * (2.0 / 11.0 + v2 * (2.0 / 13.0))))));
        (self.ln_n0 + two_sum(2.0 * uh, 2.0 * ul)).add_f64(tail)
    }
}

// ---------------------------------------------------------------------------
// Ψ₀ and its derivatives

/// Number of Taylor coefficients carried for Ψ₀ (derivatives 0 through 6).
const JET: usize = 7;
type Jet = [f64; JET];

fn jet_mul(a: &Jet, b: &Jet) -> Jet {
    let mut c = [0.0; JET];
    for i in 0..JET {
        for j in 0..JET - i {
            c[i + j] += a[i] * b[j];
        }
    }
    c
}

fn jet_div(a: &Jet, b: &Jet) -> Jet {
    let mut q = [0.0; JET];
    for n in 0..JET {
        let mut s = a[n];
        for k in 1..=n {
            s -= b[k] * q[n - k];
        }
        q[n] = s / b[0];
    }
    q
}

/// `(cos f, sin f)` for a jet `f`.
fn jet_cos_sin(f: &Jet) -> (Jet, Jet) {
    let mut nil = *f;
    nil[0] = 0.0;
    // Powers of the nilpotent part; the seventh vanishes at this truncation.
    let mut c = [0.0; JET];
    let mut s = [0.0; JET];
    c[0] = 1.0;
    let mut pow = [0.0; JET];
    pow[0] = 1.0;
    let mut fact = 1.0;
    for k in 1..JET {
        pow = jet_mul(&pow, &nil);
        fact *= k as f64;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let target = if k % 2 == 0 { &mut c } else { &mut s };
        for i in 0..JET {
            target[i] += sign * pow[i] / fact;
        }
    }
    let (c0, s0) = (f[0].cos(), f[0].sin());
    let mut cos = [0.0; JET];
    let mut sin = [0.0; JET];
    for i in 0..JET {
        cos[i] = c0 * c[i] - s0 * s[i];
        sin[i] = s0 * c[i] + c0 * s[i];
    }
    (cos, sin)
}

/// Taylor coefficients of Ψ₀ at a point where `cos 2πp` is not small.
fn psi_jet_direct(p: f64) -> Jet {
    let two_pi = 2.0 * PI_F;
    let mut num_arg = [0.0; JET];
    num_arg[0] = two_pi * (p * p - p - 1.0 / 16.0);
    num_arg[1] = two_pi * (2.0 * p - 1.0);
    num_arg[2] = two_pi;
    let mut den_arg = [0.0; JET];
    den_arg[0] = two_pi * p;
    den_arg[1] = two_pi;
    let (num, _) = jet_cos_sin(&num_arg);
    let (den, _) = jet_cos_sin(&den_arg);
    jet_div(&num, &den)
}

/// Length of the local series used around the removable singularities.
const LOCAL_TERMS: usize = 32;
/// Half-width of the window around p = 1/4, 3/4 served by the local series.
const LOCAL_RADIUS: f64 = 0.1;

/// Coefficients of `sin(πH(1 + 2σH)) / sin(2πH)` in powers of `H`.
///
/// With `p = 1/4 + H` Ψ₀ equals this ratio for σ = −1, and with
/// `p = 3/4 + H` for σ = +1. Both numerator and denominator vanish at
/// `H = 0`, so each is divided by `H` before the series division.
fn local_series(sigma: f64) -> [f64; LOCAL_TERMS] {
    const L: usize = LOCAL_TERMS + 1;
    let mul = |a: &[f64; L], b: &[f64; L]| {
        let mut c = [0.0; L];
        for i in 0..L {
            if a[i] == 0.0 {
                continue;
            }
            for j in 0..L - i {
                c[i + j] += a[i] * b[j];
            }
        }
        c
    };
    let mut g = [0.0; L];
    g[1] = PI_F;
    g[2] = 2.0 * sigma * PI_F;
    let g2 = mul(&g, &g);
    // sin g = g − g³/3! + g⁵/5! − …; g^m starts at H^m.
    let mut sin_g = [0.0; L];
    let mut pow = g;
    let mut fact = 1.0;
    let mut k = 1;
    while k < L {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        for i in 0..L {
            sin_g[i] += sign * pow[i] / fact;
        }
        pow = mul(&pow, &g2);
        fact *= ((k + 1) * (k + 2)) as f64;
        k += 2;
    }
    let mut num = [0.0; LOCAL_TERMS];
    let mut den = [0.0; LOCAL_TERMS];
    num.copy_from_slice(&sin_g[1..]);
    let mut fact = 1.0;
    let mut pw = 2.0 * PI_F;
    for m in 0..LOCAL_TERMS / 2 {
        let k = 2 * m + 1;
        if m > 0 {
            fact *= ((k - 1) * k) as f64;
            pw *= 4.0 * PI_F * PI_F;
        }
        den[2 * m] = if m % 2 == 0 { pw / fact } else { -pw / fact };
    }
    let mut q = [0.0; LOCAL_TERMS];
    for n in 0..LOCAL_TERMS {
        let mut s = num[n];
        for k in 1..=n {
            s -= den[k] * q[n - k];
        }
        q[n] = s / den[0];
    }
    q
}

fn local_coefficients(sigma_plus: bool) -> &'static [f64; LOCAL_TERMS] {
    static QUARTER: OnceLock<[f64; LOCAL_TERMS]> = OnceLock::new();
    static THREE_QUARTERS: OnceLock<[f64; LOCAL_TERMS]> = OnceLock::new();
    if sigma_plus {
        THREE_QUARTERS.get_or_init(|| local_series(1.0))
    } else {
        QUARTER.get_or_init(|| local_series(-1.0))
    }
}

/// Re-expands the local series about `h0`, returning Taylor coefficients there.
fn local_jet(c: &[f64; LOCAL_TERMS], h0: f64) -> Jet {
    let mut out = [0.0; JET];
    for (k, slot) in out.iter_mut().enumerate() {
        // Σ_n C(n,k) c_n h0^(n−k), evaluated by Horner from the top.
        let mut acc = 0.0;
        for n in (k..LOCAL_TERMS).rev() {
            acc = acc * h0 + binomial(n, k) * c[n];
        }
        *slot = acc;
    }
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut b = 1.0;
    for i in 0..k {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    b
}

/// Taylor coefficients `Ψ₀⁽ᵏ⁾(p)/k!`, k = 0..6.
fn psi_jet(p: f64) -> Jet {
    let h_q = p - 0.25;
    let h_tq = p - 0.75;
    if h_q.abs() <= LOCAL_RADIUS {
        local_jet(local_coefficients(false), h_q)
    } else if h_tq.abs() <= LOCAL_RADIUS {
        local_jet(local_coefficients(true), h_tq)
    } else {
        psi_jet_direct(p)
    }
}

/// `k`-th derivative of Ψ₀ at `p` for `k ≤ 6`, from the analytic Taylor jet.
pub fn psi0_derivative(p: f64, k: usize) -> Result<f64> {
    if k >= JET {
        return Err(Error::UnsupportedOrder { op: "psi0_derivative", order: k as u32, max: (JET - 1) as u32 });
    }
    let j = psi_jet(p);
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    Ok(j[k] * fact)
}

/// Window around p = 1/4 and 3/4 inside which [`psi0`] uses a Taylor
/// polynomial instead of the 0/0 ratio. Five terms keep the truncation error
/// at the window edge near 10⁻¹⁶; three would leave about 1.6·10⁻¹².
pub const PSI0_TAYLOR_WINDOW: f64 = 1e-4;

/// `Ψ₀(p) = cos(2π(p² − p − 1/16)) / cos(2πp)`, continuous through its
/// removable singularities at p = 1/4 and 3/4.
///
/// ```
/// use zeta_core::rs_classic::psi0;
/// assert!((psi0(0.25) - 0.5).abs() < 1e-15);
/// assert!((psi0(0.0) - (std::f64::consts::PI / 8.0).cos()).abs() < 1e-15);
/// ```
pub fn psi0(p: f64) -> f64 {
    for (centre, plus) in [(0.25, false), (0.75, true)] {
        let h = p - centre;
        if h.abs() < PSI0_TAYLOR_WINDOW {
            let c = local_coefficients(plus);
            return c[0] + h * (c[1] + h * (c[2] + h * (c[3] + h * c[4])));
        }
    }
    // With u = p − 1/4 and v = p − 3/4 the ratio is sin(2πuv)/cos(2πp), and
    // cos(2πp) = −sin(2πu) = sin(2πv). Taking the sine of whichever of u, v
    // is smaller keeps the denominator accurate next to its zeros.
    let two_pi = 2.0 * PI_F;
    let (u, v) = (p - 0.25, p - 0.75);
    let num = (two_pi * u * v).sin();
    if u.abs() <= v.abs() { -num / (two_pi * u).sin() } else { num / (two_pi * v).sin() }
}

/// The first three Riemann–Siegel coefficients at `p`:
/// `C₀ = Ψ₀`, `C₁ = −Ψ₀‴/(96π²)`, `C₂ = Ψ₀″/(64π²) + Ψ₀⁽⁶⁾/(18432π⁴)`.
pub fn rs_coefficients(p: f64) -> [f64; 3] {
    let j = psi_jet(p);
    let pi2 = PI_F * PI_F;
    let d2 = 2.0 * j[2];
    let d3 = 6.0 * j[3];
    let d6 = 720.0 * j[6];
    [j[0], -d3 / (96.0 * pi2), d2 / (64.0 * pi2) + d6 / (18432.0 * pi2 * pi2)]
}

/// `N_t` and the fractional part `p` of `√(t/2π)`, both from the two-word root.
fn split_root(t: f64) -> (u64, f64) {
    let nt = n_t(t);
    let p = (sqrt_t_over_2pi(t) - nt as f64).to_f64();
    (nt, p.clamp(0.0, 1.0 - f64::EPSILON))
}

/// Correction term `(−1)^(N_t−1)(t/2π)^(−1/4)·Σ_{r≤m} C_r(p)(t/2π)^(−r/2)`.
pub fn rs_correction(t: f64, m: u32) -> Result<f64> {
    if m > 2 {
        return Err(Error::UnsupportedOrder { op: "rs_correction", order: m, max: 2 });
    }
    if !(t > 2.0 * PI_F) || !t.is_finite() {
        return Err(crate::error::domain("rs_correction", format!("need t > 2π, got {t}")));
    }
    let (nt, p) = split_root(t);
    let c = rs_coefficients(p);
    let x = t / (2.0 * PI_F);
    let u = 1.0 / x.sqrt();
    let mut s = 0.0;
    let mut w = 1.0;
    for cr in c.iter().take(m as usize + 1) {
        s += cr * w;
        w *= u;
    }
    let sign = if nt % 2 == 1 { 1.0 } else { -1.0 };
    Ok(sign * x.powf(-0.25) * s)
}

/// Published bound on the second-order remainder, valid for `t > 200`.
pub fn rs_remainder_bound(t: f64) -> f64 {
    0.011 * t.powf(-1.75)
}

/// Z(t) by the Riemann–Siegel formula with corrections through C₂.
pub fn rs_z(t: f64) -> Result<RsEvaluation> {
    rs_z_with(t, default_workers())
}

/// [`rs_z`] with an explicit worker count.
pub fn rs_z_with(t: f64, workers: usize) -> Result<RsEvaluation> {
    if !(t > 200.0) || !t.is_finite() {
        return Err(crate::error::domain("rs_z", format!("the remainder bound needs t > 200, got {t}")));
    }
    let (nt, p) = split_root(t);
    let main_sum = rs_main_sum_with(t, 1, nt, workers)?;
    let correction = rs_correction(t, 2)?;
    Ok(RsEvaluation {
        z: main_sum + correction,
        main_sum,
        correction,
        n_t: nt,
        p,
        order_m: 2,
        remainder_bound: rs_remainder_bound(t),
    })
}
