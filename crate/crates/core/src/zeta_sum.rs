//! The odd-integer zeta-sum: the bridge variable `pc(α)`, term phases and
//! amplitudes, the transition term near `α = a`, the Euler–Maclaurin tail and
//! the standalone estimate of Z(t) built from them.
//!
//! Every term lives on the scale of the Riemann–Siegel main sum: the generic
//! term is `2√2·cos Φ(α)/(α² − a²)^{1/4}`, so that a segment of this series
//! can be compared directly with a segment of `2·Σ cos(θ − t ln N)/√N`.

use std::f64::consts::{PI as PI_F, SQRT_2};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{argument, domain, Error, Result};
use crate::quad::integrate;
use crate::summation::{blocked_sum, default_workers};
use crate::theta_gram::{a_ext, odd_floor_unchecked};
use crate::xprec::{ln_dd, reduce_ext, reduce_phase, two_prod, ExtendedReal, PhaseAngle, PI, PI_OVER_8, TWO_PI};

/// `H(t) = 1 + 1/(32t²)`, the normalisation left over from the Euler integral.
#[inline]
pub fn h_factor(t: f64) -> f64 {
    1.0 + 1.0 / (32.0 * t * t)
}

/// `pc(α)` together with the intermediate quantities it is built from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PcValue {
    pub alpha: f64,
    /// `α/a`.
    pub rho: f64,
    pub pc: f64,
    /// `√(ρ² − 1)`.
    pub b: f64,
}

/// Per-`t` constants shared by every term of the series.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Frame {
    pub t: f64,
    pub a: ExtendedReal,
    a2: ExtendedReal,
    inv_a: ExtendedReal,
    inv_a2: ExtendedReal,
    /// `t/2 + π/8`.
    phase_offset: ExtendedReal,
}

/// Two-word `x = ρ + b = √pc`, its reciprocal `ρ − b`, and `b`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Root {
    pub x: ExtendedReal,
    pub y: ExtendedReal,
    pub b: ExtendedReal,
    pub rho: ExtendedReal,
    /// `α² − a²`.
    pub gap: ExtendedReal,
}

impl Frame {
    pub fn new(t: f64) -> Frame {
        let a = a_ext(t);
        let a2 = ExtendedReal::from_f64(8.0 * t) / PI;
        Frame {
            t,
            a,
            a2,
            inv_a: a.recip(),
            inv_a2: a2.recip(),
            phase_offset: ExtendedReal::from_f64(0.5 * t) + PI_OVER_8,
        }
    }

    /// Roots for `α ≥ a`; a slightly negative `α² − a²` from rounding is
    /// clamped to zero.
    #[inline]
    pub fn root(&self, alpha: f64) -> Root {
        let mut gap = two_prod(alpha, alpha) - self.a2;
        if gap.hi < 0.0 {
            gap = ExtendedReal::ZERO;
        }
        let b = (gap * self.inv_a2).sqrt();
        let rho = self.inv_a.mul_f64(alpha);
        Root { x: rho + b, y: rho - b, b, rho, gap }
    }

    /// `t·ln x + (t/2)/x² + t/2 + π/8`, unreduced, with `ln x` supplied.
    #[inline]
    pub fn phase_from(&self, ln_x: ExtendedReal, y: ExtendedReal) -> ExtendedReal {
        ln_x.mul_f64(self.t) + y.square().mul_f64(0.5 * self.t) + self.phase_offset
    }

    /// Generic term `2√2·cos Φ/(α² − a²)^{1/4}` given the root and `ln x`.
    #[inline]
    pub fn term(&self, r: &Root, ln_x: ExtendedReal) -> f64 {
        let ph = reduce_ext(self.phase_from(ln_x, r.y));
        let amp = 2.0 * SQRT_2 / r.gap.to_f64().sqrt().sqrt();
        amp * (ph.hi + ph.lo).cos()
    }
}

fn check_alpha(op: &'static str, alpha: f64, t: f64, a: f64, strict: bool) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() || !alpha.is_finite() {
        return Err(domain(op, format!("need finite t > 0 and α, got t = {t}, α = {alpha}")));
    }
    let bad = if strict { alpha <= a } else { alpha < a };
    if bad {
        let rel = if strict { "> a" } else { ">= a" };
        return Err(domain(op, format!("need α {rel} = {a:.6}, got α = {alpha}")));
    }
    Ok(())
}

/// `pc(α) = (πα²/4t) − 1 + (πα²/4t)(1 − a²/α²)^{1/2}` for `α ≥ a`.
///
/// ```
/// use zeta_core::zeta_sum::pc_of_alpha;
/// let t = 1e6_f64;
/// let v = pc_of_alpha(3.0 * (t / std::f64::consts::PI).sqrt(), t).unwrap();
/// assert!((v.pc - 2.0).abs() < 1e-12);
/// ```
pub fn pc_of_alpha(alpha: f64, t: f64) -> Result<PcValue> {
    let f = Frame::new(t);
    check_alpha("pc_of_alpha", alpha, t, f.a.to_f64(), false)?;
    let r = f.root(alpha);
    Ok(PcValue { alpha, rho: r.rho.to_f64(), pc: r.x.square().to_f64(), b: r.b.to_f64() })
}

fn phase_budget(t: f64, ln_x: f64) -> f64 {
    // A dozen two-word operations on quantities no larger than t·(ln x + 1).
    12.0 * 4.93e-32 * t * (ln_x.abs() + 1.5)
}

/// Phase `t·[b(b − ρ) + ln(b + ρ)] + t + π/8` of the generic term, reduced
/// modulo 2π.
pub fn term_phase(alpha: f64, t: f64) -> Result<PhaseAngle> {
    let f = Frame::new(t);
    check_alpha("term_phase", alpha, t, f.a.to_f64(), true)?;
    let r = f.root(alpha);
    let ln_x = ln_dd(r.x);
    let bracket = r.b * (r.b - r.rho) + ln_x;
    let raw = bracket.mul_f64(t) + ExtendedReal::from_f64(t) + PI_OVER_8;
    Ok(reduce_phase(raw, phase_budget(t, ln_x.hi)))
}

/// The same phase written through pc: `(t/2)(ln pc + 1/pc) + t/2 + π/8`.
pub fn term_phase_pc_form(alpha: f64, t: f64) -> Result<PhaseAngle> {
    let f = Frame::new(t);
    check_alpha("term_phase_pc_form", alpha, t, f.a.to_f64(), true)?;
    let r = f.root(alpha);
    let pc = r.x.square();
    let raw = (ln_dd(pc) + pc.recip()).mul_f64(0.5 * t) + f.phase_offset;
    Ok(reduce_phase(raw, phase_budget(t, 0.5 * pc.hi.ln())))
}

/// Amplitude `2√2·(α² − a²)^{−1/4}` of the generic term.
pub fn term_amplitude(alpha: f64, t: f64) -> Result<f64> {
    let f = Frame::new(t);
    check_alpha("term_amplitude", alpha, t, f.a.to_f64(), true)?;
    let gap = f.root(alpha).gap.to_f64();
    if gap <= 0.0 {
        return Err(domain("term_amplitude", "α² − a² rounds to zero; use the transition term"));
    }
    Ok(2.0 * SQRT_2 / gap.sqrt().sqrt())
}

/// One generic term `2√2·cos Φ(α)/(α² − a²)^{1/4}`.
pub fn generic_term(alpha: f64, t: f64) -> Result<f64> {
    let amp = term_amplitude(alpha, t)?;
    Ok(amp * term_phase(alpha, t)?.value.cos())
}

/// Sum of generic terms over odd `α ∈ [alpha_lo, alpha_hi]`.
///
/// `alpha_lo > alpha_hi` sums to zero. Both bounds must be odd and
/// `alpha_lo` must exceed `a`.
pub fn ms_sum(t: f64, alpha_lo: u64, alpha_hi: u64) -> Result<f64> {
    ms_sum_with(t, alpha_lo, alpha_hi, default_workers())
}

/// [`ms_sum`] with an explicit worker count; the result is independent of it.
pub fn ms_sum_with(t: f64, alpha_lo: u64, alpha_hi: u64, workers: usize) -> Result<f64> {
    if alpha_lo % 2 == 0 || alpha_hi % 2 == 0 {
        return Err(argument("ms_sum", format!("bounds must be odd, got [{alpha_lo}, {alpha_hi}]")));
    }
    let f = Frame::new(t);
    check_alpha("ms_sum", alpha_lo as f64, t, f.a.to_f64(), true)?;
    Ok(ms_sum_frame(&f, alpha_lo, alpha_hi, workers))
}

pub(crate) fn ms_sum_frame(f: &Frame, alpha_lo: u64, alpha_hi: u64, workers: usize) -> f64 {
    if alpha_lo > alpha_hi {
        return 0.0;
    }
    let n_terms = (alpha_hi - alpha_lo) / 2 + 1;
    blocked_sum(n_terms, workers, |first, count| {
        let mut acc = ExtendedReal::ZERO;
        let mut k = 0;
        while k < count {
            let len = ANCHOR_STRIDE.min(count - k);
            acc = acc + f.run(alpha_lo + 2 * (first + k), len);
            k += len;
        }
        acc
    })
    .to_f64()
}

/// Terms between two-word re-anchorings of the phase in [`Frame::run`].
const ANCHOR_STRIDE: u64 = 32;

/// Below this `pc − 1` every term is evaluated in full two-word arithmetic.
const STEEP_PC: f64 = 0.25;

const INV_TWO_PI: f64 = 0.5 / PI_F;

impl Frame {
    /// Full two-word evaluation of one term.
    #[inline]
    fn term_exact(&self, alpha: f64) -> f64 {
        let r = self.root(alpha);
        self.term(&r, ln_dd(r.x))
    }

    /// Sum of `len` consecutive terms starting at odd `alpha0`.
    ///
    /// The first term's phase is computed in two words. Each later phase is
    /// that value plus an increment `D` formed in binary64 from
    /// `z = x/x₀ − 1`, which is obtained without cancellation from
    /// `x − x₀ = Δα/a + Δα(α + α₀)/(a²(b + b₀))`:
    /// `D = t·[ln(1 + z) − z(2 + z)/(2pc₀(1 + z)²)]`.
    /// With at most 32 terms per anchor, `|D|` stays small enough that its
    /// rounding error is below 10⁻⁹ rad once `pc₀ − 1 ≥ 1/4`; closer to `a`
    /// every term is done in two words.
    fn run(&self, alpha0: u64, len: u64) -> ExtendedReal {
        let a0 = alpha0 as f64;
        let r0 = self.root(a0);
        let pc0 = r0.x.square().to_f64();
        if pc0 - 1.0 < STEEP_PC {
            let mut acc = ExtendedReal::ZERO;
            for k in 0..len {
                acc = acc.add_f64(self.term_exact((alpha0 + 2 * k) as f64));
            }
            return acc;
        }
        let ph0 = reduce_ext(self.phase_from(ln_dd(r0.x), r0.y));
        let gap0 = r0.gap.to_f64();
        let b0 = r0.b.to_f64();
        let x0 = r0.x.to_f64();
        let inv_a = self.inv_a.to_f64();
        let inv_a2 = self.inv_a2.to_f64();
        let half_over_pc0 = 0.5 / pc0;
        let amp_scale = 2.0 * SQRT_2;
        let mut acc = ExtendedReal::from_f64(amp_scale / gap0.sqrt().sqrt() * (ph0.hi + ph0.lo).cos());
        for k in 1..len {
            let d_alpha = (2 * k) as f64;
            let d_gap = d_alpha * (a0 + a0 + d_alpha);
            let sg = (gap0 + d_gap).sqrt();
            let b = sg * inv_a;
            let z = (inv_a * d_alpha + d_gap * inv_a2 / (b + b0)) / x0;
            let zp1 = 1.0 + z;
            let d = self.t * (z.ln_1p() - z * (2.0 + z) * half_over_pc0 / (zp1 * zp1));
            let turns = (d * INV_TWO_PI).round();
            let r = (-turns).mul_add(TWO_PI.hi, d);
            let angle = (ph0.hi + r) + (ph0.lo - turns * TWO_PI.lo);
            acc = acc.add_f64(amp_scale / sg.sqrt() * angle.cos());
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Transition term

/// How the term nearest to `a` is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionRegime {
    /// `ϱ ∈ [0, 0.25]`: the two-term closed form.
    ClosedForm,
    /// `ϱ ∈ (−1, 0) ∪ (0.25, 1)`: contour quadrature of the Euler integral.
    Numeric,
    /// `|ϱ| ≥ 1`: no special treatment.
    None,
}

/// Offsets below this (in units of `t^{−1/6}`) count as `a` sitting exactly
/// on the odd integer.
const ON_INTEGER: f64 = 1e-7;

/// Position of an odd integer relative to `a` in transition units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransitionParams {
    pub alpha: f64,
    /// `ε = α − a`, so that the term sits at `α = a + ε`.
    pub eps: f64,
    /// `ϱ = ε·t^{1/6}`.
    pub varrho: f64,
    pub regime: TransitionRegime,
}

/// Classifies `ϱ` into a transition regime.
pub fn regime_of(varrho: f64) -> TransitionRegime {
    if varrho.abs() <= ON_INTEGER || (0.0..=0.25).contains(&varrho) {
        TransitionRegime::ClosedForm
    } else if varrho.abs() < 1.0 {
        TransitionRegime::Numeric
    } else {
        TransitionRegime::None
    }
}

/// Transition parameters of the odd integer `alpha` at height `t`.
pub fn transition_params(t: f64, alpha: f64) -> TransitionParams {
    let eps = (ExtendedReal::from_f64(alpha) - a_ext(t)).to_f64();
    let varrho = eps * t.powf(1.0 / 6.0);
    TransitionParams { alpha, eps, varrho, regime: regime_of(varrho) }
}

const GAMMA_ONE_THIRD: f64 = 2.678938534707747633;
const GAMMA_TWO_THIRDS: f64 = 1.354117939426400417;

/// Two-term closed form of the transition term for `ϱ ∈ [0, 0.25]`,
/// including the factor `H(t)`.
///
/// At `ϱ = 0` its envelope is `2^{3/4}Γ(1/3)/(3^{2/3}π^{1/4})·t^{−1/12}`.
pub fn transition_term(t: f64, varrho: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain("transition_term", format!("need finite t > 0, got {t}")));
    }
    if !(-ON_INTEGER..=0.25).contains(&varrho) {
        return Err(Error::Regime {
            op: "transition_term",
            detail: format!("ϱ = {varrho} outside [0, 0.25]; use the numerical transition term"),
        });
    }
    let r = varrho.max(0.0);
    let decay = (-(32.0 * PI_F.powi(3)).powf(0.25) * r.powf(1.5) / 3.0).exp();
    let pref = h_factor(t) * 2f64.powf(0.75) * decay / (3f64.powf(2.0 / 3.0) * PI_F.powf(0.25) * t.powf(1.0 / 12.0));
    let shift = (PI_F / 2.0).sqrt() * t.powf(1.0 / 3.0) * r;
    let base = ExtendedReal::from_f64(t).add_f64(shift);
    let pi_24 = PI_F / 24.0;
    let c1 = reduce_ext(base.add_f64(pi_24)).to_f64().cos();
    let c2 = reduce_ext(base.add_f64(-pi_24)).to_f64().cos();
    Ok(pref * (GAMMA_ONE_THIRD * c1 + GAMMA_TWO_THIRDS * 3f64.cbrt() * PI_F.sqrt() * r * c2))
}

/// Principal `ln(1 + z)` for complex `z`, accurate when `z` is small.
fn clog1p(z: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * z.re + z.re * z.re + z.im * z.im).ln_1p();
    let im = z.im.atan2(1.0 + z.re);
    Complex64::new(re, im)
}

/// Integrand of the Euler integral `B` relative to its value at the real
/// reference point `w_ref`:
/// `exp(i[A(1/(w+1) − 1/(w_ref+1)) + (t/2)Log(w/w_ref)]) / (w^{1/4}(w+1)^{3/2})`.
struct EulerIntegrand {
    big_a: f64,
    half_t: f64,
    w_ref: f64,
}

impl EulerIntegrand {
    #[inline]
    fn eval(&self, w: Complex64) -> Complex64 {
        let dw = w - self.w_ref;
        let wp1 = w + 1.0;
        let frac = -dw / (wp1 * (self.w_ref + 1.0));
        let lg = clog1p(dw / self.w_ref);
        let expo = Complex64::i() * (frac * self.big_a + lg * self.half_t);
        let denom = (w.ln() * 0.25).exp() * (wp1.ln() * 1.5).exp();
        expo.exp() / denom
    }
}

/// The contour pieces prescribed for `B`: an optional straight segment
/// followed by the ray `w = w_line + u·e^{iπ/4}`, `u ≥ u_start`.
struct Contour {
    segment: Option<(Complex64, Complex64)>,
    w_line: Complex64,
    u_start: f64,
    w_ref: f64,
}

fn contour(rho: f64, pc: f64) -> Contour {
    if rho >= 1.0 {
        if pc <= SQRT_2 {
            let u2 = (-SQRT_2 * pc + (4.0 - 2.0 * pc * pc).sqrt()) / 2.0;
            Contour { segment: None, w_line: Complex64::new(pc, 0.0), u_start: u2, w_ref: pc }
        } else {
            let p1 = Complex64::new((pc - 1.0) / 2.0, -(pc + 1.0) / 2.0);
            Contour {
                segment: Some((Complex64::new(0.0, -1.0), p1)),
                w_line: Complex64::new(pc, 0.0),
                u_start: -(pc + 1.0) / SQRT_2,
                w_ref: pc,
            }
        }
    } else {
        let c = 2.0 * rho * rho - 1.0;
        let phi = if c <= 0.0 { PI_F / 2.0 } else { c.min(1.0).acos() };
        Contour { segment: None, w_line: Complex64::from_polar(1.0, phi), u_start: 0.0, w_ref: 1.0 }
    }
}

/// Transition contribution of the term at `α = a + eps`, computed by
/// quadrature of the Euler integral along the prescribed contours. The
/// result includes `H(t)` and is on the same scale as
/// `H·term_amplitude·cos(term_phase)`, which it reproduces when `α` is well
/// above `a`.
///
/// Valid for any real `α > 0`; for non-odd `α` the factor `e^{iπα²/4}` of the
/// Euler integral is replaced by its odd-integer value `e^{iπ/4}` so the
/// result varies smoothly with `eps`.
pub fn transition_numeric(t: f64, eps: f64) -> Result<f64> {
    if !(t > 30.0) || !t.is_finite() || !eps.is_finite() {
        return Err(domain("transition_numeric", format!("need t > 30 and finite ε, got t = {t}, ε = {eps}")));
    }
    let frame = Frame::new(t);
    let alpha_ext = frame.a.add_f64(eps);
    let alpha = alpha_ext.to_f64();
    if !(alpha > 0.0) {
        return Err(domain("transition_numeric", format!("α = a + ε must be positive, got {alpha}")));
    }
    let rho_ext = alpha_ext * frame.inv_a;
    let rho = rho_ext.to_f64();
    let pc = if rho >= 1.0 {
        let b = (rho_ext.square() - 1.0).sqrt();
        (rho_ext + b).square().to_f64()
    } else {
        1.0
    };
    let c = contour(rho, pc);
    let big_a_ext = PI * alpha_ext.square() * 0.25;
    let g = EulerIntegrand { big_a: big_a_ext.to_f64(), half_t: 0.5 * t, w_ref: c.w_ref };

    // Natural width of the saddle region: t^{-1/3} at the cubic saddle, and
    // narrower (t^{-1/2}) once pc moves away from 1.
    let s = t.powf(-1.0 / 3.0);
    let dir = Complex64::from_polar(1.0, PI_F / 4.0);
    let on_line = |u: f64| g.eval(c.w_line + dir * u) * dir;

    let mut peak = on_line(c.u_start).norm().max(on_line(c.u_start.max(0.0)).norm());
    let mut breaks = vec![c.u_start];
    if c.u_start < 0.0 {
        let mut neg: Vec<f64> = Vec::new();
        let mut u = -0.5 * s;
        while u > c.u_start {
            neg.push(u);
            u *= 2.0;
        }
        breaks.extend(neg.into_iter().rev());
        breaks.push(0.0);
    }
    let mut u = c.u_start.max(0.0) + 0.5 * s;
    let mut quiet = 0;
    while u < 1e4 {
        breaks.push(u);
        let m = on_line(u).norm();
        peak = peak.max(m);
        if m < 1e-17 * peak {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
        u = c.u_start.max(0.0) + 2.0 * (u - c.u_start.max(0.0));
    }
    let abs_tol = 1e-15 * peak * s;
    let mut total = integrate(on_line, &breaks, 1e-10, abs_tol, 4000, 1e-4)?.value;
    if let Some((w0, w1)) = c.segment {
        let d = w1 - w0;
        let seg = |v: f64| g.eval(w0 + d * v) * d;
        total += integrate(seg, &[0.0, 0.25, 0.5, 0.75, 1.0], 1e-10, abs_tol, 4000, 1e-4)?.value;
    }

    // B = e^{iψ}·J with ψ = A/(w_ref + 1) + (t/2)·ln w_ref, and
    // Re[e^{−iπ/8}(B + e^{iπ/4}·conj B)] = 2·Re[e^{i(ψ − π/8)}·J].
    let psi = big_a_ext / (c.w_ref + 1.0) + ln_dd(ExtendedReal::from_f64(c.w_ref)).mul_f64(0.5 * t);
    let angle = reduce_ext(psi - PI_OVER_8).to_f64();
    let re = (Complex64::from_polar(1.0, angle) * total).re;
    Ok(h_factor(t) * (PI_F / 2.0).powf(0.25) * alpha / t.powf(0.25) * re)
}

// ---------------------------------------------------------------------------
// Euler–Maclaurin tail

/// The Euler–Maclaurin continuation of the series beyond `K − 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EmTail {
    pub k: u64,
    pub l: u32,
    pub bern_sum: f64,
    /// `f(pc(K))/2`.
    pub half_term: f64,
    pub integral_i: f64,
    pub tail: f64,
}

/// Largest Bernoulli order accepted by [`em_tail`].
pub const MAX_BERNOULLI_ORDER: u32 = 60;

/// `ζ(2j)` for `j ≥ 1` by a short Euler–Maclaurin evaluation.
pub fn zeta_even(j: u32) -> f64 {
    let s = 2.0 * j as f64;
    const N: u32 = 20;
    let mut sum = 0.0;
    for n in (1..N).rev() {
        sum += (n as f64).powf(-s);
    }
    let nf = N as f64;
    let head = nf.powf(-s);
    // ∫_N^∞ x^{-s} dx + N^{-s}/2 + Σ B_{2k}/(2k)!·s(s+1)…(s+2k−2)·N^{-s-2k+1}
    let mut tail = nf * head / (s - 1.0) + 0.5 * head;
    let b = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0];
    let mut rising = s;
    let mut fact = 2.0;
    let mut pow = head / nf;
    for (k, bk) in b.iter().enumerate() {
        tail += bk / fact * rising * pow;
        let k2 = 2.0 * (k + 1) as f64;
        rising *= (s + k2 - 1.0) * (s + k2);
        fact *= (k2 + 1.0) * (k2 + 2.0);
        pow /= nf * nf;
    }
    sum + tail
}

/// Euler–Maclaurin tail at the odd cut `K` with `l` Bernoulli terms.
///
/// Uses the leading-order closed form for the odd derivatives of the term
/// function, and `|B_{2j}|/(2j)! = 2ζ(2j)/(2π)^{2j}`.
pub fn em_tail(t: f64, k: u64, l: u32) -> Result<EmTail> {
    if !(t > 30.0) || !t.is_finite() {
        return Err(domain("em_tail", format!("need t > 30, got {t}")));
    }
    if k % 2 == 0 {
        return Err(argument("em_tail", format!("K must be odd, got {k}")));
    }
    if l > MAX_BERNOULLI_ORDER {
        return Err(argument("em_tail", format!("Bernoulli order {l} exceeds {MAX_BERNOULLI_ORDER}")));
    }
    let floor = odd_floor_unchecked(t / PI_F) + 2;
    if k < floor {
        return Err(Error::Precondition {
            op: "em_tail",
            detail: format!("K = {k} is below the convergence floor odd_floor(t/π) + 2 = {floor}"),
        });
    }
    let f = Frame::new(t);
    let kf = k as f64;
    let r = f.root(kf);
    let pc = r.x.square().to_f64();
    let phase = reduce_ext(f.phase_from(ln_dd(r.x), r.y)).to_f64();
    let (sin_p, cos_p) = phase.sin_cos();
    let sq = (pc - 1.0).sqrt();
    let integral_i = -sin_p / (PI_F.powf(0.25) * sq) * (pc / (2.0 * t)).powf(0.75);
    let half_term = 0.5 * cos_p / r.gap.to_f64().sqrt().sqrt();
    let ratio = t / (2.0 * PI_F * pc);
    let mut series = 0.0;
    let mut pw = 1.0;
    for j in 1..=l {
        pw *= ratio;
        series += pw * 2.0 * zeta_even(j);
    }
    let bern_sum = pc.powf(0.75) * sin_p / ((2.0 * t).powf(0.75) * PI_F.powf(0.25) * sq) * series;
    Ok(EmTail { k, l, bern_sum, half_term, integral_i, tail: integral_i + bern_sum + half_term })
}

// ---------------------------------------------------------------------------
// Standalone estimate of Z(t)

/// Where the main sum of the standalone estimate stops.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KPolicy {
    /// `N_α = odd_floor(0.35t) + 2`.
    Paper035t,
    /// `N_α = odd_floor(t/2) + 2`, for a faster-converging Bernoulli sum.
    HalfT,
    /// `N_α = odd_floor(2t/π − a)`.
    DoubleMin,
}

impl KPolicy {
    pub fn n_alpha(self, t: f64, a: f64) -> u64 {
        match self {
            KPolicy::Paper035t => odd_floor_unchecked(0.35 * t) + 2,
            KPolicy::HalfT => odd_floor_unchecked(0.5 * t) + 2,
            KPolicy::DoubleMin => odd_floor_unchecked(2.0 * t / PI_F - a),
        }
    }
}

/// How a term next to `a` was (or is to be) evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TermMethod {
    Generic,
    ClosedForm,
    Numeric,
    Skip,
}

/// Rule deciding how the two terms either side of `a` are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionPolicy {
    /// By [`regime_of`]`(ϱ)`; terms below `a` always go through quadrature.
    Regime,
    /// Closed form when `|α − a| < t^{−1/2}`, quadrature when `α < a` or
    /// `α − a < t^{−1/6}`, generic otherwise. These are the distance rules
    /// used for the published table of standalone estimates.
    TableFootnote,
}

/// Options for [`z_newsum_with`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NewSumOptions {
    pub k_policy: KPolicy,
    pub transition_policy: TransitionPolicy,
    pub bernoulli_terms: u32,
    /// Forced evaluation methods for particular odd `α` next to `a`.
    pub overrides: Vec<(u64, TermMethod)>,
    pub workers: usize,
}

impl NewSumOptions {
    pub fn new(k_policy: KPolicy) -> Self {
        NewSumOptions {
            k_policy,
            transition_policy: TransitionPolicy::Regime,
            bernoulli_terms: DEFAULT_BERNOULLI_TERMS, overrides: Vec::new(), workers: default_workers() }
    }
}

/// Bernoulli terms used unless overridden.
pub const DEFAULT_BERNOULLI_TERMS: u32 = 30;

/// A term next to `a` that was not taken from the generic formula alone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpecialTerm {
    pub alpha: u64,
    pub varrho: f64,
    pub method: TermMethod,
    /// Contribution on the main-sum scale (divided by `2√2·H`).
    pub value: f64,
}

/// Every column of the standalone estimate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NewSumEvaluation {
    pub t: f64,
    pub a: f64,
    pub z: f64,
    /// `Σ f(α)` with `f = cos Φ/(α² − a²)^{1/4}`, special terms included.
    pub main_sum: f64,
    pub bern_sum: f64,
    pub half_term: f64,
    pub integral_i: f64,
    pub alpha_first: u64,
    pub n_alpha: u64,
    pub k: u64,
    pub special_terms: Vec<SpecialTerm>,
}

/// Standalone estimate `Z ≈ H·2√2·(main sum + I + Bernoulli sum + f(pc(K))/2)`.
pub fn z_newsum(t: f64, k_policy: KPolicy) -> Result<NewSumEvaluation> {
    z_newsum_with(t, &NewSumOptions::new(k_policy))
}

fn default_method(t: f64, p: &TransitionParams, policy: TransitionPolicy) -> TermMethod {
    if policy == TransitionPolicy::TableFootnote {
        return if p.eps.abs() < t.powf(-0.5) {
            TermMethod::ClosedForm
        } else if p.eps < 0.0 || p.eps < t.powf(-1.0 / 6.0) {
            TermMethod::Numeric
        } else {
            TermMethod::Generic
        };
    }
    match regime_of(p.varrho) {
        TransitionRegime::ClosedForm => TermMethod::ClosedForm,
        TransitionRegime::Numeric => TermMethod::Numeric,
        TransitionRegime::None if p.varrho < 0.0 => TermMethod::Numeric,
        TransitionRegime::None => TermMethod::Generic,
    }
}

/// Value of the term at odd `alpha` on the main-sum scale.
pub(crate) fn special_value(t: f64, p: &TransitionParams, method: TermMethod) -> Result<f64> {
    let scale = 2.0 * SQRT_2 * h_factor(t);
    match method {
        TermMethod::Skip => Ok(0.0),
        TermMethod::Generic => Ok(generic_term(p.alpha, t)? / (2.0 * SQRT_2)),
        TermMethod::ClosedForm => Ok(transition_term(t, p.varrho)? / scale),
        TermMethod::Numeric => Ok(transition_numeric(t, p.eps)? / scale),
    }
}

/// [`z_newsum`] with explicit options.
pub fn z_newsum_with(t: f64, opts: &NewSumOptions) -> Result<NewSumEvaluation> {
    if !(t > 200.0) || !t.is_finite() {
        return Err(domain("z_newsum", format!("need t > 200, got {t}")));
    }
    let frame = Frame::new(t);
    let a = frame.a.to_f64();
    let n_alpha = opts.k_policy.n_alpha(t, a);
    let k = n_alpha + 2;
    let tail = em_tail(t, k, opts.bernoulli_terms)?;

    let below = odd_floor_unchecked(a);
    let mut special_terms = Vec::new();
    let mut main = 0.0;
    for alpha in [below, below + 2] {
        let p = transition_params(t, alpha as f64);
        let method = opts
            .overrides
            .iter()
            .find(|(al, _)| *al == alpha)
            .map(|(_, m)| *m)
            .unwrap_or_else(|| default_method(t, &p, opts.transition_policy));
        let value = special_value(t, &p, method)?;
        main += value;
        special_terms.push(SpecialTerm { alpha, varrho: p.varrho, method, value });
    }
    let generic = ms_sum_frame(&frame, below + 4, n_alpha, opts.workers) / (2.0 * SQRT_2);
    main += generic;
    let alpha_first =
        special_terms.iter().find(|s| s.method != TermMethod::Skip).map(|s| s.alpha).unwrap_or(below + 4);
    let total = main + tail.integral_i + tail.bern_sum + tail.half_term;
    Ok(NewSumEvaluation {
        t,
        a,
        z: h_factor(t) * 2.0 * SQRT_2 * total,
        main_sum: main,
        bern_sum: tail.bern_sum,
        half_term: tail.half_term,
        integral_i: tail.integral_i,
        alpha_first,
        n_alpha,
        k,
        special_terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pc_at_a_is_one() {
        let t = 1e5;
        let a = a_ext(t).to_f64();
        let v = pc_of_alpha(a, t).unwrap();
        assert!((v.pc - 1.0).abs() < 1e-7 && v.b < 1e-4);
        assert!(pc_of_alpha(a - 1.0, t).is_err());
    }

    #[test]
    fn pc_large_alpha_asymptote() {
        let t = 1e6;
        let alpha = 1e3 * a_ext(t).to_f64();
        let pc = pc_of_alpha(alpha, t).unwrap().pc;
        assert!((pc - (PI_F * alpha * alpha / (2.0 * t) - 2.0)).abs() < 1e-3 * pc);
    }

    #[test]
    fn amplitude_at_pc_two() {
        let t = 1e6_f64;
        let alpha = 3.0 * (t / PI_F).sqrt();
        let amp = term_amplitude(alpha, t).unwrap();
        assert!((amp - (64.0 * PI_F / t).powf(0.25)).abs() < 1e-12);
        assert!(term_amplitude(a_ext(t).to_f64(), t).is_err());
    }

    #[test]
    fn phase_forms_agree() {
        let t = 1e5;
        let alpha = 1.5 * a_ext(t).to_f64();
        let p72 = term_phase(alpha, t).unwrap();
        let p6 = term_phase_pc_form(alpha, t).unwrap();
        assert!((p72.value - p6.value).abs() < 1e-9);
    }

    #[test]
    fn zeta_even_values() {
        assert!((zeta_even(1) - PI_F * PI_F / 6.0).abs() < 1e-15);
        assert!((zeta_even(2) - PI_F.powi(4) / 90.0).abs() < 1e-15);
        assert!((zeta_even(30) - 1.0).abs() < 1e-17 + 1e-18);
    }

    #[test]
    fn ms_sum_edges() {
        let t = 1e4;
        assert_eq!(ms_sum(t, 201, 199).unwrap(), 0.0);
        assert!(ms_sum(t, 159, 201).is_err());
        assert!(ms_sum(t, 162, 201).is_err());
    }

    #[test]
    fn closed_form_envelope() {
        let coef = 2f64.powf(0.75) * GAMMA_ONE_THIRD / (3f64.powf(2.0 / 3.0) * PI_F.powf(0.25));
        assert!((coef - 1.6269).abs() < 1e-4);
        assert!((coef * 3f64.sqrt() / 2.0 - 1.4089).abs() < 1e-4);
        assert!(matches!(transition_term(1e6, 0.3), Err(Error::Regime { .. })));
    }

    #[test]
    fn em_tail_floor() {
        assert!(matches!(em_tail(1000.0, 301, 30), Err(Error::Precondition { .. })));
        assert!(em_tail(1000.0, 353, 30).is_ok());
    }
}
