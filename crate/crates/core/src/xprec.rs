//! Two-word ("double-double") arithmetic and reduction of large phases
//! modulo 2π.
//!
//! A term such as `cos(θ(t) − t·ln N)` at `t = 10¹²` has an argument near
//! 10¹³. Plain binary64 keeps only about three correct digits of that
//! argument after reduction. Carrying every phase as an unevaluated sum
//! `hi + lo` keeps roughly 32 significant digits, and reducing against a
//! three-word 2π leaves an absolute phase error near 10⁻¹⁶.

use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::Serialize;

use crate::error::{domain, range, Result};

/// An unevaluated sum `hi + lo` of two binary64 numbers.
///
/// Values built by the arithmetic in this module are normalized, so
/// `hi == hi + lo` when rounded to binary64 and `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ExtendedReal {
    pub hi: f64,
    pub lo: f64,
}

/// An angle in `[0, 2π)` with a bound on the error accumulated while
/// producing it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseAngle {
    pub value: f64,
    pub abs_err: f64,
}

/// 2π split into three non-overlapping words.
pub const TWO_PI_3: [f64; 3] = [6.283185307179586, 2.4492935982947064e-16, -5.989539619436679e-33];
pub const TWO_PI: ExtendedReal = ExtendedReal { hi: 6.283185307179586, lo: 2.4492935982947064e-16 };
pub const PI: ExtendedReal = ExtendedReal { hi: 3.141592653589793, lo: 1.2246467991473532e-16 };
pub const PI_OVER_8: ExtendedReal = ExtendedReal { hi: 0.39269908169872414, lo: 1.5308084989341915e-17 };
pub const LN_2: ExtendedReal = ExtendedReal { hi: 0.6931471805599453, lo: 2.3190468138462996e-17 };
const INV_TWO_PI: f64 = 0.15915494309189535;

/// Largest `t` for which [`phase_reduce`] guarantees its error budget.
pub const PHASE_T_MAX: f64 = 1e12;

/// Relative rounding unit of two-word arithmetic (2⁻¹⁰⁴), with a small
/// safety factor for the handful of operations in each kernel.
const DD_EPS: f64 = 4.0 * 4.93038065763132e-32;

/// Exact sum: `hi = fl(a + b)` and `hi + lo = a + b`.
#[inline]
pub fn two_sum(a: f64, b: f64) -> ExtendedReal {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    ExtendedReal { hi: s, lo: err }
}

/// Exact sum when `|a| >= |b|` (or `a == 0`).
#[inline]
fn quick_two_sum(a: f64, b: f64) -> ExtendedReal {
    let s = a + b;
    ExtendedReal { hi: s, lo: b - (s - a) }
}

/// Exact product: `hi = fl(a·b)` and `hi + lo = a·b`.
#[inline]
pub fn two_prod(a: f64, b: f64) -> ExtendedReal {
    let p = a * b;
    #[cfg(target_feature = "fma")]
    let e = a.mul_add(b, -p);
    #[cfg(not(target_feature = "fma"))]
    let e = {
        let (ah, al) = split(a);
        let (bh, bl) = split(b);
        ((ah * bh - p) + ah * bl + al * bh) + al * bl
    };
    ExtendedReal { hi: p, lo: e }
}

#[cfg(not(target_feature = "fma"))]
#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

impl ExtendedReal {
    pub const ZERO: ExtendedReal = ExtendedReal { hi: 0.0, lo: 0.0 };
    pub const ONE: ExtendedReal = ExtendedReal { hi: 1.0, lo: 0.0 };

    #[inline]
    pub const fn new(hi: f64, lo: f64) -> Self {
        ExtendedReal { hi, lo }
    }

    #[inline]
    pub const fn from_f64(x: f64) -> Self {
        ExtendedReal { hi: x, lo: 0.0 }
    }

    /// Re-normalizes an arbitrary pair so that `hi` carries the rounded sum.
    #[inline]
    pub fn normalized(self) -> Self {
        two_sum(self.hi, self.lo)
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 { -self } else { self }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let p = two_prod(self.hi, b);
        quick_two_sum(p.hi, p.lo + self.lo * b)
    }

    #[inline]
    pub fn add_f64(self, b: f64) -> Self {
        let s = two_sum(self.hi, b);
        quick_two_sum(s.hi, s.lo + self.lo)
    }

    #[inline]
    pub fn square(self) -> Self {
        let p = two_prod(self.hi, self.hi);
        quick_two_sum(p.hi, p.lo + 2.0 * self.hi * self.lo)
    }

    #[inline]
    pub fn recip(self) -> Self {
        ExtendedReal::ONE / self
    }

    /// Square root, accurate to a few units of 2⁻¹⁰⁴. Negative input gives NaN.
    #[inline]
    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { ExtendedReal::ZERO } else { ExtendedReal::new(f64::NAN, f64::NAN) };
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let diff = self - two_prod(ax, ax);
        two_sum(ax, diff.hi * (x * 0.5))
    }
}

impl From<f64> for ExtendedReal {
    fn from(x: f64) -> Self {
        ExtendedReal::from_f64(x)
    }
}

impl Neg for ExtendedReal {
    type Output = ExtendedReal;
    #[inline]
    fn neg(self) -> Self {
        ExtendedReal { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for ExtendedReal {
    type Output = ExtendedReal;
    #[inline]
    fn add(self, b: Self) -> Self {
        let s = two_sum(self.hi, b.hi);
        let t = two_sum(self.lo, b.lo);
        let u = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(u.hi, u.lo + t.lo)
    }
}

impl Sub for ExtendedReal {
    type Output = ExtendedReal;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for ExtendedReal {
    type Output = ExtendedReal;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let p = two_prod(self.hi, b.hi);
        quick_two_sum(p.hi, p.lo + (self.hi * b.lo + self.lo * b.hi))
    }
}

impl Div for ExtendedReal {
    type Output = ExtendedReal;
    #[inline]
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        quick_two_sum(q1, q2).add_f64(q3)
    }
}

impl Add<f64> for ExtendedReal {
    type Output = ExtendedReal;
    #[inline]
    fn add(self, b: f64) -> Self {
        self.add_f64(b)
    }
}

impl Sub<f64> for ExtendedReal {
    type Output = ExtendedReal;
    #[inline]
    fn sub(self, b: f64) -> Self {
        self.add_f64(-b)
    }
}

impl Mul<f64> for ExtendedReal {
    type Output = ExtendedReal;
    #[inline]
    fn mul(self, b: f64) -> Self {
        self.mul_f64(b)
    }
}

impl Div<f64> for ExtendedReal {
    type Output = ExtendedReal;
    #[inline]
    fn div(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let p = two_prod(q1, b);
        let r = (self - p).to_f64();
        quick_two_sum(q1, r / b)
    }
}

/// `e^x` in two-word precision for `|x| < 700`.
///
/// The argument is reduced by multiples of ln 2 and then by 2⁸. `expm1` of the
/// small remainder comes from its Taylor series, and the doubling step uses
/// `s ← 2s + s²` on `s = e^r − 1`, which does not amplify relative error the
/// way squaring `e^r` would.
pub fn exp_dd(x: ExtendedReal) -> ExtendedReal {
    if x.hi == 0.0 && x.lo == 0.0 {
        return ExtendedReal::ONE;
    }
    let k = (x.hi / LN_2.hi).round();
    let r = x - LN_2.mul_f64(k);
    let r = r.mul_f64(1.0 / 256.0);
    // expm1(r) = r + r²/2! + ... ; |r| < 1.4e-3 so eleven terms exceed 2⁻¹⁰⁶.
    let mut term = r;
    let mut s = r;
    for n in 2..=11 {
        term = (term * r) / n as f64;
        s = s + term;
        if term.hi.abs() < 1e-36 {
            break;
        }
    }
    for _ in 0..8 {
        s = s.mul_f64(2.0) + s.square();
    }
    let e = ExtendedReal::ONE + s;
    let scale = 2f64.powi(k as i32);
    ExtendedReal::new(e.hi * scale, e.lo * scale)
}

/// Natural logarithm of a positive two-word number, relative error near 10⁻³¹.
///
/// Close to 1 the series `2·atanh((x−1)/(x+1))` keeps relative accuracy when
/// the result is tiny. Elsewhere one Newton step on `e^y = x` from the
/// binary64 logarithm doubles the number of correct bits. The binary
/// exponent is split off first, since `e^{−y}` for `|y|` in the hundreds
/// would push the low word of the Newton step into the subnormal range.
pub fn ln_dd(x: ExtendedReal) -> ExtendedReal {
    let e = x.hi.log2().round();
    if e.abs() >= 2.0 {
        // Two half steps so that 2^{−e} stays representable for subnormal x.
        let h1 = (e / 2.0).trunc();
        let s1 = 2f64.powi(-(h1 as i32));
        let s2 = 2f64.powi(-((e - h1) as i32));
        let m = ExtendedReal::new(x.hi * s1 * s2, x.lo * s1 * s2);
        return ln_mantissa(m) + LN_2.mul_f64(e);
    }
    ln_mantissa(x)
}

/// [`ln_dd`] for `x` within a factor of about 3 of 1.
fn ln_mantissa(x: ExtendedReal) -> ExtendedReal {
    let d = x - 1.0;
    if d.hi.abs() < 0.0625 {
        if d.hi == 0.0 && d.lo == 0.0 {
            return ExtendedReal::ZERO;
        }
        let u = d / (x + 1.0);
        let u2 = u.square();
        let mut power = u;
        let mut acc = u;
        let mut k = 3.0;
        loop {
            power = power * u2;
            let term = power / k;
            acc = acc + term;
            if term.hi.abs() <= acc.hi.abs() * 1e-34 {
                break;
            }
            k += 2.0;
        }
        return acc.mul_f64(2.0);
    }
    let y0 = x.hi.ln();
    let delta = x * exp_dd(ExtendedReal::from_f64(-y0)) - 1.0;
    // ln(1+δ) = δ − δ²/2 + …; |δ| ≈ 1e-16 so the square is the last term needed.
    (ExtendedReal::from_f64(y0) + delta).add_f64(-0.5 * delta.hi * delta.hi)
}

/// Natural logarithm of a positive finite binary64 value in two-word form.
///
/// ```
/// use zeta_core::xprec::ext_log;
/// let l2 = ext_log(2.0).unwrap();
/// assert_eq!(l2.hi, 0.6931471805599453);
/// assert!(ext_log(0.0).is_err());
/// ```
pub fn ext_log(x: f64) -> Result<ExtendedReal> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("ext_log", format!("argument must be positive and finite, got {x}")));
    }
    Ok(ln_dd(ExtendedReal::from_f64(x)))
}

/// Reduces a two-word value modulo 2π into `[0, 2π)` while keeping both words.
///
/// The quotient is an exact integer below 2⁵³, so `k·2π` is formed exactly
/// for the first two words of 2π and with a relative error of 2⁻⁵³ for the
/// third, which is itself 10⁻³³ in size.
pub fn reduce_ext(x: ExtendedReal) -> ExtendedReal {
    let k = (x.hi * INV_TWO_PI).round();
    let mut r = x;
    if k != 0.0 {
        let p0 = two_prod(k, TWO_PI_3[0]);
        let p1 = two_prod(k, TWO_PI_3[1]);
        r = r - p0;
        r = r - p1;
        r = r.add_f64(-k * TWO_PI_3[2]);
    }
    if r.hi < 0.0 {
        r = r + TWO_PI;
    } else if r.hi >= TWO_PI.hi {
        r = r - TWO_PI;
    }
    r
}

/// Collapses an already reduced two-word angle to a binary64 [`PhaseAngle`].
///
/// `input_err` is the caller's bound on the error in the unreduced value.
#[inline]
pub fn phase_from_reduced(r: ExtendedReal, input_err: f64) -> PhaseAngle {
    let mut value = r.hi + r.lo;
    if value >= TWO_PI.hi {
        value = 0.0;
    } else if value < 0.0 {
        value = 0.0;
    }
    // Half an ulp of the binary64 result plus the two-word rounding residue.
    let rounding = 4.5e-16 + 8.0 * DD_EPS;
    PhaseAngle { value, abs_err: input_err + rounding }
}

/// Reduces any two-word value modulo 2π.
///
/// `input_err` is added to the rounding budget of the reduction itself.
pub fn reduce_phase(x: ExtendedReal, input_err: f64) -> PhaseAngle {
    let r = reduce_ext(x);
    phase_from_reduced(r, input_err + x.hi.abs() * DD_EPS)
}

/// `(t · (L.hi + L.lo)) mod 2π`.
///
/// The product is formed in two-word arithmetic. For `t` above
/// [`PHASE_T_MAX`] the result is still computed but returned inside a range
/// error, since the budget is no longer guaranteed there.
///
/// ```
/// use zeta_core::xprec::{ext_log, phase_reduce};
/// let p = phase_reduce(0.0, ext_log(2.0).unwrap()).unwrap();
/// assert_eq!(p.value, 0.0);
/// ```
pub fn phase_reduce(t: f64, l: ExtendedReal) -> Result<PhaseAngle> {
    if !(0.0..=PHASE_T_MAX).contains(&t) || !t.is_finite() {
        return Err(range("phase_reduce", format!("t = {t} outside [0, {PHASE_T_MAX:e}]")));
    }
    if !l.is_finite() {
        return Err(domain("phase_reduce", "non-finite multiplier"));
    }
    Ok(reduce_phase(l.mul_f64(t), 0.0))
}

/// Incremental logarithm for slowly varying arguments.
///
/// Keeps one exactly computed `ln(x₀)` and returns
/// `ln x = ln x₀ + 2·atanh((x − x₀)/(x + x₀))`, re-anchoring whenever the
/// ratio leaves `|u| < 2⁻¹⁰`. Only the leading `2u` is kept in two words; the
/// cubic and higher terms are below 10⁻⁹ and are summed in binary64, which
/// bounds the absolute error by about 3·10⁻²⁵. Multiplied by `t ≤ 10¹²` that is
/// still far below the 10⁻¹⁰ phase budget.
/// Summation loops over consecutive `N` or `α` use this to avoid a full
/// two-word exponential per term.
#[derive(Clone, Copy, Debug)]
pub struct LogAnchor {
    x0: ExtendedReal,
    ln_x0: ExtendedReal,
}

impl LogAnchor {
    pub fn new(x0: ExtendedReal) -> Self {
        LogAnchor { x0, ln_x0: ln_dd(x0) }
    }

    #[inline]
    pub fn ln(&mut self, x: ExtendedReal) -> ExtendedReal {
        let u = (x - self.x0) / (x + self.x0);
        if u.hi.abs() > 9.765625e-4 {
            *self = LogAnchor::new(x);
            return self.ln_x0;
        }
        let v = u.hi;
        let v2 = v * v;
        let tail = v * v2 * (2.0 / 3.0 + v2 * (2.0 / 5.0 + v2 * (2.0 / 7.0 + v2 * (2.0 / 9.0))));
        (self.ln_x0 + u.mul_f64(2.0)).add_f64(tail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sum_examples() {
        assert_eq!(two_sum(1.0, 2.0), ExtendedReal::new(3.0, 0.0));
        assert_eq!(two_sum(1e16, 1.0), ExtendedReal::new(1e16, 1.0));
        for x in [0.0, -3.5, 1e300, 5e-324, 0.1] {
            assert_eq!(two_sum(x, 0.0), ExtendedReal::new(x, 0.0));
        }
    }

    #[test]
    fn log_of_one_is_exact_zero() {
        assert_eq!(ext_log(1.0).unwrap(), ExtendedReal::ZERO);
    }

    #[test]
    fn log_rejects_bad_input() {
        for x in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(ext_log(x).is_err());
        }
    }

    #[test]
    fn exp_then_log_round_trips() {
        for &x in &[-30.0, -1.5, -0.01, 0.3, 2.0, 17.25, 300.0] {
            let y = ln_dd(exp_dd(ExtendedReal::from_f64(x)));
            assert!((y - x).to_f64().abs() <= 1e-30 * x.abs().max(1.0), "x={x} y={y:?}");
        }
    }

    #[test]
    fn reduce_of_zero_and_log_one() {
        assert_eq!(phase_reduce(0.0, ExtendedReal::new(3.0, 1e-17)).unwrap().value, 0.0);
        for t in [1.0, 1e6, 1e12] {
            assert_eq!(phase_reduce(t, ext_log(1.0).unwrap()).unwrap().value, 0.0);
        }
    }

    #[test]
    fn reduce_out_of_range_is_flagged() {
        assert!(phase_reduce(2e12, LN_2).is_err());
        assert!(phase_reduce(-1.0, LN_2).is_err());
    }

    #[test]
    fn anchor_matches_direct_log() {
        let mut anchor = LogAnchor::new(ExtendedReal::from_f64(1000.0));
        for n in 1000..3000u32 {
            let x = ExtendedReal::from_f64(n as f64);
            let a = anchor.ln(x);
            let d = ln_dd(x);
            assert!((a - d).to_f64().abs() < 5e-25, "n={n}");
        }
    }

    #[test]
    fn division_and_sqrt_are_consistent() {
        let x = ExtendedReal::new(2.0, 0.0);
        let r = x.sqrt();
        let back = r * r;
        assert!((back - x).to_f64().abs() < 1e-31);
        let q = ExtendedReal::ONE / ExtendedReal::from_f64(3.0);
        assert!((q * 3.0 - 1.0).to_f64().abs() < 1e-31);
    }
}
