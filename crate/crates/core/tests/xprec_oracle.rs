//! Two-word arithmetic and phase reduction against a 50-digit MPFR oracle.

use proptest::prelude::*;
use rug::float::Constant;
use rug::Float;
use zeta_core::xprec::{ext_log, phase_reduce, reduce_phase, two_prod, two_sum, ExtendedReal};

/// 50 decimal digits.
const PREC: u32 = 167;

fn big(x: ExtendedReal) -> Float {
    Float::with_val(PREC, x.hi) + x.lo
}

fn two_pi() -> Float {
    Float::with_val(PREC, Constant::Pi) * 2u32
}

/// `x mod 2π` at 50 digits.
fn big_mod_two_pi(x: Float) -> f64 {
    let tp = two_pi();
    let q = Float::with_val(PREC, &x / &tp).floor();
    (x - q * tp).to_f64()
}

fn angle_gap(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

#[test]
fn log_of_e_is_one_to_thirty_digits() {
    // e is not a binary64 number, so compare against the oracle's log of the
    // same double, which differs from 1 by about 1.6e-17.
    let x = std::f64::consts::E;
    let l = ext_log(x).unwrap();
    let err = (big(l) - Float::with_val(PREC, x).ln()).to_f64().abs();
    assert!(err < 1e-30, "{err:e}");
    assert!((l.to_f64() - 1.0).abs() < 1e-16);
}

#[test]
fn log_of_two_splits_into_the_expected_words() {
    let l = ext_log(2.0).unwrap();
    assert_eq!(l.hi, 0.6931471805599453);
    let ln2 = Float::with_val(PREC, Constant::Log2);
    let lo_exact = (ln2 - l.hi).to_f64();
    assert!((l.lo - lo_exact).abs() < 1e-30);
}

#[test]
fn million_log_two_reduces_correctly() {
    let p = phase_reduce(1e6, ext_log(2.0).unwrap()).unwrap();
    let oracle = big_mod_two_pi(Float::with_val(PREC, Constant::Log2) * 1_000_000u32);
    assert!(angle_gap(p.value, oracle) < 1e-10);
    assert!(p.abs_err < 1e-10);
}

#[test]
fn phase_reduce_rejects_heights_beyond_its_budget() {
    assert!(phase_reduce(2e12, ext_log(2.0).unwrap()).is_err());
    assert!(phase_reduce(-1.0, ext_log(2.0).unwrap()).is_err());
}

proptest! {
    #[test]
    fn two_sum_is_exact(a in -1e300f64..1e300, b in -1e300f64..1e300) {
        let s = two_sum(a, b);
        let exact = Float::with_val(4096, a) + b;
        prop_assert_eq!(Float::with_val(4096, s.hi) + s.lo, exact);
        prop_assert_eq!(s.hi, a + b);
    }

    #[test]
    fn two_prod_is_exact(a in -1e150f64..1e150, b in -1e150f64..1e150) {
        let p = two_prod(a, b);
        let exact = Float::with_val(256, a) * b;
        prop_assert_eq!(Float::with_val(256, p.hi) + p.lo, exact);
    }

    #[test]
    fn ext_log_matches_the_oracle(x in 1e-300f64..1e300) {
        let l = ext_log(x).unwrap();
        let oracle = Float::with_val(PREC, x).ln();
        let err = (big(l) - &oracle).to_f64().abs();
        prop_assert!(err <= 1e-30 * oracle.to_f64().abs().max(1.0), "x = {x:e}: {err:e}");
    }

    #[test]
    fn phase_reduce_stays_within_its_budget(t in 0.0f64..1e12, x in 1.0f64..1e8) {
        let l = ext_log(x).unwrap();
        let p = phase_reduce(t, l).unwrap();
        prop_assert!((0.0..std::f64::consts::TAU).contains(&p.value));
        let oracle = big_mod_two_pi(big(l) * t);
        prop_assert!(angle_gap(p.value, oracle) <= p.abs_err, "t = {t:e}, x = {x}");
    }

    #[test]
    fn reduce_phase_handles_negative_angles(x in -1e9f64..1e9) {
        let p = reduce_phase(ExtendedReal::from_f64(x), 0.0);
        let oracle = big_mod_two_pi(Float::with_val(PREC, x));
        prop_assert!(angle_gap(p.value, oracle) <= p.abs_err);
    }

    #[test]
    fn division_round_trips(a in 1e-100f64..1e100, b in 1e-100f64..1e100) {
        let q = ExtendedReal::from_f64(a) / ExtendedReal::from_f64(b);
        let back = q * ExtendedReal::from_f64(b);
        prop_assert!(((back - ExtendedReal::from_f64(a)).to_f64() / a).abs() < 1e-30);
    }
}
