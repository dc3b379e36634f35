//! Timing harness for the hybrid evaluator.
//!
//! The cost model of the hybrid formula has one free parameter, Ω, the cost
//! of one odd-integer term relative to one Riemann–Siegel term. This crate
//! measures Ω on the running machine, times the plain and hybrid evaluators
//! end to end, and reports the deterministic term-count saving.
//!
//! All timings run on one worker. Each repetition is timed on a monotonic
//! clock after an untimed warm-up, results are passed through
//! [`std::hint::black_box`], and the median over repetitions is reported
//! with its interquartile range relative to the median as the dispersion.

use std::hint::black_box;
use std::time::{Duration, Instant};

use serde::Serialize;

use zeta_core::hybrid::{cutoffs, hybrid_z_with, rs_eval, x_of_omega, Rounding};
use zeta_core::rs_classic::rs_main_sum_with;
use zeta_core::theta_gram::{a_ext, n_t, odd_floor};
use zeta_core::zeta_sum::ms_sum_with;
use zeta_core::{Error, Result};

/// Smallest accepted term budget per repetition.
pub const MIN_TERM_BUDGET: u64 = 1_000_000;
/// Smallest accepted number of timed repetitions.
pub const MIN_REPS: usize = 7;
/// Measurements whose dispersion exceeds this are rejected.
pub const MAX_DISPERSION: f64 = 0.2;

/// A measured per-term cost ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OmegaMeasurement {
    pub t: f64,
    /// Median over repetitions of `new_ns_per_term / rs_ns_per_term`.
    pub omega: f64,
    pub rs_ns_per_term: f64,
    pub new_ns_per_term: f64,
    pub reps: usize,
    pub term_budget: u64,
    /// Interquartile range of the per-repetition ratios over their median.
    pub dispersion: f64,
}

/// End-to-end comparison of the plain and hybrid evaluators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SavingReport {
    pub t: f64,
    /// Ω used for the cutoffs (the measured value, raised to 1 if below).
    pub omega: f64,
    /// `100·(1 − X(Ω))`.
    pub predicted_pct: f64,
    /// `100·(1 − τ_hybrid/τ_RS)` from median wall-clock times.
    pub realized_pct: f64,
    /// `100·(1 − (N_CO + Ω·L)/N_t)` from the term counts of the evaluation.
    pub term_cost_pct: f64,
    pub rs_ns: f64,
    pub hybrid_ns: f64,
    pub reps: usize,
    pub dispersion: f64,
}

fn check_budget(op: &'static str, term_budget: u64, reps: usize) -> Result<()> {
    if term_budget < MIN_TERM_BUDGET {
        return Err(Error::Precondition {
            op,
            detail: format!("term budget {term_budget} is below {MIN_TERM_BUDGET}"),
        });
    }
    if reps < MIN_REPS {
        return Err(Error::Precondition { op, detail: format!("need at least {MIN_REPS} repetitions, got {reps}") });
    }
    Ok(())
}

/// Smallest observable step of the monotonic clock.
fn timer_resolution() -> Duration {
    let mut best = Duration::MAX;
    for _ in 0..64 {
        let s = Instant::now();
        let mut e = s.elapsed();
        while e.is_zero() {
            e = s.elapsed();
        }
        best = best.min(e);
    }
    best
}

/// `(median, IQR/median)` of `xs`; sorts in place.
fn median_dispersion(xs: &mut [f64]) -> (f64, f64) {
    xs.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let pos = p * (xs.len() - 1) as f64;
        let i = pos.floor() as usize;
        let j = (i + 1).min(xs.len() - 1);
        xs[i] + (pos - i as f64) * (xs[j] - xs[i])
    };
    let med = q(0.5);
    (med, (q(0.75) - q(0.25)) / med)
}

fn time_once<F: Fn() -> Result<f64>>(run: &F) -> Result<f64> {
    let s = Instant::now();
    black_box(run()?);
    Ok(s.elapsed().as_nanos() as f64)
}

/// The two ranges whose per-term costs are compared: the whole
/// Riemann–Siegel main sum, and the odd-integer segment that the hybrid at
/// Ω = 1 would use.
fn ranges(t: f64) -> Result<((u64, u64), (u64, u64))> {
    let cfg = cutoffs(t, 1.0, Rounding::FloorCeil)?;
    let first = odd_floor(a_ext(t).to_f64())? + 4;
    Ok(((1, n_t(t)), (first, cfg.l_co.max(first))))
}

/// Alternates timed calls of `base` and `other` after one warm-up call of
/// each, and returns the median ratio `other/base`, its dispersion, and the
/// median times of both.
fn interleaved_ratio<F, G>(reps: usize, base: F, other: G) -> Result<(f64, f64, f64, f64)>
where
    F: Fn() -> Result<f64>,
    G: Fn() -> Result<f64>,
{
    let mut rs_ns = Vec::with_capacity(reps);
    let mut new_ns = Vec::with_capacity(reps);
    let mut ratios = Vec::with_capacity(reps);
    black_box(base()?);
    black_box(other()?);
    for _ in 0..reps {
        let a = time_once(&base)?;
        let b = time_once(&other)?;
        rs_ns.push(a);
        new_ns.push(b);
        ratios.push(b / a);
    }
    let (omega, dispersion) = median_dispersion(&mut ratios);
    let (rs_med, _) = median_dispersion(&mut rs_ns);
    let (new_med, _) = median_dispersion(&mut new_ns);
    Ok((omega, dispersion, rs_med, new_med))
}

fn measure(
    op: &'static str,
    t: f64,
    term_budget: u64,
    reps: usize,
    self_ratio: bool,
) -> Result<OmegaMeasurement> {
    check_budget(op, term_budget, reps)?;
    let ((rs_lo, rs_hi), (new_lo, new_hi)) = ranges(t)?;
    let rs_len = rs_hi - rs_lo + 1;
    let new_len = (new_hi - new_lo) / 2 + 1;
    let rs_passes = term_budget.div_ceil(rs_len);
    let new_passes = term_budget.div_ceil(new_len);

    let rs = || -> Result<f64> {
        let mut acc = 0.0;
        for _ in 0..rs_passes {
            acc += rs_main_sum_with(black_box(t), rs_lo, rs_hi, 1)?;
        }
        Ok(acc)
    };
    let new = || -> Result<f64> {
        let mut acc = 0.0;
        for _ in 0..new_passes {
            acc += ms_sum_with(black_box(t), new_lo, new_hi, 1)?;
        }
        Ok(acc)
    };
    let (ratio, dispersion, rs_ns, new_ns) = if self_ratio {
        interleaved_ratio(reps, rs, rs)?
    } else {
        interleaved_ratio(reps, rs, new)?
    };

    let floor = 1e3 * timer_resolution().as_nanos() as f64;
    if rs_ns.min(new_ns) < floor {
        return Err(Error::Precondition {
            op,
            detail: format!("a repetition took {:.0} ns, under 10³ timer ticks ({floor:.0} ns)", rs_ns.min(new_ns)),
        });
    }
    let rs_per = rs_ns / (rs_passes * rs_len) as f64;
    let new_per = if self_ratio { new_ns / (rs_passes * rs_len) as f64 } else { new_ns / (new_passes * new_len) as f64 };
    // Both loops hold the same number of terms up to the rounding of the
    // pass counts, which the per-term normalisation removes.
    let scale = if self_ratio { 1.0 } else { (rs_passes * rs_len) as f64 / (new_passes * new_len) as f64 };
    let m = OmegaMeasurement {
        t,
        omega: ratio * scale,
        rs_ns_per_term: rs_per,
        new_ns_per_term: new_per,
        reps,
        term_budget,
        dispersion,
    };
    if !(dispersion <= MAX_DISPERSION) {
        return Err(Error::Unstable { op, dispersion, limit: MAX_DISPERSION });
    }
    Ok(m)
}

/// Measures Ω at height `t`: the cost of one odd-integer term relative to
/// one Riemann–Siegel term, as the median over `reps` interleaved
/// repetitions of the ratio of their per-term times.
///
/// Each repetition sums at least `term_budget` terms of each kind, looping
/// over the Riemann–Siegel main sum and over the odd-integer segment of the
/// Ω = 1 hybrid.
pub fn measure_omega(t: f64, term_budget: u64, reps: usize) -> Result<OmegaMeasurement> {
    measure("measure_omega", t, term_budget, reps, false)
}

/// Harness self-test: times the Riemann–Siegel loop against itself. The
/// returned `omega` should be close to 1.
pub fn measure_self_ratio(t: f64, term_budget: u64, reps: usize) -> Result<OmegaMeasurement> {
    measure("measure_self_ratio", t, term_budget, reps, true)
}

/// Predicted and realized CPU saving of the hybrid evaluator at the cutoffs
/// implied by `m.omega`.
///
/// Both evaluators are called repeatedly so that each repetition covers at
/// least `m.term_budget` Riemann–Siegel terms, and the median wall-clock
/// times are compared. Ω below 1 (a cheap odd-integer term) is raised to 1,
/// the edge of the cutoff model.
pub fn realized_saving(t: f64, m: &OmegaMeasurement) -> Result<SavingReport> {
    check_budget("realized_saving", m.term_budget, m.reps)?;
    if !(m.omega > 0.0) || !(m.dispersion <= MAX_DISPERSION) {
        return Err(Error::Precondition {
            op: "realized_saving",
            detail: format!("invalid measurement (Ω = {}, dispersion {})", m.omega, m.dispersion),
        });
    }
    let omega = m.omega.max(1.0);
    let cfg = cutoffs(t, omega, Rounding::FloorCeil)?;
    let nt = n_t(t);
    let calls = m.term_budget.div_ceil(nt);

    let rs = || -> Result<f64> {
        let mut acc = 0.0;
        for _ in 0..calls {
            acc += rs_eval(black_box(t), 1)?.z;
        }
        Ok(acc)
    };
    let hy = || -> Result<f64> {
        let mut acc = 0.0;
        for _ in 0..calls {
            acc += hybrid_z_with(black_box(t), &cfg, 1)?.z;
        }
        Ok(acc)
    };
    let (ratio, dispersion, rs_ns, hybrid_ns) = interleaved_ratio(m.reps, rs, hy)?;
    if !(dispersion <= MAX_DISPERSION) {
        return Err(Error::Unstable { op: "realized_saving", dispersion, limit: MAX_DISPERSION });
    }
    let eval = hybrid_z_with(t, &cfg, 1)?;
    let cost = eval.rs_terms as f64 + omega * eval.new_terms as f64;
    Ok(SavingReport {
        t,
        omega,
        predicted_pct: 100.0 * (1.0 - x_of_omega(omega)?),
        realized_pct: 100.0 * (1.0 - ratio),
        term_cost_pct: 100.0 * (1.0 - cost / nt as f64),
        rs_ns: rs_ns / calls as f64,
        hybrid_ns: hybrid_ns / calls as f64,
        reps: m.reps,
        dispersion,
    })
}

/// Deterministic saving in evaluated terms at Ω = 1:
/// `100·(1 − (N_CO + L)/N_t)`, with `N_CO` and the generic term count `L`
/// taken from the hybrid evaluation itself.
pub fn term_count_saving(t: f64) -> Result<f64> {
    let cfg = cutoffs(t, 1.0, Rounding::FloorCeil)?;
    let eval = hybrid_z_with(t, &cfg, 1)?;
    Ok(100.0 * (1.0 - (eval.rs_terms + eval.new_terms) as f64 / n_t(t) as f64))
}
