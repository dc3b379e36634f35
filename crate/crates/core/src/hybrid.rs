//! The hybrid evaluator: the first `N_CO` Riemann–Siegel terms plus a short
//! segment of the odd-integer series standing in for the rest of the main
//! sum, together with the cutoff algebra and Gram-point error sweeps.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{argument, domain, Error, Result};
use crate::rs_classic::{rs_correction, rs_main_sum_with, rs_partial_sum, rs_remainder_bound, rs_z_with};
use crate::summation::default_workers;
use crate::theta_gram::{
    a_ext, gram_point, n_t, odd_floor_unchecked, odd_nearest_unchecked, theta_leading_ext, GramIndex,
};
use crate::zeta_sum::{h_factor, ms_sum_frame, transition_numeric, transition_params, transition_term, Frame, TransitionRegime};

/// How the continuous cutoffs are turned into summation limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rounding {
    /// `N_CO` rounded down, `L_CO` down to an odd integer.
    FloorCeil,
    /// `N_CO` to the nearest integer, and `L_CO` to the odd integer nearest
    /// the new-series cut that matches it: the Riemann–Siegel tail from
    /// `N_CO + 1` covers saddles beyond `N_CO + ½`, which the odd-integer
    /// sum reaches at `α(N_CO + ½) − 1`.
    Nearest,
}

/// Cutoffs of the hybrid formula at one height.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HybridConfig {
    pub omega: f64,
    /// `1 + 1/Ω`.
    pub pc_co: f64,
    /// Last Riemann–Siegel term kept.
    pub n_co: u64,
    /// Last odd integer of the new-series segment.
    pub l_co: u64,
    pub rounding: Rounding,
    pub include_transition: bool,
}

/// Which evaluator produced an [`EvalResult`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rs,
    NewSum,
    Hybrid,
}

/// A Z(t) value with its bookkeeping.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EvalResult {
    pub t: f64,
    pub z: f64,
    pub method: Method,
    /// Riemann–Siegel main-sum terms evaluated.
    pub rs_terms: u64,
    /// Generic odd-integer terms evaluated.
    pub new_terms: u64,
    /// Whether a transition term was added.
    pub transition: bool,
    /// Expected size of the error: the remainder bound for the plain
    /// Riemann–Siegel formula, the practical bound for the hybrid.
    pub error_budget: f64,
}

/// Fraction of the Riemann–Siegel main-sum work that the hybrid needs when a
/// new-series term costs `Ω` times a Riemann–Siegel term:
/// `X(Ω) = 2[1 + Ω(1 − √(1 + 1/Ω))]/√(1 + 1/Ω)`.
///
/// ```
/// let x = zeta_core::hybrid::x_of_omega(1.0).unwrap();
/// assert!((x - (2.0 * 2f64.sqrt() - 2.0)).abs() < 1e-15);
/// ```
pub fn x_of_omega(omega: f64) -> Result<f64> {
    if !(omega >= 1.0) || !omega.is_finite() {
        return Err(domain("x_of_omega", format!("need Ω >= 1, got {omega}")));
    }
    let r = (1.0 + 1.0 / omega).sqrt();
    // 1 − √(1 + 1/Ω) written without cancellation.
    let one_minus_r = -(1.0 / omega) / (1.0 + r);
    Ok(2.0 * (1.0 + omega * one_minus_r) / r)
}

/// Total cost `S(pc)` of a hybrid whose cutoffs both sit at `pc`, in units of
/// one Riemann–Siegel term:
/// `√(t/2πpc) + Ω·[√(t/2π)(pc + 1)/√pc − (odd_floor(a) + 2)/2]`.
/// Its minimum over `pc` lies at `1 + 1/Ω`.
pub fn total_cost(t: f64, omega: f64, pc: f64) -> f64 {
    let s = (t / (2.0 * PI)).sqrt();
    let start = odd_floor_unchecked(a_ext(t).to_f64()) as f64 + 2.0;
    (s / pc.sqrt()) + omega * (s * (pc + 1.0) / pc.sqrt() - 0.5 * start)
}

fn check_t_omega(op: &'static str, t: f64, omega: f64) -> Result<()> {
    if !(t > 200.0) || !t.is_finite() {
        return Err(domain(op, format!("need t > 200, got {t}")));
    }
    if !(omega >= 1.0) || !omega.is_finite() {
        return Err(domain(op, format!("need Ω >= 1, got {omega}")));
    }
    Ok(())
}

/// Cutoffs `N_CO ≈ √(t/2πpc)` and `L_CO ≈ √(2t/π)(pc + 1)/√pc` at
/// `pc = 1 + 1/Ω`.
pub fn cutoffs(t: f64, omega: f64, rounding: Rounding) -> Result<HybridConfig> {
    check_t_omega("cutoffs", t, omega)?;
    let pc = 1.0 + 1.0 / omega;
    let n_cont = (t / (2.0 * PI * pc)).sqrt();
    let l_cont = (2.0 * t / PI).sqrt() * (pc + 1.0) / pc.sqrt();
    let (n_co, l_co) = match rounding {
        Rounding::FloorCeil => (n_cont.floor() as u64, odd_floor_unchecked(l_cont)),
        Rounding::Nearest => {
            let n = n_cont.round().max(1.0);
            (n as u64, odd_nearest_unchecked(saddle_alpha(n + 0.5, t) - 1.0))
        }
    };
    let first = odd_floor_unchecked(a_ext(t).to_f64()) + 2;
    if l_co <= first || n_co == 0 {
        return Err(Error::Degenerate {
            op: "cutoffs",
            detail: format!("at t = {t} the new-series segment [{first}, {l_co}] is empty"),
        });
    }
    Ok(HybridConfig { omega, pc_co: pc, n_co, l_co, rounding, include_transition: true })
}

/// The odd integer `α` whose stationary point is the Riemann–Siegel term
/// `N`: `α(N) = √(t²/(N²π²) + 4t/π + 4N²)`.
pub fn saddle_map(n: u64, t: f64) -> Result<f64> {
    let nt = n_t(t);
    if n == 0 || n > nt {
        return Err(argument("saddle_map", format!("need 1 <= N <= N_t = {nt}, got {n}")));
    }
    Ok(saddle_alpha(n as f64, t))
}

fn saddle_alpha(n: f64, t: f64) -> f64 {
    let u = t / (n * PI);
    (u * u + 4.0 * t / PI + 4.0 * n * n).sqrt()
}

/// Practical error bound `(32Ω(1 + Ω)π/t)^{1/4}` of the hybrid.
pub fn practical_bound(t: f64, omega: f64) -> f64 {
    (32.0 * omega * (1.0 + omega) * PI / t).powf(0.25)
}

/// The new-series stand-in for the Riemann–Siegel tail, with its parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Segment {
    /// `H·Σ` of generic terms over `[first, last]`.
    pub generic: f64,
    pub first: u64,
    pub last: u64,
    pub terms: u64,
    /// Sum of the transition terms (zero when absent).
    pub transition: f64,
    /// Number of transition terms included (0, 1 or 2).
    pub transition_terms: u32,
}

/// How far below `a`, in units of `t^{−1/6}`, the odd integer under `a` is
/// still evaluated. Its contribution decays like `exp(−c|ϱ|^{3/2})` but is
/// still about `0.8·t^{−1/12}` at `ϱ = −1`, and near `0.02·t^{−1/12}` at
/// `ϱ = −3`.
pub const BELOW_A_REACH: f64 = 3.0;

fn transition_value(t: f64, alpha: u64) -> Result<f64> {
    let p = transition_params(t, alpha as f64);
    match p.regime {
        TransitionRegime::ClosedForm => transition_term(t, p.varrho),
        _ => transition_numeric(t, p.eps),
    }
}

/// Generic new-series terms up to `last`, plus the transition terms next to
/// `a`.
///
/// When the odd integer nearest `a` lies above it and within `t^{−1/6}`, it
/// is handled as a transition term and the generic sum starts two higher.
/// The odd integer at or below `a` is included by quadrature while
/// `ϱ > −`[`BELOW_A_REACH`]. `include_transition = false` drops both.
pub fn new_series_segment(t: f64, last: u64, include_transition: bool, workers: usize) -> Result<Segment> {
    let frame = Frame::new(t);
    let a = frame.a.to_f64();
    let zone = t.powf(-1.0 / 6.0);
    let below = odd_floor_unchecked(a);
    let above = below + 2;
    let above_eps = transition_params(t, above as f64).eps;
    let above_in_zone = above_eps < zone;
    let first = if above_in_zone { above + 2 } else { above };
    let mut transition = 0.0;
    let mut transition_terms = 0;
    if include_transition {
        if above_in_zone {
            transition += transition_value(t, above)?;
            transition_terms += 1;
        }
        let p = transition_params(t, below as f64);
        if p.varrho > -BELOW_A_REACH {
            transition += transition_value(t, below)?;
            transition_terms += 1;
        }
    }
    if last < first {
        return Err(Error::Degenerate {
            op: "new_series_segment",
            detail: format!("last term {last} lies below the first generic term {first}"),
        });
    }
    let generic = h_factor(t) * ms_sum_frame(&frame, first, last, workers);
    Ok(Segment { generic, first, last, terms: (last - first) / 2 + 1, transition, transition_terms })
}

/// Z(t) by the hybrid formula: Riemann–Siegel terms `1..=N_CO`, the
/// new-series segment, and the Riemann–Siegel correction through `C₂`.
pub fn hybrid_z(t: f64, cfg: &HybridConfig) -> Result<EvalResult> {
    hybrid_z_with(t, cfg, default_workers())
}

/// [`hybrid_z`] with an explicit worker count.
pub fn hybrid_z_with(t: f64, cfg: &HybridConfig, workers: usize) -> Result<EvalResult> {
    check_t_omega("hybrid_z", t, cfg.omega)?;
    if cfg.n_co == 0 || cfg.n_co > n_t(t) {
        return Err(Error::Degenerate { op: "hybrid_z", detail: format!("N_CO = {} outside [1, N_t]", cfg.n_co) });
    }
    let head = rs_main_sum_with(t, 1, cfg.n_co, workers)?;
    let seg = new_series_segment(t, cfg.l_co, cfg.include_transition, workers)?;
    let z = head + seg.generic + seg.transition + rs_correction(t, 2)?;
    Ok(EvalResult {
        t,
        z,
        method: Method::Hybrid,
        rs_terms: cfg.n_co,
        new_terms: seg.terms,
        transition: seg.transition_terms > 0,
        error_budget: practical_bound(t, cfg.omega),
    })
}

/// Plain Riemann–Siegel evaluation wrapped as an [`EvalResult`].
pub fn rs_eval(t: f64, workers: usize) -> Result<EvalResult> {
    let r = rs_z_with(t, workers)?;
    Ok(EvalResult {
        t,
        z: r.z,
        method: Method::Rs,
        rs_terms: r.n_t,
        new_terms: 0,
        transition: false,
        error_budget: rs_remainder_bound(t),
    })
}

/// Settings shared by every point of an error sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepTemplate {
    pub omega: f64,
    pub rounding: Rounding,
    pub include_transition: bool,
}

impl Default for SweepTemplate {
    fn default() -> Self {
        SweepTemplate { omega: 1.0, rounding: Rounding::FloorCeil, include_transition: true }
    }
}

/// One Gram point of an error sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub gram_index: u64,
    pub t: f64,
    /// Riemann–Siegel terms `N_CO + 1 ..= N_t`.
    pub rs_tail: f64,
    /// New-series segment including any transition term.
    pub new_series_value: f64,
    pub transition: bool,
    pub error: f64,
    pub bound: f64,
}

/// Aggregate of an error sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorStats {
    pub count: u64,
    pub mean_abs_error: f64,
    /// Mean of `ln|error|/ln t`.
    pub mean_exponent_s: f64,
    pub max_abs_error: f64,
    pub max_at_gram: GramIndex,
    /// Practical bound at the first point of the sweep.
    pub bound: f64,
    /// Points with `|error|` above `bound`.
    pub violations: u64,
}

/// Error of the new-series segment against the Riemann–Siegel tail it
/// replaces, at the Gram point `g_n`. Both sums use the leading part of θ,
/// as the hybrid main sum does.
pub fn sweep_point(n: GramIndex, template: &SweepTemplate, bound: f64) -> Result<SweepPoint> {
    let t = gram_point(n)?;
    let mut cfg = cutoffs(t, template.omega, template.rounding)?;
    cfg.include_transition = template.include_transition;
    let rs_tail = rs_partial_sum(t, theta_leading_ext(t), cfg.n_co + 1, n_t(t), 1);
    let seg = new_series_segment(t, cfg.l_co, cfg.include_transition, 1)?;
    let new_series_value = seg.generic + seg.transition;
    Ok(SweepPoint {
        gram_index: n.0,
        t,
        rs_tail,
        new_series_value,
        transition: seg.transition_terms > 0,
        error: rs_tail - new_series_value,
        bound,
    })
}

/// Runs [`sweep_point`] over the `count` Gram points `start + i·stride` and
/// aggregates the errors. A stride above one spreads a small sample over a
/// wider range of heights, and so over more positions of the cutoffs
/// between integers. Points are spread over `workers` threads; the
/// per-point values and the aggregate do not depend on the split.
pub fn error_sweep_points(
    start: GramIndex,
    count: u64,
    stride: u64,
    template: &SweepTemplate,
    workers: usize,
) -> Result<(ErrorStats, Vec<SweepPoint>)> {
    use rayon::prelude::*;
    if count == 0 {
        return Err(argument("error_sweep", "need at least one Gram point"));
    }
    if stride == 0 {
        return Err(argument("error_sweep", "stride must be at least 1"));
    }
    let bound = practical_bound(gram_point(start)?, template.omega);
    let run = |i: u64| sweep_point(GramIndex(start.0 + i * stride), template, bound);
    let points: Vec<SweepPoint> = if workers <= 1 {
        (0..count).map(run).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| crate::error::numeric("error_sweep", e.to_string()))?;
        pool.install(|| (0..count).into_par_iter().map(run).collect::<Result<_>>())?
    };
    Ok((aggregate(&points, bound), points))
}

/// [`error_sweep_points`] over consecutive Gram points, without the
/// per-point records.
pub fn error_sweep(start: GramIndex, count: u64, template: &SweepTemplate) -> Result<ErrorStats> {
    error_sweep_points(start, count, 1, template, default_workers()).map(|(s, _)| s)
}

fn aggregate(points: &[SweepPoint], bound: f64) -> ErrorStats {
    let mut sum = 0.0;
    let mut sum_s = 0.0;
    let mut max = -1.0;
    let mut max_at = GramIndex(points[0].gram_index);
    let mut violations = 0;
    for p in points {
        let e = p.error.abs();
        sum += e;
        sum_s += e.ln() / p.t.ln();
        if e > max {
            max = e;
            max_at = GramIndex(p.gram_index);
        }
        if e > bound {
            violations += 1;
        }
    }
    let n = points.len() as f64;
    ErrorStats {
        count: points.len() as u64,
        mean_abs_error: sum / n,
        mean_exponent_s: sum_s / n,
        max_abs_error: max,
        max_at_gram: max_at,
        bound,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x_of_omega_values() {
        assert!((100.0 * (1.0 - x_of_omega(1.30).unwrap()) - 14.2).abs() < 0.05);
        assert!((100.0 * (1.0 - x_of_omega(1.17).unwrap()) - 15.3).abs() < 0.05);
        assert!((x_of_omega(1e6).unwrap() - 1.0).abs() < 1e-5);
        assert!(x_of_omega(0.9).is_err());
    }

    #[test]
    fn cutoffs_at_one_million() {
        let c = cutoffs(1e6, 1.0, Rounding::FloorCeil).unwrap();
        assert_eq!((c.n_co, c.l_co), (282, 1691));
        let a = a_ext(1e6).to_f64();
        assert_eq!(c.n_co, (a / (4.0 * c.pc_co.sqrt())).floor() as u64);
    }

    #[test]
    fn saddle_map_endpoints() {
        let t = 1e6;
        assert!((saddle_map(1, t).unwrap() - (t / PI + 2.0)).abs() < 1e-9 * t);
        let nt = n_t(t);
        let mut prev = f64::INFINITY;
        for n in 1..=nt {
            let v = saddle_map(n, t).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(saddle_map(0, t).is_err() && saddle_map(nt + 1, t).is_err());
    }

    #[test]
    fn bound_values() {
        assert!((practical_bound(1e6, 1.0) - 0.1191).abs() < 5e-5);
        assert!((practical_bound(1e12, 1.0) - 3.766e-3).abs() < 5e-7);
    }

    #[test]
    fn degenerate_cutoffs_are_rejected() {
        assert!(matches!(cutoffs(201.0, 1e6, Rounding::FloorCeil), Err(Error::Degenerate { .. })));
    }
}
