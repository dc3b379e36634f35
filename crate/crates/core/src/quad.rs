//! Globally adaptive Gauss–Kronrod (7/15) quadrature of complex-valued
//! functions of a real parameter.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{numeric, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: Complex64,
    /// Sum of the Kronrod–Gauss differences over the final partition.
    pub abs_err: f64,
    pub evaluations: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

/// Integrates `f` over the consecutive panels given by `breaks`, bisecting
/// the panel with the largest error estimate until the total estimate drops
/// below `max(abs_tol, rel_tol·|I|)` or `max_panels` is reached.
///
/// Fails with a numerical error if, at the panel limit, the estimate still
/// exceeds `fail_rel·|I|` (plus `abs_tol`).
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: F,
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
    fail_rel: f64,
) -> Result<QuadResult> {
    let mut heap = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut evaluations = 0;
    for w in breaks.windows(2) {
        let (v, e) = gk15(&f, w[0], w[1]);
        evaluations += 15;
        total += v;
        err += e;
        heap.push(Panel { a: w[0], b: w[1], value: v, err: e });
    }
    while err > abs_tol.max(rel_tol * total.norm()) && heap.len() < max_panels {
        let Some(p) = heap.pop() else { break };
        let m = 0.5 * (p.a + p.b);
        let (v1, e1) = gk15(&f, p.a, m);
        let (v2, e2) = gk15(&f, m, p.b);
        evaluations += 30;
        total += v1 + v2 - p.value;
        err += e1 + e2 - p.err;
        heap.push(Panel { a: p.a, b: m, value: v1, err: e1 });
        heap.push(Panel { a: m, b: p.b, value: v2, err: e2 });
    }
    // Re-add to shed the drift of the running updates.
    let value: Complex64 = heap.iter().map(|p| p.value).sum();
    let abs_err: f64 = heap.iter().map(|p| p.err).sum();
    if !value.re.is_finite() || !value.im.is_finite() || abs_err > abs_tol + fail_rel * value.norm() {
        return Err(numeric(
            "integrate",
            format!("error estimate {abs_err:e} against |I| = {:e} after {} panels", value.norm(), heap.len()),
        ));
    }
    Ok(QuadResult { value, abs_err, evaluations })
}
