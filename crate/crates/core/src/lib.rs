//! Hardy's Z function on the critical line, evaluated three ways: the
//! Riemann–Siegel formula, the odd-integer zeta-sum with its Euler–Maclaurin
//! tail, and a hybrid that replaces the last stretch of the Riemann–Siegel
//! main sum with a shorter segment of the odd-integer series.

pub mod error;
pub mod hybrid;
pub mod quad;
pub mod rs_classic;
pub mod summation;
pub mod theta_gram;
pub mod xprec;
pub mod zeta_sum;

pub use error::{Error, Result};
