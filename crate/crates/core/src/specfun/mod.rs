//! Special functions needed by the closed-form expressions: log-gamma,
//! lower/upper incomplete gamma, the exponential integrals and Tricomi's
//! confluent hypergeometric function of the second kind.
//!
//! All routines work in `f64`. Where a result can over- or underflow the
//! logarithmic variant (`ln_*`) is the primary implementation and takes the
//! argument by its logarithm as well, so that e.g. `Γ(a, x)` stays usable for
//! `x` far below `f64::MIN_POSITIVE`.

mod expint;
mod gamma;
mod tricomi;

pub use crate::quad::QuadratureSpec;
pub use expint::{exp_integral_e1, exp_integral_ei, scaled_exp_integral_en};
pub use gamma::{
    gamma, ln_gamma, ln_lower_gamma, ln_upper_gamma, lower_inc_gamma, regularized_gamma_q, upper_inc_gamma, EULER_GAMMA,
};
pub use tricomi::{ln_tricomi_integral, ln_tricomi_u, tricomi_u};

/// `ln C(n, k)`.
pub fn ln_binomial(n: u32, k: u32) -> f64 {
    debug_assert!(k <= n);
    let (n, k) = (n as f64, k as f64);
    // Arguments are >= 1 so ln_gamma cannot fail.
    ln_gamma(n + 1.0).unwrap() - ln_gamma(k + 1.0).unwrap() - ln_gamma(n - k + 1.0).unwrap()
}

/// `C(n, k)` as a float, exact while the value fits in 53 bits.
pub fn binomial(n: u32, k: u32) -> f64 {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}
