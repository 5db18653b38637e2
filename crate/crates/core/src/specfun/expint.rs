use super::gamma::ln_upper_gamma;
use crate::error::{domain, Result};

/// `E_1(x)` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("exp_integral_e1", format!("x = {x} must be > 0")));
    }
    Ok(ln_upper_gamma(0.0, x.ln()).exp())
}

/// `Ei(x)` for negative arguments, `Ei(-y) = -E_1(y)`.
pub fn exp_integral_ei(x: f64) -> Result<f64> {
    if !(x < 0.0) {
        return Err(domain("exp_integral_ei", format!("x = {x}; only x < 0 is supported")));
    }
    Ok(-exp_integral_e1(-x)?)
}

/// `e^x E_n(x)` for `n >= 1`, `x > 0`.
pub fn scaled_exp_integral_en(n: u32, x: f64) -> Result<f64> {
    if n == 0 || !(x > 0.0) {
        return Err(domain(
            "scaled_exp_integral_en",
            format!("need n >= 1, x > 0 (n = {n}, x = {x})"),
        ));
    }
    if x > 1.0 {
        const TINY: f64 = 1e-300;
        let nf = n as f64;
        let mut b = x + nf;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let a = -(i as f64) * (nf - 1.0 + i as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        return Ok(h);
    }
    // Upward recurrence E_{k+1} = (e^{-x} - x E_k) / k is stable for x <= 1.
    let mut s = x.exp() * exp_integral_e1(x)?;
    for k in 1..n {
        s = (1.0 - x * s) / k as f64;
    }
    Ok(s)
}
