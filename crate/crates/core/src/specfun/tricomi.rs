use super::gamma::ln_gamma;
use crate::error::{domain, Result};
use crate::quad::{integrate, QuadratureSpec};

/// Tricomi's `U(a, b, z)` (written ψ in some references) for `a > 0`, `z > 0`,
/// from `U = Γ(a)^{-1} ∫_0^∞ e^{-zt} t^{a-1} (1+t)^{b-a-1} dt`.
pub fn tricomi_u(a: f64, b: f64, z: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok(ln_tricomi_u(a, b, z, spec)?.exp())
}

/// `ln U(a, b, z)`.
pub fn ln_tricomi_u(a: f64, b: f64, z: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok(ln_tricomi_integral(a, b, z, spec)? - ln_gamma(a)?)
}

/// `ln ∫_0^∞ e^{-zt} t^{a-1} (1+t)^{b-a-1} dt`, i.e. `ln(Γ(a) U(a, b, z))`.
///
/// For `a < 1` the integral is taken in `u = t^a`, which turns the endpoint
/// singularity `t^{a-1}` into a constant. The integrand is scaled by its peak
/// and the tail is cut where it falls below `spec.abs_tol` relative to the peak.
pub fn ln_tricomi_integral(a: f64, b: f64, z: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(a > 0.0) || !(z > 0.0) || !b.is_finite() || !a.is_finite() || !z.is_finite() {
        return Err(domain(
            "tricomi_u",
            format!("need a > 0, z > 0, finite b (a = {a}, b = {b}, z = {z})"),
        ));
    }
    spec.validate()?;
    let c = b - a - 1.0;
    let substitute = a < 1.0;
    let log_integrand = |u: f64| -> f64 {
        if substitute {
            let t = u.powf(1.0 / a);
            -z * t + c * t.ln_1p() - a.ln()
        } else {
            let t = u;
            let power = if a == 1.0 { 0.0 } else { (a - 1.0) * t.ln() };
            -z * t + power + c * t.ln_1p()
        }
    };

    // Stationary point of the log-integrand, located in t and mapped to u.
    let t_mode = if substitute {
        (c / z - 1.0).max(0.0)
    } else {
        let bq = a - 1.0 + c - z;
        let disc = (bq * bq + 4.0 * z * (a - 1.0)).sqrt();
        if bq >= 0.0 {
            (bq + disc) / (2.0 * z)
        } else if disc - bq > 0.0 {
            2.0 * (a - 1.0) / (disc - bq)
        } else {
            0.0
        }
    };
    let to_u = |t: f64| if substitute { t.powf(a) } else { t };
    let u_mode = to_u(t_mode);
    let peak = log_integrand(u_mode);

    let cut = peak + spec.abs_tol.max(1e-300).ln();
    let step = if u_mode > 0.0 {
        u_mode
    } else {
        to_u(1.0 / (1.0 + z + c.abs()))
    };
    let mut bps = vec![0.0];
    if u_mode > 0.0 {
        for j in (1..=30).rev() {
            bps.push(u_mode * 0.5f64.powi(j));
        }
        bps.push(u_mode);
    }
    let mut k = 0;
    loop {
        let u = u_mode + step * 2f64.powi(k);
        bps.push(u);
        if log_integrand(u) < cut {
            break;
        }
        k += 1;
        if k > 1100 {
            return Err(crate::error::Error::Convergence {
                what: "tricomi_u tail truncation",
                iterations: k as usize,
                estimate: u,
                error: f64::NAN,
            });
        }
    }
    let integral = integrate(
        |u| {
            let v = log_integrand(u) - peak;
            if v.is_nan() {
                0.0
            } else {
                v.exp()
            }
        },
        &bps,
        &QuadratureSpec { abs_tol: 0.0, ..*spec },
    )?;
    Ok(peak + integral.ln())
}
