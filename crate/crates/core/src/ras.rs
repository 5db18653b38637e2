//! Receive antenna selection with equal power on the `Mt` transmit antennas.
//!
//! The receiver keeps the antenna with the largest SNR, so the selected SNR
//! is the maximum of `L = Mr` gamma variates of shape `K = Mt`, and the rate
//! is `B T log2(1 + Γ / Mt)`. The effective capacity needs
//! `E{(1 + Γ/Mt)^{-θ̃}}`, which the order-statistic expansion turns into a
//! double sum of Tricomi functions.

use std::f64::consts::LN_2;

use crate::config::SystemConfig;
use crate::error::Result;
use crate::evaluation::{resolve, Evaluation};
use crate::orderstats::{BranchSnrDist, SelectionConfig};
use crate::quad::{integrate_log_density, QuadratureSpec};
use crate::specfun::ln_tricomi_integral;

/// `B T log2(1 + snr / Mt)` in bits per frame.
pub fn miso_service_rate(cfg: &SystemConfig, snr: f64) -> f64 {
    cfg.bt() * (snr / cfg.mt as f64).ln_1p() / LN_2
}

/// Max of `Mr` candidates, each of shape `Mt`.
pub fn ras_selection(cfg: &SystemConfig) -> Result<SelectionConfig> {
    SelectionConfig::new(cfg.mr, BranchSnrDist::new(cfg.mt, cfg.gamma0)?)
}

/// `ln E{(1 + X/scale)^{-θ̃}}` for `X` the selected SNR of `sel`.
///
/// Each expansion term is `scale^a Γ(a) U(a, a + 1 - θ̃, (m+1) scale / γ0)`
/// with `a = K + q`.
pub fn ln_rate_moment(
    sel: &SelectionConfig,
    scale: f64,
    theta_tilde: f64,
    spec: &QuadratureSpec,
) -> Result<Evaluation> {
    let k = sel.branch().k();
    let g0 = sel.branch().gamma0();
    let lscale = scale.ln();
    let closed = sel.expand(|m, q, out| {
        let a = (k + q) as f64;
        let z = (m + 1) as f64 * scale / g0;
        out.push((
            1.0,
            a * lscale + ln_tricomi_integral(a, a + 1.0 - theta_tilde, z, spec)?,
        ));
        Ok(())
    });
    resolve("rate moment", closed, spec.rel_tol, || {
        integrate_log_density(
            |x| -theta_tilde * (x / scale).ln_1p() + sel.ln_max_order_pdf_direct(x),
            0.0,
            g0 * k as f64,
            spec,
        )
    })
}

pub fn ras_expectation_eval(cfg: &SystemConfig, spec: &QuadratureSpec) -> Result<Evaluation> {
    cfg.validate()?;
    ln_rate_moment(&ras_selection(cfg)?, cfg.mt as f64, cfg.theta_tilde(), spec)
}

/// `E{(1 + Γ/Mt)^{-θ̃}}`.
pub fn ras_expectation(cfg: &SystemConfig) -> Result<f64> {
    Ok(ras_expectation_eval(cfg, &QuadratureSpec::default())?.value())
}

/// Effective capacity in bits per frame.
pub fn ras_effective_capacity(cfg: &SystemConfig) -> Result<f64> {
    let e = ras_expectation_eval(cfg, &QuadratureSpec::default())?;
    Ok(-e.ln_value / cfg.theta)
}

/// Effective capacity in bits/s/Hz.
pub fn ras_effective_capacity_norm(cfg: &SystemConfig) -> Result<f64> {
    Ok(cfg.normalize(ras_effective_capacity(cfg)?))
}
