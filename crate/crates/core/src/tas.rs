//! Transmit antenna selection with QoS-driven power adaptation.
//!
//! The transmitter uses the antenna with the largest SNR (max of `L = Mt`
//! gamma variates of shape `K = Mr`) and scales its power by
//!
//! ```text
//! μ(x) = Γ0^{-1/(θ̃+1)} x^{-θ̃/(θ̃+1)} - 1/x   for x >= Γ0,   0 otherwise,
//! ```
//!
//! with the cutoff `Γ0` fixed by `E{μ} = 1`. Then `1 + μ x = (x/Γ0)^{1/(θ̃+1)}`
//! above the cutoff.
//!
//! The cutoff shrinks like `(1+α)^{-θ̃}` for strict QoS and underflows long
//! before the closed forms stop making sense, so policies store `ln Γ0`.

use std::f64::consts::LN_2;

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::evaluation::{resolve, Evaluation};
use crate::orderstats::{BranchSnrDist, SelectionConfig};
use crate::quad::{integrate_log_density, QuadratureSpec};
use crate::ras::ln_rate_moment;
use crate::specfun::{ln_lower_gamma, ln_upper_gamma};
use crate::sum::SignedLogSum;

/// Relative accuracy assumed for one incomplete-gamma term.
const GAMMA_TERM_REL_ERROR: f64 = 1e-14;

/// Required `|E{μ} - 1|` at the solved cutoff.
pub const POWER_CONSTRAINT_TOL: f64 = 1e-9;

/// Cutoff and QoS exponent of the optimal power policy. `theta_tilde = 0`
/// is the water-filling policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPolicy {
    ln_cutoff: f64,
    theta_tilde: f64,
}

impl PowerPolicy {
    pub fn new(cutoff: f64, theta_tilde: f64) -> Result<Self> {
        if !(cutoff > 0.0) {
            return Err(Error::InvalidConfig(format!("cutoff must be positive, got {cutoff}")));
        }
        Self::from_ln_cutoff(cutoff.ln(), theta_tilde)
    }

    pub fn from_ln_cutoff(ln_cutoff: f64, theta_tilde: f64) -> Result<Self> {
        if !ln_cutoff.is_finite() || !(theta_tilde >= 0.0) || !theta_tilde.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "power policy needs finite ln cutoff and theta_tilde >= 0 (got {ln_cutoff}, {theta_tilde})"
            )));
        }
        Ok(Self { ln_cutoff, theta_tilde })
    }

    pub fn water_filling(cutoff: f64) -> Result<Self> {
        Self::new(cutoff, 0.0)
    }

    /// `Γ0`; underflows to 0 for very strict QoS, see [`Self::ln_cutoff`].
    pub fn cutoff(&self) -> f64 {
        self.ln_cutoff.exp()
    }

    pub fn ln_cutoff(&self) -> f64 {
        self.ln_cutoff
    }

    pub fn theta_tilde(&self) -> f64 {
        self.theta_tilde
    }

    /// `θ̃ / (θ̃ + 1)`.
    pub fn exponent(&self) -> f64 {
        self.theta_tilde / (self.theta_tilde + 1.0)
    }

    /// `ln(1 + μ(x) x)`: zero below the cutoff, `ln(x/Γ0)/(θ̃+1)` above.
    pub fn ln_one_plus_mu_snr(&self, snr: f64) -> f64 {
        ((snr.ln() - self.ln_cutoff) / (self.theta_tilde + 1.0)).max(0.0)
    }

    pub fn mu(&self, snr: f64) -> f64 {
        if !(snr > 0.0) {
            return 0.0;
        }
        self.ln_one_plus_mu_snr(snr).exp_m1() / snr
    }

    /// `ln μ(x)`, `-inf` at and below the cutoff.
    pub fn ln_mu(&self, snr: f64) -> f64 {
        let d = self.ln_one_plus_mu_snr(snr);
        if d > 0.0 {
            d.exp_m1().ln() - snr.ln()
        } else {
            f64::NEG_INFINITY
        }
    }
}

pub fn mu_coefficient(policy: &PowerPolicy, snr: f64) -> f64 {
    policy.mu(snr)
}

/// `B T log2(1 + μ(snr) snr)` in bits per frame.
pub fn simo_service_rate(cfg: &SystemConfig, policy: &PowerPolicy, snr: f64) -> f64 {
    cfg.bt() * policy.ln_one_plus_mu_snr(snr) / LN_2
}

/// Max of `Mt` candidates, each of shape `Mr`.
pub fn tas_selection(cfg: &SystemConfig) -> Result<SelectionConfig> {
    SelectionConfig::new(cfg.mt, BranchSnrDist::new(cfg.mr, cfg.gamma0)?)
}

/// One transmit-receive pair out of `Mt Mr`, used with every TAS routine.
pub fn joint_selection_config(cfg: &SystemConfig) -> SystemConfig {
    cfg.with_antennas(cfg.mt * cfg.mr, 1)
}

/// `E{μ}` under `policy`.
///
/// Term `(m, q)` with `a = K + q`, `b = (m+1)/γ0`, `s = θ̃/(θ̃+1)` is
/// `Γ0^{-(1-s)} b^{-(a-s)} Γ(a-s, bΓ0) - b^{-(a-1)} Γ(a-1, bΓ0)`;
/// `Γ(0, ·)` is `E1`.
pub fn mean_mu_eval(sel: &SelectionConfig, policy: &PowerPolicy, spec: &QuadratureSpec) -> Result<Evaluation> {
    let k = sel.branch().k();
    let g0 = sel.branch().gamma0();
    let s = policy.exponent();
    let lc = policy.ln_cutoff;
    let closed = sel.expand(|m, q, out| {
        let a = (k + q) as f64;
        let lb = ((m + 1) as f64 / g0).ln();
        let lx = lb + lc;
        out.push((1.0, -(1.0 - s) * lc - (a - s) * lb + ln_upper_gamma(a - s, lx)));
        out.push((-1.0, -(a - 1.0) * lb + ln_upper_gamma(a - 1.0, lx)));
        Ok(())
    });
    resolve("mean power coefficient", closed, GAMMA_TERM_REL_ERROR, || {
        integrate_log_density(
            |x| policy.ln_mu(x) + sel.ln_max_order_pdf_direct(x),
            policy.cutoff(),
            g0 * k as f64,
            spec,
        )
    })
}

/// `E{μ}` for the QoS exponent of `cfg` and the given cutoff.
pub fn mean_mu(cfg: &SystemConfig, cutoff: f64) -> Result<f64> {
    cfg.validate()?;
    let policy = PowerPolicy::new(cutoff, cfg.theta_tilde())?;
    Ok(mean_mu_eval(&tas_selection(cfg)?, &policy, &QuadratureSpec::default())?.value())
}

/// Solves `E{μ} = 1` for the cutoff.
///
/// `E{μ}` decreases strictly in `Γ0` and is below 1 at `Γ0 = 1`, so the root
/// is bracketed in `ln Γ0 ∈ [2^j ln 1e-12, 0]` for some `j`; Brent's method
/// finishes the solve.
pub fn solve_cutoff_for(sel: &SelectionConfig, theta_tilde: f64, spec: &QuadratureSpec) -> Result<PowerPolicy> {
    let f = |y: f64| -> Result<f64> {
        let p = PowerPolicy::from_ln_cutoff(y, theta_tilde)?;
        Ok(mean_mu_eval(sel, &p, spec)?.value() - 1.0)
    };
    let mut hi = 0.0;
    let mut f_hi = f(hi)?;
    let mut lo = 1e-12f64.ln();
    let mut f_lo = f(lo)?;
    let mut grow = 0;
    while f_lo <= 0.0 {
        if f_lo == 0.0 {
            return PowerPolicy::from_ln_cutoff(lo, theta_tilde);
        }
        hi = lo;
        f_hi = f_lo;
        lo *= 2.0;
        f_lo = f(lo)?;
        grow += 1;
        if grow > 40 || !f_lo.is_finite() {
            return Err(Error::Bracket(format!("E{{mu}} - 1 stayed {f_lo:e} at ln cutoff {lo}")));
        }
    }
    if !(f_hi < 0.0) {
        return Err(Error::Bracket(format!(
            "E{{mu}} - 1 = {f_hi:e} at ln cutoff {hi}, expected negative"
        )));
    }
    let y = brent(f, lo, hi, f_lo, f_hi, POWER_CONSTRAINT_TOL * 0.1)?;
    PowerPolicy::from_ln_cutoff(y, theta_tilde)
}

/// Optimal policy for `cfg`.
pub fn solve_cutoff(cfg: &SystemConfig) -> Result<PowerPolicy> {
    cfg.validate()?;
    solve_cutoff_for(&tas_selection(cfg)?, cfg.theta_tilde(), &QuadratureSpec::default())
}

fn brent<F>(f: F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64, ftol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut bisected = true;
    for _ in 0..200 {
        if fb.abs() <= ftol {
            return Ok(b);
        }
        if (b - a).abs() <= 4.0 * f64::EPSILON * b.abs().max(1.0) {
            break;
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let outside = !((s > lo.min(b)) && (s < lo.max(b)));
        let tol = 2.0 * f64::EPSILON * b.abs().max(1.0);
        if outside
            || (bisected && (s - b).abs() >= (b - c).abs() / 2.0)
            || (!bisected && (s - b).abs() >= (c - d).abs() / 2.0)
            || (bisected && (b - c).abs() < tol)
            || (!bisected && (c - d).abs() < tol)
        {
            s = 0.5 * (a + b);
            bisected = true;
        } else {
            bisected = false;
        }
        let fs = f(s)?;
        d = c;
        c = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    if fb.abs() <= POWER_CONSTRAINT_TOL {
        return Ok(b);
    }
    Err(Error::Convergence {
        what: "cutoff root solve",
        iterations: 200,
        estimate: b,
        error: fb,
    })
}

/// `E{(1 + μΓ)^{-θ̃}} = F_(L)(Γ0) + E{(Γ/Γ0)^{-s}; Γ >= Γ0}`.
pub fn tas_expectation_eval(sel: &SelectionConfig, policy: &PowerPolicy, spec: &QuadratureSpec) -> Result<Evaluation> {
    let k = sel.branch().k();
    let g0 = sel.branch().gamma0();
    let s = policy.exponent();
    let lc = policy.ln_cutoff;
    let closed = sel.expand(|m, q, out| {
        let a = (k + q) as f64;
        let lb = ((m + 1) as f64 / g0).ln();
        let lx = lb + lc;
        out.push((1.0, -a * lb + ln_lower_gamma(a, lx)));
        out.push((1.0, s * lc - (a - s) * lb + ln_upper_gamma(a - s, lx)));
        Ok(())
    });
    resolve("transmit selection expectation", closed, GAMMA_TERM_REL_ERROR, || {
        let below = sel.num_candidates() as f64 * sel.branch().ln_cdf(policy.cutoff());
        let above = integrate_log_density(
            |x| {
                if x < policy.cutoff() {
                    f64::NEG_INFINITY
                } else {
                    -s * (x.ln() - lc) + sel.ln_max_order_pdf_direct(x)
                }
            },
            policy.cutoff(),
            g0 * k as f64,
            spec,
        )?;
        let mut acc = SignedLogSum::new();
        acc.push(1.0, below);
        acc.push(1.0, above);
        Ok(acc.finish().ln_abs)
    })
}

pub fn tas_expectation(cfg: &SystemConfig, policy: &PowerPolicy) -> Result<f64> {
    cfg.validate()?;
    Ok(tas_expectation_eval(&tas_selection(cfg)?, policy, &QuadratureSpec::default())?.value())
}

/// Effective capacity under the optimal policy, in bits per frame, together
/// with the solved policy.
pub fn tas_effective_capacity_with_policy(cfg: &SystemConfig) -> Result<(f64, PowerPolicy)> {
    cfg.validate()?;
    let spec = QuadratureSpec::default();
    let sel = tas_selection(cfg)?;
    let policy = solve_cutoff_for(&sel, cfg.theta_tilde(), &spec)?;
    let e = tas_expectation_eval(&sel, &policy, &spec)?;
    Ok((-e.ln_value / cfg.theta, policy))
}

pub fn tas_effective_capacity(cfg: &SystemConfig) -> Result<f64> {
    Ok(tas_effective_capacity_with_policy(cfg)?.0)
}

/// Effective capacity with `μ ≡ 1` on the selected antenna, in bits per frame.
pub fn constant_power_effective_capacity(cfg: &SystemConfig) -> Result<f64> {
    cfg.validate()?;
    let e = ln_rate_moment(&tas_selection(cfg)?, 1.0, cfg.theta_tilde(), &QuadratureSpec::default())?;
    Ok(-e.ln_value / cfg.theta)
}
