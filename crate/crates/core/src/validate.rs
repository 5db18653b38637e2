//! Self-check suite: exact identities, cutoff convergence, and closed forms
//! against simulation.

use serde::Serialize;

use crate::asymptotics::{cutoff_unity_check, identity_suite};
use crate::config::{db_to_linear, SystemConfig};
use crate::error::Result;
use crate::montecarlo::{mc_effective_capacity, mc_mean_mu, Scheme};
use crate::ras::ras_effective_capacity;
use crate::tas::{joint_selection_config, tas_effective_capacity_with_policy};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidateOptions {
    pub trials: u64,
    pub seed: u64,
    /// Allowed deviation in standard errors.
    pub sigma: f64,
}

impl ValidateOptions {
    pub fn full(seed: u64) -> Self {
        Self {
            trials: 1_000_000,
            seed,
            sigma: 3.0,
        }
    }

    pub fn quick(seed: u64) -> Self {
        Self {
            trials: 100_000,
            seed,
            sigma: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub options: ValidateOptions,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Schemes and antenna pairs compared against simulation.
pub const MC_CONFIGS: [(Scheme, u32, u32); 4] = [
    (Scheme::Ras, 3, 3),
    (Scheme::Tas, 2, 2),
    (Scheme::Tas, 3, 3),
    (Scheme::Joint, 3, 3),
];
pub const MC_SNR_DB: [f64; 3] = [0.0, 10.0, 20.0];
pub const MC_THETA: [f64; 2] = [0.01, 0.1];

pub const CUTOFF_CONFIGS: [(u32, u32); 5] = [(1, 3), (2, 2), (2, 3), (3, 1), (3, 2)];
pub const CUTOFF_THETA: f64 = 1e-5;
pub const CUTOFF_FINAL_TOL: f64 = 0.05;

pub fn cutoff_snr_grid() -> Vec<f64> {
    (0..=8).map(|i| 5.0 * i as f64).collect()
}

/// Closed-form and simulated effective capacity (bits per frame) at one
/// point, plus the simulated `E{μ}` for adaptive schemes.
pub struct McComparison {
    pub analytic: f64,
    pub mc: crate::montecarlo::McEstimate,
    pub mean_mu: Option<crate::montecarlo::McEstimate>,
}

pub fn compare_with_mc(cfg: &SystemConfig, scheme: Scheme, trials: u64, seed: u64) -> Result<McComparison> {
    match scheme {
        Scheme::Ras => Ok(McComparison {
            analytic: ras_effective_capacity(cfg)?,
            mc: mc_effective_capacity(cfg, scheme, None, trials, seed)?,
            mean_mu: None,
        }),
        _ => {
            let tas_cfg = if scheme == Scheme::Joint {
                joint_selection_config(cfg)
            } else {
                *cfg
            };
            let (analytic, policy) = tas_effective_capacity_with_policy(&tas_cfg)?;
            Ok(McComparison {
                analytic,
                mc: mc_effective_capacity(cfg, scheme, Some(&policy), trials, seed)?,
                mean_mu: Some(mc_mean_mu(cfg, scheme, &policy, trials, seed.wrapping_add(1))?),
            })
        }
    }
}

pub fn run_validate(opts: &ValidateOptions) -> Result<ValidationReport> {
    let mut checks = Vec::new();

    let ids = identity_suite();
    for name in [
        "unity_sum",
        "central_binomial_sum",
        "alternating_binomial_sum",
        "unity_partial_sum",
    ] {
        let group: Vec<_> = ids.checks.iter().filter(|c| c.name == name).collect();
        let bad: Vec<_> = group.iter().filter(|c| !c.holds).map(|c| c.index).collect();
        checks.push(CheckResult {
            name: format!("identity {name}"),
            passed: bad.is_empty(),
            detail: if bad.is_empty() {
                format!("{} exact cases hold", group.len())
            } else {
                format!("fails at {bad:?}")
            },
        });
    }

    for (mt, mr) in CUTOFF_CONFIGS {
        let base = SystemConfig::new(mt, mr, 1.0, CUTOFF_THETA)?;
        let r = cutoff_unity_check(&base, &cutoff_snr_grid())?;
        let devs: Vec<String> = r.points.iter().map(|p| format!("{:.0}dB:{:.4}", p.0, p.2)).collect();
        checks.push(CheckResult {
            name: format!("cutoff->1 {mt}x{mr}"),
            passed: r.passes(CUTOFF_FINAL_TOL),
            detail: format!("|cutoff-1| {}; monotone={}", devs.join(" "), r.monotone),
        });
    }

    for (scheme, mt, mr) in MC_CONFIGS {
        for db in MC_SNR_DB {
            for theta in MC_THETA {
                let cfg = SystemConfig::new(mt, mr, db_to_linear(db), theta)?;
                let c = compare_with_mc(&cfg, scheme, opts.trials, opts.seed)?;
                let diff = (c.analytic - c.mc.mean).abs();
                let tol = (0.01 * c.analytic).max(opts.sigma * c.mc.std_error);
                checks.push(CheckResult {
                    name: format!("ec {} {mt}x{mr} {db}dB theta={theta}", scheme.as_str()),
                    passed: diff <= tol,
                    detail: format!(
                        "analytic {:.4} mc {:.4} se {:.4} (bits/s/Hz)",
                        cfg.normalize(c.analytic),
                        cfg.normalize(c.mc.mean),
                        cfg.normalize(c.mc.std_error)
                    ),
                });
                if let Some(mu) = c.mean_mu {
                    checks.push(CheckResult {
                        name: format!("mean mu {} {mt}x{mr} {db}dB theta={theta}", scheme.as_str()),
                        passed: mu.within(1.0, opts.sigma),
                        detail: format!("mc {:.6} se {:.6}", mu.mean, mu.std_error),
                    });
                }
            }
        }
    }
    Ok(ValidationReport { options: *opts, checks })
}
