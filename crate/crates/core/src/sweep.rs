//! Parameter sweeps over antennas, SNR, QoS exponent and power policy.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{ec_infinity, ergodic_capacity};
use crate::config::{db_to_linear, SystemConfig, DEFAULT_BANDWIDTH_HZ, DEFAULT_FRAME_S};
use crate::error::{Error, Result};
use crate::montecarlo::{mc_effective_capacity, Power, Scheme};
use crate::ras::ras_effective_capacity;
use crate::tas::{constant_power_effective_capacity, joint_selection_config, tas_effective_capacity_with_policy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub scheme: Scheme,
    pub mt: Vec<u32>,
    pub mr: Vec<u32>,
    pub gamma0_db: Vec<f64>,
    pub theta: Vec<f64>,
    /// Ignored for receive selection, which always uses equal power.
    pub power: Vec<Power>,
    pub bandwidth_hz: f64,
    pub frame_s: f64,
    /// Monte Carlo trials per grid point; `None` skips the simulation.
    pub mc_trials: Option<u64>,
    pub seed: u64,
    pub asymptotes: bool,
    /// Vary `theta` fastest instead of `gamma0_db`.
    pub theta_innermost: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            scheme: Scheme::Tas,
            mt: vec![2],
            mr: vec![2],
            gamma0_db: vec![0.0, 10.0, 20.0],
            theta: vec![0.01],
            power: vec![Power::Optimal],
            bandwidth_hz: DEFAULT_BANDWIDTH_HZ,
            frame_s: DEFAULT_FRAME_S,
            mc_trials: None,
            seed: 0,
            asymptotes: false,
            theta_innermost: false,
        }
    }
}

/// One grid point. Capacities are normalized by `B T` (bits/s/Hz).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub gamma0_db: f64,
    pub theta: f64,
    pub scheme: Scheme,
    pub power: Power,
    pub ec_norm_analytic: f64,
    pub ec_norm_mc: Option<f64>,
    pub mc_std_error: Option<f64>,
    pub cutoff: Option<f64>,
    pub ergodic_norm: Option<f64>,
    pub ec_inf_norm: Option<f64>,
    pub mt: u32,
    pub mr: u32,
}

/// A grid point that failed to evaluate.
#[derive(Debug, Clone, PartialEq)]
pub struct PointError {
    pub mt: u32,
    pub mr: u32,
    pub power: Power,
    pub gamma0_db: f64,
    pub theta: f64,
    pub source: Error,
}

impl std::fmt::Display for PointError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "mt={} mr={} power={} gamma0_db={:?} theta={:?}: {}",
            self.mt,
            self.mr,
            self.power.as_str(),
            self.gamma0_db,
            self.theta,
            self.source
        )
    }
}

impl std::error::Error for PointError {}

#[derive(Debug, Clone, Copy)]
struct Point {
    mt: u32,
    mr: u32,
    power: Power,
    gamma0_db: f64,
    theta: f64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let empty = |n: &str| Error::InvalidConfig(format!("sweep needs at least one {n} value"));
        if self.mt.is_empty() {
            return Err(empty("mt"));
        }
        if self.mr.is_empty() {
            return Err(empty("mr"));
        }
        if self.gamma0_db.is_empty() {
            return Err(empty("snr"));
        }
        if self.theta.is_empty() {
            return Err(empty("theta"));
        }
        if self.power.is_empty() {
            return Err(empty("power"));
        }
        if self.mc_trials == Some(0) {
            return Err(Error::InvalidConfig("trials must be positive".into()));
        }
        if let Some(db) = self.gamma0_db.iter().find(|d| !d.is_finite()) {
            return Err(Error::InvalidConfig(format!("snr {db} dB is not finite")));
        }
        for &mt in &self.mt {
            for &mr in &self.mr {
                SystemConfig::with_link(mt, mr, self.bandwidth_hz, self.frame_s, 1.0, self.theta[0])?;
            }
        }
        for &t in &self.theta {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidConfig(format!("theta must be positive, got {t}")));
            }
        }
        Ok(())
    }

    fn powers(&self) -> Vec<Power> {
        if self.scheme == Scheme::Ras {
            return vec![Power::Constant];
        }
        let mut out = Vec::new();
        for p in &self.power {
            if !out.contains(p) {
                out.push(*p);
            }
        }
        out
    }

    /// Grid in output order: `mt`, `mr`, power, then the two sweep axes.
    fn points(&self) -> Vec<Point> {
        let mut pts = Vec::new();
        for &mt in &self.mt {
            for &mr in &self.mr {
                for power in self.powers() {
                    let mut push = |gamma0_db, theta| {
                        pts.push(Point {
                            mt,
                            mr,
                            power,
                            gamma0_db,
                            theta,
                        })
                    };
                    if self.theta_innermost {
                        for &g in &self.gamma0_db {
                            for &t in &self.theta {
                                push(g, t);
                            }
                        }
                    } else {
                        for &t in &self.theta {
                            for &g in &self.gamma0_db {
                                push(g, t);
                            }
                        }
                    }
                }
            }
        }
        pts
    }

    fn evaluate(&self, p: Point) -> Result<SweepRow> {
        let cfg = SystemConfig::with_link(
            p.mt,
            p.mr,
            self.bandwidth_hz,
            self.frame_s,
            db_to_linear(p.gamma0_db),
            p.theta,
        )?;
        let tas_cfg = match self.scheme {
            Scheme::Joint => joint_selection_config(&cfg),
            _ => cfg,
        };
        let (ec, policy) = match (self.scheme, p.power) {
            (Scheme::Ras, _) => (ras_effective_capacity(&cfg)?, None),
            (_, Power::Constant) => (constant_power_effective_capacity(&tas_cfg)?, None),
            (_, Power::Optimal) => {
                let (ec, policy) = tas_effective_capacity_with_policy(&tas_cfg)?;
                (ec, Some(policy))
            }
        };
        let mc = match self.mc_trials {
            Some(n) => Some(mc_effective_capacity(&cfg, self.scheme, policy.as_ref(), n, self.seed)?),
            None => None,
        };
        let (ergodic, ec_inf) = if self.asymptotes && self.scheme != Scheme::Ras {
            (
                Some(cfg.normalize(ergodic_capacity(&tas_cfg)?)),
                Some(cfg.normalize(ec_infinity(&tas_cfg)?)),
            )
        } else {
            (None, None)
        };
        Ok(SweepRow {
            gamma0_db: p.gamma0_db,
            theta: p.theta,
            scheme: self.scheme,
            power: p.power,
            ec_norm_analytic: cfg.normalize(ec),
            ec_norm_mc: mc.map(|m| cfg.normalize(m.mean)),
            mc_std_error: mc.map(|m| cfg.normalize(m.std_error)),
            cutoff: policy.map(|pp| pp.cutoff()),
            ergodic_norm: ergodic,
            ec_inf_norm: ec_inf,
            mt: p.mt,
            mr: p.mr,
        })
    }
}

/// Evaluates every grid point (in parallel on the current rayon pool) and
/// returns rows in grid order. The first failing point, in grid order, is
/// reported.
pub fn run_sweep(spec: &SweepSpec) -> std::result::Result<Vec<SweepRow>, PointError> {
    let pts = spec.points();
    spec.validate().map_err(|source| {
        let p = pts.first().copied().unwrap_or(Point {
            mt: 0,
            mr: 0,
            power: Power::Constant,
            gamma0_db: f64::NAN,
            theta: f64::NAN,
        });
        PointError {
            mt: p.mt,
            mr: p.mr,
            power: p.power,
            gamma0_db: p.gamma0_db,
            theta: p.theta,
            source,
        }
    })?;
    pts.par_iter()
        .map(|&p| {
            spec.evaluate(p).map_err(|source| PointError {
                mt: p.mt,
                mr: p.mr,
                power: p.power,
                gamma0_db: p.gamma0_db,
                theta: p.theta,
                source,
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}
