use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BANDWIDTH_HZ: f64 = 100_000.0;
pub const DEFAULT_FRAME_S: f64 = 1e-3;

/// Converts an SNR in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Link parameterization shared by every scheme.
///
/// `theta` is the QoS exponent in 1/bit; rates are bits per frame, i.e. the
/// natural scale is `B * T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub mt: u32,
    pub mr: u32,
    pub bandwidth_hz: f64,
    pub frame_s: f64,
    /// Average SNR, linear.
    pub gamma0: f64,
    pub theta: f64,
}

impl SystemConfig {
    /// Config with the default 100 kHz / 1 ms link.
    pub fn new(mt: u32, mr: u32, gamma0: f64, theta: f64) -> Result<Self> {
        Self::with_link(mt, mr, DEFAULT_BANDWIDTH_HZ, DEFAULT_FRAME_S, gamma0, theta)
    }

    pub fn with_link(mt: u32, mr: u32, bandwidth_hz: f64, frame_s: f64, gamma0: f64, theta: f64) -> Result<Self> {
        let cfg = Self {
            mt,
            mr,
            bandwidth_hz,
            frame_s,
            gamma0,
            theta,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if self.mt == 0 || self.mr == 0 {
            return Err(Error::InvalidConfig(format!(
                "antenna counts must be >= 1 (mt = {}, mr = {})",
                self.mt, self.mr
            )));
        }
        for (name, v) in [
            ("bandwidth_hz", self.bandwidth_hz),
            ("frame_s", self.frame_s),
            ("gamma0", self.gamma0),
            ("theta", self.theta),
        ] {
            if !positive(v) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// `B * T`, bits per frame per bit/s/Hz.
    pub fn bt(&self) -> f64 {
        self.bandwidth_hz * self.frame_s
    }

    /// `θ B T / ln 2`.
    pub fn theta_tilde(&self) -> f64 {
        self.theta * self.bt() / LN_2
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_gamma0(mut self, gamma0: f64) -> Self {
        self.gamma0 = gamma0;
        self
    }

    pub fn with_gamma0_db(self, db: f64) -> Self {
        self.with_gamma0(db_to_linear(db))
    }

    pub fn with_antennas(mut self, mt: u32, mr: u32) -> Self {
        self.mt = mt;
        self.mr = mr;
        self
    }

    /// Bits per frame to bits/s/Hz.
    pub fn normalize(&self, bits_per_frame: f64) -> f64 {
        bits_per_frame / self.bt()
    }
}
