//! Monte Carlo counterpart of every closed-form quantity.
//!
//! Channel coefficients are i.i.d. circularly-symmetric complex Gaussians
//! with `E|h|^2 = 1`. Trials are split into fixed batches of [`BATCH_SIZE`];
//! batch `i` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `i`, and
//! batch statistics are merged pairwise in batch order, so results depend
//! only on `(n, seed)` and not on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::ras::miso_service_rate;
use crate::tas::{simo_service_rate, PowerPolicy};

pub const BATCH_SIZE: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Ras,
    Tas,
    Joint,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Ras => "ras",
            Scheme::Tas => "tas",
            Scheme::Joint => "joint",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Power {
    Optimal,
    Constant,
}

impl Power {
    pub fn as_str(&self) -> &'static str {
        match self {
            Power::Optimal => "optimal",
            Power::Constant => "constant",
        }
    }
}

/// One channel realisation, `gains[i * mr + j]` linking transmit `i` to receive `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    pub mt: u32,
    pub mr: u32,
    pub gains: Vec<(f64, f64)>,
}

impl ChannelDraw {
    pub fn sample<R: Rng + ?Sized>(mt: u32, mr: u32, rng: &mut R) -> Self {
        let mut d = Self {
            mt,
            mr,
            gains: Vec::with_capacity((mt * mr) as usize),
        };
        d.resample(rng);
        d
    }

    pub fn resample<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        self.gains.clear();
        for _ in 0..self.mt * self.mr {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            self.gains.push((s * re, s * im));
        }
    }

    fn power(&self, i: u32, j: u32) -> f64 {
        let (re, im) = self.gains[(i * self.mr + j) as usize];
        re * re + im * im
    }

    /// SNR of the antenna the scheme selects, at average SNR `gamma0`.
    pub fn selected_snr(&self, scheme: Scheme, gamma0: f64) -> f64 {
        let best = match scheme {
            Scheme::Ras => (0..self.mr)
                .map(|j| (0..self.mt).map(|i| self.power(i, j)).sum::<f64>())
                .fold(0.0, f64::max),
            Scheme::Tas => (0..self.mt)
                .map(|i| (0..self.mr).map(|j| self.power(i, j)).sum::<f64>())
                .fold(0.0, f64::max),
            Scheme::Joint => (0..self.mt * self.mr)
                .map(|k| self.power(k / self.mr, k % self.mr))
                .fold(0.0, f64::max),
        };
        gamma0 * best
    }
}

pub fn sample_selected_snr<R: Rng + ?Sized>(cfg: &SystemConfig, scheme: Scheme, rng: &mut R) -> f64 {
    ChannelDraw::sample(cfg.mt, cfg.mr, rng).selected_snr(scheme, cfg.gamma0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
    pub seed: u64,
}

impl McEstimate {
    /// `|mean - value| <= k * std_error`.
    pub fn within(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_error
    }
}

/// Mean and centred second moment of values `e^{shift} v_i`.
#[derive(Debug, Clone, Copy)]
struct Moments {
    count: u64,
    shift: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn from_values(values: &[f64], shift: f64) -> Self {
        let count = values.len() as u64;
        let mean = values.iter().sum::<f64>() / count as f64;
        let m2 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        Self { count, shift, mean, m2 }
    }

    fn merge(self, other: Self) -> Self {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let shift = self.shift.max(other.shift);
        let (fa, fb) = ((self.shift - shift).exp(), (other.shift - shift).exp());
        let (ma, mb) = (self.mean * fa, other.mean * fb);
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let delta = mb - ma;
        Self {
            count: self.count + other.count,
            shift,
            mean: ma + delta * nb / n,
            m2: self.m2 * fa * fa + other.m2 * fb * fb + delta * delta * na * nb / n,
        }
    }

    fn sd(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        (self.m2 / (self.count - 1) as f64).sqrt()
    }
}

fn pairwise(mut v: Vec<Moments>) -> Moments {
    while v.len() > 1 {
        v = v
            .chunks(2)
            .map(|c| if c.len() == 2 { c[0].merge(c[1]) } else { c[0] })
            .collect();
    }
    v[0]
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidConfig("Monte Carlo needs at least one trial".into()));
    }
    Ok(())
}

/// Runs `draw` `n` times across seeded batches and returns the merged moments.
/// With `log_scale`, `draw` yields logarithms and the moments are of `exp`.
fn run<F>(n: u64, seed: u64, log_scale: bool, draw: F) -> Moments
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let batches = n.div_ceil(BATCH_SIZE);
    let parts: Vec<Moments> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let len = BATCH_SIZE.min(n - b * BATCH_SIZE);
            let mut vals: Vec<f64> = (0..len).map(|_| draw(&mut rng)).collect();
            if log_scale {
                let shift = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                for v in &mut vals {
                    *v = (*v - shift).exp();
                }
                Moments::from_values(&vals, shift)
            } else {
                Moments::from_values(&vals, 0.0)
            }
        })
        .collect();
    pairwise(parts)
}

/// Sample mean of `draw` with standard error `sd / √n`.
pub fn mc_mean<F>(n: u64, seed: u64, draw: F) -> Result<McEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    check_n(n)?;
    let m = run(n, seed, false, draw);
    Ok(McEstimate {
        mean: m.mean,
        std_error: m.sd() / (n as f64).sqrt(),
        n,
        seed,
    })
}

/// `-(1/θ) ln mean(e^{-θR})` for rates drawn by `rate`, with the delta-method
/// standard error `sd(e^{-θR}) / (θ √n mean(e^{-θR}))`.
pub fn mc_effective_capacity_with<F>(theta: f64, n: u64, seed: u64, rate: F) -> Result<McEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    check_n(n)?;
    if !(theta > 0.0) {
        return Err(Error::InvalidConfig(format!("theta must be positive, got {theta}")));
    }
    let m = run(n, seed, true, |rng| -theta * rate(rng));
    let ln_mean = m.shift + m.mean.ln();
    Ok(McEstimate {
        mean: -ln_mean / theta,
        std_error: m.sd() / (m.mean * theta * (n as f64).sqrt()),
        n,
        seed,
    })
}

/// Rate in bits per frame of one draw under the scheme and power policy.
/// `policy = None` is constant power (and the only option for receive selection).
pub fn service_rate(cfg: &SystemConfig, scheme: Scheme, policy: Option<&PowerPolicy>, snr: f64) -> f64 {
    match (scheme, policy) {
        (Scheme::Ras, _) => miso_service_rate(cfg, snr),
        (_, Some(p)) => simo_service_rate(cfg, p, snr),
        (_, None) => cfg.bt() * snr.ln_1p() / std::f64::consts::LN_2,
    }
}

fn check_scheme(scheme: Scheme, policy: Option<&PowerPolicy>) -> Result<()> {
    if scheme == Scheme::Ras && policy.is_some() {
        return Err(Error::InvalidConfig("receive selection has no power adaptation".into()));
    }
    Ok(())
}

/// Effective capacity in bits per frame.
pub fn mc_effective_capacity(
    cfg: &SystemConfig,
    scheme: Scheme,
    policy: Option<&PowerPolicy>,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    cfg.validate()?;
    check_scheme(scheme, policy)?;
    mc_effective_capacity_with(cfg.theta, n, seed, |rng| {
        service_rate(cfg, scheme, policy, sample_selected_snr(cfg, scheme, rng))
    })
}

/// Mean rate `E{R}` in bits per frame.
pub fn mc_ergodic_rate(
    cfg: &SystemConfig,
    scheme: Scheme,
    policy: Option<&PowerPolicy>,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    cfg.validate()?;
    check_scheme(scheme, policy)?;
    mc_mean(n, seed, |rng| {
        service_rate(cfg, scheme, policy, sample_selected_snr(cfg, scheme, rng))
    })
}

/// `E{μ(Γ)}` over the transmit-selected (or jointly selected) SNR.
pub fn mc_mean_mu(cfg: &SystemConfig, scheme: Scheme, policy: &PowerPolicy, n: u64, seed: u64) -> Result<McEstimate> {
    cfg.validate()?;
    check_scheme(scheme, Some(policy))?;
    mc_mean(n, seed, |rng| policy.mu(sample_selected_snr(cfg, scheme, rng)))
}

/// Mean selected SNR.
pub fn mc_mean_selected_snr(cfg: &SystemConfig, scheme: Scheme, n: u64, seed: u64) -> Result<McEstimate> {
    cfg.validate()?;
    mc_mean(n, seed, |rng| sample_selected_snr(cfg, scheme, rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_rate_gives_exact_capacity() {
        let e = mc_effective_capacity_with(0.3, 25_001, 7, |_| 42.0).unwrap();
        assert!((e.mean - 42.0).abs() < 1e-12);
        assert_eq!(e.std_error, 0.0);
        assert_eq!(e.n, 25_001);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let cfg = SystemConfig::new(2, 3, 5.0, 0.05).unwrap();
        let a = mc_effective_capacity(&cfg, Scheme::Tas, None, 30_000, 11).unwrap();
        let b = mc_effective_capacity(&cfg, Scheme::Tas, None, 30_000, 11).unwrap();
        assert_eq!(a, b);
        let c = mc_effective_capacity(&cfg, Scheme::Tas, None, 30_000, 12).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn single_branch_is_exponential() {
        let cfg = SystemConfig::new(1, 1, 4.0, 0.05).unwrap();
        let m = mc_mean_selected_snr(&cfg, Scheme::Ras, 200_000, 3).unwrap();
        assert!(m.within(4.0, 4.0), "{m:?}");
    }

    #[test]
    fn selection_picks_the_right_aggregate() {
        let d = ChannelDraw {
            mt: 2,
            mr: 2,
            gains: vec![(1.0, 0.0), (0.0, 0.0), (0.0, 0.5), (0.0, 2.0)],
        };
        // powers [[1, 0], [0.25, 4]]
        assert_eq!(d.selected_snr(Scheme::Ras, 1.0), 4.0);
        assert_eq!(d.selected_snr(Scheme::Tas, 1.0), 4.25);
        assert_eq!(d.selected_snr(Scheme::Joint, 2.0), 8.0);
    }

    #[test]
    fn receive_selection_rejects_policy() {
        let cfg = SystemConfig::new(2, 2, 5.0, 0.05).unwrap();
        let p = PowerPolicy::new(0.5, 1.0).unwrap();
        assert!(mc_effective_capacity(&cfg, Scheme::Ras, Some(&p), 10, 0).is_err());
        assert!(mc_mean(0, 0, |_| 1.0).is_err());
    }

    #[test]
    fn small_theta_approaches_mean_rate() {
        let cfg = SystemConfig::new(2, 2, 10.0, 1e-6).unwrap();
        let ec = mc_effective_capacity(&cfg, Scheme::Tas, None, 50_000, 5).unwrap();
        let r = mc_ergodic_rate(&cfg, Scheme::Tas, None, 50_000, 5).unwrap();
        assert!((ec.mean - r.mean).abs() / r.mean < 1e-4);
    }
}
