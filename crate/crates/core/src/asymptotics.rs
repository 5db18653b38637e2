//! Limits of the transmit-selection effective capacity.
//!
//! As `θ → 0` the optimal policy becomes water-filling and the effective
//! capacity tends to the ergodic capacity, which has a closed form in terms
//! of `Ei`. As `θ → ∞` the policy inverts the channel, `μΓ → α`, and the
//! effective capacity tends to `B T log2(1 + α)` with `α = 1 / E{1/Γ}`.

use std::f64::consts::LN_2;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::config::{db_to_linear, SystemConfig};
use crate::error::Result;
use crate::evaluation::{resolve, Evaluation};
use crate::orderstats::{SelectionConfig, CANCELLATION_WARN_RATIO};
use crate::quad::{integrate_log_density, QuadratureSpec};
use crate::specfun::{exp_integral_ei, ln_binomial, ln_gamma, scaled_exp_integral_en};
use crate::sum::SignedLogSum;
use crate::tas::{solve_cutoff_for, tas_selection, PowerPolicy};

const TERM_REL_ERROR: f64 = 1e-13;

/// Water-filling power coefficient `1/Γ0 - 1/x` above the cutoff.
pub fn waterfilling_mu(cutoff: f64, snr: f64) -> f64 {
    if snr <= cutoff {
        0.0
    } else {
        1.0 / cutoff - 1.0 / snr
    }
}

/// Intermediate integrals of the ergodic closed form for one `(m, q)` term.
///
/// `i1 = ∫_{Γ0}^∞ ln(x/Γ0) x^{q+K-1} e^{-(m+1)x/γ0} dx` is built from
/// `i2 = Σ_r C(q+K-1, r) i3[r]`, `i3[r] = g0^{r+1} i4[r]` and
/// `i4[r] = ∫_0^∞ ln(1 + g0 z) z^r e^{-z} dz`. The large ones are kept as
/// logarithms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErgodicTerms {
    pub m: u32,
    pub q: u32,
    pub g0: f64,
    pub ln_i1: f64,
    pub ln_i2: f64,
    pub ln_i3: Vec<f64>,
    pub i4: Vec<f64>,
    /// Orders `r` whose `i4` came from the `E_n` form instead of the `Ei` form.
    pub stable_i4: Vec<u32>,
}

/// `Σ_{ν=1}^{n} (-1)^{n-ν} (ν-1)! x^{n-ν} + (-1)^{n-1} x^n e^x Ei(-x)` for `x > 0`.
fn i4_bracket(n: u32, x: f64) -> Result<(f64, f64)> {
    let lx = x.ln();
    let mut acc = SignedLogSum::new();
    let ei = exp_integral_ei(-x)?;
    let sign_ei = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    acc.push(sign_ei, n as f64 * lx + x + (-ei).ln());
    for nu in 1..=n {
        let sign = if (n - nu).is_multiple_of(2) { 1.0 } else { -1.0 };
        acc.push(sign, ln_gamma(nu as f64)? + (n - nu) as f64 * lx);
    }
    let v = acc.finish();
    Ok((v.sign * v.ln_abs.exp(), v.cancellation))
}

/// `i4[r]` for `r = 0..=r_max`; the second vector lists orders where the
/// alternating form cancelled and `r! Σ_{n<=r} e^x E_{n+1}(x)` was used.
pub fn ergodic_i4(r_max: u32, g0: f64) -> Result<(Vec<f64>, Vec<u32>)> {
    let x = 1.0 / g0;
    let mut brackets = Vec::with_capacity(r_max as usize + 1);
    let mut stable_from = None;
    for n in 0..=r_max {
        let (b, c) = i4_bracket(n, x)?;
        if stable_from.is_some() || !(b > 0.0) || c > CANCELLATION_WARN_RATIO {
            stable_from.get_or_insert(n);
            let nf = ln_gamma(n as f64 + 1.0)?.exp();
            brackets.push(nf * scaled_exp_integral_en(n + 1, x)?);
        } else {
            brackets.push(b);
        }
    }
    let mut out = Vec::with_capacity(brackets.len());
    let mut stable = Vec::new();
    for r in 0..=r_max {
        // r!/(r-ξ)! with n = r - ξ
        let mut s = 0.0;
        let mut w = 1.0;
        for n in (0..=r).rev() {
            s += w * brackets[n as usize];
            w *= n as f64;
        }
        out.push(s);
        if stable_from.is_some_and(|f| f <= r) {
            stable.push(r);
        }
    }
    Ok((out, stable))
}

/// Intermediate integrals for every `(m, q)` of `sel` at the cutoff `ln Γ0`.
pub fn ergodic_terms(sel: &SelectionConfig, ln_cutoff: f64) -> Result<Vec<ErgodicTerms>> {
    let k = sel.branch().k();
    let g = sel.branch().gamma0();
    let cutoff = ln_cutoff.exp();
    let mut terms = Vec::new();
    for m in 0..sel.num_candidates() {
        let g0 = g / ((m + 1) as f64 * cutoff);
        let lg0 = g0.ln();
        let r_top = sel.table().q_max(m) + k - 1;
        let (i4, stable) = ergodic_i4(r_top, g0)?;
        let ln_i3: Vec<f64> = i4
            .iter()
            .enumerate()
            .map(|(r, v)| (r + 1) as f64 * lg0 + v.ln())
            .collect();
        for q in 0..=sel.table().q_max(m) {
            let n = q + k - 1;
            let mut acc = SignedLogSum::new();
            for r in 0..=n {
                acc.push(1.0, ln_binomial(n, r) + ln_i3[r as usize]);
            }
            let ln_i2 = acc.finish().ln_abs;
            let ln_i1 = (q + k) as f64 * ln_cutoff - (m + 1) as f64 * cutoff / g + ln_i2;
            terms.push(ErgodicTerms {
                m,
                q,
                g0,
                ln_i1,
                ln_i2,
                ln_i3: ln_i3[..=n as usize].to_vec(),
                i4: i4[..=n as usize].to_vec(),
                stable_i4: stable.iter().copied().filter(|&r| r <= n).collect(),
            });
        }
    }
    Ok(terms)
}

/// `E{ln(1 + μ_wf Γ)}` in nats under the water-filling `policy`.
pub fn ergodic_log_moment(sel: &SelectionConfig, policy: &PowerPolicy, spec: &QuadratureSpec) -> Result<Evaluation> {
    let terms = ergodic_terms(sel, policy.ln_cutoff())?;
    let mut it = terms.iter();
    let closed = sel.expand(|m, q, out| {
        let t = it.next().expect("one term per (m, q)");
        debug_assert_eq!((t.m, t.q), (m, q));
        out.push((1.0, t.ln_i1));
        Ok(())
    });
    let lc = policy.ln_cutoff();
    resolve("ergodic capacity", closed, TERM_REL_ERROR, || {
        integrate_log_density(
            |x| {
                let d = x.ln() - lc;
                if d > 0.0 {
                    d.ln() + sel.ln_max_order_pdf_direct(x)
                } else {
                    f64::NEG_INFINITY
                }
            },
            policy.cutoff(),
            sel.branch().gamma0() * sel.branch().k() as f64,
            spec,
        )
    })
}

/// Ergodic capacity with water-filling on the selected transmit antenna, in
/// bits per frame, and the water-filling policy used.
pub fn ergodic_capacity_with_policy(cfg: &SystemConfig) -> Result<(f64, PowerPolicy)> {
    cfg.validate()?;
    let spec = QuadratureSpec::default();
    let sel = tas_selection(cfg)?;
    let policy = solve_cutoff_for(&sel, 0.0, &spec)?;
    let e = ergodic_log_moment(&sel, &policy, &spec)?;
    Ok((cfg.bt() / LN_2 * e.value(), policy))
}

pub fn ergodic_capacity(cfg: &SystemConfig) -> Result<f64> {
    Ok(ergodic_capacity_with_policy(cfg)?.0)
}

/// `ln E{1/Γ}` for the selected SNR; `+inf` when it diverges (`K = L = 1`).
pub fn ln_inverse_moment(sel: &SelectionConfig, spec: &QuadratureSpec) -> Result<Evaluation> {
    let k = sel.branch().k();
    let g0 = sel.branch().gamma0();
    let quad = || integrate_log_density(|x| -x.ln() + sel.ln_max_order_pdf_direct(x), 0.0, g0 * k as f64, spec);
    if k == 1 {
        if sel.num_candidates() == 1 {
            return Ok(Evaluation {
                ln_value: f64::INFINITY,
                cancellation: 1.0,
                method: crate::evaluation::Method::ClosedForm,
            });
        }
        // the m = 0, q = 0 term is Γ(0); only the sum converges
        return Ok(Evaluation {
            ln_value: quad()?,
            cancellation: f64::INFINITY,
            method: crate::evaluation::Method::Quadrature,
        });
    }
    let closed = sel.expand(|m, q, out| {
        let a = (k + q) as f64;
        let lb = ((m + 1) as f64 / g0).ln();
        out.push((1.0, -(a - 1.0) * lb + ln_gamma(a - 1.0)?));
        Ok(())
    });
    resolve("inverse moment", closed, TERM_REL_ERROR, quad)
}

/// `α = 1 / E{1/Γ}` for the transmit-selected SNR of `cfg`.
pub fn alpha_constant(cfg: &SystemConfig) -> Result<f64> {
    cfg.validate()?;
    let e = ln_inverse_moment(&tas_selection(cfg)?, &QuadratureSpec::default())?;
    Ok((-e.ln_value).exp())
}

/// `B T log2(1 + α)` in bits per frame.
pub fn ec_infinity(cfg: &SystemConfig) -> Result<f64> {
    Ok(cfg.bt() * alpha_constant(cfg)?.ln_1p() / LN_2)
}

/// One exact identity evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub index: u32,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

fn big(n: u64) -> BigInt {
    BigInt::from(n)
}

fn factorial(n: u32) -> BigInt {
    (1..=n as u64).fold(BigInt::one(), |acc, k| acc * k)
}

fn binom(n: u32, k: u32) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn rat(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

/// `C(m, q) (q+1)! / (m+1)^{q+1}` exactly.
fn unity_sum_term(m: u32, q: u32) -> BigRational {
    rat(
        binom(m, q) * factorial(q + 1),
        num_traits::pow(big(m as u64 + 1), q as usize + 1),
    )
}

/// `Σ_{q=0}^{m} C(m,q) (q+1)! / (m+1)^{q+1}`.
pub fn unity_sum(m: u32) -> BigRational {
    (0..=m).map(|q| unity_sum_term(m, q)).sum()
}

/// The last `p` terms (`q = m-p+1 ..= m`) of [`unity_sum`].
pub fn unity_partial_sum(m: u32, p: u32) -> BigRational {
    (m + 1 - p..=m).map(|q| unity_sum_term(m, q)).sum()
}

/// Closed form of [`unity_partial_sum`],
/// `(m-p+2)! / (m+1)^{m-p+1} · m(m-1)…(m-p+3) / (p-1)!`, valid for `2 <= p <= m+1`.
pub fn unity_partial_closed_form(m: u32, p: u32) -> BigRational {
    assert!(p >= 2 && p <= m + 1);
    let falling: BigInt = (m + 3 - p..=m).fold(BigInt::one(), |acc, k| acc * big(k as u64));
    rat(
        factorial(m + 2 - p) * falling,
        num_traits::pow(big(m as u64 + 1), (m + 1 - p) as usize) * factorial(p - 1),
    )
}

/// `Σ_{i=0}^{n} C(n+i, i) 2^{n-i}`.
pub fn central_binomial_sum(n: u32) -> BigInt {
    (0..=n)
        .map(|i| binom(n + i, i) * num_traits::pow(big(2), (n - i) as usize))
        .sum()
}

/// `Σ_{m=0}^{n-1} C(n-1, m) (-1)^m / (m+1)`.
pub fn alternating_binomial_sum(n: u32) -> BigRational {
    (0..n)
        .map(|m| {
            let r = rat(binom(n - 1, m), big(m as u64 + 1));
            if m % 2 == 0 {
                r
            } else {
                -r
            }
        })
        .sum()
}

/// Exact checks of the identities that make the cutoff tend to 1.
pub fn identity_suite() -> IdentityReport {
    let mut checks = Vec::new();
    for m in 0..=10 {
        let lhs = unity_sum(m);
        checks.push(IdentityCheck {
            name: "unity_sum",
            index: m,
            holds: lhs.is_one(),
            lhs: lhs.to_string(),
            rhs: "1".into(),
        });
    }
    for n in 0..=15 {
        let lhs = central_binomial_sum(n);
        let rhs = num_traits::pow(big(4), n as usize);
        checks.push(IdentityCheck {
            name: "central_binomial_sum",
            index: n,
            holds: lhs == rhs,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        });
    }
    for n in 1..=10 {
        let lhs = alternating_binomial_sum(n);
        let rhs = rat(BigInt::one(), big(n as u64));
        checks.push(IdentityCheck {
            name: "alternating_binomial_sum",
            index: n,
            holds: lhs == rhs,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        });
    }
    for m in 1..=10 {
        for p in 2..=m + 1 {
            let lhs = unity_partial_sum(m, p);
            let rhs = unity_partial_closed_form(m, p);
            checks.push(IdentityCheck {
                name: "unity_partial_sum",
                index: m * 100 + p,
                holds: lhs == rhs && !lhs.is_zero(),
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            });
        }
    }
    IdentityReport { checks }
}

/// `|Γ0 - 1|` over an SNR sweep for one antenna configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutoffUnityReport {
    pub mt: u32,
    pub mr: u32,
    pub theta: f64,
    /// `(γ0 in dB, Γ0, |Γ0 - 1|)` in sweep order.
    pub points: Vec<(f64, f64, f64)>,
    pub monotone: bool,
    pub final_deviation: f64,
}

impl CutoffUnityReport {
    pub fn passes(&self, final_tol: f64) -> bool {
        self.monotone && self.final_deviation < final_tol
    }
}

/// Solves the optimal cutoff of `base` (antennas and QoS exponent) at each
/// SNR in `gamma0_db` and reports how `|Γ0 - 1|` evolves.
pub fn cutoff_unity_check(base: &SystemConfig, gamma0_db: &[f64]) -> Result<CutoffUnityReport> {
    let spec = QuadratureSpec::default();
    let mut points = Vec::with_capacity(gamma0_db.len());
    for &db in gamma0_db {
        let cfg = base.with_gamma0(db_to_linear(db));
        cfg.validate()?;
        let p = solve_cutoff_for(&tas_selection(&cfg)?, cfg.theta_tilde(), &spec)?;
        let c = p.cutoff();
        points.push((db, c, (c - 1.0).abs()));
    }
    let monotone = points.windows(2).all(|w| w[1].2 < w[0].2);
    let final_deviation = points.last().map_or(f64::NAN, |p| p.2);
    Ok(CutoffUnityReport {
        mt: base.mt,
        mr: base.mr,
        theta: base.theta,
        points,
        monotone,
        final_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn waterfilling_values() {
        assert_eq!(waterfilling_mu(0.5, 0.5), 0.0);
        assert_eq!(waterfilling_mu(0.5, 0.1), 0.0);
        assert!((waterfilling_mu(0.5, 1e300) - 2.0).abs() < 1e-15);
        let p = PowerPolicy::new(0.5, 1e-9).unwrap();
        for x in [0.6, 1.0, 7.0, 100.0] {
            assert!((p.mu(x) - waterfilling_mu(0.5, x)).abs() < 1e-6);
        }
    }

    #[test]
    fn identity_base_cases() {
        assert!(unity_sum(0).is_one());
        assert_eq!(central_binomial_sum(1), big(4));
        assert_eq!(alternating_binomial_sum(2), rat(big(1), big(2)));
        assert!(identity_suite().all_hold());
    }

    #[test]
    fn partial_sum_closed_form_does_not_cover_first_step() {
        // p = 1 leaves the single q = m term, m!/(m+1)^m
        for m in 1..6 {
            let expected = rat(factorial(m), num_traits::pow(big(m as u64 + 1), m as usize));
            assert_eq!(unity_partial_sum(m, 1), expected);
        }
    }

    #[test]
    fn i4_forms_agree_where_both_are_accurate() {
        for g0 in [0.5, 2.0, 30.0] {
            let x = 1.0 / g0;
            for n in 0..6 {
                let (b, c) = i4_bracket(n, x).unwrap();
                let nf = ln_gamma(n as f64 + 1.0).unwrap().exp();
                let s = nf * scaled_exp_integral_en(n + 1, x).unwrap();
                assert!(((b - s) / s).abs() < 1e-12 * c.max(1.0), "g0={g0} n={n}: {b} vs {s}");
            }
        }
    }

    #[test]
    fn alpha_for_single_transmit_pair_of_receivers() {
        let cfg = SystemConfig::new(1, 2, 10.0, 0.1).unwrap();
        assert!((alpha_constant(&cfg).unwrap() - 10.0).abs() < 1e-10);
        assert!((ec_infinity(&cfg).unwrap() - 100.0 * 11f64.log2()).abs() < 1e-8);
        let siso = SystemConfig::new(1, 1, 10.0, 0.1).unwrap();
        assert_eq!(alpha_constant(&siso).unwrap(), 0.0);
        assert_eq!(ec_infinity(&siso).unwrap(), 0.0);
    }
}
