//! Distribution of the selected-antenna SNR.
//!
//! A candidate antenna sees `Γ = γ0 Σ_{k=1}^{K} |h_k|^2`, a gamma variate with
//! shape `K` and scale `γ0`. Selection keeps the largest of `L` independent
//! candidates. The closed forms expand `F(x)^{L-1}` with the binomial theorem
//! and `(Σ_{k<K} x^k / (γ0^k k!))^m` by repeated convolution, which gives
//!
//! ```text
//! f_(L)(x) = L / (γ0^K Γ(K)) Σ_m C(L-1, m) (-1)^m Σ_q c_q^(m) x^{q+K-1} e^{-(m+1)x/γ0}
//! ```
//!
//! The same `(K, L)` machinery serves receive selection (`K = Mt`, `L = Mr`)
//! and transmit selection (`K = Mr`, `L = Mt`).

use crate::error::{domain, Error, Result};
use crate::specfun::{ln_binomial, ln_gamma, ln_lower_gamma, ln_upper_gamma};
use crate::sum::{SeriesValue, SignedLogSum};

/// Above this condition number an alternating expansion is reported as
/// losing precision.
pub const CANCELLATION_WARN_RATIO: f64 = 1e6;

/// Largest antenna count per side the expansions are validated for.
pub const SUPPORTED_ANTENNAS: u32 = 8;

/// Gamma law of one candidate's SNR: shape `k`, scale `gamma0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSnrDist {
    k: u32,
    gamma0: f64,
}

impl BranchSnrDist {
    pub fn new(k: u32, gamma0: f64) -> Result<Self> {
        if k == 0 || !(gamma0 > 0.0) || !gamma0.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "branch needs k >= 1 and gamma0 > 0 (k = {k}, gamma0 = {gamma0})"
            )));
        }
        Ok(Self { k, gamma0 })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    fn ln_norm(&self) -> f64 {
        self.k as f64 * self.gamma0.ln() + ln_gamma(self.k as f64).unwrap()
    }

    /// `ln f(x)`; `-inf` where the density vanishes.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        let power = if self.k == 1 { 0.0 } else { (self.k - 1) as f64 * x.ln() };
        power - x / self.gamma0 - self.ln_norm()
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        check_x("snr_pdf", x)?;
        Ok(self.ln_pdf(x).exp())
    }

    /// `ln F(x)` from the regularized lower incomplete gamma.
    pub fn ln_cdf(&self, x: f64) -> f64 {
        ln_lower_gamma(self.k as f64, (x / self.gamma0).ln()) - ln_gamma(self.k as f64).unwrap()
    }

    /// `ln(1 - F(x))`.
    pub fn ln_sf(&self, x: f64) -> f64 {
        ln_upper_gamma(self.k as f64, (x / self.gamma0).ln()) - ln_gamma(self.k as f64).unwrap()
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        check_x("snr_cdf", x)?;
        Ok(self.ln_cdf(x).exp())
    }

    /// `1 - e^{-x/γ0} Σ_{k<K} (x/γ0)^k / k!`, the integer-shape closed form.
    /// Loses relative accuracy where `F(x)` is tiny.
    pub fn cdf_finite_sum(&self, x: f64) -> Result<f64> {
        check_x("snr_cdf", x)?;
        let y = x / self.gamma0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..self.k {
            term *= y / k as f64;
            sum += term;
        }
        Ok(1.0 - (-y).exp() * sum)
    }
}

fn check_x(func: &'static str, x: f64) -> Result<()> {
    if !(x >= 0.0) {
        return Err(domain(func, format!("x = {x} must be >= 0")));
    }
    Ok(())
}

/// Rows `c^(m)`, `m = 0..=m_max`, of the expansion
/// `(Σ_{k<K} x^k / (γ0^k k!))^m = Σ_q c_q^(m) x^q`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    k: u32,
    gamma0: f64,
    rows: Vec<Vec<f64>>,
}

impl CoefficientTable {
    pub fn build(dist: &BranchSnrDist, m_max: u32) -> Self {
        let k = dist.k as usize;
        let mut first = Vec::with_capacity(k);
        let mut c = 1.0;
        for j in 0..k {
            if j > 0 {
                c /= dist.gamma0 * j as f64;
            }
            first.push(c);
        }
        let mut rows = vec![vec![1.0]];
        for _ in 0..m_max {
            let prev = rows.last().unwrap();
            let mut next = vec![0.0; prev.len() + k - 1];
            for (i, p) in prev.iter().enumerate() {
                for (j, f) in first.iter().enumerate() {
                    next[i + j] += p * f;
                }
            }
            rows.push(next);
        }
        Self {
            k: dist.k,
            gamma0: dist.gamma0,
            rows,
        }
    }

    pub fn m_max(&self) -> u32 {
        (self.rows.len() - 1) as u32
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    /// `Q(m) = m (K - 1)`.
    pub fn q_max(&self, m: u32) -> u32 {
        m * (self.k - 1)
    }

    pub fn row(&self, m: u32) -> &[f64] {
        &self.rows[m as usize]
    }

    /// `Σ_q c_q^(m) x^q` by Horner.
    pub fn eval_row(&self, m: u32, x: f64) -> f64 {
        self.row(m).iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Selection of the strongest of `num_candidates` i.i.d. branches.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionConfig {
    num_candidates: u32,
    branch: BranchSnrDist,
    table: CoefficientTable,
}

impl SelectionConfig {
    pub fn new(num_candidates: u32, branch: BranchSnrDist) -> Result<Self> {
        if num_candidates == 0 {
            return Err(Error::InvalidConfig("need at least one candidate antenna".into()));
        }
        if num_candidates > SUPPORTED_ANTENNAS || branch.k > SUPPORTED_ANTENNAS {
            log::debug!(
                "selection of {num_candidates} x K={} is outside the validated range (<= {SUPPORTED_ANTENNAS})",
                branch.k
            );
        }
        let table = CoefficientTable::build(&branch, num_candidates - 1);
        Ok(Self {
            num_candidates,
            branch,
            table,
        })
    }

    pub fn num_candidates(&self) -> u32 {
        self.num_candidates
    }

    pub fn branch(&self) -> &BranchSnrDist {
        &self.branch
    }

    pub fn table(&self) -> &CoefficientTable {
        &self.table
    }

    /// `ln(L / (γ0^K Γ(K)))`.
    fn ln_prefactor(&self) -> f64 {
        (self.num_candidates as f64).ln() - self.branch.ln_norm()
    }

    /// Evaluates `L/(γ0^K Γ(K)) Σ_m C(L-1,m)(-1)^m Σ_q c_q^(m) I(m, q)`, where
    /// `inner(m, q, out)` pushes `I(m, q)` as signed log-magnitude pieces.
    pub fn expand<F>(&self, mut inner: F) -> Result<SeriesValue>
    where
        F: FnMut(u32, u32, &mut Vec<(f64, f64)>) -> Result<()>,
    {
        let lpre = self.ln_prefactor();
        let l1 = self.num_candidates - 1;
        let mut acc = SignedLogSum::new();
        let mut pieces = Vec::new();
        for m in 0..=l1 {
            let sign_m = if m % 2 == 0 { 1.0 } else { -1.0 };
            let lbin = ln_binomial(l1, m);
            for (q, &c) in self.table.row(m).iter().enumerate() {
                pieces.clear();
                inner(m, q as u32, &mut pieces)?;
                let lc = c.ln();
                for &(s, l) in &pieces {
                    acc.push(sign_m * s, lpre + lbin + lc + l);
                }
            }
        }
        Ok(acc.finish())
    }

    /// Density of the maximum by the expanded (finite-sum) form.
    pub fn max_order_pdf(&self, x: f64) -> Result<f64> {
        check_x("max_order_pdf", x)?;
        let k = self.branch.k;
        let g0 = self.branch.gamma0;
        let v = self.expand(|m, q, out| {
            let p = q + k - 1;
            let lp = if p == 0 { 0.0 } else { p as f64 * x.ln() };
            out.push((1.0, lp - (m + 1) as f64 * x / g0));
            Ok(())
        })?;
        if v.cancellation > CANCELLATION_WARN_RATIO {
            log::warn!(
                "max_order_pdf at x = {x}: expansion cancellation {:.1e}",
                v.cancellation
            );
        }
        Ok(v.value().max(0.0))
    }

    /// `ln(L F(x)^{L-1} f(x))`.
    pub fn ln_max_order_pdf_direct(&self, x: f64) -> f64 {
        let l = self.num_candidates as f64;
        let lf = if self.num_candidates == 1 {
            0.0
        } else {
            (l - 1.0) * self.branch.ln_cdf(x)
        };
        l.ln() + lf + self.branch.ln_pdf(x)
    }

    /// Density of the maximum by the direct form `L F^{L-1} f`.
    pub fn max_order_pdf_direct(&self, x: f64) -> Result<f64> {
        check_x("max_order_pdf", x)?;
        Ok(self.ln_max_order_pdf_direct(x).exp())
    }

    /// `F(x)^L`.
    pub fn max_order_cdf(&self, x: f64) -> Result<f64> {
        check_x("max_order_cdf", x)?;
        Ok((self.num_candidates as f64 * self.branch.ln_cdf(x)).exp())
    }

    /// Density of the `l`-th smallest of the `L` candidates (`l = L` is the maximum).
    pub fn general_order_pdf(&self, l: u32, x: f64) -> Result<f64> {
        let len = self.num_candidates;
        if l == 0 || l > len {
            return Err(Error::Index { l, len });
        }
        check_x("general_order_pdf", x)?;
        let lcoef = ln_gamma(len as f64 + 1.0)? - ln_gamma(l as f64)? - ln_gamma((len - l) as f64 + 1.0)?;
        let lower = if l > 1 {
            (l - 1) as f64 * self.branch.ln_cdf(x)
        } else {
            0.0
        };
        let upper = if len > l {
            (len - l) as f64 * self.branch.ln_sf(x)
        } else {
            0.0
        };
        Ok((lcoef + lower + upper + self.branch.ln_pdf(x)).exp())
    }
}
