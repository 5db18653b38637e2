//! Globally adaptive Gauss-Legendre quadrature.
//!
//! Every panel carries a 15-point estimate on the whole interval and on its
//! two halves; the difference is the panel's error estimate and the halves
//! are reused when the panel is split.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

/// Tolerances for the adaptive quadrature driver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-13,
            abs_tol: 1e-18,
            max_subdivisions: 4000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol >= 0.0) || self.max_subdivisions < 1 {
            return Err(Error::InvalidConfig(format!(
                "quadrature spec needs rel_tol > 0, abs_tol >= 0, max_subdivisions >= 1 (got {self:?})"
            )));
        }
        Ok(())
    }
}

const GL_POINTS: usize = 15;

struct Rule {
    nodes: [f64; GL_POINTS],
    weights: [f64; GL_POINTS],
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_POINTS;
        let mut nodes = [0.0; GL_POINTS];
        let mut weights = [0.0; GL_POINTS];
        for i in 0..n.div_ceil(2) {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p1, mut p2) = (1.0, 0.0);
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
                }
                dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
                let z1 = z;
                z = z1 - p1 / dp;
                if (z - z1).abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Rule { nodes, weights }
    })
}

fn gauss<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let r = rule();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = NeumaierSum::new();
    for (x, w) in r.nodes.iter().zip(r.weights.iter()) {
        s.add(w * f(c + h * x));
    }
    h * s.value()
}

struct Panel {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    err: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, coarse: f64) -> Self {
        let m = 0.5 * (a + b);
        let left = gauss(f, a, m);
        let right = gauss(f, m, b);
        let mut err = (coarse - (left + right)).abs();
        if !(m > a && m < b) {
            // Interval is at floating-point resolution; nothing left to refine.
            err = 0.0;
        }
        Self { a, b, left, right, err }
    }
}

/// Integrates `f` over the consecutive intervals defined by `breakpoints`
/// (at least two, increasing).
pub fn integrate<F: Fn(f64) -> f64>(f: F, breakpoints: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    if breakpoints.len() < 2 {
        return Err(Error::InvalidConfig("quadrature needs at least two breakpoints".into()));
    }
    let mut panels: Vec<Panel> = breakpoints
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| Panel::new(&f, w[0], w[1], gauss(&f, w[0], w[1])))
        .collect();
    if panels.is_empty() {
        return Ok(0.0);
    }
    loop {
        let total: NeumaierSum = panels.iter().map(|p| p.left + p.right).collect();
        let total = total.value();
        let errsum: f64 = panels.iter().map(|p| p.err).sum();
        if !total.is_finite() || !errsum.is_finite() {
            return Err(Error::Convergence {
                what: "adaptive quadrature",
                iterations: panels.len(),
                estimate: total,
                error: errsum,
            });
        }
        if errsum <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
            return Ok(total);
        }
        if panels.len() >= spec.max_subdivisions {
            return Err(Error::Convergence {
                what: "adaptive quadrature",
                iterations: panels.len(),
                estimate: total,
                error: errsum,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .unwrap();
        let p = panels.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        panels.push(Panel::new(&f, p.a, m, p.left));
        panels.push(Panel::new(&f, m, p.b, p.right));
    }
}

/// Returns `ln ∫_lower^∞ exp(h(x)) dx` for a log-integrand that is unimodal
/// on the scale of `scale` and eventually decays faster than any power.
///
/// The integrand is normalised by its peak before integration and the tail is
/// cut where `h` drops `ln(spec.abs_tol)` below the peak.
pub fn integrate_log_density<H: Fn(f64) -> f64>(h: H, lower: f64, scale: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(scale > 0.0) || !lower.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "log-density quadrature needs finite lower bound and positive scale (lower={lower}, scale={scale})"
        )));
    }
    let mut xp = lower;
    let mut hmax = h(lower);
    if hmax.is_nan() {
        hmax = f64::NEG_INFINITY;
    }
    for i in 0..=300 {
        let x = lower + scale * 10f64.powf(-10.0 + 0.05 * i as f64);
        let v = h(x);
        if v > hmax {
            hmax = v;
            xp = x;
        }
    }
    if hmax == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let cut = hmax + spec.abs_tol.max(1e-300).ln();
    let d0 = if xp > lower { xp - lower } else { scale * 1e-3 };
    let mut upper = lower + 2.0 * d0;
    let mut grow = 0;
    while h(upper) > cut {
        upper = lower + 2.0 * (upper - lower);
        grow += 1;
        if grow > 1100 || !upper.is_finite() {
            return Err(Error::Convergence {
                what: "tail truncation",
                iterations: grow,
                estimate: upper,
                error: f64::NAN,
            });
        }
    }
    let mut bps = vec![lower];
    let mut x = d0 / 4096.0;
    while lower + x < upper {
        if lower + x > *bps.last().unwrap() {
            bps.push(lower + x);
        }
        x *= 2.0;
    }
    bps.push(upper);
    let integral = integrate(
        |x| {
            let v = h(x) - hmax;
            if v.is_nan() {
                0.0
            } else {
                v.exp()
            }
        },
        &bps,
        &QuadratureSpec { abs_tol: 0.0, ..*spec },
    )?;
    Ok(hmax + integral.ln())
}
