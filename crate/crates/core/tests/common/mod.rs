//! Reference computations used as test oracles. Nothing here calls into the
//! crate's special functions or quadrature.

#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

/// Tanh-sinh quadrature of `f` over `[a, b]`, halving the step until two
/// levels agree to `tol` (relative).
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let h = 0.5 * (b - a);
    let term = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let w = FRAC_PI_2 * t.cosh() / (u.cosh() * u.cosh());
        // distance to the nearer endpoint without cancellation
        let d = h * 2.0 / (1.0 + (2.0 * u.abs()).exp());
        let x = if t >= 0.0 { b - d } else { a + d };
        let v = f(x) * w * h;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    level_sum(term, 4.0, tol)
}

/// `∫_a^∞ f` by the exp-sinh map `x = a + s e^{(π/2) sinh t}`; `s` is the
/// integrand's length scale.
pub fn exp_sinh<F: Fn(f64) -> f64>(f: F, a: f64, s: f64, tol: f64) -> f64 {
    let term = |t: f64| -> f64 {
        let e = (FRAC_PI_2 * t.sinh()).exp();
        let v = f(a + s * e) * s * e * FRAC_PI_2 * t.cosh();
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    level_sum(term, 4.5, tol)
}

fn level_sum<T: Fn(f64) -> f64>(term: T, tmax: f64, tol: f64) -> f64 {
    let mut step = 0.5;
    let mut sum = term(0.0);
    let mut k = 1;
    while k as f64 * step <= tmax {
        let t = k as f64 * step;
        sum += term(t) + term(-t);
        k += 1;
    }
    let mut prev = sum * step;
    for _ in 0..12 {
        step *= 0.5;
        let mut k = 1;
        while k as f64 * step <= tmax {
            let t = k as f64 * step;
            sum += term(t) + term(-t);
            k += 2;
        }
        let cur = sum * step;
        if (cur - prev).abs() <= tol * cur.abs() {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// Splits `[a, ∞)` at the given points and sums tanh-sinh pieces plus an
/// exp-sinh tail.
pub fn piecewise<F: Fn(f64) -> f64>(f: F, a: f64, cuts: &[f64], tail_scale: f64, tol: f64) -> f64 {
    let mut lo = a;
    let mut total = 0.0;
    for &c in cuts {
        if c > lo {
            total += tanh_sinh(&f, lo, c, tol);
            lo = c;
        }
    }
    total + exp_sinh(&f, lo, tail_scale, tol)
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Regularized lower incomplete gamma for integer shape: the tail series
/// `e^{-y} Σ_{k>=K} y^k/k!` below the mode, the finite sum above it.
pub fn gamma_cdf_int(k: u32, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if y < k as f64 + 1.0 {
        let mut term = (-y).exp();
        for j in 1..=k {
            term *= y / j as f64;
        }
        let mut sum = 0.0;
        let mut j = k;
        loop {
            sum += term;
            j += 1;
            term *= y / j as f64;
            if term <= 1e-18 * sum {
                break;
            }
        }
        sum
    } else {
        let mut term = 1.0;
        let mut s = 1.0;
        for j in 1..k {
            term *= y / j as f64;
            s += term;
        }
        1.0 - (-y).exp() * s
    }
}

/// Density of the maximum of `l` gamma(`k`, `g0`) variates, `L F^{L-1} f`.
pub fn max_pdf(k: u32, l: u32, g0: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return if k == 1 && l == 1 { 1.0 / g0 } else { 0.0 };
    }
    let y = x / g0;
    let f = y.powi(k as i32 - 1) * (-y).exp() / (g0 * factorial(k - 1));
    l as f64 * gamma_cdf_int(k, y).powi(l as i32 - 1) * f
}

/// `E{g(X)}` for `X` the maximum of `l` gamma(`k`, `g0`) variates, over `[lower, ∞)`.
pub fn max_expectation<G: Fn(f64) -> f64>(k: u32, l: u32, g0: f64, lower: f64, g: G) -> f64 {
    let scale = g0 * k as f64;
    let h = |x: f64| g(x) * max_pdf(k, l, g0, x);
    let start = 1e-3 * scale;
    let mut head = 0.0;
    let mut lo = lower;
    if lower > 0.0 && lower < start {
        // x = lower e^u, one piece per decade, resolves mass spread over many decades
        let span = (start / lower).ln();
        let pieces = (span / std::f64::consts::LN_10).ceil() as usize;
        let du = span / pieces as f64;
        for i in 0..pieces {
            head += tanh_sinh(
                |u| {
                    let x = lower * u.exp();
                    h(x) * x
                },
                i as f64 * du,
                (i + 1) as f64 * du,
                1e-13,
            );
        }
        lo = start;
    }
    let cuts: Vec<f64> = [1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0]
        .iter()
        .map(|c| lower + c * scale)
        .collect();
    head + piecewise(h, lo, &cuts, scale, 1e-13)
}

/// `E_1(x)` by its power series (small x) or continued fraction.
pub fn e1(x: f64) -> f64 {
    if x < 1.0 {
        let mut s = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -x / k as f64;
            let t = -term / k as f64;
            s += t;
            if t.abs() < 1e-18 * s.abs() {
                break;
            }
        }
        -0.577_215_664_901_532_9 - x.ln() + s
    } else {
        // modified Lentz for e^{x} E1(x) = 1/(x+1-1/(x+3-4/(x+5-...)))
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// Bisection on a decreasing function.
pub fn bisect_decreasing<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, target: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * hi.abs() {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Water-filling coefficient, written out independently.
pub fn wf_mu(cutoff: f64, x: f64) -> f64 {
    if x > cutoff {
        1.0 / cutoff - 1.0 / x
    } else {
        0.0
    }
}

/// Optimal coefficient `Γ0^{-1/(t+1)} x^{-t/(t+1)} - 1/x` above the cutoff.
pub fn opt_mu(cutoff: f64, theta_tilde: f64, x: f64) -> f64 {
    if x > cutoff {
        cutoff.powf(-1.0 / (theta_tilde + 1.0)) * x.powf(-theta_tilde / (theta_tilde + 1.0)) - 1.0 / x
    } else {
        0.0
    }
}

/// Pearson chi-square p-value of `n` simulated maxima of `l` gamma(`k`, `g0`)
/// variates against `pdf`, on `bins` cells equiprobable under the reference CDF.
pub fn chi_square_max<P: Fn(f64) -> f64>(k: u32, l: u32, g0: f64, n: u64, bins: usize, seed: u64, pdf: P) -> f64 {
    use ascap_core::montecarlo::{sample_selected_snr, Scheme};
    use ascap_core::SystemConfig;
    use rand::SeedableRng;

    let cdf = |x: f64| gamma_cdf_int(k, x / g0).powi(l as i32);
    let mut edges = vec![0.0];
    for i in 1..bins {
        let target = i as f64 / bins as f64;
        let x = bisect_decreasing(|x| -cdf(x), 0.0, 200.0 * g0 * k as f64, -target);
        edges.push(x);
    }
    let mut probs: Vec<f64> = edges.windows(2).map(|w| tanh_sinh(&pdf, w[0], w[1], 1e-12)).collect();
    let last = *edges.last().unwrap();
    probs.push(exp_sinh(&pdf, last, g0, 1e-12));

    let cfg = SystemConfig::new(k, l, g0, 1.0).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; bins];
    for _ in 0..n {
        let x = sample_selected_snr(&cfg, Scheme::Ras, &mut rng);
        let idx = edges.partition_point(|&e| e <= x) - 1;
        counts[idx] += 1;
    }
    let stat: f64 = counts
        .iter()
        .zip(&probs)
        .map(|(&c, &p)| {
            let e = p * n as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    ascap_core::specfun::regularized_gamma_q((bins - 1) as f64 / 2.0, stat / 2.0).unwrap()
}
