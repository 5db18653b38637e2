//! Acceptance criteria. Runs every criterion, prints one line each, and exits
//! nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use ascap_core::asymptotics::{alpha_constant, cutoff_unity_check, ec_infinity, ergodic_capacity_with_policy};
use ascap_core::config::db_to_linear;
use ascap_core::montecarlo::{mc_ergodic_rate, mc_mean_mu, Scheme};
use ascap_core::orderstats::{BranchSnrDist, SelectionConfig};
use ascap_core::ras::ras_effective_capacity;
use ascap_core::tas::{
    constant_power_effective_capacity, joint_selection_config, mean_mu, tas_effective_capacity,
    tas_effective_capacity_with_policy,
};
use ascap_core::validate::{compare_with_mc, MC_CONFIGS, MC_SNR_DB, MC_THETA};
use ascap_core::SystemConfig;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

const TRIALS: u64 = 1_000_000;
const SEED: u64 = 2024;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn cfg(mt: u32, mr: u32, db: f64, theta: f64) -> SystemConfig {
    SystemConfig::new(mt, mr, db_to_linear(db), theta).unwrap()
}

fn tas_like(c: &SystemConfig, scheme: Scheme) -> SystemConfig {
    if scheme == Scheme::Joint {
        joint_selection_config(c)
    } else {
        *c
    }
}

fn analytic_vs_simulation() -> Outcome {
    let mut bad = Vec::new();
    let mut worst = 0.0f64;
    for (scheme, mt, mr) in MC_CONFIGS {
        for db in MC_SNR_DB {
            for theta in MC_THETA {
                let c = cfg(mt, mr, db, theta);
                let r = compare_with_mc(&c, scheme, TRIALS, SEED).unwrap();
                let diff = (r.analytic - r.mc.mean).abs();
                let tol = (0.01 * r.analytic).max(3.0 * r.mc.std_error);
                worst = worst.max(diff / tol);
                if diff > tol {
                    bad.push(format!(
                        "{} {mt}x{mr} {db}dB theta={theta}: analytic {:.4} mc {:.4} se {:.4}",
                        scheme.as_str(),
                        c.normalize(r.analytic),
                        c.normalize(r.mc.mean),
                        c.normalize(r.mc.std_error)
                    ));
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("worst diff/tol {worst:.3}; failing: [{}]", bad.join("; ")),
    )
}

fn power_adaptation_gains() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, target) in [(2, 2.67), (3, 1.96)] {
        let c = cfg(n, n, 10.0, 0.1);
        let gain = c.normalize(tas_effective_capacity(&c).unwrap() - constant_power_effective_capacity(&c).unwrap());
        ok &= (gain - target).abs() <= 0.15;
        parts.push(format!("{n}x{n} gain {gain:.3} (target {target} ± 0.15)"));
    }
    outcome(ok, parts.join(", "))
}

fn receive_selection_gains() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (theta, target) in [(0.01, 1.0), (0.1, 2.0)] {
        let full = cfg(3, 3, 20.0, theta);
        let miso = cfg(3, 1, 20.0, theta);
        let gain = full.normalize(ras_effective_capacity(&full).unwrap() - ras_effective_capacity(&miso).unwrap());
        ok &= (gain - target).abs() <= 0.3;
        parts.push(format!("theta={theta} gain {gain:.3} (target {target} ± 0.3)"));
    }
    outcome(ok, parts.join(", "))
}

fn power_constraint() -> Outcome {
    let mut bad = Vec::new();
    let mut worst_analytic = 0.0f64;
    for (scheme, mt, mr) in MC_CONFIGS {
        if scheme == Scheme::Ras {
            continue;
        }
        for db in MC_SNR_DB {
            for theta in MC_THETA {
                let c = cfg(mt, mr, db, theta);
                let t = tas_like(&c, scheme);
                let (_, p) = tas_effective_capacity_with_policy(&t).unwrap();
                let analytic = mean_mu(&t, p.cutoff()).unwrap();
                worst_analytic = worst_analytic.max((analytic - 1.0).abs());
                let mc = mc_mean_mu(&c, scheme, &p, TRIALS, SEED + 1).unwrap();
                if (analytic - 1.0).abs() > 1e-9 || !mc.within(1.0, 3.0) {
                    bad.push(format!(
                        "{} {mt}x{mr} {db}dB theta={theta}: analytic {analytic:.12} mc {:.5} se {:.5}",
                        scheme.as_str(),
                        mc.mean,
                        mc.std_error
                    ));
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("max |E mu - 1| {worst_analytic:.2e}; failing: [{}]", bad.join("; ")),
    )
}

fn loose_qos_limit() -> Outcome {
    let mut bad = Vec::new();
    let mut worst_limit = 0.0f64;
    let mut worst_mc = 0.0f64;
    for (scheme, mt, mr) in MC_CONFIGS {
        if scheme == Scheme::Ras {
            continue;
        }
        for db in MC_SNR_DB {
            let c = cfg(mt, mr, db, 1e-6);
            let t = tas_like(&c, scheme);
            let (erg, p) = ergodic_capacity_with_policy(&t).unwrap();
            let ec = tas_effective_capacity(&t).unwrap();
            let lim = ((ec - erg) / erg).abs();
            let mc = mc_ergodic_rate(&c, scheme, Some(&p), TRIALS, SEED).unwrap();
            let sim = ((erg - mc.mean) / erg).abs();
            worst_limit = worst_limit.max(lim);
            worst_mc = worst_mc.max(sim);
            if lim >= 1e-3 || sim >= 0.01 {
                bad.push(format!(
                    "{} {mt}x{mr} {db}dB: limit {lim:.2e} mc {sim:.2e}",
                    scheme.as_str()
                ));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "max rel gap to ergodic {worst_limit:.2e}, max ergodic vs mc {worst_mc:.2e}; failing: [{}]",
            bad.join("; ")
        ),
    )
}

fn strict_qos_limit() -> Outcome {
    let mut bad = Vec::new();
    let mut worst = 0.0f64;
    for (mt, mr) in [(1, 2), (2, 2), (2, 3), (3, 3)] {
        for db in MC_SNR_DB {
            let c = cfg(mt, mr, db, 1.0);
            let limit = ec_infinity(&c).unwrap();
            let gaps: Vec<f64> = [1.0, 3.0, 10.0]
                .iter()
                .map(|&th| tas_effective_capacity(&c.with_theta(th)).unwrap() - limit)
                .collect();
            let rel = gaps[2].abs() / limit;
            worst = worst.max(rel);
            let shrinking = gaps.windows(2).all(|w| w[1].abs() < w[0].abs());
            // independent inverse moment for the limit constant
            let inv = common::max_expectation(mr, mt, c.gamma0, 0.0, |x| 1.0 / x);
            let alpha_ok = (alpha_constant(&c).unwrap() * inv - 1.0).abs() < 1e-8;
            if rel >= 0.05 || !shrinking || !alpha_ok {
                bad.push(format!(
                    "{mt}x{mr} {db}dB: rel {rel:.3} gaps {gaps:?} alpha_ok={alpha_ok}"
                ));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("max rel gap at theta=10 {worst:.4}; failing: [{}]", bad.join("; ")),
    )
}

fn binom(n: u64, k: u64) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

fn fact(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

fn exact_identities() -> Outcome {
    let mut bad = Vec::new();
    for m in 0..=10u64 {
        let s: BigRational = (0..=m)
            .map(|q| {
                BigRational::new(
                    binom(m, q) * fact(q + 1),
                    num_traits::pow(BigInt::from(m + 1), q as usize + 1),
                )
            })
            .sum();
        if !s.is_one() {
            bad.push(format!("unity m={m}"));
        }
    }
    for i in 0..=15u64 {
        let s: BigInt = (0..=i)
            .map(|k| binom(i + k, k) * num_traits::pow(BigInt::from(2), (i - k) as usize))
            .sum();
        if s != num_traits::pow(BigInt::from(4), i as usize) {
            bad.push(format!("central I={i}"));
        }
    }
    for mt in 1..=10u64 {
        let mut s = BigRational::zero();
        for m in 0..mt {
            let t = BigRational::new(binom(mt - 1, m), BigInt::from(m + 1));
            s = if m % 2 == 0 { s + t } else { s - t };
        }
        if s != BigRational::new(BigInt::one(), BigInt::from(mt)) {
            bad.push(format!("alternating Mt={mt}"));
        }
    }
    let suite = ascap_core::asymptotics::identity_suite();
    if !suite.all_hold() {
        bad.push("library identity suite".into());
    }
    outcome(
        bad.is_empty(),
        format!("{} library checks; failing: [{}]", suite.checks.len(), bad.join(", ")),
    )
}

fn cutoff_convergence() -> Outcome {
    let grid: Vec<f64> = (0..=8).map(|i| 5.0 * i as f64).collect();
    let mut bad = Vec::new();
    let mut parts = Vec::new();
    for (mt, mr) in [(1, 3), (2, 2), (2, 3), (3, 1), (3, 2)] {
        let r = cutoff_unity_check(&cfg(mt, mr, 0.0, 1e-5), &grid).unwrap();
        let argmin = r.points.iter().min_by(|a, b| a.2.total_cmp(&b.2)).map(|p| p.0).unwrap();
        parts.push(format!("{mt}x{mr} final {:.4} min at {argmin}dB", r.final_deviation));
        if !r.passes(0.05) {
            bad.push(format!(
                "{mt}x{mr} monotone={} final={:.4}",
                r.monotone, r.final_deviation
            ));
        }
    }
    outcome(
        bad.is_empty(),
        format!("{}; failing: [{}]", parts.join(", "), bad.join("; ")),
    )
}

fn distributional_correctness() -> Outcome {
    let mut bad = Vec::new();
    let mut worst_mass = 0.0f64;
    let mut min_p = 1.0f64;
    for k in 1..=4 {
        for l in 1..=4 {
            let g0 = 2.0;
            let sel = SelectionConfig::new(l, BranchSnrDist::new(k, g0).unwrap()).unwrap();
            let pdf = |x: f64| sel.max_order_pdf(x).unwrap();
            let scale = g0 * k as f64;
            let mass = common::piecewise(
                pdf,
                0.0,
                &[0.1 * scale, 0.5 * scale, scale, 2.0 * scale, 4.0 * scale],
                scale,
                1e-13,
            );
            let p = common::chi_square_max(k, l, g0, TRIALS, 50, SEED + (k * 10 + l) as u64, pdf);
            worst_mass = worst_mass.max((mass - 1.0).abs());
            min_p = min_p.min(p);
            if (mass - 1.0).abs() > 1e-6 || p <= 1e-3 {
                bad.push(format!("K={k} L={l}: mass {mass:.9} p {p:.4}"));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "max |mass-1| {worst_mass:.2e}, min p {min_p:.4}; failing: [{}]",
            bad.join("; ")
        ),
    )
}

#[derive(Clone, Copy)]
enum Curve {
    Ras,
    TasOptimal,
    TasConstant,
    Joint,
}

fn curve(kind: Curve, c: &SystemConfig) -> f64 {
    match kind {
        Curve::Ras => ras_effective_capacity(c).unwrap(),
        Curve::TasOptimal => tas_effective_capacity(c).unwrap(),
        Curve::TasConstant => constant_power_effective_capacity(c).unwrap(),
        Curve::Joint => tas_effective_capacity(&joint_selection_config(c)).unwrap(),
    }
}

fn monotonicity() -> Outcome {
    let snr: Vec<f64> = (0..=8).map(|i| 2.5 * i as f64).collect();
    let theta = [1e-3, 1e-2, 0.1, 1.0];
    let slack = |v: f64| 1e-9 * v.abs().max(1e-300);
    let mut bad = Vec::new();
    let mut count = 0;
    for (kind, name) in [
        (Curve::Ras, "ras"),
        (Curve::TasOptimal, "tas"),
        (Curve::TasConstant, "tas-constant"),
        (Curve::Joint, "joint"),
    ] {
        for mt in 1..=3 {
            for mr in 1..=3 {
                for &db in &snr {
                    for &th in &theta {
                        let c = cfg(mt, mr, db, th);
                        let v = curve(kind, &c);
                        let more_snr = curve(kind, &c.with_gamma0_db(db + 2.5));
                        let more_theta = curve(kind, &c.with_theta(th * 10.0));
                        // RAS selects among receive antennas, TAS among transmit antennas
                        let more_cand = match kind {
                            Curve::Ras => curve(kind, &c.with_antennas(mt, mr + 1)),
                            _ => curve(kind, &c.with_antennas(mt + 1, mr)),
                        };
                        count += 3;
                        if more_snr < v - slack(v) {
                            bad.push(format!("{name} {mt}x{mr} {db}dB theta={th}: snr"));
                        }
                        if more_theta > v + slack(v) {
                            bad.push(format!("{name} {mt}x{mr} {db}dB theta={th}: theta"));
                        }
                        if more_cand < v - slack(v) {
                            bad.push(format!("{name} {mt}x{mr} {db}dB theta={th}: candidates"));
                        }
                    }
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{count} comparisons; failing: [{}]", bad.join("; ")),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("analytic vs simulation", analytic_vs_simulation),
        ("power adaptation gains", power_adaptation_gains),
        ("receive selection gains", receive_selection_gains),
        ("power constraint", power_constraint),
        ("loose QoS limit", loose_qos_limit),
        ("strict QoS limit", strict_qos_limit),
        ("exact identities", exact_identities),
        ("cutoff convergence", cutoff_convergence),
        ("distributional correctness", distributional_correctness),
        ("monotonicity", monotonicity),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        println!(
            "criterion {:2} {:<28} {} ({:.1}s) {}",
            i + 1,
            name,
            if o.passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
        failed += usize::from(!o.passed);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
