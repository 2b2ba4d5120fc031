//! Property battery behind the `verify` command.

use std::fmt;

use num_complex::Complex;
use rand::Rng;
use star_ris::link::{
    best_noma_order, effective_gain, effective_gains, min_power, noma_rates, oma_rates, DecodingOrder, EffectiveGains,
    NomaOrder, RateTargets,
};
use star_ris::optimizer::{amplitude_affine_decomposition, phase_affine_decomposition, random_coupled_init};
use star_ris::star::{
    coefficients_from_impedances, impedances_from_coefficients, validate_passive_lossless, CouplingSign,
    FREE_SPACE_IMPEDANCE,
};
use star_ris::{
    brute_force_solve, realize_channels, solve_independent_phase, solve_instance, AOConfig, Access, ChannelSetF64,
    OracleResolution, Scenario, StarCoefficientsF64, User,
};

use crate::seed;

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    /// Smaller sample counts for a fast smoke run.
    pub quick: bool,
    pub seed: u64,
    /// Breaks the phase coupling of this element before the constraint
    /// check, to prove the check can fail.
    pub inject_coupling_fault: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {:<28} {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn random_coupled_pair<R: Rng>(rng: &mut R) -> (Complex<f64>, Complex<f64>) {
    let beta_t = 0.05 + 0.9 * rng.random::<f64>();
    let theta_r = rng.random::<f64>() * std::f64::consts::TAU;
    let sign = if rng.random() {
        CouplingSign::Plus
    } else {
        CouplingSign::Minus
    };
    let theta_t = sign.transmission_phase(theta_r);
    (
        Complex::from_polar(beta_t.sqrt(), theta_t),
        Complex::from_polar((1.0 - beta_t).sqrt(), theta_r),
    )
}

fn impedance_round_trip<R: Rng>(rng: &mut R, samples: usize) -> Check {
    let eta = FREE_SPACE_IMPEDANCE;
    let (mut worst_err, mut worst_re, mut failures) = (0.0f64, 0.0f64, 0);
    for _ in 0..samples {
        let (t, r) = random_coupled_pair(rng);
        match impedances_from_coefficients(t, r, eta).and_then(|z| Ok((z, coefficients_from_impedances(&z)?))) {
            Ok((z, (t2, r2))) => {
                worst_err = worst_err.max((t2 - t).norm()).max((r2 - r).norm());
                worst_re = worst_re.max(z.z_e.re.abs() / eta).max(z.z_m.re.abs() / eta);
            }
            Err(_) => failures += 1,
        }
    }
    check(
        "impedance-round-trip",
        failures == 0 && worst_err <= 1e-9 && worst_re <= 1e-9,
        format!("{samples} pairs, max error {worst_err:.2e}, max |Re Z|/eta {worst_re:.2e}, singular {failures}"),
    )
}

fn impedance_detects_violation<R: Rng>(rng: &mut R, samples: usize) -> Check {
    let eta = FREE_SPACE_IMPEDANCE;
    let mut missed = 0;
    let mut drawn = 0;
    while drawn < samples {
        let beta_t = 0.1 + 0.8 * rng.random::<f64>();
        let theta_t = rng.random::<f64>() * std::f64::consts::TAU;
        let theta_r = rng.random::<f64>() * std::f64::consts::TAU;
        if (theta_t - theta_r).cos().abs() < 0.1 {
            continue;
        }
        drawn += 1;
        let t = Complex::from_polar(beta_t.sqrt(), theta_t);
        let r = Complex::from_polar((1.0 - beta_t).sqrt(), theta_r);
        let lossy = match impedances_from_coefficients(t, r, eta) {
            Ok(z) => !z.is_lossless(1e-6),
            Err(_) => true,
        };
        if !lossy {
            missed += 1;
        }
    }
    check(
        "impedance-detects-violation",
        missed == 0,
        format!("{samples} coupling-violating pairs, {missed} looked lossless"),
    )
}

fn random_gains<R: Rng>(rng: &mut R) -> (EffectiveGains<f64>, RateTargets<f64>, f64) {
    let g = EffectiveGains::new(
        10f64.powf(-12.0 + 6.0 * rng.random::<f64>()),
        10f64.powf(-12.0 + 6.0 * rng.random::<f64>()),
    );
    let targets = RateTargets::new(6.0 * rng.random::<f64>(), 6.0 * rng.random::<f64>());
    let sigma2 = 10f64.powf(-14.0 + 4.0 * rng.random::<f64>());
    (g, targets, sigma2)
}

fn rate_inversion<R: Rng>(rng: &mut R, samples: usize) -> Check {
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let (g, targets, sigma2) = random_gains(rng);
        for order in [DecodingOrder::TStrong, DecodingOrder::RStrong, DecodingOrder::Oma] {
            let p = min_power(&g, &targets, sigma2, order).expect("positive gains");
            let (rt, rr) = match order {
                DecodingOrder::TStrong => noma_rates(&g, p.p_t, p.p_r, NomaOrder::TStrong, sigma2),
                DecodingOrder::RStrong => noma_rates(&g, p.p_t, p.p_r, NomaOrder::RStrong, sigma2),
                DecodingOrder::Oma => oma_rates(&g, p.p_t, p.p_r, sigma2),
            };
            worst = worst.max((rt - targets.rate_t).abs()).max((rr - targets.rate_r).abs());
        }
    }
    check(
        "rate-inversion",
        worst <= 1e-9,
        format!("{samples} cases x 3 orders, max rate error {worst:.2e} bit/s/Hz"),
    )
}

fn decoding_order_sign<R: Rng>(rng: &mut R, samples: usize) -> Check {
    let mut mismatches = 0;
    for _ in 0..samples {
        let (g, targets, sigma2) = random_gains(rng);
        let t = min_power(&g, &targets, sigma2, DecodingOrder::TStrong).expect("positive gains");
        let r = min_power(&g, &targets, sigma2, DecodingOrder::RStrong).expect("positive gains");
        let sign = |x: f64, scale: f64| {
            if x.abs() <= 1e-12 * scale {
                0
            } else if x > 0.0 {
                1
            } else {
                -1
            }
        };
        let lhs = sign(t.total_w - r.total_w, t.total_w.max(r.total_w));
        let inv = (1.0 / g.gain_t, 1.0 / g.gain_r);
        let rhs = sign(inv.0 - inv.1, inv.0.max(inv.1));
        if lhs != rhs && lhs != 0 {
            mismatches += 1;
        }
    }
    check(
        "decoding-order-sign",
        mismatches == 0,
        format!("{samples} gain pairs, {mismatches} sign mismatches"),
    )
}

fn decomposition_exactness<R: Rng>(rng: &mut R, instances: usize) -> Check {
    let scenario = Scenario::default().with_elements(4);
    let mut worst = 0.0f64;
    for _ in 0..instances {
        let ch: ChannelSetF64 = realize_channels(rng, &scenario).expect("valid scenario");
        let c: StarCoefficientsF64 = random_coupled_init(rng, 4);
        for user in [User::T, User::R] {
            for n in 0..4 {
                let p = phase_affine_decomposition(&ch, &c, user, n).expect("index in range");
                let a = amplitude_affine_decomposition(&ch, &c, user, n).expect("index in range");
                for _ in 0..25 {
                    let theta = rng.random::<f64>() * std::f64::consts::TAU;
                    let beta = rng.random::<f64>();
                    let mut probe = c.clone();
                    let mut amp = c.clone();
                    match user {
                        User::T => {
                            probe.theta_t[n] = theta;
                            amp.beta_t[n] = beta;
                        }
                        User::R => {
                            probe.theta_r[n] = theta;
                            amp.beta_r[n] = beta;
                        }
                    }
                    let direct = effective_gain(&ch, &probe, user);
                    let scale = direct.max(1e-300);
                    worst = worst.max((p.gain(Complex::from_polar(1.0, theta)) - direct).abs() / scale);
                    let direct = effective_gain(&ch, &amp, user);
                    worst = worst.max((a.gain(beta) - direct).abs() / direct.max(1e-300));
                }
            }
        }
    }
    check(
        "decomposition-exactness",
        worst <= 1e-9,
        format!("{instances} instances, max relative residual {worst:.2e}"),
    )
}

fn ao_descent_and_constraints(opts: &VerifyOptions, instances: usize) -> Vec<Check> {
    let cfg = AOConfig::default();
    let mut worst_rise = 0.0f64;
    let mut violations = Vec::new();
    let mut order_violations = 0;
    let mut warm_violations = 0;
    let mut solved = 0;
    for (k, (rates, access)) in [
        ((2.0, 2.0), Access::Noma),
        ((2.0, 2.0), Access::Oma),
        ((5.0, 1.0), Access::Noma),
        ((5.0, 1.0), Access::Oma),
    ]
    .into_iter()
    .enumerate()
    {
        let scenario = Scenario::default()
            .with_elements(16)
            .with_rates(rates.0, rates.1)
            .with_access(access);
        for i in 0..instances {
            let mut rng = seed::rng(seed::derive(opts.seed, &[1, k as u64, i as u64]));
            let ch: ChannelSetF64 = realize_channels(&mut rng, &scenario).expect("valid scenario");
            let Ok(res) = solve_instance(&ch, &scenario, &cfg, &mut rng) else {
                continue;
            };
            solved += 1;
            for w in res.objective_trace.windows(2) {
                worst_rise = worst_rise.max((w[1] - w[0]) / w[0]);
            }
            let mut coeffs = res.coefficients.clone();
            if let Some(e) = opts.inject_coupling_fault {
                if e < coeffs.len() {
                    coeffs.theta_t[e] = coeffs.theta_r[e] + 0.3;
                }
            }
            violations.extend(validate_passive_lossless(&coeffs).into_iter().map(|v| v.to_string()));

            if access == Access::Noma {
                let g = effective_gains(&ch, &res.coefficients);
                let strong_ok = match res.power.order {
                    DecodingOrder::TStrong => g.gain_t >= g.gain_r * (1.0 - 1e-9),
                    DecodingOrder::RStrong => g.gain_r >= g.gain_t * (1.0 - 1e-9),
                    DecodingOrder::Oma => false,
                };
                let best = best_noma_order(&g, &scenario.targets(), scenario.noise_power_w()).expect("feasible");
                if !strong_ok || best.order != res.power.order {
                    order_violations += 1;
                }
            }
            let ind = solve_independent_phase(&ch, &scenario, &cfg, &mut rng, Some(&res.coefficients));
            if !matches!(ind, Ok(ref r) if r.power.total_w <= res.power.total_w + 1e-12) {
                warm_violations += 1;
            }
        }
    }
    violations.dedup();
    let shown: Vec<&str> = violations.iter().take(3).map(String::as_str).collect();
    vec![
        check(
            "ao-monotone-descent",
            worst_rise <= 1e-12,
            format!("{solved} solves at N=16, max relative rise {worst_rise:.2e}"),
        ),
        check(
            "ao-passive-lossless",
            violations.is_empty(),
            if violations.is_empty() {
                format!("{solved} final coefficient sets satisfy energy and phase coupling")
            } else {
                format!("{} violations: {}", violations.len(), shown.join("; "))
            },
        ),
        check(
            "strong-user-decodes-first",
            order_violations == 0,
            format!("{order_violations} NOMA solutions with the weaker user decoding first"),
        ),
        check(
            "independent-not-worse",
            warm_violations == 0,
            format!("{warm_violations} warm-started independent solutions above the coupled power"),
        ),
    ]
}

fn oracle_ratio(opts: &VerifyOptions, n: usize, instances: usize, res: OracleResolution) -> Check {
    let cfg = AOConfig::default();
    let mut worst = 0.0f64;
    let mut failures = 0;
    for (k, access) in [Access::Noma, Access::Oma].into_iter().enumerate() {
        let scenario = Scenario::default().with_elements(n).with_access(access);
        for i in 0..instances {
            let mut rng = seed::rng(seed::derive(opts.seed, &[2, n as u64, k as u64, i as u64]));
            let ch: ChannelSetF64 = realize_channels(&mut rng, &scenario).expect("valid scenario");
            match (
                solve_instance(&ch, &scenario, &cfg, &mut rng),
                brute_force_solve(&ch, &scenario, res),
            ) {
                (Ok(ao), Ok(oracle)) => worst = worst.max(ao.power.total_w / oracle.power.total_w),
                _ => failures += 1,
            }
        }
    }
    let name = if n == 1 { "oracle-ratio-n1" } else { "oracle-ratio-n2" };
    check(
        name,
        failures == 0 && worst <= 1.02,
        format!(
            "{} instances, grid {}x2x{}, max AO/oracle power ratio {worst:.6}",
            2 * instances,
            res.phases,
            res.amplitudes
        ),
    )
}

pub fn run_verify(opts: &VerifyOptions) -> Report {
    let mut rng = seed::rng(seed::derive(opts.seed, &[0]));
    let (samples, ao_instances, n1, n2) = if opts.quick { (200, 3, 5, 1) } else { (1000, 15, 25, 5) };
    let mut checks = vec![
        impedance_round_trip(&mut rng, samples),
        impedance_detects_violation(&mut rng, samples),
        rate_inversion(&mut rng, samples),
        decoding_order_sign(&mut rng, samples),
        decomposition_exactness(&mut rng, if opts.quick { 3 } else { 10 }),
    ];
    checks.extend(ao_descent_and_constraints(opts, ao_instances));
    checks.push(oracle_ratio(opts, 1, n1, OracleResolution::default()));
    checks.push(oracle_ratio(opts, 2, n2, OracleResolution::default()));
    Report { checks }
}
