use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

use wigner_walk::bases::{generic_suitable_basis, max_deviation_up_to_sign, suitable_basis};
use wigner_walk::coin::{wigner_coin, wigner_coin_euler};
use wigner_walk::evolution::{evolve, step, BasisTag, CoinStateVector, Propagator};
use wigner_walk::halfint::HalfInt;
use wigner_walk::limitlaw::{limit_density, LimitDensityModel};
use wigner_walk::states::named_state;
use wigner_walk::trapping::{lattice_green_integral, q_factor, trapping_probability, TrappingModel};
use wigner_walk::verify::{self, ExclusionOptions, VerificationReport};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_state(rng: &mut StdRng, j: HalfInt) -> CoinStateVector {
    let amps = (0..j.dim())
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    CoinStateVector::normalized(j, BasisTag::Standard, amps).unwrap().0
}

fn worst<'a>(reports: impl IntoIterator<Item = &'a VerificationReport>, metric: &str) -> (f64, String) {
    reports
        .into_iter()
        .filter_map(|r| r.metric(metric).map(|v| (v, r.scenario.clone())))
        .fold((f64::NEG_INFINITY, String::new()), |a, b| if b.0 > a.0 { b } else { a })
}

fn coin_correctness() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1);
    let mut dev = 0.0f64;
    for _ in 0..20 {
        let rho: f64 = rng.random_range(0.01..0.99);
        let s = (1.0 - rho * rho).sqrt();
        let half = [rho, -s, s, rho];
        let r2 = rho * rho;
        let c = 2f64.sqrt() * rho * s;
        let one = [r2, -c, 1.0 - r2, c, 2.0 * r2 - 1.0, -c, 1.0 - r2, c, r2];
        for (twice, printed) in [(1, &half[..]), (2, &one[..])] {
            let coin = wigner_coin(HalfInt::from_twice(twice), rho).unwrap();
            for (e, p) in coin.entries().iter().zip(printed) {
                dev = dev.max((e - p).norm());
            }
        }
    }
    let mut unitarity = 0.0f64;
    for twice in 1..=5 {
        let j = HalfInt::from_twice(twice);
        for _ in 0..20 {
            let rho = rng.random_range(0.01..0.99);
            unitarity = unitarity.max(wigner_coin(j, rho).unwrap().unitarity_residual());
            let (a, b, g) = (
                rng.random_range(0.0..2.0 * PI),
                rng.random_range(0.0..PI),
                rng.random_range(0.0..2.0 * PI),
            );
            unitarity = unitarity.max(wigner_coin_euler(j, a, b, g).unwrap().unitarity_residual());
        }
    }
    outcome(
        dev <= 1e-14 && unitarity <= 1e-12,
        format!("entry dev {dev:.2e} (<= 1e-14), unitarity {unitarity:.2e} (<= 1e-12)"),
    )
}

fn basis_reproduction() -> Outcome {
    let mut dev = 0.0f64;
    for twice in 1..=4 {
        let j = HalfInt::from_twice(twice);
        for rho in [0.15, 0.3, 0.45, 0.5, 0.6, 0.75, 0.9] {
            let generic = generic_suitable_basis(j, rho).unwrap();
            let printed = suitable_basis(j, rho).unwrap();
            dev = dev.max(max_deviation_up_to_sign(&generic, &printed));
        }
    }
    outcome(dev <= 1e-10, format!("max column dev up to sign {dev:.2e} (<= 1e-10)"))
}

fn weak_limit_overlay() -> Outcome {
    let opts = ExclusionOptions::default();
    let reports: Vec<_> = verify::figure_suite()
        .iter()
        .map(|c| verify::figure_density_report(c, &opts).unwrap())
        .collect();
    let failing: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| {
            format!(
                "{}={:.3}",
                r.scenario.trim_end_matches(" density"),
                r.metric("l1").unwrap()
            )
        })
        .collect();
    let (coarse, at) = worst(&reports, "l1_binned10");
    outcome(
        failing.is_empty(),
        format!(
            "{}/{} configs with L1 <= 0.08; failing: [{}]; worst 10-site binned L1 {coarse:.3} ({at})",
            reports.len() - failing.len(),
            reports.len(),
            failing.join(", ")
        ),
    )
}

fn peak_elimination() -> Outcome {
    let reports: Vec<_> = verify::figure_suite()
        .iter()
        .map(|c| verify::peak_elimination_report(c, 300, 10).unwrap())
        .collect();
    let mut failing = Vec::new();
    for r in &reports {
        for m in r.metrics.iter().filter(|m| m.pass == Some(false)) {
            failing.push(format!(
                "{} {}={:.3}",
                r.scenario.trim_end_matches(" peaks t=300"),
                m.name,
                m.value
            ));
        }
    }
    let gated: usize = reports
        .iter()
        .map(|r| r.metrics.iter().filter(|m| m.pass.is_some()).count())
        .sum();
    outcome(
        failing.is_empty(),
        format!(
            "{}/{gated} gates pass; failing: [{}]",
            gated - failing.len(),
            failing.join(", ")
        ),
    )
}

fn trapping_states(j: HalfInt) -> &'static [&'static str] {
    if j.twice() == 2 {
        &["chi0", "chi+", "lambda+", "lambda-", "chi-"]
    } else {
        &["chi0", "chi1+", "lambda+", "lambda-", "lambda0", "chi1-", "chi2-"]
    }
}

fn time_averaged_dev(j: HalfInt, rho: f64, state: &str, start: u64, span: u64) -> f64 {
    let coin = wigner_coin(j, rho).unwrap();
    let psi = named_state(j, state).unwrap();
    let model = TrappingModel::new(rho, &psi).unwrap();
    let mut walk = evolve(&coin, &psi, start).unwrap();
    let mut acc = [0.0; 11];
    let mut samples = 0.0;
    for s in 0..span {
        if s % 2 == 0 {
            for x in -5..=5i64 {
                acc[(x + 5) as usize] += walk.site(2 * x).iter().map(|c| c.norm_sqr()).sum::<f64>();
            }
            samples += 1.0;
        }
        walk = step(&walk, &coin).unwrap();
    }
    (-5..=5i64)
        .map(|x| (acc[(x + 5) as usize] / samples - trapping_probability(&model, x)).abs())
        .fold(0.0, f64::max)
}

fn trapping_closed_forms(props: &[(HalfInt, f64, Propagator)]) -> Outcome {
    let mut failing = Vec::new();
    let mut count = 0;
    for (j, rho, prop) in props {
        for &name in trapping_states(*j) {
            let r = verify::trapping_overlay_with(prop, *rho, &named_state(*j, name).unwrap(), name, 5).unwrap();
            count += 1;
            if !r.passed() {
                let m = &r.metrics[0];
                failing.push((*j, *rho, name, m.value));
            }
        }
    }
    let listed: Vec<String> = failing
        .iter()
        .map(|(j, rho, n, v)| format!("j={j} rho={rho} {n}: {v:.4}"))
        .collect();
    let diagnostic = failing
        .iter()
        .max_by(|a, b| a.3.total_cmp(&b.3))
        .map(|&(j, rho, n, _)| {
            format!(
                "; time-averaged dev over t in [4000, 4200) for j={j} rho={rho} {n}: {:.1e}",
                time_averaged_dev(j, rho, n, 4000, 200)
            )
        })
        .unwrap_or_default();
    outcome(
        failing.is_empty(),
        format!(
            "{}/{count} cells within tolerance at t=10000; failing: [{}]{diagnostic}",
            count - failing.len(),
            listed.join(", ")
        ),
    )
}

/// `(1/4π) ∫₀^{2π} e^{-ixk} / (2 - ρ²(1 + cos k))^n dk` by the periodic trapezoid rule.
fn lattice_integral_oracle(order: i32, rho: f64, x: i64, nodes: usize) -> f64 {
    let h = 2.0 * PI / nodes as f64;
    let sum: f64 = (0..nodes)
        .map(|i| {
            let k = i as f64 * h;
            (x as f64 * k).cos() / (2.0 - rho * rho * (1.0 + k.cos())).powi(order)
        })
        .sum();
    sum * h / (4.0 * PI)
}

fn lattice_integrals() -> Outcome {
    let mut dev = 0.0f64;
    for rho in [0.3, 0.5, 0.8] {
        for x in -6..=6 {
            for order in [1u8, 2] {
                let closed = lattice_green_integral(order, rho, x).unwrap();
                dev = dev.max((closed - lattice_integral_oracle(order as i32, rho, x, 1 << 16)).abs());
            }
        }
    }
    outcome(dev <= 1e-10, format!("max |closed - quadrature| {dev:.2e} (<= 1e-10)"))
}

fn normalization_audit() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let mut gap = 0.0f64;
    let mut at = String::new();
    for twice in 1..=4 {
        let j = HalfInt::from_twice(twice);
        for _ in 0..50 {
            let rho = rng.random_range(0.1..0.9);
            let psi = random_state(&mut rng, j);
            let r = verify::audit_normalization(j, rho, &psi, 1e-5).unwrap();
            let g = r.metric("normalization_gap").unwrap();
            if g > gap {
                gap = g;
                at = r.scenario;
            }
        }
    }
    outcome(gap <= 1e-5, format!("max |mass - 1| {gap:.2e} (<= 1e-5) at {at}"))
}

fn gauge_equivalences() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    let beta = 2.0 * 0.5f64.acos();
    let mut alpha_dev = 0.0f64;
    for (twice, alpha) in [(2, 1.3), (3, PI / 3.0)] {
        let j = HalfInt::from_twice(twice);
        let r = verify::check_alpha_gauge(j, beta, alpha, &random_state(&mut rng, j), 200).unwrap();
        alpha_dev = alpha_dev.max(r.metric("max_site_dev").unwrap());
    }
    let mut gap400 = 0.0f64;
    let mut monotone = true;
    for (twice, gamma) in [(2, 0.7), (3, 1.1)] {
        let j = HalfInt::from_twice(twice);
        let psi = random_state(&mut rng, j);
        let mut previous = [f64::INFINITY; 2];
        for t in [100, 200, 400] {
            let r = verify::check_gamma_shift(j, beta, gamma, &psi, t).unwrap();
            let gaps = [
                r.metric("first_moment_gap").unwrap(),
                r.metric("second_moment_gap").unwrap(),
            ];
            for (g, p) in gaps.iter().zip(&mut previous) {
                monotone &= *g <= *p + 1e-12;
                *p = *g;
            }
            if t == 400 {
                gap400 = gap400.max(gaps[0]).max(gaps[1]);
            }
        }
    }
    outcome(
        alpha_dev <= 1e-12 && gap400 <= 0.02 && monotone,
        format!("alpha dev {alpha_dev:.2e} (<= 1e-12), gamma gaps at t=400 {gap400:.2e} (<= 0.02), non-increasing {monotone}"),
    )
}

fn decay_shape(props: &[(HalfInt, f64, Propagator)]) -> Outcome {
    let j = HalfInt::from_int(2);
    let lambda0 = named_state(j, "lambda0").unwrap();
    let mut closed_dev = 0.0f64;
    let mut sim_dev = 0.0f64;
    let mut sim_at = 0.0;
    let mut floor = (0.0, 0.0);
    for (_, rho, prop) in props.iter().filter(|(pj, _, _)| *pj == j) {
        let model = TrappingModel::new(*rho, &lambda0).unwrap();
        let q2 = q_factor(*rho).powi(2);
        for x in 1..=5i64 {
            for sign in [1, -1] {
                let ratio = trapping_probability(&model, sign * (x + 1)) / trapping_probability(&model, sign * x);
                closed_dev = closed_dev.max((ratio - q2).abs());
            }
        }
        let q = wigner_walk::bases::standard_amplitudes(&lambda0, *rho).unwrap();
        for sign in [1, -1] {
            let ratio = prop.probability(&q, sign * 4) / prop.probability(&q, sign * 2);
            let rel = (ratio / q2 - 1.0).abs();
            if rel > sim_dev {
                sim_dev = rel;
                sim_at = *rho;
                let h = CoinStateVector {
                    j,
                    basis: BasisTag::Suitable,
                    amps: wigner_walk::bases::suitable_amplitudes(&lambda0, *rho).unwrap(),
                };
                let density = LimitDensityModel::new(*rho, &h).unwrap();
                floor = (
                    trapping_probability(&model, 2 * sign),
                    2.0 / prop.t() as f64 * limit_density(&density, 0.0),
                );
            }
        }
    }
    let plus = named_state(j, "lambda+").unwrap();
    let model = TrappingModel::new(0.6, &plus).unwrap();
    let closed: Vec<f64> = (0..3).map(|x| trapping_probability(&model, x)).collect();
    let band = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max) / v.iter().cloned().fold(f64::INFINITY, f64::min);
    let (_, _, prop) = props.iter().find(|(pj, rho, _)| *pj == j && *rho == 0.6).unwrap();
    let q = wigner_walk::bases::standard_amplitudes(&plus, 0.6).unwrap();
    let simulated: Vec<f64> = (0..3).map(|x| prop.probability(&q, 2 * x)).collect();
    let (closed_band, sim_band) = (band(&closed), band(&simulated));
    outcome(
        closed_dev <= 1e-12 && sim_dev <= 0.01 && closed_band <= 1.5 && sim_band <= 1.5,
        format!(
            "lambda0 closed ratio dev {closed_dev:.2e} (<= 1e-12), simulated p(4)/p(2) rel dev {sim_dev:.3} at rho={sim_at} (<= 0.01) \
             with p_inf(4) {:.1e} against continuum (2/t)nu(0) {:.1e}; \
             lambda+ rho=0.6 plateau max/min closed {closed_band:.3} simulated {sim_band:.3} (<= 1.5)",
            floor.0, floor.1
        ),
    )
}

fn report(index: usize, name: &str, budget: Duration, run: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = run();
    let elapsed = start.elapsed();
    let in_time = elapsed <= budget;
    let pass = o.pass && in_time;
    println!(
        "criterion {index} {name}: {} | {} | {:.2}s (budget {}s)",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    pass
}

fn main() {
    let secs = Duration::from_secs;
    let mut passed = vec![
        report(1, "coin correctness", secs(1), coin_correctness),
        report(2, "basis reproduction", secs(1), basis_reproduction),
        report(3, "weak-limit overlay", secs(10), weak_limit_overlay),
        report(4, "peak elimination", secs(30), peak_elimination),
    ];
    let mut props = Vec::new();
    passed.push(report(5, "trapping closed forms", secs(120), || {
        for twice in [2, 4] {
            for rho in [0.4, 0.5, 0.6] {
                let j = HalfInt::from_twice(twice);
                props.push((j, rho, Propagator::compute(&wigner_coin(j, rho).unwrap(), 10_000, 12)));
            }
        }
        trapping_closed_forms(&props)
    }));
    passed.push(report(6, "lattice integrals", secs(1), lattice_integrals));
    passed.push(report(7, "normalization audit", secs(30), normalization_audit));
    passed.push(report(8, "gauge equivalences", secs(60), gauge_equivalences));
    passed.push(report(9, "j=2 decay shape", secs(60), || decay_shape(&props)));
    let n = passed.iter().filter(|&&p| p).count();
    println!("acceptance: {n}/{} criteria pass", passed.len());
    if n != passed.len() {
        std::process::exit(1);
    }
}
