//! Checks that bind simulation to the asymptotic theory.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bases::suitable_amplitudes;
use crate::coin::wigner_coin_euler;
use crate::error::{Result, WalkError};
use crate::evolution::{
    empirical_moment, evolve, position_distribution, BasisTag, CoinStateVector, ProbabilityProfile, Propagator,
};
use crate::halfint::HalfInt;
use crate::limitlaw::{density_moment, limit_density, LimitDensityModel};
use crate::numfmt::sig17;
use crate::trapping::{trapping_probability, trapping_total, TrappingModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
}

/// Named metrics of one scenario; gated metrics carry a pass flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub metrics: Vec<Metric>,
}

impl VerificationReport {
    pub fn new(scenario: impl Into<String>) -> Self {
        VerificationReport {
            scenario: scenario.into(),
            metrics: Vec::new(),
        }
    }

    /// Records a metric compared against `tolerance` with `value <= tolerance`.
    pub fn gate(&mut self, name: &str, value: f64, tolerance: f64) {
        let pass = value.is_finite() && value <= tolerance;
        self.metrics.push(Metric {
            name: name.into(),
            value,
            tolerance: Some(tolerance),
            pass: Some(pass),
        });
    }

    /// Records an ungated diagnostic.
    pub fn info(&mut self, name: &str, value: f64) {
        self.metrics.push(Metric {
            name: name.into(),
            value,
            tolerance: None,
            pass: None,
        });
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|m| m.name == name).map(|m| m.value)
    }

    pub fn passed(&self) -> bool {
        self.metrics.iter().all(|m| m.pass != Some(false))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("reports serialize")
    }
}

/// CSV summary `scenario,metric,value,tolerance,pass` of several reports.
pub fn reports_to_csv(reports: &[VerificationReport]) -> String {
    let mut s = String::from("scenario,metric,value,tolerance,pass\n");
    for r in reports {
        for m in &r.metrics {
            let tol = m.tolerance.map(sig17).unwrap_or_default();
            let pass = m.pass.map(|p| p.to_string()).unwrap_or_default();
            let _ = writeln!(s, "{},{},{},{},{}", r.scenario, m.name, sig17(m.value), tol, pass);
        }
    }
    s
}

/// Sites left out of the density comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExclusionOptions {
    /// Half width of every window in lattice sites.
    pub window: i64,
    /// Exclude the origin; `None` decides from the trapped mass of the state.
    pub exclude_origin: Option<bool>,
    /// Gate on the L¹ distance.
    pub tolerance: f64,
}

impl Default for ExclusionOptions {
    fn default() -> Self {
        ExclusionOptions {
            window: 5,
            exclude_origin: None,
            tolerance: 0.08,
        }
    }
}

/// Sites `x` with `|x - c| <= window` for any caustic `c = ±2mρt` (and the origin if asked).
pub fn excluded_site(x: i64, model: &LimitDensityModel, t: u64, opts: &ExclusionOptions, origin: bool) -> bool {
    if origin && x.abs() <= opts.window {
        return true;
    }
    model.caustics().iter().any(|&c| {
        let c = c * t as f64;
        (x as f64 - c).abs() <= opts.window as f64 || (x as f64 + c).abs() <= opts.window as f64
    })
}

/// L¹ distance between `p(x,t)` and `(2/t) ν(x/t)` on occupied sites outside the exclusion windows.
pub fn compare_density(
    profile: &ProbabilityProfile,
    model: &LimitDensityModel,
    trapped: f64,
    opts: &ExclusionOptions,
) -> Result<VerificationReport> {
    if profile.j != model.j {
        return Err(WalkError::SpinMismatch {
            expected: model.j.twice(),
            found: profile.j.twice(),
        });
    }
    if profile.t < 50 {
        return Err(WalkError::Domain(format!(
            "density comparison needs t >= 50, got {}",
            profile.t
        )));
    }
    let stray: f64 = profile
        .entries
        .iter()
        .filter(|e| !profile.is_occupied_site(e.x))
        .map(|e| e.p)
        .sum();
    if stray > 1e-12 {
        return Err(WalkError::Domain(format!(
            "profile has mass {stray} off the sublattice of j = {}, t = {}",
            profile.j, profile.t
        )));
    }
    let t = profile.t as f64;
    let origin = opts.exclude_origin.unwrap_or(trapped > 1e-12);
    let mut l1 = 0.0;
    let mut worst = 0.0f64;
    let mut excluded = 0.0;
    let mut binned = std::collections::BTreeMap::<i64, (f64, f64)>::new();
    for e in profile.entries.iter().filter(|e| profile.is_occupied_site(e.x)) {
        if excluded_site(e.x, model, profile.t, opts, origin) {
            excluded += e.p;
            continue;
        }
        let approx = 2.0 / t * limit_density(model, e.x as f64 / t);
        let dev = (e.p - approx).abs();
        l1 += dev;
        worst = worst.max(dev);
        let bin = binned.entry(e.x.div_euclid(10)).or_default();
        bin.0 += e.p;
        bin.1 += approx;
    }
    let coarse: f64 = binned.values().map(|(p, a)| (p - a).abs()).sum();
    let mut report = VerificationReport::new(format!("density j={} rho={} t={}", profile.j, model.rho, profile.t));
    report.gate("l1", l1, opts.tolerance);
    report.info("max_abs_dev", worst);
    report.info("excluded_mass", excluded);
    report.info("l1_binned10", coarse);
    report.info("p_origin", profile.get(0));
    report.info("nu_origin", limit_density(model, 0.0));
    report.info("trapped_total", trapped);
    Ok(report)
}

fn standard_state(psi: &CoinStateVector, rho: f64) -> Result<CoinStateVector> {
    crate::evolution::to_standard_for(psi, rho)
}

/// Largest per-site difference between walks with coins `R(α,β,0)` and `R(0,β,0)`.
pub fn check_alpha_gauge(
    j: HalfInt,
    beta: f64,
    alpha: f64,
    psi: &CoinStateVector,
    t: u64,
) -> Result<VerificationReport> {
    if t > 1000 {
        return Err(WalkError::Domain(format!(
            "alpha gauge check limited to t <= 1000, got {t}"
        )));
    }
    let psi = standard_state(psi, (0.5 * beta).cos())?;
    let a = position_distribution(&evolve(&wigner_coin_euler(j, alpha, beta, 0.0)?, &psi, t)?);
    let b = position_distribution(&evolve(&wigner_coin_euler(j, 0.0, beta, 0.0)?, &psi, t)?);
    let dev = a
        .entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| (x.p - y.p).abs())
        .fold(0.0, f64::max);
    let mut report = VerificationReport::new(format!("alpha-gauge j={j} beta={beta} alpha={alpha} t={t}"));
    report.gate("max_site_dev", dev, 1e-12);
    Ok(report)
}

/// Moment gaps between coin `R(0,β,γ)` with state `q_m e^{imγ}` and coin `R(0,β,0)` with `q_m`.
pub fn check_gamma_shift(
    j: HalfInt,
    beta: f64,
    gamma: f64,
    psi: &CoinStateVector,
    t: u64,
) -> Result<VerificationReport> {
    if t < 100 {
        return Err(WalkError::Domain(format!("gamma shift check needs t >= 100, got {t}")));
    }
    let psi = standard_state(psi, (0.5 * beta).cos())?;
    let rotated_amps: Vec<Complex64> = j
        .projections()
        .zip(&psi.amps)
        .map(|(m, q)| q * Complex64::from_polar(1.0, m.value() * gamma))
        .collect();
    let rotated = CoinStateVector {
        j,
        basis: BasisTag::Standard,
        amps: rotated_amps,
    };
    let a = position_distribution(&evolve(&wigner_coin_euler(j, 0.0, beta, gamma)?, &rotated, t)?);
    let b = position_distribution(&evolve(&wigner_coin_euler(j, 0.0, beta, 0.0)?, &psi, t)?);
    let gap = |n| -> Result<f64> { Ok((empirical_moment(&a, n)? - empirical_moment(&b, n)?).abs()) };
    let mut report = VerificationReport::new(format!("gamma-shift j={j} beta={beta} gamma={gamma} t={t}"));
    report.gate("first_moment_gap", gap(1)?, 0.02);
    report.gate("second_moment_gap", gap(2)?, 0.02);
    Ok(report)
}

/// Trapped mass of a state; zero for half-integer `j`.
pub fn trapped_mass(psi: &CoinStateVector, rho: f64) -> Result<f64> {
    if psi.j.is_integer() {
        Ok(trapping_total(&TrappingModel::new(rho, psi)?))
    } else {
        Ok(0.0)
    }
}

/// `|∫ν + trapped - 1|`, with the trapped term present for integer `j`.
pub fn audit_normalization(j: HalfInt, rho: f64, psi: &CoinStateVector, tolerance: f64) -> Result<VerificationReport> {
    if j.twice() > 4 || psi.j != j {
        return Err(WalkError::Unsupported(format!(
            "normalization audit needs j <= 2 matching the state, got j = {j}"
        )));
    }
    let h = CoinStateVector {
        j,
        basis: BasisTag::Suitable,
        amps: suitable_amplitudes(psi, rho)?,
    };
    let model = LimitDensityModel::new(rho, &h)?;
    let mass = density_moment(&model, 0)?;
    let trapped = trapped_mass(psi, rho)?;
    let mut report = VerificationReport::new(format!("normalization j={j} rho={rho}"));
    report.gate("normalization_gap", (mass + trapped - 1.0).abs(), tolerance);
    report.info("continuous_mass", mass);
    report.info("trapped_mass", trapped);
    Ok(report)
}

/// Empirical against limiting moments at several times, with `c` fitted in `gap ≈ c/√t`.
pub fn moment_consistency(rho: f64, psi: &CoinStateVector, times: &[u64], gate_tol: f64) -> Result<VerificationReport> {
    let h = CoinStateVector {
        j: psi.j,
        basis: BasisTag::Suitable,
        amps: suitable_amplitudes(psi, rho)?,
    };
    let model = LimitDensityModel::new(rho, &h)?;
    let coin = crate::coin::wigner_coin(psi.j, rho)?;
    let mut report = VerificationReport::new(format!("moments j={} rho={rho}", psi.j));
    for n in [1u32, 2] {
        let target = density_moment(&model, n)?;
        let (mut num, mut den) = (0.0, 0.0);
        for (i, &t) in times.iter().enumerate() {
            let profile = position_distribution(&evolve(&coin, psi, t)?);
            let gap = (empirical_moment(&profile, n)? - target).abs();
            let w = (t as f64).powf(-0.5);
            num += gap * w;
            den += w * w;
            let name = format!("moment{n}_gap_t{t}");
            if i + 1 == times.len() {
                report.gate(&name, gap, gate_tol);
            } else {
                report.info(&name, gap);
            }
        }
        report.info(&format!("moment{n}_fit_c"), num / den);
    }
    Ok(report)
}

/// Mass within `±window` of each ballistic position `±2mρt`, keyed by `(2m, sign)`.
pub fn ballistic_window_masses(profile: &ProbabilityProfile, rho: f64, window: i64) -> Vec<((i32, i8), f64)> {
    let t = profile.t as f64;
    crate::limitlaw::positive_projections(profile.j)
        .into_iter()
        .flat_map(|m| [1i8, -1].map(|sign| (m, sign)))
        .map(|(m, sign)| {
            let centre = (sign as f64 * 2.0 * m.value() * rho * t).round() as i64;
            let mass = (centre - window..=centre + window).map(|x| profile.get(x)).sum();
            ((m.twice(), sign), mass)
        })
        .collect()
}

/// One figure of the reference set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureConfig {
    pub id: &'static str,
    pub j: HalfInt,
    pub rho: f64,
    pub state: &'static str,
    pub t: u64,
    /// Number of absent peaks per speed `2m`, as `(2m, count)`; speeds not listed keep both.
    pub absent: Vec<(i32, usize)>,
    /// State whose peaks set the reference scale when no peak of this state survives.
    pub reference: Option<&'static str>,
}

/// Figure configurations with the number of peaks reported absent for each speed.
pub fn figure_suite() -> Vec<FigureConfig> {
    let h = HalfInt::from_twice;
    let fig = |id, j, rho, state, absent| FigureConfig {
        id,
        j,
        rho,
        state,
        t: 100,
        absent,
        reference: None,
    };
    vec![
        fig("half-chi-", h(1), 0.8, "chi-", vec![(1, 1)]),
        fig("one-chi0", h(2), 0.5, "chi0", vec![]),
        FigureConfig {
            reference: Some("chi-"),
            ..fig("one-chi+", h(2), 0.8, "chi+", vec![(2, 2)])
        },
        fig("one-chi-", h(2), 0.6, "chi-", vec![]),
        fig("threehalf-chi1+", h(3), 0.8, "chi1+", vec![(1, 1), (3, 1)]),
        fig("threehalf-chi2+", h(3), 0.5, "chi2+", vec![(1, 1), (3, 1)]),
        fig("threehalf-inner-free", h(3), 0.6, "inner_free", vec![(1, 2), (3, 1)]),
        fig("threehalf-outer-free", h(3), 0.8, "outer_free", vec![(1, 1), (3, 2)]),
        fig("two-chi0", h(4), 0.4, "chi0", vec![(2, 2)]),
        fig("two-chi1+", h(4), 0.6, "chi1+", vec![(4, 2)]),
        fig("two-chi1-", h(4), 0.3, "chi1-", vec![(2, 2)]),
        fig("two-chi2+", h(4), 0.8, "chi2+", vec![(2, 2)]),
        fig("two-chi2-", h(4), 0.5, "chi2-", vec![(4, 2)]),
        fig("two-single-peak", h(4), 0.5, "j2_single_peak", vec![(2, 2), (4, 2)]),
        fig("two-no-slower", h(4), 0.7, "j2_no_slower", vec![(2, 2)]),
    ]
}

/// Absent-peak counts per speed implied by a set of eliminated edges.
pub fn absent_counts(edges: &[(i32, i8)]) -> Vec<(i32, usize)> {
    let mut counts = std::collections::BTreeMap::new();
    for &(m2, _) in edges {
        *counts.entry(m2).or_insert(0) += 1;
    }
    counts.into_iter().collect()
}

/// Peaks eliminated according to the closed-form weights: edges where `M(±ρ)` vanishes.
pub fn eliminated_edges(model: &LimitDensityModel, tol: f64) -> Vec<(i32, i8)> {
    let mut out = Vec::new();
    for w in &model.components {
        let (plus, minus) = w.edge_values(model.rho);
        if plus.abs() <= tol {
            out.push((w.m.twice(), 1));
        }
        if minus.abs() <= tol {
            out.push((w.m.twice(), -1));
        }
    }
    out
}

fn figure_profile(j: HalfInt, rho: f64, state: &str, t: u64) -> Result<ProbabilityProfile> {
    let psi = crate::states::named_state(j, state)?;
    let mut profile = position_distribution(&crate::evolution::evolve_rho(j, rho, &psi, t)?);
    profile.rho = Some(rho);
    Ok(profile)
}

/// Weak-limit overlay of one figure configuration at its own time.
pub fn figure_density_report(cfg: &FigureConfig, opts: &ExclusionOptions) -> Result<VerificationReport> {
    let psi = crate::states::named_state(cfg.j, cfg.state)?;
    let h = CoinStateVector {
        j: cfg.j,
        basis: BasisTag::Suitable,
        amps: suitable_amplitudes(&psi, cfg.rho)?,
    };
    let model = LimitDensityModel::new(cfg.rho, &h)?;
    let profile = figure_profile(cfg.j, cfg.rho, cfg.state, cfg.t)?;
    let trapped = trapped_mass(&psi, cfg.rho)?;
    let mut report = compare_density(&profile, &model, trapped, opts)?;
    report.scenario = format!("{} density", cfg.id);
    Ok(report)
}

/// Window masses at the ballistic edges at time `t`. The edges with vanishing weight are the
/// eliminated peaks; their number per speed is checked against the figure, and each one is gated
/// at 10% of the largest surviving window. With no survivor the reference state's largest window
/// sets the scale, or 2% of the total mass when no reference is given. The `excess` diagnostics
/// subtract the continuum of the other speeds expected inside the window.
pub fn peak_elimination_report(cfg: &FigureConfig, t: u64, window: i64) -> Result<VerificationReport> {
    let profile = figure_profile(cfg.j, cfg.rho, cfg.state, t)?;
    let masses = ballistic_window_masses(&profile, cfg.rho, window);
    let psi = crate::states::named_state(cfg.j, cfg.state)?;
    let h = CoinStateVector {
        j: cfg.j,
        basis: BasisTag::Suitable,
        amps: suitable_amplitudes(&psi, cfg.rho)?,
    };
    let model = LimitDensityModel::new(cfg.rho, &h)?;
    let eliminated = eliminated_edges(&model, 1e-9);
    let surviving = masses
        .iter()
        .filter(|(edge, _)| !eliminated.contains(edge))
        .map(|&(_, m)| m)
        .fold(0.0, f64::max);
    let (scale, tolerance) = if surviving > 0.0 {
        (surviving, 0.1)
    } else if let Some(reference) = cfg.reference {
        let other = figure_profile(cfg.j, cfg.rho, reference, t)?;
        let best = ballistic_window_masses(&other, cfg.rho, window)
            .into_iter()
            .map(|(_, m)| m)
            .fold(0.0, f64::max);
        (best, 0.1)
    } else {
        (profile.total(), 0.02)
    };
    let tf = t as f64;
    let mut report = VerificationReport::new(format!("{} peaks t={t}", cfg.id));
    let counts_match = absent_counts(&eliminated) == cfg.absent;
    report.gate("absent_counts_match_figure", if counts_match { 0.0 } else { 1.0 }, 0.0);
    report.info("reference_mass", scale);
    for ((m2, sign), mass) in masses {
        let key = format!("edge_{}{m2}rho", if sign > 0 { "+" } else { "-" });
        if eliminated.contains(&(m2, sign)) {
            let centre = (sign as f64 * m2 as f64 * cfg.rho * tf).round() as i64;
            let background: f64 = (centre - window..=centre + window)
                .filter(|&x| profile.is_occupied_site(x))
                .map(|x| {
                    let v = x as f64 / tf;
                    let others: f64 = model
                        .components
                        .iter()
                        .filter(|w| w.m.twice() != m2)
                        .map(|w| model.component_density(w.m, v))
                        .sum();
                    2.0 / tf * others
                })
                .sum();
            report.gate(&format!("{key}_ratio"), mass / scale, tolerance);
            report.info(&format!("{key}_excess_ratio"), (mass - background) / scale);
        } else {
            report.info(&key, mass);
        }
    }
    Ok(report)
}

/// Largest `|p(2x,t) - p∞(2x)|` over `|x| <= xmax` with the evolution supplied by `prop`.
/// States without trapping are gated at 1e-4 on `p(2x,t)` itself, the others at 0.002.
pub fn trapping_overlay_with(
    prop: &Propagator,
    rho: f64,
    psi: &CoinStateVector,
    label: &str,
    xmax: i64,
) -> Result<VerificationReport> {
    let model = TrappingModel::new(rho, psi)?;
    let q = crate::evolution::to_standard_for(psi, rho)?.amps;
    let mut dev = 0.0f64;
    let mut peak = 0.0f64;
    for x in -xmax..=xmax {
        let p = prop.probability(&q, 2 * x);
        let limit = trapping_probability(&model, x);
        dev = dev.max((p - limit).abs());
        peak = peak.max(p);
    }
    let mut report = VerificationReport::new(format!("trapping j={} rho={rho} state={label} t={}", psi.j, prop.t()));
    if trapping_total(&model) < 1e-14 {
        report.gate("max_probability_near_origin", peak, 1e-4);
    } else {
        report.gate("max_abs_dev", dev, 0.002);
    }
    report.info("trapped_total", trapping_total(&model));
    Ok(report)
}

/// [`trapping_overlay_with`] for a named state, computing the evolution itself.
pub fn trapping_overlay(j: HalfInt, rho: f64, state: &str, t: u64, xmax: i64) -> Result<VerificationReport> {
    let prop = Propagator::compute(&crate::coin::wigner_coin(j, rho)?, t, 2 * xmax as u64);
    trapping_overlay_with(&prop, rho, &crate::states::named_state(j, state)?, state, xmax)
}
