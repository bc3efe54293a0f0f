//! Weak-limit densities of the rescaled position `x/t`.
//!
//! The limit density is a sum over the positive projections `m`,
//! `ν(v) = Σ_m (1/2m) μ(v/2m; ρ) M^{(j,m)}(v/2m)`, where `μ` is Konno's density and the weights
//! `M^{(j,m)}` are polynomials of degree `2j` fixed by the suitable-basis amplitudes of the
//! initial coin state.

use std::f64::consts::PI;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bases::check_open_rho;
use crate::error::{Result, WalkError};
use crate::evolution::{BasisTag, CoinStateVector};
use crate::halfint::HalfInt;

/// Starting Gauss-Legendre order of [`density_moment`].
pub const QUADRATURE_START: usize = 256;
/// Convergence threshold between successive doublings.
pub const QUADRATURE_TOL: f64 = 1e-9;
const QUADRATURE_MAX: usize = 8192;

/// Konno's density `√(1-a²) / (π (1-v²) √(a²-v²))` on `|v| < a`, zero elsewhere.
pub fn konno_density(v: f64, a: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(WalkError::Domain(format!("Konno parameter a = {a} outside (0, 1)")));
    }
    Ok(konno_unchecked(v, a))
}

fn konno_unchecked(v: f64, a: f64) -> f64 {
    if v.abs() >= a {
        return 0.0;
    }
    (1.0 - a * a).sqrt() / (PI * (1.0 - v * v) * ((a - v) * (a + v)).sqrt())
}

/// Polynomial `Σ_k M_k u^k` weighting the component with projection `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightPolynomial {
    pub j: HalfInt,
    pub m: HalfInt,
    pub coeffs: Vec<f64>,
}

impl WeightPolynomial {
    pub fn eval(&self, u: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)
    }

    /// Divides by `ρ² - u²`; returns the quotient coefficients and the remainder `(r0, r1)`
    /// of `r0 + r1 u`. A vanishing remainder removes both edge divergences of the component.
    pub fn divide_by_edge(&self, rho: f64) -> (Vec<f64>, [f64; 2]) {
        // long division by -(u² - ρ²), highest power first
        let mut rem = self.coeffs.clone();
        let n = rem.len();
        if n < 3 {
            let r0 = rem.first().copied().unwrap_or(0.0);
            let r1 = rem.get(1).copied().unwrap_or(0.0);
            return (vec![0.0], [r0, r1]);
        }
        let mut quot = vec![0.0; n - 2];
        for k in (2..n).rev() {
            let c = rem[k];
            quot[k - 2] = -c;
            rem[k] = 0.0;
            rem[k - 2] += c * rho * rho;
        }
        (quot, [rem[0], rem[1]])
    }

    /// `M(ρ)` and `M(-ρ)`: the weights at the two edges of the component's support.
    pub fn edge_values(&self, rho: f64) -> (f64, f64) {
        (self.eval(rho), self.eval(-rho))
    }
}

/// Amplitudes of a coin state in the suitable basis; errors for other tags.
fn suitable_amps(h: &CoinStateVector) -> Result<&[Complex64]> {
    if h.basis != BasisTag::Suitable {
        return Err(WalkError::BasisMismatch(format!(
            "weights take suitable-basis amplitudes, got {}",
            h.basis
        )));
    }
    Ok(&h.amps)
}

/// `2 Re(a b̄)`.
fn cross(a: Complex64, b: Complex64) -> f64 {
    2.0 * (a * b.conj()).re
}

/// Closed-form weight polynomial of component `m` for `j <= 2`.
pub fn weight_polynomial(j: HalfInt, m: HalfInt, h: &CoinStateVector, rho: f64) -> Result<WeightPolynomial> {
    check_open_rho(rho)?;
    if h.j != j {
        return Err(WalkError::SpinMismatch {
            expected: j.twice(),
            found: h.j.twice(),
        });
    }
    let a = suitable_amps(h)?;
    let n2 = |z: Complex64| z.norm_sqr();
    let r3 = 3f64.sqrt();
    let (r2, r3p, r4) = (rho * rho, rho.powi(3), rho.powi(4));
    let coeffs = match (j.twice(), m.twice()) {
        (1, 1) => {
            let (hp, _) = (a[0], a[1]);
            vec![1.0, (1.0 - 2.0 * n2(hp)) / rho]
        }
        (2, 2) => {
            let (h0, hp, hm) = (a[0], a[1], a[2]);
            vec![n2(hp) + n2(hm), cross(h0, hm) / rho, (n2(h0) - n2(hp)) / r2]
        }
        (3, 1) | (3, 3) => {
            let (p1, m1, p2, m2) = (a[0], a[1], a[2], a[3]);
            let x = cross(p1, p2) - cross(m1, m2);
            let y = cross(p1, p2) + cross(m1, m2);
            let aa = r3 * (n2(p1) + n2(m1) - n2(p2) - n2(m2));
            let bb = 3.0 * n2(p1) - 3.0 * n2(m1) + n2(p2) - n2(m2);
            if m.twice() == 1 {
                vec![
                    n2(p1) + n2(m1),
                    -(2.0 * (n2(p1) - n2(m1)) + 0.5 * r3 * x) / rho,
                    -r3 / (4.0 * r2) * (aa - y),
                    3.0 / (4.0 * r3p) * (bb + r3 * x),
                ]
            } else {
                vec![
                    n2(p2) + n2(m2),
                    r3 / (2.0 * rho) * x,
                    r3 / (4.0 * r2) * (aa - y),
                    -1.0 / (4.0 * r3p) * (bb + r3 * x),
                ]
            }
        }
        (4, 2) => {
            let (h0, p1, m1, p2, m2) = (a[0], a[1], a[2], a[3], a[4]);
            vec![
                n2(p1) + n2(m1),
                (cross(p1, m2) + cross(p2, m1) + r3 * cross(h0, m1)) / rho,
                (3.0 * n2(h0) - 4.0 * n2(p1) - n2(m1) + n2(p2) + n2(m2) + r3 * cross(h0, p2)) / r2,
                -(2.0 * cross(p1, m2) + cross(p2, m1) + r3 * cross(h0, m1)) / r3p,
                -(3.0 * n2(h0) - 4.0 * n2(p1) + n2(p2) + r3 * cross(h0, p2)) / r4,
            ]
        }
        (4, 4) => {
            let (h0, p1, m1, p2, m2) = (a[0], a[1], a[2], a[3], a[4]);
            vec![
                n2(p2) + n2(m2),
                -(cross(p1, m2) + cross(m1, p2)) / rho,
                (n2(p1) + n2(m1) - n2(p2) - n2(m2) - 0.5 * r3 * cross(h0, p2)) / r2,
                (2.0 * cross(p1, m2) + cross(m1, p2) + r3 * cross(h0, m1)) / (2.0 * r3p),
                (3.0 * n2(h0) - 4.0 * n2(p1) + n2(p2) + r3 * cross(h0, p2)) / (4.0 * r4),
            ]
        }
        (tj, _) if tj > 4 => {
            return Err(WalkError::Unsupported(format!("no closed-form weights for j = {j}")));
        }
        _ => {
            return Err(WalkError::Index(format!(
                "m = {m} is not a positive projection of j = {j}"
            )))
        }
    };
    Ok(WeightPolynomial { j, m, coeffs })
}

/// Positive projections `m > 0` of `j`, slowest first.
pub fn positive_projections(j: HalfInt) -> Vec<HalfInt> {
    let start = if j.is_integer() { 2 } else { 1 };
    (start..=j.twice()).step_by(2).map(HalfInt::from_twice).collect()
}

/// Limit density of one walk configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitDensityModel {
    pub j: HalfInt,
    pub rho: f64,
    pub components: Vec<WeightPolynomial>,
}

impl LimitDensityModel {
    /// Builds every component from a suitable-basis coin state.
    pub fn new(rho: f64, h: &CoinStateVector) -> Result<Self> {
        let components = positive_projections(h.j)
            .into_iter()
            .map(|m| weight_polynomial(h.j, m, h, rho))
            .collect::<Result<_>>()?;
        Ok(LimitDensityModel {
            j: h.j,
            rho,
            components,
        })
    }

    /// Density of the single component with projection `m`.
    pub fn component_density(&self, m: HalfInt, v: f64) -> f64 {
        self.components
            .iter()
            .find(|w| w.m == m)
            .map_or(0.0, |w| component_value(w, self.rho, v))
    }

    /// Edge positions `2mρ` of the divergences.
    pub fn caustics(&self) -> Vec<f64> {
        self.components.iter().map(|w| 2.0 * w.m.value() * self.rho).collect()
    }
}

fn component_value(w: &WeightPolynomial, rho: f64, v: f64) -> f64 {
    let two_m = 2.0 * w.m.value();
    let u = v / two_m;
    konno_unchecked(u, rho) * w.eval(u) / two_m
}

/// `ν(v)`; zero outside all supports.
pub fn limit_density(model: &LimitDensityModel, v: f64) -> f64 {
    model.components.iter().map(|w| component_value(w, model.rho, v)).sum()
}

/// Component density with the edge factor cancelled; finite at `|v| = 2mρ` whenever the
/// remainder of [`WeightPolynomial::divide_by_edge`] vanishes.
pub fn reduced_component_density(w: &WeightPolynomial, rho: f64, v: f64) -> f64 {
    let two_m = 2.0 * w.m.value();
    let u = v / two_m;
    if u.abs() > rho {
        return 0.0;
    }
    let (quot, rem) = w.divide_by_edge(rho);
    let q = quot.iter().rev().fold(0.0, |acc, c| acc * u + c);
    let edge = (rho * rho - u * u).max(0.0);
    let konno_part = (1.0 - rho * rho).sqrt() / (PI * (1.0 - u * u));
    let regular = konno_part * edge.sqrt() * q;
    let singular = if rem == [0.0, 0.0] {
        0.0
    } else {
        konno_unchecked(u, rho) * (rem[0] + rem[1] * u)
    };
    (regular + singular) / two_m
}

fn component_moment(w: &WeightPolynomial, rho: f64, n: u32, order: usize) -> Result<f64> {
    let rule = GaussLegendre::new(order).map_err(|e| WalkError::Domain(e.to_string()))?;
    let two_m = 2.0 * w.m.value();
    let k = (1.0 - rho * rho).sqrt() / PI;
    Ok(rule.integrate(-0.5 * PI, 0.5 * PI, |theta| {
        let u = rho * theta.sin();
        (two_m * u).powi(n as i32) * k / (1.0 - u * u) * w.eval(u)
    }))
}

/// `∫ vⁿ ν(v) dv` by the substitution `v = 2mρ sin θ` per component, doubling the
/// Gauss-Legendre order until successive estimates agree.
pub fn density_moment(model: &LimitDensityModel, n: u32) -> Result<f64> {
    let mut total = 0.0;
    for w in &model.components {
        let mut order = QUADRATURE_START;
        let mut prev = component_moment(w, model.rho, n, order)?;
        loop {
            order *= 2;
            let next = component_moment(w, model.rho, n, order)?;
            let done = (next - prev).abs() < QUADRATURE_TOL || order >= QUADRATURE_MAX;
            prev = next;
            if done {
                break;
            }
        }
        total += prev;
    }
    Ok(total)
}

/// [`density_moment`] plus, for `n = 0`, the trapped point mass at the origin.
pub fn density_moment_with_point_mass(model: &LimitDensityModel, n: u32, trapped: f64) -> Result<f64> {
    let m = density_moment(model, n)?;
    Ok(if n == 0 { m + trapped } else { m })
}

/// Residuals of the edge conditions of one component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakResidual {
    pub m: HalfInt,
    /// `M_1 + ρ² M_3 (+ ...)`: odd part of `M(ρ)` divided by `ρ`.
    pub odd: f64,
    /// `M_0 + ρ² M_2 + ρ⁴ M_4`: even part of `M(ρ)`.
    pub even: f64,
}

impl PeakResidual {
    /// Both zero: the two peaks of this component are gone.
    pub fn both_vanish(&self, tol: f64) -> bool {
        self.odd.abs() <= tol && self.even.abs() <= tol
    }
}

/// Edge-condition residuals for `j = 3/2` and `j = 2`.
pub fn peak_condition_residuals(h: &CoinStateVector, rho: f64) -> Result<Vec<PeakResidual>> {
    if !matches!(h.j.twice(), 3 | 4) {
        return Err(WalkError::Unsupported(format!(
            "peak conditions are tabulated for j = 3/2, 2; got j = {}",
            h.j
        )));
    }
    let model = LimitDensityModel::new(rho, h)?;
    Ok(model
        .components
        .iter()
        .map(|w| {
            let mut odd = 0.0;
            let mut even = 0.0;
            for (k, c) in w.coeffs.iter().enumerate() {
                if k % 2 == 0 {
                    even += c * rho.powi(k as i32);
                } else {
                    odd += c * rho.powi(k as i32 - 1);
                }
            }
            PeakResidual { m: w.m, odd, even }
        })
        .collect())
}

/// Named families of coin states with reduced peak counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecialState {
    /// `j = 3/2`, `h₂^± = -h₁^±/√3`: no peaks of the slower walk.
    InnerFree { h1_plus: Complex64, h1_minus: Complex64 },
    /// `j = 3/2`, `h₂^± = √3 h₁^±`: no peaks of the faster walk.
    OuterFree { h1_plus: Complex64, h1_minus: Complex64 },
    /// `j = 2`, `½χ₀ + (√3/2)χ₂⁺`: no ballistic peaks at all.
    J2SinglePeak,
    /// `j = 2`, `½χ₀ - (√3/2)χ₂⁺`: the slower walk is absent.
    J2NoSlower,
}

/// Suitable-basis coin state of a [`SpecialState`], normalized.
pub fn special_state(kind: SpecialState) -> Result<CoinStateVector> {
    let z = Complex64::new(0.0, 0.0);
    let r3 = 3f64.sqrt();
    let (j, amps) = match kind {
        SpecialState::InnerFree { h1_plus, h1_minus } => (
            HalfInt::from_twice(3),
            vec![h1_plus, h1_minus, -h1_plus / r3, -h1_minus / r3],
        ),
        SpecialState::OuterFree { h1_plus, h1_minus } => (
            HalfInt::from_twice(3),
            vec![h1_plus, h1_minus, h1_plus * r3, h1_minus * r3],
        ),
        SpecialState::J2SinglePeak => (HalfInt::from_int(2), vec![0.5.into(), z, z, (0.5 * r3).into(), z]),
        SpecialState::J2NoSlower => (HalfInt::from_int(2), vec![0.5.into(), z, z, (-0.5 * r3).into(), z]),
    };
    CoinStateVector::normalized(j, BasisTag::Suitable, amps).map(|(s, _)| s)
}
