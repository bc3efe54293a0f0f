//! Trapping near the origin for integer `j`.
//!
//! The evolution in quasi-momentum space, `Ũ(k) = Diag(e^{2imk}) R`, has a `k`-independent
//! eigenvalue 1 for `j = 1, 2`. Its eigenvector `v(k)` yields the limiting amplitude
//! `ψ∞(X) = (1/2π) ∫ e^{iXk} v(k) ⟨v(k)|ψ_C⟩ dk`, which is supported on even sites and decays as
//! a power of `Q = (2 - ρ² - 2√(1-ρ²)) / ρ²`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bases::{check_open_rho, lambda_amplitudes, standard_amplitudes, suitable_amplitudes};
use crate::error::{Result, WalkError};
use crate::evolution::{BasisTag, CoinStateVector};
use crate::halfint::HalfInt;

/// Stop summing the profile once a term falls below this.
pub const SERIES_CUTOFF: f64 = 1e-15;

/// Decay base `Q`, evaluated as `ρ² / (1 + √(1-ρ²))²` to avoid cancellation.
pub fn q_factor(rho: f64) -> f64 {
    let s = (1.0 - rho * rho).sqrt();
    rho * rho / ((1.0 + s) * (1.0 + s))
}

fn check_spin(j: HalfInt) -> Result<()> {
    if !matches!(j.twice(), 2 | 4) {
        return Err(WalkError::Unsupported(format!(
            "trapping closed forms exist for j = 1, 2 only, not j = {j}"
        )));
    }
    Ok(())
}

/// Laurent coefficients in `z = e^{2ik}` of the unnormalized eigenvector, powers `-1, 0, 1`.
fn laurent(j: HalfInt, rho: f64) -> Vec<[f64; 3]> {
    let s = (1.0 - rho * rho).sqrt();
    if j.twice() == 2 {
        let r2 = 2f64.sqrt();
        vec![[0.0, r2 * s, 0.0], [-rho, rho, 0.0], [r2 * s, 0.0, 0.0]]
    } else {
        let c = (2.0f64 / 3.0).sqrt();
        vec![
            [0.0, 0.0, s * s],
            [0.0, -rho * s, rho * s],
            [0.5 * c * rho * rho, c * (1.0 - 2.0 * rho * rho), 0.5 * c * rho * rho],
            [-rho * s, rho * s, 0.0],
            [s * s, 0.0, 0.0],
        ]
    }
}

/// Normalized eigenvector of `Ũ(k)` for eigenvalue 1.
pub fn stationary_eigenvector(j: HalfInt, rho: f64, k: f64) -> Result<Vec<Complex64>> {
    check_spin(j)?;
    check_open_rho(rho)?;
    let z = Complex64::from_polar(1.0, 2.0 * k);
    let norm = if j.twice() == 2 {
        (4.0 - 2.0 * rho * rho * (1.0 + (2.0 * k).cos())).sqrt()
    } else {
        (2.0f64 / 3.0).sqrt() * (2.0 - rho * rho * (1.0 + (2.0 * k).cos()))
    };
    Ok(laurent(j, rho)
        .iter()
        .map(|c| (c[0] * z.conj() + c[1] + c[2] * z) / norm)
        .collect())
}

/// `I⁽¹⁾(x) = Q^|x| / (4√(1-ρ²))` and `I⁽²⁾(x) = Q^|x| (2 - ρ² + 2|x|√(1-ρ²)) / (16 (1-ρ²)^{3/2})`.
pub fn lattice_green_integral(order: u8, rho: f64, x: i64) -> Result<f64> {
    check_open_rho(rho)?;
    let s = (1.0 - rho * rho).sqrt();
    let qx = q_factor(rho).powi(x.unsigned_abs() as i32);
    match order {
        1 => Ok(qx / (4.0 * s)),
        2 => Ok(qx * (2.0 - rho * rho + 2.0 * x.unsigned_abs() as f64 * s) / (16.0 * s * s * s)),
        _ => Err(WalkError::Unsupported(format!("lattice integral of order {order}"))),
    }
}

/// `ψ∞(2x)` in the standard basis, as a finite combination of lattice integrals.
pub fn trapping_amplitude(psi: &CoinStateVector, rho: f64, x: i64) -> Result<Vec<Complex64>> {
    check_spin(psi.j)?;
    check_open_rho(rho)?;
    let q = standard_amplitudes(psi, rho)?;
    let coeffs = laurent(psi.j, rho);
    let (order, scale) = if psi.j.twice() == 2 { (1, 1.0) } else { (2, 3.0) };
    let kernel = |y: i64| lattice_green_integral(order, rho, y).map(|v| v * scale);
    let d = psi.j.dim();
    let mut out = vec![Complex64::new(0.0, 0.0); d];
    for a in 0..d {
        for b in 0..d {
            // coefficient of z^p in u_a(z) · conj(u_b(z)), p = pa - pb
            for (ia, ca) in coeffs[a].iter().enumerate() {
                for (ib, cb) in coeffs[b].iter().enumerate() {
                    let w = ca * cb;
                    if w == 0.0 {
                        continue;
                    }
                    let p = ia as i64 - ib as i64;
                    out[a] += q[b] * (w * kernel(x + p)?);
                }
            }
        }
    }
    Ok(out)
}

/// Closed-form trapping profile for `j = 1` (suitable basis) or `j = 2` (λ basis).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrappingModel {
    pub j: HalfInt,
    pub rho: f64,
    pub q: f64,
    /// `(h₀, h⁺, h⁻)` for `j = 1`; `(l₀, l⁺, l⁻, h₁⁻, h₂⁻)` for `j = 2`.
    pub amplitudes: Vec<Complex64>,
    pub basis: BasisTag,
}

impl TrappingModel {
    pub fn new(rho: f64, psi: &CoinStateVector) -> Result<Self> {
        check_spin(psi.j)?;
        check_open_rho(rho)?;
        let (amplitudes, basis) = if psi.j.twice() == 2 {
            (suitable_amplitudes(psi, rho)?, BasisTag::Suitable)
        } else {
            (lambda_amplitudes(psi, rho)?, BasisTag::Lambda)
        };
        Ok(TrappingModel {
            j: psi.j,
            rho,
            q: q_factor(rho),
            amplitudes,
            basis,
        })
    }

    /// Slope correction `f(x) = (√6/ρ²)(ρ² - 2 + 2|x|√(1-ρ²))` of the `j = 2` profile.
    pub fn correction(&self, x: i64) -> f64 {
        let r2 = self.rho * self.rho;
        6f64.sqrt() / r2 * (r2 - 2.0 + 2.0 * x.unsigned_abs() as f64 * (1.0 - r2).sqrt())
    }
}

/// `p∞(2x)`.
pub fn trapping_probability(model: &TrappingModel, x: i64) -> f64 {
    let rho = model.rho;
    let r2 = rho * rho;
    let s2 = 1.0 - r2;
    let q = model.q;
    let a = &model.amplitudes;
    let qx = q.powi(2 * x.unsigned_abs() as i32);
    if model.j.twice() == 2 {
        let (h0, hp) = (a[0], a[1]);
        let c = 2.0 * s2 / (r2 * r2);
        match x.signum() {
            0 => q / r2 * (s2 * h0.norm_sqr() + hp.norm_sqr()),
            1 => qx * c * (h0 + hp).norm_sqr(),
            _ => qx * c * (h0 - hp).norm_sqr(),
        }
    } else {
        let (l0, lp, lm) = (a[0], a[1], a[2]);
        let c = 1.5 * s2 / (r2 * r2);
        match x.signum() {
            0 => {
                let s = s2.sqrt();
                let q2 = q * q;
                9.0 * s2 / (4.0 * r2 * r2) * q2 * (lp.norm_sqr() + lm.norm_sqr())
                    + 0.375 * q2 * (lp + lm).norm_sqr()
                    + (2.0 - r2 - s) / (4.0 * r2) * q * l0.norm_sqr()
                    - 6f64.sqrt() * (2.0 - r2 + 0.5 * s) / (8.0 * r2) * q2 * 2.0 * ((lp + lm) * l0.conj()).re
            }
            1 => {
                let f = model.correction(x);
                qx * c * ((l0 + lp * f).norm_sqr() + lp.norm_sqr())
            }
            _ => {
                let f = model.correction(x);
                qx * c * ((l0 + lm * f).norm_sqr() + lm.norm_sqr())
            }
        }
    }
}

/// `j = 1` profile written with the λ amplitudes `l^± = ⟨λ^±|ψ⟩`.
pub fn lambda_profile_j1(lp: Complex64, lm: Complex64, rho: f64, x: i64) -> f64 {
    let r2 = rho * rho;
    let q = q_factor(rho);
    let c = 2.0 * (1.0 - r2) / (r2 * r2) * q.powi(2 * x.unsigned_abs() as i32);
    match x.signum() {
        0 => q / r2 * (lp.norm_sqr() + lm.norm_sqr() - 0.5 * r2 * (lp + lm).norm_sqr()),
        1 => c * 2.0 * lp.norm_sqr(),
        _ => c * 2.0 * lm.norm_sqr(),
    }
}

/// `Σ_x p∞(2x)`: geometric series for `j = 1`, truncated sum for `j = 2`.
pub fn trapping_total(model: &TrappingModel) -> f64 {
    let p0 = trapping_probability(model, 0);
    if model.j.twice() == 2 {
        let q2 = model.q * model.q;
        let edge = trapping_probability(model, 1) + trapping_probability(model, -1);
        return p0 + edge / (1.0 - q2);
    }
    let mut total = p0;
    let mut x = 1;
    loop {
        let term = trapping_probability(model, x) + trapping_probability(model, -x);
        total += term;
        if term < SERIES_CUTOFF && x > 2 {
            break;
        }
        x += 1;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{lambda_basis, suitable_basis};
    use crate::coin::wigner_coin;

    fn diag_step(j: HalfInt, k: f64, v: &[Complex64]) -> Vec<Complex64> {
        j.projections()
            .zip(v)
            .map(|(m, z)| Complex64::from_polar(1.0, 2.0 * m.value() * k) * z)
            .collect()
    }

    #[test]
    fn eigenvector_fixed() {
        for t in [2, 4] {
            let j = HalfInt::from_twice(t);
            let coin = wigner_coin(j, 0.55).unwrap();
            for i in 0..50 {
                let k = 0.13 * i as f64;
                let v = stationary_eigenvector(j, 0.55, k).unwrap();
                let u = diag_step(j, k, &coin.apply(&v));
                let r: f64 = u.iter().zip(&v).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                assert!(r < 1e-13);
                let n: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                assert!((n - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn q_values() {
        assert!((q_factor(0.5) - 0.0717967697244908).abs() < 1e-15);
        let rho: f64 = 0.37;
        let direct = (2.0 - rho * rho - 2.0 * (1.0 - rho * rho).sqrt()) / (rho * rho);
        assert!((q_factor(rho) - direct).abs() < 1e-14);
    }

    #[test]
    fn chi0_profile() {
        let j = HalfInt::from_int(1);
        let psi = CoinStateVector::real(j, BasisTag::Suitable, &[1.0, 0.0, 0.0]).unwrap();
        let m = TrappingModel::new(0.5, &psi).unwrap();
        let q = q_factor(0.5);
        assert!((trapping_probability(&m, 0) - 3.0 * q).abs() < 1e-15);
        let total = 3.0 * q + 48.0 * q * q / (1.0 - q * q);
        assert!((trapping_total(&m) - total).abs() < 1e-14);
        assert!((total - 0.4641016151377546).abs() < 1e-12);
    }

    #[test]
    fn amplitude_matches_probability() {
        let rho = 0.5;
        for (t, amps) in [(2, vec![0.3, -0.4, 0.866]), (4, vec![0.2, 0.5, -0.3, 0.6, 0.5])] {
            let j = HalfInt::from_twice(t);
            let psi =
                CoinStateVector::normalized(j, BasisTag::Suitable, amps.into_iter().map(Complex64::from).collect())
                    .unwrap()
                    .0;
            let model = TrappingModel::new(rho, &psi).unwrap();
            for x in -6..=6 {
                let a = trapping_amplitude(&psi, rho, x).unwrap();
                let p: f64 = a.iter().map(|z| z.norm_sqr()).sum();
                assert!((p - trapping_probability(&model, x)).abs() < 1e-13, "j2={t} x={x}");
            }
        }
    }

    #[test]
    fn one_sided_states() {
        for rho in [0.4, 0.5, 0.6] {
            let lb = lambda_basis(HalfInt::from_int(1), rho).unwrap();
            let lm = CoinStateVector {
                j: HalfInt::from_int(1),
                basis: BasisTag::Lambda,
                amps: vec![0.0.into(), 1.0.into(), 0.0.into()],
            };
            let model = TrappingModel::new(rho, &lm).unwrap();
            for x in 1..6 {
                assert!(trapping_probability(&model, x) < 1e-30);
                assert!(trapping_probability(&model, -x) > 0.0);
            }
            assert_eq!(lb.labels[1], "lambda-");
            let h = suitable_amplitudes(&lm, rho).unwrap();
            for x in -4..=4 {
                let direct = lambda_profile_j1(0.0.into(), 1.0.into(), rho, x);
                assert!((direct - trapping_probability(&model, x)).abs() < 1e-15, "{h:?}");
            }
        }
        let chi_minus = CoinStateVector::real(HalfInt::from_int(1), BasisTag::Suitable, &[0.0, 0.0, 1.0]).unwrap();
        let m = TrappingModel::new(0.5, &chi_minus).unwrap();
        assert_eq!(trapping_total(&m), 0.0);
        assert!(suitable_basis(HalfInt::from_int(1), 0.5).is_ok());
    }

    #[test]
    fn unsupported_spin() {
        let psi = CoinStateVector::real(HalfInt::from_twice(3), BasisTag::Standard, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            trapping_amplitude(&psi, 0.5, 0),
            Err(WalkError::Unsupported(_))
        ));
        assert!(lattice_green_integral(3, 0.5, 0).is_err());
    }
}
