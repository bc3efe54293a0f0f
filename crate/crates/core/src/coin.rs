//! Wigner rotation coins.
//!
//! Rows and columns are ordered by the magnetic projection `m = j, j-1, ..., -j`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};
use crate::halfint::HalfInt;

/// Largest `2j` for which factorials are multiplied out directly.
const DIRECT_FACTORIAL_LIMIT: i32 = 20;

/// Parameters the coin was built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CoinParams {
    Rho { rho: f64 },
    Euler { alpha: f64, beta: f64, gamma: f64 },
}

/// Dense unitary coin of dimension `2j+1`, row major.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinOperator {
    j: HalfInt,
    params: CoinParams,
    entries: Vec<Complex64>,
}

impl CoinOperator {
    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn dim(&self) -> usize {
        self.j.dim()
    }

    pub fn params(&self) -> CoinParams {
        self.params
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    /// True when every entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|z| z.im == 0.0)
    }

    /// Real parts, row major.
    pub fn real_entries(&self) -> Vec<f64> {
        self.entries.iter().map(|z| z.re).collect()
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let d = self.dim();
        (0..d)
            .map(|r| (0..d).map(|c| self.entries[r * d + c] * v[c]).sum())
            .collect()
    }

    /// `max |(R^† R - I)_{ab}|`.
    pub fn unitarity_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for a in 0..d {
            for b in 0..d {
                let mut s = Complex64::new(0.0, 0.0);
                for r in 0..d {
                    s += self.entries[r * d + a].conj() * self.entries[r * d + b];
                }
                if a == b {
                    s -= 1.0;
                }
                worst = worst.max(s.norm());
            }
        }
        worst
    }
}

fn validate_projection(j: HalfInt, m: HalfInt) -> Result<()> {
    j.index_of(m).map(|_| ())
}

fn factorial(n: i32) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `ln n!` by compensated summation.
fn ln_factorial(n: i32) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for k in 2..=n {
        let y = (k as f64).ln() - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Valid summation range `max(0, m-n) ..= min(j+m, j-n)` of the factor sum.
pub fn summation_range(j: HalfInt, m: HalfInt, n: HalfInt) -> (i32, i32) {
    let (j, m, n) = (j.twice(), m.twice(), n.twice());
    let lo = 0.max((m - n) / 2);
    let hi = ((j + m) / 2).min((j - n) / 2);
    (lo, hi)
}

/// `Γ(j,m,n,l) = (-1)^l √((j+m)!(j-m)!(j+n)!(j-n)!) / ((j-n-l)!(j+m-l)!(l-m+n)! l!)`.
pub fn gamma_factor(j: HalfInt, m: HalfInt, n: HalfInt, l: i32) -> Result<f64> {
    HalfInt::spin(j.twice())?;
    validate_projection(j, m)?;
    validate_projection(j, n)?;
    let (tj, tm, tn) = (j.twice(), m.twice(), n.twice());
    let den = [(tj - tn) / 2 - l, (tj + tm) / 2 - l, l - (tm - tn) / 2, l];
    if den.iter().any(|&a| a < 0) {
        return Err(WalkError::Domain(format!(
            "l = {l} outside the valid range for (j, m, n) = ({j}, {m}, {n})"
        )));
    }
    let num = [(tj + tm) / 2, (tj - tm) / 2, (tj + tn) / 2, (tj - tn) / 2];
    let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
    if tj <= DIRECT_FACTORIAL_LIMIT {
        let root = num.iter().map(|&a| factorial(a)).product::<f64>().sqrt();
        let below = den.iter().map(|&a| factorial(a)).product::<f64>();
        Ok(sign * root / below)
    } else {
        let ln_root = 0.5 * num.iter().map(|&a| ln_factorial(a)).sum::<f64>();
        let ln_below = den.iter().map(|&a| ln_factorial(a)).sum::<f64>();
        Ok(sign * (ln_root - ln_below).exp())
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(WalkError::Domain(format!("rho = {rho} outside [0, 1]")));
    }
    Ok(())
}

/// Matrix element `r^(j)_{mn}(ρ)` of the real rotation with `ρ = cos(β/2)`.
pub fn small_d_entry(j: HalfInt, m: HalfInt, n: HalfInt, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    HalfInt::spin(j.twice())?;
    validate_projection(j, m)?;
    validate_projection(j, n)?;
    let s = (1.0 - rho * rho).max(0.0).sqrt();
    Ok(d_entry_unchecked(j, m, n, rho, s))
}

fn d_entry_unchecked(j: HalfInt, m: HalfInt, n: HalfInt, c: f64, s: f64) -> f64 {
    let (lo, hi) = summation_range(j, m, n);
    let diff = (m.twice() - n.twice()) / 2;
    (lo..=hi)
        .map(|l| {
            let g = gamma_factor(j, m, n, l).expect("summation range is valid");
            g * c.powi(j.twice() + diff - 2 * l) * s.powi(2 * l - diff)
        })
        .sum()
}

fn real_matrix(j: HalfInt, c: f64, s: f64) -> Vec<f64> {
    let d = j.dim();
    let mut out = vec![0.0; d * d];
    for (a, m) in j.projections().enumerate() {
        for (b, n) in j.projections().enumerate() {
            out[a * d + b] = d_entry_unchecked(j, m, n, c, s);
        }
    }
    out
}

/// The reduced coin `R^(j)(ρ) = exp(-iβ J_y)` with `ρ = cos(β/2)`; all entries real.
pub fn wigner_coin(j: HalfInt, rho: f64) -> Result<CoinOperator> {
    HalfInt::spin(j.twice())?;
    check_rho(rho)?;
    let s = (1.0 - rho * rho).max(0.0).sqrt();
    let entries = real_matrix(j, rho, s)
        .into_iter()
        .map(|x| Complex64::new(x, 0.0))
        .collect();
    Ok(CoinOperator {
        j,
        params: CoinParams::Rho { rho },
        entries,
    })
}

/// The full coin with entries `e^{-iαm} r_{mn}(β) e^{-iγn}`.
pub fn wigner_coin_euler(j: HalfInt, alpha: f64, beta: f64, gamma: f64) -> Result<CoinOperator> {
    HalfInt::spin(j.twice())?;
    if !(0.0..=std::f64::consts::PI).contains(&beta) {
        return Err(WalkError::Domain(format!("beta = {beta} outside [0, pi]")));
    }
    let (c, s) = ((0.5 * beta).cos(), (0.5 * beta).sin());
    let r = real_matrix(j, c, s);
    let d = j.dim();
    let mut entries = Vec::with_capacity(d * d);
    for (a, m) in j.projections().enumerate() {
        for (b, n) in j.projections().enumerate() {
            let phase = -(alpha * m.value() + gamma * n.value());
            entries.push(Complex64::from_polar(r[a * d + b], phase));
        }
    }
    Ok(CoinOperator {
        j,
        params: CoinParams::Euler { alpha, beta, gamma },
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_factor(h(1), h(1), h(-1), 1).unwrap(), -1.0);
        assert_eq!(gamma_factor(h(4), h(4), h(4), 0).unwrap(), 1.0);
        assert!(matches!(gamma_factor(h(1), h(1), h(-1), 0), Err(WalkError::Domain(_))));
    }

    #[test]
    fn log_branch_matches_direct() {
        // j = 11 goes through the log-factorial path
        let j = h(22);
        let (m, n) = (h(4), h(-6));
        let (lo, hi) = summation_range(j, m, n);
        for l in lo..=hi {
            let g = gamma_factor(j, m, n, l).unwrap();
            let num = [13, 9, 8, 14].iter().map(|&a| factorial(a)).product::<f64>().sqrt();
            let den = [14 - l, 13 - l, l - 5, l]
                .iter()
                .map(|&a| factorial(a))
                .product::<f64>();
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            assert!((g - sign * num / den).abs() <= 1e-12 * g.abs().max(1.0));
        }
    }

    #[test]
    fn small_d_examples() {
        for &rho in &[0.0, 0.2, 0.7, 1.0] {
            let s = (1.0f64 - rho * rho).sqrt();
            let a = small_d_entry(h(1), h(1), h(-1), rho).unwrap();
            assert!((a + s).abs() < 1e-15);
            let b = small_d_entry(h(2), h(0), h(0), rho).unwrap();
            assert!((b - (2.0 * rho * rho - 1.0)).abs() < 1e-15);
        }
        let j = h(5);
        for m in j.projections() {
            for n in j.projections() {
                let v = small_d_entry(j, m, n, 1.0).unwrap();
                assert_eq!(v, if m == n { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn coin_examples() {
        let r = wigner_coin(h(1), 0.8).unwrap();
        let want = [0.8, -0.6, 0.6, 0.8];
        for (z, w) in r.entries().iter().zip(want) {
            assert!((z.re - w).abs() < 1e-15 && z.im == 0.0);
        }
        let id = wigner_coin(h(4), 1.0).unwrap();
        for a in 0..5 {
            for b in 0..5 {
                assert_eq!(id.entry(a, b).re, if a == b { 1.0 } else { 0.0 });
            }
        }
        assert!(wigner_coin(h(2), 1.5).is_err());
    }

    #[test]
    fn euler_alpha_rows() {
        let beta = 1.1;
        let a = wigner_coin_euler(h(2), std::f64::consts::PI, beta, 0.0).unwrap();
        let b = wigner_coin_euler(h(2), 0.0, beta, 0.0).unwrap();
        for (r, m) in h(2).projections().enumerate() {
            let ph = Complex64::from_polar(1.0, -std::f64::consts::PI * m.value());
            for c in 0..3 {
                assert!((a.entry(r, c) - ph * b.entry(r, c)).norm() < 1e-15);
            }
        }
        assert!(wigner_coin_euler(h(2), 0.0, 4.0, 0.0).is_err());
    }
}
