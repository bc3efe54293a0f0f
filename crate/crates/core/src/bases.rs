//! Coin eigensystems, suitable bases and the trapping-adapted λ bases.
//!
//! The reduced coin is `exp(-iβ J_y)`, so its eigenvectors are the `J_y` eigenstates and do not
//! depend on `ρ`. They are obtained from the `β = π/2` rotation, which maps `J_z` eigenstates onto
//! `J_y` eigenstates; this stays exact where eigenphases collide (e.g. `j = 3/2`, `ρ = 1/2`).

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coin::wigner_coin;
use crate::error::{Result, WalkError};
use crate::evolution::{BasisTag, CoinStateVector};
use crate::halfint::HalfInt;

type Vector = Vec<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn real_vec(xs: &[f64]) -> Vector {
    xs.iter().map(|&x| re(x)).collect()
}

pub(crate) fn check_open_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(WalkError::Degenerate(rho));
    }
    Ok(())
}

/// Eigenvectors `|ψ_n^±⟩` with eigenvalues `e^{±iφ_n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub phase: f64,
    pub plus: Vector,
    pub minus: Vector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSystem {
    pub j: HalfInt,
    pub rho: f64,
    /// Ordered by increasing `|m_y|`, i.e. from the slowest to the fastest component.
    pub pairs: Vec<EigenPair>,
    /// Eigenvector for eigenvalue 1, present for integer `j`.
    pub zero_mode: Option<Vector>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Suitable,
    Lambda,
}

impl BasisKind {
    pub fn tag(self) -> BasisTag {
        match self {
            BasisKind::Suitable => BasisTag::Suitable,
            BasisKind::Lambda => BasisTag::Lambda,
        }
    }
}

/// Orthonormal coin basis given by standard-basis components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisSet {
    pub j: HalfInt,
    pub rho: f64,
    pub kind: BasisKind,
    pub labels: Vec<String>,
    pub vectors: Vec<Vector>,
}

impl BasisSet {
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn vector(&self, label: &str) -> Option<&Vector> {
        self.index_of(label).map(|i| &self.vectors[i])
    }

    /// `max |⟨e_a|e_b⟩ - δ_ab|`.
    pub fn gram_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (a, u) in self.vectors.iter().enumerate() {
            for (b, v) in self.vectors.iter().enumerate() {
                let mut g = inner(u, v);
                if a == b {
                    g -= 1.0;
                }
                worst = worst.max(g.norm());
            }
        }
        worst
    }

    pub fn to_json(&self) -> serde_json::Value {
        let vectors: Vec<_> = self
            .labels
            .iter()
            .zip(&self.vectors)
            .map(|(l, v)| {
                let comps: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
                serde_json::json!({ "label": l, "components": comps })
            })
            .collect();
        serde_json::json!({
            "j": self.j.to_string(),
            "rho": self.rho,
            "kind": self.kind,
            "vectors": vectors,
        })
    }
}

/// `⟨u|v⟩`, antilinear in `u`.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn i_pow(k: i32) -> Complex64 {
    match k.rem_euclid(4) {
        0 => re(1.0),
        1 => I,
        2 => re(-1.0),
        _ => -I,
    }
}

/// `|m_y|` of the n-th pair (1-based).
fn pair_speed(j: HalfInt, n: usize) -> HalfInt {
    if j.is_integer() {
        HalfInt::from_int(n as i32)
    } else {
        HalfInt::from_twice(2 * n as i32 - 1)
    }
}

/// Number of conjugate eigenvector pairs.
pub fn pair_count(j: HalfInt) -> usize {
    (j.dim()) / 2
}

/// `J_y` eigenstate with eigenvalue `m_y`, in the standard basis.
fn jy_eigenstate(j: HalfInt, half_pi: &[f64], m_y: HalfInt) -> Vector {
    let d = j.dim();
    let col = j.index_of(m_y).expect("m_y is a projection of j");
    j.projections()
        .enumerate()
        .map(|(a, m)| i_pow((j.twice() - m.twice()) / 2) * half_pi[a * d + col])
        .collect()
}

/// Eigensystem from the rotation structure; valid for every `j`.
pub fn generic_eigensystem(j: HalfInt, rho: f64) -> Result<EigenSystem> {
    check_open_rho(rho)?;
    HalfInt::spin(j.twice())?;
    let half_pi = wigner_coin(j, FRAC_1_SQRT_2)?.real_entries();
    let beta = 2.0 * rho.acos();
    let pairs = (1..=pair_count(j))
        .map(|n| {
            let speed = pair_speed(j, n);
            let m_y = if n % 2 == 0 {
                speed
            } else {
                HalfInt::from_twice(-speed.twice())
            };
            let base = jy_eigenstate(j, &half_pi, m_y);
            let plus: Vector = if j.is_integer() && n % 2 == 1 {
                base.iter().map(|z| I * z).collect()
            } else {
                base
            };
            let mut phase = (-m_y.value() * beta).rem_euclid(TAU);
            if phase <= 0.0 {
                phase += TAU;
            }
            let minus = plus.iter().map(|z| z.conj()).collect();
            EigenPair { phase, plus, minus }
        })
        .collect();
    let zero_mode = j.is_integer().then(|| jy_eigenstate(j, &half_pi, HalfInt::from_int(0)));
    Ok(EigenSystem {
        j,
        rho,
        pairs,
        zero_mode,
    })
}

/// Closed-form eigensystems for `j <= 2`; the generic construction otherwise.
pub fn coin_eigensystem(j: HalfInt, rho: f64) -> Result<EigenSystem> {
    check_open_rho(rho)?;
    let (r3, r6, r8) = (3f64.sqrt(), 6f64.sqrt(), 8f64.sqrt());
    let pair = |phase: f64, plus: Vector| EigenPair {
        phase,
        minus: plus.iter().map(|z| z.conj()).collect(),
        plus,
    };
    let sys = |pairs, zero_mode| {
        Ok(EigenSystem {
            j,
            rho,
            pairs,
            zero_mode,
        })
    };
    match j.twice() {
        1 => sys(
            vec![pair(rho.acos(), vec![re(FRAC_1_SQRT_2), -I * FRAC_1_SQRT_2])],
            None,
        ),
        2 => sys(
            vec![pair(
                (2.0 * rho * rho - 1.0).acos(),
                vec![0.5 * I, re(FRAC_1_SQRT_2), -0.5 * I],
            )],
            Some(real_vec(&[FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2])),
        ),
        3 => {
            let c = (rho * (4.0 * rho * rho - 3.0)).acos();
            let phi2 = if rho <= 0.5 { c } else { TAU - c };
            sys(
                vec![
                    pair(rho.acos(), vec![re(r3 / r8), -I / r8, re(1.0 / r8), -I * r3 / r8]),
                    pair(phi2, vec![re(1.0 / r8), I * r3 / r8, re(-r3 / r8), -I / r8]),
                ],
                None,
            )
        }
        4 => {
            let r2 = rho * rho;
            let c = (8.0 * r2 * r2 - 8.0 * r2 + 1.0).acos();
            let phi2 = if rho <= FRAC_1_SQRT_2 { c } else { TAU - c };
            sys(
                vec![
                    pair(
                        (2.0 * r2 - 1.0).acos(),
                        vec![0.5 * I, re(0.5), re(0.0), re(0.5), -0.5 * I],
                    ),
                    pair(phi2, vec![re(0.25), 0.5 * I, re(-r6 / 4.0), -0.5 * I, re(0.25)]),
                ],
                Some(real_vec(&[(3.0f64 / 8.0).sqrt(), 0.0, 0.5, 0.0, (3.0f64 / 8.0).sqrt()])),
            )
        }
        _ => generic_eigensystem(j, rho),
    }
}

/// `χ^± ` from one eigenvector pair.
pub fn recipe(pair: &EigenPair) -> (Vector, Vector) {
    let a = Complex64::from_polar(1.0, -0.5 * pair.phase);
    let plus = pair
        .plus
        .iter()
        .zip(&pair.minus)
        .map(|(p, m)| (a * p + a.conj() * m) * FRAC_1_SQRT_2)
        .collect();
    let minus = pair
        .plus
        .iter()
        .zip(&pair.minus)
        .map(|(p, m)| I * (a * p - a.conj() * m) * FRAC_1_SQRT_2)
        .collect();
    (plus, minus)
}

/// Labels `chi0, chi1+, chi1-, chi2+, ...` of the suitable basis.
pub fn suitable_labels(j: HalfInt) -> Vec<String> {
    let mut labels = Vec::with_capacity(j.dim());
    if j.is_integer() {
        labels.push("chi0".to_string());
    }
    for n in 1..=pair_count(j) {
        labels.push(format!("chi{n}+"));
        labels.push(format!("chi{n}-"));
    }
    labels
}

fn basis_from_system(sys: &EigenSystem) -> BasisSet {
    let mut vectors = Vec::with_capacity(sys.j.dim());
    if let Some(z) = &sys.zero_mode {
        vectors.push(z.clone());
    }
    for pair in &sys.pairs {
        let (p, m) = recipe(pair);
        vectors.push(p);
        vectors.push(m);
    }
    BasisSet {
        j: sys.j,
        rho: sys.rho,
        kind: BasisKind::Suitable,
        labels: suitable_labels(sys.j),
        vectors,
    }
}

/// The recipe applied to [`generic_eigensystem`], for any `j`.
pub fn generic_suitable_basis(j: HalfInt, rho: f64) -> Result<BasisSet> {
    Ok(basis_from_system(&generic_eigensystem(j, rho)?))
}

/// Suitable basis; closed forms for `j <= 2`.
pub fn suitable_basis(j: HalfInt, rho: f64) -> Result<BasisSet> {
    check_open_rho(rho)?;
    let s = (1.0 - rho * rho).sqrt();
    let (r2, r3) = (2f64.sqrt(), 3f64.sqrt());
    // columns listed in label order
    let cols: Vec<Vec<f64>> = match j.twice() {
        1 => {
            let (p, m) = (((1.0 + rho) / 2.0).sqrt(), ((1.0 - rho) / 2.0).sqrt());
            vec![vec![p, -m], vec![m, p]]
        }
        2 => vec![
            vec![1.0 / r2, 0.0, 1.0 / r2],
            vec![s / r2, rho, -s / r2],
            vec![-rho / r2, s, rho / r2],
        ],
        3 => {
            let k = 1.0 / (2.0 * r2);
            let (p, m) = ((1.0 + rho).sqrt(), (1.0 - rho).sqrt());
            let (u, w) = (1.0 - 2.0 * rho, 1.0 + 2.0 * rho);
            vec![
                vec![k * r3 * p, -k * m, k * p, -k * r3 * m],
                vec![k * r3 * m, k * p, k * m, k * r3 * p],
                vec![k * p * u, k * r3 * m * w, -k * r3 * p * u, -k * m * w],
                vec![k * m * w, -k * r3 * p * u, -k * r3 * m * w, k * p * u],
            ]
        }
        4 => {
            let c = 1.0 - 2.0 * rho * rho;
            vec![
                vec![r3 / (2.0 * r2), 0.0, 0.5, 0.0, r3 / (2.0 * r2)],
                vec![s / r2, rho / r2, 0.0, rho / r2, -s / r2],
                vec![-rho / r2, s / r2, 0.0, s / r2, rho / r2],
                vec![
                    c / (2.0 * r2),
                    r2 * rho * s,
                    -0.5 * r3 * c,
                    -r2 * rho * s,
                    c / (2.0 * r2),
                ],
                vec![rho * s / r2, -c / r2, -r3 * rho * s, c / r2, rho * s / r2],
            ]
        }
        _ => return generic_suitable_basis(j, rho),
    };
    Ok(BasisSet {
        j,
        rho,
        kind: BasisKind::Suitable,
        labels: suitable_labels(j),
        vectors: cols.iter().map(|c| real_vec(c)).collect(),
    })
}

/// λ basis of the integer spins 1 and 2.
pub fn lambda_basis(j: HalfInt, rho: f64) -> Result<BasisSet> {
    let chi = suitable_basis(j, rho)?;
    let combo = |terms: &[(&str, f64)]| -> Vector {
        let mut out = vec![re(0.0); j.dim()];
        for (label, w) in terms {
            let v = chi.vector(label).expect("suitable label");
            out.iter_mut().zip(v).for_each(|(o, z)| *o += z * *w);
        }
        out
    };
    let h = FRAC_1_SQRT_2;
    let (labels, vectors): (Vec<&str>, Vec<Vector>) = match j.twice() {
        2 => (
            vec!["lambda+", "lambda-", "chi1-"],
            vec![
                combo(&[("chi0", h), ("chi1+", h)]),
                combo(&[("chi0", h), ("chi1+", -h)]),
                combo(&[("chi1-", 1.0)]),
            ],
        ),
        4 => {
            let (a, b, c) = ((3.0f64 / 8.0).sqrt(), h, 1.0 / 8f64.sqrt());
            (
                vec!["lambda0", "lambda+", "lambda-", "chi1-", "chi2-"],
                vec![
                    combo(&[("chi0", 0.5), ("chi2+", -0.5 * 3f64.sqrt())]),
                    combo(&[("chi0", a), ("chi1+", b), ("chi2+", c)]),
                    combo(&[("chi0", a), ("chi1+", -b), ("chi2+", c)]),
                    combo(&[("chi1-", 1.0)]),
                    combo(&[("chi2-", 1.0)]),
                ],
            )
        }
        _ => {
            return Err(WalkError::Unsupported(format!(
                "lambda basis exists for j = 1, 2 only, not j = {j}"
            )))
        }
    };
    Ok(BasisSet {
        j,
        rho,
        kind: BasisKind::Lambda,
        labels: labels.into_iter().map(String::from).collect(),
        vectors,
    })
}

fn check_match(psi: &CoinStateVector, basis: &BasisSet) -> Result<()> {
    if psi.j != basis.j {
        return Err(WalkError::SpinMismatch {
            expected: basis.j.twice(),
            found: psi.j.twice(),
        });
    }
    Ok(())
}

/// Coefficients `h_i = ⟨e_i|ψ⟩` of a standard-basis state.
pub fn to_suitable(psi: &CoinStateVector, basis: &BasisSet) -> Result<CoinStateVector> {
    check_match(psi, basis)?;
    if psi.basis != BasisTag::Standard {
        return Err(WalkError::BasisMismatch(format!(
            "expected a standard-basis state, got {}",
            psi.basis
        )));
    }
    let amps = basis.vectors.iter().map(|e| inner(e, &psi.amps)).collect();
    Ok(CoinStateVector {
        j: psi.j,
        basis: basis.kind.tag(),
        amps,
    })
}

/// Inverse of [`to_suitable`].
pub fn to_standard(psi: &CoinStateVector, basis: &BasisSet) -> Result<CoinStateVector> {
    check_match(psi, basis)?;
    if psi.basis != basis.kind.tag() {
        return Err(WalkError::BasisMismatch(format!(
            "state is tagged {}, basis is {:?}",
            psi.basis, basis.kind
        )));
    }
    let mut amps = vec![re(0.0); psi.j.dim()];
    for (h, e) in psi.amps.iter().zip(&basis.vectors) {
        amps.iter_mut().zip(e).for_each(|(a, z)| *a += h * z);
    }
    Ok(CoinStateVector {
        j: psi.j,
        basis: BasisTag::Standard,
        amps,
    })
}

/// Expresses a state of any tag in the standard basis.
pub fn standard_amplitudes(psi: &CoinStateVector, rho: f64) -> Result<Vector> {
    crate::evolution::to_standard_for(psi, rho).map(|s| s.amps)
}

/// Expresses a state of any tag in the suitable basis.
pub fn suitable_amplitudes(psi: &CoinStateVector, rho: f64) -> Result<Vector> {
    if psi.basis == BasisTag::Suitable {
        return Ok(psi.amps.clone());
    }
    let std = crate::evolution::to_standard_for(psi, rho)?;
    Ok(to_suitable(&std, &suitable_basis(psi.j, rho)?)?.amps)
}

/// Expresses a state of any tag in the λ basis.
pub fn lambda_amplitudes(psi: &CoinStateVector, rho: f64) -> Result<Vector> {
    if psi.basis == BasisTag::Lambda {
        return Ok(psi.amps.clone());
    }
    let std = crate::evolution::to_standard_for(psi, rho)?;
    Ok(to_suitable(&std, &lambda_basis(psi.j, rho)?)?.amps)
}

/// `max_{a} ‖R e_a - e^{±iφ} e_a‖` over the returned eigenvectors.
pub fn eigen_residual(sys: &EigenSystem) -> Result<f64> {
    let coin = wigner_coin(sys.j, sys.rho)?;
    let resid = |v: &Vector, phase: f64| {
        let rv = coin.apply(v);
        let ev = Complex64::from_polar(1.0, phase);
        rv.iter()
            .zip(v)
            .map(|(a, b)| (a - ev * b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    let mut worst = sys.zero_mode.as_ref().map_or(0.0, |z| resid(z, 0.0));
    for p in &sys.pairs {
        worst = worst.max(resid(&p.plus, p.phase)).max(resid(&p.minus, -p.phase));
    }
    Ok(worst)
}

/// Largest deviation between two bases after matching each vector's overall sign.
pub fn max_deviation_up_to_sign(a: &BasisSet, b: &BasisSet) -> f64 {
    a.vectors
        .iter()
        .zip(&b.vectors)
        .map(|(u, v)| {
            let sign = if inner(u, v).re < 0.0 { -1.0 } else { 1.0 };
            u.iter().zip(v).map(|(x, y)| (x - y * sign).norm()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    #[test]
    fn closed_form_eigenvectors() {
        for t in 1..=4 {
            for &rho in &[0.1, 0.3, 0.5, 0.6, FRAC_1_SQRT_2, 0.8, 0.95] {
                let sys = coin_eigensystem(j(t), rho).unwrap();
                assert!(eigen_residual(&sys).unwrap() < 1e-12, "j2={t} rho={rho}");
            }
        }
        let sys = coin_eigensystem(j(3), 0.3).unwrap();
        assert!((sys.pairs[1].phase - (0.3f64 * (4.0 * 0.09 - 3.0)).acos()).abs() < 1e-15);
    }

    #[test]
    fn generic_matches_closed_form() {
        for t in 1..=4 {
            for &rho in &[0.2, 0.5, 0.77] {
                let g = generic_suitable_basis(j(t), rho).unwrap();
                let c = suitable_basis(j(t), rho).unwrap();
                assert!(max_deviation_up_to_sign(&g, &c) < 1e-12, "j2={t}");
                let ge = generic_eigensystem(j(t), rho).unwrap();
                let ce = coin_eigensystem(j(t), rho).unwrap();
                for (a, b) in ge.pairs.iter().zip(&ce.pairs) {
                    assert!((a.phase - b.phase).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn printed_half_basis() {
        let rho: f64 = 0.37;
        let b = suitable_basis(j(1), rho).unwrap();
        let p = b.vector("chi1+").unwrap();
        assert!((p[0].re - ((1.0 + rho) / 2.0).sqrt()).abs() < 1e-15);
        assert!((p[1].re + ((1.0 - rho) / 2.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn conversions() {
        let b = suitable_basis(j(2), 0.5).unwrap();
        let psi = CoinStateVector::real(j(2), BasisTag::Standard, &[FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2]).unwrap();
        let h = to_suitable(&psi, &b).unwrap();
        assert!((h.amps[0] - 1.0).norm() < 1e-15 && h.amps[1].norm() < 1e-15 && h.amps[2].norm() < 1e-15);
        assert!(to_suitable(&h, &b).is_err());
        let back = to_standard(&h, &b).unwrap();
        for (a, c) in back.amps.iter().zip(&psi.amps) {
            assert!((a - c).norm() < 1e-15);
        }
    }

    #[test]
    fn lambda_j2_in_suitable() {
        let lb = lambda_basis(j(4), 0.6).unwrap();
        assert!(lb.gram_residual() < 1e-14);
        let l0 = CoinStateVector {
            j: j(4),
            basis: BasisTag::Standard,
            amps: lb.vectors[0].clone(),
        };
        let h = to_suitable(&l0, &suitable_basis(j(4), 0.6).unwrap()).unwrap();
        let want = [0.5, 0.0, 0.0, -0.5 * 3f64.sqrt(), 0.0];
        for (a, w) in h.amps.iter().zip(want) {
            assert!((a - w).norm() < 1e-14);
        }
        assert!(lambda_basis(j(3), 0.5).is_err());
    }

    #[test]
    fn degenerate_rho() {
        assert!(matches!(coin_eigensystem(j(2), 0.0), Err(WalkError::Degenerate(_))));
        assert!(suitable_basis(j(5), 1.0).is_err());
    }
}
