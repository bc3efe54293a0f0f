//! Exact finite-time evolution on the integer line.
//!
//! One step applies the coin at every site and then moves the coin component
//! with projection `m` by `-2m` lattice sites. Under the transform
//! `ψ̃(k) = Σ_x ψ(x) e^{-ikx}` a step is `Diag(e^{2imk}) R`.

use std::fmt::Write as _;
use std::ops::{AddAssign, Mul};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bases;
use crate::coin::{CoinOperator, CoinParams};
use crate::error::{Result, WalkError};
use crate::halfint::HalfInt;
use crate::numfmt::sig17;

/// Tolerance on the squared norm of a coin state.
pub const NORM_TOL: f64 = 1e-12;

/// Which basis the amplitudes of a [`CoinStateVector`] refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisTag {
    Standard,
    Suitable,
    Lambda,
}

impl std::fmt::Display for BasisTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BasisTag::Standard => "standard",
            BasisTag::Suitable => "suitable",
            BasisTag::Lambda => "lambda",
        })
    }
}

/// A normalized coin state of dimension `2j+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoinStateVector {
    pub j: HalfInt,
    pub basis: BasisTag,
    pub amps: Vec<Complex64>,
}

impl CoinStateVector {
    /// Checks length and normalization.
    pub fn new(j: HalfInt, basis: BasisTag, amps: Vec<Complex64>) -> Result<Self> {
        check_len(j, amps.len())?;
        let n2 = norm_sqr(&amps);
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(WalkError::NotNormalized(n2));
        }
        Ok(CoinStateVector { j, basis, amps })
    }

    /// Rescales to unit norm; returns the state and the squared norm it had.
    pub fn normalized(j: HalfInt, basis: BasisTag, mut amps: Vec<Complex64>) -> Result<(Self, f64)> {
        check_len(j, amps.len())?;
        let n2 = norm_sqr(&amps);
        if n2 == 0.0 || !n2.is_finite() {
            return Err(WalkError::NotNormalized(n2));
        }
        let k = n2.sqrt().recip();
        amps.iter_mut().for_each(|z| *z *= k);
        Ok((CoinStateVector { j, basis, amps }, n2))
    }

    pub fn real(j: HalfInt, basis: BasisTag, amps: &[f64]) -> Result<Self> {
        Self::new(j, basis, amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// The standard basis vector `|m⟩`.
    pub fn basis_vector(j: HalfInt, m: HalfInt) -> Result<Self> {
        let mut amps = vec![Complex64::new(0.0, 0.0); j.dim()];
        amps[j.index_of(m)?] = Complex64::new(1.0, 0.0);
        Ok(CoinStateVector {
            j,
            basis: BasisTag::Standard,
            amps,
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }
}

fn check_len(j: HalfInt, len: usize) -> Result<()> {
    if len != j.dim() {
        return Err(WalkError::Index(format!(
            "expected {} amplitudes for j = {j}, got {len}",
            j.dim()
        )));
    }
    Ok(())
}

pub(crate) fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Amplitudes `Ψ_m(x, t)` over `x ∈ [-W, W]`, stored site-major.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    j: HalfInt,
    t: u64,
    half_width: usize,
    amps: Vec<Complex64>,
}

impl WalkState {
    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// Largest `|x|` the storage covers; at least `2j t`.
    pub fn half_width(&self) -> usize {
        self.half_width
    }

    /// Coin vector at site `x`; zeros outside storage.
    pub fn site(&self, x: i64) -> Vec<Complex64> {
        let d = self.j.dim();
        match self.index(x) {
            Some(i) => self.amps[i * d..(i + 1) * d].to_vec(),
            None => vec![Complex64::new(0.0, 0.0); d],
        }
    }

    pub fn amplitude(&self, x: i64, m: HalfInt) -> Result<Complex64> {
        let c = self.j.index_of(m)?;
        Ok(self
            .index(x)
            .map_or(Complex64::new(0.0, 0.0), |i| self.amps[i * self.j.dim() + c]))
    }

    fn index(&self, x: i64) -> Option<usize> {
        let w = self.half_width as i64;
        (x.abs() <= w).then(|| (x + w) as usize)
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// Largest `|x|` with a nonzero amplitude, if any.
    pub fn max_occupied_distance(&self) -> Option<u64> {
        let d = self.j.dim();
        let w = self.half_width as i64;
        (0..=2 * self.half_width)
            .filter(|&i| {
                self.amps[i * d..(i + 1) * d]
                    .iter()
                    .any(|z| *z != Complex64::new(0.0, 0.0))
            })
            .map(|i| (i as i64 - w).unsigned_abs())
            .max()
    }
}

/// All amplitude at the origin with coin state `psi`.
pub fn initial_state(psi: &CoinStateVector) -> Result<WalkState> {
    if psi.basis != BasisTag::Standard {
        return Err(WalkError::BasisMismatch(format!(
            "initial state needs the standard basis, got {}",
            psi.basis
        )));
    }
    let n2 = psi.norm_sqr();
    if (n2 - 1.0).abs() > NORM_TOL || psi.amps.len() != psi.j.dim() {
        return Err(WalkError::NotNormalized(n2));
    }
    Ok(WalkState {
        j: psi.j,
        t: 0,
        half_width: 0,
        amps: psi.amps.clone(),
    })
}

fn check_spin(coin: &CoinOperator, j: HalfInt) -> Result<()> {
    if coin.j() != j {
        return Err(WalkError::SpinMismatch {
            expected: j.twice(),
            found: coin.j().twice(),
        });
    }
    Ok(())
}

/// One application of coin and shift.
pub fn step(state: &WalkState, coin: &CoinOperator) -> Result<WalkState> {
    check_spin(coin, state.j)?;
    let j = state.j;
    let d = j.dim();
    let tj = j.twice() as i64;
    let w_old = state.half_width as i64;
    let w = state.half_width.max((tj as u64 * (state.t + 1)) as usize) as i64;
    let mut amps = vec![Complex64::new(0.0, 0.0); (2 * w as usize + 1) * d];
    for i in 0..=(2 * w_old) {
        let src = &state.amps[i as usize * d..(i as usize + 1) * d];
        if src.iter().all(|z| z.norm_sqr() == 0.0) {
            continue;
        }
        let x = i - w_old;
        let mixed = coin.apply(src);
        for (a, z) in mixed.into_iter().enumerate() {
            let target = x - (tj - 2 * a as i64) + w;
            amps[target as usize * d + a] = z;
        }
    }
    Ok(WalkState {
        j,
        t: state.t + 1,
        half_width: w as usize,
        amps,
    })
}

/// Converts any tagged coin state to the standard basis for a walk with parameter `rho`.
pub fn to_standard_for(psi: &CoinStateVector, rho: f64) -> Result<CoinStateVector> {
    match psi.basis {
        BasisTag::Standard => Ok(psi.clone()),
        BasisTag::Suitable => bases::to_standard(psi, &bases::suitable_basis(psi.j, rho)?),
        BasisTag::Lambda => bases::to_standard(psi, &bases::lambda_basis(psi.j, rho)?),
    }
}

/// `ρ = cos(β/2)` of the coin.
pub fn coin_rho(coin: &CoinOperator) -> f64 {
    match coin.params() {
        CoinParams::Rho { rho } => rho,
        CoinParams::Euler { beta, .. } => (0.5 * beta).cos(),
    }
}

/// `t` steps from the origin with coin state `psi` (any basis tag).
pub fn evolve(coin: &CoinOperator, psi: &CoinStateVector, t: u64) -> Result<WalkState> {
    check_spin(coin, psi.j)?;
    let std = to_standard_for(psi, coin_rho(coin))?;
    let start = initial_state(&std)?;
    let amps = if coin.is_real() {
        run(&coin.real_entries(), psi.j, &start.amps, t, None).1
    } else {
        run(coin.entries(), psi.j, &start.amps, t, None).1
    };
    Ok(WalkState {
        j: psi.j,
        t,
        half_width: (psi.j.twice() as u64 * t) as usize,
        amps,
    })
}

/// Convenience wrapper building the reduced coin first.
pub fn evolve_rho(j: HalfInt, rho: f64, psi: &CoinStateVector, t: u64) -> Result<WalkState> {
    evolve(&crate::coin::wigner_coin(j, rho)?, psi, t)
}

/// Live index range `[lo, hi]` after `s` of `total` steps, restricted to sites that can still
/// reach `|x| <= window` at the end. Parity matches the occupied sublattice.
fn live_range(tj: i64, s: i64, total: i64, window: Option<i64>, w: i64) -> Option<(i64, i64)> {
    let mut reach = tj * s;
    if let Some(win) = window {
        reach = reach.min(tj * (total - s) + win);
    }
    let parity = (tj * s).rem_euclid(2);
    let mut lo = -reach;
    let mut hi = reach;
    if (lo - parity).rem_euclid(2) != 0 {
        lo += 1;
    }
    if (hi - parity).rem_euclid(2) != 0 {
        hi -= 1;
    }
    (lo <= hi).then_some((lo + w, hi + w))
}

/// Double-buffered dense evolution; returns the half width and site-major amplitudes.
fn run<A, C>(coin: &[C], j: HalfInt, start: &[A], t: u64, window: Option<i64>) -> (usize, Vec<A>)
where
    A: Copy + Default + AddAssign + Mul<C, Output = A>,
    C: Copy,
{
    let d = j.dim();
    let tj = j.twice() as i64;
    let total = t as i64;
    let w = tj * total;
    let len = (2 * w as usize + 1) * d;
    let mut cur = vec![A::default(); len];
    let mut mixed = vec![A::default(); len];
    cur[w as usize * d..(w as usize + 1) * d].copy_from_slice(start);
    let shifts: Vec<i64> = (0..d).map(|a| tj - 2 * a as i64).collect();
    let mut range = live_range(tj, 0, total, window, w);
    for s in 0..total {
        let Some((lo, hi)) = range else { break };
        for i in (lo..=hi).step_by(2) {
            let i = i as usize;
            let src = &cur[i * d..(i + 1) * d];
            let out = &mut mixed[i * d..(i + 1) * d];
            for (a, o) in out.iter_mut().enumerate() {
                let row = &coin[a * d..(a + 1) * d];
                let mut acc = A::default();
                for b in 0..d {
                    acc += src[b] * row[b];
                }
                *o = acc;
            }
        }
        let next = live_range(tj, s + 1, total, window, w);
        if let Some((nlo, nhi)) = next {
            for x in (nlo..=nhi).step_by(2) {
                for (a, &sh) in shifts.iter().enumerate() {
                    let from = x + sh;
                    cur[x as usize * d + a] = if from >= lo && from <= hi {
                        mixed[from as usize * d + a]
                    } else {
                        A::default()
                    };
                }
            }
        }
        range = next;
    }
    let mut out = vec![A::default(); len];
    if let Some((lo, hi)) = range {
        for i in (lo..=hi).step_by(2) {
            let i = i as usize;
            out[i * d..(i + 1) * d].copy_from_slice(&cur[i * d..(i + 1) * d]);
        }
    }
    (w as usize, out)
}

/// Amplitudes at `|x| <= window` after `t` steps for every standard basis start,
/// so that the final state for any coin state follows by linearity.
#[derive(Debug, Clone)]
pub struct Propagator {
    j: HalfInt,
    t: u64,
    window: u64,
    /// `columns[b][(x + window) * d + a]` is `Ψ_a(x, t)` for the start `|m_b⟩`.
    columns: Vec<Vec<Complex64>>,
}

impl Propagator {
    /// Light-cone pruned evolution of each basis start, run in parallel.
    pub fn compute(coin: &CoinOperator, t: u64, window: u64) -> Propagator {
        let j = coin.j();
        let d = j.dim();
        let win = window.min(j.twice() as u64 * t) as i64;
        let real = coin.is_real();
        let re = coin.real_entries();
        let columns = (0..d)
            .into_par_iter()
            .map(|b| {
                let crop = |w: usize, amps: &[Complex64]| {
                    let lo = (w as i64 - win) as usize;
                    amps[lo * d..(lo + 2 * win as usize + 1) * d].to_vec()
                };
                if real {
                    let mut start = vec![0.0; d];
                    start[b] = 1.0;
                    let (w, amps) = run(&re, j, &start, t, Some(win));
                    let amps: Vec<Complex64> = amps.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                    crop(w, &amps)
                } else {
                    let mut start = vec![Complex64::new(0.0, 0.0); d];
                    start[b] = Complex64::new(1.0, 0.0);
                    let (w, amps) = run(coin.entries(), j, &start, t, Some(win));
                    crop(w, &amps)
                }
            })
            .collect();
        Propagator {
            j,
            t,
            window: win as u64,
            columns,
        }
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn window(&self) -> u64 {
        self.window
    }

    /// Coin vector at `x` for the standard-basis start `q`.
    pub fn site(&self, q: &[Complex64], x: i64) -> Vec<Complex64> {
        let d = self.j.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        if x.unsigned_abs() > self.window {
            return out;
        }
        let i = (x + self.window as i64) as usize;
        for (b, col) in self.columns.iter().enumerate() {
            for a in 0..d {
                out[a] += col[i * d + a] * q[b];
            }
        }
        out
    }

    /// `p(x, t)` for the standard-basis start `q`.
    pub fn probability(&self, q: &[Complex64], x: i64) -> f64 {
        norm_sqr(&self.site(q, x))
    }
}

/// `p(x, t)` on every site of `[-2jt, 2jt]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityProfile {
    pub j: HalfInt,
    pub t: u64,
    pub rho: Option<f64>,
    pub entries: Vec<ProfileEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub x: i64,
    pub p: f64,
}

impl ProbabilityProfile {
    pub fn get(&self, x: i64) -> f64 {
        let first = match self.entries.first() {
            Some(e) => e.x,
            None => return 0.0,
        };
        let i = x - first;
        if i < 0 {
            return 0.0;
        }
        self.entries.get(i as usize).map_or(0.0, |e| e.p)
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.p).sum()
    }

    /// True when `x` lies on the sublattice the walk can occupy at time `t`.
    pub fn is_occupied_site(&self, x: i64) -> bool {
        (x - self.j.twice() as i64 * self.t as i64).rem_euclid(2) == 0
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,p\n");
        for e in &self.entries {
            let _ = writeln!(s, "{},{}", e.x, sig17(e.p));
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "j": self.j.to_string(),
            "t": self.t,
            "rho": self.rho,
            "entries": self.entries,
        })
    }
}

/// Sums `|Ψ_m(x,t)|²` over the coin index on `[-2jt, 2jt]`.
pub fn position_distribution(state: &WalkState) -> ProbabilityProfile {
    let d = state.j.dim();
    let reach = (state.j.twice() as u64 * state.t) as i64;
    let w = state.half_width as i64;
    let entries = (-reach..=reach)
        .map(|x| {
            let i = (x + w) as usize;
            ProfileEntry {
                x,
                p: norm_sqr(&state.amps[i * d..(i + 1) * d]),
            }
        })
        .collect();
    ProbabilityProfile {
        j: state.j,
        t: state.t,
        rho: None,
        entries,
    }
}

/// `Σ_x (x/t)^n p(x,t)`.
pub fn empirical_moment(profile: &ProbabilityProfile, n: u32) -> Result<f64> {
    if profile.t == 0 {
        return Err(WalkError::Domain("moments need t >= 1".into()));
    }
    let t = profile.t as f64;
    Ok(profile
        .entries
        .iter()
        .map(|e| (e.x as f64 / t).powi(n as i32) * e.p)
        .sum())
}
