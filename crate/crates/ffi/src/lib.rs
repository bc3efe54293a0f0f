//! C interface to the quantum walk library.
//!
//! Every function returns a [`WwStatus`]; results are written through out-pointers.
//! Handles are opaque and must be released with the matching `_free` function.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use wigner_walk::coin::{wigner_coin, wigner_coin_euler, CoinOperator};
use wigner_walk::evolution::{
    coin_rho, evolve, position_distribution, to_standard_for, BasisTag, CoinStateVector, WalkState,
};
use wigner_walk::halfint::HalfInt;
use wigner_walk::limitlaw::{limit_density, LimitDensityModel};
use wigner_walk::states::named_state;
use wigner_walk::trapping::{trapping_probability, TrappingModel};
use wigner_walk::WalkError;

/// Result codes shared by all entry points.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Unsupported = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

/// A complex number laid out as two doubles.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WwComplex {
    pub re: f64,
    pub im: f64,
}

/// Coin basis of an amplitude array.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WwBasis {
    Standard = 0,
    Suitable = 1,
    Lambda = 2,
}

/// Opaque coin operator.
pub struct WwCoin {
    coin: CoinOperator,
}

/// Opaque walk: a coin, an initial coin state and the state after `t` steps.
pub struct WwWalk {
    coin: CoinOperator,
    psi: CoinStateVector,
    state: WalkState,
}

impl From<&WalkError> for WwStatus {
    fn from(e: &WalkError) -> Self {
        match e {
            WalkError::Unsupported(_) => WwStatus::Unsupported,
            _ => WwStatus::InvalidArgument,
        }
    }
}

fn guard(f: impl FnOnce() -> Result<(), WwStatus>) -> WwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WwStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => WwStatus::Panic,
    }
}

fn lift<T>(r: wigner_walk::Result<T>) -> Result<T, WwStatus> {
    r.map_err(|e| WwStatus::from(&e))
}

fn spin(twice_j: i32) -> Result<HalfInt, WwStatus> {
    lift(HalfInt::spin(twice_j))
}

fn basis_tag(basis: WwBasis) -> BasisTag {
    match basis {
        WwBasis::Standard => BasisTag::Standard,
        WwBasis::Suitable => BasisTag::Suitable,
        WwBasis::Lambda => BasisTag::Lambda,
    }
}

unsafe fn read_state(
    j: HalfInt,
    basis: WwBasis,
    amps: *const WwComplex,
    len: usize,
) -> Result<CoinStateVector, WwStatus> {
    if amps.is_null() {
        return Err(WwStatus::NullPointer);
    }
    if len != j.dim() {
        return Err(WwStatus::InvalidArgument);
    }
    let raw = std::slice::from_raw_parts(amps, len);
    let amps = raw.iter().map(|z| Complex64::new(z.re, z.im)).collect();
    lift(CoinStateVector::new(j, basis_tag(basis), amps))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), WwStatus> {
    if out.is_null() {
        return Err(WwStatus::NullPointer);
    }
    out.write(value);
    Ok(())
}

/// Short description of a status code; the string is static.
#[no_mangle]
pub extern "C" fn ww_status_message(status: WwStatus) -> *const c_char {
    let text: &'static CStr = match status {
        WwStatus::Ok => c"ok",
        WwStatus::NullPointer => c"null pointer argument",
        WwStatus::InvalidArgument => c"invalid argument",
        WwStatus::Unsupported => c"unsupported spin or parameter",
        WwStatus::BufferTooSmall => c"output buffer too small",
        WwStatus::Panic => c"internal error",
    };
    text.as_ptr()
}

/// Builds the coin with `2j = twice_j` and `0 < rho < 1`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn ww_coin_new(twice_j: i32, rho: f64, out: *mut *mut WwCoin) -> WwStatus {
    guard(|| {
        let coin = lift(wigner_coin(spin(twice_j)?, rho))?;
        write_out(out, Box::into_raw(Box::new(WwCoin { coin })))
    })
}

/// Builds the coin from Euler angles.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn ww_coin_new_euler(
    twice_j: i32,
    alpha: f64,
    beta: f64,
    gamma: f64,
    out: *mut *mut WwCoin,
) -> WwStatus {
    guard(|| {
        let coin = lift(wigner_coin_euler(spin(twice_j)?, alpha, beta, gamma))?;
        write_out(out, Box::into_raw(Box::new(WwCoin { coin })))
    })
}

/// Releases a coin; null is ignored.
///
/// # Safety
/// `coin` must be null or a handle from `ww_coin_new*` that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ww_coin_free(coin: *mut WwCoin) {
    if !coin.is_null() {
        drop(Box::from_raw(coin));
    }
}

/// Writes the `(2j+1)²` row-major entries into `buf`; `needed` receives the entry count.
///
/// # Safety
/// `coin` must be a live handle, `needed` writable, and `buf` valid for `cap` elements unless null.
#[no_mangle]
pub unsafe extern "C" fn ww_coin_entries(
    coin: *const WwCoin,
    buf: *mut WwComplex,
    cap: usize,
    needed: *mut usize,
) -> WwStatus {
    guard(|| {
        let coin = coin.as_ref().ok_or(WwStatus::NullPointer)?;
        let entries = coin.coin.entries();
        write_out(needed, entries.len())?;
        if buf.is_null() || cap < entries.len() {
            return Err(WwStatus::BufferTooSmall);
        }
        for (i, z) in entries.iter().enumerate() {
            buf.add(i).write(WwComplex { re: z.re, im: z.im });
        }
        Ok(())
    })
}

unsafe fn new_walk(
    coin: *const WwCoin,
    psi: impl FnOnce(&CoinOperator) -> Result<CoinStateVector, WwStatus>,
    out: *mut *mut WwWalk,
) -> WwStatus {
    guard(|| {
        if out.is_null() {
            return Err(WwStatus::NullPointer);
        }
        let coin = coin.as_ref().ok_or(WwStatus::NullPointer)?.coin.clone();
        let psi = lift(to_standard_for(&psi(&coin)?, coin_rho(&coin)))?;
        let state = lift(evolve(&coin, &psi, 0))?;
        write_out(out, Box::into_raw(Box::new(WwWalk { coin, psi, state })))
    })
}

/// Starts a walk at the origin with `len = 2j+1` normalized amplitudes in `basis`.
///
/// # Safety
/// `coin` must be a live handle, `amps` valid for `len` elements and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ww_walk_new(
    coin: *const WwCoin,
    basis: WwBasis,
    amps: *const WwComplex,
    len: usize,
    out: *mut *mut WwWalk,
) -> WwStatus {
    new_walk(coin, |c| read_state(c.j(), basis, amps, len), out)
}

/// Starts a walk at the origin in a named coin state such as `"chi0"` or `"lambda+"`.
///
/// # Safety
/// `coin` must be a live handle, `name` a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ww_walk_new_named(
    coin: *const WwCoin,
    name: *const c_char,
    out: *mut *mut WwWalk,
) -> WwStatus {
    if name.is_null() {
        return WwStatus::NullPointer;
    }
    let name = match CStr::from_ptr(name).to_str() {
        Ok(s) => s.to_owned(),
        Err(_) => return WwStatus::InvalidArgument,
    };
    new_walk(coin, |c| lift(named_state(c.j(), &name)), out)
}

/// Releases a walk; null is ignored.
///
/// # Safety
/// `walk` must be null or a handle from `ww_walk_new*` that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ww_walk_free(walk: *mut WwWalk) {
    if !walk.is_null() {
        drop(Box::from_raw(walk));
    }
}

/// Advances the walk by `steps`.
///
/// # Safety
/// `walk` must be a live handle not used concurrently.
#[no_mangle]
pub unsafe extern "C" fn ww_walk_evolve(walk: *mut WwWalk, steps: u64) -> WwStatus {
    guard(|| {
        let walk = walk.as_mut().ok_or(WwStatus::NullPointer)?;
        let t = walk.state.t().checked_add(steps).ok_or(WwStatus::InvalidArgument)?;
        walk.state = lift(evolve(&walk.coin, &walk.psi, t))?;
        Ok(())
    })
}

/// Number of steps taken so far.
///
/// # Safety
/// `walk` must be a live handle and `t` writable.
#[no_mangle]
pub unsafe extern "C" fn ww_walk_time(walk: *const WwWalk, t: *mut u64) -> WwStatus {
    guard(|| {
        let walk = walk.as_ref().ok_or(WwStatus::NullPointer)?;
        write_out(t, walk.state.t())
    })
}

/// Writes `P(x, t)` for `x = -2jt ..= 2jt`; `needed` receives the site count.
///
/// # Safety
/// `walk` must be a live handle, `needed` writable, and `xs`/`ps` valid for `cap` elements unless null.
#[no_mangle]
pub unsafe extern "C" fn ww_walk_distribution(
    walk: *const WwWalk,
    xs: *mut i64,
    ps: *mut f64,
    cap: usize,
    needed: *mut usize,
) -> WwStatus {
    guard(|| {
        let walk = walk.as_ref().ok_or(WwStatus::NullPointer)?;
        let profile = position_distribution(&walk.state);
        write_out(needed, profile.entries.len())?;
        if xs.is_null() || ps.is_null() || cap < profile.entries.len() {
            return Err(WwStatus::BufferTooSmall);
        }
        for (i, e) in profile.entries.iter().enumerate() {
            xs.add(i).write(e.x);
            ps.add(i).write(e.p);
        }
        Ok(())
    })
}

/// Limit density `ν(v)` of `X_t / t` for `j <= 2`, from suitable-basis amplitudes.
///
/// # Safety
/// `amps` must be valid for `len` elements and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ww_limit_density(
    twice_j: i32,
    rho: f64,
    amps: *const WwComplex,
    len: usize,
    v: f64,
    out: *mut f64,
) -> WwStatus {
    guard(|| {
        let j = spin(twice_j)?;
        if twice_j > 4 {
            return Err(WwStatus::Unsupported);
        }
        let h = read_state(j, WwBasis::Suitable, amps, len)?;
        let model = lift(LimitDensityModel::new(rho, &h))?;
        write_out(out, limit_density(&model, v))
    })
}

/// Long-time probability `p∞(2x)` of staying at site `2x`, for `j = 1` or `j = 2`.
///
/// # Safety
/// `amps` must be valid for `len` elements and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ww_trapping_probability(
    twice_j: i32,
    rho: f64,
    basis: WwBasis,
    amps: *const WwComplex,
    len: usize,
    x: i64,
    out: *mut f64,
) -> WwStatus {
    guard(|| {
        let j = spin(twice_j)?;
        if twice_j != 2 && twice_j != 4 {
            return Err(WwStatus::Unsupported);
        }
        let psi = read_state(j, basis, amps, len)?;
        let model = lift(TrappingModel::new(rho, &psi))?;
        write_out(out, trapping_probability(&model, x))
    })
}
