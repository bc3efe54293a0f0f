//! Coin states addressed by name.

use num_complex::Complex64;

use crate::bases::{lambda_basis, suitable_basis};
use crate::error::{Result, WalkError};
use crate::evolution::{BasisTag, CoinStateVector};
use crate::halfint::HalfInt;
use crate::limitlaw::{special_state, SpecialState};

/// Names understood by [`named_state`].
pub const STATE_NAMES: &[&str] = &[
    "chi0",
    "chi+",
    "chi-",
    "chiN+ / chiN-",
    "lambda0",
    "lambda+",
    "lambda-",
    "j2_single_peak",
    "j2_no_slower",
    "inner_free[:a,b]",
    "outer_free[:a,b]",
];

fn unit(j: HalfInt, basis: BasisTag, index: usize) -> CoinStateVector {
    let mut amps = vec![Complex64::new(0.0, 0.0); j.dim()];
    amps[index] = Complex64::new(1.0, 0.0);
    CoinStateVector { j, basis, amps }
}

fn family_params(arg: Option<&str>, default: (f64, f64)) -> Result<(f64, f64)> {
    let Some(arg) = arg else { return Ok(default) };
    let parts: Vec<&str> = arg.split(',').collect();
    if parts.len() != 2 {
        return Err(WalkError::Parse(format!("expected two parameters, got {arg:?}")));
    }
    let p = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| WalkError::Parse(format!("bad number {s:?}")))
    };
    Ok((p(parts[0])?, p(parts[1])?))
}

/// Resolves a state name for spin `j`; the result is tagged with the basis it is defined in.
///
/// `chi+`/`chi-` are aliases of `chi1+`/`chi1-`. The families `inner_free` and `outer_free`
/// take the real pair `(h₁⁺, h₁⁻)` after a colon and default to the one-peak members.
pub fn named_state(j: HalfInt, name: &str) -> Result<CoinStateVector> {
    let name = name.trim();
    let (base, arg) = match name.split_once(':') {
        Some((b, a)) => (b, Some(a)),
        None => (name, None),
    };
    let bad = || WalkError::Parse(format!("state {name:?} does not exist for j = {j}"));
    let labels = crate::bases::suitable_labels(j);
    let suitable_label = match base {
        "chi+" => Some("chi1+".to_string()),
        "chi-" => Some("chi1-".to_string()),
        b if labels.iter().any(|l| l == b) => Some(b.to_string()),
        _ => None,
    };
    if let Some(label) = suitable_label {
        if arg.is_some() {
            return Err(bad());
        }
        let i = labels.iter().position(|l| *l == label).ok_or_else(bad)?;
        return Ok(unit(j, BasisTag::Suitable, i));
    }
    let lambda_index = match (j.twice(), base) {
        (2, "lambda+") => Some(0),
        (2, "lambda-") => Some(1),
        (4, "lambda0") => Some(0),
        (4, "lambda+") => Some(1),
        (4, "lambda-") => Some(2),
        _ => None,
    };
    if let Some(i) = lambda_index {
        if arg.is_some() {
            return Err(bad());
        }
        return Ok(unit(j, BasisTag::Lambda, i));
    }
    let kind = match (j.twice(), base) {
        (4, "j2_single_peak") if arg.is_none() => SpecialState::J2SinglePeak,
        (4, "j2_no_slower") if arg.is_none() => SpecialState::J2NoSlower,
        (3, "inner_free") => {
            let (a, b) = family_params(arg, (0.0, 1.0))?;
            SpecialState::InnerFree {
                h1_plus: a.into(),
                h1_minus: b.into(),
            }
        }
        (3, "outer_free") => {
            let (a, b) = family_params(arg, (1.0, 0.0))?;
            SpecialState::OuterFree {
                h1_plus: a.into(),
                h1_minus: b.into(),
            }
        }
        _ => return Err(bad()),
    };
    special_state(kind)
}

/// Named state written out in the standard basis.
pub fn named_state_standard(j: HalfInt, name: &str, rho: f64) -> Result<CoinStateVector> {
    let psi = named_state(j, name)?;
    let basis = match psi.basis {
        BasisTag::Standard => return Ok(psi),
        BasisTag::Suitable => suitable_basis(j, rho)?,
        BasisTag::Lambda => lambda_basis(j, rho)?,
    };
    crate::bases::to_standard(&psi, &basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolves_names() {
        let j1 = HalfInt::from_int(1);
        assert_eq!(named_state(j1, "chi-").unwrap().amps[2], Complex64::new(1.0, 0.0));
        assert_eq!(named_state(j1, "lambda-").unwrap().basis, BasisTag::Lambda);
        assert!(named_state(j1, "lambda0").is_err());
        assert!(named_state(HalfInt::from_int(2), "bogus").is_err());
        let fig = named_state(HalfInt::from_twice(3), "inner_free").unwrap();
        assert!((fig.amps[1].re - 0.75f64.sqrt()).abs() < 1e-15 && (fig.amps[3].re + 0.5).abs() < 1e-15);
        let half = named_state(HalfInt::from_twice(1), "chi+").unwrap();
        assert_eq!(half.amps[0], Complex64::new(1.0, 0.0));
        let std = named_state_standard(j1, "chi0", 0.5).unwrap();
        assert!((std.amps[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(named_state(HalfInt::from_twice(3), "outer_free:1").is_err());
    }
}
