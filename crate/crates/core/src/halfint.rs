//! Exact half-integers stored as doubled integers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};

/// A value in ½ℤ, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfInt {
    twice_value: i32,
}

impl HalfInt {
    pub const fn from_twice(twice_value: i32) -> Self {
        HalfInt { twice_value }
    }

    pub const fn from_int(n: i32) -> Self {
        HalfInt { twice_value: 2 * n }
    }

    /// A spin label; requires `2j >= 1`.
    pub fn spin(twice_j: i32) -> Result<Self> {
        if twice_j < 1 {
            return Err(WalkError::Index(format!("2j = {twice_j} must be at least 1")));
        }
        Ok(HalfInt { twice_value: twice_j })
    }

    pub const fn twice(self) -> i32 {
        self.twice_value
    }

    pub fn value(self) -> f64 {
        0.5 * self.twice_value as f64
    }

    pub const fn is_integer(self) -> bool {
        self.twice_value % 2 == 0
    }

    /// Dimension 2j+1 of the spin-j representation.
    pub fn dim(self) -> usize {
        (self.twice_value + 1) as usize
    }

    /// Magnetic label of row `i` in descending order (`m = j - i`).
    pub fn m_at(self, i: usize) -> HalfInt {
        HalfInt::from_twice(self.twice_value - 2 * i as i32)
    }

    /// Row of the magnetic label `m` in descending order.
    pub fn index_of(self, m: HalfInt) -> Result<usize> {
        let d = self.twice_value - m.twice_value;
        if m.twice_value.abs() > self.twice_value || d % 2 != 0 {
            return Err(WalkError::Index(format!("m = {m} is not a projection of j = {self}")));
        }
        Ok((d / 2) as usize)
    }

    /// All projections `j, j-1, ..., -j`.
    pub fn projections(self) -> impl Iterator<Item = HalfInt> {
        let j = self.twice_value;
        (0..=j).map(move |i| HalfInt::from_twice(j - 2 * i))
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice_value / 2)
        } else {
            write!(f, "{}/2", self.twice_value)
        }
    }
}

impl FromStr for HalfInt {
    type Err = WalkError;

    /// Accepts `"3/2"`, `"2"`, `"-1/2"` and the like.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || WalkError::Parse(format!("not a half-integer: {s:?}"));
        match s.split_once('/') {
            Some((num, den)) => {
                let num: i32 = num.trim().parse().map_err(|_| bad())?;
                let den: i32 = den.trim().parse().map_err(|_| bad())?;
                match den {
                    1 => Ok(HalfInt::from_int(num)),
                    2 => Ok(HalfInt::from_twice(num)),
                    _ => Err(bad()),
                }
            }
            None => s.parse::<i32>().map(HalfInt::from_int).map_err(|_| bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        for s in ["1/2", "1", "3/2", "2", "-5/2", "0"] {
            let h: HalfInt = s.parse().unwrap();
            assert_eq!(h.to_string(), s);
        }
        assert_eq!("4/2".parse::<HalfInt>().unwrap(), HalfInt::from_int(2));
        assert!("1/3".parse::<HalfInt>().is_err());
        assert!("x".parse::<HalfInt>().is_err());
    }

    #[test]
    fn indexing() {
        let j = HalfInt::from_twice(3);
        let ms: Vec<_> = j.projections().map(|m| m.twice()).collect();
        assert_eq!(ms, vec![3, 1, -1, -3]);
        assert_eq!(j.index_of(HalfInt::from_twice(-1)).unwrap(), 2);
        assert!(j.index_of(HalfInt::from_int(1)).is_err());
        assert!(HalfInt::spin(0).is_err());
    }
}
