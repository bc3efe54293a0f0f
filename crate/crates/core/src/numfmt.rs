//! Fixed-precision number formatting for reproducible text output.

/// Scientific notation with 17 significant digits; round-trips every `f64`.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for x in [0.0, 1.0 / 3.0, -2.5e-300, 123456789.125, f64::MIN_POSITIVE] {
            assert_eq!(sig17(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(sig17(0.5), "5.0000000000000000e-1");
    }
}
