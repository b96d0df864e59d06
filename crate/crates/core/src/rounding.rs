//! Decimal rounding used by every reported figure.
//!
//! All rounding is half-up in magnitude (halves move away from zero). Binary
//! floating point cannot represent most decimal halves exactly, so values
//! within a few ulps of a half are treated as that half.

/// Rounds `value` to `places` decimals, halves away from zero.
pub fn round_half_up(value: f64, places: u32) -> f64 {
    if !value.is_finite() {
        return value;
    }
    let scale = 10f64.powi(places as i32);
    let scaled = value.abs() * scale;
    let nudge = scaled * 4.0 * f64::EPSILON;
    let rounded = (scaled + 0.5 + nudge).floor() / scale;
    rounded.copysign(value)
}

/// Rounds a non-negative real to the nearest integer, halves up.
pub fn round_count(value: f64) -> usize {
    debug_assert!(value >= 0.0);
    round_half_up(value, 0) as usize
}

/// `numerator / denominator × 100`, rounded half-up to 2 decimals with exact
/// integer arithmetic. A zero denominator yields 0.
pub fn percent_2dp(numerator: u64, denominator: u64) -> f64 {
    if denominator == 0 {
        return 0.0;
    }
    let num = numerator as u128 * 10_000 * 2 + denominator as u128;
    let hundredths = num / (2 * denominator as u128);
    hundredths as f64 / 100.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halves_round_up() {
        assert_eq!(round_count(54.9), 55);
        assert_eq!(round_count(0.5), 1);
        assert_eq!(round_count(0.3), 0);
        assert_eq!(round_count(2.5), 3);
        assert_eq!(round_half_up(3.24, 1), 3.2);
        assert_eq!(round_half_up(3.25, 1), 3.3);
        assert_eq!(round_half_up(-3.25, 1), -3.3);
        assert_eq!(round_half_up(12.5, 2), 12.5);
        assert_eq!(round_half_up(0.125, 2), 0.13);
    }

    #[test]
    fn exact_percentages() {
        assert_eq!(percent_2dp(3, 10), 30.0);
        assert_eq!(percent_2dp(1, 3), 33.33);
        assert_eq!(percent_2dp(2, 3), 66.67);
        assert_eq!(percent_2dp(1, 8), 12.5);
        assert_eq!(percent_2dp(0, 0), 0.0);
        assert_eq!(percent_2dp(5, 5), 100.0);
    }
}
