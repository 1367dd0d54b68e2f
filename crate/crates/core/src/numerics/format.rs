/// Shortest round-trip decimal form, switching to exponent notation for
/// magnitudes below `1e-5` or from `1e16` up.
pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

#[cfg(test)]
mod tests {
    use super::format_f64;

    #[test]
    fn round_trips() {
        for x in [0.0, 1.5e-12, -3.25, 50.0, 0.1 + 0.2, 1e300, 6.02e23, f64::MIN_POSITIVE] {
            let s = format_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_f64(1.5e-12), "1.5e-12");
        assert_eq!(format_f64(50.0), "50");
    }
}
