//! Fixed float formatting for CSV output.

/// C `%.12e`: twelve mantissa digits and a signed, at least two digit
/// exponent (`1.000000000000e-02`). Non-finite values print as `nan`,
/// `inf` and `-inf`.
pub fn sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", exp.unsigned_abs())
}

#[cfg(test)]
mod tests {
    use super::sci;

    #[test]
    fn matches_c_printf() {
        assert_eq!(sci(0.0), "0.000000000000e+00");
        assert_eq!(sci(1.0), "1.000000000000e+00");
        assert_eq!(sci(-0.01), "-1.000000000000e-02");
        assert_eq!(sci(12345.678), "1.234567800000e+04");
        assert_eq!(sci(1e-300), "1.000000000000e-300");
        assert_eq!(sci(2f64.sqrt()), "1.414213562373e+00");
        assert_eq!(sci(f64::NAN), "nan");
        assert_eq!(sci(f64::NEG_INFINITY), "-inf");
    }
}
