//! Fixed-precision decimal rendering shared by every text export.

/// Renders `v` with 17 significant digits, enough to round-trip any binary64
/// value exactly. Positional notation is used for moderate magnitudes and
/// scientific notation otherwise.
pub fn sig17(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0.0".into()
        } else {
            "0.0".into()
        };
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(1) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.16e}")
    }
}
