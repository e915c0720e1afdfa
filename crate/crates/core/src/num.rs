//! Small floating-point helpers shared across modules.

/// Default relative tolerance for equality-flavored comparisons.
pub const REL_TOL: f64 = 1e-9;

/// True when `a` and `b` agree within relative tolerance `tol`
/// (absolute near zero).
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1.0_f64.max(a.abs()).max(b.abs())
}

/// True when `a` is strictly smaller than `b` by more than the relative
/// tolerance — i.e. a genuine improvement, not floating-point noise.
pub fn strictly_less(a: f64, b: f64, tol: f64) -> bool {
    a < b - tol * 1.0_f64.max(a.abs()).max(b.abs())
}

/// `base^exp` with the convention `x^0 := 1` even when `base` is 0
/// (matching the constructions' `0^0 := 1`).
pub fn pow0(base: f64, exp: f64) -> f64 {
    if exp == 0.0 {
        1.0
    } else {
        base.powf(exp)
    }
}

/// `t * ln(x)` with the convention `0 * ln(0) := 0`.
pub fn xlny(t: f64, x: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * x.ln()
    }
}
