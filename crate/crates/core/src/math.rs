//! `f64` transcendental functions for `no_std`.

pub use libm::{erfc, exp, expm1, fabs as abs, log as ln, pow as powf, sqrt};


/// `x^s` for `x > 0`, exact for `s == 0` and `s == 1`.
#[inline]
pub fn pos_pow(x: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else if s == 1.0 {
        x
    } else {
        powf(x, s)
    }
}
