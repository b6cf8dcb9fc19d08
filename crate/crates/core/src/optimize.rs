//! One-dimensional search: golden section and bisection.

use crate::math::sqrt;
use crate::{Error, Result};

/// Location and value of a minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Minimum {
    pub arg: f64,
    pub value: f64,
}

/// Golden-section minimisation of a unimodal `f` on `[lo, hi]`.
///
/// The bracket is shrunk until it is narrower than `tol`; the result is the
/// best of the final interior point and the two original endpoints. On
/// exact ties the smallest argument wins.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Minimum {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let f_lo = f(a);
    if b - a <= tol {
        return Minimum { arg: a, value: f_lo };
    }
    let f_hi = f(b);
    let inv_phi = (sqrt(5.0) - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        // `<=` keeps the left part on ties so flat minima resolve leftwards.
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let (mut best, mut best_val) = if fc <= fd { (c, fc) } else { (d, fd) };
    if f_hi < best_val {
        best = hi.max(lo);
        best_val = f_hi;
    }
    if f_lo <= best_val {
        best = lo.min(hi);
        best_val = f_lo;
    }
    Minimum { arg: best, value: best_val }
}

/// Root of a monotone `f` on `[lo, hi]` by bisection, to an argument
/// tolerance `tol`. The endpoints may be given in either order.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64, what: &'static str) -> Result<f64> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() || fb.is_finite()) || (fa > 0.0) == (fb > 0.0) || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoSignChange { what, lo: a, hi: b });
    }
    let a_positive = fa > 0.0;
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm > 0.0) == a_positive {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}
