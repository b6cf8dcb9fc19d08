//! Adaptive Simpson quadrature.

use alloc::vec::Vec;

use crate::math::abs;
use crate::{Error, Result};

pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_SUBDIVISIONS: usize = 1 << 16;

#[derive(Debug, Clone, Copy)]
pub struct Simpson {
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for Simpson {
    fn default() -> Self {
        Simpson { rel_tol: DEFAULT_REL_TOL, max_subdivisions: DEFAULT_MAX_SUBDIVISIONS }
    }
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
}

#[inline]
fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// `f(x)` at an end of the interval; a non-finite value (such as `0 · ∞` at
/// an integrable singularity) is replaced by `f` one ulp-scale step inside.
fn end_value<F: Fn(f64) -> f64>(f: &F, x: f64, other: f64) -> f64 {
    let v = f(x);
    if v.is_finite() {
        v
    } else {
        f(x + (other - x) * f64::EPSILON)
    }
}

impl Simpson {
    /// Integrates `f` over `[a, b]`.
    ///
    /// The absolute tolerance is `rel_tol` times the magnitude of a 16-panel
    /// composite estimate; running out of subdivisions is an error.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        const START: usize = 16;
        let h = (b - a) / START as f64;
        let mut stack = Vec::with_capacity(64);
        let mut coarse = 0.0;
        let mut panels = Vec::with_capacity(START);
        for k in 0..START {
            let pa = a + h * k as f64;
            let pb = if k + 1 == START { b } else { a + h * (k + 1) as f64 };
            let fa = if k == 0 { end_value(&f, a, b) } else { f(pa) };
            let fb = if k + 1 == START { end_value(&f, b, a) } else { f(pb) };
            let fm = f(0.5 * (pa + pb));
            let whole = simpson(pa, pb, fa, fm, fb);
            coarse += abs(whole);
            panels.push((pa, pb, fa, fm, fb, whole));
        }
        let tol_total = self.rel_tol * coarse.max(f64::MIN_POSITIVE);
        for (pa, pb, fa, fm, fb, whole) in panels.into_iter().rev() {
            stack.push(Panel { a: pa, b: pb, fa, fm, fb, whole, tol: tol_total / START as f64 });
        }

        let mut total = 0.0;
        let mut subdivisions = START;
        while let Some(p) = stack.pop() {
            let m = 0.5 * (p.a + p.b);
            let lm = 0.5 * (p.a + m);
            let rm = 0.5 * (m + p.b);
            let (flm, frm) = (f(lm), f(rm));
            let left = simpson(p.a, m, p.fa, flm, p.fm);
            let right = simpson(m, p.b, p.fm, frm, p.fb);
            let delta = left + right - p.whole;
            if !delta.is_finite() {
                return Err(Error::Quadrature { a, b, max_subdivisions: self.max_subdivisions });
            }
            if abs(delta) <= 15.0 * p.tol || m <= p.a || m >= p.b {
                total += left + right + delta / 15.0;
                continue;
            }
            subdivisions += 1;
            if subdivisions > self.max_subdivisions {
                return Err(Error::Quadrature { a, b, max_subdivisions: self.max_subdivisions });
            }
            let tol = 0.5 * p.tol;
            stack.push(Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right, tol });
            stack.push(Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left, tol });
        }
        Ok(total)
    }
}

/// [`Simpson::integrate`] with the default tolerance and subdivision cap.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    Simpson::default().integrate(f, a, b)
}
