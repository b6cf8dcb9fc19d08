//! Spectral constants of an environment.
//!
//! `ρ(s)` is the Perron root of `m(s)`; `Λ(s) = log ρ(s) − log b` is the
//! scaled cumulant generating function of the log path product along a
//! uniformly coloured path, and `Λ*` its Legendre transform. `log ρ` is
//! convex, which is what makes golden-section search valid throughout.

use crate::env::EnvSpec;
use crate::math::{abs, exp, ln};
use crate::optimize::{bisect, golden_section, Minimum};
use crate::perron::perron;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectralOptions {
    /// Upper end of the search for `inf_{s≥0} ρ(s)`.
    pub s_max_bound: f64,
    /// Argument tolerance of golden-section searches.
    pub arg_tol: f64,
    /// Finite-difference step for derivatives of `Λ`.
    pub fd_step: f64,
    /// Second differences of `log ρ` at or below this are "not strictly convex".
    pub degeneracy_threshold: f64,
    /// Bisection interval for the speed `x₀`.
    pub speed_bracket: (f64, f64),
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            s_max_bound: 64.0,
            arg_tol: 1e-9,
            fd_step: 1e-5,
            degeneracy_threshold: 1e-9,
            speed_bracket: (-1e3, 1e3),
        }
    }
}

/// `inf ρ` over a half-line, possibly cut off at the search bound.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HalfLineInfimum {
    pub value: f64,
    pub arg: f64,
    /// False when `ρ` is still decreasing at the search bound, in which case
    /// `value` is `ρ` at the bound and the true infimum is smaller.
    pub attained_within_bound: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RateFunctionPoint {
    pub z: f64,
    /// `Λ*(z)`; `+∞` when `unbounded`.
    pub value: f64,
    /// Maximiser `s₀(z)` of `s z − Λ(s)` (0 for `z` at or below the drift).
    pub s0: f64,
    /// The supremum runs into the search bound.
    pub unbounded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Speed {
    pub x0: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectralReport {
    pub lambda1: Minimum,
    pub lambda: HalfLineInfimum,
    pub s_max_bound: f64,
    pub drift: f64,
    pub degenerate: bool,
}

pub fn rho(env: &EnvSpec, s: f64) -> Result<f64> {
    Ok(perron(&env.moment_matrix(s)?.values)?.rho)
}

pub fn log_rho(env: &EnvSpec, s: f64) -> Result<f64> {
    rho(env, s).map(ln)
}

/// `Λ(s) = log ρ(s) − log b`.
pub fn cumulant(env: &EnvSpec, s: f64) -> Result<f64> {
    Ok(log_rho(env, s)? - ln(env.b() as f64))
}

/// Minimises `log ρ` on `[lo, hi]`, surfacing the first evaluation error.
/// `log ρ(s)`, with moments too large for `f64` reported as `+∞`.
fn log_rho_or_inf(env: &EnvSpec, s: f64) -> Result<f64> {
    match log_rho(env, s) {
        Err(Error::NonPositiveEntry { value, .. }) if value == f64::INFINITY => Ok(f64::INFINITY),
        other => other,
    }
}

fn minimize_log_rho(env: &EnvSpec, lo: f64, hi: f64, tol: f64, shift: f64) -> Result<Minimum> {
    let mut err = None;
    let m = golden_section(
        |s| match log_rho_or_inf(env, s) {
            Ok(v) => v + shift * s,
            Err(e) => {
                err.get_or_insert(e);
                f64::INFINITY
            }
        },
        lo,
        hi,
        tol,
    );
    match err {
        Some(e) => Err(e),
        None => Ok(m),
    }
}

fn require(env: &EnvSpec, lo: f64, hi: f64) -> Result<()> {
    let d = env.computable_domain();
    for s in [lo, hi] {
        if !d.contains(s) {
            return Err(Error::Domain { s, domain: d });
        }
    }
    Ok(())
}

/// Largest `s` the half-line searches look at.
pub fn search_upper(_env: &EnvSpec, opts: &SpectralOptions) -> f64 {
    // Every catalogued family has a domain unbounded above.
    opts.s_max_bound
}

/// `λ₁ = inf_{s∈[0,1]} ρ(s)` and its argmin.
pub fn lambda1(env: &EnvSpec, opts: &SpectralOptions) -> Result<Minimum> {
    require(env, 0.0, 1.0)?;
    let m = minimize_log_rho(env, 0.0, 1.0, opts.arg_tol, 0.0)?;
    Ok(Minimum { arg: m.arg, value: exp(m.value) })
}

/// `inf_{s≥0} (s x + log ρ(s))` over `[0, s_max]` in log scale.
fn tilted_infimum(env: &EnvSpec, x: f64, opts: &SpectralOptions) -> Result<(Minimum, bool)> {
    let upper = search_upper(env, opts);
    require(env, 0.0, upper)?;
    let f = |s: f64| -> Result<f64> { Ok(log_rho_or_inf(env, s)? + x * s) };
    let f0 = f(0.0)?;
    // Bracket by doubling from s = 1.
    let mut lo = 0.0;
    let mut mid = 1.0f64.min(upper);
    let mut f_mid = f(mid)?;
    if f_mid >= f0 {
        let m = minimize_log_rho(env, 0.0, mid, opts.arg_tol, x)?;
        return Ok((m, true));
    }
    loop {
        let hi = (2.0 * mid).min(upper);
        let f_hi = if hi.is_finite() { f(hi).unwrap_or(f64::INFINITY) } else { f64::INFINITY };
        let f_hi = if f_hi.is_nan() { f64::INFINITY } else { f_hi };
        if f_hi >= f_mid {
            let m = minimize_log_rho(env, lo, hi, opts.arg_tol, x)?;
            return Ok((m, true));
        }
        if hi >= upper {
            // Still decreasing at the bound: is the minimum interior to [mid, upper]?
            let m = minimize_log_rho(env, mid, upper, opts.arg_tol, x)?;
            let h = opts.fd_step.max(1e-6 * upper);
            let decreasing = f(upper - h)? > f_hi;
            let at_bound = upper - m.arg <= 10.0 * opts.arg_tol;
            return Ok((m, !(at_bound && decreasing)));
        }
        lo = mid;
        mid = hi;
        f_mid = f_hi;
    }
}

/// `λ = inf_{s≥0} ρ(s)`, searched on `[0, s_max_bound]`.
pub fn lambda_inf(env: &EnvSpec, opts: &SpectralOptions) -> Result<HalfLineInfimum> {
    let (m, attained) = tilted_infimum(env, 0.0, opts)?;
    Ok(HalfLineInfimum { value: exp(m.value), arg: m.arg, attained_within_bound: attained })
}

/// `λ^{(x)} = inf_{s≥0} e^{s x} ρ(s)`.
pub fn tilted_lambda(env: &EnvSpec, x: f64, opts: &SpectralOptions) -> Result<HalfLineInfimum> {
    let (m, attained) = tilted_infimum(env, x, opts)?;
    Ok(HalfLineInfimum { value: exp(m.value), arg: m.arg, attained_within_bound: attained })
}

/// `Λ'(0)` by a central difference of step `fd_step`, one-sided when the
/// moment domain does not reach below zero.
pub fn drift(env: &EnvSpec, opts: &SpectralOptions) -> Result<f64> {
    let h = opts.fd_step;
    let d = env.computable_domain();
    if d.contains(-h) {
        Ok((log_rho(env, h)? - log_rho(env, -h)?) / (2.0 * h))
    } else if d.contains(0.0) {
        // Second-order forward difference.
        let (f0, f1, f2) = (log_rho(env, 0.0)?, log_rho(env, h)?, log_rho(env, 2.0 * h)?);
        Ok((-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h))
    } else {
        Err(Error::Domain { s: 0.0, domain: d })
    }
}

/// `Λ'(s)` by central differences (forward at the lower domain edge).
pub fn cumulant_derivative(env: &EnvSpec, s: f64, opts: &SpectralOptions) -> Result<f64> {
    let h = opts.fd_step;
    if env.computable_domain().contains(s - h) {
        Ok((log_rho(env, s + h)? - log_rho(env, s - h)?) / (2.0 * h))
    } else {
        Ok((log_rho(env, s + h)? - log_rho(env, s)?) / h)
    }
}

/// `Λ*(z) = sup_{s≥0} [s z − Λ(s)]`.
pub fn rate_function(env: &EnvSpec, z: f64, opts: &SpectralOptions) -> Result<RateFunctionPoint> {
    let drift = drift(env, opts)?;
    rate_function_with_drift(env, z, drift, opts)
}

pub(crate) fn rate_function_with_drift(env: &EnvSpec, z: f64, drift: f64, opts: &SpectralOptions) -> Result<RateFunctionPoint> {
    if z <= drift {
        return Ok(RateFunctionPoint { z, value: 0.0, s0: 0.0, unbounded: false });
    }
    // sup_s [s z − log ρ(s)] + log b = log b − inf_s [log ρ(s) − z s].
    let (m, attained) = tilted_infimum(env, -z, opts)?;
    if !attained {
        return Ok(RateFunctionPoint { z, value: f64::INFINITY, s0: m.arg, unbounded: true });
    }
    let value = (ln(env.b() as f64) - m.value).max(0.0);
    Ok(RateFunctionPoint { z, value, s0: m.arg, unbounded: false })
}

/// Minimum of the second differences of `log ρ` at five points in `(0, s_max)`.
pub fn min_second_difference(env: &EnvSpec, opts: &SpectralOptions) -> Result<f64> {
    let upper = search_upper(env, opts).min(4.0);
    let delta = upper / 8.0;
    let mut min = f64::INFINITY;
    for k in 1..=5 {
        let s = delta * (k as f64 + 1.0);
        let d2 = log_rho(env, s - delta)? - 2.0 * log_rho(env, s)? + log_rho(env, s + delta)?;
        min = min.min(d2);
    }
    Ok(min)
}

/// True when `ρ` is not strictly log-convex (numerically).
pub fn is_degenerate(env: &EnvSpec, opts: &SpectralOptions) -> Result<bool> {
    Ok(min_second_difference(env, opts)? <= opts.degeneracy_threshold)
}

/// Speed `x₀` of the minimal displacement of the branching walk with steps
/// `η = −log ξ`: the root of `x ↦ inf_{s≥0} (s x + log ρ(s))`.
///
/// For a degenerate environment `log ρ` is affine and the infimum jumps from
/// `−∞` to `log b`; the jump location `−(log ρ)'(∞)` is returned instead.
pub fn speed_x0(env: &EnvSpec, opts: &SpectralOptions) -> Result<Speed> {
    if is_degenerate(env, opts)? {
        let upper = search_upper(env, opts);
        let slope = log_rho(env, upper)? - log_rho(env, upper - 1.0)?;
        return Ok(Speed { x0: -slope, degenerate: true });
    }
    let mut err = None;
    let mut g = |x: f64| match tilted_infimum(env, x, opts) {
        Ok((m, _)) => m.value,
        Err(e) => {
            err.get_or_insert(e);
            f64::NAN
        }
    };
    // g is non-decreasing; widen [-1, 1] by doubling within the configured bracket.
    let (min_x, max_x) = opts.speed_bracket;
    let (mut lo, mut hi) = (-1.0f64.min(max_x).max(min_x), 1.0f64.max(min_x).min(max_x));
    while g(lo) > 0.0 && lo > min_x {
        hi = lo;
        lo = (2.0 * lo).max(min_x);
    }
    while g(hi) < 0.0 && hi < max_x {
        lo = hi;
        hi = (2.0 * hi).min(max_x);
    }
    let root = bisect(&mut g, lo, hi, 1e-10, "inf_s (s x + log rho(s))");
    if let Some(e) = err {
        return Err(e);
    }
    Ok(Speed { x0: root?, degenerate: false })
}

pub fn spectral_report(env: &EnvSpec, opts: &SpectralOptions) -> Result<SpectralReport> {
    Ok(SpectralReport {
        lambda1: lambda1(env, opts)?,
        lambda: lambda_inf(env, opts)?,
        s_max_bound: search_upper(env, opts),
        drift: drift(env, opts)?,
        degenerate: is_degenerate(env, opts)?,
    })
}

/// Relative gap `|a − b| / max(|b|, tiny)`.
pub fn rel_gap(a: f64, b: f64) -> f64 {
    abs(a - b) / abs(b).max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::DistSpec;
    use crate::rwre::RwreSpec;
    use alloc::vec;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn opts() -> SpectralOptions {
        SpectralOptions::default()
    }

    fn pm(b: usize, c: f64) -> EnvSpec {
        EnvSpec::uniform(b, DistSpec::PointMass { value: c }).unwrap()
    }

    fn eng(mu: f64, sigma: f64) -> EnvSpec {
        EnvSpec::uniform(2, DistSpec::ExpNegGaussian { mu, sigma }).unwrap()
    }

    fn split(h: f64) -> EnvSpec {
        RwreSpec::uniform_split_example(h).unwrap().induced_env()
    }

    fn mixed() -> EnvSpec {
        EnvSpec::new(vec![
            vec![DistSpec::LogNormal { mu: -0.4, sigma: 0.7 }, DistSpec::Uniform { lo: 0.1, hi: 0.9 }, DistSpec::PointMass { value: 0.3 }],
            vec![DistSpec::RecipUniform { c: 2.0, h: 0.4 }, DistSpec::Discrete { atoms: vec![(0.2, 0.5), (0.6, 0.5)] }, DistSpec::ExpNegGaussian { mu: 0.5, sigma: 0.3 }],
            vec![DistSpec::RatioUniform { h: 0.6 }, DistSpec::ExpNegShiftedExp { shift: 0.3, rate: 3.0 }, DistSpec::LogNormal { mu: -1.0, sigma: 0.2 }],
        ])
        .unwrap()
    }

    #[test]
    fn rho_closed_forms() {
        for s in [0.0, 0.5, 1.0, 2.0] {
            assert!(rel_gap(rho(&pm(2, 0.4), s).unwrap(), 2.0 * 0.4f64.powf(s)) < 1e-12);
            let expected = 2.0 * (-s * 0.7 + s * s * 0.25 / 2.0).exp();
            assert!(rel_gap(rho(&eng(0.7, 0.5), s).unwrap(), expected) < 1e-12);
        }
        assert!((rho(&mixed(), 0.0).unwrap() - 3.0).abs() < 1e-10);
    }

    #[test]
    fn rho_of_uniform_split_at_one() {
        // Largest root of λ² − tr λ + det with the analytic m(1) entries.
        let (a, b, c, d) = (0.5, 0.5, 2.0 * core::f64::consts::LN_2 - 1.0, 2.0 / 3.0 * core::f64::consts::LN_2);
        let (tr, det) = (a + d, a * d - b * c);
        let root = 0.5 * (tr + (tr * tr - 4.0 * det).sqrt());
        let r = rho(&split(0.5), 1.0).unwrap();
        assert!((r - root).abs() < 1e-10);
        assert!((r - 0.920_943).abs() < 1e-4);
    }

    #[test]
    fn lambda1_examples() {
        let m = lambda1(&pm(2, 0.4), &opts()).unwrap();
        assert!((m.value - 0.8).abs() < 1e-12 && m.arg == 1.0, "{m:?}");
        let m = lambda1(&pm(2, 1.5), &opts()).unwrap();
        assert!((m.value - 2.0).abs() < 1e-12 && m.arg == 0.0, "{m:?}");
        let m = lambda1(&split(0.417), &opts()).unwrap();
        assert!((m.value - 1.0).abs() < 2e-3, "{m:?}");
    }

    #[test]
    fn lambda_examples() {
        let l = lambda_inf(&pm(2, 0.5), &opts()).unwrap();
        assert!(!l.attained_within_bound);
        assert!(rel_gap(l.value, 2.0 * 2f64.powi(-64)) < 1e-12, "{l:?}");
        assert_eq!(l.arg, 64.0);

        let l = lambda_inf(&eng(0.0, 1.0), &opts()).unwrap();
        assert!(l.attained_within_bound && l.arg == 0.0 && (l.value - 2.0).abs() < 1e-12, "{l:?}");

        let l = lambda_inf(&eng(2.0, 1.0), &opts()).unwrap();
        // Grid scan of 2 e^{−2s + s²/2} confirms the analytic minimiser s = 2.
        let grid_min = (0..=4000).map(|k| k as f64 * 1e-3).map(|s| 2.0 * (-2.0 * s + s * s / 2.0).exp()).fold(f64::INFINITY, f64::min);
        assert!((grid_min - 2.0 * (-2.0f64).exp()).abs() < 1e-9);
        assert!(l.attained_within_bound && (l.arg - 2.0).abs() < 1e-6 && (l.value - 2.0 * (-2.0f64).exp()).abs() < 1e-10, "{l:?}");
    }

    #[test]
    fn drift_examples() {
        assert!((drift(&pm(2, 0.3), &opts()).unwrap() - 0.3f64.ln()).abs() < 1e-8);
        let env = EnvSpec::uniform(2, DistSpec::LogNormal { mu: -0.7, sigma: 0.4 }).unwrap();
        assert!((drift(&env, &opts()).unwrap() + 0.7).abs() < 1e-8);
        // Mean log label with quadrature expectations for the random row.
        let q = crate::quad::Simpson::default();
        let h: f64 = 0.5;
        let e_ratio = q.integrate(|w| 2.0 * w * ((w * w).ln() - (1.0 - w * w).ln()), 0.0, (1.0 - h).sqrt()).unwrap() / (1.0 - h);
        let e_recip = q.integrate(|t| -(3.0 * t).ln(), h, 1.0).unwrap() / (1.0 - h);
        let oracle = 0.25 * (2.0 * 0.5f64.ln() + e_ratio + e_recip);
        let fd = drift(&split(h), &opts()).unwrap();
        assert!((fd - oracle).abs() < 1e-6, "{fd} vs {oracle}");
        assert!((split(h).mean_log_label() - oracle).abs() < 1e-9);
    }

    #[test]
    fn rate_function_examples() {
        let env = eng(0.0, 1.0);
        let below = rate_function(&env, -0.1, &opts()).unwrap();
        assert_eq!(below.value, 0.0);
        let p = rate_function(&env, 1.0, &opts()).unwrap();
        assert!((p.value - 0.5).abs() < 1e-8 && (p.s0 - 1.0).abs() < 1e-6, "{p:?}");
        let p = rate_function(&pm(2, 0.5), 0.5f64.ln() + 0.2, &opts()).unwrap();
        assert!(p.unbounded && p.value == f64::INFINITY);
        let p = rate_function(&split(0.5), drift(&split(0.5), &opts()).unwrap() - 0.1, &opts()).unwrap();
        assert_eq!(p.value, 0.0);
    }

    #[test]
    fn speed_examples() {
        let s = speed_x0(&eng(0.0, 1.0), &opts()).unwrap();
        let closed = -(2.0 * core::f64::consts::LN_2).sqrt();
        assert!(!s.degenerate && (s.x0 - closed).abs() < 1e-7, "{s:?}");
        // Grid minimisation of e^{s x} ρ(s) at the closed-form speed gives 1.
        let grid = (0..=5000).map(|k| k as f64 * 1e-3).map(|t| (t * closed).exp() * 2.0 * (t * t / 2.0).exp()).fold(f64::INFINITY, f64::min);
        assert!((grid - 1.0).abs() < 1e-6);
        let rate = rate_function(&eng(0.0, 1.0), -s.x0, &opts()).unwrap();
        assert!((rate.value - core::f64::consts::LN_2).abs() < 1e-6);

        let s = speed_x0(&pm(2, (-0.75f64).exp()), &opts()).unwrap();
        assert!(s.degenerate && (s.x0 - 0.75).abs() < 1e-9, "{s:?}");
    }

    #[test]
    fn report_orders_constants() {
        for env in [pm(2, 0.4), eng(0.3, 1.0), split(0.3), split(0.8), mixed()] {
            let r = spectral_report(&env, &opts()).unwrap();
            assert!(r.lambda.value <= r.lambda1.value * (1.0 + 1e-12), "{r:?}");
            assert!(r.lambda1.value <= env.b() as f64 * (1.0 + 1e-12));
            assert!(r.lambda1.value <= rho(&env, 1.0).unwrap() * (1.0 + 1e-12));
        }
    }

    fn catalogue() -> Vec<EnvSpec> {
        vec![pm(2, 0.4), pm(3, 1.2), eng(0.3, 1.0), eng(-0.5, 0.2), split(0.3), split(0.7), mixed()]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn log_rho_is_convex(k in 0usize..7, s1 in 0.0f64..3.0, gap in 0.05f64..3.0) {
            let env = &catalogue()[k];
            let s2 = s1 + gap;
            let (l1, l2) = (log_rho(env, s1).unwrap(), log_rho(env, s2).unwrap());
            for a in [0.25, 0.5, 0.75] {
                let mid = log_rho(env, a * s1 + (1.0 - a) * s2).unwrap();
                prop_assert!(mid <= a * l1 + (1.0 - a) * l2 + 1e-8);
            }
        }

        #[test]
        fn perron_residual_is_small(k in 0usize..7, s in 0.0f64..4.0) {
            let m = catalogue()[k].moment_matrix(s).unwrap().values;
            let r = perron(&m).unwrap();
            prop_assert!(r.residual(&m) <= 1e-10 * r.rho);
        }
    }

    #[test]
    fn rate_function_is_convex_nonnegative_and_legendre_consistent() {
        for env in [eng(0.2, 0.8), split(0.5), mixed()] {
            let d = drift(&env, &opts()).unwrap();
            let at_drift = rate_function(&env, d, &opts()).unwrap();
            assert_eq!(at_drift.value, 0.0);
            let zs: Vec<f64> = (0..25).map(|k| d - 0.3 + 0.05 * k as f64).collect();
            let vals: Vec<RateFunctionPoint> = zs.iter().map(|&z| rate_function(&env, z, &opts()).unwrap()).collect();
            for p in &vals {
                assert!(p.value >= 0.0);
                if p.z > d + 1e-3 && !p.unbounded {
                    let slope = cumulant_derivative(&env, p.s0, &opts()).unwrap();
                    assert!((slope - p.z).abs() < 1e-5, "Λ'(s₀) = {slope} vs z = {}", p.z);
                }
            }
            for w in vals.windows(3) {
                if w.iter().all(|p| !p.unbounded) {
                    assert!(w[0].value - 2.0 * w[1].value + w[2].value >= -1e-8);
                }
            }
        }
    }
}
