//! Regime verdicts from the spectral constants.
//!
//! `Y` is finite when `λ₁ < 1` and infinite when `λ₁ > 1`; `Z(x)` follows
//! `λ` the same way, for every threshold `x > 0`. Values within
//! `eps_critical` of 1 are reported as critical, and an infinite verdict is
//! only issued when the regularity hypotheses hold.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::env::EnvSpec;
use crate::optimize::{bisect, Minimum};
use crate::spectral::{self, HalfLineInfimum, SpectralOptions, Speed};
use crate::{Error, Result};

pub const DEFAULT_EPS_CRITICAL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Regime {
    Finite,
    Infinite,
    Critical,
    /// The constant exceeds 1 but the regularity hypotheses fail.
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RwreVerdict {
    PositiveRecurrent,
    Transient,
    Critical,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RdeVerdict {
    SolutionExists,
    NoSolution,
    Critical,
    Indeterminate,
}

impl From<Regime> for RwreVerdict {
    fn from(r: Regime) -> Self {
        match r {
            Regime::Finite => RwreVerdict::PositiveRecurrent,
            Regime::Infinite => RwreVerdict::Transient,
            Regime::Critical => RwreVerdict::Critical,
            Regime::Indeterminate => RwreVerdict::Indeterminate,
        }
    }
}

impl From<Regime> for RdeVerdict {
    fn from(r: Regime) -> Self {
        match r {
            Regime::Finite => RdeVerdict::SolutionExists,
            Regime::Infinite => RdeVerdict::NoSolution,
            Regime::Critical => RdeVerdict::Critical,
            Regime::Indeterminate => RdeVerdict::Indeterminate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassifyOptions {
    pub eps_critical: f64,
    pub spectral: SpectralOptions,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { eps_critical: DEFAULT_EPS_CRITICAL, spectral: SpectralOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegimeReport {
    pub y_regime: Regime,
    pub z_regime: Regime,
    pub lambda1: Minimum,
    pub lambda: HalfLineInfimum,
    pub critical_band: f64,
    pub rwre: RwreVerdict,
    pub rde: RdeVerdict,
    pub fpp_finite: Regime,
    /// Speed of the branching walk with steps `−log ξ`, when it exists.
    pub brw_speed: Option<Speed>,
    pub warnings: Vec<String>,
}

/// Regime of a criticality constant against the band `1 ± eps`.
pub fn regime_of(constant: f64, eps: f64, hypotheses_hold: bool) -> Regime {
    if constant < 1.0 - eps {
        Regime::Finite
    } else if constant > 1.0 + eps {
        if hypotheses_hold {
            Regime::Infinite
        } else {
            Regime::Indeterminate
        }
    } else {
        Regime::Critical
    }
}

pub fn classify(env: &EnvSpec, opts: &ClassifyOptions) -> Result<RegimeReport> {
    let reg = env.check_regularity();
    let mut warnings = Vec::new();
    let part_b = reg.all_pass();
    if !part_b {
        warnings.push(format!(
            "regularity conditions fail (0 in Int D: {:?}, E|log xi|: {:?}, E|xi log xi|: {:?}); infinite verdicts suppressed",
            reg.zero_interior, reg.log_integrable, reg.xlogx_integrable
        ));
    }
    let lambda1 = spectral::lambda1(env, &opts.spectral)?;
    let lambda = spectral::lambda_inf(env, &opts.spectral)?;
    if !lambda.attained_within_bound {
        warnings.push(format!(
            "rho(s) still decreasing at s = {}; lambda is an upper bound",
            lambda.arg
        ));
    }
    let y_regime = regime_of(lambda1.value, opts.eps_critical, part_b);
    let z_regime = regime_of(lambda.value, opts.eps_critical, part_b);
    let brw_speed = spectral::speed_x0(env, &opts.spectral).ok();
    Ok(RegimeReport {
        y_regime,
        z_regime,
        lambda1,
        lambda,
        critical_band: opts.eps_critical,
        rwre: y_regime.into(),
        rde: y_regime.into(),
        fpp_finite: z_regime,
        brw_speed,
        warnings,
    })
}

/// Regime of `Z(x)`; the threshold does not enter the verdict.
pub fn z_regime_at(env: &EnvSpec, x: f64, opts: &ClassifyOptions) -> Result<Regime> {
    if !(x > 0.0) {
        return Err(Error::InvalidEnvironment(format!("threshold x must be positive, got {x}")));
    }
    let lambda = spectral::lambda_inf(env, &opts.spectral)?;
    Ok(regime_of(lambda.value, opts.eps_critical, env.check_regularity().all_pass()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Target {
    Lambda1,
    Lambda,
}

pub fn target_value(env: &EnvSpec, target: Target, opts: &SpectralOptions) -> Result<f64> {
    match target {
        Target::Lambda1 => Ok(spectral::lambda1(env, opts)?.value),
        Target::Lambda => Ok(spectral::lambda_inf(env, opts)?.value),
    }
}

/// Parameter at which `target(family(p)) = 1`, by bisection to `tol`.
///
/// The range may be given in either order; the constant must cross 1
/// between its ends.
pub fn find_critical_parameter<F>(family: F, range: (f64, f64), target: Target, tol: f64, opts: &SpectralOptions) -> Result<f64>
where
    F: Fn(f64) -> Result<EnvSpec>,
{
    let mut err = None;
    let root = bisect(
        |p| match family(p).and_then(|env| target_value(&env, target, opts)) {
            Ok(v) => v - 1.0,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        },
        range.0,
        range.1,
        tol,
        "criticality constant - 1",
    );
    match err {
        Some(e) => Err(e),
        None => root,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::DistSpec;
    use crate::rwre::RwreSpec;

    fn pm(c: f64) -> Result<EnvSpec> {
        EnvSpec::uniform(2, DistSpec::PointMass { value: c })
    }

    fn split(h: f64) -> Result<EnvSpec> {
        Ok(RwreSpec::uniform_split_example(h)?.induced_env())
    }

    #[test]
    fn point_mass_regimes() {
        let o = ClassifyOptions::default();
        let r = classify(&pm(0.4).unwrap(), &o).unwrap();
        assert_eq!((r.y_regime, r.z_regime), (Regime::Finite, Regime::Finite));
        assert!((r.lambda1.value - 0.8).abs() < 1e-12);
        assert!(!r.lambda.attained_within_bound);
        let r = classify(&pm(0.8).unwrap(), &o).unwrap();
        assert_eq!(r.y_regime, Regime::Infinite);
        assert_eq!(r.rde, RdeVerdict::NoSolution);
    }

    #[test]
    fn uniform_split_walk_verdicts() {
        let o = ClassifyOptions::default();
        assert_eq!(classify(&split(0.3).unwrap(), &o).unwrap().rwre, RwreVerdict::Transient);
        assert_eq!(classify(&split(0.5).unwrap(), &o).unwrap().rwre, RwreVerdict::PositiveRecurrent);
    }

    #[test]
    fn application_verdicts_follow_regimes() {
        let o = ClassifyOptions::default();
        for c in [0.2, 0.45, 0.5, 0.55, 0.9] {
            let r = classify(&pm(c).unwrap(), &o).unwrap();
            assert_eq!(r.rwre, RwreVerdict::from(r.y_regime));
            assert_eq!(r.rde, RdeVerdict::from(r.y_regime));
            assert_eq!(r.fpp_finite, r.z_regime);
        }
        assert_eq!(classify(&pm(0.5).unwrap(), &o).unwrap().y_regime, Regime::Critical);
    }

    #[test]
    fn band_edges() {
        assert_eq!(regime_of(1.0 - 2e-4, 1e-4, true), Regime::Finite);
        assert_eq!(regime_of(1.0 + 5e-5, 1e-4, true), Regime::Critical);
        assert_eq!(regime_of(1.2, 1e-4, true), Regime::Infinite);
        assert_eq!(regime_of(1.2, 1e-4, false), Regime::Indeterminate);
    }

    #[test]
    fn critical_parameters() {
        let o = SpectralOptions::default();
        let h = find_critical_parameter(split, (0.1, 0.9), Target::Lambda1, 1e-6, &o).unwrap();
        assert!((h - 0.417).abs() < 1e-3, "{h}");
        let c = find_critical_parameter(pm, (0.1, 0.9), Target::Lambda1, 1e-8, &o).unwrap();
        assert!((c - 0.5).abs() < 1e-6);
        let c_rev = find_critical_parameter(pm, (0.9, 0.1), Target::Lambda1, 1e-8, &o).unwrap();
        assert!((c - c_rev).abs() < 1e-7);
        let eng = |mu: f64| EnvSpec::uniform(2, DistSpec::ExpNegGaussian { mu, sigma: 1.0 });
        let mu = find_critical_parameter(eng, (0.0, 3.0), Target::Lambda, 1e-8, &o).unwrap();
        assert!((mu - (2.0 * core::f64::consts::LN_2).sqrt()).abs() < 1e-5, "{mu}");
        assert!(matches!(
            find_critical_parameter(pm, (0.1, 0.3), Target::Lambda1, 1e-6, &o),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn scaling_up_never_lowers_lambda1() {
        let o = SpectralOptions::default();
        let env = EnvSpec::new(alloc::vec![
            alloc::vec![DistSpec::LogNormal { mu: -0.5, sigma: 0.6 }, DistSpec::Uniform { lo: 0.2, hi: 0.7 }],
            alloc::vec![DistSpec::RecipUniform { c: 3.0, h: 0.4 }, DistSpec::PointMass { value: 0.3 }],
        ])
        .unwrap();
        let base = spectral::lambda1(&env, &o).unwrap().value;
        for g in [1.0, 1.1, 1.5, 3.0] {
            assert!(spectral::lambda1(&env.scaled(g).unwrap(), &o).unwrap().value >= base * (1.0 - 1e-12));
        }
    }

    #[test]
    fn z_verdict_ignores_threshold() {
        let o = ClassifyOptions::default();
        for env in [pm(0.4).unwrap(), EnvSpec::uniform(2, DistSpec::ExpNegGaussian { mu: 0.2, sigma: 1.0 }).unwrap()] {
            let base = classify(&env, &o).unwrap().z_regime;
            for x in [1e-3, 0.5, 1.0, 7.0] {
                assert_eq!(z_regime_at(&env, x, &o).unwrap(), base);
            }
        }
    }
}
