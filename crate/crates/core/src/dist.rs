//! Catalogue of positive edge-label distributions.
//!
//! Each family has a closed-form (or quadrature) moment `E ξ^s`, a declared
//! moment domain `D`, a closed-form mean log `E log ξ`, and a sampler. The
//! `exp_neg_*` families describe `ξ = e^{-η}` for a real step `η`; their
//! log-sampler returns `-η` from the same draw the sampler exponentiates, so
//! path sums of `η` and path products of `ξ` can be driven by one stream.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::math::{abs, exp, expm1, ln, pos_pow, sqrt};
use crate::quad::Simpson;
use crate::{Error, Result};

/// Half-line moment domain `(lo, ∞)` or `[lo, ∞)`; `lo = -∞` means all of ℝ.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MomentDomain {
    pub lo: f64,
    pub lo_closed: bool,
}

impl MomentDomain {
    pub const REAL_LINE: MomentDomain = MomentDomain { lo: f64::NEG_INFINITY, lo_closed: false };

    pub const fn open_from(lo: f64) -> Self {
        MomentDomain { lo, lo_closed: false }
    }

    pub const fn closed_from(lo: f64) -> Self {
        MomentDomain { lo, lo_closed: true }
    }

    pub fn contains(&self, s: f64) -> bool {
        !s.is_nan() && s < f64::INFINITY && (s > self.lo || (self.lo_closed && s == self.lo))
    }

    pub fn contains_interior(&self, s: f64) -> bool {
        !s.is_nan() && s < f64::INFINITY && s > self.lo
    }

    pub fn intersect(&self, other: &MomentDomain) -> MomentDomain {
        if self.lo > other.lo {
            *self
        } else if other.lo > self.lo {
            *other
        } else {
            MomentDomain { lo: self.lo, lo_closed: self.lo_closed && other.lo_closed }
        }
    }
}

impl fmt::Display for MomentDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == f64::NEG_INFINITY {
            write!(f, "(-inf, +inf)")
        } else {
            write!(f, "{}{}, +inf)", if self.lo_closed { '[' } else { '(' }, self.lo)
        }
    }
}

/// Law of a positive edge label `ξ`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum DistSpec {
    /// `ξ ≡ value`.
    PointMass { value: f64 },
    /// `ξ ~ Uniform[lo, hi]`, `0 < lo < hi`.
    Uniform { lo: f64, hi: f64 },
    /// `log ξ ~ Normal(mu, sigma²)`.
    LogNormal { mu: f64, sigma: f64 },
    /// Finitely many positive atoms `(x, p)`.
    Discrete { atoms: Vec<(f64, f64)> },
    /// `ξ = e^{-η}`, `η ~ Normal(mu, sigma²)`, `sigma ≥ 0`.
    ExpNegGaussian { mu: f64, sigma: f64 },
    /// `ξ = e^{-η}`, `η = shift + Exp(rate)`.
    ExpNegShiftedExp { shift: f64, rate: f64 },
    /// `ξ = (1 - η)/η`, `η ~ Uniform[h, 1]`.
    RatioUniform { h: f64 },
    /// `ξ = 1/(c η)`, `η ~ Uniform[h, 1]`.
    RecipUniform { c: f64, h: f64 },
}

/// Probabilities of a discrete law must sum to one within this tolerance.
pub const PROBABILITY_SUM_TOL: f64 = 1e-12;

/// Lowest `s` at which [`DistSpec::RatioUniform`] moments are evaluated.
pub const RATIO_UNIFORM_MIN_S: f64 = -0.5;

fn invalid(msg: alloc::string::String) -> Error {
    Error::InvalidDistribution(msg)
}

impl DistSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            DistSpec::PointMass { .. } => "point_mass",
            DistSpec::Uniform { .. } => "uniform",
            DistSpec::LogNormal { .. } => "log_normal",
            DistSpec::Discrete { .. } => "discrete",
            DistSpec::ExpNegGaussian { .. } => "exp_neg_gaussian",
            DistSpec::ExpNegShiftedExp { .. } => "exp_neg_shifted_exp",
            DistSpec::RatioUniform { .. } => "ratio_uniform",
            DistSpec::RecipUniform { .. } => "recip_uniform",
        }
    }

    /// Checks parameters; every accepted law puts all its mass on `(0, ∞)`.
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(invalid(format!("{name} must be finite, got {v}")))
            }
        };
        let unit_open = |v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(invalid(format!("h must lie in (0, 1), got {v}")))
            }
        };
        match self {
            DistSpec::PointMass { value } => {
                finite("value", *value)?;
                if *value <= 0.0 {
                    return Err(invalid(format!("point_mass value must be positive, got {value}")));
                }
            }
            DistSpec::Uniform { lo, hi } => {
                finite("lo", *lo)?;
                finite("hi", *hi)?;
                if *lo <= 0.0 {
                    return Err(invalid(format!("uniform lo must be positive, got {lo}")));
                }
                if hi <= lo {
                    return Err(invalid(format!("uniform requires hi > lo, got lo = {lo}, hi = {hi}")));
                }
            }
            DistSpec::LogNormal { mu, sigma } => {
                finite("mu", *mu)?;
                finite("sigma", *sigma)?;
                if *sigma <= 0.0 {
                    return Err(invalid(format!("log_normal sigma must be positive, got {sigma}")));
                }
            }
            DistSpec::Discrete { atoms } => {
                if atoms.is_empty() {
                    return Err(invalid("discrete law needs at least one atom".into()));
                }
                let mut total = 0.0;
                for (k, &(x, p)) in atoms.iter().enumerate() {
                    if !(x.is_finite() && x > 0.0) {
                        return Err(invalid(format!("atom {k}: x must be positive, got {x}")));
                    }
                    if !(0.0..=1.0).contains(&p) {
                        return Err(invalid(format!("atom {k}: p must lie in [0, 1], got {p}")));
                    }
                    total += p;
                }
                if abs(total - 1.0) > PROBABILITY_SUM_TOL {
                    return Err(invalid(format!("discrete probabilities sum to {total}, not 1")));
                }
            }
            DistSpec::ExpNegGaussian { mu, sigma } => {
                finite("mu", *mu)?;
                finite("sigma", *sigma)?;
                if *sigma < 0.0 {
                    return Err(invalid(format!("exp_neg_gaussian sigma must be nonnegative, got {sigma}")));
                }
            }
            DistSpec::ExpNegShiftedExp { shift, rate } => {
                finite("shift", *shift)?;
                finite("rate", *rate)?;
                if *rate <= 0.0 {
                    return Err(invalid(format!("exp_neg_shifted_exp rate must be positive, got {rate}")));
                }
            }
            DistSpec::RatioUniform { h } => unit_open(*h)?,
            DistSpec::RecipUniform { c, h } => {
                finite("c", *c)?;
                if *c <= 0.0 {
                    return Err(invalid(format!("recip_uniform c must be positive, got {c}")));
                }
                unit_open(*h)?;
            }
        }
        Ok(())
    }

    /// Declared analytic domain `D = {s : E ξ^s < ∞}`.
    pub fn domain(&self) -> MomentDomain {
        match self {
            DistSpec::RatioUniform { .. } => MomentDomain::open_from(-1.0),
            DistSpec::ExpNegShiftedExp { rate, .. } => MomentDomain::open_from(-rate),
            _ => MomentDomain::REAL_LINE,
        }
    }

    /// Part of [`domain`](Self::domain) on which [`moment`](Self::moment) is evaluated.
    pub fn computable_domain(&self) -> MomentDomain {
        match self {
            DistSpec::RatioUniform { .. } => MomentDomain::closed_from(RATIO_UNIFORM_MIN_S),
            _ => self.domain(),
        }
    }

    /// `E ξ^s`.
    pub fn moment(&self, s: f64) -> Result<f64> {
        let domain = self.computable_domain();
        if !domain.contains(s) {
            return Err(Error::Domain { s, domain });
        }
        if s == 0.0 {
            return Ok(1.0);
        }
        let v = match self {
            DistSpec::PointMass { value } => pos_pow(*value, s),
            DistSpec::Uniform { lo, hi } => {
                // (hi^a - lo^a) / (a (hi - lo)) with a = s + 1, written to stay accurate near a = 0.
                let a = s + 1.0;
                let l = ln(hi / lo);
                let ratio = if a == 0.0 { l } else { expm1(a * l) / a };
                pos_pow(*lo, a) * ratio / (hi - lo)
            }
            DistSpec::LogNormal { mu, sigma } => exp(s * mu + 0.5 * s * s * sigma * sigma),
            DistSpec::Discrete { atoms } => atoms.iter().map(|&(x, p)| p * pos_pow(x, s)).sum(),
            DistSpec::ExpNegGaussian { mu, sigma } => exp(-s * mu + 0.5 * s * s * sigma * sigma),
            DistSpec::ExpNegShiftedExp { shift, rate } => exp(-s * shift) * rate / (rate + s),
            DistSpec::RatioUniform { h } => ratio_uniform_moment(*h, s)?,
            DistSpec::RecipUniform { c, h } => pos_pow(*c, -s) * mean_uniform_power(*h, -s),
        };
        Ok(v)
    }

    /// `E ξ^s` by adaptive quadrature of the defining integral, for the
    /// families given by a density on a bounded interval.
    ///
    /// Independent of the closed forms used by [`moment`](Self::moment).
    pub fn moment_by_quadrature(&self, s: f64) -> Result<f64> {
        let domain = self.computable_domain();
        if !domain.contains(s) {
            return Err(Error::Domain { s, domain });
        }
        let q = Simpson::default();
        match self {
            DistSpec::Uniform { lo, hi } => Ok(q.integrate(|x| pos_pow(x, s), *lo, *hi)? / (hi - lo)),
            DistSpec::RecipUniform { c, h } => {
                Ok(q.integrate(|t| pos_pow(1.0 / (c * t), s), *h, 1.0)? / (1.0 - h))
            }
            DistSpec::RatioUniform { h } => ratio_uniform_moment(*h, s),
            _ => Err(Error::Unsupported("quadrature moments need a bounded-interval density")),
        }
    }

    /// `E log ξ`.
    pub fn mean_log(&self) -> f64 {
        match self {
            DistSpec::PointMass { value } => ln(*value),
            DistSpec::Uniform { lo, hi } => (hi * ln(*hi) - hi - lo * ln(*lo) + lo) / (hi - lo),
            DistSpec::LogNormal { mu, .. } => *mu,
            DistSpec::Discrete { atoms } => atoms.iter().map(|&(x, p)| p * ln(x)).sum(),
            DistSpec::ExpNegGaussian { mu, .. } => -mu,
            DistSpec::ExpNegShiftedExp { shift, rate } => -(shift + 1.0 / rate),
            DistSpec::RatioUniform { h } => {
                // E log(1-η) - E log η over Uniform[h, 1].
                let w = 1.0 - h;
                let log_one_minus = ln(w) - 1.0;
                log_one_minus - mean_log_uniform(*h)
            }
            DistSpec::RecipUniform { c, h } => -ln(*c) - mean_log_uniform(*h),
        }
    }

    /// Regularity of the law: `(0 ∈ Int D, E|log ξ| < ∞, E|ξ log ξ| < ∞)`.
    ///
    /// Both log-integrability conditions follow from the moment domain: a
    /// neighbourhood of 0 in `D` gives the first, one of 1 gives the second.
    pub fn regularity(&self) -> (bool, bool, bool) {
        let d = self.domain();
        (d.contains_interior(0.0), d.contains_interior(0.0), d.contains_interior(1.0))
    }

    /// Draws `log ξ`.
    pub fn sample_log<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            DistSpec::ExpNegGaussian { mu, sigma } => {
                let z: f64 = rng.sample(StandardNormal);
                -(mu + sigma * z)
            }
            DistSpec::ExpNegShiftedExp { shift, rate } => -(shift + sample_exp(rng, *rate)),
            DistSpec::LogNormal { mu, sigma } => {
                let z: f64 = rng.sample(StandardNormal);
                mu + sigma * z
            }
            _ => ln(self.sample(rng)),
        }
    }

    /// Draws `ξ`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            DistSpec::PointMass { value } => *value,
            DistSpec::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            DistSpec::Discrete { atoms } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for &(x, p) in atoms {
                    acc += p;
                    if u < acc {
                        return x;
                    }
                }
                atoms.iter().rev().find(|a| a.1 > 0.0).map_or(atoms[atoms.len() - 1].0, |a| a.0)
            }
            DistSpec::LogNormal { .. } | DistSpec::ExpNegGaussian { .. } | DistSpec::ExpNegShiftedExp { .. } => {
                exp(self.sample_log(rng))
            }
            DistSpec::RatioUniform { h } => {
                let eta = h + (1.0 - h) * rng.random::<f64>();
                (1.0 - eta) / eta
            }
            DistSpec::RecipUniform { c, h } => {
                let eta = h + (1.0 - h) * rng.random::<f64>();
                1.0 / (c * eta)
            }
        }
    }
}

/// `Exp(rate)` by inversion; `1 - u ∈ (0, 1]` keeps the log finite.
pub(crate) fn sample_exp<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    let u: f64 = rng.random();
    -ln(1.0 - u) / rate
}

/// `E η^p` for `η ~ Uniform[h, 1]`.
fn mean_uniform_power(h: f64, p: f64) -> f64 {
    let a = p + 1.0;
    let lh = ln(h);
    // (1 - h^a) / a, continuous at a = 0 where it equals -ln h.
    let integral = if a == 0.0 { -lh } else { -expm1(a * lh) / a };
    integral / (1.0 - h)
}

/// `E log η` for `η ~ Uniform[h, 1]`.
fn mean_log_uniform(h: f64) -> f64 {
    (-1.0 - h * ln(h) + h) / (1.0 - h)
}

/// `E((1-η)/η)^s` for `η ~ Uniform[h, 1]`, by quadrature after `t = 1 - w²`,
/// which makes the integrand `2 w^{2s+1} (1-w²)^{-s}` bounded for `s ≥ -1/2`.
fn ratio_uniform_moment(h: f64, s: f64) -> Result<f64> {
    if s == 0.0 {
        return Ok(1.0);
    }
    let upper = sqrt(1.0 - h);
    let f = |w: f64| {
        let w2 = w * w;
        2.0 * pos_pow(w, 2.0 * s + 1.0) * pos_pow(1.0 - w2, -s)
    };
    Ok(Simpson::default().integrate(f, 0.0, upper)? / (1.0 - h))
}
