//! Built-in one-parameter families, usable wherever a config file is.

use std::path::Path;

use colortree_core::brw::{BrwSpec, StepLaw};
use colortree_core::dist::DistSpec;
use colortree_core::env::EnvSpec;
use colortree_core::rwre::RwreSpec;

use crate::config::{self, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Jump vectors `(½, ¼, ¼)` and `(¾η, ¾(1−η), ¼)`, `η ~ Uniform[h, 1]`; parameter `h`.
    Sec51,
    /// `b = 2`, every label `point_mass(c)`; parameter `c`.
    PointMassB2,
    /// `b = 2`, every label `e^{−η}` with `η ~ Normal(μ, 1)`; parameter `μ`.
    Normal01,
}

pub const NAMES: [&str; 3] = ["sec51", "pointmass-b2", "normal01"];

impl Family {
    pub fn from_name(name: &str) -> Option<Family> {
        match name {
            "sec51" => Some(Family::Sec51),
            "pointmass-b2" => Some(Family::PointMassB2),
            "normal01" => Some(Family::Normal01),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Sec51 => "sec51",
            Family::PointMassB2 => "pointmass-b2",
            Family::Normal01 => "normal01",
        }
    }

    pub fn default_param(self) -> f64 {
        match self {
            Family::Sec51 => 0.5,
            Family::PointMassB2 => 0.4,
            Family::Normal01 => 0.0,
        }
    }

    pub fn env(self, p: f64) -> colortree_core::Result<EnvSpec> {
        match self {
            Family::Sec51 => Ok(self.rwre(p)?.induced_env()),
            Family::PointMassB2 => EnvSpec::uniform(2, DistSpec::PointMass { value: p }),
            Family::Normal01 => EnvSpec::uniform(2, DistSpec::ExpNegGaussian { mu: p, sigma: 1.0 }),
        }
    }

    pub fn rwre(self, p: f64) -> colortree_core::Result<RwreSpec> {
        match self {
            Family::Sec51 => RwreSpec::uniform_split_example(p),
            _ => Err(colortree_core::Error::Unsupported("only sec51 defines jump vectors")),
        }
    }

    /// Step laws `η = −log ξ`.
    pub fn brw(self, p: f64) -> colortree_core::Result<BrwSpec> {
        match self {
            Family::Normal01 => BrwSpec::uniform(2, StepLaw::Normal { mu: p, sigma: 1.0 }),
            Family::PointMassB2 => BrwSpec::uniform(2, StepLaw::PointMass { value: -p.ln() }),
            Family::Sec51 => Err(colortree_core::Error::Unsupported("sec51 has jointly distributed siblings, not step laws")),
        }
    }
}

/// `NAME` or `NAME:PARAM`, with `.json` tolerated after the name.
fn builtin(arg: &str) -> Option<Result<(Family, f64), ParseError>> {
    let (name, param) = match arg.split_once(':') {
        Some((n, p)) => (n, Some(p)),
        None => (arg, None),
    };
    let family = Family::from_name(name.strip_suffix(".json").unwrap_or(name))?;
    Some(match param {
        None => Ok((family, family.default_param())),
        Some(p) => p
            .parse::<f64>()
            .map(|p| (family, p))
            .map_err(|_| ParseError(format!("built-in family `{}`: parameter `{p}` is not a number", family.name()))),
    })
}

fn read(path: &Path) -> Result<String, ParseError> {
    std::fs::read_to_string(path).map_err(|e| ParseError(format!("cannot read {}: {e}", path.display())))
}

/// What a `--env`, `--rwre` or `--spec` argument resolved to.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    File { path: String, text: String },
    Builtin { family: Family, param: f64 },
}

impl Source {
    pub fn describe(&self) -> serde_json::Value {
        match self {
            Source::File { path, .. } => serde_json::json!({ "file": path }),
            Source::Builtin { family, param } => serde_json::json!({ "builtin": family.name(), "param": param }),
        }
    }
}

/// An existing file wins over a built-in name.
pub fn resolve(arg: &str) -> Result<Source, ParseError> {
    let path = Path::new(arg);
    if path.exists() {
        return Ok(Source::File { path: arg.to_string(), text: read(path)? });
    }
    match builtin(arg) {
        Some(r) => r.map(|(family, param)| Source::Builtin { family, param }),
        None => Err(ParseError(format!("`{arg}` is neither a readable file nor a built-in family ({})", NAMES.join(", ")))),
    }
}

fn domain(e: colortree_core::Error) -> ParseError {
    ParseError(e.to_string())
}

pub fn load_env(src: &Source) -> Result<EnvSpec, ParseError> {
    match src {
        Source::File { text, .. } => config::parse_env(text),
        Source::Builtin { family, param } => family.env(*param).map_err(domain),
    }
}

pub fn load_rwre(src: &Source) -> Result<RwreSpec, ParseError> {
    match src {
        Source::File { text, .. } => config::parse_rwre(text),
        Source::Builtin { family, param } => family.rwre(*param).map_err(domain),
    }
}

pub fn load_brw(src: &Source) -> Result<BrwSpec, ParseError> {
    match src {
        Source::File { text, .. } => config::parse_brw(text),
        Source::Builtin { family, param } => family.brw(*param).map_err(domain),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_and_params() {
        assert_eq!(resolve("sec51").unwrap(), Source::Builtin { family: Family::Sec51, param: 0.5 });
        assert_eq!(resolve("pointmass-b2:0.3").unwrap(), Source::Builtin { family: Family::PointMassB2, param: 0.3 });
        assert_eq!(resolve("normal01.json").unwrap(), Source::Builtin { family: Family::Normal01, param: 0.0 });
        assert!(resolve("sec51:x").is_err());
        assert!(resolve("no-such-thing").is_err());
    }

    #[test]
    fn pointmass_brw_matches_env() {
        let spec = Family::PointMassB2.brw(0.4).unwrap();
        let env = spec.induced_env();
        let want = Family::PointMassB2.env(0.4).unwrap();
        for (a, b) in env.entries().iter().flatten().zip(want.entries().iter().flatten()) {
            let (DistSpec::PointMass { value: x }, DistSpec::PointMass { value: y }) = (a, b) else { panic!() };
            assert!((x - y).abs() < 1e-15);
        }
    }
}
