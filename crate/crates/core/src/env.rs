//! The environment: `b²` edge-label laws keyed by (parent colour, child colour).

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::dist::{DistSpec, MomentDomain};
use crate::linalg::SquareMatrix;
use crate::math::ln;
use crate::rwre::RwreSpec;
use crate::{Error, Result};

/// Joint law of the `b` labels below one parent.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SiblingMode {
    /// Labels below a parent are independent.
    Independent,
    /// Labels are the ratio vector `(p_1/p_0, …, p_b/p_0)` of one draw of the
    /// parent's jump vector.
    RwreJoint(RwreSpec),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnvSpec {
    b: usize,
    entries: Vec<Vec<DistSpec>>,
    sibling_mode: SiblingMode,
    root_color: usize,
}

/// Per-condition outcome of the regularity check, with failing entries.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegularityReport {
    /// `[0, 1] ⊆ D`.
    pub unit_interval_in_domain: Vec<(usize, usize)>,
    /// `0 ∈ Int(D)`.
    pub zero_interior: Vec<(usize, usize)>,
    /// `E|log ξ| < ∞`.
    pub log_integrable: Vec<(usize, usize)>,
    /// `E|ξ log ξ| < ∞`.
    pub xlogx_integrable: Vec<(usize, usize)>,
}

impl RegularityReport {
    pub fn all_pass(&self) -> bool {
        self.unit_interval_in_domain.is_empty()
            && self.zero_interior.is_empty()
            && self.log_integrable.is_empty()
            && self.xlogx_integrable.is_empty()
    }

    /// Hypotheses of the finiteness statements: `[0, 1] ⊆ D`.
    pub fn finiteness_hypotheses(&self) -> bool {
        self.unit_interval_in_domain.is_empty()
    }
}

/// `m(s)`: entry `(i, j)` is `E ξ_ij^s`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MomentMatrix {
    pub s: f64,
    pub values: SquareMatrix,
}

impl EnvSpec {
    /// Independent-sibling environment with root colour 0.
    pub fn new(entries: Vec<Vec<DistSpec>>) -> Result<Self> {
        Self::with_mode(entries, SiblingMode::Independent, 0)
    }

    pub fn with_mode(entries: Vec<Vec<DistSpec>>, sibling_mode: SiblingMode, root_color: usize) -> Result<Self> {
        let b = entries.len();
        if b < 2 {
            return Err(Error::InvalidEnvironment(format!("b must be at least 2, got {b}")));
        }
        for (i, row) in entries.iter().enumerate() {
            if row.len() != b {
                return Err(Error::InvalidEnvironment(format!("row {i} has {} entries, expected {b}", row.len())));
            }
            for (j, d) in row.iter().enumerate() {
                d.validate().map_err(|e| e.at(i, j))?;
            }
        }
        if root_color >= b {
            return Err(Error::InvalidColor { color: root_color, b });
        }
        if let SiblingMode::RwreJoint(spec) = &sibling_mode {
            if spec.b() != b {
                return Err(Error::InvalidEnvironment(format!(
                    "jump-vector spec has b = {}, environment has b = {b}",
                    spec.b()
                )));
            }
        }
        Ok(EnvSpec { b, entries, sibling_mode, root_color })
    }

    /// Every entry equal to `dist`.
    pub fn uniform(b: usize, dist: DistSpec) -> Result<Self> {
        Self::new(alloc::vec![alloc::vec![dist; b]; b])
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn entries(&self) -> &[Vec<DistSpec>] {
        &self.entries
    }

    pub fn entry(&self, parent: usize, child: usize) -> &DistSpec {
        &self.entries[parent][child]
    }

    pub fn sibling_mode(&self) -> &SiblingMode {
        &self.sibling_mode
    }

    pub fn root_color(&self) -> usize {
        self.root_color
    }

    pub fn with_root_color(&self, root_color: usize) -> Result<Self> {
        if root_color >= self.b {
            return Err(Error::InvalidColor { color: root_color, b: self.b });
        }
        Ok(EnvSpec { root_color, ..self.clone() })
    }

    pub fn is_independent(&self) -> bool {
        matches!(self.sibling_mode, SiblingMode::Independent)
    }

    /// Intersection of the entries' declared domains.
    pub fn domain(&self) -> MomentDomain {
        self.fold_domains(DistSpec::domain)
    }

    /// Intersection of the entries' computable domains.
    pub fn computable_domain(&self) -> MomentDomain {
        self.fold_domains(DistSpec::computable_domain)
    }

    fn fold_domains(&self, f: impl Fn(&DistSpec) -> MomentDomain) -> MomentDomain {
        self.entries.iter().flatten().map(f).fold(MomentDomain::REAL_LINE, |acc, d| acc.intersect(&d))
    }

    pub fn check_regularity(&self) -> RegularityReport {
        let mut r = RegularityReport::default();
        for (i, row) in self.entries.iter().enumerate() {
            for (j, d) in row.iter().enumerate() {
                let dom = d.domain();
                if !(dom.contains(0.0) && dom.contains(1.0)) {
                    r.unit_interval_in_domain.push((i, j));
                }
                let (zero, log, xlogx) = d.regularity();
                if !zero {
                    r.zero_interior.push((i, j));
                }
                if !log {
                    r.log_integrable.push((i, j));
                }
                if !xlogx {
                    r.xlogx_integrable.push((i, j));
                }
            }
        }
        r
    }

    pub fn moment_matrix(&self, s: f64) -> Result<MomentMatrix> {
        let b = self.b;
        let mut values = SquareMatrix::zeros(b);
        for i in 0..b {
            for j in 0..b {
                values.set(i, j, self.entries[i][j].moment(s).map_err(|e| e.at(i, j))?);
            }
        }
        Ok(MomentMatrix { s, values })
    }

    /// `(1/b²) Σ_ij E log ξ_ij`, the mean log label under uniform colours.
    pub fn mean_log_label(&self) -> f64 {
        let b = self.b as f64;
        self.entries.iter().flatten().map(DistSpec::mean_log).sum::<f64>() / (b * b)
    }

    /// The `b` labels below a parent of colour `parent`, indexed by child colour.
    pub fn sample_row<R: Rng + ?Sized>(&self, parent: usize, rng: &mut R, out: &mut [f64]) -> Result<()> {
        self.check_color(parent)?;
        match &self.sibling_mode {
            SiblingMode::Independent => {
                for (o, d) in out.iter_mut().zip(&self.entries[parent]) {
                    *o = d.sample(rng);
                }
            }
            SiblingMode::RwreJoint(spec) => spec.sample_ratios(parent, rng, out),
        }
        Ok(())
    }

    /// Logarithms of the labels drawn by [`sample_row`](Self::sample_row),
    /// from the same random draws.
    pub fn sample_row_log<R: Rng + ?Sized>(&self, parent: usize, rng: &mut R, out: &mut [f64]) -> Result<()> {
        self.check_color(parent)?;
        match &self.sibling_mode {
            SiblingMode::Independent => {
                for (o, d) in out.iter_mut().zip(&self.entries[parent]) {
                    *o = d.sample_log(rng);
                }
            }
            SiblingMode::RwreJoint(spec) => {
                spec.sample_ratios(parent, rng, out);
                for o in out.iter_mut() {
                    *o = ln(*o);
                }
            }
        }
        Ok(())
    }

    /// Label of a single edge `parent → child`, drawn from its marginal law.
    pub(crate) fn sample_edge_log<R: Rng + ?Sized>(&self, parent: usize, child: usize, rng: &mut R, scratch: &mut [f64]) -> f64 {
        match &self.sibling_mode {
            SiblingMode::Independent => self.entries[parent][child].sample_log(rng),
            SiblingMode::RwreJoint(spec) => {
                spec.sample_ratios(parent, rng, scratch);
                ln(scratch[child])
            }
        }
    }

    fn check_color(&self, c: usize) -> Result<()> {
        if c < self.b {
            Ok(())
        } else {
            Err(Error::InvalidColor { color: c, b: self.b })
        }
    }

    /// Multiplies every label by `gamma > 0` (independent environments only).
    pub fn scaled(&self, gamma: f64) -> Result<Self> {
        if !self.is_independent() {
            return Err(Error::Unsupported("scaling is defined for independent-sibling environments"));
        }
        let entries = self
            .entries
            .iter()
            .map(|row| row.iter().map(|d| scale_dist(d, gamma)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        EnvSpec::with_mode(entries, SiblingMode::Independent, self.root_color)
    }
}

fn scale_dist(d: &DistSpec, g: f64) -> Result<DistSpec> {
    Ok(match d {
        DistSpec::PointMass { value } => DistSpec::PointMass { value: value * g },
        DistSpec::Uniform { lo, hi } => DistSpec::Uniform { lo: lo * g, hi: hi * g },
        DistSpec::LogNormal { mu, sigma } => DistSpec::LogNormal { mu: mu + ln(g), sigma: *sigma },
        DistSpec::Discrete { atoms } => DistSpec::Discrete { atoms: atoms.iter().map(|&(x, p)| (x * g, p)).collect() },
        DistSpec::ExpNegGaussian { mu, sigma } => DistSpec::ExpNegGaussian { mu: mu - ln(g), sigma: *sigma },
        DistSpec::ExpNegShiftedExp { shift, rate } => DistSpec::ExpNegShiftedExp { shift: shift - ln(g), rate: *rate },
        DistSpec::RecipUniform { c, h } => DistSpec::RecipUniform { c: c / g, h: *h },
        DistSpec::RatioUniform { .. } => return Err(Error::Unsupported("ratio_uniform is not closed under scaling")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;
    use crate::rwre::RwreSpec;
    use alloc::vec;

    #[test]
    fn moment_matrix_at_zero_is_all_ones() {
        let env = RwreSpec::uniform_split_example(0.5).unwrap().induced_env();
        let m = env.moment_matrix(0.0).unwrap();
        assert!(m.values.iter().all(|(_, _, v)| v == 1.0));
    }

    #[test]
    fn moment_matrix_of_point_masses() {
        let env = EnvSpec::uniform(3, DistSpec::PointMass { value: 0.7 }).unwrap();
        let m = env.moment_matrix(2.5).unwrap();
        assert!(m.values.iter().all(|(_, _, v)| (v - 0.7f64.powf(2.5)).abs() < 1e-15));
    }

    #[test]
    fn uniform_split_moment_matrix_at_one() {
        let env = RwreSpec::uniform_split_example(0.5).unwrap().induced_env();
        let m = env.moment_matrix(1.0).unwrap().values;
        // Row 1 by the analytic integrals E(1-η)/η = 2 ln 2 - 1 and E 1/(3η) = (2/3) ln 2.
        let expected = [[0.5, 0.5], [2.0 * core::f64::consts::LN_2 - 1.0, 2.0 / 3.0 * core::f64::consts::LN_2]];
        for (i, row) in expected.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                assert!((m.get(i, j) - e).abs() < 1e-10, "({i},{j})");
            }
        }
        assert!((m.get(1, 0) - 0.386_294_361_1).abs() < 1e-10);
        assert!((m.get(1, 1) - 0.462_098_120_4).abs() < 1e-10);
    }

    #[test]
    fn domain_errors_carry_the_entry() {
        let env = RwreSpec::uniform_split_example(0.5).unwrap().induced_env();
        match env.moment_matrix(-0.9) {
            Err(Error::AtEntry { row: 1, col: 0, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn construction_errors() {
        assert!(EnvSpec::new(vec![vec![DistSpec::PointMass { value: 1.0 }]]).is_err());
        assert!(EnvSpec::new(vec![vec![DistSpec::PointMass { value: 1.0 }; 2], vec![DistSpec::PointMass { value: 1.0 }]]).is_err());
        let bad = EnvSpec::new(vec![
            vec![DistSpec::PointMass { value: 1.0 }, DistSpec::PointMass { value: -1.0 }],
            vec![DistSpec::PointMass { value: 1.0 }; 2],
        ]);
        assert!(matches!(bad, Err(Error::AtEntry { row: 0, col: 1, .. })));
    }

    #[test]
    fn point_mass_rows_are_exact() {
        let env = EnvSpec::uniform(3, DistSpec::PointMass { value: 0.25 }).unwrap();
        let mut out = [0.0; 3];
        env.sample_row(2, &mut trial_rng(1, 1), &mut out).unwrap();
        assert_eq!(out, [0.25; 3]);
        assert!(matches!(env.sample_row(3, &mut trial_rng(1, 1), &mut out), Err(Error::InvalidColor { .. })));
    }

    #[test]
    fn uniform_split_first_colour_rows() {
        let env = RwreSpec::uniform_split_example(0.5).unwrap().induced_env();
        let mut rng = trial_rng(3, 0);
        let mut out = [0.0; 2];
        for _ in 0..100 {
            env.sample_row(0, &mut rng, &mut out).unwrap();
            assert_eq!(out, [0.5, 0.5]);
        }
    }

    #[test]
    fn log_normal_row_means() {
        let env = EnvSpec::uniform(2, DistSpec::LogNormal { mu: 0.0, sigma: 1.0 }).unwrap();
        let mut rng = trial_rng(9, 0);
        let mut out = [0.0; 2];
        let mut cols = [Vec::new(), Vec::new()];
        for _ in 0..1_000_000 {
            env.sample_row(1, &mut rng, &mut out).unwrap();
            cols[0].push(out[0]);
            cols[1].push(out[1]);
        }
        for c in &cols {
            let s = crate::stats::Summary::of(c);
            assert!((s.mean - 0.5f64.exp()).abs() < 4.0 * s.std_err);
        }
    }

    #[test]
    fn regularity_passes_on_catalogue() {
        let env = RwreSpec::uniform_split_example(0.3).unwrap().induced_env();
        assert!(env.check_regularity().all_pass());
        let env = EnvSpec::uniform(2, DistSpec::LogNormal { mu: 0.0, sigma: 2.0 }).unwrap();
        assert!(env.check_regularity().all_pass());
        let env = EnvSpec::uniform(2, DistSpec::ExpNegShiftedExp { shift: 0.0, rate: 0.5 }).unwrap();
        assert!(env.check_regularity().all_pass());
    }
}
