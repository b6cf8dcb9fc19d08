//! Multi-type branching random walk on the line, and first-passage
//! percolation with signed passage times.
//!
//! Every particle of type `i` at `x` is replaced in the next generation by
//! `b` particles, one of each type `j`, at `x + η_ij`. The labels of the
//! coloured tree are `ξ_ij = e^{−η_ij}`, so the minimal position `μ_t` is
//! `−log max_{v∈V_t} ζ[v]`.
//!
//! Displacements are drawn from a stream keyed by the particle's path, so
//! pruning the frontier never changes the positions of the particles that
//! are kept.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::dist::{sample_exp, DistSpec, PROBABILITY_SUM_TOL};
use crate::env::{EnvSpec, SiblingMode};
use crate::math::{abs, exp, sqrt};
use crate::rng::{child_key, stream_id, trial_rng, vertex_rng};
use crate::spectral::{self, SpectralOptions, Speed};
use crate::tree::{check_budget, count_exceedances_log, grow, DEFAULT_VERTEX_BUDGET};
use crate::{Error, Result};

/// Law of a displacement `η`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum StepLaw {
    Normal { mu: f64, sigma: f64 },
    PointMass { value: f64 },
    /// `shift + Exp(rate)`.
    ShiftedExp { shift: f64, rate: f64 },
    Discrete { atoms: Vec<(f64, f64)> },
}

impl StepLaw {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::InvalidDistribution(msg));
        match self {
            StepLaw::Normal { mu, sigma } => {
                if !mu.is_finite() || !(sigma.is_finite() && *sigma > 0.0) {
                    return bad(format!("normal needs finite mu and sigma > 0, got ({mu}, {sigma})"));
                }
            }
            StepLaw::PointMass { value } => {
                if !value.is_finite() {
                    return bad(format!("point_mass value must be finite, got {value}"));
                }
            }
            StepLaw::ShiftedExp { shift, rate } => {
                if !shift.is_finite() || !(rate.is_finite() && *rate > 0.0) {
                    return bad(format!("shifted_exp needs finite shift and rate > 0, got ({shift}, {rate})"));
                }
            }
            StepLaw::Discrete { atoms } => {
                if atoms.is_empty() || atoms.iter().any(|&(x, p)| !x.is_finite() || !(p >= 0.0)) {
                    return bad("discrete needs finite atoms with non-negative weights".into());
                }
                let total: f64 = atoms.iter().map(|a| a.1).sum();
                if abs(total - 1.0) > PROBABILITY_SUM_TOL {
                    return bad(format!("discrete weights sum to {total}, not 1"));
                }
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            StepLaw::Normal { mu, sigma } => {
                let z: f64 = rng.sample(StandardNormal);
                mu + sigma * z
            }
            StepLaw::PointMass { value } => *value,
            StepLaw::ShiftedExp { shift, rate } => shift + sample_exp(rng, *rate),
            StepLaw::Discrete { atoms } => {
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
        }
    }

    /// Law of `e^{−η}`. For the continuous families `log` of a label drawn
    /// from it is exactly `−η` for the same random draws.
    pub fn label_law(&self) -> DistSpec {
        match self {
            StepLaw::Normal { mu, sigma } => DistSpec::ExpNegGaussian { mu: *mu, sigma: *sigma },
            StepLaw::PointMass { value } => DistSpec::PointMass { value: exp(-value) },
            StepLaw::ShiftedExp { shift, rate } => DistSpec::ExpNegShiftedExp { shift: *shift, rate: *rate },
            StepLaw::Discrete { atoms } => DistSpec::Discrete { atoms: atoms.iter().map(|&(x, p)| (exp(-x), p)).collect() },
        }
    }

    pub fn is_continuous(&self) -> bool {
        matches!(self, StepLaw::Normal { .. } | StepLaw::ShiftedExp { .. })
    }

    /// Smallest and largest possible values.
    pub fn support(&self) -> (f64, f64) {
        match self {
            StepLaw::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            StepLaw::PointMass { value } => (*value, *value),
            StepLaw::ShiftedExp { shift, .. } => (*shift, f64::INFINITY),
            StepLaw::Discrete { atoms } => atoms
                .iter()
                .filter(|a| a.1 > 0.0)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| (lo.min(a.0), hi.max(a.0))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BrwSpec {
    steps: Vec<Vec<StepLaw>>,
    start_type: usize,
}

impl BrwSpec {
    pub fn new(steps: Vec<Vec<StepLaw>>, start_type: usize) -> Result<Self> {
        let b = steps.len();
        if b < 2 {
            return Err(Error::InvalidEnvironment(format!("b must be at least 2, got {b}")));
        }
        for (i, row) in steps.iter().enumerate() {
            if row.len() != b {
                return Err(Error::InvalidEnvironment(format!("step row {} has {} entries, expected {b}", i + 1, row.len())));
            }
            for (j, law) in row.iter().enumerate() {
                law.validate().map_err(|e| e.at(i, j))?;
            }
        }
        if start_type >= b {
            return Err(Error::InvalidColor { color: start_type, b });
        }
        Ok(BrwSpec { steps, start_type })
    }

    /// Every `η_ij` has the same law.
    pub fn uniform(b: usize, law: StepLaw) -> Result<Self> {
        Self::new(vec![vec![law; b]; b], 0)
    }

    pub fn b(&self) -> usize {
        self.steps.len()
    }

    pub fn steps(&self) -> &[Vec<StepLaw>] {
        &self.steps
    }

    pub fn start_type(&self) -> usize {
        self.start_type
    }

    pub fn is_continuous(&self) -> bool {
        self.steps.iter().flatten().all(StepLaw::is_continuous)
    }

    /// Labels `ξ_ij = e^{−η_ij}` with independent siblings, rooted at the start type.
    pub fn induced_env(&self) -> EnvSpec {
        let entries = self.steps.iter().map(|row| row.iter().map(StepLaw::label_law).collect()).collect();
        EnvSpec::with_mode(entries, SiblingMode::Independent, self.start_type).expect("valid step laws give valid labels")
    }

    fn step_span(&self) -> f64 {
        let (lo, hi) = self.steps.iter().flatten().map(StepLaw::support).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (a, b)| (lo.min(a), hi.max(b)));
        hi - lo
    }
}

/// What to do when the pruned frontier is still larger than the budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Overflow {
    #[default]
    Error,
    /// Keep the lowest `budget` particles.
    KeepLowest,
}

pub const DEFAULT_WINDOW: f64 = 30.0;
pub const DEFAULT_FRONTIER_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BrwConfig {
    /// Particles above `μ_t + window` are discarded; `+∞` disables pruning.
    pub window: f64,
    pub budget: usize,
    pub overflow: Overflow,
    pub keep_particles: bool,
}

impl Default for BrwConfig {
    fn default() -> Self {
        BrwConfig { window: DEFAULT_WINDOW, budget: DEFAULT_FRONTIER_BUDGET, overflow: Overflow::Error, keep_particles: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrontierSnapshot {
    pub generation: usize,
    pub mu: f64,
    pub frontier_size: usize,
    /// Particles were discarded in this generation.
    pub pruned: bool,
    /// No discarded particle so far could have had a descendant at the
    /// minimum by `t_max`, so `mu` is exact.
    pub sound: bool,
    /// `(type, position)` of every particle kept, when requested.
    pub particles: Option<Vec<(u32, f64)>>,
}

#[derive(Debug, Clone, Copy)]
struct Particle {
    pos: f64,
    key: u64,
    ty: u32,
}

/// Runs trial `trial` to generation `t_max`, returning a snapshot per
/// generation starting with generation 0.
pub fn simulate_brw(spec: &BrwSpec, t_max: usize, seed: u64, trial: u64, cfg: &BrwConfig) -> Result<Vec<FrontierSnapshot>> {
    if !(cfg.window > 0.0) || cfg.budget == 0 {
        return Err(Error::InvalidEnvironment("window and budget must be positive".into()));
    }
    let span = spec.step_span();
    let mut frontier = vec![Particle { pos: 0.0, key: stream_id(seed, trial), ty: spec.start_type as u32 }];
    let mut children: Vec<Particle> = Vec::new();
    let mut sound = true;
    let snapshot = |generation: usize, mu: f64, frontier: &[Particle], pruned: bool, sound: bool| FrontierSnapshot {
        generation,
        mu,
        frontier_size: frontier.len(),
        pruned,
        sound,
        particles: cfg.keep_particles.then(|| frontier.iter().map(|p| (p.ty, p.pos)).collect()),
    };
    let mut out = Vec::with_capacity(t_max + 1);
    out.push(snapshot(0, 0.0, &frontier, false, true));
    for t in 1..=t_max {
        children.clear();
        let mut best = f64::INFINITY;
        let mut lowest_dropped = f64::INFINITY;
        for p in &frontier {
            let mut rng = vertex_rng(p.key);
            for (j, law) in spec.steps[p.ty as usize].iter().enumerate() {
                let pos = p.pos + law.sample(&mut rng);
                if pos < best {
                    best = pos;
                }
                if pos - best > cfg.window {
                    lowest_dropped = lowest_dropped.min(pos);
                } else {
                    children.push(Particle { pos, key: child_key(p.key, j), ty: j as u32 });
                }
            }
        }
        let mu = best;
        children.retain(|c| {
            let keep = c.pos - mu <= cfg.window;
            if !keep {
                lowest_dropped = lowest_dropped.min(c.pos);
            }
            keep
        });
        if children.len() > cfg.budget {
            match cfg.overflow {
                Overflow::Error => {
                    return Err(Error::FrontierOverflow { generation: t, size: children.len(), budget: cfg.budget });
                }
                Overflow::KeepLowest => {
                    children.select_nth_unstable_by(cfg.budget, |a, c| a.pos.total_cmp(&c.pos));
                    lowest_dropped = lowest_dropped.min(children[cfg.budget].pos);
                    children.truncate(cfg.budget);
                }
            }
        }
        let pruned = lowest_dropped < f64::INFINITY;
        // Descendants of a dropped particle stay above those of the minimum
        // iff the gap exceeds the widest possible spread of `t_max − t` steps.
        if pruned && !(lowest_dropped - mu >= span * (t_max - t) as f64) {
            sound = false;
        }
        core::mem::swap(&mut frontier, &mut children);
        out.push(snapshot(t, mu, &frontier, pruned, sound));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpeedEstimate {
    pub t_max: usize,
    /// `μ_t / t` at `t = t_max`, per trial.
    pub per_trial: Vec<f64>,
    pub mean: f64,
    pub std_err: f64,
    /// 95% normal confidence interval for the mean.
    pub ci: (f64, f64),
    pub x0: Speed,
    /// Every trial kept its soundness flag.
    pub all_sound: bool,
}

pub fn speed_estimate(spec: &BrwSpec, t_max: usize, trials: u64, seed: u64, cfg: &BrwConfig) -> Result<SpeedEstimate> {
    let x0 = spectral::speed_x0(&spec.induced_env(), &SpectralOptions::default())?;
    let runs = (0..trials)
        .map(|t| {
            let snaps = simulate_brw(spec, t_max, seed, t, cfg)?;
            let last = snaps.last().expect("generation 0 is always present");
            Ok((last.mu / t_max as f64, last.sound))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpeedEstimate::from_trials(t_max, runs, x0))
}

impl SpeedEstimate {
    pub fn from_trials(t_max: usize, runs: Vec<(f64, bool)>, x0: Speed) -> Self {
        let per_trial: Vec<f64> = runs.iter().map(|r| r.0).collect();
        let s = crate::stats::Summary::of(&per_trial);
        SpeedEstimate {
            t_max,
            mean: s.mean,
            std_err: s.std_err,
            ci: (s.mean - 1.96 * s.std_err, s.mean + 1.96 * s.std_err),
            x0,
            all_sound: runs.iter().all(|r| r.1),
            per_trial,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Positivity {
    pub positive: u64,
    pub trials: u64,
    pub frequency: f64,
}

/// Generations at the end of a run that must all have `μ_t ≥ 0`.
pub const POSITIVITY_WINDOW: usize = 5;

/// Fraction of trials whose minimum stays non-negative over generations
/// `t_max − 5 ..= t_max`.
pub fn positivity_time(spec: &BrwSpec, t_max: usize, trials: u64, seed: u64, cfg: &BrwConfig) -> Result<Positivity> {
    let mut positive = 0;
    for t in 0..trials {
        let snaps = simulate_brw(spec, t_max, seed, t, cfg)?;
        let from = t_max.saturating_sub(POSITIVITY_WINDOW);
        positive += snaps[from..].iter().all(|s| s.mu >= 0.0) as u64;
    }
    Ok(Positivity { positive, trials, frequency: positive as f64 / trials as f64 })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FppReach {
    pub t: f64,
    /// `counts[trial][n] = |R(t) ∩ V_n|`.
    pub counts: Vec<Vec<u64>>,
    /// The counts were compared with the exceedance counts of the label
    /// tree on the same seeds (continuous step laws only).
    pub checked_against_z: bool,
}

/// Per-level sizes of `R(t) = {u : Σ_{edges to u} τ ≤ t}` on randomly
/// coloured trees with passage times `τ_ij` distributed as the step laws.
///
/// For continuous laws the result is checked against
/// `#{v ∈ V_n : ζ[v] > e^{−t}}` under `ξ = e^{−τ}` on the same seeds; the
/// two agree exactly because the accumulated `log ζ` is the negated
/// accumulated time, and ties with the threshold have probability zero.
pub fn fpp_reach(spec: &BrwSpec, t: f64, depth: usize, trials: u64, seed: u64) -> Result<FppReach> {
    let b = spec.b();
    check_budget(b, depth, DEFAULT_VERTEX_BUDGET)?;
    let mut counts = Vec::with_capacity(trials as usize);
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let mut per_level = Vec::with_capacity(depth + 1);
        grow(
            b,
            spec.start_type,
            depth,
            &mut rng,
            |c, rng, row| {
                for (r, law) in row.iter_mut().zip(&spec.steps[c]) {
                    *r = law.sample(rng);
                }
            },
            |_, _, times| per_level.push(times.iter().filter(|&&x| x <= t).count() as u64),
        );
        counts.push(per_level);
    }
    let checked = spec.is_continuous();
    if checked {
        let z = count_exceedances_log(&spec.induced_env(), -t, depth, trials as usize, seed)?;
        assert_eq!(z, counts, "reachable-set counts differ from exceedance counts on shared seeds");
    }
    Ok(FppReach { t, counts, checked_against_z: checked })
}

/// Minimum over all `b^t` particles by depth-first enumeration, using the
/// same per-particle streams as [`simulate_brw`].
pub fn enumerate_minimum(spec: &BrwSpec, t: usize, seed: u64, trial: u64) -> f64 {
    fn go(spec: &BrwSpec, pos: f64, ty: usize, key: u64, left: usize) -> f64 {
        if left == 0 {
            return pos;
        }
        let mut rng = vertex_rng(key);
        let steps: Vec<f64> = spec.steps[ty].iter().map(|l| l.sample(&mut rng)).collect();
        steps.iter().enumerate().map(|(j, s)| go(spec, pos + s, j, child_key(key, j), left - 1)).fold(f64::INFINITY, f64::min)
    }
    go(spec, 0.0, spec.start_type, stream_id(seed, trial), t)
}

/// `x₀ = μ − σ √(2 log b)` for i.i.d. `Normal(μ, σ)` steps.
pub fn gaussian_speed(b: usize, mu: f64, sigma: f64) -> f64 {
    mu - sigma * sqrt(2.0 * crate::math::ln(b as f64))
}
