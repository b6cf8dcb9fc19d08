//! Monte Carlo on randomly coloured labelled trees.
//!
//! Trees are grown one level at a time. Below every parent the `b` children
//! receive a uniformly random permutation of the colours, then the parent's
//! label row is drawn and child `k` takes the label indexed by its colour.
//! Path products are carried as logarithms, `log ζ[v]`, so deep levels do
//! not underflow.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::env::EnvSpec;
use crate::math::{exp, ln, sqrt};
use crate::rng::{trial_rng, TrialRng};
use crate::spectral::{self, SpectralOptions};
use crate::stats::{median, Summary};
use crate::{Error, Result};

pub const DEFAULT_VERTEX_BUDGET: usize = 10_000_000;

/// Number of vertices in levels `0..=depth` of the `b`-ary tree.
pub fn tree_size(b: usize, depth: usize) -> u128 {
    let mut total: u128 = 0;
    let mut width: u128 = 1;
    for _ in 0..=depth {
        total = total.saturating_add(width);
        width = width.saturating_mul(b as u128);
    }
    total
}

pub(crate) fn check_budget(b: usize, depth: usize, budget: usize) -> Result<()> {
    let needed = tree_size(b, depth);
    if needed > budget as u128 {
        Err(Error::Budget { needed, budget })
    } else {
        Ok(())
    }
}

/// Grows a randomly coloured tree to `depth`, accumulating per-edge values
/// additively from 0 at the root. `draw(parent_color, rng, row)` fills the
/// edge values below a parent, indexed by child colour. `visit` sees each
/// level as parallel slices of colours and accumulated values; the parent of
/// vertex `k` is vertex `k / b` of the previous level.
pub(crate) fn grow<D, V>(b: usize, root_color: usize, depth: usize, rng: &mut TrialRng, mut draw: D, mut visit: V)
where
    D: FnMut(usize, &mut TrialRng, &mut [f64]),
    V: FnMut(usize, &[u32], &[f64]),
{
    let mut colors = vec![root_color as u32];
    let mut values = vec![0.0];
    let mut next_colors = Vec::new();
    let mut next_values = Vec::new();
    let mut perm: Vec<u32> = (0..b as u32).collect();
    let mut row = vec![0.0; b];
    visit(0, &colors, &values);
    for level in 1..=depth {
        next_colors.clear();
        next_values.clear();
        for (&c, &v) in colors.iter().zip(&values) {
            perm.shuffle(rng);
            draw(c as usize, rng, &mut row);
            for &child in &perm {
                next_colors.push(child);
                next_values.push(v + row[child as usize]);
            }
        }
        core::mem::swap(&mut colors, &mut next_colors);
        core::mem::swap(&mut values, &mut next_values);
        visit(level, &colors, &values);
    }
}

/// What to aggregate while growing a tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeConfig {
    /// Exponent for `Σ ζ^s`.
    pub s: f64,
    /// `log x` for the exceedance count `#{ζ > x}`.
    pub log_x: f64,
    /// Keep every level instead of only the aggregates.
    pub materialize: bool,
    pub budget: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig { s: 1.0, log_x: 0.0, materialize: false, budget: DEFAULT_VERTEX_BUDGET }
    }
}

/// One level of a materialised tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub colors: Vec<u32>,
    pub log_zeta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeTrial {
    pub depth: usize,
    pub seed: u64,
    pub trial: u64,
    pub root_color: usize,
    pub s: f64,
    pub log_x: f64,
    pub sum_zeta: Vec<f64>,
    pub sum_zeta_s: Vec<f64>,
    pub count_exceed: Vec<u64>,
    pub levels: Option<Vec<Level>>,
}

pub fn sample_tree(env: &EnvSpec, depth: usize, seed: u64, trial: u64, cfg: &TreeConfig) -> Result<TreeTrial> {
    let b = env.b();
    check_budget(b, depth, cfg.budget)?;
    let mut out = TreeTrial {
        depth,
        seed,
        trial,
        root_color: env.root_color(),
        s: cfg.s,
        log_x: cfg.log_x,
        sum_zeta: Vec::with_capacity(depth + 1),
        sum_zeta_s: Vec::with_capacity(depth + 1),
        count_exceed: Vec::with_capacity(depth + 1),
        levels: cfg.materialize.then(Vec::new),
    };
    let mut rng = trial_rng(seed, trial);
    let s = cfg.s;
    grow(
        b,
        env.root_color(),
        depth,
        &mut rng,
        |c, rng, row| env.sample_row_log(c, rng, row).expect("colours come from 0..b"),
        |_, colors, logs| {
            let mut sum = 0.0;
            let mut sum_s = 0.0;
            let mut count = 0;
            for &l in logs {
                sum += exp(l);
                sum_s += if s == 1.0 { exp(l) } else { exp(s * l) };
                count += (l > cfg.log_x) as u64;
            }
            out.sum_zeta.push(sum);
            out.sum_zeta_s.push(sum_s);
            out.count_exceed.push(count);
            if let Some(levels) = out.levels.as_mut() {
                levels.push(Level { colors: colors.to_vec(), log_zeta: logs.to_vec() });
            }
        },
    );
    Ok(out)
}

/// `e_αᵀ m(s)ⁿ e`, the expected value of `Σ_{v∈V_n} ζ[v]^s` when the root has
/// colour `α`.
pub fn moment_oracle(env: &EnvSpec, s: f64, n: usize, root_color: usize) -> Result<f64> {
    if root_color >= env.b() {
        return Err(Error::InvalidColor { color: root_color, b: env.b() });
    }
    if n == 0 {
        return Ok(1.0);
    }
    let m = env.moment_matrix(s)?.values;
    let mut v = vec![1.0; env.b()];
    let mut next = vec![0.0; env.b()];
    for _ in 0..n {
        m.mul_vec_into(&v, &mut next);
        core::mem::swap(&mut v, &mut next);
    }
    Ok(v[root_color])
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LevelRow {
    pub level: usize,
    pub empirical_mean: f64,
    pub variance: f64,
    pub std_err: f64,
    pub oracle: f64,
    pub n_trials: usize,
}

impl LevelRow {
    /// `|mean − oracle|` in standard errors; exact agreement gives 0.
    pub fn z_score(&self) -> f64 {
        let d = (self.empirical_mean - self.oracle).abs();
        if d == 0.0 {
            0.0
        } else if self.std_err == 0.0 {
            // Rounding noise of a deterministic level.
            if d <= 1e-12 * self.oracle.abs() {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            d / self.std_err
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LevelStats {
    pub s: f64,
    pub root_color: usize,
    pub rows: Vec<LevelRow>,
}

impl LevelStats {
    /// Aggregates `sum_zeta_s` across trials that share `s`, depth and root colour.
    pub fn from_trials(env: &EnvSpec, trials: &[TreeTrial]) -> Result<Self> {
        if trials.len() < 2 {
            return Err(Error::InvalidEnvironment("standard errors need at least 2 trials".into()));
        }
        let first = &trials[0];
        let mut rows = Vec::with_capacity(first.depth + 1);
        for level in 0..=first.depth {
            let sum = Summary::of_iter(trials.iter().map(|t| t.sum_zeta_s[level]));
            rows.push(LevelRow {
                level,
                empirical_mean: sum.mean,
                variance: sum.variance,
                std_err: sum.std_err,
                oracle: moment_oracle(env, first.s, level, first.root_color)?,
                n_trials: trials.len(),
            });
        }
        Ok(LevelStats { s: first.s, root_color: first.root_color, rows })
    }
}

pub fn estimate_level_sums(env: &EnvSpec, s: f64, depth: usize, trials: usize, seed: u64) -> Result<LevelStats> {
    env.moment_matrix(s)?;
    let cfg = TreeConfig { s, ..TreeConfig::default() };
    let runs = (0..trials as u64).map(|t| sample_tree(env, depth, seed, t, &cfg)).collect::<Result<Vec<_>>>()?;
    LevelStats::from_trials(env, &runs)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct YEstimate {
    /// `partial_sums[t][n] = Σ_{k≤n} sum_zeta[k]` for trial `t`.
    pub partial_sums: Vec<Vec<f64>>,
    /// Median over trials of `sum_zeta[n]`.
    pub level_medians: Vec<f64>,
    /// `level_medians[n] / level_medians[n − 1]`, starting at `n = 1`.
    pub growth_ratios: Vec<f64>,
}

impl YEstimate {
    pub fn from_trials(trials: &[TreeTrial]) -> Self {
        let depth = trials.first().map_or(0, |t| t.depth);
        let partial_sums = trials
            .iter()
            .map(|t| {
                t.sum_zeta
                    .iter()
                    .scan(0.0, |acc, x| {
                        *acc += x;
                        Some(*acc)
                    })
                    .collect()
            })
            .collect();
        let level_medians: Vec<f64> = (0..=depth)
            .map(|n| {
                let xs: Vec<f64> = trials.iter().map(|t| t.sum_zeta[n]).collect();
                median(&xs)
            })
            .collect();
        let growth_ratios = level_medians.windows(2).map(|w| w[1] / w[0]).collect();
        YEstimate { partial_sums, level_medians, growth_ratios }
    }

    /// Median of the growth ratios over levels `lo..=hi`.
    pub fn median_ratio(&self, lo: usize, hi: usize) -> f64 {
        median(&self.growth_ratios[lo - 1..hi])
    }
}

pub fn estimate_y(env: &EnvSpec, depth: usize, trials: usize, seed: u64) -> Result<YEstimate> {
    let cfg = TreeConfig::default();
    let runs = (0..trials as u64).map(|t| sample_tree(env, depth, seed, t, &cfg)).collect::<Result<Vec<_>>>()?;
    Ok(YEstimate::from_trials(&runs))
}

/// Per-trial counts `#{v ∈ V_n : ζ[v] > x}` for `n = 0..=depth`.
pub fn count_exceedances(env: &EnvSpec, x: f64, depth: usize, trials: usize, seed: u64) -> Result<Vec<Vec<u64>>> {
    if !(x > 0.0) {
        return Err(Error::InvalidEnvironment(alloc::format!("threshold x must be positive, got {x}")));
    }
    count_exceedances_log(env, ln(x), depth, trials, seed)
}


/// As [`count_exceedances`] with the threshold given as `log x`.
pub fn count_exceedances_log(env: &EnvSpec, log_x: f64, depth: usize, trials: usize, seed: u64) -> Result<Vec<Vec<u64>>> {
    let cfg = TreeConfig { log_x, ..TreeConfig::default() };
    (0..trials as u64).map(|t| Ok(sample_tree(env, depth, seed, t, &cfg)?.count_exceed)).collect()
}

/// Levels without exceedances at the end of a count sequence that mean the
/// count has stopped growing.
pub const STABILIZATION_WINDOW: usize = 4;

/// No exceedance in the last `window` levels.
pub fn is_stabilized(counts: &[u64], window: usize) -> bool {
    counts.iter().rev().take(window).all(|&c| c == 0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PathTail {
    pub n: usize,
    pub log_a: f64,
    pub hits: u64,
    pub trials: u64,
    pub empirical: f64,
    pub std_err: f64,
    /// `exp(−n Λ*(log a))`.
    pub predicted: f64,
    pub rate: f64,
}

impl PathTail {
    /// `−(1/n) log` of the empirical tail; infinite when nothing was hit.
    pub fn empirical_rate(&self) -> f64 {
        -ln(self.empirical) / self.n as f64
    }
}

/// Tail of `S_n / n` for a single root-to-level-`n` path whose colours are
/// i.i.d. uniform.
pub fn path_tail_probability(env: &EnvSpec, n: usize, log_a: f64, trials: u64, seed: u64) -> Result<PathTail> {
    if n == 0 || trials == 0 {
        return Err(Error::InvalidEnvironment("path tail needs n ≥ 1 and at least one trial".into()));
    }
    let rate = spectral::rate_function(env, log_a, &SpectralOptions::default())?;
    let b = env.b();
    let mut scratch = vec![0.0; b];
    let threshold = n as f64 * log_a;
    let mut hits = 0u64;
    for t in 0..trials {
        let mut rng = trial_rng(seed, t);
        let mut parent = rng.random_range(0..b);
        let mut sum = 0.0;
        for _ in 0..n {
            let child = rng.random_range(0..b);
            sum += env.sample_edge_log(parent, child, &mut rng, &mut scratch);
            parent = child;
        }
        hits += (sum >= threshold) as u64;
    }
    let p = hits as f64 / trials as f64;
    let predicted = if rate.unbounded { 0.0 } else { exp(-(n as f64) * rate.value) };
    Ok(PathTail {
        n,
        log_a,
        hits,
        trials,
        empirical: p,
        std_err: sqrt(p * (1.0 - p) / trials as f64),
        predicted,
        rate: rate.value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Survival {
    pub survived: u64,
    pub trials: u64,
    pub frequency: f64,
    /// Some generation had more than `cap` members and was thinned, so the
    /// frequency is a lower bound.
    pub capped: bool,
}

/// Members kept per generation of the embedded process.
pub const DEFAULT_SURVIVAL_CAP: usize = 1000;

/// Embedded process on blocks of `n` levels: `M_j` holds the level-`jn`
/// descendants `v` of members `u ∈ M_{j−1}` with `ζ[u, v] ≥ yⁿ`. Reports how
/// often `M_generations` is non-empty.
pub fn embedded_survival(env: &EnvSpec, y: f64, n: usize, generations: usize, trials: u64, seed: u64, cap: usize) -> Result<Survival> {
    if !(y > 0.0) || n == 0 || cap == 0 {
        return Err(Error::InvalidEnvironment("embedded survival needs y > 0, n ≥ 1 and a positive cap".into()));
    }
    let b = env.b();
    let block = tree_size(b, n);
    let needed = block.saturating_mul(cap as u128);
    if needed > DEFAULT_VERTEX_BUDGET as u128 {
        return Err(Error::Budget { needed, budget: DEFAULT_VERTEX_BUDGET });
    }
    let threshold = n as f64 * ln(y);
    let mut survived = 0;
    let mut capped = false;
    for t in 0..trials {
        let mut rng = trial_rng(seed, t);
        let mut members: Vec<u32> = vec![env.root_color() as u32];
        for _ in 0..generations {
            let mut next = Vec::new();
            for &c in &members {
                grow(
                    b,
                    c as usize,
                    n,
                    &mut rng,
                    |c, rng, row| env.sample_row_log(c, rng, row).expect("colours come from 0..b"),
                    |level, colors, logs| {
                        if level == n {
                            next.extend(colors.iter().zip(logs).filter(|(_, &l)| l >= threshold).map(|(&c, _)| c));
                        }
                    },
                );
            }
            if next.len() > cap {
                capped = true;
                next.truncate(cap);
            }
            members = next;
            if members.is_empty() {
                break;
            }
        }
        survived += !members.is_empty() as u64;
    }
    Ok(Survival { survived, trials, frequency: survived as f64 / trials as f64, capped })
}

/// Threshold base `y ∈ (0, 1]` attaining `max_y inf_{s≥0} ρ(s) y^{1−s}`:
/// with `s*` the minimiser of `ρ` on `[0, 1]`, `log y` is the slope of
/// `log ρ` at `s*`, capped at 0.
pub fn survival_threshold(env: &EnvSpec, opts: &SpectralOptions) -> Result<f64> {
    let s_star = spectral::lambda1(env, opts)?.arg;
    let slope = spectral::cumulant_derivative(env, s_star, opts)?;
    Ok(exp(slope.min(0.0)))
}
