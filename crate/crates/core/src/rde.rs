//! The affine fixed-point equation `Y =ᴰ e + Ξ Y`.
//!
//! Componentwise, `Y_i =ᴰ 1 + Σ_j ξ_ij Y_j` with the row `(ξ_ij)_j`
//! independent of the `Y_j`, which are independent copies. The iteration is
//! population dynamics: every component keeps a pool of samples and each
//! sweep rebuilds all pools from the previous ones.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::classifier::{regime_of, ClassifyOptions, RdeVerdict};
use crate::env::EnvSpec;
use crate::linalg::SquareMatrix;
use crate::perron::perron;
use crate::rng::trial_rng;
use crate::spectral;
use crate::stats::{ks_statistic, median};
use crate::{Error, Result};

/// Pool median above which the iteration is declared divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e15;

/// Whether the equation has a solution, from `λ₁`.
pub fn existence(env: &EnvSpec, opts: &ClassifyOptions) -> Result<RdeVerdict> {
    let lambda1 = spectral::lambda1(env, &opts.spectral)?;
    Ok(regime_of(lambda1.value, opts.eps_critical, env.check_regularity().all_pass()).into())
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IterationStats {
    pub iteration: usize,
    pub means: Vec<f64>,
    pub medians: Vec<f64>,
    /// Kolmogorov–Smirnov distance of each pool to its previous state.
    pub ks_to_previous: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RdeRun {
    /// Final pools, one per component, sorted ascending.
    pub pools: Vec<Vec<f64>>,
    pub history: Vec<IterationStats>,
}

impl RdeRun {
    pub fn final_means(&self) -> &[f64] {
        &self.history.last().expect("at least one iteration").means
    }
}

/// Runs `iterations` sweeps of population dynamics from pools that are
/// identically 1. Each sweep of component `i` uses its own stream, so the
/// result is independent of how components are scheduled.
pub fn iterate(env: &EnvSpec, pool_size: usize, iterations: usize, seed: u64) -> Result<RdeRun> {
    if !env.is_independent() {
        return Err(Error::Unsupported("population dynamics needs an independent-sibling environment"));
    }
    if pool_size == 0 || iterations == 0 {
        return Err(Error::InvalidEnvironment("pool size and iteration count must be positive".into()));
    }
    let b = env.b();
    let mut pools = vec![vec![1.0; pool_size]; b];
    let mut history = Vec::with_capacity(iterations);
    let mut row = vec![0.0; b];
    for it in 1..=iterations {
        let mut next = Vec::with_capacity(b);
        for i in 0..b {
            let mut rng = trial_rng(seed, (it * b + i) as u64);
            let mut pool = Vec::with_capacity(pool_size);
            for _ in 0..pool_size {
                env.sample_row(i, &mut rng, &mut row)?;
                let mut y = 1.0;
                for (j, &xi) in row.iter().enumerate() {
                    y += xi * pools[j][rng.random_range(0..pool_size)];
                }
                pool.push(y);
            }
            pool.sort_by(f64::total_cmp);
            next.push(pool);
        }
        let mut stats = IterationStats { iteration: it, means: Vec::with_capacity(b), medians: Vec::with_capacity(b), ks_to_previous: Vec::with_capacity(b) };
        for (i, (new, old)) in next.iter().zip(&pools).enumerate() {
            let med = median(new);
            if !(med <= DIVERGENCE_THRESHOLD) {
                return Err(Error::Diverged { iteration: it, component: i, threshold: DIVERGENCE_THRESHOLD });
            }
            stats.means.push(new.iter().sum::<f64>() / pool_size as f64);
            stats.medians.push(med);
            stats.ks_to_previous.push(ks_statistic(new, old));
        }
        history.push(stats);
        pools = next;
    }
    Ok(RdeRun { pools, history })
}

/// `E Y = (I − m(1))⁻¹ e`, which is finite exactly when `ρ(1) < 1`.
pub fn mean_system(env: &EnvSpec) -> Result<Vec<f64>> {
    let m = env.moment_matrix(1.0)?.values;
    let rho1 = perron(&m)?.rho;
    if rho1 >= 1.0 {
        return Err(Error::NoFiniteMean { rho1 });
    }
    mean_from_matrix(&m)
}

fn mean_from_matrix(m: &SquareMatrix) -> Result<Vec<f64>> {
    let n = m.dim();
    let a = SquareMatrix::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 } - m.get(i, j));
    a.solve(&vec![1.0; n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::DistSpec;
    use crate::rwre::RwreSpec;
    use crate::stats::Summary;
    use crate::tree::{sample_tree, TreeConfig};

    fn pm(c: f64) -> EnvSpec {
        EnvSpec::uniform(2, DistSpec::PointMass { value: c }).unwrap()
    }

    fn lognormal() -> EnvSpec {
        // ρ(1) = 2 e^{-1.5 + 0.125} ≈ 0.506.
        EnvSpec::uniform(2, DistSpec::LogNormal { mu: -1.5, sigma: 0.5 }).unwrap()
    }

    #[test]
    fn existence_verdicts() {
        let o = ClassifyOptions::default();
        assert_eq!(existence(&pm(0.3), &o).unwrap(), RdeVerdict::SolutionExists);
        assert_eq!(existence(&pm(0.8), &o).unwrap(), RdeVerdict::NoSolution);
        let crit = RwreSpec::uniform_split_example(0.417).unwrap().induced_env();
        let o = ClassifyOptions { eps_critical: 1e-3, ..o };
        assert_eq!(existence(&crit, &o).unwrap(), RdeVerdict::Critical);
    }

    #[test]
    fn deterministic_fixed_point() {
        let run = iterate(&pm(0.3), 50, 200, 1).unwrap();
        for pool in &run.pools {
            assert!(pool.iter().all(|y| (y - 2.5).abs() < 1e-9));
        }
    }

    #[test]
    fn divergence_is_detected() {
        match iterate(&pm(0.8), 20, 200, 1) {
            Err(Error::Diverged { iteration, .. }) => assert!(iteration <= 100, "{iteration}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn samples_are_at_least_one() {
        let run = iterate(&lognormal(), 1000, 10, 4).unwrap();
        assert!(run.pools.iter().flatten().all(|&y| y >= 1.0));
    }

    #[test]
    fn mean_system_examples() {
        let x = mean_system(&pm(0.3)).unwrap();
        assert!(x.iter().all(|v| (v - 2.5).abs() < 1e-12));
        let m = SquareMatrix::from_rows(&[vec![0.2, 0.1], vec![0.1, 0.2]]);
        let x = mean_from_matrix(&m).unwrap();
        assert!(x.iter().all(|v| (v - 0.9 / 0.63).abs() < 1e-12));
        assert!(matches!(mean_system(&pm(0.6)), Err(Error::NoFiniteMean { rho1 }) if (rho1 - 1.2).abs() < 1e-12));
    }

    #[test]
    fn pool_means_match_the_mean_system() {
        let env = lognormal();
        let want = mean_system(&env).unwrap();
        let run = iterate(&env, 100_000, 40, 6).unwrap();
        for (i, pool) in run.pools.iter().enumerate() {
            let s = Summary::of(pool);
            assert!((s.mean - want[i]).abs() <= 3.0 * s.std_err, "{} vs {}", s.mean, want[i]);
        }
        assert!(run.history.last().unwrap().ks_to_previous.iter().all(|&d| d < 0.02));
    }

    #[test]
    fn pools_match_truncated_tree_sums() {
        let env = lognormal();
        let run = iterate(&env, 10_000, 30, 8).unwrap();
        let mut sums: Vec<f64> = (0..10_000)
            .map(|t| sample_tree(&env, 12, 9, t, &TreeConfig::default()).unwrap().sum_zeta.iter().sum())
            .collect();
        sums.sort_by(f64::total_cmp);
        assert!(ks_statistic(&run.pools[0], &sums) < 0.05);
    }

    #[test]
    fn joint_siblings_are_rejected() {
        let env = RwreSpec::uniform_split_example(0.6).unwrap().induced_env();
        assert!(matches!(iterate(&env, 10, 1, 0), Err(Error::Unsupported(_))));
    }
}
