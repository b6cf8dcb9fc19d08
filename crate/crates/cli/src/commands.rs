//! Command implementations. Each returns its primary output as bytes plus
//! a short summary; [`execute`] decides where they go.

use std::time::Instant;

use colortree_core::brw::{self, BrwConfig, Overflow, SpeedEstimate};
use colortree_core::classifier::{self, ClassifyOptions, Target};
use colortree_core::rde;
use colortree_core::rng::stream_id;
use colortree_core::rwre;
use colortree_core::spectral::{self, SpectralOptions};
use colortree_core::tree::{self, LevelStats, TreeConfig};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::cli::{BrwArgs, ClassifyArgs, Cli, Command, FppArgs, OverflowArg, RateArgs, RdeArgs, Simulate, SweepArgs, TargetArg, TreeArgs, WalkArgs};
use crate::config::{brw_to_value, env_to_value, rwre_to_value, ParseError};
use crate::families::{self, Family};
use crate::output::{manifest_path, sha256_hex, to_json_pretty, write_atomic, OutputDigest, RunManifest, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Domain(#[from] colortree_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for bad input, 3 for a mathematical failure, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Result of a command before it is written anywhere.
#[derive(Debug, Clone)]
pub struct Produced {
    pub primary: Vec<u8>,
    /// JSON summary; `Value::Null` when the primary output says it all.
    pub summary: Value,
    pub seed: Option<u64>,
    /// Resolved inputs, echoed into the manifest.
    pub input: Value,
}

/// Trial `f(0..n)` in parallel, results in trial order.
pub fn par_trials<T: Send>(n: u64, f: impl Fn(u64) -> colortree_core::Result<T> + Sync) -> colortree_core::Result<Vec<T>> {
    (0..n).into_par_iter().map(&f).collect()
}

fn parse_f64(s: &str, what: &str) -> std::result::Result<f64, ParseError> {
    s.trim().parse().map_err(|_| ParseError(format!("{what}: `{s}` is not a number")))
}

/// `LO:HI` → `(min, max)`.
pub fn parse_range(s: &str) -> std::result::Result<(f64, f64), ParseError> {
    let Some((lo, hi)) = s.split_once(':') else {
        return Err(ParseError(format!("--param-range: expected LO:HI, found `{s}`")));
    };
    let (lo, hi) = (parse_f64(lo, "--param-range")?, parse_f64(hi, "--param-range")?);
    if !(lo.is_finite() && hi.is_finite()) || lo == hi {
        return Err(ParseError(format!("--param-range: `{s}` is not a proper interval")));
    }
    Ok((lo.min(hi), lo.max(hi)))
}

/// `LO:HI:N` → N evenly spaced points.
pub fn parse_grid(s: &str) -> std::result::Result<Vec<f64>, ParseError> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err(ParseError(format!("--z: expected LO:HI:N, found `{s}`")));
    };
    let (lo, hi) = (parse_f64(lo, "--z")?, parse_f64(hi, "--z")?);
    let n: usize = n.trim().parse().map_err(|_| ParseError(format!("--z: `{n}` is not a point count")))?;
    if n == 0 || !(lo.is_finite() && hi.is_finite()) {
        return Err(ParseError(format!("--z: `{s}` needs finite ends and N ≥ 1")));
    }
    Ok(linspace(lo, hi, n))
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 }).collect()
}

pub fn classify(a: &ClassifyArgs) -> Result<Produced> {
    let src = families::resolve(&a.env)?;
    let env = families::load_env(&src)?;
    if !(a.eps_critical >= 0.0) {
        return Err(ParseError(format!("--eps-critical must be non-negative, found {}", a.eps_critical)).into());
    }
    let report = classifier::classify(&env, &ClassifyOptions { eps_critical: a.eps_critical, ..Default::default() })?;
    Ok(Produced {
        primary: to_json_pretty(&report).into_bytes(),
        summary: Value::Null,
        seed: None,
        input: json!({ "source": src.describe(), "env": env_to_value(&env) }),
    })
}

pub fn sweep(a: &SweepArgs) -> Result<Produced> {
    let family = Family::from_name(&a.family)
        .ok_or_else(|| ParseError(format!("--family: unknown family `{}` (expected one of {})", a.family, families::NAMES.join(", "))))?;
    let (lo, hi) = parse_range(&a.param_range)?;
    if a.points < 2 {
        return Err(ParseError("--points must be at least 2".into()).into());
    }
    let (target, column) = match a.target {
        TargetArg::Lambda1 => (Target::Lambda1, "lambda1"),
        TargetArg::Lambda => (Target::Lambda, "lambda"),
    };
    let opts = SpectralOptions::default();
    let grid = linspace(lo, hi, a.points);
    let values = grid
        .par_iter()
        .map(|&p| classifier::target_value(&family.env(p)?, target, &opts))
        .collect::<colortree_core::Result<Vec<_>>>()?;
    let mut t = Table::new(&["param", column]);
    for (p, v) in grid.iter().zip(&values) {
        t.push(vec![(*p).into(), (*v).into()]);
    }
    let root = classifier::find_critical_parameter(|p| family.env(p), (lo, hi), target, a.tol, &opts)?;
    Ok(Produced {
        primary: t.to_bytes(),
        summary: json!({ "family": family.name(), "target": column, "range": [lo, hi], "root": root }),
        seed: None,
        input: json!({ "family": family.name() }),
    })
}

pub fn rate_function(a: &RateArgs) -> Result<Produced> {
    let src = families::resolve(&a.env)?;
    let env = families::load_env(&src)?;
    let zs = parse_grid(&a.z)?;
    let opts = SpectralOptions::default();
    let points = zs.par_iter().map(|&z| spectral::rate_function(&env, z, &opts)).collect::<colortree_core::Result<Vec<_>>>()?;
    let mut t = Table::new(&["z", "rate", "s0"]);
    for p in &points {
        t.push(vec![p.z.into(), p.value.into(), p.s0.into()]);
    }
    Ok(Produced {
        primary: t.to_bytes(),
        summary: json!({ "drift": spectral::drift(&env, &opts)? }),
        seed: None,
        input: json!({ "source": src.describe(), "env": env_to_value(&env) }),
    })
}

pub fn simulate_tree(a: &TreeArgs) -> Result<Produced> {
    let src = families::resolve(&a.env)?;
    let env = families::load_env(&src)?;
    if a.trials < 2 {
        return Err(ParseError("--trials must be at least 2 for standard errors".into()).into());
    }
    let log_x = match a.x {
        Some(x) if x > 0.0 => x.ln(),
        Some(x) => return Err(ParseError(format!("--x must be positive, found {x}")).into()),
        None => f64::INFINITY,
    };
    env.moment_matrix(a.s)?;
    let cfg = TreeConfig { s: a.s, log_x, ..TreeConfig::default() };
    let trials = par_trials(a.trials, |t| tree::sample_tree(&env, a.depth, a.seed, t, &cfg))?;
    let stats = LevelStats::from_trials(&env, &trials)?;
    let header: &[&str] =
        if a.x.is_some() { &["level", "empirical_mean", "std_err", "oracle", "n_trials", "mean_exceed"] } else { &["level", "empirical_mean", "std_err", "oracle", "n_trials"] };
    let mut t = Table::new(header);
    for r in &stats.rows {
        let mut row = vec![r.level.into(), r.empirical_mean.into(), r.std_err.into(), r.oracle.into(), r.n_trials.into()];
        if a.x.is_some() {
            let mean = trials.iter().map(|t| t.count_exceed[r.level] as f64).sum::<f64>() / trials.len() as f64;
            row.push(mean.into());
        }
        t.push(row);
    }
    let max_z = stats.rows.iter().map(|r| r.z_score()).fold(0.0, f64::max);
    Ok(Produced {
        primary: t.to_bytes(),
        summary: json!({ "max_abs_z_score": max_z }),
        seed: Some(a.seed),
        input: json!({ "source": src.describe(), "env": env_to_value(&env) }),
    })
}

pub fn simulate_walk(a: &WalkArgs) -> Result<Produced> {
    let src = families::resolve(&a.rwre)?;
    let spec = families::load_rwre(&src)?;
    let stats = par_trials(a.walks, |w| rwre::simulate_walk(&spec, a.steps, stream_id(a.seed, w), a.cut_depth))?;
    let mut t = Table::new(&["walk", "steps", "root_visits", "max_depth", "final_depth", "time_beyond_cut"]);
    for (w, s) in stats.iter().enumerate() {
        t.push(vec![w.into(), s.steps.into(), s.root_visits.into(), s.max_depth.into(), s.final_depth.into(), s.beyond_cut.into()]);
    }
    let n = stats.len().max(1) as f64;
    Ok(Produced {
        primary: t.to_bytes(),
        summary: json!({
            "walks": stats.len(),
            "steps": a.steps,
            "mean_root_visits": stats.iter().map(|s| s.root_visits as f64).sum::<f64>() / n,
            "mean_max_depth": stats.iter().map(|s| s.max_depth as f64).sum::<f64>() / n,
            "mean_final_depth": stats.iter().map(|s| s.final_depth as f64).sum::<f64>() / n,
        }),
        seed: Some(a.seed),
        input: json!({ "source": src.describe(), "rwre": rwre_to_value(&spec) }),
    })
}

pub fn simulate_rde(a: &RdeArgs) -> Result<Produced> {
    let src = families::resolve(&a.env)?;
    let env = families::load_env(&src)?;
    let run = rde::iterate(&env, a.pool, a.iters, a.seed)?;
    let mut t = Table::new(&["iteration", "component", "mean", "ks_to_previous"]);
    for it in &run.history {
        for (i, (m, ks)) in it.means.iter().zip(&it.ks_to_previous).enumerate() {
            t.push(vec![it.iteration.into(), (i + 1).into(), (*m).into(), (*ks).into()]);
        }
    }
    let mean_system = rde::mean_system(&env).ok();
    Ok(Produced {
        primary: t.to_bytes(),
        summary: json!({ "final_means": run.final_means(), "mean_system": mean_system }),
        seed: Some(a.seed),
        input: json!({ "source": src.describe(), "env": env_to_value(&env) }),
    })
}

pub fn simulate_brw(a: &BrwArgs) -> Result<Produced> {
    let src = families::resolve(&a.spec)?;
    let spec = families::load_brw(&src)?;
    if a.t == 0 {
        return Err(ParseError("--t must be at least 1".into()).into());
    }
    let cfg = BrwConfig {
        window: a.window,
        budget: a.budget,
        overflow: match a.overflow {
            OverflowArg::KeepLowest => Overflow::KeepLowest,
            OverflowArg::Error => Overflow::Error,
        },
        keep_particles: false,
    };
    let x0 = spectral::speed_x0(&spec.induced_env(), &SpectralOptions::default())?;
    let runs = par_trials(a.trials, |t| brw::simulate_brw(&spec, a.t, a.seed, t, &cfg))?;
    let mut t = Table::new(&["trial", "generation", "mu_t", "mu_over_t", "frontier_size", "pruned_flag", "sound", "x0"]);
    for (k, snaps) in runs.iter().enumerate() {
        for s in &snaps[1..] {
            t.push(vec![
                k.into(),
                s.generation.into(),
                s.mu.into(),
                (s.mu / s.generation as f64).into(),
                s.frontier_size.into(),
                s.pruned.into(),
                s.sound.into(),
                x0.x0.into(),
            ]);
        }
    }
    let est = SpeedEstimate::from_trials(a.t, runs.iter().map(|r| (r[a.t].mu / a.t as f64, r[a.t].sound)).collect(), x0);
    Ok(Produced {
        primary: t.to_bytes(),
        summary: json!({
            "x0": est.x0.x0,
            "degenerate": est.x0.degenerate,
            "t": a.t,
            "mean_mu_over_t": est.mean,
            "std_err": est.std_err,
            "ci95": [est.ci.0, est.ci.1],
            "all_sound": est.all_sound,
        }),
        seed: Some(a.seed),
        input: json!({ "source": src.describe(), "spec": brw_to_value(&spec) }),
    })
}

pub fn simulate_fpp(a: &FppArgs) -> Result<Produced> {
    let src = families::resolve(&a.spec)?;
    let spec = families::load_brw(&src)?;
    let reach = brw::fpp_reach(&spec, a.t, a.depth, a.trials, a.seed)?;
    let mut t = Table::new(&["trial", "level", "count"]);
    for (k, counts) in reach.counts.iter().enumerate() {
        for (n, c) in counts.iter().enumerate() {
            t.push(vec![k.into(), n.into(), (*c).into()]);
        }
    }
    let trials = reach.counts.len().max(1) as f64;
    let means: Vec<f64> = (0..=a.depth).map(|n| reach.counts.iter().map(|c| c[n] as f64).sum::<f64>() / trials).collect();
    Ok(Produced {
        primary: t.to_bytes(),
        summary: json!({ "t": a.t, "mean_counts": means, "checked_against_z": reach.checked_against_z }),
        seed: Some(a.seed),
        input: json!({ "source": src.describe(), "spec": brw_to_value(&spec) }),
    })
}

fn name_and_output(cmd: &Command) -> (&'static str, Option<&std::path::Path>) {
    match cmd {
        Command::Classify(a) => ("classify", a.output.out.as_deref()),
        Command::Sweep(a) => ("sweep", a.output.out.as_deref()),
        Command::RateFunction(a) => ("rate-function", a.output.out.as_deref()),
        Command::Simulate(s) => match s {
            Simulate::Tree(a) => ("simulate tree", a.output.out.as_deref()),
            Simulate::Walk(a) => ("simulate walk", a.output.out.as_deref()),
            Simulate::Rde(a) => ("simulate rde", a.output.out.as_deref()),
            Simulate::Brw(a) => ("simulate brw", a.output.out.as_deref()),
            Simulate::Fpp(a) => ("simulate fpp", a.output.out.as_deref()),
        },
    }
}

pub fn produce(cmd: &Command) -> Result<Produced> {
    match cmd {
        Command::Classify(a) => classify(a),
        Command::Sweep(a) => sweep(a),
        Command::RateFunction(a) => rate_function(a),
        Command::Simulate(s) => match s {
            Simulate::Tree(a) => simulate_tree(a),
            Simulate::Walk(a) => simulate_walk(a),
            Simulate::Rde(a) => simulate_rde(a),
            Simulate::Brw(a) => simulate_brw(a),
            Simulate::Fpp(a) => simulate_fpp(a),
        },
    }
}

/// What to print once files are written.
pub struct Printed {
    pub stdout: Vec<u8>,
    pub stderr: Vec<u8>,
}

/// Runs a command. With `--out` the primary output and its manifest are
/// written atomically and the summary goes to stdout; without it the
/// primary output goes to stdout and the summary to stderr.
pub fn execute(cli: &Cli) -> Result<Printed> {
    let started = Instant::now();
    let produced = produce(&cli.command)?;
    let (name, out) = name_and_output(&cli.command);
    let summary = if produced.summary.is_null() { Vec::new() } else { to_json_pretty(&produced.summary).into_bytes() };
    match out {
        None => Ok(Printed { stdout: produced.primary, stderr: summary }),
        Some(path) => {
            write_atomic(path, &produced.primary)?;
            let manifest = RunManifest {
                command: name.to_string(),
                config: json!({ "args": cli, "input": produced.input, "summary": produced.summary }),
                seed: produced.seed,
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                wall_clock_seconds: started.elapsed().as_secs_f64(),
                outputs: vec![OutputDigest { path: path.display().to_string(), sha256: sha256_hex(&produced.primary) }],
            };
            write_atomic(&manifest_path(path), to_json_pretty(&manifest).as_bytes())?;
            Ok(Printed { stdout: summary, stderr: Vec::new() })
        }
    }
}

/// Sets the global worker count once; later calls are ignored.
pub fn init_threads(threads: Option<usize>) {
    if let Some(n) = threads.filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}
