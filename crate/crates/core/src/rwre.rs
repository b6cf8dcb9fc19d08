//! Random walk in a random environment on the coloured tree.
//!
//! Each vertex `u` carries a jump vector `p(u) = (p_down, p_child1, …,
//! p_childb)` drawn independently with a law that depends only on the
//! colour of `u`; child `j` of any vertex has colour `j`. At the root the
//! "down" move is a self-loop. The walk is the reversible network walk with
//! edge conductances equal to the path products of the ratios
//! `p_childj / p_down`, so its environment is an edge-labelled tree in the
//! sense of [`crate::env`] with jointly distributed sibling labels.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::classifier::{find_critical_parameter, Target};
use crate::dist::DistSpec;
use crate::env::{EnvSpec, SiblingMode};
use crate::linalg::SquareMatrix;
use crate::math::abs;
use crate::rng::{child_key, stream_id, trial_rng, vertex_rng};
use crate::spectral::{self, SpectralOptions};
use crate::{Error, Result};

const ENV_STREAM: u64 = 0x656e_7669;
const WALK_STREAM: u64 = 0x7761_6c6b;

/// Law of the jump vector at vertices of one colour.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum JumpLaw {
    /// Deterministic vector `(p_down, p_child1, …, p_childb)`.
    Fixed { p: Vec<f64> },
    /// Binary tree only: `(¾η, ¾(1−η), ¼)` with `η ~ Uniform[h, 1]`.
    UniformSplit { h: f64 },
}

impl JumpLaw {
    fn validate(&self, b: usize) -> Result<()> {
        match self {
            JumpLaw::Fixed { p } => {
                if p.len() != b + 1 {
                    return Err(Error::InvalidEnvironment(format!("jump vector has {} components, expected {}", p.len(), b + 1)));
                }
                if p.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
                    return Err(Error::InvalidEnvironment("jump probabilities must lie in (0, 1)".into()));
                }
                let total: f64 = p.iter().sum();
                if abs(total - 1.0) > 1e-12 {
                    return Err(Error::InvalidEnvironment(format!("jump probabilities sum to {total}, not 1")));
                }
            }
            JumpLaw::UniformSplit { h } => {
                if b != 2 {
                    return Err(Error::InvalidEnvironment("uniform_split needs b = 2".into()));
                }
                if !(*h > 0.0 && *h < 1.0) {
                    return Err(Error::InvalidEnvironment(format!("uniform_split h must lie in (0, 1), got {h}")));
                }
            }
        }
        Ok(())
    }

    /// Writes one draw of `p(u)` into `out` (length `b + 1`).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self {
            JumpLaw::Fixed { p } => out.copy_from_slice(p),
            JumpLaw::UniformSplit { h } => {
                let eta = h + (1.0 - h) * rng.random::<f64>();
                out[0] = 0.75 * eta;
                out[1] = 0.75 * (1.0 - eta);
                out[2] = 0.25;
            }
        }
    }

    /// Writes the ratio vector `(p_child_j / p_down)_j` of one draw into `out`
    /// (length `b`). Uses the same random draws as [`sample`](Self::sample).
    pub fn sample_ratios<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self {
            JumpLaw::Fixed { p } => {
                for (o, x) in out.iter_mut().zip(&p[1..]) {
                    *o = x / p[0];
                }
            }
            JumpLaw::UniformSplit { h } => {
                let eta = h + (1.0 - h) * rng.random::<f64>();
                out[0] = (1.0 - eta) / eta;
                out[1] = 1.0 / (3.0 * eta);
            }
        }
    }

    /// Marginal laws of the ratios.
    fn ratio_marginals(&self) -> Vec<DistSpec> {
        match self {
            JumpLaw::Fixed { p } => p[1..].iter().map(|x| DistSpec::PointMass { value: x / p[0] }).collect(),
            JumpLaw::UniformSplit { h } => vec![DistSpec::RatioUniform { h: *h }, DistSpec::RecipUniform { c: 3.0, h: *h }],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RwreSpec {
    b: usize,
    laws: Vec<JumpLaw>,
    root_color: usize,
}

impl RwreSpec {
    pub fn new(laws: Vec<JumpLaw>, root_color: usize) -> Result<Self> {
        let b = laws.len();
        if b < 2 {
            return Err(Error::InvalidEnvironment(format!("b must be at least 2, got {b}")));
        }
        for law in &laws {
            law.validate(b)?;
        }
        if root_color >= b {
            return Err(Error::InvalidColor { color: root_color, b });
        }
        Ok(RwreSpec { b, laws, root_color })
    }

    /// Binary tree where colour 0 jumps with `(½, ¼, ¼)` and colour 1 with
    /// `(¾η, ¾(1−η), ¼)`, `η ~ Uniform[h, 1]`.
    pub fn uniform_split_example(h: f64) -> Result<Self> {
        Self::new(vec![JumpLaw::Fixed { p: vec![0.5, 0.25, 0.25] }, JumpLaw::UniformSplit { h }], 0)
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn laws(&self) -> &[JumpLaw] {
        &self.laws
    }

    pub fn root_color(&self) -> usize {
        self.root_color
    }

    pub(crate) fn sample_ratios<R: Rng + ?Sized>(&self, color: usize, rng: &mut R, out: &mut [f64]) {
        self.laws[color].sample_ratios(rng, out)
    }

    /// The edge-label environment: row `i` is the law of the ratio vector at
    /// a colour-`i` vertex, sampled jointly.
    pub fn induced_env(&self) -> EnvSpec {
        let entries = self.laws.iter().map(JumpLaw::ratio_marginals).collect();
        EnvSpec::with_mode(entries, SiblingMode::RwreJoint(self.clone()), self.root_color)
            .expect("validated jump laws induce a valid environment")
    }

    fn root_key(seed: u64) -> u64 {
        stream_id(seed, ENV_STREAM)
    }
}

/// `p(u)` for every vertex up to a depth, stored level by level; vertex `k`
/// of level `n` has children `k b + j` at level `n + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizedEnvironment {
    pub b: usize,
    pub depth: usize,
    pub root_color: usize,
    /// `p[n][k (b+1) + m]`: component `m` of `p` at vertex `k` of level `n`.
    pub p: Vec<Vec<f64>>,
}

impl RealizedEnvironment {
    pub fn color(&self, level: usize, k: usize) -> usize {
        if level == 0 {
            self.root_color
        } else {
            k % self.b
        }
    }

    pub fn jump(&self, level: usize, k: usize) -> &[f64] {
        let w = self.b + 1;
        &self.p[level][k * w..(k + 1) * w]
    }

    pub fn vertex_count(&self) -> usize {
        self.p.iter().map(|l| l.len() / (self.b + 1)).sum()
    }
}

fn level_sizes_within(b: usize, depth: usize, budget: usize) -> Result<()> {
    let mut total: u128 = 0;
    let mut width: u128 = 1;
    for _ in 0..=depth {
        total += width;
        width = width.saturating_mul(b as u128);
    }
    if total > budget as u128 {
        return Err(Error::Budget { needed: total, budget });
    }
    Ok(())
}

pub const DEFAULT_VERTEX_BUDGET: usize = 10_000_000;

/// Draws `p(u)` independently at every vertex up to `depth`. A vertex's
/// draw depends only on `seed` and its path, so it agrees with the
/// environment a walk with the same seed discovers lazily.
pub fn sample_environment(spec: &RwreSpec, depth: usize, seed: u64) -> Result<RealizedEnvironment> {
    let b = spec.b;
    level_sizes_within(b, depth, DEFAULT_VERTEX_BUDGET)?;
    let w = b + 1;
    let mut keys = vec![RwreSpec::root_key(seed)];
    let mut p = Vec::with_capacity(depth + 1);
    for level in 0..=depth {
        let mut lp = vec![0.0; keys.len() * w];
        for (k, &key) in keys.iter().enumerate() {
            let color = if level == 0 { spec.root_color } else { k % b };
            spec.laws[color].sample(&mut vertex_rng(key), &mut lp[k * w..(k + 1) * w]);
        }
        p.push(lp);
        if level < depth {
            keys = keys.iter().flat_map(|&key| (0..b).map(move |j| child_key(key, j))).collect();
        }
    }
    Ok(RealizedEnvironment { b, depth, root_color: spec.root_color, p })
}

/// Edge conductances of a realised environment.
#[derive(Debug, Clone, PartialEq)]
pub struct Conductances {
    /// Conductance of the root self-loop.
    pub root_loop: f64,
    /// `edges[n][k]`: conductance of the edge from vertex `k` of level `n + 1`
    /// to its parent.
    pub edges: Vec<Vec<f64>>,
}

impl Conductances {
    /// `C_x = Σ_{y∼x} C_xy` over the edges present in the truncation.
    pub fn vertex_total(&self, b: usize, level: usize, k: usize) -> f64 {
        let up = if level == 0 { self.root_loop } else { self.edges[level - 1][k] };
        let down: f64 = self.edges.get(level).map_or(0.0, |l| l[k * b..(k + 1) * b].iter().sum());
        up + down
    }
}

/// `C` of the edge into `u_n` is `Π_{i<n} p_{u_i u_{i+1}} / p_{u_i u_{i−1}}`,
/// with the root's self-loop playing the role of `p_{u_0 u_{−1}}`.
pub fn conductances(env: &RealizedEnvironment) -> Conductances {
    let b = env.b;
    let mut edges: Vec<Vec<f64>> = Vec::with_capacity(env.depth);
    for level in 0..env.depth {
        let parents = env.p[level].len() / (b + 1);
        let mut next = Vec::with_capacity(parents * b);
        for k in 0..parents {
            let above = if level == 0 { 1.0 } else { edges[level - 1][k] };
            let p = env.jump(level, k);
            for j in 0..b {
                next.push(above * p[j + 1] / p[0]);
            }
        }
        edges.push(next);
    }
    Conductances { root_loop: 1.0, edges }
}

/// `max |C_uv / C_u − p_uv|` over vertices whose children are all present.
pub fn detailed_balance_error(env: &RealizedEnvironment, c: &Conductances) -> f64 {
    let b = env.b;
    let mut worst: f64 = 0.0;
    for level in 0..env.depth {
        let parents = env.p[level].len() / (b + 1);
        for k in 0..parents {
            let total = c.vertex_total(b, level, k);
            let p = env.jump(level, k);
            let up = if level == 0 { c.root_loop } else { c.edges[level - 1][k] };
            worst = worst.max(abs(up / total - p[0]));
            for j in 0..b {
                worst = worst.max(abs(c.edges[level][k * b + j] / total - p[j + 1]));
            }
        }
    }
    worst
}

/// Stationary law of the walk restricted to the realised depth with
/// reflecting leaves (a leaf steps to its parent with probability 1),
/// computed by solving the balance equations `π P = π`, `Σ π = 1`.
///
/// Entries follow level order.
pub fn truncated_stationary_law(env: &RealizedEnvironment) -> Result<Vec<f64>> {
    let b = env.b;
    let offsets: Vec<usize> = env
        .p
        .iter()
        .scan(0usize, |acc, l| {
            let o = *acc;
            *acc += l.len() / (b + 1);
            Some(o)
        })
        .collect();
    let n = env.vertex_count();
    let mut pt = SquareMatrix::zeros(n);
    for level in 0..=env.depth {
        let count = env.p[level].len() / (b + 1);
        for k in 0..count {
            let u = offsets[level] + k;
            let parent = if level == 0 { u } else { offsets[level - 1] + k / b };
            if level == env.depth {
                pt.set(parent, u, pt.get(parent, u) + 1.0);
                continue;
            }
            let p = env.jump(level, k);
            pt.set(parent, u, pt.get(parent, u) + p[0]);
            for j in 0..b {
                let v = offsets[level + 1] + k * b + j;
                pt.set(v, u, p[j + 1]);
            }
        }
    }
    // (Pᵀ − I) π = 0 with the last equation replaced by normalisation.
    let mut a = pt;
    for i in 0..n {
        a.set(i, i, a.get(i, i) - 1.0);
    }
    for j in 0..n {
        a.set(n - 1, j, 1.0);
    }
    let mut rhs = vec![0.0; n];
    rhs[n - 1] = 1.0;
    a.solve(&rhs)
}

/// `C_x / Σ_y C_y` in level order.
pub fn conductance_law(env: &RealizedEnvironment, c: &Conductances) -> Vec<f64> {
    let b = env.b;
    let mut out = Vec::with_capacity(env.vertex_count());
    for level in 0..=env.depth {
        for k in 0..env.p[level].len() / (b + 1) {
            out.push(c.vertex_total(b, level, k));
        }
    }
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|x| *x /= total);
    out
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WalkStats {
    pub steps: u64,
    pub root_visits: u64,
    pub max_depth: usize,
    pub final_depth: usize,
    /// Time spent at each depth `0..=cut_depth`, counting `X(0)`.
    pub depth_occupation: Vec<u64>,
    /// Time spent below `cut_depth`.
    pub beyond_cut: u64,
    /// Per-vertex occupation up to `cut_depth`, keyed by (depth, index in level).
    pub occupation: BTreeMap<(usize, u64), u64>,
}

const NONE: u32 = u32::MAX;

struct LazyTree {
    b: usize,
    depth: Vec<u32>,
    parent: Vec<u32>,
    index: Vec<u64>,
    key: Vec<u64>,
    p: Vec<f64>,
    children: Vec<u32>,
    visits: Vec<u64>,
}

impl LazyTree {
    fn new(spec: &RwreSpec, seed: u64) -> Self {
        let mut t = LazyTree {
            b: spec.b,
            depth: Vec::new(),
            parent: Vec::new(),
            index: Vec::new(),
            key: Vec::new(),
            p: Vec::new(),
            children: Vec::new(),
            visits: Vec::new(),
        };
        t.push(spec, NONE, 0, 0, RwreSpec::root_key(seed), spec.root_color);
        t
    }

    fn push(&mut self, spec: &RwreSpec, parent: u32, depth: u32, index: u64, key: u64, color: usize) -> u32 {
        let id = self.depth.len() as u32;
        self.depth.push(depth);
        self.parent.push(parent);
        self.index.push(index);
        self.key.push(key);
        let start = self.p.len();
        self.p.resize(start + self.b + 1, 0.0);
        spec.laws[color].sample(&mut vertex_rng(key), &mut self.p[start..]);
        self.children.extend(core::iter::repeat_n(NONE, self.b));
        self.visits.push(0);
        id
    }

    fn child(&mut self, spec: &RwreSpec, u: u32, j: usize) -> u32 {
        let slot = u as usize * self.b + j;
        if self.children[slot] == NONE {
            let ui = u as usize;
            let id = self.push(
                spec,
                u,
                self.depth[ui] + 1,
                self.index[ui].wrapping_mul(self.b as u64).wrapping_add(j as u64),
                child_key(self.key[ui], j),
                j,
            );
            self.children[slot] = id;
        }
        self.children[slot]
    }
}

/// Runs the walk for `steps` steps from the root, realising `p(u)` at first
/// visit.
pub fn simulate_walk(spec: &RwreSpec, steps: u64, seed: u64, cut_depth: usize) -> Result<WalkStats> {
    let max_cut = 63 / (usize::BITS - spec.b.leading_zeros()) as usize;
    if cut_depth > max_cut {
        return Err(Error::InvalidEnvironment(format!("cut depth {cut_depth} exceeds {max_cut} for b = {}", spec.b)));
    }
    let mut tree = LazyTree::new(spec, seed);
    let mut rng = trial_rng(seed, WALK_STREAM);
    let w = spec.b + 1;
    let mut u: u32 = 0;
    let mut depth_occupation = vec![0u64; cut_depth + 1];
    let mut beyond_cut = 0u64;
    let mut max_depth = 0usize;
    let mut record = |tree: &mut LazyTree, u: u32| {
        let d = tree.depth[u as usize] as usize;
        tree.visits[u as usize] += 1;
        max_depth = max_depth.max(d);
        if d <= cut_depth {
            depth_occupation[d] += 1;
        } else {
            beyond_cut += 1;
        }
    };
    record(&mut tree, u);
    for _ in 0..steps {
        let r: f64 = rng.random();
        let p = &tree.p[u as usize * w..(u as usize + 1) * w];
        let mut acc = p[0];
        let mut m = 0;
        while r >= acc && m + 1 < w {
            m += 1;
            acc += p[m];
        }
        u = if m == 0 {
            if u == 0 {
                0
            } else {
                tree.parent[u as usize]
            }
        } else {
            tree.child(spec, u, m - 1)
        };
        record(&mut tree, u);
    }
    let mut occupation = BTreeMap::new();
    for id in 0..tree.depth.len() {
        let d = tree.depth[id] as usize;
        if d <= cut_depth && tree.visits[id] > 0 {
            occupation.insert((d, tree.index[id]), tree.visits[id]);
        }
    }
    Ok(WalkStats {
        steps,
        root_visits: tree.visits[0],
        max_depth,
        final_depth: tree.depth[u as usize] as usize,
        depth_occupation,
        beyond_cut,
        occupation,
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepTable {
    pub rows: Vec<(f64, f64)>,
    pub root: f64,
}

/// `λ₁(h)` over a grid for the uniform-split example, and the critical `h`
/// where it crosses 1.
pub fn hcr_sweep(h_grid: &[f64], opts: &SpectralOptions) -> Result<SweepTable> {
    if h_grid.is_empty() || h_grid.iter().any(|&h| !(h > 0.0 && h < 1.0)) {
        return Err(Error::InvalidEnvironment("h grid must be non-empty and inside (0, 1)".into()));
    }
    let family = |h: f64| Ok(RwreSpec::uniform_split_example(h)?.induced_env());
    let rows = h_grid
        .iter()
        .map(|&h| Ok((h, spectral::lambda1(&family(h)?, opts)?.value)))
        .collect::<Result<Vec<_>>>()?;
    let lo = h_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = h_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let root = find_critical_parameter(family, (lo, hi), Target::Lambda1, 1e-7, opts)?;
    Ok(SweepTable { rows, root })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn induced_env_of_the_example() {
        let env = RwreSpec::uniform_split_example(0.4).unwrap().induced_env();
        assert_eq!(env.entry(0, 0), &DistSpec::PointMass { value: 0.5 });
        assert_eq!(env.entry(0, 1), &DistSpec::PointMass { value: 0.5 });
        assert_eq!(env.entry(1, 0), &DistSpec::RatioUniform { h: 0.4 });
        assert_eq!(env.entry(1, 1), &DistSpec::RecipUniform { c: 3.0, h: 0.4 });
        assert!(matches!(env.sibling_mode(), SiblingMode::RwreJoint(_)));
        let m = env.moment_matrix(1.0).unwrap();
        let h: f64 = 0.5;
        let env = RwreSpec::uniform_split_example(h).unwrap().induced_env();
        assert!((env.moment_matrix(1.0).unwrap().values.get(1, 1) - (-h.ln() / (3.0 * (1.0 - h)))).abs() < 1e-12);
        assert!(m.values.get(0, 0) == 0.5);
    }

    #[test]
    fn uniform_jump_vector_gives_unit_ratios() {
        let spec = RwreSpec::new(vec![JumpLaw::Fixed { p: vec![1.0 / 3.0; 3] }; 2], 0).unwrap();
        let env = spec.induced_env();
        for row in env.entries() {
            for d in row {
                assert_eq!(d, &DistSpec::PointMass { value: 1.0 });
            }
        }
        let realized = sample_environment(&spec, 4, 1).unwrap();
        let c = conductances(&realized);
        assert!(c.edges.iter().flatten().all(|&x| (x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn jump_vectors_sum_to_one() {
        let spec = RwreSpec::uniform_split_example(0.3).unwrap();
        let env = sample_environment(&spec, 8, 5).unwrap();
        for level in 0..=8 {
            for k in 0..env.p[level].len() / 3 {
                let p = env.jump(level, k);
                assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
                assert!(p.iter().all(|&x| x > 0.0 && x < 1.0));
            }
        }
    }

    #[test]
    fn fixed_laws_give_identical_vertices() {
        let spec = RwreSpec::new(vec![JumpLaw::Fixed { p: vec![0.2, 0.5, 0.3] }; 2], 1).unwrap();
        let env = sample_environment(&spec, 5, 9).unwrap();
        assert!(env.p.iter().flat_map(|l| l.chunks(3)).all(|p| p == [0.2, 0.5, 0.3]));
    }

    #[test]
    fn down_probability_mean_at_second_colour() {
        let spec = RwreSpec::uniform_split_example(0.5).unwrap();
        let env = sample_environment(&spec, 17, 2024).unwrap();
        let downs: Vec<f64> = (1..=17)
            .flat_map(|level| {
                let env = &env;
                (0..env.p[level].len() / 3).filter(move |&k| env.color(level, k) == 1).map(move |k| env.jump(level, k)[0])
            })
            .take(100_000)
            .collect();
        assert_eq!(downs.len(), 100_000);
        let s = crate::stats::Summary::of(&downs);
        assert!((s.mean - 0.5625).abs() < 3.0 * s.std_err, "{s:?}");
    }

    #[test]
    fn telescoping_conductance_on_a_single_path() {
        let spec = RwreSpec::new(vec![JumpLaw::Fixed { p: vec![0.5, 0.3, 0.2] }, JumpLaw::Fixed { p: vec![0.25, 0.25, 0.5] }], 0).unwrap();
        let env = sample_environment(&spec, 3, 0).unwrap();
        let c = conductances(&env);
        // Path root(colour 0) → child 1 (colour 1) → child 0 (colour 0) → child 1 (colour 1).
        let by_hand = (0.2 / 0.5) * (0.25 / 0.25) * (0.2 / 0.5);
        let k = (1 * 2 + 0) * 2 + 1;
        assert!((c.edges[2][k] - by_hand).abs() < 1e-15);
    }

    #[test]
    fn detailed_balance_holds_exactly() {
        let spec = RwreSpec::uniform_split_example(0.3).unwrap();
        for seed in 0..20 {
            let env = sample_environment(&spec, 6, seed).unwrap();
            let c = conductances(&env);
            assert!(detailed_balance_error(&env, &c) <= 1e-12);
        }
    }

    #[test]
    fn reflecting_truncation_is_reversible() {
        let spec = RwreSpec::uniform_split_example(0.45).unwrap();
        let env = sample_environment(&spec, 4, 77).unwrap();
        let pi = truncated_stationary_law(&env).unwrap();
        let c = conductance_law(&env, &conductances(&env));
        let worst = pi.iter().zip(&c).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst <= 1e-10, "{worst}");
    }

    #[test]
    fn walk_is_deterministic_and_consistent() {
        let spec = RwreSpec::uniform_split_example(0.6).unwrap();
        let a = simulate_walk(&spec, 5000, 3, 6).unwrap();
        let b = simulate_walk(&spec, 5000, 3, 6).unwrap();
        assert_eq!(a, b);
        assert!(a.root_visits >= 1);
        let occupied: u64 = a.depth_occupation.iter().sum::<u64>() + a.beyond_cut;
        assert_eq!(occupied, a.steps + 1);
        let by_vertex: u64 = a.occupation.values().sum();
        assert_eq!(by_vertex, a.depth_occupation.iter().sum::<u64>());
    }

    #[test]
    fn lazy_realisation_matches_the_eager_one() {
        let spec = RwreSpec::uniform_split_example(0.2).unwrap();
        let env = sample_environment(&spec, 3, 11).unwrap();
        let mut lazy = LazyTree::new(&spec, 11);
        let a = lazy.child(&spec, 0, 1);
        let b = lazy.child(&spec, a, 0);
        let c = lazy.child(&spec, b, 1);
        for (id, level, k) in [(0u32, 0, 0), (a, 1, 1), (b, 2, 2), (c, 3, 5)] {
            assert_eq!(&lazy.p[id as usize * 3..id as usize * 3 + 3], env.jump(level, k));
        }
    }

    #[test]
    fn sweep_brackets_the_critical_point() {
        let t = hcr_sweep(&[0.1, 0.3, 0.5, 0.7, 0.9], &SpectralOptions::default()).unwrap();
        assert!(t.rows[0].1 > 1.0);
        assert!(t.rows[4].1 < 1.0);
        assert!((t.root - 0.417).abs() < 1e-3, "{}", t.root);
    }
}
