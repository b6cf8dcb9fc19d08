use colortree_core::rwre::{simulate_walk, JumpLaw, RwreSpec};

fn fixed(p: [f64; 3]) -> RwreSpec {
    let law = JumpLaw::Fixed { p: p.to_vec() };
    RwreSpec::new(vec![law.clone(), law], 0).unwrap()
}

#[test]
fn strong_downward_drift_stays_near_root() {
    let spec = fixed([0.9, 0.05, 0.05]);
    let (mut beyond, mut total) = (0u64, 0u64);
    for seed in 0..1000 {
        let w = simulate_walk(&spec, 10_000, seed, 10).unwrap();
        beyond += w.beyond_cut;
        total += w.steps;
    }
    assert!(beyond as f64 <= 0.01 * total as f64, "{beyond} of {total} steps beyond depth 10");
}

#[test]
fn strong_upward_drift_escapes_linearly() {
    let spec = fixed([0.1, 0.45, 0.45]);
    let steps = 10_000;
    let runs = 200;
    let fast = (0..runs).filter(|&seed| simulate_walk(&spec, steps, seed, 10).unwrap().final_depth as u64 >= steps / 4).count();
    assert!(fast as f64 >= 0.95 * runs as f64, "{fast} of {runs}");
}

#[test]
fn recurrent_split_environment_returns_to_root() {
    let spec = RwreSpec::uniform_split_example(0.6).unwrap();
    let runs = 200;
    let returning = (0..runs).filter(|&seed| simulate_walk(&spec, 10_000, seed, 10).unwrap().root_visits >= 10).count();
    assert!(returning as f64 >= 0.95 * runs as f64, "{returning} of {runs}");
}

#[test]
fn occupation_is_consistent() {
    let spec = RwreSpec::uniform_split_example(0.5).unwrap();
    let w = simulate_walk(&spec, 5_000, 3, 6).unwrap();
    let within: u64 = w.depth_occupation.iter().sum();
    // Occupation counts X(0) as well as the steps.
    assert_eq!(within + w.beyond_cut, w.steps + 1);
    assert_eq!(w.occupation.values().sum::<u64>(), within);
    assert!(w.final_depth <= w.max_depth);
}
