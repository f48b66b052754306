//! Fixed workloads shared by the benchmarks.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use riemann_core::{random_riemann, FluxModel, ModelKind, State, TrafficState2};

/// `count` random Riemann problems for `kind`, reproducible from `seed`.
pub fn riemann_batch(kind: ModelKind, count: usize, seed: u64) -> (FluxModel, Vec<(State, State)>) {
    let model = kind.default_model();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let problems = (0..count)
        .map(|_| random_riemann(&model, &mut rng))
        .collect();
    (model, problems)
}

/// Piecewise-constant traffic data in Riemann invariants with `jumps` breakpoints in `[-2, 2]`.
pub fn traffic_cauchy(jumps: usize, seed: u64) -> (Vec<f64>, Vec<TrafficState2>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut uniform =
        |a: f64, b: f64| a + (b - a) * ((rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64);
    let mut breaks: Vec<f64> = (0..jumps).map(|_| uniform(-2.0, 2.0)).collect();
    breaks.sort_by(f64::total_cmp);
    let states = (0..=jumps)
        .map(|_| TrafficState2::new(uniform(1.9, 2.1), uniform(0.9, 1.1)))
        .collect();
    (breaks, states)
}
