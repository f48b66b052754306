use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use riemann_core::*;

fn flux() -> PolymerFluxParams {
    PolymerFluxParams::with_gravity(4.0)
}

/// Sorted sample points of a trace set: interior points of each interval plus
/// the isolated points.
fn points(set: &TraceSet) -> Vec<f64> {
    let mut pts: Vec<f64> = set
        .intervals
        .iter()
        .flat_map(|iv| (1..50).map(move |i| iv.lo + (iv.hi - iv.lo) * i as f64 / 50.0))
        .chain(set.isolated_points.iter().copied())
        .collect();
    pts.sort_by(f64::total_cmp);
    pts
}

struct Case1 {
    left: PolymerState,
    right: PolymerState,
    i1: TraceSet,
    i2: TraceSet,
    f_m: ScalarFn,
}

fn case1(seed: u64) -> Case1 {
    let p = flux();
    let (left, right) = random_gravity_case1(&p, &mut ChaCha8Rng::seed_from_u64(seed));
    let f_m = p.s_flux(right.c, left.k);
    let i1 = build_i1(left.s, &p.s_flux(left.c, left.k), &f_m).unwrap();
    let i2 = build_i2(right.s, &f_m, &p.s_flux(right.c, right.k)).unwrap();
    Case1 {
        left,
        right,
        i1,
        i2,
        f_m,
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn middle_flux_decreases_on_i1_and_increases_on_i2(seed in any::<u64>()) {
        let case = case1(seed);
        prop_assert_eq!(c_wave_sign(case.left, &flux()), WaveSign::Negative);
        let on_i1: Vec<f64> = points(&case.i1).iter().map(|&s| case.f_m.eval(s)).collect();
        prop_assert!(on_i1.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{:?}", case.i1);
        let on_i2: Vec<f64> = points(&case.i2).iter().map(|&s| case.f_m.eval(s)).collect();
        prop_assert!(on_i2.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{:?}", case.i2);
    }

    #[test]
    fn trace_is_the_single_common_point(seed in any::<u64>()) {
        let case = case1(seed);
        let common = case.i1.intersect(&case.i2);
        prop_assert_eq!(common.len(), 1, "{:?} {:?}", case.i1, case.i2);
        let s_m = common[0];
        prop_assert!(case.f_m.eval(s_m) < 0.0);
        let fan = solve_gravity3(case.left, case.right, &flux()).unwrap();
        let k_wave = fan.waves.iter().find(|w| w.family == Family::K).unwrap();
        let left_of_k = k_wave.left.polymer().unwrap();
        prop_assert!((left_of_k.s - s_m).abs() <= 1e-9);
        prop_assert_eq!(left_of_k.c, case.right.c);
        for w in &fan.waves {
            match w.family {
                Family::K => prop_assert_eq!(w.speed, Speed::Single(0.0)),
                // a rarefaction may end at the sonic point of f_m, the closed end of I1
                _ if w.left.polymer().unwrap().k == case.left.k => match w.kind {
                    WaveKind::Rarefaction => prop_assert!(w.speed.max() <= 0.0 && w.speed.min() < 0.0),
                    _ => prop_assert!(w.speed.max() < 0.0),
                },
                _ => prop_assert!(w.speed.min() >= 0.0),
            }
        }
    }
}
