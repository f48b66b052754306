use proptest::prelude::*;
use riemann_core::envelope::{scalar_pieces, ScalarPiece};
use riemann_core::simulate::{sample_fan, uniform_centers};
use riemann_core::*;

/// Functions drawn from the model fluxes, all on `[0, 1]` except traffic.
fn model_function(which: usize, c: f64, k: f64) -> ScalarFn {
    let plain = PolymerFluxParams::default();
    let ads = AdsorptionParams::default();
    match which {
        0 => plain.s_flux(c, k),
        1 => plain.shifted_ratio(c, k, 0.0),
        2 => plain.shifted_ratio(c, k, ads.m_dc(c)),
        3 => PolymerFluxParams::with_gravity(4.0).s_flux(c, 0.4 + 0.5 * k),
        _ => TrafficParams { gamma: 1.5 }.density_flux(2.0 + c, k, ((2.0 + c) / k).powf(1.0 / 1.5)),
    }
}

fn unit(g: &ScalarFn, t: f64) -> f64 {
    let (lo, hi) = g.interval();
    lo + (hi - lo) * t
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn envelopes_are_monotone_and_touch_at_the_anchor(
        which in 0usize..5, c in 0.0f64..1.0, k in 0.5f64..2.0, a in 0.0f64..1.0, sharp in any::<bool>(),
    ) {
        let g = model_function(which, c, k);
        let anchor = unit(&g, a);
        let dir = if sharp { Direction::Sharp } else { Direction::Flat };
        let env = build_envelope(&g, anchor, dir).unwrap();
        prop_assert_eq!(env.eval(anchor), g.eval(anchor));
        let mut prev = env.eval(unit(&g, 0.0));
        for i in 1..=1000 {
            let v = env.eval(unit(&g, i as f64 / 1000.0));
            if sharp {
                prop_assert!(v >= prev - 1e-12, "sharp decreases at {i}: {prev} -> {v}");
            } else {
                prop_assert!(v <= prev + 1e-12, "flat increases at {i}: {prev} -> {v}");
            }
            prev = v;
        }
    }

    #[test]
    fn minimum_jump_traces_sit_on_the_crossing_level(
        which in 0usize..5, cl in 0.0f64..1.0, cr in 0.0f64..1.0, k in 0.5f64..2.0,
        a in 0.0f64..1.0, b in 0.0f64..1.0,
    ) {
        let (gl, gr) = (model_function(which, cl, k), model_function(which, cr, k));
        prop_assume!(gl.interval() == gr.interval());
        let (sl, sr) = (unit(&gl, a), unit(&gr, b));
        let path = match minimum_jump(&gl, &gr, sl, sr) {
            Ok(p) => p,
            Err(RiemannError::Infeasible(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!((gl.eval(path.s_minus) - path.sigma).abs() <= 1e-9);
        prop_assert!((gr.eval(path.s_plus) - path.sigma).abs() <= 1e-9);
        let flat = build_envelope(&gl, sl, Direction::Flat).unwrap();
        let sharp = build_envelope(&gr, sr, Direction::Sharp).unwrap();
        prop_assert!((flat.eval(path.s_minus) - path.sigma).abs() <= 1e-9);
        prop_assert!((sharp.eval(path.s_plus) - path.sigma).abs() <= 1e-9);
    }

    #[test]
    fn scalar_fans_are_ordered_and_entropic(which in 0usize..5, c in 0.0f64..1.0, k in 0.5f64..2.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let f = model_function(which, c, k);
        let (ul, ur) = (unit(&f, a), unit(&f, b));
        let fan = scalar_riemann(&f, ul, ur);
        prop_assert!(fan.validate(1e-9).is_ok());
        let pieces = scalar_pieces(&f, ul, ur);
        for p in pieces.windows(2) {
            prop_assert!(p[0].max_speed() <= p[1].min_speed() + 1e-12);
        }
        for piece in pieces {
            if let ScalarPiece::Shock { from, to, speed } = piece {
                prop_assert!((speed * (to - from) - (f.eval(to) - f.eval(from))).abs() <= 1e-9);
                for i in 1..100 {
                    let u = from + (to - from) * i as f64 / 100.0;
                    let chord = f.eval(from) + speed * (u - from);
                    let gap = if to > from { f.eval(u) - chord } else { chord - f.eval(u) };
                    prop_assert!(gap >= -1e-9, "chord crosses the flux at {u}");
                }
            }
        }
    }
}

/// Godunov flux of the exact scalar Riemann problem at `x/t = 0`.
fn godunov_flux(f: &ScalarFn, ul: f64, ur: f64) -> f64 {
    let (lo, hi) = if ul <= ur { (ul, ur) } else { (ur, ul) };
    let candidates = [lo, hi]
        .into_iter()
        .chain(
            f.critical_points()
                .iter()
                .copied()
                .filter(|&u| u > lo && u < hi),
        )
        .map(|u| f.eval(u));
    if ul <= ur {
        candidates.fold(f64::INFINITY, f64::min)
    } else {
        candidates.fold(f64::NEG_INFINITY, f64::max)
    }
}

fn godunov_error(f: &ScalarFn, ul: f64, ur: f64, cells: usize, half_width: f64) -> f64 {
    let dx = 2.0 * half_width / cells as f64;
    let xs = uniform_centers(-half_width, half_width, cells);
    let mut u: Vec<f64> = xs.iter().map(|&x| if x < 0.0 { ul } else { ur }).collect();
    let (lo, hi) = f.interval();
    let lam = (0..=400)
        .map(|i| f.deriv(lo + (hi - lo) * i as f64 / 400.0).abs())
        .fold(0.0, f64::max);
    let dt = 0.45 * dx / lam;
    let mut t = 0.0;
    let mut flux = vec![0.0; cells + 1];
    while t < 1.0 {
        let h = dt.min(1.0 - t);
        for j in 0..=cells {
            let (a, b) = (u[j.saturating_sub(1)], u[j.min(cells - 1)]);
            flux[j] = godunov_flux(f, a, b);
        }
        for i in 0..cells {
            u[i] -= h / dx * (flux[i + 1] - flux[i]);
        }
        t += h;
    }
    let exact = sample_fan(&scalar_riemann(f, ul, ur), 1.0, &xs);
    exact
        .iter()
        .zip(&u)
        .map(|(e, v)| (e.scalar().unwrap() - v).abs() * dx)
        .sum()
}

#[test]
fn godunov_converges_to_the_scalar_fan() {
    let cases = [
        (PolymerFluxParams::default().s_flux(0.3, 1.0), 0.0, 1.0),
        (PolymerFluxParams::default().s_flux(0.7, 1.5), 0.9, 0.1),
        (
            PolymerFluxParams::with_gravity(4.0).s_flux(0.4, 0.6),
            0.8,
            0.05,
        ),
        (
            PolymerFluxParams::with_gravity(4.0).s_flux(0.4, 0.6),
            0.1,
            0.95,
        ),
    ];
    for (f, ul, ur) in cases {
        let errors: Vec<f64> = [400, 800, 1600]
            .iter()
            .map(|&n| godunov_error(&f, ul, ur, n, 4.0))
            .collect();
        for pair in errors.windows(2) {
            assert!(pair[0] / pair[1] >= 1.5, "({ul}, {ur}): errors {errors:?}");
        }
    }
}

#[test]
fn godunov_flux_is_exact_for_burgers() {
    let f = ScalarFn::new(|u| 0.5 * u * u, |u| u, -2.0, 2.0);
    assert_eq!(godunov_flux(&f, -1.0, 1.0), 0.0);
    assert_eq!(godunov_flux(&f, 1.0, -1.0), 0.5);
    assert_eq!(godunov_flux(&f, 0.5, 1.0), 0.125);
}
