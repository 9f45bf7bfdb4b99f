use proptest::prelude::*;
use radwave_core::functionals::{cumulative_trapezoid, energy, morawetz_potential};
use radwave_core::spectral::{dst, idst, lp_project, sobolev_norm, Band};
use radwave_core::truncation::cross_term;
use radwave_core::{Profile, RadialField, RadialGrid, WaveState};
use std::f64::consts::PI;

fn profile() -> impl Strategy<Value = Profile> {
    prop_oneof![
        (0.2f64..8.0).prop_map(|a| Profile::gaussian(a).unwrap()),
        (-3.0f64..3.0, 0.5f64..4.0).prop_map(|(a, b)| Profile::bump(a, b).unwrap()),
        (-2.0f64..2.0, 2.0f64..6.0).prop_map(|(a, m)| Profile::polydecay(a, m).unwrap()),
    ]
}

fn grid() -> impl Strategy<Value = RadialGrid> {
    (8.0f64..30.0, 32usize..400).prop_map(|(r, n)| RadialGrid::new(r, n).unwrap())
}

fn noise(len: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0f64..1.0, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn u_phi_round_trip_is_one_rounding(g in grid(), prof in profile()) {
        let f = prof.sample(&g).unwrap();
        for (k, u) in f.u_values().into_iter().enumerate() {
            let exact = prof.eval(g.r(k));
            prop_assert!((u - exact).abs() <= 2.0 * f64::EPSILON * exact.abs());
        }
    }

    #[test]
    fn sampling_is_bitwise_deterministic(g in grid(), prof in profile()) {
        prop_assert_eq!(prof.sample(&g).unwrap(), prof.sample(&g).unwrap());
    }

    #[test]
    fn sine_round_trip(g in grid(), seed in noise(400)) {
        let phi: Vec<f64> = seed.into_iter().cycle().take(g.len()).collect();
        let f = RadialField::from_phi(&g, phi).unwrap();
        let back = idst(&dst(&f));
        let err = back.sub(&f).unwrap().l2_norm();
        prop_assert!(err <= 1e-12 * f.l2_norm());
    }

    #[test]
    fn parseval_matches_trapezoid(g in grid(), prof in profile()) {
        let f = prof.sample(&g).unwrap();
        let norm_sq = sobolev_norm(&f, 0.0).unwrap().powi(2);
        let trap = 4.0 * PI * g.spacing() * f.phi().iter().map(|x| x * x).sum::<f64>();
        prop_assert!((norm_sq - trap).abs() <= 1e-8 * norm_sq.max(1.0));
    }

    #[test]
    fn sharp_projections_partition(g in grid(), prof in profile(), j in -3i32..8) {
        let f = prof.sample(&g).unwrap();
        let low = dst(&lp_project(&f, j, Band::Leq));
        let high = dst(&lp_project(&f, j, Band::Geq));
        let full = dst(&f);
        let scale = full.coeff().iter().fold(0.0f64, |m, c| m.max(c.abs()));
        for ((a, b), c) in low.coeff().iter().zip(high.coeff()).zip(full.coeff()) {
            prop_assert!((a + b - c).abs() <= 1e-13 * scale.max(1e-300));
        }
        let again = lp_project(&lp_project(&f, j, Band::Leq), j, Band::Leq);
        let once = lp_project(&f, j, Band::Leq);
        prop_assert!(again.sub(&once).unwrap().l2_norm() <= 1e-13 * f.l2_norm().max(1e-300));
    }

    #[test]
    fn energy_is_non_negative(g in grid(), a in profile(), b in profile(), p in 3.1f64..5.0) {
        let st = WaveState::new(0.0, a.sample(&g).unwrap(), b.sample(&g).unwrap()).unwrap();
        prop_assert!(energy(&st, p).unwrap() >= 0.0);
    }

    #[test]
    fn morawetz_is_linear_in_velocity(g in grid(), a in profile(), b in profile(), c in -3.0f64..3.0) {
        let u = a.sample(&g).unwrap();
        let ut = b.sample(&g).unwrap();
        let base = morawetz_potential(&WaveState::new(0.0, u.clone(), ut.clone()).unwrap());
        let scaled = morawetz_potential(&WaveState::new(0.0, u, ut.scaled(c)).unwrap());
        prop_assert!((scaled - c * base).abs() <= 1e-12 * (c * base).abs().max(1e-12));
    }

    #[test]
    fn cross_term_is_odd_and_symmetric(v in -3.0f64..3.0, w in -3.0f64..3.0, p in 3.0f64..5.0) {
        let c = cross_term(v, w, p);
        prop_assert!((cross_term(-v, -w, p) + c).abs() <= 1e-12 * c.abs().max(1.0));
        prop_assert!((cross_term(w, v, p) - c).abs() <= 1e-12 * c.abs().max(1.0));
    }

    #[test]
    fn running_integral_of_non_negative_data_never_decreases(
        steps in proptest::collection::vec(1e-3f64..1.0, 1..50),
        values in proptest::collection::vec(0.0f64..10.0, 50),
    ) {
        let mut t = vec![0.0];
        for s in &steps {
            t.push(t.last().unwrap() + s);
        }
        let f: Vec<f64> = values.into_iter().take(t.len()).collect();
        let t = &t[..f.len()];
        let c = cumulative_trapezoid(t, &f);
        prop_assert!(c.windows(2).all(|w| w[1] >= w[0]));
    }
}
