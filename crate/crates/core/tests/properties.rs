use proptest::prelude::*;

use transport1d::envelope::{lower_increasing_envelope, upper_decreasing_envelope};
use transport1d::{build_potential, sample_scenario, solve, BoundaryData, FieldPair, Profile, Scenario};

fn drift_scenario(c: f64, amp: f64, data: BoundaryData) -> Scenario {
    Scenario::analytic("drift", 1.0, 0.0, 1.0, move |t, x| 1.0 + amp * (6.0 * (x - c * t)).sin(), move |_, _| c, data)
}

fn steps(values: &[f64], lo: f64, hi: f64) -> Profile {
    let k = values.len();
    let breaks = (1..k).map(|i| lo + (hi - lo) * i as f64 / k as f64).collect();
    Profile::steps(breaks, values.to_vec()).unwrap()
}

fn field(s: &Scenario, n: usize) -> FieldPair {
    let g = s.grid(n, n).unwrap();
    sample_scenario(s, &g, FieldPair::default_tol(&g, 2.0)).unwrap()
}

fn data_strategy() -> impl Strategy<Value = BoundaryData> {
    (
        prop::collection::vec(-2.0..2.0f64, 1..5),
        prop::collection::vec(-2.0..2.0f64, 1..5),
        prop::collection::vec(-2.0..2.0f64, 1..5),
    )
        .prop_map(|(a, b, c)| {
            BoundaryData::new(steps(&a, 0.0, 1.0), steps(&b, 0.0, 1.0), steps(&c, 0.0, 1.0), 1.0, 0.0, 1.0)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn envelopes_are_monotone_bounds(f in prop::collection::vec(-10.0..10.0f64, 1..60)) {
        let u = upper_decreasing_envelope(&f, 0.0).unwrap();
        let l = lower_increasing_envelope(&f, 0.0).unwrap();
        for ((v, hi), lo) in f.iter().zip(&u.values).zip(&l.values) {
            prop_assert!(hi >= v && lo <= v);
        }
        prop_assert!(u.values.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(l.values.windows(2).all(|w| w[1] >= w[0]));
        prop_assert_eq!(u.values.last(), f.last());
        prop_assert_eq!(l.values.last(), f.last());
        prop_assert_eq!(&upper_decreasing_envelope(&u.values, 0.0).unwrap().values, &u.values);
        let neg: Vec<f64> = f.iter().map(|v| -v).collect();
        let mirrored: Vec<f64> = upper_decreasing_envelope(&neg, 0.0).unwrap().values.iter().map(|v| -v).collect();
        prop_assert_eq!(&mirrored, &l.values);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn potential_is_monotone_in_space(c in -1.5..1.5f64, amp in 0.0..0.9f64) {
        let s = drift_scenario(c, amp, BoundaryData::constant(1.0, 1.0, 0.0, 1.0));
        let f = field(&s, 33);
        let q = build_potential(&f, None, &f.grid).unwrap();
        prop_assert!(q.values.rows().into_iter().all(|r| r.as_slice().unwrap().windows(2).all(|w| w[1] >= w[0])));
        prop_assert_eq!(q.monotone_repair, 0.0);
    }

    #[test]
    fn solution_stays_in_data_range(c in -1.5..1.5f64, amp in 0.0..0.9f64, data in data_strategy()) {
        let s = drift_scenario(c, amp, data.clone());
        let f = field(&s, 33);
        let q = build_potential(&f, None, &f.grid).unwrap();
        let sol = solve(&q, &f, &data, &f.grid).unwrap();
        let (lo, hi) = data.range();
        prop_assert!(sol.theta.iter().all(|&v| v >= lo - 1e-12 && v <= hi + 1e-12));
        prop_assert!(sol.theta.iter().all(|v| v.abs() <= sol.linf_bound + 1e-12));
    }

    #[test]
    fn solve_is_deterministic(c in -1.5..1.5f64, data in data_strategy()) {
        let s = drift_scenario(c, 0.5, data.clone());
        let f = field(&s, 33);
        let q = build_potential(&f, None, &f.grid).unwrap();
        let a = solve(&q, &f, &data, &f.grid).unwrap();
        let b = solve(&q, &f, &data, &f.grid).unwrap();
        prop_assert!(a.theta.iter().zip(b.theta.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
        prop_assert!(a.q_tilde.values.iter().zip(b.q_tilde.values.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}
