use std::f64::consts::{FRAC_PI_2, PI};

use damped_search::blochmap::{kraus_step, trajectory, BlochState, DampedMap, SearchSpace};
use damped_search::cost::{damped_expected_calls_fixed, undamped_expected_calls};
use damped_search::fullsim::{simulate, FullState};
use damped_search::spectral::{eigenvalues, EigenTriple};
use proptest::prelude::*;

fn theta_strategy() -> impl Strategy<Value = f64> {
    1e-4..(PI - 1e-4)
}

fn phi_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), Just(FRAC_PI_2), 0.0..=FRAC_PI_2]
}

/// A physical unflipped state: `t ∈ (0, 1]`, `(x, z)` inside the disc of radius `t`.
fn state_strategy() -> impl Strategy<Value = BlochState> {
    (1e-3..=1.0f64, 0.0..=1.0f64, 0.0..(2.0 * PI)).prop_map(|(t, r, a)| {
        let r = r * t;
        BlochState::new(r * a.cos(), r * a.sin(), t)
    })
}

fn space_strategy(max_n: u64) -> impl Strategy<Value = SearchSpace> {
    (2..=max_n)
        .prop_flat_map(|n| (Just(n), 1..n))
        .prop_map(|(n, m)| SearchSpace::new(n, m).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn determinant_is_cos_cubed(theta in theta_strategy(), phi in phi_strategy()) {
        let map = DampedMap::new(theta, phi).unwrap();
        prop_assert!((map.determinant() - phi.cos().powi(3)).abs() <= 1e-12);
    }

    #[test]
    fn matrix_agrees_with_kraus(theta in theta_strategy(), phi in phi_strategy(), s in state_strategy()) {
        let via_matrix = DampedMap::new(theta, phi).unwrap().apply(&s);
        let (via_kraus, flip) = kraus_step(&s, theta, phi).unwrap();
        prop_assert!(via_matrix.max_abs_diff(&via_kraus) <= 1e-12);
        prop_assert!((flip - phi.sin().powi(2) * s.target_population()).abs() <= 1e-12);
        prop_assert!((via_kraus.t + flip - s.t).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn eigenvalue_identities(theta in theta_strategy(), phi in phi_strategy()) {
        let map = DampedMap::new(theta, phi).unwrap();
        let e: EigenTriple = eigenvalues(&map);
        prop_assert!(e.is_conjugate_closed(1e-12));
        prop_assert!((e.product().re - phi.cos().powi(3)).abs() <= 1e-10);
        prop_assert!(e.product().im.abs() <= 1e-10);
        prop_assert!((e.sum().re - map.matrix().trace()).abs() <= 1e-10);
        prop_assert!(e.sum().im.abs() <= 1e-10);
        for l in e.values() {
            prop_assert!(l.norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn trajectories_stay_physical(space in space_strategy(100_000), phi in phi_strategy(), steps in 1usize..400) {
        let traj = trajectory(&space, phi, steps).unwrap();
        for w in traj.windows(2) {
            prop_assert!(w[1].t <= w[0].t + 1e-14);
            let drained = phi.sin().powi(2) * w[0].target_population();
            prop_assert!((w[0].t - w[1].t - drained).abs() <= 1e-14);
        }
        // scaled by t so the squares cannot underflow
        for s in traj.iter().filter(|s| s.t >= f64::MIN_POSITIVE) {
            prop_assert!((s.x / s.t).powi(2) + (s.z / s.t).powi(2) <= 1.0 + 1e-12);
            prop_assert!(s.t - s.z >= -1e-12);
        }
    }

    #[test]
    fn flip_mass_accounts_for_lost_trace(space in space_strategy(100_000), phi in phi_strategy(), steps in 1usize..400) {
        let mut s = BlochState::initial(&space);
        let mut flipped = 0.0;
        for _ in 0..steps {
            let (next, q) = kraus_step(&s, space.theta(), phi).unwrap();
            prop_assert!(q >= -1e-15);
            flipped += q;
            s = next;
        }
        prop_assert!((flipped + s.t - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn zero_damping_reduces_to_baseline(space in space_strategy(5_000)) {
        let fixed = damped_expected_calls_fixed(&space, 0.0).unwrap();
        let base = undamped_expected_calls(&space);
        prop_assert!((fixed.expected_calls - base.expected_calls).abs() <= 1e-12 * base.expected_calls.max(1.0));
        prop_assert_eq!(fixed.best_r, base.best_r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn state_vector_matches_reduced_map(
        (n, m) in (2usize..=96).prop_flat_map(|n| (Just(n), 1..n)),
        phi in phi_strategy(),
        seed in any::<u64>(),
    ) {
        let space = SearchSpace::new(n as u64, m as u64).unwrap();
        let mut state = FullState::initial_random(n, m, seed).unwrap();
        let (full, flips) = simulate(&mut state, &[phi], 30).unwrap();
        let reduced = trajectory(&space, phi, 30).unwrap();
        for (f, r) in full.iter().zip(&reduced) {
            prop_assert!(f.max_abs_diff(r) <= 1e-10);
        }
        prop_assert!(state.y_component().abs() <= 1e-12);
        prop_assert!(state.span_residual() <= 1e-10);
        for q in flips {
            prop_assert!((0.0..=1.0 + 1e-12).contains(&q));
        }
    }

    #[test]
    fn target_placement_does_not_matter(
        (n, m) in (3usize..=64).prop_flat_map(|n| (Just(n), 1..n)),
        phi in phi_strategy(),
        seeds in (any::<u64>(), any::<u64>()),
    ) {
        let mut a = FullState::initial_random(n, m, seeds.0).unwrap();
        let mut b = FullState::initial_random(n, m, seeds.1).unwrap();
        let (ta, _) = simulate(&mut a, &[phi], 20).unwrap();
        let (tb, _) = simulate(&mut b, &[phi], 20).unwrap();
        for (x, y) in ta.iter().zip(&tb) {
            prop_assert!(x.max_abs_diff(y) <= 1e-12);
        }
    }

    #[test]
    fn factored_operator_matches(
        (n, m) in (2usize..=32).prop_flat_map(|n| (Just(n), 1..n)),
        phi in phi_strategy(),
        seed in any::<u64>(),
    ) {
        let mut a = FullState::initial_random(n, m, seed).unwrap();
        let mut b = a.clone();
        for _ in 0..5 {
            a.apply_u(phi);
            b.apply_u_factored(phi);
        }
        let d = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(d <= 1e-12);
    }
}
