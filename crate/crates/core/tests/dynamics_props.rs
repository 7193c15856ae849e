use ddtea_core::dynamics::{
    evolve_closed_form, evolve_rk4, steady_state, trace, OrbitState, ThieleParams,
};
use proptest::prelude::*;

/// Fixed-step RK4 written out independently of the library integrator.
fn reference_rk4(alpha: f64, beta: f64, n: f64, s0: f64, dt: f64, steps: u64) -> f64 {
    let f = |s: f64| alpha * s + beta * s * s.abs().powf(n);
    let h = dt / steps as f64;
    let mut s = s0;
    for _ in 0..steps {
        let k1 = f(s);
        let k2 = f(s + 0.5 * h * k1);
        let k3 = f(s + 0.5 * h * k2);
        let k4 = f(s + h * k3);
        s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    s
}

fn orbit(s: f64) -> OrbitState {
    OrbitState::new(s).unwrap()
}

#[test]
fn oracle_grid_small_sample_against_reference() {
    // independent reference on a few grid corners at step dt/10^5
    for &(a, b, n, s0, dt) in &[
        (2e8, -8e8, 1.0, 0.01, 100e-9),
        (-0.5e8, -1e8, 3.0, 0.5, 10e-9),
        (0.5e8, -1e8, 2.0, 0.1, 1e-9),
        (-2e8, -8e8, 2.0, 0.5, 100e-9),
    ] {
        let p = ThieleParams::new(a, b, n).unwrap();
        let exact = evolve_closed_form(&p, orbit(s0), dt).unwrap().get();
        let rk = reference_rk4(a, b, n, s0, dt, 100_000);
        assert!(
            (exact - rk).abs() / rk.max(1e-12) <= 1e-8,
            "{a} {b} {n} {s0} {dt}: {exact} vs {rk}"
        );
    }
}

#[test]
fn blow_up_time_matches_bisection() {
    let cases = [
        (1.0, 1.0, 2.0, 1.0),
        (-1e8, 4e8, 2.0, 0.6),
        (0.0, 2e8, 1.0, 0.3),
        (3e7, 1e8, 1.5, 0.2),
    ];
    for &(a, b, n, s0) in &cases {
        let p = ThieleParams::new(a, b, n).unwrap();
        let t_star = match evolve_closed_form(&p, orbit(s0), 1e3) {
            Err(ddtea_core::DynamicsError::BlowUp { t_star }) => t_star,
            other => panic!("{other:?}"),
        };
        // bisect on whether the closed form still returns a finite orbit
        let finite = |t: f64| evolve_closed_form(&p, orbit(s0), t).is_ok();
        let (mut lo, mut hi) = (0.0, 1e3);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if finite(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!(
            (hi - t_star).abs() <= 1e-9 * t_star,
            "{a} {b}: {hi} vs {t_star}"
        );
        // an independent fine RK4 is past 1e6 shortly after t* and still bounded before it
        let steps = 2_000_000;
        let before = reference_rk4(a, b, n, s0, 0.99 * t_star, steps);
        assert!(before.is_finite() && before < 1e6);
        let after = reference_rk4(a, b, n, s0, 1.01 * t_star, steps);
        assert!(after.is_nan() || after >= 1e6, "{after}");
    }
    let p = ThieleParams::new(1.0, 1.0, 2.0).unwrap();
    match evolve_closed_form(&p, orbit(1.0), 1.0) {
        Err(ddtea_core::DynamicsError::BlowUp { t_star }) => {
            assert!((t_star - std::f64::consts::LN_2 / 2.0).abs() < 1e-12)
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn limit_branch_is_continuous() {
    for &(beta, n, s0, t) in &[
        (-4.0, 2.0, 0.5, 1.5),
        (-2e8, 2.0, 0.3, 50e-9),
        (3.0, 1.5, 0.2, 0.1),
    ] {
        let probe = ThieleParams::new(0.0, beta, n).unwrap();
        let eps = probe.alpha_threshold(s0);
        let limit = evolve_closed_form(&probe, orbit(s0), t).unwrap().get();
        for alpha in [eps, -eps, 1.0001 * eps, -1.0001 * eps] {
            let p = ThieleParams::new(alpha, beta, n).unwrap();
            let s = evolve_closed_form(&p, orbit(s0), t).unwrap().get();
            assert!(
                (s - limit).abs() / limit <= 1e-6,
                "alpha {alpha}: {s} vs {limit}"
            );
        }
    }
}

#[test]
fn attractor_convergence() {
    for &(a, b, n) in &[
        (0.5e8, -1e8, 1.0),
        (2e8, -8e8, 2.0),
        (0.5e8, -8e8, 3.0),
        (1.0, -4.0, 2.5),
    ] {
        let p = ThieleParams::new(a, b, n).unwrap();
        let target = steady_state(&p).unwrap().unwrap().get();
        let horizon = 40.0 / (n * a);
        for s0 in [0.01, 0.1, 0.5, 2.0] {
            let s = evolve_closed_form(&p, orbit(s0), horizon).unwrap().get();
            assert!(
                (s - target).abs() <= 1e-9,
                "{a} {b} {n} {s0}: {s} vs {target}"
            );
        }
    }
}

#[test]
fn monotone_approach() {
    let p = ThieleParams::new(1e8, -4e8, 2.0).unwrap();
    let grid: Vec<f64> = (0..200).map(|k| k as f64 * 1e-9).collect();
    let up = trace(&p, orbit(0.05), &grid).unwrap();
    assert!(up.windows(2).all(|w| w[1] >= w[0]));
    assert!(up[..40].windows(2).all(|w| w[1] > w[0]));
    let down = trace(&p, orbit(0.9), &grid).unwrap();
    assert!(down.windows(2).all(|w| w[1] <= w[0]));
    assert!(down[..40].windows(2).all(|w| w[1] < w[0]));
    assert!(up.iter().all(|s| (0.05..=0.5).contains(&s.get())));
    assert!(down.iter().all(|s| (0.5..=0.9).contains(&s.get())));
}

#[test]
fn time_scale_covariance_is_exact() {
    for k in [0.25, 2.0, 1024.0] {
        for &(a, b, n, s0, dt) in &[
            (1e8, -4e8, 2.0, 0.1, 7e-9),
            (-3e7, -1e8, 1.5, 0.4, 30e-9),
            (0.0, -2e8, 2.0, 0.2, 5e-9),
        ] {
            let p = ThieleParams::new(a, b, n).unwrap();
            let q = ThieleParams::new(k * a, k * b, n).unwrap();
            let s1 = evolve_closed_form(&p, orbit(s0), dt).unwrap().get();
            let s2 = evolve_closed_form(&q, orbit(s0), dt / k).unwrap().get();
            assert_eq!(s1, s2);
        }
    }
}

fn bounded_params() -> impl Strategy<Value = (f64, f64, f64)> {
    (-2e8..2e8f64, -8e8..-1e6f64, 0.5..3.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn semigroup((a, b, n) in bounded_params(), s0 in 1e-3..0.9f64, t1 in 0.0..100e-9f64, t2 in 0.0..100e-9f64) {
        let p = ThieleParams::new(a, b, n).unwrap();
        let direct = evolve_closed_form(&p, orbit(s0), t1 + t2).unwrap().get();
        let mid = evolve_closed_form(&p, orbit(s0), t1).unwrap();
        let chained = evolve_closed_form(&p, mid, t2).unwrap().get();
        prop_assume!(direct > 1e-250);
        prop_assert!((chained - direct).abs() / direct <= 1e-12, "{} vs {}", chained, direct);
    }

    #[test]
    fn closed_form_stays_finite_and_non_negative((a, b, n) in bounded_params(), s0 in 0.0..5.0f64, dt in 0.0..1e-6f64) {
        let p = ThieleParams::new(a, b, n).unwrap();
        let s = evolve_closed_form(&p, orbit(s0), dt).unwrap().get();
        prop_assert!(s.is_finite() && s >= 0.0);
    }

    #[test]
    fn centre_is_fixed_under_both_integrators(a in -1e8..1e8f64, b in -1e8..1e8f64, n in 0.5..4.0f64, dt in 1e-9..1e-7f64) {
        let p = ThieleParams::new(a, b, n).unwrap();
        prop_assert_eq!(evolve_closed_form(&p, OrbitState::CENTER, dt).unwrap().get(), 0.0);
        prop_assert_eq!(evolve_rk4(&p, OrbitState::CENTER, dt, dt / 10.0).unwrap().get(), 0.0);
    }
}
