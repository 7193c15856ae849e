use std::time::Instant;

use ddtea_core::dynamics::{evolve_closed_form, evolve_rk4, OrbitState, ThieleParams};

#[test]
fn closed_form_matches_rk4_on_parameter_grid() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for alpha in [-2e8, -0.5e8, 0.5e8, 2e8] {
        for beta in [-8e8, -1e8] {
            for n in [1.0, 2.0, 3.0] {
                let p = ThieleParams::new(alpha, beta, n).unwrap();
                for s0 in [0.01, 0.1, 0.5] {
                    for dt in [1e-9, 10e-9, 100e-9] {
                        let s0 = OrbitState::new(s0).unwrap();
                        let exact = evolve_closed_form(&p, s0, dt).unwrap().get();
                        let rk = evolve_rk4(&p, s0, dt, dt / 1e6).unwrap().get();
                        let rel = (exact - rk).abs() / rk.max(1e-12);
                        assert!(
                            rel <= 1e-8,
                            "{alpha} {beta} {n} {s0:?} {dt}: {exact} vs {rk}"
                        );
                        worst = worst.max(rel);
                        count += 1;
                    }
                }
            }
        }
    }
    assert_eq!(count, 216);
    println!(
        "worst relative difference {worst:.3e} in {:?}",
        start.elapsed()
    );
}
