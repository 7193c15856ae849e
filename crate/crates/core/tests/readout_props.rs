use ddtea_core::readout::{evaluate, predict, score, train_ridge};
use ddtea_core::reservoir::StateMatrix;
use ddtea_core::rng::{derive, CounterRng};
use proptest::prelude::*;

fn random_problem(rows: usize, cols: usize, seed: u64) -> (StateMatrix, Vec<f64>) {
    let features = CounterRng::new(derive(seed, 1));
    let labels = CounterRng::new(derive(seed, 2));
    let data: Vec<f64> = (0..rows * cols)
        .map(|i| features.normal(i as u64))
        .collect();
    let y = (0..rows)
        .map(|r| {
            if labels.uniform(r as u64) < 0.5 {
                0.0
            } else {
                1.0
            }
        })
        .collect();
    (StateMatrix::from_rows(rows, cols, data), y)
}

fn objective(x: &StateMatrix, y: &[f64], w: &[f64], lambda: f64) -> f64 {
    let preds = predict(&ddtea_core::ReadoutWeights { w: w.to_vec() }, x).unwrap();
    let sse: f64 = preds.iter().zip(y).map(|(p, t)| (p - t) * (p - t)).sum();
    let penalized = if x.has_bias() { &w[..w.len() - 1] } else { w };
    sse + lambda * penalized.iter().map(|v| v * v).sum::<f64>()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]


    #[test]
    fn ridge_is_a_minimizer(seed in any::<u64>(), cols in 1usize..8, lambda in 1e-6..10.0f64, bias in any::<bool>()) {
        let (x, y) = random_problem(60, cols, seed);
        let x = if bias { x.with_bias_column() } else { x };
        let w = train_ridge(&x, &y, lambda).unwrap().w;
        let best = objective(&x, &y, &w, lambda);
        for i in 0..w.len() {
            for step in [1e-4, -1e-4] {
                let mut moved = w.clone();
                moved[i] += step;
                prop_assert!(objective(&x, &y, &moved, lambda) >= best);
            }
        }
    }

    #[test]
    fn least_squares_residual_is_orthogonal(seed in any::<u64>(), cols in 1usize..8, bias in any::<bool>()) {
        let (x, y) = random_problem(50, cols, seed);
        let x = if bias { x.with_bias_column() } else { x };
        let w = train_ridge(&x, &y, 0.0).unwrap();
        let preds = predict(&w, &x).unwrap();
        for c in 0..x.cols() {
            let dot: f64 = (0..x.rows()).map(|r| x.get(r, c) * (y[r] - preds[r])).sum();
            prop_assert!(dot.abs() <= 1e-8, "column {}: {}", c, dot);
        }
    }

    #[test]
    fn evaluate_ignores_row_order(seed in any::<u64>(), shift in 1usize..40) {
        let (raw, y) = random_problem(40, 5, seed);
        let x = raw.with_bias_column();
        let w = train_ridge(&x, &y, 1e-3).unwrap();
        let order: Vec<usize> = (0..40).map(|r| (r * 7 + shift) % 40).collect();
        let data: Vec<f64> = order.iter().flat_map(|&r| raw.row(r).to_vec()).collect();
        let permuted = StateMatrix::from_rows(40, raw.cols(), data).with_bias_column();
        let y_perm: Vec<f64> = order.iter().map(|&r| y[r]).collect();
        let a = evaluate(&w, &x, &y).unwrap();
        let b = evaluate(&w, &permuted, &y_perm).unwrap();
        prop_assert_eq!(a.accuracy, b.accuracy);
        prop_assert!((a.rmse - b.rmse).abs() <= 1e-15 * a.rmse.max(1.0));
    }
}

#[test]
fn random_features_give_chance_accuracy() {
    let (x, y) = random_problem(20_000, 8, 17);
    let x = x.with_bias_column();
    let train = x.select_rows(0..10_000);
    let test = x.select_rows(10_000..20_000);
    let w = train_ridge(&train, &y[..10_000], 1e-6).unwrap();
    let m = evaluate(&w, &test, &y[10_000..]).unwrap();
    assert!((m.accuracy - 0.5).abs() <= 0.05, "{}", m.accuracy);
    let constant = score(&[0.5; 4], &[0.0, 1.0, 1.0, 0.0]).unwrap();
    assert_eq!(constant.accuracy, 0.5);
}
