use sew_core::corpus::XorShift64Star;
use sew_core::evalkit::{loss_and_gradient, LinearModel};

fn uniform(rng: &mut XorShift64Star) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Central differences on the loss alone.
fn numeric_gradient(model: &LinearModel, xs: &[Vec<f64>], ys: &[u8], l2: f64) -> Vec<f64> {
    let h = 1e-5;
    let loss = |m: &LinearModel| loss_and_gradient(m, xs, ys, l2).0;
    let mut grad = Vec::new();
    for i in 0..=model.weights.len() {
        let mut plus = model.clone();
        let mut minus = model.clone();
        if i < model.weights.len() {
            plus.weights[i] += h;
            minus.weights[i] -= h;
        } else {
            plus.bias += h;
            minus.bias -= h;
        }
        grad.push((loss(&plus) - loss(&minus)) / (2.0 * h));
    }
    grad
}

#[test]
fn analytic_gradient_at_zero() {
    // At w = 0 every prediction is 0.5: grad_w = mean((0.5 - y) x), grad_b = mean(0.5 - y).
    let xs = vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![1.0, 1.0]];
    let ys = vec![1, 0, 1];
    let model = LinearModel::zeros(2, 1, 2);
    let (loss, gw, gb) = loss_and_gradient(&model, &xs, &ys, 0.0);
    assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
    let expected_w = [(-0.5 + 0.0 - 0.5) / 3.0, (0.0 + 1.0 - 0.5) / 3.0];
    assert!((gw[0] - expected_w[0]).abs() < 1e-15);
    assert!((gw[1] - expected_w[1]).abs() < 1e-15);
    assert!((gb - (-0.5 + 0.5 - 0.5) / 3.0).abs() < 1e-15);
}

#[test]
fn matches_finite_differences() {
    let mut rng = XorShift64Star::new(11);
    for _ in 0..50 {
        let dim = 1 + (rng.next_u64() % 6) as usize;
        let n = 2 + (rng.next_u64() % 10) as usize;
        let xs: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| uniform(&mut rng)).collect())
            .collect();
        let ys: Vec<u8> = (0..n).map(|_| (rng.next_u64() % 2) as u8).collect();
        let mut model = LinearModel::zeros(dim, 1, 1);
        for w in &mut model.weights {
            *w = 4.0 * uniform(&mut rng) - 2.0;
        }
        model.bias = uniform(&mut rng) - 0.5;
        let l2 = 0.1 * uniform(&mut rng);
        let (_, gw, gb) = loss_and_gradient(&model, &xs, &ys, l2);
        let analytic: Vec<f64> = gw.into_iter().chain(std::iter::once(gb)).collect();
        let numeric = numeric_gradient(&model, &xs, &ys, l2);
        for (a, f) in analytic.iter().zip(&numeric) {
            let rel = (a - f).abs() / a.abs().max(f.abs()).max(1e-6);
            assert!(rel < 1e-6, "analytic {a} vs numeric {f}");
        }
    }
}
