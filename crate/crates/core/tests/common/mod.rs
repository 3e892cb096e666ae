#![allow(dead_code)]

use gpcg::{BoundQP, CsrMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const INF: f64 = f64::INFINITY;

/// `MᵀM + shift·I` for a random square `M`.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize, shift: f64) -> Vec<Vec<f64>> {
    let m: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = (0..n).map(|k| m[k][i] * m[k][j]).sum::<f64>();
        }
        a[i][i] += shift;
    }
    a
}

/// Random SPD instance with each bound independently finite or infinite and an occasional
/// fixed variable.
pub fn random_bounded_qp(rng: &mut ChaCha8Rng, n: usize) -> BoundQP {
    let a = random_spd(rng, n, 0.2);
    let b: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    for _ in 0..n {
        let l = if rng.random_bool(0.7) { rng.random_range(-1.0..0.0) } else { -INF };
        let u = if rng.random_bool(0.7) { rng.random_range(0.0..1.0) } else { INF };
        if rng.random_bool(0.05) && l.is_finite() {
            lo.push(l);
            hi.push(l);
        } else {
            lo.push(l);
            hi.push(u);
        }
    }
    BoundQP::new(CsrMatrix::from_dense(&a).unwrap(), b, 0.0, lo, hi).unwrap()
}

pub fn max_abs_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}
