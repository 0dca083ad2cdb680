//! Statistical checks of the random graph models.

use gmatch::random::*;
use gmatch::{AdjacencyMatrix, CorrelatedPairSpec, LambdaSource};
use ndarray::Array2;

fn upper_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

fn pooled_correlation(a: &AdjacencyMatrix, b: &AdjacencyMatrix) -> f64 {
    let n = a.n();
    let xs: Vec<(f64, f64)> = upper_pairs(n)
        .map(|(i, j)| (a.entries()[[i, j]], b.entries()[[i, j]]))
        .collect();
    let m = xs.len() as f64;
    let mx = xs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = xs.iter().map(|p| p.1).sum::<f64>() / m;
    let cov: f64 = xs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let vx: f64 = xs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let vy: f64 = xs.iter().map(|p| (p.1 - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

#[test]
fn lambda_band_mean() {
    let mut rng = stream_rng(21, 0);
    let l = sample_lambda_uniform(150, 0.1, &mut rng).unwrap();
    let vals: Vec<f64> = upper_pairs(150).map(|(i, j)| l[[i, j]]).collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
    assert!(vals.iter().all(|&v| (0.1..=0.9).contains(&v)));
    assert!(l.diag().iter().all(|&v| v == 0.0));
    assert_eq!(l, l.t());
}

#[test]
fn correlation_matches_rho_under_constant_lambda() {
    let n = 200;
    let half = Array2::from_shape_fn((n, n), |(i, j)| if i == j { 0.0 } else { 0.5 });
    for (k, rho) in [0.0, 0.3, 0.6, 0.9].into_iter().enumerate() {
        let spec = CorrelatedPairSpec {
            n,
            rho,
            lambda: LambdaSource::Explicit(half.clone()),
            rng_seed: 100 + k as u64,
            directed: false,
        };
        let (a, b) = spec.sample().unwrap();
        let r = pooled_correlation(&a, &b);
        assert!((r - rho).abs() < 0.05, "rho {rho}: r {r}");
    }
}

#[test]
fn rho_zero_with_random_lambda_correlates_only_through_lambda() {
    // Conditionally on Λ the graphs are independent; pooled over pairs the
    // shared Λ leaves correlation Var(Λ) / (E[Λ](1 − E[Λ])) = (0.8²/12) / 0.25.
    let expected = 0.8f64.powi(2) / 12.0 / 0.25;
    let (a, b) = CorrelatedPairSpec::uniform(150, 0.0, 0.1, 3).sample().unwrap();
    let r = pooled_correlation(&a, &b);
    assert!((r - expected).abs() < 0.05, "r {r} vs {expected}");
}

#[test]
fn marginals_follow_lambda() {
    let n = 12;
    let mut rng = stream_rng(22, 0);
    let lambda = sample_lambda_uniform(n, 0.1, &mut rng).unwrap();
    let draws = 500;
    let mut count_a = Array2::<f64>::zeros((n, n));
    let mut count_b = Array2::<f64>::zeros((n, n));
    let spec = CorrelatedPairSpec {
        n,
        rho: 0.5,
        lambda: LambdaSource::Explicit(lambda.clone()),
        rng_seed: 0,
        directed: false,
    };
    for _ in 0..draws {
        let (a, b) = sample_correlated_pair(&spec, &mut rng).unwrap();
        count_a += a.entries();
        count_b += b.entries();
    }
    for (i, j) in upper_pairs(n).take(20) {
        let p = lambda[[i, j]];
        let se = (p * (1.0 - p) / draws as f64).sqrt();
        for count in [&count_a, &count_b] {
            let freq = count[[i, j]] / draws as f64;
            assert!((freq - p).abs() < 4.0 * se, "({i},{j}): {freq} vs {p}");
        }
    }
}

#[test]
fn directed_pairs_are_hollow_and_asymmetric() {
    let spec = CorrelatedPairSpec {
        directed: true,
        ..CorrelatedPairSpec::uniform(60, 0.5, 0.1, 9)
    };
    let (a, b) = spec.sample().unwrap();
    for g in [&a, &b] {
        assert!(g.is_hollow() && g.is_binary() && g.is_directed());
        assert!(!g.is_symmetric());
    }
}

fn survival_slope(deg: &[f64]) -> f64 {
    let n = deg.len() as f64;
    let mut levels: Vec<usize> = deg.iter().map(|&d| d as usize).filter(|&d| d > 0).collect();
    levels.sort_unstable();
    levels.dedup();
    let pts: Vec<(f64, f64)> = levels
        .iter()
        .map(|&d| {
            let frac = deg.iter().filter(|&&x| x as usize >= d).count() as f64 / n;
            ((d as f64).ln(), frac.ln())
        })
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn power_law_survival_slope() {
    let mut rng = stream_rng(23, 0);
    let beta = 2.0;
    let mut total = 0.0;
    for _ in 0..50 {
        let g = sample_power_law(150, beta, &mut rng).unwrap();
        assert!(g.is_symmetric() && g.is_hollow() && g.is_binary());
        total += survival_slope(&g.degrees());
    }
    let slope = total / 50.0;
    assert!((slope + (beta - 1.0)).abs() < 0.5, "slope {slope}");
}

#[test]
fn bounded_degree_is_nearly_regular() {
    let mut rng = stream_rng(24, 0);
    let g = sample_bounded_degree(150, 4, &mut rng).unwrap();
    let deg = g.degrees();
    assert!(deg.iter().all(|&d| d <= 4.0));
    let mean = deg.iter().sum::<f64>() / 150.0;
    assert!(mean > 3.8, "mean degree {mean}");
    let big = sample_bounded_degree(350, 4, &mut rng).unwrap();
    assert!(big.degrees().iter().all(|&d| d <= 4.0));
}

#[test]
fn bit_flip_fraction() {
    let mut rng = stream_rng(25, 0);
    let (g, _) = CorrelatedPairSpec::uniform(150, 0.0, 0.1, 4).sample().unwrap();
    let flipped = bit_flip(&g, 0.3, &mut rng).unwrap();
    let pairs = upper_pairs(150).count() as f64;
    let changed = upper_pairs(150)
        .filter(|&(i, j)| g.entries()[[i, j]] != flipped.entries()[[i, j]])
        .count() as f64;
    assert!((changed / pairs - 0.3).abs() < 0.03);
    assert!(flipped.is_symmetric() && flipped.is_hollow());
}
