//! Random graph models: ρ-correlated Bernoulli(Λ) pairs, Chung-Lu power-law
//! graphs, bounded-degree graphs, bit-flip corruption and vertex features.
//!
//! Every sampler takes an explicit RNG. [`stream_rng`] derives independent
//! reproducible ChaCha8 streams from a `(seed, stream)` pair.

use ndarray::{Array2, Axis};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{check_dim, Error, Result};
use crate::matrix::{AdjacencyMatrix, Permutation};

/// Mean degree targeted by [`sample_power_law`].
pub const POWER_LAW_MEAN_DEGREE: f64 = 8.0;

/// The generator used for every experiment: ChaCha8 keyed by `seed`, on
/// stream `stream`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub enum LambdaSource {
    /// Edge probabilities given directly; hollow, entries in `[0, 1]`,
    /// symmetric for undirected pairs.
    Explicit(Array2<f64>),
    /// I.i.d. Uniform[α, 1 − α] edge probabilities.
    UniformBand(f64),
}

/// One draw of the ρ-correlated Bernoulli(Λ) model.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatedPairSpec {
    pub n: usize,
    pub rho: f64,
    pub lambda: LambdaSource,
    pub rng_seed: u64,
    pub directed: bool,
}

impl CorrelatedPairSpec {
    pub fn uniform(n: usize, rho: f64, alpha: f64, rng_seed: u64) -> Self {
        Self {
            n,
            rho,
            lambda: LambdaSource::UniformBand(alpha),
            rng_seed,
            directed: false,
        }
    }

    /// Samples from a fresh generator seeded with `rng_seed`.
    pub fn sample(&self) -> Result<(AdjacencyMatrix, AdjacencyMatrix)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        sample_correlated_pair(self, &mut rng)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 0.5 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha {alpha} outside (0, 1/2]")))
    }
}

fn band(alpha: f64, u: f64) -> f64 {
    alpha + (1.0 - 2.0 * alpha) * u
}

/// Symmetric hollow Λ with upper-triangle entries i.i.d. Uniform[α, 1 − α].
/// `α = 1/2` is accepted as the degenerate band.
pub fn sample_lambda_uniform<R: Rng + ?Sized>(n: usize, alpha: f64, rng: &mut R) -> Result<Array2<f64>> {
    check_alpha(alpha)?;
    let mut l = Array2::zeros((n, n));
    for i in 0..n {
        for j in i + 1..n {
            let v = band(alpha, rng.random::<f64>());
            l[[i, j]] = v;
            l[[j, i]] = v;
        }
    }
    Ok(l)
}

/// Hollow Λ with every off-diagonal entry i.i.d. Uniform[α, 1 − α].
pub fn sample_lambda_uniform_directed<R: Rng + ?Sized>(
    n: usize,
    alpha: f64,
    rng: &mut R,
) -> Result<Array2<f64>> {
    check_alpha(alpha)?;
    Ok(Array2::from_shape_fn((n, n), |(i, j)| {
        if i == j {
            0.0
        } else {
            band(alpha, rng.random::<f64>())
        }
    }))
}

fn validate_lambda(l: &Array2<f64>, n: usize, directed: bool) -> Result<()> {
    check_dim(n, l.nrows())?;
    check_dim(n, l.ncols())?;
    if l.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
        return Err(Error::Domain("Λ entries must lie in [0, 1]".into()));
    }
    if l.diag().iter().any(|&v| v != 0.0) {
        return Err(Error::Domain("Λ must be hollow".into()));
    }
    if !directed && (0..n).any(|i| (0..i).any(|j| l[[i, j]] != l[[j, i]])) {
        return Err(Error::Domain("Λ must be symmetric for undirected pairs".into()));
    }
    Ok(())
}

/// Draws `B ~ Bernoulli(Λ)` and then, conditionally on `B`,
/// `A ~ Bernoulli((1 − ρ)Λ + ρB)`, entry by entry.
pub fn sample_correlated_pair<R: Rng + ?Sized>(
    spec: &CorrelatedPairSpec,
    rng: &mut R,
) -> Result<(AdjacencyMatrix, AdjacencyMatrix)> {
    let n = spec.n;
    if !(0.0..=1.0).contains(&spec.rho) {
        return Err(Error::Domain(format!("rho {} outside [0, 1]", spec.rho)));
    }
    let lambda = match &spec.lambda {
        LambdaSource::Explicit(l) => {
            validate_lambda(l, n, spec.directed)?;
            l.clone()
        }
        LambdaSource::UniformBand(alpha) if spec.directed => sample_lambda_uniform_directed(n, *alpha, rng)?,
        LambdaSource::UniformBand(alpha) => sample_lambda_uniform(n, *alpha, rng)?,
    };

    let rho = spec.rho;
    let mut a = Array2::zeros((n, n));
    let mut b = Array2::zeros((n, n));
    let draw = |i: usize, j: usize, rng: &mut R| {
        let p = lambda[[i, j]];
        let bij = if rng.random::<f64>() < p { 1.0 } else { 0.0 };
        let q = (1.0 - rho) * p + rho * bij;
        let aij = if rng.random::<f64>() < q { 1.0 } else { 0.0 };
        (aij, bij)
    };
    for i in 0..n {
        if spec.directed {
            for j in 0..n {
                if i != j {
                    let (x, y) = draw(i, j, rng);
                    a[[i, j]] = x;
                    b[[i, j]] = y;
                }
            }
        } else {
            for j in i + 1..n {
                let (x, y) = draw(i, j, rng);
                a[[i, j]] = x;
                a[[j, i]] = x;
                b[[i, j]] = y;
                b[[j, i]] = y;
            }
        }
    }
    Ok((
        AdjacencyMatrix::new(a, spec.directed)?,
        AdjacencyMatrix::new(b, spec.directed)?,
    ))
}

/// Undirected simple graph with independent edges `P(i~j) = w_i w_j / Σw`.
pub fn sample_chung_lu<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Result<AdjacencyMatrix> {
    let n = weights.len();
    if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
        return Err(Error::Domain(
            "Chung-Lu weights must be finite and nonnegative".into(),
        ));
    }
    let total: f64 = weights.iter().sum();
    let mut m = Array2::zeros((n, n));
    if total > 0.0 {
        for i in 0..n {
            for j in i + 1..n {
                let p = (weights[i] * weights[j] / total).min(1.0);
                if rng.random::<f64>() < p {
                    m[[i, j]] = 1.0;
                    m[[j, i]] = 1.0;
                }
            }
        }
    }
    AdjacencyMatrix::new(m, false)
}

/// Expected-degree weights `w_i ∝ (i + i₀)^{−1/(β−1)}` with mean
/// `mean_degree`, where the offset `i₀ ≥ 1` is the smallest keeping
/// `w_max² ≤ Σw` so no pair probability is clipped.
pub fn power_law_weights(n: usize, beta: f64, mean_degree: f64) -> Result<Vec<f64>> {
    if !(beta > 1.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("power-law exponent {beta} must exceed 1")));
    }
    if n < 2 {
        return Err(Error::Domain("power-law graph needs at least 2 vertices".into()));
    }
    if !(mean_degree > 0.0) {
        return Err(Error::Domain("mean degree must be positive".into()));
    }
    let gamma = 1.0 / (beta - 1.0);
    let total = n as f64 * mean_degree.min((n - 1) as f64);
    let shape = |offset: f64| -> Vec<f64> {
        let raw: Vec<f64> = (0..n).map(|i| (i as f64 + offset).powf(-gamma)).collect();
        let s: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w * total / s).collect()
    };
    let fits = |offset: f64| {
        let w = shape(offset);
        w[0] * w[0] <= total
    };
    let (mut lo, mut hi) = (1.0, 1.0);
    if !fits(lo) {
        while !fits(hi) {
            hi *= 2.0;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if fits(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    Ok(shape(hi))
}

/// Power-law graph on `n` vertices with degree exponent `beta`
/// (Chung-Lu model, mean degree [`POWER_LAW_MEAN_DEGREE`]).
pub fn sample_power_law<R: Rng + ?Sized>(n: usize, beta: f64, rng: &mut R) -> Result<AdjacencyMatrix> {
    let weights = power_law_weights(n, beta, POWER_LAW_MEAN_DEGREE)?;
    sample_chung_lu(&weights, rng)
}

/// Adds uniformly random edges among pairs whose endpoints both have degree
/// below `dmax` until no such non-adjacent pair remains.
pub fn sample_bounded_degree<R: Rng + ?Sized>(n: usize, dmax: usize, rng: &mut R) -> Result<AdjacencyMatrix> {
    if dmax == 0 {
        return Err(Error::Domain("maximum degree must be at least 1".into()));
    }
    let mut adj = vec![false; n * n];
    let mut degree = vec![0usize; n];
    let mut open: Vec<usize> = (0..n).collect();
    const REJECTIONS: usize = 64;

    loop {
        let mut added = false;
        if open.len() >= 2 {
            // A uniform pair of open vertices, rejected when adjacent, is a
            // uniform draw from the addable pairs.
            for _ in 0..REJECTIONS {
                let x = rng.random_range(0..open.len());
                let mut y = rng.random_range(0..open.len() - 1);
                if y >= x {
                    y += 1;
                }
                let (u, v) = (open[x], open[y]);
                if !adj[u * n + v] {
                    add_edge(&mut adj, &mut degree, n, u, v);
                    added = true;
                    break;
                }
            }
            if !added {
                let pairs: Vec<(usize, usize)> = open
                    .iter()
                    .enumerate()
                    .flat_map(|(k, &u)| open[k + 1..].iter().map(move |&v| (u, v)))
                    .filter(|&(u, v)| !adj[u * n + v])
                    .collect();
                if !pairs.is_empty() {
                    let (u, v) = pairs[rng.random_range(0..pairs.len())];
                    add_edge(&mut adj, &mut degree, n, u, v);
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
        open.retain(|&v| degree[v] < dmax);
    }

    let m = Array2::from_shape_fn((n, n), |(i, j)| if adj[i * n + j] { 1.0 } else { 0.0 });
    AdjacencyMatrix::new(m, false)
}

fn add_edge(adj: &mut [bool], degree: &mut [usize], n: usize, u: usize, v: usize) {
    adj[u * n + v] = true;
    adj[v * n + u] = true;
    degree[u] += 1;
    degree[v] += 1;
}

/// Which vertex pairs [`bit_flip_with`] may toggle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FlipMode {
    /// Every vertex pair, present or not.
    #[default]
    AllPairs,
    /// Only existing edges, which can then only be deleted.
    EdgesOnly,
}

/// Toggles every vertex pair independently with probability `p`.
pub fn bit_flip<R: Rng + ?Sized>(g: &AdjacencyMatrix, p: f64, rng: &mut R) -> Result<AdjacencyMatrix> {
    bit_flip_with(g, p, FlipMode::AllPairs, rng)
}

pub fn bit_flip_with<R: Rng + ?Sized>(
    g: &AdjacencyMatrix,
    p: f64,
    mode: FlipMode,
    rng: &mut R,
) -> Result<AdjacencyMatrix> {
    if !g.is_binary() {
        return Err(Error::Domain("bit flips need a binary graph".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("flip probability {p} outside [0, 1]")));
    }
    let n = g.n();
    let mut m = g.entries().clone();
    let directed = g.is_directed();
    for i in 0..n {
        let start = if directed { 0 } else { i + 1 };
        for j in start..n {
            if i == j {
                continue;
            }
            if mode == FlipMode::EdgesOnly && m[[i, j]] == 0.0 {
                continue;
            }
            if rng.random::<f64>() < p {
                let v = 1.0 - m[[i, j]];
                m[[i, j]] = v;
                if !directed {
                    m[[j, i]] = v;
                }
            }
        }
    }
    AdjacencyMatrix::new(m, directed)
}

/// `P G P^T`: entry `(i, j)` is `G[map i, map j]`. Drawing graphs with the
/// identity alignment and returning `permute_graph(A, P*)` makes `P*` the
/// true alignment between the result and `B`.
pub fn permute_graph(g: &AdjacencyMatrix, p: &Permutation) -> Result<AdjacencyMatrix> {
    g.permuted(p)
}

/// Per-vertex feature vectors, one row per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    pub vectors: Array2<f64>,
    pub noise_variance: f64,
}

impl FeatureSet {
    pub fn n(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    /// Row `i` of the result is row `map i` of `self`, matching
    /// [`permute_graph`].
    pub fn permuted(&self, p: &Permutation) -> Result<Self> {
        check_dim(self.n(), p.len())?;
        Ok(Self {
            vectors: self.vectors.select(Axis(0), p.as_slice()),
            noise_variance: self.noise_variance,
        })
    }
}

/// `n × d` i.i.d. standard normal features.
pub fn sample_features<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<FeatureSet> {
    if d == 0 {
        return Err(Error::Domain("feature dimension must be at least 1".into()));
    }
    let vectors = Array2::from_shape_fn((n, d), |_| StandardNormal.sample(rng));
    Ok(FeatureSet {
        vectors,
        noise_variance: 0.0,
    })
}

/// Adds independent `N(0, variance)` noise to every entry.
pub fn add_feature_noise<R: Rng + ?Sized>(f: &FeatureSet, variance: f64, rng: &mut R) -> Result<FeatureSet> {
    if !(variance >= 0.0) || !variance.is_finite() {
        return Err(Error::Domain(format!(
            "noise variance {variance} must be nonnegative"
        )));
    }
    let mut vectors = f.vectors.clone();
    if variance > 0.0 {
        let normal = Normal::new(0.0, variance.sqrt()).expect("valid std dev");
        vectors.mapv_inplace(|v| v + normal.sample(rng));
    }
    Ok(FeatureSet {
        vectors,
        noise_variance: f.noise_variance + variance,
    })
}

/// `C[v, w] = ‖x_v − y_w‖₂`.
pub fn feature_cost(first: &FeatureSet, second: &FeatureSet) -> Result<Array2<f64>> {
    check_dim(first.dim(), second.dim())?;
    let (x, y) = (&first.vectors, &second.vectors);
    Ok(Array2::from_shape_fn((x.nrows(), y.nrows()), |(v, w)| {
        x.row(v)
            .iter()
            .zip(y.row(w).iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }))
}
