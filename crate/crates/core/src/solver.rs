//! Frank-Wolfe solvers over the (optionally seeded) Birkhoff polytope.
//!
//! One engine serves every variant: the convex relaxation run to
//! convergence, the indefinite relaxation run to a local optimum (FAQ), the
//! seeded restriction `D = diag(I_s, X)`, and the feature-augmented
//! objective `λ f(D) + (1 − λ) ⟨C, D⟩`. Each iteration solves one linear
//! assignment problem on the free block and takes an exact line search on
//! the quadratic slice toward the returned vertex.

use std::time::{Duration, Instant};

use ndarray::{s, Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::lap::{solve_view, solve_view_warm};
use crate::matrix::{
    feasibility_violation, sinkhorn_sweeps, AdjacencyMatrix, DoublyStochastic, Permutation, DS_TOLERANCE,
    RENORMALIZE_SWEEPS,
};
use crate::objective::{
    convex_gradient_from_residual, frobenius_objective, indefinite_gradient_cached, inner,
    neg_inner_objective, Relaxation,
};

/// Products `AD` and `DB` drift under repeated convex-combination updates;
/// they are recomputed from `D` this often.
const REFRESH_EVERY: usize = 64;

/// Number of Sinkhorn sweeps applied to a random positive start, repeated
/// until the start is feasible.
pub const RANDOM_INIT_SWEEPS: usize = 20;
const MAX_EXTRA_SWEEPS: usize = 100_000;

/// Starting point of a Frank-Wolfe run.
#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    /// `J`, or `diag(I_s, J)` with seeds.
    Barycenter,
    Identity,
    GivenPermutation(Permutation),
    GivenDoublyStochastic(DoublyStochastic),
    /// Uniform(0,1) entries on the free block balanced by Sinkhorn sweeps
    /// (batches of [`RANDOM_INIT_SWEEPS`] until feasible).
    RandomDs(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Stop once the Frank-Wolfe gap drops to this value.
    pub fw_gap_tol: f64,
    /// Scale `fw_gap_tol` by `1 + |h(D₀)|`.
    pub relative_gap: bool,
    pub feasibility_tol: f64,
    pub record_trace: bool,
}

impl SolverConfig {
    /// Convex relaxation "to convergence".
    pub fn convex() -> Self {
        Self {
            max_iters: 2000,
            fw_gap_tol: 1e-6,
            relative_gap: true,
            feasibility_tol: DS_TOLERANCE,
            record_trace: false,
        }
    }

    /// Local solve of the indefinite relaxation.
    pub fn indefinite() -> Self {
        Self {
            max_iters: 200,
            ..Self::convex()
        }
    }

    pub fn for_relaxation(kind: Relaxation) -> Self {
        match kind {
            Relaxation::Convex => Self::convex(),
            Relaxation::Indefinite => Self::indefinite(),
        }
    }

    pub fn with_trace(mut self) -> Self {
        self.record_trace = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if !(self.fw_gap_tol > 0.0) || !(self.feasibility_tol > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Solver input. The first `seeds` vertices of `A` are matched to the first
/// `seeds` vertices of `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchProblem {
    a: AdjacencyMatrix,
    b: AdjacencyMatrix,
    seeds: usize,
    feature_cost: Option<Array2<f64>>,
    lambda: f64,
}

impl MatchProblem {
    pub fn new(a: AdjacencyMatrix, b: AdjacencyMatrix) -> Result<Self> {
        check_dim(a.n(), b.n())?;
        if a.n() == 0 {
            return Err(Error::Domain("graphs must have at least one vertex".into()));
        }
        Ok(Self {
            a,
            b,
            seeds: 0,
            feature_cost: None,
            lambda: 1.0,
        })
    }

    pub fn with_seeds(mut self, seeds: usize) -> Result<Self> {
        if seeds > self.n() {
            return Err(Error::Domain(format!(
                "{seeds} seeds exceed the {} vertices",
                self.n()
            )));
        }
        self.seeds = seeds;
        Ok(self)
    }

    /// Adds the linear feature term `(1 − λ)⟨C, D⟩`.
    pub fn with_features(mut self, cost: Array2<f64>, lambda: f64) -> Result<Self> {
        let (r, c) = cost.dim();
        check_dim(self.n(), r)?;
        check_dim(self.n(), c)?;
        if cost.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Domain(
                "feature cost must be finite and nonnegative".into(),
            ));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Domain(format!("lambda {lambda} outside [0, 1]")));
        }
        self.feature_cost = Some(cost);
        self.lambda = lambda;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn a(&self) -> &AdjacencyMatrix {
        &self.a
    }

    pub fn b(&self) -> &AdjacencyMatrix {
        &self.b
    }

    pub fn seeds(&self) -> usize {
        self.seeds
    }

    pub fn feature_cost(&self) -> Option<&Array2<f64>> {
        self.feature_cost.as_ref()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Weight on the graph term; 1 unless features are attached.
    fn graph_weight(&self) -> f64 {
        if self.feature_cost.is_some() {
            self.lambda
        } else {
            1.0
        }
    }

    fn linear_term(&self) -> Option<(&Array2<f64>, f64)> {
        let c = self.feature_cost.as_ref()?;
        let w = 1.0 - self.lambda;
        (w != 0.0).then_some((c, w))
    }

    /// Builds the starting iterate for `init`, checking it lies in the
    /// seeded polytope.
    pub fn initial_point(&self, init: &InitSpec) -> Result<DoublyStochastic> {
        let n = self.n();
        let s = self.seeds;
        let d = match init {
            InitSpec::Barycenter => DoublyStochastic::seeded_barycenter(n, s),
            InitSpec::Identity => DoublyStochastic::from_permutation(&Permutation::identity(n)),
            InitSpec::GivenPermutation(p) => {
                check_dim(n, p.len())?;
                DoublyStochastic::from_permutation(p)
            }
            InitSpec::GivenDoublyStochastic(d) => {
                check_dim(n, d.n())?;
                d.clone()
            }
            InitSpec::RandomDs(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let m = n - s;
                let mut block = Array2::from_shape_fn((m, m), |_| rng.random::<f64>());
                block.mapv_inplace(|v| v.max(f64::MIN_POSITIVE));
                sinkhorn_sweeps(&mut block, RANDOM_INIT_SWEEPS);
                // Badly scaled draws need more sweeps to reach the tolerance.
                let mut extra = 0;
                while feasibility_violation(&block) > 0.5 * DS_TOLERANCE && extra < MAX_EXTRA_SWEEPS {
                    sinkhorn_sweeps(&mut block, RANDOM_INIT_SWEEPS);
                    extra += RANDOM_INIT_SWEEPS;
                }
                let mut full = Array2::zeros((n, n));
                for i in 0..s {
                    full[[i, i]] = 1.0;
                }
                full.slice_mut(s![s.., s..]).assign(&block);
                DoublyStochastic::new(full)?
            }
        };
        self.check_feasible(d.entries(), d.tolerance())?;
        Ok(d)
    }

    fn check_feasible(&self, d: &Array2<f64>, tol: f64) -> Result<()> {
        let v = feasibility_violation(d);
        if !(v <= tol) {
            return Err(Error::Infeasible(format!(
                "initial point violates feasibility by {v:e}"
            )));
        }
        let s = self.seeds;
        for i in 0..s {
            for j in 0..self.n() {
                let want = if i == j { 1.0 } else { 0.0 };
                if (d[[i, j]] - want).abs() > tol || (d[[j, i]] - want).abs() > tol {
                    return Err(Error::Infeasible(format!(
                        "initial point does not fix seed vertex {i}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Solver output.
#[derive(Debug, Clone)]
pub struct MatchResult {
    pub permutation: Permutation,
    pub final_iterate: DoublyStochastic,
    /// `‖AP − PB‖²_F` at the returned permutation.
    pub objective_frobenius_sq: f64,
    /// `−⟨AP, PB⟩` at the returned permutation.
    pub objective_neg_inner: f64,
    /// Solver objective `h` at `final_iterate` (before projection).
    pub relaxed_objective: f64,
    pub iterations: usize,
    pub fw_gap_final: f64,
    pub converged: bool,
    pub objective_trace: Option<Vec<f64>>,
    pub wall_time: Duration,
}

/// One Frank-Wolfe iteration, as reported by [`fw_step`].
#[derive(Debug, Clone)]
pub struct FwStep {
    pub direction: Permutation,
    /// `⟨∇h(D), D − Q⟩`.
    pub gap: f64,
    pub alpha: f64,
    pub next: DoublyStochastic,
}

/// Working state of one run. `ad` and `db` cache `AD` and `DB`.
struct Engine<'p> {
    problem: &'p MatchProblem,
    kind: Relaxation,
    graph_weight: f64,
    d: Array2<f64>,
    ad: Array2<f64>,
    db: Array2<f64>,
    tol: f64,
    /// Column potentials of the last assignment solve.
    lap_duals: Vec<f64>,
}

struct Candidate {
    q: Permutation,
    gap: f64,
}

impl<'p> Engine<'p> {
    fn new(problem: &'p MatchProblem, kind: Relaxation, d: Array2<f64>, tol: f64) -> Self {
        let mut e = Self {
            problem,
            kind,
            graph_weight: problem.graph_weight(),
            ad: Array2::zeros((0, 0)),
            db: Array2::zeros((0, 0)),
            d,
            tol,
            lap_duals: Vec::new(),
        };
        e.refresh();
        e
    }

    fn refresh(&mut self) {
        let (a, b) = (self.problem.a.entries(), self.problem.b.entries());
        self.ad = a.dot(&self.d);
        self.db = self.d.dot(b);
    }

    fn graph_objective(&self) -> f64 {
        match self.kind {
            Relaxation::Convex => {
                let mut acc = 0.0;
                ndarray::Zip::from(&self.ad)
                    .and(&self.db)
                    .for_each(|&x, &y| acc += (x - y) * (x - y));
                acc
            }
            Relaxation::Indefinite => -inner(&self.ad, &self.db),
        }
    }

    fn objective(&self) -> f64 {
        let mut h = 0.0;
        if self.graph_weight != 0.0 {
            h += self.graph_weight * self.graph_objective();
        }
        if let Some((c, w)) = self.problem.linear_term() {
            h += w * inner(c, &self.d);
        }
        h
    }

    fn gradient(&self) -> Array2<f64> {
        let (a, b) = (&self.problem.a, &self.problem.b);
        let mut g = if self.graph_weight == 0.0 {
            Array2::zeros(self.d.dim())
        } else {
            let mut g = match self.kind {
                Relaxation::Convex => {
                    let r = &self.ad - &self.db;
                    convex_gradient_from_residual(a, b, &r)
                }
                Relaxation::Indefinite => indefinite_gradient_cached(a, b, &self.ad, &self.db),
            };
            if self.graph_weight != 1.0 {
                g *= self.graph_weight;
            }
            g
        };
        if let Some((c, w)) = self.problem.linear_term() {
            g.scaled_add(w, c);
        }
        g
    }

    /// Linear minimization oracle over the free block, plus the gap.
    fn candidate(&mut self, g: &Array2<f64>) -> Result<Candidate> {
        let n = self.problem.n();
        let s = self.problem.seeds;
        let block = solve_view_warm(g.slice(s![s.., s..]), &mut self.lap_duals)?;
        let mut map: Vec<usize> = (0..s).collect();
        map.extend(block.permutation.as_slice().iter().map(|&j| j + s));
        let q = Permutation::new(map)?;
        debug_assert_eq!(q.len(), n);
        let gap = inner(g, &self.d) - q.inner(g);
        Ok(Candidate { q, gap })
    }

    /// Exact minimizer over `[0, 1]` of `g(α) = h(D + α(Q − D))`, together
    /// with the cached products at the vertex `Q`.
    fn line_search(&self, cand: &Candidate) -> (f64, VertexProducts) {
        let vp = VertexProducts::new(self.problem, &cand.q);
        let ae = &vp.aq - &self.ad;
        let eb = &vp.qb - &self.db;
        let curvature = match self.kind {
            Relaxation::Convex => {
                let mut acc = 0.0;
                ndarray::Zip::from(&ae)
                    .and(&eb)
                    .for_each(|&x, &y| acc += (x - y) * (x - y));
                acc
            }
            Relaxation::Indefinite => -inner(&ae, &eb),
        };
        let quad = self.graph_weight * curvature;
        // g(α) = quad·α² − gap·α + const.
        let alpha = if quad > 0.0 {
            (cand.gap / (2.0 * quad)).clamp(0.0, 1.0)
        } else if quad - cand.gap < 0.0 {
            1.0
        } else {
            0.0
        };
        (alpha, vp)
    }

    fn advance(&mut self, q: &Permutation, alpha: f64, vp: VertexProducts, iteration: usize) {
        if alpha >= 1.0 {
            self.d = q.to_matrix();
            self.ad = vp.aq;
            self.db = vp.qb;
            return;
        }
        let keep = 1.0 - alpha;
        self.d *= keep;
        for (i, &j) in q.as_slice().iter().enumerate() {
            self.d[[i, j]] += alpha;
        }
        // (1 − α) + α need not round to 1.
        for i in 0..self.problem.seeds {
            self.d[[i, i]] = 1.0;
        }
        self.ad *= keep;
        self.ad.scaled_add(alpha, &vp.aq);
        self.db *= keep;
        self.db.scaled_add(alpha, &vp.qb);

        let drifted = feasibility_violation(&self.d) > 0.5 * self.tol;
        if drifted {
            sinkhorn_sweeps(&mut self.d, RENORMALIZE_SWEEPS);
        }
        if drifted || (iteration + 1).is_multiple_of(REFRESH_EVERY) {
            self.refresh();
        }
    }
}

/// `AQ` and `QB` for a permutation `Q`, both O(n²).
struct VertexProducts {
    aq: Array2<f64>,
    qb: Array2<f64>,
}

impl VertexProducts {
    fn new(problem: &MatchProblem, q: &Permutation) -> Self {
        let (a, b) = (problem.a.entries(), problem.b.entries());
        let n = problem.n();
        let map = q.as_slice();
        // (AQ)[i, map k] = A[i, k]
        let mut aq = Array2::zeros((n, n));
        for (mut dst, src) in aq.axis_iter_mut(Axis(0)).zip(a.axis_iter(Axis(0))) {
            for (k, &v) in src.iter().enumerate() {
                dst[map[k]] = v;
            }
        }
        // (QB)[i, :] = B[map i, :]
        let mut qb = Array2::zeros((n, n));
        for (i, mut row) in qb.axis_iter_mut(Axis(0)).enumerate() {
            row.assign(&b.row(map[i]));
        }
        Self { aq, qb }
    }
}

/// Runs Frank-Wolfe on the chosen relaxation from `init`.
pub fn solve(
    problem: &MatchProblem,
    kind: Relaxation,
    init: &InitSpec,
    config: &SolverConfig,
) -> Result<MatchResult> {
    config.validate()?;
    let start = Instant::now();
    let d0 = problem.initial_point(init)?;
    let n = problem.n();

    if problem.seeds == n {
        let p = Permutation::identity(n);
        let engine = Engine::new(problem, kind, p.to_matrix(), config.feasibility_tol);
        let h = engine.objective();
        return finish(
            problem,
            engine,
            p,
            0,
            0.0,
            true,
            config.record_trace.then(|| vec![h]),
            h,
            start,
        );
    }

    let mut engine = Engine::new(problem, kind, d0.into_entries(), config.feasibility_tol);
    let h0 = engine.objective();
    let tol = if config.relative_gap {
        config.fw_gap_tol * (1.0 + h0.abs())
    } else {
        config.fw_gap_tol
    };
    let mut trace = config.record_trace.then(|| vec![h0]);

    let mut iterations = 0;
    let mut converged = false;
    let mut gap;
    loop {
        let g = engine.gradient();
        let cand = engine.candidate(&g)?;
        gap = cand.gap;
        if gap <= tol {
            converged = true;
            break;
        }
        if iterations == config.max_iters {
            break;
        }
        let (alpha, vp) = engine.line_search(&cand);
        if alpha <= 0.0 {
            // No improving step along the best vertex direction.
            converged = true;
            break;
        }
        engine.advance(&cand.q, alpha, vp, iterations);
        iterations += 1;
        if let Some(t) = trace.as_mut() {
            t.push(engine.objective());
        }
    }

    let p = project_free_block(&engine.d, problem.seeds)?;
    let h = engine.objective();
    finish(problem, engine, p, iterations, gap, converged, trace, h, start)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    problem: &MatchProblem,
    engine: Engine<'_>,
    permutation: Permutation,
    iterations: usize,
    gap: f64,
    converged: bool,
    objective_trace: Option<Vec<f64>>,
    relaxed_objective: f64,
    start: Instant,
) -> Result<MatchResult> {
    let objective_frobenius_sq = frobenius_objective(&problem.a, &problem.b, &permutation)?;
    let objective_neg_inner = neg_inner_objective(&problem.a, &problem.b, &permutation.to_matrix())?;
    let tol = engine.tol;
    let final_iterate = DoublyStochastic::new_unchecked(engine.d, tol);
    debug_assert!(final_iterate.violation() <= tol);
    Ok(MatchResult {
        permutation,
        final_iterate,
        objective_frobenius_sq,
        objective_neg_inner,
        relaxed_objective,
        iterations,
        fw_gap_final: gap,
        converged,
        objective_trace,
        wall_time: start.elapsed(),
    })
}

/// Hungarian projection of the free block, seeds kept fixed.
fn project_free_block(d: &Array2<f64>, seeds: usize) -> Result<Permutation> {
    let block = d.slice(s![seeds.., seeds..]).mapv(|v| -v);
    let res = solve_view(block.view())?;
    let mut map: Vec<usize> = (0..seeds).collect();
    map.extend(res.permutation.as_slice().iter().map(|&j| j + seeds));
    Permutation::new(map)
}

/// Convex relaxation from the (seeded) barycenter.
pub fn solve_convex(problem: &MatchProblem, config: &SolverConfig) -> Result<MatchResult> {
    solve(problem, Relaxation::Convex, &InitSpec::Barycenter, config)
}

/// Local solve of the indefinite relaxation (FAQ) from `init`.
pub fn solve_indefinite(
    problem: &MatchProblem,
    init: &InitSpec,
    config: &SolverConfig,
) -> Result<MatchResult> {
    solve(problem, Relaxation::Indefinite, init, config)
}

/// Seeded variant; with zero seeds this is exactly [`solve`].
pub fn solve_seeded(
    problem: &MatchProblem,
    kind: Relaxation,
    init: &InitSpec,
    config: &SolverConfig,
) -> Result<MatchResult> {
    solve(problem, kind, init, config)
}

/// Feature-augmented objective `λ f(D) + (1 − λ)⟨C, D⟩`.
pub fn solve_with_features(
    problem: &MatchProblem,
    init: &InitSpec,
    config: &SolverConfig,
    kind: Relaxation,
) -> Result<MatchResult> {
    if problem.feature_cost.is_none() {
        return Err(Error::Config(
            "feature-augmented solve needs a feature cost matrix".into(),
        ));
    }
    solve(problem, kind, init, config)
}

/// A single Frank-Wolfe iteration from `d`.
pub fn fw_step(kind: Relaxation, problem: &MatchProblem, d: &DoublyStochastic) -> Result<FwStep> {
    problem.check_feasible(d.entries(), d.tolerance())?;
    let mut engine = Engine::new(problem, kind, d.entries().clone(), d.tolerance());
    let g = engine.gradient();
    let cand = engine.candidate(&g)?;
    let (alpha, vp) = if cand.gap > 0.0 {
        engine.line_search(&cand)
    } else {
        (0.0, VertexProducts::new(problem, &cand.q))
    };
    if alpha > 0.0 {
        engine.advance(&cand.q, alpha, vp, 0);
    }
    Ok(FwStep {
        direction: cand.q,
        gap: cand.gap,
        alpha,
        next: DoublyStochastic::new_unchecked(engine.d, d.tolerance()),
    })
}

/// `min_Q ⟨∇h(D), Q − D⟩` over the free block: negative when an improving
/// vertex direction exists.
pub(crate) fn stationarity_gap(
    kind: Relaxation,
    problem: &MatchProblem,
    d: &DoublyStochastic,
) -> Result<f64> {
    problem.check_feasible(d.entries(), d.tolerance())?;
    let mut engine = Engine::new(problem, kind, d.entries().clone(), d.tolerance());
    let g = engine.gradient();
    Ok(-engine.candidate(&g)?.gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lap::{project_to_permutation, solve_lap_min};
    use ndarray::array;

    fn path4() -> AdjacencyMatrix {
        AdjacencyMatrix::new(
            array![
                [0., 1., 0., 0.],
                [1., 0., 1., 0.],
                [0., 1., 0., 1.],
                [0., 0., 1., 0.]
            ],
            false,
        )
        .unwrap()
    }

    #[test]
    fn config_validation() {
        let mut c = SolverConfig::convex();
        c.max_iters = 0;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = SolverConfig::indefinite();
        c.fw_gap_tol = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn problem_validation() {
        let a = path4();
        assert!(MatchProblem::new(a.clone(), AdjacencyMatrix::zeros(3)).is_err());
        let p = MatchProblem::new(a.clone(), a.clone()).unwrap();
        assert!(p.clone().with_seeds(5).is_err());
        assert!(p.clone().with_features(Array2::zeros((4, 4)), 1.5).is_err());
        assert!(p
            .clone()
            .with_features(Array2::from_elem((4, 4), -1.0), 0.5)
            .is_err());
        assert!(p.with_features(Array2::zeros((3, 3)), 0.5).is_err());
    }

    #[test]
    fn identity_start_on_equal_graphs_stays_put() {
        let a = path4();
        let p = MatchProblem::new(a.clone(), a.clone()).unwrap();
        let r = solve_indefinite(&p, &InitSpec::Identity, &SolverConfig::indefinite()).unwrap();
        assert!(r.permutation.is_identity());
        assert_eq!(r.iterations, 0);
        assert_eq!(r.objective_frobenius_sq, 0.0);
        assert_eq!(r.objective_neg_inner, -a.frobenius_norm_sq());
    }

    #[test]
    fn seeds_must_be_respected_by_init() {
        let a = path4();
        let p = MatchProblem::new(a.clone(), a).unwrap().with_seeds(2).unwrap();
        let bad = Permutation::new(vec![1, 0, 2, 3]).unwrap();
        assert!(matches!(
            solve_indefinite(&p, &InitSpec::GivenPermutation(bad), &SolverConfig::indefinite()),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn all_seeds_returns_identity() {
        let a = path4();
        let b = AdjacencyMatrix::zeros(4);
        let p = MatchProblem::new(a.clone(), b).unwrap().with_seeds(4).unwrap();
        let r = solve_convex(&p, &SolverConfig::convex()).unwrap();
        assert!(r.permutation.is_identity());
        assert_eq!(r.iterations, 0);
        assert_eq!(r.objective_frobenius_sq, a.frobenius_norm_sq());
    }

    #[test]
    fn missing_features_is_a_config_error() {
        let a = path4();
        let p = MatchProblem::new(a.clone(), a).unwrap();
        assert!(matches!(
            solve_with_features(
                &p,
                &InitSpec::Barycenter,
                &SolverConfig::indefinite(),
                Relaxation::Indefinite
            ),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn pure_feature_objective_is_a_lap() {
        let a = path4();
        let c = array![
            [3.0, 1.0, 4.0, 1.5],
            [5.0, 9.0, 2.0, 6.0],
            [5.0, 3.0, 5.0, 8.0],
            [9.0, 7.0, 9.0, 3.0]
        ];
        let p = MatchProblem::new(a.clone(), a)
            .unwrap()
            .with_features(c.clone(), 0.0)
            .unwrap();
        let r = solve_with_features(
            &p,
            &InitSpec::Barycenter,
            &SolverConfig::indefinite(),
            Relaxation::Indefinite,
        )
        .unwrap();
        assert_eq!(r.permutation, solve_lap_min(&c).unwrap().permutation);
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn projection_consistency() {
        let a = path4();
        let b = AdjacencyMatrix::new(
            array![
                [0., 1., 1., 0.],
                [1., 0., 0., 0.],
                [1., 0., 0., 1.],
                [0., 0., 1., 0.]
            ],
            false,
        )
        .unwrap();
        let p = MatchProblem::new(a, b).unwrap();
        let r = solve_convex(&p, &SolverConfig::convex()).unwrap();
        assert_eq!(project_to_permutation(&r.final_iterate).unwrap(), r.permutation);
    }

    #[test]
    fn random_init_is_feasible_and_reproducible() {
        let a = path4();
        let p = MatchProblem::new(a.clone(), a).unwrap().with_seeds(1).unwrap();
        let d1 = p.initial_point(&InitSpec::RandomDs(7)).unwrap();
        let d2 = p.initial_point(&InitSpec::RandomDs(7)).unwrap();
        assert_eq!(d1, d2);
        assert!(d1.violation() <= DS_TOLERANCE);
        assert_eq!(d1.entries()[[0, 0]], 1.0);
    }
}
