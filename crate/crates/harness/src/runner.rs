//! Monte Carlo driver.

use std::time::Duration;

use gmatch::qaplib::{self, QapInstance};
use gmatch::random::{add_feature_noise, sample_bounded_degree, sample_features, sample_power_law};
use gmatch::{
    bit_flip, brute_force_gm, convex_objective, feature_cost, frobenius_objective, kkt_pairwise_check,
    n_correct, neg_inner_objective, permute_graph, qap_cost, sample_correlated_pair, solve, stream_rng,
    AdjacencyMatrix, CorrelatedPairSpec, DoublyStochastic, InitSpec, LambdaSource, MatchProblem, MatchResult,
    Permutation, Relaxation,
};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{HarnessError, Result};
use crate::records::Record;
use crate::spec::{ExperimentKind, ExperimentSpec, Method, Model};

/// One cell of the parameter grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub rho: Option<f64>,
    pub flip_p: Option<f64>,
    pub seeds: usize,
    pub noise_var: Option<f64>,
    /// Graph-term weight; 1 means no features.
    pub lambda: f64,
}

/// Grid points in output order.
///
/// The feature experiment puts a featureless baseline (`λ = 1`) ahead of the
/// noise levels at every ρ.
pub fn grid(spec: &ExperimentSpec) -> Vec<Point> {
    let base = Point {
        rho: None,
        flip_p: None,
        seeds: 0,
        noise_var: None,
        lambda: 1.0,
    };
    let outer: Vec<Point> = if spec.model.uses_flips() {
        spec.flip_grid
            .iter()
            .map(|&p| Point {
                flip_p: Some(p),
                ..base
            })
            .collect()
    } else {
        spec.rho_grid
            .iter()
            .map(|&r| Point { rho: Some(r), ..base })
            .collect()
    };
    match spec.experiment {
        ExperimentKind::Seeds => outer
            .iter()
            .flat_map(|p| spec.seeds_grid.iter().map(move |&s| Point { seeds: s, ..*p }))
            .collect(),
        ExperimentKind::Features => outer
            .iter()
            .flat_map(|p| {
                std::iter::once(*p).chain(spec.feature_noise_grid.iter().map(move |&v| Point {
                    noise_var: Some(v),
                    lambda: spec.lambda,
                    ..*p
                }))
            })
            .collect(),
        _ => outer,
    }
}

/// Records plus the QAPLIB files that could not be used.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub records: Vec<Record>,
    pub skipped: Vec<String>,
}

/// Runs `spec` and returns its records ordered by (point, replicate,
/// method), independent of the thread count.
pub fn run_experiment(spec: &ExperimentSpec, config: &RunConfig) -> Result<RunOutput> {
    spec.validate()?;
    config.convex.validate()?;
    config.indefinite.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = config.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| HarnessError::Pool(e.to_string()))?;

    if spec.experiment == ExperimentKind::Qaplib {
        return pool.install(|| run_qaplib(spec, config));
    }

    let points = grid(spec);
    let jobs: Vec<(Point, usize)> = points
        .iter()
        .flat_map(|&p| (0..spec.replicates).map(move |r| (p, r)))
        .collect();
    let rows: Vec<Vec<Record>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(p, r)| run_replicate(spec, config, p, r))
            .collect::<Result<_>>()
    })?;
    Ok(RunOutput {
        records: rows.into_iter().flatten().collect(),
        skipped: Vec::new(),
    })
}

/// Everything drawn for one replicate at one grid point.
pub struct Instance {
    /// `A' = permute_graph(A, P*)`.
    pub a: AdjacencyMatrix,
    pub b: AdjacencyMatrix,
    /// `A` before relabelling, aligned with `B` by the identity.
    pub a_aligned: AdjacencyMatrix,
    pub pstar: Permutation,
    pub random_perm: Permutation,
    pub feature_cost: Option<ndarray::Array2<f64>>,
}

/// Draws the instance for replicate `r` from stream `r` of the spec seed.
///
/// Every grid point reuses the stream, so points differ only through their
/// parameters. `P*` fixes the first `max(seeds_grid)` vertices in the seeds
/// experiment.
pub fn draw_instance(spec: &ExperimentSpec, point: &Point, r: usize) -> Result<Instance> {
    let mut rng = stream_rng(spec.rng_seed, r as u64);
    let n = spec.n;
    let (a, b) = match spec.model {
        Model::Bernoulli => {
            let pair = CorrelatedPairSpec {
                n,
                rho: point.rho.unwrap_or(0.0),
                lambda: LambdaSource::UniformBand(spec.alpha),
                rng_seed: spec.rng_seed,
                directed: spec.directed,
            };
            sample_correlated_pair(&pair, &mut rng)?
        }
        Model::PowerLaw { beta } => {
            let g = sample_power_law(n, beta, &mut rng)?;
            let noisy = bit_flip(&g, point.flip_p.unwrap_or(0.0), &mut rng)?;
            (g, noisy)
        }
        Model::BoundedDegree { dmax } => {
            let g = sample_bounded_degree(n, dmax, &mut rng)?;
            let noisy = bit_flip(&g, point.flip_p.unwrap_or(0.0), &mut rng)?;
            (g, noisy)
        }
    };
    let prefix = if spec.experiment == ExperimentKind::Seeds {
        spec.seeds_grid.iter().copied().max().unwrap_or(0)
    } else {
        0
    };
    let pstar = Permutation::random_fixing_prefix(n, prefix, &mut rng);
    let random_perm = Permutation::random(n, &mut rng);
    let feature_cost = match point.noise_var {
        Some(var) if point.lambda < 1.0 => {
            let clean = sample_features(n, spec.feature_dim, &mut rng)?;
            let fa = add_feature_noise(&clean.permuted(&pstar)?, var, &mut rng)?;
            let fb = add_feature_noise(&clean, var, &mut rng)?;
            Some(feature_cost(&fa, &fb)?)
        }
        _ => None,
    };
    Ok(Instance {
        a: permute_graph(&a, &pstar)?,
        b,
        a_aligned: a,
        pstar,
        random_perm,
        feature_cost,
    })
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

struct Shared {
    pre_proj_energy: Option<f64>,
    pstar_frob_sq: f64,
    pstar_neg_inner: f64,
    dist_dstar_pstar: Option<f64>,
    dist_dstar_pc: Option<f64>,
    dist_dstar_random: Option<f64>,
    kkt: Option<(u8, f64)>,
    oracle_opt: Option<f64>,
}

fn run_replicate(spec: &ExperimentSpec, config: &RunConfig, point: Point, r: usize) -> Result<Vec<Record>> {
    let inst = draw_instance(spec, &point, r)?;
    let mut problem = MatchProblem::new(inst.a.clone(), inst.b.clone())?.with_seeds(point.seeds)?;
    if let Some(c) = &inst.feature_cost {
        problem = problem.with_features(c.clone(), point.lambda)?;
    }

    let needs_convex = spec.methods.iter().any(|m| m.needs_convex())
        || matches!(
            spec.experiment,
            ExperimentKind::Energy | ExperimentKind::Distance | ExperimentKind::KktCheck
        );
    let convex = if needs_convex {
        Some(solve(
            &problem,
            Relaxation::Convex,
            &InitSpec::Barycenter,
            &config.convex,
        )?)
    } else {
        None
    };

    let dstar = convex.as_ref().map(|c| &c.final_iterate);
    let shared = Shared {
        pre_proj_energy: dstar
            .map(|d| convex_objective(&inst.a, &inst.b, d.entries()))
            .transpose()?,
        pstar_frob_sq: frobenius_objective(&inst.a, &inst.b, &inst.pstar)?,
        pstar_neg_inner: neg_inner_objective(&inst.a, &inst.b, &inst.pstar.to_matrix())?,
        dist_dstar_pstar: dstar.map(|d| d.distance_to(&inst.pstar)).transpose()?,
        dist_dstar_pc: convex
            .as_ref()
            .map(|c| c.final_iterate.distance_to(&c.permutation))
            .transpose()?,
        dist_dstar_random: dstar.map(|d| d.distance_to(&inst.random_perm)).transpose()?,
        kkt: if spec.experiment == ExperimentKind::KktCheck {
            let k = kkt_pairwise_check(&inst.a_aligned, &inst.b)?;
            Some((u8::from(!k.identity_can_be_kkt()), k.min_margin()))
        } else {
            None
        },
        oracle_opt: if spec.experiment == ExperimentKind::OracleCheck {
            Some(brute_force_gm(&inst.a, &inst.b)?.optimal_value)
        } else {
            None
        },
    };

    let mut out = Vec::with_capacity(spec.methods.len());
    for &method in &spec.methods {
        let res = match method {
            Method::ConvexProject => convex.clone().expect("convex solve ran"),
            Method::FaqJ => solve(
                &problem,
                Relaxation::Indefinite,
                &InitSpec::Barycenter,
                &config.indefinite,
            )?,
            Method::FaqDstar => {
                let c = convex.as_ref().expect("convex solve ran");
                let init = InitSpec::GivenDoublyStochastic(c.final_iterate.clone());
                solve(&problem, Relaxation::Indefinite, &init, &config.indefinite)?
            }
            Method::FaqPstar => {
                let init = InitSpec::GivenPermutation(inst.pstar.clone());
                solve(&problem, Relaxation::Indefinite, &init, &config.indefinite)?
            }
        };
        out.push(record(spec, &point, r, method, &res, &inst.pstar, &shared)?);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn record(
    spec: &ExperimentSpec,
    point: &Point,
    r: usize,
    method: Method,
    res: &MatchResult,
    pstar: &Permutation,
    shared: &Shared,
) -> Result<Record> {
    let n = spec.n;
    let correct = n_correct(&res.permutation, pstar)?;
    Ok(Record {
        experiment: spec.experiment.name().into(),
        model: spec.model.name(),
        instance: None,
        method: method.name().into(),
        n,
        rho: point.rho,
        flip_p: point.flip_p,
        seeds: point.seeds,
        noise_var: point.noise_var,
        lambda: point.lambda,
        replicate: r,
        stream: r as u64,
        success: Some(u8::from(res.permutation == *pstar)),
        n_correct: Some(correct),
        pre_proj_energy: shared.pre_proj_energy,
        post_proj_energy: res.objective_frobenius_sq,
        obj_frob_sq: res.objective_frobenius_sq,
        obj_neg_inner: res.objective_neg_inner,
        relaxed_obj: res.relaxed_objective,
        pstar_frob_sq: Some(shared.pstar_frob_sq),
        pstar_neg_inner: Some(shared.pstar_neg_inner),
        fw_gap: res.fw_gap_final,
        iterations: res.iterations,
        converged: u8::from(res.converged),
        dist_dstar_pstar: shared.dist_dstar_pstar,
        dist_dstar_pc: shared.dist_dstar_pc,
        dist_dstar_random: shared.dist_dstar_random,
        kkt_violated: shared.kkt.map(|k| k.0),
        min_kkt_margin: shared.kkt.map(|k| k.1),
        oracle_opt: shared.oracle_opt,
        qap_cost: None,
        wall_time_ms: ms(res.wall_time),
    })
}

/// Loads the instances named by the configured manifest (the bundled one by
/// default) from the configured directory (the bundled data by default).
pub fn load_qaplib(config: &RunConfig) -> Result<qaplib::Suite> {
    let names = match &config.qaplib_manifest {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(crate::error::io_err(path))?;
            qaplib::parse_manifest(&text)
        }
        None => qaplib::parse_manifest(qaplib::BUNDLED_MANIFEST),
    };
    let dir = config.qaplib_dir.clone().unwrap_or_else(qaplib::bundled_data_dir);
    Ok(qaplib::load_manifest_suite(&dir, &names)?)
}

fn run_qaplib(spec: &ExperimentSpec, config: &RunConfig) -> Result<RunOutput> {
    let suite = load_qaplib(config)?;
    let dir = config.qaplib_dir.clone().unwrap_or_else(qaplib::bundled_data_dir);
    let skipped = suite
        .skipped
        .iter()
        .map(|s| format!("{}: {}", s.path.display(), s.reason))
        .collect();
    let rows: Vec<Vec<Record>> = suite
        .instances
        .par_iter()
        .map(|inst| {
            let reference = qaplib::load_solution(&dir, &inst.name)?.map(|s| s.permutation);
            run_qap_instance(spec, config, inst, reference.as_ref())
        })
        .collect::<Result<_>>()?;
    Ok(RunOutput {
        records: rows.into_iter().flatten().collect(),
        skipped,
    })
}

fn run_qap_instance(
    spec: &ExperimentSpec,
    config: &RunConfig,
    inst: &QapInstance,
    reference: Option<&Permutation>,
) -> Result<Vec<Record>> {
    let problem = inst.to_match_problem()?;
    let n = inst.n();
    let needs_convex = spec.methods.iter().any(|m| m.needs_convex());
    let convex = if needs_convex {
        Some(solve(
            &problem,
            Relaxation::Convex,
            &InitSpec::Barycenter,
            &config.convex,
        )?)
    } else {
        None
    };
    let pre = convex
        .as_ref()
        .map(|c| convex_objective(problem.a(), problem.b(), c.final_iterate.entries()))
        .transpose()?;
    let mut out = Vec::new();
    for &method in &spec.methods {
        let res = match method {
            Method::ConvexProject => convex.clone().expect("convex solve ran"),
            Method::FaqJ => solve(
                &problem,
                Relaxation::Indefinite,
                &InitSpec::Barycenter,
                &config.indefinite,
            )?,
            Method::FaqDstar => {
                let d: &DoublyStochastic = &convex.as_ref().expect("convex solve ran").final_iterate;
                solve(
                    &problem,
                    Relaxation::Indefinite,
                    &InitSpec::GivenDoublyStochastic(d.clone()),
                    &config.indefinite,
                )?
            }
            Method::FaqPstar => match reference {
                Some(p) => solve(
                    &problem,
                    Relaxation::Indefinite,
                    &InitSpec::GivenPermutation(p.clone()),
                    &config.indefinite,
                )?,
                None => continue,
            },
        };
        let (pstar_frob_sq, pstar_neg_inner) = match reference {
            Some(p) => (
                Some(frobenius_objective(problem.a(), problem.b(), p)?),
                Some(neg_inner_objective(problem.a(), problem.b(), &p.to_matrix())?),
            ),
            None => (None, None),
        };
        out.push(Record {
            experiment: spec.experiment.name().into(),
            model: "qaplib".into(),
            instance: Some(inst.name.clone()),
            method: method.name().into(),
            n,
            rho: None,
            flip_p: None,
            seeds: 0,
            noise_var: None,
            lambda: 1.0,
            replicate: 0,
            stream: 0,
            success: reference.map(|p| u8::from(res.permutation == *p)),
            n_correct: reference.map(|p| n_correct(&res.permutation, p)).transpose()?,
            pre_proj_energy: pre,
            post_proj_energy: res.objective_frobenius_sq,
            obj_frob_sq: res.objective_frobenius_sq,
            obj_neg_inner: res.objective_neg_inner,
            relaxed_obj: res.relaxed_objective,
            pstar_frob_sq,
            pstar_neg_inner,
            fw_gap: res.fw_gap_final,
            iterations: res.iterations,
            converged: u8::from(res.converged),
            dist_dstar_pstar: None,
            dist_dstar_pc: convex
                .as_ref()
                .map(|c| c.final_iterate.distance_to(&c.permutation))
                .transpose()?,
            dist_dstar_random: None,
            kkt_violated: None,
            min_kkt_margin: None,
            oracle_opt: None,
            qap_cost: Some(qap_cost(inst, &res.permutation)?),
            wall_time_ms: ms(res.wall_time),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feature_grid_has_baseline_per_rho() {
        let mut spec = ExperimentSpec::defaults(ExperimentKind::Features);
        spec.rho_grid = vec![0.3, 0.4];
        spec.feature_noise_grid = vec![0.1, 0.2];
        let g = grid(&spec);
        assert_eq!(g.len(), 6);
        assert_eq!(g[0].lambda, 1.0);
        assert_eq!(g[0].noise_var, None);
        assert_eq!(g[1].noise_var, Some(0.1));
        assert_eq!(g[1].lambda, 0.5);
        assert_eq!(g[3].rho, Some(0.4));
    }

    #[test]
    fn seeds_grid_and_prefix() {
        let mut spec = ExperimentSpec::defaults(ExperimentKind::Seeds);
        spec.n = 30;
        let g = grid(&spec);
        assert_eq!(g.len(), 12);
        let inst = draw_instance(&spec, &g[0], 3).unwrap();
        for i in 0..15 {
            assert_eq!(inst.pstar.apply(i), i);
        }
        // Same stream at another seed count draws the same graphs.
        let other = draw_instance(&spec, &g[3], 3).unwrap();
        assert_eq!(inst.a, other.a);
        assert_eq!(inst.pstar, other.pstar);
    }

    #[test]
    fn flip_models_use_flip_grid() {
        let mut spec = ExperimentSpec::defaults(ExperimentKind::Success);
        spec.model = Model::BoundedDegree { dmax: 4 };
        spec.flip_grid = vec![0.0, 0.1];
        let g = grid(&spec);
        assert_eq!(g.len(), 2);
        assert!(g.iter().all(|p| p.rho.is_none()));
        spec.n = 20;
        let inst = draw_instance(&spec, &g[0], 0).unwrap();
        assert_eq!(permute_graph(&inst.a_aligned, &inst.pstar).unwrap(), inst.a);
        assert_eq!(inst.a_aligned, inst.b);
    }
}
