use std::io;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use gmatch_harness::records::write_csv_file;
use gmatch_harness::spec::parse_list;
use gmatch_harness::summary::write_summary;
use gmatch_harness::{
    aggregate, emit_plots, run_experiment, write_csv, ExperimentKind, ExperimentSpec, Model, RunConfig,
};

/// Graph matching experiments: convex and indefinite relaxations on
/// correlated random graphs and QAPLIB instances.
#[derive(Parser)]
#[command(name = "gmatch", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Relaxed and projected energies against rho.
    Energy(Opts),
    /// Distances from the convex optimum to P_c, P* and a random permutation.
    Distance(Opts),
    /// Recovery rate of the true alignment per method.
    Success(Opts),
    /// Indefinite objective at P* and at the FAQ:D* output.
    ObjectiveTrace(Opts),
    /// Success experiment on directed graphs.
    Directed(Opts),
    /// Success against the number of seeds.
    Seeds(Opts),
    /// Success with noisy vertex features.
    Features(Opts),
    /// Pairwise KKT check of the true alignment for the convex relaxation.
    KktCheck(Opts),
    /// Small instances compared with exhaustive search.
    OracleCheck(Opts),
    /// QAPLIB benchmark instances.
    Qaplib(Opts),
}

#[derive(Args)]
struct Opts {
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated correlation grid.
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    replicates: Option<usize>,
    /// Comma-separated subset of convex+project, faq-J, faq-Dstar, faq-Pstar.
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output path; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    qaplib_dir: Option<PathBuf>,
    /// Run configuration file (defaults to $GMATCH_CONFIG).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// 100 replicates per point.
    #[arg(long)]
    paper_scale: bool,
    /// Comma-separated seed counts.
    #[arg(long)]
    seeds: Option<String>,
    /// Comma-separated feature noise variances.
    #[arg(long)]
    noise: Option<String>,
    /// Comma-separated bit-flip probabilities.
    #[arg(long)]
    flip: Option<String>,
    /// bernoulli, power-law(BETA) or bounded-degree(DMAX).
    #[arg(long)]
    model: Option<String>,
    /// Graph-term weight in the feature experiment.
    #[arg(long)]
    lambda: Option<f64>,
    /// Directory for the summary, data files and plot script.
    #[arg(long)]
    plots: Option<PathBuf>,
}

impl Command {
    fn split(self) -> (ExperimentKind, Opts) {
        match self {
            Command::Energy(o) => (ExperimentKind::Energy, o),
            Command::Distance(o) => (ExperimentKind::Distance, o),
            Command::Success(o) => (ExperimentKind::Success, o),
            Command::ObjectiveTrace(o) => (ExperimentKind::ObjectiveTrace, o),
            Command::Directed(o) => (ExperimentKind::Directed, o),
            Command::Seeds(o) => (ExperimentKind::Seeds, o),
            Command::Features(o) => (ExperimentKind::Features, o),
            Command::KktCheck(o) => (ExperimentKind::KktCheck, o),
            Command::OracleCheck(o) => (ExperimentKind::OracleCheck, o),
            Command::Qaplib(o) => (ExperimentKind::Qaplib, o),
        }
    }
}

fn build_spec(kind: ExperimentKind, o: &Opts) -> Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::defaults(kind);
    if o.paper_scale {
        spec = spec.paper_scale();
    }
    if let Some(n) = o.n {
        spec.n = n;
    }
    if let Some(r) = &o.rho {
        spec.rho_grid = parse_list(r)?;
    }
    if let Some(a) = o.alpha {
        spec.alpha = a;
    }
    if let Some(r) = o.replicates {
        spec.replicates = r;
    }
    if let Some(m) = &o.methods {
        spec.methods = parse_list(m)?;
    }
    if let Some(s) = o.seed {
        spec.rng_seed = s;
    }
    if let Some(s) = &o.seeds {
        spec.seeds_grid = parse_list(s)?;
    }
    if let Some(v) = &o.noise {
        spec.feature_noise_grid = parse_list(v)?;
    }
    if let Some(p) = &o.flip {
        spec.flip_grid = parse_list(p)?;
    }
    if let Some(m) = &o.model {
        spec.model = m.parse()?;
        if spec.model != Model::Bernoulli && o.flip.is_none() {
            spec.flip_grid = (0..=10).map(|k| k as f64 / 10.0).collect();
        }
    }
    if let Some(l) = o.lambda {
        spec.lambda = l;
    }
    spec.output_path = o.out.clone();
    spec.validate()?;
    Ok(spec)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let (kind, opts) = cli.command.split();
    let spec = build_spec(kind, &opts)?;
    let mut config = RunConfig::resolve(opts.config.as_deref()).context("loading run configuration")?;
    if let Some(t) = opts.threads {
        config.threads = Some(t);
    }
    if let Some(d) = &opts.qaplib_dir {
        config.qaplib_dir = Some(d.clone());
    }

    let output = run_experiment(&spec, &config)?;
    for s in &output.skipped {
        eprintln!("skipped {s}");
    }
    match &spec.output_path {
        Some(path) => write_csv_file(&output.records, path)?,
        None => write_csv(&output.records, io::stdout().lock())?,
    }

    if let Some(dir) = &opts.plots {
        let summary = aggregate(&output.records)?;
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(format!("{}_summary.csv", kind.name()));
        let file = std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        write_summary(&summary, io::BufWriter::new(file))?;
        let alpha = (spec.model == Model::Bernoulli).then_some(spec.alpha);
        let art = emit_plots(&summary, kind, alpha, dir)?;
        eprintln!(
            "wrote {} and {} data files",
            art.script.display(),
            art.data_files.len()
        );
    }
    Ok(())
}
