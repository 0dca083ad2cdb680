//! Experiment descriptions.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExperimentKind {
    /// Relaxed and projected energies against ρ.
    Energy,
    /// Distances from `D*` to `P_c`, `P*` and a random permutation.
    Distance,
    /// Recovery rate of `P*`.
    Success,
    /// `−⟨A'D, DB⟩` at `P*` and at the FAQ output.
    ObjectiveTrace,
    Directed,
    Seeds,
    Features,
    /// Pairwise KKT condition at the true alignment.
    KktCheck,
    /// Small instances compared with exhaustive search.
    OracleCheck,
    Qaplib,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 10] = [
        Self::Energy,
        Self::Distance,
        Self::Success,
        Self::ObjectiveTrace,
        Self::Directed,
        Self::Seeds,
        Self::Features,
        Self::KktCheck,
        Self::OracleCheck,
        Self::Qaplib,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Energy => "energy",
            Self::Distance => "distance",
            Self::Success => "success",
            Self::ObjectiveTrace => "objective-trace",
            Self::Directed => "directed",
            Self::Seeds => "seeds",
            Self::Features => "features",
            Self::KktCheck => "kkt-check",
            Self::OracleCheck => "oracle-check",
            Self::Qaplib => "qaplib",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| HarnessError::InvalidSpec(format!("unknown experiment `{s}`")))
    }
}

/// A way of producing a permutation from a graph pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Convex relaxation from the barycenter, then projection (`P_c`).
    ConvexProject,
    /// FAQ from the barycenter `J`.
    FaqJ,
    /// FAQ from the convex optimum `D*`.
    FaqDstar,
    /// FAQ from the true alignment `P*`.
    FaqPstar,
}

impl Method {
    pub const ALL: [Method; 4] = [Self::ConvexProject, Self::FaqJ, Self::FaqDstar, Self::FaqPstar];

    pub fn name(self) -> &'static str {
        match self {
            Self::ConvexProject => "convex+project",
            Self::FaqJ => "faq-J",
            Self::FaqDstar => "faq-Dstar",
            Self::FaqPstar => "faq-Pstar",
        }
    }

    pub fn needs_convex(self) -> bool {
        matches!(self, Self::ConvexProject | Self::FaqDstar)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| HarnessError::InvalidSpec(format!("unknown method `{s}`")))
    }
}

/// Random graph model behind the Monte Carlo experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    /// ρ-correlated Bernoulli(Λ) with Λ uniform on `[α, 1 − α]`.
    Bernoulli,
    /// Chung-Lu power law with exponent `beta`, matched against a bit-flipped copy.
    PowerLaw { beta: f64 },
    /// Maximal random graph with degrees at most `dmax`, matched against a
    /// bit-flipped copy.
    BoundedDegree { dmax: usize },
}

impl Model {
    pub fn name(&self) -> String {
        match self {
            Self::Bernoulli => "bernoulli".into(),
            Self::PowerLaw { beta } => format!("power-law({beta})"),
            Self::BoundedDegree { dmax } => format!("bounded-degree({dmax})"),
        }
    }

    pub fn uses_flips(&self) -> bool {
        !matches!(self, Self::Bernoulli)
    }
}

impl FromStr for Model {
    type Err = HarnessError;

    /// Accepts `bernoulli`, `power-law`, `power-law(2.5)`, `bounded-degree`
    /// and `bounded-degree(4)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || HarnessError::InvalidSpec(format!("unknown model `{s}`"));
        let (head, arg) = match s.split_once('(') {
            Some((h, rest)) => (h, Some(rest.strip_suffix(')').ok_or_else(bad)?)),
            None => (s, None),
        };
        match head {
            "bernoulli" if arg.is_none() => Ok(Self::Bernoulli),
            "power-law" => Ok(Self::PowerLaw {
                beta: arg.map_or(Ok(2.0), |a| a.parse().map_err(|_| bad()))?,
            }),
            "bounded-degree" => Ok(Self::BoundedDegree {
                dmax: arg.map_or(Ok(4), |a| a.parse().map_err(|_| bad()))?,
            }),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub rho_grid: Vec<f64>,
    pub alpha: f64,
    pub replicates: usize,
    pub methods: Vec<Method>,
    pub seeds_grid: Vec<usize>,
    pub feature_noise_grid: Vec<f64>,
    pub flip_grid: Vec<f64>,
    pub model: Model,
    pub directed: bool,
    /// Weight on the graph term in the feature experiment.
    pub lambda: f64,
    pub feature_dim: usize,
    pub rng_seed: u64,
    pub output_path: Option<PathBuf>,
}

fn tenths() -> Vec<f64> {
    (1..=10).map(|k| k as f64 / 10.0).collect()
}

impl ExperimentSpec {
    /// Desk-scale defaults for `kind`: n = 150, α = 0.1, 20 replicates.
    pub fn defaults(kind: ExperimentKind) -> Self {
        let mut spec = Self {
            experiment: kind,
            n: 150,
            rho_grid: tenths(),
            alpha: 0.1,
            replicates: 20,
            methods: Method::ALL.to_vec(),
            seeds_grid: vec![0],
            feature_noise_grid: vec![0.0],
            flip_grid: vec![0.0],
            model: Model::Bernoulli,
            directed: false,
            lambda: 0.5,
            feature_dim: 5,
            rng_seed: 0,
            output_path: None,
        };
        match kind {
            ExperimentKind::Energy | ExperimentKind::Distance => {
                spec.methods = vec![Method::ConvexProject];
            }
            ExperimentKind::ObjectiveTrace => spec.methods = vec![Method::FaqDstar],
            ExperimentKind::Directed => spec.directed = true,
            ExperimentKind::Seeds => {
                spec.rho_grid = vec![0.3, 0.4, 0.5];
                spec.seeds_grid = vec![0, 5, 10, 15];
            }
            ExperimentKind::Features => {
                spec.rho_grid = vec![0.4];
                spec.feature_noise_grid = vec![0.3, 0.5, 0.7];
                spec.methods = vec![Method::ConvexProject, Method::FaqDstar, Method::FaqPstar];
            }
            ExperimentKind::KktCheck => {
                spec.rho_grid = vec![0.5];
                spec.methods = vec![Method::ConvexProject];
            }
            ExperimentKind::OracleCheck => {
                spec.n = 7;
                spec.alpha = 0.2;
                spec.rho_grid = vec![0.9];
                spec.replicates = 100;
            }
            ExperimentKind::Qaplib => {
                spec.methods = vec![Method::ConvexProject, Method::FaqJ, Method::FaqDstar];
                spec.replicates = 1;
            }
            ExperimentKind::Success => {}
        }
        spec
    }

    /// Scales replicates to the 100 used for the published figures.
    pub fn paper_scale(mut self) -> Self {
        if self.experiment != ExperimentKind::Qaplib {
            self.replicates = 100;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::InvalidSpec(m));
        if self.replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        if self.methods.is_empty() {
            return bad("at least one method is required".into());
        }
        if self.experiment == ExperimentKind::Qaplib {
            return Ok(());
        }
        if self.n < 2 {
            return bad("n must be at least 2".into());
        }
        if self.experiment == ExperimentKind::OracleCheck && self.n > gmatch::oracle::BRUTE_FORCE_CAP {
            return bad(format!(
                "oracle-check needs n <= {}",
                gmatch::oracle::BRUTE_FORCE_CAP
            ));
        }
        if self.rho_grid.is_empty() || self.rho_grid.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return bad("rho grid must be nonempty with values in [0, 1]".into());
        }
        if !(self.alpha > 0.0 && self.alpha <= 0.5) {
            return bad(format!("alpha {} outside (0, 1/2]", self.alpha));
        }
        if self.seeds_grid.is_empty() || self.seeds_grid.iter().any(|&s| s > self.n) {
            return bad("seeds grid must be nonempty with counts at most n".into());
        }
        if self.feature_noise_grid.is_empty()
            || self.feature_noise_grid.iter().any(|v| v.is_nan() || *v < 0.0)
        {
            return bad("noise grid must be nonempty and nonnegative".into());
        }
        if self.flip_grid.is_empty() || self.flip_grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return bad("flip grid must be nonempty with values in [0, 1]".into());
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return bad(format!("lambda {} outside [0, 1]", self.lambda));
        }
        if self.feature_dim == 0 {
            return bad("feature dimension must be at least 1".into());
        }
        if self.directed && self.model != Model::Bernoulli {
            return bad("directed graphs are only drawn from the Bernoulli model".into());
        }
        Ok(())
    }

    /// The threshold `ρ = 1 − 1/(2(1 − α))` above which the true alignment
    /// is the indefinite optimum with high probability.
    pub fn rho_threshold(&self) -> f64 {
        1.0 - 1.0 / (2.0 * (1.0 - self.alpha))
    }
}

/// Parses a comma-separated list.
pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| HarnessError::InvalidSpec(format!("cannot parse list item `{t}`")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in ExperimentKind::ALL {
            assert_eq!(k.name().parse::<ExperimentKind>().unwrap(), k);
        }
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("faq-X".parse::<Method>().is_err());
    }

    #[test]
    fn model_syntax() {
        assert_eq!("bernoulli".parse::<Model>().unwrap(), Model::Bernoulli);
        assert_eq!(
            "power-law".parse::<Model>().unwrap(),
            Model::PowerLaw { beta: 2.0 }
        );
        assert_eq!(
            "power-law(2.5)".parse::<Model>().unwrap(),
            Model::PowerLaw { beta: 2.5 }
        );
        assert_eq!(
            "bounded-degree(3)".parse::<Model>().unwrap(),
            Model::BoundedDegree { dmax: 3 }
        );
        assert!("bounded-degree(3".parse::<Model>().is_err());
        assert!("bernoulli(1)".parse::<Model>().is_err());
    }

    #[test]
    fn threshold_for_default_alpha() {
        let s = ExperimentSpec::defaults(ExperimentKind::Success);
        assert!((s.rho_threshold() - 0.444).abs() < 1e-3);
    }

    #[test]
    fn validation() {
        let mut s = ExperimentSpec::defaults(ExperimentKind::Success);
        assert!(s.validate().is_ok());
        s.replicates = 0;
        assert!(s.validate().is_err());
        let mut s = ExperimentSpec::defaults(ExperimentKind::Success);
        s.methods.clear();
        assert!(s.validate().is_err());
        let mut s = ExperimentSpec::defaults(ExperimentKind::OracleCheck);
        s.n = 12;
        assert!(s.validate().is_err());
        let mut s = ExperimentSpec::defaults(ExperimentKind::Seeds);
        s.seeds_grid = vec![200];
        assert!(s.validate().is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list::<f64>("0.1, 0.2,0.3").unwrap(), vec![0.1, 0.2, 0.3]);
        assert!(parse_list::<usize>("1,x").is_err());
    }
}
