//! Graph matching by Frank-Wolfe over the doubly stochastic polytope.
//!
//! Two relaxations of `min_P ‖A − PBP^T‖²_F` are provided: the convex
//! `‖AD − DB‖²_F` and the indefinite `−⟨AD, DB⟩` (FAQ). Both run on the same
//! Frank-Wolfe engine, with optional seeds and vertex features. Alongside
//! the solvers are an exact linear assignment solver, random graph models,
//! brute-force reference solvers and QAPLIB input.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod error;
pub mod identities;
pub mod lap;
pub mod matrix;
pub mod objective;
pub mod oracle;
pub mod qaplib;
pub mod random;
pub mod solver;

pub use error::{Error, Result};
pub use identities::{kkt_pairwise_check, n_correct, theta_gamma_identity, KktCheck, ThetaGamma};
pub use lap::{project_to_permutation, solve_lap_max, solve_lap_min, AssignmentResult};
pub use matrix::{AdjacencyMatrix, DoublyStochastic, Permutation, DS_TOLERANCE};
pub use objective::{
    convex_gradient, convex_objective, frobenius_objective, indefinite_gradient, neg_inner_objective,
    ObjectivePair, Relaxation,
};
pub use oracle::{brute_force_gm, brute_force_lap, fw_gap_at, BruteForceResult};
pub use qaplib::{parse_qaplib, qap_cost, QapInstance};
pub use random::{
    bit_flip, feature_cost, permute_graph, sample_correlated_pair, stream_rng, CorrelatedPairSpec,
    FeatureSet, LambdaSource,
};
pub use solver::{
    fw_step, solve, solve_convex, solve_indefinite, solve_seeded, solve_with_features, FwStep, InitSpec,
    MatchProblem, MatchResult, SolverConfig,
};
