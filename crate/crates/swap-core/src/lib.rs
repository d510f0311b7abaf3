//! Combinatorial pure-exploration bandits with two pull strengths.
//!
//! A learner faces `n` arms with unknown utilities in `[0, 1]` and must
//! identify the feasible subset of arms (the *cohort*) that maximizes an
//! objective. Observations come in two strengths: a *weak* pull costs 1 and
//! yields one unit of information, a *strong* pull costs `j >= 1` and yields
//! `s >= 1` units from a proportionally tighter reward distribution.
//!
//! The [`bandit`] module implements the SWAP confidence-bound algorithm
//! (strong-weak arm pulls) together with a dedicated weak-only CLUCB loop, a
//! strong-only specialization, uniform/random baselines, and a PAC stopping
//! relaxation. Supporting modules provide:
//!
//! - [`cohort`]: arms, problem instances, decision classes, objectives;
//! - [`oracle`]: maximization oracles (sort, greedy, brute force);
//! - [`difficulty`]: gap, hardness, and width metrics;
//! - [`env`]: simulated reward sources (Gaussian and score replay);
//! - [`bounds`]: closed-form theoretical cost bounds;
//! - [`zone`]: the strong/weak "optimal zone" grid sweep.

pub mod bandit;
pub mod bounds;
pub mod cohort;
pub mod difficulty;
pub mod env;
pub mod error;
pub mod oracle;
pub mod zone;

pub use bandit::{
    confidence_radius, run_baseline, run_clucb, run_strong_only, run_swap, BaselineKind,
    PullCounts, PullEvent, PullPolicy, RunRecord, SppKind, StoppingKind, StoppingRule,
    Termination,
};
pub use bounds::{
    corollary_boundary_j, strong_only_bound, swap_bound, weak_only_bound, BoundInputs,
};
pub use cohort::{cohort, evaluate, ArmId, ClassKind, Cohort, DecisionClass, ObjectiveKind,
    ProblemInstance};
pub use difficulty::{compute_gap, compute_width, difficulty, DifficultyReport};
pub use env::{
    derive_seed, Environment, GaussianEnvironment, PullOutcome, PullStrength, ReplayArm,
    ReplayEnvironment,
};
pub use error::{Error, Result};
pub use oracle::{maximize, maximize_constrained, OracleKind, OracleSolution};
pub use zone::{optimal_zone, ZoneCell, ZoneClass};
