//! Grid-sweep experiment runner.
//!
//! For every `(s, j)` cell the runner executes paired trials of three
//! policies — the general mixed-pull algorithm, strong-only, weak-only — on
//! the same per-trial instance with shared reward seeds, then writes:
//!
//! - `cells.csv`: per-cell aggregates (cost, utility, success rates);
//! - `hardness.csv`: per-trial hardness, empirical cost, theoretical bound;
//! - `zone.csv`: the strong/weak optimal-zone classification on one fixed
//!   instance;
//! - `manifest.json`: the resolved config (re-running it reproduces every
//!   output byte for byte);
//! - optional SVG renderings of the scatter and heatmaps.
//!
//! Outputs are staged in a scratch directory and renamed into place only
//! after every file has been written, so a failed run leaves no partial
//! results behind.

use std::fs;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use swap_core::bandit::{
    run_baseline, run_clucb, run_strong_only, run_swap, BaselineKind, PullPolicy, RunRecord,
    StoppingRule, Termination,
};
use swap_core::bounds::{strong_only_bound, swap_bound, weak_only_bound, BoundInputs};
use swap_core::cohort::{evaluate, Cohort, DecisionClass, ObjectiveKind, ProblemInstance};
use swap_core::difficulty::difficulty;
use swap_core::env::{
    derive_seed, Environment, GaussianEnvironment, ReplayArm, ReplayEnvironment, INSTANCE_STREAM,
};
use swap_core::oracle::{maximize, OracleKind, BRUTE_FORCE_LIMIT};
use swap_core::zone::{optimal_zone, ZoneCell};

use crate::config::{ExperimentConfig, InstanceSource, ObjectiveChoice};
use crate::svg;
use crate::CliError;

/// Seed tag for the canonical instance used by the zone sweep and
/// `describe`.
pub(crate) const CANONICAL_INSTANCE_TAG: u64 = 0xC0;
const ZONE_TRIALS_TAG: u64 = 0xD0;
const CELL_TAG_BASE: u64 = 0x1000;

/// Adaptive policies: these carry confidence-bound guarantees and
/// closed-form cost bounds, and populate `hardness.csv`.
pub(crate) const POLICIES: [&str; 3] = ["swap", "strong", "weak"];
/// Everything reported in `cells.csv`: the adaptive policies plus the
/// non-adaptive baselines.
pub(crate) const ALL_POLICIES: [&str; 5] = ["swap", "strong", "weak", "uniform", "random"];

/// Aggregates of one policy within one grid cell. Standard deviations are
/// sample deviations (zero for a single trial).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyAggregate {
    pub mean_cost: f64,
    pub std_cost: f64,
    pub mean_utility: f64,
    pub std_utility: f64,
    /// Fraction of trials returning the exact reference optimum.
    pub success_rate: f64,
    /// Fraction matching the configured oracle's pick on the true
    /// utilities; differs from `success_rate` only for approximate oracles.
    pub oracle_match_rate: f64,
    pub converged_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellRow {
    pub s: f64,
    pub j: f64,
    pub trials: usize,
    pub swap: PolicyAggregate,
    pub strong: PolicyAggregate,
    pub weak: PolicyAggregate,
    pub uniform: PolicyAggregate,
    pub random: PolicyAggregate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardnessRow {
    pub s: f64,
    pub j: f64,
    pub trial: usize,
    pub policy: &'static str,
    pub hardness: f64,
    pub h_tilde: f64,
    pub cost: f64,
    pub bound: Option<f64>,
    pub converged: bool,
}

#[derive(Debug)]
pub struct ExperimentOutput {
    pub cells: Vec<CellRow>,
    pub hardness: Vec<HardnessRow>,
    pub zone: Vec<ZoneCell>,
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
}

#[derive(Clone)]
pub(crate) enum PreparedSource {
    Generated {
        n: usize,
        k: usize,
        separation: f64,
        partitions: Option<usize>,
    },
    Replay {
        arms: Vec<ReplayArm>,
        instance: ProblemInstance,
        k: usize,
        fallback_sigma: Option<f64>,
    },
}

impl PreparedSource {
    pub(crate) fn load(config: &ExperimentConfig) -> Result<Self, CliError> {
        Ok(match &config.instance {
            InstanceSource::Generated {
                n,
                k,
                separation,
                partitions,
            } => PreparedSource::Generated {
                n: *n,
                k: *k,
                separation: *separation,
                partitions: *partitions,
            },
            InstanceSource::Replay {
                path,
                k,
                fallback_sigma,
            } => {
                // (s, j) here are placeholders; per-cell environments are
                // rebuilt from the same records with the cell's parameters.
                let env = ReplayEnvironment::from_csv_path(path, 1.0, 1.0, *fallback_sigma, 0)?;
                let instance = env.instance(config.sigma)?;
                if !(1..instance.n()).contains(k) {
                    return Err(CliError::Config(format!(
                        "field `instance.k` must satisfy 1 <= k < n, got k = {k}, n = {} (from {})",
                        instance.n(),
                        path.display()
                    )));
                }
                PreparedSource::Replay {
                    arms: env.arms().to_vec(),
                    instance,
                    k: *k,
                    fallback_sigma: *fallback_sigma,
                }
            }
        })
    }

    pub(crate) fn k(&self) -> usize {
        match self {
            PreparedSource::Generated { k, .. } => *k,
            PreparedSource::Replay { k, .. } => *k,
        }
    }

    fn instance_for_trial(
        &self,
        sigma: f64,
        trial_seed: u64,
    ) -> Result<ProblemInstance, CliError> {
        Ok(match self {
            PreparedSource::Generated {
                n,
                separation,
                partitions,
                ..
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
                rng.set_stream(INSTANCE_STREAM);
                ProblemInstance::generate(*n, *separation, *partitions, sigma, &mut rng)?
            }
            PreparedSource::Replay { instance, .. } => instance.clone(),
        })
    }

    fn environment(
        &self,
        instance: &ProblemInstance,
        s: f64,
        j: f64,
        trial_seed: u64,
    ) -> Result<Box<dyn Environment>, CliError> {
        Ok(match self {
            PreparedSource::Generated { .. } => {
                Box::new(GaussianEnvironment::for_instance(instance, s, j, trial_seed)?)
            }
            PreparedSource::Replay {
                arms,
                fallback_sigma,
                ..
            } => Box::new(ReplayEnvironment::new(
                arms.clone(),
                s,
                j,
                *fallback_sigma,
                trial_seed,
            )?),
        })
    }

    /// The fixed instance the zone sweep and `describe` report on.
    pub(crate) fn canonical_instance(
        &self,
        sigma: f64,
        config_seed: u64,
    ) -> Result<ProblemInstance, CliError> {
        self.instance_for_trial(sigma, derive_seed(config_seed, CANONICAL_INSTANCE_TAG))
    }
}

pub(crate) fn build_objective(
    choice: ObjectiveChoice,
    instance: &ProblemInstance,
) -> Result<ObjectiveKind, CliError> {
    Ok(match choice {
        ObjectiveChoice::TopKLinear => ObjectiveKind::TopKLinear,
        ObjectiveChoice::SqrtTopK => ObjectiveKind::SqrtTopK,
        ObjectiveChoice::Diversity => ObjectiveKind::diversity_for(instance).map_err(|_| {
            CliError::Config(
                "field `objective` is `diversity` but the instance has no partition labels"
                    .into(),
            )
        })?,
    })
}

/// The reference optimum that success is measured against: exact
/// enumeration when the class is small enough, otherwise the configured
/// oracle's pick.
pub(crate) fn reference_optimum(
    class: &DecisionClass,
    utilities: &[f64],
    configured: OracleKind,
) -> Result<Cohort, CliError> {
    if class.member_count() <= BRUTE_FORCE_LIMIT {
        Ok(maximize(OracleKind::BruteForce, utilities, class)?)
    } else {
        Ok(maximize(configured, utilities, class)?)
    }
}

pub(crate) fn gap_oracle(class: &DecisionClass, configured: OracleKind) -> OracleKind {
    if class.member_count() <= BRUTE_FORCE_LIMIT {
        OracleKind::BruteForce
    } else {
        configured
    }
}

struct TrialResult {
    hardness: f64,
    h_tilde: f64,
    // Per policy, in ALL_POLICIES order.
    costs: [f64; 5],
    utilities: [f64; 5],
    successes: [bool; 5],
    oracle_matches: [bool; 5],
    converged: [bool; 5],
    // Closed-form bounds exist for the three adaptive policies only.
    bounds: [Option<f64>; 3],
}

#[allow(clippy::too_many_arguments)]
fn run_trial(
    config: &ExperimentConfig,
    source: &PreparedSource,
    s: f64,
    j: f64,
    trial_seed: u64,
) -> Result<TrialResult, CliError> {
    let instance = source.instance_for_trial(config.sigma, trial_seed)?;
    let objective = build_objective(config.objective, &instance)?;
    let class = DecisionClass::top_k(instance.n(), source.k(), objective)?;
    let oracle: OracleKind = config.oracle.into();
    let stopping = match config.epsilon {
        Some(eps) => StoppingRule::pac(eps)?,
        None => StoppingRule::exact(),
    }
    .with_budget_cap(config.budget_cap);
    let sigma = config.sigma;
    let delta = config.delta;

    let policy = PullPolicy::formula(s, j)?;
    let mut env = source.environment(&instance, s, j, trial_seed)?;
    let swap_run = run_swap(
        env.as_mut(), &class, oracle, policy, stopping, delta, sigma, trial_seed,
    )?;
    let mut env = source.environment(&instance, s, j, trial_seed)?;
    let strong_run = run_strong_only(
        env.as_mut(), &class, oracle, s, j, stopping, delta, sigma, trial_seed,
    )?;
    let mut env = source.environment(&instance, s, j, trial_seed)?;
    let weak_run = run_clucb(env.as_mut(), &class, oracle, stopping, delta, sigma, trial_seed)?;
    let mut env = source.environment(&instance, s, j, trial_seed)?;
    let uniform_run = run_baseline(
        BaselineKind::Uniform, env.as_mut(), &class, oracle, policy, trial_seed,
    )?;
    // The random baseline gets the general run's realized cost as its
    // budget: an equal-spend comparison on the same reward seed.
    let mut env = source.environment(&instance, s, j, trial_seed)?;
    let random_run = run_baseline(
        BaselineKind::Random { budget: swap_run.total_cost },
        env.as_mut(), &class, oracle, policy, trial_seed,
    )?;

    let truth = instance.true_utilities();
    let reference = reference_optimum(&class, truth, oracle)?;
    let oracle_pick = maximize(oracle, truth, &class)?;
    let report = difficulty(&instance, &class, gap_oracle(&class, oracle))?;

    let base = BoundInputs::new(instance.n(), delta, sigma, policy, report.h_tilde)?;
    let bounds = [
        base.with_hoeffding_eps(delta, delta, None)
            .ok()
            .and_then(|b| swap_bound(&b).ok()),
        Some(strong_only_bound(&base)),
        Some(weak_only_bound(&base)),
    ];

    let runs: [&RunRecord; 5] = [&swap_run, &strong_run, &weak_run, &uniform_run, &random_run];
    let mut costs = [0.0; 5];
    let mut utilities = [0.0; 5];
    let mut successes = [false; 5];
    let mut oracle_matches = [false; 5];
    let mut converged = [false; 5];
    for (i, run) in runs.iter().enumerate() {
        costs[i] = run.total_cost;
        utilities[i] = evaluate(class.objective(), truth, &run.cohort)?;
        successes[i] = run.cohort == reference;
        oracle_matches[i] = run.cohort == oracle_pick;
        converged[i] = run.terminated == Termination::Converged;
    }
    Ok(TrialResult {
        hardness: report.hardness,
        h_tilde: report.h_tilde,
        costs,
        utilities,
        successes,
        oracle_matches,
        converged,
        bounds,
    })
}

fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

fn aggregate(trials: &[TrialResult], policy: usize) -> PolicyAggregate {
    let costs: Vec<f64> = trials.iter().map(|t| t.costs[policy]).collect();
    let utilities: Vec<f64> = trials.iter().map(|t| t.utilities[policy]).collect();
    let (mean_cost, std_cost) = mean_and_std(&costs);
    let (mean_utility, std_utility) = mean_and_std(&utilities);
    let rate = |f: &dyn Fn(&TrialResult) -> bool| {
        trials.iter().filter(|t| f(t)).count() as f64 / trials.len() as f64
    };
    PolicyAggregate {
        mean_cost,
        std_cost,
        mean_utility,
        std_utility,
        success_rate: rate(&|t| t.successes[policy]),
        oracle_match_rate: rate(&|t| t.oracle_matches[policy]),
        converged_rate: rate(&|t| t.converged[policy]),
    }
}

/// Runs the full experiment described by `config` and writes its outputs
/// under `config.out_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput, CliError> {
    config.validate()?;
    let source = PreparedSource::load(config)?;
    let cells = config.grid.cells();

    let mut cell_rows = Vec::with_capacity(cells.len());
    let mut hardness_rows = Vec::new();
    for (ci, &(s, j)) in cells.iter().enumerate() {
        let cell_seed = derive_seed(config.seed, CELL_TAG_BASE + ci as u64);
        // Trials run in parallel; collection preserves trial order so the
        // aggregates below are identical however many threads run.
        let trials: Vec<TrialResult> = (0..config.trials)
            .into_par_iter()
            .map(|ti| run_trial(config, &source, s, j, derive_seed(cell_seed, ti as u64)))
            .collect::<Result<_, _>>()?;
        for (ti, trial) in trials.iter().enumerate() {
            for (pi, policy) in POLICIES.iter().enumerate() {
                hardness_rows.push(HardnessRow {
                    s,
                    j,
                    trial: ti,
                    policy,
                    hardness: trial.hardness,
                    h_tilde: trial.h_tilde,
                    cost: trial.costs[pi],
                    bound: trial.bounds[pi],
                    converged: trial.converged[pi],
                });
            }
        }
        cell_rows.push(CellRow {
            s,
            j,
            trials: config.trials,
            swap: aggregate(&trials, 0),
            strong: aggregate(&trials, 1),
            weak: aggregate(&trials, 2),
            uniform: aggregate(&trials, 3),
            random: aggregate(&trials, 4),
        });
    }

    // Zone sweep: one fixed instance, trial seeds shared across cells.
    let zone_instance = source.canonical_instance(config.sigma, config.seed)?;
    let zone_objective = build_objective(config.objective, &zone_instance)?;
    let zone_class = DecisionClass::top_k(zone_instance.n(), source.k(), zone_objective)?;
    let stopping = match config.epsilon {
        Some(eps) => StoppingRule::pac(eps)?,
        None => StoppingRule::exact(),
    }
    .with_budget_cap(config.budget_cap);
    let zone = optimal_zone(
        &cells,
        &zone_instance,
        &zone_class,
        config.oracle.into(),
        &stopping,
        config.delta,
        config.trials,
        derive_seed(config.seed, ZONE_TRIALS_TAG),
    )?;
    let zone_difficulty = difficulty(
        &zone_instance,
        &zone_class,
        gap_oracle(&zone_class, config.oracle.into()),
    )?;

    let files = write_outputs(
        config,
        &cell_rows,
        &hardness_rows,
        &zone,
        zone_instance.n(),
        zone_difficulty.h_tilde,
    )?;
    Ok(ExperimentOutput {
        cells: cell_rows,
        hardness: hardness_rows,
        zone,
        out_dir: config.out_dir.clone(),
        files,
    })
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn write_outputs(
    config: &ExperimentConfig,
    cells: &[CellRow],
    hardness: &[HardnessRow],
    zone: &[ZoneCell],
    zone_n: usize,
    zone_h_tilde: f64,
) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(&config.out_dir)?;
    let stage = config.out_dir.join(".stage");
    if stage.exists() {
        fs::remove_dir_all(&stage)?;
    }
    fs::create_dir_all(&stage)?;

    let mut names: Vec<PathBuf> = Vec::new();
    let mut track = |name: &str| -> PathBuf {
        names.push(PathBuf::from(name));
        stage.join(name)
    };

    {
        let mut w = csv::Writer::from_path(track("cells.csv"))?;
        let mut header = vec!["s".to_string(), "j".to_string(), "trials".to_string()];
        for p in ALL_POLICIES {
            for col in [
                "mean_cost",
                "std_cost",
                "mean_utility",
                "std_utility",
                "success",
                "oracle_match",
                "converged",
            ] {
                header.push(format!("{col}_{p}"));
            }
        }
        w.write_record(&header)?;
        for row in cells {
            let mut record = vec![fmt_f64(row.s), fmt_f64(row.j), row.trials.to_string()];
            for agg in [&row.swap, &row.strong, &row.weak, &row.uniform, &row.random] {
                record.extend([
                    fmt_f64(agg.mean_cost),
                    fmt_f64(agg.std_cost),
                    fmt_f64(agg.mean_utility),
                    fmt_f64(agg.std_utility),
                    fmt_f64(agg.success_rate),
                    fmt_f64(agg.oracle_match_rate),
                    fmt_f64(agg.converged_rate),
                ]);
            }
            w.write_record(&record)?;
        }
        w.flush()?;
    }

    {
        let mut w = csv::Writer::from_path(track("hardness.csv"))?;
        w.write_record([
            "s", "j", "trial", "policy", "hardness", "h_tilde", "cost", "bound", "converged",
        ])
        ?;
        for row in hardness {
            w.write_record([
                fmt_f64(row.s),
                fmt_f64(row.j),
                row.trial.to_string(),
                row.policy.to_string(),
                fmt_f64(row.hardness),
                fmt_f64(row.h_tilde),
                fmt_f64(row.cost),
                fmt_opt(row.bound),
                row.converged.to_string(),
            ])
            ?;
        }
        w.flush()?;
    }

    {
        let mut w = csv::Writer::from_path(track("zone.csv"))?;
        w.write_record([
            "s",
            "j",
            "mean_cost_swap",
            "mean_cost_strong",
            "mean_cost_weak",
            "class",
        ])
        ?;
        for cell in zone {
            w.write_record([
                fmt_f64(cell.s),
                fmt_f64(cell.j),
                fmt_opt(cell.mean_cost_swap),
                fmt_opt(cell.mean_cost_strong),
                fmt_opt(cell.mean_cost_weak),
                cell.class.as_str().to_string(),
            ])
            ?;
        }
        w.flush()?;
    }

    fs::write(
        track("manifest.json"),
        serde_json::to_string_pretty(config)?,
    )?;

    if config.plots {
        fs::write(
            track("hardness_scatter.svg"),
            svg::hardness_scatter(hardness),
        )?;
        fs::write(track("zone_heatmap.svg"), svg::zone_heatmap(zone))?;
        fs::write(
            track("strong_vs_weak_heatmap.svg"),
            svg::strong_vs_weak_heatmap(zone, zone_n, zone_h_tilde, config.delta),
        )?;
    }

    for name in &names {
        fs::rename(stage.join(name), config.out_dir.join(name))?;
    }
    fs::remove_dir_all(&stage)?;
    Ok(names)
}
