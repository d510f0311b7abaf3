//! Difficulty report for a configured instance: gaps, hardness, width,
//! scaled hardness, and the three theoretical bounds across the grid.

use std::fmt::Write;

use swap_core::bandit::PullPolicy;
use swap_core::bounds::{strong_only_bound, swap_bound, weak_only_bound, BoundInputs};
use swap_core::cohort::DecisionClass;
use swap_core::difficulty::difficulty;

use crate::config::ExperimentConfig;
use crate::experiment::{build_objective, gap_oracle};
use crate::CliError;

/// Renders the difficulty report for the config's canonical instance (the
/// same instance the zone sweep runs on).
pub fn describe(config: &ExperimentConfig) -> Result<String, CliError> {
    config.validate()?;
    if config.sigma <= 0.0 {
        return Err(CliError::Config(format!(
            "field `sigma` must be > 0 to analyze difficulty (h_tilde scales with sigma^2), got {}",
            config.sigma
        )));
    }
    let source = crate::experiment::PreparedSource::load(config)?;
    let instance = source.canonical_instance(config.sigma, config.seed)?;
    let objective = build_objective(config.objective, &instance)?;
    let class = DecisionClass::top_k(instance.n(), source.k(), objective)?;
    let oracle = gap_oracle(&class, config.oracle.into());
    let report = difficulty(&instance, &class, oracle)?;

    let mut out = String::new();
    let fmt_vec = |values: &[f64]| {
        values
            .iter()
            .map(|v| format!("{v:.6}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let _ = writeln!(
        out,
        "instance: n = {}, k = {}, sigma = {}, objective = {}, gap oracle = {}",
        instance.n(),
        source.k(),
        config.sigma,
        class.objective().name(),
        oracle.name(),
    );
    let _ = writeln!(out, "utilities: {}", fmt_vec(instance.true_utilities()));
    if let Some(labels) = instance.labels() {
        let _ = writeln!(
            out,
            "labels:    {}",
            labels
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        );
    }
    let _ = writeln!(out, "gaps:      {}", fmt_vec(&report.gaps));
    let _ = writeln!(out, "hardness H = {}", report.hardness);
    let _ = writeln!(out, "width      = {}", report.width);
    let _ = writeln!(out, "h_tilde    = {}", report.h_tilde);
    let _ = writeln!(out, "cost bounds per (s, j):");
    for (s, j) in config.grid.cells() {
        let policy = PullPolicy::formula(s, j)?;
        let base = BoundInputs::new(instance.n(), config.delta, config.sigma, policy, report.h_tilde)
            ?;
        let mixed = base
            .with_hoeffding_eps(config.delta, config.delta, None)
            .and_then(|b| swap_bound(&b))
            .map(|b| format!("{b:.1}"))
            .unwrap_or_else(|_| "undefined".to_string());
        let _ = writeln!(
            out,
            "  s = {s:>5}, j = {j:>5}: weak = {:.1}, strong = {:.1}, swap = {mixed}",
            weak_only_bound(&base),
            strong_only_bound(&base),
        );
    }
    Ok(out)
}
