//! The strong/weak "optimal zone": where the mixed-pull algorithm beats its
//! single-strength specializations.
//!
//! Each grid cell `(s, j)` runs paired trials of the general algorithm, the
//! strong-only specialization, and the weak-only specialization on the same
//! instance with shared reward seeds, then classifies the cell by mean
//! empirical cost among converged runs.

use rayon::prelude::*;

use crate::bandit::{run_clucb, run_strong_only, run_swap, PullPolicy, StoppingRule, Termination};
use crate::cohort::{DecisionClass, ProblemInstance};
use crate::env::{derive_seed, GaussianEnvironment};
use crate::error::{Error, Result};
use crate::oracle::OracleKind;

/// Per-cell verdict, by strict mean-cost comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZoneClass {
    /// The general algorithm beat both specializations.
    SwapBest,
    /// It beat exactly one of them.
    BeatsOne,
    /// It beat neither.
    Worst,
    /// Some policy had no converged run; means are not comparable.
    Inconclusive,
}

impl ZoneClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            ZoneClass::SwapBest => "swap_best",
            ZoneClass::BeatsOne => "beats_one",
            ZoneClass::Worst => "worst",
            ZoneClass::Inconclusive => "inconclusive",
        }
    }
}

/// One cell of the sweep. Mean costs are `None` when no run of that policy
/// converged within the budget.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoneCell {
    pub s: f64,
    pub j: f64,
    pub mean_cost_swap: Option<f64>,
    pub mean_cost_strong: Option<f64>,
    pub mean_cost_weak: Option<f64>,
    pub class: ZoneClass,
}

fn mean_converged(costs: &[(f64, Termination)]) -> Option<f64> {
    let converged: Vec<f64> = costs
        .iter()
        .filter(|(_, t)| *t == Termination::Converged)
        .map(|(c, _)| *c)
        .collect();
    if converged.is_empty() {
        None
    } else {
        Some(converged.iter().sum::<f64>() / converged.len() as f64)
    }
}

/// Sweeps the `(s, j)` grid with paired trials on one fixed instance.
///
/// Trial seeds are shared across cells and across the three policies, so
/// comparisons within a cell and between cells see the same reward noise.
/// Cells run in parallel; the output order matches the grid order.
#[allow(clippy::too_many_arguments)]
pub fn optimal_zone(
    grid: &[(f64, f64)],
    instance: &ProblemInstance,
    class: &DecisionClass,
    oracle: OracleKind,
    stopping: &StoppingRule,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<Vec<ZoneCell>> {
    if grid.is_empty() {
        return Err(Error::InvalidRun("empty (s, j) grid".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidRun("zone sweep needs trials >= 1".into()));
    }
    let sigma = instance.sigma();
    grid.par_iter()
        .map(|&(s, j)| {
            let policy = PullPolicy::formula(s, j)?;
            let mut swap_costs = Vec::with_capacity(trials);
            let mut strong_costs = Vec::with_capacity(trials);
            let mut weak_costs = Vec::with_capacity(trials);
            for trial in 0..trials {
                let trial_seed = derive_seed(seed, trial as u64);
                let mut env = GaussianEnvironment::for_instance(instance, s, j, trial_seed)?;
                let general = run_swap(
                    &mut env, class, oracle, policy, *stopping, delta, sigma, trial_seed,
                )?;
                swap_costs.push((general.total_cost, general.terminated));
                let mut env = GaussianEnvironment::for_instance(instance, s, j, trial_seed)?;
                let strong = run_strong_only(
                    &mut env, class, oracle, s, j, *stopping, delta, sigma, trial_seed,
                )?;
                strong_costs.push((strong.total_cost, strong.terminated));
                let mut env = GaussianEnvironment::for_instance(instance, s, j, trial_seed)?;
                let weak =
                    run_clucb(&mut env, class, oracle, *stopping, delta, sigma, trial_seed)?;
                weak_costs.push((weak.total_cost, weak.terminated));
            }
            let mean_cost_swap = mean_converged(&swap_costs);
            let mean_cost_strong = mean_converged(&strong_costs);
            let mean_cost_weak = mean_converged(&weak_costs);
            let class = match (mean_cost_swap, mean_cost_strong, mean_cost_weak) {
                (Some(sw), Some(st), Some(wk)) => {
                    match u8::from(sw < st) + u8::from(sw < wk) {
                        2 => ZoneClass::SwapBest,
                        1 => ZoneClass::BeatsOne,
                        _ => ZoneClass::Worst,
                    }
                }
                _ => ZoneClass::Inconclusive,
            };
            Ok(ZoneCell {
                s,
                j,
                mean_cost_swap,
                mean_cost_strong,
                mean_cost_weak,
                class,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohort::ObjectiveKind;
    use rand::SeedableRng;

    fn fixture() -> (ProblemInstance, DecisionClass) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        let inst = ProblemInstance::generate(6, 0.08, None, 0.4, &mut rng).unwrap();
        let class = DecisionClass::top_k(6, 2, ObjectiveKind::TopKLinear).unwrap();
        (inst, class)
    }

    #[test]
    fn cheap_informative_strong_pulls_beat_weak_pulls() {
        let (inst, class) = fixture();
        let cells = optimal_zone(
            &[(10.0, 1.0)],
            &inst,
            &class,
            OracleKind::SortTopK,
            &StoppingRule::exact(),
            0.1,
            20,
            7,
        )
        .unwrap();
        let cell = &cells[0];
        assert!(cell.mean_cost_strong.unwrap() < cell.mean_cost_weak.unwrap());
    }

    #[test]
    fn cost_dominated_strong_pulls_lose_to_weak_pulls() {
        let (inst, class) = fixture();
        let cells = optimal_zone(
            &[(2.0, 4.0)],
            &inst,
            &class,
            OracleKind::SortTopK,
            &StoppingRule::exact(),
            0.1,
            20,
            7,
        )
        .unwrap();
        let cell = &cells[0];
        assert!(cell.mean_cost_weak.unwrap() < cell.mean_cost_strong.unwrap());
    }

    #[test]
    fn zone_output_is_deterministic_and_ordered_like_the_grid() {
        let (inst, class) = fixture();
        let grid = [(2.0, 1.0), (5.0, 2.0), (10.0, 1.0)];
        let run = || {
            optimal_zone(
                &grid,
                &inst,
                &class,
                OracleKind::SortTopK,
                &StoppingRule::exact(),
                0.1,
                5,
                3,
            )
            .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a, b);
        for (cell, (s, j)) in a.iter().zip(grid.iter()) {
            assert_eq!((cell.s, cell.j), (*s, *j));
        }
    }

    #[test]
    fn impossible_budgets_mark_cells_inconclusive() {
        let inst = ProblemInstance::new(vec![0.52, 0.5, 0.48], None, 1.0).unwrap();
        let class = DecisionClass::top_k(3, 2, ObjectiveKind::TopKLinear).unwrap();
        let cells = optimal_zone(
            &[(2.0, 2.0)],
            &inst,
            &class,
            OracleKind::SortTopK,
            &StoppingRule::exact().with_budget_cap(10.0),
            0.1,
            4,
            1,
        )
        .unwrap();
        assert_eq!(cells[0].class, ZoneClass::Inconclusive);
    }
}
