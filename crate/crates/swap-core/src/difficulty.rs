//! Instance difficulty: per-arm gaps, hardness, and class width.
//!
//! These metrics are analysis-side only: they read the hidden true utilities
//! and quantify how much sampling an instance demands. The gap of an arm is
//! the objective loss from wrongly flipping its membership in the optimal
//! cohort; hardness is the sum of inverse squared gaps; width is the
//! smallest symmetric difference between two feasible cohorts.

use crate::cohort::{evaluate, ArmId, ClassKind, DecisionClass, ProblemInstance};
use crate::error::{Error, Result};
use crate::oracle::{maximize, maximize_constrained, OracleKind};

/// Difficulty metrics of one instance under one decision class.
#[derive(Debug, Clone, PartialEq)]
pub struct DifficultyReport {
    /// Per-arm gaps. Infinite when no feasible cohort contests the arm.
    pub gaps: Vec<f64>,
    /// Sum of inverse squared gaps. Infinite when ties make a gap zero.
    pub hardness: f64,
    /// Smallest symmetric-difference size between two distinct cohorts.
    pub width: usize,
    /// `max(width^2 * sigma^2 * hardness, 1)`: the scaled hardness appearing
    /// in every closed-form cost bound.
    pub h_tilde: f64,
}

/// Gap of `arm`: the optimal value minus the best value attainable when the
/// arm's membership in the optimum is flipped.
///
/// Arms in the optimal cohort are scored against the best cohort excluding
/// them; arms outside against the best cohort including them. When no
/// feasible cohort satisfies the flip, the arm is never contested and its
/// gap is infinite.
pub fn compute_gap(
    instance: &ProblemInstance,
    class: &DecisionClass,
    arm: ArmId,
    oracle: OracleKind,
) -> Result<f64> {
    if arm.0 >= instance.n() {
        return Err(Error::ArmOutOfRange {
            arm: arm.0,
            n: instance.n(),
        });
    }
    let utilities = instance.true_utilities();
    let best = maximize(oracle, utilities, class)?;
    let best_value = evaluate(class.objective(), utilities, &best)?;
    let flipped = if best.contains(&arm) {
        maximize_constrained(oracle, utilities, class, None, Some(arm))?
    } else {
        maximize_constrained(oracle, utilities, class, Some(arm), None)?
    };
    Ok(match flipped {
        Some(sol) => best_value - sol.value,
        None => f64::INFINITY,
    })
}

/// Smallest `|A \ B| + |B \ A|` over distinct feasible cohorts.
///
/// Top-k classes short-circuit to the analytic value 2; explicit classes are
/// scanned pairwise (they are desk-scale by construction).
pub fn compute_width(class: &DecisionClass) -> Result<usize> {
    match class.kind() {
        ClassKind::TopK { .. } => Ok(2),
        ClassKind::Explicit { members } => {
            let distinct: Vec<_> = {
                let mut seen = std::collections::BTreeSet::new();
                members.iter().filter(|m| seen.insert(*m)).collect()
            };
            if distinct.len() < 2 {
                return Err(Error::WidthUndefined {
                    members: distinct.len(),
                });
            }
            let mut width = usize::MAX;
            for (i, a) in distinct.iter().enumerate() {
                for b in &distinct[i + 1..] {
                    let common = a.intersection(b).count();
                    let d = (a.len() - common) + (b.len() - common);
                    width = width.min(d);
                }
            }
            Ok(width)
        }
    }
}

/// Hardness: sum of inverse squared gaps. A zero gap (tied optima) makes the
/// sum infinite; an infinite gap (uncontested arm) contributes nothing.
pub fn hardness(gaps: &[f64]) -> f64 {
    gaps.iter().map(|&g| g.powi(-2)).sum()
}

/// Full difficulty report: gaps for every arm, hardness, width, and the
/// scaled hardness `h_tilde` under the instance's noise scale.
pub fn difficulty(
    instance: &ProblemInstance,
    class: &DecisionClass,
    oracle: OracleKind,
) -> Result<DifficultyReport> {
    let gaps: Vec<f64> = (0..instance.n())
        .map(|i| compute_gap(instance, class, ArmId(i), oracle))
        .collect::<Result<_>>()?;
    let hardness = hardness(&gaps);
    let width = compute_width(class)?;
    let sigma = instance.sigma();
    let h_tilde = ((width * width) as f64 * sigma * sigma * hardness).max(1.0);
    Ok(DifficultyReport {
        gaps,
        hardness,
        width,
        h_tilde,
    })
}
