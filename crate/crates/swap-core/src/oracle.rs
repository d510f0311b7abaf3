//! Maximization oracles: `argmax` of the objective over a decision class.
//!
//! Every oracle breaks value ties deterministically in favor of the
//! lexicographically smallest cohort (lowest arm ids), so runs are
//! reproducible under fixed seeds.

use crate::cohort::{cmp_cohorts, evaluate, ArmId, ClassKind, Cohort, DecisionClass, ObjectiveKind};
use crate::error::{Error, Result};

/// Largest class a brute-force enumeration will accept.
pub const BRUTE_FORCE_LIMIT: u128 = 1 << 20;

/// Weight offset used to force an arm into or out of the maximizer. Large
/// enough to dominate any desk-scale objective difference, small enough that
/// adding it to a weight loses no meaningful precision.
const FORCE_WEIGHT: f64 = 1e6;

/// Which maximization routine to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    /// Take the `k` largest weights. Exact for the linear (and square-root)
    /// top-k objectives on top-k classes.
    SortTopK,
    /// Add the arm with the largest marginal objective gain until the cohort
    /// has `k` members. `(1 - 1/e)`-approximate for monotone submodular
    /// objectives on top-k classes.
    GreedyCardinality,
    /// Enumerate the class and return the exact maximizer. Refuses classes
    /// with more than [`BRUTE_FORCE_LIMIT`] members.
    BruteForce,
}

impl OracleKind {
    pub fn name(&self) -> &'static str {
        match self {
            OracleKind::SortTopK => "sort_top_k",
            OracleKind::GreedyCardinality => "greedy_cardinality",
            OracleKind::BruteForce => "brute_force",
        }
    }
}

/// A maximizer together with its objective value under the caller's weights.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub cohort: Cohort,
    pub value: f64,
}

/// Returns the feasible cohort maximizing the class objective under
/// `weights`. Ties go to the lexicographically smallest cohort.
pub fn maximize(oracle: OracleKind, weights: &[f64], class: &DecisionClass) -> Result<Cohort> {
    if weights.len() != class.n() {
        return Err(Error::InvalidRun(format!(
            "{} weights for a class over {} arms",
            weights.len(),
            class.n()
        )));
    }
    match oracle {
        OracleKind::SortTopK => sort_top_k(weights, class),
        OracleKind::GreedyCardinality => greedy_cardinality(weights, class),
        OracleKind::BruteForce => brute_force(weights, class),
    }
}

/// Maximizes subject to forcing one arm in or out of the cohort.
///
/// The constraint is applied by shifting the arm's weight by a large
/// constant and re-running the unconstrained oracle; the reported value is
/// re-evaluated on the unmodified weights. Returns `None` when no feasible
/// cohort satisfies the constraint.
pub fn maximize_constrained(
    oracle: OracleKind,
    weights: &[f64],
    class: &DecisionClass,
    force_include: Option<ArmId>,
    force_exclude: Option<ArmId>,
) -> Result<Option<OracleSolution>> {
    if force_include.is_some() && force_exclude.is_some() {
        return Err(Error::OracleConfig(
            "at most one of force_include / force_exclude may be set".into(),
        ));
    }
    for arm in force_include.iter().chain(force_exclude.iter()) {
        if arm.0 >= class.n() {
            return Err(Error::ArmOutOfRange {
                arm: arm.0,
                n: class.n(),
            });
        }
    }
    let cohort = match (force_include, force_exclude) {
        (None, None) => maximize(oracle, weights, class)?,
        _ => {
            let mut shifted = weights.to_vec();
            if let Some(a) = force_include {
                shifted[a.0] += FORCE_WEIGHT;
            }
            if let Some(a) = force_exclude {
                shifted[a.0] -= FORCE_WEIGHT;
            }
            let cohort = maximize(oracle, &shifted, class)?;
            let satisfied = force_include.is_none_or(|a| cohort.contains(&a))
                && force_exclude.is_none_or(|a| !cohort.contains(&a));
            if !satisfied {
                return Ok(None);
            }
            cohort
        }
    };
    let value = evaluate(class.objective(), weights, &cohort)?;
    Ok(Some(OracleSolution { cohort, value }))
}

fn require_top_k(oracle: OracleKind, class: &DecisionClass) -> Result<usize> {
    match class.kind() {
        ClassKind::TopK { k } => Ok(*k),
        ClassKind::Explicit { .. } => Err(Error::OracleConfig(format!(
            "oracle `{}` only supports top-k decision classes",
            oracle.name()
        ))),
    }
}

fn sort_top_k(weights: &[f64], class: &DecisionClass) -> Result<Cohort> {
    let k = require_top_k(OracleKind::SortTopK, class)?;
    match class.objective() {
        ObjectiveKind::TopKLinear | ObjectiveKind::SqrtTopK => {}
        ObjectiveKind::Diversity { .. } => {
            return Err(Error::OracleConfig(
                "oracle `sort_top_k` cannot maximize the diversity objective".into(),
            ))
        }
    }
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    Ok(order.into_iter().take(k).map(ArmId).collect())
}

fn greedy_cardinality(weights: &[f64], class: &DecisionClass) -> Result<Cohort> {
    let k = require_top_k(OracleKind::GreedyCardinality, class)?;
    let objective = class.objective();
    let mut selected = Cohort::new();
    let mut current = 0.0;
    for _ in 0..k {
        let mut best: Option<(ArmId, f64)> = None;
        // Marginal gains recomputed from scratch each step; arms scanned in
        // ascending id order so ties keep the lowest id.
        for i in 0..weights.len() {
            let arm = ArmId(i);
            if selected.contains(&arm) {
                continue;
            }
            selected.insert(arm);
            let gain = evaluate(objective, weights, &selected)? - current;
            selected.remove(&arm);
            if best.is_none_or(|(_, g)| gain > g) {
                best = Some((arm, gain));
            }
        }
        let (arm, gain) = best.expect("k < n guarantees an unselected arm");
        selected.insert(arm);
        current += gain;
    }
    Ok(selected)
}

fn brute_force(weights: &[f64], class: &DecisionClass) -> Result<Cohort> {
    let members = class.member_count();
    if members > BRUTE_FORCE_LIMIT {
        return Err(Error::ClassTooLarge {
            members,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let objective = class.objective();
    let mut best: Option<(Cohort, f64)> = None;
    let mut consider = |candidate: Cohort, value: f64| {
        let better = match &best {
            None => true,
            Some((inc, v)) => {
                value > *v
                    || (value == *v && cmp_cohorts(&candidate, inc) == std::cmp::Ordering::Less)
            }
        };
        if better {
            best = Some((candidate, value));
        }
    };
    match class.kind() {
        ClassKind::TopK { k } => {
            for combo in Combinations::new(class.n(), *k) {
                let candidate: Cohort = combo.iter().copied().map(ArmId).collect();
                let value = evaluate(objective, weights, &candidate)?;
                consider(candidate, value);
            }
        }
        ClassKind::Explicit { members } => {
            for m in members {
                let value = evaluate(objective, weights, m)?;
                consider(m.clone(), value);
            }
        }
    }
    Ok(best.expect("decision class has at least two members").0)
}

/// Lexicographic enumeration of all k-element index combinations of `0..n`.
pub(crate) struct Combinations {
    n: usize,
    indices: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            indices: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let current = self.indices.clone();
        let k = self.indices.len();
        // Advance to the next combination in lexicographic order.
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.indices[i] < self.n - (k - i) {
                self.indices[i] += 1;
                for j in i + 1..k {
                    self.indices[j] = self.indices[j - 1] + 1;
                }
                break;
            }
        }
        Some(current)
    }
}
