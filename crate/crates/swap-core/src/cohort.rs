//! Arms, problem instances, decision classes, and cohort objectives.
//!
//! These are the static data of a selection problem: everything the
//! algorithms and the analysis share. All types are immutable value data
//! after construction and safe to share across parallel trial workers.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of one arm (candidate) within a problem instance.
///
/// Arm ids are dense indices in `[0, n)`, unique within an instance and
/// stable across a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArmId(pub usize);

impl fmt::Display for ArmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A cohort: a subset of arms, ordered for deterministic iteration.
pub type Cohort = BTreeSet<ArmId>;

/// Builds a cohort from raw arm indices. Test and example convenience.
pub fn cohort<I: IntoIterator<Item = usize>>(ids: I) -> Cohort {
    ids.into_iter().map(ArmId).collect()
}

/// Compares two cohorts lexicographically by ascending arm index.
///
/// Used as the deterministic tie-break when two feasible sets reach the same
/// objective value: the lexicographically smaller set wins.
pub(crate) fn cmp_cohorts(a: &Cohort, b: &Cohort) -> std::cmp::Ordering {
    a.iter().cmp(b.iter())
}

/// Ground truth for one selection problem.
///
/// `true_utilities` are hidden from the algorithms; they drive the reward
/// simulators and the difficulty analysis. Serializes to/from a JSON document
/// `{n, utilities, labels, sigma}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct ProblemInstance {
    n: usize,
    true_utilities: Vec<f64>,
    labels: Option<Vec<usize>>,
    sigma: f64,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    n: usize,
    utilities: Vec<f64>,
    labels: Option<Vec<usize>>,
    sigma: f64,
}

impl TryFrom<RawInstance> for ProblemInstance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        if raw.utilities.len() != raw.n {
            return Err(Error::InvalidInstance(format!(
                "n = {} but {} utilities given",
                raw.n,
                raw.utilities.len()
            )));
        }
        ProblemInstance::new(raw.utilities, raw.labels, raw.sigma)
    }
}

impl From<ProblemInstance> for RawInstance {
    fn from(inst: ProblemInstance) -> Self {
        RawInstance {
            n: inst.n,
            utilities: inst.true_utilities,
            labels: inst.labels,
            sigma: inst.sigma,
        }
    }
}

impl ProblemInstance {
    /// Validates and builds an instance. Utilities must lie in `[0, 1]`,
    /// labels (when given) must cover every arm, and `sigma` must be a
    /// finite non-negative noise scale.
    pub fn new(true_utilities: Vec<f64>, labels: Option<Vec<usize>>, sigma: f64) -> Result<Self> {
        let n = true_utilities.len();
        if n == 0 {
            return Err(Error::InvalidInstance("no arms".into()));
        }
        for (i, &u) in true_utilities.iter().enumerate() {
            if !u.is_finite() || !(0.0..=1.0).contains(&u) {
                return Err(Error::InvalidInstance(format!(
                    "utility of arm {i} is {u}; must lie in [0, 1]"
                )));
            }
        }
        if let Some(ref ls) = labels {
            if ls.len() != n {
                return Err(Error::InvalidInstance(format!(
                    "{} labels for {} arms",
                    ls.len(),
                    n
                )));
            }
        }
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::InvalidInstance(format!(
                "sigma is {sigma}; must be finite and >= 0"
            )));
        }
        Ok(Self {
            n,
            true_utilities,
            labels,
            sigma,
        })
    }

    /// Draws a random instance whose utilities keep a minimum pairwise
    /// separation, so the optimal cohort is unique and gaps stay bounded
    /// away from zero.
    ///
    /// Utilities are uniform over the separated region of `[0, 1]^n` (draw
    /// order statistics on the shrunken interval, re-inflate by `i *
    /// separation`, then shuffle). Labels, when `partitions` is given, are
    /// uniform over `[0, partitions)`.
    pub fn generate<R: Rng + ?Sized>(
        n: usize,
        separation: f64,
        partitions: Option<usize>,
        sigma: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInstance("no arms".into()));
        }
        if separation.is_nan() || separation < 0.0 || (n as f64 - 1.0) * separation > 1.0 {
            return Err(Error::InvalidInstance(format!(
                "separation {separation} infeasible for n = {n} utilities in [0, 1]"
            )));
        }
        let span = 1.0 - (n as f64 - 1.0) * separation;
        let mut base: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * span).collect();
        base.sort_by(f64::total_cmp);
        let mut utilities: Vec<f64> = base
            .iter()
            .enumerate()
            .map(|(i, &x)| (x + i as f64 * separation).clamp(0.0, 1.0))
            .collect();
        utilities.shuffle(rng);
        let labels = match partitions {
            Some(l) => {
                if l == 0 {
                    return Err(Error::InvalidInstance("zero partitions".into()));
                }
                Some((0..n).map(|_| rng.random_range(0..l)).collect())
            }
            None => None,
        };
        Self::new(utilities, labels, sigma)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn true_utilities(&self) -> &[f64] {
        &self.true_utilities
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// The objective measuring a cohort's total utility.
#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveKind {
    /// Sum of member utilities.
    TopKLinear,
    /// Square root of the summed member utilities. Same argmax as
    /// [`ObjectiveKind::TopKLinear`]; reported when aligning units with the
    /// diversity objective.
    SqrtTopK,
    /// Sum over partitions of the square root of the selected utility mass:
    /// diminishing returns within a partition reward spreading the cohort
    /// across partitions. Monotone and submodular.
    Diversity { labels: Vec<usize> },
}

impl ObjectiveKind {
    /// Builds a diversity objective from an instance's partition labels.
    /// Errors when the instance carries none.
    pub fn diversity_for(instance: &ProblemInstance) -> Result<Self> {
        match instance.labels() {
            Some(ls) => Ok(ObjectiveKind::Diversity {
                labels: ls.to_vec(),
            }),
            None => Err(Error::LabelMismatch {
                expected: instance.n(),
                got: 0,
            }),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ObjectiveKind::TopKLinear => "top_k_linear",
            ObjectiveKind::SqrtTopK => "sqrt_top_k",
            ObjectiveKind::Diversity { .. } => "diversity",
        }
    }
}

/// The shape of the feasible-cohort family.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassKind {
    /// Every subset of exactly `k` arms.
    TopK { k: usize },
    /// An explicit list of feasible cohorts.
    Explicit { members: Vec<Cohort> },
}

/// A decision class: the feasible-cohort family together with the objective
/// it is scored under.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionClass {
    n: usize,
    kind: ClassKind,
    objective: ObjectiveKind,
}

impl DecisionClass {
    /// All subsets of exactly `k` of `n` arms. Requires `1 <= k < n`.
    pub fn top_k(n: usize, k: usize, objective: ObjectiveKind) -> Result<Self> {
        if !(1..n).contains(&k) {
            return Err(Error::InvalidClass(format!(
                "top-k requires 1 <= k < n, got k = {k}, n = {n}"
            )));
        }
        Self::validate_objective(n, &objective)?;
        Ok(Self {
            n,
            kind: ClassKind::TopK { k },
            objective,
        })
    }

    /// An explicit family of cohorts. Requires at least two distinct
    /// non-empty members, all arms below `n`.
    pub fn explicit(n: usize, members: Vec<Cohort>, objective: ObjectiveKind) -> Result<Self> {
        for m in &members {
            if m.is_empty() {
                return Err(Error::InvalidClass("empty member cohort".into()));
            }
            if let Some(arm) = m.iter().find(|a| a.0 >= n) {
                return Err(Error::ArmOutOfRange { arm: arm.0, n });
            }
        }
        let distinct: BTreeSet<&Cohort> = members.iter().collect();
        if distinct.len() < 2 {
            return Err(Error::InvalidClass(format!(
                "explicit class needs >= 2 distinct members, got {}",
                distinct.len()
            )));
        }
        Self::validate_objective(n, &objective)?;
        Ok(Self {
            n,
            kind: ClassKind::Explicit { members },
            objective,
        })
    }

    fn validate_objective(n: usize, objective: &ObjectiveKind) -> Result<()> {
        if let ObjectiveKind::Diversity { labels } = objective {
            if labels.len() != n {
                return Err(Error::LabelMismatch {
                    expected: n,
                    got: labels.len(),
                });
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &ClassKind {
        &self.kind
    }

    pub fn objective(&self) -> &ObjectiveKind {
        &self.objective
    }

    /// Cohort size for top-k classes.
    pub fn k(&self) -> Option<usize> {
        match self.kind {
            ClassKind::TopK { k } => Some(k),
            ClassKind::Explicit { .. } => None,
        }
    }

    /// Number of feasible cohorts (binomial for top-k classes).
    pub fn member_count(&self) -> u128 {
        match &self.kind {
            ClassKind::TopK { k } => binomial(self.n, *k),
            ClassKind::Explicit { members } => members.len() as u128,
        }
    }

    /// Objective value of `cohort` under `utilities`.
    pub fn evaluate(&self, utilities: &[f64], cohort: &Cohort) -> Result<f64> {
        evaluate(&self.objective, utilities, cohort)
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Objective value of `cohort` under the given per-arm `utilities`.
///
/// The empty cohort scores 0 under every objective. The square-root
/// objectives clamp negative per-arm values to zero before summing: true
/// utilities live in `[0, 1]`, but empirical means can dip below zero under
/// Gaussian noise and the objective must stay real-valued.
pub fn evaluate(objective: &ObjectiveKind, utilities: &[f64], cohort: &Cohort) -> Result<f64> {
    let n = utilities.len();
    if let Some(arm) = cohort.iter().find(|a| a.0 >= n) {
        return Err(Error::ArmOutOfRange { arm: arm.0, n });
    }
    match objective {
        ObjectiveKind::TopKLinear => Ok(cohort.iter().map(|a| utilities[a.0]).sum()),
        ObjectiveKind::SqrtTopK => {
            let total: f64 = cohort.iter().map(|a| utilities[a.0].max(0.0)).sum();
            Ok(total.sqrt())
        }
        ObjectiveKind::Diversity { labels } => {
            if labels.len() != n {
                return Err(Error::LabelMismatch {
                    expected: n,
                    got: labels.len(),
                });
            }
            let parts = labels.iter().max().map_or(0, |&l| l + 1);
            let mut sums = vec![0.0_f64; parts];
            for a in cohort {
                sums[labels[a.0]] += utilities[a.0].max(0.0);
            }
            Ok(sums.iter().map(|&m| m.sqrt()).sum())
        }
    }
}
