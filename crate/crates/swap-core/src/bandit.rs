//! The SWAP algorithm, its weak-only (CLUCB) and strong-only
//! specializations, and the uniform/random baselines.
//!
//! SWAP is a fixed-confidence pure-exploration loop. After weak-pulling
//! every arm once it repeats: take the empirically best cohort, bound each
//! arm's utility pessimistically by a confidence radius, recompute the best
//! cohort under those worst-case utilities, and stop when the two cohorts
//! agree. Otherwise it pulls the most uncertain arm in their symmetric
//! difference, choosing a strong pull with the policy's probability.
//!
//! `run_clucb` is a separate, hand-written weak-only loop rather than a
//! wrapper over the general engine: the two routes check each other (the
//! general algorithm with an always-weak policy must reproduce CLUCB's trace
//! pull for pull).

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::cohort::{evaluate, ArmId, Cohort, DecisionClass};
use crate::env::{seeded_rng, Environment, PullStrength, COIN_STREAM};
use crate::error::{Error, Result};
use crate::oracle::{maximize, OracleKind};

/// Two cohorts are treated as equal in objective value below this
/// difference. With continuous rewards, value ties without set equality have
/// measure zero; the tolerance only absorbs floating-point noise.
pub const VALUE_EQ_TOL: f64 = 1e-12;

/// Default safety cap on total cost. Hard instances can run very long; a
/// capped run fails loudly instead of hanging.
pub const DEFAULT_BUDGET_CAP: f64 = 1e6;

/// How a strong pull is chosen when the symmetric difference is non-empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SppKind {
    /// `(s - j) / (s - 1)`, clamped to `[0, 1]`; 0 when `s = 1`. High gain
    /// relative to cost buys more strong pulls.
    Formula,
    AlwaysStrong,
    AlwaysWeak,
    /// Fixed probability in `[0, 1]`.
    Constant(f64),
}

/// Strong-pull configuration: information gain `s`, cost `j`, and the
/// policy choosing between pull strengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PullPolicy {
    s: f64,
    j: f64,
    spp: SppKind,
}

impl PullPolicy {
    pub fn new(s: f64, j: f64, spp: SppKind) -> Result<Self> {
        if !(s.is_finite() && s >= 1.0) {
            return Err(Error::InvalidRun(format!(
                "information gain s = {s}; must be >= 1"
            )));
        }
        if !(j.is_finite() && j >= 1.0) {
            return Err(Error::InvalidRun(format!("pull cost j = {j}; must be >= 1")));
        }
        if let SppKind::Constant(p) = spp {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidRun(format!(
                    "constant strong-pull probability {p}; must lie in [0, 1]"
                )));
            }
        }
        Ok(Self { s, j, spp })
    }

    /// The balanced policy `(s - j) / (s - 1)`.
    pub fn formula(s: f64, j: f64) -> Result<Self> {
        Self::new(s, j, SppKind::Formula)
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn spp(&self) -> SppKind {
        self.spp
    }

    /// Probability of a strong pull. The formula policy clamps to `[0, 1]`:
    /// a strong pull that costs more than its gain is never worth taking,
    /// and `s = 1` degenerates to weak-only.
    pub fn spp_probability(&self) -> f64 {
        match self.spp {
            SppKind::AlwaysStrong => 1.0,
            SppKind::AlwaysWeak => 0.0,
            SppKind::Constant(p) => p,
            SppKind::Formula => {
                if self.s == 1.0 {
                    0.0
                } else {
                    ((self.s - self.j) / (self.s - 1.0)).clamp(0.0, 1.0)
                }
            }
        }
    }
}

/// Confidence radius `sigma * sqrt(2 ln(4 n cost_like^3 / delta) / info_gain)`.
///
/// `cost_like` is the total cost so far for the general algorithm, the
/// iteration count `t` for the weak-only specialization, and `t * j` for the
/// strong-only specialization.
pub fn confidence_radius(
    sigma: f64,
    n: usize,
    cost_like: f64,
    delta: f64,
    info_gain: f64,
) -> f64 {
    sigma * (2.0 * ((4.0 * n as f64 * cost_like.powi(3)) / delta).ln() / info_gain).sqrt()
}

/// Termination condition of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StoppingKind {
    /// Stop when the empirical and worst-case cohorts agree exactly (set
    /// equality, or value difference within [`VALUE_EQ_TOL`]).
    Exact,
    /// Stop when the worst-case value shortfall is at most `epsilon`. Never
    /// stops later than [`StoppingKind::Exact`] on the same seed.
    Pac(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingRule {
    pub kind: StoppingKind,
    pub budget_cap: f64,
}

impl StoppingRule {
    pub fn exact() -> Self {
        Self {
            kind: StoppingKind::Exact,
            budget_cap: DEFAULT_BUDGET_CAP,
        }
    }

    pub fn pac(epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::InvalidRun(format!(
                "PAC epsilon = {epsilon}; must be finite and >= 0"
            )));
        }
        Ok(Self {
            kind: StoppingKind::Pac(epsilon),
            budget_cap: DEFAULT_BUDGET_CAP,
        })
    }

    pub fn with_budget_cap(mut self, cap: f64) -> Self {
        self.budget_cap = cap;
        self
    }

    fn threshold(&self) -> f64 {
        match self.kind {
            StoppingKind::Exact => VALUE_EQ_TOL,
            StoppingKind::Pac(eps) => eps.max(VALUE_EQ_TOL),
        }
    }
}

/// Why a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    BudgetExhausted,
}

/// Post-initialization pull counts for one arm.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PullCounts {
    pub weak: u64,
    pub strong: u64,
}

/// One executed pull.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PullEvent {
    pub arm: ArmId,
    pub strength: PullStrength,
}

/// Everything one run produced. Identical seeds and configuration yield
/// bit-identical records.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub cohort: Cohort,
    pub total_cost: f64,
    /// Pull counts after the initialization round (each arm is weak-pulled
    /// once before the loop; that round is the `n` term of the total cost).
    pub pull_counts: Vec<PullCounts>,
    pub terminated: Termination,
    pub seed: u64,
    /// Full pull sequence, initialization included.
    pub trace: Vec<PullEvent>,
}

fn check_run_config(
    env: &dyn Environment,
    class: &DecisionClass,
    stopping: &StoppingRule,
    delta: f64,
    sigma: f64,
) -> Result<usize> {
    let n = class.n();
    if env.arm_count() != n {
        return Err(Error::InvalidRun(format!(
            "environment has {} arms, decision class expects {}",
            env.arm_count(),
            n
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidRun(format!(
            "confidence delta = {delta}; must lie in (0, 1)"
        )));
    }
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::InvalidRun(format!(
            "radius scale sigma = {sigma}; must be finite and >= 0"
        )));
    }
    if stopping.budget_cap.is_nan() || stopping.budget_cap <= n as f64 {
        return Err(Error::InvalidRun(format!(
            "budget cap {} must exceed the arm count {}",
            stopping.budget_cap, n
        )));
    }
    Ok(n)
}

/// Information-weighted running mean: a strong pull's reward stands for `s`
/// conceptual weak observations and is weighted accordingly.
fn weighted_update(mean: f64, info: f64, gain: f64, reward: f64) -> f64 {
    (mean * info + gain * reward) / (info + gain)
}

fn init_round(
    env: &mut dyn Environment,
    n: usize,
    trace: &mut Vec<PullEvent>,
) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let mut means = vec![0.0; n];
    let mut info = vec![0.0; n];
    let mut cost = 0.0;
    for i in 0..n {
        let arm = ArmId(i);
        let out = env.pull(arm, PullStrength::Weak)?;
        means[i] = out.reward;
        info[i] = out.information_gain;
        cost += out.cost_charged;
        trace.push(PullEvent {
            arm,
            strength: PullStrength::Weak,
        });
    }
    Ok((means, info, cost))
}

fn membership(n: usize, cohort: &Cohort) -> Vec<bool> {
    let mut inside = vec![false; n];
    for a in cohort {
        inside[a.0] = true;
    }
    inside
}

/// Most uncertain arm in the symmetric difference, ties to the lowest id.
fn most_uncertain_contested(
    n: usize,
    in_best: &[bool],
    in_alt: &[bool],
    radius: &[f64],
) -> Option<ArmId> {
    let mut pick: Option<(usize, f64)> = None;
    for i in 0..n {
        if in_best[i] != in_alt[i] && pick.is_none_or(|(_, r)| radius[i] > r) {
            pick = Some((i, radius[i]));
        }
    }
    pick.map(|(i, _)| ArmId(i))
}

enum RadiusCostLike {
    /// Total cost so far (general SWAP). The weak-only radius, which uses
    /// the iteration count instead, lives in the dedicated `run_clucb` loop.
    TotalCost,
    /// `t * j` (strong-only; the log argument becomes `4 n t^3 j^3 / delta`).
    IterationTimesJ(f64),
}

struct SwapLoop<'a> {
    env: &'a mut dyn Environment,
    class: &'a DecisionClass,
    oracle: OracleKind,
    policy: PullPolicy,
    stopping: StoppingRule,
    delta: f64,
    sigma: f64,
    seed: u64,
    cost_like: RadiusCostLike,
}

impl SwapLoop<'_> {
    fn run(self) -> Result<RunRecord> {
        let n = check_run_config(self.env, self.class, &self.stopping, self.delta, self.sigma)?;
        let alpha = self.policy.spp_probability();
        let mut coin: ChaCha8Rng = seeded_rng(self.seed, COIN_STREAM);
        let mut trace = Vec::new();
        let (mut means, mut info, mut cost) = init_round(self.env, n, &mut trace)?;
        let mut counts = vec![PullCounts::default(); n];
        let mut radius = vec![0.0; n];
        let mut pessimistic = vec![0.0; n];
        let mut t = n as u64;
        loop {
            let best = maximize(self.oracle, &means, self.class)?;
            let in_best = membership(n, &best);
            let cost_like = match self.cost_like {
                RadiusCostLike::TotalCost => cost,
                RadiusCostLike::IterationTimesJ(j) => t as f64 * j,
            };
            for i in 0..n {
                radius[i] = confidence_radius(self.sigma, n, cost_like, self.delta, info[i]);
                // Worst case: members may be worth less than estimated,
                // non-members more.
                pessimistic[i] = if in_best[i] {
                    means[i] - radius[i]
                } else {
                    means[i] + radius[i]
                };
            }
            let alt = maximize(self.oracle, &pessimistic, self.class)?;
            let v_alt = evaluate(self.class.objective(), &pessimistic, &alt)?;
            let v_best = evaluate(self.class.objective(), &pessimistic, &best)?;
            if alt == best || (v_alt - v_best).abs() <= self.stopping.threshold() {
                return Ok(RunRecord {
                    cohort: best,
                    total_cost: cost,
                    pull_counts: counts,
                    terminated: Termination::Converged,
                    seed: self.seed,
                    trace,
                });
            }
            if cost >= self.stopping.budget_cap {
                return Ok(RunRecord {
                    cohort: best,
                    total_cost: cost,
                    pull_counts: counts,
                    terminated: Termination::BudgetExhausted,
                    seed: self.seed,
                    trace,
                });
            }
            let in_alt = membership(n, &alt);
            let target = most_uncertain_contested(n, &in_best, &in_alt, &radius)
                .expect("symmetric difference is non-empty when the stopping rule fails");
            // Degenerate probabilities skip the coin so always-weak and
            // always-strong runs stay deterministic.
            let strong = if alpha <= 0.0 {
                false
            } else if alpha >= 1.0 {
                true
            } else {
                coin.random::<f64>() < alpha
            };
            let strength = if strong {
                PullStrength::Strong
            } else {
                PullStrength::Weak
            };
            let out = self.env.pull(target, strength)?;
            let i = target.0;
            means[i] = weighted_update(means[i], info[i], out.information_gain, out.reward);
            info[i] += out.information_gain;
            cost += out.cost_charged;
            match strength {
                PullStrength::Weak => counts[i].weak += 1,
                PullStrength::Strong => counts[i].strong += 1,
            }
            trace.push(PullEvent {
                arm: target,
                strength,
            });
            t += 1;
        }
    }
}

/// Runs the general algorithm: confidence radii scale with the total cost
/// spent so far, and each contested pull is strong with the policy's
/// probability (drawn from a coin stream independent of the rewards).
#[allow(clippy::too_many_arguments)]
pub fn run_swap(
    env: &mut dyn Environment,
    class: &DecisionClass,
    oracle: OracleKind,
    policy: PullPolicy,
    stopping: StoppingRule,
    delta: f64,
    sigma: f64,
    seed: u64,
) -> Result<RunRecord> {
    SwapLoop {
        env,
        class,
        oracle,
        policy,
        stopping,
        delta,
        sigma,
        seed,
        cost_like: RadiusCostLike::TotalCost,
    }
    .run()
}

/// Strong-only specialization: every contested pull is strong and the
/// radius uses `t * j` in place of the spent cost.
#[allow(clippy::too_many_arguments)]
pub fn run_strong_only(
    env: &mut dyn Environment,
    class: &DecisionClass,
    oracle: OracleKind,
    s: f64,
    j: f64,
    stopping: StoppingRule,
    delta: f64,
    sigma: f64,
    seed: u64,
) -> Result<RunRecord> {
    let policy = PullPolicy::new(s, j, SppKind::AlwaysStrong)?;
    SwapLoop {
        env,
        class,
        oracle,
        policy,
        stopping,
        delta,
        sigma,
        seed,
        cost_like: RadiusCostLike::IterationTimesJ(j),
    }
    .run()
}

/// Dedicated weak-only loop (CLUCB): every pull is weak, costs 1, gains 1,
/// and the radius uses the iteration count. Kept independent of the general
/// engine so the two implementations can be checked against each other.
pub fn run_clucb(
    env: &mut dyn Environment,
    class: &DecisionClass,
    oracle: OracleKind,
    stopping: StoppingRule,
    delta: f64,
    sigma: f64,
    seed: u64,
) -> Result<RunRecord> {
    let n = check_run_config(env, class, &stopping, delta, sigma)?;
    let mut trace = Vec::new();
    let (mut means, mut info, mut cost) = init_round(env, n, &mut trace)?;
    let mut counts = vec![PullCounts::default(); n];
    let mut t = n as u64;
    loop {
        let best = maximize(oracle, &means, class)?;
        let in_best = membership(n, &best);
        let mut radius = vec![0.0; n];
        let mut pessimistic = vec![0.0; n];
        for i in 0..n {
            radius[i] = confidence_radius(sigma, n, t as f64, delta, info[i]);
            pessimistic[i] = if in_best[i] {
                means[i] - radius[i]
            } else {
                means[i] + radius[i]
            };
        }
        let alt = maximize(oracle, &pessimistic, class)?;
        let v_alt = evaluate(class.objective(), &pessimistic, &alt)?;
        let v_best = evaluate(class.objective(), &pessimistic, &best)?;
        if alt == best || (v_alt - v_best).abs() <= stopping.threshold() {
            return Ok(RunRecord {
                cohort: best,
                total_cost: cost,
                pull_counts: counts,
                terminated: Termination::Converged,
                seed,
                trace,
            });
        }
        if cost >= stopping.budget_cap {
            return Ok(RunRecord {
                cohort: best,
                total_cost: cost,
                pull_counts: counts,
                terminated: Termination::BudgetExhausted,
                seed,
                trace,
            });
        }
        let in_alt = membership(n, &alt);
        let target = most_uncertain_contested(n, &in_best, &in_alt, &radius)
            .expect("symmetric difference is non-empty when the stopping rule fails");
        let out = env.pull(target, PullStrength::Weak)?;
        let i = target.0;
        means[i] = weighted_update(means[i], info[i], out.information_gain, out.reward);
        info[i] += out.information_gain;
        cost += out.cost_charged;
        counts[i].weak += 1;
        trace.push(PullEvent {
            arm: target,
            strength: PullStrength::Weak,
        });
        t += 1;
    }
}

/// Non-adaptive reference strategies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineKind {
    /// One weak and one strong pull per arm; total cost `n (1 + j)`.
    Uniform,
    /// Uniformly random arm and pull strength until the next drawn pull
    /// would exceed the budget.
    Random { budget: f64 },
}

/// Runs a baseline and selects the final cohort from its empirical means.
/// Baselines skip the initialization round: their pulls are the whole
/// budget, so `total_cost` is exactly the sum of pull costs.
pub fn run_baseline(
    kind: BaselineKind,
    env: &mut dyn Environment,
    class: &DecisionClass,
    oracle: OracleKind,
    policy: PullPolicy,
    seed: u64,
) -> Result<RunRecord> {
    let n = class.n();
    if env.arm_count() != n {
        return Err(Error::InvalidRun(format!(
            "environment has {} arms, decision class expects {}",
            env.arm_count(),
            n
        )));
    }
    let mut means = vec![0.0; n];
    let mut info = vec![0.0; n];
    let mut cost = 0.0;
    let mut counts = vec![PullCounts::default(); n];
    let mut trace = Vec::new();
    let pull = |env: &mut dyn Environment,
                    arm: ArmId,
                    strength: PullStrength,
                    means: &mut [f64],
                    info: &mut [f64],
                    cost: &mut f64,
                    counts: &mut [PullCounts],
                    trace: &mut Vec<PullEvent>|
     -> Result<()> {
        let out = env.pull(arm, strength)?;
        let i = arm.0;
        means[i] = weighted_update(means[i], info[i], out.information_gain, out.reward);
        info[i] += out.information_gain;
        *cost += out.cost_charged;
        match strength {
            PullStrength::Weak => counts[i].weak += 1,
            PullStrength::Strong => counts[i].strong += 1,
        }
        trace.push(PullEvent { arm, strength });
        Ok(())
    };
    let terminated = match kind {
        BaselineKind::Uniform => {
            for i in 0..n {
                pull(env, ArmId(i), PullStrength::Weak, &mut means, &mut info, &mut cost, &mut counts, &mut trace)?;
            }
            for i in 0..n {
                pull(env, ArmId(i), PullStrength::Strong, &mut means, &mut info, &mut cost, &mut counts, &mut trace)?;
            }
            Termination::Converged
        }
        BaselineKind::Random { budget } => {
            if budget.is_nan() || budget <= 0.0 {
                return Err(Error::InvalidRun(format!(
                    "random baseline budget = {budget}; must be > 0"
                )));
            }
            let mut rng = seeded_rng(seed, COIN_STREAM);
            loop {
                let arm = ArmId(rng.random_range(0..n));
                let strength = if rng.random::<f64>() < 0.5 {
                    PullStrength::Strong
                } else {
                    PullStrength::Weak
                };
                let next_cost = match strength {
                    PullStrength::Weak => 1.0,
                    PullStrength::Strong => policy.j(),
                };
                if cost + next_cost > budget {
                    break;
                }
                pull(env, arm, strength, &mut means, &mut info, &mut cost, &mut counts, &mut trace)?;
            }
            Termination::BudgetExhausted
        }
    };
    let cohort = maximize(oracle, &means, class)?;
    Ok(RunRecord {
        cohort,
        total_cost: cost,
        pull_counts: counts,
        terminated,
        seed,
        trace,
    })
}
