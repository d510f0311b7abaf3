//! Reward sources implementing the pull contract.
//!
//! An environment owns the randomness of one run: pulling an arm charges a
//! cost, yields a reward, and reports the information gained. A weak pull
//! charges 1 and gains 1; a strong pull charges `j` and gains `s`, its
//! reward standing in for the average of `s` conceptual weak pulls.
//!
//! Rewards are deliberately not clamped to `[0, 1]`: the analysis assumes
//! sub-Gaussian tails and clamping would bias the empirical means.

use std::io;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Deserialize;

use crate::cohort::{ArmId, ProblemInstance};
use crate::error::{Error, Result};

/// ChaCha stream carrying environment rewards.
pub(crate) const REWARD_STREAM: u64 = 0;
/// ChaCha stream carrying the strong-pull coin and other policy choices.
/// Kept apart from rewards so changing the pull policy never perturbs the
/// reward sequence of a paired trial.
pub(crate) const COIN_STREAM: u64 = 1;
/// ChaCha stream used when drawing random problem instances.
pub const INSTANCE_STREAM: u64 = 2;

/// Mixes a base seed with a tag into an independent stream seed
/// (splitmix64). Deterministic: trial seeds derive from indices, never from
/// shared mutable state.
pub fn derive_seed(base: u64, tag: u64) -> u64 {
    let mut z = base ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Pull strength: the two observation types.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PullStrength {
    Weak,
    Strong,
}

/// What one pull produced: the observed reward, the cost charged, and the
/// information gained (1 for weak, `s` for strong).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PullOutcome {
    pub reward: f64,
    pub cost_charged: f64,
    pub information_gain: f64,
}

/// A reward source. One instance is owned by exactly one run; construction
/// is cheap, so paired trials build a fresh environment per policy from the
/// shared trial seed.
pub trait Environment {
    fn arm_count(&self) -> usize;

    /// Observes one reward from `arm`. Deterministic given the construction
    /// seed and the call sequence.
    fn pull(&mut self, arm: ArmId, strength: PullStrength) -> Result<PullOutcome>;
}

fn check_arm(arm: ArmId, n: usize) -> Result<()> {
    if arm.0 >= n {
        return Err(Error::ArmOutOfRange { arm: arm.0, n });
    }
    Ok(())
}

fn check_pull_params(s: f64, j: f64) -> Result<()> {
    if !(s.is_finite() && s >= 1.0) {
        return Err(Error::InvalidRun(format!(
            "strong-pull information gain s = {s}; must be >= 1"
        )));
    }
    if !(j.is_finite() && j >= 1.0) {
        return Err(Error::InvalidRun(format!(
            "strong-pull cost j = {j}; must be >= 1"
        )));
    }
    Ok(())
}

/// Gaussian simulator: a weak pull of arm `a` draws from
/// `Normal(u(a), sigma)`, a strong pull from `Normal(u(a), sigma / sqrt(s))`.
#[derive(Debug, Clone)]
pub struct GaussianEnvironment {
    utilities: Vec<f64>,
    weak: Vec<Normal<f64>>,
    strong: Vec<Normal<f64>>,
    s: f64,
    j: f64,
    rng: ChaCha8Rng,
}

impl GaussianEnvironment {
    pub fn new(utilities: Vec<f64>, sigma: f64, s: f64, j: f64, seed: u64) -> Result<Self> {
        check_pull_params(s, j)?;
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::InvalidRun(format!(
                "noise scale sigma = {sigma}; must be finite and >= 0"
            )));
        }
        let strong_sigma = sigma / s.sqrt();
        let weak = utilities
            .iter()
            .map(|&u| Normal::new(u, sigma))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidRun(format!("reward distribution: {e}")))?;
        let strong = utilities
            .iter()
            .map(|&u| Normal::new(u, strong_sigma))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidRun(format!("reward distribution: {e}")))?;
        Ok(Self {
            utilities,
            weak,
            strong,
            s,
            j,
            rng: seeded_rng(seed, REWARD_STREAM),
        })
    }

    /// Simulator matching an instance's ground truth and noise scale.
    pub fn for_instance(instance: &ProblemInstance, s: f64, j: f64, seed: u64) -> Result<Self> {
        Self::new(instance.true_utilities().to_vec(), instance.sigma(), s, j, seed)
    }
}

impl Environment for GaussianEnvironment {
    fn arm_count(&self) -> usize {
        self.utilities.len()
    }

    fn pull(&mut self, arm: ArmId, strength: PullStrength) -> Result<PullOutcome> {
        check_arm(arm, self.utilities.len())?;
        Ok(match strength {
            PullStrength::Weak => PullOutcome {
                reward: self.weak[arm.0].sample(&mut self.rng),
                cost_charged: 1.0,
                information_gain: 1.0,
            },
            PullStrength::Strong => PullOutcome {
                reward: self.strong[arm.0].sample(&mut self.rng),
                cost_charged: self.j,
                information_gain: self.s,
            },
        })
    }
}

/// Recorded scores for one arm of a replay source.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayArm {
    /// Utility proxy for the arm, e.g. a classifier score; also the mean of
    /// the fallback distribution once recorded scores run out.
    pub base_score: f64,
    /// Optional partition label.
    pub label: Option<usize>,
    /// Recorded review scores, consumed in order.
    pub scores: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct ReplayRow {
    arm_id: usize,
    base_score: f64,
    label: Option<usize>,
    scores: Option<String>,
}

/// Replays recorded per-arm scores in order, then falls back to a Gaussian
/// around each arm's base score. A strong pull consumes one recorded score
/// and reports gain `s`; with no fallback scale configured, exhausting an
/// arm's scores is an error.
#[derive(Debug, Clone)]
pub struct ReplayEnvironment {
    arms: Vec<ReplayArm>,
    cursor: Vec<usize>,
    fallback_sigma: Option<f64>,
    s: f64,
    j: f64,
    rng: ChaCha8Rng,
}

impl ReplayEnvironment {
    pub fn new(
        arms: Vec<ReplayArm>,
        s: f64,
        j: f64,
        fallback_sigma: Option<f64>,
        seed: u64,
    ) -> Result<Self> {
        check_pull_params(s, j)?;
        if arms.is_empty() {
            return Err(Error::InvalidInstance("no arms in replay source".into()));
        }
        if let Some(fs) = fallback_sigma {
            if !(fs.is_finite() && fs >= 0.0) {
                return Err(Error::InvalidRun(format!(
                    "fallback sigma = {fs}; must be finite and >= 0"
                )));
            }
        }
        let cursor = vec![0; arms.len()];
        Ok(Self {
            arms,
            cursor,
            fallback_sigma,
            s,
            j,
            rng: seeded_rng(seed, REWARD_STREAM),
        })
    }

    /// Loads a replay source from CSV with header
    /// `arm_id,base_score,label,scores`, where `scores` is a
    /// semicolon-separated ordered list (empty for fallback-only arms).
    /// Rows may appear in any order but must cover arm ids `0..n` exactly.
    pub fn from_csv_reader<R: io::Read>(
        reader: R,
        s: f64,
        j: f64,
        fallback_sigma: Option<f64>,
        seed: u64,
    ) -> Result<Self> {
        let mut csv_reader = csv::Reader::from_reader(reader);
        let mut rows: Vec<ReplayRow> = csv_reader
            .deserialize()
            .collect::<std::result::Result<_, _>>()?;
        rows.sort_by_key(|r| r.arm_id);
        let mut arms = Vec::with_capacity(rows.len());
        for (i, row) in rows.into_iter().enumerate() {
            if row.arm_id != i {
                return Err(Error::InvalidInstance(format!(
                    "replay arm ids must cover 0..n exactly; missing or duplicate id near {i}"
                )));
            }
            let scores = match row.scores.as_deref() {
                None | Some("") => Vec::new(),
                Some(text) => text
                    .split(';')
                    .map(|t| {
                        t.trim().parse::<f64>().map_err(|e| {
                            Error::InvalidInstance(format!(
                                "replay score `{t}` for arm {i}: {e}"
                            ))
                        })
                    })
                    .collect::<Result<_>>()?,
            };
            arms.push(ReplayArm {
                base_score: row.base_score,
                label: row.label,
                scores,
            });
        }
        Self::new(arms, s, j, fallback_sigma, seed)
    }

    pub fn from_csv_path<P: AsRef<Path>>(
        path: P,
        s: f64,
        j: f64,
        fallback_sigma: Option<f64>,
        seed: u64,
    ) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(file, s, j, fallback_sigma, seed)
    }

    pub fn arms(&self) -> &[ReplayArm] {
        &self.arms
    }

    /// Builds the problem instance this source stands in for: base scores as
    /// true utilities, labels when every arm carries one.
    pub fn instance(&self, sigma: f64) -> Result<ProblemInstance> {
        let utilities: Vec<f64> = self.arms.iter().map(|a| a.base_score).collect();
        let labels: Option<Vec<usize>> = self
            .arms
            .iter()
            .map(|a| a.label)
            .collect::<Option<Vec<usize>>>();
        ProblemInstance::new(utilities, labels, sigma)
    }
}

impl Environment for ReplayEnvironment {
    fn arm_count(&self) -> usize {
        self.arms.len()
    }

    fn pull(&mut self, arm: ArmId, strength: PullStrength) -> Result<PullOutcome> {
        check_arm(arm, self.arms.len())?;
        let idx = self.cursor[arm.0];
        let reward = if idx < self.arms[arm.0].scores.len() {
            self.cursor[arm.0] += 1;
            self.arms[arm.0].scores[idx]
        } else {
            let sigma = self
                .fallback_sigma
                .ok_or(Error::ReplayExhausted { arm: arm.0 })?;
            Normal::new(self.arms[arm.0].base_score, sigma)
                .map_err(|e| Error::InvalidRun(format!("fallback distribution: {e}")))?
                .sample(&mut self.rng)
        };
        Ok(match strength {
            PullStrength::Weak => PullOutcome {
                reward,
                cost_charged: 1.0,
                information_gain: 1.0,
            },
            PullStrength::Strong => PullOutcome {
                reward,
                cost_charged: self.j,
                information_gain: self.s,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_noise_returns_the_exact_utility() {
        let mut env = GaussianEnvironment::new(vec![0.6, 0.5, 0.3], 0.0, 5.0, 2.0, 1).unwrap();
        for i in 0..3 {
            let out = env.pull(ArmId(i), PullStrength::Weak).unwrap();
            assert_eq!(out.reward, [0.6, 0.5, 0.3][i]);
            let out = env.pull(ArmId(i), PullStrength::Strong).unwrap();
            assert_eq!(out.reward, [0.6, 0.5, 0.3][i]);
        }
    }

    #[test]
    fn pull_outcomes_charge_the_configured_cost_and_gain() {
        let mut env = GaussianEnvironment::new(vec![0.5], 0.2, 5.0, 3.0, 9).unwrap();
        let weak = env.pull(ArmId(0), PullStrength::Weak).unwrap();
        assert_eq!((weak.cost_charged, weak.information_gain), (1.0, 1.0));
        let strong = env.pull(ArmId(0), PullStrength::Strong).unwrap();
        assert_eq!((strong.cost_charged, strong.information_gain), (3.0, 5.0));
    }

    #[test]
    fn weak_pull_mean_obeys_the_law_of_large_numbers() {
        let sigma = 0.4;
        let mut env = GaussianEnvironment::new(vec![0.7], sigma, 2.0, 2.0, 42).unwrap();
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            sum += env.pull(ArmId(0), PullStrength::Weak).unwrap().reward;
        }
        let mean = sum / n as f64;
        let tol = 4.0 * sigma / (n as f64).sqrt();
        assert!((mean - 0.7).abs() <= tol, "mean {mean} outside {tol} of 0.7");
    }

    #[test]
    fn strong_pull_spread_shrinks_by_sqrt_s() {
        // s = 4 at the tighter 2% tolerance, the rest at 5%.
        for (s, tol) in [(2.0, 0.05), (4.0, 0.02), (5.0, 0.05), (10.0, 0.05)] {
            let sigma = 0.5;
            let mut env = GaussianEnvironment::new(vec![0.5], sigma, s, 2.0, 7).unwrap();
            let n = 100_000;
            let rewards: Vec<f64> = (0..n)
                .map(|_| env.pull(ArmId(0), PullStrength::Strong).unwrap().reward)
                .collect();
            let mean = rewards.iter().sum::<f64>() / n as f64;
            let var = rewards.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let want = sigma / s.sqrt();
            let got = var.sqrt();
            assert!(
                (got - want).abs() / want < tol,
                "s = {s}: sample std {got} vs {want}"
            );
        }
    }

    #[test]
    fn same_seed_gives_an_identical_reward_sequence() {
        let mut a = GaussianEnvironment::new(vec![0.3, 0.8], 0.5, 4.0, 2.0, 1234).unwrap();
        let mut b = GaussianEnvironment::new(vec![0.3, 0.8], 0.5, 4.0, 2.0, 1234).unwrap();
        for i in 0..200 {
            let strength = if i % 3 == 0 {
                PullStrength::Strong
            } else {
                PullStrength::Weak
            };
            let arm = ArmId(i % 2);
            assert_eq!(a.pull(arm, strength).unwrap(), b.pull(arm, strength).unwrap());
        }
    }

    #[test]
    fn replay_returns_recorded_scores_in_order_then_errors() {
        let arms = vec![ReplayArm {
            base_score: 0.5,
            label: None,
            scores: vec![0.7, 0.4],
        }];
        let mut env = ReplayEnvironment::new(arms, 3.0, 2.0, None, 5).unwrap();
        assert_eq!(env.pull(ArmId(0), PullStrength::Weak).unwrap().reward, 0.7);
        assert_eq!(env.pull(ArmId(0), PullStrength::Weak).unwrap().reward, 0.4);
        assert!(matches!(
            env.pull(ArmId(0), PullStrength::Weak),
            Err(Error::ReplayExhausted { arm: 0 })
        ));
    }

    #[test]
    fn replay_strong_pull_consumes_one_score_with_gain_s() {
        let arms = vec![ReplayArm {
            base_score: 0.5,
            label: None,
            scores: vec![0.7, 0.4],
        }];
        let mut env = ReplayEnvironment::new(arms, 3.0, 2.0, None, 5).unwrap();
        let out = env.pull(ArmId(0), PullStrength::Strong).unwrap();
        assert_eq!((out.reward, out.cost_charged, out.information_gain), (0.7, 2.0, 3.0));
        assert_eq!(env.pull(ArmId(0), PullStrength::Weak).unwrap().reward, 0.4);
    }

    #[test]
    fn replay_falls_back_to_the_base_score_distribution() {
        let arms = vec![ReplayArm {
            base_score: 0.62,
            label: None,
            scores: vec![],
        }];
        let mut env = ReplayEnvironment::new(arms, 2.0, 2.0, Some(0.0), 5).unwrap();
        assert_eq!(env.pull(ArmId(0), PullStrength::Weak).unwrap().reward, 0.62);
    }

    #[test]
    fn replay_csv_round_trip() {
        let text = "arm_id,base_score,label,scores\n\
                    1,0.4,1,\n\
                    0,0.7,0,0.7;0.4\n";
        let env = ReplayEnvironment::from_csv_reader(text.as_bytes(), 2.0, 3.0, Some(0.1), 9)
            .unwrap();
        assert_eq!(env.arm_count(), 2);
        assert_eq!(env.arms()[0].scores, vec![0.7, 0.4]);
        assert_eq!(env.arms()[0].label, Some(0));
        assert!(env.arms()[1].scores.is_empty());
        let inst = env.instance(0.5).unwrap();
        assert_eq!(inst.true_utilities(), &[0.7, 0.4]);
        assert_eq!(inst.labels(), Some(&[0usize, 1][..]));
    }

    #[test]
    fn replay_csv_rejects_gaps_in_arm_ids() {
        let text = "arm_id,base_score,label,scores\n0,0.4,,\n2,0.5,,\n";
        assert!(ReplayEnvironment::from_csv_reader(text.as_bytes(), 2.0, 3.0, None, 9).is_err());
    }

    #[test]
    fn derive_seed_separates_tags() {
        let a = derive_seed(42, 0);
        let b = derive_seed(42, 1);
        assert_ne!(a, b);
        assert_eq!(a, derive_seed(42, 0));
    }
}
