//! Experiment configuration: a JSON document mirroring the struct fields
//! below. The manifest written next to the results is a resolved copy of
//! this config; re-running it reproduces the outputs byte for byte.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use swap_core::oracle::OracleKind;

use crate::CliError;

/// Where the arms come from.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum InstanceSource {
    /// Random instances redrawn per trial from the seeded stream.
    Generated {
        n: usize,
        k: usize,
        /// Minimum pairwise utility separation; keeps the optimum unique.
        separation: f64,
        /// Number of partition labels; required by the diversity objective.
        #[serde(default)]
        partitions: Option<usize>,
    },
    /// Recorded review scores replayed from CSV
    /// (`arm_id,base_score,label,scores`).
    Replay {
        path: PathBuf,
        k: usize,
        /// Noise scale of the fallback draw once an arm's recorded scores
        /// run out. Without it, exhausting an arm is an error.
        #[serde(default)]
        fallback_sigma: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveChoice {
    TopKLinear,
    SqrtTopK,
    Diversity,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum OracleChoice {
    SortTopK,
    GreedyCardinality,
    BruteForce,
}

impl From<OracleChoice> for OracleKind {
    fn from(choice: OracleChoice) -> Self {
        match choice {
            OracleChoice::SortTopK => OracleKind::SortTopK,
            OracleChoice::GreedyCardinality => OracleKind::GreedyCardinality,
            OracleChoice::BruteForce => OracleKind::BruteForce,
        }
    }
}

/// The `(s, j)` sweep: the cross product of the two axes, ordered s-major.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Grid {
    pub s: Vec<f64>,
    pub j: Vec<f64>,
}

impl Grid {
    pub fn cells(&self) -> Vec<(f64, f64)> {
        let mut cells = Vec::with_capacity(self.s.len() * self.j.len());
        for &s in &self.s {
            for &j in &self.j {
                cells.push((s, j));
            }
        }
        cells
    }
}

fn default_budget_cap() -> f64 {
    swap_core::bandit::DEFAULT_BUDGET_CAP
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("results")
}

fn default_plots() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceSource,
    pub objective: ObjectiveChoice,
    pub oracle: OracleChoice,
    /// Confidence parameter of the stopping guarantee.
    pub delta: f64,
    /// PAC slack; absent means exact stopping.
    #[serde(default)]
    pub epsilon: Option<f64>,
    /// Noise scale: drives the simulated rewards and the confidence radii.
    pub sigma: f64,
    pub grid: Grid,
    /// Trials per grid cell.
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "default_budget_cap")]
    pub budget_cap: f64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// Emit SVG renderings of the scatter and heatmaps.
    #[serde(default = "default_plots")]
    pub plots: bool,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
        let mut config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        // A relative replay path points next to the config file, so shipped
        // config + data pairs work from any working directory. The resolved
        // path lands in the manifest.
        if let InstanceSource::Replay { path: replay, .. } = &mut config.instance {
            if replay.is_relative() {
                if let Some(parent) = path.parent() {
                    *replay = parent.join(&*replay);
                }
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |msg: String| Err(CliError::Config(msg));
        match &self.instance {
            InstanceSource::Generated {
                n,
                k,
                separation,
                partitions,
            } => {
                if *n < 2 {
                    return fail(format!("field `instance.n` must be >= 2, got {n}"));
                }
                if !(1..*n).contains(k) {
                    return fail(format!(
                        "field `instance.k` must satisfy 1 <= k < n, got k = {k}, n = {n}"
                    ));
                }
                if separation.is_nan() || *separation < 0.0 || (*n as f64 - 1.0) * separation > 1.0 {
                    return fail(format!(
                        "field `instance.separation` = {separation} is infeasible for n = {n}"
                    ));
                }
                if self.objective == ObjectiveChoice::Diversity
                    && partitions.is_none_or(|l| l == 0)
                {
                    return fail(
                        "field `instance.partitions` must be >= 1 for the diversity objective"
                            .into(),
                    );
                }
            }
            InstanceSource::Replay { k, fallback_sigma, .. } => {
                if *k == 0 {
                    return fail("field `instance.k` must be >= 1".into());
                }
                if let Some(fs) = fallback_sigma {
                    if !(fs.is_finite() && *fs >= 0.0) {
                        return fail(format!(
                            "field `instance.fallback_sigma` must be finite and >= 0, got {fs}"
                        ));
                    }
                }
            }
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return fail(format!(
                "field `delta` must lie in (0, 1), got {}",
                self.delta
            ));
        }
        if let Some(eps) = self.epsilon {
            if !(eps.is_finite() && eps >= 0.0) {
                return fail(format!("field `epsilon` must be >= 0, got {eps}"));
            }
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return fail(format!(
                "field `sigma` must be finite and >= 0, got {}",
                self.sigma
            ));
        }
        if self.grid.s.is_empty() || self.grid.j.is_empty() {
            return fail("field `grid` must have non-empty `s` and `j` axes".into());
        }
        for &s in &self.grid.s {
            if !(s.is_finite() && s >= 1.0) {
                return fail(format!("field `grid.s` entries must be >= 1, got {s}"));
            }
        }
        for &j in &self.grid.j {
            if !(j.is_finite() && j >= 1.0) {
                return fail(format!("field `grid.j` entries must be >= 1, got {j}"));
            }
        }
        if self.trials == 0 {
            return fail("field `trials` must be >= 1".into());
        }
        if !(self.budget_cap.is_finite() && self.budget_cap > 0.0) {
            return fail(format!(
                "field `budget_cap` must be a positive finite cost, got {}",
                self.budget_cap
            ));
        }
        Ok(())
    }

    /// Applies command-line overrides, producing the resolved config that
    /// the manifest records.
    pub fn with_overrides(
        mut self,
        seed: Option<u64>,
        out: Option<PathBuf>,
        budget_cap: Option<f64>,
    ) -> Self {
        if let Some(seed) = seed {
            self.seed = seed;
        }
        if let Some(out) = out {
            self.out_dir = out;
        }
        if let Some(cap) = budget_cap {
            self.budget_cap = cap;
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> serde_json::Value {
        serde_json::json!({
            "instance": {"generated": {"n": 8, "k": 3, "separation": 0.05}},
            "objective": "top_k_linear",
            "oracle": "sort_top_k",
            "delta": 0.1,
            "sigma": 0.5,
            "grid": {"s": [5.0], "j": [2.0]},
            "trials": 10,
            "seed": 42
        })
    }

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg: ExperimentConfig = serde_json::from_value(minimal_json()).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.budget_cap, swap_core::bandit::DEFAULT_BUDGET_CAP);
        assert_eq!(cfg.out_dir, PathBuf::from("results"));
        assert!(cfg.plots);
        assert!(cfg.epsilon.is_none());
    }

    #[test]
    fn validation_diagnostics_name_the_field() {
        let mut bad = minimal_json();
        bad["delta"] = serde_json::json!(1.5);
        let cfg: ExperimentConfig = serde_json::from_value(bad).unwrap();
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("`delta`"), "{err}");

        let mut bad = minimal_json();
        bad["trials"] = serde_json::json!(0);
        let cfg: ExperimentConfig = serde_json::from_value(bad).unwrap();
        assert!(cfg.validate().unwrap_err().to_string().contains("`trials`"));

        let mut bad = minimal_json();
        bad["objective"] = serde_json::json!("diversity");
        let cfg: ExperimentConfig = serde_json::from_value(bad).unwrap();
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("partitions"), "{err}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let mut bad = minimal_json();
        bad["banana"] = serde_json::json!(1);
        assert!(serde_json::from_value::<ExperimentConfig>(bad).is_err());
    }

    #[test]
    fn grid_cells_are_s_major() {
        let grid = Grid {
            s: vec![1.0, 2.0],
            j: vec![3.0, 4.0],
        };
        assert_eq!(
            grid.cells(),
            vec![(1.0, 3.0), (1.0, 4.0), (2.0, 3.0), (2.0, 4.0)]
        );
    }
}
