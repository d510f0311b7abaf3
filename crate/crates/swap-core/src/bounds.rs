//! Closed-form theoretical cost bounds.
//!
//! All three bounds share the shape `499 * h_tilde * ln(...) + 2n`, where
//! `h_tilde = max(width^2 sigma^2 H, 1)` is the scaled hardness. They are
//! high-probability worst-case guarantees with a loose constant: expect them
//! to sit far above empirical costs (plot on log-log axes).

use crate::bandit::PullPolicy;
use crate::error::{Error, Result};

/// Inputs shared by the closed-form bounds.
///
/// `x_cost` and `x_gain` are the expected per-pull cost and information gain
/// under a strong-pull probability `alpha`: `alpha * j + (1 - alpha)` and
/// `alpha * s + (1 - alpha)`. The slack terms `eps1` / `eps2` default to
/// zero; [`BoundInputs::with_hoeffding_eps`] fills them with the standard
/// concentration widths around those expectations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub n: usize,
    pub delta: f64,
    pub sigma: f64,
    pub s: f64,
    pub j: f64,
    pub h_tilde: f64,
    pub x_cost: f64,
    pub x_gain: f64,
    pub eps1: f64,
    pub eps2: f64,
}

impl BoundInputs {
    /// Builds inputs with the pull mixture taken from `policy` and zero
    /// slack terms.
    pub fn new(n: usize, delta: f64, sigma: f64, policy: PullPolicy, h_tilde: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidRun("bound inputs need n >= 1".into()));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidRun(format!(
                "confidence delta = {delta}; must lie in (0, 1)"
            )));
        }
        if h_tilde.is_nan() || h_tilde < 1.0 {
            return Err(Error::InvalidRun(format!(
                "h_tilde = {h_tilde}; must be >= 1"
            )));
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::InvalidRun(format!(
                "sigma = {sigma}; must be finite and >= 0"
            )));
        }
        let alpha = policy.spp_probability();
        Ok(Self {
            n,
            delta,
            sigma,
            s: policy.s(),
            j: policy.j(),
            h_tilde,
            x_cost: alpha * policy.j() + (1.0 - alpha),
            x_gain: alpha * policy.s() + (1.0 - alpha),
            eps1: 0.0,
            eps2: 0.0,
        })
    }

    /// Overrides the strong-pull probability behind `x_cost` / `x_gain`.
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.x_cost = alpha * self.j + (1.0 - alpha);
        self.x_gain = alpha * self.s + (1.0 - alpha);
        self
    }

    /// Fills the slack terms by Hoeffding inversion:
    /// `eps1 = sigma * sqrt(2 ln(2 / delta2) / t_ref)` around the expected
    /// cost over a reference horizon `t_ref` (default: the weak-only bound),
    /// and `eps2 = sigma * sqrt(2 ln(2 / delta3) / n)` around the expected
    /// gain over the `n` last pulls.
    pub fn with_hoeffding_eps(
        mut self,
        delta2: f64,
        delta3: f64,
        t_ref: Option<f64>,
    ) -> Result<Self> {
        for (name, d) in [("delta2", delta2), ("delta3", delta3)] {
            if !(d > 0.0 && d < 1.0) {
                return Err(Error::InvalidRun(format!(
                    "{name} = {d}; must lie in (0, 1)"
                )));
            }
        }
        let t_ref = t_ref.unwrap_or_else(|| weak_only_bound(&self));
        if t_ref.is_nan() || t_ref <= 0.0 {
            return Err(Error::InvalidRun(format!(
                "reference horizon t_ref = {t_ref}; must be > 0"
            )));
        }
        self.eps1 = self.sigma * (2.0 * (2.0 / delta2).ln() / t_ref).sqrt();
        self.eps2 = self.sigma * (2.0 * (2.0 / delta3).ln() / self.n as f64).sqrt();
        Ok(self)
    }
}

/// Weak-only cost bound: `499 h_tilde ln(4 n h_tilde / delta) + 2n`.
pub fn weak_only_bound(inputs: &BoundInputs) -> f64 {
    let BoundInputs { n, delta, h_tilde, .. } = *inputs;
    499.0 * h_tilde * (4.0 * n as f64 * h_tilde / delta).ln() + 2.0 * n as f64
}

/// Strong-only cost bound:
/// `499 h_tilde ln(4 n j^3 h_tilde / delta) / s + 2n`. Collapses to the
/// weak-only bound at `s = j = 1`.
pub fn strong_only_bound(inputs: &BoundInputs) -> f64 {
    let BoundInputs { n, delta, s, j, h_tilde, .. } = *inputs;
    499.0 * h_tilde * (4.0 * n as f64 * j.powi(3) * h_tilde / delta).ln() / s + 2.0 * n as f64
}

/// Mixed-policy cost bound:
/// `499 h_tilde ln(4 n (x_cost + eps1)^3 h_tilde / delta) / (x_gain - eps2) + 2n`.
///
/// Undefined when the slack swallows the expected gain
/// (`x_gain - eps2 <= 0`).
pub fn swap_bound(inputs: &BoundInputs) -> Result<f64> {
    let BoundInputs { n, delta, h_tilde, x_cost, x_gain, eps1, eps2, .. } = *inputs;
    let denominator = x_gain - eps2;
    if denominator.is_nan() || denominator <= 0.0 {
        return Err(Error::BoundUndefined { denominator });
    }
    let log_arg = 4.0 * n as f64 * (x_cost + eps1).powi(3) * h_tilde / delta;
    Ok(499.0 * h_tilde * log_arg.ln() / denominator + 2.0 * n as f64)
}

/// Largest strong-pull cost `j` at which the strong-only bound still beats
/// the weak-only bound: `C^((s - 1) / 3)` with `C = 4 n h_tilde / delta`.
pub fn corollary_boundary_j(s: f64, n: usize, h_tilde: f64, delta: f64) -> f64 {
    let c = 4.0 * n as f64 * h_tilde / delta;
    c.powf((s - 1.0) / 3.0)
}
