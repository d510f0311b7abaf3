//! Shared fixtures for the benchmark targets.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use swap_core::cohort::{DecisionClass, ObjectiveKind, ProblemInstance};

/// A reproducible mid-size instance with distinct utilities.
pub fn instance(n: usize, separation: f64, partitions: Option<usize>) -> ProblemInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(0xBE7C);
    ProblemInstance::generate(n, separation, partitions, 0.5, &mut rng).unwrap()
}

pub fn linear_class(n: usize, k: usize) -> DecisionClass {
    DecisionClass::top_k(n, k, ObjectiveKind::TopKLinear).unwrap()
}

pub fn diversity_class(instance: &ProblemInstance, k: usize) -> DecisionClass {
    let objective = ObjectiveKind::diversity_for(instance).unwrap();
    DecisionClass::top_k(instance.n(), k, objective).unwrap()
}
