//! Knobs shared by the trainers and the CLI.

/// Absolute tolerance used when comparing approximate (irrational) losses.
pub const EPS_CMP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainConfig {
    /// Worker threads for cell fan-out. Output does not depend on this.
    pub threads: usize,
    /// Maximum number of cells (dichotomy tuples times sign vectors).
    pub cell_budget: u128,
    /// Maximum number of candidate equation subsets in the concave trainer.
    pub subset_budget: u128,
    /// Largest distinct-point count accepted by the `2^n` dichotomy sweep.
    pub brute_force_bound: usize,
    /// Largest (reduced) input dimension the enumeration trainers accept.
    pub max_dim: usize,
    /// Bits of precision for irrational loss values.
    pub precision_bits: u32,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            threads: 1,
            cell_budget: 10_000_000,
            subset_budget: 100_000_000,
            brute_force_bound: 16,
            max_dim: 6,
            precision_bits: 64,
        }
    }
}

impl TrainConfig {
    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }

    pub(crate) fn pool(&self) -> rayon::ThreadPool {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads.max(1))
            .build()
            .expect("failed to build worker pool")
    }
}
