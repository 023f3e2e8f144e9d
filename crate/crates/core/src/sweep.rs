//! Batch evaluation over seeds.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blocklin::{random, PartitionedMatrix};
use crate::markov::{self, CheckOptions, InstanceKind, MarkovReport, TripletPartition};
use crate::{par, Result};

/// How a batch is scheduled. `Parallel` runs sequentially when the crate is built without
/// the `parallel` feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Execution {
    /// Whether `Parallel` actually uses more than one thread.
    pub fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }

    fn is_parallel(self) -> bool {
        self == Execution::Parallel
    }
}

impl Default for Execution {
    fn default() -> Self {
        if Self::parallel_available() {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Maps `f` over `items` with the given schedule, preserving order.
pub fn map<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    par::map(items, exec.is_parallel(), f)
}

pub fn generate_batch(
    kind: InstanceKind,
    dims: TripletPartition,
    seeds: Range<u64>,
    exec: Execution,
) -> Result<Vec<PartitionedMatrix>> {
    let seeds: Vec<u64> = seeds.collect();
    map(&seeds, exec, |&s| markov::gen_instance(kind, dims, s))
        .into_iter()
        .collect()
}

pub fn check_batch(
    instances: &[PartitionedMatrix],
    opts: &CheckOptions,
    exec: Execution,
) -> Vec<Result<MarkovReport>> {
    map(instances, exec, |a| markov::check(a, opts))
}

pub fn entropy_gaps(instances: &[PartitionedMatrix], exec: Execution) -> Vec<Result<f64>> {
    map(instances, exec, markov::entropy_gap)
}

/// A PSD matrix with a random 3-way partition (each block of size 1 to 3) and random
/// rank, so that singular states are included.
pub fn random_partitioned_psd(seed: u64) -> PartitionedMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims: Vec<usize> = (0..3).map(|_| rng.random_range(1..=3)).collect();
    let n: usize = dims.iter().sum();
    let rank = rng.random_range(1..=n);
    let a = random::wishart(n, rank, &mut rng);
    PartitionedMatrix::new(dims, a).expect("Wishart matrices are Hermitian")
}

/// Counts of agreement between the deciders over a batch of reports.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceTally {
    pub instances: usize,
    pub markov: usize,
    /// Gap verdict differs from the structural verdict.
    pub gap_vs_structural: usize,
    /// Flow verdict differs from the structural verdict (flow evaluated only).
    pub flow_vs_structural: usize,
    pub flow_not_applicable: usize,
    /// Structural pass with failing bmc2.
    pub bmc2_violations: usize,
    /// bmc2 pass with failing Schur conditions.
    pub felk_violations: usize,
}

impl EquivalenceTally {
    pub fn from_reports<'a>(reports: impl IntoIterator<Item = &'a MarkovReport>) -> Self {
        let mut t = Self::default();
        for r in reports {
            t.instances += 1;
            let structural = r.structural_pass();
            t.markov += usize::from(structural);
            t.gap_vs_structural += usize::from(r.gap_markov != structural);
            match r.flow_pass() {
                Some(f) => t.flow_vs_structural += usize::from(f != structural),
                None => t.flow_not_applicable += 1,
            }
            if structural && r.bmc2_pass() == Some(false) {
                t.bmc2_violations += 1;
            }
            if r.bmc2_pass() == Some(true) && r.felk_pass() == Some(false) {
                t.felk_violations += 1;
            }
        }
        t
    }

    pub fn disagreements(&self) -> usize {
        self.gap_vs_structural + self.flow_vs_structural + self.bmc2_violations + self.felk_violations
    }
}
