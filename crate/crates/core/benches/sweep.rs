use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qfm_core::markov::{CheckOptions, InstanceKind, TripletPartition};
use qfm_core::oracle;
use qfm_core::sweep::{self, Execution};

const SCHEDULES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn check_sweep(c: &mut Criterion) {
    let dims = TripletPartition::new(2, 3, 2).unwrap();
    let batch = sweep::generate_batch(InstanceKind::Random, dims, 0..64, Execution::Parallel).unwrap();
    let opts = CheckOptions::default();
    let mut group = c.benchmark_group("check_batch_64");
    for (name, exec) in SCHEDULES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sweep::check_batch(&batch, &opts, exec))
        });
    }
    group.finish();
}

fn gap_sweep(c: &mut Criterion) {
    let batch: Vec<_> = (0..512).map(sweep::random_partitioned_psd).collect();
    let mut group = c.benchmark_group("entropy_gaps_512");
    for (name, exec) in SCHEDULES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sweep::entropy_gaps(&batch, exec))
        });
    }
    group.finish();
}

fn oracle_suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_cutoff_30");
    group.sample_size(10);
    for (name, exec) in SCHEDULES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| oracle::cross_validate(30, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, check_sweep, gap_sweep, oracle_suite);
criterion_main!(benches);
