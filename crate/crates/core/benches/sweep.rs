use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use unitary_shield::estimation::Mode;
use unitary_shield::harness::{default_p_grid, run_sweep, SweepConfig};

fn config(n: usize, mode: Mode, width: Option<usize>) -> SweepConfig {
    SweepConfig {
        n,
        mode,
        p_grid: default_p_grid(11),
        width,
        ..SweepConfig::default()
    }
}

fn sweep_width(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for n in [2, 4] {
        for (label, width) in [("sequential", Some(1)), ("parallel", None)] {
            group.bench_with_input(BenchmarkId::new(label, n), &n, |b, &n| {
                let cfg = config(n, Mode::Exact, width);
                b.iter(|| black_box(run_sweep(&cfg).unwrap()))
            });
        }
    }
    group.finish();
}

fn sampled_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sampled-sweep");
    group.sample_size(10);
    for (label, width) in [("sequential", Some(1)), ("parallel", None)] {
        group.bench_function(label, |b| {
            let cfg = config(2, Mode::Sampled, width);
            b.iter(|| black_box(run_sweep(&cfg).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, sweep_width, sampled_sweep);
criterion_main!(benches);
