use std::time::Duration;

use agt_core::exec::Exec;
use agt_core::gen;
use agt_core::laws;
use agt_core::metric::ExtReal;
use agt_core::metricgames::{check_metric_props, MetricScale};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweeps");
    group.sample_size(10).measurement_time(Duration::from_secs(5));
    let one = [ExtReal::units(1)];
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("graded |X|=2 grid2", name), &exec, |b, &e| {
            b.iter(|| laws::graded_exhaustive(2, 2, 2, e).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("functoriality |X|=2 grid1", name), &exec, |b, &e| {
            let o = gen::object(2, 1);
            b.iter(|| laws::functoriality_exhaustive(&o, &o, &one, e).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("monoidal pool", name), &exec, |b, &e| {
            let o = gen::object(2, 1);
            b.iter(|| laws::monoidal_pool(&o, &one, 50, 1, e).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("seq cells eps1", name), &exec, |b, &e| {
            b.iter(|| laws::seq_cells(ExtReal::units(1), e, 1).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("metric |X|=2 grid1", name), &exec, |b, &e| {
            b.iter(|| check_metric_props(MetricScale { actions: 2, top: 1 }, e).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
