use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use parkfn::prob::{mc_park_probability_with, McConfig, DEFAULT_SEED};
use parkfn::{count_parking_with, CountOptions, Preset};

fn counting(c: &mut Criterion) {
    let mut group = c.benchmark_group("count");
    group.sample_size(10);
    let presets = [
        Preset::Classical { n: 7 },
        Preset::Naples { n: 7, k: 2 },
        Preset::Clown { m: 4, d: 2, n: 8 },
        Preset::Obstructed { m: 8, n: 6, blocked: vec![2, 5] },
    ];
    for p in presets {
        let rule = p.expand().unwrap();
        for (label, workers) in [("sequential", Some(1)), ("parallel", None)] {
            let opts = CountOptions::default().workers(workers);
            group.bench_with_input(BenchmarkId::new(label, &p), &rule, |b, rule| {
                b.iter(|| count_parking_with(rule, &opts).unwrap().parking_count)
            });
        }
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("mc");
    group.sample_size(10);
    let rule = Preset::Coin { n: 8 }.expand().unwrap();
    let prefs = vec![2, 3, 3, 5, 2, 7, 6, 6].into();
    for (label, workers) in [("sequential", Some(1)), ("parallel", None)] {
        let cfg = McConfig {
            workers,
            ..McConfig::new(200_000, DEFAULT_SEED)
        };
        group.bench_function(label, |b| {
            b.iter(|| mc_park_probability_with(&prefs, &rule, &cfg).unwrap().successes)
        });
    }
    group.finish();
}

criterion_group!(benches, counting, monte_carlo);
criterion_main!(benches);
