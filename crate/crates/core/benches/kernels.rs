use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use twobase::bounds::window_failures;
use twobase::probability::mc_uncovered;
use twobase::sumset::{sumset, sumset_word, SubsetMask};
use twobase::{Ceilings, Counter, Exec};

fn modes() -> [(&'static str, Exec); 2] {
    [("sequential", Exec::Sequential), ("parallel", Exec::default())]
}

fn sumset_kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("sumset");
    let word = SubsetMask::from_word(60, 0x0f0f_3c3c_a5a5_1234);
    group.bench_function("word", |b| b.iter(|| sumset_word(black_box(word.as_word().unwrap()))));
    group.bench_function("shift_or_n60", |b| b.iter(|| sumset(black_box(&word))));
    let wide = SubsetMask::from_elements(1000, (0..=1000).step_by(7)).unwrap();
    group.bench_function("shift_or_n1000", |b| b.iter(|| sumset(black_box(&wide))));
    group.finish();
}

fn counting(c: &mut Criterion) {
    let mut group = c.benchmark_group("count");
    group.sample_size(10);
    for (name, exec) in modes() {
        let counter = Counter::new(Ceilings::default(), exec);
        group.bench_with_input(BenchmarkId::new("brute", name), &18, |b, &n| {
            b.iter(|| counter.brute(n).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("dfs", name), &28, |b, &n| {
            b.iter(|| counter.dfs(n).unwrap())
        });
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("mc_uncovered");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::new(name, 100), &100, |b, &n| {
            b.iter(|| mc_uncovered(n, 20_000, 1, exec).unwrap())
        });
    }
    group.finish();
}

fn bound_window(c: &mut Criterion) {
    let mut group = c.benchmark_group("window_failures");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_function(name, |b| b.iter(|| window_failures(980, 2_000, exec)));
    }
    group.finish();
}

criterion_group!(benches, sumset_kernels, counting, monte_carlo, bound_window);
criterion_main!(benches);
