use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mdl_core::covering::{count, CountKind, CountMethod};
use mdl_core::entropy::katok_on_space;
use mdl_core::measures::{product_measure, BallKind, FiniteMeasure};
use mdl_core::metric::{exhaustive_lift, FiniteMetricSpace};
use mdl_core::quantization::{quantization_number, QuantKind, QuantMethod};
use mdl_core::systems::{make_grid_alphabet, LetterDist};
use mdl_core::transport::{levy_prokhorov, wasserstein};
use mdl_core::{Budget, SymbolicSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cloud(points: usize, seed: u64) -> FiniteMetricSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords: Vec<[f64; 2]> = (0..points).map(|_| [rng.random(), rng.random()]).collect();
    FiniteMetricSpace::plane(&coords).unwrap()
}

fn random_measure(space: &FiniteMetricSpace, seed: u64) -> FiniteMeasure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..space.len()).map(|_| rng.random_range(1..=16) as f64).collect();
    let total: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
    w[0] += 1.0 - w.iter().sum::<f64>();
    FiniteMeasure::new(space, w).unwrap()
}

fn covering(c: &mut Criterion) {
    let budget = Budget::default();
    let mut group = c.benchmark_group("count");
    for points in [20, 40] {
        let space = cloud(points, 7);
        for kind in [CountKind::Separated, CountKind::OpenBallCover] {
            group.bench_with_input(BenchmarkId::new(kind.symbol(), points), &space, |b, s| {
                b.iter(|| count(s, 0.2, kind, CountMethod::BranchBound, &budget).unwrap())
            });
        }
    }
    group.finish();
}

fn quantization(c: &mut Criterion) {
    let budget = Budget::default();
    let space = cloud(30, 11);
    let mu = random_measure(&space, 12);
    let mut group = c.benchmark_group("quantization");
    for kind in [QuantKind::Wp(1.0), QuantKind::Wp(2.0), QuantKind::LP] {
        group.bench_function(kind.label(), |b| {
            b.iter(|| quantization_number(&mu, &space, 0.15, kind, QuantMethod::Exact, &budget).unwrap())
        });
    }
    group.finish();
}

fn transport(c: &mut Criterion) {
    let space = cloud(12, 3);
    let mu = random_measure(&space, 4);
    let nu = random_measure(&space, 5);
    c.bench_function("wasserstein/p2", |b| b.iter(|| wasserstein(&mu, &nu, &space, 2.0).unwrap()));
    c.bench_function("levy_prokhorov", |b| b.iter(|| levy_prokhorov(&mu, &nu, &space).unwrap()));
}

fn katok(c: &mut Criterion) {
    let budget = Budget::default();
    let sys = SymbolicSystem::full_shift(make_grid_alphabet(2).unwrap(), 2);
    let lift = exhaustive_lift(&sys, 4, &budget).unwrap();
    let mu = product_measure(&lift, &LetterDist::uniform(2)).unwrap();
    c.bench_function("katok/bernoulli_n4", |b| {
        b.iter(|| katok_on_space(&mu, &lift, 4, 0.3, 0.1, BallKind::Open, true, &budget).unwrap())
    });
}

criterion_group!(benches, covering, quantization, transport, katok);
criterion_main!(benches);
