//! Sequential against rayon execution for the batch workloads.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ppgroup::constructions::{chabauty_escape_with, HyperbolicSearch, IntervalSpec, SearchBudget};
use ppgroup::numbers::{int, prime_power, ratio};
use ppgroup::par::Exec;
use ppgroup::{ExtReal, PPMap, Piece, PrimeSet, Quadratic, Sl2};

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn bump(m: &Sl2) -> PPMap {
    let pts: Vec<Quadratic> = m
        .fixed_points()
        .points
        .iter()
        .filter_map(|p| p.as_finite().cloned())
        .collect();
    PPMap::new(vec![
        Piece::new(ExtReal::NegInf, pts[0].clone(), Sl2::identity()),
        Piece::new(pts[0].clone(), pts[1].clone(), m.clone()),
        Piece::new(pts[1].clone(), ExtReal::PosInf, Sl2::identity()),
    ])
    .unwrap()
}

/// Bumps of `[[2+k, 1], [1+k, 1]]` shifted by `k`, composed with a
/// translation over `Z[1/3]`.
fn elements(n: i64) -> Vec<PPMap> {
    (0..n)
        .map(|k| {
            let q = Sl2::from_ints(2 + k, 1, 1 + k, 1).conjugate_by(&Sl2::translation(int(k % 7 - 3)));
            let t = PPMap::global(Sl2::translation(ratio(k + 1, 9))).unwrap();
            bump(&q).compose(&t)
        })
        .collect()
}

fn hyperbolic_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("hyperbolic_search");
    let rep = IntervalSpec::open(Quadratic::rational(ratio(7, 3)), Quadratic::rational(ratio(2401, 1000)));
    let att = IntervalSpec::open(Quadratic::from_int(900), ExtReal::PosInf);
    for (name, exec) in STRATEGIES {
        let search = HyperbolicSearch::new(&rep, &att, SearchBudget::default())
            .unwrap()
            .with_exec(exec);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| search.candidates().take(8).count())
        });
    }
    group.finish();
}

fn chabauty(c: &mut Criterion) {
    let mut group = c.benchmark_group("chabauty_escape");
    let set = elements(10);
    let ring = PrimeSet::new([3]).unwrap();
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| chabauty_escape_with(&set, 2, &ring, exec).unwrap().n)
        });
    }
    group.finish();
}

fn batch_compose(c: &mut Criterion) {
    let mut group = c.benchmark_group("batch_compose");
    let fs = elements(64);
    let pairs: Vec<(usize, usize)> = (0..fs.len()).map(|i| (i, (i * 7 + 3) % fs.len())).collect();
    let g = PPMap::global(Sl2::new(prime_power(3, 1), int(1), int(0), prime_power(3, -1)).unwrap()).unwrap();
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                exec.map(&pairs, |&(i, j)| fs[i].compose(&g).compose(&fs[j].inverse()).pieces().len())
            })
        });
    }
    group.finish();
}

criterion_group!(benches, hyperbolic_search, chabauty, batch_compose);
criterion_main!(benches);
