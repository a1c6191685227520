//! Sequential vs. data-parallel component sweeps. Each iteration starts
//! from an empty cache so the lattices are actually rebuilt.

use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};

use lcstorsion_core::freering::MultiDegree;
use lcstorsion_core::ideals::{ComponentCache, IdealSpec};
use lcstorsion_core::par::Exec;
use lcstorsion_core::t32basis;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn decomposition(c: &mut Criterion) {
    let mus = MultiDegree::all_bounded(5, 5);
    let mut g = c.benchmark_group("t32_decomposition_deg5");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter_batched(
                ComponentCache::new,
                |cache| t32basis::verify_t32_decomposition(&mus, exec, &cache),
                BatchSize::PerIteration,
            )
        });
    }
    g.finish();
}

fn graded_basis(c: &mut Criterion) {
    let mus = MultiDegree::all_bounded(4, 5);
    let mut g = c.benchmark_group("graded_basis_4vars_deg5");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter_batched(
                ComponentCache::new,
                |cache| t32basis::verify_graded_basis(&mus, exec, &cache),
                BatchSize::PerIteration,
            )
        });
    }
    g.finish();
}

/// Independent components of one large multidegree family, without the
/// cache's relabeling shortcut: all distinct compacted shapes of degree 6.
fn t4_components(c: &mut Criterion) {
    let mus: Vec<MultiDegree> = MultiDegree::all_bounded(6, 6)
        .into_iter()
        .filter(|m| m.total() == 6 && m.support().eq(1..=m.num_vars() as u32))
        .filter(|m| m.num_vars() <= 5)
        .collect();
    let mut g = c.benchmark_group("t4_lattices_deg6");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter_batched(
                ComponentCache::new,
                |cache| exec.map(&mus, |mu| cache.component_lattice(&IdealSpec::Tn(4), mu).rank()),
                BatchSize::PerIteration,
            )
        });
    }
    g.finish();
}

criterion_group!(benches, decomposition, graded_basis, t4_components);
criterion_main!(benches);
