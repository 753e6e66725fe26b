//! Data-parallel kernels against their sequential twins: the norm-one
//! kernel scan (4^(p-1) candidates) and the Jacobi-sum bucket loop
//! (O(q) with a shared read-only discrete-log table).
//!
//! With default features the parallel side runs on the rayon pool; build
//! with `--no-default-features` to watch both sides collapse to the same
//! sequential numbers.

use criterion::{criterion_group, criterion_main, Criterion};
use cycloweil::fermat::HeckeTuple;
use cycloweil::finite_field::{build_prime_ideals, is_prime_u64};
use cycloweil::jacobi::{jacobi_sum, jacobi_sum_seq};
use cycloweil::unit_group::{norm_one_kernel, norm_one_kernel_seq};

fn bench_norm_one_kernel(c: &mut Criterion) {
    let mut g = c.benchmark_group("norm_one_kernel_p11");
    g.sample_size(10);
    g.bench_function("parallel", |b| {
        b.iter(|| norm_one_kernel(11).unwrap().len())
    });
    g.bench_function("sequential", |b| {
        b.iter(|| norm_one_kernel_seq(11).unwrap().len())
    });
    g.finish();
}

fn bench_jacobi_sum(c: &mut Criterion) {
    // First prime = 1 mod 5 above 2 * 10^5: a split prime with a residue
    // field big enough for the x-loop to dominate the table build.
    let ell = (200_001u64..)
        .step_by(5)
        .find(|&n| n % 5 == 1 && is_prime_u64(n))
        .unwrap();
    let ideal = build_prime_ideals(5, ell).unwrap().remove(0);
    let tuple = HeckeTuple::new(5, 1, 1, 3).unwrap();
    let mut g = c.benchmark_group(format!("jacobi_sum_q{ell}"));
    g.sample_size(10);
    g.bench_function("parallel", |b| {
        b.iter(|| jacobi_sum(&tuple, &ideal).unwrap().q)
    });
    g.bench_function("sequential", |b| {
        b.iter(|| jacobi_sum_seq(&tuple, &ideal).unwrap().q)
    });
    g.finish();
}

criterion_group!(benches, bench_norm_one_kernel, bench_jacobi_sum);
criterion_main!(benches);
