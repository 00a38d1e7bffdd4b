//! Benchmarks for the three pipeline stages: the Schur reduction, the
//! generalized sign evaluation, and the full decomposition with
//! certification.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use polarform::harness::{self, InstanceRecipe, ProductFamily};
use polarform::matfunc::SignFunctionSpec;
use polarform::polar::{self, Side};
use polarform::{eigen, ComplexMatrix, FormKind, ProductPair, Tolerances};
use rand::{Rng, SeedableRng};

fn random_matrix(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    ComplexMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    })
}

fn bench_schur(c: &mut Criterion) {
    let mut group = c.benchmark_group("schur");
    for n in [8usize, 16, 32] {
        let a = random_matrix(n, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| {
            b.iter(|| eigen::schur(a).unwrap())
        });
    }
    group.finish();
}

fn bench_sign(c: &mut Criterion) {
    let tol = Tolerances::default();
    let mut group = c.benchmark_group("generalized_sign");
    for n in [8usize, 16] {
        let a = random_matrix(n, 2);
        for spec in [
            SignFunctionSpec::sign1(),
            SignFunctionSpec::sign3(),
        ] {
            group.bench_with_input(
                BenchmarkId::new(spec.name(), n),
                &a,
                |b, a| {
                    b.iter(|| {
                        polarform::matfunc::generalized_sign(a, &spec, &tol).unwrap()
                    })
                },
            );
        }
    }
    group.finish();
}

fn bench_decompose(c: &mut Criterion) {
    let tol = Tolerances::default();
    let mut group = c.benchmark_group("decompose_and_certify");
    for n in [4usize, 8] {
        let recipe = InstanceRecipe {
            dim: n,
            form: FormKind::Sesquilinear,
            family: ProductFamily::Hermitian,
            seed: 3,
        };
        let (space, f) = harness::generate_instance(&recipe, &tol).unwrap();
        let pair = ProductPair::square(space);
        group.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| {
            b.iter(|| {
                let factors = polar::decompose(
                    f,
                    &pair,
                    &SignFunctionSpec::sign2(),
                    Side::Right,
                    &tol,
                )
                .unwrap();
                polar::certify(f, &factors, &pair, &tol).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_schur, bench_sign, bench_decompose);
criterion_main!(benches);
