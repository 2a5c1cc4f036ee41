use catbreed::fock::breed_fock;
use catbreed::{breed, monte_carlo_breed, sample_homodyne, squeezed_cat, CatSpec, HarnessOptions, DEFAULT_HBAR};
use catbreed_bench::{golden_config, sampling_config};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn breeding(c: &mut Criterion) {
    let mut g = c.benchmark_group("breed");
    for eta in [1.0, 0.92] {
        let cfg = golden_config(eta);
        g.bench_with_input(BenchmarkId::new("n9", eta), &cfg, |b, cfg| b.iter(|| breed(black_box(cfg)).unwrap()));
    }
    g.finish();
}

fn sampling(c: &mut Criterion) {
    let cfg = sampling_config();
    let joint = {
        let cat = squeezed_cat(&cfg.cat_spec(0).unwrap(), DEFAULT_HBAR).unwrap();
        let bs = catbreed::breeding::step_transform(1).unwrap();
        cat.tensor(&cat).unwrap().apply_symplectic(&bs).unwrap()
    };
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    c.bench_function("sample_homodyne_two_cats", |b| {
        b.iter(|| sample_homodyne(black_box(&joint), 0, &mut rng).unwrap())
    });

    let mut g = c.benchmark_group("monte_carlo");
    g.sample_size(10);
    let opts = HarnessOptions::new(200, 7);
    g.bench_function("n4_200_samples", |b| b.iter(|| monte_carlo_breed(black_box(&cfg), &opts).unwrap()));
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let spec = CatSpec { alpha: 1.5, r: 0.3, parity: 0, eta: 0.9 };
    let mut g = c.benchmark_group("fock");
    g.sample_size(10);
    g.bench_function("two_cats_cutoff_40", |b| b.iter(|| breed_fock(&[spec, spec], &[0.0], 40, DEFAULT_HBAR).unwrap()));
    g.finish();
}

criterion_group!(benches, breeding, sampling, oracle);
criterion_main!(benches);
