use criterion::{black_box, criterion_group, criterion_main, Criterion};

use ou_liouville_core::fields::{sobolev_exponent, ProblemParams};
use ou_liouville_core::kummer::{self, KummerArgs};
use ou_liouville_core::numerics::OdeSpec;
use ou_liouville_core::regime;
use ou_liouville_core::shooting;

fn bench_kummer(c: &mut Criterion) {
    c.bench_function("kummer_m series (a=-2.3, b=1.5, xi=12.3)", |b| {
        b.iter(|| kummer::kummer_m(black_box(KummerArgs::new(-2.3, 1.5, 12.3))).unwrap())
    });
    c.bench_function("kummer_m_scaled large xi (a=1, b=3.5, xi=400)", |b| {
        b.iter(|| kummer::kummer_m_scaled(black_box(KummerArgs::new(1.0, 3.5, 400.0))).unwrap())
    });
    c.bench_function("positive_roots (a=-3.5, b=4)", |b| {
        b.iter(|| kummer::positive_roots(black_box(-3.5), 4.0, 64.0).unwrap())
    });
}

fn bench_regime(c: &mut Criterion) {
    let params = ProblemParams::new(3, sobolev_exponent(3), 1.5).unwrap();
    c.bench_function("classify (n=3, p=pS, lambda=1.5, 800 pts)", |b| {
        b.iter(|| regime::classify(black_box(&params), 30.0, 800).unwrap())
    });
}

fn bench_shooting(c: &mut Criterion) {
    let params = ProblemParams::new(3, 3.0, 1.0).unwrap();
    let ode = OdeSpec::default();
    c.bench_function("integrate_profile (alpha=1.0, r_end=9)", |b| {
        b.iter(|| shooting::integrate_profile(black_box(&params), 1.0, 9.0, &ode).unwrap())
    });
}

criterion_group!(benches, bench_kummer, bench_regime, bench_shooting);
criterion_main!(benches);
