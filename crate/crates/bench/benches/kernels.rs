use std::hint::black_box;

use affiq::bodies::BodyParams;
use affiq::hull::hull_volume;
use affiq::quermass::{grassmann_stream, shadow_volumes, ProjectionOracle};
use affiq::{q_kp, standard_body, QuermassSpec};
use criterion::{criterion_group, criterion_main, Criterion};

fn random_poly(n: usize, m: usize) -> affiq::Body {
    let params = BodyParams { m: Some(m), seed: Some(7), ..Default::default() };
    standard_body("random-poly", n, &params).unwrap()
}

fn hull(c: &mut Criterion) {
    for (n, m) in [(3, 200), (4, 200)] {
        let p = random_poly(n, m);
        let coords = p.as_vpoly().unwrap().coords().to_vec();
        c.bench_function(&format!("hull_volume/n{n}/m{m}"), |b| {
            b.iter(|| hull_volume(black_box(&coords), n).unwrap())
        });
    }
}

fn shadows(c: &mut Criterion) {
    for (n, k) in [(3, 1), (3, 2), (4, 2), (4, 3)] {
        let oracle = ProjectionOracle::new(&random_poly(n, 40)).unwrap();
        c.bench_function(&format!("shadow_volumes/n{n}/k{k}/1000"), |b| {
            b.iter(|| shadow_volumes(&oracle, k, 1000, grassmann_stream(1, n, k)).unwrap())
        });
    }
}

fn quermass(c: &mut Criterion) {
    let cube = standard_body("cube", 3, &BodyParams::default()).unwrap();
    let spec = QuermassSpec::new(2, -3.0, 10_000);
    c.bench_function("q_kp/cube3/k2/p-3/10k", |b| b.iter(|| q_kp(black_box(&cube), &spec, 1).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = hull, shadows, quermass
}
criterion_main!(benches);
