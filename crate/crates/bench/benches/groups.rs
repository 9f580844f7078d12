use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use openimage_bench::tower;
use openimage_core::covers::genus_of_quotient;
use openimage_core::{cosets, lie, modgroup, pgl2};
use std::hint::black_box;

fn closure(c: &mut Criterion) {
    let (doc, _) = tower("borel3", 3);
    let gens = openimage_core::tower::reduce_all(&doc.generator_matrices().unwrap(), 3);
    c.bench_function("close borel mod 27", |b| b.iter(|| modgroup::close_generate(black_box(&gens), 100_000).unwrap()));
}

fn double_cosets(c: &mut Criterion) {
    let (doc, t) = tower("borel3", 4);
    let (cg, ig) = (doc.subgroup("C").unwrap(), doc.subgroup("I").unwrap());
    let g = t.level(4).unwrap();
    let (cs, is) = (t.image_subgroup(4, &cg).unwrap(), t.image_subgroup(4, &ig).unwrap());
    c.bench_function("double cosets borel mod 81", |b| b.iter(|| cosets::double_cosets(g, &is, &cs).unwrap().count()));
}

fn genus(c: &mut Criterion) {
    let (doc, t) = tower("wild_borel3", 3);
    let tc = doc.tower_cover(&t).unwrap();
    let (spec, cn) = tc.level_spec(3).unwrap();
    c.bench_function("genus wild level 3", |b| b.iter(|| genus_of_quotient(&spec, black_box(&cn)).unwrap().genus));
    c.bench_function("wild level spec 3", |b| b.iter(|| tc.level_spec(3).unwrap().1.order()));
}

fn lie_lattice(c: &mut Criterion) {
    let (_, t) = tower("sl2_5", 4);
    c.bench_function("lie lattice sl2 mod 5^4", |b| {
        b.iter_batched(|| t.clone(), |t| lie::lie_lattice(&t, 1).unwrap().rank(), BatchSize::SmallInput)
    });
}

fn pgl2_atlas(c: &mut Criterion) {
    let g = pgl2::build_pgl2(7, pgl2::Q_CAP).unwrap();
    let mut group = c.benchmark_group("pgl2");
    group.sample_size(10);
    group.bench_function("atlas q=7", |b| b.iter(|| pgl2::atlas(&g).unwrap().len()));
    group.finish();
}

criterion_group!(benches, closure, double_cosets, genus, lie_lattice, pgl2_atlas);
criterion_main!(benches);
