use std::collections::BTreeMap;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use shellfield_core::decomp::{bundled_table, decompose, FitConfig};
use shellfield_core::imaging::{
    atom_image_model, synthesize_map, AtomSite, GaussianAtomModel, GaussianTerm, GridSpec,
    ResolutionSpec,
};
use shellfield_core::rfourier::{radial_ft, QuadratureSpec};
use shellfield_core::shells::{interference_radial, omega_gradient, omega_radial};
use shellfield_core::Dim;

fn shells(c: &mut Criterion) {
    for dim in Dim::ALL {
        c.bench_function(&format!("omega_radial/N={}", dim.n()), |b| {
            b.iter(|| omega_radial(dim, black_box(1.7), black_box(2.0), black_box(0.05)).unwrap())
        });
        c.bench_function(&format!("omega_gradient/N={}", dim.n()), |b| {
            b.iter(|| omega_gradient(dim, black_box(1.7), black_box(2.0), black_box(0.05)).unwrap())
        });
    }
    let table = bundled_table("pi3_interference").unwrap();
    c.bench_function("table1_eval_4001", |b| {
        b.iter(|| {
            (0..=4000)
                .map(|i| table.eval(i as f64 * 0.005, None).unwrap())
                .sum::<f64>()
        })
    });
}

fn fourier(c: &mut Criterion) {
    let q = QuadratureSpec::gaussian_decay(2.0, 0.1);
    c.bench_function("radial_ft/N=3", |b| {
        b.iter(|| {
            radial_ft(
                Dim::Three,
                |x| omega_radial(Dim::Three, x, 2.0, 0.1).unwrap(),
                black_box(0.5),
                &q,
            )
            .unwrap()
        })
    });
}

fn fitting(c: &mut Criterion) {
    let mut group = c.benchmark_group("decompose");
    group.sample_size(10);
    let cfg = FitConfig::for_range(10.0);
    let target = cfg
        .sample_target(Dim::One, 10.0, |x| {
            interference_radial(Dim::One, x).unwrap()
        })
        .unwrap();
    group.bench_function("pi1_per_ripple", |b| {
        b.iter(|| decompose(Dim::One, &target, &cfg).unwrap())
    });
    group.finish();
}

fn imaging(c: &mut Criterion) {
    let pi3 = bundled_table("pi3_interference").unwrap();
    let res = ResolutionSpec::new(2.0, 0.0).unwrap();
    let carbon = GaussianAtomModel::new(
        vec![
            GaussianTerm { a: 2.0, b: 10.0 },
            GaussianTerm { a: 1.0, b: 30.0 },
        ],
        "C",
    )
    .unwrap();
    let mut types = BTreeMap::new();
    types.insert(
        "C".to_string(),
        atom_image_model(&carbon, 0.0, &res, &pi3).unwrap(),
    );
    let atoms: Vec<AtomSite> = (0..8)
        .map(|i| AtomSite {
            position: [i as f64 * 1.5, 0.0, 0.0],
            b_factor: 15.0,
            occupancy: 1.0,
            type_label: "C".into(),
        })
        .collect();
    let grid = GridSpec::new([-8.0, -8.0, -8.0], [0.5; 3], [56, 32, 32]).unwrap();
    let mut group = c.benchmark_group("imaging");
    group.sample_size(10);
    group.bench_function("map_8_atoms_56x32x32", |b| {
        b.iter(|| synthesize_map(&atoms, &types, &res, &grid).unwrap())
    });
    group.finish();
}

criterion_group!(benches, shells, fourier, fitting, imaging);
criterion_main!(benches);
