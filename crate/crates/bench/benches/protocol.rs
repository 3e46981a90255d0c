use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qcarrier_bench::session_config;
use qcarrier_core::{
    build_carrier, download, encode_codeword, hadamard_round, power_sum, run_session,
    uploaded_joint, CodeSpec, SchemeSpec,
};

fn bench_encoding(c: &mut Criterion) {
    let mut group = c.benchmark_group("encode_codeword");
    for (k, n) in [(2u32, 3u32), (3, 5), (4, 7)] {
        let spec = CodeSpec::new(k, n).unwrap();
        group.bench_function(format!("k{k}_n{n}"), |b| {
            b.iter(|| encode_codeword(black_box(&spec), black_box(1)).unwrap())
        });
    }
    group.finish();
}

fn bench_round_trip(c: &mut Criterion) {
    let mut group = c.benchmark_group("upload_download");
    for (name, scheme) in [
        ("kd", SchemeSpec::kd()),
        ("kn_2_3", SchemeSpec::kn(2, 3).unwrap()),
        ("kn_3_5", SchemeSpec::kn(3, 5).unwrap()),
    ] {
        group.bench_function(name, |b| {
            b.iter(|| {
                let joint = uploaded_joint(black_box(&scheme), 1).unwrap();
                download(&joint, &scheme).unwrap()
            })
        });
    }
    group.finish();
}

fn bench_hadamard_round(c: &mut Criterion) {
    let mut group = c.benchmark_group("hadamard_round");
    for (name, scheme) in [
        ("kn_2_3", SchemeSpec::kn(2, 3).unwrap()),
        ("kn_3_5", SchemeSpec::kn(3, 5).unwrap()),
    ] {
        let carrier = build_carrier(&scheme).unwrap();
        group.bench_function(name, |b| {
            b.iter(|| hadamard_round(black_box(&carrier)).unwrap())
        });
    }
    group.finish();
}

fn bench_session(c: &mut Criterion) {
    let config = session_config(SchemeSpec::kd(), 100);
    c.bench_function("kd_session_100_rounds", |b| {
        b.iter(|| run_session(black_box(&config)).unwrap())
    });
}

fn bench_power_sums(c: &mut Criterion) {
    c.bench_function("power_sum_table_p97", |b| {
        b.iter(|| {
            for k in 1..97u32 {
                black_box(power_sum(k, 97).unwrap());
            }
        })
    });
}

criterion_group!(
    benches,
    bench_encoding,
    bench_round_trip,
    bench_hadamard_round,
    bench_session,
    bench_power_sums
);
criterion_main!(benches);
