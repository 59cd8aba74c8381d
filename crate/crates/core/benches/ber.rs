//! Sequential versus data-parallel BER simulation, plus single-frame decode
//! cost for each arithmetic.
//!
//! Build with `--no-default-features` to benchmark without rayon; the
//! parallel group then runs the sequential path too.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

use qcldpc::base::wifi;
use qcldpc::channel::{awgn_llr, frame_rng, run_ber, ChannelConfig};
use qcldpc::{Arithmetic, CompactCode, Decoder, DecoderConfig, QFormat};

fn z27() -> CompactCode {
    CompactCode::from_base(&wifi::rate_half(27).unwrap())
}

fn ber_workers(c: &mut Criterion) {
    let code = z27();
    let frames = 256;
    let mut group = c.benchmark_group("ber_2dB_256_frames");
    group.sample_size(10);
    group.throughput(Throughput::Elements(frames));
    for (name, workers) in [("sequential", 1), ("parallel", 0)] {
        let channel = ChannelConfig {
            ebno_db: vec![2.0],
            rate: 0.5,
            seed: 1,
            max_frames: frames,
            min_bit_errors: u64::MAX,
            workers,
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &channel, |b, ch| {
            b.iter(|| run_ber(&code, &DecoderConfig::default(), black_box(ch)).unwrap())
        });
    }
    group.finish();
}

fn decode_frame(c: &mut Criterion) {
    let code = z27();
    let llr = awgn_llr(2.0, 0.5, &mut frame_rng(9, 0), code.code_length());
    let mut group = c.benchmark_group("decode_frame_n648");
    for (name, arithmetic) in [
        ("float", Arithmetic::Float),
        ("fixed_6.4", Arithmetic::Fixed(QFormat::Q6_4)),
    ] {
        let decoder = Decoder::new(
            &code,
            &DecoderConfig {
                arithmetic,
                ..DecoderConfig::default()
            },
        )
        .unwrap();
        group.bench_function(name, |b| {
            b.iter(|| decoder.decode(black_box(&llr)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, ber_workers, decode_frame);
criterion_main!(benches);
