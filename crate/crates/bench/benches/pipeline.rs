use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use lightor_core::extractor::{filter_plays, plays_from_log, refine, ExtractorConfig, TypeClassifier};
use lightor_core::initializer::{initialize, train_initializer, AdjustmentTieBreak, TrainingVideo};
use lightor_core::simulator::{classifier_dataset, planted_dot, simulate_chat, PlaySimulator, SimConfig};
use lightor_core::build_windows;

fn initializer(c: &mut Criterion) {
    let (log, truth) = simulate_chat(&SimConfig::planted(1, 10)).unwrap();
    let model = train_initializer(
        &[TrainingVideo { messages: &log.messages, truth: &truth }],
        25.0,
        120.0,
        10,
        AdjustmentTieBreak::NearestFit,
    )
    .unwrap();
    c.bench_function("build_windows/1h", |b| b.iter(|| build_windows(black_box(&log.messages), 25.0).unwrap()));
    c.bench_function("initialize/1h", |b| {
        b.iter(|| initialize(&log.meta, black_box(&log.messages), &model).unwrap())
    });
}

fn extractor(c: &mut Criterion) {
    let sim = SimConfig::default();
    let cfg = ExtractorConfig::default();
    let clf = TypeClassifier::train(&classifier_dataset(1, 200, &sim, &cfg).unwrap()).unwrap();
    let (_, truth) = simulate_chat(&SimConfig::planted(2, 10)).unwrap();
    let h = truth.highlights[3];
    let r = h.end_s + 30.0;
    let events = PlaySimulator::new(3, &sim).round(0, r, &truth, 100);
    let plays = plays_from_log(&events);
    let dot = planted_dot(0, r);
    c.bench_function("filter_plays/100 viewers", |b| b.iter(|| filter_plays(black_box(&plays), r, &cfg).unwrap()));
    c.bench_function("refine/100 viewers", |b| b.iter(|| refine(&dot, black_box(&events), &cfg, &clf)));
}

criterion_group!(benches, initializer, extractor);
criterion_main!(benches);
