#![allow(dead_code)]

use lightor_core::extractor::{ExtractorConfig, InteractionEvent, TypeClassifier};
use lightor_core::initializer::{train_initializer, AdjustmentTieBreak, TrainingVideo};
use lightor_core::simulator::{classifier_dataset, simulate_chat, PlaySimulator, SimConfig};
use lightor_core::{write_chat_log, ChatLog, GroundTruth, LogisticModel, ModelFile};

pub fn video(seed: u64, highlights: usize) -> (ChatLog, GroundTruth) {
    simulate_chat(&SimConfig::planted(seed, highlights)).unwrap()
}

pub fn chat_text(log: &ChatLog) -> String {
    let mut buf = Vec::new();
    write_chat_log(&mut buf, log).unwrap();
    String::from_utf8(buf).unwrap()
}

pub fn model() -> ModelFile {
    let (log, truth) = video(1000, 10);
    let initializer = train_initializer(
        &[TrainingVideo { messages: &log.messages, truth: &truth }],
        25.0,
        120.0,
        10,
        AdjustmentTieBreak::NearestFit,
    )
    .unwrap();
    let data = classifier_dataset(2000, 200, &SimConfig::default(), &ExtractorConfig::default()).unwrap();
    ModelFile {
        initializer,
        type_classifier: Some(TypeClassifier::train(&data).unwrap()),
    }
}

/// Calls every dot Type I when most plays end before it.
pub fn fixed_classifier() -> TypeClassifier {
    TypeClassifier {
        model: LogisticModel { weights: [-6.0, 6.0, 3.0], bias: 0.0 },
    }
}

pub fn viewers(seed: u64, dot: u32, r: f64, truth: &GroundTruth, n: usize) -> Vec<InteractionEvent> {
    PlaySimulator::new(seed, &SimConfig::default()).round(dot, r, truth, n)
}
