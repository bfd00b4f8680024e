use lightor_core::evaluation::baseline_peak;
use lightor_core::extractor::{refine, ExtractorConfig, InteractionEvent, RefineOutcome, TypeClassifier};
use lightor_core::initializer::{
    initialize, train_initializer, video_features, AdjustmentTieBreak, InitializerModel, TrainingVideo,
};
use lightor_core::simulator::{classifier_dataset, converge, planted_dot, simulate_chat, PlaySimulator, SimConfig};
use lightor_core::{build_windows, ChatLog, GroundTruth, HighlightSpan, LogisticModel, RedDotState};
use proptest::prelude::*;

fn trained(seed: u64) -> (InitializerModel, ChatLog, GroundTruth) {
    let (log, truth) = simulate_chat(&SimConfig::planted(seed, 10)).unwrap();
    let model = train_initializer(
        &[TrainingVideo { messages: &log.messages, truth: &truth }],
        25.0,
        120.0,
        10,
        AdjustmentTieBreak::NearestFit,
    )
    .unwrap();
    (model, log, truth)
}

fn classifier() -> TypeClassifier {
    let data = classifier_dataset(4, 300, &SimConfig::default(), &ExtractorConfig::default()).unwrap();
    TypeClassifier::train(&data).unwrap()
}

#[test]
fn peak_baseline_is_the_initializer_without_adjustment() {
    let (log, _) = simulate_chat(&SimConfig::planted(41, 10)).unwrap();
    // a scorer increasing in message count alone ranks windows as the
    // baseline's counts do
    let mut model = InitializerModel::new(LogisticModel { weights: [1.0, 0.0, 0.0], bias: 0.0 }, 0.0);
    model.k = 10;
    let dots: Vec<f64> = initialize(&log.meta, &log.messages, &model).unwrap().iter().map(|d| d.position_s).collect();
    assert_eq!(dots, baseline_peak(&log.messages, 10, 120.0, 25.0).unwrap());
}

#[test]
fn training_and_placement_are_deterministic() {
    let (a, log, _) = trained(5);
    let (b, _, _) = trained(5);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_eq!(
        initialize(&log.meta, &log.messages, &a).unwrap(),
        initialize(&log.meta, &log.messages, &b).unwrap()
    );
}

#[test]
fn red_dots_are_separated() {
    let (model, _, _) = trained(6);
    for seed in 20..30 {
        let (log, _) = simulate_chat(&SimConfig::planted(seed, 10)).unwrap();
        let dots = initialize(&log.meta, &log.messages, &model).unwrap();
        for (i, a) in dots.iter().enumerate() {
            for b in &dots[i + 1..] {
                assert!((a.position_s - b.position_s).abs() > model.delta_sep, "{a:?} {b:?}");
            }
        }
    }
}

#[test]
fn duplicating_every_message_keeps_features() {
    let (log, _) = simulate_chat(&SimConfig::planted(8, 5)).unwrap();
    let mut doubled = Vec::new();
    for m in &log.messages {
        doubled.push(m.clone());
        doubled.push(m.clone());
    }
    let wa = build_windows(&log.messages, 25.0).unwrap();
    let wb = build_windows(&doubled, 25.0).unwrap();
    let bounds = |w: &[lightor_core::Window]| w.iter().map(|w| w.bounds()).collect::<Vec<_>>();
    assert_eq!(bounds(&wa), bounds(&wb));
    let (fa, fb) = (video_features(&wa).unwrap(), video_features(&wb).unwrap());
    for (x, y) in fa.iter().zip(&fb) {
        for (p, q) in x.as_array().iter().zip(y.as_array()) {
            assert!((p - q).abs() < 1e-12);
            assert!((0.0..=1.0).contains(p));
        }
    }
}

#[test]
fn tight_type_two_plays_converge_at_once() {
    let truth = GroundTruth::new("v", vec![HighlightSpan { start_s: 1990.0, end_s: 2005.0 }]).unwrap();
    let sim = SimConfig {
        type2_start_sd_s: 1.0,
        type2_end_sd_s: 1.0,
        ..SimConfig::default()
    };
    let mut players = PlaySimulator::new(3, &sim);
    let run = converge(planted_dot(0, 1996.0), &truth, &mut players, 12, &ExtractorConfig::default(), &classifier());
    assert_eq!(run.reports.len(), 1);
    assert!(run.converged());
    let span = run.dot.span.unwrap();
    assert!((span.start_s - 1990.0).abs() <= 10.0 && (span.end_s - 2005.0).abs() <= 10.0, "{span:?}");
}

#[test]
fn late_dot_steps_back_then_converges() {
    let truth = GroundTruth::new("v", vec![HighlightSpan { start_s: 1990.0, end_s: 2005.0 }]).unwrap();
    let mut players = PlaySimulator::new(4, &SimConfig::default());
    let run = converge(planted_dot(0, 2035.0), &truth, &mut players, 10, &ExtractorConfig::default(), &classifier());
    assert!(matches!(run.reports[0].outcome, RefineOutcome::SteppedBack));
    assert!(run.converged());
    assert!(run.reports.len() <= 4, "{:?}", run.reports);
    // Type I steps only ever move back
    for r in &run.reports {
        if matches!(r.outcome, RefineOutcome::SteppedBack) {
            assert!(r.new_position < r.old_position);
        }
    }
}

#[test]
fn simulated_videos_never_hit_the_iteration_cap() {
    let (model, _, _) = trained(9);
    let clf = classifier();
    let cfg = ExtractorConfig::default();
    let mut players = PlaySimulator::new(10, &SimConfig::default());
    for seed in 60..63 {
        let (log, truth) = simulate_chat(&SimConfig::planted(seed, 10)).unwrap();
        for dot in initialize(&log.meta, &log.messages, &model).unwrap() {
            let run = converge(dot, &truth, &mut players, 10, &cfg, &clf);
            assert!(run.reports.len() < cfg.max_iterations, "{:?}", run.reports);
            assert_eq!(run.dot.state, RedDotState::Converged);
        }
    }
}

fn session(user: &str, s: f64, e: f64, t: i64) -> [InteractionEvent; 2] {
    [InteractionEvent::play(user, 0, s, t), InteractionEvent::pause(user, 0, e, t + 1)]
}

proptest! {
    #[test]
    fn filtered_outlier_changes_nothing(
        plays in prop::collection::vec((1985.0..2000.0f64, 10.0..25.0f64), 10..20),
        far in prop_oneof![Just(-500.0), Just(700.0)],
        dur in prop_oneof![Just(2.0), Just(40.0), Just(400.0)],
    ) {
        let clf = classifier_fixed();
        let cfg = ExtractorConfig::default();
        let dot = planted_dot(0, 1990.0);
        let mut events: Vec<InteractionEvent> = plays
            .iter()
            .enumerate()
            .flat_map(|(i, &(s, d))| session(&format!("u{i}"), s, s + d, i as i64 * 10))
            .collect();
        let base = refine(&dot, &events, &cfg, &clf);
        // far from the dot, or too short or long
        let s = if dur == 40.0 { 1990.0 + far } else { 1990.0 };
        events.extend(session("outlier", s, s + dur, 10_000));
        let with = refine(&dot, &events, &cfg, &clf);
        prop_assert_eq!(base.dot, with.dot);
    }
}

fn classifier_fixed() -> TypeClassifier {
    TypeClassifier {
        model: LogisticModel { weights: [-6.0, 6.0, 3.0], bias: 0.0 },
    }
}
