use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::plays::PlaySimulator;
use super::SimConfig;
use crate::error::Result;
use crate::extractor::{
    filter_plays, plays_from_log, position_features, refine, ExtractorConfig, InteractionEvent, PositionFeatures,
    RefineOutcome, RefineReport, TypeClassifier, TypeLabel,
};
use crate::initializer::{RedDot, RedDotState};
use crate::chat::WindowBounds;
use crate::span::{GroundTruth, HighlightSpan};

/// Play-position features for `n` simulated dots, alternating Type I (dot
/// up to a minute past the highlight end) and Type II (dot up to half a
/// minute ahead of the start, or inside the highlight).
pub fn classifier_dataset(seed: u64, n: usize, sim: &SimConfig, cfg: &ExtractorConfig) -> Result<Vec<(PositionFeatures, TypeLabel)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut players = PlaySimulator::new(seed.wrapping_add(1), sim);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let start = rng.random_range(300.0..sim.video_length_s - 300.0);
        let len = rng.random_range(super::PLANTED_LEN_RANGE_S.0..=super::PLANTED_LEN_RANGE_S.1);
        let h = HighlightSpan { start_s: start, end_s: start + len };
        let truth = GroundTruth::new(sim.video_id.clone(), vec![h])?;
        let (r, label) = if i % 2 == 0 {
            (h.end_s + rng.random_range(1.0..60.0), TypeLabel::TypeI)
        } else {
            (h.start_s + rng.random_range(-30.0..len), TypeLabel::TypeII)
        };
        let events = players.round(i as u32, r, &truth, sim.viewers);
        let plays = plays_from_log(&events);
        if let Ok(kept) = filter_plays(&plays, r, cfg) {
            out.push((position_features(&kept, r), label));
        }
    }
    Ok(out)
}

/// A red dot refined against simulated viewers until it converges or the
/// iteration cap stops it.
#[derive(Debug, Clone)]
pub struct Convergence {
    pub dot: RedDot,
    pub reports: Vec<RefineReport>,
    /// Every event the viewers produced, in order.
    pub events: Vec<InteractionEvent>,
}

impl Convergence {
    pub fn converged(&self) -> bool {
        self.dot.state == RedDotState::Converged
    }
}

/// Runs rounds of `sim.viewers` sessions at the dot's current position,
/// refining after each, for at most `cfg.max_iterations` rounds.
pub fn converge(
    mut dot: RedDot,
    truth: &GroundTruth,
    players: &mut PlaySimulator,
    viewers: usize,
    cfg: &ExtractorConfig,
    classifier: &TypeClassifier,
) -> Convergence {
    let mut reports = Vec::new();
    let mut events = Vec::new();
    for _ in 0..cfg.max_iterations {
        if dot.state == RedDotState::Converged {
            break;
        }
        let round = players.round(dot.id, dot.position_s, truth, viewers);
        let step = refine(&dot, &round, cfg, classifier);
        events.extend(round);
        let stop = matches!(step.report.outcome, RefineOutcome::Deferred(_));
        reports.push(step.report);
        dot = step.dot;
        if stop {
            break;
        }
    }
    Convergence { dot, reports, events }
}

/// A fresh dot at `r`, as the initializer would place it.
pub fn planted_dot(id: u32, r: f64) -> RedDot {
    RedDot {
        id,
        position_s: r,
        source_window: WindowBounds { start_s: r, end_s: r },
        probability: 1.0,
        state: RedDotState::Initial,
        history: Vec::new(),
        span: None,
    }
}
