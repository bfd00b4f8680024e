//! Chat-based red-dot placement.
//!
//! Windows are scored by a three-feature logistic model, the top-k windows
//! with well-separated peaks are kept, and each peak is moved back by the
//! learned reaction delay `c` to give a red dot.

mod adjust;
mod features;
mod peak;
mod select;

pub use adjust::{adjustment_reward, learn_adjustment, AdjustmentTieBreak, ADJUSTMENT_GRID};
pub use features::{
    extract_features, message_similarity, raw_features, tokenize, video_features, FeatureVector,
    NormalizationStats, RawFeatures,
};
pub use peak::{find_peak, message_rate};
pub use select::{top_k, ScoredWindow};

use serde::{Deserialize, Serialize};

use crate::chat::{build_windows, ChatMessage, VideoMeta, Window, WindowBounds};
use crate::error::{Error, Result};
use crate::logistic::LogisticModel;
use crate::span::{GroundTruth, HighlightSpan};

pub const DEFAULT_WINDOW_S: f64 = 25.0;
pub const DEFAULT_DELTA_SEP_S: f64 = 120.0;
pub const DEFAULT_K: usize = 10;

fn default_k() -> usize {
    DEFAULT_K
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitializerModel {
    #[serde(flatten)]
    pub scorer: LogisticModel<3>,
    /// Seconds subtracted from each peak.
    pub c: f64,
    /// Sliding window length in seconds.
    pub l: f64,
    pub delta_sep: f64,
    #[serde(default = "default_k")]
    pub k: usize,
}

impl InitializerModel {
    pub fn new(scorer: LogisticModel<3>, c: f64) -> Self {
        Self {
            scorer,
            c,
            l: DEFAULT_WINDOW_S,
            delta_sep: DEFAULT_DELTA_SEP_S,
            k: DEFAULT_K,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c >= 0.0) || !(self.delta_sep > 0.0) || self.k == 0 || !(self.l > 0.0) {
            return Err(Error::Config(format!(
                "need c >= 0, delta_sep > 0, l > 0, k >= 1 (got c={}, delta_sep={}, l={}, k={})",
                self.c, self.delta_sep, self.l, self.k
            )));
        }
        Ok(())
    }

    pub fn predict(&self, f: &FeatureVector) -> f64 {
        self.scorer.predict(&f.as_array())
    }
}

pub fn predict(scorer: &LogisticModel<3>, f: &FeatureVector) -> f64 {
    scorer.predict(&f.as_array())
}

pub fn train_model(labeled: &[(FeatureVector, bool)]) -> Result<LogisticModel<3>> {
    let samples: Vec<([f64; 3], bool)> = labeled.iter().map(|(f, y)| (f.as_array(), *y)).collect();
    LogisticModel::fit(&samples)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RedDotState {
    Initial,
    Refining,
    Converged,
}

/// A marker on the progress bar, plus the bookkeeping the extractor keeps
/// while refining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedDot {
    pub id: u32,
    pub position_s: f64,
    pub source_window: WindowBounds,
    pub probability: f64,
    pub state: RedDotState,
    /// Positions before each completed refinement step, oldest first.
    #[serde(default)]
    pub history: Vec<f64>,
    /// Span estimated by the latest Type II step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<HighlightSpan>,
}

impl RedDot {
    pub fn iterations(&self) -> usize {
        self.history.len()
    }

    /// End position to report when no refined span exists yet: the end of
    /// the window the dot came from.
    pub fn end_estimate(&self) -> f64 {
        self.span.map_or(self.source_window.end_s, |s| s.end_s)
    }

    pub fn start_estimate(&self) -> f64 {
        self.span.map_or(self.position_s, |s| s.start_s)
    }
}

/// Windows of a video with features, probability and peak.
pub fn score_windows(messages: &[ChatMessage], model: &InitializerModel) -> Result<Vec<(ScoredWindow, FeatureVector)>> {
    let windows = build_windows(messages, model.l)?;
    score_built_windows(windows, |f| model.predict(f))
}

fn score_built_windows(
    windows: Vec<Window>,
    score: impl Fn(&FeatureVector) -> f64,
) -> Result<Vec<(ScoredWindow, FeatureVector)>> {
    let features = video_features(&windows)?;
    windows
        .into_iter()
        .zip(features)
        .map(|(window, f)| {
            let peak_s = find_peak(&window)?;
            Ok((
                ScoredWindow {
                    probability: score(&f),
                    window,
                    peak_s,
                },
                f,
            ))
        })
        .collect()
}

/// A window counts as a highlight window when it overlaps a labelled span.
pub fn window_is_highlight(w: &WindowBounds, truth: &GroundTruth) -> bool {
    truth.highlights.iter().any(|h| h.overlaps(w.start_s, w.end_s))
}

/// Labelled feature vectors for one video.
pub fn labeled_windows(messages: &[ChatMessage], truth: &GroundTruth, l: f64) -> Result<Vec<(FeatureVector, bool)>> {
    let windows = build_windows(messages, l)?;
    let features = video_features(&windows)?;
    Ok(windows
        .iter()
        .zip(features)
        .map(|(w, f)| (f, window_is_highlight(&w.bounds(), truth)))
        .collect())
}

/// Pairs each labelled highlight with the peak of the most probable window
/// whose peak falls within the adjustment grid after the highlight start.
pub fn adjustment_pairs(scored: &[ScoredWindow], truth: &GroundTruth) -> Vec<(f64, HighlightSpan)> {
    let horizon = f64::from(*ADJUSTMENT_GRID.end());
    truth
        .highlights
        .iter()
        .filter_map(|h| {
            scored
                .iter()
                .filter(|w| w.peak_s >= h.start_s && w.peak_s - h.start_s <= horizon)
                .max_by(|a, b| a.probability.total_cmp(&b.probability).then(b.peak_s.total_cmp(&a.peak_s)))
                .map(|w| (w.peak_s, *h))
        })
        .collect()
}

/// One labelled video's worth of training input.
pub struct TrainingVideo<'a> {
    pub messages: &'a [ChatMessage],
    pub truth: &'a GroundTruth,
}

/// Fits the window scorer, then learns `c` from the fitted scorer's peaks.
pub fn train_initializer(
    videos: &[TrainingVideo<'_>],
    l: f64,
    delta_sep: f64,
    k: usize,
    tie_break: AdjustmentTieBreak,
) -> Result<InitializerModel> {
    let mut labeled = Vec::new();
    for v in videos {
        labeled.extend(labeled_windows(v.messages, v.truth, l)?);
    }
    let scorer = train_model(&labeled)?;
    let mut model = InitializerModel {
        scorer,
        c: 0.0,
        l,
        delta_sep,
        k,
    };
    model.validate()?;

    let mut pairs = Vec::new();
    for v in videos {
        let scored: Vec<ScoredWindow> = score_windows(v.messages, &model)?.into_iter().map(|(w, _)| w).collect();
        pairs.extend(adjustment_pairs(&scored, v.truth));
    }
    model.c = learn_adjustment(&pairs, tie_break)?;
    Ok(model)
}

/// Selected windows for a video, in selection order.
pub fn select_windows(messages: &[ChatMessage], model: &InitializerModel) -> Result<Vec<ScoredWindow>> {
    let scored: Vec<ScoredWindow> = score_windows(messages, model)?.into_iter().map(|(w, _)| w).collect();
    Ok(top_k(&scored, model.k, model.delta_sep).into_iter().cloned().collect())
}

/// Places up to `model.k` red dots on a video.
pub fn initialize(video: &VideoMeta, messages: &[ChatMessage], model: &InitializerModel) -> Result<Vec<RedDot>> {
    model.validate()?;
    let selected = select_windows(messages, model)?;
    Ok(place_red_dots(video, &selected, model.c))
}

pub(crate) fn place_red_dots(video: &VideoMeta, selected: &[ScoredWindow], c: f64) -> Vec<RedDot> {
    selected
        .iter()
        .enumerate()
        .map(|(i, w)| RedDot {
            id: i as u32,
            position_s: (w.peak_s - c).clamp(0.0, video.length_s),
            source_window: w.window.bounds(),
            probability: w.probability,
            state: RedDotState::Initial,
            history: Vec::new(),
            span: None,
        })
        .collect()
}

/// Count-only window scoring, shared with the peak baseline.
pub(crate) fn count_scored_windows(messages: &[ChatMessage], l: f64) -> Result<Vec<ScoredWindow>> {
    let windows = build_windows(messages, l)?;
    windows
        .into_iter()
        .map(|window| {
            let peak_s = find_peak(&window)?;
            Ok(ScoredWindow {
                probability: window.message_count() as f64,
                window,
                peak_s,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn burst(center: f64, n: usize) -> Vec<ChatMessage> {
        (0..n)
            .map(|i| ChatMessage::new(center + (i as f64 % 5.0) * 0.2 - 0.4, format!("u{i}"), "pog"))
            .collect()
    }

    fn background(len: f64) -> Vec<ChatMessage> {
        (0..(len / 7.0) as usize)
            .map(|i| ChatMessage::new(i as f64 * 7.0 + 0.3, "bg", format!("talking about topic number {i} at length")))
            .collect()
    }

    fn num_only() -> InitializerModel {
        InitializerModel::new(LogisticModel { weights: [4.0, 0.0, 0.0], bias: -2.0 }, 20.0)
    }

    fn sorted(mut m: Vec<ChatMessage>) -> Vec<ChatMessage> {
        m.sort_by(|a, b| a.timestamp_s.total_cmp(&b.timestamp_s));
        m
    }

    #[test]
    fn single_burst_places_one_dot_before_it() {
        let mut msgs = background(3600.0);
        msgs.extend(burst(2020.0, 40));
        let msgs = sorted(msgs);
        let mut model = num_only();
        model.k = 1;
        let video = VideoMeta::new("v", 3600.0).unwrap();
        let dots = initialize(&video, &msgs, &model).unwrap();
        assert_eq!(dots.len(), 1);
        // trace: the background message at 2016.3 joins the burst in the
        // five-bin average centred on 2018, the first bin reaching 41/5
        assert_eq!(dots[0].position_s, 1998.0, "{:?}", dots[0]);
        assert_eq!(dots[0].state, RedDotState::Initial);
    }

    #[test]
    fn no_messages_no_dots() {
        let video = VideoMeta::new("v", 100.0).unwrap();
        assert!(initialize(&video, &[], &num_only()).unwrap().is_empty());
    }

    #[test]
    fn fewer_candidates_than_k() {
        let msgs = sorted([burst(300.0, 30), burst(900.0, 30), burst(1500.0, 30)].concat());
        let mut model = num_only();
        model.k = 5;
        let video = VideoMeta::new("v", 2000.0).unwrap();
        let dots = initialize(&video, &msgs, &model).unwrap();
        assert_eq!(dots.len(), 3);
        for pair in dots.windows(2) {
            assert!((pair[0].position_s - pair[1].position_s).abs() > model.delta_sep);
        }
    }

    #[test]
    fn early_peak_clamps_to_zero() {
        let msgs = burst(5.0, 20);
        let video = VideoMeta::new("v", 100.0).unwrap();
        let dots = initialize(&video, &msgs, &num_only()).unwrap();
        assert_eq!(dots[0].position_s, 0.0);
    }

    #[test]
    fn model_file_shape() {
        let model = num_only();
        let v = serde_json::to_value(&model).unwrap();
        for key in ["weights", "bias", "c", "l", "delta_sep"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        let back: InitializerModel = serde_json::from_value(v).unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn invalid_model_rejected() {
        let mut m = num_only();
        m.c = -1.0;
        assert!(m.validate().is_err());
        let mut m = num_only();
        m.k = 0;
        assert!(m.validate().is_err());
    }
}
