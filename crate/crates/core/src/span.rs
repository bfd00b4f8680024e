use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed `[start_s, end_s]` interval of video time with `start_s < end_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HighlightSpan {
    pub start_s: f64,
    pub end_s: f64,
}

impl HighlightSpan {
    pub fn new(start_s: f64, end_s: f64) -> Result<Self> {
        if !(start_s.is_finite() && end_s.is_finite()) || start_s >= end_s {
            return Err(Error::Config(format!(
                "highlight span needs start < end, got [{start_s}, {end_s}]"
            )));
        }
        Ok(Self { start_s, end_s })
    }

    pub fn len(&self) -> f64 {
        self.end_s - self.start_s
    }

    pub fn overlaps(&self, start_s: f64, end_s: f64) -> bool {
        self.start_s < end_s && start_s < self.end_s
    }
}

/// Labelled highlights of one video, sorted by start and non-overlapping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub video_id: String,
    pub highlights: Vec<HighlightSpan>,
}

impl GroundTruth {
    pub fn new(video_id: impl Into<String>, mut highlights: Vec<HighlightSpan>) -> Result<Self> {
        highlights.sort_by(|a, b| a.start_s.total_cmp(&b.start_s));
        for pair in highlights.windows(2) {
            if pair[1].start_s <= pair[0].end_s {
                return Err(Error::Config(format!(
                    "overlapping highlights [{}, {}] and [{}, {}]",
                    pair[0].start_s, pair[0].end_s, pair[1].start_s, pair[1].end_s
                )));
            }
        }
        Ok(Self {
            video_id: video_id.into(),
            highlights,
        })
    }

    /// The highlight that most plausibly provoked activity at `t`: the latest
    /// one starting at or before `t`, provided it started no more than
    /// `horizon_s` earlier.
    pub fn preceding(&self, t: f64, horizon_s: f64) -> Option<&HighlightSpan> {
        self.highlights
            .iter()
            .rev()
            .find(|h| h.start_s <= t)
            .filter(|h| t - h.start_s <= horizon_s)
    }

    /// The highlight closest to `t` (distance zero when `t` lies inside).
    pub fn nearest(&self, t: f64) -> Option<&HighlightSpan> {
        self.highlights.iter().min_by(|a, b| {
            distance(a, t).total_cmp(&distance(b, t))
        })
    }
}

fn distance(h: &HighlightSpan, t: f64) -> f64 {
    if t < h.start_s {
        h.start_s - t
    } else if t > h.end_s {
        t - h.end_s
    } else {
        0.0
    }
}
