//! Comparison methods: a message-count peak picker for red dots, and two
//! histogram methods for highlight boundaries.

use crate::chat::ChatMessage;
use crate::error::{Error, Result};
use crate::extractor::{EventKind, InteractionEvent, Play};
use crate::histogram::{bin_of, BinnedSeries};
use crate::initializer::{count_scored_windows, top_k};
use crate::span::HighlightSpan;

/// Half-width of the span the seek-histogram method reports.
pub const SOCIALSKIP_HALF_WIDTH_S: f64 = 10.0;

/// Peaks of the `k` busiest windows, `delta_sep` apart, with no delay
/// correction.
pub fn baseline_peak(messages: &[ChatMessage], k: usize, delta_sep: f64, l: f64) -> Result<Vec<f64>> {
    let scored = count_scored_windows(messages, l)?;
    Ok(top_k(&scored, k, delta_sep).into_iter().map(|w| w.peak_s).collect())
}

fn neighbourhood(red_dot_s: f64, delta: f64) -> BinnedSeries {
    BinnedSeries::zeros(bin_of(red_dot_s - delta), bin_of(red_dot_s + delta))
}

/// Seek histogram: ranges skipped by a forward seek score -1, ranges
/// replayed by a backward seek score +1. The smoothed maximum near the dot
/// is widened by ±10 s.
pub fn baseline_socialskip(events: &[InteractionEvent], red_dot_s: f64, delta: f64) -> Result<HighlightSpan> {
    let mut hist = neighbourhood(red_dot_s, delta);
    let mut seeks = 0;
    for ev in events.iter().filter(|e| e.kind == EventKind::Seek) {
        let Some(to) = ev.to_s else { continue };
        seeks += 1;
        let (a, b) = (bin_of(ev.at_s), bin_of(to));
        if to > ev.at_s {
            hist.add_range(a, b, -1.0);
        } else {
            hist.add_range(b, a, 1.0);
        }
    }
    if seeks == 0 {
        return Err(Error::InsufficientData("no seek events".into()));
    }
    let smooth = hist.smoothed();
    let idx = smooth
        .argmax_plateau_mid()
        .filter(|&i| smooth.values[i] > 0.0)
        .ok_or_else(|| Error::InsufficientData("no replayed range near the red dot".into()))?;
    let center = smooth.bin_at(idx) as f64;
    Ok(HighlightSpan {
        start_s: center - SOCIALSKIP_HALF_WIDTH_S,
        end_s: center + SOCIALSKIP_HALF_WIDTH_S,
    })
}

/// Play histogram: every watched second scores +1. From the smoothed
/// maximum near the dot, walk outwards to the nearest turning points.
pub fn baseline_moocer(plays: &[Play], red_dot_s: f64, delta: f64) -> Result<HighlightSpan> {
    if plays.is_empty() {
        return Err(Error::InsufficientData("no plays".into()));
    }
    let mut hist = neighbourhood(red_dot_s, delta);
    for p in plays {
        hist.add_range(bin_of(p.s), bin_of(p.e), 1.0);
    }
    let smooth = hist.smoothed();
    let v = &smooth.values;
    let peak = smooth
        .argmax_plateau_mid()
        .filter(|&i| v[i] > 0.0)
        .ok_or_else(|| Error::InsufficientData("no plays near the red dot".into()))?;

    let mut lo = peak;
    while lo > 0 && v[lo - 1] > 0.0 && v[lo - 1] <= v[lo] {
        lo -= 1;
    }
    let mut hi = peak;
    while hi + 1 < v.len() && v[hi + 1] > 0.0 && v[hi + 1] <= v[hi] {
        hi += 1;
    }
    let start_s = smooth.bin_at(lo) as f64;
    let end_s = (smooth.bin_at(hi) as f64).max(start_s + 1.0);
    Ok(HighlightSpan { start_s, end_s })
}
