use serde::{Deserialize, Serialize};

use crate::chat::WindowBounds;
use crate::error::{Error, Result};
use crate::span::{GroundTruth, HighlightSpan};

/// Seconds of slack allowed before a highlight starts or after it ends.
pub const TOLERANCE_S: f64 = 10.0;

/// `x ∈ [s - 10, e]`
pub fn in_start_tolerance(x: f64, h: &HighlightSpan) -> bool {
    h.start_s - TOLERANCE_S <= x && x <= h.end_s
}

/// `y ∈ [s, e + 10]`
pub fn in_end_tolerance(y: f64, h: &HighlightSpan) -> bool {
    h.start_s <= y && y <= h.end_s + TOLERANCE_S
}

pub fn is_good_red_dot(r: f64, truth: &GroundTruth, others: &[f64], delta_sep: f64) -> bool {
    truth.highlights.iter().any(|h| in_start_tolerance(r, h))
        && others.iter().all(|o| (r - o).abs() > delta_sep)
}

fn fraction_at_k<T>(items: &[T], k: usize, correct: impl Fn(&T) -> bool) -> Result<f64> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    let hits = items.iter().take(k).filter(|x| correct(x)).count();
    Ok(hits as f64 / k as f64)
}

/// Share of the first `k` windows that overlap some labelled highlight.
pub fn chat_precision_at_k(windows: &[WindowBounds], truth: &GroundTruth, k: usize) -> Result<f64> {
    fraction_at_k(windows, k, |w| truth.highlights.iter().any(|h| h.overlaps(w.start_s, w.end_s)))
}

pub fn video_precision_start(positions: &[f64], truth: &GroundTruth, k: usize) -> Result<f64> {
    fraction_at_k(positions, k, |&x| truth.highlights.iter().any(|h| in_start_tolerance(x, h)))
}

pub fn video_precision_end(positions: &[f64], truth: &GroundTruth, k: usize) -> Result<f64> {
    fraction_at_k(positions, k, |&y| truth.highlights.iter().any(|h| in_end_tolerance(y, h)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionReport {
    pub k: usize,
    pub chat_precision: f64,
    pub video_precision_start: f64,
    pub video_precision_end: f64,
}

impl PrecisionReport {
    pub fn compute(
        windows: &[WindowBounds],
        starts: &[f64],
        ends: &[f64],
        truth: &GroundTruth,
        k: usize,
    ) -> Result<Self> {
        Ok(Self {
            k,
            chat_precision: chat_precision_at_k(windows, truth, k)?,
            video_precision_start: video_precision_start(starts, truth, k)?,
            video_precision_end: video_precision_end(ends, truth, k)?,
        })
    }

    pub fn mean(reports: &[PrecisionReport]) -> Option<PrecisionReport> {
        let first = reports.first()?;
        let n = reports.len() as f64;
        Some(PrecisionReport {
            k: first.k,
            chat_precision: reports.iter().map(|r| r.chat_precision).sum::<f64>() / n,
            video_precision_start: reports.iter().map(|r| r.video_precision_start).sum::<f64>() / n,
            video_precision_end: reports.iter().map(|r| r.video_precision_end).sum::<f64>() / n,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn truth(spans: &[(f64, f64)]) -> GroundTruth {
        GroundTruth::new("v", spans.iter().map(|&(s, e)| HighlightSpan::new(s, e).unwrap()).collect()).unwrap()
    }

    #[test]
    fn good_and_bad_positions() {
        let t = truth(&[(1990.0, 2005.0)]);
        assert!(is_good_red_dot(2000.0, &t, &[], 120.0));
        assert!(!is_good_red_dot(2100.0, &t, &[], 120.0));
        assert!(is_good_red_dot(1980.0, &t, &[], 120.0));
        assert!(!is_good_red_dot(1979.99, &t, &[], 120.0));
        assert!(is_good_red_dot(2005.0, &t, &[], 120.0));
        assert!(!is_good_red_dot(2000.0, &t, &[2100.0], 120.0));
        assert!(is_good_red_dot(2000.0, &t, &[2120.5], 120.0));
    }

    #[test]
    fn infinite_separation_is_pure_interval_test() {
        let t = truth(&[(100.0, 120.0)]);
        assert!(is_good_red_dot(95.0, &t, &[], f64::INFINITY));
        assert!(!is_good_red_dot(95.0, &truth(&[]), &[], 1.0));
    }

    #[test]
    fn chat_precision_ratios() {
        let t = truth(&[(0.0, 10.0), (500.0, 520.0)]);
        let hit = WindowBounds { start_s: 5.0, end_s: 30.0 };
        let miss = WindowBounds { start_s: 200.0, end_s: 225.0 };
        let mut w = vec![hit; 8];
        w.extend([miss; 2]);
        assert_eq!(chat_precision_at_k(&w, &t, 10).unwrap(), 0.8);
        assert_eq!(chat_precision_at_k(&[hit; 10], &t, 10).unwrap(), 1.0);
        assert_eq!(chat_precision_at_k(&[miss; 10], &t, 10).unwrap(), 0.0);
        assert_eq!(chat_precision_at_k(&[hit; 3], &t, 10).unwrap(), 0.3);
        assert!(matches!(chat_precision_at_k(&w, &t, 0), Err(Error::ZeroK)));
    }

    #[test]
    fn start_precision() {
        let t = truth(&[(100.0, 120.0)]);
        assert_eq!(video_precision_start(&[90.0, 120.0, 110.0], &t, 3).unwrap(), 1.0);
        assert_eq!(video_precision_start(&[89.9, 120.1, 20.0], &t, 3).unwrap(), 0.0);
        assert_eq!(video_precision_start(&[90.0, 130.0], &t, 2).unwrap(), 0.5);
    }

    #[test]
    fn end_precision() {
        let t = truth(&[(100.0, 120.0)]);
        assert_eq!(video_precision_end(&[130.0], &t, 1).unwrap(), 1.0);
        assert_eq!(video_precision_end(&[130.01], &t, 1).unwrap(), 0.0);
        assert_eq!(video_precision_end(&[125.0], &truth(&[]), 1).unwrap(), 0.0);
    }
}
