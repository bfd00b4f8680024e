use crate::chat::Window;
use crate::error::{Error, Result};
use crate::histogram::{bin_of, BinnedSeries};

/// Per-second message counts across the window's bins.
pub fn message_counts(w: &Window) -> BinnedSeries {
    let first = (w.start_s + 0.5).floor() as i64;
    let last = (w.end_s + 0.5).ceil() as i64 - 1;
    let mut series = BinnedSeries::zeros(first, last);
    for m in &w.messages {
        series.add(bin_of(m.timestamp_s), 1.0);
    }
    series
}

pub fn message_rate(w: &Window) -> BinnedSeries {
    message_counts(w).smoothed()
}

/// Time at which the smoothed message rate in `w` is highest, as the centre
/// of the winning one-second bin. Smoothing turns a one-bin spike into a
/// flat top, so equal smoothed values are ranked by raw count and then by
/// earliest bin.
pub fn find_peak(w: &Window) -> Result<f64> {
    if w.messages.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let raw = message_counts(w);
    let rate = raw.smoothed();
    let mut best = 0;
    for i in 1..rate.values.len() {
        let (s, r) = (rate.values[i], raw.values[i]);
        let (bs, br) = (rate.values[best], raw.values[best]);
        if s > bs || (s == bs && r > br) {
            best = i;
        }
    }
    Ok(rate.bin_at(best) as f64)
}
