//! Precision metrics and comparison baselines.

mod baselines;
mod metrics;

pub use baselines::{baseline_moocer, baseline_peak, baseline_socialskip, SOCIALSKIP_HALF_WIDTH_S};
pub use metrics::{
    chat_precision_at_k, in_end_tolerance, in_start_tolerance, is_good_red_dot, video_precision_end,
    video_precision_start, PrecisionReport, TOLERANCE_S,
};
