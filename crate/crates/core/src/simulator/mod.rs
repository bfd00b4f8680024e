//! Seeded generators for chat logs with planted highlight bursts and for
//! viewer interactions around red dots.

mod chat;
mod experiments;
mod plays;

pub use chat::{plant_highlights, simulate_chat, BURST_SPREAD_S, BURST_WINDOW_S};
pub use experiments::{classifier_dataset, converge, planted_dot, Convergence};
pub use plays::{
    dot_target, simulate_plays, type1_start_offset, type2_start_offset, PlaySimulator, LEAD_IN_S, LOOK_BACK_S,
    TYPE1_OFFSET_RANGE, TYPE2_START_MEAN_S,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::span::HighlightSpan;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    pub video_id: String,
    pub video_length_s: f64,
    pub highlights: Vec<HighlightSpan>,
    /// Background chat rate, messages per minute.
    pub chat_rate_per_min: f64,
    /// Chat rate during a highlight burst, as a multiple of the background.
    pub burst_multiplier: f64,
    /// Mean seconds between a highlight's start and its chat peak.
    pub burst_delay_mean_s: f64,
    pub burst_delay_sd_s: f64,
    /// Off-topic discussion surges of long messages, unrelated to highlights.
    pub chatter_surges: usize,
    pub chatter_multiplier: f64,
    /// Viewer sessions generated per red dot and round.
    pub viewers: usize,
    /// Share of sessions that add a short checking play.
    pub noise_play_fraction: f64,
    pub type2_start_sd_s: f64,
    pub type2_end_sd_s: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            video_id: "sim-0".into(),
            video_length_s: 3600.0,
            highlights: Vec::new(),
            chat_rate_per_min: 25.0,
            burst_multiplier: 10.0,
            burst_delay_mean_s: 20.0,
            burst_delay_sd_s: 1.5,
            chatter_surges: 4,
            chatter_multiplier: 4.0,
            viewers: 10,
            noise_play_fraction: 0.2,
            type2_start_sd_s: 5.0,
            type2_end_sd_s: 3.0,
        }
    }
}

/// Highlight lengths drawn by [`SimConfig::planted`].
pub const PLANTED_LEN_RANGE_S: (f64, f64) = (10.0, 30.0);

impl SimConfig {
    /// A config with `n` highlights planted at random, seeded by `seed`.
    pub fn planted(seed: u64, n: usize) -> Self {
        let mut cfg = Self {
            seed,
            video_id: format!("sim-{seed}"),
            ..Self::default()
        };
        cfg.highlights = plant_highlights(seed, n, cfg.video_length_s, PLANTED_LEN_RANGE_S);
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.video_length_s > 0.0) {
            return Err(Error::Config("video length must be positive".into()));
        }
        if self.chat_rate_per_min < 0.0 || self.burst_multiplier < 1.0 || self.chatter_multiplier < 1.0 {
            return Err(Error::Config("rates must be non-negative and multipliers at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.noise_play_fraction) {
            return Err(Error::Config("noise_play_fraction must be in [0, 1]".into()));
        }
        for h in &self.highlights {
            if h.start_s < 0.0 || h.end_s > self.video_length_s || h.start_s >= h.end_s {
                return Err(Error::Config(format!(
                    "highlight [{}, {}] outside video [0, {}]",
                    h.start_s, h.end_s, self.video_length_s
                )));
            }
        }
        Ok(())
    }
}
