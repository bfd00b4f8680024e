use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::SimConfig;
use crate::extractor::{InteractionEvent, TypeLabel};
use crate::span::{GroundTruth, HighlightSpan};

/// Where a viewer searching backwards lands, relative to the highlight start.
pub const TYPE1_OFFSET_RANGE: (f64, f64) = (-40.0, 20.0);
/// Mean lateness of a viewer's start relative to the highlight start when
/// the dot sits ahead of it.
pub const TYPE2_START_MEAN_S: f64 = 7.5;
/// How far ahead of a highlight a dot still leads viewers into it.
pub const LEAD_IN_S: f64 = 60.0;
/// How far past a highlight's end viewers still go looking for it.
pub const LOOK_BACK_S: f64 = 90.0;
const EPOCH_MS: i64 = 1_700_000_000_000;

pub fn type1_start_offset(rng: &mut impl Rng) -> f64 {
    rng.random_range(TYPE1_OFFSET_RANGE.0..TYPE1_OFFSET_RANGE.1)
}

pub fn type2_start_offset(rng: &mut impl Rng, sd: f64) -> f64 {
    Normal::new(TYPE2_START_MEAN_S, sd.max(0.0))
        .expect("finite sd")
        .sample(rng)
}

/// The highlight a dot at `r` points viewers to, and the kind of dot it is.
/// A dot up to `LEAD_IN_S` ahead of a highlight or inside it is Type II; a
/// dot shortly past the end is Type I.
pub fn dot_target(r: f64, truth: &GroundTruth) -> Option<(HighlightSpan, TypeLabel)> {
    if let Some(h) = truth.highlights.iter().find(|h| h.start_s - LEAD_IN_S <= r && r <= h.end_s) {
        return Some((*h, TypeLabel::TypeII));
    }
    truth
        .highlights
        .iter()
        .rev()
        .find(|h| h.end_s < r && r <= h.end_s + LOOK_BACK_S)
        .map(|h| (*h, TypeLabel::TypeI))
}

/// Generates viewer sessions around red dots. Each session gets a fresh
/// user id and the wall clock only moves forward, so event logs from one
/// simulator replay identically for the same seed.
#[derive(Debug, Clone)]
pub struct PlaySimulator {
    rng: ChaCha8Rng,
    seed: u64,
    clock_ms: i64,
    next_user: u64,
    length_s: f64,
    noise_fraction: f64,
    type2_start_sd_s: f64,
    type2_end_sd_s: f64,
}

impl PlaySimulator {
    pub fn new(seed: u64, cfg: &SimConfig) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
            clock_ms: EPOCH_MS,
            next_user: 0,
            length_s: cfg.video_length_s,
            noise_fraction: cfg.noise_play_fraction,
            type2_start_sd_s: cfg.type2_start_sd_s,
            type2_end_sd_s: cfg.type2_end_sd_s,
        }
    }

    /// `viewers` independent sessions on one dot.
    pub fn round(&mut self, red_dot_id: u32, r: f64, truth: &GroundTruth, viewers: usize) -> Vec<InteractionEvent> {
        let target = dot_target(r, truth);
        (0..viewers)
            .flat_map(|_| self.session(red_dot_id, r, target))
            .collect()
    }

    /// One viewer clicking the dot at `r` and watching.
    pub fn session(
        &mut self,
        red_dot_id: u32,
        r: f64,
        target: Option<(HighlightSpan, TypeLabel)>,
    ) -> Vec<InteractionEvent> {
        let user = format!("sim{:x}-{}", self.seed, self.next_user);
        self.next_user += 1;
        let mut s = Session {
            user,
            red_dot_id,
            events: Vec::new(),
            clock_ms: self.clock_ms,
            length_s: self.length_s,
        };

        match target {
            Some((h, TypeLabel::TypeII)) => self.watch_ahead(&mut s, r, h),
            Some((h, TypeLabel::TypeI)) => {
                if self.rng.random_bool(0.35) {
                    self.skip_away(&mut s, r);
                } else {
                    self.search_back(&mut s, r, h);
                }
            }
            None => self.skip_away(&mut s, r),
        }
        if self.rng.random_bool(self.noise_fraction) {
            let at = r + self.rng.random_range(-LEAD_IN_S..LEAD_IN_S);
            let dur = self.rng.random_range(2.0..15.0);
            s.play(at, 0.0);
            s.pause(at + dur, dur);
        }

        self.clock_ms = s.clock_ms + 1000;
        s.events
    }

    fn watch_ahead(&mut self, s: &mut Session, r: f64, h: HighlightSpan) {
        let mut target = h.start_s + type2_start_offset(&mut self.rng, self.type2_start_sd_s);
        for _ in 0..20 {
            if target < h.end_s - 6.0 {
                break;
            }
            target = h.start_s + type2_start_offset(&mut self.rng, self.type2_start_sd_s);
        }
        let target = target.min(h.end_s - 6.0);
        let start = r.max(target);
        s.play(r, 0.0);
        if start > r + 2.0 {
            let peek = self.rng.random_range(0.5..3.0_f64).min(start - r);
            s.seek(r + peek, start, peek);
        }
        let end_noise = Normal::new(0.0, self.type2_end_sd_s.max(0.0)).expect("finite sd");
        let end = (h.end_s + end_noise.sample(&mut self.rng)).max(start + 6.0);
        s.pause(end, end - start);
        if self.rng.random_bool(0.25) {
            let again = (start + self.rng.random_range(-3.0..3.0)).max(r);
            s.seek(end, again, 1.0);
            s.play(again, 1.0);
            let end2 = (end + self.rng.random_range(-3.0..3.0)).max(again + 6.0);
            s.pause(end2, end2 - again);
        }
    }

    fn search_back(&mut self, s: &mut Session, r: f64, h: HighlightSpan) {
        let check = self.rng.random_range(1.0..4.0);
        s.play(r, 0.0);
        let land = (h.start_s + type1_start_offset(&mut self.rng)).max(0.0);
        let watch = self.rng.random_range(5.0..30.0);
        s.seek(r + check, land, check);
        s.pause(land + watch, watch);
    }

    fn skip_away(&mut self, s: &mut Session, r: f64) {
        let check = self.rng.random_range(1.0..4.0);
        s.play(r, 0.0);
        let away = r + self.rng.random_range(90.0..300.0);
        let watch = self.rng.random_range(10.0..40.0);
        s.seek(r + check, away, check);
        s.pause(away + watch, watch);
    }
}

struct Session {
    user: String,
    red_dot_id: u32,
    events: Vec<InteractionEvent>,
    clock_ms: i64,
    length_s: f64,
}

impl Session {
    fn advance(&mut self, seconds: f64) -> i64 {
        self.clock_ms += (seconds.max(0.0) * 1000.0).round() as i64 + 1;
        self.clock_ms
    }

    fn clamp(&self, t: f64) -> f64 {
        t.clamp(0.0, self.length_s)
    }

    fn play(&mut self, at: f64, after: f64) {
        let wall = self.advance(after);
        let at = self.clamp(at);
        self.events.push(InteractionEvent::play(&self.user, self.red_dot_id, at, wall));
    }

    fn pause(&mut self, at: f64, after: f64) {
        let wall = self.advance(after);
        let at = self.clamp(at);
        self.events.push(InteractionEvent::pause(&self.user, self.red_dot_id, at, wall));
    }

    fn seek(&mut self, at: f64, to: f64, after: f64) {
        let wall = self.advance(after);
        let (at, to) = (self.clamp(at), self.clamp(to));
        self.events.push(InteractionEvent::seek(&self.user, self.red_dot_id, at, to, wall));
    }
}

/// One round of `cfg.viewers` sessions on the dot at `r` for the highlight
/// `span`. Viewers act as for a Type I dot when `r` is past the span's end,
/// Type II otherwise, unless `forced` says which.
pub fn simulate_plays(
    cfg: &SimConfig,
    red_dot_id: u32,
    r: f64,
    span: &HighlightSpan,
    forced: Option<TypeLabel>,
) -> Vec<InteractionEvent> {
    let label = forced.unwrap_or(if r > span.end_s { TypeLabel::TypeI } else { TypeLabel::TypeII });
    let mut sim = PlaySimulator::new(cfg.seed, cfg);
    (0..cfg.viewers)
        .flat_map(|_| sim.session(red_dot_id, r, Some((*span, label))))
        .collect()
}
