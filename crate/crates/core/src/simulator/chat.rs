use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal, Poisson};

use super::SimConfig;
use crate::chat::{ChatLog, ChatMessage, VideoMeta};
use crate::error::Result;
use crate::span::{GroundTruth, HighlightSpan};

/// Standard deviation of burst message times around the burst peak.
pub const BURST_SPREAD_S: f64 = 3.0;
/// Seconds of elevated chat a burst is worth.
pub const BURST_WINDOW_S: f64 = 12.0;
const SURGE_WINDOW_S: f64 = 20.0;
const EDGE_MARGIN_S: f64 = 60.0;
const MIN_GAP_S: f64 = 160.0;

const SMALL_TALK: &[&str] = &[
    "does anyone know what time the next stream starts tomorrow",
    "i think the jungle route was a bit slow this game honestly",
    "has anyone tried the new patch balance changes for support heroes",
    "my internet keeps dropping every few minutes this is annoying",
    "what keyboard is the streamer using it sounds really clicky",
    "we should talk about the draft phase because that decided everything",
    "the music in the background is actually pretty good who made it",
    "i remember when this team won the regional qualifiers last year",
    "is this ranked or just a casual match with friends tonight",
    "can someone explain why they bought that item so early",
    "the caster yesterday said the meta is shifting toward late game",
    "i have work in the morning but one more game seems fine",
    "the chat is really quiet today compared to the weekend stream",
    "how long has the streamer been playing this role anyway",
    "that build order looks strange but maybe it works at high rank",
    "greetings from brazil watching this at three in the morning",
    "the mid lane matchup looks even but their support roams a lot",
    "anybody else think the ward placement has been too passive",
    "i bought the battle pass yesterday and the rewards are mediocre",
    "remember to hydrate everyone long session ahead of us tonight",
];

const HYPE: &[&str] = &[
    "pog", "pogchamp", "omg", "wow", "gg", "lul", "insane", "what a play", "pog pog", "holy",
    "omg omg", "clip it", "wtf", "huge",
];

fn small_talk(rng: &mut ChaCha8Rng) -> String {
    let phrase = SMALL_TALK.choose(rng).copied().unwrap_or_default();
    let mut tokens: Vec<&str> = phrase.split_whitespace().collect();
    tokens.shuffle(rng);
    let keep = rng.random_range(5..=tokens.len().max(5)).min(tokens.len());
    tokens.truncate(keep);
    tokens.join(" ")
}

fn hype(rng: &mut ChaCha8Rng) -> String {
    HYPE.choose(rng).copied().unwrap_or("pog").to_string()
}

/// Spreads `n` non-overlapping highlights over the video, one per equal
/// slot, at least `MIN_GAP_S` apart.
pub fn plant_highlights(seed: u64, n: usize, video_length_s: f64, len_range: (f64, f64)) -> Vec<HighlightSpan> {
    if n == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let usable = (video_length_s - 2.0 * EDGE_MARGIN_S).max(0.0);
    let slot = usable / n as f64;
    (0..n)
        .map(|i| {
            let len = rng.random_range(len_range.0..=len_range.1).min(slot.max(1.0));
            let slack = (slot - len - MIN_GAP_S).max(0.0);
            let start = EDGE_MARGIN_S + i as f64 * slot + rng.random_range(0.0..=slack);
            HighlightSpan {
                start_s: start,
                end_s: start + len,
            }
        })
        .collect()
}

/// Generates a chat log and its labels. Background chat arrives as a
/// Poisson process of long, varied messages; each planted highlight adds a
/// burst of short exclamations peaking about `burst_delay_mean_s` after it
/// starts; off-topic surges add clusters of long messages.
pub fn simulate_chat(cfg: &SimConfig) -> Result<(ChatLog, GroundTruth)> {
    cfg.validate()?;
    let truth = GroundTruth::new(cfg.video_id.clone(), cfg.highlights.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let length = cfg.video_length_s;
    let per_s = cfg.chat_rate_per_min / 60.0;
    let mut messages = Vec::new();

    if per_s > 0.0 {
        let gap = Exp::new(per_s).expect("positive rate");
        let mut t = gap.sample(&mut rng);
        while t < length {
            let user = format!("viewer{}", rng.random_range(0..400));
            messages.push(ChatMessage::new(t, user, small_talk(&mut rng)));
            t += gap.sample(&mut rng);
        }
    }

    let delay = Normal::new(cfg.burst_delay_mean_s, cfg.burst_delay_sd_s.max(0.0)).expect("finite delay");
    let spread = Normal::new(0.0, BURST_SPREAD_S).expect("finite spread");
    let clamp = |t: f64| t.clamp(0.0, length);
    let burst_mean = (cfg.burst_multiplier - 1.0) * per_s * BURST_WINDOW_S;
    for h in &truth.highlights {
        let peak = h.start_s + delay.sample(&mut rng);
        let n = poisson(&mut rng, burst_mean);
        for _ in 0..n {
            let t = clamp(peak + spread.sample(&mut rng));
            let user = format!("fan{}", rng.random_range(0..400));
            messages.push(ChatMessage::new(t, user, hype(&mut rng)));
        }
    }

    let surge_mean = (cfg.chatter_multiplier - 1.0) * per_s * SURGE_WINDOW_S;
    for _ in 0..cfg.chatter_surges {
        let mut center = None;
        for _ in 0..100 {
            let c = rng.random_range(EDGE_MARGIN_S..(length - EDGE_MARGIN_S).max(EDGE_MARGIN_S + 1.0));
            let far = truth
                .highlights
                .iter()
                .all(|h| c < h.start_s - 150.0 || c > h.end_s + 150.0);
            if far {
                center = Some(c);
                break;
            }
        }
        let Some(center) = center else { continue };
        for _ in 0..poisson(&mut rng, surge_mean) {
            let t = clamp(center + rng.random_range(-SURGE_WINDOW_S / 2.0..SURGE_WINDOW_S / 2.0));
            let user = format!("viewer{}", rng.random_range(0..400));
            messages.push(ChatMessage::new(t, user, small_talk(&mut rng)));
        }
    }

    messages.sort_by(|a, b| a.timestamp_s.total_cmp(&b.timestamp_s));
    let meta = VideoMeta::new(cfg.video_id.clone(), length)?;
    Ok((ChatLog { meta, messages }, truth))
}

fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|p| p.sample(rng) as u64).unwrap_or(0)
}
