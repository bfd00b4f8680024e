//! Interaction events and the play segments derived from them.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Play,
    Pause,
    Seek,
}

/// One player event as logged by the front end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionEvent {
    pub user: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub video_id: String,
    pub red_dot_id: u32,
    pub kind: EventKind,
    /// Video position when the event fired.
    pub at_s: f64,
    /// Seek target; present exactly for seeks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to_s: Option<f64>,
    /// Epoch milliseconds.
    pub wall_time: i64,
}

impl InteractionEvent {
    pub fn play(user: &str, red_dot_id: u32, at_s: f64, wall_time: i64) -> Self {
        Self::new(user, red_dot_id, EventKind::Play, at_s, None, wall_time)
    }

    pub fn pause(user: &str, red_dot_id: u32, at_s: f64, wall_time: i64) -> Self {
        Self::new(user, red_dot_id, EventKind::Pause, at_s, None, wall_time)
    }

    pub fn seek(user: &str, red_dot_id: u32, at_s: f64, to_s: f64, wall_time: i64) -> Self {
        Self::new(user, red_dot_id, EventKind::Seek, at_s, Some(to_s), wall_time)
    }

    fn new(user: &str, red_dot_id: u32, kind: EventKind, at_s: f64, to_s: Option<f64>, wall_time: i64) -> Self {
        Self {
            user: user.to_string(),
            video_id: String::new(),
            red_dot_id,
            kind,
            at_s,
            to_s,
            wall_time,
        }
    }

    /// Checks the schema invariants; `length_s` bounds positions when known.
    pub fn validate(&self, length_s: Option<f64>) -> std::result::Result<(), String> {
        let in_range = |x: f64| x.is_finite() && x >= 0.0 && length_s.is_none_or(|len| x <= len);
        if self.user.is_empty() {
            return Err("user must not be empty".into());
        }
        if !in_range(self.at_s) {
            return Err(format!("at_s {} out of range", self.at_s));
        }
        match (self.kind, self.to_s) {
            (EventKind::Seek, Some(to)) if !in_range(to) => Err(format!("to_s {to} out of range")),
            (EventKind::Seek, None) => Err("seek requires to_s".into()),
            (EventKind::Play | EventKind::Pause, Some(_)) => Err("to_s is only allowed on seeks".into()),
            _ => Ok(()),
        }
    }
}

/// A contiguous watched interval, `s < e`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Play {
    pub user: String,
    pub s: f64,
    pub e: f64,
}

impl Play {
    pub fn new(user: impl Into<String>, s: f64, e: f64) -> Self {
        Self { user: user.into(), s, e }
    }

    pub fn duration(&self) -> f64 {
        self.e - self.s
    }

    /// Closed-interval intersection; touching endpoints overlap.
    pub fn overlaps(&self, other: &Play) -> bool {
        self.s <= other.e && other.s <= self.e
    }
}

/// Turns one user's session, ordered by wall time, into plays.
///
/// A play event opens a segment; pause closes it. A seek closes the open
/// segment at `at_s` and, if the player was playing, a new one opens at the
/// seek target. A segment still open at session end has no known end and
/// is dropped.
pub fn derive_plays(events: &[InteractionEvent]) -> Result<Vec<Play>> {
    for (i, pair) in events.windows(2).enumerate() {
        if pair[1].wall_time < pair[0].wall_time {
            return Err(Error::NonMonotonicTime { index: i + 1 });
        }
    }

    let mut plays = Vec::new();
    let mut open: Option<f64> = None;
    let mut close = |user: &str, s: f64, e: f64| {
        if e > s {
            plays.push(Play::new(user, s, e));
        }
    };
    for ev in events {
        match ev.kind {
            EventKind::Play => {
                if open.is_none() {
                    open = Some(ev.at_s);
                }
            }
            EventKind::Pause => match open.take() {
                Some(s) => close(&ev.user, s, ev.at_s),
                None => log::debug!("pause at {} by {} without an open play", ev.at_s, ev.user),
            },
            EventKind::Seek => {
                if let Some(s) = open.take() {
                    close(&ev.user, s, ev.at_s);
                    open = ev.to_s;
                }
            }
        }
    }
    Ok(plays)
}

/// Plays from a mixed log: events are grouped into (user, red dot)
/// sessions in first-seen order and each session is sorted by wall time.
pub fn plays_from_log(events: &[InteractionEvent]) -> Vec<Play> {
    let mut order: Vec<(&str, u32)> = Vec::new();
    let mut sessions: HashMap<(&str, u32), Vec<InteractionEvent>> = HashMap::new();
    for ev in events {
        let key = (ev.user.as_str(), ev.red_dot_id);
        sessions
            .entry(key)
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(ev.clone());
    }
    let mut plays = Vec::new();
    for key in order {
        let mut session = sessions.remove(&key).unwrap_or_default();
        session.sort_by_key(|e| e.wall_time);
        plays.extend(derive_plays(&session).expect("session sorted by wall time"));
    }
    plays
}
