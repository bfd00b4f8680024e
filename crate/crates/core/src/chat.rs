//! Chat log ingestion and candidate sliding windows.
//!
//! A chat log is line-delimited JSON. Each message line carries `t`
//! (seconds from video start), `user` and `text`. An optional header line
//! `{"video_id": ..., "length_s": ...}` declares the video; without it the
//! length is taken from the last message. Blank lines and lines starting
//! with `#` are skipped.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::span::{GroundTruth, HighlightSpan};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatMessage {
    #[serde(rename = "t")]
    pub timestamp_s: f64,
    pub user: String,
    #[serde(default)]
    pub text: String,
}

impl ChatMessage {
    pub fn new(timestamp_s: f64, user: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            timestamp_s,
            user: user.into(),
            text: text.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoMeta {
    pub video_id: String,
    pub length_s: f64,
}

impl VideoMeta {
    pub fn new(video_id: impl Into<String>, length_s: f64) -> Result<Self> {
        if !(length_s.is_finite() && length_s > 0.0) {
            return Err(Error::Config(format!("video length must be positive, got {length_s}")));
        }
        Ok(Self {
            video_id: video_id.into(),
            length_s,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChatLog {
    pub meta: VideoMeta,
    pub messages: Vec<ChatMessage>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Record {
    Message(ChatMessage),
    Header(VideoMeta),
}

/// Parses a chat log. `default_id` names the video when the log has no
/// header line. Messages come back sorted by timestamp (stable).
pub fn parse_chat_log<R: Read>(mut reader: R, default_id: &str) -> Result<ChatLog> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;

    let mut header: Option<(usize, VideoMeta)> = None;
    let mut messages: Vec<(usize, ChatMessage)> = Vec::new();

    for (idx, raw) in bytes.split(|&b| b == b'\n').enumerate() {
        let line_no = idx + 1;
        let line = String::from_utf8_lossy(raw);
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let record: Record = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        match record {
            Record::Message(m) => {
                if !m.timestamp_s.is_finite() || m.timestamp_s < 0.0 {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("timestamp {} is negative or not finite", m.timestamp_s),
                    });
                }
                messages.push((line_no, m));
            }
            Record::Header(meta) => {
                if header.is_some() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "duplicate video header".into(),
                    });
                }
                if !(meta.length_s.is_finite() && meta.length_s > 0.0) {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("video length must be positive, got {}", meta.length_s),
                    });
                }
                header = Some((line_no, meta));
            }
        }
    }

    let meta = match header {
        Some((_, meta)) => {
            if let Some((line, m)) = messages.iter().find(|(_, m)| m.timestamp_s > meta.length_s) {
                return Err(Error::Parse {
                    line: *line,
                    message: format!(
                        "timestamp {} exceeds video length {}",
                        m.timestamp_s, meta.length_s
                    ),
                });
            }
            meta
        }
        None => {
            let last = messages.iter().map(|(_, m)| m.timestamp_s).fold(0.0, f64::max);
            VideoMeta {
                video_id: default_id.to_string(),
                length_s: last.ceil().max(1.0),
            }
        }
    };

    let mut messages: Vec<ChatMessage> = messages.into_iter().map(|(_, m)| m).collect();
    messages.sort_by(|a, b| a.timestamp_s.total_cmp(&b.timestamp_s));
    Ok(ChatLog { meta, messages })
}

/// Writes a log that [`parse_chat_log`] reads back to the same value.
pub fn write_chat_log<W: Write>(mut writer: W, log: &ChatLog) -> Result<()> {
    serde_json::to_writer(&mut writer, &log.meta)?;
    writer.write_all(b"\n")?;
    for m in &log.messages {
        serde_json::to_writer(&mut writer, m)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn parse_labels<R: Read>(reader: R) -> Result<GroundTruth> {
    #[derive(Deserialize)]
    struct Labels {
        video_id: String,
        highlights: Vec<HighlightSpan>,
    }
    let labels: Labels = serde_json::from_reader(reader)?;
    for h in &labels.highlights {
        HighlightSpan::new(h.start_s, h.end_s)?;
    }
    GroundTruth::new(labels.video_id, labels.highlights)
}

pub fn write_labels<W: Write>(writer: W, truth: &GroundTruth) -> Result<()> {
    serde_json::to_writer_pretty(writer, truth)?;
    Ok(())
}

/// Bounds of a window, detached from its messages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowBounds {
    pub start_s: f64,
    pub end_s: f64,
}

/// A half-open `[start_s, end_s)` slice of the chat stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub start_s: f64,
    pub end_s: f64,
    pub messages: Vec<ChatMessage>,
}

impl Window {
    pub fn message_count(&self) -> usize {
        self.messages.len()
    }

    pub fn bounds(&self) -> WindowBounds {
        WindowBounds {
            start_s: self.start_s,
            end_s: self.end_s,
        }
    }

    pub fn overlaps(&self, other: &Window) -> bool {
        self.start_s < other.end_s && other.start_s < self.end_s
    }
}

/// Candidate starts are spaced this many windows per window length.
pub const STRIDES_PER_WINDOW: f64 = 5.0;

/// Builds pairwise non-overlapping windows of width `l`.
///
/// Candidates start every `l / 5` seconds from 0. Whenever two candidates
/// overlap, the one with more messages wins, ties going to the earlier
/// start. The result is ordered by start.
pub fn build_windows(messages: &[ChatMessage], l: f64) -> Result<Vec<Window>> {
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::Config(format!("window length must be positive, got {l}")));
    }
    let Some(last) = messages.last() else {
        return Ok(Vec::new());
    };
    let stride = l / STRIDES_PER_WINDOW;
    let n_candidates = (last.timestamp_s / stride).floor() as usize + 1;

    // (start, lo, hi) index range into `messages`
    let mut candidates: Vec<(f64, usize, usize)> = (0..n_candidates)
        .filter_map(|i| {
            let start = i as f64 * stride;
            let lo = messages.partition_point(|m| m.timestamp_s < start);
            let hi = messages.partition_point(|m| m.timestamp_s < start + l);
            (hi > lo).then_some((start, lo, hi))
        })
        .collect();
    candidates.sort_by(|a, b| (b.2 - b.1).cmp(&(a.2 - a.1)).then(a.0.total_cmp(&b.0)));

    // All windows share width `l`, so two overlap iff their starts differ by < l.
    let mut kept: Vec<(f64, usize, usize)> = Vec::new();
    for cand in candidates {
        let pos = kept.partition_point(|k| k.0 < cand.0);
        let clash_left = pos > 0 && cand.0 - kept[pos - 1].0 < l;
        let clash_right = pos < kept.len() && kept[pos].0 - cand.0 < l;
        if !clash_left && !clash_right {
            kept.insert(pos, cand);
        }
    }

    Ok(kept
        .into_iter()
        .map(|(start, lo, hi)| Window {
            start_s: start,
            end_s: start + l,
            messages: messages[lo..hi].to_vec(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn msgs(ts: &[f64]) -> Vec<ChatMessage> {
        ts.iter().map(|&t| ChatMessage::new(t, "u", "gg")).collect()
    }

    #[test]
    fn parse_sorts_by_timestamp() {
        let input = br#"{"t": 5.0, "user": "a", "text": "x"}
{"t": 2.0, "user": "b", "text": "y"}
{"t": 9.0, "user": "c", "text": "z"}
"#;
        let log = parse_chat_log(&input[..], "v").unwrap();
        let ts: Vec<f64> = log.messages.iter().map(|m| m.timestamp_s).collect();
        assert_eq!(ts, vec![2.0, 5.0, 9.0]);
        assert_eq!(log.meta.video_id, "v");
        assert_eq!(log.meta.length_s, 9.0);
    }

    #[test]
    fn empty_file_is_empty_log() {
        let log = parse_chat_log(&b""[..], "v").unwrap();
        assert!(log.messages.is_empty());
    }

    #[test]
    fn negative_timestamp_names_line() {
        let input = b"# comment\n{\"t\": 1, \"user\": \"a\", \"text\": \"\"}\n{\"t\": -3, \"user\": \"a\", \"text\": \"\"}\n";
        match parse_chat_log(&input[..], "v") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn timestamp_past_declared_length_is_rejected() {
        let input = b"{\"video_id\": \"v\", \"length_s\": 10}\n{\"t\": 11, \"user\": \"a\", \"text\": \"\"}\n";
        assert!(matches!(
            parse_chat_log(&input[..], "x"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn malformed_line_is_an_error() {
        let input = b"{\"t\": 1, \"user\": \"a\"}\nnot json\n";
        assert!(matches!(parse_chat_log(&input[..], "x"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn invalid_utf8_is_replaced() {
        let mut input = b"{\"t\": 1, \"user\": \"a\", \"text\": \"ok ".to_vec();
        input.extend_from_slice(&[0xff, 0xfe]);
        input.extend_from_slice(b"\"}\n");
        let log = parse_chat_log(&input[..], "x").unwrap();
        assert!(log.messages[0].text.contains('\u{FFFD}'));
    }

    #[test]
    fn labels_parse() {
        let input = br#"{"video_id": "v1", "highlights": [{"start_s": 50, "end_s": 60}, {"start_s": 10, "end_s": 20}]}"#;
        let truth = parse_labels(&input[..]).unwrap();
        assert_eq!(truth.highlights[0].start_s, 10.0);
        let bad = br#"{"video_id": "v1", "highlights": [{"start_s": 50, "end_s": 40}]}"#;
        assert!(parse_labels(&bad[..]).is_err());
    }

    /// Brute force: every candidate, then repeatedly take the best remaining
    /// one (count desc, start asc) and discard everything it overlaps.
    fn brute_force_windows(messages: &[ChatMessage], l: f64) -> Vec<(f64, usize)> {
        let stride = l / 5.0;
        let last = messages.last().map(|m| m.timestamp_s).unwrap_or(-1.0);
        let mut pool: Vec<(f64, usize)> = Vec::new();
        let mut i = 0;
        while (i as f64) * stride <= last {
            let s = i as f64 * stride;
            let c = messages
                .iter()
                .filter(|m| m.timestamp_s >= s && m.timestamp_s < s + l)
                .count();
            if c > 0 {
                pool.push((s, c));
            }
            i += 1;
        }
        let mut out = Vec::new();
        while !pool.is_empty() {
            let best = *pool
                .iter()
                .max_by(|a, b| a.1.cmp(&b.1).then(b.0.total_cmp(&a.0)))
                .unwrap();
            out.push(best);
            pool.retain(|c| !(c.0 < best.0 + l && best.0 < c.0 + l));
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }

    #[test]
    fn cluster_yields_single_window() {
        let m = msgs(&[100.0, 101.0, 103.0, 105.0, 107.0, 110.0]);
        let w = build_windows(&m, 25.0).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].message_count(), 6);
        let expected = brute_force_windows(&m, 25.0);
        assert_eq!(expected, vec![(w[0].start_s, 6)]);
        // [90, 115) is the earliest candidate that holds all six
        assert_eq!(w[0].start_s, 90.0);
    }

    #[test]
    fn no_messages_no_windows() {
        assert!(build_windows(&[], 25.0).unwrap().is_empty());
    }

    #[test]
    fn equal_count_overlap_keeps_earlier() {
        // [0,25) and [5,30) both hold exactly the messages at 6 and 20
        let m = msgs(&[6.0, 20.0]);
        let w = build_windows(&m, 25.0).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].start_s, 0.0);
        assert_eq!(brute_force_windows(&m, 25.0), vec![(0.0, 2)]);
    }

    #[test]
    fn message_at_end_belongs_to_next_window() {
        let m = msgs(&[0.0, 25.0]);
        let w = build_windows(&m, 25.0).unwrap();
        let got: Vec<(f64, usize)> = w.iter().map(|w| (w.start_s, w.message_count())).collect();
        assert_eq!(got, vec![(0.0, 1), (25.0, 1)]);
    }

    #[test]
    fn bad_length_is_config_error() {
        assert!(matches!(build_windows(&msgs(&[1.0]), 0.0), Err(Error::Config(_))));
        assert!(matches!(build_windows(&msgs(&[1.0]), -4.0), Err(Error::Config(_))));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn windows_match_brute_force(mut ts in proptest::collection::vec(0.0f64..600.0, 0..80)) {
                ts.sort_by(f64::total_cmp);
                let m = msgs(&ts);
                let w = build_windows(&m, 25.0).unwrap();
                let got: Vec<(f64, usize)> = w.iter().map(|w| (w.start_s, w.message_count())).collect();
                prop_assert_eq!(got, brute_force_windows(&m, 25.0));
                for pair in w.windows(2) {
                    prop_assert!(pair[0].end_s <= pair[1].start_s);
                }
                for win in &w {
                    prop_assert!((win.end_s - win.start_s - 25.0).abs() < 1e-9);
                    prop_assert!(win.messages.iter().all(|m| m.timestamp_s >= win.start_s && m.timestamp_s < win.end_s));
                }
            }

            #[test]
            fn chat_log_round_trips(ts in proptest::collection::vec(0.0f64..1000.0, 0..30),
                                    text in "[a-z !]{0,12}") {
                let mut messages: Vec<ChatMessage> = ts.iter().enumerate()
                    .map(|(i, &t)| ChatMessage::new(t, format!("u{i}"), text.clone())).collect();
                messages.sort_by(|a, b| a.timestamp_s.total_cmp(&b.timestamp_s));
                let log = ChatLog { meta: VideoMeta::new("v", 1000.0).unwrap(), messages };
                let mut buf = Vec::new();
                write_chat_log(&mut buf, &log).unwrap();
                let back = parse_chat_log(&buf[..], "other").unwrap();
                prop_assert_eq!(back, log);
            }
        }
    }
}
