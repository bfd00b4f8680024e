//! A directory of simulated or labelled videos:
//! `<id>.chat.jsonl`, `<id>.labels.json` and optionally `<id>.events.jsonl`.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use lightor_core::extractor::InteractionEvent;
use lightor_core::{parse_chat_log, parse_labels, write_chat_log, write_labels, ChatLog, GroundTruth};

const CHAT_SUFFIX: &str = ".chat.jsonl";

pub struct Corpus {
    dir: PathBuf,
}

impl Corpus {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn create(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Video ids with a chat log, sorted.
    pub fn ids(&self) -> Result<Vec<String>> {
        let mut ids: Vec<String> = fs::read_dir(&self.dir)
            .with_context(|| format!("reading corpus {}", self.dir.display()))?
            .filter_map(|e| e.ok())
            .filter_map(|e| e.file_name().to_str().and_then(|n| n.strip_suffix(CHAT_SUFFIX)).map(str::to_string))
            .collect();
        ids.sort();
        Ok(ids)
    }

    pub fn chat_path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}{CHAT_SUFFIX}"))
    }

    pub fn labels_path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.labels.json"))
    }

    pub fn events_path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.events.jsonl"))
    }

    pub fn chat(&self, id: &str) -> Result<ChatLog> {
        let path = self.chat_path(id);
        let f = File::open(&path).with_context(|| format!("opening {}", path.display()))?;
        parse_chat_log(BufReader::new(f), id).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn labels(&self, id: &str) -> Result<GroundTruth> {
        let path = self.labels_path(id);
        let f = File::open(&path).with_context(|| format!("opening {}", path.display()))?;
        parse_labels(BufReader::new(f)).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn events(&self, id: &str) -> Result<Vec<InteractionEvent>> {
        let path = self.events_path(id);
        let f = File::open(&path).with_context(|| format!("opening {}", path.display()))?;
        let mut events = Vec::new();
        for (i, line) in BufReader::new(f).lines().enumerate() {
            let line = line?;
            if !line.trim().is_empty() {
                events.push(serde_json::from_str(&line).with_context(|| format!("{}:{}", path.display(), i + 1))?);
            }
        }
        Ok(events)
    }

    pub fn write(&self, log: &ChatLog, truth: &GroundTruth, events: &[InteractionEvent]) -> Result<()> {
        let id = &log.meta.video_id;
        write_chat_log(BufWriter::new(File::create(self.chat_path(id))?), log)?;
        write_labels(BufWriter::new(File::create(self.labels_path(id))?), truth)?;
        let mut w = BufWriter::new(File::create(self.events_path(id))?);
        for e in events {
            serde_json::to_writer(&mut w, e)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }
}
