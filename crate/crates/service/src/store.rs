//! File-backed video store.
//!
//! Layout, one directory per video under the data root:
//!
//! ```text
//! <root>/<video_id>/chat.jsonl     chat log as registered
//! <root>/<video_id>/model.json     model the video was initialized with
//! <root>/<video_id>/events.jsonl   append-only interaction log
//! <root>/<video_id>/state.json     red dots and consumed log offsets
//! ```
//!
//! Events are fsynced before a batch is acknowledged. State snapshots are
//! written to a temporary file and renamed into place.

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use lightor_core::extractor::{derived_play_count, refine, EventKind, ExtractorConfig, InteractionEvent, RefineOutcome, RefineReport};
use lightor_core::{initialize, write_chat_log, ChatLog, HighlightSpan, ModelFile, RedDot, RedDotState, VideoMeta};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("video {0} not found")]
    NotFound(String),
    #[error("video {0} already registered")]
    Conflict(String),
    #[error("{message}")]
    Invalid {
        message: String,
        diagnostics: Vec<Diagnostic>,
    },
    #[error("no model available: {0}")]
    MissingModel(String),
    #[error(transparent)]
    Core(#[from] lightor_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl StoreError {
    fn invalid(message: impl Into<String>) -> Self {
        Self::Invalid {
            message: message.into(),
            diagnostics: Vec::new(),
        }
    }
}

pub type Result<T> = std::result::Result<T, StoreError>;

/// Why one record of a batch was rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub index: usize,
    pub message: String,
}

/// The persisted state of one video.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoRecord {
    pub meta: VideoMeta,
    pub chat_ingested: bool,
    pub red_dots: Vec<RedDot>,
    /// Per red dot, how many entries of the event log earlier iterations
    /// have used. Only later events feed the next iteration.
    #[serde(default)]
    pub consumed: BTreeMap<u32, usize>,
}

/// What `GET /videos/{id}/reddots` returns per dot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedDotView {
    pub red_dot_id: u32,
    pub position_s: f64,
    pub state: RedDotState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<HighlightSpan>,
}

impl From<&RedDot> for RedDotView {
    fn from(d: &RedDot) -> Self {
        Self {
            red_dot_id: d.id,
            position_s: d.position_s,
            state: d.state,
            span: d.span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineResponse {
    pub video_id: String,
    pub reports: Vec<RefineReport>,
}

type DedupKey = (String, i64, EventKind);

struct Video {
    dir: PathBuf,
    record: VideoRecord,
    model: ModelFile,
    events: Vec<InteractionEvent>,
    seen: HashSet<DedupKey>,
    log: File,
}

pub struct Store {
    root: PathBuf,
    default_model: Option<ModelFile>,
    extractor: ExtractorConfig,
    videos: RwLock<BTreeMap<String, Arc<Mutex<Video>>>>,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && !id.starts_with('.')
        && id.len() <= 128
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

fn dedup_key(e: &InteractionEvent) -> DedupKey {
    (e.user.clone(), e.wall_time, e.kind)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    let mut f = File::create(&tmp)?;
    f.write_all(bytes)?;
    f.sync_all()?;
    fs::rename(&tmp, path)?;
    if let Some(dir) = path.parent() {
        File::open(dir)?.sync_all()?;
    }
    Ok(())
}

/// Reads an event log, dropping an unterminated trailing line left by a
/// crash mid-append.
fn read_events(path: &Path) -> Result<Vec<InteractionEvent>> {
    let bytes = fs::read(path)?;
    let complete = match bytes.iter().rposition(|&b| b == b'\n') {
        Some(i) => i + 1,
        None => 0,
    };
    if complete < bytes.len() {
        log::warn!("{}: dropping {} bytes of partial record", path.display(), bytes.len() - complete);
        OpenOptions::new().write(true).open(path)?.set_len(complete as u64)?;
    }
    let mut events = Vec::new();
    for line in BufReader::new(&bytes[..complete]).lines() {
        let line = line?;
        if !line.trim().is_empty() {
            events.push(serde_json::from_str(&line)?);
        }
    }
    Ok(events)
}

impl Video {
    fn load(dir: PathBuf) -> Result<Self> {
        let record: VideoRecord = serde_json::from_slice(&fs::read(dir.join("state.json"))?)?;
        let model = ModelFile::load(&dir.join("model.json"))?;
        let log_path = dir.join("events.jsonl");
        let events = read_events(&log_path)?;
        let seen = events.iter().map(dedup_key).collect();
        let log = OpenOptions::new().append(true).open(&log_path)?;
        Ok(Self {
            dir,
            record,
            model,
            events,
            seen,
            log,
        })
    }

    fn save_state(&self) -> Result<()> {
        write_atomic(&self.dir.join("state.json"), &serde_json::to_vec_pretty(&self.record)?)
    }

    fn append(&mut self, batch: Vec<InteractionEvent>) -> Result<usize> {
        let meta = &self.record.meta;
        let ids: HashSet<u32> = self.record.red_dots.iter().map(|d| d.id).collect();
        let diagnostics: Vec<Diagnostic> = batch
            .iter()
            .enumerate()
            .filter_map(|(index, e)| {
                let problem = e
                    .validate(Some(meta.length_s))
                    .err()
                    .or_else(|| (!ids.contains(&e.red_dot_id)).then(|| format!("unknown red_dot_id {}", e.red_dot_id)))
                    .or_else(|| {
                        (!e.video_id.is_empty() && e.video_id != meta.video_id)
                            .then(|| format!("video_id {} does not match {}", e.video_id, meta.video_id))
                    });
                problem.map(|message| Diagnostic { index, message })
            })
            .collect();
        if !diagnostics.is_empty() {
            return Err(StoreError::Invalid {
                message: format!("{} of {} events rejected", diagnostics.len(), batch.len()),
                diagnostics,
            });
        }

        let mut fresh = Vec::new();
        let mut buf = Vec::new();
        for mut e in batch {
            if self.seen.insert(dedup_key(&e)) {
                e.video_id = meta.video_id.clone();
                serde_json::to_writer(&mut buf, &e)?;
                buf.push(b'\n');
                fresh.push(e);
            }
        }
        if fresh.is_empty() {
            return Ok(0);
        }
        let written = self.log.write_all(&buf).and_then(|_| self.log.sync_data());
        if let Err(err) = written {
            for e in &fresh {
                self.seen.remove(&dedup_key(e));
            }
            return Err(err.into());
        }
        let n = fresh.len();
        self.events.extend(fresh);
        Ok(n)
    }

    fn refine(&mut self, cfg: &ExtractorConfig) -> Result<Vec<RefineReport>> {
        let classifier = self
            .model
            .type_classifier
            .ok_or_else(|| StoreError::MissingModel("model has no type classifier".into()))?;
        let end = self.events.len();
        let mut reports = Vec::new();
        let mut changed = false;
        for dot in &mut self.record.red_dots {
            if dot.state == RedDotState::Converged || dot.iterations() >= cfg.max_iterations {
                continue;
            }
            let from = self.record.consumed.get(&dot.id).copied().unwrap_or(0);
            let batch: Vec<InteractionEvent> = self.events[from..end]
                .iter()
                .filter(|e| e.red_dot_id == dot.id)
                .cloned()
                .collect();
            if derived_play_count(&batch) < cfg.min_plays {
                continue;
            }
            let step = refine(dot, &batch, cfg, &classifier);
            if !matches!(step.report.outcome, RefineOutcome::Deferred(_)) {
                let mut next = step.dot;
                next.position_s = next.position_s.clamp(0.0, self.record.meta.length_s);
                *dot = next;
                self.record.consumed.insert(dot.id, end);
                changed = true;
            }
            reports.push(step.report);
        }
        if changed {
            self.save_state()?;
        }
        Ok(reports)
    }
}

impl Store {
    /// Opens (creating if needed) the store at `root` and loads every video
    /// found there.
    pub fn open(root: impl Into<PathBuf>, default_model: Option<ModelFile>, extractor: ExtractorConfig) -> Result<Self> {
        let root = root.into();
        extractor.validate()?;
        fs::create_dir_all(&root)?;
        let mut videos = BTreeMap::new();
        for entry in fs::read_dir(&root)? {
            let entry = entry?;
            let name = entry.file_name().to_string_lossy().into_owned();
            if !entry.file_type()?.is_dir() || !valid_id(&name) {
                continue;
            }
            if !entry.path().join("state.json").exists() {
                log::warn!("skipping {}: no state.json", entry.path().display());
                continue;
            }
            videos.insert(name, Arc::new(Mutex::new(Video::load(entry.path())?)));
        }
        log::info!("opened store at {} with {} videos", root.display(), videos.len());
        Ok(Self {
            root,
            default_model,
            extractor,
            videos: RwLock::new(videos),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn video_ids(&self) -> Vec<String> {
        self.videos.read().expect("store lock").keys().cloned().collect()
    }

    fn video(&self, id: &str) -> Result<Arc<Mutex<Video>>> {
        self.videos
            .read()
            .expect("store lock")
            .get(id)
            .cloned()
            .ok_or_else(|| StoreError::NotFound(id.to_string()))
    }

    /// Runs the initializer on `chat` and persists the new video.
    pub fn register(&self, video_id: &str, mut chat: ChatLog, model: Option<ModelFile>) -> Result<VideoRecord> {
        if !valid_id(video_id) {
            return Err(StoreError::invalid(format!("invalid video id {video_id:?}")));
        }
        let model = model
            .or_else(|| self.default_model.clone())
            .ok_or_else(|| StoreError::MissingModel("pass model_path or start the service with a model".into()))?;
        chat.meta.video_id = video_id.to_string();
        let dots = initialize(&chat.meta, &chat.messages, &model.initializer)?;
        let record = VideoRecord {
            meta: chat.meta.clone(),
            chat_ingested: true,
            red_dots: dots,
            consumed: BTreeMap::new(),
        };

        let mut videos = self.videos.write().expect("store lock");
        let dir = self.root.join(video_id);
        if videos.contains_key(video_id) || dir.exists() {
            return Err(StoreError::Conflict(video_id.to_string()));
        }
        let staging = self.root.join(format!(".{video_id}.new"));
        if staging.exists() {
            fs::remove_dir_all(&staging)?;
        }
        fs::create_dir_all(&staging)?;
        let mut chat_file = File::create(staging.join("chat.jsonl"))?;
        write_chat_log(&mut chat_file, &chat)?;
        chat_file.sync_all()?;
        write_atomic(&staging.join("model.json"), &serde_json::to_vec_pretty(&model)?)?;
        File::create(staging.join("events.jsonl"))?.sync_all()?;
        write_atomic(&staging.join("state.json"), &serde_json::to_vec_pretty(&record)?)?;
        fs::rename(&staging, &dir)?;
        File::open(&self.root)?.sync_all()?;

        videos.insert(video_id.to_string(), Arc::new(Mutex::new(Video::load(dir)?)));
        log::info!("registered {video_id} with {} red dots", record.red_dots.len());
        Ok(record)
    }

    pub fn record(&self, id: &str) -> Result<VideoRecord> {
        Ok(self.video(id)?.lock().expect("video lock").record.clone())
    }

    pub fn red_dots(&self, id: &str) -> Result<Vec<RedDotView>> {
        Ok(self.record(id)?.red_dots.iter().map(RedDotView::from).collect())
    }

    /// Events logged for a video, in append order.
    pub fn events(&self, id: &str) -> Result<Vec<InteractionEvent>> {
        Ok(self.video(id)?.lock().expect("video lock").events.clone())
    }

    /// Validates and appends a batch; returns how many events were new.
    /// Either every record is valid and the batch is logged, or nothing is.
    pub fn append(&self, id: &str, batch: Vec<InteractionEvent>) -> Result<usize> {
        self.video(id)?.lock().expect("video lock").append(batch)
    }

    /// One extractor iteration for every dot with a quorum of fresh plays.
    pub fn refine(&self, id: &str) -> Result<RefineResponse> {
        let reports = self.video(id)?.lock().expect("video lock").refine(&self.extractor)?;
        Ok(RefineResponse {
            video_id: id.to_string(),
            reports,
        })
    }

    pub fn refine_all(&self) -> Vec<(String, Result<RefineResponse>)> {
        self.video_ids()
            .into_iter()
            .map(|id| {
                let out = self.refine(&id);
                (id, out)
            })
            .collect()
    }
}
