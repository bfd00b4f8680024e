//! Library behind the `lightor` binary.

pub mod client;
pub mod corpus;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lightor_core::evaluation::{in_end_tolerance, in_start_tolerance, PrecisionReport};
use lightor_core::extractor::{accuracy, ExtractorConfig, TypeClassifier};
use lightor_core::initializer::{
    train_initializer, AdjustmentTieBreak, TrainingVideo, DEFAULT_DELTA_SEP_S, DEFAULT_K, DEFAULT_WINDOW_S,
};
use lightor_core::simulator::{classifier_dataset, simulate_chat, PlaySimulator, SimConfig};
use lightor_core::{initialize, GroundTruth, ModelFile, RedDot, RedDotState};
use lightor_service::{RegisterRequest, ServeConfig, VideoRecord};
use serde::Serialize;

use client::Client;
use corpus::Corpus;

#[derive(Debug, Parser)]
#[command(name = "lightor", version, about = "Highlight red dots from chat bursts and viewer plays")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a labelled corpus of chat logs and viewer events.
    Simulate(SimulateArgs),
    /// Fit the initializer and the type classifier.
    Train(TrainArgs),
    /// Place red dots on one chat log.
    Init(InitArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
    /// Register chat logs with a running service.
    Register(RegisterArgs),
    /// Drive simulated viewers against a running service.
    Crowd(CrowdArgs),
    /// Score the service's red dots against corpus labels.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 50)]
    pub videos: usize,
    #[arg(long, default_value_t = 10)]
    pub highlights: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Mean seconds from highlight start to chat peak.
    #[arg(long, default_value_t = 20.0)]
    pub delay: f64,
    #[arg(long, default_value_t = 10.0)]
    pub multiplier: f64,
    /// Viewer sessions in the event log per labelled highlight.
    #[arg(long, default_value_t = 10)]
    pub viewers: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TieBreak {
    NearestFit,
    Smallest,
}

impl From<TieBreak> for AdjustmentTieBreak {
    fn from(t: TieBreak) -> Self {
        match t {
            TieBreak::NearestFit => AdjustmentTieBreak::NearestFit,
            TieBreak::Smallest => AdjustmentTieBreak::Smallest,
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Train on the first N videos of the corpus, by id.
    #[arg(long, default_value_t = 1)]
    pub train_videos: usize,
    #[arg(long, default_value_t = DEFAULT_WINDOW_S)]
    pub window: f64,
    #[arg(long, default_value_t = DEFAULT_DELTA_SEP_S)]
    pub delta_sep: f64,
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = TieBreak::NearestFit)]
    pub tie_break: TieBreak,
    /// Simulated red dots for the type classifier; 0 skips it.
    #[arg(long, default_value_t = 500)]
    pub classifier_dots: usize,
    #[arg(long, default_value_t = 1)]
    pub classifier_seed: u64,
}

#[derive(Debug, Args)]
pub struct InitArgs {
    #[arg(long)]
    pub chat: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    /// Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "LIGHTOR_DATA_DIR", default_value = "lightor-data")]
    pub data_dir: PathBuf,
    #[arg(long, env = "LIGHTOR_LISTEN", default_value = "127.0.0.1:8080")]
    pub listen: SocketAddr,
    /// Model for videos registered without one.
    #[arg(long, env = "LIGHTOR_MODEL")]
    pub model: Option<PathBuf>,
    /// Also refine every video on this period.
    #[arg(long, env = "LIGHTOR_REFINE_INTERVAL_S")]
    pub refine_interval_s: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RegisterArgs {
    #[arg(long, default_value = "http://127.0.0.1:8080")]
    pub server: String,
    /// Register every video in this corpus.
    #[arg(long, conflicts_with = "chat")]
    pub corpus: Option<PathBuf>,
    /// Skip the first N corpus videos, e.g. those used for training.
    #[arg(long, default_value_t = 0)]
    pub skip: usize,
    /// Register a single chat log.
    #[arg(long)]
    pub chat: Option<PathBuf>,
    #[arg(long)]
    pub video_id: Option<String>,
    #[arg(long)]
    pub model: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CrowdArgs {
    #[arg(long, default_value = "http://127.0.0.1:8080")]
    pub server: String,
    /// Corpus whose labels steer the simulated viewers.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Videos to drive; defaults to every corpus video the service knows.
    #[arg(long)]
    pub video: Vec<String>,
    #[arg(long, default_value_t = 10)]
    pub rounds: usize,
    #[arg(long, default_value_t = 10)]
    pub viewers: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, default_value = "http://127.0.0.1:8080")]
    pub server: String,
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub video: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: usize,
    /// JSON lines per video plus the average; defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Average precision for every k from 1 to `--k`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(a) => simulate(&a),
        Command::Train(a) => train(&a),
        Command::Init(a) => init(&a),
        Command::Serve(a) => serve(a),
        Command::Register(a) => register(&a),
        Command::Crowd(a) => crowd(&a),
        Command::Eval(a) => eval(&a),
    }
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn simulate(a: &SimulateArgs) -> Result<()> {
    let corpus = Corpus::create(&a.out)?;
    for i in 0..a.videos {
        let seed = a.seed.wrapping_add(i as u64);
        let mut cfg = SimConfig::planted(seed, a.highlights);
        cfg.video_id = format!("sim-{seed:04}");
        cfg.burst_delay_mean_s = a.delay;
        cfg.burst_multiplier = a.multiplier;
        cfg.viewers = a.viewers;
        let (log, truth) = simulate_chat(&cfg)?;
        let mut players = PlaySimulator::new(seed, &cfg);
        let events: Vec<_> = truth
            .highlights
            .iter()
            .enumerate()
            .flat_map(|(j, h)| players.round(j as u32, h.start_s, &truth, cfg.viewers))
            .collect();
        corpus.write(&log, &truth, &events)?;
    }
    println!("wrote {} videos to {}", a.videos, a.out.display());
    Ok(())
}

pub fn train(a: &TrainArgs) -> Result<()> {
    let corpus = Corpus::new(&a.corpus);
    let ids = corpus.ids()?;
    if ids.len() < a.train_videos || a.train_videos == 0 {
        bail!("need {} training videos, corpus has {}", a.train_videos.max(1), ids.len());
    }
    let data: Vec<_> = ids[..a.train_videos]
        .iter()
        .map(|id| Ok((corpus.chat(id)?, corpus.labels(id)?)))
        .collect::<Result<_>>()?;
    let videos: Vec<TrainingVideo<'_>> = data
        .iter()
        .map(|(log, truth)| TrainingVideo {
            messages: &log.messages,
            truth,
        })
        .collect();
    let initializer = train_initializer(&videos, a.window, a.delta_sep, a.k, a.tie_break.into())?;

    let type_classifier = if a.classifier_dots > 0 {
        let sim = SimConfig::default();
        let cfg = ExtractorConfig::default();
        let train = classifier_dataset(a.classifier_seed, a.classifier_dots, &sim, &cfg)?;
        let held_out = classifier_dataset(a.classifier_seed.wrapping_add(1 << 32), a.classifier_dots, &sim, &cfg)?;
        let clf = TypeClassifier::train(&train)?;
        eprintln!("type classifier held-out accuracy {:.3}", accuracy(&clf, &held_out));
        Some(clf)
    } else {
        None
    };
    let model = ModelFile {
        initializer,
        type_classifier,
    };
    model.save(&a.out)?;
    println!("trained on {} videos, c = {}; wrote {}", a.train_videos, model.initializer.c, a.out.display());
    Ok(())
}

pub fn init(a: &InitArgs) -> Result<()> {
    let model = ModelFile::load(&a.model).with_context(|| format!("loading {}", a.model.display()))?;
    let f = File::open(&a.chat).with_context(|| format!("opening {}", a.chat.display()))?;
    let id = a
        .chat
        .file_name()
        .and_then(|n| n.to_str())
        .map(|n| n.split('.').next().unwrap_or(n).to_string())
        .unwrap_or_default();
    let log = lightor_core::parse_chat_log(io::BufReader::new(f), &id)?;
    let dots = initialize(&log.meta, &log.messages, &model.initializer)?;
    let mut w = output(a.out.as_ref())?;
    serde_json::to_writer_pretty(&mut w, &dots)?;
    writeln!(w)?;
    w.flush()?;
    eprintln!("{}: {} red dots", log.meta.video_id, dots.len());
    Ok(())
}

pub fn serve(a: ServeArgs) -> Result<()> {
    let cfg = ServeConfig {
        data_dir: a.data_dir,
        listen: a.listen,
        model: a.model,
        refine_interval: a.refine_interval_s.filter(|&s| s > 0).map(Duration::from_secs),
        extractor: ExtractorConfig::default(),
    };
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(lightor_service::serve(cfg, |addr| {
        println!("listening on http://{addr}");
        let _ = io::stdout().flush();
    }))?;
    Ok(())
}

pub fn register(a: &RegisterArgs) -> Result<()> {
    let client = Client::new(&a.server);
    let mut jobs = Vec::new();
    match (&a.corpus, &a.chat) {
        (Some(dir), None) => {
            let corpus = Corpus::new(dir);
            for id in corpus.ids()?.into_iter().skip(a.skip) {
                jobs.push((id.clone(), corpus.chat_path(&id)));
            }
        }
        (None, Some(chat)) => {
            let id = a.video_id.clone().context("--video-id is required with --chat")?;
            jobs.push((id, chat.clone()));
        }
        _ => bail!("give --corpus or --chat"),
    }
    for (id, path) in jobs {
        let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        let resp = client.register(&RegisterRequest {
            video_id: id,
            chat_path: None,
            chat_log: Some(text),
            model_path: a.model.as_ref().map(|p| std::path::absolute(p)).transpose()?,
        })?;
        println!("{}: {} red dots", resp.video_id, resp.red_dots.len());
    }
    Ok(())
}

fn corpus_videos(corpus: &Corpus, wanted: &[String], client: &Client) -> Result<Vec<String>> {
    if !wanted.is_empty() {
        return Ok(wanted.to_vec());
    }
    Ok(corpus
        .ids()?
        .into_iter()
        .filter(|id| client.red_dots(id).is_ok())
        .collect())
}

#[derive(Debug, Serialize)]
struct CrowdSummary<'a> {
    video_id: &'a str,
    rounds: usize,
    events: usize,
    dots: usize,
    converged: usize,
}

pub fn crowd(a: &CrowdArgs) -> Result<()> {
    let client = Client::new(&a.server);
    let corpus = Corpus::new(&a.corpus);
    let sim = SimConfig::default();
    for (n, id) in corpus_videos(&corpus, &a.video, &client)?.iter().enumerate() {
        let truth = corpus.labels(id)?;
        let mut players = PlaySimulator::new(a.seed.wrapping_add(n as u64), &sim);
        let mut rounds = 0;
        let mut events = 0;
        for _ in 0..a.rounds {
            let open: Vec<_> = client
                .red_dots(id)?
                .into_iter()
                .filter(|d| d.state != RedDotState::Converged)
                .collect();
            if open.is_empty() {
                break;
            }
            let batch: Vec<_> = open
                .iter()
                .flat_map(|d| players.round(d.red_dot_id, d.position_s, &truth, a.viewers))
                .collect();
            events += client.post_events(id, &batch)?;
            client.refine(id)?;
            rounds += 1;
        }
        let dots = client.red_dots(id)?;
        let summary = CrowdSummary {
            video_id: id,
            rounds,
            events,
            dots: dots.len(),
            converged: dots.iter().filter(|d| d.state == RedDotState::Converged).count(),
        };
        println!("{}", serde_json::to_string(&summary)?);
    }
    Ok(())
}

/// Scores for one video.
#[derive(Debug, Clone, Serialize, serde::Deserialize)]
pub struct VideoEval {
    pub video_id: String,
    #[serde(flatten)]
    pub precision: PrecisionReport,
    pub dots: usize,
    /// Share of dots that converged.
    pub converged: f64,
    /// Share of dots whose start and end both pass the interval tests
    /// for one highlight.
    pub span_accuracy: f64,
}

fn share(n: usize, of: usize) -> f64 {
    if of == 0 {
        0.0
    } else {
        n as f64 / of as f64
    }
}

fn span_hits(dots: &[RedDot], truth: &GroundTruth) -> usize {
    dots.iter()
        .filter(|d| {
            let (x, y) = (d.start_estimate(), d.end_estimate());
            truth.highlights.iter().any(|h| in_start_tolerance(x, h) && in_end_tolerance(y, h))
        })
        .count()
}

/// Precision at `k` for a video record, ranking dots in selection order.
pub fn score_record(record: &VideoRecord, truth: &GroundTruth, k: usize) -> Result<VideoEval> {
    let mut dots = record.red_dots.clone();
    dots.sort_by_key(|d| d.id);
    let windows: Vec<_> = dots.iter().map(|d| d.source_window).collect();
    let starts: Vec<f64> = dots.iter().map(RedDot::start_estimate).collect();
    let ends: Vec<f64> = dots.iter().map(RedDot::end_estimate).collect();
    Ok(VideoEval {
        video_id: record.meta.video_id.clone(),
        precision: PrecisionReport::compute(&windows, &starts, &ends, truth, k)?,
        dots: dots.len(),
        converged: share(dots.iter().filter(|d| d.state == RedDotState::Converged).count(), dots.len()),
        span_accuracy: share(span_hits(&dots, truth), dots.len()),
    })
}

pub fn eval(a: &EvalArgs) -> Result<()> {
    if a.k == 0 {
        bail!("--k must be at least 1");
    }
    let client = Client::new(&a.server);
    let corpus = Corpus::new(&a.corpus);
    let ids = corpus_videos(&corpus, &a.video, &client)?;
    if ids.is_empty() {
        bail!("no corpus videos are registered with {}", a.server);
    }
    let mut data = Vec::new();
    for id in &ids {
        data.push((client.record(id)?, corpus.labels(id)?));
    }

    let mut w = output(a.out.as_ref())?;
    let mut per_video = Vec::new();
    for (record, truth) in &data {
        let e = score_record(record, truth, a.k)?;
        writeln!(w, "{}", serde_json::to_string(&e)?)?;
        per_video.push(e);
    }
    let n = per_video.len() as f64;
    let reports: Vec<PrecisionReport> = per_video.iter().map(|e| e.precision).collect();
    let average = VideoEval {
        video_id: "average".into(),
        precision: PrecisionReport::mean(&reports).expect("non-empty"),
        dots: per_video.iter().map(|e| e.dots).sum(),
        converged: per_video.iter().map(|e| e.converged * e.dots as f64).sum::<f64>()
            / per_video.iter().map(|e| e.dots).sum::<usize>().max(1) as f64,
        span_accuracy: per_video.iter().map(|e| e.span_accuracy * e.dots as f64).sum::<f64>()
            / per_video.iter().map(|e| e.dots).sum::<usize>().max(1) as f64,
    };
    writeln!(w, "{}", serde_json::to_string(&average)?)?;
    w.flush()?;
    log::info!("evaluated {n} videos");

    if let Some(path) = &a.csv {
        let mut csv = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
        writeln!(csv, "k,chat_precision,video_precision_start,video_precision_end")?;
        for k in 1..=a.k {
            let reports = data
                .iter()
                .map(|(record, truth)| score_record(record, truth, k).map(|e| e.precision))
                .collect::<Result<Vec<_>>>()?;
            let m = PrecisionReport::mean(&reports).expect("non-empty");
            writeln!(csv, "{k},{},{},{}", m.chat_precision, m.video_precision_start, m.video_precision_end)?;
        }
        csv.flush()?;
    }
    Ok(())
}
