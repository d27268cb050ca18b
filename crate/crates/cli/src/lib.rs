//! Command-line front end of the autodecompose toolkit.
//!
//! Holds everything that touches the file system: WAV ingestion, the ADSPEC1
//! spectrogram and ADCKPT1 checkpoint formats, CSV manifests and reports,
//! layered JSON configuration, and the subcommands of the `autodecompose`
//! binary. All computation lives in [`autodecompose_core`].

pub mod config;
pub mod error;
pub mod formats;
pub mod manifest;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use autodecompose_core::augment::{AugmentConfig, ContentViewDraw, SourceViewDraw};
use autodecompose_core::dsp::{self, DspConfig};
use autodecompose_core::model::{Autodecompose, AutodecomposeConfig, EpochLog, Pooling, Which};
use autodecompose_core::probe::{decomposition_report, Encoder, ProbeConfig};
use autodecompose_core::synth::{self, CorpusConfig, TheoremConfig};
use autodecompose_core::RngStream;

pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "autodecompose", version, about = "Self-supervised source/content decomposition of audio")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed; overrides the configuration's seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Configuration override `dotted.key=value` (repeatable, applied last).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Turn WAV files into 64x80 log-mel chunk files.
    Preprocess {
        /// A directory of .wav files, or a CSV manifest with a `wav_path` column.
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Write both augmented views of chunk files, with the drawn parameters.
    Augment {
        /// ADSPEC1 chunk files.
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Generate a labelled synthetic corpus.
    SynthGen {
        #[command(flatten)]
        common: Common,
    },
    /// Train a model on the chunks of a manifest.
    Train {
        /// Manifest CSV with a `chunk_path` column.
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Continue unlabelled training of a checkpoint on new chunks.
    Finetune {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Write encoder embeddings of the chunks of a manifest.
    Embed {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_enum, default_value = "source")]
        which: WhichArg,
        #[arg(long, value_enum, default_value = "mean")]
        pooling: PoolingArg,
        #[command(flatten)]
        common: Common,
    },
    /// Linear-probe both encoders on a labelled manifest.
    Probe {
        #[arg(long)]
        checkpoint: PathBuf,
        /// Manifest with `chunk_path`, `source_id` and `content_id` columns.
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Generate the synthetic corpus, train, probe, and check the decomposition.
    TheoremCheck {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum WhichArg {
    Source,
    Content,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PoolingArg {
    None,
    Mean,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AugmentRunConfig {
    pub seed: u64,
    pub augment: AugmentConfig,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthGenConfig {
    pub corpus: CorpusConfig,
    pub dsp: DspConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FinetuneConfig {
    pub epochs: u64,
}

impl Default for FinetuneConfig {
    fn default() -> Self {
        Self { epochs: 50 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TheoremRunConfig {
    pub dsp: DspConfig,
    #[serde(flatten)]
    pub theorem: TheoremConfig,
}

/// Run one parsed command line.
pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Preprocess { input, common } => cmd_preprocess(&input, &common),
        Command::Augment { input, common } => cmd_augment(&input, &common),
        Command::SynthGen { common } => cmd_synth_gen(&common),
        Command::Train { corpus, common } => cmd_train(&corpus, &common),
        Command::Finetune {
            checkpoint,
            corpus,
            common,
        } => cmd_finetune(&checkpoint, &corpus, &common),
        Command::Embed {
            checkpoint,
            corpus,
            which,
            pooling,
            common,
        } => cmd_embed(&checkpoint, &corpus, which, pooling, &common),
        Command::Probe {
            checkpoint,
            corpus,
            common,
        } => cmd_probe(&checkpoint, &corpus, &common),
        Command::TheoremCheck { common } => cmd_theorem_check(&common),
    }
}

fn resolve<T: Serialize + serde::de::DeserializeOwned + Default>(
    common: &Common,
    seed_paths: &[&str],
) -> CliResult<(T, Value)> {
    config::resolve(common.config.as_deref(), common.seed, seed_paths, &common.set)
}

fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Record the effective configuration and file lists of a run.
fn write_run_manifest(
    out: &Path,
    subcommand: &str,
    config: Value,
    inputs: Value,
    outputs: Value,
) -> CliResult<()> {
    let doc = json!({
        "tool": "autodecompose",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": subcommand,
        "config": config,
        "inputs": inputs,
        "outputs": outputs,
    });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Runtime(e.to_string()))?;
    formats::write_file(&out.join("manifest.json"), text.as_bytes())
}

fn rel(path: &Path, base: &Path) -> String {
    path.strip_prefix(base).unwrap_or(path).to_string_lossy().into_owned()
}

fn wav_inputs(input: &Path) -> CliResult<Vec<PathBuf>> {
    if input.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(input)
            .map_err(|e| CliError::io(input, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.extension()
                    .and_then(|x| x.to_str())
                    .is_some_and(|x| x.eq_ignore_ascii_case("wav"))
            })
            .collect();
        files.sort();
        Ok(files)
    } else {
        manifest::Manifest::read(input)?.paths("wav_path")
    }
}

pub fn cmd_preprocess(input: &Path, common: &Common) -> CliResult<()> {
    let (cfg, effective): (DspConfig, Value) = resolve(common, &[])?;
    cfg.validate()?;
    let files = wav_inputs(input)?;
    if files.is_empty() {
        return Err(CliError::Runtime(format!("no WAV files found in {}", input.display())));
    }
    let out = &common.out;
    create_dir(out)?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for file in &files {
        let chunks = formats::read_wav(file).and_then(|a| Ok(dsp::preprocess(&a, &cfg)?));
        match chunks {
            Ok(chunks) if chunks.is_empty() => {
                failures.push(format!("{}: shorter than one 1.024 s chunk", file.display()))
            }
            Ok(chunks) => {
                let stem = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                for (i, c) in chunks.iter().enumerate() {
                    let name = format!("{stem}_{i:04}.adspec");
                    formats::write_chunk(&out.join(&name), c)?;
                    rows.push([name, file.display().to_string(), i.to_string()]);
                }
            }
            Err(e) => failures.push(e.to_string()),
        }
    }
    for f in &failures {
        eprintln!("skipped {f}");
    }
    manifest::write_csv(&out.join("chunks.csv"), &["chunk_path", "source_file", "chunk_index"], rows.clone())?;
    write_run_manifest(
        out,
        "preprocess",
        effective,
        json!({ "input": input, "files": files }),
        json!({ "manifest": "chunks.csv", "chunks": rows.len(), "failures": failures }),
    )?;
    if rows.is_empty() {
        return Err(CliError::Runtime(format!("all {} input files failed", files.len())));
    }
    Ok(())
}

pub fn cmd_augment(inputs: &[PathBuf], common: &Common) -> CliResult<()> {
    let (cfg, effective): (AugmentRunConfig, Value) = resolve(common, &["seed"])?;
    cfg.augment.validate()?;
    let floor = DspConfig::default().floor();
    let out = &common.out;
    create_dir(out)?;
    let root = RngStream::new(cfg.seed);
    let mut written = Vec::new();
    for (i, path) in inputs.iter().enumerate() {
        let chunk = formats::read_chunk(path, floor)?;
        let mut rng = root.split(i as u64);
        let sv = SourceViewDraw::draw(&mut rng, &cfg.augment);
        let cv = ContentViewDraw::draw(&mut rng, &cfg.augment);
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let (a, c) = (format!("{stem}.source_view.adspec"), format!("{stem}.content_view.adspec"));
        formats::write_chunk(&out.join(&a), &sv.apply(&chunk))?;
        formats::write_chunk(&out.join(&c), &cv.apply(&chunk))?;
        let sidecar = json!({
            "input": path,
            "seed": cfg.seed,
            "stream_key": i,
            "source_view": { "file": a, "draw": sv },
            "content_view": { "file": c, "draw": cv },
        });
        let text = serde_json::to_string_pretty(&sidecar).map_err(|e| CliError::Runtime(e.to_string()))?;
        formats::write_file(&out.join(format!("{stem}.augment.json")), text.as_bytes())?;
        written.push(json!([a, c]));
    }
    write_run_manifest(out, "augment", effective, json!(inputs), json!(written))
}

pub fn cmd_synth_gen(common: &Common) -> CliResult<()> {
    let (cfg, effective): (SynthGenConfig, Value) = resolve(common, &["corpus.seed"])?;
    let corpus = synth::make_corpus(&cfg.corpus, &cfg.dsp)?;
    let out = &common.out;
    create_dir(out)?;
    let mut rows = Vec::with_capacity(corpus.items.len());
    for (i, item) in corpus.items.iter().enumerate() {
        let name = format!("chunk_{i:05}.adspec");
        formats::write_chunk(&out.join(&name), &item.chunk)?;
        rows.push([name, item.source_id.to_string(), item.content_id.to_string(), item.seed.to_string()]);
    }
    manifest::write_csv(&out.join("corpus.csv"), &["chunk_path", "source_id", "content_id", "seed"], rows)?;
    let truth = json!({ "sources": corpus.sources, "scripts": corpus.scripts });
    let text = serde_json::to_string_pretty(&truth).map_err(|e| CliError::Runtime(e.to_string()))?;
    formats::write_file(&out.join("ground_truth.json"), text.as_bytes())?;
    write_run_manifest(
        out,
        "synth-gen",
        effective,
        json!(null),
        json!({ "manifest": "corpus.csv", "ground_truth": "ground_truth.json", "chunks": corpus.items.len() }),
    )
}

/// (epoch, wall-clock seconds since the start of the run).
type EpochTiming = Vec<(u64, f64)>;

/// Train `model` for `epochs`, logging each epoch to stderr; returns the loss
/// log and per-epoch wall-clock seconds since the start.
fn train_logged(
    model: &mut Autodecompose,
    chunks: &[dsp::MelChunk],
    epochs: u64,
) -> CliResult<(Vec<EpochLog>, EpochTiming)> {
    let start = Instant::now();
    let mut timing = Vec::new();
    let log = model.fit_with(chunks, epochs, |e| {
        let t = start.elapsed().as_secs_f64();
        eprintln!("epoch {:>4}  loss {:.5}  {:.1}s", e.epoch, e.mean_loss, t);
        timing.push((e.epoch, t));
    })?;
    Ok((log, timing))
}

fn write_training_outputs(
    out: &Path,
    model: &Autodecompose,
    log: &[EpochLog],
    timing: &[(u64, f64)],
) -> CliResult<()> {
    formats::save_checkpoint(&out.join("checkpoint.adckpt"), model)?;
    manifest::write_loss_csv(&out.join("loss.csv"), log)?;
    manifest::write_timing_csv(&out.join("timing.csv"), timing)
}

pub fn cmd_train(corpus: &Path, common: &Common) -> CliResult<()> {
    let (cfg, effective): (AutodecomposeConfig, Value) = resolve(common, &["seed"])?;
    let m = manifest::Manifest::read(corpus)?;
    let chunks = m.chunks(DspConfig::default().floor())?;
    let mut model = Autodecompose::build(cfg.clone())?;
    let out = &common.out;
    create_dir(out)?;
    let (log, timing) = train_logged(&mut model, &chunks, cfg.epochs)?;
    write_training_outputs(out, &model, &log, &timing)?;
    write_run_manifest(
        out,
        "train",
        effective,
        json!({ "corpus": corpus, "chunks": chunks.len() }),
        json!({ "checkpoint": "checkpoint.adckpt", "loss": "loss.csv", "timing": "timing.csv" }),
    )
}

pub fn cmd_finetune(checkpoint: &Path, corpus: &Path, common: &Common) -> CliResult<()> {
    if common.seed.is_some() {
        return Err(CliError::Config(
            "finetune continues the checkpoint's own random streams; --seed is not accepted".into(),
        ));
    }
    let (cfg, effective): (FinetuneConfig, Value) = resolve(common, &[])?;
    let mut model = formats::load_checkpoint(checkpoint)?;
    let chunks = manifest::Manifest::read(corpus)?.chunks(DspConfig::default().floor())?;
    let out = &common.out;
    create_dir(out)?;
    let (log, timing) = train_logged(&mut model, &chunks, cfg.epochs)?;
    write_training_outputs(out, &model, &log, &timing)?;
    write_run_manifest(
        out,
        "finetune",
        json!({ "finetune": effective, "model": model.config() }),
        json!({ "checkpoint": checkpoint, "corpus": corpus, "chunks": chunks.len() }),
        json!({ "checkpoint": "checkpoint.adckpt", "loss": "loss.csv", "timing": "timing.csv" }),
    )
}

pub fn cmd_embed(
    checkpoint: &Path,
    corpus: &Path,
    which: WhichArg,
    pooling: PoolingArg,
    common: &Common,
) -> CliResult<()> {
    let model = formats::load_checkpoint(checkpoint)?;
    let m = manifest::Manifest::read(corpus)?;
    let names = m.paths("chunk_path")?;
    let chunks = m.chunks(DspConfig::default().floor())?;
    let which = match which {
        WhichArg::Source => Which::Source,
        WhichArg::Content => Which::Content,
    };
    let pooling = match pooling {
        PoolingArg::None => Pooling::None,
        PoolingArg::Mean => Pooling::Mean,
    };
    let e = model.embed(&chunks, which, pooling)?;
    let out = &common.out;
    create_dir(out)?;
    let mut headers = vec!["chunk_path".to_owned(), "frame".to_owned()];
    headers.extend((0..e.dim).map(|j| format!("e{j}")));
    let header_refs: Vec<&str> = headers.iter().map(String::as_str).collect();
    let base = corpus.parent().unwrap_or(Path::new(""));
    let rows = (0..e.n_rows()).map(|r| {
        let chunk = r / e.rows_per_chunk;
        let frame = if e.rows_per_chunk == 1 { "mean".to_owned() } else { (r % e.rows_per_chunk).to_string() };
        let mut row = vec![rel(&names[chunk], base), frame];
        row.extend(e.row(r).iter().map(|v| format!("{v:.7e}")));
        row
    });
    manifest::write_csv(&out.join("embeddings.csv"), &header_refs, rows)?;
    write_run_manifest(
        out,
        "embed",
        json!({ "which": which, "pooling": pooling }),
        json!({ "checkpoint": checkpoint, "corpus": corpus }),
        json!({ "embeddings": "embeddings.csv" }),
    )
}

pub fn cmd_probe(checkpoint: &Path, corpus: &Path, common: &Common) -> CliResult<()> {
    let (cfg, effective): (ProbeConfig, Value) = resolve(common, &["seed"])?;
    cfg.logreg.validate()?;
    let m = manifest::Manifest::read(corpus)?;
    let labeled = m.labeled_corpus(DspConfig::default().floor())?;
    let model = formats::load_checkpoint(checkpoint)?;
    let report = decomposition_report(&model, &labeled, &cfg)?;
    let out = &common.out;
    create_dir(out)?;
    manifest::write_report_csv(&out.join("report.csv"), &report.rows)?;
    for (enc, coords) in &report.pca {
        manifest::write_pca_csv(&out.join(pca_name(*enc)), coords, &labeled.source_labels)?;
    }
    write_run_manifest(
        out,
        "probe",
        effective,
        json!({ "checkpoint": checkpoint, "corpus": corpus }),
        json!({ "report": "report.csv", "pca": [pca_name(Encoder::Source), pca_name(Encoder::Content)], "f1_average": "macro" }),
    )
}

fn pca_name(e: Encoder) -> String {
    format!("pca_{}.csv", e.name())
}

pub fn cmd_theorem_check(common: &Common) -> CliResult<()> {
    let (cfg, effective): (TheoremRunConfig, Value) = resolve(common, &["model.seed"])?;
    let out = &common.out;
    create_dir(out)?;
    let corpus = synth::make_corpus(&cfg.theorem.corpus, &cfg.dsp)?;
    let start = Instant::now();
    let mut timing = Vec::new();
    let outcome = synth::theorem_check(&cfg.theorem, &corpus, |e| {
        let t = start.elapsed().as_secs_f64();
        eprintln!("epoch {:>4}  loss {:.5}  {:.1}s", e.epoch, e.mean_loss, t);
        timing.push((e.epoch, t));
    })?;
    write_training_outputs(out, &outcome.model, &outcome.log, &timing)?;
    manifest::write_report_csv(&out.join("report.csv"), &outcome.report.rows)?;
    let labels = corpus.source_labels();
    for (enc, coords) in &outcome.report.pca {
        manifest::write_pca_csv(&out.join(pca_name(*enc)), coords, &labels)?;
    }
    for c in &outcome.checks {
        eprintln!(
            "{} {} = {:.3} (bound {} {:.3})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.relation,
            c.bound
        );
    }
    let passed = outcome.passed();
    let text = serde_json::to_string_pretty(&json!({ "passed": passed, "checks": outcome.checks }))
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    formats::write_file(&out.join("checks.json"), text.as_bytes())?;
    write_run_manifest(
        out,
        "theorem-check",
        effective,
        json!(null),
        json!({ "report": "report.csv", "checks": "checks.json", "checkpoint": "checkpoint.adckpt", "loss": "loss.csv" }),
    )?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Failed("decomposition inequalities do not all hold".into()))
    }
}
