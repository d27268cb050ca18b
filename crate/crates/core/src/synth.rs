//! Synthetic corpus with known, independent source and content factors.
//!
//! A *source* is a voice: a fundamental frequency, four Gaussian formant bumps
//! and a harmonic rolloff. A *content* is a script of 8 symbols, each lasting
//! 0.128 s; a symbol fixes a pitch multiplier and an amplitude shape. Every
//! utterance is one 1.024 s chunk of additive harmonic synthesis, so a corpus
//! over the full source x content grid has exactly uniform joint labels.
//!
//! Sources are laid out on a geometric ladder with a ratio of 1.10 between
//! neighbours (shuffled, lightly jittered), and a voice's formants scale with
//! its fundamental. Neighbouring voices are thus closer together than the
//! largest frequency stretch of the content-preserving augmentation, which is
//! what makes source identity something that augmentation can hide.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dsp::{self, AudioBuffer, DspConfig, MelChunk};
use crate::model::{Architecture, Autodecompose, AutodecomposeConfig, EpochLog};
use crate::probe::{
    decomposition_report, DecompositionReport, Encoder, LabelKind, LabeledCorpus, ProbeConfig,
};
use crate::{Error, Result, RngStream};

pub const SAMPLE_RATE: u32 = 16_000;
pub const SYMBOLS_PER_SCRIPT: usize = 8;
pub const ALPHABET: usize = 12;
/// Samples per symbol (0.128 s).
pub const SYMBOL_SAMPLES: usize = 2048;
pub const UTTERANCE_SAMPLES: usize = SYMBOLS_PER_SCRIPT * SYMBOL_SAMPLES;
/// Pitch multipliers, indexed by `symbol % 3`.
pub const MULTIPLIERS: [f64; 3] = [0.8, 1.0, 1.25];
pub const F0_RANGE: (f64, f64) = (110.0, 320.0);
/// Ratio between neighbouring voices on the source ladder.
pub const SOURCE_STEP: f64 = 1.10;
/// Minimum ratio between any two voices' fundamentals.
pub const MIN_F0_RATIO: f64 = 1.08;
const BASE_FORMANTS: [f64; 4] = [400.0, 1500.0, 2500.0, 3500.0];
const MAX_HARMONIC_HZ: f64 = 7600.0;
const PEAK: f32 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Formant {
    pub center_hz: f64,
    pub width_hz: f64,
    pub gain: f64,
}

/// A voice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub source_id: usize,
    pub f0: f64,
    pub formants: [Formant; 4],
    /// Harmonic `h` is scaled by `h^-rolloff`.
    pub rolloff: f64,
}

impl SourceSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = self.f0 >= F0_RANGE.0
            && self.f0 <= F0_RANGE.1
            && self.rolloff.is_finite()
            && self
                .formants
                .iter()
                .all(|f| f.gain > 0.0 && f.width_hz > 0.0 && f.center_hz > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "source {} is malformed (f0 {} Hz)",
                self.source_id, self.f0
            )))
        }
    }

    /// Spectral envelope at `hz`: a small floor plus the formant bumps.
    pub fn envelope(&self, hz: f64) -> f64 {
        0.05 + self
            .formants
            .iter()
            .map(|f| {
                let z = (hz - f.center_hz) / f.width_hz;
                f.gain * libm::exp(-0.5 * z * z)
            })
            .sum::<f64>()
    }

    /// Amplitude of harmonic `h` at fundamental `f`.
    pub fn harmonic_amplitude(&self, f: f64, h: usize) -> f64 {
        libm::pow(h as f64, -self.rolloff) * self.envelope(f * h as f64)
    }
}

/// Amplitude shape of a symbol over its 0.128 s.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Flat,
    Rise,
    Fall,
    /// Four on/off segments, starting on.
    Pulse,
}

impl Shape {
    /// Gain at fractional position `t` in [0, 1).
    pub fn gain(self, t: f64) -> f64 {
        match self {
            Shape::Flat => 1.0,
            Shape::Rise => 0.1 + 0.9 * t,
            Shape::Fall => 1.0 - 0.9 * t,
            Shape::Pulse => {
                if (libm::floor(t * 4.0) as i64) % 2 == 0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Pitch multiplier and shape of a symbol in `0..12`.
pub fn symbol_pattern(symbol: u8) -> (f64, Shape) {
    let shape = match symbol / 3 {
        0 => Shape::Flat,
        1 => Shape::Rise,
        2 => Shape::Fall,
        _ => Shape::Pulse,
    };
    (MULTIPLIERS[symbol as usize % 3], shape)
}

/// What is said: 8 symbols with on/off gates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContentScript {
    pub content_id: usize,
    pub symbols: [u8; SYMBOLS_PER_SCRIPT],
    pub gates: [bool; SYMBOLS_PER_SCRIPT],
}

impl ContentScript {
    pub fn validate(&self) -> Result<()> {
        if self.symbols.iter().any(|&s| s as usize >= ALPHABET) {
            return Err(Error::InvalidInput(format!(
                "content {} uses a symbol outside the {ALPHABET}-symbol alphabet",
                self.content_id
            )));
        }
        Ok(())
    }
}

/// Ground truth of one utterance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub source: SourceSpec,
    pub content: ContentScript,
    /// Signal-to-noise ratio of the additive white noise, in dB.
    pub noise_db: f64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        self.source.validate()?;
        self.content.validate()?;
        if !self.noise_db.is_finite() {
            return Err(Error::InvalidInput("noise_db must be finite".into()));
        }
        Ok(())
    }
}

/// Render one 1.024 s utterance at 16 kHz.
///
/// The noise level is set against the RMS of the script rendered with every
/// gate open, so a fully gated script leaves just that noise floor. The result
/// is peak-normalized to 0.9 (a fully gated script uses the gain its ungated
/// rendering would get).
pub fn synth_utterance(spec: &SynthSpec, rng: &mut RngStream) -> Result<AudioBuffer> {
    spec.validate()?;
    let src = &spec.source;
    let fs = SAMPLE_RATE as f64;
    let max_h = 64;
    let phases: Vec<f64> = (0..=max_h)
        .map(|_| rng.uniform_range(0.0, core::f64::consts::TAU))
        .collect();
    let mut open = vec![0.0f64; UTTERANCE_SAMPLES];
    let mut cycle = 0.0f64;
    for (j, &symbol) in spec.content.symbols.iter().enumerate() {
        let (mult, shape) = symbol_pattern(symbol);
        let f = src.f0 * mult;
        let seg = &mut open[j * SYMBOL_SAMPLES..(j + 1) * SYMBOL_SAMPLES];
        for (h, &phase) in phases.iter().enumerate().skip(1) {
            let fh = f * h as f64;
            if fh > MAX_HARMONIC_HZ {
                break;
            }
            let a = src.harmonic_amplitude(f, h);
            let w = core::f64::consts::TAU * fh / fs;
            // Harmonic phases stay locked to a continuous fundamental cycle.
            let p0 = phase + core::f64::consts::TAU * h as f64 * cycle;
            for (n, s) in seg.iter_mut().enumerate() {
                *s += a * libm::sin(w * n as f64 + p0);
            }
        }
        for (n, s) in seg.iter_mut().enumerate() {
            *s *= shape.gain(n as f64 / SYMBOL_SAMPLES as f64);
        }
        cycle = libm::fmod(cycle + f * SYMBOL_SAMPLES as f64 / fs, 1.0);
    }
    let rms = libm::sqrt(open.iter().map(|v| v * v).sum::<f64>() / open.len() as f64);
    let sigma = rms * libm::pow(10.0, -spec.noise_db / 20.0);
    let noise: Vec<f64> = (0..UTTERANCE_SAMPLES).map(|_| sigma * rng.normal()).collect();
    let mut out = open.clone();
    for (j, &gate) in spec.content.gates.iter().enumerate() {
        if !gate {
            out[j * SYMBOL_SAMPLES..(j + 1) * SYMBOL_SAMPLES].fill(0.0);
        }
    }
    let peak_of = |x: &[f64]| {
        x.iter()
            .zip(&noise)
            .map(|(a, b)| (a + b).abs())
            .fold(0.0f64, f64::max)
    };
    let peak = if spec.content.gates.iter().any(|&g| g) {
        peak_of(&out)
    } else {
        peak_of(&open)
    };
    let gain = if peak > 0.0 { PEAK as f64 / peak } else { 0.0 };
    let samples = out
        .iter()
        .zip(&noise)
        .map(|(a, b)| ((a + b) * gain) as f32)
        .collect();
    AudioBuffer::new(samples, SAMPLE_RATE)
}

/// Lay out `k` voices on the source ladder.
pub fn design_sources(k: usize, rng: &mut RngStream) -> Result<Vec<SourceSpec>> {
    if k == 0 {
        return Err(Error::InvalidInput("need at least one source".into()));
    }
    let jitter = 0.004;
    let half_span = libm::pow(SOURCE_STEP, (k as f64 - 1.0) / 2.0) * libm::exp(jitter);
    let (lo, hi) = (F0_RANGE.0 * half_span, F0_RANGE.1 / half_span);
    if lo > hi {
        return Err(Error::InvalidInput(format!(
            "{k} sources {SOURCE_STEP} apart do not fit in {}-{} Hz",
            F0_RANGE.0, F0_RANGE.1
        )));
    }
    // Prefer a mid-range centre when it fits.
    let (clo, chi) = if lo.max(150.0) <= hi.min(230.0) {
        (lo.max(150.0), hi.min(230.0))
    } else {
        (lo, hi)
    };
    let center = rng.uniform_range(clo, chi);
    let mut ratios: Vec<f64> = (0..k)
        .map(|i| {
            let step = (i as f64 - (k as f64 - 1.0) / 2.0) * libm::log(SOURCE_STEP);
            libm::exp(step + rng.uniform_range(-jitter, jitter))
        })
        .collect();
    rng.shuffle(&mut ratios);
    let sources: Vec<SourceSpec> = ratios
        .into_iter()
        .enumerate()
        .map(|(source_id, g)| {
            let mut formants = [Formant {
                center_hz: 0.0,
                width_hz: 0.0,
                gain: 0.0,
            }; 4];
            for (f, base) in formants.iter_mut().zip(BASE_FORMANTS) {
                f.center_hz = base * g * rng.uniform_range(0.99, 1.01);
                f.width_hz = rng.uniform_range(200.0, 300.0) * g;
                f.gain = rng.uniform_range(0.8, 1.0);
            }
            SourceSpec {
                source_id,
                f0: center * g,
                formants,
                rolloff: rng.uniform_range(0.95, 1.05),
            }
        })
        .collect();
    for s in &sources {
        s.validate()?;
    }
    Ok(sources)
}

/// `m` scripts dealt from a shuffled deck holding every symbol equally often
/// (up to one extra copy), all gates open.
pub fn design_scripts(m: usize, rng: &mut RngStream) -> Vec<ContentScript> {
    let total = m * SYMBOLS_PER_SCRIPT;
    let mut deck: Vec<u8> = (0..total).map(|i| (i % ALPHABET) as u8).collect();
    rng.shuffle(&mut deck);
    deck.chunks_exact(SYMBOLS_PER_SCRIPT)
        .enumerate()
        .map(|(content_id, syms)| {
            let mut symbols = [0u8; SYMBOLS_PER_SCRIPT];
            symbols.copy_from_slice(syms);
            ContentScript {
                content_id,
                symbols,
                gates: [true; SYMBOLS_PER_SCRIPT],
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorpusConfig {
    pub n_sources: usize,
    pub n_contents: usize,
    pub per_cell: usize,
    pub seed: u64,
    pub noise_db: f64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            n_sources: 5,
            n_contents: 10,
            per_cell: 4,
            seed: 1,
            noise_db: 30.0,
        }
    }
}

impl CorpusConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_sources < 2 || self.n_contents < 2 || self.per_cell == 0 {
            return Err(Error::Config(
                "corpus needs >= 2 sources, >= 2 contents and >= 1 utterance per cell".into(),
            ));
        }
        if !self.noise_db.is_finite() {
            return Err(Error::Config("noise_db must be finite".into()));
        }
        Ok(())
    }
}

/// One labelled chunk.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusItem {
    pub chunk: MelChunk,
    pub source_id: usize,
    pub content_id: usize,
    /// Seed of the utterance's synthesis stream.
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Corpus {
    pub config: CorpusConfig,
    pub sources: Vec<SourceSpec>,
    pub scripts: Vec<ContentScript>,
    /// Source-major, then content, then repetition.
    pub items: Vec<CorpusItem>,
}

impl Corpus {
    pub fn chunks(&self) -> Vec<MelChunk> {
        self.items.iter().map(|i| i.chunk.clone()).collect()
    }

    pub fn source_labels(&self) -> Vec<usize> {
        self.items.iter().map(|i| i.source_id).collect()
    }

    pub fn content_labels(&self) -> Vec<usize> {
        self.items.iter().map(|i| i.content_id).collect()
    }

    pub fn n_sources(&self) -> usize {
        self.sources.len()
    }

    pub fn n_contents(&self) -> usize {
        self.scripts.len()
    }
}

/// Seed of utterance `index` of a corpus.
pub fn utterance_seed(corpus_seed: u64, index: usize) -> u64 {
    crate::rng::derive_seed(corpus_seed, 0x5e_0000 + index as u64)
}

/// Render the full source x content grid and push every utterance through the
/// front-end.
pub fn make_corpus(cfg: &CorpusConfig, dsp_cfg: &DspConfig) -> Result<Corpus> {
    cfg.validate()?;
    dsp_cfg.validate()?;
    let root = RngStream::new(cfg.seed);
    let sources = design_sources(cfg.n_sources, &mut root.split(1))?;
    let scripts = design_scripts(cfg.n_contents, &mut root.split(2));
    let analyzer = dsp::MelAnalyzer::new(dsp_cfg.clone())?;
    let mut items = Vec::with_capacity(cfg.n_sources * cfg.n_contents * cfg.per_cell);
    for source in &sources {
        for script in &scripts {
            for _ in 0..cfg.per_cell {
                let seed = utterance_seed(cfg.seed, items.len());
                let spec = SynthSpec {
                    source: source.clone(),
                    content: script.clone(),
                    noise_db: cfg.noise_db,
                };
                let audio = synth_utterance(&spec, &mut RngStream::new(seed))?;
                let chunk = utterance_chunk(&audio, dsp_cfg, &analyzer)?;
                items.push(CorpusItem {
                    chunk,
                    source_id: source.source_id,
                    content_id: script.content_id,
                    seed,
                });
            }
        }
    }
    Ok(Corpus {
        config: cfg.clone(),
        sources,
        scripts,
        items,
    })
}

fn utterance_chunk(
    audio: &AudioBuffer,
    cfg: &DspConfig,
    analyzer: &dsp::MelAnalyzer,
) -> Result<MelChunk> {
    let audio = dsp::resample(audio, cfg.target_rate)?;
    let audio = dsp::bandpass(&audio, cfg.band_low, cfg.band_high)?;
    let spec = analyzer.spectrogram(&audio)?;
    dsp::crop_chunks(&spec, cfg.floor())?
        .into_iter()
        .next()
        .ok_or_else(|| Error::Contract("utterance shorter than one chunk".into()))
}

impl Corpus {
    pub fn labeled(&self) -> LabeledCorpus {
        LabeledCorpus {
            chunks: self.chunks(),
            source_labels: self.source_labels(),
            content_labels: self.content_labels(),
            n_sources: self.n_sources(),
            n_contents: self.n_contents(),
        }
    }
}

/// The four inequalities of a successful decomposition, evaluated at one
/// probe budget. Content margins are added to chance (1 / number of contents).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    pub budget_seconds: f64,
    pub source_by_source_min: f64,
    pub source_by_content_max: f64,
    pub content_by_content_margin_min: f64,
    pub content_by_source_margin_max: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            budget_seconds: 10.0 * crate::probe::SECONDS_PER_CHUNK,
            source_by_source_min: 0.90,
            source_by_content_max: 0.60,
            content_by_content_margin_min: 0.25,
            content_by_source_margin_max: 0.15,
        }
    }
}

/// Training epochs of the reference check; the conv preset then finishes in
/// about 12 minutes on one laptop core, with the loss already on its plateau.
pub const THEOREM_EPOCHS: u64 = 80;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TheoremConfig {
    pub corpus: CorpusConfig,
    pub model: AutodecomposeConfig,
    pub probe: ProbeConfig,
    pub thresholds: Thresholds,
}

impl Default for TheoremConfig {
    fn default() -> Self {
        Self {
            corpus: CorpusConfig::default(),
            model: AutodecomposeConfig {
                epochs: THEOREM_EPOCHS,
                ..AutodecomposeConfig::preset(Architecture::Conv)
            },
            probe: ProbeConfig::default(),
            thresholds: Thresholds::default(),
        }
    }
}

/// One evaluated inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// `>=` for lower bounds, `<=` for upper bounds.
    pub relation: String,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: ">=".into(),
            bound,
            pass: value >= bound,
        }
    }

    fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: "<=".into(),
            bound,
            pass: value <= bound,
        }
    }
}

/// Evaluate the decomposition inequalities on a report.
pub fn decomposition_checks(
    report: &DecompositionReport,
    n_contents: usize,
    t: &Thresholds,
) -> Result<Vec<Check>> {
    let get = |e, l| {
        report.f1(e, l, t.budget_seconds).ok_or_else(|| {
            Error::Config(format!("report has no cell at a {} s budget", t.budget_seconds))
        })
    };
    let chance = 1.0 / n_contents as f64;
    Ok(vec![
        Check::at_least(
            "F1(E_s, source)",
            get(Encoder::Source, LabelKind::Source)?,
            t.source_by_source_min,
        ),
        Check::at_most(
            "F1(E_c, source)",
            get(Encoder::Content, LabelKind::Source)?,
            t.source_by_content_max,
        ),
        Check::at_least(
            "F1(E_c, content)",
            get(Encoder::Content, LabelKind::Content)?,
            chance + t.content_by_content_margin_min,
        ),
        Check::at_most(
            "F1(E_s, content)",
            get(Encoder::Source, LabelKind::Content)?,
            chance + t.content_by_source_margin_max,
        ),
    ])
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremOutcome {
    pub log: Vec<EpochLog>,
    pub report: DecompositionReport,
    pub checks: Vec<Check>,
    pub model: Autodecompose,
}

impl TheoremOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Train on the unlabelled chunks of `corpus`, probe, and check the
/// decomposition inequalities. `observe` sees every training epoch.
pub fn theorem_check(
    cfg: &TheoremConfig,
    corpus: &Corpus,
    observe: impl FnMut(&EpochLog),
) -> Result<TheoremOutcome> {
    let mut model = Autodecompose::build(cfg.model.clone())?;
    let chunks = corpus.chunks();
    let log = model.fit_with(&chunks, cfg.model.epochs, observe)?;
    let report = decomposition_report(&model, &corpus.labeled(), &cfg.probe)?;
    let checks = decomposition_checks(&report, corpus.n_contents(), &cfg.thresholds)?;
    Ok(TheoremOutcome {
        log,
        report,
        checks,
        model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(gates: [bool; 8]) -> SynthSpec {
        let mut rng = RngStream::new(11);
        SynthSpec {
            source: design_sources(3, &mut rng).unwrap().remove(0),
            content: ContentScript {
                content_id: 0,
                symbols: [0, 1, 2, 3, 4, 5, 6, 7],
                gates,
            },
            noise_db: 30.0,
        }
    }

    #[test]
    fn utterance_shape_and_peak() {
        let a = synth_utterance(&spec([true; 8]), &mut RngStream::new(1)).unwrap();
        assert_eq!(a.len(), UTTERANCE_SAMPLES);
        assert_eq!(a.sample_rate(), SAMPLE_RATE);
        let peak = a.samples().iter().fold(0.0f32, |m, v| m.max(v.abs()));
        assert!((peak - 0.9).abs() < 1e-6);
    }

    #[test]
    fn same_seed_same_audio() {
        let s = spec([true; 8]);
        let a = synth_utterance(&s, &mut RngStream::new(5)).unwrap();
        let b = synth_utterance(&s, &mut RngStream::new(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gated_off_script_is_noise_floor() {
        let open = synth_utterance(&spec([true; 8]), &mut RngStream::new(2)).unwrap();
        let shut = synth_utterance(&spec([false; 8]), &mut RngStream::new(2)).unwrap();
        let rms = |x: &[f32]| {
            libm::sqrt(x.iter().map(|&v| (v as f64) * (v as f64)).sum::<f64>() / x.len() as f64)
        };
        // Same gain, same noise draw: the floor is open RMS shifted by -30 dB.
        let floor = rms(open.samples()) * libm::pow(10.0, -30.0 / 20.0);
        assert!(rms(shut.samples()) < floor * libm::pow(10.0, 3.0 / 20.0));
    }

    #[test]
    fn sources_respect_range_and_spacing() {
        for seed in 0..20 {
            let s = design_sources(5, &mut RngStream::new(seed)).unwrap();
            let mut f0: Vec<f64> = s.iter().map(|s| s.f0).collect();
            f0.sort_by(f64::total_cmp);
            assert!(f0[0] >= F0_RANGE.0 && f0[4] <= F0_RANGE.1);
            for w in f0.windows(2) {
                assert!(w[1] / w[0] >= MIN_F0_RATIO, "{f0:?}");
            }
        }
        assert!(design_sources(14, &mut RngStream::new(0)).is_err());
    }

    #[test]
    fn scripts_use_a_balanced_deck() {
        let scripts = design_scripts(12, &mut RngStream::new(3));
        let mut counts = [0; ALPHABET];
        for s in &scripts {
            for &sym in &s.symbols {
                counts[sym as usize] += 1;
            }
        }
        assert!(counts.iter().all(|&c| c == 8));
    }

    #[test]
    fn corpus_grid_is_balanced() {
        let cfg = CorpusConfig {
            n_sources: 2,
            n_contents: 3,
            per_cell: 2,
            seed: 4,
            noise_db: 30.0,
        };
        let c = make_corpus(&cfg, &DspConfig::default()).unwrap();
        assert_eq!(c.items.len(), 12);
        for k in 0..2 {
            for m in 0..3 {
                let n = c
                    .items
                    .iter()
                    .filter(|i| i.source_id == k && i.content_id == m)
                    .count();
                assert_eq!(n, 2);
            }
        }
    }
}
