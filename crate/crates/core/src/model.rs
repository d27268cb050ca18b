//! The dual-encoder / decoder model and its training loop.
//!
//! The source encoder `E_s` reads the source-preserving view, the content
//! encoder `E_c` reads the content-preserving view, and the decoder `G`
//! rebuilds the original chunk from the per-frame concatenation
//! `<E_s(a), E_c(a')>` under mean squared error. Nothing else reaches the
//! decoder.
//!
//! All randomness is keyed off the configured seed: initialization uses fixed
//! child streams, and the augmentation and shuffling of epoch `e` use a stream
//! keyed by the *global* epoch number, so resuming from a checkpoint continues
//! the exact same trajectory.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::augment::{AugmentConfig, ContentViewDraw, SourceViewDraw};
use crate::dsp::MelChunk;
use crate::nn::{mse_loss, AdamConfig, AdamState, Layer, LayerSpec, Mode, Network, Tensor};
use crate::{Error, Result, RngStream};

const FRAMES: usize = MelChunk::FRAMES;
const MELS: usize = MelChunk::MELS;

const KEY_SOURCE_ENCODER: u64 = 1;
const KEY_CONTENT_ENCODER: u64 = 2;
const KEY_DECODER: u64 = 3;
const KEY_EPOCHS: u64 = 0x4550_4f43;
const KEY_SHUFFLE: u64 = u64::MAX;

/// Layer stacks for both encoders (same shape, separate weights) and the decoder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Architecture {
    /// Each encoder: 3 x (conv 512 + batch-norm/ReLU) + embedding.
    /// Decoder: 2 x (conv 512 + batch-norm/ReLU) + output head.
    Conv,
    /// Each encoder: dense 512 + batch-norm/ReLU + embedding.
    /// Decoder: dense 1024 + output head.
    Dense,
    Custom {
        encoder: Vec<LayerSpec>,
        decoder: Vec<LayerSpec>,
    },
}

impl Architecture {
    pub fn encoder_specs(&self, embed_dim: usize) -> Vec<LayerSpec> {
        let conv = LayerSpec::Conv1d {
            filters: 512,
            kernel: 3,
        };
        match self {
            Architecture::Conv => vec![
                conv,
                LayerSpec::BatchnormRelu,
                conv,
                LayerSpec::BatchnormRelu,
                conv,
                LayerSpec::BatchnormRelu,
                LayerSpec::LinearEmbed { width: embed_dim },
            ],
            Architecture::Dense => vec![
                LayerSpec::Dense { width: 512 },
                LayerSpec::BatchnormRelu,
                LayerSpec::LinearEmbed { width: embed_dim },
            ],
            Architecture::Custom { encoder, .. } => encoder.clone(),
        }
    }

    pub fn decoder_specs(&self) -> Vec<LayerSpec> {
        let conv = LayerSpec::Conv1d {
            filters: 512,
            kernel: 3,
        };
        match self {
            Architecture::Conv => vec![
                conv,
                LayerSpec::BatchnormRelu,
                conv,
                LayerSpec::BatchnormRelu,
                LayerSpec::OutputHead { width: MELS },
            ],
            Architecture::Dense => vec![
                LayerSpec::Dense { width: 1024 },
                LayerSpec::OutputHead { width: MELS },
            ],
            Architecture::Custom { decoder, .. } => decoder.clone(),
        }
    }
}

/// Which view feeds which encoder. Only `Standard` is the method; the other
/// two exist for ablations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViewAssignment {
    /// `E_s` reads the source-preserving view, `E_c` the content-preserving one.
    Standard,
    /// The two views are exchanged.
    Swapped,
    /// Both encoders read the un-augmented chunk.
    Identity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AutodecomposeConfig {
    pub architecture: Architecture,
    pub embed_dim: usize,
    pub batch_size: usize,
    pub epochs: u64,
    pub seed: u64,
    pub augment: AugmentConfig,
    pub adam: AdamConfig,
    pub views: ViewAssignment,
}

impl Default for AutodecomposeConfig {
    fn default() -> Self {
        Self {
            architecture: Architecture::Conv,
            embed_dim: 128,
            batch_size: 32,
            epochs: 100,
            seed: 1,
            augment: AugmentConfig::default(),
            adam: AdamConfig::default(),
            views: ViewAssignment::Standard,
        }
    }
}

impl AutodecomposeConfig {
    pub fn preset(architecture: Architecture) -> Self {
        Self {
            architecture,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.augment.validate()?;
        if self.embed_dim == 0 || self.batch_size == 0 {
            return Err(Error::Config("embed_dim and batch_size must be positive".into()));
        }
        if !(self.adam.lr > 0.0)
            || !(0.0..1.0).contains(&self.adam.beta1)
            || !(0.0..1.0).contains(&self.adam.beta2)
            || !(self.adam.eps > 0.0)
        {
            return Err(Error::Config(format!("invalid optimizer settings {:?}", self.adam)));
        }
        let enc = self.architecture.encoder_specs(self.embed_dim);
        let dec = self.architecture.decoder_specs();
        for s in enc.iter().chain(&dec) {
            s.validate()?;
        }
        let enc_out = out_width(MELS, &enc);
        if enc_out != self.embed_dim {
            return Err(Error::Config(format!(
                "encoders emit {enc_out} values per frame, embed_dim is {}",
                self.embed_dim
            )));
        }
        let dec_out = out_width(2 * self.embed_dim, &dec);
        if dec_out != MELS {
            return Err(Error::Config(format!(
                "decoder emits {dec_out} values per frame, expected {MELS}"
            )));
        }
        Ok(())
    }
}

fn out_width(input: usize, specs: &[LayerSpec]) -> usize {
    specs.iter().fold(input, |w, s| s.output_width(w))
}

/// One training batch: originals and the two augmented views, each `[B, 64, 80]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Batch {
    pub originals: Tensor<f32>,
    pub source_views: Tensor<f32>,
    pub content_views: Tensor<f32>,
}

impl Batch {
    /// Draw both views of every chunk, chunk `i` from `rngs[i]`.
    pub fn assemble(
        chunks: &[&MelChunk],
        rngs: &mut [RngStream],
        augment: &AugmentConfig,
    ) -> Result<Self> {
        if chunks.is_empty() || chunks.len() != rngs.len() {
            return Err(Error::Contract(format!(
                "{} chunks with {} random streams",
                chunks.len(),
                rngs.len()
            )));
        }
        let n = chunks.len();
        let mut d = Vec::with_capacity(n * MelChunk::LEN);
        let mut a = Vec::with_capacity(n * MelChunk::LEN);
        let mut c = Vec::with_capacity(n * MelChunk::LEN);
        for (chunk, rng) in chunks.iter().zip(rngs.iter_mut()) {
            let sv = SourceViewDraw::draw(rng, augment);
            let cv = ContentViewDraw::draw(rng, augment);
            d.extend_from_slice(chunk.values());
            a.extend_from_slice(sv.apply(chunk).values());
            c.extend_from_slice(cv.apply(chunk).values());
        }
        Self::from_values(n, d, a, c)
    }

    pub fn from_values(n: usize, d: Vec<f32>, a: Vec<f32>, c: Vec<f32>) -> Result<Self> {
        let shape = vec![n, FRAMES, MELS];
        Ok(Self {
            originals: Tensor::new(shape.clone(), d)?,
            source_views: Tensor::new(shape.clone(), a)?,
            content_views: Tensor::new(shape, c)?,
        })
    }

    pub fn len(&self) -> usize {
        self.originals.shape()[0]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    /// 1-based global epoch number.
    pub epoch: u64,
    /// Mean per-chunk loss over the epoch's steps (pre-update losses).
    pub mean_loss: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Source,
    Content,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pooling {
    /// One row per frame: `64 x embed_dim` per chunk.
    None,
    /// Mean over frames: `embed_dim` per chunk.
    Mean,
}

/// Encoder outputs for a list of chunks, row-major `[chunks, rows, dim]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingMatrix {
    pub chunks: usize,
    /// 64 for `Pooling::None`, 1 for `Pooling::Mean`.
    pub rows_per_chunk: usize,
    pub dim: usize,
    pub values: Vec<f32>,
}

impl EmbeddingMatrix {
    pub fn row(&self, i: usize) -> &[f32] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn n_rows(&self) -> usize {
        self.chunks * self.rows_per_chunk
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(|&v| v as f64).collect()
    }
}

/// Mean over the time axis of a `[frames, dim]` block.
pub fn mean_pool(frames: &[f32], dim: usize) -> Vec<f32> {
    let t = frames.len() / dim;
    let mut acc = vec![0.0f64; dim];
    for row in frames.chunks_exact(dim) {
        for (a, &v) in acc.iter_mut().zip(row) {
            *a += v as f64;
        }
    }
    acc.into_iter().map(|a| (a / t as f64) as f32).collect()
}

/// Name and shape of one tensor in a checkpoint, in storage order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorEntry {
    pub name: String,
    pub shape: Vec<usize>,
}

/// Everything about a model except its tensor values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointHeader {
    pub config: AutodecomposeConfig,
    pub source_encoder: Vec<LayerSpec>,
    pub content_encoder: Vec<LayerSpec>,
    pub decoder: Vec<LayerSpec>,
    pub adam: AdamConfig,
    pub step: u64,
    pub epoch: u64,
    pub tensors: Vec<TensorEntry>,
}

/// Parameters, batch-norm statistics and optimizer state of one model.
#[derive(Clone, Debug, PartialEq)]
pub struct Autodecompose {
    config: AutodecomposeConfig,
    source_encoder: Network<f32>,
    content_encoder: Network<f32>,
    decoder: Network<f32>,
    adam: AdamState<f32>,
    epoch: u64,
}

impl Autodecompose {
    /// Initialize all three networks and zero optimizer moments.
    pub fn build(config: AutodecomposeConfig) -> Result<Self> {
        config.validate()?;
        let root = RngStream::new(config.seed);
        let enc = config.architecture.encoder_specs(config.embed_dim);
        let dec = config.architecture.decoder_specs();
        let source_encoder = Network::new(MELS, &enc, &mut root.split(KEY_SOURCE_ENCODER))?;
        let content_encoder = Network::new(MELS, &enc, &mut root.split(KEY_CONTENT_ENCODER))?;
        let decoder = Network::new(2 * config.embed_dim, &dec, &mut root.split(KEY_DECODER))?;
        Self::from_networks(config, source_encoder, content_encoder, decoder)
    }

    /// Wrap explicit networks (fresh optimizer state).
    pub fn from_networks(
        config: AutodecomposeConfig,
        source_encoder: Network<f32>,
        content_encoder: Network<f32>,
        decoder: Network<f32>,
    ) -> Result<Self> {
        let e = config.embed_dim;
        if source_encoder.input_width() != MELS
            || content_encoder.input_width() != MELS
            || source_encoder.output_width() != e
            || content_encoder.output_width() != e
            || decoder.input_width() != 2 * e
            || decoder.output_width() != MELS
        {
            return Err(Error::Config(format!(
                "networks do not chain {MELS} -> {e} (+{e}) -> {MELS}"
            )));
        }
        let adam = AdamState::new(
            config.adam.clone(),
            source_encoder
                .params()
                .chain(content_encoder.params())
                .chain(decoder.params()),
        );
        Ok(Self {
            config,
            source_encoder,
            content_encoder,
            decoder,
            adam,
            epoch: 0,
        })
    }

    pub fn config(&self) -> &AutodecomposeConfig {
        &self.config
    }

    pub fn source_encoder(&self) -> &Network<f32> {
        &self.source_encoder
    }

    pub fn content_encoder(&self) -> &Network<f32> {
        &self.content_encoder
    }

    pub fn decoder(&self) -> &Network<f32> {
        &self.decoder
    }

    pub fn adam(&self) -> &AdamState<f32> {
        &self.adam
    }

    /// Completed epochs, counted across resumptions.
    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    /// Completed optimizer steps.
    pub fn step(&self) -> u64 {
        self.adam.step
    }

    pub fn param_count(&self) -> usize {
        self.source_encoder.param_count()
            + self.content_encoder.param_count()
            + self.decoder.param_count()
    }

    /// All trainable tensors: `E_s`, then `E_c`, then `G`.
    pub fn params(&self) -> impl Iterator<Item = &Tensor<f32>> {
        self.source_encoder
            .params()
            .chain(self.content_encoder.params())
            .chain(self.decoder.params())
    }

    /// Reconstruction of `originals` from the given views, in eval mode.
    pub fn reconstruct(&self, source_views: &Tensor<f32>, content_views: &Tensor<f32>) -> Result<Tensor<f32>> {
        let zs = self.source_encoder.infer(source_views)?;
        let zc = self.content_encoder.infer(content_views)?;
        self.decoder.infer(&Tensor::concat_last(&zs, &zc)?)
    }

    /// One optimizer step on `batch`; returns the loss before the update.
    pub fn train_step(&mut self, batch: &Batch) -> Result<f64> {
        let (a, c) = match self.config.views {
            ViewAssignment::Standard => (&batch.source_views, &batch.content_views),
            ViewAssignment::Swapped => (&batch.content_views, &batch.source_views),
            ViewAssignment::Identity => (&batch.originals, &batch.originals),
        };
        let (zs, cache_s) = self.source_encoder.forward(a, Mode::Train)?;
        let (zc, cache_c) = self.content_encoder.forward(c, Mode::Train)?;
        let z = Tensor::concat_last(&zs, &zc)?;
        let (rec, cache_g) = self.decoder.forward(&z, Mode::Train)?;
        let step = self.adam.step + 1;
        let (loss, grad) = match mse_loss(&rec, &batch.originals) {
            Ok(v) if v.0.is_finite() => v,
            Ok((loss, _)) => {
                return Err(Error::Divergence {
                    step,
                    loss,
                    max_grad: f64::NAN,
                })
            }
            Err(Error::NonFinite(_)) => {
                return Err(Error::Divergence {
                    step,
                    loss: f64::NAN,
                    max_grad: f64::NAN,
                })
            }
            Err(e) => return Err(e),
        };
        let (gz, grads_g) = self.decoder.backward(&cache_g, &grad)?;
        let (gzs, gzc) = gz.split_last(self.config.embed_dim)?;
        let (_, grads_s) = self.source_encoder.backward(&cache_s, &gzs)?;
        let (_, grads_c) = self.content_encoder.backward(&cache_c, &gzc)?;
        let grads: Vec<Tensor<f32>> = grads_s.into_iter().chain(grads_c).chain(grads_g).collect();
        let max_grad = grads.iter().map(|g| g.max_abs()).fold(0.0, f64::max);
        if !max_grad.is_finite() {
            return Err(Error::Divergence { step, loss, max_grad });
        }
        let params = self
            .source_encoder
            .params_mut()
            .chain(self.content_encoder.params_mut())
            .chain(self.decoder.params_mut());
        self.adam.update(params, &grads)?;
        Ok(loss)
    }

    /// Augmentation stream of chunk `index` in global epoch `epoch`.
    pub fn augmentation_stream(&self, epoch: u64, index: usize) -> RngStream {
        RngStream::new(self.config.seed)
            .split(KEY_EPOCHS)
            .split(epoch)
            .split(index as u64)
    }

    /// Train for `epochs` more epochs over `corpus`; each epoch reshuffles and
    /// draws fresh views for every chunk. `observe` sees each epoch's log as
    /// soon as it completes.
    pub fn fit_with(
        &mut self,
        corpus: &[MelChunk],
        epochs: u64,
        mut observe: impl FnMut(&EpochLog),
    ) -> Result<Vec<EpochLog>> {
        if epochs == 0 {
            return Ok(Vec::new());
        }
        if corpus.is_empty() {
            return Err(Error::InvalidInput("cannot train on an empty corpus".into()));
        }
        let mut log = Vec::with_capacity(epochs as usize);
        for _ in 0..epochs {
            let e = self.epoch + 1;
            let mut order: Vec<usize> = (0..corpus.len()).collect();
            RngStream::new(self.config.seed)
                .split(KEY_EPOCHS)
                .split(e)
                .split(KEY_SHUFFLE)
                .shuffle(&mut order);
            let mut total = 0.0;
            for idx in order.chunks(self.config.batch_size) {
                let chunks: Vec<&MelChunk> = idx.iter().map(|&i| &corpus[i]).collect();
                let mut rngs: Vec<RngStream> =
                    idx.iter().map(|&i| self.augmentation_stream(e, i)).collect();
                let batch = Batch::assemble(&chunks, &mut rngs, &self.config.augment)?;
                total += self.train_step(&batch)? * idx.len() as f64;
            }
            self.epoch = e;
            let entry = EpochLog {
                epoch: e,
                mean_loss: total / corpus.len() as f64,
            };
            observe(&entry);
            log.push(entry);
        }
        Ok(log)
    }

    pub fn fit(&mut self, corpus: &[MelChunk], epochs: u64) -> Result<Vec<EpochLog>> {
        self.fit_with(corpus, epochs, |_| {})
    }

    /// Eval-mode embeddings of raw (un-augmented) chunks.
    pub fn embed(&self, chunks: &[MelChunk], which: Which, pooling: Pooling) -> Result<EmbeddingMatrix> {
        let net = match which {
            Which::Source => &self.source_encoder,
            Which::Content => &self.content_encoder,
        };
        let dim = net.output_width();
        let rows_per_chunk = match pooling {
            Pooling::None => FRAMES,
            Pooling::Mean => 1,
        };
        let mut values = Vec::with_capacity(chunks.len() * rows_per_chunk * dim);
        for group in chunks.chunks(self.config.batch_size.max(1)) {
            let mut x = Vec::with_capacity(group.len() * MelChunk::LEN);
            for c in group {
                x.extend_from_slice(c.values());
            }
            let out = net.infer(&Tensor::new(vec![group.len(), FRAMES, MELS], x)?)?;
            match pooling {
                Pooling::None => values.extend_from_slice(out.data()),
                Pooling::Mean => {
                    for block in out.data().chunks_exact(FRAMES * dim) {
                        values.extend(mean_pool(block, dim));
                    }
                }
            }
        }
        Ok(EmbeddingMatrix {
            chunks: chunks.len(),
            rows_per_chunk,
            dim,
            values,
        })
    }

    fn networks(&self) -> [(&'static str, &Network<f32>); 3] {
        [
            ("source_encoder", &self.source_encoder),
            ("content_encoder", &self.content_encoder),
            ("decoder", &self.decoder),
        ]
    }

    /// Header describing [`Autodecompose::checkpoint_tensors`].
    pub fn checkpoint_header(&self) -> CheckpointHeader {
        let mut tensors = Vec::new();
        for (net_name, net) in self.networks() {
            for (i, layer) in net.layers().iter().enumerate() {
                let names: &[&str] = match layer.spec() {
                    LayerSpec::BatchnormRelu => &["gamma", "beta", "running_mean", "running_var"],
                    _ => &["weight", "bias"],
                };
                for (t, name) in layer.params().iter().chain(layer.buffers()).zip(names) {
                    tensors.push(TensorEntry {
                        name: format!("{net_name}.{i}.{name}"),
                        shape: t.shape().to_vec(),
                    });
                }
            }
        }
        let n_params = self.params().count();
        for (moment, list) in [("adam_m", &self.adam.m), ("adam_v", &self.adam.v)] {
            for (i, t) in list.iter().enumerate().take(n_params) {
                tensors.push(TensorEntry {
                    name: format!("{moment}.{i}"),
                    shape: t.shape().to_vec(),
                });
            }
        }
        CheckpointHeader {
            config: self.config.clone(),
            source_encoder: self.source_encoder.specs(),
            content_encoder: self.content_encoder.specs(),
            decoder: self.decoder.specs(),
            adam: self.adam.config.clone(),
            step: self.adam.step,
            epoch: self.epoch,
            tensors,
        }
    }

    /// Every stored tensor, in header order.
    pub fn checkpoint_tensors(&self) -> Vec<&Tensor<f32>> {
        let mut out = Vec::new();
        for (_, net) in self.networks() {
            for layer in net.layers() {
                out.extend(layer.params().iter().chain(layer.buffers()));
            }
        }
        out.extend(self.adam.m.iter());
        out.extend(self.adam.v.iter());
        out
    }

    /// Rebuild a model from a header and its tensors (consumed in order).
    pub fn from_checkpoint(header: CheckpointHeader, tensors: Vec<Tensor<f32>>) -> Result<Self> {
        header.config.validate()?;
        if tensors.len() != header.tensors.len() {
            return Err(Error::Contract(format!(
                "header lists {} tensors, got {}",
                header.tensors.len(),
                tensors.len()
            )));
        }
        for (t, entry) in tensors.iter().zip(&header.tensors) {
            if t.shape() != entry.shape.as_slice() {
                return Err(Error::Contract(format!(
                    "tensor {} has shape {:?}, header says {:?}",
                    entry.name,
                    t.shape(),
                    entry.shape
                )));
            }
        }
        let mut it = tensors.into_iter();
        let mut take_net = |specs: &[LayerSpec], input: usize| -> Result<Network<f32>> {
            let mut layers = Vec::with_capacity(specs.len());
            let mut width = input;
            for &spec in specs {
                let n_params = spec.param_shapes(width).len();
                let n_buffers = if spec == LayerSpec::BatchnormRelu { 2 } else { 0 };
                let params: Vec<_> = it.by_ref().take(n_params).collect();
                let buffers: Vec<_> = it.by_ref().take(n_buffers).collect();
                let layer = Layer::from_parts(spec, width, params, buffers)?;
                width = layer.output_width();
                layers.push(layer);
            }
            Network::from_layers(input, layers)
        };
        let e = header.config.embed_dim;
        let source_encoder = take_net(&header.source_encoder, MELS)?;
        let content_encoder = take_net(&header.content_encoder, MELS)?;
        let decoder = take_net(&header.decoder, 2 * e)?;
        let mut model =
            Self::from_networks(header.config.clone(), source_encoder, content_encoder, decoder)?;
        let n = model.adam.m.len();
        let m: Vec<_> = it.by_ref().take(n).collect();
        let v: Vec<_> = it.by_ref().take(n).collect();
        if m.len() != n || v.len() != n || it.next().is_some() {
            return Err(Error::Contract("optimizer moments do not match parameters".into()));
        }
        for ((mm, vv), p) in m.iter().zip(&v).zip(model.params()) {
            if mm.shape() != p.shape() || vv.shape() != p.shape() {
                return Err(Error::Contract("optimizer moment shape mismatch".into()));
            }
        }
        model.adam = AdamState {
            config: header.adam,
            step: header.step,
            m,
            v,
        };
        model.epoch = header.epoch;
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_corpus(n: usize) -> Vec<MelChunk> {
        let floor = crate::dsp::default_floor();
        (0..n)
            .map(|k| {
                MelChunk::from_fn(floor, |t, m| {
                    let x = libm::sinf((t as f32) * 0.3 + k as f32) * 2.0;
                    -4.0 + x + (m as f32 / 40.0) * (k as f32 % 3.0)
                })
                .unwrap()
            })
            .collect()
    }

    fn dense_cfg() -> AutodecomposeConfig {
        AutodecomposeConfig {
            architecture: Architecture::Dense,
            batch_size: 4,
            seed: 7,
            ..AutodecomposeConfig::default()
        }
    }

    #[test]
    fn presets_validate() {
        AutodecomposeConfig::preset(Architecture::Conv).validate().unwrap();
        AutodecomposeConfig::preset(Architecture::Dense).validate().unwrap();
        let bad = AutodecomposeConfig {
            embed_dim: 64,
            architecture: Architecture::Custom {
                encoder: vec![LayerSpec::LinearEmbed { width: 128 }],
                decoder: vec![LayerSpec::OutputHead { width: 80 }],
            },
            ..AutodecomposeConfig::default()
        };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn checkpoint_parts_round_trip() {
        let mut m = Autodecompose::build(dense_cfg()).unwrap();
        m.fit(&tiny_corpus(6), 2).unwrap();
        let header = m.checkpoint_header();
        let tensors: Vec<Tensor<f32>> = m.checkpoint_tensors().into_iter().cloned().collect();
        assert_eq!(header.tensors.len(), tensors.len());
        let back = Autodecompose::from_checkpoint(header, tensors).unwrap();
        assert!(back == m);
    }

    #[test]
    fn epoch_zero_changes_nothing() {
        let mut m = Autodecompose::build(dense_cfg()).unwrap();
        let before = m.clone();
        assert!(m.fit(&tiny_corpus(4), 0).unwrap().is_empty());
        assert!(m == before);
    }
}
