//! Training-loop behaviour of the model. These tests live here rather than in
//! the core crate so that the matrix kernels get runtime SIMD dispatch.

use autodecompose::formats::{decode_checkpoint, encode_checkpoint};
use autodecompose_core::dsp::{DspConfig, MelChunk};
use autodecompose_core::model::{
    mean_pool, Architecture, Autodecompose, AutodecomposeConfig, Batch, Pooling, ViewAssignment,
    Which,
};
use autodecompose_core::nn::{Layer, LayerSpec, Network, Tensor};
use autodecompose_core::synth::{make_corpus, CorpusConfig};
use autodecompose_core::RngStream;
use std::path::Path;

fn tiny_corpus() -> Vec<MelChunk> {
    let cfg = CorpusConfig {
        n_sources: 2,
        n_contents: 4,
        per_cell: 1,
        seed: 11,
        noise_db: 30.0,
    };
    make_corpus(&cfg, &DspConfig::default()).unwrap().chunks()
}

fn dense(seed: u64, batch_size: usize) -> AutodecomposeConfig {
    AutodecomposeConfig {
        seed,
        batch_size,
        ..AutodecomposeConfig::preset(Architecture::Dense)
    }
}

#[test]
fn dense_parameter_count_is_the_sum_of_its_shapes() {
    let model = Autodecompose::build(dense(1, 32)).unwrap();
    let encoder = (80 * 512 + 512) + (512 + 512) + (512 * 128 + 128);
    let decoder = (256 * 1024 + 1024) + (1024 * 80 + 80);
    assert_eq!(model.param_count(), 2 * encoder + decoder);
    assert_eq!(model.source_encoder().output_width(), 128);
    assert_eq!(model.content_encoder().output_width(), 128);
}

#[test]
fn conv_preset_widths() {
    let model = Autodecompose::build(AutodecomposeConfig::default()).unwrap();
    assert_eq!(model.source_encoder().output_width(), 128);
    assert_eq!(model.decoder().input_width(), 256);
    assert_eq!(model.decoder().output_width(), 80);
}

#[test]
fn same_seed_same_initialization() {
    let a = Autodecompose::build(dense(9, 32)).unwrap();
    let b = Autodecompose::build(dense(9, 32)).unwrap();
    let c = Autodecompose::build(dense(10, 32)).unwrap();
    assert!(a == b);
    assert!(a != c);
}

fn identity(n: usize, rows: usize) -> Tensor<f32> {
    let mut w = vec![0.0f32; rows * n];
    for i in 0..n {
        w[i * n + i] = 1.0;
    }
    Tensor::new(vec![rows, n], w).unwrap()
}

/// Encoders copy the chunk; the decoder copies the first encoder back out.
fn perfect_reconstructor() -> Autodecompose {
    let enc_spec = LayerSpec::LinearEmbed { width: 80 };
    let dec_spec = LayerSpec::OutputHead { width: 80 };
    let encoder = || {
        let layer = Layer::from_parts(enc_spec, 80, vec![identity(80, 80), Tensor::zeros(vec![80])], vec![]).unwrap();
        Network::from_layers(80, vec![layer]).unwrap()
    };
    let dec = Layer::from_parts(dec_spec, 160, vec![identity(80, 160), Tensor::zeros(vec![80])], vec![]).unwrap();
    let config = AutodecomposeConfig {
        architecture: Architecture::Custom {
            encoder: vec![enc_spec],
            decoder: vec![dec_spec],
        },
        embed_dim: 80,
        views: ViewAssignment::Identity,
        ..AutodecomposeConfig::default()
    };
    Autodecompose::from_networks(config, encoder(), encoder(), Network::from_layers(160, vec![dec]).unwrap()).unwrap()
}

#[test]
fn exact_reconstruction_has_zero_loss_and_no_movement() {
    let corpus = tiny_corpus();
    let mut model = perfect_reconstructor();
    let before: Vec<Tensor<f32>> = model.params().cloned().collect();
    let chunks: Vec<&MelChunk> = corpus.iter().collect();
    let mut rngs: Vec<RngStream> = (0..chunks.len() as u64).map(RngStream::new).collect();
    let batch = Batch::assemble(&chunks, &mut rngs, &model.config().augment).unwrap();
    for _ in 0..5 {
        assert_eq!(model.train_step(&batch).unwrap(), 0.0);
    }
    let after: Vec<Tensor<f32>> = model.params().cloned().collect();
    assert_eq!(before, after);
}

#[test]
fn two_hundred_steps_reduce_the_loss() {
    let corpus = tiny_corpus();
    let mut model = Autodecompose::build(dense(3, 8)).unwrap();
    let log = model.fit(&corpus, 200).unwrap();
    assert_eq!(model.step(), 200);
    let smooth = |w: &[_]| w.iter().map(|e: &autodecompose_core::model::EpochLog| e.mean_loss).sum::<f64>() / w.len() as f64;
    let first = log[0].mean_loss;
    let last = smooth(&log[190..]);
    assert!(last < first, "smoothed final {last} vs initial {first}");
}

#[test]
fn fifty_epochs_halve_the_loss() {
    let corpus = tiny_corpus();
    let mut model = Autodecompose::build(dense(4, 4)).unwrap();
    let log = model.fit(&corpus, 50).unwrap();
    let (first, last) = (log[0].mean_loss, log[49].mean_loss);
    assert!(last < 0.5 * first, "epoch 50 {last} vs epoch 1 {first}");
}

#[test]
fn swapped_views_follow_another_trajectory() {
    let corpus = tiny_corpus();
    let mut standard = Autodecompose::build(dense(5, 4)).unwrap();
    let mut swapped = Autodecompose::build(AutodecomposeConfig {
        views: ViewAssignment::Swapped,
        ..dense(5, 4)
    })
    .unwrap();
    let a = standard.fit(&corpus, 3).unwrap();
    let b = swapped.fit(&corpus, 3).unwrap();
    assert_ne!(a, b);
}

#[test]
fn fixed_seed_reproduces_the_log_exactly() {
    let corpus = tiny_corpus();
    let run = || {
        let mut m = Autodecompose::build(dense(6, 4)).unwrap();
        let log = m.fit(&corpus, 4).unwrap();
        (log, encode_checkpoint(&m).unwrap())
    };
    assert_eq!(run(), run());
}

#[test]
fn embeddings_are_deterministic_and_128_wide() {
    let corpus = tiny_corpus();
    let mut model = Autodecompose::build(dense(7, 4)).unwrap();
    model.fit(&corpus, 1).unwrap();
    for which in [Which::Source, Which::Content] {
        let frames = model.embed(&corpus, which, Pooling::None).unwrap();
        assert_eq!((frames.rows_per_chunk, frames.dim), (64, 128));
        assert_eq!(frames.values.len(), corpus.len() * 64 * 128);
        assert_eq!(frames, model.embed(&corpus, which, Pooling::None).unwrap());
        let pooled = model.embed(&corpus, which, Pooling::Mean).unwrap();
        assert_eq!(pooled.rows_per_chunk, 1);
        for c in 0..corpus.len() {
            let expect = mean_pool(&frames.values[c * 64 * 128..(c + 1) * 64 * 128], 128);
            assert_eq!(pooled.row(c), &expect[..]);
        }
    }
}

#[test]
fn mean_pool_of_a_constant_map_is_that_vector() {
    let v: Vec<f32> = (0..128).map(|i| i as f32 * 0.25 - 3.0).collect();
    let frames: Vec<f32> = (0..64).flat_map(|_| v.iter().copied()).collect();
    assert_eq!(mean_pool(&frames, 128), v);
}

#[test]
fn resuming_from_a_checkpoint_equals_continued_training() {
    let corpus = tiny_corpus();
    let mut straight = Autodecompose::build(dense(8, 4)).unwrap();
    let full_log = straight.fit(&corpus, 5).unwrap();

    let mut first = Autodecompose::build(dense(8, 4)).unwrap();
    let mut log = first.fit(&corpus, 2).unwrap();
    let bytes = encode_checkpoint(&first).unwrap();
    let mut resumed = decode_checkpoint(&bytes, Path::new("mem")).unwrap();
    log.extend(resumed.fit(&corpus, 3).unwrap());

    assert_eq!(log, full_log);
    assert_eq!(encode_checkpoint(&resumed).unwrap(), encode_checkpoint(&straight).unwrap());
}

#[test]
fn zero_epochs_leave_the_model_untouched() {
    let corpus = tiny_corpus();
    let mut model = Autodecompose::build(dense(2, 4)).unwrap();
    let before = encode_checkpoint(&model).unwrap();
    assert!(model.fit(&corpus, 0).unwrap().is_empty());
    assert_eq!(encode_checkpoint(&model).unwrap(), before);
}
