//! On-disk formats: ADSPEC1 spectrograms, ADCKPT1 checkpoints, WAV input.
//!
//! ADSPEC1: `b"ADSPEC1\0"`, u32 LE frame count, u32 LE mel count, then f32 LE
//! values row-major (one row per time frame).
//!
//! ADCKPT1: `b"ADCKPT1\0"`, u64 LE header length, that many bytes of JSON
//! header (layer specs, optimizer settings, step counters and the name and
//! shape of every tensor), then every tensor as f32 LE in header order.

use std::fs;
use std::io::Write;
use std::path::Path;

use autodecompose_core::dsp::{AudioBuffer, MelChunk, Spectrogram};
use autodecompose_core::model::{Autodecompose, CheckpointHeader};
use autodecompose_core::nn::Tensor;

use crate::error::{CliError, CliResult};

pub const SPEC_MAGIC: &[u8; 8] = b"ADSPEC1\0";
pub const CKPT_MAGIC: &[u8; 8] = b"ADCKPT1\0";

pub fn encode_spectrogram(frames: usize, mels: usize, values: &[f32]) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + values.len() * 4);
    out.extend_from_slice(SPEC_MAGIC);
    out.extend_from_slice(&(frames as u32).to_le_bytes());
    out.extend_from_slice(&(mels as u32).to_le_bytes());
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_spectrogram(bytes: &[u8], path: &Path) -> CliResult<Spectrogram> {
    if bytes.len() < 16 || &bytes[..8] != SPEC_MAGIC {
        return Err(CliError::format(path, "not an ADSPEC1 file"));
    }
    let frames = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let mels = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let body = &bytes[16..];
    if body.len() != frames * mels * 4 {
        return Err(CliError::format(
            path,
            format!("{frames}x{mels} values need {} bytes, found {}", frames * mels * 4, body.len()),
        ));
    }
    let values = body
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
        .collect();
    Spectrogram::new(frames, mels, values).map_err(|e| CliError::format(path, e.to_string()))
}

pub fn write_chunk(path: &Path, chunk: &MelChunk) -> CliResult<()> {
    let bytes = encode_spectrogram(MelChunk::FRAMES, MelChunk::MELS, chunk.values());
    write_file(path, &bytes)
}

pub fn read_spectrogram(path: &Path) -> CliResult<Spectrogram> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    decode_spectrogram(&bytes, path)
}

/// Read an ADSPEC1 file that must hold exactly one 64x80 chunk.
pub fn read_chunk(path: &Path, floor: f32) -> CliResult<MelChunk> {
    let spec = read_spectrogram(path)?;
    if spec.frames() != MelChunk::FRAMES || spec.mels() != MelChunk::MELS {
        return Err(CliError::format(
            path,
            format!(
                "expected a {}x{} chunk, found {}x{}",
                MelChunk::FRAMES,
                MelChunk::MELS,
                spec.frames(),
                spec.mels()
            ),
        ));
    }
    MelChunk::new(spec.into_values(), floor).map_err(|e| CliError::format(path, e.to_string()))
}

pub fn encode_checkpoint(model: &Autodecompose) -> CliResult<Vec<u8>> {
    let header = serde_json::to_vec(&model.checkpoint_header())
        .map_err(|e| CliError::Runtime(format!("checkpoint header: {e}")))?;
    let tensors = model.checkpoint_tensors();
    let n: usize = tensors.iter().map(|t| t.len()).sum();
    let mut out = Vec::with_capacity(16 + header.len() + 4 * n);
    out.extend_from_slice(CKPT_MAGIC);
    out.extend_from_slice(&(header.len() as u64).to_le_bytes());
    out.extend_from_slice(&header);
    for t in tensors {
        for v in t.data() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

/// Parse a checkpoint; any truncation or inconsistency is a format error and
/// no partial model is returned.
pub fn decode_checkpoint(bytes: &[u8], path: &Path) -> CliResult<Autodecompose> {
    if bytes.len() < 16 || &bytes[..8] != CKPT_MAGIC {
        return Err(CliError::format(path, "not an ADCKPT1 file"));
    }
    let hlen = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let body_start = 16usize
        .checked_add(usize::try_from(hlen).map_err(|_| CliError::format(path, "header too large"))?)
        .filter(|&e| e <= bytes.len())
        .ok_or_else(|| CliError::format(path, "truncated header"))?;
    let header: CheckpointHeader = serde_json::from_slice(&bytes[16..body_start])
        .map_err(|e| CliError::format(path, format!("bad header: {e}")))?;
    let mut pos = body_start;
    let mut tensors = Vec::with_capacity(header.tensors.len());
    for entry in &header.tensors {
        let n: usize = entry.shape.iter().product();
        let end = pos
            .checked_add(n * 4)
            .filter(|&e| e <= bytes.len())
            .ok_or_else(|| CliError::format(path, format!("truncated at tensor {}", entry.name)))?;
        let data = bytes[pos..end]
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
            .collect();
        tensors.push(Tensor::new(entry.shape.clone(), data).map_err(|e| CliError::format(path, e.to_string()))?);
        pos = end;
    }
    if pos != bytes.len() {
        return Err(CliError::format(path, format!("{} trailing bytes", bytes.len() - pos)));
    }
    Autodecompose::from_checkpoint(header, tensors).map_err(|e| CliError::format(path, e.to_string()))
}

pub fn save_checkpoint(path: &Path, model: &Autodecompose) -> CliResult<()> {
    write_file(path, &encode_checkpoint(model)?)
}

pub fn load_checkpoint(path: &Path) -> CliResult<Autodecompose> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    decode_checkpoint(&bytes, path)
}

/// Read a WAV file (16-bit PCM or 32-bit float); multi-channel files keep
/// only their first channel.
pub fn read_wav(path: &Path) -> CliResult<AudioBuffer> {
    let mut reader = hound::WavReader::open(path).map_err(|e| CliError::format(path, e.to_string()))?;
    let spec = reader.spec();
    let channels = spec.channels.max(1) as usize;
    let samples: Vec<f32> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .step_by(channels)
            .map(|s| s.map(|v| v as f32 / 32768.0))
            .collect::<Result<_, _>>(),
        (hound::SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .step_by(channels)
            .collect::<Result<_, _>>(),
        (fmt, bits) => {
            return Err(CliError::format(
                path,
                format!("unsupported WAV encoding {fmt:?} {bits}-bit (need PCM16 or float32)"),
            ))
        }
    }
    .map_err(|e| CliError::format(path, e.to_string()))?;
    AudioBuffer::new(samples, spec.sample_rate).map_err(|e| CliError::format(path, e.to_string()))
}

/// Write a mono WAV file, 16-bit PCM.
pub fn write_wav_pcm16(path: &Path, audio: &AudioBuffer) -> CliResult<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: audio.sample_rate(),
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut w = hound::WavWriter::create(path, spec).map_err(|e| CliError::format(path, e.to_string()))?;
    for &s in audio.samples() {
        let v = (s.clamp(-1.0, 1.0) * 32767.0).round() as i16;
        w.write_sample(v).map_err(|e| CliError::format(path, e.to_string()))?;
    }
    w.finalize().map_err(|e| CliError::format(path, e.to_string()))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(bytes).map_err(|e| CliError::io(path, e))
}
