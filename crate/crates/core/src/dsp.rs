//! Log-mel front-end: resample to 16 kHz, band-pass to 90..7600 Hz, take a
//! non-overlapping 256-point log-mel spectrogram with 80 bands and crop it into
//! 64-frame chunks (1.024 s each).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::fft::Fft;
use crate::{Error, Result};

/// Time frames per chunk.
pub const CHUNK_FRAMES: usize = 64;
/// Mel bands per frame.
pub const N_MELS: usize = 80;
/// Seconds covered by one frame at 16 kHz with a 256-sample hop.
pub const HOP_SECONDS: f64 = 0.016;
/// Seconds covered by one chunk.
pub const CHUNK_SECONDS: f64 = HOP_SECONDS * CHUNK_FRAMES as f64;

/// Half-width of the windowed-sinc resampling kernel; the kernel has
/// `2 * RESAMPLE_HALF_TAPS` taps.
const RESAMPLE_HALF_TAPS: i64 = 32;

/// Mono waveform with its sample rate.
#[derive(Clone, Debug, PartialEq)]
pub struct AudioBuffer {
    samples: Vec<f32>,
    sample_rate: u32,
}

impl AudioBuffer {
    pub fn new(samples: Vec<f32>, sample_rate: u32) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidInput("audio buffer is empty".into()));
        }
        if sample_rate == 0 {
            return Err(Error::InvalidInput("sample rate must be positive".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::NonFinite(format!("audio sample {i}")));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_seconds(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn into_samples(self) -> Vec<f32> {
        self.samples
    }
}

/// Front-end parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DspConfig {
    pub target_rate: u32,
    pub band_low: f64,
    pub band_high: f64,
    pub n_fft: usize,
    pub hop: usize,
    pub n_mels: usize,
    pub chunk_frames: usize,
    pub log_epsilon: f64,
}

impl Default for DspConfig {
    fn default() -> Self {
        Self {
            target_rate: 16_000,
            band_low: 90.0,
            band_high: 7600.0,
            n_fft: 256,
            hop: 256,
            n_mels: N_MELS,
            chunk_frames: CHUNK_FRAMES,
            log_epsilon: 1e-5,
        }
    }
}

impl DspConfig {
    pub fn validate(&self) -> Result<()> {
        let nyquist = self.target_rate as f64 / 2.0;
        if self.target_rate == 0 || self.n_fft == 0 || self.hop == 0 || self.n_mels == 0 {
            return Err(Error::Config("dsp sizes must be positive".into()));
        }
        if !(self.band_low > 0.0 && self.band_low < self.band_high && self.band_high < nyquist) {
            return Err(Error::Config(format!(
                "band [{}, {}] must satisfy 0 < low < high < {nyquist}",
                self.band_low, self.band_high
            )));
        }
        if self.hop > self.n_fft {
            return Err(Error::Config("hop must not exceed n_fft".into()));
        }
        if !self.n_fft.is_power_of_two() {
            return Err(Error::Config("n_fft must be a power of two".into()));
        }
        if !(self.log_epsilon > 0.0) {
            return Err(Error::Config("log_epsilon must be positive".into()));
        }
        if self.n_mels != N_MELS || self.chunk_frames != CHUNK_FRAMES {
            return Err(Error::Config(format!(
                "chunks are fixed at {CHUNK_FRAMES}x{N_MELS}"
            )));
        }
        Ok(())
    }

    /// Log-domain floor `ln(log_epsilon)`: the value of a zero-power cell.
    pub fn floor(&self) -> f32 {
        libm::log(self.log_epsilon) as f32
    }
}

/// Log floor for the default epsilon of 1e-5.
pub fn default_floor() -> f32 {
    DspConfig::default().floor()
}

/// A `frames x mels` log-mel matrix, row-major by time frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrogram {
    frames: usize,
    mels: usize,
    values: Vec<f32>,
}

impl Spectrogram {
    pub fn new(frames: usize, mels: usize, values: Vec<f32>) -> Result<Self> {
        if values.len() != frames * mels {
            return Err(Error::Contract(format!(
                "{} values for a {frames}x{mels} spectrogram",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("spectrogram cell {i}")));
        }
        Ok(Self {
            frames,
            mels,
            values,
        })
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn mels(&self) -> usize {
        self.mels
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn frame(&self, t: usize) -> &[f32] {
        &self.values[t * self.mels..(t + 1) * self.mels]
    }

    pub fn into_values(self) -> Vec<f32> {
        self.values
    }
}

/// One 64x80 log-mel chunk: the unit sample seen by the augmentations and the
/// model.
#[derive(Clone, Debug, PartialEq)]
pub struct MelChunk {
    values: Vec<f32>,
    floor: f32,
}

impl MelChunk {
    pub const FRAMES: usize = CHUNK_FRAMES;
    pub const MELS: usize = N_MELS;
    pub const LEN: usize = CHUNK_FRAMES * N_MELS;

    /// Validating constructor: 64x80 values, all finite and `>= floor`.
    pub fn new(values: Vec<f32>, floor: f32) -> Result<Self> {
        if values.len() != Self::LEN {
            return Err(Error::InvalidInput(format!(
                "chunk needs {} values, got {}",
                Self::LEN,
                values.len()
            )));
        }
        if !floor.is_finite() {
            return Err(Error::NonFinite("chunk floor".into()));
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("chunk cell {i}")));
            }
            if v < floor {
                return Err(Error::InvalidInput(format!(
                    "chunk cell {i} = {v} is below the floor {floor}"
                )));
            }
        }
        Ok(Self { values, floor })
    }

    /// All cells at the floor.
    pub fn silence(floor: f32) -> Self {
        Self {
            values: vec![floor; Self::LEN],
            floor,
        }
    }

    /// Build from a per-cell function of `(frame, mel)`; values are clamped to
    /// the floor.
    pub fn from_fn(floor: f32, mut f: impl FnMut(usize, usize) -> f32) -> Result<Self> {
        let mut values = Vec::with_capacity(Self::LEN);
        for t in 0..Self::FRAMES {
            for m in 0..Self::MELS {
                values.push(f(t, m).max(floor));
            }
        }
        Self::new(values, floor)
    }

    pub(crate) fn from_raw(values: Vec<f32>, floor: f32) -> Self {
        debug_assert_eq!(values.len(), Self::LEN);
        Self { values, floor }
    }

    pub fn floor(&self) -> f32 {
        self.floor
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn values_mut_unchecked(&mut self) -> &mut [f32] {
        &mut self.values
    }

    pub fn frame(&self, t: usize) -> &[f32] {
        &self.values[t * Self::MELS..(t + 1) * Self::MELS]
    }

    pub fn get(&self, t: usize, m: usize) -> f32 {
        self.values[t * Self::MELS + m]
    }

    pub fn hop_seconds(&self) -> f64 {
        HOP_SECONDS
    }

    pub fn into_values(self) -> Vec<f32> {
        self.values
    }
}

/// Windowed-sinc resampling with a 64-tap Blackman-windowed kernel.
///
/// The kernel is normalized to unit sum at every output position, so DC passes
/// unchanged away from the edges. Equal rates return the input unchanged.
pub fn resample(audio: &AudioBuffer, target_rate: u32) -> Result<AudioBuffer> {
    if target_rate == 0 {
        return Err(Error::InvalidInput("target rate must be positive".into()));
    }
    if audio.is_empty() {
        return Err(Error::InvalidInput("cannot resample empty audio".into()));
    }
    let in_rate = audio.sample_rate;
    if in_rate == target_rate {
        return Ok(audio.clone());
    }
    let n_in = audio.len() as u64;
    let n_out = ((n_in * target_rate as u64 + in_rate as u64 / 2) / in_rate as u64).max(1) as usize;
    let step = in_rate as f64 / target_rate as f64;
    // Cutoff relative to the input Nyquist; anti-aliasing when downsampling.
    let cutoff = (target_rate as f64 / in_rate as f64).min(1.0);
    let src = &audio.samples;
    let half = RESAMPLE_HALF_TAPS;
    let mut out = Vec::with_capacity(n_out);
    let mut weights = [0.0f64; 2 * RESAMPLE_HALF_TAPS as usize];
    for i in 0..n_out {
        let x = i as f64 * step;
        let base = libm::floor(x) as i64;
        let mut wsum = 0.0;
        for (k, w) in weights.iter_mut().enumerate() {
            let j = base - half + 1 + k as i64;
            let d = x - j as f64;
            *w = cutoff * sinc(cutoff * d) * blackman(d, half as f64);
            wsum += *w;
        }
        let mut acc = 0.0;
        for (k, w) in weights.iter().enumerate() {
            let j = base - half + 1 + k as i64;
            if j >= 0 && (j as usize) < src.len() {
                acc += w * src[j as usize] as f64;
            }
        }
        out.push((acc / wsum) as f32);
    }
    AudioBuffer::new(out, target_rate)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        libm::sin(PI * x) / (PI * x)
    }
}

/// Blackman window over `[-half, half]`.
fn blackman(d: f64, half: f64) -> f64 {
    if d.abs() >= half {
        return 0.0;
    }
    let p = PI * d / half;
    0.42 + 0.5 * libm::cos(p) + 0.08 * libm::cos(2.0 * p)
}

/// Normalized biquad `y = (b0 x + b1 x1 + b2 x2 - a1 y1 - a2 y2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Biquad {
    /// Second-order Butterworth low-pass via the bilinear transform with
    /// frequency prewarping.
    pub fn butterworth_lowpass(cutoff: f64, sample_rate: f64) -> Self {
        let k = libm::tan(PI * cutoff / sample_rate);
        let q = core::f64::consts::SQRT_2;
        let norm = 1.0 / (1.0 + q * k + k * k);
        let b0 = k * k * norm;
        Self {
            b: [b0, 2.0 * b0, b0],
            a: [2.0 * (k * k - 1.0) * norm, (1.0 - q * k + k * k) * norm],
        }
    }

    /// Second-order Butterworth high-pass, bilinear with prewarping.
    pub fn butterworth_highpass(cutoff: f64, sample_rate: f64) -> Self {
        let k = libm::tan(PI * cutoff / sample_rate);
        let q = core::f64::consts::SQRT_2;
        let norm = 1.0 / (1.0 + q * k + k * k);
        Self {
            b: [norm, -2.0 * norm, norm],
            a: [2.0 * (k * k - 1.0) * norm, (1.0 - q * k + k * k) * norm],
        }
    }

    /// Magnitude of the frequency response at `freq`.
    pub fn magnitude(&self, freq: f64, sample_rate: f64) -> f64 {
        let w = 2.0 * PI * freq / sample_rate;
        let (c1, s1) = (libm::cos(w), libm::sin(w));
        let (c2, s2) = (libm::cos(2.0 * w), libm::sin(2.0 * w));
        let nr = self.b[0] + self.b[1] * c1 + self.b[2] * c2;
        let ni = -(self.b[1] * s1 + self.b[2] * s2);
        let dr = 1.0 + self.a[0] * c1 + self.a[1] * c2;
        let di = -(self.a[0] * s1 + self.a[1] * s2);
        libm::sqrt((nr * nr + ni * ni) / (dr * dr + di * di))
    }

    /// Run the section over `x` in place (transposed direct form II).
    pub fn process(&self, x: &mut [f64]) {
        let (mut z1, mut z2) = (0.0, 0.0);
        for v in x.iter_mut() {
            let input = *v;
            let y = self.b[0] * input + z1;
            z1 = self.b[1] * input - self.a[0] * y + z2;
            z2 = self.b[2] * input - self.a[1] * y;
            *v = y;
        }
    }
}

/// The two sections of the 4th-order band-pass: a 2nd-order Butterworth
/// high-pass at `low` followed by a 2nd-order Butterworth low-pass at `high`.
pub fn bandpass_sections(low: f64, high: f64, sample_rate: f64) -> [Biquad; 2] {
    [
        Biquad::butterworth_highpass(low, sample_rate),
        Biquad::butterworth_lowpass(high, sample_rate),
    ]
}

/// 4th-order Butterworth band-pass as a cascade of two biquads, single
/// forward pass. Output length equals input length.
pub fn bandpass(audio: &AudioBuffer, low: f64, high: f64) -> Result<AudioBuffer> {
    let fs = audio.sample_rate as f64;
    if !(low > 0.0 && low < high && high < fs / 2.0) {
        return Err(Error::InvalidInput(format!(
            "band [{low}, {high}] Hz invalid at {fs} Hz sampling"
        )));
    }
    let mut x: Vec<f64> = audio.samples.iter().map(|&s| s as f64).collect();
    for section in bandpass_sections(low, high, fs) {
        section.process(&mut x);
    }
    AudioBuffer::new(x.into_iter().map(|v| v as f32).collect(), audio.sample_rate)
}

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * libm::log10(1.0 + hz / 700.0)
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (libm::pow(10.0, mel / 2595.0) - 1.0)
}

/// Triangular HTK-scale filters spanning `[0, sample_rate / 2]`.
#[derive(Clone, Debug)]
pub struct MelFilterbank {
    n_mels: usize,
    n_bins: usize,
    weights: Vec<f64>,
    /// `n_mels + 2` edge frequencies; filter `j` peaks at `edges[j + 1]`.
    edges: Vec<f64>,
}

impl MelFilterbank {
    pub fn new(sample_rate: u32, n_fft: usize, n_mels: usize) -> Self {
        let nyquist = sample_rate as f64 / 2.0;
        let mel_max = hz_to_mel(nyquist);
        let edges: Vec<f64> = (0..n_mels + 2)
            .map(|i| mel_to_hz(mel_max * i as f64 / (n_mels + 1) as f64))
            .collect();
        let n_bins = n_fft / 2 + 1;
        let bin_hz = sample_rate as f64 / n_fft as f64;
        let mut weights = vec![0.0; n_mels * n_bins];
        for j in 0..n_mels {
            let (lo, mid, hi) = (edges[j], edges[j + 1], edges[j + 2]);
            for k in 0..n_bins {
                let f = k as f64 * bin_hz;
                let up = (f - lo) / (mid - lo);
                let down = (hi - f) / (hi - mid);
                weights[j * n_bins + k] = up.min(down).max(0.0);
            }
        }
        Self {
            n_mels,
            n_bins,
            weights,
            edges,
        }
    }

    /// Peak frequency of every filter, in Hz.
    pub fn center_frequencies(&self) -> &[f64] {
        &self.edges[1..self.n_mels + 1]
    }

    pub fn weights(&self, mel: usize) -> &[f64] {
        &self.weights[mel * self.n_bins..(mel + 1) * self.n_bins]
    }

    pub fn apply(&self, power: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate().take(self.n_mels) {
            *o = self
                .weights(j)
                .iter()
                .zip(power)
                .map(|(w, p)| w * p)
                .sum();
        }
    }
}

/// Periodic Hann window.
pub fn hann_window(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * libm::cos(2.0 * PI * i as f64 / n as f64))
        .collect()
}

/// Reusable log-mel analyzer (window, FFT plan and filterbank precomputed).
pub struct MelAnalyzer {
    cfg: DspConfig,
    window: Vec<f64>,
    fft: Fft,
    filterbank: MelFilterbank,
}

impl MelAnalyzer {
    pub fn new(cfg: DspConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            window: hann_window(cfg.n_fft),
            fft: Fft::new(cfg.n_fft),
            filterbank: MelFilterbank::new(cfg.target_rate, cfg.n_fft, cfg.n_mels),
            cfg,
        })
    }

    pub fn config(&self) -> &DspConfig {
        &self.cfg
    }

    pub fn filterbank(&self) -> &MelFilterbank {
        &self.filterbank
    }

    /// `floor(len / hop)` frames, no centering or padding.
    pub fn spectrogram(&self, audio: &AudioBuffer) -> Result<Spectrogram> {
        let cfg = &self.cfg;
        if audio.sample_rate != cfg.target_rate {
            return Err(Error::InvalidInput(format!(
                "audio at {} Hz, analyzer expects {} Hz",
                audio.sample_rate, cfg.target_rate
            )));
        }
        let n = audio.len();
        if n < cfg.n_fft {
            return Err(Error::InvalidInput(format!(
                "{n} samples is shorter than one {}-sample frame",
                cfg.n_fft
            )));
        }
        // With hop == n_fft this is floor(n / hop); with overlap the last
        // frame must still fit entirely.
        let frames = (n - cfg.n_fft) / cfg.hop + 1;
        let bins = cfg.n_fft / 2 + 1;
        let mut frame = vec![0.0; cfg.n_fft];
        let mut power = vec![0.0; bins];
        let mut mel = vec![0.0; cfg.n_mels];
        let mut values = Vec::with_capacity(frames * cfg.n_mels);
        for t in 0..frames {
            let start = t * cfg.hop;
            for (i, f) in frame.iter_mut().enumerate() {
                *f = audio.samples[start + i] as f64 * self.window[i];
            }
            self.fft.power_spectrum(&frame, &mut power);
            self.filterbank.apply(&power, &mut mel);
            values.extend(
                mel.iter()
                    .map(|&v| libm::log(v + cfg.log_epsilon) as f32),
            );
        }
        Spectrogram::new(frames, cfg.n_mels, values)
    }
}

/// Log-mel spectrogram of 16 kHz audio.
pub fn mel_spectrogram(audio: &AudioBuffer, cfg: &DspConfig) -> Result<Spectrogram> {
    MelAnalyzer::new(cfg.clone())?.spectrogram(audio)
}

/// Split into non-overlapping 64-frame chunks; trailing frames are dropped.
pub fn crop_chunks(spec: &Spectrogram, floor: f32) -> Result<Vec<MelChunk>> {
    if spec.mels != N_MELS {
        return Err(Error::Contract(format!(
            "chunks need {N_MELS} mel bands, spectrogram has {}",
            spec.mels
        )));
    }
    spec.values
        .chunks_exact(MelChunk::LEN)
        .map(|block| MelChunk::new(block.to_vec(), floor))
        .collect()
}

/// The whole front-end: resample, band-pass, log-mel, crop.
pub fn preprocess(audio: &AudioBuffer, cfg: &DspConfig) -> Result<Vec<MelChunk>> {
    cfg.validate()?;
    let audio = resample(audio, cfg.target_rate)?;
    let audio = bandpass(&audio, cfg.band_low, cfg.band_high)?;
    let spec = mel_spectrogram(&audio, cfg)?;
    crop_chunks(&spec, cfg.floor())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(freq: f64, rate: u32, n: usize, amp: f64) -> AudioBuffer {
        let s = (0..n)
            .map(|i| (amp * libm::sin(2.0 * PI * freq * i as f64 / rate as f64)) as f32)
            .collect();
        AudioBuffer::new(s, rate).unwrap()
    }

    #[test]
    fn audio_buffer_validation() {
        assert!(AudioBuffer::new(vec![], 16000).is_err());
        assert!(AudioBuffer::new(vec![0.0], 0).is_err());
        assert!(matches!(
            AudioBuffer::new(vec![0.0, f32::NAN], 16000),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn resample_identity_is_bitwise() {
        let a = sine(440.0, 16000, 1000, 0.7);
        let b = resample(&a, 16000).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn resample_preserves_dc_interior() {
        let a = AudioBuffer::new(vec![0.5; 48000], 48000).unwrap();
        let b = resample(&a, 16000).unwrap();
        assert_eq!(b.sample_rate(), 16000);
        assert_eq!(b.len(), 16000);
        for &v in &b.samples()[32..b.len() - 32] {
            assert!((v - 0.5).abs() < 1e-3, "{v}");
        }
    }

    #[test]
    fn resample_duration_within_one_sample() {
        for (n, from, to) in [(44100, 44100, 16000), (12345, 22050, 16000), (1000, 8000, 16000)] {
            let a = AudioBuffer::new(vec![0.1; n], from).unwrap();
            let b = resample(&a, to).unwrap();
            let exact = n as f64 * to as f64 / from as f64;
            assert!((b.len() as f64 - exact).abs() <= 1.0);
        }
    }

    #[test]
    fn bandpass_rejects_bad_edges() {
        let a = sine(1000.0, 16000, 512, 1.0);
        assert!(bandpass(&a, 0.0, 7600.0).is_err());
        assert!(bandpass(&a, 500.0, 400.0).is_err());
        assert!(bandpass(&a, 90.0, 8000.0).is_err());
    }

    #[test]
    fn bandpass_removes_dc() {
        let a = AudioBuffer::new(vec![1.0; 16000], 16000).unwrap();
        let b = bandpass(&a, 90.0, 7600.0).unwrap();
        assert_eq!(b.len(), a.len());
        let tail = &b.samples()[1600..];
        let rms = libm::sqrt(tail.iter().map(|&v| (v as f64).powi(2)).sum::<f64>() / tail.len() as f64);
        assert!(rms < 0.05, "rms {rms}");
    }

    #[test]
    fn silence_hits_log_floor() {
        let cfg = DspConfig::default();
        let a = AudioBuffer::new(vec![0.0; 1000], 16000).unwrap();
        let s = mel_spectrogram(&a, &cfg).unwrap();
        assert_eq!(s.frames(), 3);
        assert!(s.values().iter().all(|&v| v == cfg.floor()));
    }

    #[test]
    fn mel_rejects_short_or_wrong_rate() {
        let cfg = DspConfig::default();
        assert!(mel_spectrogram(&AudioBuffer::new(vec![0.0; 255], 16000).unwrap(), &cfg).is_err());
        assert!(mel_spectrogram(&AudioBuffer::new(vec![0.0; 1024], 8000).unwrap(), &cfg).is_err());
    }

    #[test]
    fn crop_counts() {
        let floor = default_floor();
        for (t, expected) in [(64, 1), (200, 3), (63, 0), (128, 2)] {
            let values: Vec<f32> = (0..t * N_MELS).map(|i| floor + (i % 97) as f32).collect();
            let spec = Spectrogram::new(t, N_MELS, values.clone()).unwrap();
            let chunks = crop_chunks(&spec, floor).unwrap();
            assert_eq!(chunks.len(), expected);
            for (c, chunk) in chunks.iter().enumerate() {
                assert_eq!(chunk.values(), &values[c * MelChunk::LEN..(c + 1) * MelChunk::LEN]);
            }
        }
    }

    #[test]
    fn chunk_validation() {
        let floor = default_floor();
        assert!(MelChunk::new(vec![0.0; 10], floor).is_err());
        assert!(MelChunk::new(vec![floor - 1.0; MelChunk::LEN], floor).is_err());
        assert!(MelChunk::new(vec![f32::INFINITY; MelChunk::LEN], floor).is_err());
        assert!(MelChunk::new(vec![floor; MelChunk::LEN], floor).is_ok());
    }

    #[test]
    fn config_validation() {
        assert!(DspConfig::default().validate().is_ok());
        let bad = DspConfig {
            band_high: 9000.0,
            ..DspConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = DspConfig {
            hop: 512,
            ..DspConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
