use std::f64::consts::PI;

use autodecompose_core::dsp::{
    self, bandpass, bandpass_sections, crop_chunks, mel_spectrogram, resample, AudioBuffer,
    DspConfig, MelChunk,
};
use rustfft::{num_complex::Complex, FftPlanner};

fn sine(freq: f64, rate: u32, n: usize, amp: f64) -> AudioBuffer {
    let samples = (0..n)
        .map(|i| (amp * (2.0 * PI * freq * i as f64 / rate as f64).sin()) as f32)
        .collect();
    AudioBuffer::new(samples, rate).unwrap()
}

fn fft_argmax_hz(x: &[f32], rate: u32) -> (f64, f64) {
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v as f64, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    let half = buf.len() / 2;
    let k = (1..half)
        .max_by(|&a, &b| buf[a].norm().total_cmp(&buf[b].norm()))
        .unwrap();
    let bin_hz = rate as f64 / buf.len() as f64;
    (k as f64 * bin_hz, bin_hz)
}

#[test]
fn resampled_tone_peaks_at_its_frequency() {
    for (f, from) in [(1000.0, 48_000), (1000.0, 44_100), (3000.0, 22_050), (440.0, 8_000)] {
        let audio = sine(f, from, from as usize, 0.8);
        let out = resample(&audio, 16_000).unwrap();
        assert_eq!(out.sample_rate(), 16_000);
        let (peak, bin) = fft_argmax_hz(out.samples(), 16_000);
        assert!((peak - f).abs() <= bin, "{f} Hz from {from} Hz peaked at {peak} Hz");
    }
}

#[test]
fn resampled_dc_holds_its_level() {
    let audio = AudioBuffer::new(vec![0.5; 48_000], 48_000).unwrap();
    let out = resample(&audio, 16_000).unwrap();
    for &v in &out.samples()[64..out.len() - 64] {
        assert!((v - 0.5).abs() < 1e-3);
    }
}

/// Independent closed form of the bilinear-transformed 2nd-order Butterworth
/// high-pass at `low` cascaded with the low-pass at `high`.
fn butterworth_oracle(f: f64, low: f64, high: f64, fs: f64) -> f64 {
    let w = (PI * f / fs).tan();
    let wl = (PI * low / fs).tan();
    let wh = (PI * high / fs).tan();
    let hp = 1.0 / (1.0 + (wl / w).powi(4)).sqrt();
    let lp = 1.0 / (1.0 + (w / wh).powi(4)).sqrt();
    hp * lp
}

fn steady_amplitude(x: &[f32], settle: usize) -> f64 {
    let tail = &x[settle..];
    let ms = tail.iter().map(|&v| (v as f64) * (v as f64)).sum::<f64>() / tail.len() as f64;
    (2.0 * ms).sqrt()
}

#[test]
fn bandpass_matches_analytic_butterworth() {
    let fs = 16_000.0;
    let (low, high) = (90.0, 7600.0);
    for f in [20.0, 60.0, 90.0, 200.0, 1000.0, 4000.0, 7000.0, 7600.0] {
        let out = bandpass(&sine(f, 16_000, 64_000, 1.0), low, high).unwrap();
        let measured = steady_amplitude(out.samples(), 16_000);
        let oracle = butterworth_oracle(f, low, high, fs);
        assert!(
            (measured - oracle).abs() < 2e-3,
            "{f} Hz: measured {measured}, analytic {oracle}"
        );
        let sections = bandpass_sections(low, high, fs);
        let designed: f64 = sections.iter().map(|s| s.magnitude(f, fs)).product();
        assert!((designed - oracle).abs() < 1e-9, "{f} Hz: design {designed} vs {oracle}");
    }
    let pass = steady_amplitude(bandpass(&sine(1000.0, 16_000, 32_000, 1.0), low, high).unwrap().samples(), 8000);
    let stop = steady_amplitude(bandpass(&sine(20.0, 16_000, 64_000, 1.0), low, high).unwrap().samples(), 16_000);
    assert!(pass >= 0.9, "1 kHz amplitude {pass}");
    assert!(stop <= 0.1, "20 Hz amplitude {stop}");
}

#[test]
fn bandpass_blocks_dc() {
    let dc = AudioBuffer::new(vec![1.0; 16_000], 16_000).unwrap();
    let out = bandpass(&dc, 90.0, 7600.0).unwrap();
    assert_eq!(out.len(), dc.len());
    let rms = (out.samples()[1600..].iter().map(|&v| (v as f64).powi(2)).sum::<f64>()
        / (out.len() - 1600) as f64)
        .sqrt();
    assert!(rms < 0.05, "rms {rms}");
}

/// HTK filter peaks recomputed from the mel formula, independent of the filterbank.
fn htk_centers() -> Vec<f64> {
    let mel = |f: f64| 2595.0 * (1.0 + f / 700.0).log10();
    let hz = |m: f64| 700.0 * (10f64.powf(m / 2595.0) - 1.0);
    let top = mel(8000.0);
    (1..=80).map(|i| hz(top * i as f64 / 81.0)).collect()
}

#[test]
fn tones_land_on_the_nearest_filter() {
    let centers = htk_centers();
    let cfg = DspConfig::default();
    for f in [500.0, 1000.0, 2000.0, 4000.0] {
        let expected = (0..80)
            .min_by(|&a, &b| (centers[a] - f).abs().total_cmp(&(centers[b] - f).abs()))
            .unwrap();
        let spec = mel_spectrogram(&sine(f, 16_000, 16_384, 0.5), &cfg).unwrap();
        for t in 0..spec.frames() {
            let row = spec.frame(t);
            let arg = (0..80).max_by(|&a, &b| row[a].total_cmp(&row[b])).unwrap();
            assert_eq!(arg, expected, "{f} Hz, frame {t}");
        }
    }
}

#[test]
fn one_chunk_per_1024_ms() {
    let cfg = DspConfig::default();
    let chunks = dsp::preprocess(&sine(700.0, 16_000, 16_384, 0.3), &cfg).unwrap();
    assert_eq!(chunks.len(), 1);
    assert_eq!(chunks[0].values().len(), MelChunk::FRAMES * MelChunk::MELS);
    let spec = mel_spectrogram(&sine(700.0, 16_000, 16_384, 0.3), &cfg).unwrap();
    assert_eq!((spec.frames(), spec.mels()), (64, 80));
}

#[test]
fn frame_count_law() {
    let cfg = DspConfig::default();
    for n in [256, 257, 511, 512, 1000, 16_383, 16_384, 40_000] {
        let audio = sine(300.0, 16_000, n, 0.2);
        assert_eq!(mel_spectrogram(&audio, &cfg).unwrap().frames(), n / 256, "n = {n}");
    }
}

#[test]
fn crop_drops_the_remainder() {
    let cfg = DspConfig::default();
    let spec = mel_spectrogram(&sine(300.0, 16_000, 200 * 256, 0.2), &cfg).unwrap();
    let chunks = crop_chunks(&spec, cfg.floor()).unwrap();
    assert_eq!(chunks.len(), 3);
    assert_eq!(chunks[2].values(), &spec.values()[128 * 80..192 * 80]);
    let short = mel_spectrogram(&sine(300.0, 16_000, 63 * 256, 0.2), &cfg).unwrap();
    assert!(crop_chunks(&short, cfg.floor()).unwrap().is_empty());
}

#[test]
fn silence_sits_on_the_floor() {
    let cfg = DspConfig::default();
    let spec = mel_spectrogram(&AudioBuffer::new(vec![0.0; 4096], 16_000).unwrap(), &cfg).unwrap();
    let floor = (cfg.log_epsilon).ln() as f32;
    assert!(spec.values().iter().all(|&v| v == floor));
}

#[test]
fn front_end_is_deterministic() {
    let cfg = DspConfig::default();
    let audio = sine(523.0, 44_100, 50_000, 0.4);
    let a = dsp::preprocess(&audio, &cfg).unwrap();
    let b = dsp::preprocess(&audio, &cfg).unwrap();
    assert_eq!(a, b);
}
