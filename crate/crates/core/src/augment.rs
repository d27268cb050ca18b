//! Complementary augmentations on log-mel chunks.
//!
//! The source-preserving view keeps every frame's spectrum intact but destroys
//! the time structure (segment-swap scrambling, then short time masks). The
//! content-preserving view keeps the time structure but moves and hides
//! spectral detail (cubic-spline frequency stretch/shrink, then frequency-band
//! masks above the protected low bins).
//!
//! Each random operation is split into a `*Draw` (the parameters pulled from
//! the [`RngStream`]) and its deterministic `apply`, so drawn parameters can be
//! recorded and replayed.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dsp::MelChunk;
use crate::spline::NaturalSpline;
use crate::{Error, Result, RngStream};

const FRAMES: usize = MelChunk::FRAMES;
const MELS: usize = MelChunk::MELS;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AugmentConfig {
    pub scramble_pivots_min: u32,
    pub scramble_pivots_max: u32,
    pub time_mask_segments: u32,
    /// Frames per time mask.
    pub time_mask_len: u32,
    pub stretch_min_pct: f64,
    pub stretch_max_pct: f64,
    pub freq_mask_max_segments: u32,
    /// Maximum mel bins per frequency mask.
    pub freq_mask_max_len: u32,
    /// Lowest mel bins that frequency masking never touches.
    pub freq_mask_protected_low_bins: u32,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            scramble_pivots_min: 5,
            scramble_pivots_max: 20,
            time_mask_segments: 2,
            time_mask_len: 2,
            stretch_min_pct: 2.0,
            stretch_max_pct: 15.0,
            freq_mask_max_segments: 15,
            freq_mask_max_len: 5,
            freq_mask_protected_low_bins: 10,
        }
    }
}

impl AugmentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.scramble_pivots_min > self.scramble_pivots_max {
            return Err(Error::Config("scramble_pivots_min exceeds scramble_pivots_max".into()));
        }
        if self.time_mask_len as usize > FRAMES {
            return Err(Error::Config(format!("time_mask_len must be at most {FRAMES}")));
        }
        if !(0.0 <= self.stretch_min_pct
            && self.stretch_min_pct < self.stretch_max_pct
            && self.stretch_max_pct < 100.0)
        {
            return Err(Error::Config(
                "stretch percentages need 0 <= min < max < 100".into(),
            ));
        }
        let protected = self.freq_mask_protected_low_bins as usize;
        if protected >= MELS {
            return Err(Error::Config(format!("protected bins must be below {MELS}")));
        }
        if self.freq_mask_max_segments > 0
            && (self.freq_mask_max_len == 0 || protected + self.freq_mask_max_len as usize > MELS)
        {
            return Err(Error::Config(
                "frequency masks must fit above the protected bins".into(),
            ));
        }
        Ok(())
    }
}

/// Swap the two segments around `pivot`: `[x0..xp, xp..xn]` becomes
/// `[xp..xn, x0..xp]`.
pub fn swap_segments<T>(frames: &mut [T], pivot: usize) {
    frames.rotate_left(pivot);
}

/// Pivots for time scrambling, applied in order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScrambleDraw {
    pub pivots: Vec<usize>,
}

impl ScrambleDraw {
    /// `k ~ U{min..=max}` pivots, each `~ U{1..=63}`.
    pub fn draw(rng: &mut RngStream, cfg: &AugmentConfig) -> Self {
        let k = rng.int_inclusive(cfg.scramble_pivots_min as u64, cfg.scramble_pivots_max as u64);
        let pivots = (0..k)
            .map(|_| rng.int_inclusive(1, FRAMES as u64 - 1) as usize)
            .collect();
        Self { pivots }
    }

    pub fn apply(&self, chunk: &MelChunk) -> MelChunk {
        let mut order: Vec<usize> = (0..FRAMES).collect();
        for &p in &self.pivots {
            swap_segments(&mut order, p);
        }
        let mut out = Vec::with_capacity(MelChunk::LEN);
        for &t in &order {
            out.extend_from_slice(chunk.frame(t));
        }
        MelChunk::from_raw(out, chunk.floor())
    }
}

/// Start frames of the time masks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeMaskDraw {
    pub starts: Vec<usize>,
    pub len: usize,
}

impl TimeMaskDraw {
    pub fn draw(rng: &mut RngStream, cfg: &AugmentConfig) -> Self {
        let len = cfg.time_mask_len as usize;
        let starts = if len == 0 {
            Vec::new()
        } else {
            (0..cfg.time_mask_segments)
                .map(|_| rng.int_inclusive(0, (FRAMES - len) as u64) as usize)
                .collect()
        };
        Self { starts, len }
    }

    pub fn apply(&self, chunk: &MelChunk) -> MelChunk {
        let floor = chunk.floor();
        let mut values = chunk.values().to_vec();
        for &s in &self.starts {
            let end = (s + self.len).min(FRAMES);
            values[s * MELS..end * MELS].fill(floor);
        }
        MelChunk::from_raw(values, floor)
    }
}

/// Frequency scale factor `r`; `out[m] = in(m / r)`, so `r > 1` raises pitch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StretchDraw {
    pub ratio: f64,
}

impl StretchDraw {
    /// Magnitude `u ~ U[min%, max%]`, sign `+` or `-` with probability 1/2.
    pub fn draw(rng: &mut RngStream, cfg: &AugmentConfig) -> Self {
        let u = rng.uniform_range(cfg.stretch_min_pct / 100.0, cfg.stretch_max_pct / 100.0);
        let ratio = if rng.coin() { 1.0 + u } else { 1.0 - u };
        Self { ratio }
    }

    pub fn apply(&self, chunk: &MelChunk) -> MelChunk {
        let floor = chunk.floor();
        let last = (MELS - 1) as f64;
        let queries: Vec<f64> = (0..MELS)
            .map(|m| (m as f64 / self.ratio).clamp(0.0, last))
            .collect();
        let mut out = Vec::with_capacity(MelChunk::LEN);
        let mut frame = [0.0f64; MELS];
        for t in 0..FRAMES {
            for (f, &v) in frame.iter_mut().zip(chunk.frame(t)) {
                *f = v as f64;
            }
            let spline = NaturalSpline::new(&frame);
            // Clamping at the floor stops spline overshoot from leaving the
            // valid log range.
            out.extend(queries.iter().map(|&q| (spline.eval(q) as f32).max(floor)));
        }
        MelChunk::from_raw(out, floor)
    }
}

/// Frequency masks as `(start_bin, len)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreqMaskDraw {
    pub segments: Vec<(usize, usize)>,
}

impl FreqMaskDraw {
    /// `s ~ U{1..=max}` segments, each `len ~ U{1..=max_len}` starting at
    /// `U{protected..=80-len}`.
    pub fn draw(rng: &mut RngStream, cfg: &AugmentConfig) -> Self {
        if cfg.freq_mask_max_segments == 0 || cfg.freq_mask_max_len == 0 {
            return Self {
                segments: Vec::new(),
            };
        }
        let protected = cfg.freq_mask_protected_low_bins as u64;
        let s = rng.int_inclusive(1, cfg.freq_mask_max_segments as u64);
        let segments = (0..s)
            .map(|_| {
                let len = rng.int_inclusive(1, cfg.freq_mask_max_len as u64);
                let start = rng.int_inclusive(protected, MELS as u64 - len);
                (start as usize, len as usize)
            })
            .collect();
        Self { segments }
    }

    pub fn apply(&self, chunk: &MelChunk) -> MelChunk {
        let floor = chunk.floor();
        let mut values = chunk.values().to_vec();
        for frame in values.chunks_exact_mut(MELS) {
            for &(start, len) in &self.segments {
                frame[start..(start + len).min(MELS)].fill(floor);
            }
        }
        MelChunk::from_raw(values, floor)
    }
}

/// Parameters drawn for one source-preserving view.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceViewDraw {
    pub scramble: ScrambleDraw,
    pub time_mask: TimeMaskDraw,
}

impl SourceViewDraw {
    pub fn draw(rng: &mut RngStream, cfg: &AugmentConfig) -> Self {
        let scramble = ScrambleDraw::draw(rng, cfg);
        let time_mask = TimeMaskDraw::draw(rng, cfg);
        Self {
            scramble,
            time_mask,
        }
    }

    pub fn apply(&self, chunk: &MelChunk) -> MelChunk {
        self.time_mask.apply(&self.scramble.apply(chunk))
    }
}

/// Parameters drawn for one content-preserving view.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContentViewDraw {
    pub stretch: StretchDraw,
    pub freq_mask: FreqMaskDraw,
}

impl ContentViewDraw {
    pub fn draw(rng: &mut RngStream, cfg: &AugmentConfig) -> Self {
        let stretch = StretchDraw::draw(rng, cfg);
        let freq_mask = FreqMaskDraw::draw(rng, cfg);
        Self { stretch, freq_mask }
    }

    pub fn apply(&self, chunk: &MelChunk) -> MelChunk {
        self.freq_mask.apply(&self.stretch.apply(chunk))
    }
}

pub fn time_scramble(chunk: &MelChunk, rng: &mut RngStream, cfg: &AugmentConfig) -> MelChunk {
    ScrambleDraw::draw(rng, cfg).apply(chunk)
}

pub fn time_mask(chunk: &MelChunk, rng: &mut RngStream, cfg: &AugmentConfig) -> MelChunk {
    TimeMaskDraw::draw(rng, cfg).apply(chunk)
}

pub fn freq_stretch(chunk: &MelChunk, rng: &mut RngStream, cfg: &AugmentConfig) -> MelChunk {
    StretchDraw::draw(rng, cfg).apply(chunk)
}

pub fn freq_mask(chunk: &MelChunk, rng: &mut RngStream, cfg: &AugmentConfig) -> MelChunk {
    FreqMaskDraw::draw(rng, cfg).apply(chunk)
}

/// Source-preserving view: time scramble, then time mask.
pub fn augment_source_preserving(
    chunk: &MelChunk,
    rng: &mut RngStream,
    cfg: &AugmentConfig,
) -> MelChunk {
    SourceViewDraw::draw(rng, cfg).apply(chunk)
}

/// Content-preserving view: frequency stretch, then frequency mask.
pub fn augment_content_preserving(
    chunk: &MelChunk,
    rng: &mut RngStream,
    cfg: &AugmentConfig,
) -> MelChunk {
    ContentViewDraw::draw(rng, cfg).apply(chunk)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::default_floor;

    fn ramp_chunk() -> MelChunk {
        MelChunk::from_fn(default_floor(), |t, m| (t * 3 + m) as f32 * 0.1 - 2.0).unwrap()
    }

    #[test]
    fn toy_segment_swap() {
        let mut frames = ['a', 'b', 'c', 'd'];
        swap_segments(&mut frames, 2);
        assert_eq!(frames, ['c', 'd', 'a', 'b']);
    }

    #[test]
    fn zero_pivots_is_identity() {
        let c = ramp_chunk();
        let d = ScrambleDraw { pivots: Vec::new() };
        assert_eq!(d.apply(&c), c);
        let cfg = AugmentConfig {
            scramble_pivots_min: 0,
            scramble_pivots_max: 0,
            ..AugmentConfig::default()
        };
        assert_eq!(time_scramble(&c, &mut RngStream::new(3), &cfg), c);
    }

    #[test]
    fn scramble_draws_in_range() {
        let cfg = AugmentConfig::default();
        let mut rng = RngStream::new(11);
        for _ in 0..200 {
            let d = ScrambleDraw::draw(&mut rng, &cfg);
            assert!((5..=20).contains(&d.pivots.len()));
            assert!(d.pivots.iter().all(|&p| (1..=63).contains(&p)));
        }
    }

    #[test]
    fn stretch_unit_ratio_is_identity() {
        let c = ramp_chunk();
        let out = StretchDraw { ratio: 1.0 }.apply(&c);
        for (a, b) in out.values().iter().zip(c.values()) {
            assert!((a - b).abs() <= 1e-6);
        }
    }

    #[test]
    fn stretch_affine_ramp() {
        let c = MelChunk::from_fn(default_floor(), |_, m| m as f32).unwrap();
        let out = StretchDraw { ratio: 1.25 }.apply(&c);
        for t in 0..FRAMES {
            for m in 0..MELS {
                let expected = m as f32 / 1.25;
                assert!((out.get(t, m) - expected).abs() < 1e-4, "{t},{m}");
            }
        }
        // Shrinking queries past bin 79 clamp to the last bin.
        let out = StretchDraw { ratio: 0.9 }.apply(&c);
        assert!((out.get(0, 79) - 79.0).abs() < 1e-4);
    }

    #[test]
    fn stretch_keeps_constants() {
        let c = MelChunk::from_fn(default_floor(), |t, _| t as f32 * 0.05 - 1.0).unwrap();
        for ratio in [0.85, 0.98, 1.02, 1.15] {
            let out = StretchDraw { ratio }.apply(&c);
            for (a, b) in out.values().iter().zip(c.values()) {
                assert!((a - b).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn stretch_draw_bounds() {
        let cfg = AugmentConfig::default();
        let mut rng = RngStream::new(5);
        let (mut up, mut down) = (0, 0);
        for _ in 0..1000 {
            let r = StretchDraw::draw(&mut rng, &cfg).ratio;
            let u = (r - 1.0).abs();
            assert!((0.02..=0.15).contains(&u), "{r}");
            if r > 1.0 {
                up += 1
            } else {
                down += 1
            }
        }
        assert!(up > 400 && down > 400);
    }

    #[test]
    fn freq_mask_protects_low_bins() {
        let c = ramp_chunk();
        let cfg = AugmentConfig::default();
        let mut rng = RngStream::new(8);
        for _ in 0..100 {
            let draw = FreqMaskDraw::draw(&mut rng, &cfg);
            assert!((1..=15).contains(&draw.segments.len()));
            let out = draw.apply(&c);
            for t in 0..FRAMES {
                assert_eq!(&out.frame(t)[..10], &c.frame(t)[..10]);
            }
            let masked: usize = (0..MELS).filter(|&m| out.get(0, m) != c.get(0, m)).count();
            assert!(masked <= 75);
        }
    }

    #[test]
    fn disabled_masks_draw_nothing() {
        let cfg = AugmentConfig {
            freq_mask_max_segments: 0,
            time_mask_segments: 0,
            ..AugmentConfig::default()
        };
        let mut rng = RngStream::new(1);
        assert!(FreqMaskDraw::draw(&mut rng, &cfg).segments.is_empty());
        assert!(TimeMaskDraw::draw(&mut rng, &cfg).starts.is_empty());
    }

    #[test]
    fn config_validation() {
        assert!(AugmentConfig::default().validate().is_ok());
        let bad = AugmentConfig {
            stretch_min_pct: 20.0,
            ..AugmentConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = AugmentConfig {
            freq_mask_protected_low_bins: 80,
            ..AugmentConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
