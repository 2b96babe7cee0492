//! Waveform <-> log-power-spectral feature conversion and context expansion.
//!
//! Analysis windows the signal with a symmetric Hann window, takes the DFT,
//! and keeps `fft_size/2 + 1` bins as `ln(|X|^2 + eps)` plus the phase.
//! Synthesis rebuilds complex frames from LPS magnitude and a phase matrix
//! (typically the preserved noisy phase), inverse-transforms, and
//! overlap-adds with window-sum normalization, which makes
//! analyze -> synthesize an interior-exact round trip.

pub mod fft;

use crate::error::CoreError;
use crate::math;
use crate::tensor::Tensor;
use crate::Result;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use fft::Fft;

/// Floor added to |X|^2 before the log so silent frames stay finite.
pub const LPS_EPS: f64 = 1e-10;

/// Minimum overlap-add window sum accepted for normalization.
const WSUM_FLOOR: f64 = 0.1;

/// STFT geometry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StftConfig {
    pub sample_rate: u32,
    pub frame_len: usize,
    pub frame_shift: usize,
    pub fft_size: usize,
}

impl Default for StftConfig {
    /// 32 ms frames with 16 ms shift at 16 kHz and a 512-point DFT.
    fn default() -> Self {
        StftConfig { sample_rate: 16_000, frame_len: 512, frame_shift: 256, fft_size: 512 }
    }
}

impl StftConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sample_rate == 0 {
            return Err(CoreError::invalid("sample_rate must be positive"));
        }
        if self.frame_shift == 0 || self.frame_len % self.frame_shift != 0 {
            return Err(CoreError::invalid(format!(
                "frame_shift {} must divide frame_len {}",
                self.frame_shift, self.frame_len
            )));
        }
        if self.fft_size < self.frame_len {
            return Err(CoreError::invalid(format!(
                "fft_size {} must be >= frame_len {}",
                self.fft_size, self.frame_len
            )));
        }
        if !self.fft_size.is_power_of_two() {
            return Err(CoreError::invalid(format!("fft_size {} must be a power of two", self.fft_size)));
        }
        Ok(())
    }

    /// Number of spectral bins kept per frame: `fft_size/2 + 1`.
    pub fn bins(&self) -> usize {
        self.fft_size / 2 + 1
    }

    /// Frame count produced by [`analyze`] for a signal of `len` samples.
    pub fn frame_count(&self, len: usize) -> usize {
        if len < self.frame_len {
            0
        } else {
            1 + (len - self.frame_len) / self.frame_shift
        }
    }
}

/// Mono time-domain signal with unitless amplitude, nominally in `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Waveform {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Self {
        Waveform { samples, sample_rate }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    fn validate(&self) -> Result<()> {
        if self.sample_rate == 0 {
            return Err(CoreError::invalid("waveform sample_rate must be positive"));
        }
        if self.samples.iter().any(|s| !s.is_finite()) {
            return Err(CoreError::invalid("waveform contains non-finite samples"));
        }
        Ok(())
    }
}

/// Complex STFT frames, split into real and imaginary parts (`N x bins`).
#[derive(Clone, Debug)]
pub struct Spectrogram {
    pub re: Tensor,
    pub im: Tensor,
}

impl Spectrogram {
    pub fn frames(&self) -> usize {
        self.re.rows()
    }

    pub fn bins(&self) -> usize {
        self.re.cols()
    }
}

/// Log power spectra: `ln(|X|^2 + eps)`, one row per frame.
#[derive(Clone, Debug, PartialEq)]
pub struct LpsFeatures {
    pub frames: Tensor,
}

impl LpsFeatures {
    pub fn frame_count(&self) -> usize {
        self.frames.rows()
    }

    pub fn bins(&self) -> usize {
        self.frames.cols()
    }
}

/// Per-frame, per-bin phase angles in `(-pi, pi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Phase {
    pub frames: Tensor,
}

/// Context-expanded features: each row is the vertical concatenation of the
/// `2M+1` neighboring source rows (edges replicated).
#[derive(Clone, Debug, PartialEq)]
pub struct ContextFeatures {
    pub frames: Tensor,
    pub radius: usize,
}

fn hann_window(len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    (0..len)
        .map(|i| 0.5 * (1.0 - math::cos(math::TWO_PI * i as f64 / (len - 1) as f64)))
        .collect()
}

/// Complex STFT of a waveform.
pub fn stft(w: &Waveform, cfg: &StftConfig) -> Result<Spectrogram> {
    cfg.validate()?;
    w.validate()?;
    if w.len() < cfg.frame_len {
        return Err(CoreError::invalid(format!(
            "signal of {} samples is shorter than one frame ({})",
            w.len(),
            cfg.frame_len
        )));
    }
    let n_frames = cfg.frame_count(w.len());
    let bins = cfg.bins();
    let window = hann_window(cfg.frame_len);
    let fft = Fft::new(cfg.fft_size);

    let mut re_out = Tensor::zeros(&[n_frames, bins]);
    let mut im_out = Tensor::zeros(&[n_frames, bins]);
    let mut buf_re = vec![0.0; cfg.fft_size];
    let mut buf_im = vec![0.0; cfg.fft_size];
    for n in 0..n_frames {
        let start = n * cfg.frame_shift;
        for i in 0..cfg.frame_len {
            buf_re[i] = w.samples[start + i] * window[i];
        }
        for v in buf_re[cfg.frame_len..].iter_mut() {
            *v = 0.0;
        }
        buf_im.fill(0.0);
        fft.forward(&mut buf_re, &mut buf_im);
        re_out.row_mut(n).copy_from_slice(&buf_re[..bins]);
        im_out.row_mut(n).copy_from_slice(&buf_im[..bins]);
    }
    Ok(Spectrogram { re: re_out, im: im_out })
}

/// STFT analysis to log power spectra plus preserved phase.
pub fn analyze(w: &Waveform, cfg: &StftConfig) -> Result<(LpsFeatures, Phase)> {
    let spec = stft(w, cfg)?;
    let n_frames = spec.frames();
    let bins = spec.bins();
    let mut lps = Tensor::zeros(&[n_frames, bins]);
    let mut phase = Tensor::zeros(&[n_frames, bins]);
    for n in 0..n_frames {
        let (sr, si) = (spec.re.row(n), spec.im.row(n));
        let lr = lps.row_mut(n);
        for b in 0..bins {
            lr[b] = math::ln(sr[b] * sr[b] + si[b] * si[b] + LPS_EPS);
        }
        let pr = phase.row_mut(n);
        for b in 0..bins {
            let mut a = math::atan2(si[b], sr[b]);
            if a == -math::PI {
                a = math::PI;
            }
            pr[b] = a;
        }
    }
    Ok((LpsFeatures { frames: lps }, Phase { frames: phase }))
}

/// Inverse STFT by overlap-add with window-sum normalization.
///
/// Output length is `frame_len + (N-1) * frame_shift`. Samples whose window
/// sum is (near) zero — only possible at the very edges — are emitted as 0.
pub fn synthesize(lps: &LpsFeatures, phase: &Phase, cfg: &StftConfig) -> Result<Waveform> {
    cfg.validate()?;
    if lps.frames.dims() != phase.frames.dims() {
        return Err(CoreError::invalid(format!(
            "LPS shape {:?} != phase shape {:?}",
            lps.frames.dims(),
            phase.frames.dims()
        )));
    }
    let bins = cfg.bins();
    if lps.bins() != bins {
        return Err(CoreError::invalid(format!(
            "LPS has {} bins but config expects {}",
            lps.bins(),
            bins
        )));
    }
    let n_frames = lps.frame_count();
    if n_frames == 0 {
        return Err(CoreError::invalid("cannot synthesize zero frames"));
    }

    let window = hann_window(cfg.frame_len);
    let fft = Fft::new(cfg.fft_size);
    let out_len = cfg.frame_len + (n_frames - 1) * cfg.frame_shift;
    let mut out = vec![0.0; out_len];
    let mut wsum = vec![0.0; out_len];

    let mut re = vec![0.0; cfg.fft_size];
    let mut im = vec![0.0; cfg.fft_size];
    for n in 0..n_frames {
        let (lr, pr) = (lps.frames.row(n), phase.frames.row(n));
        for b in 0..bins {
            let mag = math::exp(lr[b] / 2.0);
            re[b] = mag * math::cos(pr[b]);
            im[b] = mag * math::sin(pr[b]);
        }
        // Hermitian extension for a real signal
        for k in 1..cfg.fft_size / 2 {
            re[cfg.fft_size - k] = re[k];
            im[cfg.fft_size - k] = -im[k];
        }
        im[0] = 0.0;
        im[cfg.fft_size / 2] = 0.0;
        fft.inverse(&mut re, &mut im);

        let start = n * cfg.frame_shift;
        for i in 0..cfg.frame_len {
            out[start + i] += re[i];
            wsum[start + i] += window[i];
        }
    }
    for (o, &ws) in out.iter_mut().zip(wsum.iter()) {
        if ws >= WSUM_FLOOR {
            *o /= ws;
        } else {
            // window tails at the signal edges: too little weight to
            // renormalize without amplifying noise, emit silence instead
            *o = 0.0;
        }
    }
    Ok(Waveform::new(out, cfg.sample_rate))
}

/// Stack each row with its `radius` neighbors on both sides (edge rows
/// replicated), widening `N x F` to `N x F*(2*radius+1)`.
pub fn context_expand(x: &Tensor, radius: usize) -> Result<ContextFeatures> {
    let n = x.rows();
    let f = x.cols();
    if n == 0 || x.numel() == 0 {
        return Err(CoreError::invalid("context_expand on empty input"));
    }
    let width = f * (2 * radius + 1);
    let mut out = Tensor::zeros(&[n, width]);
    for row in 0..n {
        let dst = out.row_mut(row);
        for (block, off) in (-(radius as isize)..=radius as isize).enumerate() {
            let src = (row as isize + off).clamp(0, n as isize - 1) as usize;
            dst[block * f..(block + 1) * f].copy_from_slice(x.row(src));
        }
    }
    Ok(ContextFeatures { frames: out, radius })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    fn random_waveform(len: usize, seed: u64) -> Waveform {
        let mut rng = SeededRng::new(seed);
        Waveform::new((0..len).map(|_| rng.range(-0.5, 0.5)).collect(), 16_000)
    }

    fn default_cfg() -> StftConfig {
        StftConfig::default()
    }

    #[test]
    fn zero_waveform_gives_floor_lps_and_zero_phase() {
        let w = Waveform::new(vec![0.0; 1024], 16_000);
        let (lps, ph) = analyze(&w, &default_cfg()).unwrap();
        assert_eq!(lps.frame_count(), 3); // 1 + (1024-512)/256
        assert_eq!(lps.bins(), 257);
        let expected = math::ln(LPS_EPS);
        assert!((expected + 23.0258).abs() < 1e-3);
        for v in lps.frames.data() {
            assert!((v - expected).abs() < 1e-12);
        }
        for v in ph.frames.data() {
            assert_eq!(*v, 0.0);
        }
    }

    #[test]
    fn too_short_signal_is_rejected() {
        let w = Waveform::new(vec![0.0; 100], 16_000);
        assert!(matches!(analyze(&w, &default_cfg()), Err(CoreError::InvalidInput(_))));
    }

    #[test]
    fn sine_1khz_peaks_at_bin_32() {
        let cfg = default_cfg();
        let n = 4096;
        let samples: Vec<f64> =
            (0..n).map(|t| math::sin(math::TWO_PI * 1000.0 * t as f64 / 16_000.0)).collect();
        let (lps, _) = analyze(&Waveform::new(samples.clone(), 16_000), &cfg).unwrap();
        for frame in 0..lps.frame_count() {
            let row = lps.frames.row(frame);
            let argmax = row.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
            assert_eq!(argmax, 32, "frame {frame}");
        }

        // independent oracle: direct DFT sum of the first windowed frame
        let window = hann_window(cfg.frame_len);
        let mut best = (0usize, f64::NEG_INFINITY);
        for b in 0..cfg.bins() {
            let (mut re, mut im) = (0.0, 0.0);
            for t in 0..cfg.frame_len {
                let angle = -math::TWO_PI * (b * t) as f64 / cfg.fft_size as f64;
                re += samples[t] * window[t] * math::cos(angle);
                im += samples[t] * window[t] * math::sin(angle);
            }
            let p = re * re + im * im;
            if p > best.1 {
                best = (b, p);
            }
        }
        assert_eq!(best.0, 32);
    }

    #[test]
    fn round_trip_reconstructs_interior() {
        let cfg = default_cfg();
        let w = random_waveform(8000, 21);
        let (lps, ph) = analyze(&w, &cfg).unwrap();
        let back = synthesize(&lps, &ph, &cfg).unwrap();
        // interior: skip one frame on both ends
        let lo = cfg.frame_len;
        let hi = back.len().min(w.len()) - cfg.frame_len;
        let mut err = 0.0;
        let mut ref_pow = 0.0;
        for t in lo..hi {
            let d = back.samples[t] - w.samples[t];
            err += d * d;
            ref_pow += w.samples[t] * w.samples[t];
        }
        let rel = math::sqrt(err / ref_pow);
        assert!(rel < 1e-6, "relative RMS {rel}");
    }

    #[test]
    fn synthesize_of_floor_lps_is_near_silence() {
        let cfg = default_cfg();
        let n_frames = 5;
        let lps = LpsFeatures { frames: Tensor::filled(&[n_frames, 257], math::ln(LPS_EPS)) };
        let mut rng = SeededRng::new(5);
        let phase = Phase {
            frames: Tensor::from_fn(&[n_frames, 257], |_| rng.range(-3.1, 3.1)),
        };
        let w = synthesize(&lps, &phase, &cfg).unwrap();
        assert_eq!(w.len(), cfg.frame_len + (n_frames - 1) * cfg.frame_shift);
        for s in &w.samples {
            assert!(s.abs() < 1e-4);
        }
    }

    #[test]
    fn single_bin_synthesizes_a_1khz_tone() {
        let cfg = default_cfg();
        let n_frames = 40;
        let mut lps = Tensor::filled(&[n_frames, 257], math::ln(LPS_EPS));
        for n in 0..n_frames {
            // phase advance per frame at bin 32 is 2*pi*32*256/512 = 32*pi = 0 (mod 2*pi),
            // so constant zero phase is coherent across frames
            lps.set(n, 32, 0.0);
        }
        let phase = Phase { frames: Tensor::zeros(&[n_frames, 257]) };
        let w = synthesize(&LpsFeatures { frames: lps }, &phase, &cfg).unwrap();

        // zero-crossing oracle on the interior
        let inner = &w.samples[cfg.frame_len..w.len() - cfg.frame_len];
        let crossings = inner.windows(2).filter(|p| (p[0] >= 0.0) != (p[1] >= 0.0)).count();
        let seconds = inner.len() as f64 / cfg.sample_rate as f64;
        let freq = crossings as f64 / 2.0 / seconds;
        assert!((freq - 1000.0).abs() / 1000.0 < 0.02, "measured {freq} Hz");
    }

    #[test]
    fn synthesize_rejects_shape_mismatch() {
        let cfg = default_cfg();
        let lps = LpsFeatures { frames: Tensor::zeros(&[4, 257]) };
        let ph = Phase { frames: Tensor::zeros(&[3, 257]) };
        assert!(matches!(synthesize(&lps, &ph, &cfg), Err(CoreError::InvalidInput(_))));
    }

    #[test]
    fn lps_is_sign_invariant() {
        let cfg = default_cfg();
        let w = random_waveform(3000, 33);
        let neg = Waveform::new(w.samples.iter().map(|s| -s).collect(), w.sample_rate);
        let (a, _) = analyze(&w, &cfg).unwrap();
        let (b, _) = analyze(&neg, &cfg).unwrap();
        assert_eq!(a.frames, b.frames);
    }

    #[test]
    fn scaling_shifts_lps_by_2_ln_c() {
        let cfg = default_cfg();
        // loud signal so |X|^2 >> eps in every bin
        let mut rng = SeededRng::new(44);
        let w = Waveform::new((0..3000).map(|_| rng.range(-0.9, 0.9)).collect(), 16_000);
        let c = 3.0;
        let scaled = Waveform::new(w.samples.iter().map(|s| s * c).collect(), 16_000);
        let (a, _) = analyze(&w, &cfg).unwrap();
        let (b, _) = analyze(&scaled, &cfg).unwrap();
        let shift = 2.0 * math::ln(c);
        for (x, y) in a.frames.data().iter().zip(b.frames.data()) {
            if *x > -15.0 {
                assert!((y - x - shift).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn context_identity_at_radius_zero() {
        let x = Tensor::matrix(3, 2, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let c = context_expand(&x, 0).unwrap();
        assert_eq!(c.frames, x);
    }

    #[test]
    fn context_replicates_edges() {
        let x = Tensor::matrix(3, 1, vec![1.0, 2.0, 3.0]);
        let c = context_expand(&x, 1).unwrap();
        assert_eq!(c.frames.row(0), &[1.0, 1.0, 2.0]);
        assert_eq!(c.frames.row(1), &[1.0, 2.0, 3.0]);
        assert_eq!(c.frames.row(2), &[2.0, 3.0, 3.0]);
    }

    #[test]
    fn context_width_is_2827_for_default_geometry() {
        let x = Tensor::zeros(&[4, 257]);
        let c = context_expand(&x, 5).unwrap();
        assert_eq!(c.frames.cols(), 2827);
    }

    #[test]
    fn context_middle_block_equals_source_row() {
        let mut rng = SeededRng::new(9);
        let x = Tensor::from_fn(&[7, 5], |_| rng.gaussian());
        let m = 2;
        let c = context_expand(&x, m).unwrap();
        for n in 0..7 {
            let row = c.frames.row(n);
            assert_eq!(&row[m * 5..(m + 1) * 5], x.row(n));
        }
    }

    #[test]
    fn context_rejects_empty() {
        let x = Tensor::zeros(&[0, 5]);
        assert!(context_expand(&x, 1).is_err());
    }
}
