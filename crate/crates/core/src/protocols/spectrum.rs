//! Fourier analysis of Ramsey traces.

use rustfft::FftPlanner;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub const MIN_SAMPLES: usize = 16;
/// Peaks closer than this in relative magnitude count as tied. Leakage from
/// a neighbouring tone alone moves equal tones apart by about a percent.
pub const TIE_FRACTION: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    #[default]
    Rectangular,
    Hann,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeakMethod {
    /// Three-point parabola through the log-magnitudes around the maximum.
    ParabolicLog,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakOptions {
    pub window: Window,
    pub zero_pad: usize,
    /// Secondary peaks are reported down to this fraction of the dominant one.
    pub secondary_fraction: f64,
}

impl Default for PeakOptions {
    fn default() -> Self {
        Self {
            window: Window::Rectangular,
            zero_pad: 8,
            secondary_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub freq: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimate {
    /// Hz, from 0 to Nyquist.
    pub freq_grid: Vec<f64>,
    pub magnitudes: Vec<f64>,
    /// Dominant peak; `None` for a flat trace.
    pub peak: Option<Peak>,
    /// Every local maximum above `secondary_fraction` of the dominant one,
    /// strongest first.
    pub peaks: Vec<Peak>,
    /// Spacing of the zero-padded grid in Hz.
    pub bin_width: f64,
    pub method: PeakMethod,
}

impl SpectrumEstimate {
    pub fn peak_freq(&self) -> Option<f64> {
        self.peak.map(|p| p.freq)
    }
}

fn sample_spacing(delta_ts: &[f64]) -> Result<f64> {
    let dt = (delta_ts[delta_ts.len() - 1] - delta_ts[0]) / (delta_ts.len() - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::NonUniformSampling);
    }
    for w in delta_ts.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt {
            return Err(Error::NonUniformSampling);
        }
    }
    Ok(dt)
}

/// Locates the dominant frequency of a uniformly sampled trace.
pub fn extract_peak(signal: &[f64], delta_ts: &[f64], opts: &PeakOptions) -> Result<SpectrumEstimate> {
    if signal.len() != delta_ts.len() {
        return Err(Error::DimensionMismatch {
            expected: delta_ts.len(),
            got: signal.len(),
        });
    }
    let n = signal.len();
    if n < MIN_SAMPLES {
        return Err(Error::TooFewSamples { required: MIN_SAMPLES, got: n });
    }
    if opts.zero_pad == 0 {
        return Err(invalid("zero_pad", "must be at least 1"));
    }
    let dt = sample_spacing(delta_ts)?;
    let mean = signal.iter().sum::<f64>() / n as f64;
    let m = n * opts.zero_pad;
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (k, &x) in signal.iter().enumerate() {
        let w = match opts.window {
            Window::Rectangular => 1.0,
            Window::Hann => 0.5 - 0.5 * (std::f64::consts::TAU * k as f64 / (n - 1) as f64).cos(),
        };
        buf[k] = Complex64::new((x - mean) * w, 0.0);
    }
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let half = m / 2;
    let bin_width = 1.0 / (m as f64 * dt);
    let magnitudes: Vec<f64> = buf[..=half].iter().map(|z| z.norm()).collect();
    let freq_grid: Vec<f64> = (0..=half).map(|k| k as f64 * bin_width).collect();

    let scale = signal.iter().fold(1.0f64, |a, x| a.max(x.abs())) * n as f64;
    let floor = 1e-10 * scale;
    let mut found: Vec<Peak> = (1..half)
        .filter(|&k| magnitudes[k] > floor && magnitudes[k] > magnitudes[k - 1] && magnitudes[k] >= magnitudes[k + 1])
        .map(|k| interpolate(&magnitudes, k, bin_width))
        .collect();
    found.sort_by(|a, b| b.magnitude.total_cmp(&a.magnitude));
    // near-ties with the tallest peak go to the lowest frequency
    if let Some(top) = found.first().map(|p| p.magnitude) {
        let tied = found.iter().take_while(|q| top - q.magnitude <= TIE_FRACTION * top).count();
        found[..tied].sort_by(|a, b| a.freq.total_cmp(&b.freq));
    }
    let peak = found.first().copied();
    let peaks = match peak {
        Some(p) => found
            .into_iter()
            .filter(|q| q.magnitude >= opts.secondary_fraction * p.magnitude)
            .collect(),
        None => Vec::new(),
    };
    Ok(SpectrumEstimate {
        freq_grid,
        magnitudes,
        peak,
        peaks,
        bin_width,
        method: PeakMethod::ParabolicLog,
    })
}

fn interpolate(mag: &[f64], k: usize, bin: f64) -> Peak {
    let (a, b, c) = (mag[k - 1].ln(), mag[k].ln(), mag[k + 1].ln());
    let denom = a - 2.0 * b + c;
    let delta = if denom < 0.0 { (0.5 * (a - c) / denom).clamp(-0.5, 0.5) } else { 0.0 };
    Peak {
        freq: (k as f64 + delta) * bin,
        magnitude: (b - 0.25 * (a - c) * delta).exp(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn grid(span: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| span * k as f64 / n as f64).collect()
    }

    #[test]
    fn single_tone() {
        let ts = grid(4e-6, 64);
        let s: Vec<f64> = ts.iter().map(|t| 0.5 + 0.5 * (TAU * 0.5e6 * t).cos()).collect();
        let est = extract_peak(&s, &ts, &PeakOptions::default()).unwrap();
        let f = est.peak_freq().unwrap();
        assert!((f - 0.5e6).abs() <= est.bin_width, "{f}");
        assert_eq!(est.peaks.len(), 1);
        // off-grid tone
        let s: Vec<f64> = ts.iter().map(|t| (TAU * 0.537e6 * t + 0.3).cos()).collect();
        let est = extract_peak(&s, &ts, &PeakOptions::default()).unwrap();
        assert!((est.peak_freq().unwrap() - 0.537e6).abs() <= est.bin_width);
    }

    #[test]
    fn flat_signal_has_no_peak() {
        let ts = grid(4e-6, 64);
        let est = extract_peak(&[0.7; 64], &ts, &PeakOptions::default()).unwrap();
        assert!(est.peak.is_none());
        assert!(est.peaks.is_empty());
    }

    #[test]
    fn two_tones_reported_with_low_frequency_tie_break() {
        let ts = grid(10e-6, 100);
        let s: Vec<f64> = ts.iter().map(|t| (TAU * 0.4e6 * t).cos() + (TAU * 0.9e6 * t).cos()).collect();
        let est = extract_peak(&s, &ts, &PeakOptions::default()).unwrap();
        assert_eq!(est.peaks.len(), 2, "{:?}", est.peaks);
        assert!((est.peaks[0].freq - 0.4e6).abs() <= est.bin_width, "{:?}", est.peaks);
        assert!((est.peaks[1].freq - 0.9e6).abs() <= est.bin_width);
    }

    #[test]
    fn input_validation() {
        let ts = grid(1e-6, 8);
        assert!(matches!(extract_peak(&[0.0; 8], &ts, &PeakOptions::default()), Err(Error::TooFewSamples { .. })));
        let mut ts = grid(1e-6, 32);
        ts[5] += 1e-9;
        assert!(matches!(extract_peak(&[0.0; 32], &ts, &PeakOptions::default()), Err(Error::NonUniformSampling)));
    }

    #[test]
    fn hann_window_still_finds_tone() {
        let ts = grid(8e-6, 128);
        let s: Vec<f64> = ts.iter().map(|t| (TAU * 1.3e6 * t).sin()).collect();
        let opts = PeakOptions { window: Window::Hann, ..Default::default() };
        let est = extract_peak(&s, &ts, &opts).unwrap();
        assert!((est.peak_freq().unwrap() - 1.3e6).abs() <= est.bin_width);
    }
}
