//! Spectral residual saliency (Hou and Zhang).

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::fft::{fft2, ifft2, Spectrum};
use crate::features::{FeatureKind, FeatureMap};
use crate::plane::{gaussian_smooth, Plane};
use crate::resize::resize_bicubic;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectralResidualConfig {
    /// Side of the square analysis grid.
    pub analysis_size: usize,
    /// Side of the box filter applied to the log-amplitude spectrum.
    pub box_size: usize,
    /// Sigma of the Gaussian applied to the saliency map.
    pub sigma: f64,
}

impl Default for SpectralResidualConfig {
    fn default() -> Self {
        Self {
            analysis_size: 64,
            box_size: 3,
            sigma: 2.5,
        }
    }
}

/// Planes whose samples deviate from their mean by less than this
/// (relative to `max(1, |mean|)`) carry no structure and map to zero.
const FLAT_TOLERANCE: f64 = 1e-9;

fn is_flat(p: &Plane) -> bool {
    let mean = p.mean();
    let dev = p
        .as_slice()
        .iter()
        .map(|v| (v - mean).abs())
        .fold(0.0, f64::max);
    dev <= FLAT_TOLERANCE * mean.abs().max(1.0)
}

/// Circular box mean of side `size` over a spectrum-shaped grid.
fn circular_box(values: &[f64], width: usize, height: usize, size: usize) -> Vec<f64> {
    let r = (size / 2) as isize;
    let norm = 1.0 / (size * size) as f64;
    let mut out = vec![0.0; values.len()];
    for y in 0..height as isize {
        for x in 0..width as isize {
            let mut acc = 0.0;
            for dy in -r..=r {
                let yy = (y + dy).rem_euclid(height as isize) as usize;
                for dx in -r..=r {
                    let xx = (x + dx).rem_euclid(width as isize) as usize;
                    acc += values[yy * width + xx];
                }
            }
            out[y as usize * width + x as usize] = acc * norm;
        }
    }
    out
}

/// Spectral residual saliency of a luma plane, normalized to `[0, 1]`.
///
/// The DC bin is excluded from the residual: its log amplitude is replaced
/// by the mean of its neighbours before smoothing and it is dropped from
/// the reconstruction, so the map ignores the luma offset entirely.
pub fn spectral_residual(luma: &Plane, cfg: &SpectralResidualConfig) -> Result<FeatureMap> {
    if luma.is_empty() {
        return Err(Error::EmptyPlane);
    }
    if cfg.analysis_size < 2 || cfg.box_size == 0 || cfg.box_size % 2 == 0 {
        return Err(Error::Config(
            "spectral residual needs analysis_size >= 2 and an odd box_size".into(),
        ));
    }
    let (w, h) = luma.dims();
    if is_flat(luma) {
        return Ok(FeatureMap::new(FeatureKind::Sr, Plane::zeros(w, h)));
    }
    let n = cfg.analysis_size;
    let small = resize_bicubic(luma, n, n)?;
    let spectrum = fft2(&small);
    let peak = spectrum.data.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let floor = 1e-12 * peak.max(1.0);

    let mut log_amp: Vec<f64> = spectrum
        .data
        .iter()
        .map(|c| (c.norm() + floor).ln())
        .collect();
    let neighbours = [
        (1, 0),
        (n - 1, 0),
        (0, 1),
        (0, n - 1),
        (1, 1),
        (n - 1, 1),
        (1, n - 1),
        (n - 1, n - 1),
    ];
    log_amp[0] = neighbours
        .iter()
        .map(|&(x, y)| log_amp[y * n + x])
        .sum::<f64>()
        / 8.0;
    let smooth = circular_box(&log_amp, n, n, cfg.box_size);

    let mut residual: Vec<Complex64> = spectrum
        .data
        .iter()
        .zip(log_amp.iter().zip(&smooth))
        .map(|(c, (&l, &s))| {
            let mag = c.norm();
            let phase = if mag > 0.0 {
                c / mag
            } else {
                Complex64::new(1.0, 0.0)
            };
            phase * (l - s).exp()
        })
        .collect();
    residual[0] = Complex64::new(0.0, 0.0);

    let back = ifft2(&Spectrum {
        width: n,
        height: n,
        data: residual,
    });
    let saliency = Plane::from_vec(n, n, back.data.iter().map(|c| c.norm_sqr()).collect())?;
    let saliency = gaussian_smooth(&saliency, cfg.sigma);
    let (lo, hi) = (saliency.min(), saliency.max());
    let normalized = if hi > lo {
        saliency.map(|v| (v - lo) / (hi - lo))
    } else {
        Plane::zeros(n, n)
    };
    let full = resize_bicubic(&normalized, w, h)?.map(|v| v.clamp(0.0, 1.0));
    Ok(FeatureMap::new(FeatureKind::Sr, full))
}
