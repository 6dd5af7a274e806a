//! Phase congruency from a bank of log-Gabor filters, following the
//! `phasecong2` routine distributed with the reference FSIM code (Kovesi's
//! formulation with per-orientation noise compensation).

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::fft::{bin_frequency, fft2, ifft2, Spectrum};
use crate::features::{FeatureKind, FeatureMap};
use crate::plane::Plane;

/// Smallest image side the filter bank is defined for.
pub const MIN_PC_SIZE: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhaseCongruencyConfig {
    pub scales: usize,
    pub orientations: usize,
    /// Wavelength of the finest filter, in pixels.
    pub min_wavelength: f64,
    /// Wavelength multiplier between successive scales.
    pub mult: f64,
    /// Bandwidth: sigma of the log-Gabor Gaussian over the center frequency.
    pub sigma_on_f: f64,
    /// Angular spacing over angular sigma.
    pub d_theta_on_sigma: f64,
    /// Noise threshold in standard deviations above the mean noise energy.
    pub noise_k: f64,
    pub epsilon: f64,
}

impl Default for PhaseCongruencyConfig {
    fn default() -> Self {
        Self {
            scales: 4,
            orientations: 4,
            min_wavelength: 6.0,
            mult: 2.0,
            sigma_on_f: 0.55,
            d_theta_on_sigma: 1.2,
            noise_k: 2.0,
            epsilon: 1e-4,
        }
    }
}

/// Butterworth low-pass `1 / (1 + (r / cutoff)^(2n))` on the unshifted
/// frequency grid.
fn lowpass(radius: &[f64], cutoff: f64, order: i32) -> Vec<f64> {
    radius
        .iter()
        .map(|&r| 1.0 / (1.0 + (r / cutoff).powi(2 * order)))
        .collect()
}

fn median(values: &mut [f64]) -> f64 {
    let n = values.len();
    let mid = n / 2;
    let (_, upper, _) = values.select_nth_unstable_by(mid, |a, b| a.total_cmp(b));
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let lower = values[..mid]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        (lower + upper) / 2.0
    }
}

/// Phase congruency of a luma plane; every sample lies in `[0, 1]`.
pub fn phase_congruency(luma: &Plane, cfg: &PhaseCongruencyConfig) -> Result<FeatureMap> {
    let (cols, rows) = luma.dims();
    if cols.min(rows) < MIN_PC_SIZE {
        return Err(Error::ImageTooSmall {
            min: MIN_PC_SIZE,
            width: cols,
            height: rows,
        });
    }
    if cfg.scales == 0 || cfg.orientations == 0 {
        return Err(Error::Config(
            "phase congruency needs at least one scale and orientation".into(),
        ));
    }
    let n = rows * cols;
    let image_fft = fft2(luma);

    let mut radius = vec![0.0; n];
    let mut sin_theta = vec![0.0; n];
    let mut cos_theta = vec![0.0; n];
    for y in 0..rows {
        let fy = bin_frequency(y, rows);
        for x in 0..cols {
            let fx = bin_frequency(x, cols);
            let k = y * cols + x;
            radius[k] = (fx * fx + fy * fy).sqrt();
            let theta = (-fy).atan2(fx);
            sin_theta[k] = theta.sin();
            cos_theta[k] = theta.cos();
        }
    }
    let lp = lowpass(&radius, 0.45, 15);
    radius[0] = 1.0;

    let log_sigma2 = 2.0 * cfg.sigma_on_f.ln().powi(2);
    let log_gabor: Vec<Vec<f64>> = (0..cfg.scales)
        .map(|s| {
            let wavelength = cfg.min_wavelength * cfg.mult.powi(s as i32);
            let fo = 1.0 / wavelength;
            let mut g: Vec<f64> = radius
                .iter()
                .zip(&lp)
                .map(|(&r, &l)| (-(r / fo).ln().powi(2) / log_sigma2).exp() * l)
                .collect();
            g[0] = 0.0;
            g
        })
        .collect();

    let theta_sigma = std::f64::consts::PI / cfg.orientations as f64 / cfg.d_theta_on_sigma;
    let mut energy_all = vec![0.0; n];
    let mut an_all = vec![0.0; n];

    for o in 0..cfg.orientations {
        let angle = o as f64 * std::f64::consts::PI / cfg.orientations as f64;
        let (sa, ca) = angle.sin_cos();
        let spread: Vec<f64> = (0..n)
            .map(|k| {
                let ds = sin_theta[k] * ca - cos_theta[k] * sa;
                let dc = cos_theta[k] * ca + sin_theta[k] * sa;
                let dtheta = ds.atan2(dc).abs();
                (-(dtheta * dtheta) / (2.0 * theta_sigma * theta_sigma)).exp()
            })
            .collect();

        let mut sum_e = vec![0.0; n];
        let mut sum_o = vec![0.0; n];
        let mut sum_an = vec![0.0; n];
        let mut responses: Vec<Vec<Complex64>> = Vec::with_capacity(cfg.scales);
        let mut spatial_filters: Vec<Vec<f64>> = Vec::with_capacity(cfg.scales);
        let mut em_n = 0.0;

        for (s, lg) in log_gabor.iter().enumerate() {
            let filter: Vec<f64> = lg.iter().zip(&spread).map(|(a, b)| a * b).collect();
            if s == 0 {
                em_n = filter.iter().map(|f| f * f).sum();
            }
            let spatial = ifft2(&Spectrum {
                width: cols,
                height: rows,
                data: filter.iter().map(|&f| Complex64::new(f, 0.0)).collect(),
            });
            let root_n = (n as f64).sqrt();
            spatial_filters.push(spatial.data.iter().map(|c| c.re * root_n).collect());

            let eo = ifft2(&Spectrum {
                width: cols,
                height: rows,
                data: image_fft
                    .data
                    .iter()
                    .zip(&filter)
                    .map(|(c, &f)| c * f)
                    .collect(),
            })
            .data;
            for k in 0..n {
                sum_an[k] += eo[k].norm();
                sum_e[k] += eo[k].re;
                sum_o[k] += eo[k].im;
            }
            responses.push(eo);
        }

        let mut energy = vec![0.0; n];
        for k in 0..n {
            let x_energy = (sum_e[k] * sum_e[k] + sum_o[k] * sum_o[k]).sqrt() + cfg.epsilon;
            let mean_e = sum_e[k] / x_energy;
            let mean_o = sum_o[k] / x_energy;
            for eo in &responses {
                let (e, od) = (eo[k].re, eo[k].im);
                energy[k] += e * mean_e + od * mean_o - (e * mean_o - od * mean_e).abs();
            }
        }

        // Noise statistics from the finest scale: its amplitude is
        // Rayleigh-distributed where the response is noise.
        let mut fine_power: Vec<f64> = responses[0].iter().map(|c| c.norm_sqr()).collect();
        let median_e2n = median(&mut fine_power);
        let mean_e2n = -median_e2n / 0.5f64.ln();
        let noise_power = if em_n > 0.0 { mean_e2n / em_n } else { 0.0 };

        let mut sum_an2 = 0.0;
        let mut sum_ai_aj = 0.0;
        for k in 0..n {
            for si in 0..cfg.scales {
                let a = spatial_filters[si][k];
                sum_an2 += a * a;
                for sj in si + 1..cfg.scales {
                    sum_ai_aj += a * spatial_filters[sj][k];
                }
            }
        }
        let est_noise_energy2 = 2.0 * noise_power * sum_an2 + 4.0 * noise_power * sum_ai_aj;
        let tau = (est_noise_energy2 / 2.0).max(0.0).sqrt();
        let est_noise_energy = tau * (std::f64::consts::PI / 2.0).sqrt();
        let est_noise_sigma = ((2.0 - std::f64::consts::PI / 2.0) * tau * tau).sqrt();
        let threshold = (est_noise_energy + cfg.noise_k * est_noise_sigma) / 1.7;

        for k in 0..n {
            energy_all[k] += (energy[k] - threshold).max(0.0);
            an_all[k] += sum_an[k];
        }
    }

    let data = energy_all
        .iter()
        .zip(&an_all)
        .map(|(&e, &a)| (e / (a + cfg.epsilon)).clamp(0.0, 1.0))
        .collect();
    Ok(FeatureMap::new(
        FeatureKind::Pc,
        Plane::from_vec(cols, rows, data)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    #[test]
    fn constant_plane_has_no_congruency() {
        let pc = phase_congruency(&Plane::filled(40, 36, 128.0), &Default::default()).unwrap();
        assert!(pc.grid().as_slice().iter().all(|&v| v < 1e-3));
    }

    #[test]
    fn too_small() {
        assert!(matches!(
            phase_congruency(&Plane::zeros(31, 64), &Default::default()),
            Err(Error::ImageTooSmall { .. })
        ));
    }

    #[test]
    fn step_edge_stands_out() {
        // Mild texture gives the noise estimate something to measure.
        let p = Plane::from_fn(128, 64, |x, y| {
            let texture = ((x * 7919 + y * 104729) % 97) as f64 / 97.0;
            2.0 * texture + if x < 64 { 40.0 } else { 200.0 }
        });
        let pc = phase_congruency(&p, &Default::default()).unwrap();
        let g = pc.grid();
        let edge = (0..64).map(|y| g.get(63, y).max(g.get(64, y))).sum::<f64>() / 64.0;
        let flat = (0..64)
            .flat_map(|y| (24..40).chain(88..104).map(move |x| (x, y)))
            .map(|(x, y)| g.get(x, y))
            .sum::<f64>()
            / (64.0 * 32.0);
        assert!(edge >= 10.0 * flat && edge > 0.1, "edge {edge} flat {flat}");
        assert!(g.as_slice().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }
}
