//! Two-dimensional DFT helpers over row-major complex buffers.

use rustfft::num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::plane::Plane;

/// A row-major complex grid.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub width: usize,
    pub height: usize,
    pub data: Vec<Complex64>,
}

fn transform(width: usize, height: usize, data: &mut [Complex64], direction: FftDirection) {
    let mut planner = FftPlanner::<f64>::new();
    let rows = planner.plan_fft(width, direction);
    for row in data.chunks_exact_mut(width) {
        rows.process(row);
    }
    let cols = planner.plan_fft(height, direction);
    let mut column = vec![Complex64::default(); height];
    for x in 0..width {
        for (y, c) in column.iter_mut().enumerate() {
            *c = data[y * width + x];
        }
        cols.process(&mut column);
        for (y, c) in column.iter().enumerate() {
            data[y * width + x] = *c;
        }
    }
}

/// Forward, unnormalized.
pub fn fft2(plane: &Plane) -> Spectrum {
    let (width, height) = plane.dims();
    let mut data: Vec<Complex64> = plane
        .as_slice()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    transform(width, height, &mut data, FftDirection::Forward);
    Spectrum {
        width,
        height,
        data,
    }
}

/// Inverse, scaled by `1 / (width * height)` so `ifft2(fft2(x)) == x`.
pub fn ifft2(spectrum: &Spectrum) -> Spectrum {
    let mut data = spectrum.data.clone();
    transform(
        spectrum.width,
        spectrum.height,
        &mut data,
        FftDirection::Inverse,
    );
    let norm = 1.0 / (spectrum.width * spectrum.height) as f64;
    data.iter_mut().for_each(|c| *c *= norm);
    Spectrum {
        width: spectrum.width,
        height: spectrum.height,
        data,
    }
}

/// Signed frequency (cycles per sample) of DFT bin `i` out of `n`, with
/// the odd-length normalization MATLAB-derived filter code uses: `i / n`
/// for even `n`, `i / (n - 1)` for odd `n`, wrapped to the negative half.
pub fn bin_frequency(i: usize, n: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    if n % 2 == 0 {
        let k = if i < n / 2 {
            i as f64
        } else {
            i as f64 - n as f64
        };
        k / n as f64
    } else {
        let k = if i <= (n - 1) / 2 {
            i as f64
        } else {
            i as f64 - n as f64
        };
        k / (n - 1) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let p = Plane::from_fn(6, 5, |x, y| (x as f64 * 0.7 - y as f64).sin());
        let back = ifft2(&fft2(&p));
        for (a, b) in back.data.iter().zip(p.as_slice()) {
            assert!((a.re - b).abs() < 1e-12 && a.im.abs() < 1e-12);
        }
    }

    #[test]
    fn dc_bin_is_sum() {
        let p = Plane::from_fn(4, 3, |x, y| (x + y) as f64);
        let s = fft2(&p);
        assert!((s.data[0].re - p.sum()).abs() < 1e-12);
    }

    #[test]
    fn frequencies() {
        let even: Vec<f64> = (0..4).map(|i| bin_frequency(i, 4)).collect();
        assert_eq!(even, vec![0.0, 0.25, -0.5, -0.25]);
        let odd: Vec<f64> = (0..5).map(|i| bin_frequency(i, 5)).collect();
        assert_eq!(odd, vec![0.0, 0.25, 0.5, -0.5, -0.25]);
    }
}
