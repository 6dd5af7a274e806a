//! Dense row-major grids of `f64` samples and the border/convolution helpers
//! shared by every transform in the crate.

use crate::error::{Error, Result};

/// A single 2-D grid of real samples, stored row-major.
///
/// Index `(x, y)` addresses column `x` and row `y`. All reductions run in
/// row-major order so results are reproducible bit-for-bit.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0.0)
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "{} samples cannot fill a {width}x{height} plane",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    /// Sample with half-sample symmetric extension outside the grid.
    #[inline]
    pub fn get_mirrored(&self, x: isize, y: isize) -> f64 {
        self.get(reflect(x, self.width), reflect(y, self.height))
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn row_mut(&mut self, y: usize) -> &mut [f64] {
        &mut self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn same_dims(&self, other: &Plane) -> bool {
        self.dims() == other.dims()
    }

    pub fn ensure_same_dims(&self, other: &Plane) -> Result<()> {
        if self.same_dims(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ))
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn map_inplace(&mut self, f: impl Fn(f64) -> f64) {
        self.data.iter_mut().for_each(|v| *v = f(*v));
    }

    /// Pixelwise combination of two planes of equal size.
    pub fn zip_map(&self, other: &Plane, f: impl Fn(f64, f64) -> f64) -> Result<Plane> {
        self.ensure_same_dims(other)?;
        Ok(Plane {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.data.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn scale(&self, k: f64) -> Plane {
        self.map(|v| v * k)
    }

    pub fn sum_squares(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }
}

/// Half-sample symmetric index reflection: `-1 -> 0`, `n -> n - 1`.
/// Works for offsets of any magnitude.
#[inline]
pub fn reflect(i: isize, n: usize) -> usize {
    debug_assert!(n > 0);
    let period = 2 * n as isize;
    let mut k = i.rem_euclid(period);
    if k >= n as isize {
        k = period - 1 - k;
    }
    k as usize
}

/// Correlate every row with `taps`, spacing taps `step` samples apart
/// (holes for `step > 1`). `taps` must have odd length; symmetric border.
pub fn filter_rows(src: &Plane, taps: &[f64], step: usize) -> Plane {
    let half = (taps.len() / 2) as isize;
    let step = step as isize;
    let w = src.width();
    let mut out = Plane::zeros(w, src.height());
    for y in 0..src.height() {
        let row = src.row(y);
        let dst = out.row_mut(y);
        for (x, d) in dst.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (k, &t) in taps.iter().enumerate() {
                let xi = x as isize + (k as isize - half) * step;
                acc += t * row[reflect(xi, w)];
            }
            *d = acc;
        }
    }
    out
}

/// Column counterpart of [`filter_rows`].
pub fn filter_cols(src: &Plane, taps: &[f64], step: usize) -> Plane {
    let half = (taps.len() / 2) as isize;
    let step = step as isize;
    let (w, h) = src.dims();
    let mut out = Plane::zeros(w, h);
    for y in 0..h {
        let dst = out.row_mut(y);
        for (k, &t) in taps.iter().enumerate() {
            let yi = reflect(y as isize + (k as isize - half) * step, h);
            let srow = &src.data[yi * w..(yi + 1) * w];
            for (d, &s) in dst.iter_mut().zip(srow) {
                *d += t * s;
            }
        }
    }
    out
}

/// Sum over a centered `(2r+1) x (2r+1)` window with symmetric extension.
pub fn box_sum(src: &Plane, radius: usize) -> Plane {
    let (w, h) = src.dims();
    let r = radius as isize;
    let horizontal = {
        let mut out = Plane::zeros(w, h);
        let mut prefix = vec![0.0; w + 2 * radius + 1];
        for y in 0..h {
            let row = src.row(y);
            for i in 0..w + 2 * radius {
                prefix[i + 1] = prefix[i] + row[reflect(i as isize - r, w)];
            }
            let dst = out.row_mut(y);
            for (x, d) in dst.iter_mut().enumerate() {
                *d = prefix[x + 2 * radius + 1] - prefix[x];
            }
        }
        out
    };
    let mut out = Plane::zeros(w, h);
    let mut prefix = vec![0.0; h + 2 * radius + 1];
    for x in 0..w {
        for i in 0..h + 2 * radius {
            prefix[i + 1] = prefix[i] + horizontal.get(x, reflect(i as isize - r, h));
        }
        for y in 0..h {
            out.set(x, y, prefix[y + 2 * radius + 1] - prefix[y]);
        }
    }
    out
}

/// Normalized 1-D Gaussian taps with radius `ceil(3 sigma)`.
pub fn gaussian_taps(sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return vec![1.0];
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let mut taps: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= total);
    taps
}

/// Separable Gaussian smoothing with symmetric borders.
pub fn gaussian_smooth(src: &Plane, sigma: f64) -> Plane {
    let taps = gaussian_taps(sigma);
    filter_cols(&filter_rows(src, &taps, 1), &taps, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflect_is_half_sample_symmetric() {
        let n = 4;
        let got: Vec<usize> = (-5..10).map(|i| reflect(i, n)).collect();
        assert_eq!(got, vec![3, 3, 2, 1, 0, 0, 1, 2, 3, 3, 2, 1, 0, 0, 1]);
        assert_eq!(reflect(0, 1), 0);
        assert_eq!(reflect(-7, 1), 0);
    }

    #[test]
    fn box_sum_matches_direct_window() {
        let p = Plane::from_fn(7, 5, |x, y| (x * 3 + y * 7 % 5) as f64 * 0.25);
        let r = 2;
        let fast = box_sum(&p, r);
        for y in 0..5 {
            for x in 0..7 {
                let mut acc = 0.0;
                for dy in -(r as isize)..=r as isize {
                    for dx in -(r as isize)..=r as isize {
                        acc += p.get_mirrored(x as isize + dx, y as isize + dy);
                    }
                }
                assert!((fast.get(x, y) - acc).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn box_sum_with_window_larger_than_plane() {
        let p = Plane::filled(3, 2, 2.0);
        let s = box_sum(&p, 6);
        assert!(s.as_slice().iter().all(|&v| (v - 2.0 * 169.0).abs() < 1e-9));
    }

    #[test]
    fn filters_preserve_constants() {
        let p = Plane::filled(6, 9, 1.5);
        let taps = [0.0625, 0.25, 0.375, 0.25, 0.0625];
        for step in [1, 2, 4, 8] {
            let a = filter_rows(&p, &taps, step);
            let b = filter_cols(&p, &taps, step);
            assert!(a.as_slice().iter().all(|&v| (v - 1.5).abs() < 1e-14));
            assert!(b.as_slice().iter().all(|&v| (v - 1.5).abs() < 1e-14));
        }
    }

    #[test]
    fn zip_map_rejects_mismatch() {
        let a = Plane::zeros(2, 2);
        let b = Plane::zeros(3, 2);
        assert!(matches!(
            a.zip_map(&b, |x, _| x),
            Err(Error::DimensionMismatch(2, 2, 3, 2))
        ));
    }
}
