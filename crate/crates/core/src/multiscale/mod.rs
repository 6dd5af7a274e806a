//! Wavelet and grouplet transforms.

mod grouplet;
mod wavelet;

pub use grouplet::{default_depth, grouplet_forward, GroupletLevel, GroupletStack};
pub use wavelet::{wavelet_forward, wavelet_inverse, Orientation, WaveletPyramid, B3_SPLINE_TAPS};

/// Largest `S` with `2^S <= min(H, W) / 8`, clamped to `3..=7`.
pub fn default_scales(width: usize, height: usize) -> usize {
    let limit = width.min(height) / 8;
    let mut s = 0;
    while s < 7 && (1usize << (s + 1)) <= limit {
        s += 1;
    }
    s.clamp(3, 7)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_scale_counts() {
        assert_eq!(default_scales(64, 64), 3);
        assert_eq!(default_scales(192, 192), 4);
        assert_eq!(default_scales(256, 256), 5);
        assert_eq!(default_scales(10_000, 4096), 7);
        assert_eq!(default_scales(16, 16), 3);
    }
}
