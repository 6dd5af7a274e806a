use serde::{Deserialize, Serialize};

use crate::features::{FeatureKind, FeatureMap};
use crate::plane::Plane;

/// 3x3 derivative operator. Both kernels are normalized so a unit-slope
/// ramp gives a central difference of 2 (`f(x+1) - f(x-1)`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GradientOperator {
    /// `[3 10 3]ᵀ ⊗ [-1 0 1] / 16`
    Scharr,
    /// `[1 2 1]ᵀ ⊗ [-1 0 1] / 4`
    Sobel,
}

impl GradientOperator {
    /// Smoothing weights across the derivative direction.
    fn smoothing(self) -> [f64; 3] {
        match self {
            GradientOperator::Scharr => [3.0 / 16.0, 10.0 / 16.0, 3.0 / 16.0],
            GradientOperator::Sobel => [0.25, 0.5, 0.25],
        }
    }
}

/// Gradient magnitude `sqrt(gx^2 + gy^2)` with symmetric borders.
pub fn gradient_magnitude(luma: &Plane, op: GradientOperator) -> FeatureMap {
    let k = op.smoothing();
    let (w, h) = luma.dims();
    let grid = Plane::from_fn(w, h, |x, y| {
        let (x, y) = (x as isize, y as isize);
        let mut gx = 0.0;
        let mut gy = 0.0;
        for (i, &s) in k.iter().enumerate() {
            let o = i as isize - 1;
            gx += s * (luma.get_mirrored(x + 1, y + o) - luma.get_mirrored(x - 1, y + o));
            gy += s * (luma.get_mirrored(x + o, y + 1) - luma.get_mirrored(x + o, y - 1));
        }
        (gx * gx + gy * gy).sqrt()
    });
    FeatureMap::new(FeatureKind::Gm, grid)
}
