//! The pixelwise similarity `(2 f g + c) / (f^2 + g^2 + c)` shared by every
//! feature comparison in the crate.

use crate::error::{Error, Result};
use crate::plane::Plane;

/// Per-pixel similarity between two feature maps. For non-negative features
/// every sample lies in `(0, 1]`, with 1 exactly where the features agree.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityMap(Plane);

impl SimilarityMap {
    pub fn from_plane(plane: Plane) -> Self {
        Self(plane)
    }

    pub fn as_plane(&self) -> &Plane {
        &self.0
    }

    pub fn into_plane(self) -> Plane {
        self.0
    }

    pub fn dims(&self) -> (usize, usize) {
        self.0.dims()
    }
}

#[inline]
pub fn similarity_value(f: f64, g: f64, c: f64) -> f64 {
    (2.0 * f * g + c) / (f * f + g * g + c)
}

/// Compare two equally sized planes with stabilizing constant `c > 0`.
pub fn similarity(f: &Plane, g: &Plane, c: f64) -> Result<SimilarityMap> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "similarity constant must be positive, got {c}"
        )));
    }
    Ok(SimilarityMap(
        f.zip_map(g, |a, b| similarity_value(a, b, c))?,
    ))
}
