//! Baseline feature extractors (gradient magnitude, phase congruency,
//! spectral residual) and the generic feature similarity.

pub mod fft;
mod gradient;
mod phase;
mod saliency;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::similarity::{similarity, SimilarityMap};

pub use gradient::{gradient_magnitude, GradientOperator};
pub use phase::{phase_congruency, PhaseCongruencyConfig, MIN_PC_SIZE};
pub use saliency::{spectral_residual, SpectralResidualConfig};

/// Similarity constant for the YIQ chroma planes. It comes from the
/// reference FSIMc implementation, not from the similarity table.
pub const CHROMA_SIMILARITY_CONSTANT: f64 = 200.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeatureKind {
    Gm,
    Pc,
    Sr,
    Tau,
    IChroma,
    QChroma,
}

impl FeatureKind {
    pub fn name(self) -> &'static str {
        match self {
            FeatureKind::Gm => "gm",
            FeatureKind::Pc => "pc",
            FeatureKind::Sr => "sr",
            FeatureKind::Tau => "tau",
            FeatureKind::IChroma => "i",
            FeatureKind::QChroma => "q",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s.to_ascii_lowercase().as_str() {
            "gm" => FeatureKind::Gm,
            "pc" => FeatureKind::Pc,
            "sr" => FeatureKind::Sr,
            "tau" => FeatureKind::Tau,
            "i" | "i_chroma" => FeatureKind::IChroma,
            "q" | "q_chroma" => FeatureKind::QChroma,
            _ => return None,
        })
    }

    /// Chroma planes are signed; every other feature is non-negative.
    pub fn is_signed(self) -> bool {
        matches!(self, FeatureKind::IChroma | FeatureKind::QChroma)
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A tagged feature grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMap {
    kind: FeatureKind,
    grid: Plane,
}

impl FeatureMap {
    pub fn new(kind: FeatureKind, grid: Plane) -> Self {
        Self { kind, grid }
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    pub fn grid(&self) -> &Plane {
        &self.grid
    }

    pub fn into_grid(self) -> Plane {
        self.grid
    }
}

/// Stabilizing constants of the pixelwise similarity, per feature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimilarityConstants {
    /// Gradient magnitude, FSIM and FSIMc.
    pub gm_fsim: f64,
    /// Gradient magnitude, SR-SIM.
    pub gm_srsim: f64,
    pub pc: f64,
    pub sr: f64,
    pub tau: f64,
}

impl SimilarityConstants {
    pub const TABLE: SimilarityConstants = SimilarityConstants {
        gm_fsim: 160.0,
        gm_srsim: 225.0,
        pc: 0.85,
        sr: 0.4,
        tau: 0.4,
    };
}

impl Default for SimilarityConstants {
    fn default() -> Self {
        Self::TABLE
    }
}

/// Pixelwise similarity of two feature maps of the same kind and size.
pub fn similarity_map(f_ref: &FeatureMap, f_dist: &FeatureMap, c: f64) -> Result<SimilarityMap> {
    if f_ref.kind != f_dist.kind {
        return Err(Error::KindMismatch(
            f_ref.kind.to_string(),
            f_dist.kind.to_string(),
        ));
    }
    similarity(&f_ref.grid, &f_dist.grid, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_constants() {
        let c = SimilarityConstants::default();
        assert_eq!(c.gm_fsim, 160.0);
        assert_eq!(c.gm_srsim, 225.0);
        assert_eq!(c.pc, 0.85);
        assert_eq!(c.sr, 0.4);
        assert_eq!(c.tau, 0.4);
        assert_eq!(CHROMA_SIMILARITY_CONSTANT, 200.0);
    }

    #[test]
    fn similarity_cases() {
        let a = FeatureMap::new(
            FeatureKind::Gm,
            Plane::from_vec(2, 1, vec![0.0, 3.0]).unwrap(),
        );
        let b = FeatureMap::new(
            FeatureKind::Gm,
            Plane::from_vec(2, 1, vec![3.0, 3.0]).unwrap(),
        );
        let s = similarity_map(&a, &b, 9.0).unwrap();
        assert_eq!(s.as_plane().as_slice(), &[0.5, 1.0]);

        let pc = FeatureMap::new(FeatureKind::Pc, Plane::zeros(2, 1));
        assert!(matches!(
            similarity_map(&a, &pc, 1.0),
            Err(Error::KindMismatch(..))
        ));
        let small = FeatureMap::new(FeatureKind::Gm, Plane::zeros(1, 1));
        assert!(matches!(
            similarity_map(&a, &small, 1.0),
            Err(Error::DimensionMismatch(..))
        ));
    }

    #[test]
    fn gm_constants_give_different_maps() {
        let a = FeatureMap::new(FeatureKind::Gm, Plane::filled(2, 2, 10.0));
        let b = FeatureMap::new(FeatureKind::Gm, Plane::filled(2, 2, 30.0));
        let fsim = similarity_map(&a, &b, SimilarityConstants::TABLE.gm_fsim).unwrap();
        let srsim = similarity_map(&a, &b, SimilarityConstants::TABLE.gm_srsim).unwrap();
        assert_ne!(fsim, srsim);
    }
}
