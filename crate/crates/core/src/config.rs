//! Pipeline configuration, loadable from a TOML key/value file.
//!
//! Every key is optional; missing keys take the defaults below.
//!
//! ```toml
//! downsample = true            # reference-code metric downsampling
//! luma = "yiq"                 # "yiq" (Y of YIQ) or "opponent" (I3 / 3)
//! fsim_gradient = "scharr"
//! srsim_gradient = "sobel"
//! significance_z = 1.96        # two-sided critical value for Fisher-z tests
//!
//! [tau]
//! gamma = 2.2
//! scales = 4                   # omit for the image-size default
//! grouplet_depth = 5           # omit for the image-size default
//! recombination = "sum"        # or "mean"
//! surround.factor = 3.0
//! ecsf.achromatic = { peak_scale = 3.0, spread = 1.5, gain = 1.0, floor_gain = 0.1 }
//! ecsf.chromatic  = { peak_scale = 4.0, spread = 1.5, gain = 1.0, floor_gain = 0.1 }
//!
//! [phase_congruency]
//! scales = 4
//! orientations = 4
//!
//! [spectral_residual]
//! analysis_size = 64
//! box_size = 3
//! sigma = 2.5
//!
//! [constants]
//! gm_fsim = 160.0
//!
//! [fusion]
//! c2 = 0.03
//! c3 = 0.3
//! c4 = 0.5
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::FusionConstants;
use crate::features::{
    GradientOperator, PhaseCongruencyConfig, SimilarityConstants, SpectralResidualConfig,
};
use crate::spatiochromatic::TauConfig;

/// Which luma plane feeds the gradient, phase and saliency features.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LumaSource {
    /// `Y` of YIQ on the encoded RGB samples.
    #[default]
    Yiq,
    /// `I3 / 3` of the gamma-linearized opponent transform.
    Opponent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub downsample: bool,
    pub luma: LumaSource,
    pub fsim_gradient: GradientOperator,
    pub srsim_gradient: GradientOperator,
    pub significance_z: f64,
    pub tau: TauConfig,
    pub phase_congruency: PhaseCongruencyConfig,
    pub spectral_residual: SpectralResidualConfig,
    pub constants: SimilarityConstants,
    pub fusion: FusionConstants,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            downsample: true,
            luma: LumaSource::Yiq,
            fsim_gradient: GradientOperator::Scharr,
            srsim_gradient: GradientOperator::Sobel,
            significance_z: 1.96,
            tau: TauConfig::default(),
            phase_congruency: PhaseCongruencyConfig::default(),
            spectral_residual: SpectralResidualConfig::default(),
            constants: SimilarityConstants::default(),
            fusion: FusionConstants::default(),
        }
    }
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                Error::FileNotFound(path.to_path_buf())
            } else {
                Error::Io(e)
            }
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.tau.validate()?;
        let c = &self.constants;
        if [c.gm_fsim, c.gm_srsim, c.pc, c.sr, c.tau]
            .iter()
            .any(|&v| !(v > 0.0))
        {
            return Err(Error::Config(
                "similarity constants must be positive".into(),
            ));
        }
        if !(self.significance_z > 0.0) {
            return Err(Error::Config("significance_z must be positive".into()));
        }
        let f = &self.fusion;
        if [f.c2, f.c3, f.c4].iter().any(|&v| !(v > 0.0)) {
            return Err(Error::Config("fusion exponents must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default() {
        assert_eq!(Config::from_toml_str("").unwrap(), Config::default());
    }

    #[test]
    fn partial_override() {
        let cfg = Config::from_toml_str(
            r#"
            downsample = false
            srsim_gradient = "scharr"
            [tau]
            gamma = 1.8
            scales = 3
            recombination = "mean"
            ecsf.chromatic = { peak_scale = 5.0, spread = 2.0, gain = 0.8, floor_gain = 0.05 }
            [constants]
            tau = 0.5
            "#,
        )
        .unwrap();
        assert!(!cfg.downsample);
        assert_eq!(cfg.srsim_gradient, GradientOperator::Scharr);
        assert_eq!(cfg.tau.gamma, 1.8);
        assert_eq!(cfg.tau.scales, Some(3));
        assert_eq!(cfg.tau.ecsf.chromatic.peak_scale, 5.0);
        assert_eq!(
            cfg.tau.ecsf.achromatic,
            crate::spatiochromatic::EcsfConfig::default().achromatic
        );
        assert_eq!(cfg.constants.tau, 0.5);
        assert_eq!(cfg.constants.gm_fsim, 160.0);
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(matches!(
            Config::from_toml_str("bogus = 1"),
            Err(Error::Config(_))
        ));
        assert!(Config::from_toml_str("[tau]\ngamma = -2.0").is_err());
        assert!(Config::from_toml_str("[constants]\npc = 0.0").is_err());
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = Config::default();
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(Config::from_toml_str(&text).unwrap(), cfg);
    }
}
