//! Score assembly for FSIM, FSIMc, SR-SIM, their BLeSS-assisted variants
//! and the standalone BLeSS score.
//!
//! Every estimator reduces to a feature map `F` and a weight map `W`
//! pooled as `Σ F·W / Σ W`. Baselines keep the weights of their reference
//! implementations (`max(PC, PC~)` for FSIM/FSIMc, `max(SR, SR~)` for
//! SR-SIM); assisted variants multiply those features by the grouping map
//! `tau` before taking the maximum.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::{Config, LumaSource};
use crate::error::{Error, Result};
use crate::features::{
    gradient_magnitude, phase_congruency, spectral_residual, FeatureMap, CHROMA_SIMILARITY_CONSTANT,
};
use crate::image::{apply_gamma, downsample_for_metric, to_yiq, ColorSpace, PlanarImage};
use crate::plane::Plane;
use crate::resize::resize_bicubic;
use crate::similarity::similarity;
use crate::spatiochromatic::{compute_tau, SpatiochromaticMap};

/// Luma, chroma and feature planes are computed on an 8-bit intensity scale,
/// the scale the similarity constants were tuned for.
const INTENSITY_SCALE: f64 = 255.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Estimator {
    #[serde(rename = "FSIM")]
    Fsim,
    #[serde(rename = "FSIMc")]
    Fsimc,
    #[serde(rename = "SRSIM")]
    Srsim,
    #[serde(rename = "BLESS_FSIM")]
    BlessFsim,
    #[serde(rename = "BLESS_FSIMc")]
    BlessFsimc,
    #[serde(rename = "BLESS_SRSIM")]
    BlessSrsim,
    #[serde(rename = "BLESS")]
    Bless,
}

impl Estimator {
    /// The three baselines and their assisted variants.
    pub const STANDARD: [Estimator; 6] = [
        Estimator::Fsim,
        Estimator::Fsimc,
        Estimator::Srsim,
        Estimator::BlessFsim,
        Estimator::BlessFsimc,
        Estimator::BlessSrsim,
    ];

    pub const ALL: [Estimator; 7] = [
        Estimator::Fsim,
        Estimator::Fsimc,
        Estimator::Srsim,
        Estimator::BlessFsim,
        Estimator::BlessFsimc,
        Estimator::BlessSrsim,
        Estimator::Bless,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Estimator::Fsim => "FSIM",
            Estimator::Fsimc => "FSIMc",
            Estimator::Srsim => "SRSIM",
            Estimator::BlessFsim => "BLESS_FSIM",
            Estimator::BlessFsimc => "BLESS_FSIMc",
            Estimator::BlessSrsim => "BLESS_SRSIM",
            Estimator::Bless => "BLESS",
        }
    }

    pub fn uses_bless(self) -> bool {
        matches!(
            self,
            Estimator::BlessFsim | Estimator::BlessFsimc | Estimator::BlessSrsim | Estimator::Bless
        )
    }

    /// Baseline an assisted estimator is compared against.
    pub fn baseline(self) -> Option<Estimator> {
        match self {
            Estimator::BlessFsim => Some(Estimator::Fsim),
            Estimator::BlessFsimc => Some(Estimator::Fsimc),
            Estimator::BlessSrsim => Some(Estimator::Srsim),
            _ => None,
        }
    }

    pub fn assisted(self) -> Option<Estimator> {
        match self {
            Estimator::Fsim => Some(Estimator::BlessFsim),
            Estimator::Fsimc => Some(Estimator::BlessFsimc),
            Estimator::Srsim => Some(Estimator::BlessSrsim),
            _ => None,
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .collect::<String>()
            .to_ascii_uppercase();
        Ok(match norm.as_str() {
            "FSIM" => Estimator::Fsim,
            "FSIMC" => Estimator::Fsimc,
            "SRSIM" => Estimator::Srsim,
            "BLESSFSIM" => Estimator::BlessFsim,
            "BLESSFSIMC" => Estimator::BlessFsimc,
            "BLESSSRSIM" => Estimator::BlessSrsim,
            "BLESS" => Estimator::Bless,
            _ => return Err(Error::InvalidParameter(format!("unknown estimator `{s}`"))),
        })
    }
}

/// Exponents of the fused feature maps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FusionConstants {
    /// Chroma similarity exponent in FSIMc.
    pub c2: f64,
    /// BLeSS exponent in assisted FSIMc.
    pub c3: f64,
    /// Gradient (and BLeSS) exponent in SR-SIM.
    pub c4: f64,
}

impl Default for FusionConstants {
    fn default() -> Self {
        Self {
            c2: 0.03,
            c3: 0.3,
            c4: 0.5,
        }
    }
}

/// Score of one estimator together with the maps it was pooled from.
#[derive(Clone, Debug, PartialEq)]
pub struct QualityResult {
    pub estimator: Estimator,
    pub score: f64,
    pub feature_map: Plane,
    pub weight_map: Plane,
}

impl QualityResult {
    fn pooled(estimator: Estimator, feature_map: Plane, weight_map: Plane) -> Result<Self> {
        let score = weighted_pool(&feature_map, &weight_map)?;
        Ok(Self {
            estimator,
            score,
            feature_map,
            weight_map,
        })
    }

    /// The weighted quality map, i.e. the numerator of the pooling.
    pub fn weighted_map(&self) -> Plane {
        self.feature_map
            .zip_map(&self.weight_map, |f, w| f * w)
            .expect("maps share dimensions")
    }
}

/// `Σ F·W / Σ W`, summed in row-major order.
pub fn weighted_pool(feature: &Plane, weight: &Plane) -> Result<f64> {
    feature.ensure_same_dims(weight)?;
    if weight.as_slice().iter().any(|&w| w < 0.0) {
        return Err(Error::InvalidParameter(
            "weights must be non-negative".into(),
        ));
    }
    let mass = weight.sum();
    if !(mass > 0.0) {
        return Err(Error::ZeroWeightMass);
    }
    let num: f64 = feature
        .as_slice()
        .iter()
        .zip(weight.as_slice())
        .map(|(f, w)| f * w)
        .sum();
    Ok(num / mass)
}

/// Display normalization: subtract the mean, divide by the largest
/// centered value, raise to the fifth power, then stretch to `[0, 1]`.
pub fn visualize_map(map: &Plane) -> Result<Plane> {
    if map.is_empty() {
        return Err(Error::EmptyMap);
    }
    let mean = map.mean();
    let top = map.max() - mean;
    if !(top > 0.0) {
        return Err(Error::DegenerateMap);
    }
    let powered = map.map(|v| ((v - mean) / top).powi(5));
    let (lo, hi) = (powered.min(), powered.max());
    Ok(powered.map(|v| (v - lo) / (hi - lo)))
}

/// `real(b^p)` for a real base: negative bases take the principal branch.
fn real_pow(base: f64, p: f64) -> f64 {
    if base >= 0.0 {
        base.powf(p)
    } else {
        (-base).powf(p) * (p * std::f64::consts::PI).cos()
    }
}

fn pixel_max(a: &Plane, b: &Plane) -> Result<Plane> {
    a.zip_map(b, f64::max)
}

fn product(a: &Plane, b: &Plane) -> Result<Plane> {
    a.zip_map(b, |x, y| x * y)
}

/// BLeSS similarity map and the two grouping maps, as used by the assisted
/// estimators.
#[derive(Clone, Copy, Debug)]
pub struct Assist<'a> {
    pub bless: &'a Plane,
    pub tau_ref: &'a Plane,
    pub tau_dist: &'a Plane,
}

impl Assist<'_> {
    /// `max(feature_ref · tau, feature_dist · tau~)`
    fn weights(&self, feature_ref: &Plane, feature_dist: &Plane) -> Result<Plane> {
        pixel_max(
            &product(feature_ref, self.tau_ref)?,
            &product(feature_dist, self.tau_dist)?,
        )
    }
}

/// FSIM maps: `F = S_GM · S_PC [· BLeSS]`.
pub fn fsim_maps(
    gm_sim: &Plane,
    pc_sim: &Plane,
    pc_ref: &Plane,
    pc_dist: &Plane,
    assist: Option<Assist<'_>>,
) -> Result<(Plane, Plane)> {
    let base = product(gm_sim, pc_sim)?;
    match assist {
        None => Ok((base, pixel_max(pc_ref, pc_dist)?)),
        Some(a) => Ok((product(&base, a.bless)?, a.weights(pc_ref, pc_dist)?)),
    }
}

/// FSIMc maps: `F = S_GM · S_PC · real((S_I · S_Q)^c2) [· BLeSS^c3]`.
#[allow(clippy::too_many_arguments)]
pub fn fsimc_maps(
    gm_sim: &Plane,
    pc_sim: &Plane,
    i_sim: &Plane,
    q_sim: &Plane,
    pc_ref: &Plane,
    pc_dist: &Plane,
    fusion: &FusionConstants,
    assist: Option<Assist<'_>>,
) -> Result<(Plane, Plane)> {
    let chroma = i_sim.zip_map(q_sim, |i, q| real_pow(i * q, fusion.c2))?;
    let base = product(&product(gm_sim, pc_sim)?, &chroma)?;
    match assist {
        None => Ok((base, pixel_max(pc_ref, pc_dist)?)),
        Some(a) => {
            let f = base.zip_map(a.bless, |v, b| v * b.powf(fusion.c3))?;
            Ok((f, a.weights(pc_ref, pc_dist)?))
        }
    }
}

/// SR-SIM maps: `F = S_SR · (S_GM [· BLeSS])^c4`.
pub fn srsim_maps(
    sr_sim: &Plane,
    gm_sim: &Plane,
    sr_ref: &Plane,
    sr_dist: &Plane,
    fusion: &FusionConstants,
    assist: Option<Assist<'_>>,
) -> Result<(Plane, Plane)> {
    match assist {
        None => Ok((
            sr_sim.zip_map(gm_sim, |s, g| s * g.powf(fusion.c4))?,
            pixel_max(sr_ref, sr_dist)?,
        )),
        Some(a) => {
            let gb = product(gm_sim, a.bless)?;
            Ok((
                sr_sim.zip_map(&gb, |s, g| s * g.powf(fusion.c4))?,
                a.weights(sr_ref, sr_dist)?,
            ))
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Needs {
    gm_fsim: bool,
    gm_srsim: bool,
    pc: bool,
    sr: bool,
    chroma: bool,
    tau: bool,
}

impl Needs {
    fn of(estimators: &[Estimator]) -> Self {
        let mut n = Needs::default();
        for e in estimators {
            match e {
                Estimator::Fsim | Estimator::BlessFsim => {
                    n.gm_fsim = true;
                    n.pc = true;
                }
                Estimator::Fsimc | Estimator::BlessFsimc => {
                    n.gm_fsim = true;
                    n.pc = true;
                    n.chroma = true;
                }
                Estimator::Srsim | Estimator::BlessSrsim => {
                    n.gm_srsim = true;
                    n.sr = true;
                }
                Estimator::Bless => {}
            }
            n.tau |= e.uses_bless();
        }
        n
    }
}

/// Feature planes of one image at metric resolution.
#[derive(Clone, Debug, Default)]
pub struct ImageFeatures {
    pub luma: Option<Plane>,
    pub i_chroma: Option<Plane>,
    pub q_chroma: Option<Plane>,
    pub gm_fsim: Option<FeatureMap>,
    pub gm_srsim: Option<FeatureMap>,
    pub pc: Option<FeatureMap>,
    pub sr: Option<FeatureMap>,
    pub tau: Option<SpatiochromaticMap>,
}

fn need<'a, T>(v: &'a Option<T>, what: &str) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| Error::InvalidParameter(format!("feature `{what}` was not computed")))
}

/// Runs the estimators under one configuration.
#[derive(Clone, Debug, Default)]
pub struct Assessor {
    config: Config,
}

impl Assessor {
    pub fn new(config: Config) -> Result<Self> {
        config.validate()?;
        Ok(Self { config })
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    /// Metric-resolution copy of an input image.
    pub fn preprocess(&self, img: &PlanarImage) -> Result<PlanarImage> {
        if !img.space().is_rgb() {
            return Err(Error::WrongColorSpace {
                expected: "RGB",
                actual: img.space().name(),
            });
        }
        Ok(if self.config.downsample {
            downsample_for_metric(img)
        } else {
            img.clone()
        })
    }

    fn luma(&self, img: &PlanarImage, yiq: Option<&PlanarImage>) -> Result<Plane> {
        match self.config.luma {
            LumaSource::Yiq => {
                let owned;
                let yiq = match yiq {
                    Some(y) => y,
                    None => {
                        owned = to_yiq(img)?;
                        &owned
                    }
                };
                Ok(yiq.plane(0).scale(INTENSITY_SCALE))
            }
            LumaSource::Opponent => {
                let linear = match img.space() {
                    ColorSpace::RgbSrgb => apply_gamma(img, self.config.tau.gamma)?,
                    _ => img.clone(),
                };
                let (r, g, b) = (linear.plane(0), linear.plane(1), linear.plane(2));
                let sum = r.zip_map(g, |a, b| a + b)?.zip_map(b, |a, b| a + b)?;
                Ok(sum.scale(INTENSITY_SCALE / 3.0))
            }
        }
    }

    fn features_for(&self, img: &PlanarImage, needs: Needs) -> Result<ImageFeatures> {
        let cfg = &self.config;
        let mut out = ImageFeatures::default();
        let yiq = if needs.chroma || cfg.luma == LumaSource::Yiq {
            Some(to_yiq(img)?)
        } else {
            None
        };
        if needs.chroma {
            let yiq = yiq.as_ref().expect("computed above");
            out.i_chroma = Some(yiq.plane(1).scale(INTENSITY_SCALE));
            out.q_chroma = Some(yiq.plane(2).scale(INTENSITY_SCALE));
        }
        if needs.gm_fsim || needs.gm_srsim || needs.pc || needs.sr {
            let luma = self.luma(img, yiq.as_ref())?;
            if needs.gm_fsim {
                out.gm_fsim = Some(gradient_magnitude(&luma, cfg.fsim_gradient));
            }
            if needs.gm_srsim {
                out.gm_srsim = Some(gradient_magnitude(&luma, cfg.srsim_gradient));
            }
            if needs.pc {
                out.pc = Some(phase_congruency(&luma, &cfg.phase_congruency)?);
            }
            if needs.sr {
                out.sr = Some(spectral_residual(&luma, &cfg.spectral_residual)?);
            }
            out.luma = Some(luma);
        }
        if needs.tau {
            let tau = compute_tau(img, &cfg.tau)?;
            let (w, h) = img.dims();
            // Weight maps need tau on the feature grid.
            out.tau = Some(if tau.dims() == (w, h) {
                tau
            } else {
                SpatiochromaticMap::new(resize_bicubic(tau.tau(), w, h)?.map(|v| v.max(0.0)))?
            });
        }
        Ok(out)
    }

    /// Features needed by `estimators` for a metric-resolution image.
    pub fn features(&self, img: &PlanarImage, estimators: &[Estimator]) -> Result<ImageFeatures> {
        self.features_for(img, Needs::of(estimators))
    }

    /// Combine precomputed features of a reference/distorted pair.
    pub fn compose(
        &self,
        estimator: Estimator,
        r: &ImageFeatures,
        d: &ImageFeatures,
    ) -> Result<QualityResult> {
        let c = &self.config.constants;
        let fusion = &self.config.fusion;

        let bless_parts = if estimator.uses_bless() {
            let (tr, td) = (need(&r.tau, "tau")?, need(&d.tau, "tau")?);
            let map = similarity(tr.tau(), td.tau(), c.tau)?.into_plane();
            Some((map, tr.tau(), td.tau()))
        } else {
            None
        };
        let assist = bless_parts
            .as_ref()
            .map(|(bless, tau_ref, tau_dist)| Assist {
                bless,
                tau_ref,
                tau_dist,
            });

        let (feature, weight) = match estimator {
            Estimator::Fsim | Estimator::BlessFsim | Estimator::Fsimc | Estimator::BlessFsimc => {
                let (gr, gd) = (need(&r.gm_fsim, "gm")?, need(&d.gm_fsim, "gm")?);
                let (pr, pd) = (need(&r.pc, "pc")?, need(&d.pc, "pc")?);
                let gm_sim = similarity(gr.grid(), gd.grid(), c.gm_fsim)?.into_plane();
                let pc_sim = similarity(pr.grid(), pd.grid(), c.pc)?.into_plane();
                if matches!(estimator, Estimator::Fsim | Estimator::BlessFsim) {
                    fsim_maps(&gm_sim, &pc_sim, pr.grid(), pd.grid(), assist)?
                } else {
                    let i_sim = similarity(
                        need(&r.i_chroma, "i")?,
                        need(&d.i_chroma, "i")?,
                        CHROMA_SIMILARITY_CONSTANT,
                    )?
                    .into_plane();
                    let q_sim = similarity(
                        need(&r.q_chroma, "q")?,
                        need(&d.q_chroma, "q")?,
                        CHROMA_SIMILARITY_CONSTANT,
                    )?
                    .into_plane();
                    fsimc_maps(
                        &gm_sim,
                        &pc_sim,
                        &i_sim,
                        &q_sim,
                        pr.grid(),
                        pd.grid(),
                        fusion,
                        assist,
                    )?
                }
            }
            Estimator::Srsim | Estimator::BlessSrsim => {
                let (gr, gd) = (need(&r.gm_srsim, "gm")?, need(&d.gm_srsim, "gm")?);
                let (sr, sd) = (need(&r.sr, "sr")?, need(&d.sr, "sr")?);
                let gm_sim = similarity(gr.grid(), gd.grid(), c.gm_srsim)?.into_plane();
                let sr_sim = similarity(sr.grid(), sd.grid(), c.sr)?.into_plane();
                srsim_maps(&sr_sim, &gm_sim, sr.grid(), sd.grid(), fusion, assist)?
            }
            Estimator::Bless => {
                let map = assist.expect("bless parts computed").bless.clone();
                let ones = Plane::filled(map.width(), map.height(), 1.0);
                (map, ones)
            }
        };
        // A pair without any significant pixel (e.g. two flat images) has
        // nothing to weight; fall back to the plain mean.
        let weight = if weight.sum() > 0.0 {
            weight
        } else {
            Plane::filled(weight.width(), weight.height(), 1.0)
        };
        QualityResult::pooled(estimator, feature, weight)
    }

    /// Score `dist` against `ref` with each requested estimator.
    pub fn assess(
        &self,
        reference: &PlanarImage,
        distorted: &PlanarImage,
        estimators: &[Estimator],
    ) -> Result<Vec<QualityResult>> {
        if reference.dims() != distorted.dims() {
            let (a, b) = (reference.dims(), distorted.dims());
            return Err(Error::DimensionMismatch(a.0, a.1, b.0, b.1));
        }
        let (r, d) = rayon::join(|| self.preprocess(reference), || self.preprocess(distorted));
        let (r, d) = (r?, d?);
        let needs = Needs::of(estimators);
        let (fr, fd) = rayon::join(
            || self.features_for(&r, needs),
            || self.features_for(&d, needs),
        );
        let (fr, fd) = (fr?, fd?);
        estimators
            .iter()
            .map(|&e| self.compose(e, &fr, &fd))
            .collect()
    }

    pub fn score(
        &self,
        reference: &PlanarImage,
        distorted: &PlanarImage,
        estimator: Estimator,
    ) -> Result<f64> {
        Ok(self.assess(reference, distorted, &[estimator])?[0].score)
    }
}

fn single(
    reference: &PlanarImage,
    distorted: &PlanarImage,
    estimator: Estimator,
    config: &Config,
) -> Result<QualityResult> {
    let assessor = Assessor::new(config.clone())?;
    Ok(assessor
        .assess(reference, distorted, &[estimator])?
        .pop()
        .expect("one estimator requested"))
}

/// FSIM, or BLeSS-FSIM when `use_bless` is set.
pub fn fsim(
    reference: &PlanarImage,
    distorted: &PlanarImage,
    use_bless: bool,
    config: &Config,
) -> Result<QualityResult> {
    let e = if use_bless {
        Estimator::BlessFsim
    } else {
        Estimator::Fsim
    };
    single(reference, distorted, e, config)
}

/// FSIMc, or BLeSS-FSIMc when `use_bless` is set.
pub fn fsimc(
    reference: &PlanarImage,
    distorted: &PlanarImage,
    use_bless: bool,
    config: &Config,
) -> Result<QualityResult> {
    let e = if use_bless {
        Estimator::BlessFsimc
    } else {
        Estimator::Fsimc
    };
    single(reference, distorted, e, config)
}

/// SR-SIM, or BLeSS-SR-SIM when `use_bless` is set.
pub fn srsim(
    reference: &PlanarImage,
    distorted: &PlanarImage,
    use_bless: bool,
    config: &Config,
) -> Result<QualityResult> {
    let e = if use_bless {
        Estimator::BlessSrsim
    } else {
        Estimator::Srsim
    };
    single(reference, distorted, e, config)
}
