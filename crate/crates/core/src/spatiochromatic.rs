//! The spatiochromatic grouping map `tau` and the BLeSS similarity built on it.
//!
//! Per opponent channel the pipeline is: undecimated wavelet decomposition,
//! grouplet recursion over every detail plane, center-surround divisive
//! normalization, contrast-sensitivity weighting, bicubic upsampling of
//! each grouplet level back to the wavelet plane size, reduction over the
//! levels, weighting of the wavelet plane, and inverse transform. The three
//! channel maps are combined with a Euclidean norm.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{apply_gamma, to_opponent, ColorSpace, PlanarImage, DEFAULT_GAMMA};
use crate::multiscale::{
    default_depth, default_scales, grouplet_forward, wavelet_forward, wavelet_inverse,
    WaveletPyramid,
};
use crate::plane::{box_sum, Plane};
use crate::resize::resize_bicubic;
use crate::similarity::{similarity, SimilarityMap};

/// Stabilizing constant for the tau similarity.
pub const TAU_SIMILARITY_CONSTANT: f64 = 0.4;

/// Smallest value the contrast-sensitivity lower-bound term may take.
pub const MIN_LOWER_BOUND: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelClass {
    /// Intensity channel `I3`.
    Achromatic,
    /// Opponent channels `I1`, `I2`.
    Chromatic,
}

/// Shape of one contrast-sensitivity curve over wavelet scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsfParams {
    /// Scale index at which sensitivity peaks.
    pub peak_scale: f64,
    /// Width of the Gaussian profile, in scale units.
    pub spread: f64,
    /// Weight of the normalized-contrast term.
    pub gain: f64,
    /// Weight of the lower-bound term.
    pub floor_gain: f64,
}

impl CsfParams {
    fn profile(&self, scale: f64) -> f64 {
        let d = scale - self.peak_scale;
        (-(d * d) / (2.0 * self.spread * self.spread)).exp()
    }

    /// Multiplicative sensitivity `g(s)`.
    pub fn sensitivity(&self, scale: f64) -> f64 {
        self.gain * self.profile(scale)
    }

    /// Lower-bound term `k(s)`, never below [`MIN_LOWER_BOUND`].
    pub fn lower_bound(&self, scale: f64) -> f64 {
        (self.floor_gain * self.profile(scale)).max(MIN_LOWER_BOUND)
    }

    fn validate(&self, which: &str) -> Result<()> {
        let ok = self.gain >= 0.0
            && self.floor_gain > 0.0
            && self.spread > 0.0
            && [self.peak_scale, self.spread, self.gain, self.floor_gain]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "{which} ECSF needs gain >= 0, floor_gain > 0, spread > 0 (got {self:?})"
            )))
        }
    }
}

/// Extended contrast sensitivity: one curve for intensity, one for the
/// chromatic channels. The defaults are configuration, not fitted values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EcsfConfig {
    pub achromatic: CsfParams,
    pub chromatic: CsfParams,
}

impl Default for EcsfConfig {
    fn default() -> Self {
        Self {
            achromatic: CsfParams {
                peak_scale: 3.0,
                spread: 1.5,
                gain: 1.0,
                floor_gain: 0.1,
            },
            chromatic: CsfParams {
                peak_scale: 4.0,
                spread: 1.5,
                gain: 1.0,
                floor_gain: 0.1,
            },
        }
    }
}

impl EcsfConfig {
    pub fn params(&self, class: ChannelClass) -> &CsfParams {
        match class {
            ChannelClass::Achromatic => &self.achromatic,
            ChannelClass::Chromatic => &self.chromatic,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.achromatic.validate("achromatic")?;
        self.chromatic.validate("chromatic")
    }
}

/// Surround window: side `2 * ceil(factor * 2^(s-1)) + 1` at scale `s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SurroundConfig {
    pub factor: f64,
}

impl Default for SurroundConfig {
    fn default() -> Self {
        Self { factor: 3.0 }
    }
}

impl SurroundConfig {
    pub fn radius(&self, scale: usize) -> usize {
        let base = 2f64.powi(scale.saturating_sub(1) as i32);
        ((self.factor * base).ceil() as usize).max(1)
    }
}

/// How upsampled grouplet levels are reduced into one weight plane.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Recombination {
    #[default]
    Sum,
    Mean,
}

/// Parameters of the tau pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TauConfig {
    pub gamma: f64,
    /// Wavelet scales; `None` picks [`default_scales`].
    pub scales: Option<usize>,
    /// Grouplet depth; `None` picks [`default_depth`] of the image width.
    pub grouplet_depth: Option<usize>,
    pub ecsf: EcsfConfig,
    pub surround: SurroundConfig,
    pub recombination: Recombination,
}

impl Default for TauConfig {
    fn default() -> Self {
        Self {
            gamma: DEFAULT_GAMMA,
            scales: None,
            grouplet_depth: None,
            ecsf: EcsfConfig::default(),
            surround: SurroundConfig::default(),
            recombination: Recombination::Sum,
        }
    }
}

impl TauConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) {
            return Err(Error::NonPositiveGamma(self.gamma));
        }
        if !(self.surround.factor > 0.0) {
            return Err(Error::Config("surround.factor must be positive".into()));
        }
        if self.scales == Some(0) || self.grouplet_depth == Some(0) {
            return Err(Error::Config(
                "scales and grouplet_depth must be at least 1".into(),
            ));
        }
        self.ecsf.validate()
    }
}

/// Non-negative per-pixel grouping map.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatiochromaticMap {
    tau: Plane,
}

impl SpatiochromaticMap {
    pub fn new(tau: Plane) -> Result<Self> {
        if tau.as_slice().iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::InvalidParameter(
                "tau samples must be non-negative".into(),
            ));
        }
        Ok(Self { tau })
    }

    pub fn tau(&self) -> &Plane {
        &self.tau
    }

    pub fn into_plane(self) -> Plane {
        self.tau
    }

    pub fn dims(&self) -> (usize, usize) {
        self.tau.dims()
    }
}

/// Divisive center-surround normalization `z = c^2 / (c^2 + u^2)`.
///
/// `c` is the coefficient itself and `u` the RMS of the other coefficients
/// in the scale-dependent surround window. `c = u = 0` yields 0.
pub fn surround_contrast(detail: &Plane, scale: usize, cfg: &SurroundConfig) -> Plane {
    let r = cfg.radius(scale);
    let count = ((2 * r + 1) * (2 * r + 1) - 1) as f64;
    let squares = detail.map(|v| v * v);
    let window = box_sum(&squares, r);
    let mut z = Plane::zeros(detail.width(), detail.height());
    for ((out, &c2), &total) in z
        .as_mut_slice()
        .iter_mut()
        .zip(squares.as_slice())
        .zip(window.as_slice())
    {
        let u2 = ((total - c2) / count).max(0.0);
        *out = if c2 == 0.0 { 0.0 } else { c2 / (c2 + u2) };
    }
    z
}

/// Contrast-sensitivity weighting `alpha = z * g(s) + k(s)`.
pub fn ecsf_adjust(z: &Plane, scale: usize, class: ChannelClass, cfg: &EcsfConfig) -> Plane {
    let p = cfg.params(class);
    let g = p.sensitivity(scale as f64);
    let k = p.lower_bound(scale as f64);
    z.map(|v| v * g + k)
}

struct Geometry {
    scales: usize,
    depth: usize,
}

fn channel_tau(
    plane: &Plane,
    class: ChannelClass,
    geometry: &Geometry,
    cfg: &TauConfig,
) -> Result<Plane> {
    let pyr = wavelet_forward(plane, geometry.scales)?;
    let (w, h) = pyr.dims();
    let weighted = pyr
        .iter()
        .map(|(s, _, detail)| {
            let stack = grouplet_forward(detail, geometry.depth)?;
            let mut alpha = Plane::zeros(w, h);
            for level in stack.levels() {
                let z = surround_contrast(&level.detail, s, &cfg.surround);
                let a = ecsf_adjust(&z, s, class, &cfg.ecsf);
                let up = resize_bicubic(&a, w, h)?;
                for (acc, v) in alpha.as_mut_slice().iter_mut().zip(up.as_slice()) {
                    *acc += v;
                }
            }
            if cfg.recombination == Recombination::Mean {
                alpha = alpha.scale(1.0 / stack.depth() as f64);
            }
            detail.zip_map(&alpha, |d, a| d * a)
        })
        .collect::<Result<Vec<Plane>>>()?;
    let mut planes = weighted.into_iter();
    let details = (0..geometry.scales)
        .map(|_| {
            [
                planes.next().expect("three planes per scale"),
                planes.next().expect("three planes per scale"),
                planes.next().expect("three planes per scale"),
            ]
        })
        .collect();
    let rebuilt = WaveletPyramid::from_parts(details, pyr.residual().clone())?;
    wavelet_inverse(&rebuilt)
}

/// Compute the grouping map of an RGB image. sRGB input is linearized with
/// `cfg.gamma` first; linear RGB is used as is.
pub fn compute_tau(img: &PlanarImage, cfg: &TauConfig) -> Result<SpatiochromaticMap> {
    cfg.validate()?;
    let linear = match img.space() {
        ColorSpace::RgbSrgb => apply_gamma(img, cfg.gamma)?,
        ColorSpace::RgbLinear => img.clone(),
        other => {
            return Err(Error::WrongColorSpace {
                expected: "RGB",
                actual: other.name(),
            })
        }
    };
    let opponent = to_opponent(&linear)?;
    let (w, h) = opponent.dims();
    let geometry = Geometry {
        scales: cfg.scales.unwrap_or_else(|| default_scales(w, h)),
        depth: cfg.grouplet_depth.unwrap_or_else(|| default_depth(w)),
    };
    let classes = [
        ChannelClass::Chromatic,
        ChannelClass::Chromatic,
        ChannelClass::Achromatic,
    ];
    let channels = opponent
        .planes()
        .par_iter()
        .zip(classes.par_iter())
        .map(|(p, &class)| channel_tau(p, class, &geometry, cfg))
        .collect::<Result<Vec<Plane>>>()?;
    let mut tau = Plane::zeros(w, h);
    for (k, t) in tau.as_mut_slice().iter_mut().enumerate() {
        let s: f64 = channels.iter().map(|c| c.as_slice()[k].powi(2)).sum();
        *t = s.sqrt();
    }
    SpatiochromaticMap::new(tau)
}

/// Similarity of two grouping maps with constant `c1`.
pub fn bless_map(
    tau_ref: &SpatiochromaticMap,
    tau_dist: &SpatiochromaticMap,
    c1: f64,
) -> Result<SimilarityMap> {
    similarity(tau_ref.tau(), tau_dist.tau(), c1)
}

/// Mean of a similarity map.
pub fn bless_score(map: &SimilarityMap) -> Result<f64> {
    let p = map.as_plane();
    if p.is_empty() {
        return Err(Error::EmptyMap);
    }
    Ok(p.mean())
}
