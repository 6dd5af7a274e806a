//! Full-reference image quality assessment assisted by spatiochromatic grouping maps.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod benchmark;
pub mod cli;
pub mod config;
pub mod distort;
pub mod error;
pub mod estimators;
pub mod features;
pub mod image;
pub mod multiscale;
pub mod plane;
pub mod resize;
pub mod similarity;
pub mod spatiochromatic;

pub use config::Config;
pub use error::{Error, Result};
pub use estimators::{Assessor, Estimator, QualityResult};
pub use image::{load_image, ColorSpace, PlanarImage};
pub use plane::Plane;
