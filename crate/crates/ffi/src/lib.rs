//! C ABI over `bless-iqa`.
//!
//! Images and configurations are opaque handles created and freed by this
//! library. Every fallible call returns a [`BlessStatus`]; on failure a
//! description is available from `bless_last_error_message` on the same
//! thread until the next failing call.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use bless::benchmark::{significance_with, spearman};
use bless::image::decode_image;
use bless::{load_image, Assessor, Config, Error, Estimator, PlanarImage};

/// Opaque decoded image.
pub struct BlessImage(PlanarImage);

/// Opaque pipeline configuration.
pub struct BlessConfig(Config);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlessStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Decode = 4,
    UnsupportedFormat = 5,
    DimensionMismatch = 6,
    ImageTooSmall = 7,
    Config = 8,
    Statistics = 9,
    Internal = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlessEstimator {
    Fsim = 0,
    Fsimc = 1,
    Srsim = 2,
    BlessFsim = 3,
    BlessFsimc = 4,
    BlessSrsim = 5,
    Bless = 6,
}

impl From<BlessEstimator> for Estimator {
    fn from(e: BlessEstimator) -> Self {
        match e {
            BlessEstimator::Fsim => Estimator::Fsim,
            BlessEstimator::Fsimc => Estimator::Fsimc,
            BlessEstimator::Srsim => Estimator::Srsim,
            BlessEstimator::BlessFsim => Estimator::BlessFsim,
            BlessEstimator::BlessFsimc => Estimator::BlessFsimc,
            BlessEstimator::BlessSrsim => Estimator::BlessSrsim,
            BlessEstimator::Bless => Estimator::Bless,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> BlessStatus {
    match err {
        Error::Io(_) | Error::FileNotFound(_) => BlessStatus::Io,
        Error::CorruptStream(_) => BlessStatus::Decode,
        Error::UnsupportedFormat => BlessStatus::UnsupportedFormat,
        Error::DimensionMismatch(..) => BlessStatus::DimensionMismatch,
        Error::ImageTooSmall { .. } | Error::TooManyScales { .. } | Error::DepthTooLarge { .. } => {
            BlessStatus::ImageTooSmall
        }
        Error::Config(_) | Error::NonPositiveGamma(_) => BlessStatus::Config,
        Error::LengthMismatch(..)
        | Error::DegenerateInput
        | Error::SampleTooSmall(_)
        | Error::PerfectCorrelation(_) => BlessStatus::Statistics,
        _ => BlessStatus::InvalidArgument,
    }
}

/// Run `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (BlessStatus, String)>) -> BlessStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BlessStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            BlessStatus::Internal
        }
    }
}

fn lib(err: Error) -> (BlessStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (BlessStatus, String) {
    (BlessStatus::NullPointer, format!("{what} is null"))
}

unsafe fn path_arg<'a>(path: *const c_char) -> Result<&'a Path, (BlessStatus, String)> {
    if path.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(path).to_str().map_err(|_| {
        (
            BlessStatus::InvalidArgument,
            "path is not UTF-8".to_string(),
        )
    })?;
    Ok(Path::new(s))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), (BlessStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failing call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bless_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bless_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Wrap interleaved 8-bit sRGB samples (`width * height * 3` bytes).
#[no_mangle]
pub unsafe extern "C" fn bless_image_from_rgb8(
    width: usize,
    height: usize,
    data: *const u8,
    len: usize,
    out: *mut *mut BlessImage,
) -> BlessStatus {
    guard(|| {
        if data.is_null() {
            return Err(null("data"));
        }
        if width.checked_mul(height).and_then(|n| n.checked_mul(3)) != Some(len) {
            return Err((
                BlessStatus::InvalidArgument,
                format!("expected {width}x{height}x3 bytes, got {len}"),
            ));
        }
        let bytes = std::slice::from_raw_parts(data, len);
        let img = PlanarImage::from_rgb8(width, height, bytes).map_err(lib)?;
        store(out, BlessImage(img))
    })
}

/// Decode an encoded PNG, BMP or PNM image from memory.
#[no_mangle]
pub unsafe extern "C" fn bless_image_decode(
    bytes: *const u8,
    len: usize,
    out: *mut *mut BlessImage,
) -> BlessStatus {
    guard(|| {
        if bytes.is_null() {
            return Err(null("bytes"));
        }
        let img = decode_image(std::slice::from_raw_parts(bytes, len)).map_err(lib)?;
        store(out, BlessImage(img))
    })
}

/// Load an image file.
#[no_mangle]
pub unsafe extern "C" fn bless_image_load(
    path: *const c_char,
    out: *mut *mut BlessImage,
) -> BlessStatus {
    guard(|| {
        let img = load_image(path_arg(path)?).map_err(lib)?;
        store(out, BlessImage(img))
    })
}

/// Width in pixels; 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn bless_image_width(image: *const BlessImage) -> usize {
    image.as_ref().map_or(0, |i| i.0.width())
}

/// Height in pixels; 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn bless_image_height(image: *const BlessImage) -> usize {
    image.as_ref().map_or(0, |i| i.0.height())
}

/// Free an image. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn bless_image_free(image: *mut BlessImage) {
    if !image.is_null() {
        drop(Box::from_raw(image));
    }
}

/// Default configuration.
#[no_mangle]
pub unsafe extern "C" fn bless_config_default(out: *mut *mut BlessConfig) -> BlessStatus {
    guard(|| store(out, BlessConfig(Config::default())))
}

/// Configuration from TOML text (NUL-terminated, UTF-8).
#[no_mangle]
pub unsafe extern "C" fn bless_config_from_toml(
    text: *const c_char,
    out: *mut *mut BlessConfig,
) -> BlessStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| (BlessStatus::Config, "config text is not UTF-8".to_string()))?;
        store(out, BlessConfig(Config::from_toml_str(s).map_err(lib)?))
    })
}

/// Configuration from a TOML file.
#[no_mangle]
pub unsafe extern "C" fn bless_config_load(
    path: *const c_char,
    out: *mut *mut BlessConfig,
) -> BlessStatus {
    guard(|| {
        store(
            out,
            BlessConfig(Config::load(path_arg(path)?).map_err(lib)?),
        )
    })
}

/// Enable or disable the reference-code metric downsampling.
#[no_mangle]
pub unsafe extern "C" fn bless_config_set_downsample(
    config: *mut BlessConfig,
    enabled: bool,
) -> BlessStatus {
    guard(|| {
        let cfg = config.as_mut().ok_or_else(|| null("config"))?;
        cfg.0.downsample = enabled;
        Ok(())
    })
}

/// Free a configuration. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn bless_config_free(config: *mut BlessConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Score `distorted` against `reference` with `count` estimators, writing
/// one score per estimator to `scores`. A NULL `config` means defaults.
#[no_mangle]
pub unsafe extern "C" fn bless_score_many(
    config: *const BlessConfig,
    reference: *const BlessImage,
    distorted: *const BlessImage,
    estimators: *const BlessEstimator,
    count: usize,
    scores: *mut f64,
) -> BlessStatus {
    guard(|| {
        let r = reference.as_ref().ok_or_else(|| null("reference"))?;
        let d = distorted.as_ref().ok_or_else(|| null("distorted"))?;
        if count == 0 {
            return Ok(());
        }
        if estimators.is_null() {
            return Err(null("estimators"));
        }
        if scores.is_null() {
            return Err(null("scores"));
        }
        let list: Vec<Estimator> = std::slice::from_raw_parts(estimators, count)
            .iter()
            .map(|&e| e.into())
            .collect();
        let cfg = config
            .as_ref()
            .map_or_else(Config::default, |c| c.0.clone());
        let assessor = Assessor::new(cfg).map_err(lib)?;
        let results = assessor.assess(&r.0, &d.0, &list).map_err(lib)?;
        let out = std::slice::from_raw_parts_mut(scores, count);
        for (slot, res) in out.iter_mut().zip(&results) {
            *slot = res.score;
        }
        Ok(())
    })
}

/// Score with a single estimator.
#[no_mangle]
pub unsafe extern "C" fn bless_score(
    config: *const BlessConfig,
    reference: *const BlessImage,
    distorted: *const BlessImage,
    estimator: BlessEstimator,
    score: *mut f64,
) -> BlessStatus {
    bless_score_many(config, reference, distorted, &estimator, 1, score)
}

/// Spearman rank correlation of two arrays of length `n`.
#[no_mangle]
pub unsafe extern "C" fn bless_spearman(
    x: *const f64,
    y: *const f64,
    n: usize,
    out: *mut f64,
) -> BlessStatus {
    guard(|| {
        if x.is_null() || y.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let (xs, ys) = (
            std::slice::from_raw_parts(x, n),
            std::slice::from_raw_parts(y, n),
        );
        *out = spearman(xs, ys).map_err(lib)?;
        Ok(())
    })
}

/// Fisher-z significance of the difference between two correlations over
/// the same `n` samples; writes 1 when significant at `critical_z`.
#[no_mangle]
pub unsafe extern "C" fn bless_significance(
    srcc_a: f64,
    srcc_b: f64,
    n: usize,
    critical_z: f64,
    out: *mut i32,
) -> BlessStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = i32::from(significance_with(srcc_a, srcc_b, n, critical_z).map_err(lib)?);
        Ok(())
    })
}
