//! Planar images, codecs, gamma handling and color-space transforms.

use std::io::Cursor;

use image::{DynamicImage, ImageFormat};

use crate::error::{Error, Result};
use crate::plane::Plane;

/// Threshold on `R + G + B` below which a pixel is treated as black in the
/// opponent transform.
pub const OPPONENT_EPSILON: f64 = 1e-12;

/// Default display gamma used to linearize sRGB-encoded samples.
pub const DEFAULT_GAMMA: f64 = 2.2;

/// NTSC RGB -> YIQ matrix, rows Y, I, Q (the coefficients used by the
/// reference FSIM/FSIMc implementation).
pub const YIQ_MATRIX: [[f64; 3]; 3] = [
    [0.299, 0.587, 0.114],
    [0.596, -0.274, -0.322],
    [0.211, -0.523, 0.312],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ColorSpace {
    RgbLinear,
    RgbSrgb,
    Opponent,
    Yiq,
    Gray,
}

impl ColorSpace {
    pub fn plane_count(self) -> usize {
        match self {
            ColorSpace::Gray => 1,
            _ => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ColorSpace::RgbLinear => "RGB-linear",
            ColorSpace::RgbSrgb => "RGB-sRGB",
            ColorSpace::Opponent => "Opponent",
            ColorSpace::Yiq => "YIQ",
            ColorSpace::Gray => "Gray",
        }
    }

    pub fn is_rgb(self) -> bool {
        matches!(self, ColorSpace::RgbLinear | ColorSpace::RgbSrgb)
    }
}

/// An image as one [`Plane`] per channel plus a color-space tag.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarImage {
    planes: Vec<Plane>,
    space: ColorSpace,
    downsample_factor: usize,
}

impl PlanarImage {
    pub fn new(planes: Vec<Plane>, space: ColorSpace) -> Result<Self> {
        if planes.len() != space.plane_count() {
            return Err(Error::InvalidParameter(format!(
                "{} needs {} planes, got {}",
                space.name(),
                space.plane_count(),
                planes.len()
            )));
        }
        let first = &planes[0];
        if first.is_empty() {
            return Err(Error::EmptyPlane);
        }
        for p in &planes[1..] {
            first.ensure_same_dims(p)?;
        }
        if space.is_rgb()
            && planes
                .iter()
                .any(|p| p.as_slice().iter().any(|v| !v.is_finite()))
        {
            return Err(Error::InvalidParameter("RGB samples must be finite".into()));
        }
        Ok(Self {
            planes,
            space,
            downsample_factor: 1,
        })
    }

    /// Build an sRGB image from interleaved 8-bit RGB samples.
    pub fn from_rgb8(width: usize, height: usize, data: &[u8]) -> Result<Self> {
        if data.len() != width * height * 3 {
            return Err(Error::InvalidParameter(format!(
                "expected {} bytes for {width}x{height} RGB, got {}",
                width * height * 3,
                data.len()
            )));
        }
        let planes = (0..3)
            .map(|c| {
                Plane::from_fn(width, height, |x, y| {
                    f64::from(data[(y * width + x) * 3 + c]) / 255.0
                })
            })
            .collect();
        Self::new(planes, ColorSpace::RgbSrgb)
    }

    pub fn width(&self) -> usize {
        self.planes[0].width()
    }

    pub fn height(&self) -> usize {
        self.planes[0].height()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.planes[0].dims()
    }

    pub fn space(&self) -> ColorSpace {
        self.space
    }

    pub fn planes(&self) -> &[Plane] {
        &self.planes
    }

    pub fn plane(&self, i: usize) -> &Plane {
        &self.planes[i]
    }

    pub fn into_planes(self) -> Vec<Plane> {
        self.planes
    }

    /// Decimation factor applied by [`downsample_for_metric`]; 1 otherwise.
    pub fn downsample_factor(&self) -> usize {
        self.downsample_factor
    }

    fn with_planes(&self, planes: Vec<Plane>, space: ColorSpace) -> Self {
        Self {
            planes,
            space,
            downsample_factor: self.downsample_factor,
        }
    }

    fn expect_rgb(&self) -> Result<()> {
        if self.space.is_rgb() {
            Ok(())
        } else {
            Err(Error::WrongColorSpace {
                expected: "RGB",
                actual: self.space.name(),
            })
        }
    }
}

/// Decode a PNG, BMP or PPM/PGM stream into an sRGB image scaled to `[0, 1]`.
/// Grayscale sources are replicated across the three planes.
pub fn decode_image(bytes: &[u8]) -> Result<PlanarImage> {
    let format = image::guess_format(bytes).map_err(|_| Error::UnsupportedFormat)?;
    if !matches!(
        format,
        ImageFormat::Png | ImageFormat::Bmp | ImageFormat::Pnm
    ) {
        return Err(Error::UnsupportedFormat);
    }
    let decoded = image::load_from_memory_with_format(bytes, format)
        .map_err(|e| Error::CorruptStream(e.to_string()))?;
    Ok(from_dynamic(&decoded))
}

/// Read and decode an image file.
pub fn load_image(path: &std::path::Path) -> Result<PlanarImage> {
    let bytes = std::fs::read(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound(path.to_path_buf())
        } else {
            Error::Io(e)
        }
    })?;
    decode_image(&bytes)
}

fn from_dynamic(img: &DynamicImage) -> PlanarImage {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let wide = matches!(
        img,
        DynamicImage::ImageLuma16(_)
            | DynamicImage::ImageLumaA16(_)
            | DynamicImage::ImageRgb16(_)
            | DynamicImage::ImageRgba16(_)
    );
    let planes: Vec<Plane> = if wide {
        let rgb = img.to_rgb16();
        (0..3)
            .map(|c| {
                Plane::from_fn(w, h, |x, y| {
                    f64::from(rgb.get_pixel(x as u32, y as u32)[c]) / 65535.0
                })
            })
            .collect()
    } else {
        let rgb = img.to_rgb8();
        (0..3)
            .map(|c| {
                Plane::from_fn(w, h, |x, y| {
                    f64::from(rgb.get_pixel(x as u32, y as u32)[c]) / 255.0
                })
            })
            .collect()
    };
    PlanarImage {
        planes,
        space: ColorSpace::RgbSrgb,
        downsample_factor: 1,
    }
}

fn quantize8(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

fn quantize16(v: f64) -> u16 {
    (v.clamp(0.0, 1.0) * 65535.0).round() as u16
}

fn encode(img: DynamicImage, format: ImageFormat) -> Result<Vec<u8>> {
    let mut out = Cursor::new(Vec::new());
    img.write_to(&mut out, format)
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(out.into_inner())
}

/// Encode an RGB or gray image as 8-bit PNG (samples clamped to `[0, 1]`).
pub fn encode_png(img: &PlanarImage) -> Result<Vec<u8>> {
    let (w, h) = img.dims();
    let dynimg = match img.space {
        ColorSpace::Gray => {
            let p = img.plane(0);
            let buf = image::GrayImage::from_fn(w as u32, h as u32, |x, y| {
                image::Luma([quantize8(p.get(x as usize, y as usize))])
            });
            DynamicImage::ImageLuma8(buf)
        }
        s if s.is_rgb() => {
            let buf = image::RgbImage::from_fn(w as u32, h as u32, |x, y| {
                let (x, y) = (x as usize, y as usize);
                image::Rgb([
                    quantize8(img.plane(0).get(x, y)),
                    quantize8(img.plane(1).get(x, y)),
                    quantize8(img.plane(2).get(x, y)),
                ])
            });
            DynamicImage::ImageRgb8(buf)
        }
        other => {
            return Err(Error::WrongColorSpace {
                expected: "RGB or Gray",
                actual: other.name(),
            })
        }
    };
    encode(dynimg, ImageFormat::Png)
}

/// How a real-valued map is brought into the encodable `[0, 1]` range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapScaling {
    /// Samples are already in `[0, 1]`; out-of-range values are clamped.
    Unit,
    /// Divide by the maximum sample (non-negative maps such as tau).
    Max,
    /// Min-max stretch.
    MinMax,
}

fn scaled(plane: &Plane, scaling: MapScaling) -> Plane {
    match scaling {
        MapScaling::Unit => plane.clone(),
        MapScaling::Max => {
            let m = plane.max();
            if m > 0.0 {
                plane.scale(1.0 / m)
            } else {
                Plane::zeros(plane.width(), plane.height())
            }
        }
        MapScaling::MinMax => {
            let (lo, hi) = (plane.min(), plane.max());
            if hi > lo {
                plane.map(|v| (v - lo) / (hi - lo))
            } else {
                Plane::zeros(plane.width(), plane.height())
            }
        }
    }
}

fn gray16(plane: &Plane, scaling: MapScaling) -> DynamicImage {
    let p = scaled(plane, scaling);
    let buf = image::ImageBuffer::<image::Luma<u16>, Vec<u16>>::from_fn(
        p.width() as u32,
        p.height() as u32,
        |x, y| image::Luma([quantize16(p.get(x as usize, y as usize))]),
    );
    DynamicImage::ImageLuma16(buf)
}

/// Encode a single map as binary 16-bit PGM.
pub fn encode_map_pgm(plane: &Plane, scaling: MapScaling) -> Result<Vec<u8>> {
    let p = scaled(plane, scaling);
    let mut out = format!("P5\n{} {}\n65535\n", p.width(), p.height()).into_bytes();
    for &v in p.as_slice() {
        out.extend_from_slice(&quantize16(v).to_be_bytes());
    }
    Ok(out)
}

/// Encode a single map as 16-bit grayscale PNG.
pub fn encode_map_png(plane: &Plane, scaling: MapScaling) -> Result<Vec<u8>> {
    encode(gray16(plane, scaling), ImageFormat::Png)
}

/// Write a map to `path`, choosing PGM or PNG from the extension (PGM when
/// there is none).
pub fn write_map(path: &std::path::Path, plane: &Plane, scaling: MapScaling) -> Result<()> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase());
    let bytes = match ext.as_deref() {
        Some("png") => encode_map_png(plane, scaling)?,
        _ => encode_map_pgm(plane, scaling)?,
    };
    std::fs::write(path, bytes)?;
    Ok(())
}

/// Raise every sample to `gamma`, turning an sRGB-encoded image into a
/// linear one. Negative inputs are clamped to zero first.
pub fn apply_gamma(img: &PlanarImage, gamma: f64) -> Result<PlanarImage> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::NonPositiveGamma(gamma));
    }
    if img.space != ColorSpace::RgbSrgb {
        return Err(Error::WrongColorSpace {
            expected: "RGB-sRGB",
            actual: img.space.name(),
        });
    }
    let planes = img
        .planes
        .iter()
        .map(|p| p.map(|v| v.max(0.0).powf(gamma)))
        .collect();
    Ok(img.with_planes(planes, ColorSpace::RgbLinear))
}

/// Opponent channels `(I1, I2, I3) = ((R-G)/Σ, (R+G-2B)/Σ, Σ)` with
/// `Σ = R+G+B`. Pixels with `Σ < OPPONENT_EPSILON` map to `(0, 0, 0)`.
pub fn to_opponent(img: &PlanarImage) -> Result<PlanarImage> {
    if img.space != ColorSpace::RgbLinear {
        return Err(Error::WrongColorSpace {
            expected: "RGB-linear",
            actual: img.space.name(),
        });
    }
    let (w, h) = img.dims();
    let (r, g, b) = (img.plane(0), img.plane(1), img.plane(2));
    let mut i1 = Plane::zeros(w, h);
    let mut i2 = Plane::zeros(w, h);
    let mut i3 = Plane::zeros(w, h);
    for k in 0..w * h {
        let (rv, gv, bv) = (r.as_slice()[k], g.as_slice()[k], b.as_slice()[k]);
        let sum = rv + gv + bv;
        if sum < OPPONENT_EPSILON {
            continue;
        }
        i1.as_mut_slice()[k] = (rv - gv) / sum;
        i2.as_mut_slice()[k] = (rv + gv - 2.0 * bv) / sum;
        i3.as_mut_slice()[k] = sum;
    }
    Ok(img.with_planes(vec![i1, i2, i3], ColorSpace::Opponent))
}

/// Inverse of [`to_opponent`] (exact wherever `I3 > 0`).
pub fn opponent_to_rgb(img: &PlanarImage) -> Result<PlanarImage> {
    if img.space != ColorSpace::Opponent {
        return Err(Error::WrongColorSpace {
            expected: "Opponent",
            actual: img.space.name(),
        });
    }
    let (i1, i2, i3) = (img.plane(0), img.plane(1), img.plane(2));
    let (w, h) = img.dims();
    let mut r = Plane::zeros(w, h);
    let mut g = Plane::zeros(w, h);
    let mut b = Plane::zeros(w, h);
    for k in 0..w * h {
        let s = i3.as_slice()[k];
        let r_minus_g = i1.as_slice()[k] * s;
        let rg_minus_2b = i2.as_slice()[k] * s;
        // R+G+B = s and R+G-2B = t give B = (s - t)/3, R+G = s - B.
        let bv = (s - rg_minus_2b) / 3.0;
        let r_plus_g = s - bv;
        r.as_mut_slice()[k] = (r_plus_g + r_minus_g) / 2.0;
        g.as_mut_slice()[k] = (r_plus_g - r_minus_g) / 2.0;
        b.as_mut_slice()[k] = bv;
    }
    Ok(img.with_planes(vec![r, g, b], ColorSpace::RgbLinear))
}

/// Apply a 3x3 matrix to the three planes of `img`.
pub(crate) fn mix3(img: &PlanarImage, m: &[[f64; 3]; 3]) -> Vec<Plane> {
    let (w, h) = img.dims();
    let (a, b, c) = (
        img.plane(0).as_slice(),
        img.plane(1).as_slice(),
        img.plane(2).as_slice(),
    );
    m.iter()
        .map(|row| {
            let data = (0..w * h)
                .map(|k| row[0] * a[k] + row[1] * b[k] + row[2] * c[k])
                .collect();
            Plane::from_vec(w, h, data).expect("matching sizes")
        })
        .collect()
}

/// NTSC YIQ transform of an RGB image (either RGB tag).
pub fn to_yiq(img: &PlanarImage) -> Result<PlanarImage> {
    img.expect_rgb()?;
    Ok(img.with_planes(mix3(img, &YIQ_MATRIX), ColorSpace::Yiq))
}

/// Decimation factor used by the reference FSIM / SR-SIM code:
/// `max(1, round(min(H, W) / 256))`.
pub fn metric_downsample_factor(width: usize, height: usize) -> usize {
    let f = (width.min(height) as f64 / 256.0).round() as usize;
    f.max(1)
}

/// Average non-overlapping `f x f` blocks, `f` from
/// [`metric_downsample_factor`]. Trailing rows/columns that do not fill a
/// block are dropped. The factor is recorded on the result.
pub fn downsample_for_metric(img: &PlanarImage) -> PlanarImage {
    let (w, h) = img.dims();
    let f = metric_downsample_factor(w, h);
    if f == 1 {
        return img.clone();
    }
    let (ow, oh) = (w / f, h / f);
    let norm = 1.0 / (f * f) as f64;
    let planes = img
        .planes
        .iter()
        .map(|p| {
            Plane::from_fn(ow, oh, |x, y| {
                let mut acc = 0.0;
                for yy in y * f..(y + 1) * f {
                    for xx in x * f..(x + 1) * f {
                        acc += p.get(xx, yy);
                    }
                }
                acc * norm
            })
        })
        .collect();
    PlanarImage {
        planes,
        space: img.space,
        downsample_factor: img.downsample_factor * f,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rgb(r: f64, g: f64, b: f64) -> PlanarImage {
        PlanarImage::new(
            vec![
                Plane::filled(1, 1, r),
                Plane::filled(1, 1, g),
                Plane::filled(1, 1, b),
            ],
            ColorSpace::RgbLinear,
        )
        .unwrap()
    }

    fn px(img: &PlanarImage) -> [f64; 3] {
        [
            img.plane(0).get(0, 0),
            img.plane(1).get(0, 0),
            img.plane(2).get(0, 0),
        ]
    }

    #[test]
    fn decode_white_png() {
        let buf = image::RgbImage::from_pixel(1, 1, image::Rgb([255, 255, 255]));
        let bytes = encode(DynamicImage::ImageRgb8(buf), ImageFormat::Png).unwrap();
        let img = decode_image(&bytes).unwrap();
        assert_eq!(img.space(), ColorSpace::RgbSrgb);
        assert_eq!(px(&img), [1.0, 1.0, 1.0]);
    }

    #[test]
    fn decode_ppm_primaries() {
        let bytes = b"P3\n2 1\n255\n0 0 0 255 0 0\n";
        let img = decode_image(bytes).unwrap();
        assert_eq!(img.plane(0).as_slice(), &[0.0, 1.0]);
        assert_eq!(img.plane(1).as_slice(), &[0.0, 0.0]);
        assert_eq!(img.plane(2).as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn decode_truncated_png_is_corrupt() {
        let buf = image::RgbImage::from_fn(16, 16, |x, y| image::Rgb([x as u8, y as u8, 7]));
        let bytes = encode(DynamicImage::ImageRgb8(buf), ImageFormat::Png).unwrap();
        let cut = &bytes[..bytes.len() / 2];
        assert!(matches!(decode_image(cut), Err(Error::CorruptStream(_))));
    }

    #[test]
    fn decode_rejects_unknown_format() {
        assert!(matches!(
            decode_image(b"hello world"),
            Err(Error::UnsupportedFormat)
        ));
    }

    #[test]
    fn gamma_fixed_points_and_value() {
        let img = PlanarImage::new(
            vec![
                Plane::from_vec(3, 1, vec![0.0, 0.5, 1.0]).unwrap(),
                Plane::zeros(3, 1),
                Plane::filled(3, 1, 1.0),
            ],
            ColorSpace::RgbSrgb,
        )
        .unwrap();
        let lin = apply_gamma(&img, 2.2).unwrap();
        assert_eq!(lin.space(), ColorSpace::RgbLinear);
        assert_eq!(lin.plane(0).get(0, 0), 0.0);
        assert_eq!(lin.plane(0).get(2, 0), 1.0);
        assert!((lin.plane(0).get(1, 0) - 0.217_637_640_824_031_1).abs() < 1e-15);
        let same = apply_gamma(&img, 1.0).unwrap();
        assert_eq!(same.planes(), img.planes());
        assert!(matches!(
            apply_gamma(&img, 0.0),
            Err(Error::NonPositiveGamma(_))
        ));
        assert!(matches!(
            apply_gamma(&img, -1.0),
            Err(Error::NonPositiveGamma(_))
        ));
    }

    #[test]
    fn opponent_substitutions() {
        assert_eq!(
            px(&to_opponent(&rgb(0.3, 0.3, 0.3)).unwrap())[..2],
            [0.0, 0.0]
        );
        assert!((px(&to_opponent(&rgb(0.3, 0.3, 0.3)).unwrap())[2] - 0.9).abs() < 1e-15);
        assert_eq!(
            px(&to_opponent(&rgb(1.0, 0.0, 0.0)).unwrap()),
            [1.0, 1.0, 1.0]
        );
        assert_eq!(
            px(&to_opponent(&rgb(0.0, 0.0, 1.0)).unwrap()),
            [0.0, -2.0, 1.0]
        );
        assert_eq!(
            px(&to_opponent(&rgb(0.0, 0.0, 0.0)).unwrap()),
            [0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn yiq_golden_matrix() {
        let img = PlanarImage::new(
            vec![
                Plane::filled(1, 1, 1.0),
                Plane::zeros(1, 1),
                Plane::zeros(1, 1),
            ],
            ColorSpace::RgbSrgb,
        )
        .unwrap();
        assert_eq!(px(&to_yiq(&img).unwrap()), [0.299, 0.596, 0.211]);
        let gray =
            PlanarImage::new(vec![Plane::filled(1, 1, 0.4); 3], ColorSpace::RgbSrgb).unwrap();
        let yiq = px(&to_yiq(&gray).unwrap());
        assert!((yiq[0] - 0.4).abs() < 1e-15);
        assert!(yiq[1].abs() < 1e-15 && yiq[2].abs() < 1e-15);
    }

    #[test]
    fn downsample_factors() {
        assert_eq!(metric_downsample_factor(256, 256), 1);
        assert_eq!(metric_downsample_factor(512, 512), 2);
        assert_eq!(metric_downsample_factor(100, 700), 1);
        assert_eq!(metric_downsample_factor(383, 900), 1);
        assert_eq!(metric_downsample_factor(384, 900), 2);

        let img = PlanarImage::new(
            vec![Plane::from_fn(512, 512, |x, y| (x + y) as f64); 3],
            ColorSpace::RgbSrgb,
        )
        .unwrap();
        let small = downsample_for_metric(&img);
        assert_eq!(small.dims(), (256, 256));
        assert_eq!(small.downsample_factor(), 2);
        // mean of {0,1,1,2}
        assert_eq!(small.plane(0).get(0, 0), 1.0);

        let same =
            PlanarImage::new(vec![Plane::filled(256, 256, 0.5); 3], ColorSpace::RgbSrgb).unwrap();
        assert_eq!(downsample_for_metric(&same), same);
    }

    #[test]
    fn plane_count_is_checked() {
        assert!(PlanarImage::new(vec![Plane::zeros(2, 2)], ColorSpace::RgbSrgb).is_err());
        assert!(PlanarImage::new(
            vec![Plane::zeros(2, 2), Plane::zeros(2, 2), Plane::zeros(3, 2)],
            ColorSpace::RgbSrgb
        )
        .is_err());
    }

    #[test]
    fn map_pgm_is_binary_16_bit() {
        let p = Plane::from_vec(2, 1, vec![0.0, 1.0]).unwrap();
        let bytes = encode_map_pgm(&p, MapScaling::Unit).unwrap();
        assert!(bytes.starts_with(b"P5"));
        assert!(bytes.ends_with(&[0, 0, 255, 255]));
    }
}
