//! Synthetic distortions for fixtures and sanity checks: Gaussian blur,
//! JPEG-style block quantization, and luma-preserving hue/saturation
//! changes.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::image::{PlanarImage, YIQ_MATRIX};
use crate::plane::{gaussian_smooth, Plane};

fn expect_rgb(img: &PlanarImage) -> Result<()> {
    if img.space().is_rgb() {
        Ok(())
    } else {
        Err(Error::WrongColorSpace {
            expected: "RGB",
            actual: img.space().name(),
        })
    }
}

fn rebuild(img: &PlanarImage, planes: Vec<Plane>) -> Result<PlanarImage> {
    PlanarImage::new(planes, img.space())
}

/// Gaussian blur with `sigma = radius` pixels; radius 0 is the identity.
pub fn gaussian_blur(img: &PlanarImage, radius: f64) -> Result<PlanarImage> {
    expect_rgb(img)?;
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::InvalidParameter(format!("blur radius {radius}")));
    }
    if radius == 0.0 {
        return Ok(img.clone());
    }
    rebuild(
        img,
        img.planes()
            .iter()
            .map(|p| gaussian_smooth(p, radius))
            .collect(),
    )
}

const LUMA_TABLE: [f64; 64] = [
    16., 11., 10., 16., 24., 40., 51., 61., 12., 12., 14., 19., 26., 58., 60., 55., 14., 13., 16.,
    24., 40., 57., 69., 56., 14., 17., 22., 29., 51., 87., 80., 62., 18., 22., 37., 56., 68., 109.,
    103., 77., 24., 35., 55., 64., 81., 104., 113., 92., 49., 64., 78., 87., 103., 121., 120.,
    101., 72., 92., 95., 98., 112., 100., 103., 99.,
];

const CHROMA_TABLE: [f64; 64] = [
    17., 18., 24., 47., 99., 99., 99., 99., 18., 21., 26., 66., 99., 99., 99., 99., 24., 26., 56.,
    99., 99., 99., 99., 99., 47., 66., 99., 99., 99., 99., 99., 99., 99., 99., 99., 99., 99., 99.,
    99., 99., 99., 99., 99., 99., 99., 99., 99., 99., 99., 99., 99., 99., 99., 99., 99., 99., 99.,
    99., 99., 99., 99., 99., 99., 99.,
];

fn dct_basis() -> [[f64; 8]; 8] {
    let mut m = [[0.0; 8]; 8];
    for (u, row) in m.iter_mut().enumerate() {
        let a = if u == 0 {
            (1.0f64 / 8.0).sqrt()
        } else {
            (2.0f64 / 8.0).sqrt()
        };
        for (x, v) in row.iter_mut().enumerate() {
            *v = a * ((2 * x + 1) as f64 * u as f64 * PI / 16.0).cos();
        }
    }
    m
}

/// Quantize one plane (8-bit scale, level-shifted) block by block.
fn quantize_plane(p: &Plane, table: &[f64; 64], strength: f64, basis: &[[f64; 8]; 8]) -> Plane {
    let (w, h) = p.dims();
    let mut out = Plane::zeros(w, h);
    let mut block = [[0.0; 8]; 8];
    let mut tmp = [[0.0; 8]; 8];
    for by in (0..h).step_by(8) {
        for bx in (0..w).step_by(8) {
            for (y, row) in block.iter_mut().enumerate() {
                for (x, v) in row.iter_mut().enumerate() {
                    // Partial edge blocks repeat the last row/column.
                    let sx = (bx + x).min(w - 1);
                    let sy = (by + y).min(h - 1);
                    *v = p.get(sx, sy) * 255.0 - 128.0;
                }
            }
            // Forward: C = B X B^T.
            for u in 0..8 {
                for x in 0..8 {
                    tmp[u][x] = (0..8).map(|y| basis[u][y] * block[y][x]).sum();
                }
            }
            for u in 0..8 {
                for v in 0..8 {
                    let c: f64 = (0..8).map(|x| tmp[u][x] * basis[v][x]).sum();
                    let q = (table[u * 8 + v] * strength).max(1.0);
                    block[u][v] = (c / q).round() * q;
                }
            }
            // Inverse: X = B^T C B.
            for y in 0..8 {
                for v in 0..8 {
                    tmp[y][v] = (0..8).map(|u| basis[u][y] * block[u][v]).sum();
                }
            }
            for y in 0..8 {
                for x in 0..8 {
                    let (sx, sy) = (bx + x, by + y);
                    if sx < w && sy < h {
                        let v: f64 = (0..8).map(|v| tmp[y][v] * basis[v][x]).sum();
                        out.set(sx, sy, ((v + 128.0) / 255.0).clamp(0.0, 1.0));
                    }
                }
            }
        }
    }
    out
}

/// JPEG-style compression: JFIF YCbCr, 8x8 DCT, and rounding against the
/// standard quantization tables scaled by `strength`. Strength 0 returns
/// the input unchanged.
pub fn jpeg_quantize(img: &PlanarImage, strength: f64) -> Result<PlanarImage> {
    expect_rgb(img)?;
    if !(strength >= 0.0) || !strength.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "quantization strength {strength}"
        )));
    }
    if strength == 0.0 {
        return Ok(img.clone());
    }
    let (w, h) = img.dims();
    let (r, g, b) = (img.plane(0), img.plane(1), img.plane(2));
    let y = Plane::from_fn(w, h, |x, yy| {
        0.299 * r.get(x, yy) + 0.587 * g.get(x, yy) + 0.114 * b.get(x, yy)
    });
    let cb = Plane::from_fn(w, h, |x, yy| {
        0.5 - 0.168736 * r.get(x, yy) - 0.331264 * g.get(x, yy) + 0.5 * b.get(x, yy)
    });
    let cr = Plane::from_fn(w, h, |x, yy| {
        0.5 + 0.5 * r.get(x, yy) - 0.418688 * g.get(x, yy) - 0.081312 * b.get(x, yy)
    });
    let basis = dct_basis();
    let y = quantize_plane(&y, &LUMA_TABLE, strength, &basis);
    let cb = quantize_plane(&cb, &CHROMA_TABLE, strength, &basis);
    let cr = quantize_plane(&cr, &CHROMA_TABLE, strength, &basis);
    let planes = [
        (1.0, 0.0, 1.402),
        (1.0, -0.344136, -0.714136),
        (1.0, 1.772, 0.0),
    ]
    .iter()
    .map(|&(ky, kb, kr)| {
        Plane::from_fn(w, h, |x, yy| {
            (ky * y.get(x, yy) + kb * (cb.get(x, yy) - 0.5) + kr * (cr.get(x, yy) - 0.5))
                .clamp(0.0, 1.0)
        })
    })
    .collect();
    rebuild(img, planes)
}

fn invert3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let mut inv = [[0.0; 3]; 3];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let (a, b) = ((j + 1) % 3, (j + 2) % 3);
            let (c, d) = ((i + 1) % 3, (i + 2) % 3);
            *v = (m[a][c] * m[b][d] - m[a][d] * m[b][c]) / det;
        }
    }
    inv
}

/// Rotate the (I, Q) chroma vector by `angle` radians and scale it by
/// `saturation`, keeping the YIQ luma of every pixel. Chroma that would
/// leave the RGB cube is pulled back toward the gray of the same luma.
pub fn shift_chroma(img: &PlanarImage, angle: f64, saturation: f64) -> Result<PlanarImage> {
    expect_rgb(img)?;
    if !(saturation >= 0.0) || !saturation.is_finite() || !angle.is_finite() {
        return Err(Error::InvalidParameter("chroma shift parameters".into()));
    }
    let inv = invert3(&YIQ_MATRIX);
    let (w, h) = img.dims();
    let (ca, sa) = (angle.cos(), angle.sin());
    let mut out = [Plane::zeros(w, h), Plane::zeros(w, h), Plane::zeros(w, h)];
    for yy in 0..h {
        for x in 0..w {
            let rgb = [
                img.plane(0).get(x, yy),
                img.plane(1).get(x, yy),
                img.plane(2).get(x, yy),
            ];
            let yiq: Vec<f64> = YIQ_MATRIX
                .iter()
                .map(|row| row[0] * rgb[0] + row[1] * rgb[1] + row[2] * rgb[2])
                .collect();
            let i2 = saturation * (ca * yiq[1] - sa * yiq[2]);
            let q2 = saturation * (sa * yiq[1] + ca * yiq[2]);
            // White has zero I and Q, so the gray of luma Y is (Y, Y, Y).
            let delta: Vec<f64> = (0..3).map(|c| inv[c][1] * i2 + inv[c][2] * q2).collect();
            let gray: Vec<f64> = (0..3).map(|c| inv[c][0] * yiq[0]).collect();
            let mut t: f64 = 1.0;
            for c in 0..3 {
                if delta[c] > 0.0 {
                    t = t.min(((1.0 - gray[c]) / delta[c]).max(0.0));
                } else if delta[c] < 0.0 {
                    t = t.min((gray[c] / -delta[c]).max(0.0));
                }
            }
            for c in 0..3 {
                out[c].set(x, yy, gray[c] + t * delta[c]);
            }
        }
    }
    rebuild(img, out.into())
}
