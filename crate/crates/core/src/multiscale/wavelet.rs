//! Undecimated (à trous) separable wavelet decomposition with horizontal,
//! vertical and diagonal detail planes.
//!
//! With `L_x`, `L_y` the B3-spline smoothing along rows/columns (holes of
//! `2^(s-1)` at scale `s`) and `c_0` the source plane:
//!
//! ```text
//! c_s = L_x L_y c_{s-1}
//! h_s = (I - L_x) L_y c_{s-1}     high-pass across columns
//! v_s = L_x (I - L_y) c_{s-1}     high-pass across rows
//! d_s = (I - L_x)(I - L_y) c_{s-1}
//! ```
//!
//! so `h_s + v_s + d_s = c_{s-1} - c_s` and the inverse is a plain sum.
//! A vertical edge (intensity varying along x) lands in `h`.

use crate::error::{Error, Result};
use crate::plane::{filter_cols, filter_rows, Plane};

/// B3-spline smoothing taps `[1, 4, 6, 4, 1] / 16`.
pub const B3_SPLINE_TAPS: [f64; 5] = [0.0625, 0.25, 0.375, 0.25, 0.0625];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Horizontal,
    Vertical,
    Diagonal,
}

impl Orientation {
    pub const ALL: [Orientation; 3] = [
        Orientation::Horizontal,
        Orientation::Vertical,
        Orientation::Diagonal,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn short(self) -> char {
        match self {
            Orientation::Horizontal => 'h',
            Orientation::Vertical => 'v',
            Orientation::Diagonal => 'd',
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "h" | "horizontal" => Some(Orientation::Horizontal),
            "v" | "vertical" => Some(Orientation::Vertical),
            "d" | "diagonal" => Some(Orientation::Diagonal),
            _ => None,
        }
    }
}

/// Detail planes `w[s][o]` for scales `1..=S` (stored at index `s - 1`) and
/// the residual approximation `c_S`, all at source resolution.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveletPyramid {
    details: Vec<[Plane; 3]>,
    residual: Plane,
}

impl WaveletPyramid {
    /// Assemble a pyramid from parts, checking that every plane has the
    /// residual's dimensions.
    pub fn from_parts(details: Vec<[Plane; 3]>, residual: Plane) -> Result<Self> {
        let pyr = Self { details, residual };
        pyr.validate()?;
        Ok(pyr)
    }

    fn validate(&self) -> Result<()> {
        if self.details.is_empty() {
            return Err(Error::MalformedPyramid("no detail scales".into()));
        }
        if self.residual.is_empty() {
            return Err(Error::MalformedPyramid("empty residual".into()));
        }
        for (s, planes) in self.details.iter().enumerate() {
            for (o, p) in Orientation::ALL.iter().zip(planes) {
                if !p.same_dims(&self.residual) {
                    return Err(Error::MalformedPyramid(format!(
                        "plane ({}, {}) is {}x{}, residual is {}x{}",
                        s + 1,
                        o.short(),
                        p.width(),
                        p.height(),
                        self.residual.width(),
                        self.residual.height()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn scales(&self) -> usize {
        self.details.len()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.residual.dims()
    }

    /// Detail plane at 1-based `scale` and `orientation`.
    pub fn detail(&self, scale: usize, orientation: Orientation) -> &Plane {
        &self.details[scale - 1][orientation.index()]
    }

    pub fn detail_mut(&mut self, scale: usize, orientation: Orientation) -> &mut Plane {
        &mut self.details[scale - 1][orientation.index()]
    }

    pub fn residual(&self) -> &Plane {
        &self.residual
    }

    pub fn residual_mut(&mut self) -> &mut Plane {
        &mut self.residual
    }

    /// Iterate `(scale, orientation, plane)` in scale-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, Orientation, &Plane)> {
        self.details.iter().enumerate().flat_map(|(s, planes)| {
            Orientation::ALL
                .iter()
                .zip(planes)
                .map(move |(&o, p)| (s + 1, o, p))
        })
    }

    /// Apply `f` to every plane, residual included.
    pub fn map(&self, f: impl Fn(&Plane) -> Plane) -> Result<Self> {
        Self::from_parts(
            self.details
                .iter()
                .map(|[h, v, d]| [f(h), f(v), f(d)])
                .collect(),
            f(&self.residual),
        )
    }
}

/// Decompose `plane` into `scales` undecimated detail scales.
pub fn wavelet_forward(plane: &Plane, scales: usize) -> Result<WaveletPyramid> {
    if plane.is_empty() {
        return Err(Error::EmptyPlane);
    }
    let (w, h) = plane.dims();
    if scales == 0 || scales >= usize::BITS as usize || w.min(h) < (1usize << scales) {
        return Err(Error::TooManyScales {
            scales,
            needed: 1usize.checked_shl(scales as u32).unwrap_or(usize::MAX),
            width: w,
            height: h,
        });
    }
    let mut details = Vec::with_capacity(scales);
    let mut current = plane.clone();
    for s in 1..=scales {
        let step = 1usize << (s - 1);
        let ly = filter_cols(&current, &B3_SPLINE_TAPS, step);
        let lx = filter_rows(&current, &B3_SPLINE_TAPS, step);
        let next = filter_rows(&ly, &B3_SPLINE_TAPS, step);
        let horizontal = ly.zip_map(&next, |a, b| a - b)?;
        let vertical = lx.zip_map(&next, |a, b| a - b)?;
        let mut diagonal = Plane::zeros(w, h);
        for (k, d) in diagonal.as_mut_slice().iter_mut().enumerate() {
            *d = current.as_slice()[k] - lx.as_slice()[k] - ly.as_slice()[k] + next.as_slice()[k];
        }
        details.push([horizontal, vertical, diagonal]);
        current = next;
    }
    Ok(WaveletPyramid {
        details,
        residual: current,
    })
}

/// Reconstruct the source plane: residual plus every detail plane.
pub fn wavelet_inverse(pyr: &WaveletPyramid) -> Result<Plane> {
    pyr.validate()?;
    let mut out = pyr.residual.clone();
    for planes in pyr.details.iter().rev() {
        for p in planes {
            for (o, v) in out.as_mut_slice().iter_mut().zip(p.as_slice()) {
                *o += v;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn energy(p: &Plane) -> f64 {
        p.sum_squares()
    }

    #[test]
    fn constant_goes_to_residual() {
        let p = Plane::filled(32, 24, 0.7);
        let pyr = wavelet_forward(&p, 3).unwrap();
        assert_eq!(pyr.scales(), 3);
        for (_, _, d) in pyr.iter() {
            assert!(d.as_slice().iter().all(|v| v.abs() < 1e-14));
        }
        assert!(pyr
            .residual()
            .as_slice()
            .iter()
            .all(|v| (v - 0.7).abs() < 1e-14));
    }

    #[test]
    fn vertical_edge_is_horizontal_detail() {
        let p = Plane::from_fn(64, 64, |x, _| if x < 32 { 0.0 } else { 1.0 });
        let pyr = wavelet_forward(&p, 3).unwrap();
        for s in 1..=3 {
            let eh = energy(pyr.detail(s, Orientation::Horizontal));
            let ev = energy(pyr.detail(s, Orientation::Vertical));
            let ed = energy(pyr.detail(s, Orientation::Diagonal));
            assert!(
                eh > 10.0 * (ev + ed).max(f64::MIN_POSITIVE),
                "scale {s}: {eh} {ev} {ed}"
            );
        }
    }

    #[test]
    fn too_many_scales() {
        let p = Plane::zeros(16, 40);
        assert!(wavelet_forward(&p, 4).is_ok());
        assert!(matches!(
            wavelet_forward(&p, 5),
            Err(Error::TooManyScales { needed: 32, .. })
        ));
        assert!(wavelet_forward(&p, 0).is_err());
    }

    #[test]
    fn zero_pyramid_inverts_to_zero() {
        let z = Plane::zeros(8, 8);
        let pyr = WaveletPyramid::from_parts(vec![[z.clone(), z.clone(), z.clone()]; 2], z.clone())
            .unwrap();
        assert_eq!(wavelet_inverse(&pyr).unwrap(), z);
    }

    #[test]
    fn malformed_pyramid_rejected() {
        let z = Plane::zeros(8, 8);
        let bad = Plane::zeros(4, 8);
        assert!(matches!(
            WaveletPyramid::from_parts(vec![[z.clone(), bad, z.clone()]], z.clone()),
            Err(Error::MalformedPyramid(_))
        ));
        let mut pyr = wavelet_forward(&Plane::filled(8, 8, 1.0), 2).unwrap();
        *pyr.detail_mut(2, Orientation::Diagonal) = Plane::zeros(3, 3);
        assert!(matches!(
            wavelet_inverse(&pyr),
            Err(Error::MalformedPyramid(_))
        ));
    }

    #[test]
    fn scaled_pyramid_inverts_to_scaled_source() {
        let p = Plane::from_fn(16, 16, |x, y| ((x * 7 + y * 3) % 11) as f64);
        let pyr = wavelet_forward(&p, 2).unwrap();
        let back = wavelet_inverse(&pyr.map(|q| q.scale(2.5)).unwrap()).unwrap();
        for (a, b) in back.as_slice().iter().zip(p.as_slice()) {
            assert!((a - 2.5 * b).abs() < 1e-10);
        }
    }
}
