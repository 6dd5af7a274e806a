//! Haar-style grouplet recursion over a detail plane.
//!
//! Consecutive samples along each row (the first pixel index) are paired:
//!
//! ```text
//! a_{j+1}[m] = (a_j[2m-1] + a_j[2m]) / 2
//! d_{j+1}[m] = (a_j[2m] - a_j[2m-1]) / 2^j
//! ```
//!
//! with 1-based `m`. Rows of odd length pair their last sample with its
//! mirror image, i.e. with itself.

use crate::error::{Error, Result};
use crate::multiscale::Orientation;
use crate::plane::Plane;

/// One grouplet level: the approximation and the normalized detail.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupletLevel {
    pub approximation: Plane,
    pub detail: Plane,
}

/// The source plane and the `depth` levels computed from it. Level `k`
/// (1-based) has been paired `k` times, so its approximation is the mean
/// of `2^k` consecutive source samples and its detail is normalized by
/// `2^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupletStack {
    parent: Option<(usize, Orientation)>,
    source: Plane,
    levels: Vec<GroupletLevel>,
}

impl GroupletStack {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// The initializing plane (`a_1`).
    pub fn source(&self) -> &Plane {
        &self.source
    }

    /// Level `k` in `1..=depth`.
    pub fn level(&self, k: usize) -> &GroupletLevel {
        &self.levels[k - 1]
    }

    pub fn levels(&self) -> &[GroupletLevel] {
        &self.levels
    }

    /// Wavelet plane this stack was built from, when known.
    pub fn parent(&self) -> Option<(usize, Orientation)> {
        self.parent
    }

    pub fn with_parent(mut self, scale: usize, orientation: Orientation) -> Self {
        self.parent = Some((scale, orientation));
        self
    }
}

fn pair_rows(src: &Plane, norm: f64) -> GroupletLevel {
    let (w, h) = src.dims();
    let half = w.div_ceil(2);
    let mut approximation = Plane::zeros(half, h);
    let mut detail = Plane::zeros(half, h);
    for y in 0..h {
        let row = src.row(y);
        for m in 0..half {
            let first = row[2 * m];
            let second = if 2 * m + 1 < w { row[2 * m + 1] } else { first };
            approximation.set(m, y, (first + second) / 2.0);
            detail.set(m, y, (second - first) / norm);
        }
    }
    GroupletLevel {
        approximation,
        detail,
    }
}

/// Run `depth` pairing levels over the rows of `plane`.
pub fn grouplet_forward(plane: &Plane, depth: usize) -> Result<GroupletStack> {
    if plane.is_empty() {
        return Err(Error::EmptyPlane);
    }
    let needed = 1usize.checked_shl(depth as u32).unwrap_or(usize::MAX);
    if depth == 0 || plane.width() < needed {
        return Err(Error::DepthTooLarge {
            depth,
            needed,
            extent: plane.width(),
        });
    }
    let mut levels: Vec<GroupletLevel> = Vec::with_capacity(depth);
    for k in 1..=depth {
        let prev = levels.last().map_or(plane, |l| &l.approximation);
        let level = pair_rows(prev, (1u64 << k) as f64);
        levels.push(level);
    }
    Ok(GroupletStack {
        parent: None,
        source: plane.clone(),
        levels,
    })
}

/// Largest `J` with `2^J <= width`, clamped to `1..=5`.
pub fn default_depth(width: usize) -> usize {
    let mut j = 0;
    while j < 5 && (1usize << (j + 1)) <= width {
        j += 1;
    }
    j.max(1)
}
