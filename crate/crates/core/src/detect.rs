//! Multi-scale sliding-window scanning, detection grouping and
//! region-constrained facial-feature detection.
//!
//! Scanning slides the cascade's base window over the image at a geometric
//! ladder of scales, scaling the Haar rectangles rather than the image so
//! evaluation cost stays constant per window. Raw hits are grouped by the
//! transitive closure of pairwise overlap (union-find) and merged at the
//! member average; eyes, nose and mouth are found by re-scanning fixed
//! bands of a detected face.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boost::{BoostError, Cascade};
use crate::imgio::GrayImage;
use crate::integral::build_integral;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Error, PartialEq)]
pub enum DetectError {
    #[error("face rect {0:?} falls outside the {1}x{2} image")]
    FaceOutsideImage(Rect, u32, u32),
    #[error(transparent)]
    Boost(#[from] BoostError),
}

/// Axis-aligned rectangle in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl Rect {
    pub fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        Rect { x, y, w, h }
    }

    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }

    /// Intersection-over-union overlap in `[0, 1]`.
    pub fn iou(&self, other: &Rect) -> f64 {
        let ix0 = self.x.max(other.x);
        let iy0 = self.y.max(other.y);
        let ix1 = (self.x + self.w).min(other.x + other.w);
        let iy1 = (self.y + self.h).min(other.y + other.h);
        if ix1 <= ix0 || iy1 <= iy0 {
            return 0.0;
        }
        let inter = (ix1 - ix0) as f64 * (iy1 - iy0) as f64;
        let union = self.area() as f64 + other.area() as f64 - inter;
        inter / union
    }
}

/// One detected window, possibly merged from several raw hits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub rect: Rect,
    pub scale: f64,
    /// Raw hits merged into this detection (1 before grouping).
    pub neighbors: usize,
}

/// Sliding-window scan parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanParams {
    /// Geometric ratio between consecutive window sizes; must exceed 1.
    pub scale_factor: f64,
    /// Step between window origins as a fraction of the window size,
    /// floored at one pixel.
    pub step_fraction: f64,
    /// Smallest window side scanned; 0 means the cascade base window.
    pub min_size: u32,
    /// Largest window side scanned; 0 means the whole image.
    pub max_size: u32,
    /// Minimum merged-cluster size for a detection to survive grouping.
    pub min_neighbors: usize,
    /// Pairwise IoU at or above which raw hits join a cluster.
    pub overlap_eps: f64,
}

impl Default for ScanParams {
    fn default() -> Self {
        ScanParams {
            scale_factor: 1.25,
            step_fraction: 0.05,
            min_size: 0,
            max_size: 0,
            min_neighbors: 3,
            overlap_eps: 0.3,
        }
    }
}

/// Scans `img` with the cascade at every scale, returning one ungrouped
/// [`Detection`] per accepted window. Output order is deterministic:
/// scales small to large, each scanned row-major. Images smaller than the
/// minimum window give an empty result.
pub fn scan(img: &GrayImage, cascade: &Cascade, params: &ScanParams) -> Vec<Detection> {
    let ii = build_integral(img);
    let base = cascade.base_window;
    let min_size = params.min_size.max(base);
    let max_size = if params.max_size == 0 {
        img.width.min(img.height)
    } else {
        params.max_size.min(img.width.min(img.height))
    };

    // The scale ladder, fixed up front so work can fan out per rung.
    let mut rungs: Vec<(f64, u32)> = Vec::new();
    let mut ratio = 1.0f64;
    loop {
        let window = cascade.scaled_window(ratio);
        if window > max_size {
            break;
        }
        if window >= min_size {
            rungs.push((ratio, window));
        }
        ratio *= params.scale_factor;
        if params.scale_factor <= 1.0 {
            break; // guard against a non-increasing ladder
        }
    }

    let scan_rung = |&(ratio, window): &(f64, u32)| -> Vec<Detection> {
        let step = ((params.step_fraction * window as f64 + 0.5).floor() as u32).max(1);
        let mut hits = Vec::new();
        let mut oy = 0;
        while oy + window <= img.height {
            let mut ox = 0;
            while ox + window <= img.width {
                let (accepted, _) = cascade
                    .classify_window(&ii, ox, oy, ratio)
                    .expect("scan keeps windows in bounds");
                if accepted {
                    hits.push(Detection {
                        rect: Rect::new(ox, oy, window, window),
                        scale: ratio,
                        neighbors: 1,
                    });
                }
                ox += step;
            }
            oy += step;
        }
        hits
    };

    // Rungs are independent; concatenation in rung order keeps the output
    // identical at any thread count.
    #[cfg(feature = "parallel")]
    let per_rung: Vec<Vec<Detection>> = rungs.par_iter().map(scan_rung).collect();
    #[cfg(not(feature = "parallel"))]
    let per_rung: Vec<Vec<Detection>> = rungs.iter().map(scan_rung).collect();

    per_rung.into_iter().flatten().collect()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Lower root wins, keeping cluster ids deterministic.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Groups raw detections by the transitive closure of pairwise
/// `IoU >= overlap_eps`, drops clusters smaller than `min_neighbors`, and
/// replaces each survivor with the member-average rectangle (rounded to
/// nearest). Output is sorted by `(y, x, w)`.
pub fn group_detections(
    raw: &[Detection],
    min_neighbors: usize,
    overlap_eps: f64,
) -> Vec<Detection> {
    let mut uf = UnionFind::new(raw.len());
    for i in 0..raw.len() {
        for j in (i + 1)..raw.len() {
            if raw[i].rect.iou(&raw[j].rect) >= overlap_eps {
                uf.union(i, j);
            }
        }
    }

    let mut clusters: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..raw.len() {
        let root = uf.find(i);
        clusters.entry(root).or_default().push(i);
    }

    let mut merged: Vec<Detection> = clusters
        .into_values()
        // Class size counts the raw hits behind each member, so grouping
        // an already-grouped list keeps surviving detections intact.
        .filter(|members| {
            let count: usize = members.iter().map(|&i| raw[i].neighbors).sum();
            count >= min_neighbors.max(1)
        })
        .map(|members| {
            let count: usize = members.iter().map(|&i| raw[i].neighbors).sum();
            let n = members.len() as f64;
            let mean = |get: &dyn Fn(&Detection) -> f64| -> f64 {
                members.iter().map(|&i| get(&raw[i])).sum::<f64>() / n
            };
            let round = |v: f64| (v + 0.5).floor() as u32;
            // Averaging corners (not widths) keeps the merged rect inside
            // the hull of its members even after rounding.
            let x = round(mean(&|d| d.rect.x as f64));
            let y = round(mean(&|d| d.rect.y as f64));
            let x2 = round(mean(&|d| (d.rect.x + d.rect.w) as f64));
            let y2 = round(mean(&|d| (d.rect.y + d.rect.h) as f64));
            Detection {
                rect: Rect::new(x, y, x2.max(x + 1) - x, y2.max(y + 1) - y),
                scale: mean(&|d| d.scale),
                neighbors: count,
            }
        })
        .collect();
    merged.sort_by_key(|d| (d.rect.y, d.rect.x, d.rect.w));
    merged
}

/// Scan followed by grouping with the same parameters.
pub fn detect_faces(img: &GrayImage, cascade: &Cascade, params: &ScanParams) -> Vec<Detection> {
    group_detections(&scan(img, cascade, params), params.min_neighbors, params.overlap_eps)
}

/// Facial features locatable inside a detected face region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FacePart {
    Eyes,
    Nose,
    Mouth,
}

impl FacePart {
    pub const ALL: [FacePart; 3] = [FacePart::Eyes, FacePart::Nose, FacePart::Mouth];

    pub fn label(self) -> &'static str {
        match self {
            FacePart::Eyes => "eyes",
            FacePart::Nose => "nose",
            FacePart::Mouth => "mouth",
        }
    }

    /// Vertical band of the face this part is searched in, as fractions
    /// of the face height: eyes in the top 55%, nose in the central
    /// 30-70% band, mouth in the bottom 40%.
    pub fn band(self) -> (f64, f64) {
        match self {
            FacePart::Eyes => (0.0, 0.55),
            FacePart::Nose => (0.30, 0.70),
            FacePart::Mouth => (0.60, 1.0),
        }
    }
}

/// Runs each part cascade over its prior band of the face region and
/// returns detections in full-image coordinates. A band smaller than the
/// part's base window yields an empty list for that part.
pub fn detect_parts(
    img: &GrayImage,
    face: Rect,
    parts: &BTreeMap<FacePart, Cascade>,
    params: &ScanParams,
) -> Result<BTreeMap<FacePart, Vec<Detection>>, DetectError> {
    if face.w < 1 || face.h < 1 || face.x + face.w > img.width || face.y + face.h > img.height {
        return Err(DetectError::FaceOutsideImage(face, img.width, img.height));
    }

    let mut out = BTreeMap::new();
    for (&part, cascade) in parts {
        let (top, bottom) = part.band();
        let band_y = face.y + (top * face.h as f64).round() as u32;
        let band_h = ((bottom - top) * face.h as f64).round() as u32;
        let band_h = band_h.min(face.y + face.h - band_y);

        let mut found = Vec::new();
        if band_h >= cascade.base_window && face.w >= cascade.base_window {
            let roi = img
                .crop(face.x, band_y, face.w, band_h)
                .expect("band stays inside the face rect");
            found = detect_faces(&roi, cascade, params)
                .into_iter()
                .map(|mut d| {
                    d.rect.x += face.x;
                    d.rect.y += band_y;
                    d
                })
                .collect();
        }
        out.insert(part, found);
    }
    Ok(out)
}
