//! Haar-like features: enumeration over a base window and evaluation
//! against an integral image.
//!
//! Five rectangle layouts are supported. Each feature is stored in base
//! window units: `(x, y)` is the offset of the layout's top-left corner
//! and `(w, h)` is the size of one sub-rectangle, so the full extent is
//! the unit size times the layout's grid. Values are white-minus-black
//! rectangle sums; the middle rectangle of the line kinds is weighted
//! twice so white and black areas always balance and any constant image
//! evaluates to zero.

use serde::{Deserialize, Serialize};

use crate::integral::{IntegralImage, OutOfBounds};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HaarKind {
    /// Two stacked rectangles, white above black: responds to horizontal
    /// edges. Extent `w x 2h`.
    EdgeHorizontal,
    /// Two side-by-side rectangles, white left of black: responds to
    /// vertical edges. Extent `2w x h`.
    EdgeVertical,
    /// Three stacked rectangles, outer white, middle black twice: responds
    /// to horizontal bars. Extent `w x 3h`.
    LineHorizontal,
    /// Three side-by-side rectangles, outer white, middle black twice.
    /// Extent `3w x h`.
    LineVertical,
    /// Checkerboard of four rectangles, main diagonal white. Extent
    /// `2w x 2h`.
    FourRect,
}

impl HaarKind {
    pub const ALL: [HaarKind; 5] = [
        HaarKind::EdgeHorizontal,
        HaarKind::EdgeVertical,
        HaarKind::LineHorizontal,
        HaarKind::LineVertical,
        HaarKind::FourRect,
    ];

    /// Grid of sub-rectangles (columns, rows) the layout occupies.
    pub fn grid(self) -> (u32, u32) {
        match self {
            HaarKind::EdgeHorizontal => (1, 2),
            HaarKind::EdgeVertical => (2, 1),
            HaarKind::LineHorizontal => (1, 3),
            HaarKind::LineVertical => (3, 1),
            HaarKind::FourRect => (2, 2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HaarFeature {
    pub kind: HaarKind,
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

/// One concrete placement of a feature: sub-rectangle size and top-left
/// corner in image pixels.
#[derive(Debug, Clone, Copy)]
struct Placement {
    x: u32,
    y: u32,
    w: u32,
    h: u32,
}

impl HaarFeature {
    /// Full extent in base-window units.
    pub fn extent(&self) -> (u32, u32) {
        let (gx, gy) = self.kind.grid();
        (gx * self.w, gy * self.h)
    }

    /// Scales the placement by `ratio` with round-to-nearest. When
    /// `fit_within` gives the scaled window size, the unit size and offset
    /// are clamped so the whole layout stays inside that window (rounding
    /// can otherwise push it up to two pixels past the window edge).
    fn placement(&self, ratio: f64, fit_within: Option<u32>) -> Placement {
        let round = |v: u32| -> u32 { (v as f64 * ratio + 0.5).floor() as u32 };
        let (gx, gy) = self.kind.grid();
        let mut w = round(self.w).max(1);
        let mut h = round(self.h).max(1);
        let mut x = round(self.x);
        let mut y = round(self.y);
        if let Some(win) = fit_within {
            w = w.min(win / gx);
            h = h.min(win / gy);
            x = x.min(win - gx * w);
            y = y.min(win - gy * h);
        }
        Placement { x, y, w, h }
    }

    /// White-minus-black sum at origin `(ox, oy)`, geometry scaled by
    /// `ratio`, times `inv_sigma`. Errors if any scaled rectangle falls
    /// outside the image.
    pub fn eval(
        &self,
        ii: &IntegralImage,
        ox: u32,
        oy: u32,
        ratio: f64,
        inv_sigma: f64,
    ) -> Result<f64, OutOfBounds> {
        let p = self.placement(ratio, None);
        let (gx, gy) = self.kind.grid();
        let (fx, fy) = (ox + p.x, oy + p.y);
        if !ii.contains(fx, fy, gx * p.w, gy * p.h) {
            return Err(OutOfBounds {
                x: fx,
                y: fy,
                w: gx * p.w,
                h: gy * p.h,
                width: ii.width(),
                height: ii.height(),
            });
        }
        Ok(self.raw_value(ii, fx, fy, p.w, p.h) * inv_sigma)
    }

    /// As [`eval`](Self::eval) but with the layout clamped inside the
    /// scaled window, for the scanning path where the window itself has
    /// already been bounds-checked.
    pub(crate) fn eval_in_window(
        &self,
        ii: &IntegralImage,
        ox: u32,
        oy: u32,
        ratio: f64,
        window: u32,
        inv_sigma: f64,
    ) -> f64 {
        let p = self.placement(ratio, Some(window));
        self.raw_value(ii, ox + p.x, oy + p.y, p.w, p.h) * inv_sigma
    }

    /// White minus black with the sub-rectangle size `(w, h)` placed at
    /// absolute `(x, y)`. All rectangles are known in bounds here.
    fn raw_value(&self, ii: &IntegralImage, x: u32, y: u32, w: u32, h: u32) -> f64 {
        let r = |rx: u32, ry: u32| ii.rect_sum_unchecked(rx, ry, w, h) as i64;
        let v = match self.kind {
            HaarKind::EdgeHorizontal => r(x, y) - r(x, y + h),
            HaarKind::EdgeVertical => r(x, y) - r(x + w, y),
            HaarKind::LineHorizontal => r(x, y) + r(x, y + 2 * h) - 2 * r(x, y + h),
            HaarKind::LineVertical => r(x, y) + r(x + 2 * w, y) - 2 * r(x + w, y),
            HaarKind::FourRect => r(x, y) + r(x + w, y + h) - r(x + w, y) - r(x, y + h),
        };
        v as f64
    }
}

/// Every feature of every kind, position and unit size that fits a
/// `base`x`base` window, in a fixed order: kind-major, then y, x, h, w
/// ascending. `base` must be at least 4.
pub fn enumerate_features(base: u32) -> Vec<HaarFeature> {
    assert!(base >= 4, "base window must be at least 4, got {base}");
    let mut out = Vec::new();
    for kind in HaarKind::ALL {
        let (gx, gy) = kind.grid();
        for y in 0..base {
            for x in 0..base {
                for h in 1..=(base - y) / gy {
                    for w in 1..=(base - x) / gx {
                        out.push(HaarFeature { kind, x, y, w, h });
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgio::GrayImage;
    use crate::integral::build_integral;
    use crate::rng::SplitMix64;

    /// Independent count of placements per kind from the closed-form sum,
    /// written as loops over extents rather than reusing the enumerator.
    fn count_by_formula(base: u32) -> usize {
        let mut total = 0usize;
        for kind in HaarKind::ALL {
            let (gx, gy) = kind.grid();
            for ew in (gx..=base).step_by(gx as usize) {
                for eh in (gy..=base).step_by(gy as usize) {
                    total += ((base - ew + 1) * (base - eh + 1)) as usize;
                }
            }
        }
        total
    }

    #[test]
    fn base_24_matches_classical_count() {
        let feats = enumerate_features(24);
        assert_eq!(feats.len(), 162_336);
        assert_eq!(feats.len(), count_by_formula(24));
    }

    #[test]
    fn base_4_matches_formula() {
        let feats = enumerate_features(4);
        assert_eq!(feats.len(), count_by_formula(4));
        assert_eq!(feats.len(), 136);
    }

    #[test]
    fn every_feature_fits_base_window() {
        for base in [4u32, 8, 12] {
            for f in enumerate_features(base) {
                let (ew, eh) = f.extent();
                assert!(f.x + ew <= base && f.y + eh <= base, "{f:?} exceeds {base}");
                assert!(f.w >= 1 && f.h >= 1);
            }
        }
    }

    #[test]
    fn ordering_is_kind_major_then_y_x_h_w() {
        let feats = enumerate_features(4);
        let key = |f: &HaarFeature| {
            let k = HaarKind::ALL.iter().position(|&g| g == f.kind).unwrap();
            (k, f.y, f.x, f.h, f.w)
        };
        for pair in feats.windows(2) {
            assert!(key(&pair[0]) < key(&pair[1]));
        }
    }

    #[test]
    fn constant_image_evaluates_to_zero() {
        let img = GrayImage::new(24, 24, vec![173; 24 * 24]).unwrap();
        let ii = build_integral(&img);
        for f in enumerate_features(24).into_iter().step_by(997) {
            assert_eq!(f.eval(&ii, 0, 0, 1.0, 1.0).unwrap(), 0.0, "{f:?}");
        }
    }

    #[test]
    fn scale_one_equals_direct_rect_sums() {
        let mut rng = SplitMix64::new(21);
        let img = GrayImage::from_fn(24, 24, |_, _| (rng.next_u64() % 256) as u8);
        let ii = build_integral(&img);
        let f = HaarFeature { kind: HaarKind::LineVertical, x: 3, y: 5, w: 2, h: 7 };
        let white = ii.rect_sum(3, 5, 2, 7).unwrap() as i64
            + ii.rect_sum(3 + 4, 5, 2, 7).unwrap() as i64;
        let black = 2 * ii.rect_sum(3 + 2, 5, 2, 7).unwrap() as i64;
        let expect = (white - black) as f64;
        assert_eq!(f.eval(&ii, 0, 0, 1.0, 1.0).unwrap(), expect);
    }

    #[test]
    fn step_image_maximizes_straddling_edge_feature() {
        // Left half 0, right half 255; the 2w x h vertical-edge feature
        // whose white rect exactly covers the dark side of the boundary
        // has the largest magnitude among all x positions.
        let img = GrayImage::from_fn(24, 24, |x, _| if x < 12 { 0 } else { 255 });
        let ii = build_integral(&img);
        let (w, h) = (4u32, 8u32);
        let mut best = (0.0f64, 0u32);
        for x in 0..=(24 - 2 * w) {
            let f = HaarFeature { kind: HaarKind::EdgeVertical, x, y: 2, w, h };
            let v = f.eval(&ii, 0, 0, 1.0, 1.0).unwrap().abs();
            if v > best.0 {
                best = (v, x);
            }
        }
        assert_eq!(best.1, 12 - w);
        assert_eq!(best.0, 255.0 * w as f64 * h as f64);
    }

    #[test]
    fn shift_invariance_for_balanced_kinds() {
        // Adding a constant to every pixel cancels for kinds whose white
        // and black areas are equal (all of them, given the x2 middle
        // weight), when inv_sigma is held at 1.
        let mut rng = SplitMix64::new(33);
        let base: Vec<u8> = (0..(24 * 24)).map(|_| (rng.next_u64() % 100) as u8).collect();
        let img_a = GrayImage::new(24, 24, base.clone()).unwrap();
        let img_b = GrayImage::new(24, 24, base.iter().map(|&p| p + 100).collect()).unwrap();
        let (ia, ib) = (build_integral(&img_a), build_integral(&img_b));
        for f in enumerate_features(24).into_iter().step_by(1543) {
            let va = f.eval(&ia, 0, 0, 1.0, 1.0).unwrap();
            let vb = f.eval(&ib, 0, 0, 1.0, 1.0).unwrap();
            assert_eq!(va, vb, "{f:?}");
        }
    }

    #[test]
    fn out_of_bounds_after_scaling_errors() {
        let img = GrayImage::new(30, 30, vec![0; 900]).unwrap();
        let ii = build_integral(&img);
        let f = HaarFeature { kind: HaarKind::EdgeVertical, x: 10, y: 0, w: 2, h: 2 };
        assert!(f.eval(&ii, 0, 0, 1.0, 1.0).is_ok());
        // 2.5x scale pushes x to 25 and extent to 10: 25 + 10 > 30.
        assert!(f.eval(&ii, 0, 0, 2.5, 1.0).is_err());
    }

    #[test]
    fn window_clamped_eval_stays_in_bounds() {
        let img = GrayImage::new(31, 31, vec![7; 961]).unwrap();
        let ii = build_integral(&img);
        // Every feature of the 24-base at ratio 31/24 must evaluate without
        // panicking when clamped to the 31-pixel window.
        let ratio = 31.0 / 24.0;
        for f in enumerate_features(24).into_iter().step_by(431) {
            let v = f.eval_in_window(&ii, 0, 0, ratio, 31, 1.0);
            assert_eq!(v, 0.0);
        }
    }
}
