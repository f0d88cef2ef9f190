//! Integral images: O(1) rectangle sums from 2-D exclusive prefix sums.
//!
//! Entry `(y, x)` holds the sum of all pixels with row `< y` and column
//! `< x`, so row 0 and column 0 are zero and a rectangle sum needs exactly
//! four table lookups. A companion squared-sum table supports per-window
//! variance normalization.

use thiserror::Error;

use crate::imgio::GrayImage;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("rectangle {w}x{h}+{x}+{y} outside image {width}x{height}")]
pub struct OutOfBounds {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
    pub width: u32,
    pub height: u32,
}

/// `(width+1) x (height+1)` cumulative sum and squared-sum tables.
#[derive(Debug, Clone)]
pub struct IntegralImage {
    width: u32,
    height: u32,
    sum: Vec<u64>,
    sq_sum: Vec<u64>,
}

/// Builds both tables in one pass over the image.
pub fn build_integral(img: &GrayImage) -> IntegralImage {
    let (w, h) = (img.width as usize, img.height as usize);
    let stride = w + 1;
    let mut sum = vec![0u64; stride * (h + 1)];
    let mut sq_sum = vec![0u64; stride * (h + 1)];
    for y in 0..h {
        let mut row = 0u64;
        let mut row_sq = 0u64;
        for x in 0..w {
            let p = img.data[y * w + x] as u64;
            row += p;
            row_sq += p * p;
            let idx = (y + 1) * stride + (x + 1);
            sum[idx] = sum[idx - stride] + row;
            sq_sum[idx] = sq_sum[idx - stride] + row_sq;
        }
    }
    IntegralImage { width: img.width, height: img.height, sum, sq_sum }
}

impl IntegralImage {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Raw table entry; `(y, x)` indexes the `(height+1) x (width+1)` grid.
    pub fn entry(&self, y: u32, x: u32) -> u64 {
        self.sum[y as usize * (self.width as usize + 1) + x as usize]
    }

    pub fn contains(&self, x: u32, y: u32, w: u32, h: u32) -> bool {
        w >= 1
            && h >= 1
            && x.checked_add(w).is_some_and(|r| r <= self.width)
            && y.checked_add(h).is_some_and(|b| b <= self.height)
    }

    /// Sum of the `w`x`h` rectangle at `(x, y)`: four lookups.
    pub fn rect_sum(&self, x: u32, y: u32, w: u32, h: u32) -> Result<u64, OutOfBounds> {
        if !self.contains(x, y, w, h) {
            return Err(OutOfBounds { x, y, w, h, width: self.width, height: self.height });
        }
        Ok(self.rect_sum_unchecked(x, y, w, h))
    }

    #[inline]
    pub(crate) fn rect_sum_unchecked(&self, x: u32, y: u32, w: u32, h: u32) -> u64 {
        let stride = self.width as usize + 1;
        let (x, y, w, h) = (x as usize, y as usize, w as usize, h as usize);
        let a = self.sum[y * stride + x];
        let b = self.sum[y * stride + x + w];
        let c = self.sum[(y + h) * stride + x];
        let d = self.sum[(y + h) * stride + x + w];
        d + a - b - c
    }

    #[inline]
    pub(crate) fn rect_sq_sum_unchecked(&self, x: u32, y: u32, w: u32, h: u32) -> u64 {
        let stride = self.width as usize + 1;
        let (x, y, w, h) = (x as usize, y as usize, w as usize, h as usize);
        let a = self.sq_sum[y * stride + x];
        let b = self.sq_sum[y * stride + x + w];
        let c = self.sq_sum[(y + h) * stride + x];
        let d = self.sq_sum[(y + h) * stride + x + w];
        d + a - b - c
    }

    /// Reciprocal of the window's intensity standard deviation, floored at
    /// one so flat windows do not blow up feature values.
    pub fn window_inv_sigma(&self, x: u32, y: u32, w: u32, h: u32) -> Result<f64, OutOfBounds> {
        if !self.contains(x, y, w, h) {
            return Err(OutOfBounds { x, y, w, h, width: self.width, height: self.height });
        }
        let n = w as f64 * h as f64;
        let s = self.rect_sum_unchecked(x, y, w, h) as f64;
        let sq = self.rect_sq_sum_unchecked(x, y, w, h) as f64;
        let mean = s / n;
        let var = (sq / n - mean * mean).max(0.0);
        Ok(1.0 / var.sqrt().max(1.0))
    }
}
