//! Histogram feature extraction: the recognizer's input representation.
//!
//! A face crop is split into two equal halves and described by the
//! intensity histograms of the whole image and of each half, each
//! normalized to frequencies so the vector is independent of image area.
//! Binary histograms (after Otsu thresholding of the whole crop) can be
//! appended for the two-bin view of the same data.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::imgio::{binarize, otsu_threshold, BinaryImage, GrayImage, ImageError};

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("cannot split a dimension of 1")]
    DimensionTooSmall,
    #[error(transparent)]
    Image(#[from] ImageError),
}

/// Axis a face crop is halved along; vertical gives left/right halves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitAxis {
    Vertical,
    Horizontal,
}

/// Bin counts plus the pixel total they sum to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub bins: Vec<u64>,
    pub total: u64,
}

impl Histogram {
    /// Per-bin frequencies summing to 1.
    pub fn frequencies(&self) -> Vec<f64> {
        self.bins.iter().map(|&c| c as f64 / self.total as f64).collect()
    }
}

/// Which histogram a block of a feature vector came from, in layout order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockKind {
    WholeGray,
    FirstHalfGray,
    SecondHalfGray,
    WholeBinary,
    FirstHalfBinary,
    SecondHalfBinary,
}

impl BlockKind {
    pub fn label(self) -> &'static str {
        match self {
            BlockKind::WholeGray => "whole-gray",
            BlockKind::FirstHalfGray => "first-half-gray",
            BlockKind::SecondHalfGray => "second-half-gray",
            BlockKind::WholeBinary => "whole-binary",
            BlockKind::FirstHalfBinary => "first-half-binary",
            BlockKind::SecondHalfBinary => "second-half-binary",
        }
    }
}

/// Which histograms are concatenated into the feature vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub use_whole: bool,
    pub use_halves: bool,
    pub use_binary: bool,
    pub axis: SplitAxis,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            use_whole: true,
            use_halves: true,
            use_binary: false,
            axis: SplitAxis::Vertical,
        }
    }
}

impl FeatureConfig {
    /// Length of the vector this config produces.
    pub fn vector_len(&self) -> usize {
        let mut blocks_256 = 0;
        let mut blocks_2 = 0;
        if self.use_whole {
            blocks_256 += 1;
            if self.use_binary {
                blocks_2 += 1;
            }
        }
        if self.use_halves {
            blocks_256 += 2;
            if self.use_binary {
                blocks_2 += 2;
            }
        }
        blocks_256 * 256 + blocks_2 * 2
    }
}

/// Concatenated normalized histogram blocks plus their layout record.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub layout: Vec<(BlockKind, usize)>,
}

/// Splits along `axis` into two parts covering every pixel exactly once;
/// with an odd dimension the first part takes the extra pixel. The split
/// dimension must be at least 2.
pub fn split_halves(
    img: &GrayImage,
    axis: SplitAxis,
) -> Result<(GrayImage, GrayImage), FeatureError> {
    match axis {
        SplitAxis::Vertical => {
            if img.width < 2 {
                return Err(FeatureError::DimensionTooSmall);
            }
            let left_w = img.width.div_ceil(2);
            let left = img.crop(0, 0, left_w, img.height)?;
            let right = img.crop(left_w, 0, img.width - left_w, img.height)?;
            Ok((left, right))
        }
        SplitAxis::Horizontal => {
            if img.height < 2 {
                return Err(FeatureError::DimensionTooSmall);
            }
            let top_h = img.height.div_ceil(2);
            let top = img.crop(0, 0, img.width, top_h)?;
            let bottom = img.crop(0, top_h, img.width, img.height - top_h)?;
            Ok((top, bottom))
        }
    }
}

/// 256-bin intensity histogram.
pub fn gray_histogram(img: &GrayImage) -> Histogram {
    let mut bins = vec![0u64; 256];
    for &p in &img.data {
        bins[p as usize] += 1;
    }
    Histogram { bins, total: img.data.len() as u64 }
}

/// Two-bin histogram: zeros count, ones count.
pub fn binary_histogram(img: &BinaryImage) -> Histogram {
    let ones = img.data.iter().map(|&v| v as u64).sum::<u64>();
    let total = img.data.len() as u64;
    Histogram { bins: vec![total - ones, ones], total }
}

/// Builds the feature vector for an already-cropped face: blocks in the
/// fixed order whole-gray, halves-gray, whole-binary, halves-binary (as
/// enabled), each normalized by its own pixel count. Binary blocks all
/// use the Otsu threshold of the whole crop so the half histograms still
/// sum to the whole.
pub fn build_feature_vector(
    face: &GrayImage,
    config: &FeatureConfig,
) -> Result<FeatureVector, FeatureError> {
    let halves = if config.use_halves {
        Some(split_halves(face, config.axis)?)
    } else {
        None
    };

    let mut values = Vec::with_capacity(config.vector_len());
    let mut layout: Vec<(BlockKind, usize)> = Vec::new();
    let mut push = |kind: BlockKind, hist: &Histogram| {
        layout.push((kind, hist.bins.len()));
    };
    // Collected separately from `values` to keep the closure borrows simple.
    let mut blocks: Vec<Vec<f64>> = Vec::new();

    if config.use_whole {
        let hist = gray_histogram(face);
        push(BlockKind::WholeGray, &hist);
        blocks.push(hist.frequencies());
    }
    if let Some((first, second)) = &halves {
        let hist = gray_histogram(first);
        push(BlockKind::FirstHalfGray, &hist);
        blocks.push(hist.frequencies());
        let hist = gray_histogram(second);
        push(BlockKind::SecondHalfGray, &hist);
        blocks.push(hist.frequencies());
    }
    if config.use_binary {
        let t = otsu_threshold(face);
        if config.use_whole {
            let hist = binary_histogram(&binarize(face, t));
            push(BlockKind::WholeBinary, &hist);
            blocks.push(hist.frequencies());
        }
        if let Some((first, second)) = &halves {
            let hist = binary_histogram(&binarize(first, t));
            push(BlockKind::FirstHalfBinary, &hist);
            blocks.push(hist.frequencies());
            let hist = binary_histogram(&binarize(second, t));
            push(BlockKind::SecondHalfBinary, &hist);
            blocks.push(hist.frequencies());
        }
    }
    for block in blocks {
        values.extend(block);
    }
    Ok(FeatureVector { values, layout })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use proptest::prelude::*;

    fn random_image(w: u32, h: u32, seed: u64) -> GrayImage {
        let mut rng = SplitMix64::new(seed);
        GrayImage::from_fn(w, h, |_, _| (rng.next_u64() % 256) as u8)
    }

    #[test]
    fn split_even_width() {
        let img = random_image(4, 2, 1);
        let (l, r) = split_halves(&img, SplitAxis::Vertical).unwrap();
        assert_eq!((l.width, l.height), (2, 2));
        assert_eq!((r.width, r.height), (2, 2));
    }

    #[test]
    fn split_odd_width_first_takes_extra() {
        let img = random_image(5, 2, 2);
        let (l, r) = split_halves(&img, SplitAxis::Vertical).unwrap();
        assert_eq!(l.width, 3);
        assert_eq!(r.width, 2);
    }

    #[test]
    fn split_reassembles_exactly() {
        let img = random_image(7, 3, 3);
        let (l, r) = split_halves(&img, SplitAxis::Vertical).unwrap();
        for y in 0..3 {
            for x in 0..7 {
                let expected = img.pixel(x, y);
                let got = if x < 4 { l.pixel(x, y) } else { r.pixel(x - 4, y) };
                assert_eq!(expected, got);
            }
        }
    }

    #[test]
    fn split_horizontal() {
        let img = random_image(3, 5, 4);
        let (t, b) = split_halves(&img, SplitAxis::Horizontal).unwrap();
        assert_eq!(t.height, 3);
        assert_eq!(b.height, 2);
    }

    #[test]
    fn split_dimension_one_errors() {
        let img = random_image(1, 4, 5);
        assert_eq!(
            split_halves(&img, SplitAxis::Vertical).unwrap_err(),
            FeatureError::DimensionTooSmall
        );
    }

    #[test]
    fn gray_histogram_all_zero() {
        let img = GrayImage::new(4, 4, vec![0; 16]).unwrap();
        let hist = gray_histogram(&img);
        assert_eq!(hist.bins[0], 16);
        assert!(hist.bins[1..].iter().all(|&c| c == 0));
        assert_eq!(hist.total, 16);
    }

    #[test]
    fn gray_histogram_matches_counting_oracle() {
        let img = random_image(9, 11, 6);
        let hist = gray_histogram(&img);
        for v in 0..256usize {
            let count = img.data.iter().filter(|&&p| p as usize == v).count() as u64;
            assert_eq!(hist.bins[v], count);
        }
        assert_eq!(hist.bins.iter().sum::<u64>(), 99);
    }

    #[test]
    fn binary_histogram_all_ones() {
        let b = binarize(&GrayImage::new(3, 3, vec![255; 9]).unwrap(), 0);
        let hist = binary_histogram(&b);
        assert_eq!(hist.bins, vec![0, 9]);
    }

    #[test]
    fn binary_histogram_threshold_255_is_all_zeros() {
        let img = random_image(5, 5, 7);
        let hist = binary_histogram(&binarize(&img, 255));
        assert_eq!(hist.bins, vec![25, 0]);
    }

    #[test]
    fn default_config_length_on_64x64() {
        let img = random_image(64, 64, 8);
        let fv = build_feature_vector(&img, &FeatureConfig::default()).unwrap();
        assert_eq!(fv.values.len(), 768);
        assert_eq!(FeatureConfig::default().vector_len(), 768);
        assert_eq!(fv.layout.len(), 3);
    }

    #[test]
    fn constant_face_gives_one_hot_blocks() {
        let img = GrayImage::new(8, 8, vec![57; 64]).unwrap();
        let fv = build_feature_vector(&img, &FeatureConfig::default()).unwrap();
        for block in fv.values.chunks(256) {
            assert_eq!(block[57], 1.0);
            assert_eq!(block.iter().sum::<f64>(), 1.0);
        }
    }

    #[test]
    fn binary_blocks_appended_in_order() {
        let img = random_image(10, 10, 9);
        let config = FeatureConfig { use_binary: true, ..FeatureConfig::default() };
        let fv = build_feature_vector(&img, &config).unwrap();
        assert_eq!(fv.values.len(), 3 * 256 + 3 * 2);
        let kinds: Vec<BlockKind> = fv.layout.iter().map(|&(k, _)| k).collect();
        assert_eq!(
            kinds,
            vec![
                BlockKind::WholeGray,
                BlockKind::FirstHalfGray,
                BlockKind::SecondHalfGray,
                BlockKind::WholeBinary,
                BlockKind::FirstHalfBinary,
                BlockKind::SecondHalfBinary,
            ]
        );
    }

    #[test]
    fn whole_only_config() {
        let img = random_image(6, 6, 10);
        let config = FeatureConfig { use_halves: false, ..FeatureConfig::default() };
        let fv = build_feature_vector(&img, &config).unwrap();
        assert_eq!(fv.values.len(), 256);
    }

    proptest! {
        #[test]
        fn whole_equals_left_plus_right(seed in any::<u64>(), w in 2u32..16, h in 1u32..16) {
            let img = random_image(w, h, seed);
            let (l, r) = split_halves(&img, SplitAxis::Vertical).unwrap();
            let whole = gray_histogram(&img);
            let left = gray_histogram(&l);
            let right = gray_histogram(&r);
            for v in 0..256 {
                prop_assert_eq!(whole.bins[v], left.bins[v] + right.bins[v]);
            }
        }

        #[test]
        fn histogram_is_position_blind(seed in any::<u64>()) {
            let img = random_image(8, 8, seed);
            let mut permuted = img.data.clone();
            let mut rng = SplitMix64::new(seed ^ 0xABCD);
            rng.shuffle(&mut permuted);
            let shuffled = GrayImage::new(8, 8, permuted).unwrap();
            prop_assert_eq!(gray_histogram(&img).bins, gray_histogram(&shuffled).bins);
        }

        #[test]
        fn blocks_sum_to_one(seed in any::<u64>(), w in 2u32..20, h in 2u32..20) {
            let img = random_image(w, h, seed);
            let config = FeatureConfig { use_binary: true, ..FeatureConfig::default() };
            let fv = build_feature_vector(&img, &config).unwrap();
            let mut offset = 0;
            for &(_, len) in &fv.layout {
                let sum: f64 = fv.values[offset..offset + len].iter().sum();
                prop_assert!((sum - 1.0).abs() < 1e-9);
                offset += len;
            }
            prop_assert_eq!(offset, fv.values.len());
        }
    }
}
