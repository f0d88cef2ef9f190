//! Deterministic synthetic corpora: face-like windows, filtered-noise
//! negatives, scenes with planted faces and multi-identity image sets.
//!
//! Everything here is parametrized by explicit seeds and built from
//! integer or fixed-order float arithmetic, so a given seed reproduces a
//! corpus exactly on any platform. The face pattern is deliberately
//! simple - a dark eye band and mouth band over bright cheeks - which is
//! precisely the structure Haar edge features respond to.

use crate::detect::Rect;
use crate::imgio::GrayImage;
use crate::rng::SplitMix64;

/// Intensity and geometry profile of a rendered face.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceStyle {
    /// Cheek/forehead brightness.
    pub skin: f64,
    /// Eye-band darkness.
    pub eye: f64,
    /// Mouth-band darkness.
    pub mouth: f64,
    /// Eye-band top, as a fraction of the window height.
    pub eye_top: f64,
    /// Eye-band height fraction.
    pub eye_height: f64,
    /// Mouth-band top fraction.
    pub mouth_top: f64,
    /// Mouth-band height fraction.
    pub mouth_height: f64,
    /// Additive noise level in intensity units.
    pub noise_sigma: f64,
}

impl FaceStyle {
    /// The generic detector-training face.
    pub fn generic() -> Self {
        FaceStyle {
            skin: 170.0,
            eye: 60.0,
            mouth: 95.0,
            eye_top: 0.25,
            eye_height: 0.20,
            mouth_top: 0.70,
            mouth_height: 0.15,
            noise_sigma: 12.0,
        }
    }

    /// A per-window draw around the generic profile: band positions,
    /// contrasts and noise all vary, so no single Haar feature is a
    /// perfect face template and cascade stages stay honestly imperfect.
    pub fn jittered(rng: &mut SplitMix64) -> Self {
        FaceStyle {
            skin: rng.uniform(147.5, 192.5),
            eye: rng.uniform(45.0, 75.0),
            mouth: rng.uniform(76.0, 114.0),
            eye_top: rng.uniform(0.20, 0.34),
            eye_height: rng.uniform(0.175, 0.265),
            mouth_top: rng.uniform(0.65, 0.75),
            mouth_height: rng.uniform(0.12, 0.18),
            noise_sigma: rng.uniform(14.0, 26.0),
        }
    }

    /// Three clearly distinct identity profiles: they differ in overall
    /// brightness and in band geometry, so both gray and binary
    /// histograms separate them.
    pub fn identities() -> Vec<(String, FaceStyle)> {
        vec![
            (
                "alice".to_string(),
                FaceStyle { skin: 200.0, eye: 55.0, mouth: 90.0, eye_top: 0.22, eye_height: 0.16, mouth_top: 0.72, mouth_height: 0.12, noise_sigma: 8.0 },
            ),
            (
                "bob".to_string(),
                FaceStyle { skin: 150.0, eye: 70.0, mouth: 60.0, eye_top: 0.30, eye_height: 0.24, mouth_top: 0.68, mouth_height: 0.18, noise_sigma: 8.0 },
            ),
            (
                "carol".to_string(),
                FaceStyle { skin: 115.0, eye: 35.0, mouth: 80.0, eye_top: 0.26, eye_height: 0.18, mouth_top: 0.75, mouth_height: 0.14, noise_sigma: 8.0 },
            ),
        ]
    }
}

fn clamp_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Renders one face window: bright skin, a dark eye band with two darker
/// eye blobs, a dark mouth band, plus additive noise.
pub fn face_window(size: u32, style: &FaceStyle, rng: &mut SplitMix64) -> GrayImage {
    let s = size as f64;
    let eye_y0 = (style.eye_top * s) as u32;
    let eye_y1 = ((style.eye_top + style.eye_height) * s).ceil() as u32;
    let mouth_y0 = (style.mouth_top * s) as u32;
    let mouth_y1 = ((style.mouth_top + style.mouth_height) * s).ceil() as u32;
    let eye_band = eye_y0..eye_y1.min(size);
    let mouth_band = mouth_y0..mouth_y1.min(size);

    GrayImage::from_fn(size, size, |x, y| {
        let base = if eye_band.contains(&y) {
            // Eye blobs sit slightly darker inside the band.
            let fx = x as f64 / s;
            let in_blob = (0.12..0.38).contains(&fx) || (0.62..0.88).contains(&fx);
            if in_blob {
                style.eye * 0.8
            } else {
                style.eye
            }
        } else if mouth_band.contains(&y) {
            let fx = x as f64 / s;
            if (0.25..0.75).contains(&fx) {
                style.mouth
            } else {
                style.skin
            }
        } else {
            style.skin
        };
        clamp_u8(base + style.noise_sigma * rng.next_gaussian())
    })
}

/// A filtered-noise negative: white noise passed through a 3x3 box blur,
/// giving smooth blobs without the face's band structure.
pub fn negative_window(size: u32, rng: &mut SplitMix64) -> GrayImage {
    let raw = GrayImage::from_fn(size, size, |_, _| (rng.next_u64() % 256) as u8);
    box_blur3(&raw)
}

/// 3x3 box blur with edge clamping, in exact integer arithmetic.
pub fn box_blur3(img: &GrayImage) -> GrayImage {
    GrayImage::from_fn(img.width, img.height, |x, y| {
        let mut acc = 0u32;
        let mut count = 0u32;
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                let nx = x as i64 + dx;
                let ny = y as i64 + dy;
                if nx >= 0 && ny >= 0 && (nx as u32) < img.width && (ny as u32) < img.height {
                    acc += img.pixel(nx as u32, ny as u32) as u32;
                    count += 1;
                }
            }
        }
        (acc / count) as u8
    })
}

/// A detector training corpus: `n_pos` face windows with per-window
/// style jitter and `n_neg` filtered-noise negatives, all `size`x`size`.
pub fn detector_corpus(
    size: u32,
    n_pos: usize,
    n_neg: usize,
    seed: u64,
) -> (Vec<GrayImage>, Vec<GrayImage>) {
    let mut rng = SplitMix64::new(seed);
    let positives = (0..n_pos)
        .map(|_| {
            let style = FaceStyle::jittered(&mut rng);
            face_window(size, &style, &mut rng)
        })
        .collect();
    let negatives = (0..n_neg).map(|_| negative_window(size, &mut rng)).collect();
    (positives, negatives)
}

/// An image with one planted face and its ground-truth location.
#[derive(Debug, Clone)]
pub struct Scene {
    pub image: GrayImage,
    pub face: Rect,
}

/// Plants a face of `face_size` at a seeded position in a filtered-noise
/// background of `w`x`h`.
pub fn scene_with_face(
    w: u32,
    h: u32,
    face_size: u32,
    style: &FaceStyle,
    seed: u64,
) -> Scene {
    let mut rng = SplitMix64::new(seed);
    let background = negative_window_rect(w, h, &mut rng);
    let face_img = face_window(face_size, style, &mut rng);
    let fx = rng.below((w - face_size) as usize + 1) as u32;
    let fy = rng.below((h - face_size) as usize + 1) as u32;

    let mut data = background.data;
    for y in 0..face_size {
        for x in 0..face_size {
            data[((fy + y) * w + fx + x) as usize] = face_img.pixel(x, y);
        }
    }
    Scene {
        image: GrayImage { width: w, height: h, data },
        face: Rect::new(fx, fy, face_size, face_size),
    }
}

fn negative_window_rect(w: u32, h: u32, rng: &mut SplitMix64) -> GrayImage {
    let raw = GrayImage::from_fn(w, h, |_, _| (rng.next_u64() % 256) as u8);
    box_blur3(&raw)
}

/// A labeled multi-identity corpus: `per_identity` scenes per identity
/// profile, faces planted at varying positions and sizes.
pub fn identity_corpus(per_identity: usize, seed: u64) -> Vec<(String, GrayImage)> {
    let mut corpus = Vec::new();
    for (which, (label, style)) in FaceStyle::identities().into_iter().enumerate() {
        for i in 0..per_identity {
            let image_seed = seed
                .wrapping_add(which as u64)
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add(i as u64);
            let mut size_rng = SplitMix64::new(image_seed);
            let face_size = 28 + 2 * size_rng.below(5) as u32; // 28..=36
            let scene = scene_with_face(48, 48, face_size, &style, image_seed);
            corpus.push((label.clone(), scene.image));
        }
    }
    corpus
}
