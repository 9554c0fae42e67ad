//! Binarization of grayscale images onto silhouette masks.
//!
//! Operates in 8-bit space: images with maxval above 255 are linearly
//! rescaled first so one 256-bin histogram serves every input.

use crate::error::{Error, Result};
use crate::image::{BinaryMask, GrayImage};

/// How to pick the foreground set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdMethod {
    /// Foreground iff the (8-bit rescaled) intensity is `>= t`.
    Fixed(u8),
    /// Threshold maximizing the between-class variance of the histogram,
    /// ties broken toward the lower threshold. Polarity is corrected
    /// afterward so the smaller class is foreground (single-object inputs
    /// have more background than object).
    Otsu,
}

/// Splits an image into foreground and background.
///
/// `Otsu` fails with `ConstantImage` when all pixels share one intensity;
/// `Fixed` never fails.
pub fn binarize(image: &GrayImage, method: ThresholdMethod) -> Result<BinaryMask> {
    let eight = image.to_eight_bit();
    match method {
        ThresholdMethod::Fixed(t) => Ok(mask_from(image, &eight, t as u16)),
        ThresholdMethod::Otsu => {
            let mut hist = [0u64; 256];
            for &v in &eight {
                hist[v as usize] += 1;
            }
            let t = otsu_threshold(&hist)?;
            // Otsu splits classes [0..=t] and [t+1..=255]; start with the
            // bright class as foreground.
            let mut mask = mask_from(image, &eight, t as u16 + 1);
            let on = mask.count_foreground();
            if on * 2 > eight.len() {
                for i in 0..eight.len() {
                    let (x, y) = (i % image.width(), i / image.width());
                    mask.set(x, y, !mask.get(x, y));
                }
            }
            Ok(mask)
        }
    }
}

fn mask_from(image: &GrayImage, eight: &[u8], t: u16) -> BinaryMask {
    BinaryMask::from_fn(image.width(), image.height(), |x, y| {
        eight[y * image.width() + x] as u16 >= t
    })
}

/// Between-class-variance-maximizing split of a 256-bin histogram.
/// Returns the last bin of the low class.
pub fn otsu_threshold(hist: &[u64; 256]) -> Result<u8> {
    let total: u64 = hist.iter().sum();
    let sum_all: f64 = hist
        .iter()
        .enumerate()
        .map(|(v, &n)| v as f64 * n as f64)
        .sum();

    let mut best_t: Option<u8> = None;
    let mut best_var = f64::NEG_INFINITY;
    let mut w0 = 0u64;
    let mut sum0 = 0f64;
    for t in 0..=255u16 {
        w0 += hist[t as usize];
        sum0 += t as f64 * hist[t as usize] as f64;
        let w1 = total - w0;
        if w0 == 0 || w1 == 0 {
            continue;
        }
        let m0 = sum0 / w0 as f64;
        let m1 = (sum_all - sum0) / w1 as f64;
        let var = w0 as f64 * w1 as f64 * (m0 - m1) * (m0 - m1);
        if var > best_var {
            best_var = var;
            best_t = Some(t as u8);
        }
    }
    best_t.ok_or(Error::ConstantImage)
}
