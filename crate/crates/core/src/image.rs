//! In-memory raster types: grayscale images and binary silhouette masks.
//!
//! Both are dense row-major grids indexed `(x, y)` with `x` running along
//! columns and `y` along rows, origin at the top-left pixel.

use crate::error::{Error, Result};

/// A grayscale raster with intensities in `[0, maxval]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    maxval: u16,
    pixels: Vec<u16>,
}

impl GrayImage {
    /// Builds an image from row-major pixels. Panics if the buffer length
    /// does not match `width * height`, if a dimension is zero, or if
    /// `maxval` is zero.
    pub fn new(width: usize, height: usize, maxval: u16, pixels: Vec<u16>) -> Self {
        assert!(width >= 1 && height >= 1, "image dimensions must be >= 1");
        assert!(maxval >= 1, "maxval must be >= 1");
        assert_eq!(pixels.len(), width * height, "pixel buffer length mismatch");
        Self {
            width,
            height,
            maxval,
            pixels,
        }
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        maxval: u16,
        mut f: impl FnMut(usize, usize) -> u16,
    ) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, maxval, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn maxval(&self) -> u16 {
        self.maxval
    }

    pub fn pixels(&self) -> &[u16] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.pixels[y * self.width + x]
    }

    /// Intensities rescaled so the full `[0, maxval]` range maps to `[0, 255]`,
    /// rounding half up. Identity when `maxval == 255`.
    pub fn to_eight_bit(&self) -> Vec<u8> {
        if self.maxval == 255 {
            return self.pixels.iter().map(|&p| p as u8).collect();
        }
        let maxval = self.maxval as f64;
        self.pixels
            .iter()
            .map(|&p| ((p as f64) * 255.0 / maxval + 0.5).floor() as u8)
            .collect()
    }
}

/// A binary silhouette: `true` marks foreground pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    /// All-background mask. Panics on zero dimensions.
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width >= 1 && height >= 1, "mask dimensions must be >= 1");
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Self {
        assert!(width >= 1 && height >= 1, "mask dimensions must be >= 1");
        assert_eq!(bits.len(), width * height, "bit buffer length mismatch");
        Self {
            width,
            height,
            bits,
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self::from_bits(width, height, bits)
    }

    /// Parses a compact fixture: one `&str` row per mask row, `#` = on.
    /// Intended for tests and examples.
    pub fn from_rows(rows: &[&str]) -> Self {
        let height = rows.len();
        let width = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == width), "ragged fixture rows");
        Self::from_fn(width, height, |x, y| rows[y].as_bytes()[x] == b'#')
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, on: bool) {
        self.bits[y * self.width + x] = on;
    }

    /// Number of foreground pixels.
    pub fn count_foreground(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Foreground pixel coordinates in row-major order.
    pub fn foreground(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(move |(i, &b)| b.then_some((i % self.width, i / self.width)))
    }

    /// Tight bounding box of the foreground as `(x0, y0, x1, y1)` inclusive,
    /// or `EmptyMask` when there is none.
    pub fn bounding_box(&self) -> Result<(usize, usize, usize, usize)> {
        let mut bbox: Option<(usize, usize, usize, usize)> = None;
        for (x, y) in self.foreground() {
            bbox = Some(match bbox {
                None => (x, y, x, y),
                Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
            });
        }
        bbox.ok_or(Error::EmptyMask)
    }

    /// Quarter-turn clockwise; lossless (permutes pixels).
    pub fn rotate90(&self) -> Self {
        Self::from_fn(self.height, self.width, |x, y| {
            self.get(y, self.height - 1 - x)
        })
    }

    /// Half-turn; lossless.
    pub fn rotate180(&self) -> Self {
        Self::from_fn(self.width, self.height, |x, y| {
            self.get(self.width - 1 - x, self.height - 1 - y)
        })
    }

    /// Quarter-turn counter-clockwise; lossless.
    pub fn rotate270(&self) -> Self {
        Self::from_fn(self.height, self.width, |x, y| {
            self.get(self.width - 1 - y, x)
        })
    }

    /// Shifts the foreground by `(dx, dy)` on a canvas of the same size.
    /// Pixels pushed outside the canvas are dropped.
    pub fn translate(&self, dx: isize, dy: isize) -> Self {
        let mut out = Self::new(self.width, self.height);
        for (x, y) in self.foreground() {
            let nx = x as isize + dx;
            let ny = y as isize + dy;
            if nx >= 0 && ny >= 0 && (nx as usize) < self.width && (ny as usize) < self.height {
                out.set(nx as usize, ny as usize, true);
            }
        }
        out
    }

    /// Renders the mask as a two-level grayscale image (`on_value` / 0).
    pub fn to_gray(&self, maxval: u16, on_value: u16) -> GrayImage {
        GrayImage::from_fn(self.width, self.height, maxval, |x, y| {
            if self.get(x, y) {
                on_value
            } else {
                0
            }
        })
    }
}
