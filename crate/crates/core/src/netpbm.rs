//! Netpbm codec: P2/P5 graymaps and P3/P6 pixmaps, ASCII and binary.
//!
//! Pixmaps are collapsed to grayscale on read with the broadcast luminance
//! weights 0.299/0.587/0.114, rounded half up. `#` comments are accepted
//! anywhere whitespace is. Maxval up to 65535 (two-byte big-endian samples
//! in the binary formats when maxval > 255).

use crate::error::{Error, Result};
use crate::image::{BinaryMask, GrayImage};

const MAX_PIXELS: usize = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    GrayAscii,
    PixAscii,
    GrayBinary,
    PixBinary,
}

struct Tokenizer<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Tokenizer<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_space_and_comments();
        if self.pos >= self.bytes.len() {
            return None;
        }
        let start = self.pos;
        while self.pos < self.bytes.len()
            && !self.bytes[self.pos].is_ascii_whitespace()
            && self.bytes[self.pos] != b'#'
        {
            self.pos += 1;
        }
        Some(&self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &'static str) -> Result<u64> {
        let tok = self.token().ok_or(Error::TruncatedData(what))?;
        let s = String::from_utf8_lossy(tok);
        if tok.is_empty() || !tok.iter().all(|b| b.is_ascii_digit()) {
            return Err(Error::NonNumericToken(s.into_owned()));
        }
        s.parse::<u64>()
            .map_err(|_| Error::NonNumericToken(s.into_owned()))
    }
}

/// Decodes a P2/P3/P5/P6 stream into a grayscale image.
///
/// Color pixmaps are converted per pixel with `0.299 R + 0.587 G + 0.114 B`,
/// rounded half up. Samples above maxval are clamped. Zero dimensions and
/// absurdly large images are rejected as truncated/malformed streams.
pub fn read_netpbm(bytes: &[u8]) -> Result<GrayImage> {
    let mut t = Tokenizer::new(bytes);
    let magic = t.token().ok_or(Error::TruncatedData("missing magic"))?;
    let format = match magic {
        b"P2" => Format::GrayAscii,
        b"P3" => Format::PixAscii,
        b"P5" => Format::GrayBinary,
        b"P6" => Format::PixBinary,
        other => {
            return Err(Error::UnknownMagic(
                String::from_utf8_lossy(other).into_owned(),
            ))
        }
    };

    let width = t.number("missing width")? as usize;
    let height = t.number("missing height")? as usize;
    if width == 0 || height == 0 {
        return Err(Error::TruncatedData("zero image dimension"));
    }
    let maxval = t.number("missing maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::MaxvalOutOfRange(maxval));
    }
    let maxval = maxval as u16;

    let samples_per_pixel = match format {
        Format::GrayAscii | Format::GrayBinary => 1usize,
        Format::PixAscii | Format::PixBinary => 3usize,
    };
    let n_pixels = width
        .checked_mul(height)
        .filter(|&n| n <= MAX_PIXELS)
        .ok_or(Error::TruncatedData("image dimensions overflow"))?;
    let n_samples = n_pixels * samples_per_pixel;

    let samples: Vec<u16> = match format {
        Format::GrayAscii | Format::PixAscii => {
            let mut out = Vec::with_capacity(n_samples);
            for _ in 0..n_samples {
                let v = t.number("missing sample")?;
                out.push(v.min(maxval as u64) as u16);
            }
            out
        }
        Format::GrayBinary | Format::PixBinary => {
            // Exactly one whitespace byte separates the maxval token from the
            // raw sample block.
            let data = &bytes[(t.pos + 1).min(bytes.len())..];
            let wide = maxval > 255;
            let bytes_per_sample = if wide { 2 } else { 1 };
            if data.len() < n_samples * bytes_per_sample {
                return Err(Error::TruncatedData("raw sample block too short"));
            }
            (0..n_samples)
                .map(|i| {
                    let v = if wide {
                        u16::from_be_bytes([data[2 * i], data[2 * i + 1]])
                    } else {
                        data[i] as u16
                    };
                    v.min(maxval)
                })
                .collect()
        }
    };

    let pixels = match samples_per_pixel {
        1 => samples,
        _ => samples
            .chunks_exact(3)
            .map(|rgb| luminance(rgb[0], rgb[1], rgb[2]))
            .collect(),
    };
    Ok(GrayImage::new(width, height, maxval, pixels))
}

fn luminance(r: u16, g: u16, b: u16) -> u16 {
    (0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64 + 0.5).floor() as u16
}

/// Encodes a grayscale image as P2 (ASCII) or P5 (binary) with its own maxval.
/// Reading the output back yields identical pixels.
pub fn write_gray(image: &GrayImage, ascii: bool) -> Vec<u8> {
    let header = format!(
        "{}\n{} {}\n{}\n",
        if ascii { "P2" } else { "P5" },
        image.width(),
        image.height(),
        image.maxval()
    );
    let mut out = header.into_bytes();
    if ascii {
        for y in 0..image.height() {
            let row: Vec<String> = (0..image.width())
                .map(|x| image.get(x, y).to_string())
                .collect();
            out.extend_from_slice(row.join(" ").as_bytes());
            out.push(b'\n');
        }
    } else if image.maxval() > 255 {
        for &p in image.pixels() {
            out.extend_from_slice(&p.to_be_bytes());
        }
    } else {
        out.extend(image.pixels().iter().map(|&p| p as u8));
    }
    out
}

/// Encodes a mask as a maxval-255 graymap: foreground 255, background 0.
/// Round-trips exactly through [`read_netpbm`] plus a threshold at 128.
pub fn write_mask(mask: &BinaryMask, ascii: bool) -> Vec<u8> {
    write_gray(&mask.to_gray(255, 255), ascii)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ascii_graymap_decodes_tokens() {
        let img = read_netpbm(b"P2 2 1 255 0 255").unwrap();
        assert_eq!((img.width(), img.height()), (2, 1));
        assert_eq!(img.pixels(), &[0, 255]);
    }

    #[test]
    fn white_pixmap_pixel_maps_to_white() {
        let img = read_netpbm(b"P3 1 1 255 255 255 255").unwrap();
        assert_eq!(img.pixels(), &[255]);
    }

    #[test]
    fn luminance_conversion_rounds_half_up() {
        // 0.299*100 + 0.587*200 + 0.114*50 = 153.0 exactly
        let img = read_netpbm(b"P3 1 1 255 100 200 50").unwrap();
        assert_eq!(img.pixels(), &[153]);
    }

    #[test]
    fn comments_allowed_between_any_tokens() {
        let src = b"P2 # magic\n# a comment line\n 2 #width\n1 255\n0 # zero\n255";
        let img = read_netpbm(src).unwrap();
        assert_eq!(img.pixels(), &[0, 255]);
    }

    #[test]
    fn binary_graymap_round_trip() {
        let img = GrayImage::new(3, 2, 255, vec![0, 10, 20, 30, 40, 250]);
        let enc = write_gray(&img, false);
        assert_eq!(read_netpbm(&enc).unwrap(), img);
    }

    #[test]
    fn sixteen_bit_binary_round_trip() {
        let img = GrayImage::new(2, 2, 65535, vec![0, 300, 65535, 12345]);
        let enc = write_gray(&img, false);
        assert_eq!(read_netpbm(&enc).unwrap(), img);
        let enc = write_gray(&img, true);
        assert_eq!(read_netpbm(&enc).unwrap(), img);
    }

    #[test]
    fn binary_pixmap_decodes() {
        let mut src = b"P6 2 1 255\n".to_vec();
        src.extend_from_slice(&[255, 255, 255, 100, 200, 50]);
        let img = read_netpbm(&src).unwrap();
        assert_eq!(img.pixels(), &[255, 153]);
    }

    #[test]
    fn single_on_pixel_mask_writes_expected_tokens() {
        let mut m = BinaryMask::new(1, 1);
        m.set(0, 0, true);
        let text = String::from_utf8(write_mask(&m, true)).unwrap();
        let tokens: Vec<&str> = text.split_whitespace().collect();
        assert_eq!(tokens, ["P2", "1", "1", "255", "255"]);
    }

    #[test]
    fn two_by_two_mask_writes_expected_tokens() {
        let m = BinaryMask::from_rows(&["#.", ".#"]);
        let text = String::from_utf8(write_mask(&m, true)).unwrap();
        let tokens: Vec<&str> = text.split_whitespace().collect();
        assert_eq!(tokens, ["P2", "2", "2", "255", "255", "0", "0", "255"]);
    }

    #[test]
    fn unknown_magic_is_rejected() {
        assert_eq!(
            read_netpbm(b"P7 1 1 255 0"),
            Err(Error::UnknownMagic("P7".into()))
        );
    }

    #[test]
    fn truncated_streams_are_rejected() {
        assert!(matches!(
            read_netpbm(b"P2 2 2 255 0 0 0"),
            Err(Error::TruncatedData(_))
        ));
        assert!(matches!(
            read_netpbm(b"P5 2 2 255\n\x00\x01"),
            Err(Error::TruncatedData(_))
        ));
        assert!(matches!(read_netpbm(b"P2 4"), Err(Error::TruncatedData(_))));
    }

    #[test]
    fn maxval_bounds_are_enforced() {
        assert_eq!(read_netpbm(b"P2 1 1 0 0"), Err(Error::MaxvalOutOfRange(0)));
        assert_eq!(
            read_netpbm(b"P2 1 1 70000 0"),
            Err(Error::MaxvalOutOfRange(70000))
        );
    }

    #[test]
    fn non_numeric_token_is_reported() {
        assert_eq!(
            read_netpbm(b"P2 1 1 255 abc"),
            Err(Error::NonNumericToken("abc".into()))
        );
        assert_eq!(
            read_netpbm(b"P2 w 1 255 0"),
            Err(Error::NonNumericToken("w".into()))
        );
    }

    proptest! {
        // Decode inverts encode for any image, in both variants.
        #[test]
        fn read_write_identity(
            (w, h, maxval, pixels) in (1usize..12, 1usize..12, 1u16..=65535).prop_flat_map(
                |(w, h, maxval)| {
                    proptest::collection::vec(0..=maxval, w * h)
                        .prop_map(move |pixels| (w, h, maxval, pixels))
                }
            ),
            ascii in proptest::bool::ANY,
        ) {
            let img = GrayImage::new(w, h, maxval, pixels);
            prop_assert_eq!(read_netpbm(&write_gray(&img, ascii)).unwrap(), img);
        }
    }
}
