//! Binary images: the problem instances being evolved.
//!
//! An image is an H×W grid of {0,1} pixels stored row-major. Images
//! serialize as plain PBM (`P1`): ASCII magic, width/height, then
//! whitespace-separated pixel values, row by row.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// An H×W grid of binary pixels, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    height: usize,
    width: usize,
    pixels: Vec<u8>,
}

impl BinaryImage {
    /// Builds an image from row-major pixel data. Every pixel must be 0 or 1.
    pub fn new(height: usize, width: usize, pixels: Vec<u8>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidArgument(format!(
                "image dimensions must be positive, got {height}x{width}"
            )));
        }
        if pixels.len() != height * width {
            return Err(Error::InvalidArgument(format!(
                "pixel buffer has {} entries, expected {}",
                pixels.len(),
                height * width
            )));
        }
        if let Some(&bad) = pixels.iter().find(|&&p| p > 1) {
            return Err(Error::InvalidArgument(format!(
                "pixel value {bad} is not binary"
            )));
        }
        Ok(BinaryImage {
            height,
            width,
            pixels,
        })
    }

    /// All pixels set to `value`.
    pub fn constant(height: usize, width: usize, value: u8) -> Result<Self> {
        Self::new(height, width, vec![value; height * width])
    }

    /// Builds an image by evaluating `f(row, col)` at every pixel; any
    /// nonzero return is stored as 1.
    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut pixels = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                pixels.push((f(r, c) != 0) as u8);
            }
        }
        BinaryImage {
            height,
            width,
            pixels,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pixel(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    pub fn set_pixel(&mut self, row: usize, col: usize, value: u8) {
        self.pixels[row * self.width + col] = (value != 0) as u8;
    }

    pub fn flip_pixel(&mut self, row: usize, col: usize) {
        self.pixels[row * self.width + col] ^= 1;
    }

    /// Row-major pixel data.
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// Number of pixels that differ from `other`.
    ///
    /// Panics if dimensions differ; callers compare same-sized genotypes.
    pub fn hamming_distance(&self, other: &BinaryImage) -> usize {
        assert_eq!(
            (self.height, self.width),
            (other.height, other.width),
            "hamming distance requires equal dimensions"
        );
        self.pixels
            .iter()
            .zip(&other.pixels)
            .filter(|(a, b)| a != b)
            .count()
    }

    /// Every pixel inverted.
    pub fn complement(&self) -> BinaryImage {
        BinaryImage {
            height: self.height,
            width: self.width,
            pixels: self.pixels.iter().map(|p| p ^ 1).collect(),
        }
    }

    /// Mirrored left-right.
    pub fn flip_horizontal(&self) -> BinaryImage {
        BinaryImage::from_fn(self.height, self.width, |r, c| {
            self.pixel(r, self.width - 1 - c)
        })
    }

    /// Mirrored top-bottom.
    pub fn flip_vertical(&self) -> BinaryImage {
        BinaryImage::from_fn(self.height, self.width, |r, c| {
            self.pixel(self.height - 1 - r, c)
        })
    }

    /// Rotated by 180 degrees.
    pub fn rotate_180(&self) -> BinaryImage {
        BinaryImage::from_fn(self.height, self.width, |r, c| {
            self.pixel(self.height - 1 - r, self.width - 1 - c)
        })
    }

    /// Rows and columns exchanged (a W×H image).
    pub fn transpose(&self) -> BinaryImage {
        BinaryImage::from_fn(self.width, self.height, |r, c| self.pixel(c, r))
    }

    /// Renders the image as plain PBM (`P1`).
    pub fn to_pbm(&self) -> String {
        let mut out = String::with_capacity(16 + self.pixels.len() * 2);
        out.push_str("P1\n");
        out.push_str(&format!("{} {}\n", self.width, self.height));
        for row in self.pixels.chunks(self.width) {
            let line: Vec<&str> = row
                .iter()
                .map(|&p| if p == 1 { "1" } else { "0" })
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses plain PBM (`P1`). Comments (`#` to end of line) are allowed
    /// anywhere whitespace is.
    pub fn from_pbm(text: &str) -> Result<Self> {
        let mut tokens = pbm_tokens(text);
        let magic = tokens
            .next()
            .ok_or_else(|| Error::PbmParse("empty input".into()))?;
        if magic != "P1" {
            return Err(Error::PbmParse(format!(
                "expected magic \"P1\", got {magic:?}"
            )));
        }
        let width: usize = parse_pbm_int(tokens.next(), "width")?;
        let height: usize = parse_pbm_int(tokens.next(), "height")?;
        if width == 0 || height == 0 {
            return Err(Error::PbmParse(format!(
                "dimensions must be positive, got {width} x {height}"
            )));
        }
        let mut pixels = Vec::with_capacity(width * height);
        for tok in tokens {
            // Plain PBM allows digits to be packed without separators.
            for ch in tok.chars() {
                match ch {
                    '0' => pixels.push(0),
                    '1' => pixels.push(1),
                    _ => {
                        return Err(Error::PbmParse(format!("unexpected character {ch:?}")));
                    }
                }
            }
        }
        if pixels.len() != width * height {
            return Err(Error::PbmParse(format!(
                "expected {} pixels, found {}",
                width * height,
                pixels.len()
            )));
        }
        Ok(BinaryImage {
            height,
            width,
            pixels,
        })
    }

    pub fn write_pbm_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_pbm()).map_err(|e| Error::io(path, e))
    }

    pub fn read_pbm_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_pbm(&text)
    }
}

impl fmt::Display for BinaryImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.pixels.chunks(self.width) {
            for &p in row {
                f.write_str(if p == 1 { "#" } else { "." })?;
            }
            f.write_str("\n")?;
        }
        Ok(())
    }
}

fn parse_pbm_int(tok: Option<&str>, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| Error::PbmParse(format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| Error::PbmParse(format!("bad {what}: {tok:?}")))
}

/// Whitespace-separated tokens with `#` comments stripped.
fn pbm_tokens(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(|line| match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        })
        .flat_map(|line| line.split_whitespace())
}
