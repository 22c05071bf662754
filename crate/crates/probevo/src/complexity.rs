//! Linguistic complexity of strings and binary images.
//!
//! The complexity of a piece of data is the product of its *vocabulary
//! usages* over all word sizes: for each size, the ratio of distinct
//! words actually present to the number of words possible. The possible
//! count is limited both by the alphabet (a^k words of length k over an
//! alphabet of a symbols) and by the data itself (a length-L string has
//! only L-k+1 positions for a length-k word).
//!
//! For two-dimensional binary images the words are axis-aligned,
//! non-wrapping h×w pixel windows, and the product runs over every
//! rectangular window shape. On a 1×N image this reduces exactly to the
//! one-dimensional definition.
//!
//! Scores are tiny products of hundreds of factors, so they are
//! accumulated in log space; [`Complexity`] keeps the natural log and
//! compares on it. The log factors are summed in a canonical sorted
//! order, which makes the score invariant under any symmetry that
//! permutes the factors (flips, rotation, transposition, complement).

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::image::BinaryImage;

/// A linguistic-complexity score in (0, 1], stored as its natural log.
///
/// Ordering and equality are defined on the log value, so scores far
/// below `f64` underflow still compare correctly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complexity {
    ln: f64,
}

impl Complexity {
    /// Combines per-size usage factors, each in (0, 1], into one score.
    ///
    /// Factors are sorted before summation so the result depends only on
    /// the multiset of factors, not their enumeration order.
    fn from_usages(usages: impl IntoIterator<Item = f64>) -> Complexity {
        let mut lns: Vec<f64> = usages.into_iter().map(f64::ln).collect();
        lns.sort_unstable_by(f64::total_cmp);
        Complexity {
            ln: lns.iter().sum(),
        }
    }

    /// Natural log of the score; finite and ≤ 0.
    pub fn ln(&self) -> f64 {
        self.ln
    }

    /// The raw score. Underflows to 0.0 when the log is below about -745.
    pub fn value(&self) -> f64 {
        self.ln.exp()
    }
}

impl Eq for Complexity {}

impl PartialOrd for Complexity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Complexity {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ln.total_cmp(&other.ln)
    }
}

impl fmt::Display for Complexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (ln {})", self.value(), self.ln)
    }
}

/// A sequence of symbols over a finite alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolString {
    symbols: Vec<u32>,
    alphabet_size: u32,
}

impl SymbolString {
    /// A non-empty string whose symbols all lie below `alphabet_size`.
    pub fn new(symbols: Vec<u32>, alphabet_size: u32) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidArgument("string must be non-empty".into()));
        }
        if alphabet_size == 0 {
            return Err(Error::InvalidArgument("alphabet must be non-empty".into()));
        }
        if let Some(&bad) = symbols.iter().find(|&&s| s >= alphabet_size) {
            return Err(Error::InvalidArgument(format!(
                "symbol {bad} outside alphabet of size {alphabet_size}"
            )));
        }
        Ok(SymbolString {
            symbols,
            alphabet_size,
        })
    }

    /// A binary string from a text of `0` and `1` characters.
    pub fn binary(text: &str) -> Result<Self> {
        let symbols = text
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::InvalidArgument(format!(
                    "expected '0' or '1', got {c:?}"
                ))),
            })
            .collect::<Result<Vec<u32>>>()?;
        Self::new(symbols, 2)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length ≥ 1 by construction
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet_size
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }
}

/// Vocabulary usage of one word length in a string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordUsage {
    pub word_len: usize,
    pub distinct: u64,
    pub possible: u64,
}

impl WordUsage {
    pub fn usage(&self) -> f64 {
        self.distinct as f64 / self.possible as f64
    }
}

/// Vocabulary usage of one window shape in an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowUsage {
    pub height: usize,
    pub width: usize,
    pub distinct: u64,
    pub possible: u64,
}

impl WindowUsage {
    pub fn usage(&self) -> f64 {
        self.distinct as f64 / self.possible as f64
    }
}

/// Which window shapes enter the two-dimensional product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowShapes {
    /// Every rectangular shape 1 ≤ h ≤ H, 1 ≤ w ≤ W. The default; on a
    /// 1×N image it degenerates to the one-dimensional definition.
    #[default]
    Rectangles,
    /// Square shapes k×k, 1 ≤ k ≤ min(H, W), for comparison runs.
    Squares,
}

impl WindowShapes {
    fn shapes(self, height: usize, width: usize) -> Vec<(usize, usize)> {
        match self {
            WindowShapes::Rectangles => (1..=height)
                .flat_map(|h| (1..=width).map(move |w| (h, w)))
                .collect(),
            WindowShapes::Squares => (1..=height.min(width)).map(|k| (k, k)).collect(),
        }
    }
}

impl fmt::Display for WindowShapes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WindowShapes::Rectangles => "rectangles",
            WindowShapes::Squares => "squares",
        })
    }
}

/// min(base^exp, cap), without overflow.
fn clamped_power(base: u64, exp: usize, cap: u64) -> u64 {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
        if acc >= cap {
            return cap;
        }
    }
    acc
}

/// Ratio of distinct length-`k` words in `s` to the possible count
/// min(a^k, L-k+1). Lies in (0, 1].
pub fn vocabulary_usage_1d(s: &SymbolString, k: usize) -> Result<f64> {
    if k == 0 || k > s.len() {
        return Err(Error::InvalidArgument(format!(
            "word length {k} out of range 1..={}",
            s.len()
        )));
    }
    Ok(word_usage(s, k).usage())
}

fn word_usage(s: &SymbolString, k: usize) -> WordUsage {
    let positions = (s.len() - k + 1) as u64;
    let distinct = s.symbols.windows(k).collect::<HashSet<_>>().len() as u64;
    WordUsage {
        word_len: k,
        distinct,
        possible: clamped_power(s.alphabet_size as u64, k, positions),
    }
}

/// Per-word-length usage counts for every length 1..=L.
pub fn usage_profile_1d(s: &SymbolString) -> Vec<WordUsage> {
    (1..=s.len()).map(|k| word_usage(s, k)).collect()
}

/// Product of vocabulary usages over all word lengths.
pub fn complexity_1d(s: &SymbolString) -> Complexity {
    Complexity::from_usages(usage_profile_1d(s).iter().map(WordUsage::usage))
}

/// Number of distinct h×w pixel windows over all axis-aligned positions.
pub fn count_distinct_windows(img: &BinaryImage, h: usize, w: usize) -> Result<u64> {
    check_window(img, h, w)?;
    let rows = PackedRows::pack(img);
    Ok(distinct_windows(img, &rows, h, w))
}

fn check_window(img: &BinaryImage, h: usize, w: usize) -> Result<()> {
    if h == 0 || h > img.height() || w == 0 || w > img.width() {
        return Err(Error::InvalidArgument(format!(
            "window {h}x{w} out of range for {}x{} image",
            img.height(),
            img.width()
        )));
    }
    Ok(())
}

/// Image rows packed LSB-first into one word each, when the width fits.
struct PackedRows {
    rows: Option<Vec<u64>>,
}

impl PackedRows {
    fn pack(img: &BinaryImage) -> PackedRows {
        if img.width() > 64 {
            return PackedRows { rows: None };
        }
        let rows = (0..img.height())
            .map(|r| {
                (0..img.width())
                    .map(|c| (img.pixel(r, c) as u64) << c)
                    .fold(0, |acc, b| acc | b)
            })
            .collect();
        PackedRows { rows: Some(rows) }
    }
}

fn distinct_windows(img: &BinaryImage, packed: &PackedRows, h: usize, w: usize) -> u64 {
    let (rows_span, cols_span) = (img.height() - h + 1, img.width() - w + 1);
    match &packed.rows {
        // Windows of at most 64 bits pack into a single key word.
        Some(rows) if h * w <= 64 => {
            let mask = if w == 64 { u64::MAX } else { (1u64 << w) - 1 };
            let mut seen = HashSet::with_capacity(rows_span * cols_span);
            for r in 0..rows_span {
                for c in 0..cols_span {
                    let mut key = 0u64;
                    for (i, &row) in rows[r..r + h].iter().enumerate() {
                        key |= ((row >> c) & mask) << (i * w);
                    }
                    seen.insert(key);
                }
            }
            seen.len() as u64
        }
        // Wider windows pack row-major into as many words as needed.
        _ => {
            let words = (h * w).div_ceil(64);
            let mut seen: HashSet<Vec<u64>> = HashSet::with_capacity(rows_span * cols_span);
            let mut key = vec![0u64; words];
            for r in 0..rows_span {
                for c in 0..cols_span {
                    key.iter_mut().for_each(|v| *v = 0);
                    let mut bit = 0;
                    for i in 0..h {
                        for j in 0..w {
                            key[bit / 64] |= (img.pixel(r + i, c + j) as u64) << (bit % 64);
                            bit += 1;
                        }
                    }
                    if !seen.contains(&key) {
                        seen.insert(key.clone());
                    }
                }
            }
            seen.len() as u64
        }
    }
}

fn window_usage(img: &BinaryImage, packed: &PackedRows, h: usize, w: usize) -> WindowUsage {
    let positions = ((img.height() - h + 1) * (img.width() - w + 1)) as u64;
    WindowUsage {
        height: h,
        width: w,
        distinct: distinct_windows(img, packed, h, w),
        possible: clamped_power(2, h * w, positions),
    }
}

/// Ratio of distinct h×w windows to the possible count
/// min(2^(h·w), positions). Lies in (0, 1].
pub fn vocabulary_usage_2d(img: &BinaryImage, h: usize, w: usize) -> Result<f64> {
    check_window(img, h, w)?;
    let packed = PackedRows::pack(img);
    Ok(window_usage(img, &packed, h, w).usage())
}

/// Per-shape usage counts for the given shape set.
pub fn usage_profile_2d(img: &BinaryImage, shapes: WindowShapes) -> Vec<WindowUsage> {
    let packed = PackedRows::pack(img);
    shapes
        .shapes(img.height(), img.width())
        .into_iter()
        .map(|(h, w)| window_usage(img, &packed, h, w))
        .collect()
}

/// Product of vocabulary usages over all rectangular window shapes.
pub fn complexity_2d(img: &BinaryImage) -> Complexity {
    complexity_2d_with(img, WindowShapes::Rectangles)
}

/// As [`complexity_2d`], with an explicit window-shape set.
pub fn complexity_2d_with(img: &BinaryImage, shapes: WindowShapes) -> Complexity {
    Complexity::from_usages(usage_profile_2d(img, shapes).iter().map(WindowUsage::usage))
}
