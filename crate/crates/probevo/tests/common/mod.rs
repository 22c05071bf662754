//! Independent oracles shared by the integration and acceptance tests.
//!
//! Everything here recomputes results from first principles — plain
//! nested loops, no bit packing, no log-space sorting — so agreement
//! with the library is a real check, not a tautology.

#![allow(dead_code)]

use std::collections::HashSet;

use probevo::complexity::SymbolString;
use probevo::image::BinaryImage;
use probevo::network::{gradient, Network};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniformly random binary image.
pub fn random_image(height: usize, width: usize, rng: &mut impl Rng) -> BinaryImage {
    BinaryImage::from_fn(height, width, |_, _| rng.random::<bool>() as u8)
}

/// Left-0 / right-1 split.
pub fn half_plane(height: usize, width: usize) -> BinaryImage {
    BinaryImage::from_fn(height, width, |_, c| (c >= width / 2) as u8)
}

/// Brute-force 1-D linguistic complexity: enumerate the substrings of
/// every length, count distinct ones by storing them whole, and take
/// the plain product of the usage ratios.
pub fn naive_complexity_1d(s: &SymbolString) -> f64 {
    let symbols = s.symbols();
    let n = symbols.len();
    let mut product = 1.0;
    for k in 1..=n {
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        for start in 0..=(n - k) {
            seen.insert(symbols[start..start + k].to_vec());
        }
        let positions = (n - k + 1) as f64;
        let alphabet_words = (s.alphabet_size() as f64).powi(k as i32);
        let possible = alphabet_words.min(positions);
        product *= seen.len() as f64 / possible;
    }
    product
}

/// Brute-force distinct-window count: store every window's pixels as a
/// plain vector.
pub fn naive_count_distinct_windows(img: &BinaryImage, h: usize, w: usize) -> usize {
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    for top in 0..=(img.height() - h) {
        for left in 0..=(img.width() - w) {
            let mut window = Vec::with_capacity(h * w);
            for r in top..top + h {
                for c in left..left + w {
                    window.push(img.pixel(r, c));
                }
            }
            seen.insert(window);
        }
    }
    seen.len()
}

/// Brute-force 2-D log-complexity over all rectangular window shapes,
/// summed in plain enumeration order.
pub fn naive_log_complexity_2d(img: &BinaryImage) -> f64 {
    let mut ln_sum = 0.0;
    for h in 1..=img.height() {
        for w in 1..=img.width() {
            let distinct = naive_count_distinct_windows(img, h, w) as f64;
            let positions = ((img.height() - h + 1) * (img.width() - w + 1)) as f64;
            let patterns = if h * w >= 64 {
                f64::INFINITY
            } else {
                (1u64 << (h * w)) as f64
            };
            ln_sum += (distinct / patterns.min(positions)).ln();
        }
    }
    ln_sum
}

/// Analytic log-complexity of a constant image: every shape contributes
/// exactly one distinct window.
pub fn constant_image_log_complexity(height: usize, width: usize) -> f64 {
    let mut ln_sum = 0.0;
    for h in 1..=height {
        for w in 1..=width {
            let positions = ((height - h + 1) * (width - w + 1)) as f64;
            let patterns = if h * w >= 64 {
                f64::INFINITY
            } else {
                (1u64 << (h * w)) as f64
            };
            ln_sum += (1.0 / patterns.min(positions)).ln();
        }
    }
    ln_sum
}

/// Central finite differences of the evaluation mse over every parameter.
pub fn finite_difference_gradient(net: &Network, img: &BinaryImage, step: f64) -> Vec<f64> {
    let base = net.params();
    let mut grad = Vec::with_capacity(base.len());
    let mut probe = net.clone();
    for i in 0..base.len() {
        let mut plus = base.clone();
        plus[i] += step;
        probe.set_params(&plus).unwrap();
        let e_plus = probe.evaluate(img).mse;
        let mut minus = base.clone();
        minus[i] -= step;
        probe.set_params(&minus).unwrap();
        let e_minus = probe.evaluate(img).mse;
        grad.push((e_plus - e_minus) / (2.0 * step));
    }
    grad
}

/// Asserts per-component relative agreement between the backprop and
/// finite-difference gradients.
pub fn assert_gradients_match(net: &Network, img: &BinaryImage, tolerance: f64, context: &str) {
    let bp = gradient(net, img);
    let fd = finite_difference_gradient(net, img, 1e-5);
    assert_eq!(bp.len(), fd.len(), "{context}: length mismatch");
    for (i, (&a, &b)) in bp.iter().zip(&fd).enumerate() {
        let scale = a.abs().max(b.abs());
        if scale < 1e-6 {
            assert!(
                (a - b).abs() < 1e-10,
                "{context}: component {i} near-zero mismatch: {a} vs {b}"
            );
        } else {
            let rel = (a - b).abs() / scale;
            assert!(
                rel < tolerance,
                "{context}: component {i} relative error {rel}: {a} vs {b}"
            );
        }
    }
}
