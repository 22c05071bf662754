//! Oracle-equivalence and property tests for the complexity scores.

mod common;

use common::{
    constant_image_log_complexity, naive_complexity_1d, naive_count_distinct_windows,
    naive_log_complexity_2d, random_image, rng,
};
use probevo::complexity::{
    complexity_1d, complexity_2d, count_distinct_windows, usage_profile_2d, vocabulary_usage_2d,
    SymbolString, WindowShapes,
};
use probevo::image::BinaryImage;
use proptest::prelude::*;

#[test]
fn brute_force_1d_agrees_on_short_strings() {
    // Every binary string up to length 10.
    for len in 1..=10usize {
        for bits in 0..(1u32 << len) {
            let symbols: Vec<u32> = (0..len).map(|i| (bits >> i) & 1).collect();
            let s = SymbolString::new(symbols, 2).unwrap();
            let fast = complexity_1d(&s).value();
            let naive = naive_complexity_1d(&s);
            assert!(
                (fast - naive).abs() < 1e-12,
                "len {len} bits {bits:b}: {fast} vs {naive}"
            );
        }
    }
}

#[test]
fn brute_force_1d_agrees_on_example_string() {
    let s = SymbolString::binary("0011").unwrap();
    let naive = naive_complexity_1d(&s);
    assert!((complexity_1d(&s).value() - naive).abs() < 1e-12);
    // Independently: all four usages of "0011" are full, so the product is 1.
    assert_eq!(naive, 1.0);
}

#[test]
fn ternary_alphabet_agrees_with_brute_force() {
    let mut r = rng(40);
    for _ in 0..50 {
        let symbols: Vec<u32> = (0..12).map(|_| r.random_range(0..3u32)).collect();
        let s = SymbolString::new(symbols, 3).unwrap();
        let fast = complexity_1d(&s).value();
        let naive = naive_complexity_1d(&s);
        assert!((fast - naive).abs() < 1e-12);
    }
}

#[test]
fn seeded_5x5_window_counts_match_brute_force() {
    let mut r = rng(5);
    for case in 0..20 {
        let img = random_image(5, 5, &mut r);
        let fast = count_distinct_windows(&img, 2, 2).unwrap();
        let naive = naive_count_distinct_windows(&img, 2, 2) as u64;
        assert_eq!(fast, naive, "case {case}");
        let usage = vocabulary_usage_2d(&img, 2, 2).unwrap();
        let positions = 16.0_f64;
        assert_eq!(usage, naive as f64 / positions.min(16.0));
    }
}

#[test]
fn seeded_6x6_log_complexity_matches_brute_force() {
    let mut r = rng(6);
    for case in 0..50 {
        let img = random_image(6, 6, &mut r);
        let fast = complexity_2d(&img).ln();
        let naive = naive_log_complexity_2d(&img);
        assert!(
            (fast - naive).abs() < 1e-12,
            "case {case}: {fast} vs {naive}"
        );
    }
}

#[test]
fn constant_20x20_regression_value() {
    let img = BinaryImage::constant(20, 20, 0).unwrap();
    let ln = complexity_2d(&img).ln();
    // Analytic oracle: every factor is 1/min(2^(h·w), positions).
    assert!((ln - constant_image_log_complexity(20, 20)).abs() < 1e-8);
    // Frozen regression constant.
    assert!((ln - (-1649.0679581889715)).abs() < 1e-8, "ln = {ln}");
    // Far below f64 range: the raw value underflows to zero.
    assert_eq!(complexity_2d(&img).value(), 0.0);
}

#[test]
fn constant_image_is_the_minimum() {
    // The constant image minimizes every usage factor simultaneously.
    let floor = constant_image_log_complexity(8, 8);
    let mut r = rng(77);
    for _ in 0..50 {
        let img = random_image(8, 8, &mut r);
        assert!(complexity_2d(&img).ln() >= floor - 1e-12);
    }
}

fn small_image() -> impl Strategy<Value = BinaryImage> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(h, w)| {
        proptest::collection::vec(0u8..=1, h * w)
            .prop_map(move |pixels| BinaryImage::new(h, w, pixels).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn usage_factors_lie_in_unit_interval(img in small_image()) {
        for u in usage_profile_2d(&img, WindowShapes::Rectangles) {
            prop_assert!(u.distinct >= 1);
            prop_assert!(u.distinct <= u.possible);
            let usage = u.usage();
            prop_assert!(usage > 0.0 && usage <= 1.0);
        }
        let c = complexity_2d(&img);
        prop_assert!(c.value() > 0.0 && c.value() <= 1.0);
        prop_assert!(c.ln() <= 0.0);
    }

    #[test]
    fn symmetries_preserve_complexity(img in small_image()) {
        let base = complexity_2d(&img).ln();
        prop_assert_eq!(complexity_2d(&img.complement()).ln(), base);
        prop_assert_eq!(complexity_2d(&img.flip_horizontal()).ln(), base);
        prop_assert_eq!(complexity_2d(&img.flip_vertical()).ln(), base);
        prop_assert_eq!(complexity_2d(&img.rotate_180()).ln(), base);
        prop_assert_eq!(complexity_2d(&img.transpose()).ln(), base);
    }

    #[test]
    fn fast_path_matches_brute_force(img in small_image()) {
        let fast = complexity_2d(&img).ln();
        let naive = naive_log_complexity_2d(&img);
        prop_assert!((fast - naive).abs() < 1e-12);
    }
}
