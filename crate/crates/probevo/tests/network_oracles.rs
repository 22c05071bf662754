//! Gradient and training checks against independent oracles.

mod common;

use common::{assert_gradients_match, half_plane, random_image, rng};
use probevo::image::BinaryImage;
use probevo::network::{train_to_recognition, LayerSizes, Network, TrainingParams, TrainingStatus};

fn sizes(text: &str) -> LayerSizes {
    text.parse().unwrap()
}

#[test]
fn gradient_matches_finite_differences_shallow() {
    let mut r = rng(100);
    for case in 0..10 {
        let net = Network::random(sizes("2-4-1"), &mut r);
        let img = random_image(5, 5, &mut r);
        assert_gradients_match(&net, &img, 1e-4, &format!("2-4-1 case {case}"));
    }
}

#[test]
fn gradient_matches_finite_differences_deep() {
    // Deeper than anything in the sweeps, to exercise multi-layer backprop.
    let mut r = rng(101);
    for case in 0..5 {
        let net = Network::random(sizes("2-3-3-2-1"), &mut r);
        let img = random_image(4, 6, &mut r);
        assert_gradients_match(&net, &img, 1e-4, &format!("2-3-3-2-1 case {case}"));
    }
}

#[test]
fn gradient_matches_on_degenerate_images() {
    let mut r = rng(102);
    let net = Network::random(sizes("2-2-1"), &mut r);
    for img in [
        BinaryImage::constant(1, 1, 1).unwrap(),
        BinaryImage::constant(3, 1, 0).unwrap(),
        BinaryImage::new(1, 4, vec![0, 1, 1, 0]).unwrap(),
    ] {
        assert_gradients_match(&net, &img, 1e-4, "degenerate image");
    }
}

#[test]
fn half_plane_is_learnable_by_2_2_1() {
    // Linearly separable: nearly every random start reaches full
    // recognition well before the epoch cap.
    let mut r = rng(200);
    let img = half_plane(8, 8);
    let mut successes = 0;
    for _ in 0..5 {
        let net = Network::random(sizes("2-2-1"), &mut r);
        let out = train_to_recognition(net, &img, &TrainingParams::default()).unwrap();
        if out.status == TrainingStatus::FullyRecognized {
            successes += 1;
            assert_eq!(out.network.evaluate(&img).fraction_recognized, 1.0);
        }
    }
    assert!(successes >= 4, "only {successes}/5 trained");
}

#[test]
fn tilted_half_plane_is_learnable() {
    let mut r = rng(201);
    let img = BinaryImage::from_fn(8, 8, |row, col| (row + col >= 8) as u8);
    let net = Network::random(sizes("2-2-1"), &mut r);
    let out = train_to_recognition(net, &img, &TrainingParams::default()).unwrap();
    assert_eq!(out.status, TrainingStatus::FullyRecognized);
}

#[test]
fn stalled_training_reports_final_state() {
    let mut r = rng(202);
    let net = Network::random(sizes("2-2-1"), &mut r);
    let noise = random_image(8, 8, &mut r);
    let params = TrainingParams {
        n_c: 100,
        max_epochs: 2000,
        ..Default::default()
    };
    let out = train_to_recognition(net, &noise, &params).unwrap();
    assert_eq!(out.status, TrainingStatus::Stalled);
    assert!(out.fraction_recognized < 1.0);
    assert!(out.mse.is_finite());
    // The reported network reproduces the reported evaluation.
    let ev = out.network.evaluate(&noise);
    assert_eq!(ev.mse, out.mse);
    assert_eq!(ev.fraction_recognized, out.fraction_recognized);
}

#[test]
fn inherited_weights_on_the_same_image_return_immediately() {
    // Carrying trained weights on genotypes means a child identical to
    // its parent costs zero epochs; retraining resumes from recognition.
    let mut r = rng(203);
    let img = half_plane(10, 10);
    let trained = loop {
        let net = Network::random(sizes("2-4-1"), &mut r);
        let out = train_to_recognition(net, &img, &TrainingParams::default()).unwrap();
        if out.status == TrainingStatus::FullyRecognized {
            break out;
        }
    };
    let again =
        train_to_recognition(trained.network.clone(), &img, &TrainingParams::default()).unwrap();
    assert_eq!(again.status, TrainingStatus::FullyRecognized);
    assert_eq!(again.epochs_run, 0);

    // A one-flip variant still retrains to full recognition from the
    // inherited weights.
    let mut variant = img.clone();
    variant.flip_pixel(0, 9);
    let inherited =
        train_to_recognition(trained.network, &variant, &TrainingParams::default()).unwrap();
    assert_eq!(inherited.status, TrainingStatus::FullyRecognized);
}

#[test]
fn random_nets_evaluate_like_a_naive_loop() {
    // Per-pixel oracle for evaluate: plain loop over pixels and forward.
    let mut r = rng(204);
    for _ in 0..10 {
        let net = Network::random(sizes("2-3-1"), &mut r);
        let img = random_image(5, 5, &mut r);
        let ev = net.evaluate(&img);
        let mut sq = 0.0;
        let mut hits = 0;
        for row in 0..5 {
            for col in 0..5 {
                let (x, y) = probevo::network::pixel_coord(5, 5, row, col);
                let out = net.forward(x, y);
                let t = if img.pixel(row, col) == 1 { 1.0 } else { -1.0 };
                sq += (out - t) * (out - t);
                if out != 0.0 && (out > 0.0) == (t > 0.0) {
                    hits += 1;
                }
            }
        }
        assert!((ev.mse - sq / 25.0).abs() < 1e-15);
        assert_eq!(ev.fraction_recognized, hits as f64 / 25.0);
    }
}

#[test]
fn training_never_exceeds_the_epoch_cap() {
    let mut r = rng(205);
    for cap in [1usize, 7, 60] {
        let net = Network::random(sizes("2-2-1"), &mut r);
        let noise = random_image(7, 7, &mut r);
        let params = TrainingParams {
            max_epochs: cap,
            ..Default::default()
        };
        let out = train_to_recognition(net, &noise, &params).unwrap();
        assert!(out.epochs_run <= cap, "cap {cap}, ran {}", out.epochs_run);
    }
}
