//! Rank problem solvers by the hardest problem each one can solve.
//!
//! Instead of scoring solvers on a fixed benchmark, `probevo` evolves,
//! for each solver, the most complex problem it can still solve, and
//! compares those maxima. The solvers here are small feed-forward
//! neural networks learning a binary image as a coordinate→color map;
//! problem difficulty is the image's linguistic complexity; the search
//! is a steady-state genetic algorithm whose population only ever
//! contains images the network can fully recognize.
//!
//! ```
//! use probevo::evolution::{evolve, EvolutionConfig};
//!
//! // The hardest 5x5 image a 2-2-1 network can learn, at toy scale.
//! let mut config = EvolutionConfig::new("2-2-1".parse().unwrap());
//! config.height = 5;
//! config.width = 5;
//! config.capacity = 4;
//! config.stagnation_limit = 3;
//! config.seed = 11;
//! let log = evolve(config).unwrap();
//! assert!(log.champion.complexity().value() > 0.0);
//! ```
//!
//! The guide in `book/` walks through the concepts chapter by chapter;
//! its code snippets compile and run as part of `cargo test --doc`.
//!
//! * [`complexity`] — vocabulary usage and 1-D/2-D linguistic complexity.
//! * [`image`] — the binary-image grid and plain-PBM serialization.
//! * [`network`] — forward pass, backprop, iRProp+, training to full
//!   recognition.
//! * [`evolution`] — genotypes, admission gates, the evolution loop.
//! * [`harness`] — experiment specs, derived seeds, CSV outputs, CLI.

pub mod complexity;
pub mod error;
pub mod evolution;
pub mod harness;
pub mod image;
pub mod network;

mod util;

pub use error::{Error, Result};

// Keep the book's code snippets honest: every ```rust block in the
// guide compiles and runs under `cargo test --doc`.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(complexity, "../../../book/src/complexity.md");
    chapter!(images, "../../../book/src/images.md");
    chapter!(networks, "../../../book/src/networks.md");
    chapter!(evolution, "../../../book/src/evolution.md");
    chapter!(experiments, "../../../book/src/experiments.md");

    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
