//! Data synthesis and evaluation for narrative reordering: rewriting a
//! story so its sentences are told in a new order while the plot stays
//! the same.
//!
//! The pieces are
//! * [`permutation`]: narrative orders, Kendall τ, target-order sampling;
//! * [`corpus`] and [`jsonl`]: loading stories, annotations and splits;
//! * [`synthesis`] and [`encoding`]: building training examples;
//! * [`metrics`]: BLEU, METEOR, BERTScore and TOF variants;
//! * [`analysis`]: corpus statistics and human correlation;
//! * [`challenge`]: sentence-ordering control and challenge sets.
//!
//! ```
//! use nareor::{kendall_tau, NarrativeOrder};
//!
//! let order = NarrativeOrder::new(vec![5, 4, 2, 1, 3])?;
//! let story = ["a", "b", "c", "d", "e"];
//! assert_eq!(order.apply(&story)?, ["e", "d", "b", "a", "c"]);
//! let tau = kendall_tau(&order, &NarrativeOrder::identity(5))?;
//! assert!((tau + 0.6).abs() < 1e-12);
//! # Ok::<(), nareor::Error>(())
//! ```

pub mod analysis;
pub mod challenge;
pub mod cli;
pub mod corpus;
pub mod encoding;
pub mod error;
pub mod jsonl;
pub mod metrics;
pub mod permutation;
pub mod seed;
pub mod synthesis;

pub use corpus::{CorefDoc, Story, SupervisedPair};
pub use error::{Error, Result};
pub use permutation::{kendall_tau, sample_target_order, NarrativeOrder};
pub use synthesis::{Method, Stage, TrainingExample};

// The book's code listings run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/orders.md")]
    mod orders {}
    #[doc = include_str!("../../../book/src/training.md")]
    mod training {}
    #[doc = include_str!("../../../book/src/encoding.md")]
    mod encoding {}
    #[doc = include_str!("../../../book/src/scoring.md")]
    mod scoring {}
    #[doc = include_str!("../../../book/src/analysis.md")]
    mod analysis {}
    #[doc = include_str!("../../../book/src/challenge.md")]
    mod challenge {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
