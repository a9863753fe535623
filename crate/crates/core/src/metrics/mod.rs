//! Tokenization and automatic evaluation metrics.
//!
//! All scores are in `[0, 1]` internally; tables multiply by 100.

pub mod bertscore;
pub mod bleu;
pub mod meteor;
pub mod report;
pub mod tof;
pub mod tokenize;

pub use bertscore::{bertscore, bertscore_multi, BertScore};
pub use bleu::{bleu, corpus_bleu, sentence_bleu};
pub use meteor::{meteor, meteor_detail, MeteorDetail};
pub use report::{score_outputs, ExampleScores, ScoreOptions, ScoreReport};
pub use tof::{tof, TofEmbeddings, TofKind};
pub use tokenize::{detokenize, split_sentences, surface_tokens, tokenize, TokenSeq};
