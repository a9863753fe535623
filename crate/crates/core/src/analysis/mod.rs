//! Corpus statistics and metric correlation analysis.

pub mod correlate;
pub mod stats;

pub use correlate::{correlate, correlation_table, Correlation, CorrelationCell, HumanScores, HUMAN_METRICS};
pub use stats::{
    change_type_stats, length_stats, mean_unique_ngram_ratio, unique_ngram_ratio, verb_form_distribution,
    ChangeAnnotation, ChangeFlags, ChangeStats, LengthStats, TypeShare, UniqueMode,
};
