//! Corpus statistics comparing input stories with their rewritings.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::{PosDoc, Story};
use crate::error::{Error, Result};
use crate::metrics::tokenize::tokenize;

/// How "unique" is read in the unique n-gram ratio.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum UniqueMode {
    /// Distinct n-grams over total n-grams.
    #[default]
    Distinct,
    /// N-grams occurring exactly once over total n-grams.
    Singleton,
}

/// Unique n-gram ratio over the story's whole token stream.
pub fn unique_ngram_ratio(story: &Story, n: usize, mode: UniqueMode) -> Result<f64> {
    let tokens = tokenize(&story.text());
    let tokens = tokens.as_slice();
    if n == 0 || tokens.len() < n {
        return Err(Error::InvalidArgument(format!(
            "{} has {} tokens, fewer than n = {n}",
            story.id,
            tokens.len()
        )));
    }
    let mut counts: HashMap<&[String], usize> = HashMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    let total = tokens.len() - n + 1;
    let unique = match mode {
        UniqueMode::Distinct => counts.len(),
        UniqueMode::Singleton => counts.values().filter(|&&c| c == 1).count(),
    };
    Ok(unique as f64 / total as f64)
}

/// Per-story ratios averaged over the corpus (macro average).
pub fn mean_unique_ngram_ratio(stories: &[Story], n: usize, mode: UniqueMode) -> Result<f64> {
    if stories.is_empty() {
        return Err(Error::Empty("no stories".into()));
    }
    let mut sum = 0.0;
    for s in stories {
        sum += unique_ngram_ratio(s, n, mode)?;
    }
    Ok(sum / stories.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthStats {
    /// Mean of rewriting words / input words.
    pub word_ratio: f64,
    /// Mean of rewriting characters / input characters.
    pub char_ratio: f64,
    pub pairs: usize,
    /// Pairs skipped because the input had no words.
    pub skipped: usize,
}

/// Length of rewritings relative to their inputs, in words and characters.
pub fn length_stats(pairs: &[(Story, Story)]) -> Result<LengthStats> {
    if pairs.is_empty() {
        return Err(Error::Empty("no story pairs".into()));
    }
    let (mut words, mut chars, mut used, mut skipped) = (0.0, 0.0, 0usize, 0usize);
    for (input, rewrite) in pairs {
        let (it, rt) = (input.text(), rewrite.text());
        let input_words = it.split_whitespace().count();
        if input_words == 0 {
            skipped += 1;
            continue;
        }
        words += rt.split_whitespace().count() as f64 / input_words as f64;
        chars += rt.chars().count() as f64 / it.chars().count() as f64;
        used += 1;
    }
    if used == 0 {
        return Err(Error::Empty("every input story was empty".into()));
    }
    Ok(LengthStats {
        word_ratio: words / used as f64,
        char_ratio: chars / used as f64,
        pairs: used,
        skipped,
    })
}

pub const VERB_TAGS: [&str; 6] = ["VB", "VBD", "VBG", "VBN", "VBP", "VBZ"];

/// Share of each verb tag among all verb-tagged tokens.
pub fn verb_form_distribution(docs: &[PosDoc]) -> Result<BTreeMap<String, f64>> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for doc in docs {
        for (_, tag) in doc.tags.iter().flatten() {
            if VERB_TAGS.contains(&tag.as_str()) {
                *counts.entry(tag.clone()).or_insert(0) += 1;
            }
        }
    }
    let total: usize = counts.values().sum();
    if total == 0 {
        return Err(Error::Empty("no verb tags".into()));
    }
    Ok(counts
        .into_iter()
        .map(|(tag, c)| (tag, c as f64 / total as f64))
        .collect())
}

/// Linguistic changes observed between an original sentence and its
/// rewritten counterpart.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeFlags {
    #[serde(default)]
    pub ellipsis: bool,
    #[serde(default)]
    pub tense: bool,
    #[serde(default)]
    pub timex: bool,
    #[serde(default)]
    pub coreference: bool,
}

impl ChangeFlags {
    pub const TYPES: [&'static str; 4] = ["ellipsis", "tense", "timex", "coreference"];

    fn as_array(&self) -> [bool; 4] {
        [self.ellipsis, self.tense, self.timex, self.coreference]
    }
}

/// Hand annotation of one story: one flag set per aligned sentence pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeAnnotation {
    pub id: String,
    pub flags: Vec<ChangeFlags>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypeShare {
    /// Percentage of sentence pairs showing the change.
    pub sent_pct: f64,
    /// Percentage of stories with at least one such pair.
    pub stor_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangeStats {
    pub per_type: BTreeMap<String, TypeShare>,
    /// Percentage of stories exhibiting at least `k` of the four types.
    pub stories_with_at_least: BTreeMap<usize, f64>,
    pub stories: usize,
    pub sentence_pairs: usize,
}

pub fn change_type_stats(annotations: &[ChangeAnnotation]) -> ChangeStats {
    let mut sent_hits = [0usize; 4];
    let mut stor_hits = [0usize; 4];
    let mut at_least = [0usize; 5];
    let mut pairs = 0;
    for ann in annotations {
        let mut present = [false; 4];
        for flags in &ann.flags {
            pairs += 1;
            for (t, on) in flags.as_array().into_iter().enumerate() {
                if on {
                    sent_hits[t] += 1;
                    present[t] = true;
                }
            }
        }
        let kinds = present.iter().filter(|&&p| p).count();
        for (t, &p) in present.iter().enumerate() {
            stor_hits[t] += p as usize;
        }
        for slot in at_least.iter_mut().take(kinds + 1).skip(1) {
            *slot += 1;
        }
    }
    let pct = |num: usize, den: usize| if den == 0 { 0.0 } else { 100.0 * num as f64 / den as f64 };
    let stories = annotations.len();
    ChangeStats {
        per_type: ChangeFlags::TYPES
            .iter()
            .enumerate()
            .map(|(t, name)| {
                (
                    name.to_string(),
                    TypeShare {
                        sent_pct: pct(sent_hits[t], pairs),
                        stor_pct: pct(stor_hits[t], stories),
                    },
                )
            })
            .collect(),
        stories_with_at_least: (1..=4).map(|k| (k, pct(at_least[k], stories))).collect(),
        stories,
        sentence_pairs: pairs,
    }
}
