//! Denoise-style training data: naive reordering, token noising, and the
//! stage-1/stage-2 training pairs built from them.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Story, SupervisedPair};
use crate::error::{Error, Result};
use crate::metrics::tokenize::{detokenize, surface_tokens};
use crate::permutation::NarrativeOrder;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Denoise,
    Reorder,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Denoise => "denoise",
            Method::Reorder => "reorder",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "denoise" => Ok(Method::Denoise),
            "reorder" => Ok(Method::Reorder),
            _ => Err(Error::InvalidArgument(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Stage {
    One,
    Two,
}

impl TryFrom<u8> for Stage {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Stage::One),
            2 => Ok(Stage::Two),
            _ => Err(Error::InvalidArgument(format!("stage must be 1 or 2, got {v}"))),
        }
    }
}

impl From<Stage> for u8 {
    fn from(s: Stage) -> u8 {
        match s {
            Stage::One => 1,
            Stage::Two => 2,
        }
    }
}

/// One (input, output) pair for a seq2seq trainer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingExample {
    pub input: String,
    pub output: String,
    pub method: Method,
    pub stage: Stage,
    pub story_id: String,
}

/// Whether stage-1 denoise examples noise the original story or its naive
/// reordering.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum DenoiseMode {
    #[default]
    Plain,
    Reordered,
}

impl FromStr for DenoiseMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(DenoiseMode::Plain),
            "reordered" => Ok(DenoiseMode::Reordered),
            _ => Err(Error::InvalidArgument(format!("unknown mode {s:?}"))),
        }
    }
}

/// Token corruption settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub delete_frac: f64,
    pub swap_frac: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub const DEFAULT_DELETE_FRAC: f64 = 0.125;
    pub const DEFAULT_SWAP_FRAC: f64 = 0.125;

    pub fn new(delete_frac: f64, swap_frac: f64, seed: u64) -> Result<Self> {
        let valid = delete_frac >= 0.0 && swap_frac >= 0.0 && delete_frac + swap_frac < 1.0;
        if !valid {
            return Err(Error::InvalidArgument(format!(
                "noise fractions must be non-negative with sum below 1 (delete {delete_frac}, swap {swap_frac})"
            )));
        }
        Ok(NoiseSpec {
            delete_frac,
            swap_frac,
            seed,
        })
    }

    pub fn with_seed(seed: u64) -> Self {
        NoiseSpec {
            delete_frac: Self::DEFAULT_DELETE_FRAC,
            swap_frac: Self::DEFAULT_SWAP_FRAC,
            seed,
        }
    }

    pub fn deletions(&self, n_tokens: usize) -> usize {
        round_half_up(self.delete_frac * n_tokens as f64)
    }

    /// Number of disjoint transpositions; twice this many tokens move.
    pub fn swaps(&self, n_tokens: usize) -> usize {
        round_half_up(self.swap_frac * n_tokens as f64) / 2
    }
}

pub(crate) fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

/// What [`noise_detailed`] did to one story.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoiseOutcome {
    pub text: String,
    pub token_count: usize,
    /// Deleted positions in the original token stream, ascending.
    pub deleted: Vec<usize>,
    /// Swapped position pairs in the stream left after deletion.
    pub swapped: Vec<(usize, usize)>,
    /// Set when the story had fewer than two tokens and was returned as is.
    pub skipped: bool,
}

/// Sentences permuted by `order`; the id gains a `-naive` suffix.
pub fn naive_reorder(story: &Story, order: &NarrativeOrder) -> Result<Story> {
    Ok(Story {
        id: format!("{}-naive", story.id),
        sentences: order.apply(&story.sentences)?,
    })
}

pub fn noise(story: &Story, spec: &NoiseSpec) -> String {
    noise_detailed(story, spec).text
}

pub fn noise_detailed(story: &Story, spec: &NoiseSpec) -> NoiseOutcome {
    noise_text(&story.text(), spec, &story.id)
}

/// Corrupts `text` with a generator keyed on `key`.
pub fn noise_text(text: &str, spec: &NoiseSpec, key: &str) -> NoiseOutcome {
    let tokens: Vec<&str> = surface_tokens(text).iter().map(|s| s.text).collect();
    let n = tokens.len();
    if n < 2 {
        return NoiseOutcome {
            text: text.to_string(),
            token_count: n,
            deleted: Vec::new(),
            swapped: Vec::new(),
            skipped: true,
        };
    }
    let mut rng = seed::rng_for(spec.seed, &["noise", key]);

    let n_delete = spec.deletions(n).min(n);
    let mut deleted = index::sample(&mut rng, n, n_delete).into_vec();
    deleted.sort_unstable();
    let mut keep = vec![true; n];
    for &i in &deleted {
        keep[i] = false;
    }
    let mut survivors: Vec<&str> = tokens
        .iter()
        .zip(&keep)
        .filter_map(|(t, &k)| k.then_some(*t))
        .collect();

    let n_swaps = spec.swaps(n).min(survivors.len() / 2);
    let picks = index::sample(&mut rng, survivors.len(), 2 * n_swaps).into_vec();
    let swapped: Vec<(usize, usize)> = picks.chunks_exact(2).map(|p| (p[0], p[1])).collect();
    for &(a, b) in &swapped {
        survivors.swap(a, b);
    }

    NoiseOutcome {
        text: detokenize(&survivors),
        token_count: n,
        deleted,
        swapped,
        skipped: false,
    }
}

fn missing(ids: Vec<String>, what: &str) -> Error {
    Error::MissingSidecar {
        what: what.to_string(),
        ids,
    }
}

/// Stage-1 denoise pairs: noised text in, clean text out.
pub fn build_denoise_stage1(
    stories: &[Story],
    orders: &HashMap<String, NarrativeOrder>,
    spec: &NoiseSpec,
    mode: DenoiseMode,
) -> Result<Vec<TrainingExample>> {
    if mode == DenoiseMode::Reordered {
        let absent: Vec<String> = stories
            .iter()
            .filter(|s| !orders.contains_key(&s.id))
            .map(|s| s.id.clone())
            .collect();
        if !absent.is_empty() {
            return Err(missing(absent, "target order"));
        }
    }
    stories
        .par_iter()
        .map(|story| {
            let clean = match mode {
                DenoiseMode::Plain => story.text(),
                DenoiseMode::Reordered => naive_reorder(story, &orders[&story.id])?.text(),
            };
            let noised = noise_text(&clean, spec, &story.id);
            Ok(TrainingExample {
                input: noised.text,
                output: clean,
                method: Method::Denoise,
                stage: Stage::One,
                story_id: story.id.clone(),
            })
        })
        .collect()
}

/// Stage-2 denoise pairs: naive reordering in, human rewriting out.
pub fn build_denoise_stage2(pairs: &[SupervisedPair]) -> Result<Vec<TrainingExample>> {
    let bare: Vec<String> = pairs
        .iter()
        .filter(|p| p.references.is_empty())
        .map(|p| p.id().to_string())
        .collect();
    if !bare.is_empty() {
        return Err(missing(bare, "reference rewriting"));
    }
    let nested: Vec<Vec<TrainingExample>> = pairs
        .par_iter()
        .map(|pair| {
            let input = naive_reorder(&pair.story, &pair.target_order)?.text();
            pair.references
                .iter()
                .map(|r| {
                    if r.len() != pair.story.len() {
                        return Err(Error::LengthMismatch {
                            expected: pair.story.len(),
                            found: r.len(),
                        });
                    }
                    Ok(TrainingExample {
                        input: input.clone(),
                        output: r.text(),
                        method: Method::Denoise,
                        stage: Stage::Two,
                        story_id: pair.id().to_string(),
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn jimmy() -> Story {
        Story::new(
            "jimmy",
            vec![
                "Jimmy wandered around the city looking for a place for a soda.".into(),
                "Before he knew it, he was in an unfamiliar area.".into(),
                "He was scared of strangers and didn't want to ask anyone.".into(),
                "Soon a policeman came by and asked if he was lost.".into(),
                "He told him that he was lost.".into(),
            ],
        )
        .unwrap()
    }

    fn order(v: &[usize]) -> NarrativeOrder {
        NarrativeOrder::new(v.to_vec()).unwrap()
    }

    #[test]
    fn naive_reorder_of_table_story() {
        let out = naive_reorder(&jimmy(), &order(&[5, 4, 2, 1, 3])).unwrap();
        assert_eq!(out.id, "jimmy-naive");
        assert_eq!(out.sentences[0], "He told him that he was lost.");
        assert_eq!(out.sentences[4], "He was scared of strangers and didn't want to ask anyone.");
        let same = naive_reorder(&jimmy(), &NarrativeOrder::identity(5)).unwrap();
        assert_eq!(same.sentences, jimmy().sentences);
        let o = order(&[5, 4, 2, 1, 3]);
        let back = naive_reorder(&naive_reorder(&jimmy(), &o).unwrap(), &o.inverse()).unwrap();
        assert_eq!(back.sentences, jimmy().sentences);
    }

    #[test]
    fn zero_noise_is_identity() {
        let spec = NoiseSpec::new(0.0, 0.0, 1).unwrap();
        assert_eq!(noise(&jimmy(), &spec), jimmy().text());
    }

    #[test]
    fn counts_for_forty_tokens() {
        let spec = NoiseSpec::with_seed(9);
        assert_eq!(spec.deletions(40), 5);
        assert_eq!(spec.swaps(40), 2);
        let words: Vec<String> = (0..40).map(|i| format!("w{i}")).collect();
        let s = Story::new("forty", vec![words[..20].join(" "), words[20..].join(" ")]).unwrap();
        let out = noise_detailed(&s, &spec);
        assert_eq!(out.token_count, 40);
        assert_eq!(out.deleted.len(), 5);
        assert_eq!(out.swapped.len(), 2);
        assert_eq!(out.text.split_whitespace().count(), 35);
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let spec = NoiseSpec::with_seed(123);
        assert_eq!(noise(&jimmy(), &spec), noise(&jimmy(), &spec));
        assert_ne!(noise(&jimmy(), &spec), noise(&jimmy(), &NoiseSpec::with_seed(124)));
    }

    #[test]
    fn tiny_input_is_flagged_not_noised() {
        let out = noise_text("Hi", &NoiseSpec::with_seed(0), "k");
        assert!(out.skipped);
        assert_eq!(out.text, "Hi");
    }

    #[test]
    fn rejects_bad_fractions() {
        assert!(NoiseSpec::new(0.5, 0.5, 0).is_err());
        assert!(NoiseSpec::new(-0.1, 0.1, 0).is_err());
    }

    #[test]
    fn stage1_plain_and_identity_reordered_agree() {
        let stories = vec![jimmy(), Story::new("b", vec!["One two three.".into(), "Four five six.".into()]).unwrap()];
        let spec = NoiseSpec::with_seed(5);
        let plain = build_denoise_stage1(&stories, &HashMap::new(), &spec, DenoiseMode::Plain).unwrap();
        assert_eq!(plain.len(), 2);
        assert_eq!(plain[0].output, jimmy().text());
        assert_eq!((plain[0].method, plain[0].stage), (Method::Denoise, Stage::One));
        let ids: HashMap<_, _> = stories
            .iter()
            .map(|s| (s.id.clone(), NarrativeOrder::identity(s.len())))
            .collect();
        let reordered = build_denoise_stage1(&stories, &ids, &spec, DenoiseMode::Reordered).unwrap();
        assert_eq!(plain, reordered);
        let err = build_denoise_stage1(&stories, &HashMap::new(), &spec, DenoiseMode::Reordered).unwrap_err();
        assert!(matches!(err, Error::MissingSidecar { ids, .. } if ids.len() == 2));
    }

    #[test]
    fn stage1_reordered_outputs_are_naive_reorderings() {
        let o = order(&[5, 4, 2, 1, 3]);
        let orders = HashMap::from([("jimmy".to_string(), o.clone())]);
        let ex = build_denoise_stage1(&[jimmy()], &orders, &NoiseSpec::with_seed(1), DenoiseMode::Reordered).unwrap();
        assert_eq!(ex[0].output, naive_reorder(&jimmy(), &o).unwrap().text());
    }

    #[test]
    fn stage1_zero_noise_autoencodes() {
        let spec = NoiseSpec::new(0.0, 0.0, 3).unwrap();
        let ex = build_denoise_stage1(&[jimmy()], &HashMap::new(), &spec, DenoiseMode::Plain).unwrap();
        assert_eq!(ex[0].input, ex[0].output);
    }

    #[test]
    fn stage2_one_example_per_reference() {
        let rewrite = Story::new("r", jimmy().sentences.iter().rev().cloned().collect()).unwrap();
        let pair = SupervisedPair::new(jimmy(), order(&[5, 4, 2, 1, 3]), vec![rewrite.clone(), rewrite.clone()]).unwrap();
        let ex = build_denoise_stage2(&[pair]).unwrap();
        assert_eq!(ex.len(), 2);
        assert_eq!(ex[0].input, naive_reorder(&jimmy(), &order(&[5, 4, 2, 1, 3])).unwrap().text());
        assert_eq!(ex[1].output, rewrite.text());
        assert_eq!(ex[0].stage, Stage::Two);

        let id_pair = SupervisedPair::new(jimmy(), NarrativeOrder::identity(5), vec![rewrite]).unwrap();
        assert_eq!(build_denoise_stage2(&[id_pair]).unwrap()[0].input, jimmy().text());

        let bare = SupervisedPair::new(jimmy(), NarrativeOrder::identity(5), vec![]).unwrap();
        assert!(build_denoise_stage2(&[bare]).is_err());
    }

    #[test]
    fn training_example_json_shape() {
        let ex = TrainingExample {
            input: "a".into(),
            output: "b".into(),
            method: Method::Reorder,
            stage: Stage::Two,
            story_id: "x".into(),
        };
        assert_eq!(
            serde_json::to_string(&ex).unwrap(),
            r#"{"input":"a","output":"b","method":"reorder","stage":2,"story_id":"x"}"#
        );
    }

    proptest! {
        #[test]
        fn token_accounting(words in prop::collection::vec("[a-z]{1,6}", 2..80), seed in any::<u64>()) {
            let s = Story::new("p", vec![words[..1].join(" "), words[1..].join(" ")]).unwrap();
            let spec = NoiseSpec::with_seed(seed);
            let out = noise_detailed(&s, &spec);
            let n = words.len();
            prop_assert_eq!(out.token_count, n);
            prop_assert_eq!(out.deleted.len(), round_half_up(0.125 * n as f64));
            prop_assert_eq!(out.text.split_whitespace().count(), n - out.deleted.len());
            let mut moved: Vec<usize> = out.swapped.iter().flat_map(|&(a, b)| [a, b]).collect();
            prop_assert_eq!(moved.len(), 2 * (round_half_up(0.125 * n as f64) / 2));
            moved.sort_unstable();
            moved.dedup();
            prop_assert_eq!(moved.len(), 2 * out.swapped.len());
        }
    }
}
