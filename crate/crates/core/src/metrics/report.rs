//! Scoring model outputs against supervised pairs.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{original_id, prediction_id, EmbeddingStore, Story, SupervisedPair};
use crate::error::{Error, Result};
use crate::jsonl::Prediction;

use super::bertscore::bertscore_multi;
use super::bleu::{bleu, corpus_bleu};
use super::meteor::meteor;
use super::tof::{tof, TofEmbeddings, TofKind};
use super::tokenize::{split_sentences, tokenize, TokenSeq};

pub const BERTSCORE: &str = "bertscore";
pub const BLEU: &str = "bleu";
pub const METEOR: &str = "meteor";
pub const TOF_BERTSCORE: &str = "tof_bertscore";
pub const TOF_METEOR: &str = "tof_meteor";
pub const CORPUS_BLEU: &str = "corpus_bleu";

/// Column order of the summary table.
pub const TABLE_COLUMNS: [(&str, &str); 5] = [
    (BERTSCORE, "BERTScore"),
    (BLEU, "BLEU"),
    (METEOR, "METEOR"),
    (TOF_BERTSCORE, "TOF-BERTScore"),
    (TOF_METEOR, "TOF-METEOR"),
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScoreOptions {
    /// Also report pooled corpus BLEU next to the mean sentence BLEU.
    pub corpus_bleu: bool,
}

/// Scores of one prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleScores {
    pub id: String,
    /// Number of references the reference-based metrics used.
    pub references: usize,
    pub scores: BTreeMap<String, f64>,
    /// Why TOF metrics were not computed, when they were not.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tof_skipped: Option<String>,
}

/// Per-example scores (in prediction order) and their means. Values are in
/// `[0, 1]`; [`ScoreReport::render_table`] multiplies by 100.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub per_example: Vec<ExampleScores>,
    pub aggregate: BTreeMap<String, f64>,
    pub counts: BTreeMap<String, usize>,
}

impl ScoreReport {
    pub fn get(&self, id: &str) -> Option<&BTreeMap<String, f64>> {
        self.per_example.iter().find(|e| e.id == id).map(|e| &e.scores)
    }

    pub fn render_table(&self, label: &str) -> String {
        let mut header = format!("{:<16}", "Method");
        let mut row = format!("{label:<16}");
        for (key, title) in TABLE_COLUMNS {
            header.push_str(&format!(" {title:>14}"));
            match self.aggregate.get(key) {
                Some(v) => row.push_str(&format!(" {:>14.2}", v * 100.0)),
                None => row.push_str(&format!(" {:>14}", "-")),
            }
        }
        format!("{header}\n{row}\n")
    }
}

/// Scores every prediction against its pair's references (BLEU, METEOR and,
/// with `embeddings`, BERTScore) and against the original story under the
/// target order (TOF-METEOR, TOF-BERTScore).
///
/// Embedding ids follow `<story>#pred`, `<story>#ref<k>` and `<story>#orig`,
/// one record per sentence. TOF is skipped for predictions that do not split
/// into the story's sentence count.
pub fn score_outputs(
    predictions: &[Prediction],
    pairs: &[SupervisedPair],
    embeddings: Option<&EmbeddingStore>,
    options: ScoreOptions,
) -> Result<ScoreReport> {
    if predictions.is_empty() {
        return Err(Error::Empty("no predictions to score".into()));
    }
    let by_id: HashMap<&str, &SupervisedPair> = pairs.iter().map(|p| (p.id(), p)).collect();
    let unknown: Vec<String> = predictions
        .iter()
        .filter(|p| !by_id.contains_key(p.id.as_str()))
        .map(|p| p.id.clone())
        .collect();
    if !unknown.is_empty() {
        return Err(Error::MissingSidecar {
            what: "supervised pair".into(),
            ids: unknown,
        });
    }
    let no_refs: Vec<String> = predictions
        .iter()
        .filter(|p| by_id[p.id.as_str()].references.is_empty())
        .map(|p| p.id.clone())
        .collect();
    if !no_refs.is_empty() {
        return Err(Error::MissingSidecar {
            what: "reference rewriting".into(),
            ids: no_refs,
        });
    }
    if let Some(store) = embeddings {
        let mut absent = Vec::new();
        for p in predictions {
            let pair = by_id[p.id.as_str()];
            let mut needed = vec![prediction_id(&p.id), original_id(&p.id)];
            needed.extend(pair.references.iter().map(|r| r.id.clone()));
            absent.extend(needed.into_iter().filter(|id| !store.contains(id)));
        }
        if !absent.is_empty() {
            return Err(Error::MissingSidecar {
                what: "embeddings".into(),
                ids: absent,
            });
        }
    }

    let per_example: Vec<ExampleScores> = predictions
        .par_iter()
        .map(|p| score_one(p, by_id[p.id.as_str()], embeddings))
        .collect::<Result<_>>()?;

    let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for ex in &per_example {
        for (k, v) in &ex.scores {
            let slot = sums.entry(k.clone()).or_insert((0.0, 0));
            slot.0 += v;
            slot.1 += 1;
        }
    }
    let mut aggregate: BTreeMap<String, f64> = sums.iter().map(|(k, (s, c))| (k.clone(), s / *c as f64)).collect();
    let mut counts: BTreeMap<String, usize> = sums.into_iter().map(|(k, (_, c))| (k, c)).collect();
    if options.corpus_bleu {
        let segments: Vec<(TokenSeq, Vec<TokenSeq>)> = predictions
            .iter()
            .map(|p| {
                let pair = by_id[p.id.as_str()];
                (tokenize(&p.output), pair.references.iter().map(|r| tokenize(&r.text())).collect())
            })
            .collect();
        aggregate.insert(CORPUS_BLEU.into(), corpus_bleu(&segments));
        counts.insert(CORPUS_BLEU.into(), segments.len());
    }
    Ok(ScoreReport {
        per_example,
        aggregate,
        counts,
    })
}

fn sentence_rows(store: &EmbeddingStore, id: &str, n: usize) -> Option<Vec<Vec<Vec<f64>>>> {
    (1..=n).map(|k| store.sentence(id, k).map(<[_]>::to_vec)).collect()
}

fn score_one(pred: &Prediction, pair: &SupervisedPair, embeddings: Option<&EmbeddingStore>) -> Result<ExampleScores> {
    let cand = tokenize(&pred.output);
    let refs: Vec<TokenSeq> = pair.references.iter().map(|r| tokenize(&r.text())).collect();
    let mut scores = BTreeMap::new();
    scores.insert(BLEU.to_string(), bleu(&cand, &refs));
    scores.insert(METEOR.to_string(), meteor(&cand, &refs));

    if let Some(store) = embeddings {
        let cand_rows = store.document(&prediction_id(&pred.id)).unwrap_or_default();
        let ref_rows: Vec<Vec<Vec<f64>>> = pair
            .references
            .iter()
            .map(|r| store.document(&r.id).unwrap_or_default())
            .collect();
        scores.insert(BERTSCORE.to_string(), bertscore_multi(&cand_rows, &ref_rows)?.f1);
    }

    let n = pair.story.len();
    let sentences = split_sentences(&pred.output);
    let mut tof_skipped = None;
    if sentences.len() != n {
        tof_skipped = Some(format!("output has {} sentences, story has {n}", sentences.len()));
    } else {
        let output = Story {
            id: pred.id.clone(),
            sentences,
        };
        scores.insert(
            TOF_METEOR.to_string(),
            tof(&pair.story, &output, &pair.target_order, TofKind::Meteor, None)?,
        );
        if let Some(store) = embeddings {
            let pid = prediction_id(&pred.id);
            match (
                sentence_rows(store, &original_id(&pred.id), n),
                sentence_rows(store, &pid, n),
            ) {
                (Some(orig), Some(out)) if store.sentence_count(&pid) == n => {
                    let emb = TofEmbeddings {
                        original: &orig,
                        output: &out,
                    };
                    scores.insert(
                        TOF_BERTSCORE.to_string(),
                        tof(&pair.story, &output, &pair.target_order, TofKind::BertScore, Some(emb))?,
                    );
                }
                _ => {
                    tof_skipped = Some(format!("per-sentence embeddings do not cover {n} sentences"));
                }
            }
        }
    }
    Ok(ExampleScores {
        id: pred.id.clone(),
        references: pair.references.len(),
        scores,
        tof_skipped,
    })
}
