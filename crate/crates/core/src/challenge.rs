//! Sentence-ordering control and challenge sets.
//!
//! The control set shuffles original stories; the challenge set shuffles
//! their narrative-reordered rewritings. An ordering model that relies on
//! surface chronology cues should do noticeably worse on the latter.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::corpus::{Story, SupervisedPair};
use crate::error::{Error, Result};
use crate::permutation::{kendall_tau, NarrativeOrder};
use crate::seed;

/// A shuffled story. `gold_order[k]` is the position in the true narrative
/// of shuffled sentence `k` (both 1-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingInstance {
    pub id: String,
    #[serde(rename = "shuffled")]
    pub shuffled_sentences: Vec<String>,
    pub gold_order: NarrativeOrder,
}

impl OrderingInstance {
    /// Sentences put back in narrative order.
    pub fn unshuffled(&self) -> Result<Vec<String>> {
        self.gold_order.inverse().apply(&self.shuffled_sentences)
    }
}

/// Shuffles `story` with a generator keyed on `seed` and the story id.
/// The identity shuffle is redrawn.
pub fn make_ordering_instance(story: &Story, seed: u64) -> Result<OrderingInstance> {
    let n = story.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("{} has fewer than 2 sentences", story.id)));
    }
    let mut rng = seed::rng_for(seed, &["shuffle", &story.id]);
    let mut gold: Vec<usize> = (1..=n).collect();
    while gold.iter().enumerate().all(|(i, &v)| v == i + 1) {
        gold.shuffle(&mut rng);
    }
    let gold_order = NarrativeOrder::new(gold)?;
    Ok(OrderingInstance {
        id: story.id.clone(),
        shuffled_sentences: gold_order.apply(&story.sentences)?,
        gold_order,
    })
}

/// Where the challenge set's reordered stories come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChallengeSource {
    /// The `k`-th (1-based) human rewriting of each pair.
    Reference(usize),
}

/// Aligned control and challenge instances for the given pairs. `rewritten`
/// overrides the challenge stories (for example model outputs) by id.
pub fn build_challenge_sets(
    pairs: &[SupervisedPair],
    source: ChallengeSource,
    rewritten: Option<&BTreeMap<String, Story>>,
    seed: u64,
) -> Result<(Vec<OrderingInstance>, Vec<OrderingInstance>)> {
    let mut control = Vec::with_capacity(pairs.len());
    let mut challenge = Vec::with_capacity(pairs.len());
    for pair in pairs {
        control.push(make_ordering_instance(&pair.story, seed)?);
        let reordered = match rewritten {
            Some(map) => map.get(pair.id()).cloned().ok_or_else(|| Error::MissingSidecar {
                what: "rewritten story".into(),
                ids: vec![pair.id().to_string()],
            })?,
            None => {
                let ChallengeSource::Reference(k) = source;
                let r = pair.references.get(k.wrapping_sub(1)).ok_or_else(|| Error::MissingSidecar {
                    what: format!("reference {k}"),
                    ids: vec![pair.id().to_string()],
                })?;
                Story {
                    id: pair.id().to_string(),
                    sentences: r.sentences.clone(),
                }
            }
        };
        let reordered = Story {
            id: pair.id().to_string(),
            ..reordered
        };
        challenge.push(make_ordering_instance(&reordered, seed)?);
    }
    Ok((control, challenge))
}

/// Ordering quality of one prediction. The first three are percentages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderingScores {
    pub sent_acc: f64,
    pub rouge_s: f64,
    pub lcs: f64,
    pub tau: f64,
}

/// Shuffled-sentence indices listed in the narrative order implied by
/// `positions`.
fn narrative_sequence(positions: &NarrativeOrder) -> Vec<usize> {
    positions.inverse().as_slice().to_vec()
}

fn lcs_len(a: &[usize], b: &[usize]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    for &x in a {
        let mut cur = vec![0usize; b.len() + 1];
        for (j, &y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { prev[j + 1].max(cur[j]) };
        }
        prev = cur;
    }
    prev[b.len()]
}

pub fn score_ordering(pred: &NarrativeOrder, gold: &NarrativeOrder) -> Result<OrderingScores> {
    if pred.len() != gold.len() {
        return Err(Error::LengthMismatch {
            expected: gold.len(),
            found: pred.len(),
        });
    }
    let n = gold.len();
    let correct = pred.as_slice().iter().zip(gold.as_slice()).filter(|(a, b)| a == b).count();

    let (ps, gs) = (narrative_sequence(pred), narrative_sequence(gold));
    let mut pred_pos = vec![0usize; n + 1];
    for (i, &s) in ps.iter().enumerate() {
        pred_pos[s] = i;
    }
    let mut shared = 0;
    for i in 0..n {
        for j in i + 1..n {
            if pred_pos[gs[i]] < pred_pos[gs[j]] {
                shared += 1;
            }
        }
    }
    let pairs = n * (n - 1) / 2;
    Ok(OrderingScores {
        sent_acc: 100.0 * correct as f64 / n as f64,
        rouge_s: if pairs == 0 { 100.0 } else { 100.0 * shared as f64 / pairs as f64 },
        lcs: 100.0 * lcs_len(&ps, &gs) as f64 / n as f64,
        tau: kendall_tau(pred, gold)?,
    })
}

/// Scores predictions against instances by id.
pub fn score_predictions(
    instances: &[OrderingInstance],
    predictions: &[crate::jsonl::OrderingPrediction],
) -> Result<Vec<(String, OrderingScores)>> {
    let by_id: BTreeMap<&str, &NarrativeOrder> =
        predictions.iter().map(|p| (p.id.as_str(), &p.pred_order)).collect();
    let missing: Vec<String> = instances
        .iter()
        .filter(|i| !by_id.contains_key(i.id.as_str()))
        .map(|i| i.id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingSidecar {
            what: "ordering prediction".into(),
            ids: missing,
        });
    }
    instances
        .iter()
        .map(|inst| Ok((inst.id.clone(), score_ordering(by_id[inst.id.as_str()], &inst.gold_order)?)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderingSummary {
    pub count: usize,
    #[serde(flatten)]
    pub mean: OrderingScores,
}

/// Per-label means of ordering scores. Labels without reports are absent.
pub fn aggregate_ordering(reports: &[(String, OrderingScores)]) -> BTreeMap<String, OrderingSummary> {
    let mut sums: BTreeMap<String, (usize, [f64; 4])> = BTreeMap::new();
    for (label, s) in reports {
        let slot = sums.entry(label.clone()).or_insert((0, [0.0; 4]));
        slot.0 += 1;
        for (acc, v) in slot.1.iter_mut().zip([s.sent_acc, s.rouge_s, s.lcs, s.tau]) {
            *acc += v;
        }
    }
    sums.into_iter()
        .map(|(label, (count, t))| {
            let c = count as f64;
            (
                label,
                OrderingSummary {
                    count,
                    mean: OrderingScores {
                        sent_acc: t[0] / c,
                        rouge_s: t[1] / c,
                        lcs: t[2] / c,
                        tau: t[3] / c,
                    },
                },
            )
        })
        .collect()
}

pub fn render_ordering_table(summary: &BTreeMap<String, OrderingSummary>) -> String {
    let mut out = format!("{:<12} {:>8} {:>8} {:>8} {:>10}\n", "TestSet", "SentAcc", "Rouge-S", "LCS", "Kendall τ");
    for (label, s) in summary {
        out.push_str(&format!(
            "{label:<12} {:>8.2} {:>8.2} {:>8.2} {:>10.4}\n",
            s.mean.sent_acc, s.mean.rouge_s, s.mean.lcs, s.mean.tau
        ));
    }
    out
}
