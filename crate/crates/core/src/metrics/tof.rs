//! Target order fidelity: how well each output sentence matches the original
//! sentence the target order placed there.

use crate::corpus::Story;
use crate::error::{Error, Result};
use crate::permutation::NarrativeOrder;

use super::bertscore::bertscore;
use super::meteor::meteor;
use super::tokenize::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TofKind {
    Meteor,
    BertScore,
}

/// Per-sentence token embeddings of the original and the output.
#[derive(Debug, Clone, Copy)]
pub struct TofEmbeddings<'a> {
    pub original: &'a [Vec<Vec<f64>>],
    pub output: &'a [Vec<Vec<f64>>],
}

/// Mean over target positions `i'` of `metric(output[i'], original[order[i']])`.
pub fn tof(
    original: &Story,
    output: &Story,
    order: &NarrativeOrder,
    kind: TofKind,
    embeddings: Option<TofEmbeddings<'_>>,
) -> Result<f64> {
    let n = order.len();
    for found in [original.len(), output.len()] {
        if found != n {
            return Err(Error::LengthMismatch { expected: n, found });
        }
    }
    match kind {
        TofKind::Meteor => {
            let total: f64 = (1..=n)
                .map(|pos| {
                    let cand = tokenize(&output.sentences[pos - 1]);
                    let reference = tokenize(&original.sentences[order.get(pos) - 1]);
                    meteor(&cand, &[reference])
                })
                .sum();
            Ok(total / n as f64)
        }
        TofKind::BertScore => {
            let emb = embeddings.ok_or_else(|| Error::MissingSidecar {
                what: "embeddings".into(),
                ids: vec![original.id.clone()],
            })?;
            for found in [emb.original.len(), emb.output.len()] {
                if found != n {
                    return Err(Error::LengthMismatch { expected: n, found });
                }
            }
            let mut total = 0.0;
            for pos in 1..=n {
                total += bertscore(&emb.output[pos - 1], &emb.original[order.get(pos) - 1])?.f1;
            }
            Ok(total / n as f64)
        }
    }
}
