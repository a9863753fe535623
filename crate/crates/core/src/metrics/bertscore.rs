//! Greedy-matching BERTScore over precomputed token embeddings.
//!
//! No idf weighting and no baseline rescaling.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BertScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn normalized(rows: &[Vec<f64>], dim: usize, side: &str) -> Result<Vec<Vec<f64>>> {
    if rows.is_empty() {
        return Err(Error::Metric(format!("{side} has no token vectors")));
    }
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            if row.len() != dim {
                return Err(Error::Metric(format!(
                    "{side} row {i} has dimension {}, expected {dim}",
                    row.len()
                )));
            }
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(Error::Metric(format!("{side} row {i} has zero norm")));
            }
            Ok(row.iter().map(|v| v / norm).collect())
        })
        .collect()
}

pub fn bertscore(candidate: &[Vec<f64>], reference: &[Vec<f64>]) -> Result<BertScore> {
    let dim = candidate.first().map_or(0, Vec::len);
    let cand = normalized(candidate, dim, "candidate")?;
    let refs = normalized(reference, dim, "reference")?;
    let sim: Vec<Vec<f64>> = cand
        .iter()
        .map(|c| refs.iter().map(|r| c.iter().zip(r).map(|(a, b)| a * b).sum()).collect())
        .collect();
    let precision = sim
        .iter()
        .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .sum::<f64>()
        / cand.len() as f64;
    let recall = (0..refs.len())
        .map(|j| sim.iter().map(|row| row[j]).fold(f64::NEG_INFINITY, f64::max))
        .sum::<f64>()
        / refs.len() as f64;
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(BertScore { precision, recall, f1 })
}

/// Score against several references, keeping the one with the highest F1.
pub fn bertscore_multi(candidate: &[Vec<f64>], references: &[Vec<Vec<f64>>]) -> Result<BertScore> {
    let mut best: Option<BertScore> = None;
    for r in references {
        let s = bertscore(candidate, r)?;
        if best.is_none_or(|b| s.f1 > b.f1) {
            best = Some(s);
        }
    }
    best.ok_or_else(|| Error::Metric("no references".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_matrices() {
        let m = vec![vec![1.0, 2.0, 0.5], vec![-1.0, 0.0, 3.0]];
        let s = bertscore(&m, &m).unwrap();
        for v in [s.precision, s.recall, s.f1] {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn orthogonal_vectors() {
        let s = bertscore(&[vec![1.0, 0.0]], &[vec![0.0, 1.0]]).unwrap();
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn hand_computed_case() {
        // Reference tokens have best cosines 1.0 and 0.5 to the candidate.
        let cand = vec![vec![1.0, 0.0]];
        let reference = vec![vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]];
        let s = bertscore(&cand, &reference).unwrap();
        assert!((s.recall - 0.75).abs() < 1e-12);
        assert!((s.precision - 1.0).abs() < 1e-12);
        assert!((s.f1 - 6.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(bertscore(&[vec![1.0]], &[vec![1.0, 0.0]]).is_err());
        assert!(bertscore(&[vec![0.0, 0.0]], &[vec![1.0, 0.0]]).is_err());
        assert!(bertscore(&[], &[vec![1.0]]).is_err());
    }

    #[test]
    fn multi_reference_takes_best_f1() {
        let cand = vec![vec![1.0, 0.0]];
        let s = bertscore_multi(&cand, &[vec![vec![0.0, 1.0]], vec![vec![1.0, 0.0]]]).unwrap();
        assert!((s.f1 - 1.0).abs() < 1e-12);
    }
}
