//! BLEU with multi-reference clipping.

use std::collections::HashMap;

use super::tokenize::TokenSeq;

pub const MAX_ORDER: usize = 4;

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// Clipped matches and total candidate n-grams for one order.
fn modified_counts(candidate: &[String], references: &[TokenSeq], n: usize) -> (usize, usize) {
    let cand = ngram_counts(candidate, n);
    let mut max_ref: HashMap<&[String], usize> = HashMap::new();
    for r in references {
        for (gram, c) in ngram_counts(r.as_slice(), n) {
            let slot = max_ref.entry(gram).or_insert(0);
            *slot = (*slot).max(c);
        }
    }
    let matched = cand
        .iter()
        .map(|(gram, &c)| c.min(max_ref.get(gram).copied().unwrap_or(0)))
        .sum();
    (matched, candidate.len().saturating_sub(n - 1))
}

/// Reference length closest to `c`, preferring the shorter on ties.
fn closest_ref_len(c: usize, references: &[TokenSeq]) -> usize {
    references
        .iter()
        .map(TokenSeq::len)
        .min_by_key(|&r| (r.abs_diff(c), r))
        .unwrap_or(0)
}

fn brevity_penalty(c: usize, r: usize) -> f64 {
    if c == 0 {
        0.0
    } else if c > r {
        1.0
    } else {
        (1.0 - r as f64 / c as f64).exp()
    }
}

/// Sentence BLEU over orders `1..=min(4, |candidate|)` with uniform weights.
///
/// With `smooth`, orders two and up use `(matches + 1) / (total + 1)`.
/// An empty candidate or empty reference list scores 0.
pub fn sentence_bleu(candidate: &TokenSeq, references: &[TokenSeq], smooth: bool) -> f64 {
    if candidate.is_empty() || references.is_empty() {
        return 0.0;
    }
    let max_n = MAX_ORDER.min(candidate.len());
    let mut log_sum = 0.0;
    for n in 1..=max_n {
        let (m, t) = modified_counts(candidate.as_slice(), references, n);
        let p = if smooth && n >= 2 {
            (m as f64 + 1.0) / (t as f64 + 1.0)
        } else if m == 0 {
            return 0.0;
        } else {
            m as f64 / t as f64
        };
        log_sum += p.ln();
    }
    let bp = brevity_penalty(candidate.len(), closest_ref_len(candidate.len(), references));
    bp * (log_sum / max_n as f64).exp()
}

/// Smoothed sentence BLEU, the per-example default.
pub fn bleu(candidate: &TokenSeq, references: &[TokenSeq]) -> f64 {
    sentence_bleu(candidate, references, true)
}

/// Corpus BLEU: counts and lengths pooled over all segments, no smoothing.
pub fn corpus_bleu(segments: &[(TokenSeq, Vec<TokenSeq>)]) -> f64 {
    let longest = segments.iter().map(|(c, _)| c.len()).max().unwrap_or(0);
    let max_n = MAX_ORDER.min(longest);
    if max_n == 0 {
        return 0.0;
    }
    let mut matched = [0usize; MAX_ORDER];
    let mut totals = [0usize; MAX_ORDER];
    let (mut c_len, mut r_len) = (0, 0);
    for (cand, refs) in segments {
        if refs.is_empty() {
            continue;
        }
        for n in 1..=max_n {
            let (m, t) = modified_counts(cand.as_slice(), refs, n);
            matched[n - 1] += m;
            totals[n - 1] += t;
        }
        c_len += cand.len();
        r_len += closest_ref_len(cand.len(), refs);
    }
    let mut log_sum = 0.0;
    for n in 0..max_n {
        if matched[n] == 0 {
            return 0.0;
        }
        log_sum += (matched[n] as f64 / totals[n] as f64).ln();
    }
    brevity_penalty(c_len, r_len) * (log_sum / max_n as f64).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::tokenize::tokenize;

    fn t(s: &str) -> TokenSeq {
        s.split_whitespace().collect()
    }

    #[test]
    fn identical_scores_one() {
        let s = tokenize("He told him that he was lost.");
        assert!((bleu(&s, &[s.clone()]) - 1.0).abs() < 1e-12);
        assert!((sentence_bleu(&s, &[s.clone()], false) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_overlap_scores_zero() {
        assert_eq!(bleu(&t("a b c"), &[t("x y z")]), 0.0);
    }

    #[test]
    fn short_candidate_brevity_penalty() {
        let v = sentence_bleu(&t("the cat sat"), &[t("the cat sat down")], false);
        assert!((v - (1.0f64 - 4.0 / 3.0).exp()).abs() < 1e-12);
        assert!((v - 0.7165).abs() < 1e-4);
    }

    #[test]
    fn closest_reference_breaks_ties_short() {
        assert_eq!(closest_ref_len(4, &[t("a b c"), t("a b c d e")]), 3);
        assert_eq!(closest_ref_len(4, &[t("a b c d e f"), t("a b c d e")]), 5);
    }

    #[test]
    fn empty_candidate_is_zero() {
        assert_eq!(bleu(&TokenSeq::default(), &[t("a")]), 0.0);
        assert_eq!(corpus_bleu(&[]), 0.0);
    }

    #[test]
    fn corpus_bleu_of_identical_segments() {
        let segs = vec![(t("a b c d e"), vec![t("a b c d e")]), (t("f g h"), vec![t("f g h")])];
        assert!((corpus_bleu(&segs) - 1.0).abs() < 1e-12);
    }
}
