//! METEOR with exact and Porter-stem matching stages.
//!
//! Each stage aligns the still-unmatched words that are equal under that
//! stage's key (the word itself, then its stem). Among the alignments with
//! the most matches, the one with the fewest chunks is used; a chunk is a
//! run of matches adjacent in both candidate and reference. The search is
//! exhaustive up to [`ALIGNMENT_SEARCH_LIMIT`] alignments and falls back to
//! pairing repeated words in reading order beyond that.

use std::collections::BTreeMap;

use itertools::Itertools;

use super::tokenize::TokenSeq;

pub const ALPHA: f64 = 0.9;
pub const BETA: f64 = 3.0;
pub const GAMMA: f64 = 0.5;

/// Largest number of candidate alignments searched exhaustively.
pub const ALIGNMENT_SEARCH_LIMIT: u128 = 20_000;

pub fn stem(word: &str) -> String {
    porter_stemmer::stem(word)
}

/// Detailed result against one reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeteorDetail {
    pub matches: usize,
    pub chunks: usize,
    pub precision: f64,
    pub recall: f64,
    pub fmean: f64,
    pub penalty: f64,
    pub score: f64,
}

/// Best score over `references`. Empty candidates and empty reference lists
/// score 0.
pub fn meteor(candidate: &TokenSeq, references: &[TokenSeq]) -> f64 {
    references
        .iter()
        .map(|r| meteor_detail(candidate.as_slice(), r.as_slice()).score)
        .fold(0.0, f64::max)
}

pub fn meteor_detail(candidate: &[String], reference: &[String]) -> MeteorDetail {
    let alignment = align(candidate, reference);
    let m = alignment.len();
    if m == 0 {
        return MeteorDetail {
            matches: 0,
            chunks: 0,
            precision: 0.0,
            recall: 0.0,
            fmean: 0.0,
            penalty: 0.0,
            score: 0.0,
        };
    }
    let chunks = count_chunks(&alignment);
    let precision = m as f64 / candidate.len() as f64;
    let recall = m as f64 / reference.len() as f64;
    let fmean = precision * recall / (ALPHA * precision + (1.0 - ALPHA) * recall);
    let penalty = GAMMA * (chunks as f64 / m as f64).powf(BETA);
    MeteorDetail {
        matches: m,
        chunks,
        precision,
        recall,
        fmean,
        penalty,
        score: fmean * (1.0 - penalty),
    }
}

/// Number of chunks in an alignment of (candidate, reference) positions.
pub fn count_chunks(alignment: &[(usize, usize)]) -> usize {
    let mut pairs = alignment.to_vec();
    pairs.sort_unstable();
    let mut chunks = 0;
    let mut prev: Option<(usize, usize)> = None;
    for (c, r) in pairs {
        match prev {
            Some((pc, pr)) if c == pc + 1 && r == pr + 1 => {}
            _ => chunks += 1,
        }
        prev = Some((c, r));
    }
    chunks
}

/// Positions of unmatched words on each side, grouped by `key`.
fn classes<F: Fn(&str) -> String>(
    candidate: &[String],
    reference: &[String],
    used_c: &[bool],
    used_r: &[bool],
    key: F,
) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut groups: BTreeMap<String, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (i, w) in candidate.iter().enumerate().filter(|(i, _)| !used_c[*i]) {
        groups.entry(key(w)).or_default().0.push(i);
    }
    for (j, w) in reference.iter().enumerate().filter(|(j, _)| !used_r[*j]) {
        if let Some(g) = groups.get_mut(&key(w)) {
            g.1.push(j);
        }
    }
    groups.into_values().filter(|(c, r)| !c.is_empty() && !r.is_empty()).collect()
}

fn falling_factorial(n: usize, k: usize) -> u128 {
    ((n - k + 1)..=n).fold(1u128, |acc, v| acc.saturating_mul(v as u128))
}

fn class_space(class: &(Vec<usize>, Vec<usize>)) -> u128 {
    let (c, r) = class;
    let k = c.len().min(r.len());
    falling_factorial(c.len().max(r.len()), k)
}

/// Every maximal injective pairing within one class.
fn class_options(class: &(Vec<usize>, Vec<usize>)) -> Vec<Vec<(usize, usize)>> {
    let (c, r) = class;
    if c.len() <= r.len() {
        r.iter()
            .copied()
            .permutations(c.len())
            .map(|rs| c.iter().copied().zip(rs).collect())
            .collect()
    } else {
        c.iter()
            .copied()
            .permutations(r.len())
            .map(|cs| cs.into_iter().zip(r.iter().copied()).collect())
            .collect()
    }
}

fn in_order(class: &(Vec<usize>, Vec<usize>)) -> Vec<(usize, usize)> {
    class.0.iter().copied().zip(class.1.iter().copied()).collect()
}

type Key = fn(&str) -> String;

fn exact_key(w: &str) -> String {
    w.to_string()
}

fn stem_key(w: &str) -> String {
    stem(w)
}

const STAGES: [Key; 2] = [exact_key, stem_key];

/// Search space size: per-class option counts multiply, and the number of
/// leftover words per key after a stage does not depend on which options
/// were chosen.
fn space_size(candidate: &[String], reference: &[String]) -> u128 {
    let mut used_c = vec![false; candidate.len()];
    let mut used_r = vec![false; reference.len()];
    let mut total = 1u128;
    for key in STAGES {
        for class in classes(candidate, reference, &used_c, &used_r, key) {
            total = total.saturating_mul(class_space(&class));
            for (c, r) in in_order(&class) {
                used_c[c] = true;
                used_r[r] = true;
            }
        }
    }
    total
}

fn align(candidate: &[String], reference: &[String]) -> Vec<(usize, usize)> {
    let used_c = vec![false; candidate.len()];
    let used_r = vec![false; reference.len()];
    let exhaustive = space_size(candidate, reference) <= ALIGNMENT_SEARCH_LIMIT;
    let mut best: Option<(usize, Vec<(usize, usize)>)> = None;
    search(candidate, reference, 0, used_c, used_r, Vec::new(), exhaustive, &mut best);
    best.map(|(_, a)| a).unwrap_or_default()
}

#[allow(clippy::too_many_arguments)]
fn search(
    candidate: &[String],
    reference: &[String],
    stage: usize,
    used_c: Vec<bool>,
    used_r: Vec<bool>,
    acc: Vec<(usize, usize)>,
    exhaustive: bool,
    best: &mut Option<(usize, Vec<(usize, usize)>)>,
) {
    if stage == STAGES.len() {
        let chunks = count_chunks(&acc);
        if best.as_ref().is_none_or(|(b, _)| chunks < *b) {
            *best = Some((chunks, acc));
        }
        return;
    }
    let stage_classes = classes(candidate, reference, &used_c, &used_r, STAGES[stage]);
    let per_class: Vec<Vec<Vec<(usize, usize)>>> = if exhaustive {
        stage_classes.iter().map(class_options).collect()
    } else {
        stage_classes.iter().map(|c| vec![in_order(c)]).collect()
    };
    let combos: Box<dyn Iterator<Item = Vec<&Vec<(usize, usize)>>>> = if per_class.is_empty() {
        Box::new(std::iter::once(Vec::new()))
    } else {
        Box::new(per_class.iter().map(|opts| opts.iter()).multi_cartesian_product())
    };
    for combo in combos {
        let mut uc = used_c.clone();
        let mut ur = used_r.clone();
        let mut next = acc.clone();
        for &(c, r) in combo.into_iter().flatten() {
            uc[c] = true;
            ur[r] = true;
            next.push((c, r));
        }
        search(candidate, reference, stage + 1, uc, ur, next, exhaustive, best);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> TokenSeq {
        s.split_whitespace().collect()
    }

    fn detail(c: &str, r: &str) -> MeteorDetail {
        meteor_detail(t(c).as_slice(), t(r).as_slice())
    }

    #[test]
    fn identical_five_tokens() {
        let v = meteor(&t("a b c d e"), &[t("a b c d e")]);
        assert!((v - 0.996).abs() < 1e-12);
    }

    #[test]
    fn zero_overlap() {
        assert_eq!(meteor(&t("a b"), &[t("c d")]), 0.0);
        assert_eq!(meteor(&TokenSeq::default(), &[t("c d")]), 0.0);
        assert_eq!(meteor(&t("a"), &[]), 0.0);
    }

    #[test]
    fn stem_stage_matches_inflections() {
        let d = detail("he was running", "he was run");
        assert_eq!(d.matches, 3);
        assert_eq!(d.chunks, 1);
        assert_eq!(detail("running", "runs").matches, 1);
    }

    #[test]
    fn porter_reference_vectors() {
        for (word, expected) in [
            ("caresses", "caress"),
            ("ponies", "poni"),
            ("running", "run"),
            ("relational", "relat"),
            ("hopping", "hop"),
            ("agreed", "agre"),
            ("happy", "happi"),
            ("generalization", "gener"),
        ] {
            assert_eq!(stem(word), expected, "{word}");
        }
    }

    #[test]
    fn repeated_words_choose_fewest_chunks() {
        // In-order pairing of the two "a"s gives 3 chunks; crossing gives 2.
        let d = detail("a b a", "a a b");
        assert_eq!(d.matches, 3);
        assert_eq!(d.chunks, 2);
    }

    #[test]
    fn exact_stage_precedes_stem_stage() {
        let d = detail("run run", "run running");
        assert_eq!(d.matches, 2);
        assert_eq!(d.chunks, 1);
    }

    #[test]
    fn best_reference_wins() {
        let v = meteor(&t("a b c"), &[t("x y z"), t("a b c")]);
        assert!((v - (1.0 - 0.5 / 27.0)).abs() < 1e-12);
    }

    #[test]
    fn large_inputs_fall_back_without_blowing_up() {
        let c: TokenSeq = std::iter::repeat_n("the", 30).collect();
        let r: TokenSeq = std::iter::repeat_n("the", 30).collect();
        let d = meteor_detail(c.as_slice(), r.as_slice());
        assert_eq!(d.matches, 30);
        assert_eq!(d.chunks, 1);
    }
}
