//! Tagged input encoding for reorder-style training.
//!
//! An encoded input lists the story's sentences in original order, each
//! prefixed with a letter tag (`<a>`, `<b>`, ...). Every coreference chain
//! gets a tag `<Xk>` that replaces its mentions. After `<sep>` come the
//! target order as letter tags and then each chain tag followed by its head
//! mention. `<st>` terminates the input.
//!
//! ```text
//! <a> I saw <X1>. <b> <X1> waved. <sep> <b> <a> <X1> The artist <st>
//! ```

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{CorefDoc, Story, SupervisedPair};
use crate::error::{Error, Result};
use crate::metrics::tokenize::surface_tokens;
use crate::permutation::NarrativeOrder;
use crate::seed;
use crate::synthesis::{naive_reorder, Method, Stage, TrainingExample};

pub const SEP: &str = "<sep>";
pub const END: &str = "<st>";
pub const MAX_SENTENCES: usize = 26;

pub fn sentence_tag(index: usize) -> String {
    format!("<{}>", (b'a' + index as u8) as char)
}

pub fn coref_tag(k: usize) -> String {
    format!("<X{k}>")
}

/// The tagged text plus what is needed to interpret it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedInput {
    pub text: String,
    /// Coreference tag → head mention.
    pub tag_map: BTreeMap<String, String>,
    pub order_used: NarrativeOrder,
}

/// Tags for each chain of `doc` (index-aligned with `doc.chains`), numbered
/// by each chain's earliest mention.
pub fn assign_coref_tags(doc: &CorefDoc) -> Result<Vec<String>> {
    let mut owner: HashMap<(usize, usize, usize), usize> = HashMap::new();
    for (c, chain) in doc.chains.iter().enumerate() {
        for m in &chain.mentions {
            if let Some(&other) = owner.get(&(m.sent, m.start, m.end)) {
                if other != c {
                    return Err(Error::Coref {
                        id: doc.story_id.clone(),
                        reason: format!(
                            "span {}..{} of sentence {} belongs to chains {} and {}",
                            m.start,
                            m.end,
                            m.sent,
                            other + 1,
                            c + 1
                        ),
                    });
                }
            }
            owner.insert((m.sent, m.start, m.end), c);
        }
    }
    let mut by_first: Vec<(usize, (usize, usize, usize))> = doc
        .chains
        .iter()
        .enumerate()
        .map(|(c, chain)| {
            let first = chain.earliest().map_or((usize::MAX, 0, 0), |m| (m.sent, m.start, m.end));
            (c, first)
        })
        .collect();
    by_first.sort_by_key(|&(c, first)| (first, c));
    let mut tags = vec![String::new(); doc.chains.len()];
    for (rank, (c, _)) in by_first.into_iter().enumerate() {
        tags[c] = coref_tag(rank + 1);
    }
    Ok(tags)
}

struct TaggedSpan {
    start: usize,
    end: usize,
    tag: String,
}

/// Replaces mention token spans of one sentence with their tags. Overlapping
/// mentions collapse into one region listing every tag, inner spans first.
fn tag_sentence(sentence: &str, mut spans: Vec<TaggedSpan>) -> String {
    if spans.is_empty() {
        return sentence.to_string();
    }
    let tokens = surface_tokens(sentence);
    spans.sort_by_key(|s| (s.start, s.end));
    let mut regions: Vec<(usize, usize, Vec<String>)> = Vec::new();
    for span in spans {
        match regions.last_mut() {
            Some((_, end, tags)) if span.start < *end => {
                *end = (*end).max(span.end);
                tags.push(span.tag);
            }
            _ => regions.push((span.start, span.end, vec![span.tag])),
        }
    }
    let mut out = String::with_capacity(sentence.len());
    let mut cursor = 0;
    for (start, end, tags) in regions {
        let lo = tokens[start].start();
        let hi = tokens[end - 1].end();
        out.push_str(&sentence[cursor..lo]);
        out.push_str(&tags.join(" "));
        cursor = hi;
    }
    out.push_str(&sentence[cursor..]);
    out
}

/// Encodes `story` with target `order` and its coreference chains.
pub fn encode_input(story: &Story, order: &NarrativeOrder, doc: &CorefDoc) -> Result<EncodedInput> {
    if story.len() > MAX_SENTENCES {
        return Err(Error::Encoding(format!(
            "{} has {} sentences; letter tags cover at most {MAX_SENTENCES}",
            story.id,
            story.len()
        )));
    }
    if order.len() != story.len() {
        return Err(Error::LengthMismatch {
            expected: story.len(),
            found: order.len(),
        });
    }
    doc.validate(story)?;
    let tags = assign_coref_tags(doc)?;

    let mut per_sentence: Vec<Vec<TaggedSpan>> = (0..story.len()).map(|_| Vec::new()).collect();
    for (chain, tag) in doc.chains.iter().zip(&tags) {
        for m in &chain.mentions {
            per_sentence[m.sent - 1].push(TaggedSpan {
                start: m.start,
                end: m.end,
                tag: tag.clone(),
            });
        }
    }

    let mut parts: Vec<String> = Vec::new();
    for (i, (sentence, spans)) in story.sentences.iter().zip(per_sentence).enumerate() {
        parts.push(sentence_tag(i));
        parts.push(tag_sentence(sentence, spans));
    }
    parts.push(SEP.to_string());
    parts.extend(order.zero_based().map(sentence_tag));

    let mut declared: Vec<(usize, &str)> = tags
        .iter()
        .zip(&doc.chains)
        .map(|(tag, chain)| (tag_number(tag), chain.head()))
        .collect();
    declared.sort_by_key(|&(k, _)| k);
    let mut tag_map = BTreeMap::new();
    for (k, head) in declared {
        parts.push(coref_tag(k));
        parts.push(head.to_string());
        tag_map.insert(coref_tag(k), head.to_string());
    }
    parts.push(END.to_string());

    Ok(EncodedInput {
        text: parts.join(" "),
        tag_map,
        order_used: order.clone(),
    })
}

fn tag_number(tag: &str) -> usize {
    tag.trim_start_matches("<X").trim_end_matches('>').parse().unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Piece<'a> {
    Text(&'a str),
    Letter(usize),
    Coref(&'a str),
    Sep,
    End,
    OtherTag(&'a str),
}

/// Splits `text` into tags and the text between them.
fn pieces(text: &str) -> Vec<Piece<'_>> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find('<') {
        let after = &rest[open + 1..];
        let Some(close) = after.find('>') else { break };
        let body = &after[..close];
        let tag = &rest[open..open + close + 2];
        let piece = if body == "sep" {
            Some(Piece::Sep)
        } else if body == "st" {
            Some(Piece::End)
        } else if body.len() == 1 && body.as_bytes()[0].is_ascii_lowercase() {
            Some(Piece::Letter((body.as_bytes()[0] - b'a') as usize))
        } else if body.len() > 1 && body.starts_with('X') && body[1..].bytes().all(|b| b.is_ascii_digit()) {
            Some(Piece::Coref(tag))
        } else if !body.is_empty() && body.chars().all(|c| c.is_alphanumeric() || c == '_') {
            Some(Piece::OtherTag(tag))
        } else {
            None
        };
        match piece {
            Some(p) => {
                if open > 0 {
                    out.push(Piece::Text(&rest[..open]));
                }
                out.push(p);
                rest = &rest[open + close + 2..];
            }
            None => {
                out.push(Piece::Text(&rest[..open + 1]));
                rest = &rest[open + 1..];
            }
        }
    }
    if !rest.is_empty() {
        out.push(Piece::Text(rest));
    }
    out
}

fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Substitutes head mentions for coreference tags and strips structural
/// tags. Anything from `<sep>` on is input metadata and is dropped.
pub fn decode_tags(text: &str, tag_map: &BTreeMap<String, String>) -> Result<String> {
    let mut out = String::with_capacity(text.len());
    let mut unknown = Vec::new();
    for piece in pieces(text) {
        match piece {
            Piece::Sep => break,
            Piece::Text(t) => out.push_str(t),
            Piece::Coref(tag) => match tag_map.get(tag) {
                Some(head) => out.push_str(head),
                None => unknown.push(tag.to_string()),
            },
            Piece::OtherTag(tag) => out.push_str(tag),
            Piece::Letter(_) | Piece::End => out.push(' '),
        }
    }
    if !unknown.is_empty() {
        unknown.sort();
        unknown.dedup();
        return Err(Error::Encoding(format!("unknown coreference tags {unknown:?}")));
    }
    Ok(normalize_ws(&out))
}

/// The components of an encoded input, recovered from its text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedInput {
    /// Sentence bodies in letter order, coreference tags still in place.
    pub sentences: Vec<String>,
    pub order: NarrativeOrder,
    pub tag_map: BTreeMap<String, String>,
}

/// Parses and structurally checks an encoded input: letter tags in sequence
/// before one `<sep>`, a permutation of them after it, every coreference tag
/// declared, and a single trailing `<st>`.
pub fn parse_encoded(text: &str) -> Result<ParsedInput> {
    let bad = |m: String| Error::Encoding(m);
    let pieces = pieces(text);
    let sep_at = pieces
        .iter()
        .position(|p| *p == Piece::Sep)
        .ok_or_else(|| bad("missing <sep>".into()))?;
    let (body, tail) = (&pieces[..sep_at], &pieces[sep_at + 1..]);
    if tail.contains(&Piece::Sep) {
        return Err(bad("more than one <sep>".into()));
    }

    let mut sentences: Vec<String> = Vec::new();
    let mut used = HashSet::new();
    for piece in body {
        match piece {
            Piece::Letter(k) => {
                if *k != sentences.len() {
                    return Err(bad(format!("sentence tag {} out of sequence", sentence_tag(*k))));
                }
                sentences.push(String::new());
            }
            Piece::Text(t) if t.trim().is_empty() && sentences.is_empty() => {}
            other => {
                let current = sentences
                    .last_mut()
                    .ok_or_else(|| bad("text before the first sentence tag".into()))?;
                match other {
                    Piece::Text(t) => current.push_str(t),
                    Piece::Coref(tag) | Piece::OtherTag(tag) => {
                        if matches!(other, Piece::Coref(_)) {
                            used.insert(tag.to_string());
                        }
                        current.push_str(tag);
                    }
                    Piece::End => return Err(bad("<st> before <sep>".into())),
                    _ => unreachable!(),
                }
            }
        }
    }
    let sentences: Vec<String> = sentences.iter().map(|s| normalize_ws(s)).collect();
    let n = sentences.len();

    let mut order = Vec::new();
    let mut iter = tail.iter().peekable();
    while matches!(iter.peek(), Some(Piece::Text(t)) if t.trim().is_empty()) {
        iter.next();
    }
    while let Some(Piece::Letter(k)) = iter.peek() {
        order.push(k + 1);
        iter.next();
        while matches!(iter.peek(), Some(Piece::Text(t)) if t.trim().is_empty()) {
            iter.next();
        }
    }
    if order.len() != n {
        return Err(bad(format!("{} order tags for {n} sentences", order.len())));
    }
    let order = NarrativeOrder::new(order)?;

    let mut tag_map = BTreeMap::new();
    let mut current: Option<(String, String)> = None;
    let mut ended = false;
    for piece in iter {
        if ended {
            if !matches!(piece, Piece::Text(t) if t.trim().is_empty()) {
                return Err(bad("content after <st>".into()));
            }
            continue;
        }
        match piece {
            Piece::Coref(tag) => {
                if let Some((t, h)) = current.take() {
                    tag_map.insert(t, normalize_ws(&h));
                }
                current = Some((tag.to_string(), String::new()));
            }
            Piece::Text(t) => match current.as_mut() {
                Some((_, head)) => head.push_str(t),
                None if t.trim().is_empty() => {}
                None => return Err(bad(format!("undeclared text {t:?} after order"))),
            },
            Piece::End => {
                if let Some((t, h)) = current.take() {
                    tag_map.insert(t, normalize_ws(&h));
                }
                ended = true;
            }
            other => return Err(bad(format!("unexpected {other:?} in tag list"))),
        }
    }
    if !ended {
        return Err(bad("missing terminal <st>".into()));
    }
    let mut undeclared: Vec<_> = used.into_iter().filter(|t| !tag_map.contains_key(t)).collect();
    if !undeclared.is_empty() {
        undeclared.sort();
        return Err(bad(format!("coreference tags used but not declared: {undeclared:?}")));
    }
    Ok(ParsedInput {
        sentences,
        order,
        tag_map,
    })
}

/// Whether the stage-1 reorder example for `story_id` uses the inverse
/// formulation (otherwise it autoencodes).
pub fn stage1_uses_inverse(seed: u64, story_id: &str) -> bool {
    seed::rng_for(seed, &["reorder-coin", story_id]).gen_bool(0.5)
}

fn coref_for<'a>(corefs: &'a HashMap<String, CorefDoc>, id: &str) -> Result<&'a CorefDoc> {
    corefs.get(id).ok_or_else(|| Error::MissingSidecar {
        what: "coreference annotation".into(),
        ids: vec![id.to_string()],
    })
}

fn check_sidecars(ids: impl Iterator<Item = String>, corefs: &HashMap<String, CorefDoc>) -> Result<()> {
    let absent: Vec<String> = ids.filter(|id| !corefs.contains_key(id)).collect();
    if absent.is_empty() {
        Ok(())
    } else {
        Err(Error::MissingSidecar {
            what: "coreference annotation".into(),
            ids: absent,
        })
    }
}

/// Stage-1 reorder pairs. A seeded fair coin per story picks between the
/// inverse task (naive reordering with the inverse order in, original out)
/// and autoencoding (original with the identity order in, original out).
pub fn build_reorder_stage1(
    stories: &[Story],
    orders: &HashMap<String, NarrativeOrder>,
    corefs: &HashMap<String, CorefDoc>,
    seed: u64,
) -> Result<Vec<TrainingExample>> {
    let no_order: Vec<String> = stories
        .iter()
        .filter(|s| !orders.contains_key(&s.id))
        .map(|s| s.id.clone())
        .collect();
    if !no_order.is_empty() {
        return Err(Error::MissingSidecar {
            what: "target order".into(),
            ids: no_order,
        });
    }
    check_sidecars(stories.iter().map(|s| s.id.clone()), corefs)?;
    stories
        .par_iter()
        .map(|story| {
            let doc = coref_for(corefs, &story.id)?;
            let order = &orders[&story.id];
            let encoded = if stage1_uses_inverse(seed, &story.id) {
                let naive = naive_reorder(story, order)?;
                encode_input(&naive, &order.inverse(), &doc.reindex(order))?
            } else {
                encode_input(story, &NarrativeOrder::identity(story.len()), doc)?
            };
            Ok(TrainingExample {
                input: encoded.text,
                output: story.text(),
                method: Method::Reorder,
                stage: Stage::One,
                story_id: story.id.clone(),
            })
        })
        .collect()
}

/// Stage-2 reorder pairs: original story with its target order in, each
/// human rewriting out.
pub fn build_reorder_stage2(pairs: &[SupervisedPair], corefs: &HashMap<String, CorefDoc>) -> Result<Vec<TrainingExample>> {
    check_sidecars(pairs.iter().map(|p| p.id().to_string()), corefs)?;
    let bare: Vec<String> = pairs
        .iter()
        .filter(|p| p.references.is_empty())
        .map(|p| p.id().to_string())
        .collect();
    if !bare.is_empty() {
        return Err(Error::MissingSidecar {
            what: "reference rewriting".into(),
            ids: bare,
        });
    }
    let nested: Vec<Vec<TrainingExample>> = pairs
        .par_iter()
        .map(|pair| {
            let doc = coref_for(corefs, pair.id())?;
            let encoded = encode_input(&pair.story, &pair.target_order, doc)?;
            Ok(pair
                .references
                .iter()
                .map(|r| TrainingExample {
                    input: encoded.text.clone(),
                    output: r.text(),
                    method: Method::Reorder,
                    stage: Stage::Two,
                    story_id: pair.id().to_string(),
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Chain, Mention};

    fn mention(sent: usize, start: usize, end: usize, text: &str) -> Mention {
        Mention {
            sent,
            start,
            end,
            text: text.into(),
        }
    }

    fn story(sents: &[&str]) -> Story {
        Story::new("t", sents.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    #[test]
    fn tags_follow_first_mention() {
        let doc = CorefDoc {
            story_id: "t".into(),
            chains: vec![
                Chain { head: String::new(), mentions: vec![mention(2, 0, 1, "B")] },
                Chain { head: String::new(), mentions: vec![mention(1, 3, 4, "A")] },
                Chain { head: String::new(), mentions: vec![mention(1, 1, 2, "C")] },
            ],
        };
        assert_eq!(assign_coref_tags(&doc).unwrap(), ["<X3>", "<X2>", "<X1>"]);
        assert!(assign_coref_tags(&CorefDoc::empty("t")).unwrap().is_empty());
    }

    #[test]
    fn shared_span_across_chains_is_rejected() {
        let doc = CorefDoc {
            story_id: "t".into(),
            chains: vec![
                Chain { head: String::new(), mentions: vec![mention(1, 0, 1, "A")] },
                Chain { head: String::new(), mentions: vec![mention(1, 0, 1, "A")] },
            ],
        };
        assert!(assign_coref_tags(&doc).is_err());
    }

    #[test]
    fn no_chains_identity_order() {
        let s = story(&["One.", "Two.", "Three."]);
        let enc = encode_input(&s, &NarrativeOrder::identity(3), &CorefDoc::empty("t")).unwrap();
        assert_eq!(enc.text, "<a> One. <b> Two. <c> Three. <sep> <a> <b> <c> <st>");
        assert!(enc.tag_map.is_empty());
        assert_eq!(decode_tags(&enc.text, &enc.tag_map).unwrap(), s.text());
    }

    #[test]
    fn decode_substitutes_heads() {
        let map = BTreeMap::from([("<X1>".to_string(), "The music artist".to_string())]);
        assert_eq!(decode_tags("<X1> began to sing.", &map).unwrap(), "The music artist began to sing.");
        let err = decode_tags("<X9> left.", &map).unwrap_err();
        assert!(err.to_string().contains("<X9>"));
    }

    #[test]
    fn too_many_sentences() {
        let sents: Vec<String> = (0..27).map(|i| format!("S{i}.")).collect();
        let s = Story::new("long", sents).unwrap();
        let err = encode_input(&s, &NarrativeOrder::identity(27), &CorefDoc::empty("long")).unwrap_err();
        assert!(matches!(err, Error::Encoding(_)));
    }

    #[test]
    fn parse_rejects_malformed_inputs() {
        assert!(parse_encoded("<a> x <b> y <sep> <b> <a> <st>").is_ok());
        assert!(parse_encoded("<a> x <b> y <sep> <b> <a>").is_err());
        assert!(parse_encoded("<a> x <b> y <sep> <b> <st>").is_err());
        assert!(parse_encoded("<b> x <a> y <sep> <b> <a> <st>").is_err());
        assert!(parse_encoded("<a> <X1> <b> y <sep> <b> <a> <st>").is_err());
        assert!(parse_encoded("<a> x <b> y <b> <a> <st>").is_err());
    }

    #[test]
    fn stage1_identity_branches_agree() {
        let s = story(&["Ann ran.", "Ann fell."]);
        let doc = CorefDoc {
            story_id: "t".into(),
            chains: vec![Chain {
                head: "Ann".into(),
                mentions: vec![mention(1, 0, 1, "Ann"), mention(2, 0, 1, "Ann")],
            }],
        };
        let id = NarrativeOrder::identity(2);
        let inverse = encode_input(&naive_reorder(&s, &id).unwrap(), &id.inverse(), &doc.reindex(&id)).unwrap();
        let auto = encode_input(&s, &id, &doc).unwrap();
        assert_eq!(inverse.text, auto.text);
    }

    #[test]
    fn stage2_shares_input_across_references() {
        let s = story(&["Ann ran.", "Ann fell."]);
        let r = Story::new("r", vec!["Ann had fallen.".into(), "Ann ran.".into()]).unwrap();
        let pair = SupervisedPair::new(s, NarrativeOrder::new(vec![2, 1]).unwrap(), vec![r.clone(), r]).unwrap();
        let corefs = HashMap::from([("t".to_string(), CorefDoc::empty("t"))]);
        let ex = build_reorder_stage2(&[pair.clone()], &corefs).unwrap();
        assert_eq!(ex.len(), 2);
        assert_eq!(ex[0].input, ex[1].input);
        assert!(!ex[0].input.contains("<X"));
        assert!(build_reorder_stage2(&[pair], &HashMap::new()).is_err());
    }
}
