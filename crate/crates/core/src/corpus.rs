//! Stories, supervised pairs, sidecar annotations and corpus splits.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::tokenize::surface_tokens;
use crate::permutation::NarrativeOrder;
use crate::seed;

/// An identified sequence of sentences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawStory")]
pub struct Story {
    pub id: String,
    pub sentences: Vec<String>,
}

#[derive(Deserialize)]
struct RawStory {
    id: String,
    sentences: Vec<String>,
}

impl TryFrom<RawStory> for Story {
    type Error = Error;

    fn try_from(raw: RawStory) -> Result<Self> {
        Story::new(raw.id, raw.sentences)
    }
}

impl Story {
    pub fn new(id: impl Into<String>, sentences: Vec<String>) -> Result<Self> {
        let id = id.into();
        if sentences.len() < 2 {
            return Err(Error::InvalidStory {
                id,
                reason: format!("needs at least 2 sentences, has {}", sentences.len()),
            });
        }
        if let Some(k) = sentences.iter().position(|s| s.trim().is_empty()) {
            return Err(Error::InvalidStory {
                id,
                reason: format!("sentence {} is empty", k + 1),
            });
        }
        Ok(Story { id, sentences })
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// Sentences joined by single spaces.
    pub fn text(&self) -> String {
        self.sentences.join(" ")
    }
}

/// A story with its target order and human rewritings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPair", into = "RawPair")]
pub struct SupervisedPair {
    pub story: Story,
    pub target_order: NarrativeOrder,
    pub references: Vec<Story>,
}

#[derive(Serialize, Deserialize)]
struct RawPair {
    id: String,
    sentences: Vec<String>,
    order: NarrativeOrder,
    #[serde(default)]
    references: Vec<Vec<String>>,
}

impl TryFrom<RawPair> for SupervisedPair {
    type Error = Error;

    fn try_from(raw: RawPair) -> Result<Self> {
        let story = Story::new(raw.id, raw.sentences)?;
        let references = raw
            .references
            .into_iter()
            .enumerate()
            .map(|(k, sents)| Story::new(reference_id(&story.id, k + 1), sents))
            .collect::<Result<Vec<_>>>()?;
        SupervisedPair::new(story, raw.order, references)
    }
}

impl From<SupervisedPair> for RawPair {
    fn from(p: SupervisedPair) -> Self {
        RawPair {
            id: p.story.id,
            sentences: p.story.sentences,
            order: p.target_order,
            references: p.references.into_iter().map(|r| r.sentences).collect(),
        }
    }
}

/// Id under which the `k`-th (1-based) reference of a story is addressed in
/// sidecar files.
pub fn reference_id(story_id: &str, k: usize) -> String {
    format!("{story_id}#ref{k}")
}

impl SupervisedPair {
    pub fn new(story: Story, target_order: NarrativeOrder, references: Vec<Story>) -> Result<Self> {
        if target_order.len() != story.len() {
            return Err(Error::InvalidStory {
                id: story.id.clone(),
                reason: format!(
                    "target order has {} positions for {} sentences",
                    target_order.len(),
                    story.len()
                ),
            });
        }
        if let Some(r) = references.iter().find(|r| r.len() != story.len()) {
            return Err(Error::InvalidStory {
                id: story.id.clone(),
                reason: format!(
                    "reference {} has {} sentences, story has {}",
                    r.id,
                    r.len(),
                    story.len()
                ),
            });
        }
        Ok(SupervisedPair {
            story,
            target_order,
            references,
        })
    }

    pub fn id(&self) -> &str {
        &self.story.id
    }
}

/// One mention of a coreference chain, addressed in canonical tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mention {
    /// 1-based sentence index.
    pub sent: usize,
    /// First token (0-based).
    pub start: usize,
    /// One past the last token.
    pub end: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    #[serde(default)]
    pub head: String,
    pub mentions: Vec<Mention>,
}

impl Chain {
    pub fn earliest(&self) -> Option<&Mention> {
        self.mentions.iter().min_by_key(|m| (m.sent, m.start, m.end))
    }

    /// The designated head mention, falling back to the earliest mention.
    pub fn head(&self) -> &str {
        if self.head.is_empty() {
            self.earliest().map(|m| m.text.as_str()).unwrap_or("")
        } else {
            &self.head
        }
    }
}

/// Coreference chains of one story.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorefDoc {
    #[serde(rename = "id")]
    pub story_id: String,
    #[serde(default)]
    pub chains: Vec<Chain>,
}

impl CorefDoc {
    pub fn empty(story_id: impl Into<String>) -> Self {
        CorefDoc {
            story_id: story_id.into(),
            chains: Vec::new(),
        }
    }

    /// Checks every span against the canonical tokenization of `story`.
    pub fn validate(&self, story: &Story) -> Result<()> {
        let err = |reason: String| Error::Coref {
            id: self.story_id.clone(),
            reason,
        };
        let token_spans: Vec<_> = story.sentences.iter().map(|s| surface_tokens(s)).collect();
        for (c, chain) in self.chains.iter().enumerate() {
            if chain.mentions.is_empty() {
                return Err(err(format!("chain {} has no mentions", c + 1)));
            }
            for m in &chain.mentions {
                if m.sent == 0 || m.sent > story.len() {
                    return Err(err(format!("mention {:?} in sentence {} out of range", m.text, m.sent)));
                }
                let tokens = &token_spans[m.sent - 1];
                if m.start >= m.end || m.end > tokens.len() {
                    return Err(err(format!(
                        "span {}..{} out of bounds for sentence {} ({} tokens)",
                        m.start,
                        m.end,
                        m.sent,
                        tokens.len()
                    )));
                }
                let sentence = &story.sentences[m.sent - 1];
                let surface = &sentence[tokens[m.start].start()..tokens[m.end - 1].end()];
                if surface != m.text {
                    return Err(err(format!(
                        "span {}..{} of sentence {} reads {:?}, annotation says {:?}",
                        m.start, m.end, m.sent, surface, m.text
                    )));
                }
            }
            if !chain.head.is_empty() && !chain.mentions.iter().any(|m| m.text == chain.head) {
                return Err(err(format!("head {:?} is not one of its chain's mentions", chain.head)));
            }
        }
        Ok(())
    }

    /// Moves mentions along with their sentences when the story is reordered
    /// by `order`. Token offsets are unchanged.
    pub fn reindex(&self, order: &NarrativeOrder) -> CorefDoc {
        let target_of = order.inverse();
        CorefDoc {
            story_id: self.story_id.clone(),
            chains: self
                .chains
                .iter()
                .map(|chain| Chain {
                    head: chain.head.clone(),
                    mentions: chain
                        .mentions
                        .iter()
                        .map(|m| Mention {
                            sent: target_of.get(m.sent),
                            ..m.clone()
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

/// Penn Treebank tags per sentence, produced by an external tagger.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosDoc {
    pub id: String,
    pub tags: Vec<Vec<(String, String)>>,
}

/// Contextual token vectors of one sentence, row-aligned with `tokens`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEmbedding")]
pub struct EmbeddingRecord {
    pub id: String,
    pub sent: usize,
    pub tokens: Vec<String>,
    pub vectors: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawEmbedding {
    id: String,
    sent: usize,
    tokens: Vec<String>,
    vectors: Vec<Vec<f64>>,
}

impl TryFrom<RawEmbedding> for EmbeddingRecord {
    type Error = Error;

    fn try_from(r: RawEmbedding) -> Result<Self> {
        let bad = |reason: String| Error::InvalidArgument(format!("embeddings {} sent {}: {reason}", r.id, r.sent));
        if r.vectors.len() != r.tokens.len() {
            return Err(bad(format!("{} vectors for {} tokens", r.vectors.len(), r.tokens.len())));
        }
        if let Some(first) = r.vectors.first() {
            if first.is_empty() || r.vectors.iter().any(|v| v.len() != first.len()) {
                return Err(bad("vectors must share one non-zero dimension".into()));
            }
        }
        Ok(EmbeddingRecord {
            id: r.id,
            sent: r.sent,
            tokens: r.tokens,
            vectors: r.vectors,
        })
    }
}

/// Embedding rows grouped by text id and sentence.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingStore {
    by_id: BTreeMap<String, BTreeMap<usize, Vec<Vec<f64>>>>,
}

impl EmbeddingStore {
    pub fn new(records: Vec<EmbeddingRecord>) -> Self {
        let mut by_id: BTreeMap<String, BTreeMap<usize, Vec<Vec<f64>>>> = BTreeMap::new();
        for r in records {
            by_id.entry(r.id).or_default().insert(r.sent, r.vectors);
        }
        EmbeddingStore { by_id }
    }

    pub fn contains(&self, id: &str) -> bool {
        self.by_id.contains_key(id)
    }

    pub fn sentence(&self, id: &str, sent: usize) -> Option<&[Vec<f64>]> {
        self.by_id.get(id)?.get(&sent).map(Vec::as_slice)
    }

    pub fn sentence_count(&self, id: &str) -> usize {
        self.by_id.get(id).map_or(0, BTreeMap::len)
    }

    /// All rows of `id` in sentence order.
    pub fn document(&self, id: &str) -> Option<Vec<Vec<f64>>> {
        let sents = self.by_id.get(id)?;
        Some(sents.values().flat_map(|rows| rows.iter().cloned()).collect())
    }
}

/// Id for the original-story embeddings of `story_id`.
pub fn original_id(story_id: &str) -> String {
    format!("{story_id}#orig")
}

/// Id for the prediction embeddings of `story_id`.
pub fn prediction_id(story_id: &str) -> String {
    format!("{story_id}#pred")
}

/// Which ending of a Story Cloze row becomes the fifth sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndingChoice {
    /// Use the row's `AnswerRightEnding` column.
    Answer,
    /// Always take quiz ending 1 or 2.
    Fixed(u8),
}

const TRAIN_COLUMNS: usize = 7;
const CLOZE_COLUMNS: usize = 8;

/// Loads a ROCStories file, detecting the train layout
/// (`storyid, storytitle, sentence1..sentence5`) or the Story Cloze layout
/// (four sentences, two candidate endings, `AnswerRightEnding`) from the header.
pub fn load_rocstories(path: impl AsRef<Path>) -> Result<Vec<Story>> {
    load_rocstories_with(path, EndingChoice::Answer)
}

pub fn load_rocstories_with(path: impl AsRef<Path>, ending: EndingChoice) -> Result<Vec<Story>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_rocstories(file, ending)
}

pub fn parse_rocstories<R: Read>(reader: R, ending: EndingChoice) -> Result<Vec<Story>> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .has_headers(true)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| Error::Csv { row: 0, message: e.to_string() })?
        .clone();
    if header.is_empty() || header.iter().all(|h| h.trim().is_empty()) {
        return Err(Error::Empty("ROCStories file has no header".into()));
    }
    let cloze = header.len() == CLOZE_COLUMNS
        || header.iter().any(|h| h.eq_ignore_ascii_case("AnswerRightEnding"));
    let expected = if cloze { CLOZE_COLUMNS } else { TRAIN_COLUMNS };
    if header.len() != expected {
        return Err(Error::Csv {
            row: 0,
            message: format!("header: expected {expected} columns, found {}", header.len()),
        });
    }

    let mut stories = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::Csv { row, message: e.to_string() })?;
        if record.len() != expected {
            return Err(Error::Csv {
                row,
                message: format!("expected {expected} columns, found {}", record.len()),
            });
        }
        let id = record[0].to_string();
        let mut sentences: Vec<String>;
        if cloze {
            sentences = (1..=4).map(|k| record[k].to_string()).collect();
            let pick = match ending {
                EndingChoice::Answer => record[7].trim().parse::<u8>().map_err(|_| Error::Csv {
                    row,
                    message: format!("AnswerRightEnding {:?} is not 1 or 2", &record[7]),
                })?,
                EndingChoice::Fixed(k) => k,
            };
            match pick {
                1 => sentences.push(record[5].to_string()),
                2 => sentences.push(record[6].to_string()),
                other => {
                    return Err(Error::Csv {
                        row,
                        message: format!("ending {other} is not 1 or 2"),
                    })
                }
            }
        } else {
            sentences = (2..=6).map(|k| record[k].to_string()).collect();
        }
        stories.push(Story::new(id, sentences).map_err(|e| Error::Csv {
            row,
            message: e.to_string(),
        })?);
    }
    if stories.is_empty() {
        return Err(Error::Empty("ROCStories file has no rows".into()));
    }
    Ok(stories)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SplitName {
    #[serde(rename = "trainSup")]
    TrainSup,
    #[serde(rename = "devSup")]
    DevSup,
    #[serde(rename = "testSup")]
    TestSup,
    #[serde(rename = "trainUnsup")]
    TrainUnsup,
    #[serde(rename = "devUnsup")]
    DevUnsup,
    #[serde(rename = "testUnsup")]
    TestUnsup,
}

impl SplitName {
    pub const ALL: [SplitName; 6] = [
        SplitName::TrainSup,
        SplitName::DevSup,
        SplitName::TestSup,
        SplitName::TrainUnsup,
        SplitName::DevUnsup,
        SplitName::TestUnsup,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SplitName::TrainSup => "trainSup",
            SplitName::DevSup => "devSup",
            SplitName::TestSup => "testSup",
            SplitName::TrainUnsup => "trainUnsup",
            SplitName::DevUnsup => "devUnsup",
            SplitName::TestUnsup => "testUnsup",
        }
    }
}

impl fmt::Display for SplitName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SplitName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SplitName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown split {s:?}")))
    }
}

/// Story ids of one split, in corpus order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitAssignment {
    pub split_name: SplitName,
    pub story_ids: Vec<String>,
}

/// The source train/dev/test pools that supervised splits are drawn from.
#[derive(Debug, Clone, Default)]
pub struct SourcePools {
    pub train: Vec<Story>,
    pub dev: Vec<Story>,
    pub test: Vec<Story>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupSizes {
    pub train: usize,
    pub dev: usize,
    pub test: usize,
}

impl Default for SupSizes {
    fn default() -> Self {
        SupSizes {
            train: 600,
            dev: 200,
            test: 200,
        }
    }
}

/// Draws the supervised splits from each pool with a seeded shuffle; the
/// rest of each pool becomes the matching unsupervised split.
pub fn make_splits(pools: &SourcePools, sizes: SupSizes, seed: u64) -> Result<Vec<SplitAssignment>> {
    let mut seen = HashSet::new();
    for story in pools.train.iter().chain(&pools.dev).chain(&pools.test) {
        if !seen.insert(story.id.as_str()) {
            return Err(Error::InvalidStory {
                id: story.id.clone(),
                reason: "duplicate story id".into(),
            });
        }
    }

    let mut out = Vec::with_capacity(6);
    let plan = [
        ("train", &pools.train, sizes.train, SplitName::TrainSup, SplitName::TrainUnsup),
        ("dev", &pools.dev, sizes.dev, SplitName::DevSup, SplitName::DevUnsup),
        ("test", &pools.test, sizes.test, SplitName::TestSup, SplitName::TestUnsup),
    ];
    let mut unsup = Vec::with_capacity(3);
    for (pool_name, pool, k, sup_name, unsup_name) in plan {
        if pool.len() < k {
            return Err(Error::InvalidArgument(format!(
                "{pool_name} pool has {} stories, {k} needed for {sup_name}",
                pool.len()
            )));
        }
        let mut indices: Vec<usize> = (0..pool.len()).collect();
        indices.shuffle(&mut seed::rng_for(seed, &["split", pool_name]));
        let mut chosen = vec![false; pool.len()];
        for &i in &indices[..k] {
            chosen[i] = true;
        }
        let (sup, rest): (Vec<_>, Vec<_>) = pool.iter().zip(&chosen).partition(|(_, &c)| c);
        out.push(SplitAssignment {
            split_name: sup_name,
            story_ids: sup.into_iter().map(|(s, _)| s.id.clone()).collect(),
        });
        unsup.push(SplitAssignment {
            split_name: unsup_name,
            story_ids: rest.into_iter().map(|(s, _)| s.id.clone()).collect(),
        });
    }
    out.extend(unsup);
    Ok(out)
}
