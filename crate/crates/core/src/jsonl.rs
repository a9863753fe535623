//! JSON-lines readers and writers for every record kind the toolkit uses.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::analysis::{ChangeAnnotation, HumanScores};
use crate::challenge::OrderingInstance;
use crate::corpus::{CorefDoc, EmbeddingRecord, PosDoc, Story, SupervisedPair};
use crate::error::{Error, Result};
use crate::permutation::NarrativeOrder;
use crate::synthesis::TrainingExample;

/// A model's rewritten story.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub output: String,
}

/// A sentence-ordering model's answer for one instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingPrediction {
    pub id: String,
    pub pred_order: NarrativeOrder,
}

/// A target order assigned to a story.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderRecord {
    pub id: String,
    pub order: NarrativeOrder,
}

pub fn parse_jsonl<T: DeserializeOwned, R: Read>(reader: R) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Jsonl {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| Error::Jsonl {
            line: line_no,
            message: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

pub fn read_jsonl<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_jsonl(file).map_err(|e| match e {
        Error::Jsonl { line, message } => Error::Jsonl {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

pub fn to_jsonl_string<T: Serialize>(records: &[T]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).map_err(|e| Error::InvalidArgument(e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: impl AsRef<Path>, records: &[T]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Names of the record kinds accepted by [`read_records`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordKind {
    Story,
    SupervisedPair,
    Coref,
    PosTags,
    Embeddings,
    TrainingExample,
    Prediction,
    OrderingPrediction,
    Order,
    OrderingInstance,
    ChangeAnnotation,
    HumanScores,
}

impl RecordKind {
    pub const ALL: [RecordKind; 12] = [
        RecordKind::Story,
        RecordKind::SupervisedPair,
        RecordKind::Coref,
        RecordKind::PosTags,
        RecordKind::Embeddings,
        RecordKind::TrainingExample,
        RecordKind::Prediction,
        RecordKind::OrderingPrediction,
        RecordKind::Order,
        RecordKind::OrderingInstance,
        RecordKind::ChangeAnnotation,
        RecordKind::HumanScores,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RecordKind::Story => "story",
            RecordKind::SupervisedPair => "supervised-pair",
            RecordKind::Coref => "coref",
            RecordKind::PosTags => "pos-tags",
            RecordKind::Embeddings => "embeddings",
            RecordKind::TrainingExample => "training-example",
            RecordKind::Prediction => "prediction",
            RecordKind::OrderingPrediction => "ordering-prediction",
            RecordKind::Order => "order",
            RecordKind::OrderingInstance => "ordering-instance",
            RecordKind::ChangeAnnotation => "change-annotation",
            RecordKind::HumanScores => "human-scores",
        }
    }
}

impl fmt::Display for RecordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RecordKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RecordKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::UnknownKind(s.to_string()))
    }
}

/// A record of any kind, for callers that pick the kind at run time.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Record {
    Story(Story),
    SupervisedPair(SupervisedPair),
    Coref(CorefDoc),
    PosTags(PosDoc),
    Embeddings(EmbeddingRecord),
    TrainingExample(TrainingExample),
    Prediction(Prediction),
    OrderingPrediction(OrderingPrediction),
    Order(OrderRecord),
    OrderingInstance(OrderingInstance),
    ChangeAnnotation(ChangeAnnotation),
    HumanScores(HumanScores),
}

pub fn parse_records<R: Read>(reader: R, kind: RecordKind) -> Result<Vec<Record>> {
    fn wrap<T: DeserializeOwned, R: Read>(r: R, f: fn(T) -> Record) -> Result<Vec<Record>> {
        Ok(parse_jsonl::<T, R>(r)?.into_iter().map(f).collect())
    }
    match kind {
        RecordKind::Story => wrap(reader, Record::Story),
        RecordKind::SupervisedPair => wrap(reader, Record::SupervisedPair),
        RecordKind::Coref => wrap(reader, Record::Coref),
        RecordKind::PosTags => wrap(reader, Record::PosTags),
        RecordKind::Embeddings => wrap(reader, Record::Embeddings),
        RecordKind::TrainingExample => wrap(reader, Record::TrainingExample),
        RecordKind::Prediction => wrap(reader, Record::Prediction),
        RecordKind::OrderingPrediction => wrap(reader, Record::OrderingPrediction),
        RecordKind::Order => wrap(reader, Record::Order),
        RecordKind::OrderingInstance => wrap(reader, Record::OrderingInstance),
        RecordKind::ChangeAnnotation => wrap(reader, Record::ChangeAnnotation),
        RecordKind::HumanScores => wrap(reader, Record::HumanScores),
    }
}

/// Reads `path` as records of the kind named `kind` (e.g. `"coref"`).
pub fn read_records(path: impl AsRef<Path>, kind: &str) -> Result<Vec<Record>> {
    let kind: RecordKind = kind.parse()?;
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_records(file, kind)
}
