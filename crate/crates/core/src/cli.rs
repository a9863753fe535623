//! The `nareor` command line.
//!
//! Every subcommand reads its inputs, writes its declared outputs and prints
//! one JSON summary object on stdout. Exit codes: 0 success, 1 usage error,
//! 2 data error.

use std::collections::{BTreeMap, HashMap};
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{self, ChangeAnnotation, HumanScores, UniqueMode};
use crate::challenge::{self, ChallengeSource, OrderingInstance};
use crate::corpus::{self, CorefDoc, EmbeddingRecord, EmbeddingStore, PosDoc, SourcePools, Story, SupSizes, SupervisedPair};
use crate::encoding;
use crate::error::{Error, Result};
use crate::jsonl::{self, OrderRecord, OrderingPrediction, Prediction};
use crate::metrics::report::{self, ExampleScores, ScoreOptions};
use crate::metrics::split_sentences;
use crate::permutation::{kendall_tau, sample_target_order, NarrativeOrder};
use crate::seed;
use crate::synthesis::{self, DenoiseMode, Method, NoiseSpec, Stage};

#[derive(Debug, Parser)]
#[command(name = "nareor", version, about = "Narrative reordering data synthesis and evaluation")]
struct Cli {
    /// Global seed; required by every stochastic subcommand.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 uses all cores). Output does not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a target narrative order for every story.
    SampleOrders(CorpusOut),
    /// Permute each story's sentences by its target order.
    NaiveReorder(WithOrders),
    /// Corrupt stories by token deletion and swapping.
    Noise(NoiseArgs),
    /// Build seq2seq training examples.
    MakeTrain(MakeTrainArgs),
    /// Encode supervised pairs as reorder-model inputs.
    Encode(EncodeArgs),
    /// Score rewritten stories against references and target orders.
    Score(ScoreArgs),
    /// Corpus statistics of supervised pairs.
    Analyze(AnalyzeArgs),
    /// Correlate automatic scores with human ratings.
    Correlate(CorrelateArgs),
    /// Build sentence-ordering control and challenge sets.
    Challenge(ChallengeArgs),
    /// Score sentence-ordering predictions.
    ScoreOrdering(ScoreOrderingArgs),
    /// Draw supervised and unsupervised splits from ROCStories pools.
    Splits(SplitsArgs),
}

#[derive(Debug, Args)]
struct CorpusOut {
    /// Stories (JSONL, or a ROCStories CSV when the name ends in .csv).
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct WithOrders {
    #[command(flatten)]
    io: CorpusOut,
    /// Target orders (JSONL of {"id","order"}).
    #[arg(long)]
    orders: PathBuf,
}

#[derive(Debug, Args)]
struct NoiseArgs {
    #[command(flatten)]
    io: CorpusOut,
    #[arg(long, default_value = "plain", value_parser = ["plain", "reordered"])]
    mode: String,
    /// Needed with `--mode reordered`.
    #[arg(long)]
    orders: Option<PathBuf>,
    #[arg(long, default_value_t = NoiseSpec::DEFAULT_DELETE_FRAC)]
    delete_frac: f64,
    #[arg(long, default_value_t = NoiseSpec::DEFAULT_SWAP_FRAC)]
    swap_frac: f64,
}

#[derive(Debug, Args)]
struct MakeTrainArgs {
    /// Stage 1: stories. Stage 2: supervised pairs.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_parser = ["denoise", "reorder"])]
    method: String,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    stage: u8,
    #[arg(long, default_value = "plain", value_parser = ["plain", "reordered"])]
    mode: String,
    #[arg(long)]
    orders: Option<PathBuf>,
    #[arg(long)]
    coref: Option<PathBuf>,
    #[arg(long, default_value_t = NoiseSpec::DEFAULT_DELETE_FRAC)]
    delete_frac: f64,
    #[arg(long, default_value_t = NoiseSpec::DEFAULT_SWAP_FRAC)]
    swap_frac: f64,
}

#[derive(Debug, Args)]
struct EncodeArgs {
    /// Supervised pairs.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    coref: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[arg(long)]
    predictions: PathBuf,
    /// Supervised pairs holding the references and target orders.
    #[arg(long)]
    gold: PathBuf,
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Per-example scores (JSONL).
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    corpus_bleu: bool,
    /// Row label in the rendered table.
    #[arg(long, default_value = "model")]
    label: String,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Supervised pairs.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    pos: Option<PathBuf>,
    /// Change-type annotations.
    #[arg(long)]
    changes: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct CorrelateArgs {
    /// Per-example scores written by `score`.
    #[arg(long)]
    scores: PathBuf,
    #[arg(long)]
    human: PathBuf,
    #[arg(long, default_value_t = analysis::correlate::DEFAULT_PERMUTATIONS)]
    n_perm: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ChallengeArgs {
    /// Supervised pairs.
    #[arg(long)]
    gold: PathBuf,
    /// Which human rewriting forms the challenge set (1-based).
    #[arg(long, default_value_t = 1)]
    reference: usize,
    /// Use these rewritten stories instead of a human rewriting.
    #[arg(long)]
    predictions: Option<PathBuf>,
    /// Output directory for control.jsonl and challenge.jsonl.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ScoreOrderingArgs {
    #[arg(long)]
    instances: PathBuf,
    #[arg(long)]
    predictions: PathBuf,
    #[arg(long, default_value = "test")]
    label: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SplitsArgs {
    /// ROCStories CSV pools.
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    dev: PathBuf,
    #[arg(long)]
    test: PathBuf,
    #[arg(long, default_value_t = 600)]
    train_size: usize,
    #[arg(long, default_value_t = 200)]
    dev_size: usize,
    #[arg(long, default_value_t = 200)]
    test_size: usize,
    #[arg(long)]
    out: PathBuf,
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

type Outcome = std::result::Result<Value, Failure>;

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return 2;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            1
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn need_seed(cli: &Cli) -> std::result::Result<u64, Failure> {
    cli.seed.ok_or_else(|| Failure::Usage("this subcommand needs --seed".into()))
}

/// Fails before any work when an input is missing or an output has nowhere
/// to go.
fn check_paths(inputs: &[Option<&Path>], out: &Path) -> Result<()> {
    for p in inputs.iter().flatten() {
        if !p.is_file() {
            return Err(Error::io(*p, std::io::Error::new(std::io::ErrorKind::NotFound, "input file not found")));
        }
    }
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        if !dir.is_dir() {
            return Err(Error::io(dir, std::io::Error::new(std::io::ErrorKind::NotFound, "output directory not found")));
        }
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::SampleOrders(a) => sample_orders(cli, a),
        Command::NaiveReorder(a) => naive_reorder(a),
        Command::Noise(a) => noise(cli, a),
        Command::MakeTrain(a) => make_train(cli, a),
        Command::Encode(a) => encode(a),
        Command::Score(a) => score(a),
        Command::Analyze(a) => analyze(a),
        Command::Correlate(a) => correlate(cli, a),
        Command::Challenge(a) => challenge_sets(cli, a),
        Command::ScoreOrdering(a) => score_ordering(a),
        Command::Splits(a) => splits(cli, a),
    }
}

fn load_stories(path: &Path) -> Result<Vec<Story>> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        corpus::load_rocstories(path)
    } else {
        jsonl::read_jsonl(path)
    }
}

fn load_orders(path: &Path) -> Result<HashMap<String, NarrativeOrder>> {
    let records: Vec<OrderRecord> = jsonl::read_jsonl(path)?;
    Ok(records.into_iter().map(|r| (r.id, r.order)).collect())
}

fn load_corefs(path: &Path) -> Result<HashMap<String, CorefDoc>> {
    let docs: Vec<CorefDoc> = jsonl::read_jsonl(path)?;
    Ok(docs.into_iter().map(|d| (d.story_id.clone(), d)).collect())
}

fn sample_orders(cli: &Cli, a: &CorpusOut) -> Outcome {
    let seed = need_seed(cli)?;
    check_paths(&[Some(&a.corpus)], &a.out)?;
    let stories = load_stories(&a.corpus)?;
    let records: Vec<OrderRecord> = stories
        .par_iter()
        .map(|s| {
            let mut rng = seed::rng_for(seed, &["order", &s.id]);
            Ok(OrderRecord {
                id: s.id.clone(),
                order: sample_target_order(s.len(), &mut rng)?,
            })
        })
        .collect::<Result<_>>()?;
    let mut tau_sum = 0.0;
    for r in &records {
        tau_sum += kendall_tau(&r.order, &NarrativeOrder::identity(r.order.len()))?;
    }
    jsonl::write_jsonl(&a.out, &records)?;
    Ok(json!({
        "command": "sample-orders",
        "stories": records.len(),
        "mean_tau": if records.is_empty() { 0.0 } else { tau_sum / records.len() as f64 },
        "out": a.out,
    }))
}

fn naive_reorder(a: &WithOrders) -> Outcome {
    check_paths(&[Some(&a.io.corpus), Some(&a.orders)], &a.io.out)?;
    let stories = load_stories(&a.io.corpus)?;
    let orders = load_orders(&a.orders)?;
    let out: Vec<Story> = stories
        .par_iter()
        .map(|s| {
            let order = orders.get(&s.id).ok_or_else(|| Error::MissingSidecar {
                what: "target order".into(),
                ids: vec![s.id.clone()],
            })?;
            synthesis::naive_reorder(s, order)
        })
        .collect::<Result<_>>()?;
    jsonl::write_jsonl(&a.io.out, &out)?;
    Ok(json!({ "command": "naive-reorder", "stories": out.len(), "out": a.io.out }))
}

#[derive(Serialize)]
struct NoisedRecord {
    id: String,
    text: String,
    token_count: usize,
    deleted: usize,
    swapped: usize,
}

fn noise(cli: &Cli, a: &NoiseArgs) -> Outcome {
    let seed = need_seed(cli)?;
    let mode: DenoiseMode = a.mode.parse()?;
    if mode == DenoiseMode::Reordered && a.orders.is_none() {
        return Err(Failure::Usage("--mode reordered needs --orders".into()));
    }
    check_paths(&[Some(&a.io.corpus), a.orders.as_deref()], &a.io.out)?;
    let spec = NoiseSpec::new(a.delete_frac, a.swap_frac, seed)?;
    let stories = load_stories(&a.io.corpus)?;
    let orders = a.orders.as_deref().map(load_orders).transpose()?.unwrap_or_default();
    let records: Vec<NoisedRecord> = stories
        .par_iter()
        .map(|s| {
            let clean = match mode {
                DenoiseMode::Plain => s.text(),
                DenoiseMode::Reordered => {
                    let order = orders.get(&s.id).ok_or_else(|| Error::MissingSidecar {
                        what: "target order".into(),
                        ids: vec![s.id.clone()],
                    })?;
                    synthesis::naive_reorder(s, order)?.text()
                }
            };
            let o = synthesis::noise_text(&clean, &spec, &s.id);
            Ok(NoisedRecord {
                id: s.id.clone(),
                text: o.text,
                token_count: o.token_count,
                deleted: o.deleted.len(),
                swapped: 2 * o.swapped.len(),
            })
        })
        .collect::<Result<_>>()?;
    jsonl::write_jsonl(&a.io.out, &records)?;
    Ok(json!({
        "command": "noise",
        "stories": records.len(),
        "tokens": records.iter().map(|r| r.token_count).sum::<usize>(),
        "deleted": records.iter().map(|r| r.deleted).sum::<usize>(),
        "swapped": records.iter().map(|r| r.swapped).sum::<usize>(),
        "out": a.io.out,
    }))
}

fn make_train(cli: &Cli, a: &MakeTrainArgs) -> Outcome {
    let method: Method = a.method.parse()?;
    let mode: DenoiseMode = a.mode.parse()?;
    let stage = if a.stage == 1 { Stage::One } else { Stage::Two };
    let needs_orders = stage == Stage::One && (method == Method::Reorder || mode == DenoiseMode::Reordered);
    if needs_orders && a.orders.is_none() {
        return Err(Failure::Usage("stage-1 reorder and reordered denoise examples need --orders".into()));
    }
    if method == Method::Reorder && a.coref.is_none() {
        return Err(Failure::Data(Error::MissingSidecar {
            what: "coreference file (--coref)".into(),
            ids: Vec::new(),
        }));
    }
    let seed = if stage == Stage::One { Some(need_seed(cli)?) } else { cli.seed };
    check_paths(&[Some(&a.corpus), a.orders.as_deref(), a.coref.as_deref()], &a.out)?;

    let examples = match (method, stage) {
        (Method::Denoise, Stage::One) => {
            let spec = NoiseSpec::new(a.delete_frac, a.swap_frac, seed.unwrap_or_default())?;
            let orders = a.orders.as_deref().map(load_orders).transpose()?.unwrap_or_default();
            synthesis::build_denoise_stage1(&load_stories(&a.corpus)?, &orders, &spec, mode)?
        }
        (Method::Denoise, Stage::Two) => synthesis::build_denoise_stage2(&jsonl::read_jsonl(&a.corpus)?)?,
        (Method::Reorder, Stage::One) => {
            let orders = load_orders(a.orders.as_deref().unwrap_or(Path::new("")))?;
            let corefs = load_corefs(a.coref.as_deref().unwrap_or(Path::new("")))?;
            encoding::build_reorder_stage1(&load_stories(&a.corpus)?, &orders, &corefs, seed.unwrap_or_default())?
        }
        (Method::Reorder, Stage::Two) => {
            let corefs = load_corefs(a.coref.as_deref().unwrap_or(Path::new("")))?;
            encoding::build_reorder_stage2(&jsonl::read_jsonl(&a.corpus)?, &corefs)?
        }
    };
    jsonl::write_jsonl(&a.out, &examples)?;
    Ok(json!({
        "command": "make-train",
        "method": method.to_string(),
        "stage": a.stage,
        "examples": examples.len(),
        "out": a.out,
    }))
}

#[derive(Serialize)]
struct EncodedRecord {
    id: String,
    input: String,
    tag_map: BTreeMap<String, String>,
}

fn encode(a: &EncodeArgs) -> Outcome {
    check_paths(&[Some(&a.corpus), Some(&a.coref)], &a.out)?;
    let pairs: Vec<SupervisedPair> = jsonl::read_jsonl(&a.corpus)?;
    let corefs = load_corefs(&a.coref)?;
    let absent: Vec<String> = pairs
        .iter()
        .filter(|p| !corefs.contains_key(p.id()))
        .map(|p| p.id().to_string())
        .collect();
    if !absent.is_empty() {
        return Err(Failure::Data(Error::MissingSidecar {
            what: "coreference annotation".into(),
            ids: absent,
        }));
    }
    let records: Vec<EncodedRecord> = pairs
        .par_iter()
        .map(|p| {
            let e = encoding::encode_input(&p.story, &p.target_order, &corefs[p.id()])?;
            Ok(EncodedRecord {
                id: p.id().to_string(),
                input: e.text,
                tag_map: e.tag_map,
            })
        })
        .collect::<Result<_>>()?;
    jsonl::write_jsonl(&a.out, &records)?;
    Ok(json!({ "command": "encode", "inputs": records.len(), "out": a.out }))
}

fn score(a: &ScoreArgs) -> Outcome {
    check_paths(&[Some(&a.predictions), Some(&a.gold), a.embeddings.as_deref()], &a.out)?;
    let predictions: Vec<Prediction> = jsonl::read_jsonl(&a.predictions)?;
    let pairs: Vec<SupervisedPair> = jsonl::read_jsonl(&a.gold)?;
    let store = match &a.embeddings {
        Some(p) => Some(EmbeddingStore::new(jsonl::read_jsonl::<EmbeddingRecord>(p)?)),
        None => None,
    };
    let options = ScoreOptions {
        corpus_bleu: a.corpus_bleu,
    };
    let report = report::score_outputs(&predictions, &pairs, store.as_ref(), options)?;
    jsonl::write_jsonl(&a.out, &report.per_example)?;
    Ok(json!({
        "command": "score",
        "aggregate": report.aggregate,
        "counts": report.counts,
        "table": report.render_table(&a.label),
        "out": a.out,
    }))
}

fn analyze(a: &AnalyzeArgs) -> Outcome {
    check_paths(&[Some(&a.corpus), a.pos.as_deref(), a.changes.as_deref()], &a.out)?;
    let pairs: Vec<SupervisedPair> = jsonl::read_jsonl(&a.corpus)?;
    if pairs.is_empty() {
        return Err(Failure::Data(Error::Empty("no supervised pairs".into())));
    }
    let inputs: Vec<Story> = pairs.iter().map(|p| p.story.clone()).collect();
    let references: Vec<Story> = pairs.iter().flat_map(|p| p.references.iter().cloned()).collect();
    let mut ur = BTreeMap::new();
    for n in 1..=3 {
        let mut row = BTreeMap::new();
        row.insert("inputs", analysis::mean_unique_ngram_ratio(&inputs, n, UniqueMode::Distinct)?);
        if !references.is_empty() {
            row.insert("references", analysis::mean_unique_ngram_ratio(&references, n, UniqueMode::Distinct)?);
        }
        ur.insert(format!("ur{n}"), row);
    }
    let length_pairs: Vec<(Story, Story)> = pairs
        .iter()
        .flat_map(|p| p.references.iter().map(|r| (p.story.clone(), r.clone())))
        .collect();
    let mut stats = json!({
        "pairs": pairs.len(),
        "references": references.len(),
        "unique_ngram_ratio": ur,
    });
    if !length_pairs.is_empty() {
        stats["length"] = serde_json::to_value(analysis::length_stats(&length_pairs)?).map_err(json_err)?;
    }
    if let Some(p) = &a.pos {
        let docs: Vec<PosDoc> = jsonl::read_jsonl(p)?;
        stats["verb_forms"] = serde_json::to_value(analysis::verb_form_distribution(&docs)?).map_err(json_err)?;
    }
    if let Some(p) = &a.changes {
        let anns: Vec<ChangeAnnotation> = jsonl::read_jsonl(p)?;
        stats["change_types"] = serde_json::to_value(analysis::change_type_stats(&anns)).map_err(json_err)?;
    }
    write_json(&a.out, &stats)?;
    Ok(json!({ "command": "analyze", "stats": stats, "out": a.out }))
}

fn json_err(e: serde_json::Error) -> Error {
    Error::InvalidArgument(format!("serialize: {e}"))
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(json_err)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn correlate(cli: &Cli, a: &CorrelateArgs) -> Outcome {
    let seed = need_seed(cli)?;
    check_paths(&[Some(&a.scores), Some(&a.human)], &a.out)?;
    let scores: Vec<ExampleScores> = jsonl::read_jsonl(&a.scores)?;
    let human: Vec<HumanScores> = jsonl::read_jsonl(&a.human)?;
    let automatic: BTreeMap<String, BTreeMap<String, f64>> =
        scores.into_iter().map(|e| (e.id, e.scores)).collect();
    let metrics: Vec<&str> = report::TABLE_COLUMNS.iter().map(|(k, _)| *k).collect();
    let cells = analysis::correlation_table(&automatic, &human, &metrics, a.n_perm, seed);
    jsonl::write_jsonl(&a.out, &cells)?;
    Ok(json!({ "command": "correlate", "cells": cells.len(), "n_perm": a.n_perm, "out": a.out }))
}

fn challenge_sets(cli: &Cli, a: &ChallengeArgs) -> Outcome {
    let seed = need_seed(cli)?;
    if a.reference == 0 {
        return Err(Failure::Usage("--reference is 1-based".into()));
    }
    check_paths(&[Some(&a.gold), a.predictions.as_deref()], &a.out)?;
    fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
    let pairs: Vec<SupervisedPair> = jsonl::read_jsonl(&a.gold)?;
    let rewritten = match &a.predictions {
        Some(p) => {
            let preds: Vec<Prediction> = jsonl::read_jsonl(p)?;
            let mut map = BTreeMap::new();
            for pred in preds {
                let story = Story::new(pred.id.clone(), split_sentences(&pred.output))?;
                map.insert(pred.id, story);
            }
            Some(map)
        }
        None => None,
    };
    let (control, challenge) =
        challenge::build_challenge_sets(&pairs, ChallengeSource::Reference(a.reference), rewritten.as_ref(), seed)?;
    let (cp, xp) = (a.out.join("control.jsonl"), a.out.join("challenge.jsonl"));
    jsonl::write_jsonl(&cp, &control)?;
    jsonl::write_jsonl(&xp, &challenge)?;
    Ok(json!({
        "command": "challenge",
        "instances": control.len(),
        "control": cp,
        "challenge": xp,
    }))
}

#[derive(Serialize)]
struct OrderingRow {
    id: String,
    #[serde(flatten)]
    scores: challenge::OrderingScores,
}

fn score_ordering(a: &ScoreOrderingArgs) -> Outcome {
    check_paths(&[Some(&a.instances), Some(&a.predictions)], &a.out)?;
    let instances: Vec<OrderingInstance> = jsonl::read_jsonl(&a.instances)?;
    let preds: Vec<OrderingPrediction> = jsonl::read_jsonl(&a.predictions)?;
    let scored = challenge::score_predictions(&instances, &preds)?;
    let labelled: Vec<_> = scored.iter().map(|(_, s)| (a.label.clone(), *s)).collect();
    let summary = challenge::aggregate_ordering(&labelled);
    let rows: Vec<OrderingRow> = scored.into_iter().map(|(id, scores)| OrderingRow { id, scores }).collect();
    jsonl::write_jsonl(&a.out, &rows)?;
    Ok(json!({
        "command": "score-ordering",
        "summary": summary,
        "table": challenge::render_ordering_table(&summary),
        "out": a.out,
    }))
}

fn splits(cli: &Cli, a: &SplitsArgs) -> Outcome {
    let seed = need_seed(cli)?;
    check_paths(&[Some(&a.train), Some(&a.dev), Some(&a.test)], &a.out)?;
    let pools = SourcePools {
        train: corpus::load_rocstories(&a.train)?,
        dev: corpus::load_rocstories(&a.dev)?,
        test: corpus::load_rocstories(&a.test)?,
    };
    let sizes = SupSizes {
        train: a.train_size,
        dev: a.dev_size,
        test: a.test_size,
    };
    let assignments = corpus::make_splits(&pools, sizes, seed)?;
    jsonl::write_jsonl(&a.out, &assignments)?;
    let counts: BTreeMap<String, usize> =
        assignments.iter().map(|s| (s.split_name.to_string(), s.story_ids.len())).collect();
    Ok(json!({ "command": "splits", "sizes": counts, "out": a.out }))
}
