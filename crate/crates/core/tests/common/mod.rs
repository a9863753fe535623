//! Synthetic stories, chains and sidecars shared by the integration tests.
#![allow(dead_code)]

use nareor::corpus::{Chain, CorefDoc, EmbeddingRecord, Mention};
use nareor::metrics::tokenize;
use nareor::seed;
use nareor::{NarrativeOrder, Story, SupervisedPair};
use rand::seq::SliceRandom;
use rand::Rng;

const WORDS: &[&str] = &[
    "walked", "to", "the", "park", "and", "saw", "a", "dog", "later", "it", "rained", "quickly", "home", "friend",
    "bought", "new", "shoes", "after", "school", "was", "happy", "very", "tired", "found", "lost", "key",
];
const NAMES: &[&str] = &["Ann", "Bob", "Aunt May", "Cy"];

/// A story of `n` sentences whose chains are the name mentions. Every
/// mention's text equals its chain head.
pub fn synthetic(id: &str, n: usize, rng: &mut impl Rng) -> (Story, CorefDoc) {
    let mut sentences = Vec::with_capacity(n);
    let mut mentions: Vec<Vec<Mention>> = vec![Vec::new(); NAMES.len()];
    for sent in 1..=n {
        let len = rng.gen_range(3..9);
        let mut words: Vec<String> = Vec::new();
        let mut at = 0usize;
        for k in 0..len {
            if rng.gen_bool(0.25) || (k == 0 && rng.gen_bool(0.5)) {
                let c = rng.gen_range(0..NAMES.len());
                let name = NAMES[c];
                let width = name.split(' ').count();
                mentions[c].push(Mention {
                    sent,
                    start: at,
                    end: at + width,
                    text: name.to_string(),
                });
                words.push(name.to_string());
                at += width;
            } else {
                let mut w = WORDS.choose(rng).unwrap().to_string();
                if k == 0 {
                    w[..1].make_ascii_uppercase();
                }
                words.push(w);
                at += 1;
            }
        }
        sentences.push(format!("{}.", words.join(" ")));
    }
    let story = Story::new(id, sentences).unwrap();
    let chains = mentions
        .into_iter()
        .zip(NAMES)
        .filter(|(m, _)| !m.is_empty())
        .map(|(mentions, name)| Chain {
            head: name.to_string(),
            mentions,
        })
        .collect();
    (
        story,
        CorefDoc {
            story_id: id.to_string(),
            chains,
        },
    )
}

pub fn stories(count: usize, seed_value: u64) -> Vec<(Story, CorefDoc)> {
    let mut rng = seed::rng_for(seed_value, &["fixture"]);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(2..8);
            synthetic(&format!("s{i}"), n, &mut rng)
        })
        .collect()
}

/// Pairs whose single reference lightly edits the naive reordering.
pub fn pairs(count: usize, seed_value: u64) -> Vec<SupervisedPair> {
    let mut rng = seed::rng_for(seed_value, &["pairs"]);
    stories(count, seed_value)
        .into_iter()
        .map(|(story, _)| {
            let order = nareor::sample_target_order(story.len(), &mut rng).unwrap();
            let mut sentences = order.apply(&story.sentences).unwrap();
            sentences[0] = sentences[0].replacen('.', " then.", 1);
            let reference = Story::new(format!("{}#ref1", story.id), sentences).unwrap();
            SupervisedPair::new(story, order, vec![reference]).unwrap()
        })
        .collect()
}

/// Deterministic per-word vectors, so equal sentences embed identically.
pub fn word_vector(word: &str) -> Vec<f64> {
    let mut rng = seed::rng_for(0, &["embed", word]);
    (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn embed(id: &str, sentences: &[String]) -> Vec<EmbeddingRecord> {
    sentences
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let tokens: Vec<String> = tokenize::tokenize(s).as_slice().to_vec();
            EmbeddingRecord {
                id: id.to_string(),
                sent: k + 1,
                vectors: tokens.iter().map(|t| word_vector(t)).collect(),
                tokens,
            }
        })
        .collect()
}

pub fn random_order(n: usize, rng: &mut impl Rng) -> NarrativeOrder {
    let mut v: Vec<usize> = (1..=n).collect();
    v.shuffle(rng);
    NarrativeOrder::new(v).unwrap()
}

/// The worked example: five sentences, two chains, order {5,4,1,2,3}.
fn mention(sent: usize, start: usize, end: usize, text: &str) -> Mention {
    Mention {
        sent,
        start,
        end,
        text: text.into(),
    }
}

pub fn concert() -> (Story, CorefDoc) {
    let story = Story::new(
        "concert",
        vec![
            "Since I had front seat tickets, I was able to directly see the music artist.".into(),
            "The music artist tried to reach out with her hand.".into(),
            "I grabbed her hand and she pulled me on stage.".into(),
            "She began to sing.".into(),
            "The concert had started.".into(),
        ],
    )
    .unwrap();
    let doc = CorefDoc {
        story_id: "concert".into(),
        chains: vec![
            Chain {
                head: "The music artist".into(),
                mentions: vec![
                    mention(1, 13, 16, "the music artist"),
                    mention(2, 0, 3, "The music artist"),
                    mention(2, 8, 9, "her"),
                    mention(3, 5, 6, "she"),
                    mention(4, 0, 1, "She"),
                ],
            },
            Chain {
                head: "her hand".into(),
                mentions: vec![mention(2, 8, 10, "her hand"), mention(3, 2, 4, "her hand")],
            },
        ],
    };
    (story, doc)
}

pub const CONCERT_ENCODED: &str = "<a> Since I had front seat tickets, I was able to directly see <X1>. \
<b> <X1> tried to reach out with <X1> <X2>. <c> I grabbed <X2> and <X1> pulled me on stage. \
<d> <X1> began to sing. <e> The concert had started. <sep> <e> <d> <a> <b> <c> \
<X1> The music artist <X2> her hand <st>";

pub mod workspace {
    //! Input files for every subcommand, and the invocations that use them.

    use std::fs;
    use std::path::{Path, PathBuf};
    use std::process::{Command, Output};

    use nareor::analysis::{ChangeAnnotation, ChangeFlags, HumanScores, HUMAN_METRICS};
    use nareor::challenge::make_ordering_instance;
    use nareor::corpus::{self, PosDoc};
    use nareor::jsonl::{write_jsonl, OrderRecord, OrderingPrediction, Prediction};
    use nareor::metrics::{score_outputs, split_sentences, ScoreOptions};
    use nareor::{seed, synthesis};
    use rand::Rng;

    pub fn write_inputs(dir: &Path) {
        let fixtures = super::stories(40, 21);
        let stories: Vec<_> = fixtures.iter().map(|(s, _)| s.clone()).collect();
        let docs: Vec<_> = fixtures.iter().map(|(_, d)| d.clone()).collect();
        let pairs = super::pairs(40, 21);
        let mut rng = seed::rng_for(21, &["workspace"]);

        write_jsonl(dir.join("stories.jsonl"), &stories).unwrap();
        write_jsonl(dir.join("coref.jsonl"), &docs).unwrap();
        write_jsonl(dir.join("pairs.jsonl"), &pairs).unwrap();
        let orders: Vec<OrderRecord> = pairs
            .iter()
            .map(|p| OrderRecord {
                id: p.id().to_string(),
                order: p.target_order.clone(),
            })
            .collect();
        write_jsonl(dir.join("orders.jsonl"), &orders).unwrap();

        let predictions: Vec<Prediction> = pairs
            .iter()
            .map(|p| {
                let mut text = synthesis::naive_reorder(&p.story, &p.target_order).unwrap().text();
                if rng.gen_bool(0.5) {
                    text = text.replacen(" the ", " a ", 1);
                }
                Prediction {
                    id: p.id().to_string(),
                    output: text,
                }
            })
            .collect();
        write_jsonl(dir.join("predictions.jsonl"), &predictions).unwrap();

        let mut embeddings = Vec::new();
        for (p, pred) in pairs.iter().zip(&predictions) {
            embeddings.extend(super::embed(&corpus::original_id(p.id()), &p.story.sentences));
            embeddings.extend(super::embed(&corpus::prediction_id(p.id()), &split_sentences(&pred.output)));
            for r in &p.references {
                embeddings.extend(super::embed(&r.id, &r.sentences));
            }
        }
        write_jsonl(dir.join("embeddings.jsonl"), &embeddings).unwrap();
        let store = corpus::EmbeddingStore::new(embeddings);
        let report = score_outputs(&predictions, &pairs, Some(&store), ScoreOptions::default()).unwrap();
        write_jsonl(dir.join("scores.jsonl"), &report.per_example).unwrap();

        let human: Vec<HumanScores> = pairs
            .iter()
            .map(|p| HumanScores {
                id: p.id().to_string(),
                scores: HUMAN_METRICS.iter().map(|m| (m.to_string(), rng.gen_range(1..=5) as f64)).collect(),
            })
            .collect();
        write_jsonl(dir.join("human.jsonl"), &human).unwrap();

        let pos: Vec<PosDoc> = pairs
            .iter()
            .map(|p| PosDoc {
                id: p.id().to_string(),
                tags: p.references[0]
                    .sentences
                    .iter()
                    .map(|s| {
                        s.split_whitespace()
                            .map(|w| (w.to_string(), if w.ends_with("ed") { "VBD" } else { "NN" }.to_string()))
                            .collect()
                    })
                    .collect(),
            })
            .collect();
        write_jsonl(dir.join("pos.jsonl"), &pos).unwrap();

        let changes: Vec<ChangeAnnotation> = pairs
            .iter()
            .map(|p| ChangeAnnotation {
                id: p.id().to_string(),
                flags: (0..p.story.len())
                    .map(|_| ChangeFlags {
                        ellipsis: rng.gen_bool(0.2),
                        tense: rng.gen_bool(0.3),
                        timex: rng.gen_bool(0.5),
                        coreference: rng.gen_bool(0.4),
                    })
                    .collect(),
            })
            .collect();
        write_jsonl(dir.join("changes.jsonl"), &changes).unwrap();

        let instances: Vec<_> = stories.iter().map(|s| make_ordering_instance(s, 21).unwrap()).collect();
        write_jsonl(dir.join("instances.jsonl"), &instances).unwrap();
        let guesses: Vec<OrderingPrediction> = instances
            .iter()
            .map(|i| OrderingPrediction {
                id: i.id.clone(),
                pred_order: super::random_order(i.gold_order.len(), &mut rng),
            })
            .collect();
        write_jsonl(dir.join("ordering_predictions.jsonl"), &guesses).unwrap();

        for (name, offset, count) in [("train", 0, 60), ("dev", 1000, 15), ("test", 2000, 15)] {
            let mut csv = String::from("storyid,storytitle,sentence1,sentence2,sentence3,sentence4,sentence5\n");
            for k in 0..count {
                let id = offset + k;
                let s: Vec<String> = (1..=5).map(|j| format!("Sentence {j} of story {id}.")).collect();
                csv.push_str(&format!("r{id},Title {id},{}\n", s.join(",")));
            }
            fs::write(dir.join(format!("{name}.csv")), csv).unwrap();
        }
    }

    /// (name, arguments) of one invocation per subcommand variant. `{in}`
    /// and `{out}` stand for the input and output directories.
    pub const INVOCATIONS: &[(&str, &str)] = &[
        ("sample-orders", "sample-orders --corpus {in}/stories.jsonl --out {out}/orders.jsonl --seed 7"),
        ("naive-reorder", "naive-reorder --corpus {in}/stories.jsonl --orders {in}/orders.jsonl --out {out}/naive.jsonl"),
        ("noise", "noise --corpus {in}/stories.jsonl --out {out}/noise.jsonl --seed 7"),
        ("noise-reordered", "noise --corpus {in}/stories.jsonl --orders {in}/orders.jsonl --mode reordered --out {out}/noise_r.jsonl --seed 7"),
        ("make-train-d1", "make-train --method denoise --stage 1 --corpus {in}/stories.jsonl --out {out}/d1.jsonl --seed 7"),
        ("make-train-d2", "make-train --method denoise --stage 2 --corpus {in}/pairs.jsonl --out {out}/d2.jsonl --seed 7"),
        ("make-train-r1", "make-train --method reorder --stage 1 --corpus {in}/stories.jsonl --orders {in}/orders.jsonl --coref {in}/coref.jsonl --out {out}/r1.jsonl --seed 7"),
        ("make-train-r2", "make-train --method reorder --stage 2 --corpus {in}/pairs.jsonl --coref {in}/coref.jsonl --out {out}/r2.jsonl --seed 7"),
        ("encode", "encode --corpus {in}/pairs.jsonl --coref {in}/coref.jsonl --out {out}/encoded.jsonl"),
        ("score", "score --predictions {in}/predictions.jsonl --gold {in}/pairs.jsonl --embeddings {in}/embeddings.jsonl --corpus-bleu --out {out}/scores.jsonl"),
        ("analyze", "analyze --corpus {in}/pairs.jsonl --pos {in}/pos.jsonl --changes {in}/changes.jsonl --out {out}/stats.json"),
        ("correlate", "correlate --scores {in}/scores.jsonl --human {in}/human.jsonl --n-perm 300 --out {out}/correlations.jsonl --seed 7"),
        ("challenge", "challenge --gold {in}/pairs.jsonl --out {out}/challenge --seed 7"),
        ("score-ordering", "score-ordering --instances {in}/instances.jsonl --predictions {in}/ordering_predictions.jsonl --out {out}/ordering.jsonl"),
        ("splits", "splits --train {in}/train.csv --dev {in}/dev.csv --test {in}/test.csv --train-size 20 --dev-size 5 --test-size 5 --out {out}/splits.jsonl --seed 7"),
    ];

    pub fn args(template: &str, input: &Path, out: &Path) -> Vec<String> {
        template
            .split_whitespace()
            .map(|a| a.replace("{in}", input.to_str().unwrap()).replace("{out}", out.to_str().unwrap()))
            .collect()
    }

    pub fn nareor(args: &[String]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_nareor")).args(args).output().unwrap()
    }

    /// Every file under `dir` with its bytes, sorted by relative path.
    pub fn snapshot(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
        let mut out = Vec::new();
        let mut stack = vec![dir.to_path_buf()];
        while let Some(d) = stack.pop() {
            for entry in fs::read_dir(&d).unwrap() {
                let p = entry.unwrap().path();
                if p.is_dir() {
                    stack.push(p);
                } else {
                    out.push((p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap()));
                }
            }
        }
        out.sort();
        out
    }

    /// Runs one invocation under several job counts and repeats, returning
    /// an error message when any output differs or the command fails.
    pub fn check_determinism(input: &Path, scratch: &Path, name: &str, template: &str) -> Result<(), String> {
        let mut first: Option<Vec<(PathBuf, Vec<u8>)>> = None;
        for jobs in [1, 8] {
            for rep in 0..2 {
                let out = scratch.join(format!("{name}-j{jobs}-{rep}"));
                fs::create_dir_all(&out).unwrap();
                let mut a = args(template, input, &out);
                a.extend(["--jobs".to_string(), jobs.to_string()]);
                let o = nareor(&a);
                if !o.status.success() {
                    return Err(format!("{name} failed: {}", String::from_utf8_lossy(&o.stderr)));
                }
                let snap = snapshot(&out);
                if snap.is_empty() {
                    return Err(format!("{name} wrote nothing"));
                }
                match &first {
                    None => first = Some(snap),
                    Some(f) if *f != snap => return Err(format!("{name} output differs at jobs={jobs} rep={rep}")),
                    _ => {}
                }
            }
        }
        Ok(())
    }
}
