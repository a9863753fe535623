//! Pearson and Spearman correlation with permutation-test p-values, and the
//! automatic-versus-human correlation table built on them.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

pub const DEFAULT_PERMUTATIONS: usize = 10_000;

/// Tolerance when comparing permuted statistics with the observed one, so
/// permutations that tie the observed value up to rounding count as extreme.
const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub pearson: f64,
    pub spearman: f64,
    pub p_pearson: f64,
    pub p_spearman: f64,
}

fn centered(v: &[f64]) -> Result<Vec<f64>> {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let c: Vec<f64> = v.iter().map(|x| x - mean).collect();
    if c.iter().all(|&x| x == 0.0) {
        return Err(Error::InvalidArgument("zero variance".into()));
    }
    Ok(c)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_lengths(x, y)?;
    let (cx, cy) = (centered(x)?, centered(y)?);
    Ok(dot(&cx, &cy) / (norm(&cx) * norm(&cy)))
}

/// 1-based ranks with ties sharing their average rank.
pub fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_lengths(x, y)?;
    pearson(&average_ranks(x), &average_ranks(y))
}

fn check_lengths(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "correlation needs at least 3 paired values, got {}",
            x.len()
        )));
    }
    Ok(())
}

/// Both coefficients with two-sided p-values from `n_perm` seeded shuffles
/// of `y`: `p = (1 + #{|r_perm| ≥ |r_obs|}) / (1 + n_perm)`.
pub fn correlate(x: &[f64], y: &[f64], n_perm: usize, seed: u64) -> Result<Correlation> {
    check_lengths(x, y)?;
    let (cx, mut cy) = (centered(x)?, centered(y)?);
    let (rx, mut ry) = (centered(&average_ranks(x))?, centered(&average_ranks(y))?);
    let (nx, ny, nrx, nry) = (norm(&cx), norm(&cy), norm(&rx), norm(&ry));
    let pearson = dot(&cx, &cy) / (nx * ny);
    let spearman = dot(&rx, &ry) / (nrx * nry);

    let mut rng = seed::rng_from_seed(seed);
    let mut perm: Vec<usize> = (0..y.len()).collect();
    let (orig_y, orig_ry) = (cy.clone(), ry.clone());
    let (mut hits_p, mut hits_s) = (0usize, 0usize);
    for _ in 0..n_perm {
        perm.shuffle(&mut rng);
        for (slot, &k) in perm.iter().enumerate() {
            cy[slot] = orig_y[k];
            ry[slot] = orig_ry[k];
        }
        if (dot(&cx, &cy) / (nx * ny)).abs() >= pearson.abs() - TIE_EPS {
            hits_p += 1;
        }
        if (dot(&rx, &ry) / (nrx * nry)).abs() >= spearman.abs() - TIE_EPS {
            hits_s += 1;
        }
    }
    let p = |hits: usize| (hits + 1) as f64 / (n_perm + 1) as f64;
    Ok(Correlation {
        pearson,
        spearman,
        p_pearson: p(hits_p),
        p_spearman: p(hits_s),
    })
}

pub const HUMAN_METRICS: [&str; 5] = ["fluency", "coherence", "logic", "plot_pres", "interest"];

/// Ratings of one story output (1 to 5 each).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHuman")]
pub struct HumanScores {
    pub id: String,
    pub scores: BTreeMap<String, f64>,
}

#[derive(Deserialize)]
struct RawHuman {
    id: String,
    scores: BTreeMap<String, f64>,
}

impl TryFrom<RawHuman> for HumanScores {
    type Error = Error;

    fn try_from(raw: RawHuman) -> Result<Self> {
        for (k, v) in &raw.scores {
            if !HUMAN_METRICS.contains(&k.as_str()) {
                return Err(Error::InvalidArgument(format!("{}: unknown human metric {k:?}", raw.id)));
            }
            if !(1.0..=5.0).contains(v) {
                return Err(Error::InvalidArgument(format!("{}: {k} = {v} outside [1, 5]", raw.id)));
            }
        }
        Ok(HumanScores {
            id: raw.id,
            scores: raw.scores,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCell {
    pub automatic: String,
    pub human: String,
    pub n: usize,
    #[serde(flatten)]
    pub correlation: Correlation,
}

/// Correlates each automatic metric with each human metric over the ids
/// present in both. Several human records for one id are averaged first.
/// Pairings with fewer than 3 ids or constant values are omitted.
pub fn correlation_table(
    automatic: &BTreeMap<String, BTreeMap<String, f64>>,
    human: &[HumanScores],
    automatic_metrics: &[&str],
    n_perm: usize,
    seed: u64,
) -> Vec<CorrelationCell> {
    let mut sums: BTreeMap<&str, BTreeMap<&str, (f64, usize)>> = BTreeMap::new();
    for h in human {
        for (metric, v) in &h.scores {
            let slot = sums.entry(h.id.as_str()).or_default().entry(metric.as_str()).or_insert((0.0, 0));
            slot.0 += v;
            slot.1 += 1;
        }
    }
    let mut cells = Vec::new();
    for &auto in automatic_metrics {
        for &hm in HUMAN_METRICS.iter() {
            let (mut xs, mut ys) = (Vec::new(), Vec::new());
            for (id, per_metric) in &sums {
                let (Some(&(s, c)), Some(a)) = (per_metric.get(hm), automatic.get(*id).and_then(|m| m.get(auto))) else {
                    continue;
                };
                xs.push(*a);
                ys.push(s / c as f64);
            }
            let cell_seed = seed::derive_seed(seed, &["correlate", auto, hm]);
            if let Ok(correlation) = correlate(&xs, &ys, n_perm, cell_seed) {
                cells.push(CorrelationCell {
                    automatic: auto.to_string(),
                    human: hm.to_string(),
                    n: xs.len(),
                    correlation,
                });
            }
        }
    }
    cells
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perfect_correlations() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let c = correlate(&x, &y, 100, 1).unwrap();
        assert!((c.pearson - 1.0).abs() < 1e-12 && (c.spearman - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let c = correlate(&x, &neg, 100, 1).unwrap();
        assert!((c.pearson + 1.0).abs() < 1e-12 && (c.spearman + 1.0).abs() < 1e-12);
    }

    #[test]
    fn three_point_case() {
        let c = correlate(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0], 50, 0).unwrap();
        assert!((c.pearson - 0.5).abs() < 1e-12);
        assert!((c.spearman - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ties_share_ranks() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 5.0]), [2.5, 4.0, 2.5, 1.0]);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(correlate(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0], 10, 0).is_err());
        assert!(correlate(&[1.0, 2.0], &[1.0, 2.0], 10, 0).is_err());
        assert!(correlate(&[1.0, 2.0, 3.0], &[1.0, 2.0], 10, 0).is_err());
    }

    #[test]
    fn p_values_are_bounded_and_seeded() {
        let x = [0.3, 0.1, 0.7, 0.2, 0.9, 0.5];
        let y = [2.0, 1.0, 4.0, 3.0, 5.0, 3.5];
        let a = correlate(&x, &y, 500, 9).unwrap();
        assert_eq!(a, correlate(&x, &y, 500, 9).unwrap());
        for p in [a.p_pearson, a.p_spearman] {
            assert!((1.0 / 501.0..=1.0).contains(&p));
        }
    }

    #[test]
    fn human_scores_validated() {
        assert!(serde_json::from_str::<HumanScores>(r#"{"id":"a","scores":{"fluency":4.5}}"#).is_ok());
        assert!(serde_json::from_str::<HumanScores>(r#"{"id":"a","scores":{"fluency":7}}"#).is_err());
        assert!(serde_json::from_str::<HumanScores>(r#"{"id":"a","scores":{"charm":3}}"#).is_err());
    }

    #[test]
    fn table_joins_on_ids() {
        let auto: BTreeMap<String, BTreeMap<String, f64>> = (0..6)
            .map(|i| (format!("s{i}"), BTreeMap::from([("bleu".to_string(), i as f64 / 10.0)])))
            .collect();
        let human: Vec<HumanScores> = (0..6)
            .flat_map(|i| {
                [1.0, 3.0].map(|off| HumanScores {
                    id: format!("s{i}"),
                    scores: BTreeMap::from([("fluency".to_string(), (1.0 + i as f64 * 0.5 + off) / 2.0)]),
                })
            })
            .collect();
        let cells = correlation_table(&auto, &human, &["bleu"], 200, 4);
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].n, 6);
        assert!((cells[0].correlation.pearson - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn invariances(
            pts in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 4..25),
            scale in 0.1f64..10.0,
            shift in -50.0f64..50.0,
        ) {
            let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
            prop_assume!(centered(&x).is_ok() && centered(&y).is_ok());
            let base = correlate(&x, &y, 0, 0).unwrap();
            let affine: Vec<f64> = x.iter().map(|v| scale * v + shift).collect();
            prop_assert!((pearson(&affine, &y).unwrap() - base.pearson).abs() < 1e-9);
            let monotone: Vec<f64> = x.iter().map(|v| (v / 40.0).exp()).collect();
            prop_assert!((spearman(&monotone, &y).unwrap() - base.spearman).abs() < 1e-12);
        }
    }
}
