//! Participant-level comparison of a simulated dataset against a reference,
//! plus cohort lexical-diversity summaries.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::FluencyDataset;
use crate::error::{Error, Result};

/// Per-config adherence to the reference response counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdherenceReport {
    pub config_id: String,
    pub mae: f64,
    pub mbe: f64,
    pub outlier_ids: Vec<String>,
    /// MAE within threshold and no outliers: eligible for all analyses.
    pub included_full: bool,
    /// MAE within threshold: eligible at least for ensemble sampling.
    pub included_ensemble: bool,
}

/// Thresholds governing config selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionThresholds {
    /// Reference mean valid-response count.
    pub human_mean: f64,
    /// MAE must be within this fraction of the reference mean.
    pub pct: f64,
    /// A simulation is an outlier when |sim - ref| exceeds this.
    pub outlier_limit: u32,
}

impl SelectionThresholds {
    pub fn mae_threshold(&self) -> f64 {
        self.pct * self.human_mean
    }
}

impl Default for SelectionThresholds {
    fn default() -> Self {
        SelectionThresholds {
            human_mean: 0.0,
            pct: 0.10,
            outlier_limit: 5,
        }
    }
}

/// Pair up valid-response counts by participant id. Errors when the two
/// datasets cover different participant sets, listing the difference.
pub fn paired_counts(
    sim: &FluencyDataset,
    reference: &FluencyDataset,
) -> Result<Vec<(String, usize, usize)>> {
    let sim_counts = sim.valid_counts();
    let ref_counts = reference.valid_counts();
    let only_sim: Vec<String> = sim_counts
        .keys()
        .filter(|k| !ref_counts.contains_key(*k))
        .cloned()
        .collect();
    let only_ref: Vec<String> = ref_counts
        .keys()
        .filter(|k| !sim_counts.contains_key(*k))
        .cloned()
        .collect();
    if !only_sim.is_empty() || !only_ref.is_empty() {
        return Err(Error::ParticipantMismatch {
            left: sim.source_id.clone(),
            right: reference.source_id.clone(),
            only_left: only_sim,
            only_right: only_ref,
        });
    }
    Ok(sim_counts
        .into_iter()
        .map(|(id, s)| {
            let r = ref_counts[&id];
            (id, s, r)
        })
        .collect())
}

fn require_nonempty(pairs: &[(String, usize, usize)]) -> Result<()> {
    if pairs.is_empty() {
        return Err(Error::invalid("no participants to compare".into()));
    }
    Ok(())
}

/// Mean absolute error between per-participant valid-response counts.
pub fn mae(sim: &FluencyDataset, reference: &FluencyDataset) -> Result<f64> {
    let pairs = paired_counts(sim, reference)?;
    mae_of_pairs(&pairs)
}

pub fn mae_of_pairs(pairs: &[(String, usize, usize)]) -> Result<f64> {
    require_nonempty(pairs)?;
    let total: f64 = pairs
        .iter()
        .map(|(_, s, r)| (*s as f64 - *r as f64).abs())
        .sum();
    Ok(total / pairs.len() as f64)
}

/// Mean bias error; positive values mean overproduction relative to the
/// reference.
pub fn mbe(sim: &FluencyDataset, reference: &FluencyDataset) -> Result<f64> {
    let pairs = paired_counts(sim, reference)?;
    mbe_of_pairs(&pairs)
}

pub fn mbe_of_pairs(pairs: &[(String, usize, usize)]) -> Result<f64> {
    require_nonempty(pairs)?;
    let total: f64 = pairs.iter().map(|(_, s, r)| *s as f64 - *r as f64).sum();
    Ok(total / pairs.len() as f64)
}

/// Participants whose simulated count deviates from the reference by more
/// than `limit`.
pub fn flag_outliers(
    sim: &FluencyDataset,
    reference: &FluencyDataset,
    limit: u32,
) -> Result<Vec<String>> {
    let pairs = paired_counts(sim, reference)?;
    Ok(outliers_of_pairs(&pairs, limit))
}

pub fn outliers_of_pairs(pairs: &[(String, usize, usize)], limit: u32) -> Vec<String> {
    pairs
        .iter()
        .filter(|(_, s, r)| (*s as i64 - *r as i64).unsigned_abs() > u64::from(limit))
        .map(|(id, _, _)| id.clone())
        .collect()
}

/// Full adherence report for one simulated dataset.
pub fn adherence_report(
    sim: &FluencyDataset,
    reference: &FluencyDataset,
    thresholds: &SelectionThresholds,
) -> Result<AdherenceReport> {
    let pairs = paired_counts(sim, reference)?;
    let mae = mae_of_pairs(&pairs)?;
    let mbe = mbe_of_pairs(&pairs)?;
    let outlier_ids = outliers_of_pairs(&pairs, thresholds.outlier_limit);
    let within = mae <= thresholds.mae_threshold();
    Ok(AdherenceReport {
        config_id: sim.source_id.clone(),
        mae,
        mbe,
        included_full: within && outlier_ids.is_empty(),
        included_ensemble: within,
        outlier_ids,
    })
}

/// Partition of configs by adherence.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SelectionPartition {
    /// MAE within threshold, no outliers.
    pub full_analysis: Vec<String>,
    /// MAE within threshold but with outlier simulations.
    pub ensemble_only: Vec<String>,
    /// MAE beyond threshold.
    pub excluded: Vec<String>,
}

/// Partition adherence reports at `threshold = pct * human_mean` (inclusive
/// boundary).
pub fn select_configs(
    reports: &[AdherenceReport],
    human_mean: f64,
    pct: f64,
) -> SelectionPartition {
    let threshold = pct * human_mean;
    let mut partition = SelectionPartition::default();
    for report in reports {
        if report.mae <= threshold {
            if report.outlier_ids.is_empty() {
                partition.full_analysis.push(report.config_id.clone());
            } else {
                partition.ensemble_only.push(report.config_id.clone());
            }
        } else {
            partition.excluded.push(report.config_id.clone());
        }
    }
    partition
}

/// Cohort lexical-diversity summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiversitySummary {
    /// Distinct valid words.
    pub types: usize,
    /// Words produced by exactly one participant.
    pub idio_types: usize,
    /// All valid responses.
    pub tokens: usize,
    pub ttr: f64,
    pub itttr: f64,
}

impl DiversitySummary {
    /// Ratios from raw counts; both ratios are 0 when their denominator is 0.
    pub fn from_counts(types: usize, idio_types: usize, tokens: usize) -> Self {
        DiversitySummary {
            types,
            idio_types,
            tokens,
            ttr: if tokens > 0 {
                types as f64 / tokens as f64
            } else {
                0.0
            },
            itttr: if types > 0 {
                idio_types as f64 / types as f64
            } else {
                0.0
            },
        }
    }
}

/// Type, idiosyncratic-type, and token counts for a screened dataset.
pub fn diversity(dataset: &FluencyDataset) -> DiversitySummary {
    let mut producers: BTreeMap<&str, usize> = BTreeMap::new();
    let mut tokens = 0usize;
    for id in dataset.participant_ids() {
        for word in dataset.valid_words_of(&id) {
            *producers.entry(word).or_insert(0) += 1;
            tokens += 1;
        }
    }
    let types = producers.len();
    let idio_types = producers.values().filter(|&&c| c == 1).count();
    DiversitySummary::from_counts(types, idio_types, tokens)
}
