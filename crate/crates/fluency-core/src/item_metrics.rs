//! Item-level analysis: production-frequency tables, Zipf fits, lexical-norm
//! correlations, and stepwise regression.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{FluencyDataset, NormVariable, NormsTable};
use crate::error::{Error, Result};
use crate::stats;

/// Production counts per distinct valid word. After screening each
/// participant contributes at most one occurrence per word, so a word's
/// count equals the number of participants producing it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTable {
    pub counts: BTreeMap<String, u32>,
}

impl FrequencyTable {
    /// Words with counts, ranked by descending count; ties break
    /// lexicographically. Ranks are the 1-based positions in this order.
    pub fn ranked(&self) -> Vec<(&str, u32)> {
        let mut items: Vec<(&str, u32)> = self
            .counts
            .iter()
            .map(|(w, c)| (w.as_str(), *c))
            .collect();
        items.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        items
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Count productions of each distinct valid word across participants.
pub fn frequencies(dataset: &FluencyDataset) -> Result<FrequencyTable> {
    let mut counts: BTreeMap<String, u32> = BTreeMap::new();
    for record in &dataset.responses {
        if record.status == crate::corpus::ResponseStatus::Valid {
            *counts.entry(record.word.clone()).or_insert(0) += 1;
        }
    }
    if counts.is_empty() {
        return Err(Error::EmptyDataset(dataset.source_id.clone()));
    }
    Ok(FrequencyTable { counts })
}

/// Power-law fit of the rank-frequency distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZipfFit {
    /// Scaling exponent (negated slope of the log-log regression).
    pub alpha: f64,
    pub r2: f64,
    pub n_points: usize,
}

/// Fit ln(count) on ln(rank) by least squares over counts ordered by rank
/// (index 0 is rank 1). Errors when fewer than 2 points or when all counts
/// are equal (zero variance in ln count).
pub fn fit_rank_counts(counts_by_rank: &[f64]) -> Result<ZipfFit> {
    if counts_by_rank.len() < 2 {
        return Err(Error::DegenerateFit(
            "Zipf fit needs at least 2 ranked counts".into(),
        ));
    }
    if counts_by_rank.iter().any(|&c| c <= 0.0) {
        return Err(Error::invalid("Zipf fit requires positive counts".into()));
    }
    let ln_rank: Vec<f64> = (1..=counts_by_rank.len()).map(|r| (r as f64).ln()).collect();
    let ln_count: Vec<f64> = counts_by_rank.iter().map(|c| c.ln()).collect();
    let fit = stats::simple_linear(&ln_rank, &ln_count)?;
    Ok(ZipfFit {
        alpha: -fit.slope,
        r2: fit.r2,
        n_points: counts_by_rank.len(),
    })
}

/// Zipf fit over a production-frequency table.
pub fn zipf_fit(table: &FrequencyTable) -> Result<ZipfFit> {
    let counts: Vec<f64> = table.ranked().iter().map(|(_, c)| f64::from(*c)).collect();
    fit_rank_counts(&counts)
}

/// Pearson correlation of production count with one lexical variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariableCorrelation {
    pub variable: NormVariable,
    pub r: f64,
    pub p: f64,
    pub n: usize,
}

/// Correlations of production frequency with the six lexical variables.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    pub results: Vec<VariableCorrelation>,
    /// Variables skipped, with the reason (too few pairs, zero variance).
    pub skipped: Vec<(NormVariable, String)>,
}

/// Pearson correlation between production count and each norm variable with
/// pairwise deletion of missing values. Variables with fewer than 3 paired
/// observations or zero variance are skipped with a warning.
pub fn norm_correlations(table: &FrequencyTable, norms: &NormsTable) -> CorrelationTable {
    let ranked = table.ranked();
    let mut out = CorrelationTable::default();
    for variable in NormVariable::ALL {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (word, count) in &ranked {
            if let Some(value) = norms.get(word).and_then(|e| e.get(variable)) {
                xs.push(f64::from(*count));
                ys.push(value);
            }
        }
        if xs.len() < 3 {
            out.skipped.push((
                variable,
                format!("only {} paired observations (need 3)", xs.len()),
            ));
            continue;
        }
        match stats::pearson_test(&ys, &xs) {
            Ok(c) => out.results.push(VariableCorrelation {
                variable,
                r: c.r,
                p: c.p,
                n: c.n,
            }),
            Err(e) => out.skipped.push((variable, e.to_string())),
        }
    }
    out
}

/// One retained term of a stepwise regression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetainedTerm {
    pub variable: NormVariable,
    pub beta_std: f64,
    pub t: f64,
    pub p: f64,
}

/// Stepwise OLS model over standardized variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionModel {
    pub retained: Vec<RetainedTerm>,
    pub adj_r2: f64,
    pub f_stat: f64,
    pub f_p: f64,
    /// (model df, residual df)
    pub df: (usize, usize),
    pub n: usize,
    pub warnings: Vec<String>,
}

const ENTRY_ALPHA: f64 = 0.05;
const REMOVAL_ALPHA: f64 = 0.10;
const MIN_COMPLETE_CASES: usize = 10;

/// Bidirectional stepwise regression of standardized production frequency on
/// standardized lexical variables (entry p < .05, removal p > .10).
///
/// Variables absent from the norms for every table word drop out of
/// candidacy; complete cases are taken across the remaining candidates.
/// When no predictor enters, the model is empty with `adj_r2 = 0` and a
/// warning.
pub fn stepwise_regression(table: &FrequencyTable, norms: &NormsTable) -> Result<RegressionModel> {
    let ranked = table.ranked();
    let mut warnings = Vec::new();

    // candidate variables: present for at least one table word
    let candidates: Vec<NormVariable> = NormVariable::ALL
        .into_iter()
        .filter(|v| {
            ranked
                .iter()
                .any(|(w, _)| norms.get(w).and_then(|e| e.get(*v)).is_some())
        })
        .collect();
    if candidates.is_empty() {
        return Err(Error::invalid(
            "no lexical variable has any observation for this table".into(),
        ));
    }

    // complete cases across all candidates
    let mut response = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); candidates.len()];
    for (word, count) in &ranked {
        let entry = match norms.get(word) {
            Some(e) => e,
            None => continue,
        };
        let values: Option<Vec<f64>> = candidates.iter().map(|v| entry.get(*v)).collect();
        if let Some(values) = values {
            response.push(f64::from(*count));
            for (col, value) in columns.iter_mut().zip(values) {
                col.push(value);
            }
        }
    }
    let n = response.len();
    if n < MIN_COMPLETE_CASES {
        return Err(Error::invalid(format!(
            "stepwise regression needs at least {MIN_COMPLETE_CASES} complete-case words, got {n}"
        )));
    }

    // standardize everything; constant columns leave candidacy
    let y = stats::standardize(&response)?;
    let mut usable: Vec<(NormVariable, Vec<f64>)> = Vec::new();
    for (variable, column) in candidates.iter().zip(columns) {
        match stats::standardize(&column) {
            Ok(z) => usable.push((*variable, z)),
            Err(_) => warnings.push(format!(
                "{} is constant across complete cases; skipped",
                variable.label()
            )),
        }
    }

    let mut included: Vec<usize> = Vec::new();
    for _ in 0..100 {
        let mut changed = false;

        // forward: candidate with the smallest coefficient p-value enters
        let mut best: Option<(usize, f64)> = None;
        for (idx, (_, column)) in usable.iter().enumerate() {
            if included.contains(&idx) {
                continue;
            }
            let mut cols: Vec<Vec<f64>> =
                included.iter().map(|&i| usable[i].1.clone()).collect();
            cols.push(column.clone());
            if let Ok(fit) = stats::ols(&cols, &y) {
                let p = fit.p[cols.len()]; // candidate is the last slope
                if best.map_or(true, |(_, bp)| p < bp) {
                    best = Some((idx, p));
                }
            }
        }
        if let Some((idx, p)) = best {
            if p < ENTRY_ALPHA {
                included.push(idx);
                changed = true;
            }
        }

        // backward: largest p above the removal threshold leaves
        if !included.is_empty() {
            let cols: Vec<Vec<f64>> = included.iter().map(|&i| usable[i].1.clone()).collect();
            if let Ok(fit) = stats::ols(&cols, &y) {
                let mut worst: Option<(usize, f64)> = None;
                for (pos, _) in included.iter().enumerate() {
                    let p = fit.p[pos + 1];
                    if worst.map_or(true, |(_, wp)| p > wp) {
                        worst = Some((pos, p));
                    }
                }
                if let Some((pos, p)) = worst {
                    if p > REMOVAL_ALPHA {
                        included.remove(pos);
                        changed = true;
                    }
                }
            }
        }

        if !changed {
            break;
        }
    }

    if included.is_empty() {
        warnings.push("no predictor met the entry criterion".into());
        return Ok(RegressionModel {
            retained: vec![],
            adj_r2: 0.0,
            f_stat: 0.0,
            f_p: 1.0,
            df: (0, n.saturating_sub(1)),
            n,
            warnings,
        });
    }

    included.sort_unstable(); // fixed variable order in the report
    let cols: Vec<Vec<f64>> = included.iter().map(|&i| usable[i].1.clone()).collect();
    let fit = stats::ols(&cols, &y)?;
    let retained = included
        .iter()
        .enumerate()
        .map(|(pos, &i)| RetainedTerm {
            variable: usable[i].0,
            beta_std: fit.coef[pos + 1],
            t: fit.t[pos + 1],
            p: fit.p[pos + 1],
        })
        .collect();
    Ok(RegressionModel {
        retained,
        adj_r2: fit.adj_r2,
        f_stat: fit.f_stat,
        f_p: fit.f_p,
        df: fit.df,
        n,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{
        screen_responses, FluencyDataset, NormEntry, Participant, ResponseRecord, ResponseStatus,
        ScreenOptions,
    };

    fn dataset(words_per_participant: &[&[&str]]) -> FluencyDataset {
        let participants: Vec<Participant> = (0..words_per_participant.len())
            .map(|i| Participant {
                id: format!("p{i}"),
                age: 30,
                education_label: "BA".into(),
                education_years: 16,
                n_correct: 5,
            })
            .collect();
        let mut responses = Vec::new();
        for (i, words) in words_per_participant.iter().enumerate() {
            for (j, word) in words.iter().enumerate() {
                responses.push(ResponseRecord {
                    participant_id: format!("p{i}"),
                    position: j as u32 + 1,
                    raw_token: (*word).to_string(),
                    word: String::new(),
                    status: ResponseStatus::OtherError,
                });
            }
        }
        screen_responses(&mut responses, 'f', &ScreenOptions::default());
        FluencyDataset::new("test", 'f', participants, responses).unwrap()
    }

    #[test]
    fn frequencies_count_producers() {
        let ds = dataset(&[&["fun", "fire"], &["fun"]]);
        let table = frequencies(&ds).unwrap();
        assert_eq!(table.counts["fun"], 2);
        assert_eq!(table.counts["fire"], 1);
    }

    #[test]
    fn frequencies_permutation_invariant() {
        let a = frequencies(&dataset(&[&["fun", "fire"], &["fan"]])).unwrap();
        let b = frequencies(&dataset(&[&["fan"], &["fun", "fire"]])).unwrap();
        assert_eq!(a.counts, b.counts);
    }

    #[test]
    fn frequencies_empty_dataset_errors() {
        let ds = dataset(&[&["banana"]]);
        assert!(frequencies(&ds).is_err());
    }

    #[test]
    fn ranked_breaks_ties_lexicographically() {
        let table = FrequencyTable {
            counts: [("fig".to_string(), 2), ("fan".to_string(), 2), ("fun".to_string(), 5)]
                .into_iter()
                .collect(),
        };
        let ranked = table.ranked();
        assert_eq!(
            ranked.iter().map(|(w, _)| *w).collect::<Vec<_>>(),
            vec!["fun", "fan", "fig"]
        );
    }

    #[test]
    fn zipf_exact_power_law() {
        // exact f(r) = C / r^alpha is a perfect line in log-log space
        for alpha in [0.5, 1.0, 1.7] {
            let counts: Vec<f64> = (1..=50)
                .map(|r| 1000.0 * (r as f64).powf(-alpha))
                .collect();
            let fit = fit_rank_counts(&counts).unwrap();
            assert!((fit.alpha - alpha).abs() < 1e-10, "alpha {alpha}");
            assert!((fit.r2 - 1.0).abs() < 1e-10);
            assert_eq!(fit.n_points, 50);
        }
    }

    #[test]
    fn zipf_integer_table_exact() {
        // 2520 = lcm(1..10), so 2520/r is integral for r = 1..10
        let counts: BTreeMap<String, u32> = (1..=10u32)
            .map(|r| (format!("w{r:02}"), 2520 / r))
            .collect();
        let fit = zipf_fit(&FrequencyTable { counts }).unwrap();
        assert!((fit.alpha - 1.0).abs() < 1e-10);
        assert!((fit.r2 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn zipf_scale_invariance() {
        let counts: Vec<f64> = (1..=30).map(|r| 500.0 * (r as f64).powf(-0.9)).collect();
        let base = fit_rank_counts(&counts).unwrap();
        let scaled: Vec<f64> = counts.iter().map(|c| c * 7.5).collect();
        let fit = fit_rank_counts(&scaled).unwrap();
        assert!((fit.alpha - base.alpha).abs() < 1e-10);
        assert!((fit.r2 - base.r2).abs() < 1e-10);
    }

    #[test]
    fn zipf_degenerate_counts() {
        assert!(fit_rank_counts(&[5.0, 5.0, 5.0]).is_err());
        assert!(fit_rank_counts(&[5.0]).is_err());
    }

    fn norms_with(entries: &[(&str, NormEntry)]) -> NormsTable {
        NormsTable {
            entries: entries
                .iter()
                .map(|(w, e)| ((*w).to_string(), e.clone()))
                .collect(),
        }
    }

    #[test]
    fn correlation_perfect_with_log_wf() {
        let counts: BTreeMap<String, u32> =
            [("fa", 1u32), ("fb", 2), ("fc", 3), ("fd", 4)]
                .into_iter()
                .map(|(w, c)| (w.to_string(), c))
                .collect();
        let norms = norms_with(
            &counts
                .iter()
                .map(|(w, c)| {
                    (
                        w.as_str(),
                        NormEntry {
                            log_wf: Some(f64::from(*c)),
                            ..Default::default()
                        },
                    )
                })
                .collect::<Vec<_>>(),
        );
        let table = FrequencyTable { counts };
        let out = norm_correlations(&table, &norms);
        let wf = out
            .results
            .iter()
            .find(|c| c.variable == NormVariable::LogWordFrequency)
            .unwrap();
        assert!((wf.r - 1.0).abs() < 1e-12);
        assert_eq!(wf.n, 4);
        // the other five variables have no observations
        assert_eq!(out.skipped.len(), 5);
    }

    #[test]
    fn correlation_skips_constant_variable() {
        let counts: BTreeMap<String, u32> = [("fa", 1u32), ("fb", 2), ("fc", 3)]
            .into_iter()
            .map(|(w, c)| (w.to_string(), c))
            .collect();
        let norms = norms_with(&[
            ("fa", NormEntry { length: Some(3), ..Default::default() }),
            ("fb", NormEntry { length: Some(3), ..Default::default() }),
            ("fc", NormEntry { length: Some(3), ..Default::default() }),
        ]);
        let out = norm_correlations(&FrequencyTable { counts }, &norms);
        assert!(out.results.is_empty());
        assert!(out
            .skipped
            .iter()
            .any(|(v, _)| *v == NormVariable::Length));
    }

    #[test]
    fn stepwise_perfect_predictor() {
        // response identically equal to log_wf: retained alone, adj R^2 ~ 1
        let counts: BTreeMap<String, u32> = (1..=20u32)
            .map(|i| (format!("fw{i:02}"), i))
            .collect();
        let norms = norms_with(
            &counts
                .iter()
                .map(|(w, c)| {
                    (
                        w.as_str(),
                        NormEntry {
                            log_wf: Some(f64::from(*c)),
                            aoa: Some(f64::from((*c * 7) % 13)),
                            ..Default::default()
                        },
                    )
                })
                .collect::<Vec<_>>(),
        );
        let model = stepwise_regression(&FrequencyTable { counts }, &norms).unwrap();
        assert_eq!(model.retained.len(), 1);
        assert_eq!(model.retained[0].variable, NormVariable::LogWordFrequency);
        assert!(model.adj_r2 > 0.999);
    }

    #[test]
    fn stepwise_requires_complete_cases() {
        let counts: BTreeMap<String, u32> =
            [("fa", 1u32), ("fb", 2)].into_iter().map(|(w, c)| (w.to_string(), c)).collect();
        let norms = norms_with(&[("fa", NormEntry { log_wf: Some(1.0), ..Default::default() })]);
        assert!(stepwise_regression(&FrequencyTable { counts }, &norms).is_err());
    }
}
