//! Ingesting, normalizing, and screening fluency responses, plus lexical
//! norms.
//!
//! A [`FluencyDataset`] is one source's screened responses (the human cohort
//! or one model configuration). Screening walks each participant's responses
//! in production order and marks every record as valid, a repetition, a
//! same-lemma variant, or out of category; analysis downstream only ever
//! counts `valid` records.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One study participant: identity, demographics, and the reference count of
/// correct responses that drives both prompting and adherence metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Participant {
    pub id: String,
    pub age: u32,
    pub education_label: String,
    pub education_years: u32,
    pub n_correct: u32,
}

/// Screening outcome for one produced token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseStatus {
    Valid,
    Repetition,
    LemmaVariant,
    OutOfCategory,
    OtherError,
}

impl fmt::Display for ResponseStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ResponseStatus::Valid => "valid",
            ResponseStatus::Repetition => "repetition",
            ResponseStatus::LemmaVariant => "lemma_variant",
            ResponseStatus::OutOfCategory => "out_of_category",
            ResponseStatus::OtherError => "other_error",
        };
        f.write_str(s)
    }
}

/// One produced token, in production order, with its normalized form and
/// screening status.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub participant_id: String,
    pub position: u32,
    pub raw_token: String,
    pub word: String,
    pub status: ResponseStatus,
}

/// One source's screened fluency responses for a cohort of participants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluencyDataset {
    pub source_id: String,
    pub target_letter: char,
    pub participants: Vec<Participant>,
    pub responses: Vec<ResponseRecord>,
}

impl FluencyDataset {
    /// Construct with validation: participant ids unique, every response
    /// references a known participant, positions unique per participant.
    /// Participants are kept sorted by id and responses by (participant,
    /// position).
    pub fn new(
        source_id: impl Into<String>,
        target_letter: char,
        mut participants: Vec<Participant>,
        mut responses: Vec<ResponseRecord>,
    ) -> Result<Self> {
        participants.sort_by(|a, b| a.id.cmp(&b.id));
        let mut ids = BTreeSet::new();
        for p in &participants {
            if !ids.insert(p.id.clone()) {
                return Err(Error::DuplicateParticipant(p.id.clone()));
            }
            if p.age == 0 {
                return Err(Error::invalid(format!(
                    "participant `{}` has age 0",
                    p.id
                )));
            }
        }
        responses.sort_by(|a, b| {
            (&a.participant_id, a.position).cmp(&(&b.participant_id, b.position))
        });
        let mut seen_pos: BTreeSet<(String, u32)> = BTreeSet::new();
        for r in &responses {
            if !ids.contains(&r.participant_id) {
                return Err(Error::invalid(format!(
                    "response at position {} references unknown participant `{}`",
                    r.position, r.participant_id
                )));
            }
            if !seen_pos.insert((r.participant_id.clone(), r.position)) {
                return Err(Error::invalid(format!(
                    "duplicate position {} for participant `{}`",
                    r.position, r.participant_id
                )));
            }
        }
        Ok(FluencyDataset {
            source_id: source_id.into(),
            target_letter,
            participants,
            responses,
        })
    }

    pub fn participant_ids(&self) -> Vec<String> {
        self.participants.iter().map(|p| p.id.clone()).collect()
    }

    /// Number of valid responses per participant (zero for participants with
    /// none), keyed by id.
    pub fn valid_counts(&self) -> BTreeMap<String, usize> {
        let mut counts: BTreeMap<String, usize> = self
            .participants
            .iter()
            .map(|p| (p.id.clone(), 0))
            .collect();
        for r in &self.responses {
            if r.status == ResponseStatus::Valid {
                *counts.get_mut(&r.participant_id).expect("validated id") += 1;
            }
        }
        counts
    }

    /// Distinct valid words of one participant, in production order.
    pub fn valid_words_of(&self, participant_id: &str) -> Vec<&str> {
        self.responses
            .iter()
            .filter(|r| r.participant_id == participant_id && r.status == ResponseStatus::Valid)
            .map(|r| r.word.as_str())
            .collect()
    }

    /// The set of distinct valid words across the cohort.
    pub fn type_set(&self) -> BTreeSet<&str> {
        self.responses
            .iter()
            .filter(|r| r.status == ResponseStatus::Valid)
            .map(|r| r.word.as_str())
            .collect()
    }

    /// Total number of valid responses.
    pub fn token_count(&self) -> usize {
        self.responses
            .iter()
            .filter(|r| r.status == ResponseStatus::Valid)
            .count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dataset serializes")
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let ds: FluencyDataset =
            serde_json::from_str(&text).map_err(|source| Error::Json {
                path: path.into(),
                source,
            })?;
        // re-validate invariants on anything read from disk
        FluencyDataset::new(ds.source_id, ds.target_letter, ds.participants, ds.responses)
    }
}

/// Lowercase, trim, and strip leading/trailing punctuation. Interior hyphens
/// and apostrophes survive. May return an empty string; the caller decides
/// what that means.
pub fn normalize_word(raw: &str) -> String {
    let lowered = raw.trim().to_lowercase();
    lowered
        .trim_matches(|c: char| !c.is_alphanumeric())
        .to_string()
}

/// Options controlling screening.
#[derive(Debug, Clone, Default)]
pub struct ScreenOptions {
    /// Explicit word -> lemma map; overrides the suffix heuristic.
    pub lemma_map: Option<BTreeMap<String, String>>,
    /// Words treated as out of category (e.g. a proper-noun list).
    pub exclusions: BTreeSet<String>,
}

/// Default lemma heuristic: strip the first matching suffix in the order
/// [ing, ed, es, s, er], keeping at least a 3-letter stem, then undo
/// final-consonant doubling for the vowel-initial suffixes (fitting -> fit).
pub fn default_lemma(word: &str) -> String {
    const SUFFIXES: [&str; 5] = ["ing", "ed", "es", "s", "er"];
    for suffix in SUFFIXES {
        if let Some(stem) = word.strip_suffix(suffix) {
            if stem.chars().count() < 3 {
                continue;
            }
            if matches!(suffix, "ing" | "ed" | "er") {
                let chars: Vec<char> = stem.chars().collect();
                let n = chars.len();
                if n >= 2 && chars[n - 1] == chars[n - 2] && is_consonant(chars[n - 1]) {
                    return chars[..n - 1].iter().collect();
                }
            }
            return stem.to_string();
        }
    }
    word.to_string()
}

fn is_consonant(c: char) -> bool {
    c.is_alphabetic() && !matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

fn lemma_of(word: &str, options: &ScreenOptions) -> String {
    match &options.lemma_map {
        Some(map) => map.get(word).cloned().unwrap_or_else(|| word.to_string()),
        None => default_lemma(word),
    }
}

/// Screen records in place. Records must be grouped by participant and
/// ordered by position within each participant; earlier decisions are never
/// revisited. The first occurrence of each lemma is valid when it starts
/// with the target letter and is not numeric; exact re-productions become
/// repetitions and later same-lemma words become lemma variants.
pub fn screen_responses(
    records: &mut [ResponseRecord],
    target_letter: char,
    options: &ScreenOptions,
) {
    let letter = target_letter.to_lowercase().next().unwrap_or(target_letter);
    let mut current: Option<String> = None;
    let mut seen_words: BTreeSet<String> = BTreeSet::new();
    let mut seen_lemmas: BTreeSet<String> = BTreeSet::new();
    for record in records.iter_mut() {
        if current.as_deref() != Some(record.participant_id.as_str()) {
            current = Some(record.participant_id.clone());
            seen_words.clear();
            seen_lemmas.clear();
        }
        let word = normalize_word(&record.raw_token);
        record.word = word.clone();
        record.status = if word.is_empty() {
            ResponseStatus::OtherError
        } else if word.chars().all(|c| c.is_ascii_digit()) {
            ResponseStatus::OutOfCategory
        } else if options.exclusions.contains(&word) {
            ResponseStatus::OutOfCategory
        } else if !word.starts_with(letter) {
            ResponseStatus::OutOfCategory
        } else if seen_words.contains(&word) {
            ResponseStatus::Repetition
        } else if seen_lemmas.contains(&lemma_of(&word, options)) {
            ResponseStatus::LemmaVariant
        } else {
            seen_words.insert(word.clone());
            seen_lemmas.insert(lemma_of(&word, options));
            ResponseStatus::Valid
        };
    }
}

fn read_csv(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn field<'a>(
    record: &'a csv::StringRecord,
    idx: usize,
    name: &str,
    path: &Path,
    line: u64,
) -> Result<&'a str> {
    record
        .get(idx)
        .ok_or_else(|| Error::malformed(path, line, format!("missing `{name}` column")))
}

fn parse_num<T: std::str::FromStr>(s: &str, name: &str, path: &Path, line: u64) -> Result<T> {
    s.parse()
        .map_err(|_| Error::malformed(path, line, format!("invalid `{name}` value `{s}`")))
}

/// Load participants and responses CSVs, screen them, and assemble a
/// validated dataset.
///
/// Expected headers: `id,age,education_label,education_years,n_correct` and
/// `participant_id,position,raw_token`.
pub fn load_dataset(
    participants_path: &Path,
    responses_path: &Path,
    target_letter: char,
    source_id: &str,
    options: &ScreenOptions,
) -> Result<FluencyDataset> {
    let mut reader = read_csv(participants_path)?;
    let mut participants = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let line = i as u64 + 2; // 1-based, after the header
        let row = row.map_err(|e| Error::malformed(participants_path, line, e.to_string()))?;
        if row.len() < 5 {
            return Err(Error::malformed(
                participants_path,
                line,
                format!("expected 5 fields, got {}", row.len()),
            ));
        }
        participants.push(Participant {
            id: field(&row, 0, "id", participants_path, line)?.to_string(),
            age: parse_num(field(&row, 1, "age", participants_path, line)?, "age", participants_path, line)?,
            education_label: field(&row, 2, "education_label", participants_path, line)?.to_string(),
            education_years: parse_num(
                field(&row, 3, "education_years", participants_path, line)?,
                "education_years",
                participants_path,
                line,
            )?,
            n_correct: parse_num(
                field(&row, 4, "n_correct", participants_path, line)?,
                "n_correct",
                participants_path,
                line,
            )?,
        });
    }

    let known: BTreeSet<String> = participants.iter().map(|p| p.id.clone()).collect();
    if known.len() != participants.len() {
        let mut seen = BTreeSet::new();
        for p in &participants {
            if !seen.insert(&p.id) {
                return Err(Error::DuplicateParticipant(p.id.clone()));
            }
        }
    }

    let mut reader = read_csv(responses_path)?;
    let mut responses = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let line = i as u64 + 2;
        let row = row.map_err(|e| Error::malformed(responses_path, line, e.to_string()))?;
        if row.len() < 3 {
            return Err(Error::malformed(
                responses_path,
                line,
                format!("expected 3 fields, got {}", row.len()),
            ));
        }
        let pid = field(&row, 0, "participant_id", responses_path, line)?.to_string();
        if !known.contains(&pid) {
            return Err(Error::UnknownParticipant {
                path: responses_path.into(),
                line,
                participant: pid,
            });
        }
        responses.push(ResponseRecord {
            participant_id: pid,
            position: parse_num(
                field(&row, 1, "position", responses_path, line)?,
                "position",
                responses_path,
                line,
            )?,
            raw_token: field(&row, 2, "raw_token", responses_path, line)?.to_string(),
            word: String::new(),
            status: ResponseStatus::OtherError,
        });
    }

    responses.sort_by(|a, b| (&a.participant_id, a.position).cmp(&(&b.participant_id, b.position)));
    screen_responses(&mut responses, target_letter, options);
    FluencyDataset::new(source_id, target_letter, participants, responses)
}

/// The six lexical variables tracked per word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NormVariable {
    #[serde(rename = "length")]
    Length,
    #[serde(rename = "log_wf")]
    LogWordFrequency,
    #[serde(rename = "ortho_n")]
    OrthographicNeighbors,
    #[serde(rename = "phono_n")]
    PhonologicalNeighbors,
    #[serde(rename = "sem_n")]
    SemanticNeighbors,
    #[serde(rename = "aoa")]
    AgeOfAcquisition,
}

impl NormVariable {
    pub const ALL: [NormVariable; 6] = [
        NormVariable::Length,
        NormVariable::LogWordFrequency,
        NormVariable::OrthographicNeighbors,
        NormVariable::PhonologicalNeighbors,
        NormVariable::SemanticNeighbors,
        NormVariable::AgeOfAcquisition,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            NormVariable::Length => "length",
            NormVariable::LogWordFrequency => "log_wf",
            NormVariable::OrthographicNeighbors => "ortho_n",
            NormVariable::PhonologicalNeighbors => "phono_n",
            NormVariable::SemanticNeighbors => "sem_n",
            NormVariable::AgeOfAcquisition => "aoa",
        }
    }
}

/// Per-word lexical variables; any field may be missing for a word.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NormEntry {
    pub length: Option<u32>,
    pub log_wf: Option<f64>,
    pub ortho_n: Option<u32>,
    pub phono_n: Option<u32>,
    pub sem_n: Option<u32>,
    pub aoa: Option<f64>,
}

impl NormEntry {
    pub fn get(&self, var: NormVariable) -> Option<f64> {
        match var {
            NormVariable::Length => self.length.map(f64::from),
            NormVariable::LogWordFrequency => self.log_wf,
            NormVariable::OrthographicNeighbors => self.ortho_n.map(f64::from),
            NormVariable::PhonologicalNeighbors => self.phono_n.map(f64::from),
            NormVariable::SemanticNeighbors => self.sem_n.map(f64::from),
            NormVariable::AgeOfAcquisition => self.aoa,
        }
    }
}

/// Lexical norms keyed by normalized word.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NormsTable {
    pub entries: BTreeMap<String, NormEntry>,
}

impl NormsTable {
    pub fn get(&self, word: &str) -> Option<&NormEntry> {
        self.entries.get(word)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Load a norms CSV (`word,length,log_wf,ortho_n,phono_n,sem_n,aoa`). Empty
/// cells record the variable as absent. Returns the table and any warnings
/// (duplicate word rows, where the last row wins).
pub fn load_norms(path: &Path) -> Result<(NormsTable, Vec<String>)> {
    let mut reader = read_csv(path)?;
    let headers = reader
        .headers()
        .map_err(|e| Error::malformed(path, 1, e.to_string()))?
        .clone();
    let col = |name: &str| -> Option<usize> {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
    };
    let word_col = col("word").ok_or_else(|| {
        Error::malformed(path, 1, "missing `word` column in norms header".to_string())
    })?;
    let cols: BTreeMap<NormVariable, Option<usize>> = NormVariable::ALL
        .iter()
        .map(|v| (*v, col(v.label())))
        .collect();

    let mut warnings = Vec::new();
    let mut table = NormsTable::default();
    for (i, row) in reader.records().enumerate() {
        let line = i as u64 + 2;
        let row = row.map_err(|e| Error::malformed(path, line, e.to_string()))?;
        let word = normalize_word(field(&row, word_col, "word", path, line)?);
        if word.is_empty() {
            return Err(Error::malformed(path, line, "empty word".to_string()));
        }
        let cell = |var: NormVariable| -> Option<&str> {
            cols[&var]
                .and_then(|idx| row.get(idx))
                .filter(|s| !s.is_empty())
        };
        let parse_u32 = |var: NormVariable| -> Result<Option<u32>> {
            cell(var)
                .map(|s| parse_num(s, var.label(), path, line))
                .transpose()
        };
        let parse_f64 = |var: NormVariable| -> Result<Option<f64>> {
            cell(var)
                .map(|s| parse_num(s, var.label(), path, line))
                .transpose()
        };
        let entry = NormEntry {
            length: parse_u32(NormVariable::Length)?,
            log_wf: parse_f64(NormVariable::LogWordFrequency)?,
            ortho_n: parse_u32(NormVariable::OrthographicNeighbors)?,
            phono_n: parse_u32(NormVariable::PhonologicalNeighbors)?,
            sem_n: parse_u32(NormVariable::SemanticNeighbors)?,
            aoa: parse_f64(NormVariable::AgeOfAcquisition)?,
        };
        if let Some(ref len) = entry.length {
            if *len < 1 {
                return Err(Error::malformed(path, line, "length must be >= 1".to_string()));
            }
        }
        if table.entries.insert(word.clone(), entry).is_some() {
            warnings.push(format!("{}:{line}: duplicate word `{word}`, last row wins", path.display()));
        }
    }
    Ok((table, warnings))
}

/// Load a lemma-map CSV (`word,lemma`, header optional).
pub fn load_lemma_map(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut map = BTreeMap::new();
    for (i, row) in text.lines().enumerate() {
        let line = i as u64 + 1;
        let row = row.trim();
        if row.is_empty() || (line == 1 && row.eq_ignore_ascii_case("word,lemma")) {
            continue;
        }
        let (word, lemma) = row
            .split_once(',')
            .ok_or_else(|| Error::malformed(path, line, "expected `word,lemma`".to_string()))?;
        map.insert(normalize_word(word), normalize_word(lemma));
    }
    Ok(map)
}

/// Load an exclusion wordlist (one word per line, `#` comments allowed).
pub fn load_exclusions(path: &Path) -> Result<BTreeSet<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(normalize_word)
        .collect())
}
