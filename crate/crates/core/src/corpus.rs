//! Corpus loading, tokenization, word-count statistics and seeded splits.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::profile::{ProfileField, ProfileRecord};
use crate::{Error, Result};

/// Identifies the tokenization rule; part of every dataset fingerprint.
pub const TOKENIZER_VERSION: &str = "whitespace-edgestrip-lowercase/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSample {
    pub id: String,
    pub text: String,
    /// Binary labels by name, normalized to 0/1.
    pub labels: BTreeMap<String, u8>,
    pub profile: Option<ProfileRecord>,
}

impl CorpusSample {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        CorpusSample {
            id: id.into(),
            text: text.into(),
            labels: BTreeMap::new(),
            profile: None,
        }
    }

    pub fn tokens(&self) -> Vec<String> {
        tokenize(&self.text)
    }
}

/// Splits on whitespace, strips non-alphanumeric characters from both ends
/// of each piece, lowercases, and drops pieces left empty.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|raw| raw.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum InputFormat {
    #[default]
    Csv,
    Tsv,
}

impl InputFormat {
    fn delimiter(self) -> u8 {
        match self {
            InputFormat::Csv => b',',
            InputFormat::Tsv => b'\t',
        }
    }
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(InputFormat::Csv),
            "tsv" => Ok(InputFormat::Tsv),
            _ => Err(Error::Config(format!("unknown input format {s:?}"))),
        }
    }
}

/// Which input columns feed which sample fields.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ColumnMap {
    pub text: String,
    /// When absent, ids are the 1-based data row numbers.
    pub id: Option<String>,
    /// (label name, column name)
    pub labels: Vec<(String, String)>,
    pub profile: Vec<(ProfileField, String)>,
}

impl ColumnMap {
    pub fn new(text: impl Into<String>) -> Self {
        ColumnMap {
            text: text.into(),
            ..ColumnMap::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct LoadReport {
    pub rows_read: usize,
    /// (line, id) of retained samples whose text has no tokens.
    pub empty_text: Vec<(u64, String)>,
    /// (line, reason) of skipped rows.
    pub malformed: Vec<(u64, String)>,
}

#[derive(Debug, Clone)]
pub struct LoadedCorpus {
    pub samples: Vec<CorpusSample>,
    pub report: LoadReport,
}

pub fn load_corpus(path: &Path, format: InputFormat, columns: &ColumnMap) -> Result<LoadedCorpus> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus(file, format, columns)
}

pub fn read_corpus<R: Read>(
    reader: R,
    format: InputFormat,
    columns: &ColumnMap,
) -> Result<LoadedCorpus> {
    let mut csv = csv::ReaderBuilder::new()
        .delimiter(format.delimiter())
        .flexible(true)
        .from_reader(reader);
    let headers = csv.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.trim() == name);
    let missing = |name: &str| Error::Config(format!("column {name:?} not found in header"));

    let text_col = find(&columns.text).ok_or_else(|| missing(&columns.text))?;
    let id_col = columns
        .id
        .as_deref()
        .map(|c| find(c).ok_or_else(|| missing(c)))
        .transpose()?;
    let label_cols = columns
        .labels
        .iter()
        .map(|(name, col)| Ok((name.clone(), find(col).ok_or_else(|| missing(col))?)))
        .collect::<Result<Vec<_>>>()?;
    let profile_cols = columns
        .profile
        .iter()
        .map(|(field, col)| Ok((*field, find(col).ok_or_else(|| missing(col))?)))
        .collect::<Result<Vec<_>>>()?;

    let mut samples = Vec::new();
    let mut report = LoadReport::default();
    let mut seen = HashSet::new();
    for (row, record) in csv.records().enumerate() {
        report.rows_read += 1;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                report.malformed.push((line, e.to_string()));
                continue;
            }
        };
        let line = record.position().map_or(0, |p| p.line());
        let cell = |idx: usize| record.get(idx).unwrap_or("");

        let id = match id_col {
            Some(idx) => cell(idx).trim().to_string(),
            None => (row + 1).to_string(),
        };
        if id.is_empty() {
            report.malformed.push((line, "empty id".into()));
            continue;
        }
        if !seen.insert(id.clone()) {
            report
                .malformed
                .push((line, format!("duplicate id {id:?}")));
            continue;
        }

        let mut sample = CorpusSample::new(id, cell(text_col));
        let mut problem = None;
        for (name, idx) in &label_cols {
            match normalize_label(cell(*idx)) {
                Ok(Some(v)) => {
                    sample.labels.insert(name.clone(), v);
                }
                Ok(None) => {}
                Err(raw) => problem = Some(format!("label {name}: unrecognized value {raw:?}")),
            }
        }
        if !profile_cols.is_empty() {
            let mut profile = ProfileRecord::default();
            for (field, idx) in &profile_cols {
                if let Err(e) = profile.set(*field, cell(*idx)) {
                    problem = Some(e.to_string());
                }
            }
            sample.profile = Some(profile);
        }
        if let Some(reason) = problem {
            report.malformed.push((line, reason));
            continue;
        }
        if tokenize(&sample.text).is_empty() {
            report.empty_text.push((line, sample.id.clone()));
        }
        samples.push(sample);
    }
    Ok(LoadedCorpus { samples, report })
}

/// `Ok(None)` for a blank cell, `Err(raw)` for anything unrecognized.
fn normalize_label(raw: &str) -> std::result::Result<Option<u8>, String> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "" => Ok(None),
        "yes" | "y" | "1" | "true" => Ok(Some(1)),
        "no" | "n" | "0" | "false" => Ok(Some(0)),
        _ => Err(raw.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub samples: usize,
    pub mean_words: f64,
    pub median_words: f64,
    pub max_words: usize,
    /// K -> fraction of samples with at most K tokens.
    pub coverage: BTreeMap<usize, f64>,
    /// token count -> number of samples.
    pub histogram: BTreeMap<usize, usize>,
}

impl CorpusStats {
    pub fn from_counts(counts: &[usize], coverage_points: &[usize]) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let n = counts.len();
        let mut sorted = counts.to_vec();
        sorted.sort_unstable();
        let median_words = if n % 2 == 1 {
            sorted[n / 2] as f64
        } else {
            (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0
        };
        let total: usize = counts.iter().sum();
        let mut histogram = BTreeMap::new();
        for &c in counts {
            *histogram.entry(c).or_insert(0) += 1;
        }
        let coverage = coverage_points
            .iter()
            .map(|&k| {
                let covered = sorted.partition_point(|&c| c <= k);
                (k, covered as f64 / n as f64)
            })
            .collect();
        Ok(CorpusStats {
            samples: n,
            mean_words: total as f64 / n as f64,
            median_words,
            max_words: sorted[n - 1],
            coverage,
            histogram,
        })
    }

    /// Histogram as `word_count,count` CSV rows under a header line.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("word_count,count\n");
        for (words, count) in &self.histogram {
            out.push_str(&format!("{words},{count}\n"));
        }
        out
    }
}

pub fn word_counts(corpus: &[CorpusSample]) -> Vec<usize> {
    corpus.iter().map(|s| tokenize(&s.text).len()).collect()
}

pub fn word_count_stats(corpus: &[CorpusSample], coverage_points: &[usize]) -> Result<CorpusStats> {
    CorpusStats::from_counts(&word_counts(corpus), coverage_points)
}

/// Fraction of samples with more than `cut_length` tokens.
///
/// Computed as `1 - coverage(cut_length)`, which makes
/// `truncation + coverage == 1.0` hold exactly in floating point.
pub fn truncation_report(corpus: &[CorpusSample], cut_length: usize) -> Result<f64> {
    truncation_fraction(&word_counts(corpus), cut_length)
}

pub fn truncation_fraction(counts: &[usize], cut_length: usize) -> Result<f64> {
    if counts.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let covered = counts.iter().filter(|&&c| c <= cut_length).count();
    Ok(1.0 - covered as f64 / counts.len() as f64)
}

/// xorshift64* (Vigna, 2016): shifts 12, 25, 27 and multiplier
/// 0x2545F4914F6CDD1D. The seed is first passed through one SplitMix64 step
/// so that small or zero seeds still give a nonzero, well-mixed state.
#[derive(Debug, Clone)]
pub struct XorShift64Star {
    state: u64,
}

impl XorShift64Star {
    pub fn new(seed: u64) -> Self {
        let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        XorShift64Star {
            state: if z == 0 { 0x9E37_79B9_7F4A_7C15 } else { z },
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }
}

/// Train/test index sets for `n` items.
///
/// Indices are shuffled with a Fisher-Yates pass driven by
/// [`XorShift64Star`] (`j = next() % (i + 1)` for `i` from `n - 1` down to
/// 1); the first `round(ratio * n)` shuffled indices form the training set.
/// Both sets are returned in ascending order.
pub fn split_indices(n: usize, ratio: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if n < 2 {
        return Err(Error::Split(n));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Config(format!("split ratio {ratio} outside (0, 1)")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = XorShift64Star::new(seed);
    for i in (1..n).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        order.swap(i, j);
    }
    let train_len = (ratio * n as f64).round() as usize;
    let (train, test) = order.split_at(train_len);
    let (mut train, mut test) = (train.to_vec(), test.to_vec());
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Seeded random split preserving the original relative order within each side.
pub fn split_train_test<T: Clone>(corpus: &[T], ratio: f64, seed: u64) -> Result<(Vec<T>, Vec<T>)> {
    let (train, test) = split_indices(corpus.len(), ratio, seed)?;
    let pick = |idx: Vec<usize>| idx.into_iter().map(|i| corpus[i].clone()).collect();
    Ok((pick(train), pick(test)))
}

/// Splits the data rows of a delimited file into two files with the same header.
/// Returns the row counts written to each.
pub fn split_file(
    input: &Path,
    format: InputFormat,
    ratio: f64,
    seed: u64,
    train_out: &Path,
    test_out: &Path,
) -> Result<(usize, usize)> {
    let file = File::open(input).map_err(|e| Error::io(input, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(format.delimiter())
        .flexible(true)
        .from_reader(file);
    let headers = reader.headers()?.clone();
    let rows = reader
        .records()
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let (train, test) = split_indices(rows.len(), ratio, seed)?;
    for (path, idx) in [(train_out, &train), (test_out, &test)] {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut writer = csv::WriterBuilder::new()
            .delimiter(format.delimiter())
            .flexible(true)
            .from_writer(file);
        writer.write_record(&headers)?;
        for &i in idx.iter() {
            writer.write_record(&rows[i])?;
        }
        writer.flush().map_err(|e| Error::io(path, e))?;
    }
    Ok((train.len(), test.len()))
}

/// Writes samples as a CSV with `id,text` and one column per label name.
pub fn write_samples_csv<W: Write>(writer: W, samples: &[CorpusSample]) -> Result<()> {
    let label_names: Vec<String> = samples
        .iter()
        .flat_map(|s| s.labels.keys().cloned())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut csv = csv::Writer::from_writer(writer);
    let mut header = vec!["id".to_string(), "text".to_string()];
    header.extend(label_names.iter().cloned());
    csv.write_record(&header)?;
    for s in samples {
        let mut row = vec![s.id.clone(), s.text.clone()];
        row.extend(
            label_names
                .iter()
                .map(|n| s.labels.get(n).map_or(String::new(), |v| v.to_string())),
        );
        csv.write_record(&row)?;
    }
    csv.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}
