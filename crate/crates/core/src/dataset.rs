//! Batch rendering of corpora into image datasets.
//!
//! A run writes one image per sample (`<id>.<ext>`), a `manifest.jsonl` with
//! one entry per sample in corpus order, and a plain-text `summary.txt`.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{self, CorpusSample, TOKENIZER_VERSION};
use crate::layout::{self, attention_blueprint, BlueprintGrid, LayoutPlan, RenderConfig, Scheme};
use crate::profile::encode_profile;
use crate::render::{self, ImageBuffer, ImageFormat};
use crate::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.jsonl";
pub const SUMMARY_FILE: &str = "summary.txt";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    /// Image file name relative to the dataset directory; absent on error.
    pub image: Option<String>,
    pub labels: BTreeMap<String, u8>,
    pub words_placed: usize,
    pub words_truncated: usize,
    pub scheme: Scheme,
    pub fingerprint: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct BatchOutcome {
    pub entries: Vec<ManifestEntry>,
    pub fingerprint: String,
    pub summary: String,
}

impl BatchOutcome {
    pub fn failures(&self) -> usize {
        self.entries.iter().filter(|e| e.error.is_some()).count()
    }
}

/// The blueprint an attention scheme will use: the override, or one built
/// from the config. `None` for schemes without attention.
pub fn effective_blueprint(
    scheme: Scheme,
    config: &RenderConfig,
    blueprint: Option<&BlueprintGrid>,
) -> Result<Option<BlueprintGrid>> {
    if !scheme.uses_attention() {
        return Ok(None);
    }
    match blueprint {
        Some(grid) => Ok(Some(grid.clone())),
        None => attention_blueprint(config.grid_n, config.attn_count, config.attn_scale).map(Some),
    }
}

#[derive(Serialize)]
struct FingerprintInput<'a> {
    config: &'a RenderConfig,
    scheme: Scheme,
    blueprint: Option<String>,
    tokenizer: &'static str,
}

/// Hex digest over everything that affects the rendered pixels.
pub fn config_fingerprint(
    scheme: Scheme,
    config: &RenderConfig,
    blueprint: Option<&BlueprintGrid>,
) -> Result<String> {
    let input = FingerprintInput {
        config,
        scheme,
        blueprint: effective_blueprint(scheme, config, blueprint)?.map(|b| b.to_text()),
        tokenizer: TOKENIZER_VERSION,
    };
    let digest = Sha256::digest(serde_json::to_vec(&input)?);
    Ok(hex::encode(&digest[..16]))
}

/// Tokenizes and plans one sample.
pub fn plan_sample(
    sample: &CorpusSample,
    scheme: Scheme,
    config: &RenderConfig,
    blueprint: Option<&BlueprintGrid>,
) -> Result<LayoutPlan> {
    let words = sample.tokens();
    let profile = match (&sample.profile, scheme.uses_profile()) {
        (Some(record), true) => encode_profile(record),
        _ => Vec::new(),
    };
    layout::plan_scheme(scheme, &words, &profile, config, blueprint)
}

pub fn render_sample(
    sample: &CorpusSample,
    scheme: Scheme,
    config: &RenderConfig,
    blueprint: Option<&BlueprintGrid>,
) -> Result<(LayoutPlan, ImageBuffer)> {
    let plan = plan_sample(sample, scheme, config, blueprint)?;
    let image = render::render(&plan, config)?;
    Ok((plan, image))
}

/// Filesystem-safe stems for `ids`, in order. Characters outside
/// `[A-Za-z0-9_-]` become `_`; stems that collide (ignoring case) with an
/// earlier one get `-1`, `-2`, ... appended.
pub fn image_stems<S: AsRef<str>>(ids: &[S]) -> Vec<String> {
    let mut taken = HashSet::new();
    ids.iter()
        .map(|id| {
            let mut stem: String = id
                .as_ref()
                .chars()
                .map(|c| {
                    if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                        c
                    } else {
                        '_'
                    }
                })
                .collect();
            if stem.is_empty() {
                stem.push_str("sample");
            }
            let mut candidate = stem.clone();
            let mut k = 0;
            while !taken.insert(candidate.to_ascii_lowercase()) {
                k += 1;
                candidate = format!("{stem}-{k}");
            }
            candidate
        })
        .collect()
}

/// Renders every sample into `out_dir`. Per-sample failures are recorded in
/// the manifest; configuration and I/O problems abort the run.
pub fn batch_render(
    corpus: &[CorpusSample],
    config: &RenderConfig,
    scheme: Scheme,
    blueprint: Option<&BlueprintGrid>,
    out_dir: &Path,
    format: ImageFormat,
) -> Result<BatchOutcome> {
    config.validate()?;
    let blueprint = effective_blueprint(scheme, config, blueprint)?;
    let fingerprint = config_fingerprint(scheme, config, blueprint.as_ref())?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let ids: Vec<&str> = corpus.iter().map(|s| s.id.as_str()).collect();
    let stems = image_stems(&ids);
    let entries = corpus
        .par_iter()
        .zip(stems.par_iter())
        .map(|(sample, stem)| {
            let mut entry = ManifestEntry {
                id: sample.id.clone(),
                image: None,
                labels: sample.labels.clone(),
                words_placed: 0,
                words_truncated: 0,
                scheme,
                fingerprint: fingerprint.clone(),
                error: None,
            };
            let rendered = render_sample(sample, scheme, config, blueprint.as_ref())
                .and_then(|(plan, image)| Ok((plan, format.encode(&image)?)));
            match rendered {
                Ok((plan, bytes)) => {
                    let name = format!("{stem}.{}", format.extension());
                    let path = out_dir.join(&name);
                    fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
                    entry.image = Some(name);
                    entry.words_placed = plan.words_placed;
                    entry.words_truncated = plan.words_truncated;
                }
                Err(e) => entry.error = Some(e.to_string()),
            }
            Ok(entry)
        })
        .collect::<Result<Vec<_>>>()?;

    write_manifest(&out_dir.join(MANIFEST_FILE), &entries)?;

    let summary = summarize(corpus, &entries, scheme, config, &fingerprint);
    let summary_path = out_dir.join(SUMMARY_FILE);
    fs::write(&summary_path, &summary).map_err(|e| Error::io(&summary_path, e))?;

    Ok(BatchOutcome {
        entries,
        fingerprint,
        summary,
    })
}

fn summarize(
    corpus: &[CorpusSample],
    entries: &[ManifestEntry],
    scheme: Scheme,
    config: &RenderConfig,
    fingerprint: &str,
) -> String {
    let failed = entries.iter().filter(|e| e.error.is_some()).count();
    let rendered = entries.len() - failed;
    let truncated = entries
        .iter()
        .filter(|e| e.error.is_none() && e.words_truncated > 0)
        .count();
    let mut out = String::new();
    let _ = writeln!(out, "scheme: {scheme}");
    let _ = writeln!(out, "fingerprint: {fingerprint}");
    let _ = writeln!(out, "samples: {}", entries.len());
    let _ = writeln!(out, "rendered: {rendered}");
    let _ = writeln!(out, "failed: {failed}");
    if rendered > 0 {
        let _ = writeln!(
            out,
            "samples with dropped words: {truncated} ({:.2}%)",
            100.0 * truncated as f64 / rendered as f64
        );
    }
    let cut = config.cut_length as usize;
    if let Ok(stats) = corpus::word_count_stats(corpus, &[cut]) {
        let _ = writeln!(out, "mean words: {:.2}", stats.mean_words);
        let _ = writeln!(out, "median words: {}", stats.median_words);
        let _ = writeln!(out, "max words: {}", stats.max_words);
        let _ = writeln!(
            out,
            "samples over cut-length {cut}: {:.2}%",
            100.0 * (1.0 - stats.coverage[&cut])
        );
    }
    out
}

/// Writes `entries` as JSON Lines, one entry per line, in the given order.
pub fn write_manifest(path: &Path, entries: &[ManifestEntry]) -> Result<()> {
    let mut out = String::new();
    for entry in entries {
        out.push_str(&serde_json::to_string(entry)?);
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut entries = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if !line.trim().is_empty() {
            entries.push(serde_json::from_str(&line)?);
        }
    }
    Ok(entries)
}
