//! `sew`: render Squared English Word images and datasets from the command line.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use sew_core::corpus::{self, ColumnMap, CorpusSample, InputFormat};
use sew_core::dataset;
use sew_core::evalkit::{self, TrainParams};
use sew_core::glyphfont;
use sew_core::layout::{attention_blueprint, BlueprintGrid, RenderConfig, Scheme};
use sew_core::profile::{ProfileField, ProfileRecord};
use sew_core::render::{self, ImageBuffer, ImageFormat, BACKGROUND, INK};

const EXIT_PARTIAL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "sew", version, about = "Squared English Word glyph images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render one sentence to an image.
    Render(RenderCmd),
    /// Render a corpus into an image dataset with a JSON Lines manifest.
    Batch(BatchCmd),
    /// Word-count statistics and histogram for a corpus.
    Stats(StatsCmd),
    /// Seeded train/test split of a corpus file.
    Split(SplitCmd),
    /// Emit or validate an attention blueprint.
    Blueprint(BlueprintCmd),
    /// Train and score the linear baseline on a rendered dataset.
    Eval(EvalCmd),
    /// Dump one glyph at any size as an image, for inspection.
    Glyph(GlyphCmd),
}

#[derive(Args)]
struct LayoutArgs {
    /// raw | raw-linewrap | sew | sew-attn | sew-profile | sew-attn-profile
    #[arg(long, default_value = "sew")]
    mode: Scheme,
    /// Words per grid row/column [default: 6, or 8 for attention modes]
    #[arg(long)]
    grid_n: Option<u32>,
    #[arg(long, default_value_t = 224)]
    image_px: u32,
    /// Maximum words drawn [default: 36, or 64 for attention modes]
    #[arg(long)]
    cut_length: Option<u32>,
    #[arg(long, default_value_t = 4)]
    attn_count: u32,
    #[arg(long, default_value_t = 2)]
    attn_scale: u32,
    #[arg(long, default_value_t = 28)]
    chars_per_row: u32,
    #[arg(long, default_value_t = 0)]
    margin_px: u32,
    /// Fail on characters missing from the font instead of drawing a box.
    #[arg(long)]
    no_fallback: bool,
    /// Blueprint file overriding the generated attention layout.
    #[arg(long)]
    blueprint: Option<PathBuf>,
}

impl LayoutArgs {
    fn config(&self) -> RenderConfig {
        let defaults = RenderConfig::for_scheme(self.mode);
        RenderConfig {
            image_px: self.image_px,
            grid_n: self.grid_n.unwrap_or(defaults.grid_n),
            cut_length: self.cut_length.unwrap_or(defaults.cut_length),
            attn_count: self.attn_count,
            attn_scale: self.attn_scale,
            chars_per_row: self.chars_per_row,
            margin_px: self.margin_px,
            glyph_fallback: !self.no_fallback,
        }
    }

    fn blueprint(&self) -> Result<Option<BlueprintGrid>> {
        self.blueprint
            .as_deref()
            .map(|path| {
                let text = read_text(path)?;
                BlueprintGrid::parse(&text).with_context(|| format!("{}", path.display()))
            })
            .transpose()
    }
}

#[derive(Args)]
struct RenderCmd {
    #[command(flatten)]
    layout: LayoutArgs,
    #[arg(long)]
    text: String,
    /// Profile fields, e.g. age=36,country=IND,marriage=married,gender=male
    #[arg(long)]
    profile: Option<String>,
    /// pgm | png [default: from the output extension, else pgm]
    #[arg(long)]
    format: Option<ImageFormat>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CorpusArgs {
    #[arg(long)]
    input: PathBuf,
    /// csv | tsv
    #[arg(long, default_value = "csv")]
    input_format: InputFormat,
    #[arg(long, default_value = "text")]
    text_col: String,
    #[arg(long)]
    id_col: Option<String>,
    /// Label mapping name=column, repeatable.
    #[arg(long = "label-col", value_parser = parse_pair)]
    label_cols: Vec<(String, String)>,
    /// Profile mapping field=column (age, country, marriage, gender), repeatable.
    #[arg(long = "profile-col", value_parser = parse_pair)]
    profile_cols: Vec<(String, String)>,
}

impl CorpusArgs {
    fn load(&self) -> Result<Vec<CorpusSample>> {
        let profile = self
            .profile_cols
            .iter()
            .map(|(field, col)| Ok((field.parse::<ProfileField>()?, col.clone())))
            .collect::<Result<Vec<_>>>()?;
        let columns = ColumnMap {
            text: self.text_col.clone(),
            id: self.id_col.clone(),
            labels: self.label_cols.clone(),
            profile,
        };
        let loaded = corpus::load_corpus(&self.input, self.input_format, &columns)?;
        for (line, reason) in &loaded.report.malformed {
            eprintln!("warning: line {line}: skipped ({reason})");
        }
        if !loaded.report.empty_text.is_empty() {
            eprintln!(
                "warning: {} sample(s) with empty text",
                loaded.report.empty_text.len()
            );
        }
        Ok(loaded.samples)
    }
}

fn parse_pair(s: &str) -> std::result::Result<(String, String), String> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .filter(|(k, v)| !k.is_empty() && !v.is_empty())
        .ok_or_else(|| format!("expected name=column, got {s:?}"))
}

#[derive(Args)]
struct BatchCmd {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[command(flatten)]
    layout: LayoutArgs,
    #[arg(long)]
    out_dir: PathBuf,
    /// pgm | png
    #[arg(long, default_value = "pgm")]
    format: ImageFormat,
    /// Also write manifest-train.jsonl / manifest-test.jsonl with this train ratio.
    #[arg(long)]
    split: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct StatsCmd {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Coverage thresholds K (fraction of samples with at most K words).
    #[arg(long, value_delimiter = ',', default_values_t = [25usize, 64])]
    coverage: Vec<usize>,
    #[arg(long, default_value_t = 36)]
    cut_length: usize,
    /// Write the histogram as word_count,count CSV.
    #[arg(long)]
    histogram_out: Option<PathBuf>,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SplitCmd {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "csv")]
    input_format: InputFormat,
    #[arg(long, default_value_t = 0.8)]
    ratio: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    train_out: PathBuf,
    #[arg(long)]
    test_out: PathBuf,
}

#[derive(Args)]
struct BlueprintCmd {
    #[arg(long, default_value_t = 8)]
    grid_n: u32,
    #[arg(long, default_value_t = 4)]
    attn_count: u32,
    #[arg(long, default_value_t = 2)]
    attn_scale: u32,
    /// Validate this blueprint file instead of generating one.
    #[arg(long, conflicts_with = "out")]
    validate: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalCmd {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    label_name: String,
    #[arg(long, default_value_t = 28)]
    factor: u32,
    #[arg(long, default_value_t = 500)]
    epochs: usize,
    #[arg(long, default_value_t = 0.5)]
    lr: f64,
    #[arg(long, default_value_t = 1e-4)]
    l2: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Train fraction of the held-out split.
    #[arg(long, default_value_t = 0.8)]
    ratio: f64,
    #[arg(long)]
    model_out: Option<PathBuf>,
}

#[derive(Args)]
struct GlyphCmd {
    #[arg(long)]
    char: char,
    #[arg(long, default_value_t = 16)]
    size: u32,
    #[arg(long)]
    out: PathBuf,
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn format_for(explicit: Option<ImageFormat>, out: &Path) -> ImageFormat {
    explicit
        .or_else(|| {
            out.extension()
                .and_then(|e| e.to_str())
                .and_then(ImageFormat::from_extension)
        })
        .unwrap_or(ImageFormat::Pgm)
}

fn run_render(cmd: RenderCmd) -> Result<u8> {
    let config = cmd.layout.config();
    let blueprint = cmd.layout.blueprint()?;
    let mut sample = CorpusSample::new("cli", cmd.text);
    if let Some(spec) = &cmd.profile {
        sample.profile = Some(ProfileRecord::parse_assignments(spec)?);
    }
    let (plan, image) =
        dataset::render_sample(&sample, cmd.layout.mode, &config, blueprint.as_ref())?;
    let format = format_for(cmd.format, &cmd.out);
    write_bytes(&cmd.out, &format.encode(&image)?)?;
    println!(
        "{}: {} words placed, {} truncated",
        cmd.out.display(),
        plan.words_placed,
        plan.words_truncated
    );
    Ok(0)
}

fn run_batch(cmd: BatchCmd) -> Result<u8> {
    let samples = cmd.corpus.load()?;
    let config = cmd.layout.config();
    let blueprint = cmd.layout.blueprint()?;
    let outcome = dataset::batch_render(
        &samples,
        &config,
        cmd.layout.mode,
        blueprint.as_ref(),
        &cmd.out_dir,
        cmd.format,
    )?;
    if let Some(ratio) = cmd.split {
        let (train, test) = corpus::split_train_test(&outcome.entries, ratio, cmd.seed)?;
        dataset::write_manifest(&cmd.out_dir.join("manifest-train.jsonl"), &train)?;
        dataset::write_manifest(&cmd.out_dir.join("manifest-test.jsonl"), &test)?;
    }
    print!("{}", outcome.summary);
    for entry in outcome.entries.iter().filter(|e| e.error.is_some()) {
        eprintln!(
            "error: sample {}: {}",
            entry.id,
            entry.error.as_deref().unwrap_or("")
        );
    }
    Ok(if outcome.failures() > 0 {
        EXIT_PARTIAL
    } else {
        0
    })
}

fn run_stats(cmd: StatsCmd) -> Result<u8> {
    let samples = cmd.corpus.load()?;
    let mut points = cmd.coverage.clone();
    if !points.contains(&cmd.cut_length) {
        points.push(cmd.cut_length);
    }
    let stats = corpus::word_count_stats(&samples, &points)?;
    let truncated = 1.0 - stats.coverage[&cmd.cut_length];
    if let Some(path) = &cmd.histogram_out {
        write_bytes(path, stats.histogram_csv().as_bytes())?;
    }
    if cmd.json {
        let report = serde_json::json!({
            "samples": stats.samples,
            "mean_words": stats.mean_words,
            "median_words": stats.median_words,
            "max_words": stats.max_words,
            "coverage": stats.coverage,
            "cut_length": cmd.cut_length,
            "truncated_fraction": truncated,
            "histogram": stats.histogram,
        });
        println!("{}", serde_json::to_string_pretty(&report)?);
        return Ok(0);
    }
    println!("samples: {}", stats.samples);
    println!("mean words: {:.2}", stats.mean_words);
    println!("median words: {}", stats.median_words);
    println!("max words: {}", stats.max_words);
    for k in &cmd.coverage {
        println!("coverage({k}): {:.2}%", 100.0 * stats.coverage[k]);
    }
    println!(
        "over cut-length {}: {:.2}%",
        cmd.cut_length,
        100.0 * truncated
    );
    Ok(0)
}

fn run_split(cmd: SplitCmd) -> Result<u8> {
    let (train, test) = corpus::split_file(
        &cmd.input,
        cmd.input_format,
        cmd.ratio,
        cmd.seed,
        &cmd.train_out,
        &cmd.test_out,
    )?;
    println!("train: {train} rows -> {}", cmd.train_out.display());
    println!("test: {test} rows -> {}", cmd.test_out.display());
    Ok(0)
}

fn run_blueprint(cmd: BlueprintCmd) -> Result<u8> {
    if let Some(path) = &cmd.validate {
        let grid = BlueprintGrid::parse(&read_text(path)?)?;
        println!(
            "valid {0}x{0} blueprint: {1} attention squares of {2}x{2} cells, {3} flow cells",
            grid.n(),
            grid.anchor_count(),
            grid.scale(),
            grid.flow_count()
        );
        return Ok(0);
    }
    let grid = attention_blueprint(cmd.grid_n, cmd.attn_count, cmd.attn_scale)?;
    match &cmd.out {
        Some(path) => write_bytes(path, grid.to_text().as_bytes())?,
        None => print!("{grid}"),
    }
    Ok(0)
}

fn run_eval(cmd: EvalCmd) -> Result<u8> {
    let entries = dataset::read_manifest(&cmd.manifest)?;
    let dir = cmd.manifest.parent().unwrap_or(Path::new("."));
    let data = evalkit::manifest_features(dir, &entries, &cmd.label_name, cmd.factor)?;
    if data.features.len() < 2 {
        bail!(
            "only {} rendered sample(s) carry label {:?}",
            data.features.len(),
            cmd.label_name
        );
    }
    let (train_idx, test_idx) = corpus::split_indices(data.features.len(), cmd.ratio, cmd.seed)?;
    let pick = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<u8>) {
        (
            idx.iter().map(|&i| data.features[i].clone()).collect(),
            idx.iter().map(|&i| data.labels[i]).collect(),
        )
    };
    let (train_x, train_y) = pick(&train_idx);
    let (test_x, test_y) = pick(&test_idx);
    let params = TrainParams {
        epochs: cmd.epochs,
        learning_rate: cmd.lr,
        l2: cmd.l2,
        seed: cmd.seed,
    };
    let model = evalkit::train_linear(&train_x, &train_y, cmd.factor, data.image_px, &params)?;
    for (name, xs, ys) in [
        ("train", &train_x, &train_y),
        ("held-out", &test_x, &test_y),
    ] {
        let eval = evalkit::evaluate(&model, xs, ys)?;
        println!(
            "{name}: accuracy {:.4} ({} samples) tp={} tn={} fp={} fn={}",
            eval.accuracy,
            eval.total(),
            eval.true_positive,
            eval.true_negative,
            eval.false_positive,
            eval.false_negative
        );
    }
    if let Some(path) = &cmd.model_out {
        write_bytes(path, model.to_text().as_bytes())?;
    }
    Ok(0)
}

fn run_glyph(cmd: GlyphCmd) -> Result<u8> {
    let block = glyphfont::rasterize_scaled(cmd.char, cmd.size)?;
    let image = ImageBuffer {
        width: block.side,
        height: block.side,
        pixels: block
            .pixels
            .iter()
            .map(|&p| if p == 1 { INK } else { BACKGROUND })
            .collect(),
    };
    let format = format_for(None, &cmd.out);
    let bytes = match format {
        ImageFormat::Pgm => render::encode_pgm(&image),
        ImageFormat::Png => render::encode_png(&image)?,
    };
    write_bytes(&cmd.out, &bytes)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Render(cmd) => run_render(cmd),
        Command::Batch(cmd) => run_batch(cmd),
        Command::Stats(cmd) => run_stats(cmd),
        Command::Split(cmd) => run_split(cmd),
        Command::Blueprint(cmd) => run_blueprint(cmd),
        Command::Eval(cmd) => run_eval(cmd),
        Command::Glyph(cmd) => run_glyph(cmd),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
