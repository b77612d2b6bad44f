//! Linear baseline over pooled pixels.
//!
//! A logistic-regression model on block-pooled ink fractions. It is a signal
//! detector for rendered datasets: if a linear model can separate the labels,
//! the images carry the label information in consistent places.

use std::fmt::Write as _;
use std::path::Path;

use crate::dataset::ManifestEntry;
use crate::render::{decode_image, ImageBuffer, INK};
use crate::{Error, Result};

/// Mean ink fraction of each `factor`x`factor` block, row-major.
pub fn downsample(image: &ImageBuffer, factor: u32) -> Result<Vec<f64>> {
    if factor == 0 || !image.width.is_multiple_of(factor) || !image.height.is_multiple_of(factor) {
        return Err(Error::Config(format!(
            "pooling factor {factor} does not divide {}x{}",
            image.width, image.height
        )));
    }
    let (cols, rows) = (image.width / factor, image.height / factor);
    let area = (factor * factor) as f64;
    let mut out = Vec::with_capacity((cols * rows) as usize);
    for by in 0..rows {
        for bx in 0..cols {
            let mut ink = 0u32;
            for y in by * factor..(by + 1) * factor {
                let start = (y * image.width + bx * factor) as usize;
                ink += image.pixels[start..start + factor as usize]
                    .iter()
                    .filter(|&&p| p == INK)
                    .count() as u32;
            }
            out.push(ink as f64 / area);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainParams {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    /// Recorded with the model. Weights always start at zero, so the fit
    /// itself does not depend on it.
    pub seed: u64,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            epochs: 500,
            learning_rate: 0.5,
            l2: 1e-4,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub factor: u32,
    pub image_px: u32,
    pub seed: u64,
}

impl LinearModel {
    pub fn zeros(features: usize, factor: u32, image_px: u32) -> Self {
        LinearModel {
            weights: vec![0.0; features],
            bias: 0.0,
            factor,
            image_px,
            seed: 0,
        }
    }

    pub fn logit(&self, x: &[f64]) -> f64 {
        self.bias + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }

    pub fn probability(&self, x: &[f64]) -> f64 {
        sigmoid(self.logit(x))
    }

    pub fn predict(&self, x: &[f64]) -> u8 {
        u8::from(self.logit(x) >= 0.0)
    }

    /// Plain-text form: a header, then one weight per line with the bias last.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "sew-linear-model 1");
        let _ = writeln!(out, "factor {}", self.factor);
        let _ = writeln!(out, "image_px {}", self.image_px);
        let _ = writeln!(out, "seed {}", self.seed);
        let _ = writeln!(out, "dimension {}", self.weights.len() + 1);
        for w in self.weights.iter().chain(std::iter::once(&self.bias)) {
            let _ = writeln!(out, "{w:e}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::Config(format!("model file: {msg}"));
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        if lines.next() != Some("sew-linear-model 1") {
            return Err(bad("missing header".into()));
        }
        let mut field = |name: &str| -> Result<u64> {
            let line = lines.next().unwrap_or_default();
            line.strip_prefix(name)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| bad(format!("expected `{name} <n>`, got {line:?}")))
        };
        let factor = field("factor")? as u32;
        let image_px = field("image_px")? as u32;
        let seed = field("seed")?;
        let dimension = field("dimension")? as usize;
        let mut values = lines
            .map(|l| {
                l.parse::<f64>()
                    .map_err(|_| bad(format!("bad weight {l:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if values.len() != dimension || dimension == 0 {
            return Err(bad(format!(
                "{} values for dimension {dimension}",
                values.len()
            )));
        }
        let bias = values.pop().unwrap_or_default();
        Ok(LinearModel {
            weights: values,
            bias,
            factor,
            image_px,
            seed,
        })
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// log(1 + e^z) without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Mean logistic loss plus `l2 / 2 * |w|^2` (bias not penalized), and its
/// gradient with respect to the weights and the bias.
pub fn loss_and_gradient(
    model: &LinearModel,
    features: &[Vec<f64>],
    labels: &[u8],
    l2: f64,
) -> (f64, Vec<f64>, f64) {
    let n = features.len() as f64;
    let mut loss = 0.0;
    let mut grad_w = vec![0.0; model.weights.len()];
    let mut grad_b = 0.0;
    for (x, &y) in features.iter().zip(labels) {
        let z = model.logit(x);
        let y = f64::from(y);
        loss += softplus(z) - y * z;
        let residual = sigmoid(z) - y;
        for (g, v) in grad_w.iter_mut().zip(x) {
            *g += residual * v;
        }
        grad_b += residual;
    }
    let penalty: f64 = model.weights.iter().map(|w| w * w).sum();
    loss = loss / n + 0.5 * l2 * penalty;
    for (g, w) in grad_w.iter_mut().zip(&model.weights) {
        *g = *g / n + l2 * w;
    }
    (loss, grad_w, grad_b / n)
}

fn check_training_set(features: &[Vec<f64>], labels: &[u8]) -> Result<usize> {
    if features.len() != labels.len() {
        return Err(Error::Train(format!(
            "{} feature rows but {} labels",
            features.len(),
            labels.len()
        )));
    }
    if let Some(bad) = labels.iter().find(|&&y| y > 1) {
        return Err(Error::Train(format!("label {bad} is not binary")));
    }
    if !(labels.contains(&0) && labels.contains(&1)) {
        return Err(Error::Train("both classes must be present".into()));
    }
    let dim = features[0].len();
    if features.iter().any(|x| x.len() != dim) {
        return Err(Error::Train("feature rows differ in length".into()));
    }
    Ok(dim)
}

/// Full-batch gradient descent from zero weights. Returns the model and the
/// loss before each epoch plus the final loss.
///
/// Descent runs on z-scored features (constant features keep scale 1), so
/// the L2 penalty applies to the standardized weights and the traced losses
/// are measured there. The returned model has the scaling folded back in and
/// acts on raw features.
///
/// Samples are summed in a canonical order (sorted by feature bits, then
/// label), so permuting the input gives a bit-identical model.
pub fn train_linear_traced(
    features: &[Vec<f64>],
    labels: &[u8],
    factor: u32,
    image_px: u32,
    params: &TrainParams,
) -> Result<(LinearModel, Vec<f64>)> {
    let dim = check_training_set(features, labels)?;
    let mut order: Vec<usize> = (0..features.len()).collect();
    order.sort_by(|&a, &b| {
        let key = |i: usize| -> (Vec<u64>, u8) {
            (features[i].iter().map(|v| v.to_bits()).collect(), labels[i])
        };
        key(a).cmp(&key(b))
    });
    let ys: Vec<u8> = order.iter().map(|&i| labels[i]).collect();
    let (mean, scale) = standardization(&order, features, dim);
    let xs: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| {
            features[i]
                .iter()
                .zip(mean.iter().zip(&scale))
                .map(|(v, (m, s))| (v - m) / s)
                .collect()
        })
        .collect();

    let mut model = LinearModel::zeros(dim, factor, image_px);
    model.seed = params.seed;
    let mut losses = Vec::with_capacity(params.epochs + 1);
    for _ in 0..params.epochs {
        let (loss, grad_w, grad_b) = loss_and_gradient(&model, &xs, &ys, params.l2);
        losses.push(loss);
        for (w, g) in model.weights.iter_mut().zip(&grad_w) {
            *w -= params.learning_rate * g;
        }
        model.bias -= params.learning_rate * grad_b;
    }
    losses.push(loss_and_gradient(&model, &xs, &ys, params.l2).0);
    for ((w, m), s) in model.weights.iter_mut().zip(&mean).zip(&scale) {
        *w /= s;
        model.bias -= *w * m;
    }
    Ok((model, losses))
}

/// Per-feature mean and standard deviation, summed in `order`.
fn standardization(order: &[usize], features: &[Vec<f64>], dim: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order.len() as f64;
    let mut mean = vec![0.0; dim];
    for &i in order {
        for (m, v) in mean.iter_mut().zip(&features[i]) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; dim];
    for &i in order {
        for ((acc, v), m) in var.iter_mut().zip(&features[i]).zip(&mean) {
            *acc += (v - m) * (v - m);
        }
    }
    let scale = var
        .into_iter()
        .map(|v| {
            let sd = (v / n).sqrt();
            if sd > 1e-12 {
                sd
            } else {
                1.0
            }
        })
        .collect();
    (mean, scale)
}

pub fn train_linear(
    features: &[Vec<f64>],
    labels: &[u8],
    factor: u32,
    image_px: u32,
    params: &TrainParams,
) -> Result<LinearModel> {
    train_linear_traced(features, labels, factor, image_px, params).map(|(m, _)| m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub accuracy: f64,
    pub true_positive: usize,
    pub true_negative: usize,
    pub false_positive: usize,
    pub false_negative: usize,
}

impl Evaluation {
    pub fn total(&self) -> usize {
        self.true_positive + self.true_negative + self.false_positive + self.false_negative
    }
}

/// Accuracy and confusion counts at the 0.5 probability threshold.
pub fn evaluate(model: &LinearModel, features: &[Vec<f64>], labels: &[u8]) -> Result<Evaluation> {
    if features.is_empty() {
        return Err(Error::Eval("empty evaluation set".into()));
    }
    if features.len() != labels.len() {
        return Err(Error::Eval("features and labels differ in length".into()));
    }
    let mut eval = Evaluation {
        accuracy: 0.0,
        true_positive: 0,
        true_negative: 0,
        false_positive: 0,
        false_negative: 0,
    };
    for (x, &y) in features.iter().zip(labels) {
        match (model.predict(x), y) {
            (1, 1) => eval.true_positive += 1,
            (0, 0) => eval.true_negative += 1,
            (1, _) => eval.false_positive += 1,
            _ => eval.false_negative += 1,
        }
    }
    eval.accuracy = (eval.true_positive + eval.true_negative) as f64 / features.len() as f64;
    Ok(eval)
}

/// Pooled features and labels for every rendered manifest entry that carries
/// `label`. Images are read relative to `dataset_dir`.
pub fn manifest_features(
    dataset_dir: &Path,
    entries: &[ManifestEntry],
    label: &str,
    factor: u32,
) -> Result<LabelledFeatures> {
    let mut out = LabelledFeatures::default();
    for entry in entries {
        let (Some(image), Some(&y)) = (&entry.image, entry.labels.get(label)) else {
            continue;
        };
        let path = dataset_dir.join(image);
        let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
        let img = decode_image(&bytes)?;
        if out.image_px == 0 {
            out.image_px = img.width;
        }
        out.features.push(downsample(&img, factor)?);
        out.labels.push(y);
        out.ids.push(entry.id.clone());
    }
    Ok(out)
}

#[derive(Debug, Clone, Default)]
pub struct LabelledFeatures {
    pub ids: Vec<String>,
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
    pub image_px: u32,
}
