use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Samples with ordinal labels 1..=r.
#[derive(Debug, Clone, PartialEq)]
pub struct OrdinalDataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

impl OrdinalDataset {
    /// Checks shapes, finiteness, and that every class 1..=r has a sample.
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::Malformed(format!("{} samples but {} labels", features.len(), labels.len())));
        }
        let dim = features.first().map_or(0, Vec::len);
        for (i, x) in features.iter().enumerate() {
            if x.len() != dim {
                return Err(Error::Malformed(format!("sample {i} has {} features, expected {dim}", x.len())));
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::Malformed(format!("sample {i} has a non-finite feature")));
            }
        }
        let ds = Self { features, labels };
        let counts = ds.class_counts();
        if let Some(i) = ds.labels.iter().position(|&l| l == 0) {
            return Err(Error::Malformed(format!("sample {i} has label 0; labels start at 1")));
        }
        if let Some(j) = counts.iter().position(|&c| c == 0) {
            return Err(Error::Malformed(format!("class {} has no samples", j + 1)));
        }
        Ok(ds)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    /// Number of classes r.
    pub fn classes(&self) -> usize {
        self.labels.iter().copied().max().unwrap_or(0)
    }

    /// Samples per class, index 0 for class 1.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.classes()];
        for &l in &self.labels {
            if l > 0 {
                counts[l - 1] += 1;
            }
        }
        counts
    }

    /// Shifts and scales every feature to zero mean and unit variance.
    ///
    /// Constant features are only centred.
    pub fn standardize(&mut self) {
        let n = self.len() as f64;
        for k in 0..self.dim() {
            let mean = self.features.iter().map(|x| x[k]).sum::<f64>() / n;
            let var = self.features.iter().map(|x| (x[k] - mean).powi(2)).sum::<f64>() / n;
            let scale = if var > 0.0 { var.sqrt() } else { 1.0 };
            for x in &mut self.features {
                x[k] = (x[k] - mean) / scale;
            }
        }
    }

    /// One sample per line: features then the integer label, separated by
    /// commas, semicolons or whitespace. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(|c: char| c == ',' || c == ';' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            let Some((label, xs)) = fields.split_last() else { continue };
            let label: usize = label.parse().map_err(|_| Error::Parse(format!("line {}: label `{label}` is not a positive integer", lineno + 1)))?;
            let x = xs
                .iter()
                .map(|s| s.parse::<f64>().map_err(|_| Error::Parse(format!("line {}: `{s}` is not a number", lineno + 1))))
                .collect::<Result<Vec<_>>>()?;
            features.push(x);
            labels.push(label);
        }
        Self::new(features, labels)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (x, l) in self.features.iter().zip(&self.labels) {
            for v in x {
                out.push_str(&format!("{},", crate::model::io::sig12(*v)));
            }
            out.push_str(&format!("{l}\n"));
        }
        out
    }
}

/// Latent-score data: Gaussian features, score w·x + noise, labels by
/// equal-frequency binning of the score into `classes` bins. Features are
/// standardized afterwards.
pub fn synthetic(samples: usize, dim: usize, classes: usize, noise: f64, seed: u64) -> Result<OrdinalDataset> {
    if classes == 0 || samples < classes || dim == 0 {
        return Err(Error::Malformed(format!("cannot bin {samples} samples into {classes} classes in {dim} dimensions")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let mut features = Vec::with_capacity(samples);
    let mut scores = Vec::with_capacity(samples);
    for _ in 0..samples {
        let x: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let e: f64 = rng.sample(StandardNormal);
        scores.push(x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + noise * e);
        features.push(x);
    }
    let mut order: Vec<usize> = (0..samples).collect();
    order.sort_by(|&i, &j| scores[i].total_cmp(&scores[j]).then(i.cmp(&j)));
    let mut labels = vec![0; samples];
    for (rank, &i) in order.iter().enumerate() {
        labels[i] = 1 + rank * classes / samples;
    }
    let mut ds = OrdinalDataset::new(features, labels)?;
    ds.standardize();
    Ok(ds)
}
