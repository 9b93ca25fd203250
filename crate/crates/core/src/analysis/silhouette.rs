//! Silhouette score of labelled vectors under Euclidean distance.

use std::collections::BTreeMap;
use std::io::Read;

use super::AnalysisError;

/// Vectors with a cluster label each, e.g. embeddings labelled by the value
/// of one phonological feature.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledVectorSet {
    vectors: Vec<Vec<f64>>,
    labels: Vec<String>,
}

impl LabeledVectorSet {
    pub fn new(vectors: Vec<Vec<f64>>, labels: Vec<String>) -> Result<Self, AnalysisError> {
        if vectors.len() != labels.len() {
            return Err(AnalysisError::InvalidArgument(format!(
                "{} vectors but {} labels",
                vectors.len(),
                labels.len()
            )));
        }
        if let Some(first) = vectors.first() {
            if let Some(bad) = vectors.iter().position(|v| v.len() != first.len()) {
                return Err(AnalysisError::InvalidArgument(format!(
                    "vector {bad} has dimension {} instead of {}",
                    vectors[bad].len(),
                    first.len()
                )));
            }
        }
        Ok(LabeledVectorSet { vectors, labels })
    }

    /// Reads a CSV with a label column and numeric columns.
    pub fn from_csv<R: Read>(input: R, label_column: &str) -> Result<Self, AnalysisError> {
        let mut reader = csv::Reader::from_reader(input);
        let headers = reader.headers()?.clone();
        let label_index = headers
            .iter()
            .position(|h| h == label_column)
            .ok_or_else(|| AnalysisError::InvalidArgument(format!("no {label_column:?} column")))?;
        let mut vectors = Vec::new();
        let mut labels = Vec::new();
        for record in reader.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            let mut vector = Vec::with_capacity(record.len().saturating_sub(1));
            for (i, cell) in record.iter().enumerate() {
                if i == label_index {
                    continue;
                }
                let value: f64 = cell
                    .trim()
                    .parse()
                    .map_err(|_| AnalysisError::InvalidArgument(format!("line {line}: {cell:?} is not a number")))?;
                vector.push(value);
            }
            labels.push(record[label_index].to_string());
            vectors.push(vector);
        }
        Self::new(vectors, labels)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Per-point silhouette values `(b - a) / max(a, b)`.
///
/// `a` is the mean distance to the rest of the point's own cluster and `b`
/// the smallest mean distance to another cluster. Points alone in their
/// cluster score 0, as do points with `a = b = 0`.
pub fn silhouette_samples(set: &LabeledVectorSet) -> Result<Vec<f64>, AnalysisError> {
    let mut cluster_of: BTreeMap<&str, usize> = BTreeMap::new();
    for label in &set.labels {
        let next = cluster_of.len();
        cluster_of.entry(label.as_str()).or_insert(next);
    }
    let k = cluster_of.len();
    if k < 2 {
        return Err(AnalysisError::InvalidArgument(format!(
            "silhouette needs at least 2 labels, got {k}"
        )));
    }
    let assignment: Vec<usize> = set.labels.iter().map(|l| cluster_of[l.as_str()]).collect();
    let mut sizes = vec![0usize; k];
    for &c in &assignment {
        sizes[c] += 1;
    }

    let n = set.len();
    let mut scores = Vec::with_capacity(n);
    let mut sums = vec![0.0; k];
    for i in 0..n {
        sums.iter_mut().for_each(|s| *s = 0.0);
        for j in 0..n {
            if i != j {
                sums[assignment[j]] += euclidean(&set.vectors[i], &set.vectors[j]);
            }
        }
        let own = assignment[i];
        if sizes[own] == 1 {
            scores.push(0.0);
            continue;
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        scores.push(if denom == 0.0 { 0.0 } else { (b - a) / denom });
    }
    Ok(scores)
}

/// Mean silhouette value over all points, in [-1, 1].
pub fn silhouette(set: &LabeledVectorSet) -> Result<f64, AnalysisError> {
    let scores = silhouette_samples(set)?;
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}
