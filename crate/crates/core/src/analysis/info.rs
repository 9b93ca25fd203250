//! Unigram information content of utterances, averaged per child-age year.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{frequency_table, AnalysisError};
use crate::corpus::UtteranceRecord;
use crate::stream::{IpaSegment, PhonemeStream};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothing {
    #[default]
    None,
    /// Add one to every count, reserving one extra count for unseen symbols.
    AddOne,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnigramModel {
    pub probabilities: BTreeMap<IpaSegment, f64>,
    /// Probability given to any segment outside the model (add-one only).
    pub unknown_probability: Option<f64>,
    pub total_tokens: u64,
    pub smoothing: Smoothing,
}

impl UnigramModel {
    /// Relative frequencies of segment tokens; boundaries are not counted.
    pub fn build<'a, I>(streams: I, smoothing: Smoothing) -> Result<Self, AnalysisError>
    where
        I: IntoIterator<Item = &'a PhonemeStream>,
    {
        Self::from_counts(frequency_table(streams), smoothing)
    }

    pub fn from_counts(counts: BTreeMap<IpaSegment, u64>, smoothing: Smoothing) -> Result<Self, AnalysisError> {
        let total: u64 = counts.values().sum();
        if total == 0 {
            return Err(AnalysisError::NoSegments);
        }
        let (probabilities, unknown_probability) = match smoothing {
            Smoothing::None => {
                let total = total as f64;
                (counts.into_iter().map(|(s, c)| (s, c as f64 / total)).collect(), None)
            }
            Smoothing::AddOne => {
                let denominator = (total + counts.len() as u64 + 1) as f64;
                (
                    counts
                        .into_iter()
                        .map(|(s, c)| (s, (c + 1) as f64 / denominator))
                        .collect(),
                    Some(1.0 / denominator),
                )
            }
        };
        Ok(UnigramModel {
            probabilities,
            unknown_probability,
            total_tokens: total,
            smoothing,
        })
    }

    pub fn probability(&self, seg: &IpaSegment) -> Option<f64> {
        self.probabilities.get(seg).copied().or(self.unknown_probability)
    }

    /// Total mass, including the unknown-symbol share.
    pub fn total_mass(&self) -> f64 {
        self.probabilities.values().sum::<f64>() + self.unknown_probability.unwrap_or(0.0)
    }

    /// Information of an utterance in bits: the sum of `-log2 P` over its segments.
    pub fn information(&self, stream: &PhonemeStream) -> Result<f64, AnalysisError> {
        stream.segments().try_fold(0.0, |bits, seg| {
            let p = self
                .probability(seg)
                .ok_or_else(|| AnalysisError::UnseenSymbol(seg.clone()))?;
            Ok(bits - p.log2())
        })
    }
}

pub fn utterance_information(model: &UnigramModel, stream: &PhonemeStream) -> Result<f64, AnalysisError> {
    model.information(stream)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgedUtterance {
    pub age_months: f64,
    pub stream: PhonemeStream,
}

/// Child-directed rows with an age and a phonemized stream.
pub fn child_directed(records: &[UtteranceRecord]) -> Vec<AgedUtterance> {
    records
        .iter()
        .filter(|r| !r.is_child)
        .filter_map(|r| {
            Some(AgedUtterance {
                age_months: r.target_child_age?,
                stream: PhonemeStream::parse(r.phonemized.as_deref()?),
            })
        })
        .collect()
}

/// Year bucket of an age in months: bucket k covers [12k, 12k + 12).
pub fn age_bucket(age_months: f64) -> Option<u32> {
    (age_months.is_finite() && age_months >= 0.0).then(|| (age_months / 12.0).floor() as u32)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ModelScope {
    /// One model over the (sampled) utterances of every bucket.
    #[default]
    Pooled,
    /// A separate model per bucket.
    PerBucket,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InfoOptions {
    pub scope: ModelScope,
    /// Utterances drawn per bucket; all of them when `None`.
    pub sample_size: Option<usize>,
    pub seed: u64,
    pub smoothing: Smoothing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfoCurvePoint {
    pub age_bucket: u32,
    pub mean_information: f64,
    pub n_utterances: usize,
}

/// Mean utterance information per age year. Buckets with no utterances
/// are left out.
pub fn info_by_age(utterances: &[AgedUtterance], options: InfoOptions) -> Result<Vec<InfoCurvePoint>, AnalysisError> {
    let mut buckets: BTreeMap<u32, Vec<&PhonemeStream>> = BTreeMap::new();
    for u in utterances {
        if let Some(bucket) = age_bucket(u.age_months) {
            buckets.entry(bucket).or_default().push(&u.stream);
        }
    }

    if let Some(size) = options.sample_size {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        for streams in buckets.values_mut() {
            if streams.len() > size {
                let mut picked = index::sample(&mut rng, streams.len(), size).into_vec();
                picked.sort_unstable();
                *streams = picked.into_iter().map(|i| streams[i]).collect();
            }
        }
    }

    let pooled = match options.scope {
        ModelScope::Pooled => Some(build_or_empty(buckets.values().flatten().copied(), options.smoothing)?),
        ModelScope::PerBucket => None,
    };

    let mut curve = Vec::with_capacity(buckets.len());
    for (bucket, streams) in &buckets {
        let local;
        let model = match &pooled {
            Some(model) => model,
            None => {
                local = build_or_empty(streams.iter().copied(), options.smoothing)?;
                &local
            }
        };
        let mean_information = match model {
            None => 0.0,
            Some(model) => {
                let mut total = 0.0;
                for stream in streams {
                    total += model.information(stream)?;
                }
                total / streams.len() as f64
            }
        };
        curve.push(InfoCurvePoint {
            age_bucket: *bucket,
            mean_information,
            n_utterances: streams.len(),
        });
    }
    Ok(curve)
}

/// `None` when there are no segments at all (every utterance then carries 0 bits).
fn build_or_empty<'a, I>(streams: I, smoothing: Smoothing) -> Result<Option<UnigramModel>, AnalysisError>
where
    I: IntoIterator<Item = &'a PhonemeStream>,
{
    match UnigramModel::build(streams, smoothing) {
        Ok(model) => Ok(Some(model)),
        Err(AnalysisError::NoSegments) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn info_curve_csv(points: &[InfoCurvePoint]) -> String {
    let mut out = String::from("age_bucket,mean_information,n_utterances\n");
    for p in points {
        out.push_str(&format!("{},{},{}\n", p.age_bucket, p.mean_information, p.n_utterances));
    }
    out
}

/// Segments whose probability is not defined by the model.
pub fn unseen_segments(model: &UnigramModel, stream: &PhonemeStream) -> BTreeSet<IpaSegment> {
    stream
        .segments()
        .filter(|s| model.probability(s).is_none())
        .cloned()
        .collect()
}
