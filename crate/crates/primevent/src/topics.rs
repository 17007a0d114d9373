//! Greedy extraction of influential topics.
//!
//! A topic is a set of features that (a) occur in overlapping documents,
//! (b) burst at the same times, and (c) burst in windows where the index
//! was volatile. Each candidate set is scored by the product of three
//! components — mean pairwise document Jaccard, mean pairwise burst-series
//! cosine, and the summed volatility mass of the members' bursty windows —
//! and sets are grown greedily while the product strictly improves.

use crate::burst::BurstMatrix;
use crate::corpus::WindowedCorpus;
use crate::error::{Error, Result};
use crate::volatility::ProbVolatility;

/// A group of features scored as one influential topic.
#[derive(Debug, Clone, PartialEq)]
pub struct Topic {
    /// Member feature strings, lexicographically sorted.
    pub features: Vec<String>,
    /// Mean pairwise document Jaccard similarity (1.0 for singletons).
    pub doc_component: f64,
    /// Mean pairwise burst-series cosine similarity (1.0 for singletons).
    pub temporal_component: f64,
    /// Summed volatility mass over member bursty windows (1.0 in baseline
    /// mode, which ignores the index).
    pub influence_component: f64,
    /// Product of the three components.
    pub probability: f64,
    /// Per-window burst rate: the mean of member feature series.
    pub burst_series: Vec<f64>,
    /// Windows where `burst_series` reaches the burst threshold.
    pub bursty_windows: Vec<usize>,
}

/// The three scored components of a candidate feature set, plus their
/// product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objective {
    pub doc_component: f64,
    pub temporal_component: f64,
    pub influence_component: f64,
    pub probability: f64,
}

fn check_feature(f: usize, count: usize) -> Result<()> {
    if f >= count {
        return Err(Error::UnknownFeature(format!("#{f}")));
    }
    Ok(())
}

/// Jaccard similarity of the document sets of two features: the fraction
/// of documents mentioning either feature that mention both. Returns 0
/// when both sets are empty.
pub fn doc_similarity(f_i: usize, f_j: usize, corpus: &WindowedCorpus) -> Result<f64> {
    check_feature(f_i, corpus.feature_count())?;
    check_feature(f_j, corpus.feature_count())?;
    let a = &corpus.doc_sets[f_i];
    let b = &corpus.doc_sets[f_j];
    let mut shared = 0usize;
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                shared += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - shared;
    if union == 0 {
        return Ok(0.0);
    }
    Ok(shared as f64 / union as f64)
}

/// Cosine similarity of the burst series of two features. Returns 0 when
/// either series is all-zero.
pub fn temporal_similarity(f_i: usize, f_j: usize, bursts: &BurstMatrix) -> Result<f64> {
    check_feature(f_i, bursts.series.len())?;
    check_feature(f_j, bursts.series.len())?;
    let a = &bursts.series[f_i];
    let b = &bursts.series[f_j];
    let mut dot = 0.0;
    let mut norm_a = 0.0;
    let mut norm_b = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        norm_a += x * x;
        norm_b += y * y;
    }
    if norm_a == 0.0 || norm_b == 0.0 {
        return Ok(0.0);
    }
    Ok(dot / (norm_a.sqrt() * norm_b.sqrt()))
}

/// Volatility mass of a feature: the sum of PVI weights over its bursty
/// windows. Zero when the feature has no bursty windows.
pub fn influence_weight(f: usize, bursts: &BurstMatrix, pvi: &ProbVolatility) -> f64 {
    bursts.bursty_windows[f].iter().map(|&w| pvi.pvi[w]).sum()
}

/// Scores a feature set: mean pairwise document similarity, mean pairwise
/// temporal similarity, summed influence weight, and their product.
/// Singletons have no pairs; both pairwise components are 1 by convention.
pub fn topic_objective(
    features: &[usize],
    corpus: &WindowedCorpus,
    bursts: &BurstMatrix,
    pvi: &ProbVolatility,
) -> Result<Objective> {
    if features.is_empty() {
        return Err(Error::invalid("cannot score an empty feature set"));
    }
    let influence: f64 = features.iter().map(|&f| influence_weight(f, bursts, pvi)).sum();
    if features.len() == 1 {
        check_feature(features[0], corpus.feature_count())?;
        return Ok(Objective {
            doc_component: 1.0,
            temporal_component: 1.0,
            influence_component: influence,
            probability: influence,
        });
    }
    let mut doc_sum = 0.0;
    let mut temporal_sum = 0.0;
    for (i, &a) in features.iter().enumerate() {
        for &b in &features[i + 1..] {
            doc_sum += doc_similarity(a, b, corpus)?;
            temporal_sum += temporal_similarity(a, b, bursts)?;
        }
    }
    let pairs = (features.len() * (features.len() - 1) / 2) as f64;
    let doc_component = doc_sum / pairs;
    let temporal_component = temporal_sum / pairs;
    Ok(Objective {
        doc_component,
        temporal_component,
        influence_component: influence,
        probability: doc_component * temporal_component * influence,
    })
}

/// Per-window burst rate of a topic — the mean of its member feature
/// series — plus the windows where that rate reaches `threshold`.
///
/// `features` must be non-empty and in range for `bursts`.
pub fn topic_burst_series(
    features: &[usize],
    bursts: &BurstMatrix,
    threshold: f64,
) -> (Vec<f64>, Vec<usize>) {
    assert!(!features.is_empty(), "topic must have at least one feature");
    let windows = bursts.window_count();
    let mut series = vec![0.0; windows];
    for &f in features {
        for (w, value) in bursts.series[f].iter().enumerate() {
            series[w] += value;
        }
    }
    let scale = 1.0 / features.len() as f64;
    for value in &mut series {
        *value *= scale;
    }
    let bursty = (0..windows).filter(|&w| series[w] >= threshold).collect();
    (series, bursty)
}

/// Greedily extracts disjoint topics from the features that have at least
/// one bursty window.
///
/// Candidates are ranked by influence weight (ties by feature order) and
/// the highest-ranked unassigned feature seeds each topic. The topic then
/// absorbs, one at a time, the unassigned candidate that maximizes the
/// objective product, as long as the product strictly improves and the
/// size stays within `size_cap`. A singleton's product counts as 0 for
/// the growth decision, so a seed pairs up whenever any positive-scoring
/// partner exists; the reported components still use the singleton
/// convention (= 1) if it stays alone.
///
/// With `baseline` set, the influence component is pinned to 1 — grouping
/// then depends on text coherence alone, and candidate ranking degrades
/// to feature order.
pub fn extract_topics(
    corpus: &WindowedCorpus,
    bursts: &BurstMatrix,
    pvi: &ProbVolatility,
    size_cap: usize,
    baseline: bool,
) -> Result<Vec<Topic>> {
    if size_cap == 0 {
        return Err(Error::invalid("topic size cap must be at least 1"));
    }
    if bursts.features.len() != corpus.feature_count() {
        return Err(Error::LengthMismatch {
            left: bursts.features.len(),
            right: corpus.feature_count(),
        });
    }
    if bursts.window_count() != pvi.pvi.len() {
        return Err(Error::LengthMismatch {
            left: bursts.window_count(),
            right: pvi.pvi.len(),
        });
    }
    let weights: Vec<f64> = (0..corpus.feature_count())
        .map(|f| if baseline { 1.0 } else { influence_weight(f, bursts, pvi) })
        .collect();
    let mut candidates: Vec<usize> = (0..corpus.feature_count())
        .filter(|&f| !bursts.bursty_windows[f].is_empty())
        .collect();
    candidates.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));

    let mut assigned = vec![false; corpus.feature_count()];
    let mut topics = Vec::new();
    for &seed in &candidates {
        if assigned[seed] {
            continue;
        }
        assigned[seed] = true;
        let mut members = vec![seed];
        // Pairwise similarity sums within the topic so far, and, per open
        // candidate, the sums of its similarities to every member; each
        // pair is computed once.
        let mut doc_sum = 0.0;
        let mut temporal_sum = 0.0;
        let mut influence_sum = weights[seed];
        let mut open: Vec<usize> = candidates
            .iter()
            .copied()
            .filter(|&f| !assigned[f])
            .collect();
        let mut doc_to_members = vec![0.0; corpus.feature_count()];
        let mut temporal_to_members = vec![0.0; corpus.feature_count()];
        for &c in &open {
            doc_to_members[c] = doc_similarity(seed, c, corpus)?;
            temporal_to_members[c] = temporal_similarity(seed, c, bursts)?;
        }
        // A lone seed counts as 0 so that any positive pair beats it.
        let mut probability = 0.0;
        while members.len() < size_cap && !open.is_empty() {
            let pairs = (members.len() * (members.len() + 1) / 2) as f64;
            let mut best: Option<(f64, usize)> = None;
            for &c in &open {
                let doc_mean = (doc_sum + doc_to_members[c]) / pairs;
                let temporal_mean = (temporal_sum + temporal_to_members[c]) / pairs;
                let influence = if baseline { 1.0 } else { influence_sum + weights[c] };
                let candidate_probability = doc_mean * temporal_mean * influence;
                let better = match best {
                    None => true,
                    Some((best_probability, best_feature)) => {
                        candidate_probability > best_probability
                            || (candidate_probability == best_probability && c < best_feature)
                    }
                };
                if better {
                    best = Some((candidate_probability, c));
                }
            }
            let (best_probability, best_feature) = best.expect("open set is non-empty");
            if best_probability <= probability {
                break;
            }
            probability = best_probability;
            doc_sum += doc_to_members[best_feature];
            temporal_sum += temporal_to_members[best_feature];
            influence_sum += weights[best_feature];
            assigned[best_feature] = true;
            members.push(best_feature);
            open.retain(|&f| f != best_feature);
            for &c in &open {
                doc_to_members[c] += doc_similarity(best_feature, c, corpus)?;
                temporal_to_members[c] += temporal_similarity(best_feature, c, bursts)?;
            }
        }

        members.sort_unstable();
        let influence_component = if baseline { 1.0 } else { influence_sum };
        let (doc_component, temporal_component) = if members.len() == 1 {
            (1.0, 1.0)
        } else {
            let pairs = (members.len() * (members.len() - 1) / 2) as f64;
            (doc_sum / pairs, temporal_sum / pairs)
        };
        let (burst_series, bursty_windows) =
            topic_burst_series(&members, bursts, bursts.threshold);
        topics.push(Topic {
            features: members.iter().map(|&f| corpus.features[f].clone()).collect(),
            doc_component,
            temporal_component,
            influence_component,
            probability: doc_component * temporal_component * influence_component,
            burst_series,
            bursty_windows,
        });
    }
    topics.sort_by(|a, b| {
        b.probability
            .total_cmp(&a.probability)
            .then_with(|| a.features.cmp(&b.features))
    });
    Ok(topics)
}
