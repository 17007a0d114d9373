//! Per-window grouping of bursty topics into local topic clusters.
//!
//! Topics that burst in the same window are clustered by the overlap of
//! their document-frequency vectors: K-means under cosine distance, run
//! for every candidate cluster count, keeping the count whose partition
//! minimizes the ratio of weighted mean inter-cluster to weighted mean
//! intra-cluster similarity. A ratio near 1 means the window's topics are
//! too homogeneous to split, in which case they form one cluster.

use crate::corpus::WindowedCorpus;
use crate::error::{Error, Result};
use crate::topics::Topic;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// One local topic cluster: a window plus the topics grouped together
/// there.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicCluster {
    /// Window the cluster lives in.
    pub window: usize,
    /// Indices into the caller's topic list, ascending.
    pub topic_ids: Vec<usize>,
    /// Mean of the member topics' document-frequency vectors over the
    /// window's documents.
    pub centroid: Vec<f64>,
}

/// Knobs for per-window clustering.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterConfig {
    /// Largest cluster count to try.
    pub kmax: usize,
    /// Independent K-means starts per cluster count.
    pub restarts: usize,
    /// Root RNG seed; each window derives its own stream from it.
    pub seed: u64,
    /// Quality ratio above which a window keeps a single cluster.
    pub homogeneity: f64,
    /// Iteration cap per K-means start.
    pub max_iters: usize,
    /// Centroid-movement threshold that counts as convergence.
    pub tolerance: f64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            kmax: 8,
            restarts: 5,
            seed: 0,
            homogeneity: 0.8,
            max_iters: 50,
            tolerance: 1e-6,
        }
    }
}

/// Document-frequency vector of a topic in one window: the mean of its
/// member features' term-frequency vectors over the window's documents.
/// A window with no documents yields an empty (zero) vector.
pub fn topic_doc_vector(topic: &Topic, w: usize, corpus: &WindowedCorpus) -> Result<Vec<f64>> {
    let ids = feature_ids(topic, corpus)?;
    Ok(doc_vector_for_ids(&ids, w, corpus))
}

/// Cosine similarity of two topics' document-frequency vectors in window
/// `w`; 0 when either vector is zero.
pub fn topic_similarity(
    a: &Topic,
    b: &Topic,
    w: usize,
    corpus: &WindowedCorpus,
) -> Result<f64> {
    let va = topic_doc_vector(a, w, corpus)?;
    let vb = topic_doc_vector(b, w, corpus)?;
    Ok(cosine(&va, &vb))
}

/// Quality of a multi-cluster partition: weighted mean similarity across
/// clusters divided by weighted mean similarity within clusters, where
/// weights are pair counts and a singleton cluster contributes one pair
/// of similarity 1. Lower is better; 0 means perfectly separated.
///
/// `partition` holds index lists into `vectors`.
pub fn clustering_quality(partition: &[Vec<usize>], vectors: &[Vec<f64>]) -> Result<f64> {
    if partition.len() < 2 {
        return Err(Error::invalid(
            "clustering quality requires at least two clusters",
        ));
    }
    let mut intra_sum = 0.0;
    let mut intra_weight = 0.0;
    for cluster in partition {
        if cluster.len() == 1 {
            intra_sum += 1.0;
            intra_weight += 1.0;
            continue;
        }
        for (i, &a) in cluster.iter().enumerate() {
            for &b in &cluster[i + 1..] {
                intra_sum += cosine(&vectors[a], &vectors[b]);
                intra_weight += 1.0;
            }
        }
    }
    let mut inter_sum = 0.0;
    let mut inter_weight = 0.0;
    for (i, left) in partition.iter().enumerate() {
        for right in &partition[i + 1..] {
            for &a in left {
                for &b in right {
                    inter_sum += cosine(&vectors[a], &vectors[b]);
                    inter_weight += 1.0;
                }
            }
        }
    }
    if inter_weight == 0.0 || inter_sum == 0.0 {
        return Ok(0.0);
    }
    let intra_mean = intra_sum / intra_weight;
    if intra_mean == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((inter_sum / inter_weight) / intra_mean)
}

/// Groups the topics bursty in window `w` into clusters.
///
/// `topic_ids` are indices into `topics`. With one topic the result is a
/// single singleton cluster. Otherwise K-means (cosine distance, on
/// L2-normalized document vectors, farthest-point initialization,
/// `restarts` starts) runs for every k in `2..=min(|topics|, kmax)`; the
/// partition with the lowest quality ratio wins, ties favoring fewer
/// clusters. If even the best ratio exceeds `homogeneity`, the window's
/// topics stay together as one cluster.
pub fn cluster_window(
    topic_ids: &[usize],
    topics: &[Topic],
    w: usize,
    corpus: &WindowedCorpus,
    config: &ClusterConfig,
) -> Result<Vec<TopicCluster>> {
    if topic_ids.is_empty() {
        return Err(Error::invalid("cannot cluster a window with no topics"));
    }
    if config.kmax == 0 {
        return Err(Error::invalid("kmax must be at least 1"));
    }
    let raw: Vec<Vec<f64>> = topic_ids
        .iter()
        .map(|&t| {
            let ids = feature_ids(&topics[t], corpus)?;
            Ok(doc_vector_for_ids(&ids, w, corpus))
        })
        .collect::<Result<_>>()?;
    let normalized: Vec<Vec<f64>> = raw.iter().map(|v| l2_normalized(v)).collect();

    let single = |ids: &[usize]| -> Vec<TopicCluster> {
        vec![make_cluster(w, ids.to_vec(), topic_ids, &raw)]
    };
    if topic_ids.len() == 1 || config.kmax == 1 {
        return Ok(single(&(0..topic_ids.len()).collect::<Vec<_>>()));
    }

    // Each window draws from its own RNG stream so windows can be
    // processed in any order, or in parallel, without changing results.
    let window_seed = config
        .seed
        .wrapping_add((w as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut rng = ChaCha8Rng::seed_from_u64(window_seed);

    let mut best: Option<(f64, Vec<Vec<usize>>)> = None;
    let upper = config.kmax.min(topic_ids.len());
    for k in 2..=upper {
        for _ in 0..config.restarts.max(1) {
            let partition = kmeans_once(&normalized, k, config, &mut rng);
            // Indistinguishable points can collapse every assignment into
            // one cluster; that start separated nothing.
            let quality = if partition.len() < 2 {
                f64::INFINITY
            } else {
                clustering_quality(&partition, &normalized)?
            };
            let improves = match &best {
                None => true,
                Some((best_quality, best_partition)) => {
                    quality < *best_quality
                        || (quality == *best_quality && partition.len() < best_partition.len())
                }
            };
            if improves {
                best = Some((quality, partition));
            }
        }
    }
    let (quality, partition) = best.expect("at least one k was evaluated");
    if quality > config.homogeneity {
        return Ok(single(&(0..topic_ids.len()).collect::<Vec<_>>()));
    }
    let mut clusters: Vec<TopicCluster> = partition
        .into_iter()
        .map(|members| make_cluster(w, members, topic_ids, &raw))
        .collect();
    clusters.sort_by(|a, b| a.topic_ids.cmp(&b.topic_ids));
    Ok(clusters)
}

/// Clusters of every window, indexed `[window][cluster]`. Windows without
/// bursty topics hold an empty list.
pub type WindowClusters = Vec<Vec<TopicCluster>>;

/// Clusters every window's bursty topics. Windows are independent and run
/// in parallel; results are deterministic for a fixed seed because each
/// window derives its own RNG stream.
pub fn cluster_windows(
    topics: &[Topic],
    corpus: &WindowedCorpus,
    config: &ClusterConfig,
) -> Result<WindowClusters> {
    let mut bursty_by_window: Vec<Vec<usize>> = vec![Vec::new(); corpus.window_count()];
    for (t, topic) in topics.iter().enumerate() {
        for &w in &topic.bursty_windows {
            bursty_by_window[w].push(t);
        }
    }
    bursty_by_window
        .into_par_iter()
        .enumerate()
        .map(|(w, ids)| {
            if ids.is_empty() {
                Ok(Vec::new())
            } else {
                cluster_window(&ids, topics, w, corpus, config)
            }
        })
        .collect()
}

fn make_cluster(
    w: usize,
    local_members: Vec<usize>,
    topic_ids: &[usize],
    raw: &[Vec<f64>],
) -> TopicCluster {
    let dim = raw.first().map_or(0, Vec::len);
    let mut centroid = vec![0.0; dim];
    for &m in &local_members {
        for (c, v) in centroid.iter_mut().zip(&raw[m]) {
            *c += v;
        }
    }
    for c in &mut centroid {
        *c /= local_members.len() as f64;
    }
    let mut ids: Vec<usize> = local_members.iter().map(|&m| topic_ids[m]).collect();
    ids.sort_unstable();
    TopicCluster {
        window: w,
        topic_ids: ids,
        centroid,
    }
}

/// One K-means start: farthest-point initialization, then Lloyd steps
/// under cosine distance until centroids move less than the tolerance or
/// the iteration cap is hit. Returns the non-empty clusters as sorted
/// index lists (sorted by their smallest member).
fn kmeans_once(
    points: &[Vec<f64>],
    k: usize,
    config: &ClusterConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<usize>> {
    let n = points.len();
    debug_assert!(k >= 2 && k <= n);
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    let first = rng.gen_range(0..n);
    centers.push(points[first].clone());
    while centers.len() < k {
        let refs: Vec<&Vec<f64>> = centers.iter().collect();
        let next = farthest_point(points, &refs);
        centers.push(points[next].clone());
    }

    let mut assignment = vec![0usize; n];
    for _ in 0..config.max_iters {
        for (i, point) in points.iter().enumerate() {
            assignment[i] = nearest_center(point, &centers);
        }
        let mut next_centers: Vec<Vec<f64>> = Vec::with_capacity(k);
        for c in 0..k {
            let members: Vec<usize> =
                (0..n).filter(|&i| assignment[i] == c).collect();
            if members.is_empty() {
                // Re-seed an emptied cluster from the point farthest from
                // every other current center.
                let others: Vec<&Vec<f64>> = centers
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != c)
                    .map(|(_, center)| center)
                    .collect();
                next_centers.push(points[farthest_point(points, &others)].clone());
                continue;
            }
            let mut mean = vec![0.0; points[0].len()];
            for &m in &members {
                for (acc, v) in mean.iter_mut().zip(&points[m]) {
                    *acc += v;
                }
            }
            for v in &mut mean {
                *v /= members.len() as f64;
            }
            next_centers.push(l2_normalized(&mean));
        }
        let moved = centers
            .iter()
            .zip(&next_centers)
            .map(|(old, new)| {
                old.iter()
                    .zip(new)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        centers = next_centers;
        if moved < config.tolerance {
            break;
        }
    }
    for (i, point) in points.iter().enumerate() {
        assignment[i] = nearest_center(point, &centers);
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for c in 0..k {
        let members: Vec<usize> = (0..n).filter(|&i| assignment[i] == c).collect();
        if !members.is_empty() {
            clusters.push(members);
        }
    }
    clusters.sort_by_key(|members| members[0]);
    clusters
}

/// Index of the point with the greatest cosine distance to its nearest
/// center; ties go to the lowest index.
fn farthest_point(points: &[Vec<f64>], centers: &[&Vec<f64>]) -> usize {
    let mut best = (f64::NEG_INFINITY, 0usize);
    for (i, point) in points.iter().enumerate() {
        let nearest = centers
            .iter()
            .map(|center| 1.0 - dot(point, center))
            .fold(f64::INFINITY, f64::min);
        if nearest > best.0 {
            best = (nearest, i);
        }
    }
    best.1
}

fn nearest_center(point: &[f64], centers: &[Vec<f64>]) -> usize {
    let mut best = (f64::INFINITY, 0usize);
    for (c, center) in centers.iter().enumerate() {
        let distance = 1.0 - dot(point, center);
        if distance < best.0 {
            best = (distance, c);
        }
    }
    best.1
}

fn feature_ids(topic: &Topic, corpus: &WindowedCorpus) -> Result<Vec<usize>> {
    topic
        .features
        .iter()
        .map(|name| {
            corpus
                .feature_id(name)
                .ok_or_else(|| Error::UnknownFeature(name.clone()))
        })
        .collect()
}

fn doc_vector_for_ids(ids: &[usize], w: usize, corpus: &WindowedCorpus) -> Vec<f64> {
    let mut sum: Vec<f64> = Vec::new();
    for &f in ids {
        let tf = corpus.tf_vector(f, w);
        if sum.is_empty() {
            sum = tf;
        } else {
            for (acc, v) in sum.iter_mut().zip(&tf) {
                *acc += v;
            }
        }
    }
    let scale = 1.0 / ids.len() as f64;
    for v in &mut sum {
        *v *= scale;
    }
    sum
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot(a, b) / (na * nb)
}

fn l2_normalized(v: &[f64]) -> Vec<f64> {
    let norm = dot(v, v).sqrt();
    if norm == 0.0 {
        return v.to_vec();
    }
    v.iter().map(|x| x / norm).collect()
}
