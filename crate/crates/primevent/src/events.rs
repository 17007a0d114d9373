//! Priming-event discovery: chaining per-window topic clusters into
//! scored paths and grouping overlapping paths into events.
//!
//! Windows are visited in order of volatility weight. Each visit seeds a
//! path from every not-yet-used cluster of that window, then probes
//! forward and backward window by window: a path absorbs a neighboring
//! cluster only when the clusters are similar enough and the path's score
//! strictly improves. A used cluster can never seed or join a later path,
//! but two paths advancing in the same step may absorb the same cluster,
//! which is how overlapping paths — different facets of one event — arise.
//! Overlapping paths are merged by average-linkage clustering on their
//! shared members, and each merged group is reported as one event, scored
//! by burst intensity, volatility mass, and their correlation.

use crate::clustering::{cluster_windows, ClusterConfig, TopicCluster, WindowClusters};
use crate::corpus::WindowedCorpus;
use crate::error::{Error, Result};
use crate::topics::Topic;
use crate::volatility::ProbVolatility;

/// Identifies one cluster as (window, index within that window's list).
pub type ClusterRef = (usize, usize);

/// A chain of clusters over consecutive windows.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterPath {
    /// One cluster per window, windows consecutive and ascending.
    pub members: Vec<ClusterRef>,
    /// Burst intensity of the member cluster's topics at each member
    /// window.
    pub intensity: Vec<f64>,
    /// Score of the member sequence (the probing objective).
    pub score: f64,
}

impl ClusterPath {
    pub fn begin(&self) -> usize {
        self.members.first().expect("paths are never empty").0
    }

    pub fn end(&self) -> usize {
        self.members.last().expect("paths are never empty").0
    }
}

/// A group of overlapping cluster paths reported as one event.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimingEvent {
    /// First window of the merged span.
    pub begin: usize,
    /// Last window of the merged span (inclusive).
    pub end: usize,
    /// The member paths, in discovery order.
    pub paths: Vec<ClusterPath>,
    /// For each window of the span, the union of member clusters there
    /// (cluster indices within that window, ascending; empty for gaps).
    pub clusters_by_window: Vec<Vec<usize>>,
    /// Burst intensity per span window (0 where no member topic exists).
    pub intensity: Vec<f64>,
    /// Priming score recomputed over the merged span.
    pub score: f64,
}

/// Knobs for event discovery.
#[derive(Debug, Clone, PartialEq)]
pub struct EventConfig {
    /// Cluster-link threshold: a path crosses a window boundary only via
    /// a cluster pair with similarity above this.
    pub sigma: f64,
    /// Path-group threshold: merging stops when the best average overlap
    /// between path groups falls below this.
    pub tau: f64,
    /// Index-blind comparison mode: seed windows are ordered by burst
    /// intensity instead of volatility and probing maximizes intensity
    /// alone; final scores are still computed normally so the two modes
    /// can be compared.
    pub baseline: bool,
    /// Per-window clustering parameters.
    pub cluster: ClusterConfig,
}

impl Default for EventConfig {
    fn default() -> Self {
        EventConfig {
            sigma: 0.2,
            tau: 0.5,
            baseline: false,
            cluster: ClusterConfig::default(),
        }
    }
}

/// Probability-weighted Jaccard similarity of two clusters' topic sets:
/// the summed probability of shared topics over the summed probability of
/// all topics involved; 0 when the union carries no weight.
pub fn cluster_similarity(a: &TopicCluster, b: &TopicCluster, topics: &[Topic]) -> f64 {
    let mut shared = 0.0;
    let mut union = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.topic_ids.len() && j < b.topic_ids.len() {
        match a.topic_ids[i].cmp(&b.topic_ids[j]) {
            std::cmp::Ordering::Less => {
                union += topics[a.topic_ids[i]].probability;
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                union += topics[b.topic_ids[j]].probability;
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let p = topics[a.topic_ids[i]].probability;
                shared += p;
                union += p;
                i += 1;
                j += 1;
            }
        }
    }
    for &t in &a.topic_ids[i..] {
        union += topics[t].probability;
    }
    for &t in &b.topic_ids[j..] {
        union += topics[t].probability;
    }
    if union == 0.0 {
        return 0.0;
    }
    shared / union
}

/// Mean burst rate of a set of topics at window `w`; 0 for an empty set.
fn mean_burst(topic_ids: &[usize], topics: &[Topic], w: usize) -> f64 {
    if topic_ids.is_empty() {
        return 0.0;
    }
    let sum: f64 = topic_ids.iter().map(|&t| topics[t].burst_series[w]).sum();
    sum / topic_ids.len() as f64
}

/// Sorted union of the topic ids of the given clusters of one window.
fn topic_union(cluster_ids: &[usize], window_clusters: &[TopicCluster]) -> Vec<usize> {
    let mut ids: Vec<usize> = cluster_ids
        .iter()
        .flat_map(|&c| window_clusters[c].topic_ids.iter().copied())
        .collect();
    ids.sort_unstable();
    ids.dedup();
    ids
}

/// Intensity series of an event span: for each window offset, the mean
/// burst rate over the topics of the clusters listed there (0 where the
/// list is empty, e.g. a gap inside a merged span).
pub fn event_intensity(
    clusters_by_window: &[Vec<usize>],
    begin: usize,
    clusters: &WindowClusters,
    topics: &[Topic],
) -> Vec<f64> {
    clusters_by_window
        .iter()
        .enumerate()
        .map(|(offset, ids)| {
            let w = begin + offset;
            let union = topic_union(ids, &clusters[w]);
            mean_burst(&union, topics, w)
        })
        .collect()
}

fn l2_norm(series: &[f64]) -> f64 {
    series.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Pearson correlation with the scoring conventions: series shorter than
/// 3 are neutral (1), and a constant series at length ≥ 3 has no
/// direction (0).
fn correlation(a: &[f64], b: &[f64]) -> f64 {
    if a.len() < 3 {
        return 1.0;
    }
    let n = a.len() as f64;
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (x, y) in a.iter().zip(b) {
        let da = x - mean_a;
        let db = y - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if var_a == 0.0 || var_b == 0.0 {
        return 0.0;
    }
    cov / (var_a.sqrt() * var_b.sqrt())
}

/// Priming score of an intensity series against the aligned volatility
/// slice: ‖B‖ · ‖PVI‖ · Corref(B, PVI). High burst mass during high,
/// co-moving volatility scores high; anti-correlation scores negative.
pub fn priming_score(intensity: &[f64], pvi_slice: &[f64]) -> Result<f64> {
    if intensity.len() != pvi_slice.len() {
        return Err(Error::LengthMismatch {
            left: intensity.len(),
            right: pvi_slice.len(),
        });
    }
    if intensity.is_empty() {
        return Err(Error::invalid("cannot score an empty span"));
    }
    Ok(l2_norm(intensity) * l2_norm(pvi_slice) * correlation(intensity, pvi_slice))
}

/// Overlap of two paths: shared (window, cluster) members over the size
/// of the shorter path; 0 when either path is empty.
pub fn path_similarity(a: &ClusterPath, b: &ClusterPath) -> f64 {
    let shorter = a.members.len().min(b.members.len());
    if shorter == 0 {
        return 0.0;
    }
    let mut shared = 0usize;
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.members.len() && j < b.members.len() {
        match a.members[i].cmp(&b.members[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                shared += 1;
                i += 1;
                j += 1;
            }
        }
    }
    shared as f64 / shorter as f64
}

/// The objective a probing step maximizes: the priming score normally,
/// or intensity mass alone in baseline mode.
fn probe_objective(intensity: &[f64], pvi_slice: &[f64], baseline: bool) -> f64 {
    if baseline {
        l2_norm(intensity)
    } else {
        priming_score(intensity, pvi_slice).expect("series are aligned by construction")
    }
}

/// Seeds a path from every unused cluster of `seed_window` and grows the
/// paths by alternating forward and backward sweeps until none can
/// extend, so every returned path is locally maximal: no adjacent unused
/// cluster could still be absorbed with a score improvement. (A path
/// blocked in one direction may become extendable there again after
/// growing the other way, which is why the sweeps repeat.)
///
/// Within a sweep, each live path looks at the clusters of the window
/// adjacent to its moving end that were unused when that step began, and
/// absorbs the one giving the best strictly-improved score among those
/// with cluster similarity above `sigma` (ties to the lowest cluster
/// index). All clusters absorbed during a step are then marked used:
/// they can never seed or join a path at any later step, though two
/// paths moving in the same step may absorb the same cluster. A path
/// that fails to extend sits out the rest of the sweep.
pub fn probe_event_path(
    clusters: &WindowClusters,
    topics: &[Topic],
    pvi: &[f64],
    seed_window: usize,
    sign: &mut [Vec<bool>],
    sigma: f64,
    baseline: bool,
) -> Vec<ClusterPath> {
    let mut paths: Vec<ClusterPath> = Vec::new();
    for c in 0..clusters[seed_window].len() {
        if !sign[seed_window][c] {
            continue;
        }
        sign[seed_window][c] = false;
        let intensity = mean_burst(
            &clusters[seed_window][c].topic_ids,
            topics,
            seed_window,
        );
        paths.push(ClusterPath {
            members: vec![(seed_window, c)],
            intensity: vec![intensity],
            score: probe_objective(&[intensity], &pvi[seed_window..=seed_window], baseline),
        });
    }
    if paths.is_empty() {
        return paths;
    }

    let last = clusters.len() - 1;
    loop {
        let mut grew = false;
        for forward in [true, false] {
            let mut active: Vec<usize> = (0..paths.len()).collect();
            let boundaries: Vec<usize> = if forward {
                (0..last).collect()
            } else {
                (1..=last).rev().collect()
            };
            for w in boundaries {
                let next = if forward { w + 1 } else { w - 1 };
                let stepping: Vec<usize> = active
                    .iter()
                    .copied()
                    .filter(|&p| {
                        let end = if forward { paths[p].end() } else { paths[p].begin() };
                        end == w
                    })
                    .collect();
                if stepping.is_empty() {
                    continue;
                }
                // Snapshot of the clusters available this step;
                // extensions only take effect on the flags once the
                // step completes.
                let available: Vec<usize> =
                    (0..clusters[next].len()).filter(|&c| sign[next][c]).collect();
                let mut absorbed: Vec<usize> = Vec::new();
                for &p in &stepping {
                    let path = &paths[p];
                    let own_cluster = if forward {
                        path.members.last().expect("non-empty").1
                    } else {
                        path.members.first().expect("non-empty").1
                    };
                    let mut best: Option<(f64, usize)> = None;
                    for &c in &available {
                        let similarity = cluster_similarity(
                            &clusters[w][own_cluster],
                            &clusters[next][c],
                            topics,
                        );
                        if similarity <= sigma {
                            continue;
                        }
                        let step_intensity =
                            mean_burst(&clusters[next][c].topic_ids, topics, next);
                        let mut extended = path.intensity.clone();
                        let (begin, end) = if forward {
                            extended.push(step_intensity);
                            (path.begin(), next)
                        } else {
                            extended.insert(0, step_intensity);
                            (next, path.end())
                        };
                        let score = probe_objective(&extended, &pvi[begin..=end], baseline);
                        if score <= path.score {
                            continue;
                        }
                        let better = match best {
                            None => true,
                            Some((best_score, best_cluster)) => {
                                score > best_score
                                    || (score == best_score && c < best_cluster)
                            }
                        };
                        if better {
                            best = Some((score, c));
                        }
                    }
                    if let Some((score, c)) = best {
                        let step_intensity =
                            mean_burst(&clusters[next][c].topic_ids, topics, next);
                        let path = &mut paths[p];
                        if forward {
                            path.members.push((next, c));
                            path.intensity.push(step_intensity);
                        } else {
                            path.members.insert(0, (next, c));
                            path.intensity.insert(0, step_intensity);
                        }
                        path.score = score;
                        absorbed.push(c);
                        grew = true;
                    } else {
                        active.retain(|&q| q != p);
                    }
                }
                for c in absorbed {
                    sign[next][c] = false;
                }
            }
        }
        if !grew {
            break;
        }
    }
    paths
}

/// Merges overlapping paths into events by average-linkage agglomerative
/// clustering on path overlap, stopping when the best linkage falls below
/// `tau`. Each group becomes one event spanning the union of its paths,
/// with gap windows carrying intensity 0 and the score recomputed over
/// the whole span.
pub fn group_paths(
    paths: Vec<ClusterPath>,
    tau: f64,
    clusters: &WindowClusters,
    topics: &[Topic],
    pvi: &[f64],
) -> Result<Vec<PrimingEvent>> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::invalid(format!(
            "path-group threshold {tau} outside (0, 1]"
        )));
    }
    let n = paths.len();
    let mut similarity = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let s = path_similarity(&paths[i], &paths[j]);
            similarity[i][j] = s;
            similarity[j][i] = s;
        }
    }
    let mut groups: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..groups.len() {
            for b in a + 1..groups.len() {
                let mut sum = 0.0;
                for &i in &groups[a] {
                    for &j in &groups[b] {
                        sum += similarity[i][j];
                    }
                }
                let linkage = sum / (groups[a].len() * groups[b].len()) as f64;
                let better = match best {
                    None => linkage >= tau,
                    Some((best_linkage, _, _)) => linkage > best_linkage,
                };
                if better && linkage >= tau {
                    best = Some((linkage, a, b));
                }
            }
        }
        let Some((_, a, b)) = best else { break };
        let merged = groups.remove(b);
        groups[a].extend(merged);
        groups[a].sort_unstable();
    }

    let mut events = Vec::with_capacity(groups.len());
    for group in groups {
        let members: Vec<ClusterPath> = group.iter().map(|&i| paths[i].clone()).collect();
        let begin = members.iter().map(ClusterPath::begin).min().expect("non-empty");
        let end = members.iter().map(ClusterPath::end).max().expect("non-empty");
        let mut clusters_by_window: Vec<Vec<usize>> = vec![Vec::new(); end - begin + 1];
        for path in &members {
            for &(w, c) in &path.members {
                clusters_by_window[w - begin].push(c);
            }
        }
        for ids in &mut clusters_by_window {
            ids.sort_unstable();
            ids.dedup();
        }
        let intensity = event_intensity(&clusters_by_window, begin, clusters, topics);
        let score = priming_score(&intensity, &pvi[begin..=end])?;
        events.push(PrimingEvent {
            begin,
            end,
            paths: members,
            clusters_by_window,
            intensity,
            score,
        });
    }
    events.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.begin.cmp(&b.begin))
            .then_with(|| a.end.cmp(&b.end))
            .then_with(|| a.clusters_by_window.cmp(&b.clusters_by_window))
    });
    Ok(events)
}

/// Mean burst rate of all bursty topics at each window — the seed
/// ordering used in baseline mode.
fn window_intensity(topics: &[Topic], window_count: usize) -> Vec<f64> {
    let mut bursty: Vec<Vec<usize>> = vec![Vec::new(); window_count];
    for (t, topic) in topics.iter().enumerate() {
        for &w in &topic.bursty_windows {
            bursty[w].push(t);
        }
    }
    (0..window_count)
        .map(|w| mean_burst(&bursty[w], topics, w))
        .collect()
}

/// Runs the full second phase: clusters every window, probes paths from
/// every window in seed order (volatility-weight descending normally,
/// window burst intensity descending in baseline mode; ties to the
/// earlier window), and groups the paths into ranked events.
pub fn discover_priming_events(
    corpus: &WindowedCorpus,
    topics: &[Topic],
    pvi: &ProbVolatility,
    config: &EventConfig,
) -> Result<Vec<PrimingEvent>> {
    if !(0.0..1.0).contains(&config.sigma) {
        return Err(Error::invalid(format!(
            "cluster-link threshold {} outside [0, 1)",
            config.sigma
        )));
    }
    let window_count = corpus.window_count();
    if pvi.pvi.len() != window_count {
        return Err(Error::LengthMismatch {
            left: pvi.pvi.len(),
            right: window_count,
        });
    }
    let clusters = cluster_windows(topics, corpus, &config.cluster)?;
    if clusters.iter().all(Vec::is_empty) {
        return Ok(Vec::new());
    }
    let seed_weight = if config.baseline {
        window_intensity(topics, window_count)
    } else {
        pvi.pvi.clone()
    };
    let mut order: Vec<usize> = (0..window_count).collect();
    order.sort_by(|&a, &b| seed_weight[b].total_cmp(&seed_weight[a]).then(a.cmp(&b)));

    let mut sign: Vec<Vec<bool>> = clusters.iter().map(|c| vec![true; c.len()]).collect();
    let mut paths: Vec<ClusterPath> = Vec::new();
    for &w in &order {
        paths.extend(probe_event_path(
            &clusters,
            topics,
            &pvi.pvi,
            w,
            &mut sign,
            config.sigma,
            config.baseline,
        ));
    }
    if config.baseline {
        // Baseline probing maximized intensity mass; report the same
        // score as the main pipeline so the two are comparable.
        for path in &mut paths {
            path.score =
                priming_score(&path.intensity, &pvi.pvi[path.begin()..=path.end()])?;
        }
    }
    group_paths(paths, config.tau, &clusters, topics, &pvi.pvi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{corpus_from_docs, scored_topic};
    use approx::assert_relative_eq;

    fn cluster(window: usize, topic_ids: &[usize]) -> TopicCluster {
        TopicCluster {
            window,
            topic_ids: topic_ids.to_vec(),
            centroid: Vec::new(),
        }
    }

    fn flat_pvi(values: &[f64]) -> ProbVolatility {
        ProbVolatility {
            pvi: values.to_vec(),
            logistic_mu: 0.0,
            logistic_s: 1.0,
            bins: 10,
        }
    }

    #[test]
    fn cluster_similarity_weights_by_topic_probability() {
        let topics = vec![
            scored_topic(&["a"], 2.0, &[]),
            scored_topic(&["b"], 1.0, &[]),
            scored_topic(&["c"], 1.0, &[]),
        ];
        let shared = cluster(0, &[0, 1]);
        let other = cluster(1, &[0, 2]);
        // Shared topic weighs 2, the two private topics 1 each.
        assert_relative_eq!(cluster_similarity(&shared, &other, &topics), 0.5);
        assert_relative_eq!(
            cluster_similarity(&shared, &cluster(1, &[0, 1]), &topics),
            1.0
        );
        assert_relative_eq!(
            cluster_similarity(&cluster(0, &[1]), &cluster(1, &[2]), &topics),
            0.0
        );
    }

    #[test]
    fn zero_weight_union_has_zero_similarity() {
        let topics = vec![scored_topic(&["a"], 0.0, &[])];
        let a = cluster(0, &[0]);
        let b = cluster(1, &[0]);
        assert_relative_eq!(cluster_similarity(&a, &b, &topics), 0.0);
    }

    #[test]
    fn intensity_is_topic_mean_with_zero_gaps() {
        let topics = vec![
            scored_topic(&["a"], 1.0, &[0.8, 0.6, 0.0]),
            scored_topic(&["b"], 1.0, &[0.2, 1.0, 0.0]),
        ];
        let clusters: WindowClusters = vec![
            vec![cluster(0, &[0])],
            vec![cluster(1, &[0]), cluster(1, &[1])],
            vec![],
        ];
        let by_window = vec![vec![0usize], vec![0, 1], vec![]];
        let intensity = event_intensity(&by_window, 0, &clusters, &topics);
        assert_relative_eq!(intensity[0], 0.8);
        assert_relative_eq!(intensity[1], 0.8); // mean of 0.6 and 1.0
        assert_relative_eq!(intensity[2], 0.0); // gap window
    }

    #[test]
    fn score_is_norm_product_times_correlation() {
        let series = [0.6, 0.8, 1.0];
        assert_relative_eq!(
            priming_score(&series, &series).unwrap(),
            2.0,
            max_relative = 1e-12
        );
        let reversed = [1.0, 0.8, 0.6];
        assert_relative_eq!(
            priming_score(&series, &reversed).unwrap(),
            -2.0,
            max_relative = 1e-12
        );
        // Constant volatility has no direction: score 0.
        assert_relative_eq!(priming_score(&series, &[0.5, 0.5, 0.5]).unwrap(), 0.0);
        // Short spans are neutral: plain magnitude product.
        assert_relative_eq!(
            priming_score(&[0.3, 0.4], &[0.5, 0.5]).unwrap(),
            0.5 * 0.5_f64.sqrt(),
            max_relative = 1e-12
        );
        assert!(priming_score(&[0.1], &[0.1, 0.2]).is_err());
        assert!(priming_score(&[], &[]).is_err());
    }

    #[test]
    fn probing_follows_rising_volatility() {
        // One topic bursting in all three windows with rising intensity,
        // volatility rising alongside: the path probes back from the
        // volatility peak across the whole span.
        let topics = vec![scored_topic(&["a"], 1.0, &[0.92, 0.95, 0.98])];
        let clusters: WindowClusters = vec![
            vec![cluster(0, &[0])],
            vec![cluster(1, &[0])],
            vec![cluster(2, &[0])],
        ];
        let pvi = [0.5, 0.8, 0.9];
        let mut sign: Vec<Vec<bool>> = clusters.iter().map(|c| vec![true; c.len()]).collect();
        let paths = probe_event_path(&clusters, &topics, &pvi, 2, &mut sign, 0.2, false);
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].members, vec![(0, 0), (1, 0), (2, 0)]);
        assert_relative_eq!(
            paths[0].score,
            priming_score(&paths[0].intensity, &pvi).unwrap()
        );
        // Every cluster is used: probing other windows seeds nothing.
        let more = probe_event_path(&clusters, &topics, &pvi, 1, &mut sign, 0.2, false);
        assert!(more.is_empty());
    }

    #[test]
    fn dissimilar_clusters_do_not_link() {
        let topics = vec![
            scored_topic(&["a"], 1.0, &[0.9, 0.0]),
            scored_topic(&["b"], 1.0, &[0.0, 0.9]),
        ];
        let clusters: WindowClusters =
            vec![vec![cluster(0, &[0])], vec![cluster(1, &[1])]];
        let pvi = [0.9, 0.8];
        let mut sign: Vec<Vec<bool>> = clusters.iter().map(|c| vec![true; c.len()]).collect();
        let first = probe_event_path(&clusters, &topics, &pvi, 0, &mut sign, 0.2, false);
        assert_eq!(first.len(), 1);
        assert_eq!(first[0].members, vec![(0, 0)]);
        let second = probe_event_path(&clusters, &topics, &pvi, 1, &mut sign, 0.2, false);
        assert_eq!(second.len(), 1);
        assert_eq!(second[0].members, vec![(1, 0)]);
    }

    #[test]
    fn extension_that_collapses_correlation_is_rejected() {
        // Bursts stay high while volatility falls off after window 1; the
        // backward step to window 0 would wreck the correlation, so the
        // path keeps its [1, 2] span and window 0 stays unused.
        let topics = vec![scored_topic(&["a"], 1.0, &[0.7, 0.9, 0.8])];
        let clusters: WindowClusters = vec![
            vec![cluster(0, &[0])],
            vec![cluster(1, &[0])],
            vec![cluster(2, &[0])],
        ];
        let pvi = [0.9, 0.95, 0.1];
        let mut sign: Vec<Vec<bool>> = clusters.iter().map(|c| vec![true; c.len()]).collect();
        let paths = probe_event_path(&clusters, &topics, &pvi, 1, &mut sign, 0.2, false);
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].members, vec![(1, 0), (2, 0)]);
        assert!(sign[0][0], "window 0 cluster must stay available");
    }

    #[test]
    fn path_similarity_normalizes_by_shorter_path() {
        let a = ClusterPath {
            members: vec![(0, 0), (1, 0)],
            intensity: vec![0.5, 0.5],
            score: 1.0,
        };
        let b = ClusterPath {
            members: vec![(0, 0), (1, 0), (2, 0)],
            intensity: vec![0.5, 0.5, 0.5],
            score: 1.0,
        };
        let c = ClusterPath {
            members: vec![(5, 1)],
            intensity: vec![0.5],
            score: 1.0,
        };
        assert_relative_eq!(path_similarity(&a, &a), 1.0);
        assert_relative_eq!(path_similarity(&a, &b), 1.0); // containment
        assert_relative_eq!(path_similarity(&a, &c), 0.0);
    }

    #[test]
    fn grouping_merges_overlapping_paths_and_stops_below_tau() {
        let topics = vec![scored_topic(&["a"], 1.0, &[0.9, 0.9, 0.9, 0.0, 0.0, 0.9])];
        let clusters: WindowClusters = vec![
            vec![cluster(0, &[0])],
            vec![cluster(1, &[0]), cluster(1, &[0])],
            vec![cluster(2, &[0])],
            vec![],
            vec![],
            vec![cluster(5, &[0])],
        ];
        let pvi = [0.5; 6];
        let path = |members: Vec<ClusterRef>| {
            let intensity = vec![0.9; members.len()];
            ClusterPath {
                members,
                intensity,
                score: 1.0,
            }
        };
        // a and b share (1,0): overlap 1/2 meets tau = 0.5; c is disjoint.
        let paths = vec![
            path(vec![(0, 0), (1, 0)]),
            path(vec![(1, 0), (2, 0)]),
            path(vec![(5, 0)]),
        ];
        let events = group_paths(paths, 0.5, &clusters, &topics, &pvi).unwrap();
        assert_eq!(events.len(), 2);
        let merged = events.iter().find(|e| e.paths.len() == 2).unwrap();
        assert_eq!((merged.begin, merged.end), (0, 2));
        assert_eq!(merged.clusters_by_window, vec![vec![0], vec![0], vec![0]]);
        let single = events.iter().find(|e| e.paths.len() == 1).unwrap();
        assert_eq!((single.begin, single.end), (5, 5));
    }

    #[test]
    fn grouping_uses_average_linkage() {
        let topics = vec![scored_topic(&["a"], 1.0, &[0.9; 8])];
        let clusters: WindowClusters = (0..8usize)
            .map(|w| vec![cluster(w, &[0]), cluster(w, &[0])])
            .collect();
        let pvi = [0.5; 8];
        let path = |members: Vec<ClusterRef>| {
            let intensity = vec![0.9; members.len()];
            ClusterPath {
                members,
                intensity,
                score: 1.0,
            }
        };
        // sim(a,b) = 1, sim(a,c) = 0.5, sim(b,c) = 0. After merging a and
        // b, the average linkage to c is 0.25 < tau, so c stays apart —
        // single linkage would have pulled it in via sim(a,c).
        let a = path(vec![(0, 0), (1, 0)]);
        let b = path(vec![(0, 0)]);
        let c = path(vec![(1, 0), (3, 1)]);
        let events = group_paths(vec![a, b, c], 0.5, &clusters, &topics, &pvi).unwrap();
        assert_eq!(events.len(), 2);
        assert!(events.iter().any(|e| e.paths.len() == 2));
        assert!(events.iter().any(|e| e.paths.len() == 1));
    }

    #[test]
    fn discovery_builds_one_event_over_colocated_spike() {
        let corpus = corpus_from_docs(
            3,
            &[
                ("d0", "2021-01-04", &["alpha"]),
                ("d1", "2021-01-11", &["alpha"]),
                ("d2", "2021-01-18", &["alpha"]),
            ],
        );
        let topics = vec![scored_topic(&["alpha"], 1.0, &[0.92, 0.95, 0.98])];
        let pvi = flat_pvi(&[0.5, 0.8, 0.9]);
        let config = EventConfig::default();
        let events = discover_priming_events(&corpus, &topics, &pvi, &config).unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!((events[0].begin, events[0].end), (0, 2));
        assert_relative_eq!(
            events[0].score,
            priming_score(&events[0].intensity, &pvi.pvi).unwrap()
        );
        // Consecutive members, and a second run is identical.
        for path in &events[0].paths {
            for pair in path.members.windows(2) {
                assert_eq!(pair[1].0, pair[0].0 + 1);
            }
        }
        let again = discover_priming_events(&corpus, &topics, &pvi, &config).unwrap();
        assert_eq!(events, again);
    }

    #[test]
    fn baseline_probes_by_intensity_and_can_score_negative() {
        let corpus = corpus_from_docs(
            3,
            &[
                ("d0", "2021-01-04", &["alpha"]),
                ("d1", "2021-01-11", &["alpha"]),
                ("d2", "2021-01-18", &["alpha"]),
            ],
        );
        let topics = vec![scored_topic(&["alpha"], 1.0, &[0.92, 0.95, 0.98])];
        // Volatility falls while the burst rises: anti-correlated.
        let pvi = flat_pvi(&[0.9, 0.8, 0.5]);

        let main = discover_priming_events(
            &corpus,
            &topics,
            &pvi,
            &EventConfig::default(),
        )
        .unwrap();
        assert!(main.iter().all(|e| e.score >= 0.0));

        let baseline = discover_priming_events(
            &corpus,
            &topics,
            &pvi,
            &EventConfig {
                baseline: true,
                ..EventConfig::default()
            },
        )
        .unwrap();
        // Index-blind probing happily spans the whole burst and the
        // recomputed score exposes the anti-correlation.
        assert_eq!(baseline.len(), 1);
        assert_eq!((baseline[0].begin, baseline[0].end), (0, 2));
        assert!(baseline[0].score < 0.0, "score {}", baseline[0].score);
    }

    #[test]
    fn no_bursty_topics_means_no_events() {
        let corpus = corpus_from_docs(2, &[("d0", "2021-01-04", &["alpha"])]);
        let topics = vec![scored_topic(&["alpha"], 1.0, &[0.0, 0.0])];
        let pvi = flat_pvi(&[0.5, 0.5]);
        let events =
            discover_priming_events(&corpus, &topics, &pvi, &EventConfig::default()).unwrap();
        assert!(events.is_empty());
    }
}
