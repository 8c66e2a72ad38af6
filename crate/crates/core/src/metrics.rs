//! Layout quality: normalized average edge length and the stratified
//! correlation between hop distance and spherical distance.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{mix64, spherical_distance, UnitVec3};
use crate::graph::{bfs_distances_into, Graph, UNREACHED};

/// Graphs up to this size are measured over all node pairs.
pub const FULL_ENUMERATION_NODES: usize = 2_000;

/// Pairs drawn per hop-distance stratum.
pub const STRATUM_SIZE: usize = 10_000;

/// BFS sources used to sample pairs on larger graphs.
pub const SAMPLE_SOURCES: usize = 32;

/// Largest hop distance included in the correlation sample.
pub const MAX_STRATUM_DISTANCE: u32 = 6;

/// Random pairs for the edge-length denominator on larger graphs.
pub const RANDOM_PAIRS: usize = 1_000_000;

/// An unordered node pair at hop distance `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DistancePair {
    pub a: u32,
    pub b: u32,
    pub d: u32,
}

/// Everything needed to redraw a stratified sample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub seed: u64,
    pub per_stratum: usize,
    /// BFS sources; equal to the node count when every node is a source.
    pub sources: usize,
    pub max_distance: u32,
    /// Realized pair counts for d = 1..=max_distance.
    pub strata: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StratifiedSample {
    pub pairs: Vec<DistancePair>,
    pub spec: SampleSpec,
}

/// Equal-count sample of node pairs per hop distance 1..=6 with the default
/// sizes. Every node is a BFS source on graphs up to
/// [`FULL_ENUMERATION_NODES`]; otherwise 32 seeded sources are used.
/// Strata with fewer pairs than requested contribute all of them.
pub fn stratified_pairs(graph: &Graph, seed: u64) -> StratifiedSample {
    stratified_pairs_with(graph, seed, STRATUM_SIZE, SAMPLE_SOURCES, MAX_STRATUM_DISTANCE)
}

pub fn stratified_pairs_with(
    graph: &Graph,
    seed: u64,
    per_stratum: usize,
    sources: usize,
    max_distance: u32,
) -> StratifiedSample {
    let n = graph.node_count();
    let strata = max_distance as usize;
    let exhaustive = n <= FULL_ENUMERATION_NODES;
    let source_ids: Vec<usize> = if exhaustive {
        (0..n).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rand::seq::index::sample(&mut rng, n, sources.min(n)).into_vec()
    };

    // Per source and stratum: pairs seen and a uniform reservoir of them.
    let per_source: Vec<(Vec<usize>, Vec<Vec<(u32, u32)>>)> = source_ids
        .par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(dist, queue), &s| {
                let mut rng = ChaCha8Rng::seed_from_u64(mix64(seed ^ mix64(s as u64)));
                let mut seen = vec![0usize; strata];
                let mut res: Vec<Vec<(u32, u32)>> = vec![Vec::new(); strata];
                bfs_distances_into(graph, s, dist, queue).expect("source in range");
                for (j, &d) in dist.iter().enumerate() {
                    if d == 0 || d == UNREACHED || d > max_distance || (exhaustive && j < s) {
                        continue;
                    }
                    let k = d as usize - 1;
                    let pair = (s.min(j) as u32, s.max(j) as u32);
                    seen[k] += 1;
                    if res[k].len() < per_stratum {
                        res[k].push(pair);
                    } else {
                        let r = rng.gen_range(0..seen[k]);
                        if r < per_stratum {
                            res[k][r] = pair;
                        }
                    }
                }
                for r in &mut res {
                    r.shuffle(&mut rng);
                }
                (seen, res)
            },
        )
        .collect();

    let mut pairs = Vec::new();
    let mut counts = Vec::with_capacity(strata);
    for k in 0..strata {
        let seen: Vec<usize> = per_source.iter().map(|(c, _)| c[k]).collect();
        let quotas = proportional_quotas(&seen, per_stratum);
        let mut stratum: Vec<DistancePair> = per_source
            .iter()
            .zip(&quotas)
            .flat_map(|((_, res), &q)| res[k][..q].iter())
            .map(|&(a, b)| DistancePair {
                a,
                b,
                d: k as u32 + 1,
            })
            .collect();
        // A pair can be drawn from both of its endpoints.
        stratum.sort_unstable();
        stratum.dedup();
        counts.push(stratum.len());
        pairs.extend(stratum);
    }

    StratifiedSample {
        pairs,
        spec: SampleSpec {
            seed,
            per_stratum,
            sources: source_ids.len(),
            max_distance,
            strata: counts,
        },
    }
}

/// Splits `total` across sources in proportion to their available counts
/// (largest remainder), never exceeding what a source has.
fn proportional_quotas(available: &[usize], total: usize) -> Vec<usize> {
    let sum: usize = available.iter().sum();
    if sum <= total {
        return available.to_vec();
    }
    let mut quotas: Vec<usize> = available.iter().map(|&c| c * total / sum).collect();
    let mut rest = total - quotas.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..available.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse((available[i] * total) % sum));
    for i in order {
        if rest == 0 {
            break;
        }
        if quotas[i] < available[i] {
            quotas[i] += 1;
            rest -= 1;
        }
    }
    quotas
}

fn check_positions(graph: &Graph, positions: &[UnitVec3]) -> Result<()> {
    if positions.len() != graph.node_count() {
        return Err(Error::arg(format!(
            "embedding has {} positions but graph has {} nodes",
            positions.len(),
            graph.node_count()
        )));
    }
    Ok(())
}

/// Mean spherical edge length divided by the mean spherical distance of
/// unordered node pairs (all pairs on small graphs, 10⁶ seeded random pairs
/// otherwise). Lower is better.
pub fn norm_avg_edge_length(graph: &Graph, positions: &[UnitVec3], seed: u64) -> Result<f64> {
    check_positions(graph, positions)?;
    let n = graph.node_count();
    if graph.edge_count() == 0 || n < 3 {
        return Err(Error::arg(
            "edge length ratio needs at least one edge and three nodes",
        ));
    }
    let edge_sum: f64 = graph
        .edges()
        .map(|(a, b)| spherical_distance(positions[a], positions[b]))
        .sum();
    let edge_mean = edge_sum / graph.edge_count() as f64;

    let pair_mean = if n <= FULL_ENUMERATION_NODES {
        let per_row: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| {
                ((i + 1)..n)
                    .map(|j| spherical_distance(positions[i], positions[j]))
                    .sum()
            })
            .collect();
        per_row.iter().sum::<f64>() / (n * (n - 1) / 2) as f64
    } else {
        const CHUNK: usize = 10_000;
        let chunks = RANDOM_PAIRS.div_ceil(CHUNK);
        let per_chunk: Vec<f64> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(mix64(seed ^ mix64(c as u64 + 1)));
                let len = CHUNK.min(RANDOM_PAIRS - c * CHUNK);
                (0..len)
                    .map(|_| {
                        let a = rng.gen_range(0..n);
                        let mut b = rng.gen_range(0..n - 1);
                        if b >= a {
                            b += 1;
                        }
                        spherical_distance(positions[a], positions[b])
                    })
                    .sum()
            })
            .collect();
        per_chunk.iter().sum::<f64>() / RANDOM_PAIRS as f64
    };
    if pair_mean <= 0.0 {
        return Err(Error::UndefinedCorrelation("spherical pair distance"));
    }
    Ok(edge_mean / pair_mean)
}

/// Pearson correlation of `xs` and `ys`.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if !(sxx > 0.0) {
        return Err(Error::UndefinedCorrelation("network distance"));
    }
    if !(syy > 0.0) {
        return Err(Error::UndefinedCorrelation("spherical distance"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Pearson correlation between hop distance and spherical distance over a
/// given pair sample.
pub fn correlation_over(positions: &[UnitVec3], pairs: &[DistancePair]) -> Result<f64> {
    let d: Vec<f64> = pairs.iter().map(|p| p.d as f64).collect();
    let theta: Vec<f64> = pairs
        .iter()
        .map(|p| spherical_distance(positions[p.a as usize], positions[p.b as usize]))
        .collect();
    pearson(&d, &theta)
}

/// Stratified distance correlation ρ(d, θ). Higher is better.
pub fn distance_correlation(graph: &Graph, positions: &[UnitVec3], seed: u64) -> Result<f64> {
    check_positions(graph, positions)?;
    correlation_over(positions, &stratified_pairs(graph, seed).pairs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub norm_avg_edge_len: f64,
    pub rho: f64,
    pub sample: SampleSpec,
}

pub fn quality_report(graph: &Graph, positions: &[UnitVec3], seed: u64) -> Result<QualityReport> {
    check_positions(graph, positions)?;
    let sample = stratified_pairs(graph, seed);
    Ok(QualityReport {
        norm_avg_edge_len: norm_avg_edge_length(graph, positions, seed)?,
        rho: correlation_over(positions, &sample.pairs)?,
        sample: sample.spec,
    })
}
