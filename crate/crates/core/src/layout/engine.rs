use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::forces::{attraction_target, repulsion_term};
use super::{Embedding, LayoutConfig, Provenance};
use crate::error::{Error, Result};
use crate::geom::{
    mix64, move_along, random_unit, renormalize, seeded_tangent, spherical_distance, UnitVec3, Vec3,
};
use crate::graph::{order_random_walk, order_temporal, Graph, NodeOrder};
use crate::icosa::TriangleTree;

/// Spawn offset for nodes entering a multilevel run next to a neighbor.
const SPAWN_JITTER: f64 = 0.05;

/// Smallest initial prefix: max(2, 0.5% of the nodes).
const INITIAL_FRACTION: f64 = 0.005;

/// Which nodes take part in the simulation: a prefix of a node order.
#[derive(Clone, Debug)]
pub struct ActiveSet {
    order: Vec<u32>,
    rank: Vec<u32>,
    count: usize,
}

impl ActiveSet {
    pub fn all(n: usize) -> ActiveSet {
        ActiveSet::prefix(NodeOrder::identity(n), n)
    }

    pub fn prefix(order: NodeOrder, count: usize) -> ActiveSet {
        let rank = order.ranks();
        let order = order.as_slice().to_vec();
        let count = count.min(order.len());
        ActiveSet { order, rank, count }
    }

    #[inline]
    pub fn is_active(&self, i: usize) -> bool {
        (self.rank[i] as usize) < self.count
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn ids(&self) -> &[u32] {
        &self.order[..self.count]
    }

    pub fn set_count(&mut self, count: usize) {
        self.count = count.min(self.order.len());
    }

    fn rank(&self, i: usize) -> usize {
        self.rank[i] as usize
    }
}

/// Linear growth of the active prefix from `initial` nodes at step 0 to
/// all nodes once `growth_end · steps` steps have passed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthSchedule {
    pub initial: usize,
    pub total: usize,
    pub full_at_step: f64,
}

impl GrowthSchedule {
    pub fn new(total: usize, steps: usize, growth_end: f64) -> GrowthSchedule {
        let initial = ((total as f64 * INITIAL_FRACTION).ceil() as usize)
            .max(2)
            .min(total);
        GrowthSchedule {
            initial,
            total,
            full_at_step: growth_end * steps as f64,
        }
    }

    pub fn count_at(&self, step: usize) -> usize {
        if self.full_at_step <= 0.0 {
            return self.total;
        }
        let frac = (step as f64 / self.full_at_step).min(1.0);
        self.initial + ((self.total - self.initial) as f64 * frac).floor() as usize
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepStats {
    pub jitter_events: u64,
}

#[inline]
fn node_key(seed: u64, step: usize, node: usize) -> u64 {
    mix64(mix64(seed ^ ((step as u64) << 32)) ^ node as u64)
}

/// One synchronous simulation step.
///
/// Reads only from `positions` and `tree` (built from `positions` over the
/// active ids) and writes every node's new position to `out`. Active nodes
/// move to the normalized mean of their normalized attraction and
/// repulsion targets; nodes without attraction use repulsion alone;
/// inactive nodes are copied unchanged.
#[allow(clippy::too_many_arguments)]
pub fn step(
    positions: &[UnitVec3],
    out: &mut [UnitVec3],
    graph: &Graph,
    tree: &TriangleTree,
    active: &ActiveSet,
    theta_max: f64,
    config: &LayoutConfig,
    step_index: usize,
) -> StepStats {
    assert_eq!(positions.len(), out.len());
    if theta_max <= 0.0 {
        out.copy_from_slice(positions);
        return StepStats::default();
    }
    let jitter_events = out
        .par_iter_mut()
        .enumerate()
        .map(|(i, slot)| {
            let x_i = positions[i];
            if !active.is_active(i) {
                *slot = x_i;
                return 0u64;
            }
            let key = node_key(config.seed, step_index, i);
            let attraction = if config.attraction {
                let neighbors = graph
                    .neighbors(i)
                    .iter()
                    .filter(|&&j| active.is_active(j as usize))
                    .map(|&j| positions[j as usize]);
                attraction_target(x_i, neighbors, theta_max, key)
            } else {
                None
            };

            let mut jitters = 0u64;
            let mut repulsion = Vec3::ZERO;
            let mut any_repulsor = false;
            if config.repulsion {
                tree.for_each_repulsor(x_i, Some(i), config.opening, |x_j, weight| {
                    let theta = spherical_distance(x_i, x_j);
                    let term = repulsion_term(
                        x_i,
                        x_j,
                        theta,
                        weight as f64,
                        theta_max,
                        config.branch_rule,
                        key,
                    );
                    jitters += u64::from(term.jittered);
                    repulsion += term.contribution;
                    any_repulsor = true;
                });
            }

            let a_hat = attraction.and_then(Vec3::normalize);
            let r_hat = if any_repulsor {
                repulsion.normalize()
            } else {
                None
            };
            *slot = match (a_hat, r_hat) {
                (Some(a), Some(r)) => renormalize((a.vec() + r.vec()) * 0.5, x_i),
                (Some(a), None) => a,
                (None, Some(r)) => r,
                (None, None) => x_i,
            };
            jitters
        })
        .sum();
    StepStats { jitter_events }
}

/// Runs the full layout; see [`run_layout_observed`].
pub fn run_layout(graph: &Graph, config: &LayoutConfig) -> Result<Embedding> {
    run_layout_observed(graph, config, |_, _, _| {})
}

/// Random initialization followed by `config.steps` synchronous steps with
/// linear cooling. With `multilevel`, the simulation starts on a small
/// prefix of the node order (temporal when the graph has timestamps,
/// random walk otherwise) and grows to the whole graph; entering nodes are
/// placed next to a random active neighbor. `observer` sees the positions
/// after every step.
pub fn run_layout_observed<F>(
    graph: &Graph,
    config: &LayoutConfig,
    mut observer: F,
) -> Result<Embedding>
where
    F: FnMut(usize, &[UnitVec3], &ActiveSet),
{
    config.validate()?;
    let n = graph.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::arg(format!("thread pool: {e}")))?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut positions: Vec<UnitVec3> = (0..n).map(|_| random_unit(&mut rng)).collect();
    let mut next = positions.clone();

    let (mut active, schedule) = if config.multilevel {
        let order_seed = mix64(config.seed ^ 0x6f72_6465_72);
        let order = if graph.node_times().is_some() {
            order_temporal(graph, order_seed)?
        } else {
            order_random_walk(graph, config.jump_prob, order_seed)?
        };
        let schedule = GrowthSchedule::new(n, config.steps, config.growth_end);
        (ActiveSet::prefix(order, schedule.initial), Some(schedule))
    } else {
        (ActiveSet::all(n), None)
    };

    let mut tree = TriangleTree::new(config.max_level);
    let mut jitter_events = 0;
    for s in 0..config.steps {
        if let Some(schedule) = &schedule {
            let target = schedule.count_at(s);
            if target > active.count() {
                let from = active.count();
                active.set_count(target);
                spawn_entering(graph, &active, from, &mut positions, &mut rng);
            }
        }
        let t = s as f64 / config.steps as f64;
        let theta_max = config.theta_max(t);
        let stats = pool.install(|| {
            tree.rebuild(&positions, Some(active.ids()));
            step(
                &positions, &mut next, graph, &tree, &active, theta_max, config, s,
            )
        });
        jitter_events += stats.jitter_events;
        std::mem::swap(&mut positions, &mut next);
        observer(s, &positions, &active);
    }

    Ok(Embedding {
        positions,
        config: config.clone(),
        provenance: Provenance {
            graph_hash: graph.content_hash(),
            seed: config.seed,
            wall_time_secs: started.elapsed().as_secs_f64(),
            jitter_events,
        },
    })
}

/// Places nodes at order positions `from..active.count()` next to a random
/// neighbor that precedes them in the order, or uniformly if none does.
fn spawn_entering(
    graph: &Graph,
    active: &ActiveSet,
    from: usize,
    positions: &mut [UnitVec3],
    rng: &mut ChaCha8Rng,
) {
    for &v in &active.ids()[from..] {
        let v = v as usize;
        let rank = active.rank(v);
        let earlier: Vec<usize> = graph
            .neighbors(v)
            .iter()
            .map(|&j| j as usize)
            .filter(|&j| active.rank(j) < rank)
            .collect();
        positions[v] = if earlier.is_empty() {
            random_unit(rng)
        } else {
            let anchor = positions[earlier[rng.gen_range(0..earlier.len())]];
            move_along(anchor, seeded_tangent(anchor, rng.gen()), SPAWN_JITTER)
        };
    }
}
