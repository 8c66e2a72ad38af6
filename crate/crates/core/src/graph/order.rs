use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Graph;
use crate::error::{Error, Result};

/// Default restart probability for [`order_random_walk`].
pub const DEFAULT_JUMP_PROB: f64 = 0.15;

/// Consecutive walk steps without a new discovery before a jump is forced.
const STALL_LIMIT: usize = 64;

/// A permutation of node indices; the first `m` entries are the nodes
/// present at coarsening level `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeOrder(Vec<u32>);

impl NodeOrder {
    pub fn identity(n: usize) -> NodeOrder {
        NodeOrder((0..n as u32).collect())
    }

    pub fn from_vec(order: Vec<u32>) -> Result<NodeOrder> {
        let o = NodeOrder(order);
        if !o.is_permutation() {
            return Err(Error::arg("node order is not a permutation"));
        }
        Ok(o)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `rank[i]` is the position of node `i` in the order.
    pub fn ranks(&self) -> Vec<u32> {
        let mut rank = vec![0u32; self.0.len()];
        for (r, &i) in self.0.iter().enumerate() {
            rank[i as usize] = r as u32;
        }
        rank
    }

    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.0.len()];
        self.0.iter().all(|&i| {
            let i = i as usize;
            i < seen.len() && !std::mem::replace(&mut seen[i], true)
        })
    }
}

/// Orders nodes by first visit of a random walk with restarts.
///
/// With probability `jump_prob` (and always at a dead end) the walk jumps.
/// On a connected graph the jump lands on an already visited node that
/// still has unvisited neighbors, so the visited set stays connected; on a
/// graph with several components it lands on a uniform unvisited node.
pub fn order_random_walk(g: &Graph, jump_prob: f64, seed: u64) -> Result<NodeOrder> {
    if !(0.0..=1.0).contains(&jump_prob) {
        return Err(Error::arg(format!(
            "jump probability {jump_prob} outside [0, 1]"
        )));
    }
    let n = g.node_count();
    if n == 0 {
        return Ok(NodeOrder(Vec::new()));
    }
    let connected = component_count(g) == 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    // unvisited nodes, for uniform jumps in the disconnected case
    let mut pool: Vec<u32> = (0..n as u32).collect();
    let mut pool_pos: Vec<usize> = (0..n).collect();
    // visited nodes that may still have unvisited neighbors
    let mut frontier: Vec<u32> = Vec::new();

    let visit = |v: usize,
                 visited: &mut Vec<bool>,
                 order: &mut Vec<u32>,
                 pool: &mut Vec<u32>,
                 pool_pos: &mut Vec<usize>,
                 frontier: &mut Vec<u32>| {
        visited[v] = true;
        order.push(v as u32);
        let p = pool_pos[v];
        let last = *pool.last().unwrap();
        pool.swap_remove(p);
        if (last as usize) != v {
            pool_pos[last as usize] = p;
        }
        frontier.push(v as u32);
    };

    let start = rng.gen_range(0..n);
    visit(
        start,
        &mut visited,
        &mut order,
        &mut pool,
        &mut pool_pos,
        &mut frontier,
    );
    let mut current = start;
    let mut stalled = 0;

    while order.len() < n {
        let dead_end = g.degree(current) == 0;
        let jump = dead_end || stalled >= STALL_LIMIT || rng.gen::<f64>() < jump_prob;
        let next = if jump {
            stalled = 0;
            if connected {
                loop {
                    let k = rng.gen_range(0..frontier.len());
                    let f = frontier[k] as usize;
                    if g.neighbors(f).iter().any(|&w| !visited[w as usize]) {
                        break f;
                    }
                    frontier.swap_remove(k);
                }
            } else {
                pool[rng.gen_range(0..pool.len())] as usize
            }
        } else {
            let nb = g.neighbors(current);
            nb[rng.gen_range(0..nb.len())] as usize
        };
        if visited[next] {
            stalled += 1;
        } else {
            stalled = 0;
            visit(
                next,
                &mut visited,
                &mut order,
                &mut pool,
                &mut pool_pos,
                &mut frontier,
            );
        }
        current = next;
    }
    Ok(NodeOrder(order))
}

/// Orders nodes by creation time, ascending; equal timestamps are
/// shuffled deterministically per seed.
pub fn order_temporal(g: &Graph, seed: u64) -> Result<NodeOrder> {
    let times = g.node_times().ok_or(Error::MissingTimestamps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<u32> = (0..g.node_count() as u32).collect();
    order.sort_by_key(|&i| times[i as usize]);
    let mut start = 0;
    while start < order.len() {
        let t = times[order[start] as usize];
        let end = start
            + order[start..]
                .iter()
                .take_while(|&&i| times[i as usize] == t)
                .count();
        order[start..end].shuffle(&mut rng);
        start = end;
    }
    Ok(NodeOrder(order))
}

fn component_count(g: &Graph) -> usize {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut stack = Vec::new();
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        stack.push(s);
        while let Some(u) = stack.pop() {
            for &v in g.neighbors(u) {
                if !std::mem::replace(&mut seen[v as usize], true) {
                    stack.push(v as usize);
                }
            }
        }
    }
    count
}
