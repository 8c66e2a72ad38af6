//! Undirected, unweighted graphs over dense node indices.

mod bfs;
mod generate;
mod io;
mod order;

pub use bfs::{bfs_distances, bfs_distances_into, DistanceField, UNREACHED};
pub use generate::{generate_grid, generate_watts_strogatz};
pub use io::{load_edge_list, load_edge_list_path, EdgeListFormat};
pub use order::{order_random_walk, order_temporal, NodeOrder, DEFAULT_JUMP_PROB};

use std::borrow::Cow;
use std::collections::HashMap;

use sha2::{Digest, Sha256};

/// Immutable compact adjacency (CSR) with optional labels and node times.
///
/// Adjacency is symmetric, free of self-loops and duplicates, and each
/// neighbor list is sorted ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    labels: Option<Vec<String>>,
    node_times: Option<Vec<i64>>,
}

impl Graph {
    /// Builds the symmetric closure of `edges`, dropping self-loops and
    /// duplicates. Endpoints must be `< node_count`.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Graph
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut pairs: Vec<(u32, u32)> = edges
            .into_iter()
            .filter(|&(a, b)| a != b)
            .map(|(a, b)| {
                assert!(
                    a < node_count && b < node_count,
                    "edge ({a}, {b}) out of range"
                );
                (a.min(b) as u32, a.max(b) as u32)
            })
            .collect();
        pairs.sort_unstable();
        pairs.dedup();

        let mut degree = vec![0usize; node_count];
        for &(a, b) in &pairs {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        let mut acc = 0;
        for d in &degree {
            acc += d;
            offsets.push(acc);
        }
        let mut fill = offsets[..node_count].to_vec();
        let mut targets = vec![0u32; acc];
        for &(a, b) in &pairs {
            targets[fill[a as usize]] = b;
            fill[a as usize] += 1;
            targets[fill[b as usize]] = a;
            fill[b as usize] += 1;
        }
        for i in 0..node_count {
            targets[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        Graph {
            offsets,
            targets,
            labels: None,
            node_times: None,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Graph {
        assert_eq!(labels.len(), self.node_count());
        self.labels = Some(labels);
        self
    }

    pub fn with_node_times(mut self, times: Vec<i64>) -> Graph {
        assert_eq!(times.len(), self.node_count());
        self.node_times = Some(times);
        self
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    #[inline]
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors(a).binary_search(&(b as u32)).is_ok()
    }

    /// Each undirected edge once, as `(low, high)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .map(|&j| j as usize)
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    /// The node's label, or its decimal index when the graph is unlabeled.
    pub fn label(&self, i: usize) -> Cow<'_, str> {
        match &self.labels {
            Some(l) => Cow::Borrowed(l[i].as_str()),
            None => Cow::Owned(i.to_string()),
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn node_times(&self) -> Option<&[i64]> {
        self.node_times.as_deref()
    }

    /// Label → dense index lookup table.
    pub fn label_index(&self) -> HashMap<String, usize> {
        (0..self.node_count())
            .map(|i| (self.label(i).into_owned(), i))
            .collect()
    }

    /// Subgraph induced by the nodes `0..n`, keeping labels and times.
    pub fn prefix(&self, n: usize) -> Graph {
        let n = n.min(self.node_count());
        let mut g = Graph::from_edges(n, self.edges().filter(|&(_, j)| j < n));
        if let Some(l) = &self.labels {
            g.labels = Some(l[..n].to_vec());
        }
        if let Some(t) = &self.node_times {
            g.node_times = Some(t[..n].to_vec());
        }
        g
    }

    /// SHA-256 over node count, edge list and labels, hex encoded.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.node_count() as u64).to_le_bytes());
        for (a, b) in self.edges() {
            h.update((a as u64).to_le_bytes());
            h.update((b as u64).to_le_bytes());
        }
        if let Some(labels) = &self.labels {
            for l in labels {
                h.update((l.len() as u64).to_le_bytes());
                h.update(l.as_bytes());
            }
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Checks the structural invariants; used by tests and debug asserts.
    pub fn check_invariants(&self) -> Result<(), String> {
        let n = self.node_count();
        for i in 0..n {
            let nb = self.neighbors(i);
            for w in nb.windows(2) {
                if w[0] >= w[1] {
                    return Err(format!("node {i}: neighbor list not strictly sorted"));
                }
            }
            for &j in nb {
                let j = j as usize;
                if j >= n {
                    return Err(format!("node {i}: neighbor {j} out of range"));
                }
                if j == i {
                    return Err(format!("node {i}: self-loop"));
                }
                if !self.has_edge(j, i) {
                    return Err(format!("edge ({i}, {j}) is not symmetric"));
                }
            }
        }
        Ok(())
    }
}
