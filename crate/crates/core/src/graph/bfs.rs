use super::Graph;
use crate::error::{Error, Result};

/// Marker for nodes not reachable from the source.
pub const UNREACHED: u32 = u32::MAX;

/// Hop distances from a single source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceField {
    pub source: usize,
    pub dist: Vec<u32>,
}

impl DistanceField {
    #[inline]
    pub fn get(&self, i: usize) -> Option<u32> {
        match self.dist[i] {
            UNREACHED => None,
            d => Some(d),
        }
    }

    pub fn reached(&self) -> usize {
        self.dist.iter().filter(|&&d| d != UNREACHED).count()
    }

    pub fn max_distance(&self) -> Option<u32> {
        self.dist.iter().copied().filter(|&d| d != UNREACHED).max()
    }
}

/// Breadth-first search from `source`.
pub fn bfs_distances(g: &Graph, source: usize) -> Result<DistanceField> {
    let mut dist = Vec::new();
    let mut queue = Vec::new();
    bfs_distances_into(g, source, &mut dist, &mut queue)?;
    Ok(DistanceField { source, dist })
}

/// BFS into caller-owned scratch buffers, which are resized as needed.
/// Concurrent calls on the same graph with separate scratch are safe.
pub fn bfs_distances_into(
    g: &Graph,
    source: usize,
    dist: &mut Vec<u32>,
    queue: &mut Vec<u32>,
) -> Result<()> {
    let n = g.node_count();
    if source >= n {
        return Err(Error::arg(format!(
            "source {source} out of range for {n} nodes"
        )));
    }
    dist.clear();
    dist.resize(n, UNREACHED);
    queue.clear();
    queue.reserve(n);
    dist[source] = 0;
    queue.push(source as u32);
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head] as usize;
        head += 1;
        let next = dist[u] + 1;
        for &v in g.neighbors(u) {
            let slot = &mut dist[v as usize];
            if *slot == UNREACHED {
                *slot = next;
                queue.push(v);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_distances() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]);
        assert_eq!(bfs_distances(&g, 0).unwrap().dist, vec![0, 1, 2]);
    }

    #[test]
    fn isolated_source_leaves_others_unreached() {
        let g = Graph::from_edges(4, [(1, 2), (2, 3)]);
        let d = bfs_distances(&g, 0).unwrap();
        assert_eq!(d.dist, vec![0, UNREACHED, UNREACHED, UNREACHED]);
        assert_eq!(d.reached(), 1);
        assert_eq!(d.get(2), None);
    }

    #[test]
    fn out_of_range_source() {
        let g = Graph::from_edges(2, [(0, 1)]);
        assert!(matches!(
            bfs_distances(&g, 2),
            Err(Error::InvalidArgument(_))
        ));
    }
}
