use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Graph;
use crate::error::{Error, Result};

/// Watts-Strogatz small-world graph: a ring lattice where every node links
/// to its `k/2` nearest neighbors on each side, after which each lattice
/// edge `(u, u+j)` is rewired to a uniformly chosen new endpoint with
/// probability `p`. Rewiring never creates self-loops or duplicates, so the
/// edge count is always `n·k/2`.
pub fn generate_watts_strogatz(n: usize, k: usize, p: f64, seed: u64) -> Result<Graph> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::arg(format!("degree k={k} must be even and >= 2")));
    }
    if n <= k {
        return Err(Error::arg(format!("need n > k, got n={n}, k={k}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::arg(format!(
            "rewiring probability {p} outside [0, 1]"
        )));
    }

    let mut adj: Vec<Vec<u32>> = vec![Vec::with_capacity(k + 2); n];
    let link = |adj: &mut Vec<Vec<u32>>, a: usize, b: usize| {
        adj[a].push(b as u32);
        adj[b].push(a as u32);
    };
    let unlink = |adj: &mut Vec<Vec<u32>>, a: usize, b: usize| {
        for (x, y) in [(a, b), (b, a)] {
            let pos = adj[x].iter().position(|&v| v as usize == y).unwrap();
            adj[x].swap_remove(pos);
        }
    };
    for j in 1..=k / 2 {
        for u in 0..n {
            link(&mut adj, u, (u + j) % n);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            if rng.gen::<f64>() >= p {
                continue;
            }
            if adj[u].len() >= n - 1 {
                continue;
            }
            let w = loop {
                let w = rng.gen_range(0..n);
                if w != u && !adj[u].contains(&(w as u32)) {
                    break w;
                }
            };
            // the lattice edge may already have been rewired away from u
            if adj[u].contains(&(v as u32)) {
                unlink(&mut adj, u, v);
                link(&mut adj, u, w);
            }
        }
    }

    let edges = adj
        .iter()
        .enumerate()
        .flat_map(|(a, nb)| nb.iter().map(move |&b| (a, b as usize)));
    Ok(Graph::from_edges(n, edges))
}

/// `w × h` lattice with 4-neighborhood edges; node `(x, y)` has index `y·w + x`.
pub fn generate_grid(w: usize, h: usize) -> Result<Graph> {
    if w == 0 || h == 0 {
        return Err(Error::arg(format!(
            "grid dimensions must be >= 1, got {w}x{h}"
        )));
    }
    let mut edges = Vec::with_capacity(2 * w * h);
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if x + 1 < w {
                edges.push((i, i + 1));
            }
            if y + 1 < h {
                edges.push((i, i + w));
            }
        }
    }
    Ok(Graph::from_edges(w * h, edges))
}
