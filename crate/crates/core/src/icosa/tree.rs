use std::f64::consts::PI;

use rayon::prelude::*;

use super::mesh::{build_icosahedron, subdivide, TriangleMesh};
use crate::geom::{spherical_distance, UnitVec3, Vec3};

/// Default subdivision depth: 20·4⁶ = 81,920 leaf cells.
pub const DEFAULT_MAX_LEVEL: usize = 6;

const NO_LEAF: u32 = u32::MAX;

/// Hierarchy of subdivided icosahedra with per-cell mass centers, used to
/// approximate repulsion from far-away groups of nodes.
///
/// The meshes are built once; [`TriangleTree::rebuild`] re-registers node
/// positions without reallocating the structure.
#[derive(Clone, Debug)]
pub struct TriangleTree {
    levels: Vec<TriangleMesh>,
    edge_angles: Vec<f64>,
    /// Root face candidates per longitude sector of width π/5.
    sectors: [[u8; 4]; 10],

    sums: Vec<Vec<Vec3>>,
    counts: Vec<Vec<u32>>,
    centers: Vec<Vec<UnitVec3>>,
    /// Leaf per node id, `NO_LEAF` for nodes not registered.
    leaf_of: Vec<u32>,
    leaf_start: Vec<u32>,
    leaf_members: Vec<u32>,
    leaf_positions: Vec<UnitVec3>,
    registered: usize,
}

/// Result of [`TriangleTree::locate`].
#[derive(Clone, Debug, PartialEq)]
pub struct CellPath {
    /// Containing face index at each level, root first.
    pub cells: Vec<u32>,
    /// Barycentric coordinates of the ray intersection with the root face.
    pub root_barycentric: [f64; 3],
}

impl TriangleTree {
    pub fn new(max_level: usize) -> TriangleTree {
        let levels = subdivide(&build_icosahedron(), max_level);
        let edge_angles = levels.iter().map(TriangleMesh::max_edge_angle).collect();
        let sectors = root_sectors(&levels[0]);
        let sums = levels
            .iter()
            .map(|m| vec![Vec3::ZERO; m.faces.len()])
            .collect();
        let counts = levels.iter().map(|m| vec![0; m.faces.len()]).collect();
        let centers = levels
            .iter()
            .map(|m| vec![UnitVec3::NORTH; m.faces.len()])
            .collect();
        let leaves = levels[max_level].faces.len();
        TriangleTree {
            levels,
            edge_angles,
            sectors,
            sums,
            counts,
            centers,
            leaf_of: Vec::new(),
            leaf_start: vec![0; leaves + 1],
            leaf_members: Vec::new(),
            leaf_positions: Vec::new(),
            registered: 0,
        }
    }

    #[inline]
    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn mesh(&self, level: usize) -> &TriangleMesh {
        &self.levels[level]
    }

    /// Longest cell edge (radians) at `level`.
    #[inline]
    pub fn edge_angle(&self, level: usize) -> f64 {
        self.edge_angles[level]
    }

    /// Number of nodes registered by the last rebuild.
    pub fn len(&self) -> usize {
        self.registered
    }

    pub fn is_empty(&self) -> bool {
        self.registered == 0
    }

    pub fn count(&self, level: usize, cell: usize) -> u32 {
        self.counts[level][cell]
    }

    /// Un-normalized sum of member positions.
    pub fn sum(&self, level: usize, cell: usize) -> Vec3 {
        self.sums[level][cell]
    }

    /// Normalized mean of member positions; meaningless for empty cells.
    pub fn center(&self, level: usize, cell: usize) -> UnitVec3 {
        self.centers[level][cell]
    }

    /// Members of a leaf cell, in registration order.
    pub fn leaf_members(&self, leaf: usize) -> &[u32] {
        &self.leaf_members[self.leaf_start[leaf] as usize..self.leaf_start[leaf + 1] as usize]
    }

    /// Leaf holding node `i`, if registered.
    pub fn leaf_of(&self, i: usize) -> Option<usize> {
        match self.leaf_of.get(i) {
            Some(&l) if l != NO_LEAF => Some(l as usize),
            _ => None,
        }
    }

    /// The cell at `level` on the root-to-leaf path through `leaf`.
    #[inline]
    pub fn ancestor(&self, leaf: usize, level: usize) -> usize {
        leaf >> (2 * (self.max_level() - level))
    }

    /// Root face containing `p`: the longitude sector narrows the search
    /// to four candidates, of which the one with the largest inside margin
    /// wins (first candidate on exact ties).
    pub fn locate_root(&self, p: UnitVec3) -> usize {
        let lon = p.y().atan2(p.x());
        let sector = ((lon.rem_euclid(2.0 * PI) / (PI / 5.0)) as usize).min(9);
        let mesh = &self.levels[0];
        let mut best = self.sectors[sector][0] as usize;
        let mut best_margin = f64::NEG_INFINITY;
        for &f in &self.sectors[sector] {
            let margin = edge_margin(mesh, f as usize, p);
            if margin > best_margin {
                best = f as usize;
                best_margin = margin;
            }
            if margin >= 0.0 {
                break;
            }
        }
        best
    }

    /// Leaf cell containing `p`.
    pub fn locate_leaf(&self, p: UnitVec3) -> usize {
        let mut cell = self.locate_root(p);
        for level in 0..self.max_level() {
            let lambda = barycentric(&self.levels[level], cell, p);
            cell = 4 * cell + child_slot(lambda);
        }
        cell
    }

    /// Containing cell at every level.
    ///
    /// The ray through `p` is intersected with the plane of the current
    /// cell and expressed in barycentric coordinates; the child is chosen
    /// by comparing each coordinate against ½ (corner 1, 2, 3, else the
    /// center). Coordinates are recomputed in each child's own plane since
    /// re-projected midpoints leave the parent plane.
    pub fn locate(&self, p: UnitVec3) -> CellPath {
        let root = self.locate_root(p);
        let root_barycentric = barycentric(&self.levels[0], root, p);
        let mut cells = Vec::with_capacity(self.levels.len());
        cells.push(root as u32);
        let mut cell = root;
        let mut lambda = root_barycentric;
        for level in 0..self.max_level() {
            cell = 4 * cell + child_slot(lambda);
            cells.push(cell as u32);
            lambda = barycentric(&self.levels[level + 1], cell, p);
        }
        CellPath {
            cells,
            root_barycentric,
        }
    }

    /// Registers `positions` (all of them, or only the node ids in
    /// `active`) and recomputes every cell's count, sum and mass center.
    ///
    /// Leaf assignment and per-leaf sums run in parallel; sums are formed
    /// per leaf in registration order and then reduced up the levels, so
    /// the result does not depend on the thread count.
    pub fn rebuild(&mut self, positions: &[UnitVec3], active: Option<&[u32]>) {
        let max = self.max_level();
        self.leaf_of.clear();
        self.leaf_of.resize(positions.len(), NO_LEAF);

        let ids: Vec<u32> = match active {
            Some(a) => a.to_vec(),
            None => (0..positions.len() as u32).collect(),
        };
        let leaves: Vec<u32> = ids
            .par_iter()
            .map(|&i| self.locate_leaf(positions[i as usize]) as u32)
            .collect();
        for (&i, &l) in ids.iter().zip(&leaves) {
            self.leaf_of[i as usize] = l;
        }

        // counting sort into leaf buckets, stable in registration order
        let leaf_count = self.levels[max].faces.len();
        self.leaf_start.clear();
        self.leaf_start.resize(leaf_count + 1, 0);
        for &l in &leaves {
            self.leaf_start[l as usize + 1] += 1;
        }
        for k in 0..leaf_count {
            self.leaf_start[k + 1] += self.leaf_start[k];
        }
        let mut fill: Vec<u32> = self.leaf_start[..leaf_count].to_vec();
        self.leaf_members.clear();
        self.leaf_members.resize(ids.len(), 0);
        self.leaf_positions.clear();
        self.leaf_positions.resize(ids.len(), UnitVec3::NORTH);
        for (&i, &l) in ids.iter().zip(&leaves) {
            let slot = fill[l as usize] as usize;
            fill[l as usize] += 1;
            self.leaf_members[slot] = i;
            self.leaf_positions[slot] = positions[i as usize];
        }

        {
            let starts = &self.leaf_start;
            let pos = &self.leaf_positions;
            self.sums[max]
                .par_iter_mut()
                .zip(self.counts[max].par_iter_mut())
                .enumerate()
                .for_each(|(leaf, (sum, count))| {
                    let (a, b) = (starts[leaf] as usize, starts[leaf + 1] as usize);
                    *sum = pos[a..b].iter().fold(Vec3::ZERO, |s, p| s + p.vec());
                    *count = (b - a) as u32;
                });
        }
        for level in (0..max).rev() {
            let (upper, lower) = self.sums.split_at_mut(level + 1);
            let (cu, cl) = self.counts.split_at_mut(level + 1);
            let (child_sums, child_counts) = (&lower[0], &cl[0]);
            upper[level]
                .par_iter_mut()
                .zip(cu[level].par_iter_mut())
                .enumerate()
                .for_each(|(cell, (sum, count))| {
                    let k = 4 * cell;
                    *sum =
                        child_sums[k] + child_sums[k + 1] + child_sums[k + 2] + child_sums[k + 3];
                    *count = child_counts[k]
                        + child_counts[k + 1]
                        + child_counts[k + 2]
                        + child_counts[k + 3];
                });
        }
        for level in 0..=max {
            let sums = &self.sums[level];
            self.centers[level]
                .par_iter_mut()
                .zip(sums.par_iter())
                .for_each(|(c, s)| {
                    if let Some(u) = s.normalize() {
                        *c = u;
                    }
                });
        }
        self.registered = ids.len();
    }

    /// Visits the repulsors acting on `probe`: accepted cell mass centers
    /// with their member counts, and individual members of leaves reached.
    ///
    /// A cell at level ℓ is accepted when its center is farther than
    /// `opening · edge_angle(ℓ)` from the probe. Cells on the path of the
    /// `exclude` node are always expanded and the node itself is skipped,
    /// so the visited weights sum to the registered count minus one.
    pub fn for_each_repulsor<F>(
        &self,
        probe: UnitVec3,
        exclude: Option<usize>,
        opening: f64,
        mut f: F,
    ) where
        F: FnMut(UnitVec3, u32),
    {
        let max = self.max_level();
        let own_leaf = exclude.and_then(|i| self.leaf_of(i));
        let thresholds: Vec<f64> = self.edge_angles.iter().map(|e| opening * e).collect();
        let mut stack: Vec<(u8, u32)> = Vec::with_capacity(64);
        for root in (0..20u32).rev() {
            stack.push((0, root));
        }
        while let Some((level, cell)) = stack.pop() {
            let (level, cell) = (level as usize, cell as usize);
            let count = self.counts[level][cell];
            if count == 0 {
                continue;
            }
            let on_path = own_leaf.is_some_and(|l| self.ancestor(l, level) == cell);
            if !on_path {
                let center = self.centers[level][cell];
                if spherical_distance(center, probe) > thresholds[level] {
                    f(center, count);
                    continue;
                }
            }
            if level == max {
                let (a, b) = (
                    self.leaf_start[cell] as usize,
                    self.leaf_start[cell + 1] as usize,
                );
                for k in a..b {
                    if Some(self.leaf_members[k] as usize) != exclude {
                        f(self.leaf_positions[k], 1);
                    }
                }
            } else {
                for c in (0..4).rev() {
                    stack.push(((level + 1) as u8, (4 * cell + c) as u32));
                }
            }
        }
    }

    /// Collected form of [`Self::for_each_repulsor`].
    pub fn approximate_repulsors(
        &self,
        probe: UnitVec3,
        exclude: Option<usize>,
        opening: f64,
    ) -> Vec<(UnitVec3, u32)> {
        let mut out = Vec::new();
        self.for_each_repulsor(probe, exclude, opening, |c, w| out.push((c, w)));
        out
    }
}

/// Builds a tree of depth `max_level` holding every position.
pub fn build_tree(positions: &[UnitVec3], max_level: usize) -> TriangleTree {
    let mut t = TriangleTree::new(max_level);
    t.rebuild(positions, None);
    t
}

#[inline]
fn edge_margin(mesh: &TriangleMesh, f: usize, p: UnitVec3) -> f64 {
    super::mesh::spherical_inside_margin(mesh.face_vertices(f), p)
}

/// Barycentric coordinates of the ray/plane intersection
/// `ẋ = (v1·n)/(p·n)·p` with respect to face `f`, from signed sub-triangle
/// areas (`λ3 = 1 − λ1 − λ2`).
#[inline]
pub(crate) fn barycentric(mesh: &TriangleMesh, f: usize, p: UnitVec3) -> [f64; 3] {
    let [v1, v2, v3] = mesh.face_vertices(f).map(UnitVec3::vec);
    let n = mesh.normals[f];
    let x = p.vec() * (v1.dot(n) / p.vec().dot(n));
    let area = n.dot(n);
    let l1 = (v2 - x).cross(v3 - x).dot(n) / area;
    let l2 = (v3 - x).cross(v1 - x).dot(n) / area;
    [l1, l2, 1.0 - l1 - l2]
}

#[inline]
fn child_slot(lambda: [f64; 3]) -> usize {
    if lambda[0] > 0.5 {
        0
    } else if lambda[1] > 0.5 {
        1
    } else if lambda[2] > 0.5 {
        2
    } else {
        3
    }
}

/// For each of the ten longitude sectors, the four root faces whose
/// longitude span covers it.
fn root_sectors(mesh: &TriangleMesh) -> [[u8; 4]; 10] {
    let mut out = [[0u8; 4]; 10];
    let mut fill = [0usize; 10];
    for (f, face) in mesh.faces.iter().enumerate() {
        // pentagon index i of vertex 1 + i; poles carry no longitude
        let ring: Vec<usize> = face
            .iter()
            .filter(|&&v| (1..=10).contains(&v))
            .map(|&v| v as usize - 1)
            .collect();
        let start = *ring
            .iter()
            .find(|&&a| ring.contains(&((a + 2) % 10)))
            .expect("every icosahedron face spans two sectors");
        for s in [start, (start + 1) % 10] {
            out[s][fill[s]] = f as u8;
            fill[s] += 1;
        }
    }
    debug_assert!(fill.iter().all(|&k| k == 4));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::random_unit;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_points(n: usize, seed: u64) -> Vec<UnitVec3> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| random_unit(&mut rng)).collect()
    }

    #[test]
    fn sectors_have_four_candidates() {
        let t = TriangleTree::new(0);
        for s in t.sectors {
            let mut v = s.to_vec();
            v.sort();
            v.dedup();
            assert_eq!(v.len(), 4);
        }
    }

    #[test]
    fn face_centroid_locates_to_itself() {
        let t = TriangleTree::new(4);
        for f in 0..20 {
            let [a, b, c] = t.mesh(0).face_vertices(f);
            let centroid = (a.vec() + b.vec() + c.vec()).normalize().unwrap();
            let path = t.locate(centroid);
            assert_eq!(path.cells[0] as usize, f);
            for l in &path.root_barycentric {
                assert!((l - 1.0 / 3.0).abs() < 1e-12);
            }
            // the centroid stays in the center child at every level
            for (level, &cell) in path.cells.iter().enumerate() {
                let expected = (0..level).fold(f, |c, _| 4 * c + 3);
                assert_eq!(cell as usize, expected);
            }
        }
    }

    #[test]
    fn vertex_has_unit_barycentric() {
        let t = TriangleTree::new(0);
        let f = 7;
        let v1 = t.mesh(0).face_vertices(f)[0];
        let l = barycentric(t.mesh(0), f, v1);
        assert!((l[0] - 1.0).abs() < 1e-12 && l[1].abs() < 1e-12 && l[2].abs() < 1e-12);
    }

    #[test]
    fn single_node_path() {
        let p = UnitVec3::new(0.1, -0.4, 0.7);
        let t = build_tree(&[p], 3);
        let leaf = t.leaf_of(0).unwrap();
        for level in 0..=3 {
            let total: u32 = (0..t.mesh(level).faces.len())
                .map(|c| t.count(level, c))
                .sum();
            assert_eq!(total, 1);
            let cell = t.ancestor(leaf, level);
            assert_eq!(t.count(level, cell), 1);
            let c = t.center(level, cell);
            assert!(spherical_distance(c, p) < 1e-12);
        }
    }

    #[test]
    fn antipodal_nodes_take_disjoint_paths() {
        let p = UnitVec3::new(0.3, 0.2, 0.5);
        let t = build_tree(&[p, p.antipode()], 2);
        let (a, b) = (t.leaf_of(0).unwrap(), t.leaf_of(1).unwrap());
        assert_ne!(t.ancestor(a, 0), t.ancestor(b, 0));
        let root_total: u32 = (0..20).map(|c| t.count(0, c)).sum();
        assert_eq!(root_total, 2);
    }

    #[test]
    fn two_nodes_repel_each_other_only() {
        let pts = random_points(2, 4);
        let t = build_tree(&pts, 6);
        let r = t.approximate_repulsors(pts[0], Some(0), 1.0);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0], (pts[1], 1));
    }

    #[test]
    fn subset_registration() {
        let pts = random_points(50, 8);
        let mut t = TriangleTree::new(3);
        let active: Vec<u32> = (0..50).step_by(3).collect();
        t.rebuild(&pts, Some(&active));
        assert_eq!(t.len(), active.len());
        assert!(t.leaf_of(1).is_none());
        assert!(t.leaf_of(3).is_some());
        let w: u32 = t
            .approximate_repulsors(pts[3], Some(3), 0.5)
            .iter()
            .map(|r| r.1)
            .sum();
        assert_eq!(w as usize, active.len() - 1);
    }

    #[test]
    fn rebuild_is_deterministic_and_reusable() {
        let pts = random_points(500, 1);
        let mut a = build_tree(&pts, 4);
        let b = build_tree(&pts, 4);
        for level in 0..=4 {
            assert_eq!(a.counts[level], b.counts[level]);
            assert_eq!(a.sums[level], b.sums[level]);
        }
        let other = random_points(100, 2);
        a.rebuild(&other, None);
        assert_eq!(a.len(), 100);
        a.rebuild(&pts, None);
        assert_eq!(a.sums, b.sums);
    }
}
