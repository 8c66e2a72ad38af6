//! Geodesic icosahedron hierarchy for approximate repulsion, the spherical
//! counterpart of a Barnes-Hut quadtree.

mod mesh;
mod tree;

pub use mesh::{build_icosahedron, subdivide, TriangleMesh};
pub use tree::{build_tree, CellPath, TriangleTree, DEFAULT_MAX_LEVEL};
