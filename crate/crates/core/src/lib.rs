//! Spherical force-directed graph layout with focal views.
//!
//! A global layout places every node on the unit sphere ([`layout`]). Any
//! node can then be chosen as focal node: distances to it are corrected
//! towards hop distances ([`focal`]), the sphere is rotated so the focal
//! node sits at the projection center and flattened with a Lambert
//! azimuthal equal-area projection, and the nodes are rendered as a density
//! raster ([`render`]).

pub mod error;
pub mod focal;
pub mod geom;
pub mod graph;
pub mod icosa;
pub mod layout;
pub mod metrics;
pub mod render;

pub use error::{Error, Result};
pub use focal::FocalParams;
pub use geom::{PlanePoint, UnitVec3, Vec3};
pub use graph::{DistanceField, Graph, NodeOrder};
pub use icosa::{TriangleMesh, TriangleTree};
pub use layout::{Embedding, LayoutConfig};
pub use metrics::QualityReport;
pub use render::{DensityRaster, FocalView, OverlayMode, OverlaySpec};
