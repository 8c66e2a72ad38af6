//! Focal projections, density rasters and animations.

mod overlay;
mod raster;

pub use overlay::{
    category_index, cooling, load_categories, load_events, palette_color, NodeTable,
    OverlayMode, OverlaySpec, Rgb, BACKGROUND, BANDS_ID, CATEGORY_ID, COOLING, COOLING_ID,
    DISTANCE_BANDS, FAR, MUTED, NODE_COLOR, PALETTE_SIZE,
};
pub use raster::{stamp_offsets, DensityRaster, MIN_WIDTH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::focal::{focal_adjust, FocalParams};
use crate::geom::{
    lambert_project, slerp_with_angle, spherical_distance, PlanePoint, Rotation, UnitVec3,
};
use crate::graph::{bfs_distances, DistanceField, Graph};

/// Default stamp radius for focal views (a 5-pixel cross).
pub const FOCAL_STAMP: u32 = 1;

/// Default stamp radius for the global hemisphere views.
pub const HEMISPHERE_STAMP: u32 = 0;

/// Great-circle edges are only drawn for graphs up to this size.
pub const EDGE_DRAW_MAX_NODES: usize = 2_000;

/// A focal node's corrected, rotated and projected layout.
#[derive(Clone, Debug)]
pub struct FocalView {
    pub focal: usize,
    pub coords: Vec<PlanePoint>,
    pub dist: DistanceField,
    pub params: FocalParams,
    /// Corrected positions rotated so the focal node is at (0,0,1).
    pub sphere: Vec<UnitVec3>,
    /// Nodes that sat on the antipode of the focal node and were placed on
    /// the rim of the disk.
    pub antipode_clamped: usize,
}

/// BFS from the focal node, focal correction, rotation of the focal node
/// to the projection center and Lambert projection.
pub fn make_focal_view(
    positions: &[UnitVec3],
    graph: &Graph,
    params: &FocalParams,
) -> Result<FocalView> {
    if params.focal >= graph.node_count() {
        return Err(Error::arg(format!(
            "focal node {} out of range",
            params.focal
        )));
    }
    let dist = bfs_distances(graph, params.focal)?;
    view_from_distances(positions, dist, params)
}

/// [`make_focal_view`] with precomputed distances from the focal node.
pub fn view_from_distances(
    positions: &[UnitVec3],
    dist: DistanceField,
    params: &FocalParams,
) -> Result<FocalView> {
    let adjusted = focal_adjust(positions, &dist, params)?;
    let rot = Rotation::to_pole(adjusted[params.focal]);
    let (sphere, projected): (Vec<UnitVec3>, Vec<(PlanePoint, bool)>) = adjusted
        .par_iter()
        .map(|&p| {
            let r = rot.apply(p);
            let pr = lambert_project(r);
            (r, (pr.point, pr.antipode_clamped))
        })
        .unzip();
    let antipode_clamped = projected.iter().filter(|p| p.1).count();
    let mut coords: Vec<PlanePoint> = projected.into_iter().map(|p| p.0).collect();
    coords[params.focal] = PlanePoint::ORIGIN;
    Ok(FocalView {
        focal: params.focal,
        coords,
        dist,
        params: *params,
        sphere,
        antipode_clamped,
    })
}

/// Rasterizes a focal view with the given overlay and stamp radius.
pub fn rasterize(
    view: &FocalView,
    spec: &OverlaySpec,
    width: u32,
    stamp: u32,
) -> Result<DensityRaster> {
    rasterize_points(&view.coords, Some(&view.dist), spec, width, stamp)
}

/// Rasterizes arbitrary projected points; `dist` feeds the distance-band
/// overlay.
pub fn rasterize_points(
    coords: &[PlanePoint],
    dist: Option<&DistanceField>,
    spec: &OverlaySpec,
    width: u32,
    stamp: u32,
) -> Result<DensityRaster> {
    spec.validate(coords.len())?;
    let mut r = DensityRaster::new(width)?;
    r.stamp_points(coords, stamp, |i| spec.color(i, dist), |_| true);
    Ok(r)
}

/// Draws every edge of a small graph as a projected great-circle arc into
/// the raster's edge layer.
pub fn draw_edges(raster: &mut DensityRaster, view: &FocalView, graph: &Graph) -> Result<()> {
    if graph.node_count() > EDGE_DRAW_MAX_NODES {
        return Err(Error::arg(format!(
            "edge drawing is limited to graphs of at most {EDGE_DRAW_MAX_NODES} nodes"
        )));
    }
    let seg_angle = 2.0 / raster.width as f64;
    for (a, b) in graph.edges() {
        let (pa, pb) = (view.sphere[a], view.sphere[b]);
        let theta = spherical_distance(pa, pb);
        if std::f64::consts::PI - theta < 1e-9 {
            continue;
        }
        let steps = ((theta / seg_angle).ceil() as usize).clamp(1, 4096);
        let path: Vec<PlanePoint> = (0..=steps)
            .map(|s| {
                let p = if theta > 0.0 {
                    slerp_with_angle(pa, pb, theta, s as f64 / steps as f64)
                } else {
                    pa
                };
                lambert_project(p).point
            })
            .collect();
        raster.stamp_edge_path(&path);
    }
    Ok(())
}

/// Global views of the whole sphere: raster A projects the northern
/// hemisphere (x₃ ≥ 0) about (0,0,1), raster B the southern hemisphere
/// (x₃ < 0) about (0,0,−1). Every node lands in exactly one raster.
pub fn hemisphere_density(
    positions: &[UnitVec3],
    spec: &OverlaySpec,
    width: u32,
    stamp: u32,
) -> Result<(DensityRaster, DensityRaster)> {
    spec.validate(positions.len())?;
    let coords: Vec<PlanePoint> = positions
        .par_iter()
        .map(|&p| {
            let q = if p.z() >= 0.0 {
                p
            } else {
                Rotation::FLIP_X.apply(p)
            };
            lambert_project(q).point
        })
        .collect();
    let color = |i: usize| spec.color(i, None);
    let mut north = DensityRaster::new(width)?;
    north.stamp_points(&coords, stamp, color, |i| positions[i].z() >= 0.0);
    let mut south = DensityRaster::new(width)?;
    south.stamp_points(&coords, stamp, color, |i| positions[i].z() < 0.0);
    Ok((north, south))
}

/// One frame of an animation.
#[derive(Clone, Debug)]
pub struct AnimationFrame {
    pub raster: DensityRaster,
    /// Rotation applied to the frame's plane coordinates.
    pub rotation: f64,
    /// No persisting node carried direction information; the frame was
    /// left unrotated.
    pub degenerate_alignment: bool,
}

/// Renders a sequence of layouts of a growing graph around the same focal
/// node. Frame `k` covers the first `frames[k].len()` nodes of `graph`.
/// Each frame is rotated about the projection center to best match the
/// previous (aligned) frame over the nodes both share.
pub fn render_animation(
    frames: &[Vec<UnitVec3>],
    graph: &Graph,
    params: &FocalParams,
    spec: &OverlaySpec,
    width: u32,
    stamp: u32,
) -> Result<Vec<AnimationFrame>> {
    let mut out = Vec::with_capacity(frames.len());
    let mut prev: Option<Vec<PlanePoint>> = None;
    for positions in frames {
        let n = positions.len();
        if n > graph.node_count() || params.focal >= n {
            return Err(Error::arg(format!(
                "frame with {n} nodes does not fit the graph or focal node"
            )));
        }
        let g = if n == graph.node_count() {
            None
        } else {
            Some(graph.prefix(n))
        };
        let view = make_focal_view(positions, g.as_ref().unwrap_or(graph), params)?;
        let (rotation, degenerate) = match &prev {
            None => (0.0, false),
            Some(p) => {
                let shared: Vec<usize> = (0..p.len().min(n)).collect();
                let a = crate::geom::align_rotation(p, &view.coords, &shared);
                (a.angle, a.degenerate)
            }
        };
        let coords: Vec<PlanePoint> = if rotation == 0.0 {
            view.coords.clone()
        } else {
            view.coords.iter().map(|c| c.rotated(rotation)).collect()
        };
        let sub_spec = OverlaySpec {
            categories: spec.categories.map(|c| &c[..n.min(c.len())]),
            event_times: spec.event_times.map(|e| &e[..n.min(e.len())]),
            ..*spec
        };
        let raster = rasterize_points(&coords, Some(&view.dist), &sub_spec, width, stamp)?;
        out.push(AnimationFrame {
            raster,
            rotation,
            degenerate_alignment: degenerate,
        });
        prev = Some(coords);
    }
    Ok(out)
}

/// Metadata written next to a rendered focal image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViewMeta {
    pub focal_label: String,
    pub alpha: f64,
    pub d_max: f64,
    pub width: u32,
    pub stamp: u32,
    pub overlay: OverlayMode,
    pub colormap: Option<String>,
    pub antipode_clamped: usize,
}
