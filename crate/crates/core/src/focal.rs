//! Focal correction: pull every node towards the spherical distance from a
//! chosen focal node that matches its hop distance.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{mix64, move_along, seeded_tangent, slerp_with_angle, spherical_distance, UnitVec3};
use crate::graph::{bfs_distances_into, DistanceField, Graph, UNREACHED};
use crate::metrics::{stratified_pairs, FULL_ENUMERATION_NODES};

pub const DEFAULT_ALPHA: f64 = 0.8;

/// Below this angle a node is treated as sitting on the focal node or its
/// antipode, where the arc through the focal node is undefined.
const POLE_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FocalParams {
    pub focal: usize,
    /// Correction strength: 0 keeps the global layout, 1 puts every node
    /// exactly on the ring of its hop distance.
    pub alpha: f64,
    /// Hop distance mapped to the spherical distance π.
    pub d_max: f64,
}

impl FocalParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::arg(format!("alpha {} outside [0, 1]", self.alpha)));
        }
        if !(self.d_max > 0.0 && self.d_max.is_finite()) {
            return Err(Error::arg(format!("d_max {} must be positive", self.d_max)));
        }
        Ok(())
    }

    /// Ideal spherical distance to the focal node for hop distance `d`;
    /// unreachable nodes go to the antipode.
    #[inline]
    pub fn target_angle(&self, d: Option<u32>) -> f64 {
        match d {
            Some(d) => (d as f64 / self.d_max).min(1.0) * PI,
            None => PI,
        }
    }
}

/// Least-squares slope through the origin of `d = (d_max/π)·θ`:
/// `d_max = π·Σdθ / Σθ²`.
pub fn fit_dmax<I>(pairs: I) -> Result<f64>
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let (mut sdt, mut stt) = (0.0, 0.0);
    for (d, theta) in pairs {
        sdt += d * theta;
        stt += theta * theta;
    }
    if !(stt > 0.0) {
        return Err(Error::DegenerateFit);
    }
    Ok(PI * sdt / stt)
}

/// Fits `d_max` for a whole layout. Graphs up to
/// [`FULL_ENUMERATION_NODES`] use every connected node pair; larger graphs
/// use the stratified pair sample of the metrics module.
pub fn fit_dmax_global(graph: &Graph, positions: &[UnitVec3], seed: u64) -> Result<f64> {
    let n = graph.node_count();
    if positions.len() != n {
        return Err(Error::arg("embedding and graph sizes differ"));
    }
    if n <= FULL_ENUMERATION_NODES {
        let sums: Vec<(f64, f64)> = (0..n)
            .into_par_iter()
            .map_init(
                || (Vec::new(), Vec::new()),
                |(dist, queue), s| {
                    bfs_distances_into(graph, s, dist, queue).expect("source in range");
                    let (mut sdt, mut stt) = (0.0, 0.0);
                    for (j, &d) in dist.iter().enumerate().skip(s + 1) {
                        if d != UNREACHED {
                            let theta = spherical_distance(positions[s], positions[j]);
                            sdt += d as f64 * theta;
                            stt += theta * theta;
                        }
                    }
                    (sdt, stt)
                },
            )
            .collect();
        let (sdt, stt) = sums
            .iter()
            .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
        if !(stt > 0.0) {
            return Err(Error::DegenerateFit);
        }
        Ok(PI * sdt / stt)
    } else {
        let sample = stratified_pairs(graph, seed);
        fit_dmax(sample.pairs.iter().map(|p| {
            (
                p.d as f64,
                spherical_distance(positions[p.a as usize], positions[p.b as usize]),
            )
        }))
    }
}

/// Fits `d_max` from the focal node's own distances only.
pub fn fit_dmax_from(positions: &[UnitVec3], distances: &DistanceField) -> Result<f64> {
    let f = positions[distances.source];
    fit_dmax(
        distances
            .dist
            .iter()
            .enumerate()
            .filter(|&(_, &d)| d != UNREACHED && d > 0)
            .map(|(j, &d)| (d as f64, spherical_distance(f, positions[j]))),
    )
}

/// Moves every node along the great circle through the focal node towards
/// its ideal distance `min(1, d/d_max)·π`. A node farther out than its
/// ideal distance moves towards the focal node by the fraction
/// `α(θ − θ*)/θ`; a node too close moves towards the antipode by
/// `α(θ* − θ)/(π − θ)`. The focal node does not move.
pub fn focal_adjust(
    positions: &[UnitVec3],
    distances: &DistanceField,
    params: &FocalParams,
) -> Result<Vec<UnitVec3>> {
    params.validate()?;
    if distances.source != params.focal {
        return Err(Error::arg(format!(
            "distances are from node {} but focal node is {}",
            distances.source, params.focal
        )));
    }
    if distances.dist.len() != positions.len() || params.focal >= positions.len() {
        return Err(Error::arg("distance field and embedding sizes differ"));
    }
    let x_f = positions[params.focal];
    let anti = x_f.antipode();
    let alpha = params.alpha;
    let out = positions
        .par_iter()
        .enumerate()
        .map(|(i, &x_i)| {
            if i == params.focal || alpha == 0.0 {
                return x_i;
            }
            let theta = spherical_distance(x_i, x_f);
            let target = params.target_angle(distances.get(i));
            let key = mix64(mix64(params.focal as u64) ^ i as u64);
            if theta >= target {
                let shift = alpha * (theta - target);
                if shift == 0.0 {
                    x_i
                } else if PI - theta < POLE_EPS {
                    move_along(x_i, seeded_tangent(x_i, key), shift)
                } else {
                    slerp_with_angle(x_i, x_f, theta, shift / theta)
                }
            } else {
                let shift = alpha * (target - theta);
                if theta < POLE_EPS {
                    move_along(x_i, seeded_tangent(x_i, key), shift)
                } else {
                    slerp_with_angle(x_i, anti, PI - theta, shift / (PI - theta))
                }
            }
        })
        .collect();
    Ok(out)
}
