//! Global spherical force-directed layout.

mod engine;
mod forces;
mod persist;

pub use engine::{run_layout, run_layout_observed, step, ActiveSet, GrowthSchedule, StepStats};
pub use forces::{
    attraction_target, repulsion_displacement, repulsion_target_branch, BranchRule,
    RepulsionBranch, RepulsionTerm, COINCIDENT_EPS, JITTER_ANGLE,
};
pub use persist::{read_embedding_tsv, write_embedding_tsv, EmbeddingSidecar};

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::UnitVec3;
use crate::graph::DEFAULT_JUMP_PROB;
use crate::icosa::DEFAULT_MAX_LEVEL;

/// Default initial maximum step angle (≈ π/12).
pub const DEFAULT_THETA_MAX0: f64 = 0.26;

/// Steps used for graphs up to this many nodes: 500; larger graphs: 250.
pub const SMALL_GRAPH_NODES: usize = 1_000;

/// Step count by graph size.
pub fn default_steps(node_count: usize) -> usize {
    if node_count <= SMALL_GRAPH_NODES {
        500
    } else {
        250
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LayoutConfig {
    pub steps: usize,
    /// Maximum step angle at t = 0, cooled linearly to 0.
    pub theta_max0: f64,
    /// Tree acceptance factor, relative to a cell's edge angle.
    pub opening: f64,
    /// Grow the simulated graph from a small prefix of the node order.
    pub multilevel: bool,
    /// Fraction of the run after which all nodes are present.
    pub growth_end: f64,
    pub seed: u64,
    pub threads: usize,
    pub max_level: usize,
    /// Restart probability of the random-walk node order.
    pub jump_prob: f64,
    pub branch_rule: BranchRule,
    pub attraction: bool,
    pub repulsion: bool,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            steps: 250,
            theta_max0: DEFAULT_THETA_MAX0,
            opening: 1.0,
            multilevel: true,
            growth_end: 0.5,
            seed: 0,
            threads: 1,
            max_level: DEFAULT_MAX_LEVEL,
            jump_prob: DEFAULT_JUMP_PROB,
            branch_rule: BranchRule::Stable,
            attraction: true,
            repulsion: true,
        }
    }
}

impl LayoutConfig {
    /// Defaults with the size-dependent step count.
    pub fn for_graph(node_count: usize) -> Self {
        LayoutConfig {
            steps: default_steps(node_count),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::arg("steps must be >= 1"));
        }
        if !(self.theta_max0 > 0.0 && self.theta_max0 < FRAC_PI_2) {
            return Err(Error::arg(format!(
                "theta_max0 {} outside (0, π/2)",
                self.theta_max0
            )));
        }
        if !(self.growth_end > 0.0 && self.growth_end <= 1.0) {
            return Err(Error::arg(format!(
                "growth_end {} outside (0, 1]",
                self.growth_end
            )));
        }
        if !(self.opening > 0.0) {
            return Err(Error::arg("opening must be > 0"));
        }
        if self.threads == 0 {
            return Err(Error::arg("threads must be >= 1"));
        }
        if self.max_level > 12 {
            return Err(Error::arg("max_level must be <= 12"));
        }
        if !(0.0..=1.0).contains(&self.jump_prob) {
            return Err(Error::arg("jump_prob outside [0, 1]"));
        }
        Ok(())
    }

    /// Maximum step angle at simulation time `t ∈ [0, 1]`.
    #[inline]
    pub fn theta_max(&self, t: f64) -> f64 {
        (1.0 - t) * self.theta_max0
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub graph_hash: String,
    pub seed: u64,
    pub wall_time_secs: f64,
    /// Coincident or antipodal pairs resolved with the jitter tangent.
    pub jitter_events: u64,
}

/// Node positions on the unit sphere plus the run that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    pub positions: Vec<UnitVec3>,
    pub config: LayoutConfig,
    pub provenance: Provenance,
}

impl Embedding {
    pub fn from_positions(positions: Vec<UnitVec3>) -> Embedding {
        Embedding {
            positions,
            config: LayoutConfig::default(),
            provenance: Provenance::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}
