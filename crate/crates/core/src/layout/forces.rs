//! Per-node attraction and repulsion targets on the sphere.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::geom::{
    move_along, seeded_tangent, slerp_with_angle, spherical_distance, UnitVec3, Vec3, ANGLE_EPS,
};

/// Pairs closer than this are treated as coincident and jittered apart.
pub const COINCIDENT_EPS: f64 = 1e-9;

/// Angular separation assumed for a jittered coincident pair.
pub const JITTER_ANGLE: f64 = 1e-6;

/// Below this distance from the antipode the repulsion direction is
/// undefined and the jitter tangent is used instead.
pub const ANTIPODAL_EPS: f64 = 1e-9;

/// The two algebraically equivalent interpolations for a repulsion target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepulsionBranch {
    /// `slerp(x_i, −x_j, θ_max / (π − θ_ij))`
    TowardAntipode,
    /// `slerp(−x_j, −x_i, (θ_max + θ_ij − π) / θ_ij)`
    FromAntipode,
}

/// How the branch is picked for a given pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchRule {
    /// The branch whose slerp spans the larger base angle.
    #[default]
    Stable,
    /// `TowardAntipode` iff `π − θ_ij ≤ θ_max`, as originally printed.
    Strict,
}

impl BranchRule {
    #[inline]
    fn pick(self, theta: f64, theta_max: f64) -> RepulsionBranch {
        let toward = match self {
            BranchRule::Stable => theta <= FRAC_PI_2,
            BranchRule::Strict => PI - theta <= theta_max,
        };
        if toward {
            RepulsionBranch::TowardAntipode
        } else {
            RepulsionBranch::FromAntipode
        }
    }
}

/// The point `θ_max` away from `x_i` on the great circle through `x_i`
/// and `x_j`, on the far side from `x_j`, computed with the given branch.
/// Requires `x_j ≠ ±x_i`.
pub fn repulsion_target_branch(
    x_i: UnitVec3,
    x_j: UnitVec3,
    theta_max: f64,
    branch: RepulsionBranch,
) -> UnitVec3 {
    let theta = spherical_distance(x_i, x_j);
    target_with_angle(x_i, x_j, theta, theta_max, branch)
}

#[inline]
fn target_with_angle(
    x_i: UnitVec3,
    x_j: UnitVec3,
    theta: f64,
    theta_max: f64,
    branch: RepulsionBranch,
) -> UnitVec3 {
    match branch {
        RepulsionBranch::TowardAntipode => {
            let base = PI - theta;
            slerp_with_angle(x_i, x_j.antipode(), base, theta_max / base)
        }
        RepulsionBranch::FromAntipode => slerp_with_angle(
            x_j.antipode(),
            x_i.antipode(),
            theta,
            (theta_max + theta - PI) / theta,
        ),
    }
}

/// One repulsor's contribution to the repulsion sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RepulsionTerm {
    /// `weight / θ_ij · target`
    pub contribution: Vec3,
    pub target: UnitVec3,
    /// The direction came from the jitter tangent (coincident or
    /// antipodal pair).
    pub jittered: bool,
}

/// Repulsion of `x_i` away from a repulsor of the given weight (1 for a
/// single node, the member count for a cell mass center).
///
/// `jitter_key` seeds the tangent used when the pair is coincident or
/// antipodal, so the fallback is reproducible.
pub fn repulsion_displacement(
    x_i: UnitVec3,
    repulsor: UnitVec3,
    weight: f64,
    theta_max: f64,
    rule: BranchRule,
    jitter_key: u64,
) -> RepulsionTerm {
    let theta = spherical_distance(x_i, repulsor);
    repulsion_term(x_i, repulsor, theta, weight, theta_max, rule, jitter_key)
}

#[inline]
pub(crate) fn repulsion_term(
    x_i: UnitVec3,
    x_j: UnitVec3,
    theta: f64,
    weight: f64,
    theta_max: f64,
    rule: BranchRule,
    jitter_key: u64,
) -> RepulsionTerm {
    if theta < COINCIDENT_EPS || PI - theta < ANTIPODAL_EPS {
        let target = move_along(x_i, seeded_tangent(x_i, jitter_key), theta_max);
        let theta_eff = theta.max(JITTER_ANGLE);
        return RepulsionTerm {
            contribution: target.vec() * (weight / theta_eff),
            target,
            jittered: true,
        };
    }
    let target = target_with_angle(x_i, x_j, theta, theta_max, rule.pick(theta, theta_max));
    RepulsionTerm {
        contribution: target.vec() * (weight / theta),
        target,
        jittered: false,
    }
}

/// Attraction sum `Σ θ_ij² · slerp(x_i, x_j, min(1, θ_max/θ_ij))` over the
/// given neighbor positions. Coincident neighbors carry zero weight and are
/// skipped; `None` means no neighbor contributed.
pub fn attraction_target<I>(
    x_i: UnitVec3,
    neighbors: I,
    theta_max: f64,
    jitter_key: u64,
) -> Option<Vec3>
where
    I: IntoIterator<Item = UnitVec3>,
{
    let mut sum = Vec3::ZERO;
    let mut any = false;
    for (k, x_j) in neighbors.into_iter().enumerate() {
        let theta = spherical_distance(x_i, x_j);
        if theta < ANGLE_EPS {
            continue;
        }
        let step = (theta_max / theta).min(1.0);
        let moved = if step == 1.0 {
            x_j
        } else if PI - theta < ANTIPODAL_EPS {
            move_along(
                x_i,
                seeded_tangent(x_i, jitter_key ^ (k as u64 + 1)),
                theta_max,
            )
        } else {
            slerp_with_angle(x_i, x_j, theta, step)
        };
        sum += moved.vec() * (theta * theta);
        any = true;
    }
    any.then_some(sum)
}
