#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crn/model.hpp"
#include "crn/tolerances.hpp"

namespace crn {

enum class MembershipStatus { RelativeInterior, Boundary, Outside };

std::string to_string(MembershipStatus s);

struct PolytopeMembership {
    MembershipStatus status = MembershipStatus::Outside;
    std::vector<VertexId> sources;            ///< order of the barycentric coefficients
    std::optional<Vector> barycentric;        ///< alpha_y > 0, sum 1, sum alpha_y y = point
    std::optional<Vector> separating;         ///< w with <w, point - y> <= 0 for every source, unit inf-norm
};

/// Steady-state flux on edges: strictly positive J with Gamma J = 0.
using FluxAssignment = Vector;

enum class StabilityCase { GloballyStable, NoPositiveSteadyState };

std::string to_string(StabilityCase c);

struct SingleTargetVerdict {
    StabilityCase verdict = StabilityCase::NoPositiveSteadyState;
    VertexId target;
    PolytopeMembership membership;
    std::optional<FluxAssignment> steady_state_flux;
};

/// Relative-interior / boundary / outside test of `point` against the convex hull of `points`.
PolytopeMembership hull_membership(const std::vector<Vector>& points, const Vector& point,
                                   const Tolerances& tol = kDefaultTolerances);

/// Membership of `point` in the Newton polytope (convex hull of the source vertices) of `net`.
PolytopeMembership newton_membership(const EmbeddedNetwork& net, const Vector& point,
                                     const Tolerances& tol = kDefaultTolerances);

/// Direction w with <w, point - y> <= 0 for every y in `points`. Maximizes the minimum
/// slack first; if that is zero, maximizes the total slack so at least one inequality is strict.
/// Normalized to unit inf-norm. nullopt when no nonzero w exists (point in the relative interior).
std::optional<Vector> separating_direction(const std::vector<Vector>& points, const Vector& point,
                                           const Tolerances& tol = kDefaultTolerances);

/// Strictly positive J in Ker(Gamma), normalized to sum |E|, or nullopt.
std::optional<FluxAssignment> steady_state_flux(const EmbeddedNetwork& net, const Tolerances& tol = kDefaultTolerances);

/// Throws NotSingleTargetError when the network is not single-target.
SingleTargetVerdict classify_single_target(const MassActionSystem& sys, const Tolerances& tol = kDefaultTolerances);
SingleTargetVerdict classify_single_target(const EmbeddedNetwork& net, const Tolerances& tol = kDefaultTolerances);

}  // namespace crn
