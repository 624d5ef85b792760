#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crn/model.hpp"
#include "crn/tolerances.hpp"

namespace crn {

enum class TrajectoryVerdict { ConvergedInterior, ApproachedBoundary, Diverged, Inconclusive };

std::string to_string(TrajectoryVerdict v);

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    TrajectoryVerdict verdict = TrajectoryVerdict::Inconclusive;
    std::optional<Vector> limit;
    std::optional<std::size_t> exit_face;  ///< coordinate that reached the boundary threshold
    double conservation_drift = 0.0;       ///< max |<c, x(t) - x0>| over unit c in S^perp
    std::size_t steps = 0;
    std::size_t rejected = 0;
};

struct IntegrateOptions {
    double initial_step = 1e-3;
    std::size_t max_steps = 2'000'000;
    /// Store every k-th accepted state (the final state is always stored).
    std::size_t record_every = 1;
};

/// dx/dt = sum_i kappa_i x^{y_i} (y'_i - y_i). Throws NonPositiveStateError unless x > 0.
Vector rhs(const MassActionSystem& sys, const Vector& x);

/// d rhs / dx.
Matrix rhs_jacobian(const MassActionSystem& sys, const Vector& x);

/// Total gross flux sum_i kappa_i x^{y_i} |y'_i - y_i|, the scale for convergence tests.
double gross_flux(const MassActionSystem& sys, const Vector& x);

/// Damped Newton on rhs restricted to start + span(basis), basis orthonormal.
/// Succeeds when |rhs| <= tol.steady_state * gross_flux.
std::optional<Vector> polish_steady_state(const MassActionSystem& sys, const Vector& start, const Matrix& basis,
                                          const Tolerances& tol = kDefaultTolerances);
/// Dormand-Prince 5(4) with relative tolerance tol.rk_rtol. Stops early on
/// min x_i < tol.boundary, |x| > tol.divergence or |rhs| < tol.converged_rhs * gross_flux. Near a fixed point the
/// limit is refined by polish_steady_state.
Trajectory integrate(const MassActionSystem& sys, const Vector& x0, double horizon, const IntegrateOptions& opts = {},
                     const Tolerances& tol = kDefaultTolerances);

/// sum_i x_i (ln x_i - ln xstar_i - 1)
double lyapunov_entropy(const Vector& x, const Vector& xstar);

double lyapunov_linear(const Vector& x, const Vector& w);

std::string trajectory_csv(const Trajectory& traj);

}  // namespace crn
