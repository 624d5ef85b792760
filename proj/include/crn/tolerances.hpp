#pragma once

namespace crn {

/// Numerical thresholds shared by every module. Each operation that depends
/// on one of these takes a `Tolerances` argument defaulting to these values.
struct Tolerances {
    // numlin
    double feasibility = 1e-9;   ///< absolute constraint violation accepted from the LP
    double strict_slack = 1e-9;  ///< min slack for a point to count as strictly positive
    double kernel = 1e-10;       ///< singular values below this (relative) are treated as zero
    double rank_pivot = 1e-10;   ///< relative pivot threshold for floating rank
    double pivot = 1e-12;        ///< simplex pivot magnitude floor

    // balancing
    double newton_gradient = 1e-12;  ///< relative gradient norm that stops the Birch solver
    int newton_max_steps = 200;
    double balance = 1e-9;           ///< detailed/complex balance residual threshold
    double wegscheider = 1e-9;

    // equivalence
    double equivalence = 1e-9;     ///< absolute per-vertex net-vector mismatch
    double ray_residual = 1e-8;    ///< relative least-squares residual for single-target rays
    double ray_min_t = 1e-12;

    // dynamics
    double rk_rtol = 1e-8;
    double rk_atol = 1e-12;
    double boundary = 1e-8;
    double divergence = 1e8;
    double converged_rhs = 1e-10;  ///< ||rhs|| relative to gross flux
    double steady_state = 1e-10;
};

inline const Tolerances kDefaultTolerances{};

}  // namespace crn
