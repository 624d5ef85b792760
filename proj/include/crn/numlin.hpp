#pragma once

#include <optional>
#include <vector>

#include "crn/model.hpp"
#include "crn/tolerances.hpp"

namespace crn::numlin {

/// Equality-constrained LP: A x = b, x_i >= 0 where `nonnegative[i]`, optional `maximize c.x`.
struct LPProblem {
    Matrix A;
    Vector b;
    std::vector<bool> nonnegative;  ///< empty means every variable is nonnegative
    std::optional<Vector> objective;

    std::size_t num_vars() const { return static_cast<std::size_t>(A.cols()); }
    bool is_nonnegative(std::size_t i) const { return nonnegative.empty() || nonnegative[i]; }
};

enum class LPStatus { Optimal, Infeasible, Unbounded };

struct LPResult {
    LPStatus status = LPStatus::Infeasible;
    Vector x;                 ///< empty unless Optimal
    double objective = 0.0;   ///< c.x at x (0 for pure feasibility)
    double phase1_residual = 0.0;

    bool feasible() const { return status == LPStatus::Optimal; }
};

/// Two-phase dense simplex with Bland's rule. Without an objective this is a
/// feasibility query. The returned point is polished by a basis re-solve.
LPResult lp_solve(const LPProblem& p, const Tolerances& tol = kDefaultTolerances);

/// Feasibility only; throws UnboundedError if an objective is given and unbounded.
std::optional<Vector> lp_feasible(const LPProblem& p, const Tolerances& tol = kDefaultTolerances);

struct StrictPoint {
    Vector x;
    double slack = 0.0;  ///< optimal min_i x_i over the strict set
};

/// Maximizes t subject to the constraints and x_i >= t for i in `strict`,
/// with t capped at `cap` so conic feasible sets stay bounded.
/// Returns the point iff the optimal t exceeds tol.strict_slack.
std::optional<StrictPoint> strict_interior_point(const LPProblem& p, const std::vector<std::size_t>& strict,
                                                 double cap = 1.0, const Tolerances& tol = kDefaultTolerances);

/// Optimal slack value of the problem above (0 when only the boundary is feasible); nullopt when infeasible.
std::optional<double> max_min_slack(const LPProblem& p, const std::vector<std::size_t>& strict, double cap = 1.0,
                     const Tolerances& tol = kDefaultTolerances);

/// Orthonormal basis of Ker M (columns). Dimension is cols(M) - rank(M).
Matrix kernel_basis(const Matrix& m, const Tolerances& tol = kDefaultTolerances);

/// Orthonormal basis of the column space of M.
Matrix range_basis(const Matrix& m, const Tolerances& tol = kDefaultTolerances);

std::size_t numeric_rank(const Matrix& m, const Tolerances& tol = kDefaultTolerances);

/// Minimum-norm least-squares solution of A x = b.
Vector least_squares(const Matrix& A, const Vector& b);

/// max_i |(A x - b)_i| and the smallest nonnegative-variable value; used to re-check LP output.
double constraint_violation(const LPProblem& p, const Vector& x);

}  // namespace crn::numlin
