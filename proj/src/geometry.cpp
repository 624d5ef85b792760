#include "crn/geometry.hpp"

#include "crn/error.hpp"
#include "crn/numlin.hpp"

#include <numeric>

namespace crn {

std::string to_string(MembershipStatus s)
{
    switch (s) {
    case MembershipStatus::RelativeInterior: return "RELATIVE_INTERIOR";
    case MembershipStatus::Boundary: return "BOUNDARY";
    case MembershipStatus::Outside: return "OUTSIDE";
    }
    return "?";
}

std::string to_string(StabilityCase c)
{
    return c == StabilityCase::GloballyStable ? "GLOBALLY_STABLE" : "NO_POSITIVE_STEADY_STATE";
}

namespace {

// sum_i alpha_i y_i = point, sum_i alpha_i = 1, alpha >= 0
numlin::LPProblem barycentric_problem(const std::vector<Vector>& points, const Vector& point)
{
    const auto n = point.size();
    const auto k = static_cast<Eigen::Index>(points.size());
    numlin::LPProblem p;
    p.A = Matrix::Zero(n + 1, k);
    p.b = Vector::Zero(n + 1);
    for (Eigen::Index i = 0; i < k; ++i) {
        p.A.col(i).head(n) = points[static_cast<std::size_t>(i)];
        p.A(n, i) = 1.0;
    }
    p.b.head(n) = point;
    p.b[n] = 1.0;
    return p;
}

std::vector<std::size_t> all_indices(std::size_t k)
{
    std::vector<std::size_t> v(k);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

}  // namespace

std::optional<Vector> separating_direction(const std::vector<Vector>& points, const Vector& point,
                                           const Tolerances& tol)
{
    const auto n = point.size();
    const auto k = static_cast<Eigen::Index>(points.size());
    // variables: [w (n, free) | s (free) | sigma (k) | a (n) | b (n)]
    const Eigen::Index cols = n + 1 + k + 2 * n;
    const Eigen::Index rows = k + 2 * n;
    numlin::LPProblem p;
    p.A = Matrix::Zero(rows, cols);
    p.b = Vector::Zero(rows);
    for (Eigen::Index i = 0; i < k; ++i) {
        p.A.row(i).head(n) = (point - points[static_cast<std::size_t>(i)]).transpose();
        p.A(i, n) = 1.0;
        p.A(i, n + 1 + i) = 1.0;
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        p.A(k + j, j) = 1.0;
        p.A(k + j, n + 1 + k + j) = 1.0;
        p.b[k + j] = 1.0;
        p.A(k + n + j, j) = -1.0;
        p.A(k + n + j, n + 1 + k + n + j) = 1.0;
        p.b[k + n + j] = 1.0;
    }
    p.nonnegative.assign(static_cast<std::size_t>(cols), true);
    for (Eigen::Index j = 0; j <= n; ++j) p.nonnegative[static_cast<std::size_t>(j)] = false;

    // first pass: maximize the minimum slack s
    Vector c = Vector::Zero(cols);
    c[n] = 1.0;
    p.objective = c;
    auto r = numlin::lp_solve(p, tol);
    Vector w;
    if (r.feasible() && r.x[n] > tol.strict_slack) {
        w = r.x.head(n);
    } else {
        // second pass: s = 0, maximize the total slack
        p.A.col(n).setZero();
        c.setZero();
        c.segment(n + 1, k).setOnes();
        p.objective = c;
        r = numlin::lp_solve(p, tol);
        if (!r.feasible() || r.objective <= tol.strict_slack) return std::nullopt;
        w = r.x.head(n);
    }
    const double norm = w.cwiseAbs().maxCoeff();
    if (norm <= 0) return std::nullopt;
    return Vector(w / norm);
}

PolytopeMembership hull_membership(const std::vector<Vector>& points, const Vector& point, const Tolerances& tol)
{
    if (points.empty()) throw ModelError("polytope has no vertices");
    for (const auto& y : points) {
        if (y.size() != point.size()) throw ModelError("query point dimension does not match");
    }
    PolytopeMembership m;
    const auto p = barycentric_problem(points, point);
    if (auto strict = numlin::strict_interior_point(p, all_indices(points.size()), 1.0, tol)) {
        m.status = MembershipStatus::RelativeInterior;
        m.barycentric = strict->x;
        return m;
    }
    m.status = numlin::lp_feasible(p, tol) ? MembershipStatus::Boundary : MembershipStatus::Outside;
    m.separating = separating_direction(points, point, tol);
    return m;
}

PolytopeMembership newton_membership(const EmbeddedNetwork& net, const Vector& point, const Tolerances& tol)
{
    if (point.size() != static_cast<Eigen::Index>(net.dimension()))
        throw ModelError("query point dimension does not match network");
    const auto sources = net.sources();
    if (sources.empty()) throw ModelError("network has no source vertices");
    std::vector<Vector> pts;
    for (auto id : sources) pts.push_back(net.vertex(id).coords());
    auto m = hull_membership(pts, point, tol);
    m.sources = sources;
    return m;
}

std::optional<FluxAssignment> steady_state_flux(const EmbeddedNetwork& net, const Tolerances& tol)
{
    const Matrix gamma = stoichiometric_matrix(net);
    const auto e = gamma.cols();
    numlin::LPProblem p;
    p.A = Matrix::Zero(gamma.rows() + 1, e);
    p.A.topRows(gamma.rows()) = gamma;
    p.A.row(gamma.rows()).setOnes();
    p.b = Vector::Zero(gamma.rows() + 1);
    p.b[gamma.rows()] = static_cast<double>(e);
    auto strict = numlin::strict_interior_point(p, all_indices(static_cast<std::size_t>(e)), 1.0, tol);
    if (!strict) return std::nullopt;
    return strict->x;
}

SingleTargetVerdict classify_single_target(const EmbeddedNetwork& net, const Tolerances& tol)
{
    const auto target = single_target_of(net);
    if (!target) throw NotSingleTargetError("network is not single-target");
    SingleTargetVerdict v;
    v.target = *target;
    v.membership = newton_membership(net, net.vertex(*target).coords(), tol);
    if (v.membership.status == MembershipStatus::RelativeInterior) {
        v.verdict = StabilityCase::GloballyStable;
        v.steady_state_flux = steady_state_flux(net, tol);
    } else {
        v.verdict = StabilityCase::NoPositiveSteadyState;
    }
    return v;
}

SingleTargetVerdict classify_single_target(const MassActionSystem& sys, const Tolerances& tol)
{
    return classify_single_target(sys.network(), tol);
}

}  // namespace crn
