#include "crn/balancing.hpp"

#include "crn/error.hpp"
#include "crn/geometry.hpp"
#include "crn/numlin.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace crn {

ExpPotential::ExpPotential(Matrix generators, Vector weights, Vector linear)
    : g_(std::move(generators)), a_(std::move(weights)), b_(std::move(linear))
{
    if (a_.size() != g_.cols()) throw ModelError("potential: weight count does not match generators");
    if (b_.size() != g_.rows()) throw ModelError("potential: linear term has wrong dimension");
    if ((a_.array() <= 0).any()) throw ModelError("potential: weights must be positive");
}

Vector ExpPotential::terms(const Vector& mu) const
{
    return (a_.array() * (g_.transpose() * mu).array().exp()).matrix();
}

double ExpPotential::value(const Vector& mu) const
{
    return terms(mu).sum() - b_.dot(mu);
}

Vector ExpPotential::gradient(const Vector& mu) const
{
    return g_ * terms(mu) - b_;
}

Matrix ExpPotential::hessian(const Vector& mu) const
{
    return g_ * terms(mu).asDiagonal() * g_.transpose();
}

double ExpPotential::gross_scale(const Vector& mu) const
{
    const Vector t = terms(mu);
    double s = b_.norm();
    for (Eigen::Index j = 0; j < g_.cols(); ++j) s += t[j] * g_.col(j).norm();
    return s;
}

PotentialMinimum minimize_potential(const ExpPotential& phi, const Matrix& subspace, const Vector& mu0,
                                    const Tolerances& tol)
{
    constexpr double kArmijo = 1e-4;
    constexpr double kBacktrack = 0.5;
    constexpr int kPolishSteps = 2;

    PotentialMinimum out;
    Vector z = subspace.transpose() * mu0;
    if (subspace.cols() == 0) {
        out.mu = Vector::Zero(mu0.size());
        out.scale = phi.gross_scale(out.mu);
        return out;
    }

    auto mu_of = [&](const Vector& zz) { return Vector(subspace * zz); };
    Vector mu = mu_of(z);
    double f = phi.value(mu);
    if (!std::isfinite(f)) throw NoConvergenceError("potential is not finite at the initial point");

    int polish = 0;
    for (int it = 0; it <= tol.newton_max_steps; ++it) {
        const Vector grad = subspace.transpose() * phi.gradient(mu);
        const double gnorm = grad.cwiseAbs().maxCoeff();
        const double scale = phi.gross_scale(mu);
        out.mu = mu;
        out.iterations = it;
        out.gradient_norm = gnorm;
        out.scale = scale;
        if (gnorm <= tol.newton_gradient * scale) {
            // a couple of extra steps drive the gradient to round-off; keep them only if they help
            if (polish++ >= kPolishSteps) return out;
        }
        if (it == tol.newton_max_steps) break;

        const Matrix hess = subspace.transpose() * phi.hessian(mu) * subspace;
        Vector step = -hess.ldlt().solve(grad);
        if (!step.allFinite()) step = -grad;
        double slope = grad.dot(step);
        if (slope >= 0) {
            step = -grad;
            slope = -grad.squaredNorm();
        }

        double t = 1.0;
        bool accepted = false;
        while (t > 1e-30) {
            const Vector zt = z + t * step;
            const Vector mut = mu_of(zt);
            const double ft = phi.value(mut);
            if (!std::isfinite(ft)) {
                t *= kBacktrack;
                continue;
            }
            const bool armijo = ft <= f + kArmijo * t * slope;
            // near the minimum the decrease drowns in the round-off of f; judge by the gradient instead
            const bool flat = ft - f <= 1e-14 * (std::abs(f) + scale);
            if (armijo || flat) {
                const Vector gt = subspace.transpose() * phi.gradient(mut);
                const double gtnorm = gt.cwiseAbs().maxCoeff();
                if (!armijo && gtnorm >= gnorm) {
                    t *= kBacktrack;
                    continue;
                }
                if (polish > 0 && gtnorm >= gnorm) break;
                z = zt;
                mu = mut;
                f = ft;
                accepted = true;
                break;
            }
            t *= kBacktrack;
        }
        if (!accepted) {
            // no further decrease available in floating point
            if (gnorm <= std::max(tol.newton_gradient, 1e-9) * scale) return out;
            throw NoConvergenceError("line search failed with gradient " + std::to_string(gnorm));
        }
    }
    if (out.gradient_norm <= tol.newton_gradient * out.scale) return out;
    throw NoConvergenceError("Newton iteration did not converge in " + std::to_string(tol.newton_max_steps) +
                             " steps");
}

BirchSolution birch_point(const Matrix& gamma, const Vector& kappa, const BirchOptions& opts, const Tolerances& tol)
{
    if (gamma.cols() != kappa.size()) throw ModelError("birch_point: kappa size does not match gamma columns");
    if ((kappa.array() <= 0).any()) throw ModelError("birch_point: kappa must be positive");

    // 0 in relint conv{gamma_j} iff a strictly positive kernel vector of gamma exists
    std::vector<Vector> cols;
    for (Eigen::Index j = 0; j < gamma.cols(); ++j) cols.emplace_back(gamma.col(j));
    const auto membership = hull_membership(cols, Vector::Zero(gamma.rows()), tol);
    if (membership.status != MembershipStatus::RelativeInterior)
        throw NotInteriorError("potential is unbounded below: 0 is not in the relative interior of the reaction vectors");

    const ExpPotential phi(gamma, kappa, Vector::Zero(gamma.rows()));
    const Matrix span = numlin::range_basis(gamma, tol);
    const Vector mu0 = opts.initial_mu ? *opts.initial_mu : Vector::Zero(gamma.rows());
    if (mu0.size() != gamma.rows()) throw ModelError("birch_point: initial mu has wrong dimension");
    const auto min = minimize_potential(phi, span, mu0, tol);

    BirchSolution s;
    s.mu = min.mu;
    s.kappa_prime = (kappa.array() * (gamma.transpose() * s.mu).array().exp()).matrix();
    s.steady_state = (-s.mu).array().exp().matrix();
    s.residual = (gamma * s.kappa_prime).cwiseAbs().maxCoeff();
    s.iterations = min.iterations;
    return s;
}

Vector compatibility_class_point(const Vector& xstar, const Vector& x0, const Matrix& stoich, const Tolerances& tol)
{
    if (xstar.size() != x0.size() || stoich.rows() != x0.size())
        throw ModelError("compatibility_class_point: dimension mismatch");
    if ((xstar.array() <= 0).any() || (x0.array() <= 0).any())
        throw NonPositiveStateError("compatibility_class_point: states must be positive");
    const auto n = x0.size();
    // minimize sum_i xstar_i e^{s_i} - <x0, s> over s in S^perp
    const ExpPotential phi(Matrix::Identity(n, n), xstar, x0);
    const Matrix perp = numlin::kernel_basis(stoich.transpose(), tol);
    const auto min = minimize_potential(phi, perp, Vector::Zero(n), tol);
    return (xstar.array() * min.mu.array().exp()).matrix();
}

double monomial(const Vector& x, const Vector& y)
{
    return std::exp(y.dot(x.array().log().matrix()));
}

DBRealization db_realize_single_target(const MassActionSystem& sys, const Tolerances& tol)
{
    const auto& net = sys.network();
    const auto target = single_target_of(net);
    if (!target) throw NotSingleTargetError("db_realize_single_target: network is not single-target");

    const Matrix gamma = stoichiometric_matrix(net);
    const Vector kappa = Eigen::Map<const Vector>(sys.rates().data(), static_cast<Eigen::Index>(sys.rates().size()));
    const auto birch = birch_point(gamma, kappa, {}, tol);

    std::vector<Edge> edges = net.edges();
    std::vector<double> rates = sys.rates();
    for (std::size_t j = 0; j < net.num_edges(); ++j) {
        edges.push_back({*target, net.edges()[j].source});
        rates.push_back(birch.kappa_prime[static_cast<Eigen::Index>(j)]);
    }
    MassActionSystem realized(EmbeddedNetwork(net.dimension(), net.vertices(), std::move(edges)), std::move(rates));

    const auto before = net_vectors(sys);
    const auto after = net_vectors(realized);
    double eq = 0.0;
    for (std::size_t v = 0; v < before.size(); ++v) eq = std::max(eq, (before[v] - after[v]).cwiseAbs().maxCoeff());

    const auto db = check_detailed_balance(realized, birch.steady_state, tol);
    return DBRealization{std::move(realized), *target, birch.steady_state, birch.kappa_prime, eq, db.max_residual};
}

DetailedBalanceReport check_detailed_balance(const MassActionSystem& sys, const Vector& x, const Tolerances& tol)
{
    if ((x.array() <= 0).any()) throw NonPositiveStateError("check_detailed_balance: state must be positive");
    const auto& net = sys.network();
    DetailedBalanceReport rep;
    for (std::size_t i = 0; i < net.num_edges(); ++i) {
        const auto& e = net.edges()[i];
        const auto rev = net.find_edge(e.target, e.source);
        if (!rev) throw NotReversibleError("edge " + std::to_string(i) + " has no reverse");
        if (!(e.source < e.target)) continue;
        const double fwd = sys.rate(i) * monomial(x, net.vertex(e.source).coords());
        const double bwd = sys.rate(*rev) * monomial(x, net.vertex(e.target).coords());
        const double res = std::abs(fwd - bwd) / std::max(fwd, bwd);
        rep.pairs.push_back({i, *rev, res});
        rep.max_residual = std::max(rep.max_residual, res);
    }
    rep.balanced = rep.max_residual < tol.balance;
    return rep;
}

ComplexBalanceReport check_complex_balance(const MassActionSystem& sys, const Vector& x, const Tolerances& tol)
{
    if ((x.array() <= 0).any()) throw NonPositiveStateError("check_complex_balance: state must be positive");
    const auto& net = sys.network();
    std::vector<double> in(net.num_vertices(), 0.0), out(net.num_vertices(), 0.0);
    for (std::size_t i = 0; i < net.num_edges(); ++i) {
        const auto& e = net.edges()[i];
        const double flux = sys.rate(i) * monomial(x, net.vertex(e.source).coords());
        out[e.source.value] += flux;
        in[e.target.value] += flux;
    }
    ComplexBalanceReport rep;
    for (auto v : net.active_vertices()) {
        const double a = in[v.value];
        const double b = out[v.value];
        const double res = std::abs(a - b) / std::max(a, b);
        rep.vertices.push_back({v, a, b, res});
        rep.max_residual = std::max(rep.max_residual, res);
    }
    rep.balanced = rep.max_residual < tol.balance;
    return rep;
}

WegscheiderResult wegscheider_check(const MassActionSystem& sys, const Tolerances& tol)
{
    const auto& net = sys.network();
    WegscheiderResult r;
    std::vector<double> log_ratio;
    for (std::size_t i = 0; i < net.num_edges(); ++i) {
        const auto& e = net.edges()[i];
        const auto rev = net.find_edge(e.target, e.source);
        if (!rev) throw NotReversibleError("edge " + std::to_string(i) + " has no reverse");
        if (!(e.source < e.target)) continue;
        r.forward_edges.push_back(i);
        log_ratio.push_back(std::log(sys.rate(i)) - std::log(sys.rate(*rev)));
    }
    Matrix gp(static_cast<Eigen::Index>(net.dimension()), static_cast<Eigen::Index>(r.forward_edges.size()));
    for (std::size_t k = 0; k < r.forward_edges.size(); ++k)
        gp.col(static_cast<Eigen::Index>(k)) = net.reaction_vector(r.forward_edges[k]);
    r.kernel = numlin::kernel_basis(gp, tol);
    const Vector lr = Eigen::Map<const Vector>(log_ratio.data(), static_cast<Eigen::Index>(log_ratio.size()));
    for (Eigen::Index c = 0; c < r.kernel.cols(); ++c) {
        const double v = std::abs(r.kernel.col(c).dot(lr));
        if (v >= tol.wegscheider) {
            r.passed = false;
            r.violating = r.kernel.col(c);
            r.violation = v;
            break;
        }
    }
    return r;
}

CircuitResult circuit_check(const MassActionSystem& sys, const std::vector<VertexId>& cycle, const Tolerances& tol)
{
    if (cycle.size() < 2) throw MissingEdgeError("a cycle needs at least two vertices");
    const auto& net = sys.network();
    CircuitResult r;
    for (std::size_t i = 0; i < cycle.size(); ++i) {
        const VertexId a = cycle[i];
        const VertexId b = cycle[(i + 1) % cycle.size()];
        const auto fwd = net.find_edge(a, b);
        const auto bwd = net.find_edge(b, a);
        if (!fwd || !bwd)
            throw MissingEdgeError("cycle needs both edges between vertices " + std::to_string(a.value) + " and " +
                                   std::to_string(b.value));
        r.log_forward += std::log(sys.rate(*fwd));
        r.log_reverse += std::log(sys.rate(*bwd));
    }
    r.passed = std::abs(r.log_forward - r.log_reverse) < tol.balance;
    return r;
}

}  // namespace crn
