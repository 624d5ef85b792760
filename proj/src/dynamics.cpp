#include "crn/dynamics.hpp"

#include "crn/error.hpp"
#include "crn/numlin.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace crn {

std::string to_string(TrajectoryVerdict v)
{
    switch (v) {
    case TrajectoryVerdict::ConvergedInterior: return "CONVERGED_INTERIOR";
    case TrajectoryVerdict::ApproachedBoundary: return "APPROACHED_BOUNDARY";
    case TrajectoryVerdict::Diverged: return "DIVERGED";
    case TrajectoryVerdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

namespace {

void require_positive(const Vector& x, const char* what)
{
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0)) throw NonPositiveStateError(std::string(what) + ": state must be strictly positive");
    }
}

// Per-edge fluxes kappa_i x^{y_i} computed in the log domain.
Vector fluxes(const MassActionSystem& sys, const Eigen::ArrayXd& logx)
{
    const auto& net = sys.network();
    Vector f(static_cast<Eigen::Index>(net.num_edges()));
    for (std::size_t i = 0; i < net.num_edges(); ++i) {
        const auto& y = net.vertex(net.edges()[i].source).coords();
        f[static_cast<Eigen::Index>(i)] = sys.rate(i) * std::exp((y.array() * logx).sum());
    }
    return f;
}

}  // namespace

Vector rhs(const MassActionSystem& sys, const Vector& x)
{
    require_positive(x, "rhs");
    if (x.size() != static_cast<Eigen::Index>(sys.dimension())) throw ModelError("rhs: state dimension mismatch");
    const auto& net = sys.network();
    const Vector f = fluxes(sys, x.array().log());
    Vector out = Vector::Zero(x.size());
    for (std::size_t i = 0; i < net.num_edges(); ++i) out += f[static_cast<Eigen::Index>(i)] * net.reaction_vector(i);
    return out;
}

Matrix rhs_jacobian(const MassActionSystem& sys, const Vector& x)
{
    require_positive(x, "rhs_jacobian");
    const auto& net = sys.network();
    const Vector f = fluxes(sys, x.array().log());
    Matrix jac = Matrix::Zero(x.size(), x.size());
    for (std::size_t i = 0; i < net.num_edges(); ++i) {
        const auto& y = net.vertex(net.edges()[i].source).coords();
        // d/dx_k (kappa x^y) = kappa x^y y_k / x_k
        const Vector grad = (f[static_cast<Eigen::Index>(i)] * y.array() / x.array()).matrix();
        jac += net.reaction_vector(i) * grad.transpose();
    }
    return jac;
}

double gross_flux(const MassActionSystem& sys, const Vector& x)
{
    require_positive(x, "gross_flux");
    const auto& net = sys.network();
    const Vector f = fluxes(sys, x.array().log());
    double s = 0.0;
    for (std::size_t i = 0; i < net.num_edges(); ++i) s += f[static_cast<Eigen::Index>(i)] * net.reaction_vector(i).norm();
    return s;
}

std::optional<Vector> polish_steady_state(const MassActionSystem& sys, const Vector& start, const Matrix& basis,
                                          const Tolerances& tol)
{
    Vector x = start;
    auto converged = [&](const Vector& f, const Vector& xx) {
        return f.norm() <= tol.steady_state * gross_flux(sys, xx);
    };
    Vector f = rhs(sys, x);
    for (int it = 0; it < 200; ++it) {
        // sliding towards a face makes every flux vanish together; that is not a steady state
        if (x.minCoeff() < tol.boundary) return std::nullopt;
        if (converged(f, x)) return x;
        const Vector F = basis.transpose() * f;
        const Matrix J = basis.transpose() * rhs_jacobian(sys, x) * basis;
        const Vector dc = J.fullPivLu().solve(-F);
        if (!dc.allFinite()) return std::nullopt;
        const Vector dx = basis * dc;
        double t = 1.0;
        // keep the iterate strictly positive
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (dx[i] < 0) t = std::min(t, 0.9 * x[i] / -dx[i]);
        }
        const double merit = F.squaredNorm();
        bool accepted = false;
        while (t > 1e-12) {
            const Vector xt = x + t * dx;
            const Vector ft = rhs(sys, xt);
            const double mt = (basis.transpose() * ft).squaredNorm();
            if (std::isfinite(mt) && mt < (1.0 - 1e-4 * t) * merit) {
                x = xt;
                f = ft;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
    }
    return x.minCoeff() >= tol.boundary && converged(f, x) ? std::optional<Vector>(x) : std::nullopt;
}

Trajectory integrate(const MassActionSystem& sys, const Vector& x0, double horizon, const IntegrateOptions& opts,
                     const Tolerances& tol)
{
    require_positive(x0, "integrate");
    // Dormand-Prince 5(4) tableau
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    const Matrix perp = numlin::kernel_basis(stoichiometric_matrix(sys).transpose(), tol);
    const Matrix basis = numlin::range_basis(stoichiometric_matrix(sys), tol);
    std::size_t next_polish = 0;

    Trajectory tr;
    double t = 0.0;
    Vector x = x0;
    tr.times.push_back(t);
    tr.states.push_back(x);

    auto finish = [&](TrajectoryVerdict v) {
        tr.verdict = v;
        if (tr.states.back() != x || tr.times.back() != t) {
            tr.times.push_back(t);
            tr.states.push_back(x);
        }
        if (v == TrajectoryVerdict::ConvergedInterior) tr.limit = x;
        return tr;
    };
    auto check_state = [&]() -> std::optional<TrajectoryVerdict> {
        Eigen::Index imin = 0;
        if (x.minCoeff(&imin) < tol.boundary) {
            tr.exit_face = static_cast<std::size_t>(imin);
            return TrajectoryVerdict::ApproachedBoundary;
        }
        if (x.norm() > tol.divergence) return TrajectoryVerdict::Diverged;
        return std::nullopt;
    };

    Vector k1 = rhs(sys, x);
    if (k1.norm() < tol.converged_rhs * gross_flux(sys, x)) return finish(TrajectoryVerdict::ConvergedInterior);

    double h = std::min(opts.initial_step, horizon);
    std::size_t accepted = 0;
    while (t < horizon) {
        if (tr.steps + tr.rejected >= opts.max_steps) return finish(TrajectoryVerdict::Inconclusive);
        h = std::min(h, horizon - t);
        if (h < 1e-14 * std::max(1.0, t)) {
            // finite-time blow-up: the norm would leave any bound before the next representable step
            if (x.norm() < tol.divergence && x.norm() < 1e-8 * std::max(1.0, t) * k1.norm())
                return finish(TrajectoryVerdict::Diverged);
            return finish(TrajectoryVerdict::Inconclusive);
        }

        // stages may leave the orthant for an oversized step; shrink and retry
        Vector k2, k3, k4, k5, k6, k7, x5;
        bool ok = true;
        try {
            k2 = rhs(sys, x + h * (a21 * k1));
            k3 = rhs(sys, x + h * (a31 * k1 + a32 * k2));
            k4 = rhs(sys, x + h * (a41 * k1 + a42 * k2 + a43 * k3));
            k5 = rhs(sys, x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            k6 = rhs(sys, x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            x5 = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            k7 = rhs(sys, x5);
        } catch (const NonPositiveStateError&) {
            ok = false;
        }
        if (!ok || !x5.allFinite()) {
            ++tr.rejected;
            h *= 0.25;
            continue;
        }
        const Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double enorm = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double sc = tol.rk_atol + tol.rk_rtol * std::max(std::abs(x[i]), std::abs(x5[i]));
            enorm = std::max(enorm, std::abs(err[i]) / sc);
        }
        if (enorm > 1.0) {
            ++tr.rejected;
            h *= std::max(0.2, 0.9 * std::pow(enorm, -0.2));
            continue;
        }

        t += h;
        x = x5;
        k1 = k7;
        ++tr.steps;
        if (++accepted % std::max<std::size_t>(opts.record_every, 1) == 0) {
            tr.times.push_back(t);
            tr.states.push_back(x);
        }
        if (perp.cols() > 0) {
            tr.conservation_drift = std::max(tr.conservation_drift, (perp.transpose() * (x - x0)).cwiseAbs().maxCoeff());
        }
        if (auto v = check_state()) return finish(*v);
        const double gross = gross_flux(sys, x);
        if (k1.norm() < tol.converged_rhs * gross) return finish(TrajectoryVerdict::ConvergedInterior);
        // explicit steps jitter around a stiff fixed point and crawl along slow directions; finish it with Newton
        // once the state is close enough that Newton stays in the same basin
        if (k1.norm() < 1e-4 * gross && basis.cols() > 0 && tr.steps >= next_polish) {
            next_polish = tr.steps + 100;
            if (auto p = polish_steady_state(sys, x, basis, tol)) {
                if (((*p - x).array().abs() <= 1e-2 * x.array()).all()) {
                    finish(TrajectoryVerdict::ConvergedInterior);
                    tr.limit = *p;
                    return tr;
                }
            }
        }

        const double factor = enorm == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(enorm, -0.2)));
        h *= factor;
    }
    return finish(TrajectoryVerdict::Inconclusive);
}

double lyapunov_entropy(const Vector& x, const Vector& xstar)
{
    require_positive(x, "lyapunov_entropy");
    require_positive(xstar, "lyapunov_entropy");
    if (x.size() != xstar.size()) throw ModelError("lyapunov_entropy: dimension mismatch");
    return (x.array() * (x.array().log() - xstar.array().log() - 1.0)).sum();
}

double lyapunov_linear(const Vector& x, const Vector& w)
{
    if (x.size() != w.size()) throw ModelError("lyapunov_linear: dimension mismatch");
    return x.dot(w);
}

std::string trajectory_csv(const Trajectory& traj)
{
    std::ostringstream os;
    os << "time";
    const auto n = traj.states.empty() ? 0 : traj.states.front().size();
    for (Eigen::Index i = 0; i < n; ++i) os << ",x" << (i + 1);
    os << "\n";
    char buf[32];
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", traj.times[k]);
        os << buf;
        for (Eigen::Index i = 0; i < n; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", traj.states[k][i]);
            os << "," << buf;
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace crn
