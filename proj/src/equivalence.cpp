#include "crn/equivalence.hpp"

#include "crn/balancing.hpp"
#include "crn/dynamics.hpp"
#include "crn/error.hpp"
#include "crn/numlin.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <numeric>
#include <random>
#include <set>

namespace crn {

namespace {

std::vector<double> key_of(const Vector& v)
{
    return {v.data(), v.data() + v.size()};
}

// Continued-fraction rounding to a ratio with a small denominator, when one lies within round-off.
std::optional<Ratio> snap_ratio(double v)
{
    constexpr std::int64_t kMaxDen = 10000;
    if (!std::isfinite(v) || std::abs(v) > 1e9) return std::nullopt;
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double r = v;
    for (int it = 0; it < 40; ++it) {
        const double a = std::floor(r);
        const auto ai = static_cast<std::int64_t>(a);
        const std::int64_t p2 = ai * p1 + p0, q2 = ai * q1 + q0;
        if (q2 > kMaxDen) break;
        if (std::abs(static_cast<double>(p2) / static_cast<double>(q2) - v) <= 1e-12 * std::max(1.0, std::abs(v)))
            return Ratio{p2, q2};
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        if (r - a < 1e-15) break;
        r = 1.0 / (r - a);
    }
    return std::nullopt;
}

std::optional<std::vector<Ratio>> snap_rational(const Vector& v)
{
    std::vector<Ratio> out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const auto r = snap_ratio(v[i]);
        if (!r) return std::nullopt;
        out.push_back(*r);
    }
    return out;
}

std::string format_vector(const Vector& v)
{
    std::string s = "(";
    char buf[32];
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.10g", v[i]);
        if (i) s += ", ";
        s += buf;
    }
    return s + ")";
}

}  // namespace

NetVectorField net_vector_field(const MassActionSystem& sys)
{
    const auto& net = sys.network();
    const auto nv = net_vectors(sys);
    NetVectorField field;
    for (auto id : net.sources()) field[key_of(net.vertex(id).coords())] = nv[id.value];
    return field;
}

EquivalenceResult dynamically_equivalent(const MassActionSystem& a, const MassActionSystem& b, const Tolerances& tol)
{
    if (a.dimension() != b.dimension()) throw ModelError("dynamically_equivalent: dimension mismatch");
    const auto fa = net_vector_field(a);
    const auto fb = net_vector_field(b);
    std::set<std::vector<double>> vertices;
    for (const auto& v : a.network().vertices()) vertices.insert(key_of(v.coords()));
    for (const auto& v : b.network().vertices()) vertices.insert(key_of(v.coords()));

    const Vector zero = Vector::Zero(static_cast<Eigen::Index>(a.dimension()));
    EquivalenceResult r;
    for (const auto& key : vertices) {
        const auto ia = fa.find(key);
        const auto ib = fb.find(key);
        const Vector& va = ia == fa.end() ? zero : ia->second;
        const Vector& vb = ib == fb.end() ? zero : ib->second;
        const double res = (va - vb).cwiseAbs().maxCoeff();
        r.residuals.push_back({key, res});
        r.max_residual = std::max(r.max_residual, res);
    }
    r.equivalent = r.max_residual < tol.equivalence;
    return r;
}

std::optional<SingleTargetRealization> single_target_realize(const MassActionSystem& sys, const Tolerances& tol)
{
    const auto& net = sys.network();
    const auto n = static_cast<Eigen::Index>(net.dimension());
    const auto nv = net_vectors(sys);

    // per-source gross outflow, to decide when a net vector is numerically zero
    std::vector<double> gross(net.num_vertices(), 0.0);
    for (std::size_t i = 0; i < net.num_edges(); ++i)
        gross[net.edges()[i].source.value] += sys.rate(i) * net.reaction_vector(i).cwiseAbs().maxCoeff();

    std::vector<VertexId> active;
    for (auto id : net.sources()) {
        if (nv[id.value].cwiseAbs().maxCoeff() > 1e-14 * gross[id.value]) active.push_back(id);
    }
    if (active.empty()) return std::nullopt;

    // unknowns z = (y*, t_1..t_k); rows: y* - t_i v_i = y_i
    const auto k = static_cast<Eigen::Index>(active.size());
    Matrix A = Matrix::Zero(n * k, n + k);
    Vector b(n * k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const auto id = active[static_cast<std::size_t>(i)];
        A.block(i * n, 0, n, n).setIdentity();
        A.block(i * n, n + i, n, 1) = -nv[id.value];
        b.segment(i * n, n) = net.vertex(id).coords();
    }
    Vector z = numlin::least_squares(A, b);
    const double rscale = std::max(1.0, b.cwiseAbs().maxCoeff());
    const double residual = (A * z - b).cwiseAbs().maxCoeff() / rscale;
    if (!(residual < tol.ray_residual)) return std::nullopt;

    const Matrix null = numlin::kernel_basis(A, tol);
    if (null.cols() > 0) {
        // the rays meet in more than one point: take the one farthest from every source,
        // s_i = t_i |v_i| being the distance travelled along ray i
        const auto d = null.cols();
        Vector len(k);
        for (Eigen::Index i = 0; i < k; ++i) len[i] = nv[active[static_cast<std::size_t>(i)].value].norm();
        double diameter = 0.0;
        for (Eigen::Index i = 0; i < k; ++i) {
            for (Eigen::Index j = 0; j < k; ++j) diameter = std::max(diameter, (b.segment(i * n, n) - b.segment(j * n, n)).norm());
        }
        numlin::LPProblem p;
        p.A = Matrix::Zero(k, d + k);
        p.A.leftCols(d) = -(len.asDiagonal() * null.bottomRows(k));
        p.A.rightCols(k).setIdentity();
        p.b = len.cwiseProduct(z.tail(k));
        p.nonnegative.assign(static_cast<std::size_t>(d + k), true);
        for (Eigen::Index j = 0; j < d; ++j) p.nonnegative[static_cast<std::size_t>(j)] = false;
        std::vector<std::size_t> strict(static_cast<std::size_t>(k));
        std::iota(strict.begin(), strict.end(), static_cast<std::size_t>(d));
        const auto pt = numlin::strict_interior_point(p, strict, std::max(diameter, 1.0), tol);
        if (!pt) return std::nullopt;
        z += null * pt->x.head(d);
    }
    if (z.tail(k).minCoeff() <= tol.ray_min_t) return std::nullopt;

    Vector target = z.head(n);
    std::optional<std::vector<Ratio>> exact;
    if (net.all_exact()) exact = snap_rational(target);
    if (exact) {
        // recompute the rates against the exact target: v_i = lambda_i (y* - y_i)
        target = Vertex(*exact).coords();
        for (Eigen::Index i = 0; i < k; ++i) {
            const Vector dir = target - b.segment(i * n, n);
            z[n + i] = dir.squaredNorm() / dir.dot(nv[active[static_cast<std::size_t>(i)].value]);
        }
    }
    std::vector<Vertex> vertices;
    std::vector<Edge> edges;
    std::vector<double> rates;
    for (Eigen::Index i = 0; i < k; ++i) {
        vertices.push_back(net.vertex(active[static_cast<std::size_t>(i)]));
        edges.push_back({VertexId{static_cast<std::uint32_t>(i)}, VertexId{static_cast<std::uint32_t>(k)}});
        rates.push_back(1.0 / z[n + i]);
    }
    if (exact)
        vertices.emplace_back(*exact);
    else
        vertices.emplace_back(target);
    SingleTargetRealization out{
        MassActionSystem(EmbeddedNetwork(net.dimension(), std::move(vertices), std::move(edges)), rates), target,
        active, rates, residual};
    return out;
}

std::optional<Vector> find_positive_steady_state(const MassActionSystem& sys, const Vector& x0, const Tolerances& tol)
{
    if ((x0.array() <= 0).any()) throw NonPositiveStateError("find_positive_steady_state: x0 must be positive");
    const Matrix basis = numlin::range_basis(stoichiometric_matrix(sys), tol);
    if (basis.cols() == 0) return x0;
    if (auto x = polish_steady_state(sys, x0, basis, tol)) return x;

    IntegrateOptions opts;
    opts.record_every = 1000000;
    const auto traj = integrate(sys, x0, 1e8, opts, tol);
    if (traj.verdict == TrajectoryVerdict::ApproachedBoundary || traj.verdict == TrajectoryVerdict::Diverged)
        return std::nullopt;
    const Vector last = traj.limit ? *traj.limit : traj.states.back();
    auto x = polish_steady_state(sys, last, basis, tol);
    if (!x) return std::nullopt;
    // Newton runs in x0 + S; re-anchor against drift from the integrator
    const Matrix perp = numlin::kernel_basis(stoichiometric_matrix(sys).transpose(), tol);
    if (perp.cols() > 0 && (perp.transpose() * (*x - x0)).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, x0.norm()))
        return std::nullopt;
    return x;
}

std::vector<Vector> find_steady_states(const MassActionSystem& sys, const Vector& x0, std::size_t random_seeds,
                                       unsigned seed, const Tolerances& tol)
{
    std::vector<Vector> seeds{x0, 0.1 * x0, 10.0 * x0};
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> logu(std::log(1e-2), std::log(1e2));
    for (std::size_t s = 0; s < random_seeds; ++s) {
        Vector v(x0.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = x0[i] * std::exp(logu(rng));
        seeds.push_back(v);
    }
    std::vector<Vector> found;
    for (const auto& s : seeds) {
        std::optional<Vector> x;
        try {
            x = find_positive_steady_state(sys, s, tol);
        } catch (const NoConvergenceError&) {
        }
        if (!x) continue;
        const bool dup = std::any_of(found.begin(), found.end(), [&](const Vector& y) {
            return (y - *x).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, y.cwiseAbs().maxCoeff());
        });
        if (!dup) found.push_back(*x);
    }
    return found;
}

std::optional<double> CBFeasibility::flux(std::size_t from, std::size_t to) const
{
    for (const auto& e : flux_witness) {
        if (e.from == from && e.to == to) return e.flux;
    }
    return std::nullopt;
}

CBFeasibility cb_realize(const MassActionSystem& sys, const Vector& x, const Tolerances& tol)
{
    if ((x.array() <= 0).any()) throw NonPositiveStateError("cb_realize: state must be positive");
    const auto& net = sys.network();
    const auto n = static_cast<Eigen::Index>(net.dimension());
    const auto nv = net_vectors(sys);
    const auto ids = net.sources();
    const auto k = ids.size();

    CBFeasibility out;
    out.steady_state_used = x;
    out.state_is_steady = rhs(sys, x).norm() <= 1e-8 * gross_flux(sys, x);
    for (auto id : ids) out.sources.push_back(net.vertex(id).coords());

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            if (i != j) pairs.emplace_back(i, j);
        }
    }
    const auto nvar = static_cast<Eigen::Index>(pairs.size());
    const auto kk = static_cast<Eigen::Index>(k);
    numlin::LPProblem p;
    p.A = Matrix::Zero(n * kk + kk, nvar);
    p.b = Vector::Zero(n * kk + kk);
    std::vector<double> mono(k);
    for (std::size_t i = 0; i < k; ++i) {
        mono[i] = monomial(x, out.sources[i]);
        p.b.segment(static_cast<Eigen::Index>(i) * n, n) = mono[i] * nv[ids[i].value];
    }
    for (Eigen::Index v = 0; v < nvar; ++v) {
        const auto [i, j] = pairs[static_cast<std::size_t>(v)];
        p.A.block(static_cast<Eigen::Index>(i) * n, v, n, 1) = out.sources[j] - out.sources[i];
        p.A(n * kk + static_cast<Eigen::Index>(i), v) += 1.0;  // outflow of i
        p.A(n * kk + static_cast<Eigen::Index>(j), v) -= 1.0;  // inflow of j
    }
    const auto q = numlin::lp_feasible(p, tol);
    if (!q) return out;

    out.feasible = true;
    out.residual = numlin::constraint_violation(p, *q);
    const double qscale = std::max(1.0, q->cwiseAbs().maxCoeff());
    std::vector<Vertex> vertices;
    for (auto id : ids) vertices.push_back(net.vertex(id));
    std::vector<Edge> edges;
    std::vector<double> rates;
    for (Eigen::Index v = 0; v < nvar; ++v) {
        const auto [i, j] = pairs[static_cast<std::size_t>(v)];
        const double flux = (*q)[v];
        const double rate = flux / mono[i];
        out.flux_witness.push_back({i, j, flux, rate});
        if (flux > 1e-13 * qscale) {
            edges.push_back({VertexId{static_cast<std::uint32_t>(i)}, VertexId{static_cast<std::uint32_t>(j)}});
            rates.push_back(rate);
        }
    }
    if (!edges.empty())
        out.realized = MassActionSystem(EmbeddedNetwork(net.dimension(), std::move(vertices), std::move(edges)), rates);
    return out;
}

SweepRow evaluate_query(const MassActionSystem& sys, SweepQuery query, std::size_t random_seeds, unsigned seed,
                        const Tolerances& tol)
{
    SweepRow row{};
    if (query == SweepQuery::SingleTarget) {
        const auto r = single_target_realize(sys, tol);
        row.feasible = r.has_value();
        row.summary = r ? "target=" + format_vector(r->target) : "no single-target realization";
        return row;
    }
    const Vector ones = Vector::Ones(static_cast<Eigen::Index>(sys.dimension()));
    const auto states = find_steady_states(sys, ones, random_seeds, seed, tol);
    if (states.empty()) {
        row.summary = "no positive steady state found";
        return row;
    }
    for (const auto& x : states) {
        const auto cb = cb_realize(sys, x, tol);
        if (cb.feasible) {
            row.feasible = true;
            row.summary = "feasible at x=" + format_vector(x);
            return row;
        }
    }
    row.summary = "infeasible at " + std::to_string(states.size()) + " steady state(s)";
    return row;
}

SweepTable region_sweep(const SystemFamily& family, const std::vector<double>& grid, const SweepOptions& opts,
                        const Tolerances& tol)
{
    auto eval = [&](double param) {
        SweepRow row;
        try {
            row = evaluate_query(family(param), opts.query, opts.random_seeds, opts.seed, tol);
        } catch (const std::exception& e) {
            row.feasible = false;
            row.error = e.what();
        }
        row.parameter = param;
        return row;
    };

    SweepTable table;
    if (opts.parallel && grid.size() > 1) {
        std::vector<std::future<SweepRow>> futures;
        for (double g : grid) futures.push_back(std::async(std::launch::async, eval, g));
        for (auto& f : futures) table.rows.push_back(f.get());
    } else {
        for (double g : grid) table.rows.push_back(eval(g));
    }

    for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
        const auto& a = table.rows[i];
        const auto& b = table.rows[i + 1];
        if (a.error || b.error || a.feasible == b.feasible) continue;
        double lo = a.parameter;
        double hi = b.parameter;
        const bool lo_feasible = a.feasible;
        const bool geometric = lo > 0 && hi > 0;
        while (std::abs(hi - lo) > opts.relative_width * std::max(std::abs(lo), std::abs(hi))) {
            const double mid = geometric ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
            const auto r = eval(mid);
            if (r.error) break;
            (r.feasible == lo_feasible ? lo : hi) = mid;
        }
        table.boundaries.push_back({std::min(lo, hi), std::max(lo, hi), lo < hi ? !lo_feasible : lo_feasible});
    }
    return table;
}

std::vector<double> logspace(double lo, double hi, std::size_t n)
{
    if (n == 1) return {lo};
    std::vector<double> v(n);
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    return v;
}

std::vector<double> linspace(double lo, double hi, std::size_t n)
{
    if (n == 1) return {lo};
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

}  // namespace crn
