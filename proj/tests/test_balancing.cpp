#include <doctest.h>

#include "crn/balancing.hpp"
#include "crn/dynamics.hpp"
#include "crn/error.hpp"
#include "crn/geometry.hpp"
#include "crn/numlin.hpp"
#include "support.hpp"

using namespace crn;
using namespace crn::testing;

namespace {

Matrix row(std::initializer_list<double> v)
{
    Matrix m(1, static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) m(0, i++) = x;
    return m;
}

Vector vec(std::initializer_list<double> v)
{
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

Vector gamma_kappa(const MassActionSystem& sys)
{
    return Eigen::Map<const Vector>(sys.rates().data(), static_cast<Eigen::Index>(sys.rates().size()));
}

VertexId pair_id(const EmbeddedNetwork& net, int i, int j, int n)
{
    Vector c = Vector::Zero(n);
    c[i - 1] = 1;
    c[j - 1] = 1;
    return *net.find_vertex(c);
}

double rate_of(const MassActionSystem& sys, VertexId a, VertexId b)
{
    return sys.rate(*sys.network().find_edge(a, b));
}

}  // namespace

TEST_CASE("one-dimensional Birch points")
{
    const auto sym = birch_point(row({1, -1}), vec({1, 1}));
    CHECK(std::abs(sym.mu[0]) < 1e-12);
    CHECK(sym.kappa_prime[0] == doctest::Approx(1.0));
    CHECK(sym.kappa_prime[1] == doctest::Approx(1.0));
    CHECK(sym.steady_state[0] == doctest::Approx(1.0));

    // 4 e^mu = e^-mu
    const auto b = birch_point(row({1, -1}), vec({4, 1}));
    CHECK(b.mu[0] == doctest::Approx(-0.5 * std::log(4.0)).epsilon(1e-12));
    CHECK(b.kappa_prime[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(b.kappa_prime[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(b.steady_state[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(b.residual < 1e-10 * 4);
}

TEST_CASE("Birch point requires an interior target")
{
    CHECK_THROWS_AS(birch_point(row({1, 2}), vec({1, 1})), NotInteriorError);
    const auto out = load_bundled("outside.crn");
    CHECK_THROWS_AS(db_realize_single_target(out.system()), NotInteriorError);
    CHECK_THROWS_AS(db_realize_single_target(load_bundled("triangle.crn").system()), NotSingleTargetError);
}

TEST_CASE("two-source realization on the line")
{
    const auto doc = parse_network("dim 1\n[0] -> [1] : 4\n[2] -> [1] : 1\n");
    const auto r = db_realize_single_target(doc.system());
    CHECK(r.steady_state[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.reverse_rates[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.reverse_rates[1] == doctest::Approx(2.0).epsilon(1e-12));
    // original rates kept
    CHECK(r.system.rate(0) == 4.0);
    CHECK(r.system.rate(1) == 1.0);
    CHECK(r.system.network().num_edges() == 4);
    const auto s = classify_structure(r.system.network());
    CHECK(s.is_reversible);
    CHECK(s.num_components == 1);
}

TEST_CASE("Hessian matches finite differences of the gradient")
{
    std::mt19937 rng(51);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::Index n = 2 + trial % 3, m = 4 + trial % 3;
        Matrix G(n, m);
        for (Eigen::Index i = 0; i < G.size(); ++i) G.data()[i] = g(rng);
        const ExpPotential phi(G, random_positive(rng, static_cast<std::size_t>(m)), Vector::Zero(n));
        Vector mu(n);
        for (Eigen::Index i = 0; i < n; ++i) mu[i] = 0.3 * g(rng);
        const Matrix h = phi.hessian(mu);
        const double eps = 1e-6;
        Matrix fd(n, n);
        for (Eigen::Index k = 0; k < n; ++k) {
            Vector e = Vector::Zero(n);
            e[k] = eps;
            fd.col(k) = (phi.gradient(mu + e) - phi.gradient(mu - e)) / (2 * eps);
        }
        CHECK((h - fd).norm() / h.norm() < 1e-5);
        // gradient against finite differences of the value
        for (Eigen::Index k = 0; k < n; ++k) {
            Vector e = Vector::Zero(n);
            e[k] = eps;
            const double d = (phi.value(mu + e) - phi.value(mu - e)) / (2 * eps);
            CHECK(d == doctest::Approx(phi.gradient(mu)[k]).epsilon(1e-6));
        }
    }
}

TEST_CASE("Birch uniqueness and scale equivariance")
{
    std::mt19937 rng(53);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        const auto sys = random_interior_single_target(rng, 1 + static_cast<std::size_t>(trial % 4));
        const Matrix gamma = stoichiometric_matrix(sys);
        const Vector kappa = gamma_kappa(sys);
        const auto base = birch_point(gamma, kappa);
        CHECK((gamma * base.kappa_prime).cwiseAbs().maxCoeff() < 1e-10 * kappa.norm());
        for (int restart = 0; restart < 10; ++restart) {
            Vector mu0(gamma.rows());
            for (Eigen::Index i = 0; i < mu0.size(); ++i) mu0[i] = 2 * g(rng);
            const auto b = birch_point(gamma, kappa, BirchOptions{mu0});
            CHECK((b.kappa_prime - base.kappa_prime).cwiseAbs().maxCoeff() <= 1e-8 * base.kappa_prime.cwiseAbs().maxCoeff());
        }
        for (double c : {0.1, 10.0}) {
            const auto b = birch_point(gamma, c * kappa);
            CHECK((b.kappa_prime - c * base.kappa_prime).cwiseAbs().maxCoeff() <= 1e-9 * c * base.kappa_prime.maxCoeff());
            // mu is unchanged up to the kernel of gamma^T, which does not affect kappa'
            CHECK(((gamma.transpose() * (b.mu - base.mu))).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
}

TEST_CASE("compatibility class point lies in x0 + S and x* exp(S^perp)")
{
    std::mt19937 rng(57);
    for (int trial = 0; trial < 30; ++trial) {
        const auto sys = random_interior_single_target(rng, 2 + static_cast<std::size_t>(trial % 3));
        const Matrix gamma = stoichiometric_matrix(sys);
        const auto b = birch_point(gamma, gamma_kappa(sys));
        const Vector x0 = random_positive(rng, sys.dimension());
        const Vector x = compatibility_class_point(b.steady_state, x0, gamma);
        const Matrix perp = numlin::kernel_basis(gamma.transpose());
        const Matrix span = numlin::range_basis(gamma);
        if (perp.cols() > 0) CHECK((perp.transpose() * (x - x0)).cwiseAbs().maxCoeff() < 1e-9 * x0.norm());
        const Vector logratio = (x.array() / b.steady_state.array()).log().matrix();
        if (span.cols() > 0) CHECK((span.transpose() * logratio).cwiseAbs().maxCoeff() < 1e-9);
        // still a steady state
        CHECK(rhs(sys, x).norm() < 1e-9 * gross_flux(sys, x));
    }
}

TEST_CASE("detailed balance examples")
{
    const auto ab = parse_network("species A B\nA <-> B : 2, 1\n");
    const auto yes = check_detailed_balance(ab.system(), vec({1, 2}));
    CHECK(yes.balanced);
    CHECK(yes.max_residual < 1e-15);
    const auto no = check_detailed_balance(ab.system(), vec({1, 1}));
    CHECK_FALSE(no.balanced);
    CHECK(no.max_residual == doctest::Approx(0.5));

    CHECK_THROWS_AS(check_detailed_balance(load_bundled("fig2c.crn").system(), vec({1, 1})), NotReversibleError);
    CHECK_THROWS_AS(check_detailed_balance(ab.system(), vec({1, 0})), NonPositiveStateError);
}

TEST_CASE("complex balance examples")
{
    const auto cyc = parse_network("species A B C\nA -> B : 1\nB -> C : 1\nC -> A : 1\n");
    CHECK(check_complex_balance(cyc.system(), vec({1, 1, 1})).balanced);
    CHECK_FALSE(check_complex_balance(cyc.system(), vec({1, 2, 1})).balanced);
}

TEST_CASE("detailed balance implies complex balance on random states")
{
    std::mt19937 rng(59);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 4);
        const Vector xstar = random_positive(rng, n);
        const auto sys = random_detailed_balanced(rng, n, xstar);
        const auto db = check_detailed_balance(sys, xstar);
        REQUIRE(db.balanced);
        CHECK(check_complex_balance(sys, xstar).balanced);
        // detailed-balanced rates satisfy the Wegscheider conditions
        CHECK(wegscheider_check(sys).passed);
    }
}

TEST_CASE("Wegscheider check")
{
    const auto ab = parse_network("species A B\nA <-> B : 2, 7\n");
    const auto w = wegscheider_check(ab.system());
    CHECK(w.passed);
    CHECK(w.kernel.cols() == 0);

    const auto dense = load_bundled("dense4.crn");
    const auto generic = wegscheider_check(dense.system());
    CHECK_FALSE(generic.passed);
    REQUIRE(generic.violating);
    CHECK(generic.violation > 1e-3);
    // 15 reversible pairs, rank 3
    CHECK(generic.forward_edges.size() == 15);
    CHECK(generic.kernel.cols() == 12);

    const auto ones = dense.with_rates(std::vector<double>(dense.network().num_edges(), 1.0));
    CHECK(wegscheider_check(ones).passed);

    CHECK_THROWS_AS(wegscheider_check(load_bundled("fig2c.crn").system()), NotReversibleError);
}

TEST_CASE("circuit check on the dense-4 cycle")
{
    const auto doc = load_bundled("dense4.crn");
    const auto& net = doc.network();
    const auto& sys = doc.system();
    const auto y12 = pair_id(net, 1, 2, 4), y24 = pair_id(net, 2, 4, 4), y34 = pair_id(net, 3, 4, 4);
    const auto r = circuit_check(sys, {y12, y24, y34});
    CHECK_FALSE(r.passed);
    // products read off the edges
    const double fwd = rate_of(sys, y12, y24) * rate_of(sys, y24, y34) * rate_of(sys, y34, y12);
    const double bwd = rate_of(sys, y24, y12) * rate_of(sys, y34, y24) * rate_of(sys, y12, y34);
    CHECK(r.log_forward == doctest::Approx(std::log(fwd)));
    CHECK(r.log_reverse == doctest::Approx(std::log(bwd)));
    // bundled rates: k12b k24b k34a = 2*2*2 against k24b k34b k12a = 2*5*1
    CHECK(fwd == doctest::Approx(8.0));
    CHECK(bwd == doctest::Approx(1.0 * 5 * 2));

    const auto ones = doc.with_rates(std::vector<double>(net.num_edges(), 1.0));
    CHECK(circuit_check(ones, {y12, y24, y34}).passed);
    CHECK(circuit_check(sys, {y12, y24}).passed);

    const auto fig = load_bundled("fig2c.crn");
    CHECK_THROWS_AS(circuit_check(fig.system(), {VertexId{0}, VertexId{3}}), MissingEdgeError);
}

TEST_CASE("triangle single-target realization becomes detailed balanced")
{
    const auto doc = load_bundled("fig2c.crn");
    const auto r = db_realize_single_target(doc.system());
    CHECK(r.equivalence_residual < 1e-10);
    // independent check of the balance at x*
    const auto& net = r.system.network();
    for (std::size_t i = 0; i < doc.network().num_edges(); ++i) {
        const auto rev = net.find_edge(net.edges()[i].target, net.edges()[i].source);
        REQUIRE(rev);
        const double f = r.system.rate(i) * monomial(r.steady_state, net.vertex(net.edges()[i].source).coords());
        const double b = r.system.rate(*rev) * monomial(r.steady_state, net.vertex(net.edges()[i].target).coords());
        CHECK(std::abs(f - b) / std::max(f, b) < 1e-9);
    }
    CHECK(wegscheider_check(r.system).passed);
}

TEST_CASE("decay system: Birch state matches the simulated fixed point")
{
    const auto doc = load_bundled("decay.crn");
    const auto r = db_realize_single_target(doc.system());
    CHECK(r.balance_residual < 1e-9);
    // every reaction vector spans R^3 here, so the steady state is unique
    const auto tr = integrate(doc.system(), Vector::Ones(3), 1e6);
    REQUIRE(tr.verdict == TrajectoryVerdict::ConvergedInterior);
    CHECK((tr.limit->array() / r.steady_state.array() - 1.0).abs().maxCoeff() < 1e-6);
}

TEST_CASE("decay system with the third source's z-exponent at +2 has no interior target")
{
    // z balances only through the one negative z-exponent, which forces a negative y-sum
    const auto doc = parse_network("dim 3\n[-1,-2,0] -> [0,0,0] : 1\n[0,-3,-1] -> [0,0,0] : 2\n"
                                   "[-2,3,2] -> [0,0,0] : 1\n[1,2,1] -> [0,0,0] : 3\n[4,-2,3/2] -> [0,0,0] : 1/2\n");
    const auto v = classify_single_target(doc.system());
    CHECK(v.verdict == StabilityCase::NoPositiveSteadyState);
    CHECK(v.membership.status == MembershipStatus::Outside);
    CHECK_THROWS_AS(db_realize_single_target(doc.system()), NotInteriorError);
}

TEST_CASE("realizations agree with the input as vector fields")
{
    std::mt19937 rng(61);
    for (int trial = 0; trial < 20; ++trial) {
        const auto sys = random_interior_single_target(rng, 1 + static_cast<std::size_t>(trial % 4));
        const auto r = db_realize_single_target(sys);
        CHECK(r.equivalence_residual < 1e-10 * std::max(1.0, gamma_kappa(sys).maxCoeff()));
        CHECK(r.balance_residual < 1e-9);
        for (int k = 0; k < 5; ++k) {
            const Vector x = random_positive(rng, sys.dimension());
            const Vector a = rhs(sys, x);
            const Vector b = rhs(r.system, x);
            CHECK((a - b).norm() <= 1e-8 * std::max(gross_flux(sys, x), 1e-300));
        }
    }
}

TEST_CASE("monomial in the log domain")
{
    CHECK(monomial(vec({2, 3}), vec({2, 1})) == doctest::Approx(12.0));
    CHECK(monomial(vec({4}), vec({-0.5})) == doctest::Approx(0.5));
    // huge exponents stay finite where the product would not
    CHECK(std::isfinite(monomial(vec({1e10}), vec({30}))));
}
