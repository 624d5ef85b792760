#pragma once

// Shared fixtures: bundled network files and random network generators.

#include "crn/model.hpp"
#include "crn/parser.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace crn::testing {

inline std::string network_path(const std::string& name)
{
    return std::string(CRN_NETWORKS_DIR) + "/" + name;
}

inline NetworkDocument load_bundled(const std::string& name)
{
    return load_network(network_path(name));
}

inline double log_uniform(std::mt19937& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

inline Vector random_positive(std::mt19937& rng, std::size_t n, double lo = 0.2, double hi = 5.0)
{
    Vector x(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = log_uniform(rng, lo, hi);
    return x;
}

inline std::vector<Ratio> random_point(std::mt19937& rng, std::size_t n, int lo, int hi)
{
    std::uniform_int_distribution<int> d(lo, hi);
    std::vector<Ratio> p(n);
    for (auto& r : p) r = Ratio{d(rng), 1};
    return p;
}

inline bool contains_point(const std::vector<std::vector<Ratio>>& pts, const std::vector<Ratio>& p)
{
    for (const auto& q : pts) {
        if (q == p) return true;
    }
    return false;
}

/// Distinct integer points in [0, 4]^n.
inline std::vector<std::vector<Ratio>> random_sources(std::mt19937& rng, std::size_t n, std::size_t k)
{
    std::vector<std::vector<Ratio>> pts;
    while (pts.size() < k) {
        auto p = random_point(rng, n, 0, 4);
        if (!contains_point(pts, p)) pts.push_back(std::move(p));
    }
    return pts;
}

inline MassActionSystem single_target_system(std::size_t n, const std::vector<std::vector<Ratio>>& sources,
                                             const std::vector<Ratio>& target, const std::vector<double>& rates)
{
    std::vector<Vertex> vertices;
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        vertices.emplace_back(sources[i]);
        edges.push_back({VertexId{static_cast<std::uint32_t>(i)}, VertexId{static_cast<std::uint32_t>(sources.size())}});
    }
    vertices.emplace_back(target);
    return MassActionSystem(EmbeddedNetwork(n, std::move(vertices), std::move(edges)), rates);
}

/// Single-target system whose target is the barycenter of its sources (so it lies in the relative interior).
/// Retries until the barycenter is not itself a source.
inline MassActionSystem random_interior_single_target(std::mt19937& rng, std::size_t n)
{
    std::uniform_int_distribution<std::size_t> count(2, n + 3);
    for (;;) {
        const auto k = count(rng);
        const auto sources = random_sources(rng, n, k);
        std::vector<Ratio> target(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::int64_t s = 0;
            for (const auto& p : sources) s += p[i].num;
            target[i] = Ratio{s, static_cast<std::int64_t>(k)};
        }
        if (contains_point(sources, target)) continue;
        std::vector<double> rates(k);
        for (auto& r : rates) r = log_uniform(rng, 0.1, 10.0);
        return single_target_system(n, sources, target, rates);
    }
}

/// Single-target system whose target has coordinate sum beyond every source, hence outside the hull.
inline MassActionSystem random_outside_single_target(std::mt19937& rng, std::size_t n)
{
    std::uniform_int_distribution<std::size_t> count(1, n + 3);
    std::uniform_int_distribution<int> shift(1, 3);
    const auto k = count(rng);
    const auto sources = random_sources(rng, n, k);
    std::vector<Ratio> target(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t hi = 0;
        for (const auto& p : sources) hi = std::max(hi, p[i].num);
        target[i] = Ratio{hi + (i == 0 ? shift(rng) : 0), 1};
    }
    std::vector<double> rates(k);
    for (auto& r : rates) r = log_uniform(rng, 0.1, 10.0);
    return single_target_system(n, sources, target, rates);
}

/// Reversible network on random integer vertices, with rates chosen so that `xstar` is detailed balanced.
inline MassActionSystem random_detailed_balanced(std::mt19937& rng, std::size_t n, const Vector& xstar)
{
    std::uniform_int_distribution<std::size_t> count(2, n + 3);
    const auto m = count(rng);
    const auto pts = random_sources(rng, n, m);
    std::vector<Vertex> vertices;
    for (const auto& p : pts) vertices.emplace_back(p);
    std::vector<Edge> edges;
    std::vector<double> rates;
    std::bernoulli_distribution keep(0.6);
    for (std::uint32_t i = 0; i < m; ++i) {
        for (std::uint32_t j = i + 1; j < m; ++j) {
            // a path keeps the graph connected; other pairs are optional
            if (j != i + 1 && !keep(rng)) continue;
            const double kf = log_uniform(rng, 0.1, 10.0);
            const double mi = std::exp(vertices[i].coords().dot(xstar.array().log().matrix()));
            const double mj = std::exp(vertices[j].coords().dot(xstar.array().log().matrix()));
            edges.push_back({VertexId{i}, VertexId{j}});
            rates.push_back(kf);
            edges.push_back({VertexId{j}, VertexId{i}});
            rates.push_back(kf * mi / mj);
        }
    }
    return MassActionSystem(EmbeddedNetwork(n, std::move(vertices), std::move(edges)), rates);
}

}  // namespace crn::testing
