#include "crn/model.hpp"

#include "crn/error.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace crn {

std::string Ratio::to_string() const
{
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

Vertex::Vertex(Vector coords) : coords_(std::move(coords))
{
    for (Eigen::Index i = 0; i < coords_.size(); ++i) {
        if (!std::isfinite(coords_[i])) throw ModelError("vertex coordinate is not finite");
    }
}

Vertex::Vertex(std::vector<Ratio> exact) : coords_(static_cast<Eigen::Index>(exact.size()))
{
    for (std::size_t i = 0; i < exact.size(); ++i) {
        if (exact[i].den == 0) throw ModelError("zero denominator in vertex coordinate");
        if (exact[i].den < 0) {
            exact[i].num = -exact[i].num;
            exact[i].den = -exact[i].den;
        }
        const auto g = std::gcd(exact[i].num, exact[i].den);
        if (g > 1) {
            exact[i].num /= g;
            exact[i].den /= g;
        }
        coords_[static_cast<Eigen::Index>(i)] = exact[i].to_double();
    }
    exact_ = std::move(exact);
}

Vertex Vertex::from_integers(std::initializer_list<std::int64_t> values)
{
    std::vector<Ratio> r;
    for (auto v : values) r.push_back({v, 1});
    return Vertex(std::move(r));
}

bool Vertex::is_power_law() const
{
    for (Eigen::Index i = 0; i < coords_.size(); ++i) {
        if (coords_[i] < 0 || coords_[i] != std::floor(coords_[i])) return true;
    }
    return false;
}

bool Vertex::same_point(const Vertex& other) const
{
    if (exact_ && other.exact_) return *exact_ == *other.exact_;
    return coords_ == other.coords_;
}

EmbeddedNetwork::EmbeddedNetwork(std::size_t dimension, std::vector<Vertex> vertices, std::vector<Edge> edges)
    : dimension_(dimension), vertices_(std::move(vertices)), edges_(std::move(edges))
{
    if (dimension_ == 0) throw ModelError("network dimension must be positive");
    if (edges_.empty()) throw ModelError("network has no edges");
    for (const auto& v : vertices_) {
        if (v.dimension() != dimension_) throw ModelError("vertex dimension does not match network dimension");
    }
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        for (std::size_t j = i + 1; j < vertices_.size(); ++j) {
            if (vertices_[i].same_point(vertices_[j]))
                throw ModelError("vertices " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
        }
    }
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (const auto& e : edges_) {
        if (e.source.value >= vertices_.size() || e.target.value >= vertices_.size())
            throw ModelError("edge references a missing vertex");
        if (e.source == e.target) throw ModelError("self-loop at vertex " + std::to_string(e.source.value));
        if (!seen.insert({e.source.value, e.target.value}).second)
            throw ModelError("duplicate edge " + std::to_string(e.source.value) + " -> " +
                             std::to_string(e.target.value));
    }
}

Vector EmbeddedNetwork::reaction_vector(std::size_t edge) const
{
    const auto& e = edges_.at(edge);
    return vertex(e.target).coords() - vertex(e.source).coords();
}

std::vector<VertexId> EmbeddedNetwork::sources() const
{
    std::set<VertexId> s;
    for (const auto& e : edges_) s.insert(e.source);
    return {s.begin(), s.end()};
}

std::vector<VertexId> EmbeddedNetwork::active_vertices() const
{
    std::set<VertexId> s;
    for (const auto& e : edges_) {
        s.insert(e.source);
        s.insert(e.target);
    }
    return {s.begin(), s.end()};
}

std::optional<std::size_t> EmbeddedNetwork::find_edge(VertexId source, VertexId target) const
{
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        if (edges_[i].source == source && edges_[i].target == target) return i;
    }
    return std::nullopt;
}

std::optional<VertexId> EmbeddedNetwork::find_vertex(const Vector& coords) const
{
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        if (vertices_[i].coords() == coords) return VertexId{static_cast<std::uint32_t>(i)};
    }
    return std::nullopt;
}

bool EmbeddedNetwork::is_power_law() const
{
    return std::any_of(vertices_.begin(), vertices_.end(), [](const Vertex& v) { return v.is_power_law(); });
}

bool EmbeddedNetwork::all_exact() const
{
    return std::all_of(vertices_.begin(), vertices_.end(), [](const Vertex& v) { return v.exact().has_value(); });
}

MassActionSystem::MassActionSystem(EmbeddedNetwork network, std::vector<double> rates)
    : network_(std::move(network)), rates_(std::move(rates))
{
    if (rates_.size() != network_.num_edges())
        throw ModelError("rate count " + std::to_string(rates_.size()) + " does not match edge count " +
                         std::to_string(network_.num_edges()));
    for (double k : rates_) {
        if (!(k > 0) || !std::isfinite(k)) throw ModelError("rate constants must be finite and positive");
    }
}

MassActionSystem MassActionSystem::with_rates(std::vector<double> rates) const
{
    return MassActionSystem(network_, std::move(rates));
}

std::vector<Vector> net_vectors(const MassActionSystem& sys)
{
    const auto& net = sys.network();
    std::vector<Vector> out(net.num_vertices(), Vector::Zero(static_cast<Eigen::Index>(net.dimension())));
    for (std::size_t i = 0; i < net.num_edges(); ++i)
        out[net.edges()[i].source.value] += sys.rate(i) * net.reaction_vector(i);
    return out;
}

Matrix stoichiometric_matrix(const EmbeddedNetwork& net)
{
    Matrix m(static_cast<Eigen::Index>(net.dimension()), static_cast<Eigen::Index>(net.num_edges()));
    for (std::size_t i = 0; i < net.num_edges(); ++i) m.col(static_cast<Eigen::Index>(i)) = net.reaction_vector(i);
    return m;
}

std::size_t exact_rank(const std::vector<std::vector<Ratio>>& rows)
{
    using boost::multiprecision::cpp_rational;
    if (rows.empty()) return 0;
    const std::size_t ncols = rows.front().size();
    std::vector<std::vector<cpp_rational>> a;
    a.reserve(rows.size());
    for (const auto& r : rows) {
        std::vector<cpp_rational> row;
        row.reserve(ncols);
        for (const auto& q : r) row.emplace_back(cpp_rational(q.num, q.den));
        a.push_back(std::move(row));
    }
    std::size_t rank = 0;
    for (std::size_t col = 0; col < ncols && rank < a.size(); ++col) {
        std::size_t pivot = rank;
        while (pivot < a.size() && a[pivot][col] == 0) ++pivot;
        if (pivot == a.size()) continue;
        std::swap(a[pivot], a[rank]);
        for (std::size_t r = rank + 1; r < a.size(); ++r) {
            if (a[r][col] == 0) continue;
            const cpp_rational f = a[r][col] / a[rank][col];
            for (std::size_t c = col; c < ncols; ++c) a[r][c] -= f * a[rank][c];
        }
        ++rank;
    }
    return rank;
}

std::size_t floating_rank(const Matrix& m, double relative_pivot)
{
    Matrix a = m;
    const double scale = a.cwiseAbs().maxCoeff();
    if (a.size() == 0 || scale == 0) return 0;
    const double thresh = relative_pivot * scale;
    std::size_t rank = 0;
    const auto rows = a.rows();
    for (Eigen::Index col = 0; col < a.cols() && static_cast<Eigen::Index>(rank) < rows; ++col) {
        const auto r0 = static_cast<Eigen::Index>(rank);
        Eigen::Index best = r0;
        for (Eigen::Index r = r0 + 1; r < rows; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(best, col))) best = r;
        }
        if (std::abs(a(best, col)) <= thresh) continue;
        a.row(best).swap(a.row(r0));
        for (Eigen::Index r = r0 + 1; r < rows; ++r) {
            const double f = a(r, col) / a(r0, col);
            a.row(r) -= f * a.row(r0);
        }
        ++rank;
    }
    return rank;
}

std::size_t stoichiometric_rank(const EmbeddedNetwork& net, const Tolerances& tol)
{
    if (net.all_exact()) {
        // rows = edges (transpose has the same rank), entries target - source
        std::vector<std::vector<Ratio>> rows;
        for (const auto& e : net.edges()) {
            const auto& s = *net.vertex(e.source).exact();
            const auto& t = *net.vertex(e.target).exact();
            std::vector<Ratio> row;
            for (std::size_t k = 0; k < s.size(); ++k) {
                // a/b - c/d = (ad - cb) / bd
                row.push_back({t[k].num * s[k].den - s[k].num * t[k].den, t[k].den * s[k].den});
            }
            rows.push_back(std::move(row));
        }
        return exact_rank(rows);
    }
    return floating_rank(stoichiometric_matrix(net), tol.rank_pivot);
}

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x)
    {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

// Tarjan SCC; returns component index per vertex.
std::vector<int> strongly_connected(std::size_t n, const std::vector<std::vector<std::size_t>>& adj)
{
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    int counter = 0;
    int ncomp = 0;

    // iterative DFS: (vertex, next neighbour position)
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::vector<std::pair<std::size_t, std::size_t>> work{{root, 0}};
        while (!work.empty()) {
            auto& [v, pos] = work.back();
            if (pos == 0 && index[v] == -1) {
                index[v] = low[v] = counter++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            if (pos < adj[v].size()) {
                const std::size_t w = adj[v][pos++];
                if (index[w] == -1) {
                    work.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = ncomp;
                } while (w != v);
                ++ncomp;
            }
            const std::size_t done = v;
            work.pop_back();
            if (!work.empty()) {
                auto& parent = work.back().first;
                low[parent] = std::min(low[parent], low[done]);
            }
        }
    }
    return comp;
}

}  // namespace

std::optional<VertexId> single_target_of(const EmbeddedNetwork& net)
{
    const VertexId target = net.edges().front().target;
    std::set<VertexId> sources;
    for (const auto& e : net.edges()) {
        if (e.target != target) return std::nullopt;
        if (!sources.insert(e.source).second) return std::nullopt;
    }
    if (sources.count(target)) return std::nullopt;
    return target;
}

StructureReport classify_structure(const EmbeddedNetwork& net, const Tolerances& tol)
{
    StructureReport r;
    r.source_ids = net.sources();
    const auto active = net.active_vertices();
    r.num_vertices = active.size();

    const std::size_t n = net.num_vertices();
    UnionFind uf(n);
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& e : net.edges()) {
        uf.unite(e.source.value, e.target.value);
        adj[e.source.value].push_back(e.target.value);
    }
    std::set<std::size_t> roots;
    for (auto v : active) roots.insert(uf.find(v.value));
    r.num_components = roots.size();

    r.stoich_dim = stoichiometric_rank(net, tol);
    r.exact_rank = net.all_exact();
    // m - l - s is nonnegative for any graph; guard anyway against tolerance artefacts
    const auto m = static_cast<long>(r.num_vertices);
    const auto defi = m - static_cast<long>(r.num_components) - static_cast<long>(r.stoich_dim);
    r.deficiency = defi > 0 ? static_cast<std::size_t>(defi) : 0;

    r.is_reversible = std::all_of(net.edges().begin(), net.edges().end(), [&](const Edge& e) {
        return net.find_edge(e.target, e.source).has_value();
    });

    // weakly reversible: every edge lies inside one strongly connected component
    const auto scc = strongly_connected(n, adj);
    r.is_weakly_reversible = std::all_of(net.edges().begin(), net.edges().end(), [&](const Edge& e) {
        return scc[e.source.value] == scc[e.target.value];
    });

    r.target_id = single_target_of(net);
    r.is_single_target = r.target_id.has_value();
    r.is_power_law = net.is_power_law();
    return r;
}

}  // namespace crn
