#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crn/tolerances.hpp"

namespace crn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct VertexId {
    std::uint32_t value = 0;

    auto operator<=>(const VertexId&) const = default;
};

/// Integer ratio as read from input text; kept so structural queries can use exact arithmetic.
struct Ratio {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string to_string() const;
    bool operator==(const Ratio& o) const { return num * o.den == o.num * den; }
};

class Vertex {
public:
    explicit Vertex(Vector coords);
    explicit Vertex(std::vector<Ratio> exact);
    static Vertex from_integers(std::initializer_list<std::int64_t> values);

    const Vector& coords() const { return coords_; }
    std::size_t dimension() const { return static_cast<std::size_t>(coords_.size()); }
    const std::optional<std::vector<Ratio>>& exact() const { return exact_; }

    /// Negative or non-integer coordinates: the system is a power-law system.
    bool is_power_law() const;

    bool same_point(const Vertex& other) const;

private:
    Vector coords_;
    std::optional<std::vector<Ratio>> exact_;
};

struct Edge {
    VertexId source;
    VertexId target;

    bool operator==(const Edge&) const = default;
};

/// Directed graph with vertices embedded in R^n. No self-loops, no duplicate edges, at least one edge.
class EmbeddedNetwork {
public:
    EmbeddedNetwork(std::size_t dimension, std::vector<Vertex> vertices, std::vector<Edge> edges);

    std::size_t dimension() const { return dimension_; }
    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const Vertex& vertex(VertexId id) const { return vertices_.at(id.value); }

    std::size_t num_vertices() const { return vertices_.size(); }
    std::size_t num_edges() const { return edges_.size(); }

    Vector reaction_vector(std::size_t edge) const;

    /// Source vertex ids in ascending order.
    std::vector<VertexId> sources() const;
    /// Vertices touching at least one edge, ascending.
    std::vector<VertexId> active_vertices() const;

    std::optional<std::size_t> find_edge(VertexId source, VertexId target) const;
    std::optional<VertexId> find_vertex(const Vector& coords) const;

    bool is_power_law() const;
    /// True when every vertex carries exact rational coordinates.
    bool all_exact() const;

private:
    std::size_t dimension_;
    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
};

class MassActionSystem {
public:
    MassActionSystem(EmbeddedNetwork network, std::vector<double> rates);

    const EmbeddedNetwork& network() const { return network_; }
    const std::vector<double>& rates() const { return rates_; }
    double rate(std::size_t edge) const { return rates_.at(edge); }
    std::size_t dimension() const { return network_.dimension(); }

    MassActionSystem with_rates(std::vector<double> rates) const;

private:
    EmbeddedNetwork network_;
    std::vector<double> rates_;
};

struct StructureReport {
    std::vector<VertexId> source_ids;
    std::size_t num_vertices = 0;   ///< vertices touching an edge
    std::size_t num_components = 0;
    std::size_t stoich_dim = 0;
    std::size_t deficiency = 0;
    bool is_reversible = false;
    bool is_weakly_reversible = false;
    bool is_single_target = false;
    std::optional<VertexId> target_id;
    bool is_power_law = false;
    bool exact_rank = false;  ///< rank came from rational elimination
};

/// Columns are target - source for each edge, in edge order.
Matrix stoichiometric_matrix(const EmbeddedNetwork& net);
inline Matrix stoichiometric_matrix(const MassActionSystem& sys) { return stoichiometric_matrix(sys.network()); }

/// Rank of the stoichiometric matrix: exact when all coordinates are rational, floating otherwise.
std::size_t stoichiometric_rank(const EmbeddedNetwork& net, const Tolerances& tol = kDefaultTolerances);

/// Exact rank of a matrix of ratios (rows x cols, row-major).
std::size_t exact_rank(const std::vector<std::vector<Ratio>>& rows);

/// Floating Gaussian elimination with partial pivoting; pivots below tol * max|entry| are zero.
std::size_t floating_rank(const Matrix& m, double relative_pivot);

/// Per-vertex net vector sum_{y->y'} kappa (y' - y), indexed by vertex id (zero for non-sources).
std::vector<Vector> net_vectors(const MassActionSystem& sys);

StructureReport classify_structure(const EmbeddedNetwork& net, const Tolerances& tol = kDefaultTolerances);

/// Single-target check: returns the target when every edge points to it, each other
/// active vertex is the source of exactly one edge, and the target is not a source.
std::optional<VertexId> single_target_of(const EmbeddedNetwork& net);

}  // namespace crn
