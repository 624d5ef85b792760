#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crn/model.hpp"
#include "crn/tolerances.hpp"

namespace crn {

/// Net vector per source vertex, keyed by coordinates so two systems can be compared.
using NetVectorField = std::map<std::vector<double>, Vector>;

NetVectorField net_vector_field(const MassActionSystem& sys);

struct VertexMismatch {
    std::vector<double> vertex;
    double residual;  ///< inf-norm of the net-vector difference
};

struct EquivalenceResult {
    bool equivalent = false;
    double max_residual = 0.0;
    std::vector<VertexMismatch> residuals;  ///< every vertex of V_a ∪ V_b, in coordinate order
};

EquivalenceResult dynamically_equivalent(const MassActionSystem& a, const MassActionSystem& b,
                                         const Tolerances& tol = kDefaultTolerances);

struct SingleTargetRealization {
    MassActionSystem system;
    Vector target;
    std::vector<VertexId> sources;  ///< input vertex ids realized, in edge order of `system`
    std::vector<double> rates;      ///< 1 / t_i
    double residual = 0.0;          ///< relative least-squares residual
};

/// Finds y* and lambda_i > 0 with v(y_i) = lambda_i (y* - y_i) for every source with nonzero net vector.
std::optional<SingleTargetRealization> single_target_realize(const MassActionSystem& sys,
                                                             const Tolerances& tol = kDefaultTolerances);

/// Damped Newton on rhs within x0 + S, falling back to long-time integration.
std::optional<Vector> find_positive_steady_state(const MassActionSystem& sys, const Vector& x0,
                                                 const Tolerances& tol = kDefaultTolerances);

/// Distinct steady states reached from several seeds (x0 itself first, then scaled and random seeds).
std::vector<Vector> find_steady_states(const MassActionSystem& sys, const Vector& x0, std::size_t random_seeds,
                                       unsigned seed, const Tolerances& tol = kDefaultTolerances);

struct FluxEdge {
    std::size_t from;  ///< index into `sources`
    std::size_t to;
    double flux;
    double rate;
};

struct CBFeasibility {
    bool feasible = false;
    bool state_is_steady = true;  ///< false means x did not pass the steady-state test (warning)
    Vector steady_state_used;
    std::vector<Vector> sources;                 ///< source vertices of the complete digraph
    std::vector<FluxEdge> flux_witness;          ///< all ordered pairs, Q_ij >= 0
    std::optional<MassActionSystem> realized;    ///< edges with Q_ij > 0, rates Q_ij / x^{y_i}
    double residual = 0.0;

    std::optional<double> flux(std::size_t from, std::size_t to) const;
};

/// LP over Q_ij >= 0 on the complete digraph of sources: per-source flux equivalence and per-vertex balance at x.
CBFeasibility cb_realize(const MassActionSystem& sys, const Vector& x, const Tolerances& tol = kDefaultTolerances);

enum class SweepQuery { ComplexBalanced, SingleTarget };

struct SweepRow {
    double parameter;
    bool feasible = false;
    std::string summary;
    std::optional<std::string> error;
};

struct SweepBoundary {
    double lower;  ///< bracket endpoints; feasibility differs across them
    double upper;
    bool feasible_above;
};

struct SweepTable {
    std::vector<SweepRow> rows;
    std::vector<SweepBoundary> boundaries;
};

using SystemFamily = std::function<MassActionSystem(double)>;

struct SweepOptions {
    SweepQuery query = SweepQuery::ComplexBalanced;
    double relative_width = 1e-3;  ///< bisection stops when upper/lower - 1 is below this
    std::size_t random_seeds = 2;  ///< extra steady-state seeds for the complex-balance query
    unsigned seed = 0;
    bool parallel = true;
};

/// Evaluates the query on each grid value, then refines every feasibility change by bisection.
SweepTable region_sweep(const SystemFamily& family, const std::vector<double>& grid, const SweepOptions& opts = {},
                        const Tolerances& tol = kDefaultTolerances);

/// Single evaluation used by the sweep: feasibility plus a one-line summary.
SweepRow evaluate_query(const MassActionSystem& sys, SweepQuery query, std::size_t random_seeds, unsigned seed,
                        const Tolerances& tol = kDefaultTolerances);

std::vector<double> logspace(double lo, double hi, std::size_t n);
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace crn
