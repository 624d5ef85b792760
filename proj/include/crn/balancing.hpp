#pragma once

#include <optional>
#include <vector>

#include "crn/model.hpp"
#include "crn/tolerances.hpp"

namespace crn {

/// phi(mu) = sum_j a_j exp(<g_j, mu>) - <b, mu>, g_j the columns of G.
/// Convex; strictly convex on span{g_j}.
class ExpPotential {
public:
    ExpPotential(Matrix generators, Vector weights, Vector linear);

    double value(const Vector& mu) const;
    Vector gradient(const Vector& mu) const;
    Matrix hessian(const Vector& mu) const;
    /// sum_j a_j exp(<g_j, mu>) |g_j| + |b|, the yardstick for gradient tests.
    double gross_scale(const Vector& mu) const;

    const Matrix& generators() const { return g_; }

private:
    Vector terms(const Vector& mu) const;

    Matrix g_;
    Vector a_;
    Vector b_;
};

struct PotentialMinimum {
    Vector mu;
    int iterations = 0;
    double gradient_norm = 0.0;  ///< projected gradient, inf-norm
    double scale = 0.0;
};

/// Damped Newton with Armijo backtracking (beta 0.5, c 1e-4) restricted to the column span of `subspace`
/// (orthonormal columns). Throws NoConvergenceError after tol.newton_max_steps steps.
PotentialMinimum minimize_potential(const ExpPotential& phi, const Matrix& subspace, const Vector& mu0,
                                    const Tolerances& tol = kDefaultTolerances);

struct BirchSolution {
    Vector kappa_prime;   ///< kappa_j exp(<gamma_j, mu>)
    Vector mu;
    Vector steady_state;  ///< exp(-mu)
    double residual = 0;  ///< max |Gamma kappa'|
    int iterations = 0;
};

struct BirchOptions {
    std::optional<Vector> initial_mu;
};

/// Point of Ker(Gamma) ∩ (kappa ∘ exp(Ran Gamma^T)). gamma is n x m, kappa has m positive entries.
/// Throws NotInteriorError when 0 is not in the relative interior of conv{gamma_j}.
BirchSolution birch_point(const Matrix& gamma, const Vector& kappa, const BirchOptions& opts = {},
                          const Tolerances& tol = kDefaultTolerances);

/// The unique point of (x0 + S) ∩ (xstar ∘ exp(S^perp)), S = column span of `stoich`.
Vector compatibility_class_point(const Vector& xstar, const Vector& x0, const Matrix& stoich,
                                 const Tolerances& tol = kDefaultTolerances);

struct DBRealization {
    MassActionSystem system;
    VertexId target;
    Vector steady_state;
    Vector reverse_rates;               ///< kappa'_j for target -> source of edge j
    double equivalence_residual = 0.0;  ///< max over vertices of the net-vector mismatch (inf-norm)
    double balance_residual = 0.0;      ///< max detailed-balance residual at steady_state
};

/// Adds target -> source edges with Birch reverse rates; original edges keep their rates.
DBRealization db_realize_single_target(const MassActionSystem& sys, const Tolerances& tol = kDefaultTolerances);

/// x^y computed as exp(<y, log x>).
double monomial(const Vector& x, const Vector& y);

struct PairResidual {
    std::size_t forward_edge;
    std::size_t reverse_edge;
    double residual;
};

struct DetailedBalanceReport {
    std::vector<PairResidual> pairs;
    double max_residual = 0.0;
    bool balanced = false;
};

/// Forward orientation of each reversible pair: the edge with source id < target id.
DetailedBalanceReport check_detailed_balance(const MassActionSystem& sys, const Vector& x,
                                             const Tolerances& tol = kDefaultTolerances);

struct VertexResidual {
    VertexId vertex;
    double inflow;
    double outflow;
    double residual;
};

struct ComplexBalanceReport {
    std::vector<VertexResidual> vertices;
    double max_residual = 0.0;
    bool balanced = false;
};

ComplexBalanceReport check_complex_balance(const MassActionSystem& sys, const Vector& x,
                                           const Tolerances& tol = kDefaultTolerances);

struct WegscheiderResult {
    bool passed = true;
    std::vector<std::size_t> forward_edges;  ///< columns of Gamma'
    Matrix kernel;                           ///< basis of Ker Gamma'
    std::optional<Vector> violating;         ///< first kernel vector failing the test
    double violation = 0.0;
};

WegscheiderResult wegscheider_check(const MassActionSystem& sys, const Tolerances& tol = kDefaultTolerances);

struct CircuitResult {
    bool passed = false;
    double log_forward = 0.0;
    double log_reverse = 0.0;
};

/// Compares the rate products around the closed cycle in both directions.
CircuitResult circuit_check(const MassActionSystem& sys, const std::vector<VertexId>& cycle,
                            const Tolerances& tol = kDefaultTolerances);

}  // namespace crn
