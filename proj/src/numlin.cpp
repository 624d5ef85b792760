#include "crn/numlin.hpp"

#include "crn/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crn::numlin {

namespace {

constexpr double kReducedCostTol = 1e-11;
constexpr std::size_t kMaxPivots = 200000;

// Standard form: min cost.z, T z = rhs, z >= 0. Columns [structural | artificial].
class Tableau {
public:
    Tableau(const Matrix& A, const Vector& b, double pivot_tol)
        : m_(static_cast<std::size_t>(A.rows())), n_(static_cast<std::size_t>(A.cols())), pivot_tol_(pivot_tol),
          rows_(m_, std::vector<double>(n_ + m_ + 1, 0.0)), basis_(m_), cost_(n_ + m_ + 1, 0.0)
    {
        for (std::size_t r = 0; r < m_; ++r) {
            const double sign = b[static_cast<Eigen::Index>(r)] < 0 ? -1.0 : 1.0;
            for (std::size_t j = 0; j < n_; ++j)
                rows_[r][j] = sign * A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
            rows_[r][n_ + r] = 1.0;
            rows_[r][rhs()] = sign * b[static_cast<Eigen::Index>(r)];
            basis_[r] = n_ + r;
        }
    }

    std::size_t rhs() const { return n_ + m_; }
    bool is_artificial(std::size_t j) const { return j >= n_; }

    /// Phase one: minimize the sum of artificials. Returns the optimal sum.
    double phase_one()
    {
        std::fill(cost_.begin(), cost_.end(), 0.0);
        for (std::size_t r = 0; r < m_; ++r) {
            for (std::size_t j = 0; j < n_; ++j) cost_[j] -= rows_[r][j];
            cost_[rhs()] -= rows_[r][rhs()];
        }
        run(true);
        return -cost_[rhs()];
    }

    /// Pivots remaining artificials out of the basis; rows with no structural entry are redundant.
    void expel_artificials()
    {
        for (std::size_t r = 0; r < m_; ++r) {
            if (!is_artificial(basis_[r])) continue;
            std::size_t best = n_;
            for (std::size_t j = 0; j < n_; ++j) {
                if (std::abs(rows_[r][j]) > pivot_tol_ && (best == n_ || std::abs(rows_[r][j]) > std::abs(rows_[r][best])))
                    best = j;
            }
            if (best != n_) pivot(r, best);
        }
    }

    /// Phase two: minimize c.z over structural columns. Returns false if unbounded.
    bool phase_two(const std::vector<double>& c)
    {
        std::fill(cost_.begin(), cost_.end(), 0.0);
        for (std::size_t j = 0; j < n_; ++j) cost_[j] = c[j];
        for (std::size_t r = 0; r < m_; ++r) {
            const std::size_t bj = basis_[r];
            const double cb = bj < n_ ? c[bj] : 0.0;
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j <= rhs(); ++j) cost_[j] -= cb * rows_[r][j];
        }
        return run(false);
    }

    std::vector<double> solution() const
    {
        std::vector<double> z(n_, 0.0);
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < n_) z[basis_[r]] = rows_[r][rhs()];
        }
        return z;
    }

    std::vector<std::size_t> structural_basis() const
    {
        std::vector<std::size_t> out;
        for (auto j : basis_) {
            if (j < n_) out.push_back(j);
        }
        return out;
    }

private:
    // Bland's rule: lowest-index improving column, lowest-index basic variable among ratio ties.
    bool run(bool allow_artificial)
    {
        for (std::size_t iter = 0; iter < kMaxPivots; ++iter) {
            std::size_t enter = rhs();
            const std::size_t limit = allow_artificial ? rhs() : n_;
            for (std::size_t j = 0; j < limit; ++j) {
                if (cost_[j] < -kReducedCostTol) {
                    enter = j;
                    break;
                }
            }
            if (enter == rhs()) return true;

            std::size_t leave = m_;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < m_; ++r) {
                const double a = rows_[r][enter];
                if (a <= pivot_tol_) continue;
                const double ratio = std::max(rows_[r][rhs()], 0.0) / a;
                if (ratio < best_ratio - 1e-15 ||
                    (std::abs(ratio - best_ratio) <= 1e-15 && leave < m_ && basis_[r] < basis_[leave])) {
                    best_ratio = ratio;
                    leave = r;
                }
            }
            if (leave == m_) return false;
            pivot(leave, enter);
        }
        throw NoConvergenceError("simplex exceeded pivot limit");
    }

    void pivot(std::size_t r, std::size_t c)
    {
        auto& prow = rows_[r];
        const double inv = 1.0 / prow[c];
        for (auto& v : prow) v *= inv;
        prow[c] = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double f = rows_[i][c];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= rhs(); ++j) rows_[i][j] -= f * prow[j];
            rows_[i][c] = 0.0;
        }
        const double f = cost_[c];
        if (f != 0.0) {
            for (std::size_t j = 0; j <= rhs(); ++j) cost_[j] -= f * prow[j];
            cost_[c] = 0.0;
        }
        basis_[r] = c;
    }

    std::size_t m_;
    std::size_t n_;
    double pivot_tol_;
    std::vector<std::vector<double>> rows_;
    std::vector<std::size_t> basis_;
    std::vector<double> cost_;
};

// Maps original variables onto nonnegative standard-form columns (free variables split in two).
struct StandardForm {
    Matrix A;
    std::vector<std::size_t> pos;                 // column of x_i (or x_i^+)
    std::vector<std::optional<std::size_t>> neg;  // column of x_i^- for free variables

    explicit StandardForm(const LPProblem& p)
    {
        const auto n = p.num_vars();
        pos.resize(n);
        neg.resize(n);
        std::size_t cols = 0;
        for (std::size_t i = 0; i < n; ++i) {
            pos[i] = cols++;
            if (!p.is_nonnegative(i)) neg[i] = cols++;
        }
        A = Matrix::Zero(p.A.rows(), static_cast<Eigen::Index>(cols));
        for (std::size_t i = 0; i < n; ++i) {
            A.col(static_cast<Eigen::Index>(pos[i])) = p.A.col(static_cast<Eigen::Index>(i));
            if (neg[i]) A.col(static_cast<Eigen::Index>(*neg[i])) = -p.A.col(static_cast<Eigen::Index>(i));
        }
    }

    Vector recover(const std::vector<double>& z) const
    {
        Vector x(static_cast<Eigen::Index>(pos.size()));
        for (std::size_t i = 0; i < pos.size(); ++i) {
            double v = z[pos[i]];
            if (neg[i]) v -= z[*neg[i]];
            x[static_cast<Eigen::Index>(i)] = v;
        }
        return x;
    }
};

// Re-solves the basic variables from the original data to strip accumulated pivot error.
std::vector<double> polish(const Matrix& A, const Vector& b, const std::vector<double>& z,
                           const std::vector<std::size_t>& basis)
{
    if (basis.empty()) return z;
    Matrix B(A.rows(), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) B.col(static_cast<Eigen::Index>(k)) = A.col(static_cast<Eigen::Index>(basis[k]));
    const Vector xb = B.completeOrthogonalDecomposition().solve(b);
    std::vector<double> out(z.size(), 0.0);
    for (std::size_t k = 0; k < basis.size(); ++k) out[basis[k]] = std::max(xb[static_cast<Eigen::Index>(k)], 0.0);
    return out;
}

double residual_inf(const Matrix& A, const Vector& b, const std::vector<double>& z)
{
    const Vector zz = Eigen::Map<const Vector>(z.data(), static_cast<Eigen::Index>(z.size()));
    if (A.rows() == 0) return 0.0;
    return (A * zz - b).cwiseAbs().maxCoeff();
}

}  // namespace

double constraint_violation(const LPProblem& p, const Vector& x)
{
    double v = p.A.rows() > 0 ? (p.A * x - p.b).cwiseAbs().maxCoeff() : 0.0;
    for (std::size_t i = 0; i < p.num_vars(); ++i) {
        if (p.is_nonnegative(i)) v = std::max(v, -x[static_cast<Eigen::Index>(i)]);
    }
    return v;
}

LPResult lp_solve(const LPProblem& p, const Tolerances& tol)
{
    if (p.A.rows() != p.b.size()) throw ModelError("LP: row count of A does not match b");
    if (!p.nonnegative.empty() && p.nonnegative.size() != p.num_vars())
        throw ModelError("LP: bound vector size does not match variable count");
    if (p.objective && static_cast<std::size_t>(p.objective->size()) != p.num_vars())
        throw ModelError("LP: objective size does not match variable count");
    if (!p.A.allFinite() || !p.b.allFinite()) throw ModelError("LP: non-finite data");

    const StandardForm sf(p);
    LPResult result;
    Tableau t(sf.A, p.b, tol.pivot);
    const double scale = 1.0 + (p.b.size() > 0 ? p.b.cwiseAbs().maxCoeff() : 0.0);
    result.phase1_residual = t.phase_one();
    if (result.phase1_residual > tol.feasibility * scale) {
        result.status = LPStatus::Infeasible;
        return result;
    }
    t.expel_artificials();

    if (p.objective) {
        std::vector<double> c(static_cast<std::size_t>(sf.A.cols()), 0.0);
        for (std::size_t i = 0; i < p.num_vars(); ++i) {
            const double ci = (*p.objective)[static_cast<Eigen::Index>(i)];
            c[sf.pos[i]] = -ci;
            if (sf.neg[i]) c[*sf.neg[i]] = ci;
        }
        if (!t.phase_two(c)) {
            result.status = LPStatus::Unbounded;
            return result;
        }
    }

    auto z = t.solution();
    auto zp = polish(sf.A, p.b, z, t.structural_basis());
    if (residual_inf(sf.A, p.b, zp) < residual_inf(sf.A, p.b, z)) z = std::move(zp);
    for (auto& v : z) v = std::max(v, 0.0);

    result.status = LPStatus::Optimal;
    result.x = sf.recover(z);
    result.objective = p.objective ? p.objective->dot(result.x) : 0.0;
    return result;
}

std::optional<Vector> lp_feasible(const LPProblem& p, const Tolerances& tol)
{
    const auto r = lp_solve(p, tol);
    if (r.status == LPStatus::Unbounded) throw UnboundedError("LP objective is unbounded");
    if (!r.feasible()) return std::nullopt;
    return r.x;
}

namespace {

// Variables: [x (n) | t | s_i for strict | u], rows: A x = b; x_i - t - s_i = 0; t + u = cap.
LPProblem slack_problem(const LPProblem& p, const std::vector<std::size_t>& strict, double cap)
{
    const auto n = static_cast<Eigen::Index>(p.num_vars());
    const auto k = static_cast<Eigen::Index>(strict.size());
    const auto rows = p.A.rows() + k + 1;
    const auto cols = n + 1 + k + 1;
    LPProblem q;
    q.A = Matrix::Zero(rows, cols);
    q.b = Vector::Zero(rows);
    q.A.topLeftCorner(p.A.rows(), n) = p.A;
    q.b.head(p.A.rows()) = p.b;
    for (Eigen::Index i = 0; i < k; ++i) {
        const auto r = p.A.rows() + i;
        q.A(r, static_cast<Eigen::Index>(strict[static_cast<std::size_t>(i)])) = 1.0;
        q.A(r, n) = -1.0;
        q.A(r, n + 1 + i) = -1.0;
    }
    q.A(rows - 1, n) = 1.0;
    q.A(rows - 1, cols - 1) = 1.0;
    q.b[rows - 1] = cap;
    q.nonnegative.assign(static_cast<std::size_t>(cols), true);
    for (std::size_t i = 0; i < p.num_vars(); ++i) q.nonnegative[i] = p.is_nonnegative(i);
    q.nonnegative[static_cast<std::size_t>(n)] = false;
    Vector c = Vector::Zero(cols);
    c[n] = 1.0;
    q.objective = c;
    return q;
}

}  // namespace

std::optional<double> max_min_slack(const LPProblem& p, const std::vector<std::size_t>& strict, double cap,
                                    const Tolerances& tol)
{
    const auto r = lp_solve(slack_problem(p, strict, cap), tol);
    if (r.status != LPStatus::Optimal) return std::nullopt;
    return r.x[static_cast<Eigen::Index>(p.num_vars())];
}

std::optional<StrictPoint> strict_interior_point(const LPProblem& p, const std::vector<std::size_t>& strict,
                                                 double cap, const Tolerances& tol)
{
    for (auto i : strict) {
        if (i >= p.num_vars()) throw ModelError("strict variable index out of range");
    }
    const auto r = lp_solve(slack_problem(p, strict, cap), tol);
    if (r.status != LPStatus::Optimal) return std::nullopt;
    const auto n = static_cast<Eigen::Index>(p.num_vars());
    const double t = r.x[n];
    if (!(t > tol.strict_slack)) return std::nullopt;
    return StrictPoint{r.x.head(n), t};
}

namespace {

void fix_signs(Matrix& basis)
{
    for (Eigen::Index c = 0; c < basis.cols(); ++c) {
        Eigen::Index idx = 0;
        basis.col(c).cwiseAbs().maxCoeff(&idx);
        if (basis(idx, c) < 0) basis.col(c) *= -1.0;
    }
}

}  // namespace

std::size_t numeric_rank(const Matrix& m, const Tolerances& tol)
{
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s[0] == 0.0) return 0;
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s[i] > tol.kernel * s[0]) ++r;
    }
    return r;
}

Matrix kernel_basis(const Matrix& m, const Tolerances& tol)
{
    const auto cols = m.cols();
    if (cols == 0) return Matrix(0, 0);
    if (m.rows() == 0 || m.cwiseAbs().maxCoeff() == 0.0) return Matrix::Identity(cols, cols);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const auto r = static_cast<Eigen::Index>(numeric_rank(m, tol));
    Matrix basis = svd.matrixV().rightCols(cols - r);
    fix_signs(basis);
    return basis;
}

Matrix range_basis(const Matrix& m, const Tolerances& tol)
{
    if (m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0) return Matrix(m.rows(), 0);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU);
    const auto r = static_cast<Eigen::Index>(numeric_rank(m, tol));
    Matrix basis = svd.matrixU().leftCols(r);
    fix_signs(basis);
    return basis;
}

Vector least_squares(const Matrix& A, const Vector& b)
{
    if (A.cols() == 0) return Vector(0);
    return A.completeOrthogonalDecomposition().solve(b);
}

}  // namespace crn::numlin
