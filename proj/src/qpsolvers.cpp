#include "mvfuse/qpsolvers.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace mvfuse::qp {

namespace {

void require_symmetric(const Matrix& m, const char* name) {
    require_shape(m.rows() == m.cols(), std::string(name) + " must be square");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    require((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale,
            std::string(name) + " must be symmetric");
}

} // namespace

Vector BatchBoxQP::column_objectives(const Matrix& X) const {
    require_shape(X.rows() == D.rows() && X.cols() == L.cols(), "column_objectives: shape mismatch");
    return (0.5 * (X.array() * (D * X).array()).colwise().sum() - (L.array() * X.array()).colwise().sum())
        .transpose();
}

double largest_eigenvalue(const Matrix& D, double tol) {
    require(D.rows() > 0, "largest_eigenvalue: empty matrix");
    require(D.allFinite(), "largest_eigenvalue: non-finite entries");
    require_symmetric(D, "largest_eigenvalue input");
    (void)tol; // the dense solver is accurate to machine precision, well inside tol
    Eigen::SelfAdjointEigenSolver<Matrix> solver(D, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw ConvergenceError("symmetric eigensolver failed");
    return solver.eigenvalues().maxCoeff();
}

double exact_line_search(double dHd, double gd, double eta_max) {
    require(eta_max > 0.0, "exact_line_search: eta_max must be positive");
    require(gd < 0.0, "exact_line_search: direction is not a descent direction");
    if (dHd <= 0.0) return eta_max;
    return std::min(-gd / dHd, eta_max);
}

double exact_line_search(const Matrix& H, const Vector& g, const Vector& d, double eta_max) {
    return exact_line_search(d.dot(H * d), g.dot(d), eta_max);
}

AfwResult afw_solve(const SimplexQP& qp, const Vector& alpha0, const AfwOptions& options) {
    const Eigen::Index v = qp.H.rows();
    require_shape(v > 0 && qp.H.cols() == v && qp.c.size() == v && alpha0.size() == v,
                  "afw_solve: H, c and alpha0 dimensions disagree");
    require(qp.H.allFinite() && qp.c.allFinite(), "afw_solve: non-finite entries in H or c");
    require_symmetric(qp.H, "afw_solve Hessian");
    require((alpha0.array() >= 0.0).all() && std::abs(alpha0.sum() - 1.0) <= 1e-10,
            "afw_solve: alpha0 is not on the simplex");
    require(options.eps > 0.0, "afw_solve: eps must be positive");

    AfwResult result;
    Vector alpha = alpha0;
    Vector d(v);
    for (int iter = 0; iter < options.max_iter; ++iter) {
        const Vector g = qp.H * alpha - qp.c;

        Eigen::Index fw = 0;
        for (Eigen::Index i = 1; i < v; ++i)
            if (g(i) < g(fw)) fw = i;
        Eigen::Index away = -1;
        for (Eigen::Index j = 0; j < v; ++j)
            if (alpha(j) > 0.0 && (away < 0 || g(j) > g(away))) away = j;

        // -g'd for both candidates; e_fw - alpha and alpha - e_away
        const double g_alpha = g.dot(alpha);
        const double fw_gap = g_alpha - g(fw);
        const double away_gap = g(away) - g_alpha;

        bool use_away = fw_gap < away_gap && alpha(away) < 1.0;
        double eta_max = 1.0;
        if (use_away) {
            d = alpha;
            d(away) -= 1.0;
            eta_max = alpha(away) / (1.0 - alpha(away));
        } else {
            d = -alpha;
            d(fw) += 1.0;
        }
        const double gap = use_away ? away_gap : fw_gap;
        result.gap = gap;
        if (gap <= options.eps) {
            result.converged = true;
            result.iterations = iter;
            result.alpha = alpha;
            return result;
        }

        const double eta = exact_line_search(d.dot(qp.H * d), -gap, eta_max);
        alpha += eta * d;
        if (use_away && eta == eta_max) alpha(away) = 0.0; // drop step
        alpha = alpha.cwiseMax(0.0);
        const double sum = alpha.sum();
        if (std::abs(sum - 1.0) > 1e-13) alpha /= sum;
    }
    result.iterations = options.max_iter;
    result.alpha = alpha;
    return result;
}

Matrix dca_solve(const BatchBoxQP& batch, const Matrix& A0, int iters) {
    const Eigen::Index v = batch.D.rows();
    require_shape(batch.D.cols() == v && batch.L.rows() == v && batch.U.rows() == v &&
                      batch.L.cols() == batch.U.cols() && A0.rows() == v && A0.cols() == batch.U.cols(),
                  "dca_solve: D, L, U and A0 dimensions disagree");
    require(iters >= 1, "dca_solve: iters must be >= 1");
    // count() rather than all(): it vectorises, and NaN still fails both tests
    require((batch.U.array() >= 0.0).count() == batch.U.size(), "dca_solve: upper bounds must be >= 0");
    require(((A0.array() >= 0.0) && (A0.array() <= batch.U.array())).count() == A0.size(),
            "dca_solve: A0 violates the box constraints");

    const double rho = largest_eigenvalue(batch.D);
    if (!(rho > 0.0)) throw std::invalid_argument("dca_solve: largest eigenvalue of D is not positive");

    const Matrix H = rho * Matrix::Identity(v, v) - batch.D;
    Matrix A = A0;
    // Columns are independent, so all iterations run on one cache-sized tile
    // of columns before moving to the next.
    constexpr Eigen::Index tile = 256;
    Matrix Y(v, tile);
    for (Eigen::Index first = 0; first < A.cols(); first += tile) {
        const Eigen::Index w = std::min(tile, A.cols() - first);
        auto block = A.middleCols(first, w);
        const auto l = batch.L.middleCols(first, w);
        const auto u = batch.U.middleCols(first, w);
        for (int it = 0; it < iters; ++it) {
            Y.leftCols(w).noalias() = H.lazyProduct(block);
            block = ((Y.leftCols(w) + l) / rho).cwiseMax(0.0).cwiseMin(u);
        }
    }
    return A;
}

} // namespace mvfuse::qp
