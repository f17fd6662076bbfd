#pragma once

#include "mvfuse/common.hpp"

namespace mvfuse::qp {

/// min 1/2 a'Ha - a'c  over the probability simplex.
struct SimplexQP {
    Matrix H;
    Vector c;

    double objective(const Vector& alpha) const { return 0.5 * alpha.dot(H * alpha) - alpha.dot(c); }
};

/// n_e independent box QPs sharing one Hessian:
///   min 1/2 x'Dx - l'x  s.t. 0 <= x <= u,  one (l, u) pair per column.
struct BatchBoxQP {
    Matrix D; // v x v
    Matrix L; // v x n_e
    Matrix U; // v x n_e, upper bounds

    /// Objective of every column of X.
    Vector column_objectives(const Matrix& X) const;
};

/// Largest eigenvalue of a symmetric matrix. Throws if D is not symmetric
/// within 1e-10 (relative to its largest entry).
double largest_eigenvalue(const Matrix& D, double tol = 1e-10);

/// Minimiser of 1/2 eta^2 (d'Hd) + eta (g'd) over (0, eta_max]. Returns eta_max
/// when the quadratic is not convex along d.
double exact_line_search(double dHd, double gd, double eta_max);

double exact_line_search(const Matrix& H, const Vector& g, const Vector& d, double eta_max);

struct AfwOptions {
    double eps = 1e-8;
    int max_iter = 1000;
};

struct AfwResult {
    Vector alpha;
    int iterations = 0;
    double gap = 0.0;     // -g'd at the last evaluated iterate
    bool converged = false;
};

/// Away-step Frank-Wolfe for the standard quadratic program, warm-started from
/// alpha0 (which must lie on the simplex within 1e-10).
AfwResult afw_solve(const SimplexQP& qp, const Vector& alpha0, const AfwOptions& options = {});

/// DCA for the batched box QP: rho = lambda_max(D), then `iters` rounds of
/// A <- clamp(((rho I - D) A + L) / rho, 0, U).
Matrix dca_solve(const BatchBoxQP& batch, const Matrix& A0, int iters = 3);

} // namespace mvfuse::qp
