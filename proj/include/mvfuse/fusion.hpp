#pragma once

#include "mvfuse/common.hpp"
#include "mvfuse/graphs.hpp"
#include "mvfuse/qpsolvers.hpp"

#include <functional>

namespace mvfuse::fusion {

/// Weights of the fusion objective. The view-pair matrix B is never formed:
/// its diagonal is `beta` and every off-diagonal entry is `gamma`.
struct FusionParams {
    double beta = 1.0;
    double gamma = 1e4;
    Vector lambda;          // one positive importance per view; empty means all ones
    int max_outer = 50;
    double rel_tol = 1e-6;
    double afw_eps = 1e-8;
    int afw_max_iter = 1000;
    int dca_iters = 3;

    /// B(i, l) for views i and l.
    double coupling(Eigen::Index i, Eigen::Index l) const { return i == l ? beta : gamma; }

    /// `lambda`, or ones(v) when it is empty.
    Vector lambda_for(Eigen::Index views) const;

    /// Throws std::invalid_argument on negative beta/gamma, nonpositive lambda,
    /// a lambda length other than `views`, or bad iteration controls.
    void validate(Eigen::Index views) const;
};

struct FusionState {
    Matrix A;      // consistent parts, views x edges, 0 <= A <= W
    Vector alpha;  // view weights on the simplex
    Vector s;      // fused edge weights
};

struct FusionResult {
    FusionState state;
    double initial_objective = 0.0;
    std::vector<double> objective_trace; // after each outer sweep
    int iterations = 0;
    bool converged = false;
};

/// Value of the fusion objective over the dense representation:
///   sum_i lambda_i |alpha_i A_i - s|^2
///   + sum_{i,l} B_il lambda_i lambda_l alpha_i alpha_l <W_i - A_i, W_l - A_l>.
double objective_value(const Matrix& W, const FusionState& state, const FusionParams& params);

/// Simplex QP in alpha with A and s fixed: H = 2(T + P), c_i = 2 lambda_i <A_i, s>.
qp::SimplexQP assemble_alpha_qp(const Matrix& W, const Matrix& A, const Vector& s, const FusionParams& params);

/// s = t'A with t = lambda o alpha / sum(lambda); the exact minimiser in s.
Vector update_s(const Matrix& A, const Vector& alpha, const Vector& lambda);

/// Batched box QP in A with alpha and s fixed: D = 2(Q + K), L = 2(t s' + K W), U = W.
qp::BatchBoxQP assemble_A_qp(const Matrix& W, const Vector& alpha, const Vector& s, const FusionParams& params);

/// Called after every outer sweep with the 1-based iteration and objective.
using SweepObserver = std::function<void(int, const FusionState&, double)>;

/// Alternating minimisation over (alpha, s, A) on the row-normalised MVDR.
/// The returned state refers to the normalised weights.
FusionResult learn_consistent_graph(const graphs::MultiViewDenseGraph& mv, const FusionParams& params,
                                    const SweepObserver& observer = {});

} // namespace mvfuse::fusion
