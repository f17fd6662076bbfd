#include "mvfuse/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mvfuse::fusion {

namespace {

void check_dense_shapes(const Matrix& W, const Matrix& A) {
    require_shape(W.rows() == A.rows() && W.cols() == A.cols(), "W and A must have the same shape");
}

// Z(i, l) = B_il * w_i * w_l for a per-view weight vector w.
Matrix coupling_matrix(const FusionParams& params, const Vector& w) {
    const Eigen::Index v = w.size();
    Matrix Z(v, v);
    for (Eigen::Index i = 0; i < v; ++i)
        for (Eigen::Index l = 0; l < v; ++l) Z(i, l) = params.coupling(i, l) * (w(i) * w(l));
    return Z;
}

// (W - A)(W - A)' accumulated over column tiles, so the difference is never
// materialised in full. The lower triangle is mirrored from the upper so the
// result is exactly symmetric.
Matrix inconsistency_gram(const Matrix& W, const Matrix& A) {
    constexpr Eigen::Index tile = 512;
    const Eigen::Index v = W.rows();
    Matrix G = Matrix::Zero(v, v);
    Matrix E(v, tile);
    for (Eigen::Index first = 0; first < W.cols(); first += tile) {
        const Eigen::Index w = std::min(tile, W.cols() - first);
        E.leftCols(w) = W.middleCols(first, w) - A.middleCols(first, w);
        G.noalias() += E.leftCols(w) * E.leftCols(w).transpose();
    }
    G.triangularView<Eigen::StrictlyLower>() = G.transpose();
    return G;
}

} // namespace

Vector FusionParams::lambda_for(Eigen::Index views) const {
    return lambda.size() == 0 ? Vector::Ones(views) : lambda;
}

void FusionParams::validate(Eigen::Index views) const {
    require(std::isfinite(beta) && beta >= 0.0, "beta must be finite and >= 0");
    require(std::isfinite(gamma) && gamma >= 0.0, "gamma must be finite and >= 0");
    if (lambda.size() != 0) {
        require_shape(lambda.size() == views, "lambda has " + std::to_string(lambda.size()) +
                                                  " entries but there are " + std::to_string(views) + " views");
        require(lambda.allFinite() && (lambda.array() > 0.0).all(), "every lambda must be > 0");
    }
    require(max_outer >= 1, "max_outer must be >= 1");
    require(rel_tol >= 0.0, "rel_tol must be >= 0");
    require(afw_eps > 0.0, "afw_eps must be > 0");
    require(afw_max_iter >= 1, "afw_max_iter must be >= 1");
    require(dca_iters >= 1, "dca_iters must be >= 1");
}

double objective_value(const Matrix& W, const FusionState& state, const FusionParams& params) {
    check_dense_shapes(W, state.A);
    const Eigen::Index v = W.rows();
    require_shape(state.alpha.size() == v, "alpha length differs from the view count");
    require_shape(state.s.size() == W.cols(), "s length differs from the edge count");
    const Vector lambda = params.lambda_for(v);
    require_shape(lambda.size() == v, "lambda length differs from the view count");

    const double consistency =
        lambda.dot(((state.A.array().colwise() * state.alpha.array()).rowwise() - state.s.transpose().array())
                       .square()
                       .rowwise()
                       .sum()
                       .matrix());

    const Matrix G = inconsistency_gram(W, state.A);
    const Vector t = lambda.cwiseProduct(state.alpha);
    const double inconsistency = coupling_matrix(params, t).cwiseProduct(G).sum();
    return consistency + inconsistency;
}

qp::SimplexQP assemble_alpha_qp(const Matrix& W, const Matrix& A, const Vector& s, const FusionParams& params) {
    check_dense_shapes(W, A);
    require_shape(s.size() == W.cols(), "s length differs from the edge count");
    const Eigen::Index v = W.rows();
    const Vector lambda = params.lambda_for(v);
    require_shape(lambda.size() == v, "lambda length differs from the view count");

    const Vector h = A.rowwise().squaredNorm();
    const Matrix P = coupling_matrix(params, lambda).cwiseProduct(inconsistency_gram(W, A));

    qp::SimplexQP out;
    out.H = 2.0 * P;
    out.H.diagonal() += 2.0 * lambda.cwiseProduct(h);
    out.c = 2.0 * lambda.cwiseProduct(A * s);
    return out;
}

Vector update_s(const Matrix& A, const Vector& alpha, const Vector& lambda) {
    require_shape(alpha.size() == A.rows() && lambda.size() == A.rows(),
                  "alpha and lambda must have one entry per view");
    const Vector t = lambda.cwiseProduct(alpha) / lambda.sum();
    return A.transpose() * t;
}

qp::BatchBoxQP assemble_A_qp(const Matrix& W, const Vector& alpha, const Vector& s, const FusionParams& params) {
    const Eigen::Index v = W.rows();
    require_shape(alpha.size() == v, "alpha length differs from the view count");
    require_shape(s.size() == W.cols(), "s length differs from the edge count");
    const Vector lambda = params.lambda_for(v);
    require_shape(lambda.size() == v, "lambda length differs from the view count");

    const Vector t = lambda.cwiseProduct(alpha);
    const Matrix K = coupling_matrix(params, t);

    qp::BatchBoxQP out;
    out.D = 2.0 * K;
    out.D.diagonal() += 2.0 * lambda.cwiseProduct(alpha.cwiseAbs2());
    // the rank-one term is added in place to avoid a v x n_e temporary
    out.L.noalias() = K * W;
    out.L.noalias() += t * s.transpose();
    out.L *= 2.0;
    out.U = W;
    return out;
}

FusionResult learn_consistent_graph(const graphs::MultiViewDenseGraph& mv, const FusionParams& params,
                                    const SweepObserver& observer) {
    const Eigen::Index v = mv.W.rows();
    require(v >= 1, "at least one view is required");
    require_shape(static_cast<std::size_t>(mv.W.cols()) == mv.index.size(),
                  "MVDR column count differs from the edge index size");
    params.validate(v);

    const Matrix W = graphs::row_normalize(mv).W;
    const Vector lambda = params.lambda_for(v);

    FusionResult result;
    FusionState& state = result.state;
    state.A = W;
    state.alpha = Vector::Constant(v, 1.0 / static_cast<double>(v));
    state.s = update_s(state.A, state.alpha, lambda);

    const qp::AfwOptions afw{params.afw_eps, params.afw_max_iter};
    double previous = objective_value(W, state, params);
    result.initial_objective = previous;

    for (int iter = 1; iter <= params.max_outer; ++iter) {
        state.alpha = qp::afw_solve(assemble_alpha_qp(W, state.A, state.s, params), state.alpha, afw).alpha;
        state.s = update_s(state.A, state.alpha, lambda);
        state.A = qp::dca_solve(assemble_A_qp(W, state.alpha, state.s, params), state.A, params.dca_iters);

        const double current = objective_value(W, state, params);
        result.objective_trace.push_back(current);
        result.iterations = iter;
        if (observer) observer(iter, state, current);

        if (std::abs(previous - current) / std::max(1.0, previous) < params.rel_tol) {
            result.converged = true;
            break;
        }
        previous = current;
    }
    return result;
}

} // namespace mvfuse::fusion
